//! `pmax`-anchored rounding of large job sizes to integer engine units, rounding
//! of speeds onto the `(1+ε)` grid, and mapping schedules back to true sizes.

use std::collections::BTreeMap;

use num::Zero;

use crate::core::{ceil_i64, check_epsilon, floor_i64, Objective, PowerGrid, Rational};
use crate::error::{Error, Result};
use crate::grouping::JobId;

/// Rounds a large job `p ∈ [ε·pmax, pmax]` to an integer in `[1, 1/ε]`.
///
/// Makespan rounds down to a grid value `(1+ε)^i·εpmax`, then down to a
/// multiple of `εpmax`; covering rounds up through both stages, capped at
/// `pmax`. The result is expressed in units of `εpmax`.
pub fn round_job(p: &Rational, epsilon: &Rational, pmax: &Rational, objective: Objective) -> Result<i64> {
    check_epsilon(epsilon)?;
    let unit = epsilon * pmax;
    if *p < unit || p > pmax {
        return Err(Error::Domain(format!(
            "job size {} outside [ε·pmax, pmax]; small jobs go through grouping",
            crate::core::fmt_rational(p)
        )));
    }
    let grid = PowerGrid::new(epsilon)?;
    let ratio = p / &unit;
    Ok(match objective {
        Objective::Makespan => floor_i64(&grid.floor(&ratio)?),
        Objective::Covering => {
            let up = grid.next(&ratio)?.min(epsilon.recip());
            ceil_i64(&up)
        }
    })
}

/// Rounds a speed onto the grid: up for makespan, down for covering.
pub fn round_speed(s: &Rational, epsilon: &Rational, objective: Objective) -> Result<Rational> {
    let grid = PowerGrid::new(epsilon)?;
    match objective {
        Objective::Makespan => grid.next(s),
        Objective::Covering => grid.floor(s),
    }
}

/// Every value [`round_job`] can return, ascending.
pub fn rounded_types(epsilon: &Rational, objective: Objective) -> Result<Vec<i64>> {
    check_epsilon(epsilon)?;
    let grid = PowerGrid::new(epsilon)?;
    let top = epsilon.recip();
    let mut out = Vec::new();
    let mut k = 0i64;
    loop {
        let g = grid.pow(k);
        let v = match objective {
            Objective::Makespan if g <= top => floor_i64(&g),
            Objective::Covering if g <= top => ceil_i64(&g),
            Objective::Covering => floor_i64(&top),
            Objective::Makespan => break,
        };
        out.push(v);
        if g > top {
            break;
        }
        k += 1;
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Bound `(1/ε)·(⌈log_{1+ε}(1/ε)⌉ + 2)` on the number of rounded sizes.
pub fn type_count_bound(epsilon: &Rational) -> Result<i64> {
    let grid = PowerGrid::new(epsilon)?;
    let inv = epsilon.recip();
    Ok(floor_i64(&inv) * (grid.ceil_exp(&inv)? + 2))
}

/// A concrete schedule: machine and size of every job.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConcreteSchedule {
    pub machine_of: BTreeMap<JobId, usize>,
    pub size_of: BTreeMap<JobId, Rational>,
}

impl ConcreteSchedule {
    /// Per-machine loads over `m` machines.
    pub fn loads(&self, m: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); m];
        for (id, &i) in &self.machine_of {
            out[i] += &self.size_of[id];
        }
        out
    }
}

/// Keeps every job on its machine and replaces rounded sizes by original ones.
pub fn unround_schedule(
    rounded: &ConcreteSchedule,
    original: &BTreeMap<JobId, Rational>,
) -> Result<ConcreteSchedule> {
    let mut size_of = BTreeMap::new();
    for id in rounded.machine_of.keys() {
        let p = original
            .get(id)
            .ok_or_else(|| Error::Precondition(format!("job {id} has no original size")))?;
        size_of.insert(*id, p.clone());
    }
    Ok(ConcreteSchedule {
        machine_of: rounded.machine_of.clone(),
        size_of,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{int, rat};

    const MK: Objective = Objective::Makespan;
    const CV: Objective = Objective::Covering;

    #[test]
    fn round_job_examples() {
        let (e, pm) = (rat(1, 2), int(8));
        assert_eq!(round_job(&int(5), &e, &pm, MK).unwrap(), 1);
        assert_eq!(round_job(&int(8), &e, &pm, MK).unwrap(), 1);
        assert_eq!(round_job(&int(4), &e, &pm, MK).unwrap(), 1);
        assert_eq!(round_job(&int(4), &e, &pm, CV).unwrap(), 1);
        assert_eq!(round_job(&int(5), &e, &pm, CV).unwrap(), 2);
        assert!(matches!(round_job(&int(3), &e, &pm, MK), Err(Error::Domain(_))));
    }

    #[test]
    fn round_speed_examples() {
        let e = rat(1, 2);
        assert_eq!(round_speed(&int(1), &e, MK).unwrap(), int(1));
        assert_eq!(round_speed(&rat(13, 10), &e, MK).unwrap(), rat(3, 2));
        assert_eq!(round_speed(&rat(13, 10), &e, CV).unwrap(), int(1));
    }

    #[test]
    fn unround_examples() {
        let mut r = ConcreteSchedule::default();
        r.machine_of.insert(0, 0);
        r.size_of.insert(0, int(4));
        let orig: BTreeMap<JobId, Rational> = [(0, int(5))].into_iter().collect();
        let u = unround_schedule(&r, &orig).unwrap();
        assert_eq!(u.loads(1), vec![int(5)]);
        let ratio = int(5) / int(4);
        assert!(ratio <= rat(27, 8));
        let empty = unround_schedule(&ConcreteSchedule::default(), &BTreeMap::new()).unwrap();
        assert!(empty.machine_of.is_empty());
        assert!(matches!(unround_schedule(&r, &BTreeMap::new()), Err(Error::Precondition(_))));
    }

    /// Direct evaluation of both rounding stages on a dense lattice.
    #[test]
    fn rounding_direction_and_factor() {
        for den in [1i64, 2, 3] {
            let e = rat(1, den);
            for pm in [1i64, 3, 4, 8] {
                let pmax = int(pm);
                let unit = &e * &pmax;
                let types_mk = rounded_types(&e, MK).unwrap();
                let types_cv = rounded_types(&e, CV).unwrap();
                let f3 = (int(1) + &e) * (int(1) + &e) * (int(1) + &e);
                let mut last = (0, 0);
                for k in 0..=48 {
                    let p = &unit + (&pmax - &unit) * rat(k, 48);
                    let a_k = round_job(&p, &e, &pmax, MK).unwrap();
                    let b_k = round_job(&p, &e, &pmax, CV).unwrap();
                    let a = int(a_k) * &unit;
                    let b = int(b_k) * &unit;
                    assert!(a <= p && p <= &a * &f3);
                    assert!(b >= p && b <= &p * &f3);
                    assert!(types_mk.contains(&a_k) && types_cv.contains(&b_k));
                    assert!(a_k >= last.0 && b_k >= last.1);
                    last = (a_k, b_k);
                    if den <= 2 {
                        assert_eq!(round_job(&a, &e, &pmax, MK).unwrap(), a_k);
                        assert_eq!(round_job(&b, &e, &pmax, CV).unwrap(), b_k);
                    }
                }
                let bound = type_count_bound(&e).unwrap();
                assert!(types_mk.len() as i64 <= bound && types_cv.len() as i64 <= bound);
                assert!(types_mk.iter().all(|&t| 1 <= t && int(t) <= e.recip()));
                assert!(types_cv.iter().all(|&t| 1 <= t && int(t) <= e.recip()));
            }
        }
    }

    #[test]
    fn small_epsilon_limits() {
        // The integer stage can lose more than (1+ε)³ once ε ≤ 1/4.
        let e = rat(1, 4);
        let p = rat(12, 5);
        assert_eq!(round_job(&p, &e, &int(4), MK).unwrap(), 1);
        assert!(p > rat(125, 64));
        // Re-rounding a rounded size is not stable at ε = 1/3.
        let e = rat(1, 3);
        let p = rat(29, 10);
        assert_eq!(round_job(&p, &e, &int(3), MK).unwrap(), 2);
        assert_eq!(round_job(&int(2), &e, &int(3), MK).unwrap(), 1);
    }
}
