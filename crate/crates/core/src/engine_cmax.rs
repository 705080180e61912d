//! Dynamic makespan state machine: insertion, blue-to-red recolouring, removal.

use num::Zero;

use crate::core::{int, speed_dot, Rational};
use crate::error::{Error, Result};
use crate::lexsolver::{Oracle, State};

fn check_type(oracle: &Oracle, j: usize) -> Result<()> {
    if j >= oracle.instance().d() {
        return Err(Error::Input(format!("job type {j} out of range")));
    }
    Ok(())
}

/// Inserts one job of type `j` into a valid state.
pub fn insert(oracle: &mut Oracle, state: &State, j: usize) -> Result<State> {
    check_type(oracle, j)?;
    let inst = oracle.instance().clone();
    let nu = state.jobs.clone();
    let mut nu_plus = nu.clone();
    nu_plus[j] += 1;
    let opt_plus_old = oracle.opt_plus(&nu)?;
    let opt_plus_new = oracle.opt_plus(&nu_plus)?;
    let pj = int(inst.sizes()[j]);
    let mut s = state.clone();

    let candidate = State {
        jobs: nu_plus.clone(),
        ..s.clone()
    };
    if opt_plus_new == opt_plus_old {
        // Freeness is sufficient but not necessary: the job may fit on a red machine.
        if !oracle.is_valid(&candidate)? && !oracle.is_free(&s, &pj)? {
            let cap = inst.one_plus_eps() * &opt_plus_new * speed_dot(inst.speeds(), &s.blue);
            s.alpha = std::cmp::min(cap, &s.alpha + &pj);
            if !oracle.is_free(&s, &pj)? {
                let t = oracle
                    .crit(&opt_plus_old)
                    .expect("a red critical machine exists when the state is not p_j-free");
                assert!(
                    s.blue[t] < inst.counts()[t],
                    "critical type {t} has no red machine left"
                );
                s.blue[t] += 1;
                s.alpha = &s.alpha + &inst.speeds()[t] * &opt_plus_old + inst.pmax();
            }
        }
    } else {
        if oracle.is_valid(&candidate)? {
            let opt_minus_new = oracle.opt_minus(&nu_plus)?;
            s.alpha = inst.one_plus_eps() * opt_minus_new * speed_dot(inst.speeds(), &s.blue);
        } else {
            s.alpha = &s.alpha + &pj;
        }
    }
    s.jobs = nu_plus;
    Ok(s)
}

/// Recolours up to `k` blue machines of the critical type red.
/// May leave `α` negative; only [`remove`] calls it and restores `α`.
pub fn try_btr(oracle: &mut Oracle, k: u32, state: &State) -> Result<State> {
    let mut s = state.clone();
    if s.blue.iter().all(|&b| b == 0) {
        return Ok(s);
    }
    let opt_plus = oracle.opt_plus(&s.jobs)?;
    if let Some(t) = oracle.crit(&opt_plus) {
        let inst = oracle.instance();
        let kk = k.min(s.blue[t]);
        s.blue[t] -= kk;
        s.alpha = &s.alpha - inst.one_plus_eps() * int(kk as i64) * &inst.speeds()[t] * &opt_plus;
    }
    Ok(s)
}

/// Removes one job of type `j` from a valid state.
pub fn remove(oracle: &mut Oracle, state: &State, j: usize) -> Result<State> {
    check_type(oracle, j)?;
    if state.jobs[j] == 0 {
        return Err(Error::NoSuchJob(format!("no job of type {j}")));
    }
    let inst = oracle.instance().clone();
    let nu = state.jobs.clone();
    let mut nu_minus = nu.clone();
    nu_minus[j] -= 1;
    let opt_plus_old = oracle.opt_plus(&nu)?;
    let opt_plus_new = oracle.opt_plus(&nu_minus)?;
    let t = oracle.crit(&opt_plus_new);
    let mut s = state.clone();

    if opt_plus_new < opt_plus_old {
        s = try_btr(oracle, inst.m(), &s)?;
        s.alpha = inst.one_plus_eps() * &opt_plus_new * speed_dot(inst.speeds(), &s.blue);
    }
    s.jobs = nu_minus;

    let slack = inst.epsilon() * inst.ell() + inst.pmax();
    if let Some(tt) = t {
        if s.blue[tt] > 0 && oracle.is_free(&s, &slack)? {
            s = try_btr(oracle, 1, &s)?;
            // With a single critical blue machine the drop can overshoot the
            // blue load that is actually needed; keep α at a valid value.
            if let Some(need) = oracle.min_blue_load(&s)? {
                s.alpha = std::cmp::max(s.alpha, int(need));
            }
        }
    }
    let crit_clear = t.is_none_or(|tt| s.blue[tt] == 0);
    if crit_clear && oracle.is_free(&s, inst.pmax())? {
        let opt_minus = oracle.opt_minus(&s.jobs)?;
        let floor = inst.one_plus_eps() * opt_minus * speed_dot(inst.speeds(), &s.blue);
        s.alpha = std::cmp::max(&s.alpha - inst.pmax(), floor);
    }
    debug_assert!(s.alpha >= Rational::zero());
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{Instance, Objective};

    fn oracle(speed: i64) -> Oracle {
        Oracle::new(
            Instance::new(Objective::Makespan, int(1), int(1), vec![1], vec![int(speed)], vec![1]).unwrap(),
        )
    }

    fn st(a: i64, b: u32, n: u32) -> State {
        State {
            alpha: int(a),
            blue: vec![b],
            jobs: vec![n],
        }
    }

    #[test]
    fn insert_examples() {
        let mut o = oracle(1);
        assert_eq!(insert(&mut o, &st(0, 0, 0), 0).unwrap(), st(0, 0, 1));
        let mut o4 = oracle(4);
        assert_eq!(insert(&mut o4, &st(8, 1, 5), 0).unwrap(), st(8, 1, 6));
        assert_eq!(insert(&mut o4, &st(5, 1, 5), 0).unwrap(), st(6, 1, 6));
        assert!(matches!(insert(&mut o4, &st(5, 1, 5), 3), Err(Error::Input(_))));
    }

    #[test]
    fn try_btr_examples() {
        let mut o4 = oracle(4);
        assert_eq!(try_btr(&mut o4, 1, &st(6, 1, 6)).unwrap(), st(-2, 0, 6));
        assert_eq!(try_btr(&mut o4, 5, &st(3, 0, 2)).unwrap(), st(3, 0, 2));
        let mut o8 = oracle(8);
        // crit(OPT⁺) is none for speed 8 at OPT⁺ = 1 (ℓ = 4).
        assert_eq!(try_btr(&mut o8, 1, &st(16, 1, 9)).unwrap(), st(16, 1, 9));
    }

    #[test]
    fn remove_examples() {
        let mut o = oracle(1);
        assert_eq!(remove(&mut o, &st(0, 0, 1), 0).unwrap(), st(0, 0, 0));
        let mut o4 = oracle(4);
        assert_eq!(remove(&mut o4, &st(6, 1, 6), 0).unwrap(), st(6, 1, 5));
        let mut o8 = oracle(8);
        assert_eq!(remove(&mut o8, &st(16, 1, 9), 0).unwrap(), st(8, 1, 8));
        assert!(matches!(remove(&mut o, &st(0, 0, 0), 0), Err(Error::NoSuchJob(_))));
    }

    #[test]
    fn single_critical_recolour_keeps_alpha_valid() {
        let inst = Instance::new(
            Objective::Makespan,
            int(1),
            int(1),
            vec![1],
            vec![int(4), int(2), int(1)],
            vec![1, 1, 1],
        )
        .unwrap();
        let mut o = Oracle::new(inst);
        let before = State { alpha: int(7), blue: vec![1, 0, 0], jobs: vec![6] };
        assert!(o.is_valid(&before).unwrap());
        let after = remove(&mut o, &before, 0).unwrap();
        assert!(after.alpha >= Rational::zero());
        assert!(o.is_valid(&after).unwrap());
    }
}
