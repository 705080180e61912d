//! Greedy placement of the blue jobs `νᵇ` onto the blue machines, keeping every
//! machine within `pmax` of its speed-proportional share of the blue load.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::core::{dot, int, Rational};
use crate::error::{Error, Result};

/// Job counts per concrete blue machine.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlueAssignment {
    pub per_machine: BTreeMap<usize, Vec<u32>>,
}

impl BlueAssignment {
    /// Load `p⊺σ_i` of machine `i` (0 if absent).
    pub fn load(&self, i: usize, p: &[i64]) -> i64 {
        self.per_machine.get(&i).map_or(0, |v| dot(p, v))
    }

    /// Total job vector over all machines.
    pub fn total(&self, d: usize) -> Vec<u32> {
        let mut out = vec![0u32; d];
        for v in self.per_machine.values() {
            for (o, &c) in out.iter_mut().zip(v) {
                *o += c;
            }
        }
        out
    }
}

/// Proportional share `A = p⊺νᵇ / Σ s_i` over the blue machines.
pub fn share(blue: &[(usize, Rational)], total_load: i64) -> Rational {
    let s: Rational = blue.iter().map(|(_, s)| s.clone()).sum();
    if s.is_zero() {
        Rational::zero()
    } else {
        int(total_load) / s
    }
}

/// Largest deviation `|load_i − s_i·A|` over the blue machines.
pub fn max_deviation(a: &BlueAssignment, blue: &[(usize, Rational)], p: &[i64]) -> Rational {
    let total: i64 = blue.iter().map(|(i, _)| a.load(*i, p)).sum();
    let share = share(blue, total);
    blue.iter()
        .map(|(i, s)| (int(a.load(*i, p)) - s * &share).abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Signed deficit `s_i·A − load_i` of every blue machine, in `blue` order.
fn deficits(loads: &[i64], blue: &[(usize, Rational)], share: &Rational) -> Vec<Rational> {
    blue.iter()
        .zip(loads)
        .map(|((_, s), &l)| s * share - int(l))
        .collect()
}

/// Position of the maximum (ties to the lowest machine ID, i.e. first position).
fn argmax(v: &[Rational]) -> usize {
    let mut best = 0;
    for k in 1..v.len() {
        if v[k] > v[best] {
            best = k;
        }
    }
    best
}

/// Moves the assignment to the target blue vector on the given blue machines.
///
/// `blue` lists `(machine ID, speed)` sorted by ID. Returns the new assignment
/// and the moved load: total size of jobs that changed machine.
pub fn sync(
    prev: &BlueAssignment,
    target: &[u32],
    blue: &[(usize, Rational)],
    p: &[i64],
    pmax: &Rational,
) -> Result<(BlueAssignment, i64)> {
    let d = p.len();
    if target.len() != d {
        return Err(Error::Input("target length differs from the number of job types".into()));
    }
    if let Some(j) = (0..d).find(|&j| target[j] > 0 && int(p[j]) > *pmax) {
        return Err(Error::Input(format!("job size {} exceeds pmax", p[j])));
    }
    if blue.is_empty() {
        if target.iter().any(|&c| c > 0) {
            return Err(Error::Infeasible("blue jobs but no blue machine".into()));
        }
        return Ok((BlueAssignment::default(), 0));
    }
    let prev_total = prev.total(d);

    // Machines that stay blue keep their jobs; the rest are pulled out.
    let mut rows: Vec<Vec<u32>> = blue
        .iter()
        .map(|(i, _)| prev.per_machine.get(i).cloned().unwrap_or_else(|| vec![0; d]))
        .collect();
    let share_target = share(blue, dot(p, target));
    let mut current = vec![0u32; d];
    for r in &rows {
        for j in 0..d {
            current[j] += r[j];
        }
    }

    // Surplus jobs leave from the machine with the largest surplus holding them.
    for j in 0..d {
        while current[j] > target[j] {
            let loads: Vec<i64> = rows.iter().map(|r| dot(p, r)).collect();
            let def = deficits(&loads, blue, &share_target);
            let k = (0..rows.len())
                .filter(|&k| rows[k][j] > 0)
                .min_by(|&a, &b| def[a].cmp(&def[b]).then(a.cmp(&b)))
                .expect("a machine holds the surplus type");
            rows[k][j] -= 1;
            current[j] -= 1;
        }
    }

    // Missing jobs, largest first, go to the machine of maximum deficit.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| p[b].cmp(&p[a]).then(a.cmp(&b)));
    let mut loads: Vec<i64> = rows.iter().map(|r| dot(p, r)).collect();
    for &j in &order {
        while current[j] < target[j] {
            let k = argmax(&deficits(&loads, blue, &share_target));
            rows[k][j] += 1;
            loads[k] += p[j];
            current[j] += 1;
        }
    }

    // Rebalance single jobs while some machine is off by more than pmax.
    // Each move strictly lowers Σ (load_i − s_i·A)², so the loop terminates.
    loop {
        let def = deficits(&loads, blue, &share_target);
        if def.iter().all(|x| x.abs() <= *pmax) {
            break;
        }
        let to = argmax(&def);
        let from = (0..rows.len())
            .min_by(|&a, &b| def[a].cmp(&def[b]).then(a.cmp(&b)))
            .expect("nonempty");
        let held: Vec<usize> = (0..d).filter(|&j| rows[from][j] > 0).collect();
        let fits = held
            .iter()
            .copied()
            .filter(|&j| int(p[j]) - &def[to] <= *pmax)
            .max_by(|&a, &b| p[a].cmp(&p[b]).then(b.cmp(&a)));
        let j = fits
            .or_else(|| held.iter().copied().min_by(|&a, &b| p[a].cmp(&p[b]).then(a.cmp(&b))))
            .expect("the max-surplus machine holds a job");
        rows[from][j] -= 1;
        rows[to][j] += 1;
        loads[from] -= p[j];
        loads[to] += p[j];
    }

    let mut next = BlueAssignment::default();
    for ((i, _), r) in blue.iter().zip(rows) {
        if r.iter().any(|&c| c > 0) {
            next.per_machine.insert(*i, r);
        }
    }
    Ok((next.clone(), moved_load(prev, &next, &prev_total, target, p)))
}

/// Minimal migration consistent with the per-machine counts: jobs that
/// appear on a machine beyond its previous count, minus true insertions.
pub fn moved_load(
    prev: &BlueAssignment,
    next: &BlueAssignment,
    prev_total: &[u32],
    target: &[u32],
    p: &[i64],
) -> i64 {
    let d = p.len();
    let mut arrivals = vec![0i64; d];
    for (i, r) in &next.per_machine {
        let before = prev.per_machine.get(i);
        for j in 0..d {
            let b = before.map_or(0, |v| v[j]);
            arrivals[j] += (r[j] as i64 - b as i64).max(0);
        }
    }
    (0..d)
        .map(|j| {
            let inserted = (target[j] as i64 - prev_total[j] as i64).max(0);
            (arrivals[j] - inserted).max(0) * p[j]
        })
        .sum()
}
