//! Exact `OPT*` by exhaustive assignment with branch and bound.

use std::cmp::Ordering;

use num::{BigInt, Integer, One, ToPrimitive, Zero};

use crate::core::{Objective, Rational};
use crate::error::{Error, Result};

/// Default cap on the number of jobs.
pub const DEFAULT_ORACLE_CAP: usize = 10;

/// Optimal makespan or minimum completion time of `sizes` on machines with
/// the given speeds. Zero without jobs.
pub fn brute_force_opt(
    sizes: &[Rational],
    speeds: &[Rational],
    objective: Objective,
    cap: usize,
) -> Result<Rational> {
    if sizes.len() > cap {
        return Err(Error::Capacity(format!("{} jobs exceed the oracle cap {cap}", sizes.len())));
    }
    if speeds.is_empty() {
        return Err(Error::Input("no machines".into()));
    }
    if sizes.is_empty() {
        return Ok(Rational::zero());
    }
    // Scale everything to integers; completion times compare by cross-multiplication.
    let lcm = |v: &[Rational]| v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let (ls, lv) = (lcm(sizes), lcm(speeds));
    let to_i = |x: &Rational, l: &BigInt| -> Result<i128> {
        (x * Rational::from_integer(l.clone()))
            .to_integer()
            .to_i128()
            .ok_or_else(|| Error::Capacity("oracle values overflow".into()))
    };
    let mut p: Vec<i128> = sizes.iter().map(|x| to_i(x, &ls)).collect::<Result<_>>()?;
    p.sort_unstable_by(|a, b| b.cmp(a));
    let s: Vec<i128> = speeds.iter().map(|x| to_i(x, &lv)).collect::<Result<_>>()?;
    let mut search = Search {
        p: &p,
        s: &s,
        objective,
        suffix: p.iter().rev().scan(0i128, |acc, &x| { *acc += x; Some(*acc) }).collect::<Vec<_>>().into_iter().rev().chain([0]).collect(),
        loads: vec![0; s.len()],
        best: None,
    };
    search.run(0);
    let (l, i) = search.best.expect("some assignment exists");
    // Completion `l / s_i` in original units: (l / ls) / (s_i / lv).
    Ok(Rational::new(BigInt::from(l) * &lv, BigInt::from(s[i]) * &ls))
}

struct Search<'a> {
    p: &'a [i128],
    s: &'a [i128],
    objective: Objective,
    /// `suffix[k] = Σ_{j ≥ k} p_j`.
    suffix: Vec<i128>,
    loads: Vec<i128>,
    /// Best value as `(load, machine)`, compared as `load / s_machine`.
    best: Option<(i128, usize)>,
}

impl Search<'_> {
    fn cmp(&self, a: (i128, usize), b: (i128, usize)) -> Ordering {
        (a.0 * self.s[b.1]).cmp(&(b.0 * self.s[a.1]))
    }

    fn value(&self) -> (i128, usize) {
        let it = (0..self.s.len()).map(|i| (self.loads[i], i));
        match self.objective {
            Objective::Makespan => it.max_by(|&a, &b| self.cmp(a, b)),
            Objective::Covering => it.min_by(|&a, &b| self.cmp(a, b)),
        }
        .expect("nonempty machines")
    }

    fn better(&self, v: (i128, usize)) -> bool {
        match self.best {
            None => true,
            Some(b) => match self.objective {
                Objective::Makespan => self.cmp(v, b) == Ordering::Less,
                Objective::Covering => self.cmp(v, b) == Ordering::Greater,
            },
        }
    }

    /// Whether the partial assignment can still beat the incumbent.
    fn promising(&self, k: usize) -> bool {
        let Some(b) = self.best else { return true };
        match self.objective {
            // Loads only grow, so the current makespan is a lower bound.
            Objective::Makespan => self.better(self.value()),
            // Each machine can at best receive all remaining jobs.
            Objective::Covering => (0..self.s.len())
                .all(|i| self.cmp((self.loads[i] + self.suffix[k], i), b) == Ordering::Greater),
        }
    }

    fn run(&mut self, k: usize) {
        if k == self.p.len() {
            let v = self.value();
            if self.better(v) {
                self.best = Some(v);
            }
            return;
        }
        if !self.promising(k) {
            return;
        }
        for i in 0..self.s.len() {
            // Machines with equal speed and load are interchangeable.
            if (0..i).any(|h| self.s[h] == self.s[i] && self.loads[h] == self.loads[i]) {
                continue;
            }
            self.loads[i] += self.p[k];
            self.run(k + 1);
            self.loads[i] -= self.p[k];
        }
    }
}
