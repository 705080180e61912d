//! Deterministic pseudo-random trace generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core::{ceil_i64, check_epsilon, floor_i64, int, Objective, PowerGrid, Rational};
use crate::error::{Error, Result};
use crate::harness::trace::{Event, EventTrace, Op};

/// Generator parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    pub seed: u64,
    pub machines: usize,
    pub steps: usize,
    pub pmax: Rational,
    pub epsilon: Rational,
    /// Probability that an inserted job is small (`p < ε·pmax`).
    pub small_prob: f64,
    pub objective: Objective,
    /// Live-job ceiling; at the ceiling the next event is a removal.
    pub max_live: usize,
    /// Large sizes are integers in `[⌈ε·pmax⌉, pmax]` instead of quarter-grid rationals.
    pub integral: bool,
    /// Speed exponents `k` of `(1+ε)^k` are drawn from this inclusive range.
    pub speed_exponents: (i64, i64),
}

impl GenParams {
    pub fn new(seed: u64, machines: usize, steps: usize, pmax: Rational, epsilon: Rational, objective: Objective) -> Self {
        GenParams {
            seed,
            machines,
            steps,
            pmax,
            epsilon,
            small_prob: 0.0,
            objective,
            max_live: 10,
            integral: false,
            speed_exponents: (-1, 2),
        }
    }
}

/// Builds a trace; removals only ever name a present size.
pub fn generate(params: &GenParams) -> Result<EventTrace> {
    check_epsilon(&params.epsilon)?;
    if params.machines == 0 || params.max_live == 0 || params.pmax <= int(0) {
        return Err(Error::Input("machines, max_live and pmax must be positive".into()));
    }
    if !(0.0..=1.0).contains(&params.small_prob) {
        return Err(Error::Input("small_prob must lie in [0, 1]".into()));
    }
    let (k_lo, k_hi) = params.speed_exponents;
    if k_lo > k_hi {
        return Err(Error::Input("empty speed exponent range".into()));
    }
    let unit = &params.epsilon * &params.pmax;
    if params.integral && ceil_i64(&unit) > floor_i64(&params.pmax) {
        return Err(Error::Input("no integer size in [ε·pmax, pmax]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let grid = PowerGrid::new(&params.epsilon)?;
    let speeds = (0..params.machines)
        .map(|_| grid.pow(rng.gen_range(k_lo..=k_hi)))
        .collect();

    let mut live: Vec<Rational> = Vec::new();
    let mut events = Vec::with_capacity(params.steps);
    for _ in 0..params.steps {
        let insert = live.is_empty() || (live.len() < params.max_live && rng.gen_bool(0.6));
        if insert {
            let size = if params.small_prob > 0.0 && rng.gen_bool(params.small_prob) {
                &unit * Rational::new(rng.gen_range(1..8).into(), 8.into())
            } else if params.integral {
                int(rng.gen_range(ceil_i64(&unit)..=floor_i64(&params.pmax)))
            } else {
                // Quarter steps across [ε·pmax, pmax].
                &unit + (&params.pmax - &unit) * Rational::new(rng.gen_range(0..=4).into(), 4.into())
            };
            live.push(size.clone());
            events.push(Event { op: Op::Insert, size });
        } else {
            let size = live.swap_remove(rng.gen_range(0..live.len()));
            events.push(Event { op: Op::Remove, size });
        }
    }
    Ok(EventTrace {
        objective: params.objective,
        epsilon: params.epsilon.clone(),
        pmax: params.pmax.clone(),
        speeds,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::rat;

    fn base() -> GenParams {
        GenParams::new(7, 3, 60, int(8), rat(1, 2), Objective::Makespan)
    }

    #[test]
    fn deterministic() {
        assert_eq!(generate(&base()).unwrap(), generate(&base()).unwrap());
        let mut other = base();
        other.seed = 8;
        assert_ne!(generate(&base()).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn large_only_and_live_cap() {
        let t = generate(&base()).unwrap();
        let mut live = 0i64;
        for e in &t.events {
            assert!(e.size >= int(4) && e.size <= int(8));
            live += if e.op == Op::Insert { 1 } else { -1 };
            assert!((0..=10).contains(&live));
        }
    }

    #[test]
    fn empty_and_small() {
        let mut p = base();
        p.steps = 0;
        assert!(generate(&p).unwrap().events.is_empty());
        p.steps = 100;
        p.small_prob = 1.0;
        assert!(generate(&p).unwrap().events.iter().all(|e| e.size < int(4)));
        p.small_prob = 0.0;
        p.integral = true;
        assert!(generate(&p).unwrap().events.iter().all(|e| e.size.is_integer()));
    }
}
