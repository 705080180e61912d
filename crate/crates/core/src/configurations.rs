//! Configuration sets `C(u)` and the total order `⊑` on (machine type, configuration) pairs.

use std::cmp::Ordering;

use crate::core::{cmp_ratio, floor_i64, Objective, Rational};
use crate::error::{Error, Result};

/// Default guard on the number of enumerated configurations.
pub const DEFAULT_CONFIG_CAP: usize = 2_000_000;

/// A multiset of job types together with its load `p⊺c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub counts: Vec<u32>,
    pub load: i64,
}

impl Configuration {
    /// The empty configuration over `d` job types.
    pub fn zero(d: usize) -> Self {
        Configuration {
            counts: vec![0; d],
            load: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.load == 0 && self.counts.iter().all(|&c| c == 0)
    }
}

/// All `c ∈ ℕ₀^d` with `p⊺c ≤ u`, in ascending lexicographic order.
pub fn enumerate_configs(p: &[i64], u: &Rational, cap: usize) -> Result<Vec<Configuration>> {
    enumerate_bounded(p, u, None, cap)
}

/// Like [`enumerate_configs`], additionally requiring `c ≤ upper` componentwise.
pub fn enumerate_bounded(
    p: &[i64],
    u: &Rational,
    upper: Option<&[u32]>,
    cap: usize,
) -> Result<Vec<Configuration>> {
    if p.iter().any(|&x| x <= 0) {
        return Err(Error::Domain("configuration sizes must be positive".into()));
    }
    let budget = if *u < Rational::from_integer(0.into()) {
        return Ok(Vec::new());
    } else {
        floor_i64(u)
    };
    let mut out = Vec::new();
    let mut cur = vec![0u32; p.len()];
    rec(p, budget, upper, 0, 0, &mut cur, &mut out, cap)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn rec(
    p: &[i64],
    budget: i64,
    upper: Option<&[u32]>,
    j: usize,
    load: i64,
    cur: &mut Vec<u32>,
    out: &mut Vec<Configuration>,
    cap: usize,
) -> Result<()> {
    if j == p.len() {
        if out.len() >= cap {
            return Err(Error::Capacity(format!(
                "more than {cap} configurations; raise the cap or shrink the instance"
            )));
        }
        out.push(Configuration {
            counts: cur.clone(),
            load,
        });
        return Ok(());
    }
    let mut k = 0u32;
    loop {
        let l = load + k as i64 * p[j];
        if l > budget || upper.is_some_and(|up| k > up[j]) {
            break;
        }
        cur[j] = k;
        rec(p, budget, upper, j + 1, l, cur, out, cap)?;
        k += 1;
    }
    cur[j] = 0;
    Ok(())
}

/// A variable index `(t, c)` of the configuration ILP with its completion time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedIndex {
    pub t: usize,
    pub config: Configuration,
    pub speed: Rational,
}

impl OrderedIndex {
    /// Completion time `p⊺c / s_t`.
    pub fn completion(&self) -> Rational {
        Rational::from_integer(self.config.load.into()) / &self.speed
    }
}

/// The order `⊑`: completion descending (makespan) or ascending (covering),
/// then smaller type index, then lexicographically smaller configuration.
pub fn compare(a: &OrderedIndex, b: &OrderedIndex, objective: Objective) -> Ordering {
    let by_completion = cmp_ratio(a.config.load, &a.speed, b.config.load, &b.speed);
    let primary = match objective {
        Objective::Makespan => by_completion.reverse(),
        Objective::Covering => by_completion,
    };
    primary
        .then(a.t.cmp(&b.t))
        .then_with(|| a.config.counts.cmp(&b.config.counts))
}

/// Sorts indices by `⊑`.
pub fn sort_indices(indices: &mut [OrderedIndex], objective: Objective) {
    indices.sort_by(|a, b| compare(a, b, objective));
}
