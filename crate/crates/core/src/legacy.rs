//! Per-job schedule that follows the high-multiplicity schedule, and the
//! migration ledger measured in original job sizes.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::core::{int, Rational};
use crate::error::{Error, Result};
use crate::grouping::JobId;

/// Per-machine, per-type job counts `σ′(i, j)`.
pub type HmSchedule = Vec<Vec<u32>>;

/// A concrete job with its type and original size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewJob {
    pub id: JobId,
    pub ty: usize,
    pub size: Rational,
}

/// Assignment of concrete jobs to machines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LegacySchedule {
    pub machine_of: BTreeMap<JobId, usize>,
    pub type_of: BTreeMap<JobId, usize>,
    pub size_of: BTreeMap<JobId, Rational>,
}

impl LegacySchedule {
    /// Per-machine, per-type counts over `m` machines and `d` types.
    pub fn counts(&self, m: usize, d: usize) -> HmSchedule {
        let mut out = vec![vec![0u32; d]; m];
        for (id, &i) in &self.machine_of {
            out[i][self.type_of[id]] += 1;
        }
        out
    }

    /// Whether every `(machine, type)` count with type `< d` matches `hm`.
    pub fn follows(&self, hm: &HmSchedule, d: usize) -> bool {
        let c = self.counts(hm.len(), d);
        hm.iter().zip(&c).all(|(a, b)| a[..d] == b[..])
    }

    /// Per-machine loads in original sizes.
    pub fn loads(&self, m: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); m];
        for (id, &i) in &self.machine_of {
            out[i] += &self.size_of[id];
        }
        out
    }
}

/// Builds a legacy schedule that follows `new_hm` on the first `d` types.
///
/// Removed jobs leave first. Where a machine must lose jobs of a type, the
/// smallest (then newest) ones are pulled. Pulled and added jobs then fill
/// the machines that gain jobs of their type. Returns the schedule and `ξ`,
/// the total original size of jobs that changed machine.
pub fn legacy_convert(
    prev: &LegacySchedule,
    prev_hm: &HmSchedule,
    new_hm: &HmSchedule,
    removed: &[JobId],
    added: &[NewJob],
    d: usize,
) -> Result<(LegacySchedule, Rational)> {
    let m = new_hm.len();
    if prev_hm.len() != m {
        return Err(Error::Input("schedules differ in machine count".into()));
    }
    if !prev.follows(prev_hm, d) {
        return Err(Error::Precondition("legacy schedule does not follow the previous schedule".into()));
    }
    let mut next = prev.clone();
    for id in removed {
        if next.machine_of.remove(id).is_none() {
            return Err(Error::NoSuchJob(format!("job {id}")));
        }
        next.type_of.remove(id);
        next.size_of.remove(id);
    }
    let mut pool: Vec<Vec<JobId>> = vec![Vec::new(); d];
    for job in added {
        if job.ty >= d {
            return Err(Error::Input(format!("job type {} out of range", job.ty)));
        }
        next.type_of.insert(job.id, job.ty);
        next.size_of.insert(job.id, job.size.clone());
        pool[job.ty].push(job.id);
    }

    let mut per_cell: BTreeMap<(usize, usize), Vec<JobId>> = BTreeMap::new();
    for (id, &i) in &next.machine_of {
        per_cell.entry((i, next.type_of[id])).or_default().push(*id);
    }
    let mut pulled = Rational::zero();
    for i in 0..m {
        for j in 0..d {
            let have = per_cell.get(&(i, j)).map_or(0, |v| v.len()) as i64;
            let want = new_hm[i][j] as i64;
            if have > want {
                let cell = per_cell.get_mut(&(i, j)).expect("nonempty cell");
                cell.sort_by(|a, b| next.size_of[a].cmp(&next.size_of[b]).then(b.cmp(a)));
                for id in cell.drain(..(have - want) as usize) {
                    next.machine_of.remove(&id);
                    pulled += &next.size_of[&id];
                    pool[j].push(id);
                }
            }
        }
    }
    for i in 0..m {
        for j in 0..d {
            let have = per_cell.get(&(i, j)).map_or(0, |v| v.len()) as i64;
            let want = new_hm[i][j] as i64;
            for _ in have..want {
                let id = pool[j].pop().ok_or_else(|| {
                    Error::Precondition(format!("not enough jobs of type {j} for machine {i}"))
                })?;
                next.machine_of.insert(id, i);
            }
        }
    }
    if pool.iter().any(|v| !v.is_empty()) {
        return Err(Error::Precondition("jobs left without a machine".into()));
    }
    debug_assert!(next.follows(new_hm, d));
    let xi = step_migration(prev, &next);
    debug_assert!(xi <= pulled);
    Ok((next, xi))
}

/// Total original size of jobs present in both schedules whose machine differs.
pub fn step_migration(prev: &LegacySchedule, next: &LegacySchedule) -> Rational {
    prev.machine_of
        .iter()
        .filter(|(id, i)| next.machine_of.get(id).is_some_and(|k| k != *i))
        .map(|(id, _)| prev.size_of[id].clone())
        .sum()
}

/// Movement bound `Σ_{i,t} |Δσ′(i,t)|·maxsize_t` of a high-multiplicity step.
pub fn hm_movement_bound(prev_hm: &HmSchedule, new_hm: &HmSchedule, maxsize: &[Rational]) -> Rational {
    let mut total = Rational::zero();
    for (a, b) in prev_hm.iter().zip(new_hm) {
        for (j, w) in maxsize.iter().enumerate() {
            let diff = (a[j] as i64 - b[j] as i64).abs();
            total += int(diff) * w;
        }
    }
    total
}

/// Migration of one step with its charge `p_j + ΔΦ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepMigration {
    pub xi: Rational,
    pub p: Rational,
    pub delta_phi: Rational,
}

impl StepMigration {
    /// Amortized charge `p_j + ΔΦ`.
    pub fn charge(&self) -> Rational {
        &self.p + &self.delta_phi
    }
}

/// Running record of per-step migration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MigrationLedger {
    pub steps: Vec<StepMigration>,
    pub cumulative: Rational,
}

impl MigrationLedger {
    pub fn record(&mut self, xi: Rational, p: Rational, delta_phi: Rational) {
        self.cumulative += &xi;
        self.steps.push(StepMigration { xi, p, delta_phi });
    }

    /// Largest `ξ / p_j` over all steps.
    pub fn beta(&self) -> Rational {
        self.steps
            .iter()
            .filter(|s| s.p.is_positive())
            .map(|s| &s.xi / &s.p)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Largest `ξ / (p_j + ΔΦ)` over steps with a positive charge.
    pub fn beta_bar(&self) -> Rational {
        self.steps
            .iter()
            .filter(|s| s.charge().is_positive())
            .map(|s| &s.xi / s.charge())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Steps with positive migration but a non-positive charge.
    pub fn uncharged(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.xi.is_positive() && !s.charge().is_positive())
            .count()
    }
}
