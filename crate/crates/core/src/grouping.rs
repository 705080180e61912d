//! Dynamic grouping of small jobs into frames of size `ε·pmax`, the frame
//! potential `Φ`, and the placement of small jobs into the frame space.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::core::{ceil_i64, int, Rational};
use crate::error::{Error, Result};

/// Size class of a job relative to `ε·pmax`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Small,
    Large,
}

/// Large iff `p ≥ ε·pmax`.
pub fn partition(p: &Rational, epsilon: &Rational, pmax: &Rational) -> Class {
    if *p >= epsilon * pmax {
        Class::Large
    } else {
        Class::Small
    }
}

/// `a ∸ b = max{a − b, 0}`.
fn monus(a: Rational, b: Rational) -> Rational {
    let d = a - b;
    if d.is_negative() {
        Rational::zero()
    } else {
        d
    }
}

/// A small-job event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmallEvent {
    Insert(Rational),
    Remove(Rational),
}

/// Frame count `f`, the small-job multiset, and the derived `F` and `Φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameLedger {
    unit: Rational,
    f: i64,
    small_total: Rational,
    small: BTreeMap<Rational, u32>,
}

impl FrameLedger {
    /// Starts with `f = 1` and no small jobs.
    pub fn new(epsilon: &Rational, pmax: &Rational) -> Self {
        FrameLedger {
            unit: epsilon * pmax,
            f: 1,
            small_total: Rational::zero(),
            small: BTreeMap::new(),
        }
    }

    /// Frame size `ε·pmax`.
    pub fn unit(&self) -> &Rational {
        &self.unit
    }

    /// Current frame count `f`.
    pub fn f(&self) -> i64 {
        self.f
    }

    /// `F = Σ small p / (ε·pmax)`.
    pub fn big_f(&self) -> Rational {
        &self.small_total / &self.unit
    }

    /// `Φ = 3εpmax·((f ∸ (F+2)) + (F+1 ∸ f))`.
    pub fn phi(&self) -> Rational {
        let f = int(self.f);
        let big_f = self.big_f();
        int(3)
            * &self.unit
            * (monus(f.clone(), &big_f + int(2)) + monus(big_f + int(1), f))
    }

    /// `F ≤ f ≤ F + 3`.
    pub fn bounded(&self) -> bool {
        let f = int(self.f);
        let big_f = self.big_f();
        big_f <= f && f <= big_f + int(3)
    }

    /// Number of small jobs of size `p` currently held.
    pub fn count(&self, p: &Rational) -> u32 {
        self.small.get(p).copied().unwrap_or(0)
    }
}

/// Outcome of one small-job event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameUpdate {
    pub delta_f: i64,
    pub phi_before: Rational,
    pub phi_after: Rational,
}

/// Applies one small-job event; `f` moves to `⌈F⌉ + 1` only when `F ≤ f ≤ F+3` would break.
pub fn update_frames(ledger: &FrameLedger, event: &SmallEvent) -> Result<(FrameLedger, FrameUpdate)> {
    let mut next = ledger.clone();
    let phi_before = ledger.phi();
    match event {
        SmallEvent::Insert(p) => {
            check_small(p, &ledger.unit)?;
            *next.small.entry(p.clone()).or_insert(0) += 1;
            next.small_total += p;
        }
        SmallEvent::Remove(p) => {
            let c = next.small.get_mut(p).filter(|c| **c > 0).ok_or_else(|| {
                Error::NoSuchJob(format!("no small job of size {}", crate::core::fmt_rational(p)))
            })?;
            *c -= 1;
            if *c == 0 {
                next.small.remove(p);
            }
            next.small_total -= p;
        }
    }
    if !next.bounded() {
        next.f = ceil_i64(&next.big_f()) + 1;
    }
    let update = FrameUpdate {
        delta_f: next.f - ledger.f,
        phi_before,
        phi_after: next.phi(),
    };
    Ok((next, update))
}

fn check_small(p: &Rational, unit: &Rational) -> Result<()> {
    if !p.is_positive() || p >= unit {
        return Err(Error::Input(format!(
            "small job size {} outside (0, ε·pmax)",
            crate::core::fmt_rational(p)
        )));
    }
    Ok(())
}

/// Identifier of a concrete job.
pub type JobId = u64;

/// Small jobs per machine, in placement order (pulled back to front).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SmallPlacement {
    pub per_machine: Vec<Vec<(JobId, Rational)>>,
}

impl SmallPlacement {
    pub fn new(m: usize) -> Self {
        SmallPlacement {
            per_machine: vec![Vec::new(); m],
        }
    }

    /// Small load on machine `i`.
    pub fn load(&self, i: usize) -> Rational {
        self.per_machine[i].iter().map(|(_, p)| p.clone()).sum()
    }

    /// Machine of every placed job.
    pub fn machine_of(&self) -> BTreeMap<JobId, usize> {
        let mut out = BTreeMap::new();
        for (i, v) in self.per_machine.iter().enumerate() {
            for (id, _) in v {
                out.insert(*id, i);
            }
        }
        out
    }
}

/// Sandwich bound `(σ_i − 3)·εpmax ≤ small load ≤ (1 + σ_i)·εpmax` on every machine.
pub fn sandwich_ok(placement: &SmallPlacement, frames: &[u32], unit: &Rational) -> bool {
    frames.iter().enumerate().all(|(i, &s)| {
        let load = placement.load(i);
        let s = int(s as i64);
        load <= (int(1) + &s) * unit && load >= (s - int(3)) * unit
    })
}

/// Updates the small-job placement after frame counts or small jobs changed.
///
/// Removed jobs leave; machines whose small load exceeds their frame space
/// shed jobs (latest first); then every pending job goes to the machine with
/// the most free frame space, ties to the lowest ID. Returns the placement
/// and the moved load (size of jobs that ended on a different machine).
pub fn place_small_jobs(
    prev: &SmallPlacement,
    frames: &[u32],
    removed: &[JobId],
    added: &[(JobId, Rational)],
    unit: &Rational,
) -> Result<(SmallPlacement, Rational)> {
    let m = frames.len();
    if prev.per_machine.len() != m {
        return Err(Error::Input("placement and frame vector differ in length".into()));
    }
    let mut cur = prev.clone();
    for id in removed {
        let hit = cur
            .per_machine
            .iter_mut()
            .find_map(|v| v.iter().position(|(j, _)| j == id).map(|k| v.remove(k)));
        if hit.is_none() {
            return Err(Error::NoSuchJob(format!("small job {id}")));
        }
    }
    let mut pending: Vec<(JobId, Rational, Option<usize>)> =
        added.iter().map(|(id, p)| (*id, p.clone(), None)).collect();
    let mut loads: Vec<Rational> = (0..m).map(|i| cur.load(i)).collect();
    for i in 0..m {
        let cap = int(frames[i] as i64) * unit;
        while loads[i] > cap {
            let (id, p) = cur.per_machine[i].pop().expect("positive load has a job");
            loads[i] -= &p;
            pending.push((id, p, Some(i)));
        }
    }
    let mut moved = Rational::zero();
    for (id, p, origin) in pending {
        let slack: Vec<Rational> = (0..m).map(|i| int(frames[i] as i64) * unit - &loads[i]).collect();
        let mut best = 0;
        for k in 1..m {
            if slack[k] > slack[best] {
                best = k;
            }
        }
        if origin.is_some_and(|o| o != best) {
            moved += &p;
        }
        loads[best] += &p;
        cur.per_machine[best].push((id, p));
    }
    Ok((cur, moved))
}
