//! End-to-end pipeline: rounding, grouping, engine, concrete schedule,
//! blue placement, small-job placement and the legacy schedule.

use std::collections::{BTreeMap, HashMap};

use num::{Signed, Zero};

use crate::blue_greedy::{self, BlueAssignment};
use crate::core::{
    ceil_i64, dot, floor_i64, int, speed_dot, Instance, MachineTypes, Objective, PowerGrid, Rational,
};
use crate::error::{Error, Result};
use crate::grouping::{self, Class, FrameLedger, JobId, SmallEvent, SmallPlacement};
use crate::harness::brute::{brute_force_opt, DEFAULT_ORACLE_CAP};
use crate::harness::trace::{Event, EventTrace, Op};
use crate::legacy::{self, HmSchedule, LegacySchedule, MigrationLedger, NewJob};
use crate::lexsolver::{self, Oracle, State};
use crate::rounding;
use crate::{engine_cmax, engine_cmin};

/// How job sizes reach the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Large jobs are rounded; small jobs are grouped into frames.
    Rounded,
    /// Integer sizes in `[ε·pmax, pmax]` are used as they are.
    NoRounding,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rounded" => Ok(Mode::Rounded),
            "no-rounding" => Ok(Mode::NoRounding),
            _ => Err(Error::Input(format!("unknown mode {s:?}"))),
        }
    }
}

/// Replay settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReplayOptions {
    pub mode: Mode,
    /// Compute `OPT*` by brute force while the live job count is within the cap.
    pub oracle: bool,
    pub oracle_cap: usize,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        ReplayOptions {
            mode: Mode::Rounded,
            oracle: false,
            oracle_cap: DEFAULT_ORACLE_CAP,
        }
    }
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub name: &'static str,
    pub ok: bool,
}

/// Metrics of one event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepMetrics {
    pub step: usize,
    pub op: Op,
    pub size: Rational,
    /// Makespan or minimum completion time in original sizes and speeds.
    pub objective: Rational,
    /// `OPT⁺` (makespan) or `OPT⁻` (covering) of the engine state, engine units.
    pub opt_grid: Rational,
    pub alpha: Rational,
    pub blue_count: u32,
    pub f: i64,
    pub big_f: Rational,
    pub phi: Rational,
    pub delta_phi: Rational,
    /// Total original size of jobs that changed machine.
    pub migration: Rational,
    /// `p_j + ΔΦ`.
    pub budget: Rational,
    /// Per-machine loads in original sizes.
    pub loads: Vec<Rational>,
    pub opt_star: Option<Rational>,
    pub verdicts: Vec<Verdict>,
}

impl StepMetrics {
    /// All verdicts pass.
    pub fn ok(&self) -> bool {
        self.verdicts.iter().all(|v| v.ok)
    }

    /// Names of failing verdicts.
    pub fn failures(&self) -> Vec<&'static str> {
        self.verdicts.iter().filter(|v| !v.ok).map(|v| v.name).collect()
    }

    /// Reported objective over `OPT*`, when both are positive.
    pub fn ratio(&self) -> Option<Rational> {
        self.opt_star
            .as_ref()
            .filter(|o| o.is_positive())
            .map(|o| &self.objective / o)
    }
}

/// `(1+x)^k`.
fn pow(base: &Rational, k: u32) -> Rational {
    (0..k).fold(int(1), |acc, _| acc * base)
}

/// Collected verdicts of one step.
#[derive(Default)]
struct Checks(Vec<Verdict>);

impl Checks {
    /// Records `ok`, folding repeated names into one verdict.
    fn add(&mut self, name: &'static str, ok: bool) {
        if let Some(v) = self.0.iter_mut().find(|v| v.name == name) {
            v.ok &= ok;
        } else {
            self.0.push(Verdict { name, ok });
        }
    }
}

/// A live job.
#[derive(Clone, Debug)]
struct Job {
    size: Rational,
    /// Engine type for large jobs, `None` for small ones.
    ty: Option<usize>,
}

/// Mutable state of one replay.
pub struct Pipeline {
    opts: ReplayOptions,
    objective: Objective,
    epsilon: Rational,
    pmax: Rational,
    speeds: Vec<Rational>,
    machine_types: MachineTypes,
    oracle: Oracle,
    state: State,
    d_real: usize,
    frames: Option<FrameLedger>,
    next_id: JobId,
    jobs: BTreeMap<JobId, Job>,
    /// Live IDs per original size, in arrival order.
    by_size: BTreeMap<Rational, Vec<JobId>>,
    is_blue: Vec<bool>,
    red_cfg: Vec<Vec<u32>>,
    blue: BlueAssignment,
    hm: HmSchedule,
    legacy: LegacySchedule,
    small: SmallPlacement,
    ledger: MigrationLedger,
    opt_memo: HashMap<Vec<Rational>, Rational>,
    step: usize,
}

impl Pipeline {
    /// Sets up the engine instance for the trace header.
    pub fn new(trace: &EventTrace, opts: ReplayOptions) -> Result<Self> {
        let obj = trace.objective;
        let eps = trace.epsilon.clone();
        let pmax = trace.pmax.clone();
        let eng_speeds: Vec<Rational> = trace
            .speeds
            .iter()
            .map(|s| rounding::round_speed(s, &eps, obj))
            .collect::<Result<_>>()?;
        let mt = MachineTypes::from_speeds(&eng_speeds);
        let (inst, frames) = match opts.mode {
            Mode::Rounded => {
                let sizes = rounding::rounded_types(&eps, obj)?;
                let inst = Instance::new(obj, eps.clone(), eps.recip(), sizes, mt.speeds.clone(), mt.counts.clone())?
                    .with_frames(1)?;
                (inst, Some(FrameLedger::new(&eps, &pmax)))
            }
            Mode::NoRounding => {
                if !pmax.is_integer() {
                    return Err(Error::Input("no-rounding mode needs an integer pmax".into()));
                }
                let sizes: Vec<i64> = (ceil_i64(&(&eps * &pmax))..=floor_i64(&pmax)).collect();
                let inst = Instance::new(obj, eps.clone(), pmax.clone(), sizes, mt.speeds.clone(), mt.counts.clone())?;
                (inst, None)
            }
        };
        let m = trace.speeds.len();
        let d = inst.d();
        let d_real = inst.frame_type().unwrap_or(d);
        let mut p = Pipeline {
            opts,
            objective: obj,
            epsilon: eps,
            pmax,
            speeds: trace.speeds.clone(),
            machine_types: mt,
            state: State::initial(&inst),
            oracle: Oracle::new(inst),
            d_real,
            frames,
            next_id: 0,
            jobs: BTreeMap::new(),
            by_size: BTreeMap::new(),
            is_blue: vec![false; m],
            red_cfg: vec![vec![0; d]; m],
            blue: BlueAssignment::default(),
            hm: vec![vec![0; d]; m],
            legacy: LegacySchedule::default(),
            small: SmallPlacement::new(m),
            ledger: MigrationLedger::default(),
            opt_memo: HashMap::new(),
            step: 0,
        };
        // The frame count starts at one, so one frame job enters the engine up front.
        if let Some(ft) = p.oracle.instance().frame_type() {
            let mut checks = Checks::default();
            p.engine_op(true, ft, &mut checks)?;
            p.rebuild()?;
            if !checks.0.iter().all(|v| v.ok) {
                return Err(Error::Precondition("initial frame insertion failed its checks".into()));
            }
        }
        Ok(p)
    }

    pub fn instance(&self) -> &Instance {
        self.oracle.instance()
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn ledger(&self) -> &MigrationLedger {
        &self.ledger
    }

    /// Engine type of a large job.
    fn engine_type(&self, p: &Rational) -> Result<usize> {
        let size = match self.opts.mode {
            Mode::Rounded => rounding::round_job(p, &self.epsilon, &self.pmax, self.objective)?,
            Mode::NoRounding => {
                if !p.is_integer() || *p < &self.epsilon * &self.pmax {
                    return Err(Error::Input(format!(
                        "no-rounding mode needs integer sizes of at least ε·pmax, got {}",
                        crate::core::fmt_rational(p)
                    )));
                }
                floor_i64(p)
            }
        };
        self.instance().sizes()[..self.d_real]
            .iter()
            .position(|&s| s == size)
            .ok_or_else(|| Error::Domain(format!("no engine type of size {size}")))
    }

    /// One engine insert or removal, with its per-operation checks.
    fn engine_op(&mut self, insert: bool, j: usize, checks: &mut Checks) -> Result<()> {
        let inst = self.instance().clone();
        let before = self.state.clone();
        let after = match (self.objective, insert) {
            (Objective::Makespan, true) => engine_cmax::insert(&mut self.oracle, &before, j)?,
            (Objective::Makespan, false) => engine_cmax::remove(&mut self.oracle, &before, j)?,
            (Objective::Covering, true) => engine_cmin::insert_prime(&mut self.oracle, &before, j)?,
            (Objective::Covering, false) => engine_cmin::remove_prime(&mut self.oracle, &before, j)?,
        };
        let ob_old = self.oracle.opt(&before.jobs)?;
        let ob_new = self.oracle.opt(&after.jobs)?;

        // Only critical types may change colour.
        let crits = [self.oracle.crit(&ob_old.opt_plus), self.oracle.crit(&ob_new.opt_plus)];
        let changed: u32 = (0..inst.tau())
            .map(|t| before.blue[t].abs_diff(after.blue[t]))
            .sum();
        let crit_only = (0..inst.tau())
            .all(|t| before.blue[t] == after.blue[t] || crits.contains(&Some(t)));
        checks.add("recolour_critical", crit_only);

        let d_alpha = &after.alpha - &before.alpha;
        let k = int(changed as i64);
        let ell = inst.ell();
        let pm = inst.pmax();
        let pj = int(inst.sizes()[j]);
        let ope = inst.one_plus_eps();
        let ok = match (self.objective, insert) {
            (Objective::Makespan, true) => {
                !d_alpha.is_negative() && d_alpha <= ell + pm + int(2) * &pj && changed <= 1
            }
            (Objective::Makespan, false) => {
                k <= (ell + int(2) * pm) / pm + int(1)
                    && d_alpha.abs() <= &k * ope * ell + ell + int(4) * pm
            }
            (Objective::Covering, true) => {
                k <= (ope * ell + pm) / (inst.epsilon() * ell) + int(1)
                    && !d_alpha.is_negative()
                    && d_alpha <= &k * ope * ell + ope * ell + int(3) * pm
            }
            (Objective::Covering, false) => {
                changed <= 1 && !d_alpha.is_positive() && -&d_alpha <= ope * ell + int(2) * &pj
            }
        };
        checks.add("parameter_deltas", ok);

        if self.objective == Objective::Makespan {
            // OPT⁺ moves by at most one grid step once the fast machines are blue.
            let (lo, hi) = if insert { (&ob_old.opt_plus, &ob_new.opt_plus) } else { (&ob_new.opt_plus, &ob_old.opt_plus) };
            if lo.is_positive() && inst.smax() * hi >= *ell {
                checks.add("opt_step_ratio", hi == lo || *hi == lo * ope);
            }
        }
        self.state = after;
        Ok(())
    }

    /// Rebuilds the concrete high-multiplicity schedule from the engine state.
    fn rebuild(&mut self) -> Result<()> {
        let inst = self.instance().clone();
        let sol = lexsolver::solve_associated(&inst, &self.state)?
            .ok_or_else(|| Error::Precondition("engine state has no associated solution".into()))?;
        let m = self.speeds.len();
        let d = inst.d();

        // Recolour concrete machines to match μᵇ.
        for t in 0..inst.tau() {
            let machines = self.machine_types.machines_of(t);
            let target = self.state.blue[t] as usize;
            loop {
                let blue: Vec<usize> = machines.iter().copied().filter(|&i| self.is_blue[i]).collect();
                if blue.len() < target {
                    let i = machines
                        .iter()
                        .copied()
                        .filter(|&i| !self.is_blue[i])
                        .min_by_key(|&i| (dot(inst.sizes(), &self.red_cfg[i]), i))
                        .expect("a red machine of the type");
                    self.is_blue[i] = true;
                    self.red_cfg[i] = vec![0; d];
                } else if blue.len() > target {
                    let i = blue
                        .iter()
                        .copied()
                        .min_by_key(|&i| (self.blue.load(i, inst.sizes()), i))
                        .expect("a blue machine of the type");
                    self.is_blue[i] = false;
                } else {
                    break;
                }
            }
        }

        // Red configurations: keep identical ones, then maximise overlap.
        for t in 0..inst.tau() {
            let red: Vec<usize> = self
                .machine_types
                .machines_of(t)
                .into_iter()
                .filter(|&i| !self.is_blue[i])
                .collect();
            let mut pool: Vec<Vec<u32>> = sol
                .x
                .iter()
                .filter(|((tt, _), _)| *tt == t)
                .flat_map(|((_, c), &n)| std::iter::repeat_n(c.clone(), n as usize))
                .collect();
            if pool.len() != red.len() {
                return Err(Error::Precondition("red configuration count mismatch".into()));
            }
            let mut assigned: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
            for &i in &red {
                if let Some(k) = pool.iter().position(|c| *c == self.red_cfg[i]) {
                    assigned.insert(i, pool.swap_remove(k));
                }
            }
            pool.sort_by(|a, b| dot(inst.sizes(), b).cmp(&dot(inst.sizes(), a)).then(b.cmp(a)));
            for c in pool {
                let i = red
                    .iter()
                    .copied()
                    .filter(|i| !assigned.contains_key(i))
                    .max_by_key(|&i| {
                        let overlap: i64 = (0..d).map(|j| c[j].min(self.red_cfg[i][j]) as i64 * inst.sizes()[j]).sum();
                        (overlap, std::cmp::Reverse(i))
                    })
                    .expect("a free red machine");
                assigned.insert(i, c);
            }
            for (i, c) in assigned {
                self.red_cfg[i] = c;
            }
        }

        // Blue jobs. Covering may leave spare jobs with no blue machine; they go anywhere.
        let mut blue_list: Vec<(usize, Rational)> = (0..m)
            .filter(|&i| self.is_blue[i])
            .map(|i| (i, inst.speeds()[self.machine_types.type_of[i]].clone()))
            .collect();
        if blue_list.is_empty() && sol.blue_jobs.iter().any(|&c| c > 0) && self.objective == Objective::Covering {
            blue_list = (0..m)
                .map(|i| (i, inst.speeds()[self.machine_types.type_of[i]].clone()))
                .collect();
        }
        let (blue, _) = blue_greedy::sync(&self.blue, &sol.blue_jobs, &blue_list, inst.sizes(), inst.pmax())?;
        self.blue = blue;

        self.hm = (0..m)
            .map(|i| {
                let row = self.blue.per_machine.get(&i);
                (0..d)
                    .map(|j| self.red_cfg[i][j] + row.map_or(0, |r| r[j]))
                    .collect()
            })
            .collect();
        Ok(())
    }

    /// Applies one event and returns its metrics.
    pub fn apply(&mut self, event: &Event) -> Result<StepMetrics> {
        let mut checks = Checks::default();
        let inst = self.instance().clone();
        let unit = &self.epsilon * &self.pmax;
        let large = self.opts.mode == Mode::NoRounding
            || grouping::partition(&event.size, &self.epsilon, &self.pmax) == Class::Large;

        // Identify the job.
        let (id, job) = match event.op {
            Op::Insert => {
                let ty = if large { Some(self.engine_type(&event.size)?) } else { None };
                let id = self.next_id;
                self.next_id += 1;
                (id, Job { size: event.size.clone(), ty })
            }
            Op::Remove => {
                let id = self
                    .by_size
                    .get_mut(&event.size)
                    .and_then(|v| v.pop())
                    .ok_or_else(|| Error::NoSuchJob(format!("no job of size {}", crate::core::fmt_rational(&event.size))))?;
                let job = self.jobs.remove(&id).expect("indexed job");
                (id, job)
            }
        };
        let insert = event.op == Op::Insert;

        // Engine operations; small jobs reach the engine only as frame changes.
        let mut delta_phi = Rational::zero();
        match job.ty {
            Some(j) => self.engine_op(insert, j, &mut checks)?,
            None => {
                let ledger = self.frames.as_ref().expect("rounded mode");
                let ev = if insert { SmallEvent::Insert(job.size.clone()) } else { SmallEvent::Remove(job.size.clone()) };
                let (next, upd) = grouping::update_frames(ledger, &ev)?;
                delta_phi = &upd.phi_after - &upd.phi_before;
                checks.add("frames_d1", next.bounded());
                if upd.delta_f != 0 {
                    checks.add("frames_d2", next.f() == ceil_i64(&next.big_f()) + 1 && upd.phi_after.is_zero());
                }
                checks.add(
                    "frame_potential",
                    delta_phi.abs() <= int(3) * &unit
                        && &unit * int(upd.delta_f.abs()) + &delta_phi <= int(3) * &job.size,
                );
                self.frames = Some(next);
                let ft = inst.frame_type().expect("frame type");
                for _ in 0..upd.delta_f.abs() {
                    self.engine_op(upd.delta_f > 0, ft, &mut checks)?;
                }
            }
        }
        if insert {
            self.jobs.insert(id, job.clone());
            self.by_size.entry(job.size.clone()).or_default().push(id);
        }

        let prev_hm = self.hm.clone();
        self.rebuild()?;

        // Legacy schedule of large jobs.
        let (removed, added): (Vec<JobId>, Vec<NewJob>) = match (job.ty, insert) {
            (Some(ty), true) => (vec![], vec![NewJob { id, ty, size: job.size.clone() }]),
            (Some(_), false) => (vec![id], vec![]),
            (None, _) => (vec![], vec![]),
        };
        let prev_legacy = self.legacy.clone();
        let (legacy, xi_large) = legacy::legacy_convert(&prev_legacy, &prev_hm, &self.hm, &removed, &added, self.d_real)?;
        checks.add("legacy_follows", legacy.follows(&self.hm, self.d_real));
        let mut maxsize = vec![Rational::zero(); self.d_real];
        for l in [&prev_legacy, &legacy] {
            for (jid, &t) in &l.type_of {
                if l.size_of[jid] > maxsize[t] {
                    maxsize[t] = l.size_of[jid].clone();
                }
            }
        }
        checks.add("legacy_migration", xi_large <= legacy::hm_movement_bound(&prev_hm, &self.hm, &maxsize));
        self.legacy = legacy;

        // Small jobs follow the frames.
        let mut xi_small = Rational::zero();
        if let Some(ft) = inst.frame_type() {
            let frames: Vec<u32> = self.hm.iter().map(|r| r[ft]).collect();
            let (rem, add): (Vec<JobId>, Vec<(JobId, Rational)>) = match (job.ty, insert) {
                (None, true) => (vec![], vec![(id, job.size.clone())]),
                (None, false) => (vec![id], vec![]),
                _ => (vec![], vec![]),
            };
            let (placement, moved) = grouping::place_small_jobs(&self.small, &frames, &rem, &add, &unit)?;
            checks.add("small_sandwich", grouping::sandwich_ok(&placement, &frames, &unit));
            self.small = placement;
            xi_small = moved;
        }
        let migration = &xi_large + &xi_small;
        self.ledger.record(migration.clone(), job.size.clone(), delta_phi.clone());

        self.state_checks(&mut checks)?;

        // Reported objective in original sizes and speeds.
        let m = self.speeds.len();
        let mut loads = self.legacy.loads(m);
        for (i, l) in loads.iter_mut().enumerate() {
            *l += self.small.load(i);
        }
        let comps = (0..m).map(|i| &loads[i] / &self.speeds[i]);
        let objective = match self.objective {
            Objective::Makespan => comps.max(),
            Objective::Covering => comps.min(),
        }
        .expect("at least one machine");

        let opt_star = if self.opts.oracle && self.jobs.len() <= self.opts.oracle_cap {
            let mut sizes: Vec<Rational> = self.jobs.values().map(|j| j.size.clone()).collect();
            sizes.sort();
            let v = match self.opt_memo.get(&sizes) {
                Some(v) => v.clone(),
                None => {
                    let v = brute_force_opt(&sizes, &self.speeds, self.objective, self.opts.oracle_cap)?;
                    self.opt_memo.insert(sizes, v.clone());
                    v
                }
            };
            self.approx_checks(&loads, &objective, &v, &mut checks);
            Some(v)
        } else {
            None
        };

        let ob = self.oracle.opt(&self.state.jobs)?;
        let (f, big_f, phi) = match &self.frames {
            Some(l) => (l.f(), l.big_f(), l.phi()),
            None => (0, Rational::zero(), Rational::zero()),
        };
        let metrics = StepMetrics {
            step: self.step,
            op: event.op,
            size: event.size.clone(),
            objective,
            opt_grid: ob.governing(self.objective).clone(),
            alpha: self.state.alpha.clone(),
            blue_count: self.state.blue.iter().sum(),
            f,
            big_f,
            phi,
            budget: &job.size + &delta_phi,
            delta_phi,
            migration,
            loads,
            opt_star,
            verdicts: checks.0,
        };
        self.step += 1;
        Ok(metrics)
    }

    /// State invariants, blue proportional bound and blue completion bound.
    fn state_checks(&mut self, checks: &mut Checks) -> Result<()> {
        let inst = self.instance().clone();
        let s = self.state.clone();
        let ob = self.oracle.opt(&s.jobs)?;
        let ope = inst.one_plus_eps();
        let ell = inst.ell();
        let pm = inst.pmax();
        let sp = inst.speeds();
        checks.add("valid", self.oracle.is_valid(&s)?);
        let with = |t: usize, delta: i64| -> Vec<u32> {
            let mut b = s.blue.clone();
            b[t] = (b[t] as i64 + delta) as u32;
            b
        };
        match self.objective {
            Objective::Makespan => {
                let t_b = &ob.opt_plus;
                checks.add("inv1_colouring", lexsolver::colouring_ok(&inst, &s, t_b));
                checks.add("inv2_compatible", lexsolver::compatible_ok(&inst, &s, t_b));
                let crit = self.oracle.crit(t_b);
                if let Some(t) = crit.filter(|&t| s.blue[t] > 0) {
                    checks.add("inv4_lower", ope * t_b * speed_dot(sp, &with(t, -1)) < s.alpha);
                }
                let delta_blue = match crit {
                    Some(t) => with(t, -(s.blue[t] as i64)),
                    None => s.blue.clone(),
                };
                let delta = ope * &ob.opt_minus * speed_dot(sp, &delta_blue);
                checks.add("inv5_delta", delta <= s.alpha);
                if s.alpha > delta {
                    let cap = ell + int(2) * pm - int(1);
                    checks.add("freeness_cap", self.oracle.max_freeness(&s)? <= cap);
                }
            }
            Objective::Covering => {
                let t_b = &ob.opt_minus;
                checks.add("inv1_colouring", lexsolver::colouring_ok(&inst, &s, t_b));
                checks.add("b2_compatible", lexsolver::compatible_ok(&inst, &s, t_b));
                let crit = self.oracle.crit(&ob.opt_plus);
                let red = s.red(&inst);
                if let Some(t) = crit.filter(|&t| red[t] > 0) {
                    checks.add("b4_upper", ope * t_b * speed_dot(sp, &with(t, 1)) > s.alpha);
                }
                let delta_blue = match crit {
                    Some(t) => with(t, red[t] as i64),
                    None => s.blue.clone(),
                };
                let delta = ope * &ob.opt_plus * speed_dot(sp, &delta_blue);
                checks.add("b5_delta", s.alpha <= delta);
                if s.alpha < delta {
                    let cap = ope * ell + pm - int(1);
                    checks.add("freeness_cap", self.oracle.max_freeness(&s)? <= cap);
                }
            }
        }

        // Blue placement.
        let blue_list: Vec<(usize, Rational)> = (0..self.speeds.len())
            .filter(|&i| self.is_blue[i])
            .map(|i| (i, sp[self.machine_types.type_of[i]].clone()))
            .collect();
        let p = inst.sizes();
        checks.add("blue_proportional", blue_greedy::max_deviation(&self.blue, &blue_list, p) <= *pm);
        let total = dot(p, &self.blue.total(inst.d()));
        let budget = lexsolver::alpha_budget(self.objective, &s.alpha);
        checks.add(
            "blue_budget",
            match self.objective {
                Objective::Makespan => total <= budget,
                Objective::Covering => total >= budget,
            },
        );
        if self.objective == Objective::Makespan {
            let f3 = pow(ope, 3);
            let ok = blue_list.iter().all(|(i, si)| {
                si * &ob.opt_plus < *ell || int(self.blue.load(*i, p)) <= &f3 * si * &ob.opt_plus
            });
            checks.add("blue_completion", ok);
        }
        Ok(())
    }

    /// Approximation checks against the exact optimum.
    fn approx_checks(&self, loads: &[Rational], objective: &Rational, opt: &Rational, checks: &mut Checks) {
        let e = &self.epsilon;
        let grid = PowerGrid::new(e).expect("valid epsilon");
        let on_grid = self.speeds.iter().all(|s| grid.exponent(s).is_some());
        // Off-grid speeds cost one more factor of 1+ε.
        let k = if on_grid { 3 } else { 4 };
        match self.opts.mode {
            Mode::NoRounding => {
                let ok = match self.objective {
                    Objective::Makespan => *objective <= pow(&(int(1) + e), k) * opt,
                    Objective::Covering => !opt.is_positive() || *objective >= pow(&(int(1) - e), k) * opt,
                };
                checks.add("approximation", ok);
            }
            Mode::Rounded => {
                let m = self.speeds.len() as i64;
                let add = &self.epsilon * &self.pmax * int(4 + (3 + m - 1) / m);
                let k = k + 4;
                let ok = loads.iter().zip(&self.speeds).all(|(l, s)| match self.objective {
                    Objective::Makespan => *l <= pow(&(int(1) + e), k) * s * opt + &add,
                    Objective::Covering => *l >= pow(&(int(1) - e), k) * s * opt - &add,
                });
                checks.add("approximation", ok);
            }
        }
    }
}

/// Replays a trace from the empty state.
pub fn replay(trace: &EventTrace, opts: ReplayOptions) -> Result<Vec<StepMetrics>> {
    let mut p = Pipeline::new(trace, opts)?;
    trace.events.iter().map(|e| p.apply(e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::rat;
    use crate::harness::trace::parse_trace;

    fn opts(mode: Mode) -> ReplayOptions {
        ReplayOptions { mode, oracle: true, oracle_cap: 10 }
    }

    #[test]
    fn empty_trace() {
        let t = parse_trace("objective cmax\nepsilon 1\npmax 1\nspeeds 1\n").unwrap();
        assert!(replay(&t, opts(Mode::Rounded)).unwrap().is_empty());
    }

    #[test]
    fn single_job() {
        let t = parse_trace("objective cmax\nepsilon 1\npmax 1\nspeeds 1\ninsert 1\n").unwrap();
        let out = replay(&t, opts(Mode::NoRounding)).unwrap();
        assert_eq!(out[0].objective, int(1));
        assert_eq!(out[0].opt_star, Some(int(1)));
        assert_eq!(out[0].ratio(), Some(int(1)));
        assert!(out[0].ok(), "{:?}", out[0].failures());
    }

    #[test]
    fn three_jobs_two_machines() {
        let t = parse_trace("objective cmax\nepsilon 1/2\npmax 4\nspeeds 1 1\ninsert 2\ninsert 3\ninsert 4\n").unwrap();
        let out = replay(&t, opts(Mode::NoRounding)).unwrap();
        assert_eq!(out[2].opt_star, Some(int(5)));
        for s in &out {
            assert!(s.ok(), "step {}: {:?}", s.step, s.failures());
        }
    }

    #[test]
    fn removal_errors() {
        let t = parse_trace("objective cmax\nepsilon 1\npmax 1\nspeeds 1\nremove 1\n").unwrap();
        assert!(matches!(replay(&t, opts(Mode::NoRounding)), Err(Error::NoSuchJob(_))));
        let t = parse_trace("objective cmax\nepsilon 1/2\npmax 4\nspeeds 1\ninsert 1\n").unwrap();
        assert!(matches!(replay(&t, opts(Mode::NoRounding)), Err(Error::Input(_))));
    }

    #[test]
    fn small_jobs_use_frames() {
        let text = "objective cmax\nepsilon 1/2\npmax 4\nspeeds 1 3/2\ninsert 1\ninsert 1/2\ninsert 3\nremove 1\nremove 1/2\n";
        let t = parse_trace(text).unwrap();
        let out = replay(&t, opts(Mode::Rounded)).unwrap();
        for s in &out {
            assert!(s.ok(), "step {}: {:?}", s.step, s.failures());
        }
        assert_eq!(out[1].big_f, rat(3, 4));
        assert_eq!(out.last().unwrap().big_f, int(0));
    }

    #[test]
    fn replay_is_deterministic() {
        let text = "objective cmin\nepsilon 1/2\npmax 4\nspeeds 1 1 2\ninsert 3\ninsert 1\ninsert 4\ninsert 2\nremove 3\n";
        let t = parse_trace(text).unwrap();
        assert_eq!(replay(&t, opts(Mode::Rounded)).unwrap(), replay(&t, opts(Mode::Rounded)).unwrap());
    }
}
