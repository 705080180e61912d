//! Exact solving of the dynamic configuration ILP to its `⊑`-lexicographically
//! minimal solution, plus state validity, freeness, OPT bounds and the critical type.
//!
//! All searches run over the finite set of remaining-job vectors `v ≤ ν`,
//! encoded in mixed radix. Filling the red machines of each type one
//! configuration at a time yields the set of vectors left for the blue side.

use std::collections::{BTreeMap, HashMap};

use num::{Signed, Zero};

use crate::configurations::{
    enumerate_bounded, sort_indices, Configuration, OrderedIndex, DEFAULT_CONFIG_CAP,
};
use crate::core::{ceil_i64, dot, floor_i64, int, speed_dot, Instance, Objective, Rational};
use crate::error::{Error, Result};

/// Guard on the number of remaining-job vectors explored.
pub const STATE_SPACE_CAP: usize = 4_000_000;

/// The ILP parameter triple `(α, μᵇ, ν)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub alpha: Rational,
    /// Blue machines per machine type.
    pub blue: Vec<u32>,
    /// Jobs per job type.
    pub jobs: Vec<u32>,
}

impl State {
    /// The empty state `(0, 0, 0)`.
    pub fn initial(inst: &Instance) -> Self {
        State {
            alpha: Rational::zero(),
            blue: vec![0; inst.tau()],
            jobs: vec![0; inst.d()],
        }
    }

    /// Red machines per type, `μ − μᵇ`.
    pub fn red(&self, inst: &Instance) -> Vec<u32> {
        inst.counts()
            .iter()
            .zip(&self.blue)
            .map(|(&m, &b)| m.saturating_sub(b))
            .collect()
    }

    /// The same state with `α` replaced.
    pub fn with_alpha(&self, alpha: Rational) -> Self {
        State {
            alpha,
            ..self.clone()
        }
    }
}

/// A value in `ℚ ∪ {+∞}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Extended {
    Finite(Rational),
    Infinity,
}

/// The unique lex-minimal solution `(x, νᵇ)` for a state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssociatedSolution {
    /// Positive entries `x_{t,c}` keyed by `(t, c)`.
    pub x: BTreeMap<(usize, Vec<u32>), u32>,
    /// Jobs assigned to the blue side.
    pub blue_jobs: Vec<u32>,
    /// `Cmax(x)` for makespan, `Cmin(x)` for covering (`+∞` without red machines).
    pub ilp_objective: Extended,
}

/// `OPT`, `OPT⁻` and `OPT⁺` for a job vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptBounds {
    pub opt: Rational,
    pub opt_minus: Rational,
    pub opt_plus: Rational,
}

impl OptBounds {
    fn zero() -> Self {
        OptBounds {
            opt: Rational::zero(),
            opt_minus: Rational::zero(),
            opt_plus: Rational::zero(),
        }
    }

    /// The grid value validity is measured at: `OPT⁺` for makespan, `OPT⁻` for covering.
    pub fn governing(&self, objective: Objective) -> &Rational {
        match objective {
            Objective::Makespan => &self.opt_plus,
            Objective::Covering => &self.opt_minus,
        }
    }
}

/// Mixed-radix encoding of vectors `v ≤ ν`.
struct Space {
    radix: Vec<usize>,
    weight: Vec<usize>,
    sizes: Vec<i64>,
    size: usize,
}

impl Space {
    fn new(nu: &[u32], sizes: &[i64]) -> Result<Self> {
        let mut weight = Vec::with_capacity(nu.len());
        let mut size = 1usize;
        for &n in nu {
            weight.push(size);
            size = size
                .checked_mul(n as usize + 1)
                .filter(|&s| s <= STATE_SPACE_CAP)
                .ok_or_else(|| {
                    Error::Capacity(format!("job-vector space exceeds {STATE_SPACE_CAP}"))
                })?;
        }
        Ok(Space {
            radix: nu.iter().map(|&n| n as usize + 1).collect(),
            weight,
            sizes: sizes.to_vec(),
            size,
        })
    }

    fn encode(&self, v: &[u32]) -> usize {
        v.iter().zip(&self.weight).map(|(&a, &w)| a as usize * w).sum()
    }

    fn decode(&self, code: usize) -> Vec<u32> {
        self.weight
            .iter()
            .zip(&self.radix)
            .map(|(&w, &r)| ((code / w) % r) as u32)
            .collect()
    }

    fn fits(&self, code: usize, c: &[u32]) -> bool {
        c.iter()
            .zip(self.weight.iter().zip(&self.radix))
            .all(|(&cj, (&w, &r))| cj as usize <= (code / w) % r)
    }

    fn load(&self, code: usize) -> i64 {
        self.weight
            .iter()
            .zip(self.radix.iter().zip(&self.sizes))
            .map(|(&w, (&r, &p))| ((code / w) % r) as i64 * p)
            .sum()
    }
}

/// A configuration prepared for the search.
#[derive(Clone)]
struct Item {
    code: usize,
    counts: Vec<u32>,
}

/// Codes reachable from `start` after assigning, for every group `(k, items)`,
/// exactly `k` configurations drawn from `items`.
fn reach(space: &Space, start: usize, groups: &[(u32, Vec<Item>)]) -> Vec<usize> {
    let mut current = vec![start];
    let mut seen = vec![u32::MAX; space.size];
    let mut round = 0u32;
    for (k, items) in groups {
        for _ in 0..*k {
            let mut next = Vec::new();
            for &v in &current {
                for it in items {
                    if space.fits(v, &it.counts) {
                        let w = v - it.code;
                        if seen[w] != round {
                            seen[w] = round;
                            next.push(w);
                        }
                    }
                }
            }
            current = next;
            round += 1;
            if current.is_empty() {
                return current;
            }
        }
    }
    current
}

fn check_dims(inst: &Instance, state: &State) -> Result<()> {
    if state.jobs.len() != inst.d() || state.blue.len() != inst.tau() {
        return Err(Error::Input("state dimensions do not match the instance".into()));
    }
    if state.blue.iter().zip(inst.counts()).any(|(&b, &m)| b > m) {
        return Err(Error::Input("more blue machines than machines of a type".into()));
    }
    Ok(())
}

/// Configurations `c ≤ ν` with `p⊺c ≤ ℓ`, per machine type, filtered by `allow`.
fn typed_items(
    inst: &Instance,
    space: &Space,
    jobs: &[u32],
    red: &[u32],
    allow: &dyn Fn(usize, &Configuration) -> bool,
) -> Result<Vec<(u32, Vec<Item>)>> {
    let all = enumerate_bounded(inst.sizes(), inst.ell(), Some(jobs), DEFAULT_CONFIG_CAP)?;
    Ok((0..inst.tau())
        .filter(|&t| red[t] > 0)
        .map(|t| {
            let items = all
                .iter()
                .filter(|c| allow(t, c))
                .map(|c| Item {
                    code: space.encode(&c.counts),
                    counts: c.counts.clone(),
                })
                .collect();
            (red[t], items)
        })
        .collect())
}

/// Blue-side loads `p⊺νᵇ` achievable when every red machine gets a configuration
/// accepted by `allow`. Empty when the red machines cannot be filled.
fn blue_loads(
    inst: &Instance,
    jobs: &[u32],
    red: &[u32],
    allow: &dyn Fn(usize, &Configuration) -> bool,
) -> Result<Vec<i64>> {
    let space = Space::new(jobs, inst.sizes())?;
    let groups = typed_items(inst, &space, jobs, red, allow)?;
    let codes = reach(&space, space.encode(jobs), &groups);
    Ok(codes.into_iter().map(|c| space.load(c)).collect())
}

/// Predicate for red configurations that respect the objective bound `T`.
fn bound_filter<'a>(inst: &'a Instance, t_bound: &'a Rational) -> impl Fn(usize, &Configuration) -> bool + 'a {
    move |t, c| {
        let cap = &inst.speeds()[t] * t_bound;
        match inst.objective() {
            Objective::Makespan => int(c.load) <= cap,
            Objective::Covering => int(c.load) >= cap,
        }
    }
}

/// Blue-area budget as an integer: `⌊α⌋` for makespan, `⌈α⌉` for covering.
pub fn alpha_budget(objective: Objective, alpha: &Rational) -> i64 {
    match objective {
        Objective::Makespan => floor_i64(alpha),
        Objective::Covering => ceil_i64(alpha),
    }
}

fn budget_ok(objective: Objective, load: i64, budget: i64) -> bool {
    match objective {
        Objective::Makespan => load <= budget,
        Objective::Covering => load >= budget,
    }
}

/// Solves the ILP of `state` to its unique `⊑`-lex-minimal solution.
/// Returns `None` when infeasible.
pub fn solve_associated(inst: &Instance, state: &State) -> Result<Option<AssociatedSolution>> {
    solve_inner(inst, state, None)
}

/// As [`solve_associated`], but types with `s_t·T < pmin` only get the zero configuration.
pub fn solve_associated_pruned(
    inst: &Instance,
    state: &State,
    t_bound: &Rational,
) -> Result<Option<AssociatedSolution>> {
    solve_inner(inst, state, Some(t_bound))
}

fn solve_inner(
    inst: &Instance,
    state: &State,
    prune: Option<&Rational>,
) -> Result<Option<AssociatedSolution>> {
    check_dims(inst, state)?;
    let obj = inst.objective();
    if obj == Objective::Makespan && state.alpha.is_negative() {
        return Ok(None);
    }
    let budget = alpha_budget(obj, &state.alpha);
    let red = state.red(inst);
    let space = Space::new(&state.jobs, inst.sizes())?;
    let all = enumerate_bounded(inst.sizes(), inst.ell(), Some(&state.jobs), DEFAULT_CONFIG_CAP)?;
    let pmin = int(inst.pmin());

    let mut indices: Vec<OrderedIndex> = Vec::new();
    for t in (0..inst.tau()).filter(|&t| red[t] > 0) {
        let pruned = prune.is_some_and(|tb| &inst.speeds()[t] * tb < pmin);
        for c in all.iter().filter(|c| !pruned || c.is_zero()) {
            indices.push(OrderedIndex {
                t,
                config: c.clone(),
                speed: inst.speeds()[t].clone(),
            });
        }
    }
    sort_indices(&mut indices, obj);
    let codes: Vec<usize> = indices.iter().map(|i| space.encode(&i.config.counts)).collect();

    let start = space.encode(&state.jobs);
    let feasible = |fixed: &[u32], used: usize, min_pos: usize| -> bool {
        let groups: Vec<(u32, Vec<Item>)> = (0..inst.tau())
            .filter(|&t| red[t] > fixed[t])
            .map(|t| {
                let items = (min_pos..indices.len())
                    .filter(|&q| indices[q].t == t)
                    .map(|q| Item {
                        code: codes[q],
                        counts: indices[q].config.counts.clone(),
                    })
                    .collect();
                (red[t] - fixed[t], items)
            })
            .collect();
        reach(&space, start - used, &groups)
            .into_iter()
            .any(|v| budget_ok(obj, space.load(v), budget))
    };

    let total_red: u32 = red.iter().sum();
    let mut fixed = vec![0u32; inst.tau()];
    let mut used = 0usize;
    let mut chosen: Vec<usize> = Vec::with_capacity(total_red as usize);
    if !feasible(&fixed, used, 0) {
        return Ok(None);
    }
    let mut lo = 0usize;
    for _ in 0..total_red {
        // Largest position q such that the remaining machines can all use indices ≥ q.
        let mut hi = indices.len();
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if feasible(&fixed, used, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = lo;
        chosen.push(q);
        fixed[indices[q].t] += 1;
        used += codes[q];
    }

    let mut x: BTreeMap<(usize, Vec<u32>), u32> = BTreeMap::new();
    for &q in &chosen {
        *x.entry((indices[q].t, indices[q].config.counts.clone()))
            .or_insert(0) += 1;
    }
    let blue_jobs = space.decode(start - used);
    debug_assert!(budget_ok(obj, dot(inst.sizes(), &blue_jobs), budget));
    let completions = chosen.iter().map(|&q| indices[q].completion());
    let ilp_objective = match obj {
        Objective::Makespan => Extended::Finite(completions.max().unwrap_or_else(Rational::zero)),
        Objective::Covering => completions.min().map_or(Extended::Infinity, Extended::Finite),
    };
    Ok(Some(AssociatedSolution {
        x,
        blue_jobs,
        ilp_objective,
    }))
}

/// Machine colouring invariant at `T`.
pub fn colouring_ok(inst: &Instance, state: &State, t_bound: &Rational) -> bool {
    let red = state.red(inst);
    (0..inst.tau()).all(|t| {
        let cap = &inst.speeds()[t] * t_bound;
        (state.blue[t] == 0 || cap >= *inst.ell()) && (red[t] == 0 || cap <= *inst.ell())
    })
}

/// Blue area `(1+ε)·T·s⊺μᵇ`.
pub fn blue_area(inst: &Instance, blue: &[u32], t_bound: &Rational) -> Rational {
    inst.one_plus_eps() * t_bound * speed_dot(inst.speeds(), blue)
}

/// Compatible colouring invariant at `T`.
pub fn compatible_ok(inst: &Instance, state: &State, t_bound: &Rational) -> bool {
    let area = blue_area(inst, &state.blue, t_bound);
    match inst.objective() {
        Objective::Makespan => !state.alpha.is_negative() && state.alpha <= area,
        Objective::Covering => state.alpha >= area,
    }
}

/// Whether the associated solution meets the bound `T` (`Cmax ≤ T` or `Cmin ≥ T`).
///
/// Decided as existence of any feasible solution meeting `T`, which is
/// equivalent because the lex-minimal solution is extremal in the objective.
pub fn objective_ok(inst: &Instance, state: &State, t_bound: &Rational) -> Result<bool> {
    check_dims(inst, state)?;
    let obj = inst.objective();
    if obj == Objective::Makespan && state.alpha.is_negative() {
        return Ok(false);
    }
    let budget = alpha_budget(obj, &state.alpha);
    let loads = blue_loads(inst, &state.jobs, &state.red(inst), &bound_filter(inst, t_bound))?;
    Ok(loads.into_iter().any(|l| budget_ok(obj, l, budget)))
}

/// `T`-validity: colouring, compatible colouring, and the objective bound.
pub fn is_t_valid(inst: &Instance, state: &State, t_bound: &Rational) -> Result<bool> {
    check_dims(inst, state)?;
    Ok(colouring_ok(inst, state, t_bound)
        && compatible_ok(inst, state, t_bound)
        && objective_ok(inst, state, t_bound)?)
}

/// Validity: `OPT⁺`-validity for makespan, `OPT⁻`-validity for covering.
pub fn is_valid(inst: &Instance, state: &State) -> Result<bool> {
    let ob = opt_bounds(&state.jobs, inst)?;
    is_t_valid(inst, state, ob.governing(inst.objective()))
}

/// The canonical extremal state at `T` is `T`-valid.
pub fn exists_valid(inst: &Instance, jobs: &[u32], t_bound: &Rational) -> Result<bool> {
    let state = canonical_state(inst, jobs, t_bound);
    objective_ok(inst, &state, t_bound)
}

/// Maximal blue colouring at `T` with `α` at its extreme.
pub fn canonical_state(inst: &Instance, jobs: &[u32], t_bound: &Rational) -> State {
    let blue: Vec<u32> = (0..inst.tau())
        .map(|t| {
            let cap = &inst.speeds()[t] * t_bound;
            let is_blue = match inst.objective() {
                Objective::Makespan => cap >= *inst.ell(),
                Objective::Covering => cap > *inst.ell(),
            };
            if is_blue {
                inst.counts()[t]
            } else {
                0
            }
        })
        .collect();
    let area = blue_area(inst, &blue, t_bound);
    let alpha = match inst.objective() {
        Objective::Makespan => area.floor(),
        Objective::Covering => area.ceil(),
    };
    State {
        alpha,
        blue,
        jobs: jobs.to_vec(),
    }
}

/// Positive loads of configurations `c ≤ ν`, `p⊺c ≤ ℓ`.
fn config_loads(inst: &Instance, jobs: &[u32]) -> Result<Vec<i64>> {
    let mut loads: Vec<i64> =
        enumerate_bounded(inst.sizes(), inst.ell(), Some(jobs), DEFAULT_CONFIG_CAP)?
            .into_iter()
            .map(|c| c.load)
            .filter(|&l| l > 0)
            .collect();
    loads.sort_unstable();
    loads.dedup();
    Ok(loads)
}

/// Breakpoints of the validity predicate strictly inside `(lo, hi)`, for the
/// colouring whose blue speed sum is `blue_speed`.
fn breakpoints_between(
    inst: &Instance,
    jobs: &[u32],
    blue_speed: &Rational,
    lo: &Rational,
    hi: &Rational,
) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    for l in config_loads(inst, jobs)? {
        for s in inst.speeds() {
            let v = int(l) / s;
            if &v > lo && &v < hi {
                out.push(v);
            }
        }
    }
    if blue_speed.is_positive() {
        let denom = inst.one_plus_eps() * blue_speed;
        let total = dot(inst.sizes(), jobs);
        let first = floor_i64(&(lo * &denom)) + 1;
        let last = ceil_i64(&(hi * &denom)).min(total + 1);
        for p in first.max(0)..=last {
            let v = int(p) / &denom;
            if &v > lo && &v < hi {
                out.push(v);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `OPT`, `OPT⁻`, `OPT⁺` for the job vector `ν`. All zero when `ν = 0`
/// (and, for covering, whenever `OPT = 0`).
pub fn opt_bounds(jobs: &[u32], inst: &Instance) -> Result<OptBounds> {
    if jobs.len() != inst.d() {
        return Err(Error::Input("job vector dimension mismatch".into()));
    }
    if jobs.iter().all(|&n| n == 0) {
        return Ok(OptBounds::zero());
    }
    match inst.objective() {
        Objective::Makespan => opt_makespan(inst, jobs),
        Objective::Covering => opt_covering(inst, jobs),
    }
}

fn live_pmin(inst: &Instance, jobs: &[u32]) -> i64 {
    (0..inst.d())
        .filter(|&j| jobs[j] > 0)
        .map(|j| inst.sizes()[j])
        .min()
        .expect("nonempty job vector")
}

fn opt_makespan(inst: &Instance, jobs: &[u32]) -> Result<OptBounds> {
    let g = inst.grid();
    let total = dot(inst.sizes(), jobs);
    let smax = inst.smax();
    let mut k_hi = g.ceil_exp(&(int(total) / smax))?;
    while !exists_valid(inst, jobs, &g.pow(k_hi))? {
        k_hi += 1;
    }
    let lower = std::cmp::min(int(live_pmin(inst, jobs)), inst.ell().clone()) / smax;
    let mut k_lo = g.ceil_exp(&lower)? - 1;
    while k_hi - k_lo > 1 {
        let mid = k_lo + (k_hi - k_lo) / 2;
        if exists_valid(inst, jobs, &g.pow(mid))? {
            k_hi = mid;
        } else {
            k_lo = mid;
        }
    }
    let opt_plus = g.pow(k_hi);
    let opt_minus = g.pow(k_hi - 1);
    let blue_speed = blue_speed_sum(inst, &opt_minus);
    let mut cands = breakpoints_between(inst, jobs, &blue_speed, &opt_minus, &opt_plus)?;
    cands.push(opt_plus.clone());
    let idx = first_true(&cands, |t| exists_valid(inst, jobs, t))?;
    Ok(OptBounds {
        opt: cands[idx].clone(),
        opt_minus,
        opt_plus,
    })
}

fn opt_covering(inst: &Instance, jobs: &[u32]) -> Result<OptBounds> {
    let g = inst.grid();
    let total = dot(inst.sizes(), jobs);
    let all_speed = speed_dot(inst.speeds(), inst.counts());
    let smax = inst.smax();
    let t_min = [
        int(live_pmin(inst, jobs)) / smax,
        Rational::from_integer(1.into()) / (inst.one_plus_eps() * &all_speed),
        inst.ell() / smax,
    ]
    .into_iter()
    .min()
    .expect("three candidates");
    if !exists_valid(inst, jobs, &t_min)? {
        return Ok(OptBounds::zero());
    }
    let mut k_lo = g.floor_exp(&t_min)?;
    let mut k_hi = g.ceil_exp(&(int(total) / &all_speed))? + 1;
    while k_hi - k_lo > 1 {
        let mid = k_lo + (k_hi - k_lo) / 2;
        if exists_valid(inst, jobs, &g.pow(mid))? {
            k_lo = mid;
        } else {
            k_hi = mid;
        }
    }
    let t_g = g.pow(k_lo);
    let t_next = g.pow(k_lo + 1);
    let blue_speed = blue_speed_sum(inst, &t_g);
    let mut cands = vec![t_g.clone()];
    cands.extend(breakpoints_between(inst, jobs, &blue_speed, &t_g, &t_next)?);
    // Last candidate that is valid; validity is nonincreasing in T.
    let rev: Vec<Rational> = cands.iter().rev().cloned().collect();
    let idx = first_true(&rev, |t| exists_valid(inst, jobs, t))?;
    let opt = rev[idx].clone();
    let opt_minus = g.prev_strict(&opt)?;
    let opt_plus = inst.one_plus_eps() * &opt_minus;
    Ok(OptBounds {
        opt,
        opt_minus,
        opt_plus,
    })
}

/// `Σ μ_t s_t` over types with `s_t·T ≥ ℓ`.
fn blue_speed_sum(inst: &Instance, t_bound: &Rational) -> Rational {
    (0..inst.tau())
        .filter(|&t| &inst.speeds()[t] * t_bound >= *inst.ell())
        .fold(Rational::zero(), |acc, t| {
            acc + &inst.speeds()[t] * int(inst.counts()[t] as i64)
        })
}

/// Index of the first element for which the monotone predicate holds; the last element must satisfy it.
fn first_true(v: &[Rational], pred: impl Fn(&Rational) -> Result<bool>) -> Result<usize> {
    let (mut lo, mut hi) = (0usize, v.len() - 1);
    if pred(&v[lo])? {
        return Ok(0);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(&v[mid])? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The type `t` with `s_t·T = ℓ`, if any. `T = 0` yields `None`.
pub fn critical_type(t_bound: &Rational, inst: &Instance) -> Option<usize> {
    if t_bound.is_zero() {
        return None;
    }
    (0..inst.tau()).find(|&t| &inst.speeds()[t] * t_bound == *inst.ell())
}

/// Largest `κ ≥ 0` such that `α` shifted by `κ` (down for makespan, up for
/// covering) keeps `state` valid. Errors if `state` is not valid.
pub fn max_freeness(inst: &Instance, state: &State) -> Result<Rational> {
    let ob = opt_bounds(&state.jobs, inst)?;
    max_freeness_at(inst, state, ob.governing(inst.objective()))
}

/// [`max_freeness`] with the governing grid value supplied.
pub fn max_freeness_at(inst: &Instance, state: &State, t_bound: &Rational) -> Result<Rational> {
    if !is_t_valid(inst, state, t_bound)? {
        return Err(Error::Precondition("freeness of an invalid state".into()));
    }
    let loads = blue_loads(inst, &state.jobs, &state.red(inst), &bound_filter(inst, t_bound))?;
    // The bound on the shifted α is an integer blue load, so the shifted
    // state stays valid exactly down to (or up to) that load.
    Ok(match inst.objective() {
        Objective::Makespan => &state.alpha - int(loads.into_iter().min().expect("valid")),
        Objective::Covering => int(loads.into_iter().max().expect("valid")) - &state.alpha,
    })
}

/// Memoizing front end for OPT queries, shared by the engines.
#[derive(Debug, Clone)]
pub struct Oracle {
    inst: Instance,
    memo: HashMap<Vec<u32>, OptBounds>,
}

impl Oracle {
    pub fn new(inst: Instance) -> Self {
        Oracle {
            inst,
            memo: HashMap::new(),
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.inst
    }

    /// Cached [`opt_bounds`].
    pub fn opt(&mut self, jobs: &[u32]) -> Result<OptBounds> {
        if let Some(ob) = self.memo.get(jobs) {
            return Ok(ob.clone());
        }
        let ob = opt_bounds(jobs, &self.inst)?;
        self.memo.insert(jobs.to_vec(), ob.clone());
        Ok(ob)
    }

    pub fn opt_plus(&mut self, jobs: &[u32]) -> Result<Rational> {
        Ok(self.opt(jobs)?.opt_plus)
    }

    pub fn opt_minus(&mut self, jobs: &[u32]) -> Result<Rational> {
        Ok(self.opt(jobs)?.opt_minus)
    }

    /// The grid value validity is measured at.
    pub fn governing(&mut self, jobs: &[u32]) -> Result<Rational> {
        let obj = self.inst.objective();
        Ok(self.opt(jobs)?.governing(obj).clone())
    }

    pub fn is_valid(&mut self, state: &State) -> Result<bool> {
        let t = self.governing(&state.jobs)?;
        is_t_valid(&self.inst, state, &t)
    }

    /// Whether `state` is valid and `κ`-free.
    pub fn is_free(&mut self, state: &State, kappa: &Rational) -> Result<bool> {
        let t = self.governing(&state.jobs)?;
        if !is_t_valid(&self.inst, state, &t)? {
            return Ok(false);
        }
        Ok(max_freeness_at(&self.inst, state, &t)? >= *kappa)
    }

    /// Smallest makespan blue load over valid red fillings under the colouring
    /// of `state`, or `None` when the red machines cannot be filled.
    pub fn min_blue_load(&mut self, state: &State) -> Result<Option<i64>> {
        let t = self.governing(&state.jobs)?;
        let loads = blue_loads(&self.inst, &state.jobs, &state.red(&self.inst), &bound_filter(&self.inst, &t))?;
        Ok(loads.into_iter().min())
    }

    pub fn max_freeness(&mut self, state: &State) -> Result<Rational> {
        let t = self.governing(&state.jobs)?;
        max_freeness_at(&self.inst, state, &t)
    }

    pub fn crit(&self, t_bound: &Rational) -> Option<usize> {
        critical_type(t_bound, &self.inst)
    }
}
