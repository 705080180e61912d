//! Exact rationals, the `(1+ε)` power grid, the threshold `ℓ`, and the instance model.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number; every quantity in the engine uses it.
pub type Rational = BigRational;

/// `n/d` as a [`Rational`].
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `a` or `a/b` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Formats a rational as `a` or `a/b`.
pub fn fmt_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// `⌊x⌋` as `i64`.
pub fn floor_i64(x: &Rational) -> i64 {
    x.floor().to_integer().to_i64().expect("floor fits in i64")
}

/// `⌈x⌉` as `i64`.
pub fn ceil_i64(x: &Rational) -> i64 {
    x.ceil().to_integer().to_i64().expect("ceil fits in i64")
}

/// Dot product `p⊺v` of integer sizes and counts.
pub fn dot(p: &[i64], v: &[u32]) -> i64 {
    p.iter().zip(v).map(|(&a, &b)| a * b as i64).sum()
}

/// Dot product `s⊺μ` of speeds and counts.
pub fn speed_dot(s: &[Rational], mu: &[u32]) -> Rational {
    s.iter()
        .zip(mu)
        .fold(Rational::zero(), |acc, (a, &b)| acc + a * int(b as i64))
}

/// Checks `ε > 0` and that `1/ε` is an integer.
pub fn check_epsilon(epsilon: &Rational) -> Result<()> {
    if !epsilon.is_positive() {
        return Err(Error::Config(format!(
            "epsilon must be positive, got {}",
            fmt_rational(epsilon)
        )));
    }
    if !epsilon.recip().is_integer() {
        return Err(Error::Config(format!(
            "1/epsilon must be an integer, got epsilon = {}",
            fmt_rational(epsilon)
        )));
    }
    Ok(())
}

/// Scheduling objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Minimize the maximum completion time.
    Makespan,
    /// Maximize the minimum completion time.
    Covering,
}

impl FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cmax" | "makespan" => Ok(Objective::Makespan),
            "cmin" | "covering" => Ok(Objective::Covering),
            _ => Err(Error::Input(format!("unknown objective {s:?}"))),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Makespan => "cmax",
            Objective::Covering => "cmin",
        })
    }
}

/// Powers `(1+ε)^k`, `k ∈ ℤ`, located by integer bisection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerGrid {
    base: Rational,
}

impl PowerGrid {
    /// Grid with base `1+ε`.
    pub fn new(epsilon: &Rational) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::Domain("epsilon must be positive".into()));
        }
        Ok(PowerGrid {
            base: Rational::one() + epsilon,
        })
    }

    /// The base `1+ε`.
    pub fn base(&self) -> &Rational {
        &self.base
    }

    /// `(1+ε)^k`.
    pub fn pow(&self, k: i64) -> Rational {
        let p = num::pow::pow(self.base.clone(), k.unsigned_abs() as usize);
        if k >= 0 {
            p
        } else {
            p.recip()
        }
    }

    fn check(x: &Rational) -> Result<()> {
        if x.is_positive() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "grid argument must be positive, got {}",
                fmt_rational(x)
            )))
        }
    }

    /// Largest `k` with `(1+ε)^k ≤ x`.
    pub fn floor_exp(&self, x: &Rational) -> Result<i64> {
        Self::check(x)?;
        let (mut lo, mut hi);
        if *x >= Rational::one() {
            lo = 0i64;
            let mut step = 1i64;
            while self.pow(lo + step) <= *x {
                lo += step;
                step *= 2;
            }
            hi = lo + step;
        } else {
            hi = 0i64;
            let mut step = 1i64;
            while self.pow(hi - step) > *x {
                hi -= step;
                step *= 2;
            }
            lo = hi - step;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.pow(mid) <= *x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Smallest `k` with `(1+ε)^k ≥ x`.
    pub fn ceil_exp(&self, x: &Rational) -> Result<i64> {
        let k = self.floor_exp(x)?;
        Ok(if self.pow(k) == *x { k } else { k + 1 })
    }

    /// `min{(1+ε)^k ≥ x}`.
    pub fn next(&self, x: &Rational) -> Result<Rational> {
        Ok(self.pow(self.ceil_exp(x)?))
    }

    /// `max{(1+ε)^k < x}`.
    pub fn prev_strict(&self, x: &Rational) -> Result<Rational> {
        let k = self.floor_exp(x)?;
        Ok(if self.pow(k) == *x {
            self.pow(k - 1)
        } else {
            self.pow(k)
        })
    }

    /// `max{(1+ε)^k ≤ x}`.
    pub fn floor(&self, x: &Rational) -> Result<Rational> {
        Ok(self.pow(self.floor_exp(x)?))
    }

    /// The exponent `k` if `x = (1+ε)^k`.
    pub fn exponent(&self, x: &Rational) -> Option<i64> {
        let k = self.floor_exp(x).ok()?;
        (self.pow(k) == *x).then_some(k)
    }
}

/// The threshold `ℓ`: the grid power with `εℓ ≥ 2pmax` (makespan) or `εℓ ≥ 3pmax` (covering).
pub fn threshold_ell(objective: Objective, epsilon: &Rational, pmax: &Rational) -> Result<Rational> {
    check_epsilon(epsilon)?;
    if !pmax.is_positive() {
        return Err(Error::Config("pmax must be positive".into()));
    }
    let factor = match objective {
        Objective::Makespan => int(2),
        Objective::Covering => int(3),
    };
    let grid = PowerGrid::new(epsilon)?;
    let target = factor * pmax / epsilon;
    Ok(grid.pow(1 + grid.ceil_exp(&target)?))
}

/// High-multiplicity instance seen by the engine.
///
/// Job sizes are positive integers in engine units. Job counts live in
/// [`crate::lexsolver::State`] since they change every step.
#[derive(Clone, Debug)]
pub struct Instance {
    objective: Objective,
    epsilon: Rational,
    pmax: Rational,
    sizes: Vec<i64>,
    speeds: Vec<Rational>,
    counts: Vec<u32>,
    frame_type: Option<usize>,
    grid: PowerGrid,
    ell: Rational,
}

impl Instance {
    /// Builds and validates an instance. Sizes must be distinct and ascending,
    /// speeds distinct, descending, and powers of `1+ε`.
    pub fn new(
        objective: Objective,
        epsilon: Rational,
        pmax: Rational,
        sizes: Vec<i64>,
        speeds: Vec<Rational>,
        counts: Vec<u32>,
    ) -> Result<Self> {
        check_epsilon(&epsilon)?;
        let grid = PowerGrid::new(&epsilon)?;
        let ell = threshold_ell(objective, &epsilon, &pmax)?;
        if sizes.is_empty() {
            return Err(Error::Config("at least one job type is required".into()));
        }
        for w in sizes.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Config("job sizes must be distinct and ascending".into()));
            }
        }
        for &p in &sizes {
            if p <= 0 || int(p) > pmax {
                return Err(Error::Config(format!("job size {p} outside (0, pmax]")));
            }
        }
        if speeds.is_empty() || speeds.len() != counts.len() {
            return Err(Error::Config("speeds and machine counts must match".into()));
        }
        for w in speeds.windows(2) {
            if w[0] <= w[1] {
                return Err(Error::Config("speeds must be distinct and descending".into()));
            }
        }
        for s in &speeds {
            if grid.exponent(s).is_none() {
                return Err(Error::Config(format!(
                    "speed {} is not a power of 1+epsilon",
                    fmt_rational(s)
                )));
            }
        }
        if counts.iter().any(|&c| c == 0) {
            return Err(Error::Config("machine counts must be positive".into()));
        }
        Ok(Instance {
            objective,
            epsilon,
            pmax,
            sizes,
            speeds,
            counts,
            frame_type: None,
            grid,
            ell,
        })
    }

    /// Appends a trailing frame job type of the given size.
    pub fn with_frames(mut self, frame_size: i64) -> Result<Self> {
        if frame_size <= 0 || int(frame_size) > self.pmax {
            return Err(Error::Config("frame size outside (0, pmax]".into()));
        }
        if self.frame_type.is_some() {
            return Err(Error::Config("frame type already present".into()));
        }
        self.frame_type = Some(self.sizes.len());
        self.sizes.push(frame_size);
        Ok(self)
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }
    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }
    pub fn pmax(&self) -> &Rational {
        &self.pmax
    }
    /// Job-type sizes `p`.
    pub fn sizes(&self) -> &[i64] {
        &self.sizes
    }
    /// Machine-type speeds `s`, descending.
    pub fn speeds(&self) -> &[Rational] {
        &self.speeds
    }
    /// Machine-type multiplicities `μ`.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }
    /// Index of the frame job type, if any.
    pub fn frame_type(&self) -> Option<usize> {
        self.frame_type
    }
    pub fn grid(&self) -> &PowerGrid {
        &self.grid
    }
    /// The threshold `ℓ`.
    pub fn ell(&self) -> &Rational {
        &self.ell
    }
    /// Number of job types `d`.
    pub fn d(&self) -> usize {
        self.sizes.len()
    }
    /// Number of machine types `τ`.
    pub fn tau(&self) -> usize {
        self.speeds.len()
    }
    /// Number of machines `m`.
    pub fn m(&self) -> u32 {
        self.counts.iter().sum()
    }
    pub fn smax(&self) -> &Rational {
        &self.speeds[0]
    }
    pub fn smin(&self) -> &Rational {
        self.speeds.last().expect("nonempty speeds")
    }
    /// Smallest job-type size.
    pub fn pmin(&self) -> i64 {
        *self.sizes.iter().min().expect("nonempty sizes")
    }
    /// `1+ε`.
    pub fn one_plus_eps(&self) -> &Rational {
        self.grid.base()
    }
}

/// Grouping of concrete machines into speed types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineTypes {
    /// Distinct speeds, descending.
    pub speeds: Vec<Rational>,
    /// Multiplicity of each speed.
    pub counts: Vec<u32>,
    /// Type index of every concrete machine.
    pub type_of: Vec<usize>,
}

impl MachineTypes {
    /// Groups per-machine speeds into descending distinct types.
    pub fn from_speeds(speeds: &[Rational]) -> Self {
        let mut distinct: Vec<Rational> = speeds.to_vec();
        distinct.sort_by(|a, b| b.cmp(a));
        distinct.dedup();
        let type_of: Vec<usize> = speeds
            .iter()
            .map(|s| distinct.iter().position(|d| d == s).expect("speed present"))
            .collect();
        let mut counts = vec![0u32; distinct.len()];
        for &t in &type_of {
            counts[t] += 1;
        }
        MachineTypes {
            speeds: distinct,
            counts,
            type_of,
        }
    }

    /// Concrete machine IDs of type `t`, ascending.
    pub fn machines_of(&self, t: usize) -> Vec<usize> {
        (0..self.type_of.len()).filter(|&i| self.type_of[i] == t).collect()
    }
}

/// Compares `a/sa` with `b/sb` for positive speeds.
pub fn cmp_ratio(a: i64, sa: &Rational, b: i64, sb: &Rational) -> Ordering {
    (int(a) * sb).cmp(&(int(b) * sa))
}
