//! Dynamic machine-covering state machine: removal, red-to-blue recolouring, insertion.

use crate::core::{int, speed_dot};
use crate::error::{Error, Result};
use crate::lexsolver::{Oracle, State};

fn check_type(oracle: &Oracle, j: usize) -> Result<()> {
    if j >= oracle.instance().d() {
        return Err(Error::Input(format!("job type {j} out of range")));
    }
    Ok(())
}

/// Removes one job of type `j` from a valid covering state.
pub fn remove_prime(oracle: &mut Oracle, state: &State, j: usize) -> Result<State> {
    check_type(oracle, j)?;
    if state.jobs[j] == 0 {
        return Err(Error::NoSuchJob(format!("no job of type {j}")));
    }
    let inst = oracle.instance().clone();
    let nu = state.jobs.clone();
    let mut nu_minus = nu.clone();
    nu_minus[j] -= 1;
    let opt_minus_old = oracle.opt_minus(&nu)?;
    let opt_minus_new = oracle.opt_minus(&nu_minus)?;
    let pj = int(inst.sizes()[j]);
    let mut s = state.clone();

    let candidate = State {
        jobs: nu_minus.clone(),
        ..s.clone()
    };
    if opt_minus_new == opt_minus_old {
        // Freeness is sufficient but not necessary: red machines may absorb the loss.
        if !oracle.is_valid(&candidate)? && !oracle.is_free(&s, &pj)? {
            let need = inst.one_plus_eps() * &opt_minus_new * speed_dot(inst.speeds(), &s.blue);
            s.alpha = std::cmp::max(need, &s.alpha - &pj);
            if !oracle.is_free(&s, &pj)? {
                let opt_plus_old = oracle.opt_plus(&nu)?;
                let t = oracle
                    .crit(&opt_plus_old)
                    .expect("a blue critical machine exists when the state is not p_j-free");
                assert!(s.blue[t] > 0, "critical type {t} has no blue machine left");
                s.blue[t] -= 1;
                s.alpha = &s.alpha - inst.one_plus_eps() * &inst.speeds()[t] * &opt_minus_old;
            }
        }
    } else {
        if oracle.is_valid(&candidate)? {
            let opt_plus_new = oracle.opt_plus(&nu_minus)?;
            s.alpha = inst.one_plus_eps() * opt_plus_new * speed_dot(inst.speeds(), &s.blue);
        } else {
            s.alpha = &s.alpha - &pj;
        }
    }
    s.jobs = nu_minus;
    Ok(s)
}

/// Recolours up to `k` red machines of the critical type blue.
pub fn try_rtb(oracle: &mut Oracle, k: u32, state: &State) -> Result<State> {
    let mut s = state.clone();
    let red = s.red(oracle.instance());
    if red.iter().all(|&r| r == 0) {
        return Ok(s);
    }
    let ob = oracle.opt(&s.jobs)?;
    if let Some(t) = oracle.crit(&ob.opt_plus) {
        let inst = oracle.instance();
        let kk = k.min(red[t]);
        s.blue[t] += kk;
        s.alpha = &s.alpha + inst.one_plus_eps() * int(kk as i64) * &inst.speeds()[t] * &ob.opt_minus;
    }
    Ok(s)
}

/// Inserts one job of type `j` into a valid covering state.
pub fn insert_prime(oracle: &mut Oracle, state: &State, j: usize) -> Result<State> {
    check_type(oracle, j)?;
    let inst = oracle.instance().clone();
    let nu = state.jobs.clone();
    let mut nu_plus = nu.clone();
    nu_plus[j] += 1;
    let opt_minus_old = oracle.opt_minus(&nu)?;
    let opt_minus_new = oracle.opt_minus(&nu_plus)?;
    let t = oracle.crit(&opt_minus_new);
    let mut s = state.clone();

    if opt_minus_new > opt_minus_old {
        s = try_rtb(oracle, inst.m(), &s)?;
        s.alpha = inst.one_plus_eps() * &opt_minus_new * speed_dot(inst.speeds(), &s.blue);
    }
    s.jobs = nu_plus;

    let slack = inst.epsilon() * inst.ell();
    if let Some(tt) = t {
        if s.red(&inst)[tt] > 0 && oracle.is_free(&s, &slack)? {
            s = try_rtb(oracle, 1, &s)?;
        }
    }
    let crit_clear = t.is_none_or(|tt| s.red(&inst)[tt] == 0);
    if crit_clear && oracle.is_free(&s, inst.pmax())? {
        let opt_plus = oracle.opt_plus(&s.jobs)?;
        let cap = inst.one_plus_eps() * opt_plus * speed_dot(inst.speeds(), &s.blue);
        s.alpha = std::cmp::min(&s.alpha + inst.pmax(), cap);
    }
    Ok(s)
}
