//! Homotopy path for (QPλ): starts at `λ = ‖Dᵀw‖∞` with `r = 0` and follows
//! the piecewise-linear solution path down to `λ = ε` (the driver's
//! tolerance), adding or removing one support index at each break point.

use super::{RevResult, SolverParams};
use crate::error::{Error, Result};
use crate::linalg::{sign, solve};
use crate::reduction::ReducedSystem;

pub fn rev_homotopy(rs: &ReducedSystem, params: &SolverParams) -> Result<RevResult> {
    rev_homotopy_traced(rs, params).map(|(res, _)| res)
}

enum Break {
    Add(usize),
    Remove(usize),
    None,
}

/// Smallest positive step at which the support changes. `p` holds the
/// signed correlations `Dᵀ(Dr − w)`, `dk` their rate of change. Once the
/// support has `rank` entries the off-support correlations shrink in step
/// with `p_max`, so only removals can occur.
#[allow(clippy::too_many_arguments)]
fn calc_step(
    rank: usize,
    support: &[usize],
    in_support: &[bool],
    r: &[f64],
    v: &[f64],
    p: &[f64],
    dk: &[f64],
    p_max: f64,
) -> (f64, Break) {
    let mut delta = f64::INFINITY;
    let mut event = Break::None;
    let can_add = support.len() < rank;
    for i in (0..p.len()).filter(|&i| can_add && !in_support[i]) {
        for cand in [(p_max - p[i]) / (1.0 + dk[i]), (p_max + p[i]) / (1.0 - dk[i])] {
            if cand > 0.0 && cand < delta {
                delta = cand;
                event = Break::Add(i);
            }
        }
    }
    let mut delta3 = f64::INFINITY;
    let mut out = None;
    for &i in support {
        let cand = -r[i] / v[i];
        if cand > 0.0 && cand < delta3 {
            delta3 = cand;
            out = Some(i);
        }
    }
    if let Some(i) = out {
        if delta3 <= delta {
            return (delta3, Break::Remove(i));
        }
    }
    (delta, event)
}

/// Like [`rev_homotopy`], also returning the support size after every break point.
pub fn rev_homotopy_traced(rs: &ReducedSystem, params: &SolverParams) -> Result<(RevResult, Vec<usize>)> {
    let d = &rs.d;
    let m = rs.m();
    let lambda = params.epsilon;

    let mut r = vec![0.0; m];
    let mut p: Vec<f64> = d.tr_mul_vec(&rs.w).iter().map(|x| -x).collect();
    let p_max0 = p.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if p_max0 <= lambda {
        return Ok((RevResult::new(rs, r, 0, true), vec![0]));
    }
    let mut p_max = p_max0;
    let mut support: Vec<usize> = (0..m).filter(|&i| p[i].abs() == p_max).collect();
    let mut in_support = vec![false; m];
    let mut z = vec![0.0; m];
    for &i in &support {
        in_support[i] = true;
        z[i] = -sign(p[i]);
        p[i] = p_max * sign(p[i]);
    }
    let mut trace = vec![support.len()];

    let mut iter = 0;
    while iter < params.maxiter {
        iter += 1;
        let d_s = d.select_cols(&support);
        let b = d_s.gram();
        let rhs: Vec<f64> = support.iter().map(|&i| z[i]).collect();
        let v_s = solve(&b, &rhs).map_err(|_| Error::SingularSupport(support.clone()))?;
        let mut v = vec![0.0; m];
        for (k, &i) in support.iter().enumerate() {
            v[i] = v_s[k];
        }
        let dk = d.tr_mul_vec(&d_s.mul_vec(&v_s));

        let (delta, event) = calc_step(d.rows(), &support, &in_support, &r, &v, &p, &dk, p_max);
        if p_max - delta <= lambda {
            let step = p_max - lambda;
            for i in 0..m {
                r[i] += step * v[i];
            }
            return Ok((RevResult::new(rs, r, iter, true), trace));
        }
        for i in 0..m {
            r[i] += delta * v[i];
            p[i] += delta * dk[i];
        }
        p_max -= delta;
        // snap before the support changes so a removed index sits exactly on
        // the boundary and cannot re-enter after a rounding-sized step
        for &i in &support {
            p[i] = p_max * sign(p[i]);
        }

        match event {
            Break::Remove(i) => {
                support.retain(|&j| j != i);
                in_support[i] = false;
                r[i] = 0.0;
            }
            Break::Add(i) => {
                support.push(i);
                in_support[i] = true;
                r[i] = 0.0;
            }
            Break::None => unreachable!("an infinite step always reaches the terminal λ"),
        }
        z.iter_mut().for_each(|x| *x = 0.0);
        for &i in &support {
            p[i] = p_max * sign(p[i]);
            z[i] = -sign(p[i]);
        }
        trace.push(support.len());
    }
    Ok((RevResult::new(rs, r, iter, false), trace))
}
