//! Maximum-likelihood fitting of the four model families.
//!
//! Closed-form log-likelihoods, a numerical score (gradient in log-parameter
//! coordinates), a self-contained Nelder–Mead minimizer, and `fit_model`,
//! which wires them together with per-family starting values — including a
//! four-start schedule for the EXg family, whose likelihood surface is flat
//! enough in β to trap single-start optimizers. Each simplex run is followed
//! by a short Newton polish on the numerical score: the simplex terminates on
//! likelihood *values*, whose f64 resolution leaves the gradient an order of
//! magnitude above the convergence contract on samples of a few thousand
//! points, while a score-driven step is not limited by value resolution.

use crate::dataio::{compensated_sum, Sample};
use crate::error::Error;
use crate::exg::log_add_exp;
use crate::model::{ModelKind, ModelParams};
use crate::specfn::ln_gamma;

/// Value-spread convergence tolerance for the simplex.
const NM_TOL: f64 = 1e-10;
/// Simplex diameter that must also be reached before declaring convergence.
const NM_DIAMETER_TOL: f64 = 1e-9;
/// Iteration cap per Nelder–Mead run.
const NM_MAX_ITER: usize = 5000;
/// Fitted gradients larger than this (∞-norm) mark a fit as not converged.
const GRAD_TOL: f64 = 1e-4;
/// Floor for ln β during EXg optimization: β may approach but never reach the
/// gamma boundary β = 0.
const LOG_BETA_FLOOR: f64 = -30.0;
/// Hard cap on Newton polish sweeps after the simplex phase.
const POLISH_MAX_ITER: usize = 8;

/// Result of one Nelder–Mead minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct NmOutcome {
    /// Best vertex found.
    pub argmin: Vec<f64>,
    /// Objective value at `argmin`.
    pub min_value: f64,
    /// Iterations consumed.
    pub iterations: usize,
    /// Whether both the value-spread and diameter tolerances were met.
    pub converged: bool,
}

/// A completed maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Fitted parameters.
    pub params: ModelParams,
    /// −2 log L at the fitted parameters.
    pub neg2_loglik: f64,
    /// True iff the optimizer met its tolerances and the numerical score
    /// ∞-norm is at most 1e-4.
    pub converged: bool,
    /// Total optimizer iterations across all starts, restarts, and polish
    /// sweeps.
    pub iterations: usize,
    /// ∞-norm of the numerical score in log-parameter coordinates.
    pub grad_inf_norm: f64,
    /// Number of distinct starting points tried (0 for closed-form fits).
    pub start_points_tried: usize,
}

/// Log-likelihood of `m` on `data`, in closed form.
///
/// Per-observation terms are combined with compensated summation. The value
/// agrees with Σᵢ log_pdf(xᵢ) to high accuracy but is evaluated from the
/// collected expression (one ln Γ, one pass over the data).
pub fn log_likelihood(m: &ModelParams, data: &Sample) -> Result<f64, Error> {
    let n = data.len() as f64;
    let sum_x = data.sum();
    match m.kind() {
        ModelKind::Exponential => {
            let t = m.values()[0];
            Ok(n * t.ln() - t * sum_x)
        }
        ModelKind::Gamma => {
            let (a, t) = (m.values()[0], m.values()[1]);
            Ok(n * (a * t.ln() - ln_gamma(a)?) + (a - 1.0) * data.log_sum() - t * sum_x)
        }
        ModelKind::Xgamma => {
            let t = m.values()[0];
            let poly = compensated_sum(data.values().iter().map(|&x| (0.5 * t * x * x).ln_1p()));
            Ok(n * (2.0 * t.ln() - t.ln_1p()) + poly - t * sum_x)
        }
        ModelKind::ExtendedXgamma => {
            let (a, t, b) = (m.values()[0], m.values()[1], m.values()[2]);
            let ln_quad = (a * a + a).ln();
            let poly = compensated_sum(data.values().iter().map(|&x| {
                if b == 0.0 {
                    ln_quad
                } else {
                    log_add_exp(ln_quad, t.ln() + b.ln() + 2.0 * x.ln())
                }
            }));
            Ok(n * ((a + 1.0) * t.ln() - (t + b).ln() - ln_gamma(a + 2.0)?)
                + poly
                + (a - 1.0) * data.log_sum()
                - t * sum_x)
        }
    }
}

/// Numerical score: central-difference gradient of the log-likelihood with
/// respect to the *logs* of the parameters, step h = 1e-6·max(1, |ln pⱼ|).
///
/// For the EXg family the fitted β must be strictly positive (the log
/// coordinate is undefined at the gamma boundary β = 0).
pub fn score_numeric(m: &ModelParams, data: &Sample) -> Result<Vec<f64>, Error> {
    if m.kind() == ModelKind::ExtendedXgamma && m.values()[2] <= 0.0 {
        return Err(Error::Domain(
            "score in log coordinates requires beta > 0; the beta = 0 boundary is the gamma sub-model",
        ));
    }
    let logs: Vec<f64> = m.values().iter().map(|v| v.ln()).collect();
    let mut grad = Vec::with_capacity(logs.len());
    for j in 0..logs.len() {
        let h = 1e-6 * logs[j].abs().max(1.0);
        let eval = |vj: f64| -> Result<f64, Error> {
            let mut vals: Vec<f64> = logs.iter().map(|v| v.exp()).collect();
            vals[j] = vj.exp();
            log_likelihood(&ModelParams::new(m.kind(), vals)?, data)
        };
        grad.push((eval(logs[j] + h)? - eval(logs[j] - h)?) / (2.0 * h));
    }
    Ok(grad)
}

/// Nelder–Mead minimization with the standard reflect/expand/contract/shrink
/// coefficients (1, 2, ½, ½) and a Matlab-fminsearch-style initial simplex
/// (each coordinate perturbed by 5%, or by 0.00025 if zero).
///
/// Converges when the worst-to-best value spread is at most `tol` *and* the
/// simplex diameter (∞-norm) is at most 1e-9. NaN objective values are
/// treated as +∞; a non-finite value at `start` is an error.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<NmOutcome, Error> {
    let dim = start.len();
    assert!(dim >= 1, "nelder_mead requires at least one coordinate");
    let mut eval = |x: &[f64]| -> f64 {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let f0 = eval(start);
    if !f0.is_finite() {
        return Err(Error::Domain("objective is not finite at the starting point"));
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), f0));
    for j in 0..dim {
        let mut v = start.to_vec();
        v[j] = if v[j] != 0.0 { 1.05 * v[j] } else { 0.00025 };
        let fv = eval(&v);
        simplex.push((v, fv));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("objective values are never NaN"));
        let spread = simplex[dim].1 - simplex[0].1;
        let diameter = (0..dim)
            .map(|j| {
                let lo = simplex.iter().map(|(v, _)| v[j]).fold(f64::INFINITY, f64::min);
                let hi = simplex.iter().map(|(v, _)| v[j]).fold(f64::NEG_INFINITY, f64::max);
                hi - lo
            })
            .fold(0.0, f64::max);
        if spread <= tol && diameter <= NM_DIAMETER_TOL {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(v, _)| v[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflected: Vec<f64> = (0..dim).map(|j| 2.0 * centroid[j] - worst.0[j]).collect();
        let fr = eval(&reflected);

        if fr < simplex[0].1 {
            let expanded: Vec<f64> = (0..dim).map(|j| 3.0 * centroid[j] - 2.0 * worst.0[j]).collect();
            let fe = eval(&expanded);
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < worst.1 {
                // Outside contraction, halfway toward the reflected point.
                let c: Vec<f64> = (0..dim).map(|j| 1.5 * centroid[j] - 0.5 * worst.0[j]).collect();
                let v = eval(&c);
                (c, v)
            } else {
                // Inside contraction, halfway back toward the worst point.
                let c: Vec<f64> = (0..dim).map(|j| 0.5 * (centroid[j] + worst.0[j])).collect();
                let v = eval(&c);
                (c, v)
            };
            if fc < fr.min(worst.1) {
                simplex[dim] = (contracted, fc);
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    for (v, b) in vertex.0.iter_mut().zip(&best) {
                        *v = 0.5 * (*v + b);
                    }
                    vertex.1 = eval(&vertex.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("objective values are never NaN"));
    Ok(NmOutcome {
        argmin: simplex[0].0.clone(),
        min_value: simplex[0].1,
        iterations,
        converged,
    })
}

/// Fits `kind` to `data` by maximum likelihood.
///
/// - Exponential: closed form θ̂ = n/Σx.
/// - Gamma: Nelder–Mead on (ln α, ln θ) from the moment estimates
///   α₀ = x̄²/s², θ₀ = x̄/s²; requires s² > 0.
/// - xgamma: Nelder–Mead on ln θ from θ₀ = 1/x̄.
/// - EXg: Nelder–Mead on (ln α, ln θ, ln β) from four starts — the fitted
///   gamma solution with β ≈ 0, the fitted xgamma solution mapped through
///   α = β = 1, the gamma moment start with β₀ = θ₀, and the unit-shape start
///   (1, 1/x̄, 1/x̄); requires s² > 0. The best of the four is kept.
///
/// Every optimizer run is followed by one restart from its incumbent with a
/// fresh simplex and a score-based Newton polish. Identical data and kind
/// always produce byte-identical results (no randomness anywhere in the
/// pipeline).
///
/// Requires at least one more observation than the family has parameters;
/// smaller samples are rejected as degenerate.
pub fn fit_model(kind: ModelKind, data: &Sample) -> Result<FitResult, Error> {
    if data.len() < kind.param_count() + 1 {
        return Err(Error::Degenerate(
            "too few observations: fitting needs at least one more data point than the model has parameters",
        ));
    }
    let stats = data.summary();
    let mean = stats.mean;
    let var = stats.sd * stats.sd;
    match kind {
        ModelKind::Exponential => {
            let params = ModelParams::new(kind, vec![1.0 / mean])?;
            finalize(params, data, 0, 0, true)
        }
        ModelKind::Xgamma => {
            let (params, iters, conv) = optimize(kind, data, &[1.0 / mean])?;
            finalize(params, data, iters, 1, conv)
        }
        ModelKind::Gamma => {
            if var == 0.0 {
                return Err(Error::Degenerate(
                    "sample variance is zero; the gamma shape is unidentifiable",
                ));
            }
            let start = [mean * mean / var, mean / var];
            let (params, iters, conv) = optimize(kind, data, &start)?;
            finalize(params, data, iters, 1, conv)
        }
        ModelKind::ExtendedXgamma => {
            if var == 0.0 {
                return Err(Error::Degenerate(
                    "sample variance is zero; the extended xgamma shape is unidentifiable",
                ));
            }
            let gamma_fit = fit_model(ModelKind::Gamma, data)?;
            let xg_fit = fit_model(ModelKind::Xgamma, data)?;
            let (alpha0, theta0) = (mean * mean / var, mean / var);
            let starts: [[f64; 3]; 4] = [
                [gamma_fit.params.values()[0], gamma_fit.params.values()[1], 1e-6],
                [1.0, xg_fit.params.values()[0], 1.0],
                [alpha0, theta0, theta0],
                [1.0, 1.0 / mean, 1.0 / mean],
            ];
            let mut best: Option<(ModelParams, f64, bool)> = None;
            let mut total_iters = 0;
            for start in &starts {
                let (params, iters, conv) = optimize(kind, data, start)?;
                total_iters += iters;
                let value = log_likelihood(&params, data)?;
                let better = match &best {
                    None => true,
                    Some((_, best_value, _)) => value > *best_value,
                };
                if better {
                    best = Some((params, value, conv));
                }
            }
            let (params, _, conv) = best.expect("at least one start ran");
            finalize(params, data, total_iters, starts.len(), conv)
        }
    }
}

/// Runs Nelder–Mead in log-parameter coordinates from `start` (natural
/// scale), restarts once from the incumbent, then applies the Newton polish.
fn optimize(
    kind: ModelKind,
    data: &Sample,
    start: &[f64],
) -> Result<(ModelParams, usize, bool), Error> {
    let objective = |v: &[f64]| -> f64 {
        match decode(kind, v).and_then(|p| log_likelihood(&p, data)) {
            Ok(ll) => -ll,
            Err(_) => f64::INFINITY,
        }
    };
    let v0: Vec<f64> = start.iter().map(|p| p.ln().max(LOG_BETA_FLOOR)).collect();
    let first = nelder_mead(objective, &v0, NM_TOL, NM_MAX_ITER)?;
    let second = nelder_mead(objective, &first.argmin, NM_TOL, NM_MAX_ITER)?;
    let outcome = if second.min_value <= first.min_value { &second } else { &first };
    let mut v = outcome.argmin.clone();
    let polish_iters = polish(kind, data, &mut v);
    let params = decode(kind, &v)?;
    Ok((
        params,
        first.iterations + second.iterations + polish_iters,
        second.converged,
    ))
}

/// Safeguarded Newton refinement on the numerical score, in log coordinates.
///
/// The simplex stops when it can no longer resolve likelihood differences,
/// which leaves the parameters offset by roughly √(ε·|ℓ|/H) and the score an
/// order above [`GRAD_TOL`] on large samples — the residual likelihood gap is
/// below one ulp of ℓ, so no value-driven method can close it. Each sweep
/// here builds a finite-difference Hessian from score evaluations, solves for
/// the Newton step, and backtracks; a step is accepted when it shrinks the
/// score ∞-norm without materially losing likelihood (an ulp-scale slack
/// absorbs rounding of ℓ). Degenerate curvature (for example the β coordinate
/// pinned at its floor) drops to a reduced system on the well-conditioned
/// coordinates, and any failure simply stops the refinement. Returns the
/// number of sweeps applied.
fn polish(kind: ModelKind, data: &Sample, v: &mut Vec<f64>) -> usize {
    let dim = v.len();
    let ll_at = |w: &[f64]| -> Option<f64> {
        let val = decode(kind, w).and_then(|p| log_likelihood(&p, data)).ok()?;
        val.is_finite().then_some(val)
    };
    let score_at = |w: &[f64]| -> Option<Vec<f64>> {
        let p = decode(kind, w).ok()?;
        let g = score_numeric(&p, data).ok()?;
        g.iter().all(|x| x.is_finite()).then_some(g)
    };
    let clamp = |w: &mut [f64]| {
        if kind == ModelKind::ExtendedXgamma {
            w[2] = w[2].max(LOG_BETA_FLOOR);
        }
    };
    let mut best_ll = match ll_at(v) {
        Some(l) => l,
        None => return 0,
    };
    let mut sweeps = 0;
    for _ in 0..POLISH_MAX_ITER {
        let g = match score_at(v) {
            Some(g) => g,
            None => break,
        };
        let g_norm = g.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if g_norm <= 0.01 * GRAD_TOL {
            break;
        }
        // Finite-difference Hessian: one score evaluation per side per column.
        let mut hess = vec![vec![0.0_f64; dim]; dim];
        let mut columns_ok = true;
        for k in 0..dim {
            let step = 1e-4 * v[k].abs().max(1.0);
            let mut plus = v.clone();
            plus[k] += step;
            let mut minus = v.clone();
            minus[k] -= step;
            match (score_at(&plus), score_at(&minus)) {
                (Some(gp), Some(gm)) => {
                    for j in 0..dim {
                        hess[j][k] = (gp[j] - gm[j]) / (2.0 * step);
                    }
                }
                _ => {
                    columns_ok = false;
                    break;
                }
            }
        }
        if !columns_ok {
            break;
        }
        #[allow(clippy::needless_range_loop)] // symmetric (j, k)/(k, j) pair access
        for j in 0..dim {
            for k in (j + 1)..dim {
                let avg = 0.5 * (hess[j][k] + hess[k][j]);
                hess[j][k] = avg;
                hess[k][j] = avg;
            }
        }
        let neg_g: Vec<f64> = g.iter().map(|x| -x).collect();
        let solved = solve_linear(hess.clone(), neg_g.clone()).or_else(|| {
            let max_diag = (0..dim).map(|j| hess[j][j].abs()).fold(0.0, f64::max);
            let active: Vec<usize> = (0..dim)
                .filter(|&j| hess[j][j].abs() > 1e-8 * max_diag)
                .collect();
            if active.is_empty() || active.len() == dim {
                return None;
            }
            let sub_a: Vec<Vec<f64>> = active
                .iter()
                .map(|&r| active.iter().map(|&c| hess[r][c]).collect())
                .collect();
            let sub_b: Vec<f64> = active.iter().map(|&r| neg_g[r]).collect();
            let sub_x = solve_linear(sub_a, sub_b)?;
            let mut full = vec![0.0; dim];
            for (slot, &j) in active.iter().enumerate() {
                full[j] = sub_x[slot];
            }
            Some(full)
        });
        let mut delta = match solved {
            Some(d) => d,
            None => break,
        };
        let delta_norm = delta.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        if !delta_norm.is_finite() || delta_norm == 0.0 {
            break;
        }
        // Polishing starts from a near-optimal incumbent; a long step signals
        // bad curvature, so cap it at half a log unit.
        if delta_norm > 0.5 {
            for d in &mut delta {
                *d *= 0.5 / delta_norm;
            }
        }
        let ll_slack = 64.0 * f64::EPSILON * best_ll.abs().max(1.0);
        let mut improved = false;
        let mut scale = 1.0;
        for _ in 0..6 {
            let mut cand: Vec<f64> = v.iter().zip(&delta).map(|(a, d)| a + scale * d).collect();
            clamp(&mut cand);
            if let (Some(l), Some(gc)) = (ll_at(&cand), score_at(&cand)) {
                let gc_norm = gc.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                if gc_norm < g_norm && l >= best_ll - ll_slack {
                    *v = cand;
                    best_ll = l;
                    improved = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        sweeps += 1;
        if !improved {
            break;
        }
    }
    sweeps
}

/// Solves A x = b for a small dense system by Gaussian elimination with
/// partial pivoting; `None` when a pivot falls below the relative floor.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let magnitude = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    if magnitude == 0.0 || !magnitude.is_finite() {
        return None;
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                a[r][col]
                    .abs()
                    .partial_cmp(&a[s][col].abs())
                    .expect("Hessian entries are finite")
            })
            .expect("column range is non-empty");
        if a[pivot_row][col].abs() < 1e-12 * magnitude {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in (col + 1)..n {
            let m = a[row][col] / a[col][col];
            // Reads row `col` while mutating row `row`; indexing keeps that
            // clearer than a split_at_mut dance.
            #[allow(clippy::needless_range_loop)]
            for k in col..n {
                a[row][k] -= m * a[col][k];
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Maps Nelder–Mead coordinates (log scale) back to validated parameters.
/// The EXg ln β coordinate is clamped at −30 before exponentiation.
fn decode(kind: ModelKind, v: &[f64]) -> Result<ModelParams, Error> {
    let vals: Vec<f64> = match kind {
        ModelKind::ExtendedXgamma => {
            vec![v[0].exp(), v[1].exp(), v[2].max(LOG_BETA_FLOOR).exp()]
        }
        _ => v.iter().map(|x| x.exp()).collect(),
    };
    ModelParams::new(kind, vals)
}

/// Computes the derived fields of a [`FitResult`].
fn finalize(
    params: ModelParams,
    data: &Sample,
    iterations: usize,
    start_points_tried: usize,
    optimizer_converged: bool,
) -> Result<FitResult, Error> {
    let neg2_loglik = -2.0 * log_likelihood(&params, data)?;
    let grad = score_numeric(&params, data)?;
    let grad_inf_norm = grad.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
    Ok(FitResult {
        params,
        neg2_loglik,
        converged: optimizer_converged && grad_inf_norm <= GRAD_TOL,
        iterations,
        grad_inf_norm,
        start_points_tried,
    })
}
