//! Goodness of fit and model comparison: Kolmogorov–Smirnov statistic and
//! asymptotic p-value, AIC/BIC, and a comparison harness that fits several
//! families to one dataset and ranks them.

use crate::dataio::Sample;
use crate::error::Error;
use crate::fit::{fit_model, FitResult};
use crate::model::ModelKind;

/// One fitted model with its fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct GofReport {
    /// The underlying maximum-likelihood fit.
    pub fit: FitResult,
    /// Kolmogorov–Smirnov distance between the empirical CDF and the fitted CDF.
    pub ks_stat: f64,
    /// Asymptotic Kolmogorov p-value of `ks_stat` (see [`ks_pvalue`] caveat).
    pub ks_pvalue: f64,
    /// Akaike information criterion, −2 log L + 2k.
    pub aic: f64,
    /// Bayesian information criterion, −2 log L + k ln n.
    pub bic: f64,
}

impl GofReport {
    /// Fits `kind` to `data` and attaches K-S, AIC, and BIC diagnostics.
    pub fn evaluate(kind: ModelKind, data: &Sample) -> Result<Self, Error> {
        let fit = fit_model(kind, data)?;
        let params = fit.params.clone();
        let ks_stat = ks_statistic(data, |x| params.cdf(x))?;
        let ks_pvalue = ks_pvalue(ks_stat, data.len());
        let k = kind.param_count();
        Ok(Self {
            aic: aic(fit.neg2_loglik, k),
            bic: bic(fit.neg2_loglik, k, data.len()),
            ks_stat,
            ks_pvalue,
            fit,
        })
    }

    /// Which family this report describes.
    pub fn model(&self) -> ModelKind {
        self.fit.params.kind()
    }

    /// −2 log L of the fit.
    pub fn neg2_loglik(&self) -> f64 {
        self.fit.neg2_loglik
    }
}

/// Kolmogorov–Smirnov distance sup |F̂ₙ − F| between the empirical CDF of
/// `data` and a model CDF.
///
/// Evaluated exactly at the order statistics:
/// Dₙ = maxᵢ max(i/n − F(x₍ᵢ₎), F(x₍ᵢ₎) − (i−1)/n).
pub fn ks_statistic<F>(data: &Sample, mut cdf: F) -> Result<f64, Error>
where
    F: FnMut(f64) -> Result<f64, Error>,
{
    let sorted = data.sorted();
    let n = sorted.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x)?;
        if !f.is_finite() || !(-1e-12..=1.0 + 1e-12).contains(&f) {
            return Err(Error::Domain("model cdf returned a value outside [0, 1]"));
        }
        let upper = (i + 1) as f64 / n - f;
        let lower = f - i as f64 / n;
        d = d.max(upper).max(lower);
    }
    Ok(d)
}

/// Asymptotic Kolmogorov p-value P(Dₙ > d) = 2 Σₖ (−1)^{k−1} e^{−2k²nd²},
/// truncated when a term falls below 1e-12 (at most 100 terms) and clamped
/// to [0, 1]; returns exactly 1 when nd² ≤ 0.005 (the series limit is
/// indistinguishable from 1 there).
///
/// This is the classical limit distribution for a *fixed* hypothesized CDF.
/// When parameters have been estimated from the same data it is optimistic
/// (biased upward); rankings remain meaningful, absolute levels do not.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    if d <= 0.0 {
        return 1.0;
    }
    let nd2 = n as f64 * d * d;
    if nd2 <= 0.005 {
        return 1.0;
    }
    let mut sum = 0.0_f64;
    for k in 1..=100u32 {
        let term = (-2.0 * f64::from(k * k) * nd2).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Akaike information criterion.
pub fn aic(neg2_loglik: f64, k: usize) -> f64 {
    neg2_loglik + 2.0 * k as f64
}

/// Bayesian information criterion.
pub fn bic(neg2_loglik: f64, k: usize, n: usize) -> f64 {
    neg2_loglik + k as f64 * (n as f64).ln()
}

/// Fits every requested family to `data` and sorts the successes by
/// −2 log L ascending (best first), followed by the failures in request
/// order. A family that cannot be fitted is reported, not propagated, so one
/// failure does not abort the comparison.
pub fn compare_models(
    data: &Sample,
    kinds: &[ModelKind],
) -> Vec<(ModelKind, Result<GofReport, Error>)> {
    let mut outcomes: Vec<(ModelKind, Result<GofReport, Error>)> = kinds
        .iter()
        .map(|&kind| (kind, GofReport::evaluate(kind, data)))
        .collect();
    outcomes.sort_by(|a, b| match (&a.1, &b.1) {
        (Ok(ra), Ok(rb)) => ra
            .neg2_loglik()
            .partial_cmp(&rb.neg2_loglik())
            .expect("neg2_loglik is never NaN"),
        (Ok(_), Err(_)) => std::cmp::Ordering::Less,
        (Err(_), Ok(_)) => std::cmp::Ordering::Greater,
        (Err(_), Err(_)) => std::cmp::Ordering::Equal,
    });
    outcomes
}
