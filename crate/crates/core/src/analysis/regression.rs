use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::family::{best_effort, sigma_off_batch, FamilyParams, PeterssonValue, TruncationPolicy};

/// Least-squares line through stored `(log x, log y)` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

impl RegressionResult {
    /// Fits `y = intercept + slope·x` to the given points.
    pub fn fit(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(LabError::DegenerateRegression("need at least two points".into()));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(LabError::DegenerateRegression("non-finite point".into()));
        }
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
        if sxx == 0.0 {
            return Err(LabError::DegenerateRegression("all x values coincide".into()));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
        Ok(Self { slope, intercept, r_squared, points })
    }

    /// Fit of `log y` against `log x`; every `y` must be positive.
    pub fn log_log(data: &[(f64, f64)]) -> Result<Self> {
        if data.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
            return Err(LabError::DegenerateRegression("log-log fit needs positive data".into()));
        }
        Self::fit(data.iter().map(|&(x, y)| (x.ln(), y.ln())).collect())
    }

    pub fn refit(&self) -> Result<Self> {
        Self::fit(self.points.clone())
    }
}

/// One level of a decay regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub q: u64,
    pub m: u64,
    pub n: u64,
    pub sigma: PeterssonValue,
}

fn check_levels(params_list: &[FamilyParams]) -> Result<()> {
    if params_list.len() < 4 {
        return Err(LabError::InvalidInput(format!(
            "decay regression needs at least 4 levels, got {}",
            params_list.len()
        )));
    }
    if params_list.windows(2).any(|w| w[0].k != w[1].k) {
        return Err(LabError::InvalidInput("all levels must share the weight".into()));
    }
    Ok(())
}

/// Regression of `log |Δ(m,n) − δ(m,n)|` on `log q`.
///
/// Values whose tail is not certified enter with their best estimate; the
/// returned points carry the honest tail bounds.
pub fn delta_decay_regression(
    params_list: &[FamilyParams],
    m: u64,
    n: u64,
    policy: &TruncationPolicy,
) -> Result<(RegressionResult, Vec<DecayPoint>)> {
    check_levels(params_list)?;
    let mut pts = Vec::new();
    for p in params_list {
        let sigma = best_effort(crate::family::sigma_off(m, n, p, policy))?;
        pts.push(DecayPoint { q: p.q, m, n, sigma });
    }
    let data: Vec<(f64, f64)> = pts.iter().map(|d| (d.q as f64, d.sigma.value.abs())).collect();
    Ok((RegressionResult::log_log(&data)?, pts))
}

/// Regression of `log max_{m,n <= max_mn} |Δ(m,n) − δ(m,n)|` on `log q`.
pub fn max_delta_decay_regression(
    params_list: &[FamilyParams],
    max_mn: u64,
    policy: &TruncationPolicy,
) -> Result<(RegressionResult, Vec<DecayPoint>)> {
    check_levels(params_list)?;
    let pairs: Vec<(u64, u64)> = (1..=max_mn).flat_map(|m| (1..=max_mn).map(move |n| (m, n))).collect();
    let mut pts = Vec::new();
    for p in params_list {
        let vals = sigma_off_batch(&pairs, p, policy)?;
        let (i, best) = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.value.abs().total_cmp(&b.1.value.abs()))
            .expect("nonempty pair grid");
        pts.push(DecayPoint { q: p.q, m: pairs[i].0, n: pairs[i].1, sigma: *best });
    }
    let data: Vec<(f64, f64)> = pts.iter().map(|d| (d.q as f64, d.sigma.value.abs())).collect();
    Ok((RegressionResult::log_log(&data)?, pts))
}
