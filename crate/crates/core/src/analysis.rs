//! Scaling-law regression on log-linearized models.
//!
//! Every model is linear after taking logs, so each fit is a single
//! unweighted least-squares solve. Confidence intervals use the normal
//! approximation `1.96 * SE`.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};

/// Normal-approximation multiplier for a 95% interval.
pub const CI95_Z: f64 = 1.96;
/// Condition number of the design matrix above which a warning is attached.
pub const CONDITION_WARNING: f64 = 1e6;
/// Relative singular-value cutoff below which the design is rejected.
const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LogBase::Natural => "e",
            LogBase::Two => "2",
            LogBase::Ten => "10",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "e" | "ln" | "natural" => Some(LogBase::Natural),
            "2" | "log2" => Some(LogBase::Two),
            "10" | "log10" => Some(LogBase::Ten),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitModel {
    /// `t = a N^gamma log N`
    PowerLog,
    /// `t = a (log N)^b (log log N)^c`
    LogLogPower,
    /// `t = a N^gamma`
    PurePower,
}

impl FitModel {
    pub fn name(self) -> &'static str {
        match self {
            FitModel::PowerLog => "power_log",
            FitModel::LogLogPower => "loglog_power",
            FitModel::PurePower => "pure_power",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "power_log" => Some(FitModel::PowerLog),
            "loglog_power" => Some(FitModel::LogLogPower),
            "pure_power" => Some(FitModel::PurePower),
            _ => None,
        }
    }

    pub fn coefficient_names(self) -> &'static [&'static str] {
        match self {
            FitModel::PowerLog | FitModel::PurePower => &["a", "gamma"],
            FitModel::LogLogPower => &["a", "b", "c"],
        }
    }

    pub fn min_points(self) -> usize {
        match self {
            FitModel::LogLogPower => 4,
            _ => 3,
        }
    }
}

/// Coefficients are in model order (`a` first). The prefactor's standard
/// error is propagated from `log a` to first order.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: FitModel,
    pub log_base: LogBase,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub ci95: Vec<f64>,
    /// Root-mean-square residual of the linearized (natural-log) response.
    pub residual_rms: f64,
    pub n_points: usize,
    pub condition_number: f64,
    pub warning: Option<String>,
}

impl FitResult {
    pub fn prefactor(&self) -> f64 {
        self.coefficients[0]
    }

    /// The `N` exponent for the power models, `b` for the log-log model.
    pub fn exponent(&self) -> f64 {
        self.coefficients[1]
    }

    pub fn exponent_se(&self) -> f64 {
        self.standard_errors[1]
    }

    /// Fitted model evaluated at `n`.
    pub fn predict(&self, n: f64) -> f64 {
        let c = &self.coefficients;
        match self.model {
            FitModel::PowerLog => c[0] * n.powf(c[1]) * self.log_base.log(n),
            FitModel::LogLogPower => {
                let l = self.log_base.log(n);
                c[0] * l.powf(c[1]) * l.ln().powf(c[2])
            }
            FitModel::PurePower => c[0] * n.powf(c[1]),
        }
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        let idx = self.model.coefficient_names().iter().position(|n| *n == name)?;
        Some(self.coefficients[idx])
    }
}

fn check_points(points: &[(f64, f64)], model: FitModel, min_n: f64) -> Result<()> {
    if points.len() < model.min_points() {
        return invalid(format!(
            "{} fit needs at least {} points, got {}",
            model.name(),
            model.min_points(),
            points.len()
        ));
    }
    for &(n, t) in points {
        if !(n.is_finite() && n >= min_n) {
            return invalid(format!("{} fit needs N >= {min_n}, got {n}", model.name()));
        }
        if !(t.is_finite() && t > 0.0) {
            return invalid(format!("fit needs positive finite t, got {t}"));
        }
    }
    Ok(())
}

/// Fit `t = a N^gamma log N` with `log` in the chosen base.
pub fn fit_power_log_base(points: &[(f64, f64)], base: LogBase) -> Result<FitResult> {
    check_points(points, FitModel::PowerLog, 3.0)?;
    let rows: Vec<Vec<f64>> = points.iter().map(|&(n, _)| vec![n.ln()]).collect();
    let y: Vec<f64> = points.iter().map(|&(n, t)| t.ln() - base.log(n).ln()).collect();
    solve(FitModel::PowerLog, base, &rows, &y)
}

pub fn fit_power_log(points: &[(f64, f64)]) -> Result<FitResult> {
    fit_power_log_base(points, LogBase::Natural)
}

/// Fit `t = a (log N)^b (log log N)^c`; the base applies to the inner
/// logarithm and changes only the prefactor unless `log N` itself is rescaled.
pub fn fit_loglog_power(points: &[(f64, f64)], base: LogBase) -> Result<FitResult> {
    check_points(points, FitModel::LogLogPower, 16.0)?;
    let mut rows = Vec::with_capacity(points.len());
    for &(n, _) in points {
        let l = base.log(n);
        if l <= 1.0 {
            return invalid(format!("log N must exceed 1 for the log-log fit, got {l} at N = {n}"));
        }
        rows.push(vec![l.ln(), l.ln().ln()]);
    }
    let y: Vec<f64> = points.iter().map(|&(_, t)| t.ln()).collect();
    solve(FitModel::LogLogPower, base, &rows, &y)
}

/// Fit `t = a N^gamma`.
pub fn fit_pure_power(points: &[(f64, f64)]) -> Result<FitResult> {
    check_points(points, FitModel::PurePower, 2.0)?;
    let rows: Vec<Vec<f64>> = points.iter().map(|&(n, _)| vec![n.ln()]).collect();
    let y: Vec<f64> = points.iter().map(|&(_, t)| t.ln()).collect();
    solve(FitModel::PurePower, LogBase::Natural, &rows, &y)
}

pub fn fit(model: FitModel, points: &[(f64, f64)], base: LogBase) -> Result<FitResult> {
    match model {
        FitModel::PowerLog => fit_power_log_base(points, base),
        FitModel::LogLogPower => fit_loglog_power(points, base),
        FitModel::PurePower => fit_pure_power(points),
    }
}

/// OLS with an intercept column, via SVD.
fn solve(model: FitModel, log_base: LogBase, regressors: &[Vec<f64>], y: &[f64]) -> Result<FitResult> {
    let n = y.len();
    let k = regressors[0].len() + 1;
    let x = DMatrix::from_fn(n, k, |i, j| if j == 0 { 1.0 } else { regressors[i][j - 1] });
    let yv = DVector::from_column_slice(y);

    let svd = x.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let sigma_min = svd.singular_values.min();
    if !(sigma_min > RANK_TOLERANCE * sigma_max) {
        return invalid(format!("{} design matrix is degenerate (are all N equal?)", model.name()));
    }
    let condition_number = sigma_max / sigma_min;
    let u = svd.u.as_ref().expect("U requested");
    let v_t = svd.v_t.as_ref().expect("V^T requested");
    let inv_sigma = svd.singular_values.map(|s| 1.0 / s);
    let beta = v_t.transpose() * DVector::from_iterator(k, (u.transpose() * &yv).iter().zip(inv_sigma.iter()).map(|(a, b)| a * b));

    let residuals = &yv - &x * &beta;
    let rss = residuals.norm_squared();
    let s2 = rss / (n - k) as f64;
    // (X^T X)^-1 = V diag(1/sigma^2) V^T
    let v = v_t.transpose();
    let variances: Vec<f64> = (0..k)
        .map(|j| (0..k).map(|m| (v[(j, m)] * inv_sigma[m]).powi(2)).sum::<f64>() * s2)
        .collect();
    let mut coefficients: Vec<f64> = beta.iter().copied().collect();
    let mut standard_errors: Vec<f64> = variances.iter().map(|v| v.sqrt()).collect();
    coefficients[0] = beta[0].exp();
    standard_errors[0] *= coefficients[0];
    let ci95 = standard_errors.iter().map(|s| CI95_Z * s).collect();
    let warning = (condition_number > CONDITION_WARNING).then(|| {
        format!("regressors are nearly collinear (condition number {condition_number:.3e})")
    });
    Ok(FitResult {
        model,
        log_base,
        coefficients,
        standard_errors,
        ci95,
        residual_rms: (rss / n as f64).sqrt(),
        n_points: n,
        condition_number,
        warning,
    })
}

/// `count` points spaced evenly in `log N` over `[lo, hi]`, rounded to integers.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo.round()];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round())
        .collect()
}
