//! Closed-form quantities of the model and calibration of the drift mixture.
//!
//! A randomly picked stock has `log S_T ~ N(m, v)` with
//! `m = mu_hat T - sigma^2 T / 2` and `v = sigma^2 T + sigma_hat^2 T^2`.
//! Its mean `exp(mu_hat T + sigma_hat^2 T^2 / 2)` is also the large-N index
//! level; its median is `exp(m)`.
//!
//! Calibration chains exact values end to end. For the 10% median, 50%
//! expected, sigma = 0.2, T = 5 target this gives `mu_hat = 0.0390620` and
//! `sigma_hat = 0.1296626`. Plugging the rounded `mu_hat = 0.04` into the
//! `sigma_hat` formula instead gives `0.1282`; both round to 13%.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::normal;

/// Target returns from which `(mu_hat, sigma_hat)` are backed out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTarget {
    /// Net return of the median stock over the horizon.
    pub median_return: f64,
    /// Net expected index return over the horizon.
    pub expected_return: f64,
    pub sigma: f64,
    pub horizon: f64,
}

impl CalibrationTarget {
    /// 10% median, 50% expected return over five years at 20% volatility.
    pub fn paper() -> Self {
        Self {
            median_return: 0.10,
            expected_return: 0.50,
            sigma: 0.20,
            horizon: 5.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            ("median_return", self.median_return),
            ("expected_return", self.expected_return),
            ("sigma", self.sigma),
            ("horizon", self.horizon),
        ];
        if let Some((name, value)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Input(format!("{name} must be finite, got {value}")));
        }
        if self.median_return <= -1.0 || self.expected_return <= -1.0 {
            return Err(Error::Input("target returns must exceed -100%".into()));
        }
        if self.sigma <= 0.0 {
            return Err(Error::Input(format!(
                "sigma must be > 0, got {}",
                self.sigma
            )));
        }
        if self.horizon <= 0.0 {
            return Err(Error::Input(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub mu_hat: f64,
    pub sigma_hat: f64,
}

impl Calibration {
    pub fn params(&self, n_stocks: usize, target: &CalibrationTarget) -> Result<ModelParams> {
        ModelParams::new(
            n_stocks,
            target.horizon,
            target.sigma,
            self.mu_hat,
            self.sigma_hat,
        )
    }
}

/// Parameters of `log S_T` for a randomly picked stock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLaw {
    pub log_mean: f64,
    pub log_variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Above,
    Below,
}

/// All closed forms for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSummary {
    pub expected_index_value: f64,
    pub median_stock_value: f64,
    pub underperformance_factor: f64,
    pub log_mean: f64,
    pub log_variance: f64,
}

impl AnalyticSummary {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let law = stock_log_law(params);
        Ok(Self {
            expected_index_value: expected_index_value(params),
            median_stock_value: median_stock_value(params),
            underperformance_factor: underperformance_factor(params),
            log_mean: law.log_mean,
            log_variance: law.log_variance,
        })
    }
}

/// Default 500-stock universe, calibrated to a 10% median and 50% expected return.
pub fn paper_params() -> ModelParams {
    let target = CalibrationTarget::paper();
    calibrate(&target)
        .and_then(|c| c.params(500, &target))
        .expect("default target is feasible")
}

/// `E[S_T] = exp(mu_hat T + sigma_hat^2 T^2 / 2)`, the large-N index level.
pub fn expected_index_value(params: &ModelParams) -> f64 {
    let t = params.horizon;
    (params.mu_hat * t + 0.5 * params.sigma_hat * params.sigma_hat * t * t).exp()
}

/// Median terminal value of a randomly picked stock, `exp(mu_hat T - sigma^2 T / 2)`.
pub fn median_stock_value(params: &ModelParams) -> f64 {
    stock_log_law(params).log_mean.exp()
}

/// Ratio of the expected index level to the median stock,
/// `exp(sigma^2 T / 2 + sigma_hat^2 T^2 / 2)`.
pub fn underperformance_factor(params: &ModelParams) -> f64 {
    let t = params.horizon;
    (0.5 * params.sigma * params.sigma * t + 0.5 * params.sigma_hat * params.sigma_hat * t * t)
        .exp()
}

pub fn stock_log_law(params: &ModelParams) -> LogLaw {
    let t = params.horizon;
    let s2 = params.sigma * params.sigma;
    LogLaw {
        log_mean: params.mu_hat * t - 0.5 * s2 * t,
        log_variance: s2 * t + params.sigma_hat * params.sigma_hat * t * t,
    }
}

/// Backs out `(mu_hat, sigma_hat)` so that the median stock and the expected
/// index hit the target returns.
///
/// `sigma_hat = 0` (expected return fully explained by `mu_hat`) is
/// accepted; targets below that boundary are rejected.
pub fn calibrate(target: &CalibrationTarget) -> Result<Calibration> {
    target.validate()?;
    let t = target.horizon;
    let log_median = target.median_return.ln_1p();
    let log_expected = target.expected_return.ln_1p();
    let correction = 0.5 * target.sigma * target.sigma * t;
    let mu_hat = (log_median + correction) / t;

    // sigma_hat^2 T^2 / 2 = log(1 + r_exp) - mu_hat T
    let gap = log_expected - log_median - correction;
    let scale = log_expected
        .abs()
        .max(log_median.abs())
        .max(correction)
        .max(1.0);
    if gap < -4.0 * f64::EPSILON * scale {
        return Err(Error::Calibration(format!(
            "log(1 + expected_return) = {log_expected:.9} must be >= \
             log(1 + median_return) + sigma^2 T / 2 = {:.9}",
            log_median + correction
        )));
    }
    let sigma_hat = (2.0 * gap.max(0.0)).sqrt() / t;
    Ok(Calibration { mu_hat, sigma_hat })
}

/// `P(S_T > threshold)` or `P(S_T < threshold)` under the unconditional law.
///
/// With zero log-variance the law is a point mass and the result is 0 or 1.
pub fn tail_probability(params: &ModelParams, threshold: f64, direction: Direction) -> Result<f64> {
    params.validate()?;
    if threshold.is_nan() || threshold <= 0.0 || threshold.is_infinite() {
        return Err(Error::Input(format!(
            "threshold must be positive and finite, got {threshold}"
        )));
    }
    let law = stock_log_law(params);
    let log_threshold = threshold.ln();
    if law.log_variance == 0.0 {
        let hit = match direction {
            Direction::Above => law.log_mean > log_threshold,
            Direction::Below => law.log_mean < log_threshold,
        };
        return Ok(if hit { 1.0 } else { 0.0 });
    }
    let d = (log_threshold - law.log_mean) / law.log_variance.sqrt();
    Ok(match direction {
        Direction::Above => normal::sf(d),
        Direction::Below => normal::cdf(d),
    })
}
