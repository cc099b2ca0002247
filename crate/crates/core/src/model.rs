//! Drift-mixture GBM universe.
//!
//! Stock `i` has drift `mu_i ~ N(mu_hat, sigma_hat^2)`, common volatility
//! `sigma`, and starts at `S_0 = 1`. Only the terminal value
//! `S_T = exp((mu_i - sigma^2/2) T + sigma sqrt(T) Z)` is ever simulated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Purpose, SeedSpec};
use crate::sum::corrected_mean;

/// The five constants of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Number of stocks in the index, `N`.
    pub n_stocks: usize,
    /// Horizon `T` in years.
    pub horizon: f64,
    /// Annual volatility shared by every stock.
    pub sigma: f64,
    /// Mean of the cross-sectional drift distribution (per year).
    pub mu_hat: f64,
    /// Standard deviation of the cross-sectional drift distribution (per year).
    pub sigma_hat: f64,
}

impl ModelParams {
    pub fn new(
        n_stocks: usize,
        horizon: f64,
        sigma: f64,
        mu_hat: f64,
        sigma_hat: f64,
    ) -> Result<Self> {
        let params = Self {
            n_stocks,
            horizon,
            sigma,
            mu_hat,
            sigma_hat,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("horizon", self.horizon),
            ("sigma", self.sigma),
            ("mu_hat", self.mu_hat),
            ("sigma_hat", self.sigma_hat),
        ];
        if let Some((name, value)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "{name} must be finite, got {value}"
            )));
        }
        if self.n_stocks == 0 {
            return Err(Error::InvalidParams("n_stocks must be at least 1".into()));
        }
        if self.horizon <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "horizon must be > 0, got {}",
                self.horizon
            )));
        }
        if self.sigma < 0.0 {
            return Err(Error::InvalidParams(format!(
                "sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        if self.sigma_hat < 0.0 {
            return Err(Error::InvalidParams(format!(
                "sigma_hat must be >= 0, got {}",
                self.sigma_hat
            )));
        }
        Ok(())
    }
}

/// One sampled cross-section of `N` stocks at the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct UniverseDraw {
    drifts: Vec<f64>,
    terminal_values: Vec<f64>,
}

impl UniverseDraw {
    pub fn drifts(&self) -> &[f64] {
        &self.drifts
    }

    /// Gross terminal values, multiples of the unit starting price.
    pub fn terminal_values(&self) -> &[f64] {
        &self.terminal_values
    }

    pub fn len(&self) -> usize {
        self.terminal_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terminal_values.is_empty()
    }

    /// Equal-capital index level `(1/N) sum S_T`.
    pub fn index_value(&self) -> f64 {
        corrected_mean(self.terminal_values.iter().copied())
    }
}

/// `N` i.i.d. drifts from `N(mu_hat, sigma_hat^2)`, read from `seed`'s stream.
pub fn draw_drifts(params: &ModelParams, seed: SeedSpec) -> Result<Vec<f64>> {
    params.validate()?;
    let mut drifts = Vec::with_capacity(params.n_stocks);
    fill_drifts(params, params.n_stocks, seed, &mut drifts);
    Ok(drifts)
}

/// Exact GBM solution at the horizon for a unit start.
#[inline]
pub fn terminal_value(drift: f64, sigma: f64, horizon: f64, z: f64) -> f64 {
    ((drift - 0.5 * sigma * sigma) * horizon + sigma * horizon.sqrt() * z).exp()
}

/// Draws drifts and terminal values for all `N` stocks.
///
/// `seed` is a stride-aligned trial base: drifts come from its
/// [`Purpose::Drift`] stream and shocks from its [`Purpose::Shock`] stream,
/// so `draw_universe(p, s).drifts() == draw_drifts(p, s)`.
pub fn draw_universe(params: &ModelParams, seed: SeedSpec) -> Result<UniverseDraw> {
    params.validate()?;
    let mut drifts = Vec::with_capacity(params.n_stocks);
    let mut terminal_values = Vec::with_capacity(params.n_stocks);
    fill_universe(
        params,
        params.n_stocks,
        seed,
        &mut drifts,
        &mut terminal_values,
    );
    Ok(UniverseDraw {
        drifts,
        terminal_values,
    })
}

pub(crate) fn fill_drifts(params: &ModelParams, count: usize, seed: SeedSpec, out: &mut Vec<f64>) {
    let mut stream = seed.purpose(Purpose::Drift).stream();
    out.clear();
    out.extend((0..count).map(|_| params.mu_hat + params.sigma_hat * stream.standard_normal()));
}

/// Buffer-reusing universe draw of `count` stocks; `params` must be valid.
pub(crate) fn fill_universe(
    params: &ModelParams,
    count: usize,
    seed: SeedSpec,
    drifts: &mut Vec<f64>,
    values: &mut Vec<f64>,
) {
    fill_drifts(params, count, seed, drifts);
    let mut shocks = seed.purpose(Purpose::Shock).stream();
    values.clear();
    values.extend(
        drifts
            .iter()
            .map(|&mu| terminal_value(mu, params.sigma, params.horizon, shocks.standard_normal())),
    );
}

/// Terminal values of the stocks at sorted, distinct positions `members`
/// of the universe `draw_universe(params, seed)` would produce.
///
/// Each stock consumes exactly one uniform from the drift stream and one
/// from the shock stream, so unselected stocks are skipped without
/// transforming their draws.
pub(crate) fn fill_members(
    params: &ModelParams,
    seed: SeedSpec,
    members: &[usize],
    out: &mut Vec<f64>,
) {
    let mut drift = seed.purpose(Purpose::Drift).stream();
    let mut shock = seed.purpose(Purpose::Shock).stream();
    let mut next = 0;
    out.clear();
    for &m in members {
        drift.skip(m - next);
        shock.skip(m - next);
        let mu = params.mu_hat + params.sigma_hat * drift.standard_normal();
        out.push(terminal_value(
            mu,
            params.sigma,
            params.horizon,
            shock.standard_normal(),
        ));
        next = m + 1;
    }
}

/// Index level of a list of gross values (arithmetic mean, ascending order).
pub fn index_value(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Input("index of an empty universe".into()));
    }
    Ok(corrected_mean(values.iter().copied()))
}

/// Equal-weighted net return of the stocks at `subset`.
pub fn portfolio_return(values: &[f64], subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::Input("empty portfolio".into()));
    }
    let mut members = subset.to_vec();
    members.sort_unstable();
    if let Some(&bad) = members.iter().find(|&&i| i >= values.len()) {
        return Err(Error::Input(format!(
            "stock index {bad} out of range for a universe of {}",
            values.len()
        )));
    }
    if let Some(pair) = members.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Input(format!(
            "stock index {} selected twice",
            pair[0]
        )));
    }
    Ok(sorted_subset_gross(values, &members) - 1.0)
}

/// Gross equal-weighted value of already sorted, distinct, in-range members.
#[inline]
pub(crate) fn sorted_subset_gross(values: &[f64], members: &[usize]) -> f64 {
    corrected_mean(members.iter().map(|&i| values[i]))
}
