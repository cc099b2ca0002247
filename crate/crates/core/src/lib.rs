//! Stock-selection simulation for an index of drift-mixture GBM stocks.
//!
//! Each stock follows a geometric Brownian motion with a drift drawn once
//! from `N(mu_hat, sigma_hat^2)`. Only terminal values matter, so stocks are
//! simulated with the exact lognormal solution at the horizon. The crate
//! provides:
//!
//! * [`model`]: seeded universe draws and index/portfolio arithmetic,
//! * [`analytic`]: closed-form index expectation, median, tails and calibration,
//! * [`enumerate`]: exhaustive equal-weighted subset statistics,
//! * [`montecarlo`]: the over/under-performance frequency experiment,
//! * [`report`]: sample statistics, CSV and SVG output,
//! * [`cli`]: the `indexsim` command line front end.

pub mod analytic;
pub mod cli;
pub mod enumerate;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod normal;
pub mod report;
pub mod rng;
mod sum;

pub use error::{Error, Result};
