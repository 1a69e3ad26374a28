//! Pricing and volume-analysis toolkit for equity options.
//!
//! The crate is organized around a pipeline:
//!
//! * [`pricing`] — closed-form European pricing (Black-Scholes), an
//!   analytic American approximation (Barone-Adesi-Whaley) with an
//!   iteratively solved early-exercise boundary, and a Cox-Ross-Rubinstein
//!   lattice used as a verification oracle.
//! * [`market_data`] — end-of-day option-chain ingestion, treasury curve
//!   interpolation, and trailing historical volatility.
//! * [`pricing_errors`] — model-minus-market error series with outlier
//!   handling and descriptive statistics.
//! * [`econometrics`] — OLS with classical inference, PACF-based lag
//!   selection, an augmented Dickey-Fuller unit-root test, and
//!   variance-inflation factors.
//! * [`pipeline`] — orchestration: builds the analysis table, fits the
//!   log-volume autoregression with pricing-error shocks, estimates the
//!   share of volume attributable to systematic noise, and emits reports.
//!   Also hosts a deterministic synthetic-market generator for end-to-end
//!   testing without proprietary data.
//!
//! All numeric routines are pure functions of their inputs; nothing in the
//! crate holds shared mutable state, so the API is safe to drive from
//! multiple threads.

pub mod econometrics;
pub mod market_data;
pub mod pipeline;
pub mod pricing;
pub mod pricing_errors;
