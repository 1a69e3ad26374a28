//! Option pricing models.
//!
//! Three pricers share the same contract/market vocabulary:
//!
//! * [`bs_price`] — closed-form European price under Black-Scholes with a
//!   continuous dividend yield (cost of carry `b = r - d`).
//! * [`baw_price`] — the Barone-Adesi-Whaley analytic approximation for
//!   American exercise: the European value plus an early-exercise premium
//!   `A (S / S_crit)^q` that switches to intrinsic value beyond the
//!   critical underlying level.
//! * [`crr_binomial_price`] — a Cox-Ross-Rubinstein lattice supporting
//!   both exercise styles, kept as an independent verification oracle.
//!
//! Everything here is a pure function of its arguments.

mod baw;
mod black_scholes;
mod binomial;
mod normal;

pub use baw::{baw_critical_price, baw_intermediates, baw_price, baw_q_values, BawIntermediates};
pub use black_scholes::{bs_d_values, bs_price};
pub use binomial::crr_binomial_price;
pub use normal::{std_normal_cdf, std_normal_pdf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Call or put.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionType {
    Call,
    Put,
}

impl std::fmt::Display for OptionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OptionType::Call => write!(f, "call"),
            OptionType::Put => write!(f, "put"),
        }
    }
}

/// Exercise right: at expiry only, or any time up to expiry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExerciseStyle {
    European,
    American,
}

impl std::fmt::Display for ExerciseStyle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExerciseStyle::European => write!(f, "european"),
            ExerciseStyle::American => write!(f, "american"),
        }
    }
}

/// Contractual terms of a single option.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionContractSpec {
    pub option_type: OptionType,
    pub exercise_style: ExerciseStyle,
    /// Strike price, > 0.
    pub strike: f64,
    /// Remaining life in years, >= 0.
    pub time_to_expiry: f64,
}

impl OptionContractSpec {
    pub fn new(
        option_type: OptionType,
        exercise_style: ExerciseStyle,
        strike: f64,
        time_to_expiry: f64,
    ) -> Result<Self, PricingError> {
        if !strike.is_finite() || !time_to_expiry.is_finite() {
            return Err(PricingError::NonFinite("contract terms"));
        }
        if strike <= 0.0 {
            return Err(PricingError::NonPositive("strike"));
        }
        if time_to_expiry < 0.0 {
            return Err(PricingError::Negative("time_to_expiry"));
        }
        Ok(Self {
            option_type,
            exercise_style,
            strike,
            time_to_expiry,
        })
    }

    /// Payoff if exercised immediately at `spot`.
    pub fn intrinsic_value(&self, spot: f64) -> f64 {
        match self.option_type {
            OptionType::Call => (spot - self.strike).max(0.0),
            OptionType::Put => (self.strike - spot).max(0.0),
        }
    }

    pub(crate) fn validate(&self) -> Result<(), PricingError> {
        if !self.strike.is_finite() || !self.time_to_expiry.is_finite() {
            return Err(PricingError::NonFinite("contract terms"));
        }
        if self.strike <= 0.0 {
            return Err(PricingError::NonPositive("strike"));
        }
        if self.time_to_expiry < 0.0 {
            return Err(PricingError::Negative("time_to_expiry"));
        }
        Ok(())
    }
}

/// Market inputs at a pricing moment.
///
/// The cost of carry is always `rate - dividend_yield`; it is exposed as a
/// method rather than a field so it can never drift out of sync.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Underlying price, > 0.
    pub spot: f64,
    /// Continuously compounded risk-free rate per annum.
    pub rate: f64,
    /// Continuous dividend yield per annum, >= 0.
    pub dividend_yield: f64,
    /// Annualized volatility, > 0.
    pub volatility: f64,
}

impl MarketParams {
    pub fn new(
        spot: f64,
        rate: f64,
        dividend_yield: f64,
        volatility: f64,
    ) -> Result<Self, PricingError> {
        let params = Self {
            spot,
            rate,
            dividend_yield,
            volatility,
        };
        params.validate()?;
        Ok(params)
    }

    /// Cost of carry `b = r - d`.
    pub fn cost_of_carry(&self) -> f64 {
        self.rate - self.dividend_yield
    }

    pub(crate) fn validate(&self) -> Result<(), PricingError> {
        if !(self.spot.is_finite()
            && self.rate.is_finite()
            && self.dividend_yield.is_finite()
            && self.volatility.is_finite())
        {
            return Err(PricingError::NonFinite("market params"));
        }
        if self.spot <= 0.0 {
            return Err(PricingError::NonPositive("spot"));
        }
        if self.volatility <= 0.0 {
            return Err(PricingError::NonPositive("volatility"));
        }
        if self.dividend_yield < 0.0 {
            return Err(PricingError::Negative("dividend_yield"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PricingError {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("{0} must be non-negative")]
    Negative(&'static str),
    /// Zero time to expiry or zero volatility: d1/d2 are undefined and
    /// callers are expected to take the intrinsic-value path instead.
    #[error("degenerate input for d-values: {0}")]
    Degenerate(&'static str),
    #[error("operation requires {expected} exercise style")]
    StyleMismatch { expected: ExerciseStyle },
    /// Rate below the threshold where the early-exercise exponents are
    /// computable; the American price degenerates to the European one.
    #[error("rate too close to zero for early-exercise terms")]
    DegenerateRate,
    #[error("binomial steps must be >= 1")]
    ZeroSteps,
    #[error("lattice up-probability {p} outside [0, 1]; step size too coarse for these parameters")]
    BadLattice { p: f64 },
    #[error(
        "critical-price solver did not converge: last iterate {last_iterate}, residual {residual}"
    )]
    SolverDiverged { last_iterate: f64, residual: f64 },
}
