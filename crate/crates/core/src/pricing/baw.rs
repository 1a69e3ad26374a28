//! Barone-Adesi-Whaley analytic approximation for American options.
//!
//! The American value is decomposed into the European value plus an early
//! exercise premium of the form `A (S / S_crit)^q`, where `q` solves
//!
//! `q^2 + q (2b/sigma^2 - 1) - 2r / (sigma^2 h) = 0`
//!
//! with the time-scaling factor `h(T) = 1 - e^{-rT}`. Note that `h` is a
//! dimensionless scaling in (0, 1], not the strike; presentations of this
//! model sometimes reuse one symbol for both, so this module keeps them
//! strictly apart (`strike` vs `big_x`).
//!
//! The critical underlying level is the root of the value-matching
//! condition; for a call,
//!
//! `S* - K = c(S*) + (1 - e^{(b-r)T} N(d1(S*))) S* / q2`
//!
//! and the premium coefficient is `A2 = (S*/q2)(1 - e^{(b-r)T} N(d1(S*)))`.
//! Puts use `q1 < 0`, `-d1`, and the boundary `S**` below the strike. The
//! root is found by Newton-Raphson seeded at the strike with a bisection
//! fallback.
//!
//! Special cases, handled before any iteration:
//!
//! * `b >= r` (zero dividend yield): a call is never exercised early, so
//!   there is no finite boundary. The critical price is reported as
//!   `+inf` and the price equals the European value.
//! * `r` below 1e-12: the `2r/(sigma^2 h)` term is a 0/0 limit, so the
//!   premium is not computable and the European value is returned.

use super::black_scholes::{bs_d_values, european_value};
use super::normal::{normal_cdf, std_normal_pdf};
use super::{ExerciseStyle, MarketParams, OptionContractSpec, OptionType, PricingError};

/// Rates below this are treated as zero for early-exercise purposes.
const RATE_EPS: f64 = 1e-12;
/// Newton convergence target on the value-matching residual, per unit of
/// strike. The contract tolerance checked downstream is 1e-6 * K.
const NEWTON_TOL: f64 = 1e-9;
/// Residual level the solver must reach for the result to be accepted.
const CONTRACT_TOL: f64 = 1e-6;
const MAX_NEWTON_ITERS: usize = 100;
const MAX_BISECT_ITERS: usize = 200;

/// Intermediate quantities of the approximation, exposed for diagnostics
/// and verification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BawIntermediates {
    /// Negative root of the premium-exponent quadratic (puts).
    pub q1: f64,
    /// Positive root of the premium-exponent quadratic (calls).
    pub q2: f64,
    /// Time-scaling factor `1 - e^{-rT}` in (0, 1].
    pub big_x: f64,
    /// Put premium coefficient; 0 for calls.
    pub a1: f64,
    /// Call premium coefficient; 0 for puts and 0 when there is no finite
    /// call boundary (`b >= r`).
    pub a2: f64,
    /// Early-exercise boundary: `S*` for calls (`+inf` when `b >= r`),
    /// `S**` for puts.
    pub critical_price: f64,
    /// Root-finding iterations spent (Newton plus any bisection).
    pub iterations_used: usize,
}

/// The exponent roots `(q1, q2)` and the scaling factor `h = 1 - e^{-rT}`.
///
/// `q1 < 0 < q2` whenever the rate is positive. Degenerate rates (below
/// 1e-12) make `2r/(sigma^2 h)` a 0/0 limit and are rejected; callers fall
/// back to the European value.
pub fn baw_q_values(
    params: &MarketParams,
    spec: &OptionContractSpec,
) -> Result<(f64, f64, f64), PricingError> {
    spec.validate()?;
    params.validate()?;
    if spec.time_to_expiry <= 0.0 {
        return Err(PricingError::Degenerate("time_to_expiry is zero"));
    }
    if params.rate < RATE_EPS {
        return Err(PricingError::DegenerateRate);
    }
    let t = spec.time_to_expiry;
    let sigma_sq = params.volatility * params.volatility;
    let big_x = 1.0 - (-params.rate * t).exp();
    let n_minus_1 = 2.0 * params.cost_of_carry() / sigma_sq - 1.0;
    let m_over_x = 2.0 * params.rate / (sigma_sq * big_x);
    let discriminant = (n_minus_1 * n_minus_1 + 4.0 * m_over_x).sqrt();
    let q1 = 0.5 * (-n_minus_1 - discriminant);
    let q2 = 0.5 * (-n_minus_1 + discriminant);
    Ok((q1, q2, big_x))
}

/// Premium coefficient bracket `1 - e^{(b-r)T} N(s * d1(S))` where `s` is
/// +1 for calls and -1 for puts.
fn premium_bracket(spec: &OptionContractSpec, params: &MarketParams, boundary_spot: f64) -> f64 {
    let at_boundary = MarketParams {
        spot: boundary_spot,
        ..*params
    };
    // sigma > 0 and T > 0 are guaranteed by the callers.
    let (d1, _) = bs_d_values(spec, &at_boundary).expect("d-values at solver iterate");
    let carry_discount = ((params.cost_of_carry() - params.rate) * spec.time_to_expiry).exp();
    match spec.option_type {
        OptionType::Call => 1.0 - carry_discount * normal_cdf(d1),
        OptionType::Put => 1.0 - carry_discount * normal_cdf(-d1),
    }
}

/// Value-matching residual at a candidate boundary `s`.
///
/// Calls: `s - K - c(s) - (s/q2) * bracket(s)`; puts:
/// `K - s - p(s) + (s/q1) * bracket(s)`. The solved boundary drives this
/// to zero.
fn value_matching_residual(
    spec: &OptionContractSpec,
    params: &MarketParams,
    q: f64,
    s: f64,
) -> f64 {
    let at_s = MarketParams { spot: s, ..*params };
    let european = european_value(spec, &at_s);
    let bracket = premium_bracket(spec, params, s);
    match spec.option_type {
        OptionType::Call => s - spec.strike - european - s / q * bracket,
        OptionType::Put => spec.strike - s - european + s / q * bracket,
    }
}

/// Analytic derivative of the value-matching residual with respect to the
/// candidate boundary.
fn residual_derivative(
    spec: &OptionContractSpec,
    params: &MarketParams,
    q: f64,
    s: f64,
) -> f64 {
    let at_s = MarketParams { spot: s, ..*params };
    let (d1, _) = bs_d_values(spec, &at_s).expect("d-values at solver iterate");
    let t = spec.time_to_expiry;
    let carry_discount = ((params.cost_of_carry() - params.rate) * t).exp();
    let sigma_sqrt_t = params.volatility * t.sqrt();
    let pdf_term = carry_discount * std_normal_pdf(d1) / sigma_sqrt_t;
    match spec.option_type {
        OptionType::Call => {
            let bracket = 1.0 - carry_discount * normal_cdf(d1);
            // d/ds [s - K - c(s) - (s/q) bracket(s)]
            bracket - bracket / q + pdf_term / q
        }
        OptionType::Put => {
            let bracket = 1.0 - carry_discount * normal_cdf(-d1);
            // d/ds [K - s - p(s) + (s/q) bracket(s)]
            -bracket + bracket / q + pdf_term / q
        }
    }
}

/// Solve the early-exercise boundary for an American option.
///
/// Newton-Raphson on the value-matching residual, seeded at the strike; if
/// an iterate leaves the positive domain the solver falls back to
/// bisection. Calls with `b >= r` have no finite boundary and return
/// `(inf, 0)`. Degenerate rates propagate [`PricingError::DegenerateRate`].
pub fn baw_critical_price(
    spec: &OptionContractSpec,
    params: &MarketParams,
) -> Result<(f64, usize), PricingError> {
    spec.validate()?;
    params.validate()?;
    if spec.exercise_style != ExerciseStyle::American {
        return Err(PricingError::StyleMismatch {
            expected: ExerciseStyle::American,
        });
    }
    if spec.option_type == OptionType::Call && params.cost_of_carry() >= params.rate {
        return Ok((f64::INFINITY, 0));
    }
    let (q1, q2, _) = baw_q_values(params, spec)?;
    let q = match spec.option_type {
        OptionType::Call => q2,
        OptionType::Put => q1,
    };
    solve_boundary(spec, params, q)
}

fn solve_boundary(
    spec: &OptionContractSpec,
    params: &MarketParams,
    q: f64,
) -> Result<(f64, usize), PricingError> {
    let k = spec.strike;
    let tol = NEWTON_TOL * k;
    let mut s = k;
    let mut iterations = 0usize;
    let mut residual = value_matching_residual(spec, params, q, s);

    while iterations < MAX_NEWTON_ITERS {
        if residual.abs() <= tol {
            return Ok((s, iterations));
        }
        let slope = residual_derivative(spec, params, q, s);
        let next = s - residual / slope;
        if !next.is_finite() || next <= 0.0 {
            return bisect_boundary(spec, params, q, iterations);
        }
        s = next;
        residual = value_matching_residual(spec, params, q, s);
        iterations += 1;
    }
    if residual.abs() <= CONTRACT_TOL * k {
        return Ok((s, iterations));
    }
    // Newton stalled without leaving the domain; try the bracketing route
    // before giving up.
    bisect_boundary(spec, params, q, iterations)
}

fn bisect_boundary(
    spec: &OptionContractSpec,
    params: &MarketParams,
    q: f64,
    iterations_so_far: usize,
) -> Result<(f64, usize), PricingError> {
    let k = spec.strike;
    let mut lo = 1e-10 * k;
    let mut hi = 10.0 * k;
    let mut f_lo = value_matching_residual(spec, params, q, lo);
    let mut f_hi = value_matching_residual(spec, params, q, hi);
    let mut iterations = iterations_so_far;

    // Call boundaries blow up as the carry approaches the rate; widen the
    // bracket geometrically when 10 K is not enough.
    while f_lo.signum() == f_hi.signum() && hi < 1e10 * k {
        hi *= 10.0;
        f_hi = value_matching_residual(spec, params, q, hi);
        iterations += 1;
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(PricingError::SolverDiverged {
            last_iterate: hi,
            residual: f_hi,
        });
    }

    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECT_ITERS {
        mid = 0.5 * (lo + hi);
        let f_mid = value_matching_residual(spec, params, q, mid);
        iterations += 1;
        if f_mid.abs() <= NEWTON_TOL * k || (hi - lo) < 1e-12 * k {
            return Ok((mid, iterations));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let residual = value_matching_residual(spec, params, q, mid);
    if residual.abs() <= CONTRACT_TOL * k {
        Ok((mid, iterations))
    } else {
        Err(PricingError::SolverDiverged {
            last_iterate: mid,
            residual,
        })
    }
}

/// Full set of intermediates for an American contract: exponent roots,
/// scaling factor, premium coefficients, and the solved boundary.
pub fn baw_intermediates(
    spec: &OptionContractSpec,
    params: &MarketParams,
) -> Result<BawIntermediates, PricingError> {
    let (critical_price, iterations_used) = baw_critical_price(spec, params)?;
    let (q1, q2, big_x) = if critical_price.is_infinite() {
        // b == r calls: the premium term is never used, but the exponent
        // roots are still well-defined and reported when computable.
        baw_q_values(params, spec).unwrap_or((f64::NEG_INFINITY, f64::INFINITY, 0.0))
    } else {
        baw_q_values(params, spec)?
    };
    let (a1, a2) = match spec.option_type {
        OptionType::Call => {
            let a2 = if critical_price.is_finite() {
                critical_price / q2 * premium_bracket(spec, params, critical_price)
            } else {
                0.0
            };
            (0.0, a2)
        }
        OptionType::Put => {
            let a1 = -critical_price / q1 * premium_bracket(spec, params, critical_price);
            (a1, 0.0)
        }
    };
    Ok(BawIntermediates {
        q1,
        q2,
        big_x,
        a1,
        a2,
        critical_price,
        iterations_used,
    })
}

/// American option price under the approximation.
///
/// Calls return `c + A2 (S/S*)^{q2}` below the boundary and `S - K` at or
/// above it; puts mirror with `q1`, `A1`, and `K - S` at or below `S**`.
/// Zero time to expiry prices at intrinsic value; degenerate rates and
/// `b >= r` calls price at the European value.
pub fn baw_price(spec: &OptionContractSpec, params: &MarketParams) -> Result<f64, PricingError> {
    spec.validate()?;
    params.validate()?;
    if spec.exercise_style != ExerciseStyle::American {
        return Err(PricingError::StyleMismatch {
            expected: ExerciseStyle::American,
        });
    }
    if spec.time_to_expiry == 0.0 {
        return Ok(spec.intrinsic_value(params.spot));
    }
    if params.rate < RATE_EPS {
        return Ok(european_value(spec, params));
    }
    if spec.option_type == OptionType::Call && params.cost_of_carry() >= params.rate {
        return Ok(european_value(spec, params));
    }

    let inter = baw_intermediates(spec, params)?;
    let s = params.spot;
    let price = match spec.option_type {
        OptionType::Call => {
            if s >= inter.critical_price {
                s - spec.strike
            } else {
                european_value(spec, params)
                    + inter.a2 * (s / inter.critical_price).powf(inter.q2)
            }
        }
        OptionType::Put => {
            if s <= inter.critical_price {
                spec.strike - s
            } else {
                european_value(spec, params)
                    + inter.a1 * (s / inter.critical_price).powf(inter.q1)
            }
        }
    };
    Ok(price)
}
