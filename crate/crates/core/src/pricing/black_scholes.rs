//! Closed-form European pricing under Black-Scholes with cost of carry.

use super::normal::normal_cdf;
use super::{ExerciseStyle, MarketParams, OptionContractSpec, OptionType, PricingError};

/// The `d1`/`d2` arguments of the pricing formula:
///
/// `d1 = [ln(S/K) + (b + sigma^2/2) T] / (sigma sqrt(T))`, `d2 = d1 - sigma sqrt(T)`,
///
/// with `b` the cost of carry (`b = r` for a non-dividend underlying).
///
/// Errors with [`PricingError::Degenerate`] when `T == 0` or `sigma == 0`;
/// callers should price those cases at intrinsic value.
pub fn bs_d_values(
    spec: &OptionContractSpec,
    params: &MarketParams,
) -> Result<(f64, f64), PricingError> {
    spec.validate()?;
    params.validate()?;
    if spec.time_to_expiry == 0.0 {
        return Err(PricingError::Degenerate("time_to_expiry is zero"));
    }
    let sigma_sqrt_t = params.volatility * spec.time_to_expiry.sqrt();
    if sigma_sqrt_t == 0.0 {
        return Err(PricingError::Degenerate("volatility is zero"));
    }
    let b = params.cost_of_carry();
    let d1 = ((params.spot / spec.strike).ln()
        + (b + 0.5 * params.volatility * params.volatility) * spec.time_to_expiry)
        / sigma_sqrt_t;
    let d2 = d1 - sigma_sqrt_t;
    Ok((d1, d2))
}

/// European option price.
///
/// `c = S e^{(b-r)T} N(d1) - K e^{-rT} N(d2)` and the mirrored put formula.
/// At `T == 0` the boundary condition applies and the intrinsic value is
/// returned directly.
pub fn bs_price(spec: &OptionContractSpec, params: &MarketParams) -> Result<f64, PricingError> {
    spec.validate()?;
    params.validate()?;
    if spec.exercise_style != ExerciseStyle::European {
        return Err(PricingError::StyleMismatch {
            expected: ExerciseStyle::European,
        });
    }
    Ok(european_value(spec, params))
}

/// Shared European-value kernel; also used for the European leg of the
/// American approximation, where the style check does not apply.
pub(crate) fn european_value(spec: &OptionContractSpec, params: &MarketParams) -> f64 {
    let t = spec.time_to_expiry;
    if t == 0.0 {
        return spec.intrinsic_value(params.spot);
    }
    let (d1, d2) = match bs_d_values(spec, params) {
        Ok(d) => d,
        // validate() passed, so the only degenerate case left is sigma == 0,
        // which MarketParams::validate rejects; unreachable in practice.
        Err(_) => return spec.intrinsic_value(params.spot),
    };
    let b = params.cost_of_carry();
    let carry_discount = ((b - params.rate) * t).exp();
    let rate_discount = (-params.rate * t).exp();
    let price = match spec.option_type {
        OptionType::Call => {
            params.spot * carry_discount * normal_cdf(d1)
                - spec.strike * rate_discount * normal_cdf(d2)
        }
        OptionType::Put => {
            spec.strike * rate_discount * normal_cdf(-d2)
                - params.spot * carry_discount * normal_cdf(-d1)
        }
    };
    price.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(strike: f64, t: f64) -> OptionContractSpec {
        OptionContractSpec::new(OptionType::Call, ExerciseStyle::European, strike, t).unwrap()
    }

    fn put(strike: f64, t: f64) -> OptionContractSpec {
        OptionContractSpec::new(OptionType::Put, ExerciseStyle::European, strike, t).unwrap()
    }

    #[test]
    fn d_values_at_the_money_zero_rate() {
        let params = MarketParams::new(100.0, 0.0, 0.0, 0.2).unwrap();
        let (d1, d2) = bs_d_values(&call(100.0, 1.0), &params).unwrap();
        // log(S/K) = 0 so d1 = sigma sqrt(T) / 2.
        assert!((d1 - 0.1).abs() < 1e-15);
        assert!((d2 + 0.1).abs() < 1e-15);
    }

    #[test]
    fn d_values_standard_case() {
        let params = MarketParams::new(100.0, 0.05, 0.0, 0.2).unwrap();
        let (d1, d2) = bs_d_values(&call(100.0, 1.0), &params).unwrap();
        assert!((d1 - 0.35).abs() < 1e-15);
        assert!((d2 - 0.15).abs() < 1e-15);
    }

    #[test]
    fn d2_identity() {
        for (rate, sigma, t) in [(0.0, 0.2, 1.0), (0.05, 0.2, 1.0), (0.03, 0.4, 0.25)] {
            let params = MarketParams::new(100.0, rate, 0.0, sigma).unwrap();
            let (d1, d2) = bs_d_values(&call(100.0, t), &params).unwrap();
            assert!((d2 - (d1 - sigma * t.sqrt())).abs() < 1e-15);
        }
    }

    #[test]
    fn d_values_degenerate_inputs() {
        let params = MarketParams::new(100.0, 0.05, 0.0, 0.2).unwrap();
        assert!(matches!(
            bs_d_values(&call(100.0, 0.0), &params),
            Err(PricingError::Degenerate(_))
        ));
    }

    #[test]
    fn atm_call_value() {
        // 10.4506 is pinned against two independent oracles in the
        // integration suite (CRR lattice and lognormal quadrature).
        let params = MarketParams::new(100.0, 0.05, 0.0, 0.2).unwrap();
        let price = bs_price(&call(100.0, 1.0), &params).unwrap();
        assert!((price - 10.4506).abs() < 1e-4);
    }

    #[test]
    fn expiry_boundary_is_intrinsic() {
        let params = MarketParams::new(120.0, 0.05, 0.0, 0.2).unwrap();
        assert_eq!(bs_price(&call(100.0, 0.0), &params).unwrap(), 20.0);
        assert_eq!(bs_price(&put(100.0, 0.0), &params).unwrap(), 0.0);
    }

    #[test]
    fn vanishing_volatility_atm_put() {
        let params = MarketParams::new(100.0, 0.0, 0.0, 1e-9).unwrap();
        let price = bs_price(&put(100.0, 1.0), &params).unwrap();
        assert!(price.abs() < 1e-6);
    }

    #[test]
    fn put_call_parity_spot_check() {
        let params = MarketParams::new(105.0, 0.04, 0.01, 0.3).unwrap();
        let t = 0.75;
        let c = bs_price(&call(100.0, t), &params).unwrap();
        let p = bs_price(&put(100.0, t), &params).unwrap();
        let forward = params.spot * (-params.dividend_yield * t).exp()
            - 100.0 * (-params.rate * t).exp();
        assert!((c - p - forward).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(MarketParams::new(-1.0, 0.05, 0.0, 0.2).is_err());
        assert!(MarketParams::new(100.0, 0.05, 0.0, 0.0).is_err());
        assert!(MarketParams::new(100.0, 0.05, -0.01, 0.2).is_err());
        assert!(OptionContractSpec::new(OptionType::Call, ExerciseStyle::European, 0.0, 1.0)
            .is_err());
        assert!(
            OptionContractSpec::new(OptionType::Call, ExerciseStyle::European, 100.0, -0.5)
                .is_err()
        );
        let params = MarketParams::new(100.0, 0.05, 0.0, 0.2).unwrap();
        let american =
            OptionContractSpec::new(OptionType::Call, ExerciseStyle::American, 100.0, 1.0)
                .unwrap();
        assert!(matches!(
            bs_price(&american, &params),
            Err(PricingError::StyleMismatch { .. })
        ));
    }
}
