//! Cox-Ross-Rubinstein binomial lattice.
//!
//! Kept deliberately plain: this is the verification oracle the analytic
//! pricers are checked against, so it must stay independent of them.

use super::{ExerciseStyle, MarketParams, OptionContractSpec, PricingError};

/// Price an option on a recombining CRR lattice with `steps` time steps.
///
/// Up factor `u = e^{sigma sqrt(dt)}`, `d = 1/u`, risk-neutral up
/// probability `p = (e^{b dt} - d) / (u - d)` with `b` the cost of carry,
/// discounting at the risk-free rate. American exercise takes the max of
/// continuation and intrinsic value at every node.
pub fn crr_binomial_price(
    spec: &OptionContractSpec,
    params: &MarketParams,
    steps: usize,
) -> Result<f64, PricingError> {
    spec.validate()?;
    params.validate()?;
    if steps == 0 {
        return Err(PricingError::ZeroSteps);
    }
    if spec.time_to_expiry == 0.0 {
        return Ok(spec.intrinsic_value(params.spot));
    }

    let dt = spec.time_to_expiry / steps as f64;
    let up = (params.volatility * dt.sqrt()).exp();
    let down = 1.0 / up;
    let growth = (params.cost_of_carry() * dt).exp();
    let p_up = (growth - down) / (up - down);
    if !p_up.is_finite() || !(0.0..=1.0).contains(&p_up) {
        return Err(PricingError::BadLattice { p: p_up });
    }
    let discount = (-params.rate * dt).exp();
    // Fold the discount into the branch weights: one fused update per node.
    let disc_up = discount * p_up;
    let disc_down = discount * (1.0 - p_up);

    // Terminal payoffs, indexed by the number of up moves.
    let mut values: Vec<f64> = (0..=steps)
        .map(|ups| {
            let spot = params.spot * up.powi(ups as i32) * down.powi((steps - ups) as i32);
            spec.intrinsic_value(spot)
        })
        .collect();

    match spec.exercise_style {
        ExerciseStyle::European => {
            for step in (0..steps).rev() {
                for ups in 0..=step {
                    values[ups] = disc_up * values[ups + 1] + disc_down * values[ups];
                }
            }
        }
        ExerciseStyle::American => {
            // Node spots advance by u^2 along a layer; one powi per layer
            // instead of two per node.
            let up_sq = up * up;
            let strike = spec.strike;
            let is_call = spec.option_type == super::OptionType::Call;
            for step in (0..steps).rev() {
                let mut spot = params.spot * down.powi(step as i32);
                for ups in 0..=step {
                    let continuation = disc_up * values[ups + 1] + disc_down * values[ups];
                    let exercise = if is_call { spot - strike } else { strike - spot };
                    values[ups] = continuation.max(exercise);
                    spot *= up_sq;
                }
            }
        }
    }
    Ok(values[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::OptionType;

    fn spec(
        option_type: OptionType,
        style: ExerciseStyle,
        strike: f64,
        t: f64,
    ) -> OptionContractSpec {
        OptionContractSpec::new(option_type, style, strike, t).unwrap()
    }

    #[test]
    fn single_period_hand_value() {
        // u = 1.1 so sigma = ln(1.1); with r = 0 the up probability is
        // (1 - 1/1.1) / (1.1 - 1/1.1) = 10/21 and the call pays 10 up,
        // 0 down: value = 100/21.
        let sigma = 1.1f64.ln();
        let params = MarketParams::new(100.0, 0.0, 0.0, sigma).unwrap();
        let call = spec(OptionType::Call, ExerciseStyle::European, 100.0, 1.0);
        let price = crr_binomial_price(&call, &params, 1).unwrap();
        assert!((price - 100.0 / 21.0).abs() < 1e-12);
    }

    #[test]
    fn zero_steps_is_an_error() {
        let params = MarketParams::new(100.0, 0.05, 0.0, 0.2).unwrap();
        let call = spec(OptionType::Call, ExerciseStyle::European, 100.0, 1.0);
        assert!(matches!(
            crr_binomial_price(&call, &params, 0),
            Err(PricingError::ZeroSteps)
        ));
    }

    #[test]
    fn american_dominates_european_across_step_counts() {
        let params = MarketParams::new(100.0, 0.08, 0.0, 0.2).unwrap();
        for steps in [1, 2, 5, 10, 50, 200] {
            let euro = spec(OptionType::Put, ExerciseStyle::European, 100.0, 0.25);
            let amer = spec(OptionType::Put, ExerciseStyle::American, 100.0, 0.25);
            let pe = crr_binomial_price(&euro, &params, steps).unwrap();
            let pa = crr_binomial_price(&amer, &params, steps).unwrap();
            assert!(pa >= pe - 1e-12, "steps = {steps}: {pa} < {pe}");
        }
    }

    #[test]
    fn expiry_boundary() {
        let params = MarketParams::new(90.0, 0.05, 0.0, 0.2).unwrap();
        let put = spec(OptionType::Put, ExerciseStyle::American, 100.0, 0.0);
        assert_eq!(crr_binomial_price(&put, &params, 100).unwrap(), 10.0);
    }
}
