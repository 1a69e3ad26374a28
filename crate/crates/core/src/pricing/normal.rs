//! Standard normal density and distribution functions.
//!
//! The CDF is evaluated through a rational-Chebyshev expansion of erf/erfc
//! (Cody's coefficients, the same ones used by SPECFUN and most libm
//! ports). Absolute error is below 1e-15 everywhere, which keeps the CDF
//! out of the error budget when prices are checked against quadrature and
//! lattice oracles.

// The published rational coefficients carry more digits than f64 holds;
// keep them verbatim so they can be checked against the source tables.
#![allow(clippy::excessive_precision)]

use super::PricingError;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_95;

// Rational coefficients for erf(x), |x| <= 0.46875.
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];

// Rational coefficients for erfc(x), 0.46875 <= x <= 4.
const ERFC_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const ERFC_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];

// Rational coefficients for erfc(x), x > 4.
const ERFC_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERFC_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];

const ERF_THRESHOLD: f64 = 0.46875;
// erfc underflows past this point.
const ERFC_XBIG: f64 = 26.543;

/// erf(x) on the central interval |x| <= 0.46875.
fn erf_central(x: f64) -> f64 {
    let z = x * x;
    let mut num = ERF_A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + ERF_A[i]) * z;
        den = (den + ERF_B[i]) * z;
    }
    x * (num + ERF_A[3]) / (den + ERF_B[3])
}

/// exp(-y^2) * r evaluated with the split-argument trick so the product
/// keeps full relative accuracy for large y.
fn exp_neg_sq_scaled(y: f64, r: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * r
}

/// erfc(y) for y >= 0.46875.
fn erfc_tail(y: f64) -> f64 {
    if y > ERFC_XBIG {
        return 0.0;
    }
    if y <= 4.0 {
        let mut num = ERFC_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERFC_C[i]) * y;
            den = (den + ERFC_D[i]) * y;
        }
        exp_neg_sq_scaled(y, (num + ERFC_C[7]) / (den + ERFC_D[7]))
    } else {
        let z = 1.0 / (y * y);
        let mut num = ERFC_P[5] * z;
        let mut den = z;
        for i in 0..3 {
            num = (num + ERFC_P[i]) * z;
            den = (den + ERFC_Q[i]) * z;
        }
        let r = z * (num + ERFC_P[4]) / (den + ERFC_Q[4]);
        exp_neg_sq_scaled(y, (FRAC_1_SQRT_PI - r) / y)
    }
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF for a finite argument. Internal entry point used by
/// the pricers once inputs have been validated.
pub(crate) fn normal_cdf(x: f64) -> f64 {
    let u = x * FRAC_1_SQRT_2;
    if u.abs() <= ERF_THRESHOLD {
        // Branches are arranged so that cdf(x) + cdf(-x) == 1 to within
        // one rounding of the final addition.
        0.5 + 0.5 * erf_central(u)
    } else if x > 0.0 {
        1.0 - 0.5 * erfc_tail(u)
    } else {
        0.5 * erfc_tail(-u)
    }
}

/// Standard normal CDF.
///
/// Returns a domain error for non-finite input; otherwise the result lies
/// in [0, 1] and satisfies `cdf(x) + cdf(-x) = 1` to within 1e-15.
pub fn std_normal_cdf(x: f64) -> Result<f64, PricingError> {
    if !x.is_finite() {
        return Err(PricingError::NonFinite("std_normal_cdf argument"));
    }
    Ok(normal_cdf(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_maps_to_half() {
        assert_eq!(std_normal_cdf(0.0).unwrap(), 0.5);
    }

    #[test]
    fn tail_saturates() {
        assert!((std_normal_cdf(8.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(std_normal_cdf(-8.0).unwrap() < 1e-15);
    }

    #[test]
    fn known_value_at_one() {
        // Frozen from the adaptive-quadrature oracle in the integration
        // suite (tests/acceptance.rs checks the oracle agreement itself).
        assert!((std_normal_cdf(1.0).unwrap() - 0.841344746068543).abs() < 1e-12);
    }

    #[test]
    fn symmetry_over_grid() {
        let mut x = -10.0;
        while x <= 10.0 {
            let hi = std_normal_cdf(x).unwrap();
            let lo = std_normal_cdf(-x).unwrap();
            assert!((hi + lo - 1.0).abs() < 1e-15, "symmetry broke at x={x}");
            x += 0.0625;
        }
    }

    #[test]
    fn monotone_nondecreasing() {
        let mut prev = 0.0;
        let mut x = -12.0;
        while x <= 12.0 {
            let v = std_normal_cdf(x).unwrap();
            assert!(v >= prev, "cdf decreased at x={x}");
            assert!((0.0..=1.0).contains(&v));
            prev = v;
            x += 0.03125;
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(std_normal_cdf(f64::NAN).is_err());
        assert!(std_normal_cdf(f64::INFINITY).is_err());
    }
}
