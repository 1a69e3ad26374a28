//! Shared oracles for the integration suites.
//!
//! Everything here is deliberately independent of the library's main code
//! paths: quadrature instead of closed forms, normal equations instead of
//! QR, bisection instead of Newton. The tests compare the two routes.

#![allow(dead_code)]

use optnoise_core::pricing::{
    baw_q_values, bs_d_values, bs_price, std_normal_cdf, ExerciseStyle, MarketParams,
    OptionContractSpec, OptionType,
};

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, right, 0.5 * tol, depth - 1)
        }
    }
    recurse(f, a, b, simpson(f, a, b), tol, 40)
}

fn gauss_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF by quadrature of the density from 0 to |x|.
pub fn normal_cdf_by_quadrature(x: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    let tail = adaptive_simpson(&gauss_density, 0.0, x.abs(), 1e-14);
    if x > 0.0 {
        0.5 + tail
    } else {
        0.5 - tail
    }
}

/// European price as the discounted risk-neutral lognormal expectation,
/// integrated over the standard normal shock.
pub fn european_price_by_quadrature(spec: &OptionContractSpec, params: &MarketParams) -> f64 {
    let t = spec.time_to_expiry;
    if t == 0.0 {
        return spec.intrinsic_value(params.spot);
    }
    let b = params.rate - params.dividend_yield;
    let sigma = params.volatility;
    let drift = (b - 0.5 * sigma * sigma) * t;
    let diffusion = sigma * t.sqrt();
    let terminal_spot = |z: f64| params.spot * (drift + diffusion * z).exp();
    let payoff = |z: f64| spec.intrinsic_value(terminal_spot(z)) * gauss_density(z);
    // The payoff kink sits at z*; integrate each smooth side separately.
    let z_star = ((spec.strike / params.spot).ln() - drift) / diffusion;
    let discount = (-params.rate * t).exp();
    let (lo, hi) = match spec.option_type {
        OptionType::Call => (z_star, z_star.max(0.0) + 14.0),
        OptionType::Put => (z_star.min(0.0) - 14.0, z_star),
    };
    discount * adaptive_simpson(&payoff, lo, hi, 1e-12)
}

/// Value-matching residual for the American early-exercise boundary,
/// assembled from public primitives only (no solver code shared).
pub fn boundary_residual(spec: &OptionContractSpec, params: &MarketParams, s: f64) -> f64 {
    let at_s = MarketParams { spot: s, ..*params };
    let twin = OptionContractSpec {
        exercise_style: ExerciseStyle::European,
        ..*spec
    };
    let european = bs_price(&twin, &at_s).unwrap();
    let (q1, q2, _) = baw_q_values(params, spec).unwrap();
    let (d1, _) = bs_d_values(spec, &at_s).unwrap();
    let carry_discount =
        ((params.rate - params.dividend_yield - params.rate) * spec.time_to_expiry).exp();
    match spec.option_type {
        OptionType::Call => {
            let bracket = 1.0 - carry_discount * std_normal_cdf(d1).unwrap();
            s - spec.strike - european - s / q2 * bracket
        }
        OptionType::Put => {
            let bracket = 1.0 - carry_discount * std_normal_cdf(-d1).unwrap();
            spec.strike - s - european + s / q1 * bracket
        }
    }
}

/// Bisection for the put boundary over (0, K) down to a 1e-10 bracket.
pub fn put_boundary_by_bisection(spec: &OptionContractSpec, params: &MarketParams) -> f64 {
    assert_eq!(spec.option_type, OptionType::Put);
    let mut lo = 1e-8 * spec.strike;
    let mut hi = spec.strike;
    let f_lo = boundary_residual(spec, params, lo);
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-10 {
            return mid;
        }
        let f_mid = boundary_residual(spec, params, mid);
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// OLS by explicit normal equations (X'X) beta = X'y, solved with
/// Gaussian elimination and partial pivoting. Takes the design as columns
/// (like `ols_fit`) and returns the coefficients.
pub fn ols_by_normal_equations(columns: &[Vec<f64>], response: &[f64]) -> Vec<f64> {
    let k = columns.len();
    let n = columns[0].len();
    assert_eq!(n, response.len());
    let mut xtx = vec![vec![0.0f64; k]; k];
    let mut xty = vec![0.0f64; k];
    for i in 0..k {
        xty[i] = columns[i].iter().zip(response).map(|(x, y)| x * y).sum();
        for j in 0..k {
            xtx[i][j] = columns[i].iter().zip(&columns[j]).map(|(a, b)| a * b).sum();
        }
    }
    solve_linear(&mut xtx, &mut xty);
    xty
}

/// In-place Gaussian elimination with partial pivoting; solution lands in `rhs`.
pub fn solve_linear(matrix: &mut [Vec<f64>], rhs: &mut [f64]) {
    let k = rhs.len();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| matrix[a][col].abs().total_cmp(&matrix[b][col].abs()))
            .unwrap();
        matrix.swap(col, pivot);
        rhs.swap(col, pivot);
        let diag = matrix[col][col];
        assert!(diag.abs() > 1e-300, "singular system in test oracle");
        let pivot_row = matrix[col].clone();
        for row in 0..k {
            if row == col {
                continue;
            }
            let factor = matrix[row][col] / diag;
            for (j, pivot_value) in pivot_row.iter().enumerate().skip(col) {
                matrix[row][j] -= factor * pivot_value;
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    for col in 0..k {
        rhs[col] /= matrix[col][col];
    }
}

/// The verification grid used across the pricing criteria: moneyness x
/// volatility x maturity, strike fixed at 100.
pub fn pricing_grid() -> Vec<(f64, f64, f64)> {
    let mut grid = Vec::new();
    for moneyness in [0.8, 0.9, 1.0, 1.1, 1.2] {
        for sigma in [0.1, 0.2, 0.3, 0.4, 0.5] {
            for t in [0.1, 0.5, 1.0] {
                grid.push((moneyness, sigma, t));
            }
        }
    }
    grid
}
