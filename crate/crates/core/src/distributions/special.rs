//! Special functions: the standard normal distribution in linear and log space,
//! and the Hurwitz zeta function.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Above this z the upper tail is taken from its asymptotic series instead of erfc.
const SF_ASYMPTOTIC_Z: f64 = 35.0;

/// Standard normal CDF Φ(z).
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal survival function 1 - Φ(z), accurate in the upper tail.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// ln(1 - Φ(z)) without underflow for large positive z.
pub fn ln_normal_sf(z: f64) -> f64 {
    if z == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    if z < 0.0 {
        return (-normal_sf(-z)).ln_1p();
    }
    if z < SF_ASYMPTOTIC_Z {
        return normal_sf(z).ln();
    }
    // Mills ratio series: Φc(z) = φ(z)/z · (1 - 1/z² + 3/z⁴ - 15/z⁶ + ...).
    let w = 1.0 / (z * z);
    let mut term = 1.0;
    let mut series = 1.0;
    for k in 1..8 {
        term *= -((2 * k - 1) as f64) * w;
        series += term;
    }
    -0.5 * z * z - z.ln() - 0.5 * (2.0 * PI).ln() + series.ln()
}

/// ln(Φ(hi) - Φ(lo)) for lo < hi, evaluated on whichever tail keeps precision.
pub fn ln_normal_interval(lo: f64, hi: f64) -> f64 {
    debug_assert!(lo <= hi);
    if lo >= hi {
        return f64::NEG_INFINITY;
    }
    ln_normal_band(lo, hi - lo)
}

/// ln(Φ(lo + width) - Φ(lo)). Taking the width separately lets callers that
/// know it exactly avoid the cancellation in (lo + width) - lo.
pub fn ln_normal_band(lo: f64, width: f64) -> f64 {
    if width <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let hi = lo + width;
    if lo + hi < 0.0 {
        // Mirror into the upper tail: Φ(hi) - Φ(lo) = Φc(-hi) - Φc(-lo).
        return ln_normal_band(-hi, width);
    }
    if width <= 1.0 && width * hi <= 1.0 {
        // Narrow band: φ(lo)·w·∫₀¹ exp(-lo·w·u - w²u²/2) du, the integrand
        // being smooth enough for 8-point Gauss-Legendre to full precision.
        let (a, b) = (lo * width, 0.5 * width * width);
        let g: f64 = GAUSS_LEGENDRE_8
            .iter()
            .map(|&(x, wt)| {
                let u = 0.5 * (x + 1.0);
                0.5 * wt * (-a * u - b * u * u).exp()
            })
            .sum();
        return -0.5 * lo * lo - 0.5 * (2.0 * PI).ln() + width.ln() + g.ln();
    }
    let a = ln_normal_sf(lo);
    let b = ln_normal_sf(hi);
    a + ln_one_minus_exp(b - a)
}

/// Nodes and weights on [-1, 1].
const GAUSS_LEGENDRE_8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_48),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_48),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

/// ln(1 - e^x) for x <= 0.
pub(crate) fn ln_one_minus_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// Bernoulli numbers B_2, B_4, ..., B_24.
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Natural log of the Hurwitz zeta function ζ(s, q) = Σ_{j≥0} (q + j)^(-s),
/// for s > 1 and q > 0.
///
/// Euler-Maclaurin: the first M terms are summed directly, then the tail from
/// q + M is replaced by its integral, the half-term and twelve Bernoulli
/// corrections. M is chosen so that q + M >= s + 24, which bounds the
/// truncation error of the correction series below 1e-18 relative. Everything
/// is scaled by q^s so neither large q nor large s underflows.
pub fn ln_hurwitz_zeta(s: f64, q: f64) -> f64 {
    debug_assert!(s > 1.0 && q > 0.0);
    let k_terms = BERNOULLI_EVEN.len();
    let reach = s + 2.0 * k_terms as f64;
    let m = if q >= reach { 0 } else { (reach - q).ceil() as usize };

    let ln_q = q.ln();
    // Scaled direct terms: ((q + j) / q)^(-s).
    let mut sum = 0.0;
    for j in 0..m {
        sum += (-s * (j as f64 / q).ln_1p()).exp();
    }

    let x = q + m as f64;
    let ln_ratio = (m as f64 / q).ln_1p(); // ln(x / q)
    let x_pow_neg_s = (-s * ln_ratio).exp(); // (x / q)^(-s)
    let mut tail = x * x_pow_neg_s / (s - 1.0) + 0.5 * x_pow_neg_s;

    // Bernoulli corrections B_2k/(2k)! · s(s+1)...(s+2k-2) · x^(-s-2k+1), scaled.
    let inv_x2 = 1.0 / (x * x);
    let mut rising = s;
    let mut x_pow = x_pow_neg_s / x;
    let mut factorial = 2.0;
    for (k, b2k) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b2k / factorial * rising * x_pow;
        tail += term;
        let kk = (k + 1) as f64;
        rising *= (s + 2.0 * kk - 1.0) * (s + 2.0 * kk);
        x_pow *= inv_x2;
        factorial *= (2.0 * kk + 1.0) * (2.0 * kk + 2.0);
    }

    -s * ln_q + (sum + tail).ln()
}

/// Hurwitz zeta ζ(s, q) for s > 1, q > 0.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    ln_hurwitz_zeta(s, q).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_symmetry_and_centre() {
        assert_eq!(normal_cdf(0.0), 0.5);
        for z in [0.1, 0.7, 1.3, 2.9, 5.5, 8.0] {
            assert!((normal_cdf(z) + normal_cdf(-z) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ln_sf_matches_direct_below_switchover() {
        for z in [-3.0, -0.5, 0.0, 1.0, 10.0, 30.0, 34.9] {
            let direct = normal_sf(z).ln();
            assert!((ln_normal_sf(z) - direct).abs() < 1e-12 * direct.abs().max(1.0), "z={z}");
        }
    }

    #[test]
    fn ln_sf_continuous_at_asymptotic_switch() {
        let below = normal_sf(34.999_999).ln();
        let above = ln_normal_sf(35.000_001);
        assert!((below - above).abs() < 1e-4);
        assert!(ln_normal_sf(60.0).is_finite());
    }

    #[test]
    fn interval_uses_stable_tail() {
        // Far in the upper tail the naive difference of CDFs is exactly zero.
        let v = ln_normal_interval(12.0, 12.5);
        let expected = (normal_sf(12.0) - normal_sf(12.5)).ln();
        assert!((v - expected).abs() < 1e-10);
        let w = ln_normal_interval(-12.5, -12.0);
        assert!((v - w).abs() < 1e-12);
    }

    #[test]
    fn riemann_zeta_special_values() {
        let zeta2 = PI * PI / 6.0;
        assert!((hurwitz_zeta(2.0, 1.0) - zeta2).abs() < 1e-14);
        let zeta4 = PI.powi(4) / 90.0;
        assert!((hurwitz_zeta(4.0, 1.0) - zeta4).abs() < 1e-14);
        // ζ(s, 2) = ζ(s) - 1
        assert!((hurwitz_zeta(2.0, 2.0) - (zeta2 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn zeta_shift_recurrence() {
        // ζ(s, q) = q^(-s) + ζ(s, q + 1)
        for &(s, q) in &[(1.0001, 0.3), (1.7, 2.5), (12.0, 0.9), (49.0, 1.0), (3.0, 1e5)] {
            let lhs = hurwitz_zeta(s, q);
            let rhs = q.powf(-s) + hurwitz_zeta(s, q + 1.0);
            assert!(((lhs - rhs) / lhs).abs() < 1e-13, "s={s} q={q}");
        }
    }

    #[test]
    fn ln_zeta_does_not_underflow_for_large_q() {
        let v = ln_hurwitz_zeta(50.0, 1e6);
        // Leading behaviour q^(1-s)/(s-1).
        let lead = -49.0 * 1e6f64.ln() - 49f64.ln();
        assert!((v - lead).abs() < 1e-4);
    }
}
