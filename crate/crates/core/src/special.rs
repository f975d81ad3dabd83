//! Scalar special functions used by the closed-form normalizers.
//!
//! Everything is evaluated in log space where the callers need it: the
//! Wishart, von Mises–Fisher and hyperboloid constants overflow `f64` long
//! before their logarithms do.

use crate::error::{Error, Result};
use std::f64::consts::PI;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

// Lanczos approximation, g = 7, nine coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Radius above which [`log_bessel_i`] switches from the power series to the
/// large-argument expansion, for orders with `nu * nu <= BESSEL_I_CROSSOVER`.
/// Chosen from an accuracy sweep against 40-digit reference values; see the
/// `crossover_sweep` test.
pub const BESSEL_I_CROSSOVER: f64 = 30.0;

/// Order of a modified Bessel function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder(pub f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if nu.is_finite() {
            Ok(BesselOrder(nu))
        } else {
            Err(Error::domain(format!("Bessel order must be finite, got {nu}")))
        }
    }
}

impl From<f64> for BesselOrder {
    fn from(nu: f64) -> Self {
        BesselOrder(nu)
    }
}

/// `log Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum in its accurate range.
        return log_gamma_unchecked(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * LN_2PI + (z + 0.5) * t.ln() - t + sum.ln()
}

/// `log Γ_n(α) = n(n-1)/4 · log π + Σ_{k=1..n} log Γ(α - (k-1)/2)`, defined for `α > (n-1)/2`.
pub fn multivariate_log_gamma(n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("multivariate_log_gamma requires n >= 1"));
    }
    let bound = (n as f64 - 1.0) / 2.0;
    if !(alpha > bound) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "multivariate_log_gamma({n}, α) requires α > {bound}, got {alpha}"
        )));
    }
    let nf = n as f64;
    let mut acc = nf * (nf - 1.0) / 4.0 * PI.ln();
    for k in 1..=n {
        acc += log_gamma_unchecked(alpha - (k as f64 - 1.0) / 2.0);
    }
    Ok(acc)
}

/// Modified Bessel function of the first kind `I_ν(r)`, `ν >= 0`, `r >= 0`.
pub fn bessel_i(nu: impl Into<BesselOrder>, r: f64) -> Result<f64> {
    log_bessel_i(nu, r).map(f64::exp)
}

/// `log I_ν(r)`. Returns `-inf` for `r = 0, ν > 0`.
pub fn log_bessel_i(nu: impl Into<BesselOrder>, r: f64) -> Result<f64> {
    let BesselOrder(nu) = nu.into();
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("bessel_i requires ν >= 0, got {nu}")));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("bessel_i requires r >= 0, got {r}")));
    }
    if r == 0.0 {
        return Ok(if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    if r > BESSEL_I_CROSSOVER.max(nu * nu) {
        if let Some(v) = log_bessel_i_asymptotic(nu, r) {
            return Ok(v);
        }
    }
    Ok(log_bessel_i_series(nu, r))
}

/// Ascending series `Σ (r/2)^{2k+ν} / (k! Γ(ν+k+1))`; every term is positive.
fn log_bessel_i_series(nu: f64, r: f64) -> f64 {
    let log_lead = nu * (0.5 * r).ln() - log_gamma_unchecked(nu + 1.0);
    let q = 0.25 * r * r;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut log_scale = 0.0_f64;
    let mut k = 1.0_f64;
    loop {
        term *= q / (k * (k + nu));
        sum += term;
        if sum > 1e250 {
            sum *= 1e-250;
            term *= 1e-250;
            log_scale += 250.0 * std::f64::consts::LN_10;
        }
        if term < sum * 1e-17 && k > q.sqrt() {
            break;
        }
        k += 1.0;
    }
    log_lead + log_scale + sum.ln()
}

/// `I_ν(r) ~ e^r / sqrt(2πr) · Σ (-1)^k a_k(ν) / r^k`. `None` if the
/// expansion stops shrinking before reaching double precision.
fn log_bessel_i_asymptotic(nu: f64, r: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= -(mu - odd * odd) / (kf * 8.0 * r);
        if term.abs() < 1e-17 * sum.abs() {
            return Some(r - 0.5 * (2.0 * PI * r).ln() + sum.ln());
        }
        if term.abs() > prev {
            return None;
        }
        prev = term.abs();
        sum += term;
    }
    None
}

/// Modified Bessel function of the second kind `K_ν(r)`, `r > 0`, any real `ν`.
pub fn bessel_k(nu: impl Into<BesselOrder>, r: f64) -> Result<f64> {
    log_bessel_k(nu, r).map(f64::exp)
}

/// `log K_ν(r)` from `K_ν(r) = ∫_0^∞ exp(-r cosh t) cosh(νt) dt`.
///
/// The integrand is even and analytic in `t` with doubly exponential decay, so
/// the trapezoid rule on `[0, T]` converges geometrically in the step size.
/// The step is halved until two successive sums agree to `1e-15`.
pub fn log_bessel_k(nu: impl Into<BesselOrder>, r: f64) -> Result<f64> {
    let BesselOrder(nu) = nu.into();
    if !nu.is_finite() {
        return Err(Error::domain(format!("bessel_k requires a finite order, got {nu}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("bessel_k requires r > 0, got {r}")));
    }
    let nu = nu.abs();
    // log of the scaled integrand e^{-r(cosh t - 1)} cosh(νt)
    let log_f = |t: f64| -> f64 {
        let c = if t < 1e-4 {
            0.5 * t * t * (1.0 + t * t / 12.0)
        } else {
            t.cosh() - 1.0
        };
        -r * c + log_cosh(nu * t)
    };
    // Peak of the log integrand, then the truncation point 40 nats below it.
    let t_peak = if nu > 0.0 { (nu / r).asinh() } else { 0.0 };
    let log_peak = log_f(t_peak);
    let mut t_max = t_peak + 1.0;
    while log_f(t_max) > log_peak - 40.0 {
        t_max *= 1.5;
    }

    let mut n = 32usize;
    let mut h = t_max / n as f64;
    let mut sum: f64 = 0.5 * (log_f(0.0) - log_peak).exp()
        + (1..n)
            .map(|i| (log_f(i as f64 * h) - log_peak).exp())
            .sum::<f64>()
        + 0.5 * (log_f(t_max) - log_peak).exp();
    let mut estimate = sum * h;
    loop {
        // Add the midpoints of the current grid.
        let mids: f64 = (0..n)
            .map(|i| (log_f((i as f64 + 0.5) * h) - log_peak).exp())
            .sum();
        sum += mids;
        n *= 2;
        h *= 0.5;
        let next = sum * h;
        let converged = (next - estimate).abs() <= 1e-15 * next.abs();
        estimate = next;
        if converged || n >= 1 << 20 {
            break;
        }
    }
    Ok(-r + log_peak + estimate.ln())
}

fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `log` of the surface area of the unit sphere `S^{n-1} ⊂ ℝ^n`: `log(2 π^{n/2} / Γ(n/2))`.
pub fn log_sphere_area(n: usize) -> f64 {
    let nf = n as f64;
    std::f64::consts::LN_2 + 0.5 * nf * PI.ln() - log_gamma_unchecked(0.5 * nf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // 40-digit reference values (mpmath), frozen.
    const LGAMMA_REF: [(f64, f64); 10] = [
        (0.5, 0.572_364_942_924_700_087_07),
        (1.0, 0.0),
        (1.5, -0.120_782_237_635_245_222_35),
        (3.7, 1.428_072_326_665_387_921_9),
        (7.5, 7.534_364_236_758_732_955_2),
        (10.0, 12.801_827_480_081_469_611),
        (0.01, 4.599_479_878_042_021_722_5),
        (25.3, 55.746_181_183_584_590_052),
        (171.2, 707.600_926_847_670_144_09),
        (1e-5, 11.512_919_692_895_825_707),
    ];

    const BESSEL_I_REF: [(f64, f64, f64); 15] = [
        (0.0, 0.1, 1.002_501_562_934_095_601_7),
        (0.0, 1.0, 1.266_065_877_752_008_335_6),
        (0.0, 2.0, 2.279_585_302_336_067_267_4),
        (0.0, 10.0, 2_815.716_628_466_254_471_5),
        (0.0, 50.0, 2.932_553_783_849_336_326_7e20),
        (0.0, 700.0, 1.529_593_347_671_873_736_3e302),
        (0.5, 1.0, 0.937_674_888_245_487_646_72),
        (1.0, 1.0, 0.565_159_103_992_485_027_21),
        (1.5, 3.0, 3.099_483_456_725_635_810_1),
        (2.0, 10.0, 2_281.518_967_726_003_540_6),
        (0.5, 0.1, 0.252_733_984_600_131_980_5),
        (2.5, 40.0, 13_761_967_080_749_733.278),
        (7.0, 3.0, 0.004_472_118_729_949_566_195_4),
        (0.3, 25.0, 5_763_958_753.418_692_975_3),
        (1.0, 100.0, 1.068_369_390_338_162_481_2e42),
    ];

    const BESSEL_K_REF: [(f64, f64, f64); 10] = [
        (0.0, 1.0, 0.421_024_438_240_708_333_34),
        (0.0, 0.1, 2.427_069_024_702_016_557_8),
        (0.0, 10.0, 1.778_006_231_616_765_181_1e-5),
        (0.5, 1.0, 0.461_068_504_447_894_558_44),
        (0.3, 2.0, 0.116_036_974_348_119_258_36),
        (1.0, 1.0, 0.601_907_230_197_234_574_74),
        (1.5, 3.0, 0.048_034_646_842_352_790_087),
        (2.0, 0.05, 799.501_207_064_772_161_5),
        (2.5, 40.0, 9.066_005_151_810_602_517_2e-19),
        (1.0, 200.0, 1.228_742_373_472_985_812e-88),
    ];

    #[test]
    fn log_gamma_reference_values() {
        for (x, want) in LGAMMA_REF {
            let got = log_gamma(x).unwrap();
            if want.abs() < 1.0 {
                assert!((got - want).abs() < 1e-14, "x={x}: {got} vs {want}");
            } else {
                assert!(rel(got, want) < 1e-13, "x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn log_gamma_examples() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-15);
        assert!((log_gamma(0.5).unwrap() - PI.sqrt().ln()).abs() < 1e-15);
        // recurrence oracle: log Γ(7.5) = log Γ(8.5) - log 7.5
        let lhs = log_gamma(7.5).unwrap();
        let rhs = log_gamma(8.5).unwrap() - 7.5_f64.ln();
        assert!(rel(lhs, rhs) < 1e-13);
    }

    #[test]
    fn log_gamma_recurrence() {
        for x in [0.5, 1.5, 3.7, 10.0] {
            let d = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap() - f64::ln(x);
            assert!(d.abs() <= 1e-12, "x={x}: {d}");
        }
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-2.5), Err(Error::Domain(_))));
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn multivariate_log_gamma_cases() {
        for a in [0.7, 2.0, 5.5] {
            assert!((multivariate_log_gamma(1, a).unwrap() - log_gamma(a).unwrap()).abs() < 1e-15);
        }
        let want = 0.5 * PI.ln() + log_gamma(1.5).unwrap() + log_gamma(1.0).unwrap();
        assert!((multivariate_log_gamma(2, 1.5).unwrap() - want).abs() < 1e-14);
        // term-by-term oracle for (3, 3)
        let direct = (PI.powf(1.5) * 2.0 * (0.75 * PI.sqrt()) * 1.0).ln();
        assert!(rel(multivariate_log_gamma(3, 3.0).unwrap(), direct) < 1e-13);
        assert!(multivariate_log_gamma(3, 1.0).is_err());
        assert!(multivariate_log_gamma(2, 0.5).is_err());
    }

    #[test]
    fn bessel_i_reference_values() {
        for (nu, r, want) in BESSEL_I_REF {
            let got = bessel_i(nu, r).unwrap();
            assert!(rel(got, want) < 1e-10, "I_{nu}({r}) = {got}, want {want}");
        }
    }

    #[test]
    fn bessel_i_examples() {
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        let x = 1.0_f64;
        let closed = (2.0 / (PI * x)).sqrt() * x.sinh();
        assert!(rel(bessel_i(0.5, x).unwrap(), closed) < 1e-12);
        // quadrature oracle: (1/2π)∫₀^{2π} e^{2 cos t} dt by a fine trapezoid rule
        let m = 4000;
        let h = 2.0 * PI / m as f64;
        let quad: f64 = (0..m).map(|i| (2.0 * (i as f64 * h).cos()).exp()).sum::<f64>() * h / (2.0 * PI);
        assert!(rel(bessel_i(0.0, 2.0).unwrap(), quad) < 1e-12);
        assert!(bessel_i(0.0, -1.0).is_err());
        assert!(bessel_i(-0.5, 1.0).is_err());
        assert_eq!(log_bessel_i(1.0, 0.0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn log_bessel_i_large_argument_does_not_overflow() {
        let v = log_bessel_i(0.5, 1e4).unwrap();
        // I_{1/2}(x) = sqrt(2/(πx)) sinh x
        let want = 0.5 * (2.0 / (PI * 1e4)).ln() + 1e4 - std::f64::consts::LN_2;
        assert!((v - want).abs() < 1e-10 * want.abs());
    }

    #[test]
    fn crossover_sweep() {
        // Both branches agree on either side of the crossover.
        for nu in [0.0, 0.5, 1.0, 2.5, 4.0, 5.0] {
            for r in [20.0, 30.0, 40.0, 60.0] {
                if r < nu * nu {
                    continue;
                }
                if let Some(asym) = log_bessel_i_asymptotic(nu, r) {
                    let series = log_bessel_i_series(nu, r);
                    assert!(
                        (asym - series).abs() < 1e-12 * series.abs(),
                        "ν={nu} r={r}: {asym} vs {series}"
                    );
                }
            }
            assert!(log_bessel_i_asymptotic(nu, BESSEL_I_CROSSOVER.max(nu * nu) + 1e-9).is_some());
        }
    }

    #[test]
    fn bessel_k_reference_values() {
        for (nu, r, want) in BESSEL_K_REF {
            let got = bessel_k(nu, r).unwrap();
            assert!(rel(got, want) < 1e-10, "K_{nu}({r}) = {got}, want {want}");
        }
    }

    #[test]
    fn bessel_k_examples() {
        let x = 1.0_f64;
        let closed = (PI / (2.0 * x)).sqrt() * (-x).exp();
        assert!(rel(bessel_k(0.5, x).unwrap(), closed) < 1e-12);
        assert!(rel(bessel_k(0.3, 2.0).unwrap(), bessel_k(-0.3, 2.0).unwrap()) < 1e-15);
        // K₀(1) from the cosh integral by composite Simpson on [0, 8]
        let m = 20_000;
        let h = 8.0 / m as f64;
        let f = |t: f64| (-(t.cosh())).exp();
        let mut s = f(0.0) + f(8.0);
        for i in 1..m {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        assert!(rel(bessel_k(0.0, 1.0).unwrap(), s * h / 3.0) < 1e-11);
        assert!(bessel_k(0.0, 0.0).is_err());
        assert!(bessel_k(1.0, -1.0).is_err());
    }

    const GRID_NU: [f64; 3] = [1.5, 2.0, 3.0];
    const GRID_R: [f64; 3] = [0.1, 1.0, 10.0];

    #[test]
    fn bessel_i_recurrence() {
        for nu in GRID_NU {
            for r in GRID_R {
                let lo = bessel_i(nu - 1.0, r).unwrap();
                let hi = bessel_i(nu + 1.0, r).unwrap();
                let mid = bessel_i(nu, r).unwrap();
                assert!((lo - hi - 2.0 * nu / r * mid).abs() <= 1e-9 * mid, "ν={nu} r={r}");
            }
        }
    }

    #[test]
    fn wronskian() {
        for nu in GRID_NU {
            for r in GRID_R {
                let w = bessel_i(nu, r).unwrap() * bessel_k(nu + 1.0, r).unwrap()
                    + bessel_i(nu + 1.0, r).unwrap() * bessel_k(nu, r).unwrap();
                assert!((w - 1.0 / r).abs() <= 1e-9 / r, "ν={nu} r={r}: {w}");
            }
        }
    }

    #[test]
    fn monotonicity() {
        for nu in [0.0, 0.5, 1.0, 3.0] {
            let grid: Vec<f64> = (1..200).map(|i| i as f64 * 0.25).collect();
            for w in grid.windows(2) {
                assert!(bessel_i(nu, w[1]).unwrap() > bessel_i(nu, w[0]).unwrap());
                assert!(bessel_k(nu, w[1]).unwrap() < bessel_k(nu, w[0]).unwrap());
            }
        }
    }

    #[test]
    fn sphere_area() {
        assert!((log_sphere_area(2) - (2.0 * PI).ln()).abs() < 1e-15);
        assert!((log_sphere_area(3) - (4.0 * PI).ln()).abs() < 1e-15);
        assert!((log_sphere_area(4) - (2.0 * PI * PI).ln()).abs() < 1e-14);
    }
}
