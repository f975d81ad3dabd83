//! Importance-sampling Monte Carlo and randomized lattice rules.
//!
//! Draws are split into fixed chunks, each with its own ChaCha stream derived
//! from `(seed, chunk index)`, and partial sums are combined in chunk order,
//! so results depend only on the seed and the budget.

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const CHUNK: usize = 8192;

/// Fibonacci lattice size used by [`lattice_2d`].
pub const FIBONACCI_N: usize = 121_393;
const FIBONACCI_Z: usize = 75_025;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub log_value: f64,
    /// Standard error relative to the estimate.
    pub rel_se: f64,
    pub samples: usize,
}

/// Running `(max, Σ e^{l-max}, Σ e^{2(l-max)}, count)` of log weights.
#[derive(Debug, Clone, Copy)]
struct Moments {
    max: f64,
    s1: f64,
    s2: f64,
    count: usize,
}

impl Moments {
    fn empty() -> Self {
        Moments { max: f64::NEG_INFINITY, s1: 0.0, s2: 0.0, count: 0 }
    }

    fn of(log_weights: &[f64]) -> Self {
        let max = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut m = Moments { max, s1: 0.0, s2: 0.0, count: log_weights.len() };
        if max.is_finite() {
            for l in log_weights {
                let e = (l - max).exp();
                m.s1 += e;
                m.s2 += e * e;
            }
        }
        m
    }

    fn merge(self, other: Moments) -> Moments {
        if !other.max.is_finite() {
            return Moments { count: self.count + other.count, ..self };
        }
        if !self.max.is_finite() {
            return Moments { count: self.count + other.count, ..other };
        }
        let max = self.max.max(other.max);
        let (a, b) = ((self.max - max).exp(), (other.max - max).exp());
        Moments {
            max,
            s1: self.s1 * a + other.s1 * b,
            s2: self.s2 * a * a + other.s2 * b * b,
            count: self.count + other.count,
        }
    }

    fn estimate(&self) -> Result<McEstimate> {
        if self.count < 2 || !(self.s1 > 0.0) {
            return Err(Error::Integration {
                message: "all importance weights vanished".into(),
                best_estimate: 0.0,
                error_estimate: f64::INFINITY,
            });
        }
        let n = self.count as f64;
        let mean = self.s1 / n;
        let var = (self.s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
        Ok(McEstimate {
            log_value: self.max + mean.ln(),
            rel_se: (var / n).sqrt() / mean,
            samples: self.count,
        })
    }
}

/// `∫ f dμ ≈ mean of exp(log_weight)` where `log_weight` draws one point from a
/// proposal `q` and returns `log f(x) - log q(x)`.
pub fn importance<F>(budget: usize, seed: u64, log_weight: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    if budget < 2 {
        return Err(Error::domain("Monte Carlo budget must be at least 2"));
    }
    let chunks = budget.div_ceil(CHUNK);
    let parts: Vec<Result<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(budget - c * CHUNK);
            let mut lw = Vec::with_capacity(len);
            for _ in 0..len {
                let l = log_weight(&mut rng)?;
                if l.is_nan() || l == f64::INFINITY {
                    return Err(Error::Integration {
                        message: format!("importance weight is {l}"),
                        best_estimate: f64::NAN,
                        error_estimate: f64::INFINITY,
                    });
                }
                lw.push(l);
            }
            Ok(Moments::of(&lw))
        })
        .collect();
    let mut total = Moments::empty();
    for p in parts {
        total = total.merge(p?);
    }
    total.estimate()
}

/// Randomly shifted rank-1 Fibonacci lattice in `[0,1)²` with the tent
/// transform, `shifts` independent shifts; the standard error comes from the
/// spread between shifts.
pub fn lattice_2d<F>(shifts: usize, seed: u64, log_integrand: F) -> Result<McEstimate>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if shifts < 2 {
        return Err(Error::domain("a randomized lattice needs at least 2 shifts"));
    }
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let deltas: Vec<(f64, f64)> = (0..shifts).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
    let tent = |u: f64| 1.0 - (2.0 * u - 1.0).abs();
    let mut logs = Vec::with_capacity(shifts);
    for (d1, d2) in deltas {
        let parts: Vec<Moments> = (0..FIBONACCI_N.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(FIBONACCI_N);
                let lw: Vec<f64> = (lo..hi)
                    .map(|i| {
                        let u1 = (i as f64 / FIBONACCI_N as f64 + d1).fract();
                        let u2 = ((i * FIBONACCI_Z % FIBONACCI_N) as f64 / FIBONACCI_N as f64 + d2).fract();
                        log_integrand(tent(u1), tent(u2))
                    })
                    .collect();
                Moments::of(&lw)
            })
            .collect();
        let total = parts.into_iter().fold(Moments::empty(), Moments::merge);
        if total.s1.is_nan() {
            return Err(Error::Integration {
                message: "lattice integrand produced NaN".into(),
                best_estimate: f64::NAN,
                error_estimate: f64::INFINITY,
            });
        }
        logs.push(total.estimate()?.log_value);
    }
    // Average the per-shift estimates on a common scale.
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vals: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
    let r = shifts as f64;
    let mean = vals.iter().sum::<f64>() / r;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0);
    Ok(McEstimate {
        log_value: m + mean.ln(),
        rel_se: (var / r).sqrt() / mean,
        samples: shifts * FIBONACCI_N,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn uniform_mean_and_determinism() {
        // ∫_0^1 x dx with a uniform proposal.
        let run = || importance(50_000, 9, |rng| Ok(rng.random::<f64>().ln())).unwrap();
        let (a, b) = (run(), run());
        assert_eq!(a, b);
        assert!((a.log_value.exp() - 0.5).abs() < 4.0 * a.rel_se * 0.5);
    }

    #[test]
    fn lattice_is_accurate_for_smooth_integrands() {
        let e = lattice_2d(8, 1, |u, v| (1.0 + u * v).ln()).unwrap();
        // ∫∫ (1 + uv) = 1.25
        assert!((e.log_value.exp() - 1.25).abs() < 1e-8);
        assert!(e.rel_se < 1e-8);
    }
}
