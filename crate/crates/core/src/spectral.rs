//! Finite-window correlations, spectral Fourier-coefficient checks and
//! periodograms.
//!
//! Correlations use the overlap convention
//! `γ(k) = (1/N) Σ_{n<N−k} x_{n+k}·conj(x_n)`: the divisor is `N`, not `N − k`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FlatError, Result};
use crate::report::serialize_complex_vec;
use crate::stats::null_band;
use crate::transform;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationFunction {
    /// `γ(0..=K)`; `γ(−k) = conj(γ(k))`.
    #[serde(serialize_with = "serialize_complex_vec")]
    pub gamma: Vec<Complex64>,
    pub window: usize,
    /// `|γ_N(k) − γ_{N/2}(k)|`, absent when `k ≥ N/2`.
    pub deltas: Vec<Option<f64>>,
    /// Delta within the `3/√(N/2)` band.
    pub converged: Vec<bool>,
}

fn gamma_at(x: &[Complex64], k: usize) -> Complex64 {
    let n = x.len();
    let sum: Complex64 = x[k..].iter().zip(&x[..n - k]).map(|(a, b)| a * b.conj()).sum();
    sum / n as f64
}

pub fn wiener_correlations(x: &[Complex64], max_lag: usize) -> Result<CorrelationFunction> {
    let n = x.len();
    if n == 0 {
        return Err(FlatError::EmptySequence);
    }
    if max_lag >= n {
        return Err(FlatError::Lag { lag: max_lag, window: n });
    }
    let half = &x[..n / 2];
    let rows: Vec<(Complex64, Option<f64>)> = (0..=max_lag)
        .into_par_iter()
        .map(|k| {
            let g = gamma_at(x, k);
            let delta = (k < half.len()).then(|| (g - gamma_at(half, k)).norm());
            (g, delta)
        })
        .collect();
    let threshold = null_band((n / 2).max(1));
    Ok(CorrelationFunction {
        gamma: rows.iter().map(|r| r.0).collect(),
        window: n,
        converged: rows.iter().map(|r| r.1.is_some_and(|d| d <= threshold)).collect(),
        deltas: rows.into_iter().map(|r| r.1).collect(),
    })
}

pub fn real_to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LagVerdict {
    pub lag: usize,
    pub gamma: f64,
    pub delta: Option<f64>,
    pub verdict: Verdict,
}

/// Comparison of each `γ(k)`, `1 ≤ k ≤ K`, against zero at the `3/√N` band.
/// Zero correlations at every positive lag are what a multiple of Lebesgue
/// measure would produce.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralCheck {
    pub hypothesis: &'static str,
    pub window: usize,
    pub band: f64,
    pub lags: Vec<LagVerdict>,
    pub all_consistent: bool,
}

pub fn spectral_fourier_check(x: &[f64], max_lag: usize) -> Result<SpectralCheck> {
    if max_lag == 0 {
        return Err(FlatError::InvalidArgument("at least one lag is required".into()));
    }
    let cf = wiener_correlations(&real_to_complex(x), max_lag)?;
    let band = null_band(x.len());
    let lags: Vec<LagVerdict> = (1..=max_lag)
        .map(|k| {
            let gamma = cf.gamma[k].re;
            LagVerdict {
                lag: k,
                gamma,
                delta: cf.deltas[k],
                verdict: if gamma.abs() <= band { Verdict::Consistent } else { Verdict::Inconsistent },
            }
        })
        .collect();
    Ok(SpectralCheck {
        hypothesis: "lebesgue-multiple",
        window: x.len(),
        band,
        all_consistent: lags.iter().all(|l| l.verdict == Verdict::Consistent),
        lags,
    })
}

/// `|(1/√N) Σ x_n e(−n j/M)|²` for `j = 0..M`, so that `x_n = e(nθ)` peaks at
/// frequency `j/M ≈ θ`. The grid mean equals `γ(0)` when `M ≥ N`.
pub fn periodogram(x: &[Complex64], m: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(FlatError::EmptySequence);
    }
    if m < n {
        return Err(FlatError::InvalidGrid(m));
    }
    let mut padded = x.to_vec();
    padded.resize(m, Complex64::new(0.0, 0.0));
    Ok(transform::forward(&padded).iter().map(|v| v.norm_sqr() / n as f64).collect())
}
