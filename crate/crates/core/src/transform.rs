//! Exact-length evaluation of polynomials on roots-of-unity grids.
//!
//! `rustfft` plans any length (mixed radix, Rader for primes, Bluestein
//! otherwise), so a grid of exactly `M` points never needs zero padding.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// `exp(2πi j / m)` with the index reduced mod `m` before the trig call.
pub fn root_of_unity(m: usize, j: i64) -> Complex64 {
    let r = j.rem_euclid(m as i64) as f64;
    let theta = 2.0 * PI * r / m as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// `v_j = Σ_k a_k ξ_{m,j}^k` for `j = 0..m`. Coefficients past `m` are folded
/// onto `k mod m`, which is exact on the grid.
pub fn eval_on_roots(coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    assert!(m > 0, "grid size must be positive");
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, &a) in coeffs.iter().enumerate() {
        buf[k % m] += a;
    }
    inverse_in_place(&mut buf);
    buf
}

/// Same as [`eval_on_roots`] for real coefficients.
pub fn eval_real_on_roots(coeffs: &[f64], m: usize) -> Vec<Complex64> {
    assert!(m > 0, "grid size must be positive");
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, &a) in coeffs.iter().enumerate() {
        buf[k % m].re += a;
    }
    inverse_in_place(&mut buf);
    buf
}

/// Values at the half-step grid `z_j = exp(2πi (j + 1/2) / m)`.
pub fn eval_on_shifted_roots(coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    assert!(m > 0, "grid size must be positive");
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, &a) in coeffs.iter().enumerate() {
        // exp(iπk/m) = root_of_unity(2m, k)
        buf[k % m] += a * root_of_unity(2 * m, k as i64);
    }
    inverse_in_place(&mut buf);
    buf
}

/// Unnormalized forward DFT, `X_j = Σ_k x_k exp(−2πi jk/m)`.
pub fn forward(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    if !buf.is_empty() {
        FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    }
    buf
}

fn inverse_in_place(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_inverse(buf.len()).process(buf);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(coeffs: &[Complex64], m: usize, shift: f64) -> Vec<Complex64> {
        (0..m)
            .map(|j| {
                let z = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + shift) / m as f64);
                coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
            })
            .collect()
    }

    fn sample(len: usize) -> Vec<Complex64> {
        (0..len).map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos())).collect()
    }

    #[test]
    fn matches_horner_on_prime_and_composite_lengths() {
        for &(len, m) in &[(5, 5), (7, 13), (30, 17), (64, 64), (10, 3), (1, 1)] {
            let a = sample(len);
            for (x, y) in eval_on_roots(&a, m).iter().zip(naive(&a, m, 0.0)) {
                assert!((x - y).norm() < 1e-10, "len={len} m={m}");
            }
            for (x, y) in eval_on_shifted_roots(&a, m).iter().zip(naive(&a, m, 0.5)) {
                assert!((x - y).norm() < 1e-10, "shifted len={len} m={m}");
            }
        }
    }

    #[test]
    fn root_index_is_reduced() {
        let a = root_of_unity(7, 3);
        let b = root_of_unity(7, 3 + 7 * 1000);
        let c = root_of_unity(7, 3 - 7);
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn forward_inverts_evaluation() {
        let a = sample(12);
        let v = eval_on_roots(&a, 12);
        let back: Vec<_> = forward(&v).iter().map(|x| x / 12.0).collect();
        for (x, y) in back.iter().zip(&a) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
