//! The bijection `T` between Littlewood and Newman–Bourgain classes, and the
//! grid identities that tie a Littlewood polynomial `P`, its 0/1 partner
//! `Q = (2/√q)·Σ η_j z^j` and the Dirichlet kernel `D_q` together.
//!
//! Each check evaluates both sides independently and returns the largest
//! absolute residual.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{FlatError, Result};
use crate::poly::{evaluate_at_roots_aliased, NormalizedPolynomial};
use crate::seq::{BinarySequence, IntegerSequence, SignSequence};
use crate::transform::root_of_unity;

/// A Littlewood sequence together with its image under `T`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrespondencePair {
    pub littlewood: SignSequence,
    pub nb: BinarySequence,
    pub m: usize,
    pub q: usize,
}

impl CorrespondencePair {
    pub fn from_littlewood(seq: &SignSequence) -> Result<Self> {
        let nb = to_nb(seq)?;
        Ok(CorrespondencePair { littlewood: seq.clone(), m: nb.ones(), q: seq.len(), nb })
    }
}

/// `η_i = (ε_i + 1)/2`.
pub fn to_nb(seq: &SignSequence) -> Result<BinarySequence> {
    seq.require_littlewood_class()?;
    BinarySequence::new(seq.coeffs().iter().map(|&e| ((e + 1) / 2) as u8).collect())
}

/// `ε_i = 2η_i − 1`.
pub fn to_littlewood(seq: &BinarySequence) -> Result<SignSequence> {
    seq.require_nb_class()?;
    SignSequence::new(seq.bits().iter().map(|&b| 2 * b as i8 - 1).collect())
}

/// `Q = (2/√q) Σ η_j z^j`; not renormalized, so `‖Q‖₂ ≠ 1` in general.
pub fn q_polynomial(bits: &BinarySequence) -> NormalizedPolynomial {
    let q = bits.len() as f64;
    NormalizedPolynomial::from_integers(&bits.to_i64(), 2.0 / q.sqrt()).expect("nonempty")
}

fn max_residual(lhs: &[Complex64], rhs: &[Complex64]) -> f64 {
    lhs.iter().zip(rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

fn grid(poly: &NormalizedPolynomial, m: usize) -> Result<Vec<Complex64>> {
    Ok(evaluate_at_roots_aliased(poly, m, false)?.values)
}

/// Max over the `M`-grid of `|P(z) − (2√m/√q·T(P)(z) − D_q(z))|`.
pub fn check_decomposition(seq: &SignSequence, grid_size: usize) -> Result<f64> {
    let nb = to_nb(seq)?;
    let q = seq.len();
    let m = nb.ones();
    let p = grid(&NormalizedPolynomial::littlewood(seq), grid_size)?;
    let t = grid(&NormalizedPolynomial::newman_bourgain(&nb)?, grid_size)?;
    let d = grid(&NormalizedPolynomial::dirichlet(q)?, grid_size)?;
    let factor = 2.0 * (m as f64).sqrt() / (q as f64).sqrt();
    let rhs: Vec<Complex64> = t.iter().zip(&d).map(|(t, d)| t * factor - d).collect();
    Ok(max_residual(&p, &rhs))
}

/// Max over `j = 1..q−1` of `|P(ξ_{q,j}) − Q(ξ_{q,j})|`; `j = 0` is excluded
/// because `D_q(1) = √q`. Returns 0 for `q = 1`.
pub fn check_root_identity(seq: &SignSequence) -> Result<f64> {
    let nb = to_nb(seq)?;
    let q = seq.len();
    let p = grid(&NormalizedPolynomial::littlewood(seq), q)?;
    let qq = grid(&q_polynomial(&nb), q)?;
    Ok(max_residual(&p[1..], &qq[1..]))
}

/// Values `Q(−ξ_{q,k})` recovered from the samples `Q(ξ_{q,j})` through
/// `Q(−ξ_k) = (2/q) Σ_j ξ_j/(ξ_k + ξ_j)·Q(ξ_j)` (odd `q`).
pub fn interpolate_negated(samples: &[Complex64]) -> Result<Vec<Complex64>> {
    let q = samples.len();
    if q.is_multiple_of(2) {
        return Err(FlatError::Parity(format!("negated-root interpolation needs odd q, got {q}")));
    }
    let roots: Vec<Complex64> = (0..q).map(|j| root_of_unity(q, j as i64)).collect();
    Ok(roots
        .iter()
        .map(|xk| {
            roots.iter().zip(samples).map(|(xj, v)| xj / (xk + xj) * v).sum::<Complex64>() * (2.0 / q as f64)
        })
        .collect())
}

/// Checks `Q(−ξ_{q,k}) = (2/q)·D_q(1)/(1+ξ_{q,k}) + P(−ξ_{q,k})` for every
/// `k`, and that Lagrange interpolation from the samples of `Q` on the
/// `q`-th roots reproduces `Q(−ξ_{q,k})`. Returns the larger residual.
pub fn lagrange_negated_reconstruction(seq: &SignSequence) -> Result<f64> {
    let q = seq.len();
    if q.is_multiple_of(2) {
        return Err(FlatError::Parity(format!("1 + ξ_(q,k) vanishes at k = q/2 for even q = {q}")));
    }
    let nb = to_nb(seq)?;
    let qpoly = q_polynomial(&nb);
    let q_grid = evaluate_at_roots_aliased(&qpoly, q, true)?;
    let q_neg = q_grid.negated.expect("requested");
    let p_neg = evaluate_at_roots_aliased(&NormalizedPolynomial::littlewood(seq), q, true)?.negated.expect("requested");
    let bridge = 2.0 / q as f64 * (q as f64).sqrt();
    let rhs: Vec<Complex64> = (0..q)
        .map(|k| bridge / (Complex64::new(1.0, 0.0) + root_of_unity(q, k as i64)) + p_neg[k])
        .collect();
    let identity = max_residual(&q_neg, &rhs);
    let interpolated = interpolate_negated(&q_grid.values)?;
    Ok(identity.max(max_residual(&q_neg, &interpolated)))
}

/// `Σ_{k<q} 1/|1 + ξ_{q,k}|⁴` by direct summation (odd `q`).
pub fn inverse_fourth_root_sum(q: usize) -> Result<f64> {
    if q == 0 || q.is_multiple_of(2) {
        return Err(FlatError::Parity(format!("1 + ξ_(q,k) vanishes for even q; got q = {q}")));
    }
    Ok((0..q)
        .map(|k| {
            let d = (Complex64::new(1.0, 0.0) + root_of_unity(q, k as i64)).norm_sqr();
            1.0 / (d * d)
        })
        .sum())
}

/// `(q⁴/3 + 2q²/3)/16`.
pub fn inverse_fourth_root_sum_closed_form(q: usize) -> f64 {
    let q = q as f64;
    (q.powi(4) / 3.0 + 2.0 * q * q / 3.0) / 16.0
}

/// Max over the `M`-grid of the residual of
/// `(1−z^ℓ)Q(z) = (1−z^ℓ)P(z) + √ℓ·D_ℓ(z)(1−z^q)/√q`.
pub fn differenced_identity_residual(seq: &SignSequence, ell: usize, grid_size: usize) -> Result<f64> {
    if ell == 0 {
        return Err(FlatError::InvalidArgument("lag ell must be at least 1".into()));
    }
    let nb = to_nb(seq)?;
    let q = seq.len();
    let p = grid(&NormalizedPolynomial::littlewood(seq), grid_size)?;
    let qq = grid(&q_polynomial(&nb), grid_size)?;
    // √ℓ·D_ℓ = Σ_{j<ℓ} z^j
    let ramp = grid(&NormalizedPolynomial::from_real(&vec![1.0; ell], 1.0)?, grid_size)?;
    let one = Complex64::new(1.0, 0.0);
    let sqrt_q = (q as f64).sqrt();
    let residual = (0..grid_size)
        .map(|j| {
            let diff_l = one - root_of_unity(grid_size, (j as i64) * ell as i64);
            let diff_q = one - root_of_unity(grid_size, (j as i64) * q as i64);
            let lhs = diff_l * qq[j];
            let rhs = diff_l * p[j] + ramp[j] * diff_q / sqrt_q;
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max);
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::parse_signs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_littlewood(rng: &mut ChaCha8Rng, q: usize) -> SignSequence {
        let mut v: Vec<bool> = (0..q).map(|_| rng.gen()).collect();
        v[0] = true;
        v[q - 1] = true;
        SignSequence::from_bools(&v).unwrap()
    }

    #[test]
    fn t_map_examples() {
        let cases: [(&str, &[u8], usize); 3] =
            [("+-+", &[1, 0, 1], 2), ("++", &[1, 1], 2), ("+--+", &[1, 0, 0, 1], 2)];
        for (s, bits, m) in cases {
            let nb = to_nb(&parse_signs(s).unwrap()).unwrap();
            assert_eq!(nb.bits(), bits);
            assert_eq!(nb.ones(), m);
        }
        for (bits, s) in [(vec![1, 0, 1], "+-+"), (vec![1, 1, 1], "+++"), (vec![1, 0, 0, 1], "+--+")] {
            let back = to_littlewood(&BinarySequence::new(bits).unwrap()).unwrap();
            assert_eq!(back.to_sign_string(), s);
        }
    }

    #[test]
    fn class_violations() {
        assert!(matches!(to_nb(&parse_signs("-++").unwrap()), Err(FlatError::ClassViolation(_))));
        assert!(matches!(to_nb(&parse_signs("++-").unwrap()), Err(FlatError::ClassViolation(_))));
        assert!(matches!(
            to_littlewood(&BinarySequence::new(vec![0, 1]).unwrap()),
            Err(FlatError::ClassViolation(_))
        ));
        assert!(check_decomposition(&parse_signs("-+").unwrap(), 4).is_err());
    }

    #[test]
    fn bijection_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10_000 {
            let q = rng.gen_range(1..64);
            let s = random_littlewood(&mut rng, q);
            let nb = to_nb(&s).unwrap();
            assert_eq!(to_littlewood(&nb).unwrap(), s);
            assert_eq!(to_nb(&to_littlewood(&nb).unwrap()).unwrap(), nb);
            for (e, b) in s.coeffs().iter().zip(nb.bits()) {
                assert_eq!(2 * *b as i8, e + 1);
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        assert!(check_decomposition(&parse_signs("+-+").unwrap(), 12).unwrap() < 1e-12);
        for q in [1, 2, 5, 33] {
            assert!(check_decomposition(&SignSequence::all_plus(q).unwrap(), 4 * q).unwrap() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let s = random_littlewood(&mut rng, 101);
        assert!(check_decomposition(&s, 404).unwrap() < 1e-10);
    }

    #[test]
    fn decomposition_symbolic_form() {
        // (1/√3)(1 − z + z²) = (2/√3)(1 + z²) − D_3 at an arbitrary point
        let z = Complex64::from_polar(1.0, 0.37);
        let p = NormalizedPolynomial::littlewood(&parse_signs("+-+").unwrap()).eval(z);
        let rhs = (Complex64::new(1.0, 0.0) + z * z) * (2.0 / 3f64.sqrt())
            - NormalizedPolynomial::dirichlet(3).unwrap().eval(z);
        assert!((p - rhs).norm() < 1e-14);
    }

    #[test]
    fn root_identity_examples() {
        assert!(check_root_identity(&parse_signs("+-+").unwrap()).unwrap() < 1e-12);
        assert!(check_root_identity(&SignSequence::all_plus(8).unwrap()).unwrap() < 1e-12);
        assert_eq!(check_root_identity(&SignSequence::all_plus(1).unwrap()).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        for q in [64, 65] {
            assert!(check_root_identity(&random_littlewood(&mut rng, q)).unwrap() < 1e-10);
        }
    }

    #[test]
    fn lagrange_examples() {
        assert!(lagrange_negated_reconstruction(&parse_signs("+-+").unwrap()).unwrap() < 1e-12);
        assert!(lagrange_negated_reconstruction(&parse_signs("+").unwrap()).unwrap() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(lagrange_negated_reconstruction(&random_littlewood(&mut rng, 101)).unwrap() < 1e-10);
        assert!(matches!(lagrange_negated_reconstruction(&parse_signs("++").unwrap()), Err(FlatError::Parity(_))));
    }

    #[test]
    fn inverse_fourth_root_sum_examples() {
        assert_eq!(inverse_fourth_root_sum(1).unwrap(), 1.0 / 16.0);
        assert_eq!(inverse_fourth_root_sum_closed_form(1), 1.0 / 16.0);
        assert!((inverse_fourth_root_sum(3).unwrap() - 33.0 / 16.0).abs() < 1e-12);
        assert!((inverse_fourth_root_sum_closed_form(3) - 33.0 / 16.0).abs() < 1e-15);
        let direct = inverse_fourth_root_sum(1001).unwrap();
        assert!(((direct - inverse_fourth_root_sum_closed_form(1001)) / direct).abs() < 1e-9);
        assert!(inverse_fourth_root_sum(4).is_err());
        assert!(inverse_fourth_root_sum(0).is_err());
    }

    #[test]
    fn differenced_identity_examples() {
        let ones = SignSequence::all_plus(9).unwrap();
        assert!(differenced_identity_residual(&ones, 1, 40).unwrap() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let s = random_littlewood(&mut rng, 63);
        assert!(differenced_identity_residual(&s, 5, 256).unwrap() < 1e-10);
        assert!(differenced_identity_residual(&s, 63, 256).unwrap() < 1e-10);
        assert!(differenced_identity_residual(&s, 0, 256).is_err());
    }

    #[test]
    fn lagrange_odd_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for q in (1..=301).step_by(20) {
            let s = random_littlewood(&mut rng, q);
            assert!(lagrange_negated_reconstruction(&s).unwrap() < 1e-9, "q={q}");
        }
    }
}
