//! Normalized polynomials on the unit circle: evaluation on roots-of-unity
//! grids, exact sampled L² and L⁴ norms, Riemann estimates of L^α norms,
//! Mahler measure and flatness statistics.
//!
//! All integrals are against normalized Lebesgue measure `dz` on the circle.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{FlatError, Result};
use crate::seq::{BinarySequence, IntegerSequence, SignSequence};
use crate::stats::{self, MeritFactor};
use crate::transform;

/// Floor applied to `log|P|` per sample when estimating the Mahler measure.
pub const MAHLER_LOG_FLOOR: f64 = -40.0;

/// Grid oversampling used by [`flatness_report`].
pub const REPORT_OVERSAMPLE: usize = 8;

/// Smallest grid used by the Riemann estimators.
pub const MIN_ESTIMATE_GRID: usize = 64;

/// Absolute tolerance for sampled identities, scaled by `q`.
pub fn identity_tolerance(q: usize) -> f64 {
    1e-8 * q.max(1) as f64
}

/// `s · Σ a_j z^j` with complex coefficients `a_j` and scale `s > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedPolynomial {
    coeffs: Vec<Complex64>,
    scale: f64,
}

impl NormalizedPolynomial {
    pub fn new(coeffs: Vec<Complex64>, scale: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(FlatError::EmptySequence);
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(FlatError::InvalidArgument(format!("scale must be positive and finite, got {scale}")));
        }
        Ok(NormalizedPolynomial { coeffs, scale })
    }

    pub fn from_real(coeffs: &[f64], scale: f64) -> Result<Self> {
        NormalizedPolynomial::new(coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect(), scale)
    }

    pub fn from_integers(coeffs: &[i64], scale: f64) -> Result<Self> {
        NormalizedPolynomial::new(coeffs.iter().map(|&a| Complex64::new(a as f64, 0.0)).collect(), scale)
    }

    /// `(1/√q) Σ ε_j z^j`.
    pub fn littlewood(seq: &SignSequence) -> Self {
        let q = seq.len();
        NormalizedPolynomial::from_integers(&seq.to_i64(), 1.0 / (q as f64).sqrt()).expect("nonempty")
    }

    /// `(1/√m) Σ η_j z^j` with `m` the number of ones.
    pub fn newman_bourgain(seq: &BinarySequence) -> Result<Self> {
        if seq.ones() == 0 {
            return Err(FlatError::ZeroPolynomial);
        }
        NormalizedPolynomial::from_integers(&seq.to_i64(), 1.0 / (seq.ones() as f64).sqrt())
    }

    /// Normalized Dirichlet kernel `D_q = (1/√q) Σ_{j<q} z^j`.
    pub fn dirichlet(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(FlatError::EmptySequence);
        }
        NormalizedPolynomial::from_real(&vec![1.0; q], 1.0 / (q as f64).sqrt())
    }

    pub fn constant(c: f64) -> Result<Self> {
        if c == 0.0 {
            return NormalizedPolynomial::from_real(&[0.0], 1.0);
        }
        NormalizedPolynomial::from_real(&[c.signum()], c.abs())
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        NormalizedPolynomial { coeffs, scale: 1.0 }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Length `q` of the coefficient vector.
    pub fn coefficient_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Index of the last nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|a| a.norm_sqr() == 0.0)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|a| a.im == 0.0)
    }

    /// Coefficients with the scale applied.
    pub fn scaled_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|&a| a * self.scale).collect()
    }

    /// `Σ |s·a_j|²`, the exact squared L² norm.
    pub fn coefficient_energy(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.scale * self.scale
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a) * self.scale
    }
}

/// Polynomial values on the `M`-th roots of unity and optionally on their
/// negatives.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitGrid {
    pub size: usize,
    pub values: Vec<Complex64>,
    pub negated: Option<Vec<Complex64>>,
}

impl UnitGrid {
    /// `(1/M) Σ |v_j|^α`.
    pub fn mean_power(&self, alpha: f64) -> f64 {
        mean_power(&self.values, alpha)
    }
}

fn mean_power(values: &[Complex64], alpha: f64) -> f64 {
    let sum: f64 = if alpha == 2.0 {
        values.iter().map(|v| v.norm_sqr()).sum()
    } else if alpha == 4.0 {
        values.iter().map(|v| v.norm_sqr() * v.norm_sqr()).sum()
    } else {
        values.iter().map(|v| v.norm().powf(alpha)).sum()
    };
    sum / values.len() as f64
}

/// Evaluates `poly` at `ξ_{M,j} = exp(2πi j/M)`. When `include_negated` is
/// set, also at `−ξ_{M,j}`; both come from one transform of length `2M`
/// (`−ξ_{M,j}` is its point `2j + M`).
///
/// Requires `degree ≤ M − 1`; use [`evaluate_at_roots_aliased`] for the
/// folded evaluation that accepts any degree.
pub fn evaluate_at_roots(poly: &NormalizedPolynomial, m: usize, include_negated: bool) -> Result<UnitGrid> {
    if m == 0 {
        return Err(FlatError::InvalidGrid(m));
    }
    if poly.degree() >= m {
        return Err(FlatError::DegreeOverflow { degree: poly.degree(), grid: m });
    }
    evaluate_at_roots_aliased(poly, m, include_negated)
}

/// Like [`evaluate_at_roots`] without the degree check; values are still
/// exact pointwise since `ξ^M = 1`.
pub fn evaluate_at_roots_aliased(poly: &NormalizedPolynomial, m: usize, include_negated: bool) -> Result<UnitGrid> {
    if m == 0 {
        return Err(FlatError::InvalidGrid(m));
    }
    let scaled = poly.scaled_coeffs();
    if !include_negated {
        return Ok(UnitGrid { size: m, values: transform::eval_on_roots(&scaled, m), negated: None });
    }
    let both = transform::eval_on_roots(&scaled, 2 * m);
    let values = both.iter().step_by(2).copied().collect();
    let negated = (0..m).map(|j| both[(2 * j + m) % (2 * m)]).collect();
    Ok(UnitGrid { size: m, values, negated: Some(negated) })
}

/// `(1/M) Σ |P(ξ_{M,j})|²` on a grid of size `M`. Equals `Σ|s·a_k|²` when
/// `M` exceeds the degree; smaller grids alias and are rejected.
pub fn l2_norm_sq_sampled(poly: &NormalizedPolynomial, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(FlatError::InvalidGrid(m));
    }
    if m <= poly.degree() {
        return Err(FlatError::Aliasing { grid: m, coefficients: poly.degree() + 1 });
    }
    Ok(evaluate_at_roots(poly, m, false)?.mean_power(2.0))
}

/// `∫|P|⁴ dz` from the two-grid average
/// `(1/2q) Σ |P(ξ_{q,j})|⁴ + (1/2q) Σ |P(−ξ_{q,j})|⁴`, exact for real
/// coefficients and an odd coefficient count `q`.
pub fn l4_norm_4_exact(poly: &NormalizedPolynomial) -> Result<f64> {
    let q = poly.coefficient_count();
    if q.is_multiple_of(2) {
        return Err(FlatError::Parity(format!(
            "two-grid fourth moment needs an odd coefficient count, got q = {q}"
        )));
    }
    if !poly.is_real() {
        return Err(FlatError::Domain("two-grid fourth moment needs real coefficients".into()));
    }
    let grid = evaluate_at_roots(poly, q, true)?;
    let plus = grid.mean_power(4.0);
    let minus = mean_power(grid.negated.as_deref().expect("negated grid requested"), 4.0);
    Ok(0.5 * (plus + minus))
}

/// Riemann estimate on a grid together with its refinement bracket.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    /// Estimate on the base grid.
    pub value: f64,
    /// Estimate on the doubled grid.
    pub refined: f64,
    /// `|value − refined|`.
    pub bracket: f64,
    pub grid_size: usize,
}

impl NormEstimate {
    fn new(value: f64, refined: f64, grid_size: usize) -> Self {
        NormEstimate { value, refined, bracket: (value - refined).abs(), grid_size }
    }
}

fn estimate_grid(poly: &NormalizedPolynomial, oversample: usize) -> Result<usize> {
    if oversample < 2 {
        return Err(FlatError::InvalidArgument(format!("oversample must be at least 2, got {oversample}")));
    }
    let base = oversample
        .checked_mul(poly.degree() + 1)
        .ok_or_else(|| FlatError::InvalidArgument("grid size overflows".into()))?;
    Ok(base.max(MIN_ESTIMATE_GRID).next_power_of_two())
}

/// Estimates `∫|P|^α dz` by `(1/M) Σ |P(ξ_{M,j})|^α` with
/// `M = oversample·(degree+1)` rounded up to a power of two (at least
/// [`MIN_ESTIMATE_GRID`]); the bracket is the change when `M` doubles.
pub fn lp_norm_estimate(poly: &NormalizedPolynomial, alpha: f64, oversample: usize) -> Result<NormEstimate> {
    if !(alpha > 0.0) {
        return Err(FlatError::NonPositiveExponent(alpha));
    }
    let m = estimate_grid(poly, oversample)?;
    let coarse = evaluate_at_roots(poly, m, false)?.mean_power(alpha);
    let fine = evaluate_at_roots(poly, 2 * m, false)?.mean_power(alpha);
    Ok(NormEstimate::new(coarse, fine, m))
}

/// Mahler measure estimate with the number of samples hitting the log floor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MahlerEstimate {
    pub value: f64,
    pub refined: f64,
    pub bracket: f64,
    pub grid_size: usize,
    pub clipped_samples: usize,
}

/// `exp(∫ log|P| dz)` from the half-step grid `exp(2πi(j+½)/M)`, with each
/// `log|P|` clipped below at [`MAHLER_LOG_FLOOR`]. The half-step grid avoids
/// the roots of unity, where ±1-coefficient polynomials often vanish.
pub fn mahler_measure(poly: &NormalizedPolynomial, oversample: usize) -> Result<MahlerEstimate> {
    if poly.is_zero() {
        return Err(FlatError::ZeroPolynomial);
    }
    let m = estimate_grid(poly, oversample)?;
    let scaled = poly.scaled_coeffs();
    let log_mean = |size: usize| -> (f64, usize) {
        let values = transform::eval_on_shifted_roots(&scaled, size);
        let mut clipped = 0;
        let sum: f64 = values
            .iter()
            .map(|v| {
                let l = v.norm().ln();
                if l < MAHLER_LOG_FLOOR {
                    clipped += 1;
                    MAHLER_LOG_FLOOR
                } else {
                    l
                }
            })
            .sum();
        (sum / size as f64, clipped)
    };
    let (coarse, clipped) = log_mean(m);
    let (fine, _) = log_mean(2 * m);
    let (value, refined) = (coarse.exp(), fine.exp());
    Ok(MahlerEstimate { value, refined, bracket: (value - refined).abs(), grid_size: m, clipped_samples: clipped })
}

/// Estimates `∫ ||P|² − 1|^p dz`; for `p = 2` and unit L² norm this is the
/// square-L² defect `‖P‖₄⁴ − 1`.
pub fn square_lp_deviation(poly: &NormalizedPolynomial, p: f64, oversample: usize) -> Result<NormEstimate> {
    if !(p > 0.0) {
        return Err(FlatError::NonPositiveExponent(p));
    }
    let m = estimate_grid(poly, oversample)?;
    let dev = |size: usize| -> Result<f64> {
        let grid = evaluate_at_roots(poly, size, false)?;
        Ok(grid.values.iter().map(|v| (v.norm_sqr() - 1.0).abs().powf(p)).sum::<f64>() / size as f64)
    };
    Ok(NormEstimate::new(dev(m)?, dev(2 * m)?, m))
}

/// Uniform and mean distance of `|P|` from a constant `c` on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CFlatness {
    pub c: f64,
    pub sup_deviation: f64,
    pub mean_abs_deviation: f64,
    pub grid_size: usize,
}

/// `max_j ||P(ξ_j)| − c|` and `(1/M) Σ ||P(ξ_j)| − c|` on the `M`-grid.
pub fn c_flatness(poly: &NormalizedPolynomial, c: f64, m: usize) -> Result<CFlatness> {
    let grid = evaluate_at_roots_aliased(poly, m, false)?;
    let devs: Vec<f64> = grid.values.iter().map(|v| (v.norm() - c).abs()).collect();
    Ok(CFlatness {
        c,
        sup_deviation: devs.iter().copied().fold(0.0, f64::max),
        mean_abs_deviation: devs.iter().sum::<f64>() / m as f64,
        grid_size: m,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormRoute {
    /// Coefficient energy; exact.
    Energy,
    /// Autocorrelation sidelobe energy; exact.
    Autocorrelation,
    /// Grid large enough that the mean of `|P|^p` is exact for even `p`.
    ExactGrid,
    /// Riemann sum with refinement bracket.
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormRow {
    pub alpha: f64,
    /// `∫|P|^α`.
    pub power_integral: f64,
    /// `(∫|P|^α)^{1/α}`.
    pub norm: f64,
    pub route: NormRoute,
    pub bracket: f64,
    pub grid_size: Option<usize>,
}

/// `∫|P|⁴` for `P = (1/√d) Σ a_j z^j`, from the exact autocorrelations.
pub fn l4_power_exact(values: &[i64], denominator: f64) -> f64 {
    let c = stats::autocorrelation_values(values);
    let sidelobes: i128 = c[1..].iter().map(|&x| (x as i128) * (x as i128)).sum();
    let total = (c[0] as i128) * (c[0] as i128) + 2 * sidelobes;
    total as f64 / (denominator * denominator)
}

/// `∫|P|^α` for `P = (1/√d) Σ a_j z^j`: exact for `α = 2, 4`, otherwise a
/// grid estimate with its refinement bracket.
pub fn integer_polynomial_norm(values: &[i64], denominator: f64, alpha: f64) -> Result<NormRow> {
    if values.is_empty() {
        return Err(FlatError::EmptySequence);
    }
    if !(alpha > 0.0) {
        return Err(FlatError::NonPositiveExponent(alpha));
    }
    let row = |power_integral: f64, route, bracket, grid_size| NormRow {
        alpha,
        power_integral,
        norm: power_integral.powf(1.0 / alpha),
        route,
        bracket,
        grid_size,
    };
    if alpha == 2.0 {
        let energy: i64 = values.iter().map(|v| v * v).sum();
        return Ok(row(energy as f64 / denominator, NormRoute::Energy, 0.0, None));
    }
    if alpha == 4.0 {
        return Ok(row(l4_power_exact(values, denominator), NormRoute::Autocorrelation, 0.0, None));
    }
    let poly = NormalizedPolynomial::from_integers(values, 1.0 / denominator.sqrt())?;
    let est = lp_norm_estimate(&poly, alpha, REPORT_OVERSAMPLE)?;
    Ok(row(est.value, NormRoute::Quadrature, est.bracket, Some(est.grid_size)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlatnessReport {
    pub l4_fourth_power: f64,
    pub square_l2_defect: f64,
    pub merit_factor: MeritFactor,
    pub mahler: f64,
    pub sup_deviation: f64,
    pub mean_abs_deviation: f64,
}

/// Flatness statistics of the L²-normalized polynomial with coefficients
/// `seq`. The defect and merit factor come from exact integer
/// autocorrelations; Mahler measure and deviations are grid estimates.
pub fn flatness_report<S: IntegerSequence + ?Sized>(seq: &S) -> Result<FlatnessReport> {
    if seq.is_empty() {
        return Err(FlatError::EmptySequence);
    }
    let energy = seq.energy();
    if energy == 0 {
        return Err(FlatError::ZeroPolynomial);
    }
    let profile = stats::autocorrelation(seq);
    let (defect, merit) = profile.defect_and_merit();
    let poly = NormalizedPolynomial::from_integers(&seq.to_i64(), 1.0 / (energy as f64).sqrt())?;
    let m = (REPORT_OVERSAMPLE * seq.len()).max(MIN_ESTIMATE_GRID).next_power_of_two();
    let dev = c_flatness(&poly, 1.0, m)?;
    let mahler = mahler_measure(&poly, REPORT_OVERSAMPLE)?;
    Ok(FlatnessReport {
        l4_fourth_power: 1.0 + defect,
        square_l2_defect: defect,
        merit_factor: merit,
        mahler: mahler.value,
        sup_deviation: dev.sup_deviation,
        mean_abs_deviation: dev.mean_abs_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::real_autocorrelation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SQRT3: f64 = 1.7320508075688772;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn signs(s: &str) -> SignSequence {
        crate::seq::parse_signs(s).unwrap()
    }

    #[test]
    fn constant_on_four_roots() {
        let grid = evaluate_at_roots(&NormalizedPolynomial::constant(1.0).unwrap(), 4, false).unwrap();
        for v in &grid.values {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn dirichlet_three_on_cube_roots() {
        let grid = evaluate_at_roots(&NormalizedPolynomial::dirichlet(3).unwrap(), 3, false).unwrap();
        let expected = [SQRT3, 0.0, 0.0];
        for (v, e) in grid.values.iter().zip(expected) {
            assert!((v - Complex64::new(e, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn negated_grid_contains_value_at_minus_one() {
        let p = NormalizedPolynomial::littlewood(&signs("+-+"));
        let grid = evaluate_at_roots(&p, 3, true).unwrap();
        let neg = grid.negated.unwrap();
        assert_eq!(neg.len(), 3);
        assert!((neg[0] - Complex64::new(SQRT3, 0.0)).norm() < 1e-14);
        for j in 0..3 {
            let z = -transform::root_of_unity(3, j as i64);
            assert!((neg[j] - p.eval(z)).norm() < 1e-14);
        }
    }

    #[test]
    fn grid_errors() {
        let p = NormalizedPolynomial::dirichlet(5).unwrap();
        assert_eq!(evaluate_at_roots(&p, 0, false), Err(FlatError::InvalidGrid(0)));
        assert_eq!(evaluate_at_roots(&p, 4, false), Err(FlatError::DegreeOverflow { degree: 4, grid: 4 }));
        assert!(evaluate_at_roots_aliased(&p, 4, false).is_ok());
        assert_eq!(l2_norm_sq_sampled(&p, 3), Err(FlatError::Aliasing { grid: 3, coefficients: 5 }));
    }

    #[test]
    fn sampled_l2_examples() {
        let one = NormalizedPolynomial::constant(1.0).unwrap();
        assert!(close(l2_norm_sq_sampled(&one, 1).unwrap(), 1.0, 1e-15));
        let d5 = NormalizedPolynomial::dirichlet(5).unwrap();
        assert!(close(l2_norm_sq_sampled(&d5, 5).unwrap(), 1.0, 1e-14));
        let p = NormalizedPolynomial::littlewood(&signs("+-+"));
        assert!(close(l2_norm_sq_sampled(&p, 3).unwrap(), 1.0, 1e-14));
    }

    #[test]
    fn sampled_l2_random_sign_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let q = rng.gen_range(1..=512);
            let s = SignSequence::from_bools(&(0..q).map(|_| rng.gen()).collect::<Vec<bool>>()).unwrap();
            let v = l2_norm_sq_sampled(&NormalizedPolynomial::littlewood(&s), q).unwrap();
            assert!((v - 1.0).abs() < 1e-10, "q={q} v={v}");
        }
    }

    #[test]
    fn two_grid_fourth_moment_examples() {
        let d3 = NormalizedPolynomial::dirichlet(3).unwrap();
        assert!(close(l4_norm_4_exact(&d3).unwrap(), 19.0 / 9.0, 1e-13));
        let one = NormalizedPolynomial::constant(1.0).unwrap();
        assert!(close(l4_norm_4_exact(&one).unwrap(), 1.0, 1e-15));
        let b13 = NormalizedPolynomial::littlewood(&signs("+-+-++--+++++"));
        assert!(close(l4_norm_4_exact(&b13).unwrap(), 181.0 / 169.0, 1e-12));
    }

    #[test]
    fn two_grid_fourth_moment_errors() {
        let d4 = NormalizedPolynomial::dirichlet(4).unwrap();
        assert!(matches!(l4_norm_4_exact(&d4), Err(FlatError::Parity(_))));
        let c = NormalizedPolynomial::new(vec![Complex64::new(1.0, 1.0); 3], 1.0).unwrap();
        assert!(matches!(l4_norm_4_exact(&c), Err(FlatError::Domain(_))));
    }

    #[test]
    fn fourth_moment_matches_real_autocorrelation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let q = 2 * rng.gen_range(0..=256) + 1;
            let a: Vec<f64> = (0..q).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c = real_autocorrelation(&a);
            let oracle = c[0] * c[0] + 2.0 * c[1..].iter().map(|x| x * x).sum::<f64>();
            let got = l4_norm_4_exact(&NormalizedPolynomial::from_real(&a, 1.0).unwrap()).unwrap();
            assert!((got - oracle).abs() < identity_tolerance(q), "q={q}");
        }
    }

    #[test]
    fn dirichlet_closed_form_small_odd() {
        for q in (3..=201).step_by(2) {
            let got = l4_norm_4_exact(&NormalizedPolynomial::dirichlet(q).unwrap()).unwrap();
            let q = q as f64;
            let want = 2.0 * q / 3.0 + 1.0 / (3.0 * q);
            assert!(((got - want) / want).abs() < 1e-8);
        }
    }

    #[test]
    fn lp_estimate_examples() {
        let one = NormalizedPolynomial::constant(1.0).unwrap();
        for alpha in [0.5, 1.0, 3.0, 7.5] {
            let e = lp_norm_estimate(&one, alpha, 2).unwrap();
            assert!(close(e.value, 1.0, 1e-14) && e.bracket < 1e-14);
        }
        let d = NormalizedPolynomial::dirichlet(100).unwrap();
        let e = lp_norm_estimate(&d, 4.0, 2).unwrap();
        let want = 2.0 * 100.0 / 3.0 + 1.0 / 300.0;
        assert!((e.value - want).abs() <= e.bracket + identity_tolerance(100));
        assert_eq!(lp_norm_estimate(&d, 0.0, 2), Err(FlatError::NonPositiveExponent(0.0)));
        assert!(lp_norm_estimate(&d, 2.0, 1).is_err());
    }

    #[test]
    fn mahler_examples() {
        let c = NormalizedPolynomial::constant(2.5).unwrap();
        assert!(close(mahler_measure(&c, 2).unwrap().value, 2.5, 1e-13));
        let zk = NormalizedPolynomial::monomial(7);
        assert!(close(mahler_measure(&zk, 2).unwrap().value, 1.0, 1e-13));
        let p = NormalizedPolynomial::from_real(&[1.0, 1.0], 1.0 / 2f64.sqrt()).unwrap();
        let m = mahler_measure(&p, 1 << 15).unwrap();
        assert!(close(m.value, 1.0 / 2f64.sqrt(), 1e-5), "{m:?}");
        assert!((m.value - 1.0 / 2f64.sqrt()).abs() <= 2.5 * m.bracket);
        let zero = NormalizedPolynomial::from_real(&[0.0, 0.0], 1.0).unwrap();
        assert_eq!(mahler_measure(&zero, 2), Err(FlatError::ZeroPolynomial));
    }

    #[test]
    fn flatness_report_examples() {
        let b13 = flatness_report(&signs("+-+-++--+++++")).unwrap();
        assert!(close(b13.merit_factor.value(), 169.0 / 12.0, 1e-12));
        assert!(close(b13.l4_fourth_power, 181.0 / 169.0, 1e-14));
        let b11 = flatness_report(&signs("+-++-+++---")).unwrap();
        assert!(close(b11.merit_factor.value(), 12.1, 1e-12));
        let ones = flatness_report(&SignSequence::all_plus(5).unwrap()).unwrap();
        assert!(close(ones.l4_fourth_power, 3.4, 1e-14));
        assert!(close(ones.merit_factor.value(), 1.0 / 2.4, 1e-14));
        let single = flatness_report(&SignSequence::all_plus(1).unwrap()).unwrap();
        assert_eq!(single.merit_factor, MeritFactor::Infinite);
        assert_eq!(single.square_l2_defect, 0.0);
    }

    #[test]
    fn binary_report_uses_ones_normalization() {
        let b = BinarySequence::new(vec![1, 0, 1]).unwrap();
        let r = flatness_report(&b).unwrap();
        // c = (2, 0, 1): (4 + 2)/4
        assert!(close(r.l4_fourth_power, 1.5, 1e-15));
        let zero = BinarySequence::new(vec![0, 0]).unwrap();
        assert_eq!(flatness_report(&zero), Err(FlatError::ZeroPolynomial));
    }

    #[test]
    fn defect_equals_square_deviation_integral() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let q = rng.gen_range(1..=200);
            let s = SignSequence::from_bools(&(0..q).map(|_| rng.gen()).collect::<Vec<bool>>()).unwrap();
            let report = flatness_report(&s).unwrap();
            let dev = square_lp_deviation(&NormalizedPolynomial::littlewood(&s), 2.0, 2).unwrap();
            assert!((report.square_l2_defect - dev.value).abs() <= dev.bracket + identity_tolerance(q));
            assert!(report.l4_fourth_power >= 1.0);
        }
    }

    #[test]
    fn mahler_below_l1_below_l2() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let q = rng.gen_range(1..=100);
            let s = SignSequence::from_bools(&(0..q).map(|_| rng.gen()).collect::<Vec<bool>>()).unwrap();
            let p = NormalizedPolynomial::littlewood(&s);
            let mahler = mahler_measure(&p, 8).unwrap();
            let l1 = lp_norm_estimate(&p, 1.0, 8).unwrap();
            let slack = mahler.bracket + l1.bracket + 1e-12;
            assert!(mahler.value <= l1.value + slack, "q={q} {mahler:?} {l1:?}");
            assert!(l1.value <= 1.0 + l1.bracket + 1e-12);
        }
    }

    #[test]
    fn c_flatness_of_monomial() {
        let f = c_flatness(&NormalizedPolynomial::monomial(3), 1.0, 16).unwrap();
        assert!(f.sup_deviation < 1e-14 && f.mean_abs_deviation < 1e-14);
        let g = c_flatness(&NormalizedPolynomial::monomial(3), 0.5, 16).unwrap();
        assert!(close(g.sup_deviation, 0.5, 1e-14));
    }
}
