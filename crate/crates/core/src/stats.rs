//! Aperiodic autocorrelations, merit factors, residue-class spectra of
//! finite sets, finite-window densities of `H ∩ (H + ℓ)` and lag
//! correlation scans.

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{FlatError, Result};
use crate::seq::{BinarySequence, IntegerSequence, SignSequence};
use crate::transform;

/// Lengths above this use the FFT route for autocorrelations.
pub const DIRECT_AUTOCORRELATION_MAX: usize = 4096;

/// Width of the diagnostic null band, `3/√N`.
pub fn null_band(window: usize) -> f64 {
    3.0 / (window as f64).sqrt()
}

/// Merit factor `1/(‖P‖₄⁴ − 1)`, infinite when the defect vanishes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeritFactor {
    Finite(f64),
    Infinite,
}

impl MeritFactor {
    pub fn from_defect(defect: f64) -> Self {
        if defect > 0.0 {
            MeritFactor::Finite(1.0 / defect)
        } else {
            MeritFactor::Infinite
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            MeritFactor::Finite(v) => v,
            MeritFactor::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, MeritFactor::Infinite)
    }
}

/// Finite values serialize as numbers, the infinite sentinel as `"inf"`.
impl Serialize for MeritFactor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            MeritFactor::Finite(v) => serializer.serialize_f64(v),
            MeritFactor::Infinite => serializer.serialize_str("inf"),
        }
    }
}

/// Exact rational, serialized as `"num/den"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rational(pub Ratio<i128>);

impl Rational {
    pub fn new(num: i128, den: i128) -> Self {
        Rational(Ratio::new(num, den))
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AutocorrelationProfile {
    /// `c_0, …, c_{q−1}`; negative lags follow `c_{−k} = c_k`.
    pub c: Vec<i64>,
    /// `Σ_{k≥1} c_k²`.
    pub sidelobe_energy: i128,
    /// `Σ_{k≥1} c_k c_{q−k}`.
    pub fold_energy: i128,
}

impl AutocorrelationProfile {
    pub fn from_correlations(c: Vec<i64>) -> Self {
        let q = c.len();
        let sidelobe_energy = c[1..].iter().map(|&x| (x as i128) * (x as i128)).sum();
        let fold_energy = (1..q).map(|k| (c[k] as i128) * (c[q - k] as i128)).sum();
        AutocorrelationProfile { c, sidelobe_energy, fold_energy }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn c0(&self) -> i64 {
        self.c[0]
    }

    /// `c_k` for any integer lag, zero outside `|k| < q`.
    pub fn at(&self, k: i64) -> i64 {
        let k = k.unsigned_abs() as usize;
        self.c.get(k).copied().unwrap_or(0)
    }

    /// `‖P‖₄⁴` of the L²-normalized polynomial, `1 + 2E/c_0²`, exactly.
    pub fn l4_fourth_power_exact(&self) -> Option<Rational> {
        let c0 = self.c0() as i128;
        (c0 != 0).then(|| Rational(Ratio::new(c0 * c0 + 2 * self.sidelobe_energy, c0 * c0)))
    }

    /// Merit factor `c_0²/(2E)`, `None` when `E = 0`.
    pub fn merit_factor_exact(&self) -> Option<Rational> {
        let c0 = self.c0() as i128;
        (self.sidelobe_energy != 0).then(|| Rational(Ratio::new(c0 * c0, 2 * self.sidelobe_energy)))
    }

    /// Square-L² defect `2E/c_0²` and merit factor.
    pub fn defect_and_merit(&self) -> (f64, MeritFactor) {
        let c0 = self.c0() as f64;
        let defect = 2.0 * self.sidelobe_energy as f64 / (c0 * c0);
        let merit = match self.merit_factor_exact() {
            Some(r) => MeritFactor::Finite(r.to_f64()),
            None => MeritFactor::Infinite,
        };
        (defect, merit)
    }
}

/// Exact `c_k = Σ_j b_j b_{j+k}`, `0 ≤ k < q`, in `O(q²)`.
pub fn autocorrelation_direct(values: &[i64]) -> Vec<i64> {
    let q = values.len();
    (0..q).map(|k| values[..q - k].iter().zip(&values[k..]).map(|(a, b)| a * b).sum()).collect()
}

/// `c_k` via a zero-padded power spectrum, rounded to integers.
pub fn autocorrelation_fft(values: &[i64]) -> Vec<i64> {
    let q = values.len();
    let size = (2 * q).max(2).next_power_of_two();
    let mut padded = vec![Complex64::new(0.0, 0.0); size];
    for (slot, &v) in padded.iter_mut().zip(values) {
        slot.re = v as f64;
    }
    let power: Vec<Complex64> =
        transform::forward(&padded).iter().map(|x| Complex64::new(x.norm_sqr(), 0.0)).collect();
    transform::eval_on_roots(&power, size)
        .iter()
        .take(q)
        .map(|x| (x.re / size as f64).round() as i64)
        .collect()
}

/// Direct route up to [`DIRECT_AUTOCORRELATION_MAX`] entries, FFT above.
pub fn autocorrelation_values(values: &[i64]) -> Vec<i64> {
    if values.len() <= DIRECT_AUTOCORRELATION_MAX {
        autocorrelation_direct(values)
    } else {
        autocorrelation_fft(values)
    }
}

pub fn autocorrelation<S: IntegerSequence + ?Sized>(seq: &S) -> AutocorrelationProfile {
    AutocorrelationProfile::from_correlations(autocorrelation_values(&seq.to_i64()))
}

/// Autocorrelations of a real coefficient vector, `O(q²)`.
pub fn real_autocorrelation(values: &[f64]) -> Vec<f64> {
    let q = values.len();
    (0..q).map(|k| values[..q - k].iter().zip(&values[k..]).map(|(a, b)| a * b).sum()).collect()
}

/// `‖P‖₄⁴ = 1 + (2/q²)·E` for the Littlewood polynomial of `seq`.
pub fn l4_from_autocorrelation(seq: &SignSequence) -> f64 {
    l4_from_autocorrelation_exact(seq).to_f64()
}

pub fn l4_from_autocorrelation_exact(seq: &SignSequence) -> Rational {
    autocorrelation(seq).l4_fourth_power_exact().expect("sign sequences have c_0 = q > 0")
}

pub fn merit_factor(seq: &SignSequence) -> MeritFactor {
    autocorrelation(seq).defect_and_merit().1
}

pub fn merit_factor_exact(seq: &SignSequence) -> Option<Rational> {
    autocorrelation(seq).merit_factor_exact()
}

/// `(1/2q) Σ|Q(ξ_{q,j})|⁴` and `(1/2q) Σ|Q(−ξ_{q,j})|⁴` for
/// `Q = (2/√q) Σ η_j z^j`, from autocorrelations:
/// `½(c_0² + 2F + 2E)` and `½(c_0² + 2(−1)^q F + 2E)` with `c` in the
/// scale of `Q`'s coefficients.
pub fn quadratic_root_sums(seq: &BinarySequence) -> (f64, f64) {
    let q = seq.len() as f64;
    let profile = autocorrelation(seq);
    // c scales by (2/√q)² = 4/q
    let s = 4.0 / q;
    let c0 = profile.c0() as f64 * s;
    let fold = profile.fold_energy as f64 * s * s;
    let side = profile.sidelobe_energy as f64 * s * s;
    let sign = if seq.len().is_multiple_of(2) { 1.0 } else { -1.0 };
    (0.5 * (c0 * c0 + 2.0 * fold + 2.0 * side), 0.5 * (c0 * c0 + 2.0 * sign * fold + 2.0 * side))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetSpectrum {
    pub r: usize,
    pub size: usize,
    pub balanced: bool,
    /// `A(j)`, or `A(j) − #A` in balanced mode.
    pub counts: Vec<i64>,
    /// `DF_r(1_A)(ℓ) = (1/r) Σ_j counts[j] ξ_{r,jℓ}` as `[re, im]`.
    #[serde(serialize_with = "crate::report::serialize_complex_vec")]
    pub dft: Vec<Complex64>,
}

/// Residue-class counts of `set` modulo `r` and their discrete Fourier
/// transform.
pub fn set_dft(set: &[i64], r: usize, balanced: bool) -> Result<SetSpectrum> {
    if r < 2 {
        return Err(FlatError::Modulus(r));
    }
    let mut counts = vec![0i64; r];
    for &k in set {
        counts[k.rem_euclid(r as i64) as usize] += 1;
    }
    if balanced {
        let total = set.len() as i64;
        counts.iter_mut().for_each(|c| *c -= total);
    }
    let as_real: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let dft = transform::eval_real_on_roots(&as_real, r).into_iter().map(|v| v / r as f64).collect();
    Ok(SetSpectrum { r, size: set.len(), balanced, counts, dft })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LagDensity {
    pub lag: usize,
    /// `|H ∩ (H+ℓ) ∩ [0,q)|`.
    pub intersection: usize,
    /// `|(H+ℓ) ∩ [0,q)|`.
    pub shifted: usize,
    /// `|(H Δ (H+ℓ)) ∩ [0,q)|`.
    pub symmetric_difference: usize,
    pub intersection_density: f64,
    pub shifted_density: f64,
    pub symmetric_difference_density: f64,
}

/// Finite-window densities; no limit is taken.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HSetDensities {
    pub window: usize,
    pub size: usize,
    pub density: f64,
    pub rows: Vec<LagDensity>,
}

pub fn h_set_densities(h: &[usize], q: usize, lags: &[usize]) -> Result<HSetDensities> {
    if q == 0 {
        return Err(FlatError::InvalidArgument("window q must be at least 1".into()));
    }
    let mut member = vec![false; q];
    for &j in h.iter().filter(|&&j| j < q) {
        member[j] = true;
    }
    let size = member.iter().filter(|&&b| b).count();
    let qf = q as f64;
    let rows = lags
        .iter()
        .map(|&lag| {
            let shifted_member = |j: usize| j >= lag && member[j - lag];
            let shifted = (0..q).filter(|&j| shifted_member(j)).count();
            let intersection = (0..q).filter(|&j| member[j] && shifted_member(j)).count();
            let symmetric_difference = (0..q).filter(|&j| member[j] != shifted_member(j)).count();
            LagDensity {
                lag,
                intersection,
                shifted,
                symmetric_difference,
                intersection_density: intersection as f64 / qf,
                shifted_density: shifted as f64 / qf,
                symmetric_difference_density: symmetric_difference as f64 / qf,
            }
        })
        .collect();
    Ok(HSetDensities { window: q, size, density: size as f64 / qf, rows })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LagCorrelation {
    pub lag: usize,
    pub value: f64,
    pub within_band: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndependenceScan {
    pub window: usize,
    pub band: f64,
    pub rows: Vec<LagCorrelation>,
}

/// `(1/N) Σ_{j<N} ε_j ε_{j+ℓ}` for `ℓ = 1..=L`, terms with `j+ℓ ≥ q`
/// omitted; each value is flagged against the `3/√N` band.
pub fn pairwise_independence_scan(seq: &SignSequence, max_lag: usize, window: usize) -> Result<IndependenceScan> {
    let q = seq.len();
    if window == 0 || window > q {
        return Err(FlatError::Window { window, available: q });
    }
    if max_lag >= window {
        return Err(FlatError::Lag { lag: max_lag, window });
    }
    let e = seq.coeffs();
    let band = null_band(window);
    let rows = (1..=max_lag)
        .into_par_iter()
        .map(|lag| {
            let end = window.min(q - lag);
            let sum: i64 = (0..end).map(|j| (e[j] * e[j + lag]) as i64).sum();
            let value = sum as f64 / window as f64;
            LagCorrelation { lag, value, within_band: value.abs() <= band }
        })
        .collect();
    Ok(IndependenceScan { window, band, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::parse_signs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn autocorrelation_examples() {
        assert_eq!(autocorrelation(&parse_signs("+-+").unwrap()).c, vec![3, -2, 1]);
        assert_eq!(autocorrelation(&parse_signs("++-").unwrap()).c, vec![3, 0, -1]);
        let ones = autocorrelation(&SignSequence::all_plus(9).unwrap());
        assert_eq!(ones.c, (0..9).map(|k| 9 - k).collect::<Vec<i64>>());
        let p = autocorrelation(&parse_signs("+-+").unwrap());
        assert_eq!((p.at(-1), p.at(1), p.at(5)), (-2, -2, 0));
    }

    #[test]
    fn l4_examples() {
        let b13 = parse_signs("+-+-++--+++++").unwrap();
        assert_eq!(autocorrelation(&b13).sidelobe_energy, 6);
        assert_eq!(l4_from_autocorrelation_exact(&b13), Rational::new(181, 169));
        assert_eq!(l4_from_autocorrelation(&SignSequence::all_plus(5).unwrap()), 3.4);
        assert_eq!(l4_from_autocorrelation(&SignSequence::all_plus(1).unwrap()), 1.0);
    }

    #[test]
    fn merit_factors_exact() {
        let b13 = parse_signs("+-+-++--+++++").unwrap();
        let b11 = parse_signs("+-++-+++---").unwrap();
        assert_eq!(merit_factor_exact(&b13), Some(Rational::new(169, 12)));
        assert_eq!(merit_factor_exact(&b11), Some(Rational::new(121, 10)));
        assert_eq!(merit_factor_exact(&SignSequence::all_plus(1).unwrap()), None);
        assert!(merit_factor(&SignSequence::all_plus(1).unwrap()).is_infinite());
        assert_eq!(serde_json::to_string(&Rational::new(169, 12)).unwrap(), "\"169/12\"");
        assert_eq!(serde_json::to_string(&MeritFactor::Infinite).unwrap(), "\"inf\"");
    }

    #[test]
    fn fft_route_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &q in &[1usize, 2, 7, 100, 4097, 10_000] {
            let v: Vec<i64> = (0..q).map(|_| if rng.gen() { 1 } else { -1 }).collect();
            assert_eq!(autocorrelation_fft(&v), autocorrelation_direct(&v), "q={q}");
            let b: Vec<i64> = (0..q).map(|_| rng.gen_range(0..2)).collect();
            assert_eq!(autocorrelation_fft(&b), autocorrelation_direct(&b), "bits q={q}");
        }
    }

    #[test]
    fn sign_sequence_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let q = rng.gen_range(1..300);
            let s = SignSequence::from_bools(&(0..q).map(|_| rng.gen()).collect::<Vec<bool>>()).unwrap();
            let p = autocorrelation(&s);
            assert_eq!(p.c0(), q as i64);
            for (k, &c) in p.c.iter().enumerate() {
                assert!(c.unsigned_abs() as usize <= q - k);
                assert_eq!((c - (q - k) as i64).rem_euclid(2), 0);
            }
        }
    }

    #[test]
    fn quadratic_root_sums_match_grid_sums() {
        use crate::poly::{evaluate_at_roots, NormalizedPolynomial};
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let q = rng.gen_range(1..80);
            let bits = BinarySequence::new((0..q).map(|_| rng.gen_range(0..2)).collect()).unwrap();
            let poly = NormalizedPolynomial::from_integers(&bits.to_i64(), 2.0 / (q as f64).sqrt()).unwrap();
            let grid = evaluate_at_roots(&poly, q, true).unwrap();
            let direct_plus: f64 = grid.values.iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() / (2 * q) as f64;
            let direct_minus: f64 =
                grid.negated.unwrap().iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() / (2 * q) as f64;
            let (plus, minus) = quadratic_root_sums(&bits);
            assert!((plus - direct_plus).abs() < 1e-9 * q as f64, "q={q}");
            assert!((minus - direct_minus).abs() < 1e-9 * q as f64, "q={q}");
        }
    }

    #[test]
    fn quadratic_root_sums_add_to_fourth_moment() {
        use crate::poly::{l4_norm_4_exact, NormalizedPolynomial};
        for bits in [vec![1u8, 1, 1], vec![1, 0, 1], vec![1, 0, 0, 1, 1]] {
            let b = BinarySequence::new(bits).unwrap();
            let q = b.len();
            let poly = NormalizedPolynomial::from_integers(&b.to_i64(), 2.0 / (q as f64).sqrt()).unwrap();
            let (plus, minus) = quadratic_root_sums(&b);
            assert!((plus + minus - l4_norm_4_exact(&poly).unwrap()).abs() < 1e-12);
        }
        let (plus, minus) = quadratic_root_sums(&BinarySequence::new(vec![1]).unwrap());
        // Q = 2: c_0 = 4, each half-sum is 8
        assert_eq!((plus, minus), (8.0, 8.0));
    }

    #[test]
    fn set_dft_examples() {
        let s = set_dft(&[0, 1, 2, 3], 2, false).unwrap();
        assert_eq!(s.counts, vec![2, 2]);
        assert!((s.dft[0] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        assert!(s.dft[1].norm() < 1e-14);
        let evens: Vec<i64> = (0..=20).step_by(2).collect();
        let e = set_dft(&evens, 2, false).unwrap();
        assert!((e.dft[1] - Complex64::new(evens.len() as f64 / 2.0, 0.0)).norm() < 1e-12);
        let empty = set_dft(&[], 5, false).unwrap();
        assert!(empty.counts.iter().all(|&c| c == 0) && empty.dft.iter().all(|d| d.norm() == 0.0));
        assert_eq!(set_dft(&[1], 1, false), Err(FlatError::Modulus(1)));
        let bal = set_dft(&[0, 1, 2, 3], 2, true).unwrap();
        assert_eq!(bal.counts, vec![-2, -2]);
    }

    #[test]
    fn set_dft_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let r = rng.gen_range(2..40);
            let set: Vec<i64> = (0..rng.gen_range(0..200)).map(|_| rng.gen_range(-500..500)).collect();
            let s = set_dft(&set, r, false).unwrap();
            assert_eq!(s.counts.iter().sum::<i64>(), set.len() as i64);
            assert!((s.dft[0].re - set.len() as f64 / r as f64).abs() < 1e-9);
            let lhs: f64 = s.dft.iter().map(|d| (d * r as f64).norm_sqr()).sum::<f64>() / r as f64;
            let rhs: i64 = s.counts.iter().map(|c| c * c).sum();
            assert_eq!(lhs.round() as i64, rhs);
        }
    }

    #[test]
    fn h_set_density_examples() {
        let evens: Vec<usize> = (0..100).step_by(2).collect();
        let d = h_set_densities(&evens, 100, &[2, 1]).unwrap();
        assert_eq!(d.rows[0].intersection_density, 0.49);
        assert_eq!(d.rows[1].intersection_density, 0.0);
        let all: Vec<usize> = (0..50).collect();
        let d = h_set_densities(&all, 50, &[1, 7, 49]).unwrap();
        for row in &d.rows {
            assert_eq!(row.intersection, 50 - row.lag);
        }
    }

    #[test]
    fn h_set_density_additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let q = rng.gen_range(1..300);
            let h: Vec<usize> = (0..q).filter(|_| rng.gen()).collect();
            let lags: Vec<usize> = (1..10).collect();
            let d = h_set_densities(&h, q, &lags).unwrap();
            for row in &d.rows {
                assert_eq!(d.size + row.shifted - 2 * row.intersection, row.symmetric_difference);
            }
        }
    }

    #[test]
    fn independence_scan_examples() {
        let alt = SignSequence::new((0..1001).map(|j| if j % 2 == 0 { 1 } else { -1 }).collect()).unwrap();
        let scan = pairwise_independence_scan(&alt, 1, 1000).unwrap();
        assert_eq!(scan.rows[0].value, -1.0);
        let ones = SignSequence::all_plus(140).unwrap();
        let scan = pairwise_independence_scan(&ones, 40, 100).unwrap();
        assert!(scan.rows.iter().all(|r| r.value == 1.0 && !r.within_band));
        assert!(pairwise_independence_scan(&ones, 100, 100).is_err());
        assert!(pairwise_independence_scan(&ones, 1, 141).is_err());
    }

    #[test]
    fn independence_scan_random_within_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 1 << 16;
        let s = SignSequence::from_bools(&(0..n + 32).map(|_| rng.gen()).collect::<Vec<bool>>()).unwrap();
        let scan = pairwise_independence_scan(&s, 32, n).unwrap();
        assert!(scan.rows.iter().all(|r| r.within_band), "{:?}", scan.rows);
    }
}
