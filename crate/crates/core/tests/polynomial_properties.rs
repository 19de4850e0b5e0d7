use flatlab::correspondence::{to_littlewood, to_nb};
use flatlab::poly::{
    evaluate_at_roots, l2_norm_sq_sampled, l4_norm_4_exact, lp_norm_estimate, mahler_measure, square_lp_deviation,
    NormalizedPolynomial, REPORT_OVERSAMPLE,
};
use flatlab::seq::random_signs;
use flatlab::stats::{l4_from_autocorrelation_exact, merit_factor_exact};
use flatlab::{Rational, SignSequence};
use num_complex::Complex64;
use proptest::prelude::*;

fn sidelobe_energy(s: &[i8]) -> i128 {
    let n = s.len();
    (1..n)
        .map(|k| {
            let c: i128 = (0..n - k).map(|j| (s[j] * s[j + k]) as i128).sum();
            c * c
        })
        .sum()
}

fn horner(coeffs: &[i8], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c as f64)
}

fn signs() -> impl Strategy<Value = SignSequence> {
    prop::collection::vec(prop::bool::ANY, 1..200).prop_map(|v| SignSequence::from_bools(&v).unwrap())
}

#[test]
fn sampled_l2_norm_is_one_for_random_littlewood() {
    for trial in 0..1000u64 {
        let q = 1 + (trial as usize * 37) % 700;
        let p = NormalizedPolynomial::littlewood(&random_signs(q, 1, trial).unwrap());
        let v = l2_norm_sq_sampled(&p, q).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "q = {q}: {v}");
    }
}

#[test]
fn grids_match_horner_on_both_root_sets() {
    for (q, m) in [(5, 5), (7, 12), (12, 12), (13, 30), (64, 64)] {
        let seq = random_signs(q, 2, m as u64).unwrap();
        let grid = evaluate_at_roots(&NormalizedPolynomial::littlewood(&seq), m, true).unwrap();
        let negated = grid.negated.unwrap();
        let s = 1.0 / (q as f64).sqrt();
        for j in 0..m {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / m as f64);
            assert!((grid.values[j] - horner(seq.coeffs(), z) * s).norm() < 1e-10);
            assert!((negated[j] - horner(seq.coeffs(), -z) * s).norm() < 1e-10);
        }
    }
}

proptest! {
    #[test]
    fn correspondence_round_trips(mut v in prop::collection::vec(prop::bool::ANY, 1..300)) {
        v[0] = true;
        let last = v.len() - 1;
        v[last] = true;
        let seq = SignSequence::from_bools(&v).unwrap();
        let nb = to_nb(&seq).unwrap();
        prop_assert_eq!(nb.ones(), v.iter().filter(|&&b| b).count());
        prop_assert_eq!(to_littlewood(&nb).unwrap(), seq);
    }

    #[test]
    fn exact_l4_and_merit_factor_match_definition(seq in signs()) {
        let n = seq.coeffs().len() as i128;
        let e = sidelobe_energy(seq.coeffs());
        prop_assert_eq!(l4_from_autocorrelation_exact(&seq), Rational::new(n * n + 2 * e, n * n));
        let expected = (e != 0).then(|| Rational::new(n * n, 2 * e));
        prop_assert_eq!(merit_factor_exact(&seq), expected);
    }

    #[test]
    fn two_grid_moment_matches_definition_for_odd_q(half in 0usize..150, seed in any::<u64>()) {
        let q = 2 * half + 1;
        let seq = random_signs(q, seed, 0).unwrap();
        let exact = 1.0 + 2.0 * sidelobe_energy(seq.coeffs()) as f64 / (q * q) as f64;
        let got = l4_norm_4_exact(&NormalizedPolynomial::littlewood(&seq)).unwrap();
        prop_assert!((got - exact).abs() < 1e-10 * q as f64);
    }

    #[test]
    fn square_defect_equals_l4_minus_one(seq in signs()) {
        let q = seq.coeffs().len() as f64;
        let defect = 2.0 * sidelobe_energy(seq.coeffs()) as f64 / (q * q);
        let est = square_lp_deviation(&NormalizedPolynomial::littlewood(&seq), 2.0, REPORT_OVERSAMPLE).unwrap();
        prop_assert!((est.value - defect).abs() < 1e-9);
        prop_assert!(est.bracket < 1e-9);
    }

    #[test]
    fn mahler_below_l1_below_l2(seq in signs()) {
        let p = NormalizedPolynomial::littlewood(&seq);
        let mahler = mahler_measure(&p, REPORT_OVERSAMPLE).unwrap();
        let l1 = lp_norm_estimate(&p, 1.0, REPORT_OVERSAMPLE).unwrap();
        prop_assert!(mahler.value <= l1.value + mahler.bracket + l1.bracket + 1e-9);
        prop_assert!(l1.value <= 1.0 + 1e-9);
    }
}
