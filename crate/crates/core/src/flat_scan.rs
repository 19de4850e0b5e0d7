//! Extremal search for the smallest sidelobe energy over sign sequences.
//!
//! Up to [`EXHAUSTIVE_CAP`] the search is exhaustive with `ε_0 = +1`; the
//! free positions are walked in Gray-code order so each step flips one sign
//! and updates every `c_k` in O(1). Above the cap a seeded local search is
//! used and labeled as such.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FlatError, Result};
use crate::seq::SignSequence;
use crate::stats::{autocorrelation, MeritFactor, Rational};

pub const EXHAUSTIVE_CAP: usize = 24;
/// Largest `cap` accepted; beyond this an exhaustive scan is out of reach.
pub const EXHAUSTIVE_HARD_LIMIT: usize = 36;
/// Winners beyond this many are counted but not listed.
pub const MAX_LISTED_WINNERS: usize = 64;

const CHUNK_BITS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    MinL4,
    MaxMerit,
}

impl FromStr for Objective {
    type Err = FlatError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min-l4" | "min-L4" => Ok(Objective::MinL4),
            "max-merit" => Ok(Objective::MaxMerit),
            other => Err(FlatError::InvalidArgument(format!("unknown objective '{other}' (min-l4|max-merit)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMethod {
    Exhaustive,
    Stochastic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlatScanConfig {
    pub objective: Objective,
    pub jobs: usize,
    pub cap: usize,
    /// Energy evaluations allowed to the stochastic search.
    pub budget: u64,
    pub seed: u64,
}

impl Default for FlatScanConfig {
    fn default() -> Self {
        FlatScanConfig { objective: Objective::MinL4, jobs: 1, cap: EXHAUSTIVE_CAP, budget: 200_000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatScanResult {
    pub n: usize,
    pub objective: Objective,
    pub method: ScanMethod,
    pub min_sidelobe_energy: i128,
    pub l4_fourth_power: f64,
    pub l4_fourth_power_exact: Rational,
    pub merit_factor: MeritFactor,
    pub merit_factor_exact: Option<Rational>,
    /// Optimal sequences with `ε_0 = +1`, sorted; negations are equally optimal.
    pub winners: Vec<SignSequence>,
    pub winner_count: u64,
    pub evaluated: u64,
    pub seed: Option<u64>,
}

#[derive(Default)]
struct Best {
    energy: i128,
    count: u64,
    winners: Vec<Vec<i8>>,
}

impl Best {
    fn empty() -> Self {
        Best { energy: i128::MAX, count: 0, winners: Vec::new() }
    }

    fn offer(&mut self, energy: i128, seq: &[i8]) {
        if energy < self.energy {
            self.energy = energy;
            self.count = 0;
            self.winners.clear();
        }
        if energy == self.energy {
            self.count += 1;
            if self.winners.len() < MAX_LISTED_WINNERS {
                self.winners.push(seq.to_vec());
            }
        }
    }

    fn merge(mut self, other: Best) -> Best {
        if other.energy < self.energy {
            return other;
        }
        if other.energy == self.energy {
            self.count += other.count;
            for w in other.winners {
                if self.winners.len() < MAX_LISTED_WINNERS {
                    self.winners.push(w);
                }
            }
        }
        self
    }
}

fn correlations(seq: &[i8]) -> Vec<i64> {
    let n = seq.len();
    (0..n).map(|k| (0..n - k).map(|j| (seq[j] * seq[j + k]) as i64).sum()).collect()
}

fn energy(c: &[i64]) -> i128 {
    c.iter().skip(1).map(|&x| (x as i128) * (x as i128)).sum()
}

/// Flips `seq[i]` and updates the correlations in place.
fn flip(seq: &mut [i8], c: &mut [i64], i: usize) {
    let n = seq.len();
    let old = seq[i] as i64;
    for (k, ck) in c.iter_mut().enumerate().skip(1) {
        let mut neighbours = 0i64;
        if i + k < n {
            neighbours += seq[i + k] as i64;
        }
        if i >= k {
            neighbours += seq[i - k] as i64;
        }
        *ck -= 2 * old * neighbours;
    }
    seq[i] = -seq[i];
}

/// Chunk `key` fixes the top `high` positions; the remaining `low` free
/// positions are traversed in Gray-code order.
fn scan_chunk(n: usize, high: usize, key: usize) -> (Best, u64) {
    let low = n - 1 - high;
    let mut seq = vec![1i8; n];
    for b in 0..high {
        if key >> b & 1 == 1 {
            seq[n - 1 - b] = -1;
        }
    }
    let mut c = correlations(&seq);
    let mut best = Best::empty();
    best.offer(energy(&c), &seq);
    let steps = 1u64 << low;
    for step in 1..steps {
        let pos = 1 + step.trailing_zeros() as usize;
        flip(&mut seq, &mut c, pos);
        best.offer(energy(&c), &seq);
    }
    (best, steps)
}

fn exhaustive(n: usize, jobs: usize) -> Result<(Best, u64)> {
    let high = (n - 1).min(CHUNK_BITS);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| FlatError::InvalidArgument(format!("cannot start {jobs} workers: {e}")))?;
    let parts: Vec<(Best, u64)> = pool.install(|| (0..1usize << high).into_par_iter().map(|key| scan_chunk(n, high, key)).collect());
    let mut total = 0;
    let mut best = Best::empty();
    for (b, evaluated) in parts {
        total += evaluated;
        best = best.merge(b);
    }
    Ok((best, total))
}

/// Restarted steepest-descent single-flip search.
fn stochastic(n: usize, budget: u64, seed: u64) -> (Best, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = Best::empty();
    let mut evaluated = 0u64;
    let mut seen: Vec<Vec<i8>> = Vec::new();
    while evaluated < budget {
        let mut seq: Vec<i8> = (0..n).map(|j| if j == 0 || rng.gen::<bool>() { 1 } else { -1 }).collect();
        let mut c = correlations(&seq);
        let mut e = energy(&c);
        evaluated += 1;
        loop {
            let mut step: Option<(usize, i128)> = None;
            for i in 1..n {
                flip(&mut seq, &mut c, i);
                let trial = energy(&c);
                flip(&mut seq, &mut c, i);
                evaluated += 1;
                if trial < step.map_or(e, |s| s.1) {
                    step = Some((i, trial));
                }
            }
            match step {
                Some((i, trial)) if evaluated < budget => {
                    flip(&mut seq, &mut c, i);
                    e = trial;
                }
                _ => break,
            }
        }
        if e < best.energy {
            seen.clear();
        }
        if e <= best.energy && !seen.contains(&seq) {
            seen.push(seq.clone());
            best.offer(e, &seq);
        }
    }
    (best, evaluated)
}

pub fn flat_scan(n: usize, config: FlatScanConfig) -> Result<FlatScanResult> {
    if n == 0 {
        return Err(FlatError::EmptySequence);
    }
    if config.cap > EXHAUSTIVE_HARD_LIMIT {
        return Err(FlatError::ExceedsCap {
            what: "exhaustive flat-scan cap",
            requested: config.cap as u64,
            cap: EXHAUSTIVE_HARD_LIMIT as u64,
            hint: "lengths above the cap use the stochastic search instead",
        });
    }
    let (best, evaluated, method) = if n <= config.cap {
        let (b, e) = exhaustive(n, config.jobs)?;
        (b, e, ScanMethod::Exhaustive)
    } else {
        if config.budget == 0 {
            return Err(FlatError::InvalidArgument("stochastic search needs a positive budget".into()));
        }
        let (b, e) = stochastic(n, config.budget, config.seed);
        (b, e, ScanMethod::Stochastic)
    };
    let mut winners: Vec<SignSequence> =
        best.winners.into_iter().map(|w| SignSequence::new(w).expect("nonempty sign vector")).collect();
    winners.sort_by_key(|s| s.to_sign_string());
    let profile = autocorrelation(&winners[0]);
    debug_assert_eq!(profile.sidelobe_energy, best.energy);
    let (_, merit) = profile.defect_and_merit();
    let exact = profile.l4_fourth_power_exact().expect("sign sequence has c0 > 0");
    Ok(FlatScanResult {
        n,
        objective: config.objective,
        method,
        min_sidelobe_energy: best.energy,
        l4_fourth_power: exact.to_f64(),
        l4_fourth_power_exact: exact,
        merit_factor: merit,
        merit_factor_exact: profile.merit_factor_exact(),
        winners,
        winner_count: best.count,
        evaluated,
        seed: (method == ScanMethod::Stochastic).then_some(config.seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::parse_signs;

    fn brute_min(n: usize) -> i128 {
        (0..1u32 << n)
            .map(|mask| {
                let s: Vec<i8> = (0..n).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect();
                energy(&correlations(&s))
            })
            .min()
            .unwrap()
    }

    #[test]
    fn flip_update_matches_recomputation() {
        let mut seq: Vec<i8> = vec![1, -1, 1, 1, -1, -1, 1];
        let mut c = correlations(&seq);
        for i in [3, 0, 6, 2, 3] {
            flip(&mut seq, &mut c, i);
            assert_eq!(c, correlations(&seq));
        }
    }

    #[test]
    fn small_cases() {
        let r1 = flat_scan(1, FlatScanConfig::default()).unwrap();
        assert_eq!(r1.l4_fourth_power, 1.0);
        assert!(r1.merit_factor.is_infinite());
        let r2 = flat_scan(2, FlatScanConfig::default()).unwrap();
        assert_eq!(r2.l4_fourth_power, 1.5);
        assert_eq!(r2.winner_count, 2);
    }

    #[test]
    fn barker_13_is_optimal() {
        let r = flat_scan(13, FlatScanConfig { jobs: 2, ..Default::default() }).unwrap();
        assert_eq!(r.l4_fourth_power_exact, Rational::new(181, 169));
        assert!(r.winners.contains(&parse_signs("+-+-++--+++++").unwrap().canonical()));
        assert_eq!(r.method, ScanMethod::Exhaustive);
    }

    #[test]
    fn oversized_cap_is_refused() {
        let config = FlatScanConfig { cap: EXHAUSTIVE_HARD_LIMIT + 1, ..FlatScanConfig::default() };
        assert!(flat_scan(10, config).unwrap_err().is_resource_cap());
    }

    #[test]
    fn exhaustive_matches_brute_force() {
        for n in 1..=12 {
            assert_eq!(flat_scan(n, FlatScanConfig::default()).unwrap().min_sidelobe_energy, brute_min(n), "n={n}");
        }
    }

    #[test]
    fn winners_attain_the_minimum() {
        let r = flat_scan(11, FlatScanConfig::default()).unwrap();
        for w in &r.winners {
            assert_eq!(autocorrelation(w).sidelobe_energy, r.min_sidelobe_energy);
            assert_eq!(autocorrelation(&w.negated()).sidelobe_energy, r.min_sidelobe_energy);
        }
    }

    #[test]
    fn stochastic_is_seeded_and_labeled() {
        let config = FlatScanConfig { cap: 10, budget: 20_000, seed: 7, ..Default::default() };
        let a = flat_scan(16, config).unwrap();
        let b = flat_scan(16, config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.method, ScanMethod::Stochastic);
        assert!(a.min_sidelobe_energy >= brute_min(16));
    }

    #[test]
    fn objective_parsing() {
        assert_eq!("max-merit".parse::<Objective>().unwrap(), Objective::MaxMerit);
        assert!("x".parse::<Objective>().is_err());
    }
}
