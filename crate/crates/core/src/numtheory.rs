//! Liouville and Möbius tables, partial-sum scans, Chowla correlations and
//! moment experiments for random and arithmetic coefficient polynomials.

use std::io::{Read, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FlatError, Result};
use crate::poly::{
    evaluate_at_roots_aliased, integer_polynomial_norm, l4_power_exact, lp_norm_estimate, NormRoute, NormRow,
    NormalizedPolynomial, REPORT_OVERSAMPLE,
};
use crate::stats::null_band;

/// Largest supported sieve bound; memory use is about 11 bytes per entry.
pub const SIEVE_CAP: usize = 1 << 30;
pub const TABLE_MAGIC: &[u8; 4] = b"FLSV";
pub const TABLE_VERSION: u32 = 1;
pub const MIN_TRIALS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Mu,
    Lambda,
}

impl FromStr for Arithmetic {
    type Err = FlatError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mu" | "mobius" | "möbius" => Ok(Arithmetic::Mu),
            "lambda" | "liouville" => Ok(Arithmetic::Lambda),
            other => Err(FlatError::InvalidArgument(format!("unknown function '{other}' (mu|lambda)"))),
        }
    }
}

/// `λ(n)` and `μ(n)` for `1 ≤ n ≤ N` with their prefix sums. Index 0 is
/// unused and holds zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveTable {
    n: usize,
    lambda: Vec<i8>,
    mu: Vec<i8>,
    mertens: Vec<i32>,
    lambda_sum: Vec<i32>,
}

impl SieveTable {
    /// Linear sieve over the smallest prime factor.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(FlatError::InvalidArgument("sieve bound must be at least 1".into()));
        }
        if n > SIEVE_CAP {
            return Err(FlatError::ExceedsCap {
                what: "sieve bound",
                requested: n as u64,
                cap: SIEVE_CAP as u64,
                hint: "the linear sieve keeps the whole table in memory",
            });
        }
        let mut lambda = vec![0i8; n + 1];
        let mut mu = vec![0i8; n + 1];
        let mut composite = vec![false; n + 1];
        let mut primes: Vec<usize> = Vec::new();
        lambda[1] = 1;
        mu[1] = 1;
        for i in 2..=n {
            if !composite[i] {
                primes.push(i);
                lambda[i] = -1;
                mu[i] = -1;
            }
            for &p in &primes {
                let Some(ip) = i.checked_mul(p).filter(|&v| v <= n) else { break };
                composite[ip] = true;
                lambda[ip] = -lambda[i];
                if i % p == 0 {
                    mu[ip] = 0;
                    break;
                }
                mu[ip] = -mu[i];
            }
        }
        Ok(Self::from_values(lambda, mu))
    }

    fn from_values(lambda: Vec<i8>, mu: Vec<i8>) -> Self {
        let n = lambda.len() - 1;
        let prefix = |v: &[i8]| {
            let mut acc = 0i32;
            let mut out = Vec::with_capacity(v.len());
            out.push(0);
            for &x in &v[1..] {
                acc += x as i32;
                out.push(acc);
            }
            out
        };
        let mertens = prefix(&mu);
        let lambda_sum = prefix(&lambda);
        SieveTable { n, lambda, mu, mertens, lambda_sum }
    }

    pub fn bound(&self) -> usize {
        self.n
    }

    fn check(&self, k: usize) {
        assert!((1..=self.n).contains(&k), "index {k} outside 1..={}", self.n);
    }

    pub fn lambda(&self, k: usize) -> i8 {
        self.check(k);
        self.lambda[k]
    }

    pub fn mu(&self, k: usize) -> i8 {
        self.check(k);
        self.mu[k]
    }

    /// `λ(1..=N)`.
    pub fn lambda_values(&self) -> &[i8] {
        &self.lambda[1..]
    }

    /// `μ(1..=N)`.
    pub fn mu_values(&self) -> &[i8] {
        &self.mu[1..]
    }

    pub fn values(&self, which: Arithmetic) -> &[i8] {
        match which {
            Arithmetic::Mu => self.mu_values(),
            Arithmetic::Lambda => self.lambda_values(),
        }
    }

    /// `M(x) = Σ_{k≤x} μ(k)`; `M(0) = 0`.
    pub fn mertens(&self, x: usize) -> i64 {
        self.mertens[x] as i64
    }

    /// `L(x) = Σ_{k≤x} λ(k)`; `L(0) = 0`.
    pub fn lambda_sum(&self, x: usize) -> i64 {
        self.lambda_sum[x] as i64
    }

    pub fn partial_sum(&self, which: Arithmetic, x: usize) -> i64 {
        match which {
            Arithmetic::Mu => self.mertens(x),
            Arithmetic::Lambda => self.lambda_sum(x),
        }
    }

    pub fn squarefree_count(&self) -> usize {
        self.mu_values().iter().filter(|&&m| m != 0).count()
    }

    /// Magic, version, `N`, λ as bits (1 = +1), μ as 2-bit codes
    /// (`00` = 0, `01` = +1, `10` = −1), all little-endian and LSB-first.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(TABLE_MAGIC)?;
        out.write_all(&TABLE_VERSION.to_le_bytes())?;
        out.write_all(&(self.n as u64).to_le_bytes())?;
        let mut bits = vec![0u8; self.n.div_ceil(8)];
        for (i, &l) in self.lambda_values().iter().enumerate() {
            if l == 1 {
                bits[i / 8] |= 1 << (i % 8);
            }
        }
        out.write_all(&bits)?;
        let mut codes = vec![0u8; self.n.div_ceil(4)];
        for (i, &m) in self.mu_values().iter().enumerate() {
            let code = match m {
                0 => 0u8,
                1 => 1,
                _ => 2,
            };
            codes[i / 4] |= code << (2 * (i % 4));
        }
        out.write_all(&codes)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut header = [0u8; 16];
        input.read_exact(&mut header).map_err(|_| FlatError::Format("sieve table header truncated".into()))?;
        if &header[..4] != TABLE_MAGIC {
            return Err(FlatError::Format("not a sieve table (bad magic)".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes"));
        if version != TABLE_VERSION {
            return Err(FlatError::Format(format!("unsupported sieve table version {version}")));
        }
        let n64 = u64::from_le_bytes(header[8..16].try_into().expect("8 bytes"));
        if n64 == 0 || n64 > SIEVE_CAP as u64 {
            return Err(FlatError::Format(format!("sieve table bound {n64} out of range")));
        }
        let n = n64 as usize;
        let mut bits = vec![0u8; n.div_ceil(8)];
        let mut codes = vec![0u8; n.div_ceil(4)];
        input.read_exact(&mut bits).map_err(|_| FlatError::Format("λ section truncated".into()))?;
        input.read_exact(&mut codes).map_err(|_| FlatError::Format("μ section truncated".into()))?;
        let mut lambda = vec![0i8; n + 1];
        let mut mu = vec![0i8; n + 1];
        for i in 0..n {
            lambda[i + 1] = if bits[i / 8] >> (i % 8) & 1 == 1 { 1 } else { -1 };
            mu[i + 1] = match codes[i / 4] >> (2 * (i % 4)) & 3 {
                0 => 0,
                1 => 1,
                2 => -1,
                _ => return Err(FlatError::Format(format!("invalid μ code at n = {}", i + 1))),
            };
            if mu[i + 1] != 0 && mu[i + 1] != lambda[i + 1] {
                return Err(FlatError::Format(format!("μ and λ disagree at squarefree n = {}", i + 1)));
            }
        }
        Ok(Self::from_values(lambda, mu))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundPoint {
    pub x: usize,
    pub partial_sum: i64,
    /// `|S(x)| / x^{1/2+ε}`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundScan {
    pub which: Arithmetic,
    pub epsilon: f64,
    /// The scan covers `1 ≤ x ≤ range_end` only.
    pub range_end: usize,
    pub checkpoints: Vec<BoundPoint>,
    pub max_ratio: f64,
}

/// Ratios at `x = ⌊N·2^{−k}⌋`, `k = 0, 1, …`, listed in increasing order.
pub fn rh_bound_scan(table: &SieveTable, which: Arithmetic, epsilon: f64) -> Result<BoundScan> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(FlatError::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let mut xs = Vec::new();
    let mut x = table.bound();
    while x >= 1 {
        xs.push(x);
        x /= 2;
    }
    xs.reverse();
    let checkpoints: Vec<BoundPoint> = xs
        .into_iter()
        .map(|x| {
            let s = table.partial_sum(which, x);
            BoundPoint { x, partial_sum: s, ratio: s.abs() as f64 / (x as f64).powf(0.5 + epsilon) }
        })
        .collect();
    let max_ratio = checkpoints.iter().map(|p| p.ratio).fold(0.0, f64::max);
    Ok(BoundScan { which, epsilon, range_end: table.bound(), checkpoints, max_ratio })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChowlaResult {
    pub offsets: Vec<usize>,
    pub window: usize,
    /// `(1/N) Σ_{n≤N} Π_i λ(n + a_i)`.
    pub value: f64,
    pub band: f64,
    pub within_band: bool,
}

pub fn chowla_correlation(table: &SieveTable, offsets: &[usize], window: usize) -> Result<ChowlaResult> {
    if offsets.is_empty() {
        return Err(FlatError::InvalidArgument("at least one offset is required".into()));
    }
    if window == 0 {
        return Err(FlatError::EmptySequence);
    }
    let reach = window + offsets.iter().max().expect("nonempty");
    if reach > table.bound() {
        return Err(FlatError::Window { window: reach, available: table.bound() });
    }
    let sum: i64 = (1..=window)
        .into_par_iter()
        .map(|n| offsets.iter().map(|&a| table.lambda[n + a] as i64).product::<i64>())
        .sum();
    let value = sum as f64 / window as f64;
    let band = null_band(window);
    Ok(ChowlaResult { offsets: offsets.to_vec(), window, value, band, within_band: value.abs() <= band })
}

/// Norms of `(1/√N) Σ_{j=1}^{N} f(j) z^{j−1}` for `f = μ` or `λ`; the shift by
/// `z` does not change any norm.
pub fn arithmetic_polynomial_norms(table: &SieveTable, which: Arithmetic, n: usize, alphas: &[f64]) -> Result<Vec<NormRow>> {
    if n == 0 {
        return Err(FlatError::EmptySequence);
    }
    if n > table.bound() {
        return Err(FlatError::Window { window: n, available: table.bound() });
    }
    let values: Vec<i64> = table.values(which)[..n].iter().map(|&v| v as i64).collect();
    alphas.iter().map(|&alpha| integer_polynomial_norm(&values, n as f64, alpha)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentModel {
    RandomSign,
    LambdaShifted,
}

impl FromStr for MomentModel {
    type Err = FlatError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-sign" | "random" => Ok(MomentModel::RandomSign),
            "lambda-shifted" | "lambda" => Ok(MomentModel::LambdaShifted),
            other => Err(FlatError::InvalidArgument(format!("unknown model '{other}' (random-sign|lambda-shifted)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentConfig {
    pub model: MomentModel,
    pub n: usize,
    pub trials: usize,
    pub p: u32,
    pub seed: u64,
    pub jobs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentResult {
    pub model: MomentModel,
    pub n: usize,
    pub trials: usize,
    pub p: u32,
    pub seed: u64,
    pub route: NormRoute,
    pub mean: f64,
    pub stderr: f64,
    /// `Γ(p/2 + 1)`.
    pub target: f64,
    /// Finite-`N` expectation when known in closed form.
    pub exact_expectation: Option<f64>,
    /// `(mean − exact_expectation) / stderr`.
    pub z_score: Option<f64>,
    /// Largest refinement bracket over the draws (quadrature route only).
    pub max_bracket: f64,
}

/// The generator for trial `t`: ChaCha8 seeded with `seed`, stream `t`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn draw(config: &MomentConfig, table: Option<&SieveTable>, trial: usize) -> Vec<i64> {
    let mut rng = trial_rng(config.seed, trial);
    match config.model {
        MomentModel::RandomSign => (0..config.n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect(),
        MomentModel::LambdaShifted => {
            let table = table.expect("checked by caller");
            let start = rng.gen_range(1..=table.bound() - config.n + 1);
            table.lambda[start..start + config.n].iter().map(|&v| v as i64).collect()
        }
    }
}

fn moment_value(values: &[i64], p: u32) -> Result<(f64, NormRoute, f64)> {
    let n = values.len();
    match p {
        2 => {
            let energy: i64 = values.iter().map(|v| v * v).sum();
            Ok((energy as f64 / n as f64, NormRoute::Energy, 0.0))
        }
        4 => Ok((l4_power_exact(values, n as f64), NormRoute::Autocorrelation, 0.0)),
        _ if p.is_multiple_of(2) => {
            // |P|^p = |P^{p/2}|^2 and P^{p/2} has degree (p/2)(N−1).
            let degree = (p as usize / 2) * (n - 1);
            let m = (degree + 1).next_power_of_two();
            let poly = NormalizedPolynomial::from_integers(values, 1.0 / (n as f64).sqrt())?;
            let grid = evaluate_at_roots_aliased(&poly, m, false)?;
            Ok((grid.mean_power(p as f64), NormRoute::ExactGrid, 0.0))
        }
        _ => {
            let poly = NormalizedPolynomial::from_integers(values, 1.0 / (n as f64).sqrt())?;
            let est = lp_norm_estimate(&poly, p as f64, REPORT_OVERSAMPLE)?;
            Ok((est.value, NormRoute::Quadrature, est.bracket))
        }
    }
}

/// `Γ(p/2 + 1)`; exact factorial for even `p`.
pub fn moment_target(p: u32) -> f64 {
    if p.is_multiple_of(2) {
        (1..=p / 2).map(f64::from).product()
    } else {
        statrs::function::gamma::gamma(p as f64 / 2.0 + 1.0)
    }
}

/// Monte-Carlo mean of `∫|P|^p` over `trials` independent draws. Odd `p`
/// falls back to quadrature, which is signaled by the `route` field.
pub fn moment_experiment(config: MomentConfig, table: Option<&SieveTable>) -> Result<MomentResult> {
    if config.n == 0 {
        return Err(FlatError::EmptySequence);
    }
    if config.p == 0 {
        return Err(FlatError::NonPositiveExponent(0.0));
    }
    if config.trials < MIN_TRIALS {
        return Err(FlatError::InvalidArgument(format!("need at least {MIN_TRIALS} trials, got {}", config.trials)));
    }
    if config.model == MomentModel::LambdaShifted {
        let table = table.ok_or_else(|| FlatError::InvalidArgument("the lambda-shifted model needs a sieve table".into()))?;
        if table.bound() < config.n {
            return Err(FlatError::Window { window: config.n, available: table.bound() });
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| FlatError::InvalidArgument(format!("cannot start {} workers: {e}", config.jobs)))?;
    let draws: Vec<(f64, NormRoute, f64)> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| moment_value(&draw(&config, table, t), config.p))
            .collect::<Result<_>>()
    })?;
    let t = config.trials as f64;
    let mean = draws.iter().map(|d| d.0).sum::<f64>() / t;
    let var = draws.iter().map(|d| (d.0 - mean).powi(2)).sum::<f64>() / (t - 1.0);
    let stderr = (var / t).sqrt();
    let nf = config.n as f64;
    let exact_expectation = match (config.model, config.p) {
        (_, 2) => Some(1.0),
        (MomentModel::RandomSign, 4) => Some(2.0 - 1.0 / nf),
        _ => None,
    };
    let z_score = exact_expectation.filter(|_| stderr > 0.0).map(|e| (mean - e) / stderr);
    Ok(MomentResult {
        model: config.model,
        n: config.n,
        trials: config.trials,
        p: config.p,
        seed: config.seed,
        route: draws[0].1,
        mean,
        stderr,
        target: moment_target(config.p),
        exact_expectation,
        z_score,
        max_bracket: draws.iter().map(|d| d.2).fold(0.0, f64::max),
    })
}
