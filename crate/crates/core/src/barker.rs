//! Barker predicate and exhaustive search.
//!
//! The search fixes `ε_0 = +1` (quotient by global negation) and fills
//! positions from both ends, `0, n−1, 1, n−2, …`, so that after `t` pairs
//! the high lags `c_{n−t}, …, c_{n−1}` are complete. Partial sums are updated
//! incrementally per placement; with pruning enabled a branch is cut as soon
//! as some lag satisfies `|partial c_k| − (unknown terms of c_k) > 1`.
//! Subtrees are keyed by the signs at the first few positions of the fill
//! order and merged in key order, so results do not depend on `jobs`.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FlatError, Result};
use crate::seq::{parse_signs, SignSequence};
use crate::stats::autocorrelation;

pub const DEFAULT_CAP: usize = 28;

/// Positions (after position 0) whose signs key a subtree.
const SPLIT_DEPTH: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub lag: usize,
    pub value: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BarkerCheck {
    pub is_barker: bool,
    /// Smallest lag with `|c_k| > 1`.
    pub witness: Option<Witness>,
}

pub fn is_barker(seq: &SignSequence) -> BarkerCheck {
    let profile = autocorrelation(seq);
    let witness = profile.c.iter().enumerate().skip(1).find(|(_, c)| c.abs() > 1).map(|(lag, &value)| Witness { lag, value });
    BarkerCheck { is_barker: witness.is_none(), witness }
}

/// Turyn–Storer necessary condition: odd lengths up to 13, lengths up to 2,
/// or `n = 4m²`.
pub fn turyn_storer_admissible(n: usize) -> bool {
    if n <= 2 {
        return true;
    }
    if n % 2 == 1 {
        return n <= 13;
    }
    if !n.is_multiple_of(4) {
        return false;
    }
    let m2 = n / 4;
    let m = (m2 as f64).sqrt().round() as usize;
    (m.saturating_sub(1)..=m + 1).any(|r| r * r == m2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub prune: bool,
    pub jobs: usize,
    pub cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { prune: true, jobs: 1, cap: DEFAULT_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarkerSearchResult {
    pub n: usize,
    pub prune: bool,
    /// Canonical representatives (`ε_0 = +1`), sorted.
    pub found: Vec<SignSequence>,
    pub count: usize,
    /// For each entry of `found`, the index of its reversal's representative.
    pub reversal_of: Vec<usize>,
    /// Classes under negation and reversal together.
    pub reversal_classes: usize,
    pub nodes_explored: u64,
    /// Kept out of serialized reports so that they stay reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

/// Resume state written after each completed batch of subtrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: usize,
    pub prune: bool,
    pub split_depth: usize,
    /// Number of subtrees finished, in key order; the resume token.
    pub completed: usize,
    pub found: Vec<String>,
    pub nodes_explored: u64,
}

struct Search {
    n: usize,
    prune: bool,
    order: Vec<usize>,
    seq: Vec<i8>,
    placed: Vec<usize>,
    partial: Vec<i64>,
    known: Vec<usize>,
    nodes: u64,
    found: Vec<Vec<i8>>,
}

impl Search {
    fn new(n: usize, prune: bool) -> Self {
        let mut order = Vec::with_capacity(n);
        let (mut lo, mut hi) = (0usize, n - 1);
        while lo <= hi {
            order.push(lo);
            if hi != lo {
                order.push(hi);
            }
            lo += 1;
            if hi == 0 {
                break;
            }
            hi -= 1;
        }
        Search {
            n,
            prune,
            order,
            seq: vec![0; n],
            placed: Vec::with_capacity(n),
            partial: vec![0; n],
            known: vec![0; n],
            nodes: 0,
            found: Vec::new(),
        }
    }

    /// Places `v` at `pos`; returns false if pruning rejects the result.
    fn place(&mut self, pos: usize, v: i8) -> bool {
        self.nodes += 1;
        self.seq[pos] = v;
        let mut ok = true;
        for &r in &self.placed {
            let k = pos.abs_diff(r);
            self.partial[k] += (v * self.seq[r]) as i64;
            self.known[k] += 1;
            if self.prune {
                let unknown = (self.n - k - self.known[k]) as i64;
                if self.partial[k].abs() - unknown > 1 {
                    ok = false;
                }
            }
        }
        self.placed.push(pos);
        ok
    }

    fn unplace(&mut self) {
        let pos = self.placed.pop().expect("nonempty");
        let v = self.seq[pos];
        for &r in &self.placed {
            let k = pos.abs_diff(r);
            self.partial[k] -= (v * self.seq[r]) as i64;
            self.known[k] -= 1;
        }
        self.seq[pos] = 0;
    }

    fn leaf(&mut self) {
        if self.partial[1..].iter().all(|c| c.abs() <= 1) {
            self.found.push(self.seq.clone());
        }
    }

    fn dfs(&mut self, depth: usize) {
        if depth == self.n {
            self.leaf();
            return;
        }
        let pos = self.order[depth];
        for v in [1i8, -1] {
            if self.place(pos, v) {
                self.dfs(depth + 1);
            }
            self.unplace();
        }
    }

    /// Runs the subtree whose first `split` fill positions after 0 carry the
    /// signs encoded by `key` (bit `i` set means `−1`, most significant first).
    fn run_subtree(mut self, split: usize, key: usize) -> (Vec<Vec<i8>>, u64) {
        let mut ok = self.place(0, 1);
        for i in 0..split {
            if !ok {
                break;
            }
            let bit = key >> (split - 1 - i) & 1;
            ok = self.place(self.order[1 + i], if bit == 1 { -1 } else { 1 });
        }
        if ok {
            self.dfs(1 + split);
        }
        (self.found, self.nodes)
    }
}

fn split_depth(n: usize) -> usize {
    (n - 1).min(SPLIT_DEPTH)
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(FlatError::InvalidArgument("Barker search needs n >= 1".into()));
    }
    if n > cap {
        return Err(FlatError::ExceedsCap {
            what: "Barker search length",
            requested: n as u64,
            cap: cap as u64,
            hint: "raise the cap explicitly (--cap) if the run time is acceptable",
        });
    }
    Ok(())
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| FlatError::InvalidArgument(format!("cannot start {jobs} workers: {e}")))
}

pub fn search_barker(n: usize, config: SearchConfig) -> Result<BarkerSearchResult> {
    search_barker_resumable(n, config, None)
}

/// [`search_barker`] that records progress in `checkpoint` after every batch
/// of subtrees and resumes from it when the file already exists.
pub fn search_barker_resumable(n: usize, config: SearchConfig, checkpoint: Option<&Path>) -> Result<BarkerSearchResult> {
    check_cap(n, config.cap)?;
    let start = Instant::now();
    let split = split_depth(n);
    let subtrees = 1usize << split;
    let mut state = Checkpoint {
        n,
        prune: config.prune,
        split_depth: split,
        completed: 0,
        found: Vec::new(),
        nodes_explored: 0,
    };
    if let Some(path) = checkpoint {
        if path.exists() {
            let text = std::fs::read_to_string(path)?;
            let saved: Checkpoint =
                serde_json::from_str(&text).map_err(|e| FlatError::Format(format!("checkpoint: {e}")))?;
            if (saved.n, saved.prune, saved.split_depth) != (n, config.prune, split) {
                return Err(FlatError::InvalidArgument(format!(
                    "checkpoint {} belongs to a different search (n={}, prune={})",
                    path.display(),
                    saved.n,
                    saved.prune
                )));
            }
            state = saved;
        }
    }
    let workers = pool(config.jobs)?;
    let batch = match checkpoint {
        Some(_) => (4 * config.jobs.max(1)).min(subtrees),
        None => subtrees,
    };
    while state.completed < subtrees {
        let end = (state.completed + batch).min(subtrees);
        let results: Vec<(Vec<Vec<i8>>, u64)> = workers.install(|| {
            (state.completed..end)
                .into_par_iter()
                .map(|key| Search::new(n, config.prune).run_subtree(split, key))
                .collect()
        });
        for (found, nodes) in results {
            state.nodes_explored += nodes;
            state.found.extend(found.iter().map(|s| SignSequence::new(s.clone()).expect("complete").to_sign_string()));
        }
        state.completed = end;
        if let Some(path) = checkpoint {
            write_checkpoint(path, &state)?;
        }
    }
    let mut found: Vec<SignSequence> = state
        .found
        .iter()
        .map(|s| parse_signs(s))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|s| is_barker(s).is_barker)
        .map(|s| s.canonical())
        .collect();
    found.sort_by_key(|s| s.to_sign_string());
    found.dedup();
    let reversal_of: Vec<usize> = found
        .iter()
        .map(|s| {
            let r = s.reversed().canonical();
            found.iter().position(|x| *x == r).expect("reversal of a Barker sequence is Barker")
        })
        .collect();
    let reversal_classes = reversal_of.iter().enumerate().filter(|&(i, &j)| i <= j).count();
    Ok(BarkerSearchResult {
        n,
        prune: config.prune,
        count: found.len(),
        found,
        reversal_of,
        reversal_classes,
        nodes_explored: state.nodes_explored,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

fn write_checkpoint(path: &Path, state: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let text = serde_json::to_string_pretty(state).map_err(|e| FlatError::Format(e.to_string()))?;
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
