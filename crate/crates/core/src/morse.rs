//! Block algebra and generalized Morse sequences.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{FlatError, Result};
use crate::poly::{flatness_report, FlatnessReport};
use crate::seq::{parse_signs, SignSequence};

/// Nonempty ±1 block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MorseBlock {
    entries: Vec<i8>,
}

impl MorseBlock {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        Ok(MorseBlock { entries: SignSequence::new(entries)?.coeffs().to_vec() })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(MorseBlock { entries: parse_signs(text)?.coeffs().to_vec() })
    }

    /// Comma-separated sign strings, e.g. `"+-,++,+-"`.
    pub fn parse_list(text: &str) -> Result<Vec<Self>> {
        let blocks: Vec<Self> = text.split(',').filter(|s| !s.trim().is_empty()).map(Self::parse).collect::<Result<_>>()?;
        if blocks.is_empty() {
            return Err(FlatError::EmptySequence);
        }
        Ok(blocks)
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_signs(&self) -> SignSequence {
        SignSequence::new(self.entries.clone()).expect("blocks are nonempty")
    }
}

impl fmt::Display for MorseBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_signs().fmt(f)
    }
}

impl Serialize for MorseBlock {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `C` followed by `D`.
pub fn block_concat(c: &MorseBlock, d: &MorseBlock) -> MorseBlock {
    let mut entries = c.entries.clone();
    entries.extend_from_slice(&d.entries);
    MorseBlock { entries }
}

/// `(C × D)[s + t·k] = C[s]·D[t]` where `k = |C|`.
pub fn block_product(c: &MorseBlock, d: &MorseBlock) -> MorseBlock {
    let entries = d.entries.iter().flat_map(|&dt| c.entries.iter().map(move |&cs| cs * dt)).collect();
    MorseBlock { entries }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorsePrefix {
    /// Factors actually multiplied, in order.
    pub factors: Vec<MorseBlock>,
    pub sequence: SignSequence,
    /// Length after each product step, `Π_{i≤p} k_i`.
    pub boundaries: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Left-folds `B_1 × B_2 × ⋯`, cycling through `factors` when needed, until the
/// product has at least `min_length` entries.
pub fn morse_prefix(factors: &[MorseBlock], min_length: usize) -> Result<MorsePrefix> {
    if factors.is_empty() {
        return Err(FlatError::InvalidArgument("at least one Morse factor is required".into()));
    }
    if let Some(index) = factors.iter().position(|b| b.entries[0] != 1) {
        return Err(FlatError::MorseCondition { index });
    }
    if min_length > 1 && factors.iter().all(|b| b.len() == 1) {
        return Err(FlatError::InvalidArgument("length-1 factors cannot reach the requested length".into()));
    }
    let mut warnings = Vec::new();
    for (i, b) in factors.iter().enumerate() {
        if b.len() == 1 {
            warnings.push(format!("factor {i} has length 1 and acts as the identity"));
        }
    }
    let mut acc = factors[0].clone();
    let mut used = vec![factors[0].clone()];
    let mut boundaries = vec![acc.len()];
    let mut i = 1;
    while acc.len() < min_length {
        let f = &factors[i % factors.len()];
        acc = block_product(&acc, f);
        used.push(f.clone());
        boundaries.push(acc.len());
        i += 1;
    }
    Ok(MorsePrefix { factors: used, sequence: acc.to_signs(), boundaries, warnings })
}

/// First `n` Thue–Morse signs, `(−1)^{popcount(j)}`.
pub fn thue_morse(n: usize) -> Vec<i8> {
    (0..n).map(|j| if j.count_ones() % 2 == 0 { 1 } else { -1 }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorseScanEntry {
    pub length: usize,
    /// Whether `length` is one of the product lengths `Π_{i≤p} k_i`.
    pub is_full_product: bool,
    pub report: FlatnessReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorseScan {
    pub entries: Vec<MorseScanEntry>,
    /// ‖P‖₄⁴ strictly increases along the requested lengths.
    pub l4_strictly_increasing: bool,
    /// Last ‖P‖₄⁴ is further from 1 than the first.
    pub trending_away_from_one: bool,
}

pub fn morse_flatness_scan(factors: &[MorseBlock], lengths: &[usize]) -> Result<MorseScan> {
    if lengths.is_empty() {
        return Err(FlatError::InvalidArgument("no prefix lengths requested".into()));
    }
    if lengths.contains(&0) {
        return Err(FlatError::EmptySequence);
    }
    let max = *lengths.iter().max().expect("nonempty");
    let prefix = morse_prefix(factors, max)?;
    let coeffs = prefix.sequence.coeffs();
    let entries: Vec<MorseScanEntry> = lengths
        .par_iter()
        .map(|&length| {
            let seq = SignSequence::new(coeffs[..length].to_vec())?;
            Ok(MorseScanEntry {
                length,
                is_full_product: prefix.boundaries.contains(&length),
                report: flatness_report(&seq)?,
            })
        })
        .collect::<Result<_>>()?;
    let l4: Vec<f64> = entries.iter().map(|e| e.report.l4_fourth_power).collect();
    Ok(MorseScan {
        l4_strictly_increasing: l4.windows(2).all(|w| w[1] > w[0]),
        trending_away_from_one: (l4[l4.len() - 1] - 1.0).abs() > (l4[0] - 1.0).abs(),
        entries,
    })
}
