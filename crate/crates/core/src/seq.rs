//! Coefficient sequences: `±1` sign sequences (Littlewood coefficients) and
//! `0/1` binary sequences (Newman–Bourgain coefficients), plus their text and
//! packed-bitset encodings.
//!
//! Text form uses `+`/`-` for signs and `0`/`1` for bits; whitespace and
//! commas are ignored. The bitset file is an 8-byte little-endian bit count
//! followed by the bits packed least-significant-bit first.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{FlatError, Result};

/// Integer coefficient view shared by sign and binary sequences.
pub trait IntegerSequence {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn value(&self, index: usize) -> i64;

    fn to_i64(&self) -> Vec<i64> {
        (0..self.len()).map(|j| self.value(j)).collect()
    }

    /// Sum of squared coefficients, i.e. the zero-lag autocorrelation.
    fn energy(&self) -> i64 {
        (0..self.len()).map(|j| self.value(j) * self.value(j)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignSequence {
    coeffs: Vec<i8>,
}

impl SignSequence {
    pub fn new(coeffs: Vec<i8>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(FlatError::EmptySequence);
        }
        if let Some((position, &v)) = coeffs.iter().enumerate().find(|(_, &v)| v != 1 && v != -1) {
            return Err(FlatError::InvalidSign { value: v as i64, position });
        }
        Ok(SignSequence { coeffs })
    }

    pub fn from_i64(values: &[i64]) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(values.len());
        for (position, &v) in values.iter().enumerate() {
            match v {
                1 => coeffs.push(1),
                -1 => coeffs.push(-1),
                _ => return Err(FlatError::InvalidSign { value: v, position }),
            }
        }
        SignSequence::new(coeffs)
    }

    /// Sequence from booleans, `true` mapping to `+1`.
    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        SignSequence::new(bits.iter().map(|&b| if b { 1 } else { -1 }).collect())
    }

    pub fn all_plus(q: usize) -> Result<Self> {
        SignSequence::new(vec![1; q])
    }

    /// Littlewood class: first and last coefficients are `+1`.
    pub fn littlewood_class(coeffs: Vec<i8>) -> Result<Self> {
        let seq = SignSequence::new(coeffs)?;
        seq.require_littlewood_class()?;
        Ok(seq)
    }

    pub fn coeffs(&self) -> &[i8] {
        &self.coeffs
    }

    pub fn is_littlewood_class(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[self.coeffs.len() - 1] == 1
    }

    pub fn require_littlewood_class(&self) -> Result<()> {
        if self.is_littlewood_class() {
            Ok(())
        } else {
            Err(FlatError::ClassViolation(format!(
                "Littlewood class needs first and last signs +1, got {:+} and {:+}",
                self.coeffs[0],
                self.coeffs[self.coeffs.len() - 1]
            )))
        }
    }

    pub fn negated(&self) -> SignSequence {
        SignSequence { coeffs: self.coeffs.iter().map(|&v| -v).collect() }
    }

    pub fn reversed(&self) -> SignSequence {
        SignSequence { coeffs: self.coeffs.iter().rev().copied().collect() }
    }

    /// Lexicographically least of `{self, -self}` in `+`/`-` string order,
    /// which is the representative starting with `+1`.
    pub fn canonical(&self) -> SignSequence {
        if self.coeffs[0] == 1 {
            self.clone()
        } else {
            self.negated()
        }
    }

    pub fn ones(&self) -> usize {
        self.coeffs.iter().filter(|&&v| v == 1).count()
    }

    pub fn to_sign_string(&self) -> String {
        self.coeffs.iter().map(|&v| if v == 1 { '+' } else { '-' }).collect()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.coeffs.iter().map(|&v| v == 1).collect()
    }
}

impl IntegerSequence for SignSequence {
    fn len(&self) -> usize {
        self.coeffs.len()
    }

    fn value(&self, index: usize) -> i64 {
        self.coeffs[index] as i64
    }

    fn energy(&self) -> i64 {
        self.coeffs.len() as i64
    }
}

impl fmt::Display for SignSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sign_string())
    }
}

impl Serialize for SignSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_sign_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinarySequence {
    bits: Vec<u8>,
    ones: usize,
}

impl BinarySequence {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(FlatError::EmptySequence);
        }
        if let Some((position, &v)) = bits.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(FlatError::InvalidBit { value: v as i64, position });
        }
        let ones = bits.iter().filter(|&&b| b == 1).count();
        Ok(BinarySequence { bits, ones })
    }

    pub fn from_i64(values: &[i64]) -> Result<Self> {
        let mut bits = Vec::with_capacity(values.len());
        for (position, &v) in values.iter().enumerate() {
            match v {
                0 | 1 => bits.push(v as u8),
                _ => return Err(FlatError::InvalidBit { value: v, position }),
            }
        }
        BinarySequence::new(bits)
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        BinarySequence::new(bits.iter().map(|&b| b as u8).collect())
    }

    /// Indicator of `support` inside `[0, q)`.
    pub fn from_support(support: &[usize], q: usize) -> Result<Self> {
        let mut bits = vec![0u8; q];
        for &j in support {
            if j >= q {
                return Err(FlatError::InvalidArgument(format!("support index {j} outside [0, {q})")));
            }
            bits[j] = 1;
        }
        BinarySequence::new(bits)
    }

    /// Newman–Bourgain class: first and last bits are 1.
    pub fn nb_class(bits: Vec<u8>) -> Result<Self> {
        let seq = BinarySequence::new(bits)?;
        seq.require_nb_class()?;
        Ok(seq)
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Number of ones, `m = |H|`.
    pub fn ones(&self) -> usize {
        self.ones
    }

    /// Support set `H = {j : η_j = 1}` in increasing order.
    pub fn support(&self) -> Vec<usize> {
        self.bits.iter().enumerate().filter(|(_, &b)| b == 1).map(|(j, _)| j).collect()
    }

    pub fn is_nb_class(&self) -> bool {
        self.bits[0] == 1 && self.bits[self.bits.len() - 1] == 1
    }

    pub fn require_nb_class(&self) -> Result<()> {
        if self.is_nb_class() {
            Ok(())
        } else {
            Err(FlatError::ClassViolation(format!(
                "Newman-Bourgain class needs first and last bits 1, got {} and {}",
                self.bits[0],
                self.bits[self.bits.len() - 1]
            )))
        }
    }

    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.bits.iter().map(|&b| b == 1).collect()
    }

    /// `η_j − 1/2`, the balanced version of the bits.
    pub fn centered(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| b as f64 - 0.5).collect()
    }
}

impl IntegerSequence for BinarySequence {
    fn len(&self) -> usize {
        self.bits.len()
    }

    fn value(&self, index: usize) -> i64 {
        self.bits[index] as i64
    }

    fn energy(&self) -> i64 {
        self.ones as i64
    }
}

impl fmt::Display for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl Serialize for BinarySequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_bit_string())
    }
}

/// A sequence read from text: its alphabet decides the kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedSequence {
    Signs(SignSequence),
    Bits(BinarySequence),
}

impl ParsedSequence {
    pub fn len(&self) -> usize {
        match self {
            ParsedSequence::Signs(s) => s.len(),
            ParsedSequence::Bits(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sign view; bits map through `ε = 2η − 1`.
    pub fn to_signs(&self) -> SignSequence {
        match self {
            ParsedSequence::Signs(s) => s.clone(),
            ParsedSequence::Bits(b) => SignSequence::from_bools(&b.to_bools()).expect("nonempty"),
        }
    }
}

/// Parses `+`/`-` or `0`/`1` text. Whitespace and commas are skipped; mixing
/// the two alphabets is an error.
pub fn parse_sequence(text: &str) -> Result<ParsedSequence> {
    let mut signs = Vec::new();
    let mut bits = Vec::new();
    for (position, ch) in text.chars().enumerate() {
        match ch {
            '+' => signs.push(1i8),
            '-' => signs.push(-1i8),
            '0' => bits.push(0u8),
            '1' => bits.push(1u8),
            c if c.is_whitespace() || c == ',' => {}
            symbol => return Err(FlatError::InvalidSymbol { symbol, position }),
        }
        if !signs.is_empty() && !bits.is_empty() {
            return Err(FlatError::InvalidSymbol { symbol: ch, position });
        }
    }
    if !signs.is_empty() {
        Ok(ParsedSequence::Signs(SignSequence::new(signs)?))
    } else if !bits.is_empty() {
        Ok(ParsedSequence::Bits(BinarySequence::new(bits)?))
    } else {
        Err(FlatError::EmptySequence)
    }
}

pub fn parse_signs(text: &str) -> Result<SignSequence> {
    match parse_sequence(text)? {
        ParsedSequence::Signs(s) => Ok(s),
        ParsedSequence::Bits(_) => Err(FlatError::Format("expected a +/- sign string".into())),
    }
}

/// Packs bits as `u64` little-endian count followed by LSB-first bytes.
pub fn encode_bitset(bits: &[bool]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + bits.len().div_ceil(8));
    out.extend_from_slice(&(bits.len() as u64).to_le_bytes());
    for chunk in bits.chunks(8) {
        let byte = chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b as u8) << i));
        out.push(byte);
    }
    out
}

pub fn decode_bitset(bytes: &[u8]) -> Result<Vec<bool>> {
    if bytes.len() < 8 {
        return Err(FlatError::Format("bitset shorter than its 8-byte header".into()));
    }
    let count = u64::from_le_bytes(bytes[..8].try_into().unwrap());
    let count = usize::try_from(count).map_err(|_| FlatError::Format("bit count overflows usize".into()))?;
    let payload = &bytes[8..];
    if payload.len() != count.div_ceil(8) {
        return Err(FlatError::Format(format!(
            "bitset header announces {count} bits but payload has {} bytes",
            payload.len()
        )));
    }
    Ok((0..count).map(|j| payload[j / 8] >> (j % 8) & 1 == 1).collect())
}

/// Uniform random signs from ChaCha8 seeded with `seed` on stream `stream`.
pub fn random_signs(n: usize, seed: u64, stream: u64) -> Result<SignSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    SignSequence::new((0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect())
}

/// [`random_signs`] with the first and last signs forced to `+1`.
pub fn random_littlewood(n: usize, seed: u64, stream: u64) -> Result<SignSequence> {
    let mut coeffs = random_signs(n, seed, stream)?.coeffs;
    coeffs[0] = 1;
    coeffs[n - 1] = 1;
    Ok(SignSequence { coeffs })
}
