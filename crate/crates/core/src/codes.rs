//! Bit strings and the variable-length codes that labels are built from.
//!
//! Every label in this workspace is a plain bit string ([`BitLabel`]).  Labels
//! are assembled from parts with a self-delimiting *frame*
//!
//! ```text
//! ⟨s1, …, sp⟩ = γ(p+1) · γ(|s1|+1) · … · γ(|sp|+1) · s1 · … · sp
//! ```
//!
//! where `γ` is the Elias gamma code.  Integers inside parts are written with
//! [`bin`], the shortest binary representation (so `bin(0)` is the empty
//! string).  The module also provides weight normalisation
//! ([`nice_weights`]) and a weight-balanced alphabetic prefix code
//! ([`AlphabeticCode`]).

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Errors raised while decoding bit strings or building codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("bit string ended before the code was complete")]
    Truncated,
    #[error("gamma code longer than 64 significant bits")]
    GammaOverflow,
    #[error("binary field has {0} bits, more than fit in 64")]
    BinOverflow(usize),
    #[error("binary field has a leading zero")]
    NonCanonicalBin,
    #[error("frame has {0} trailing bits")]
    TrailingBits(usize),
    #[error("frame declares {declared} parts, expected {expected}")]
    PartCount { declared: usize, expected: usize },
    #[error("weight function over an empty set")]
    EmptySet,
    #[error("weight at index {0} is not positive")]
    NonPositiveWeight(usize),
    #[error("weight at index {0} is not finite")]
    NonFiniteWeight(usize),
    #[error("weight sum overflows")]
    WeightOverflow,
    #[error("invalid hex digit {0:?}")]
    BadHex(char),
    #[error("hex string has {digits} digits but length {len} needs {needed}")]
    HexLength {
        len: usize,
        digits: usize,
        needed: usize,
    },
    #[error("invalid bit character {0:?}")]
    BadBitChar(char),
    #[error("value {0} is too large for this field")]
    ValueTooLarge(u64),
}

/// An immutable-by-convention bit string, most significant bit first.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitLabel(Vec<bool>);

impl BitLabel {
    pub fn new() -> Self {
        BitLabel(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitLabel(bits)
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self, CodeError> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(CodeError::BadBitChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitLabel)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, bits: &[bool]) {
        self.0.extend_from_slice(bits);
    }

    /// Flips the bit at `index`.
    pub fn flip(&mut self, index: usize) {
        self.0[index] = !self.0[index];
    }

    /// Hex rendering used by the JSON form: bit 0 is the most significant bit
    /// of the first digit, the last digit is zero-padded.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.0.len().div_ceil(4));
        for chunk in self.0.chunks(4) {
            let mut nibble = 0u32;
            for (j, &b) in chunk.iter().enumerate() {
                if b {
                    nibble |= 1 << (3 - j);
                }
            }
            out.push(char::from_digit(nibble, 16).expect("nibble < 16"));
        }
        out
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<Self, CodeError> {
        let needed = len.div_ceil(4);
        let digits = hex.chars().count();
        if digits != needed {
            return Err(CodeError::HexLength {
                len,
                digits,
                needed,
            });
        }
        let mut bits = Vec::with_capacity(len);
        for c in hex.chars() {
            let nibble = c.to_digit(16).ok_or(CodeError::BadHex(c))?;
            for j in 0..4 {
                if bits.len() < len {
                    bits.push(nibble & (1 << (3 - j)) != 0);
                }
            }
        }
        Ok(BitLabel(bits))
    }
}

impl Deref for BitLabel {
    type Target = [bool];
    fn deref(&self) -> &[bool] {
        &self.0
    }
}

impl AsRef<[bool]> for BitLabel {
    fn as_ref(&self) -> &[bool] {
        &self.0
    }
}

impl From<&[bool]> for BitLabel {
    fn from(bits: &[bool]) -> Self {
        BitLabel(bits.to_vec())
    }
}

impl fmt::Display for BitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitLabel({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct HexForm {
    len: usize,
    hex: String,
}

impl Serialize for BitLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        HexForm {
            len: self.0.len(),
            hex: self.to_hex(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let form = HexForm::deserialize(deserializer)?;
        BitLabel::from_hex(form.len, &form.hex).map_err(serde::de::Error::custom)
    }
}

/// Renders a bit slice as a `0`/`1` string (empty slice renders as `ε`).
pub fn bit_string(bits: &[bool]) -> String {
    BitLabel::from(bits).to_string()
}

fn bit_length(x: u128) -> usize {
    (128 - x.leading_zeros()) as usize
}

/// Elias gamma code of `x ≥ 1`: `⌊log x⌋` zeros followed by the binary form.
pub fn elias_gamma(x: u64) -> BitLabel {
    assert!(x >= 1, "gamma code is defined for positive integers");
    let mut out = BitLabel::new();
    push_gamma(&mut out.0, x - 1);
    out
}

/// Appends `γ(x+1)`, the gamma code shifted so that zero is encodable.
pub fn push_gamma(out: &mut Vec<bool>, x: u64) {
    let v = x as u128 + 1;
    let len = bit_length(v);
    out.extend(std::iter::repeat(false).take(len - 1));
    for j in (0..len).rev() {
        out.push(v >> j & 1 == 1);
    }
}

/// Length of `γ(x+1)`.
pub fn gamma_len(x: u64) -> usize {
    2 * bit_length(x as u128 + 1) - 1
}

/// Reads `γ(x+1)` starting at `*pos` and returns `x`.
pub fn read_gamma(bits: &[bool], pos: &mut usize) -> Result<u64, CodeError> {
    let mut zeros = 0usize;
    loop {
        match bits.get(*pos + zeros) {
            None => return Err(CodeError::Truncated),
            Some(true) => break,
            Some(false) => {
                zeros += 1;
                if zeros > 64 {
                    return Err(CodeError::GammaOverflow);
                }
            }
        }
    }
    let start = *pos + zeros;
    let end = start + zeros + 1;
    if end > bits.len() {
        return Err(CodeError::Truncated);
    }
    let mut v: u128 = 0;
    for &b in &bits[start..end] {
        v = v << 1 | b as u128;
    }
    *pos = end;
    u64::try_from(v - 1).map_err(|_| CodeError::GammaOverflow)
}

/// Shortest binary representation of `d` (`⌈log(d+1)⌉` bits; `bin(0) = ε`).
pub fn bin(d: u64) -> BitLabel {
    let mut out = BitLabel::new();
    push_bin(&mut out.0, d);
    out
}

pub fn push_bin(out: &mut Vec<bool>, d: u64) {
    let len = bit_length(d as u128);
    for j in (0..len).rev() {
        out.push(d >> j & 1 == 1);
    }
}

/// Decodes a whole slice written by [`bin`]; rejects leading zeros.
pub fn read_bin(bits: &[bool]) -> Result<u64, CodeError> {
    if bits.len() > 64 {
        return Err(CodeError::BinOverflow(bits.len()));
    }
    if bits.first() == Some(&false) {
        return Err(CodeError::NonCanonicalBin);
    }
    Ok(bits.iter().fold(0u64, |acc, &b| acc << 1 | b as u64))
}

/// Decodes a [`bin`] field that must fit in `usize`.
pub fn read_bin_usize(bits: &[bool]) -> Result<usize, CodeError> {
    let v = read_bin(bits)?;
    usize::try_from(v).map_err(|_| CodeError::ValueTooLarge(v))
}

/// Appends `value` in exactly `width` bits.
pub fn push_fixed(out: &mut Vec<bool>, value: u64, width: usize) {
    debug_assert!(width >= 64 || value < 1u64 << width);
    for j in (0..width).rev() {
        out.push(j < 64 && value >> j & 1 == 1);
    }
}

/// Reads a fixed-width field.
pub fn read_fixed(bits: &[bool]) -> Result<u64, CodeError> {
    if bits.len() > 64 {
        return Err(CodeError::BinOverflow(bits.len()));
    }
    Ok(bits.iter().fold(0u64, |acc, &b| acc << 1 | b as u64))
}

/// Concatenates parts into the frame `⟨s1,…,sp⟩`.
pub fn frame<P: AsRef<[bool]>>(parts: &[P]) -> BitLabel {
    let payload: usize = parts.iter().map(|p| p.as_ref().len()).sum();
    let mut out = Vec::with_capacity(payload + 8 * (parts.len() + 1));
    push_gamma(&mut out, parts.len() as u64);
    for p in parts {
        push_gamma(&mut out, p.as_ref().len() as u64);
    }
    for p in parts {
        out.extend_from_slice(p.as_ref());
    }
    BitLabel(out)
}

/// Number of bits the frame adds on top of the payload.
pub fn frame_overhead(part_lengths: &[usize]) -> usize {
    gamma_len(part_lengths.len() as u64)
        + part_lengths
            .iter()
            .map(|&l| gamma_len(l as u64))
            .sum::<usize>()
}

/// Splits a frame into its parts.  The frame must cover `bits` exactly.
pub fn unframe(bits: &[bool]) -> Result<Vec<&[bool]>, CodeError> {
    let mut pos = 0;
    let count = read_gamma(bits, &mut pos)?;
    // Every part costs at least one header bit, which bounds a sane count.
    if count > bits.len() as u64 {
        return Err(CodeError::Truncated);
    }
    let mut lengths = Vec::with_capacity(count as usize);
    for _ in 0..count {
        lengths.push(read_gamma(bits, &mut pos)?);
    }
    let mut parts = Vec::with_capacity(lengths.len());
    for len in lengths {
        let len = usize::try_from(len).map_err(|_| CodeError::Truncated)?;
        let end = pos.checked_add(len).ok_or(CodeError::Truncated)?;
        if end > bits.len() {
            return Err(CodeError::Truncated);
        }
        parts.push(&bits[pos..end]);
        pos = end;
    }
    if pos != bits.len() {
        return Err(CodeError::TrailingBits(bits.len() - pos));
    }
    Ok(parts)
}

/// [`unframe`] for a frame with a known number of parts.
pub fn unframe_exact<const N: usize>(bits: &[bool]) -> Result<[&[bool]; N], CodeError> {
    let parts = unframe(bits)?;
    let declared = parts.len();
    parts.try_into().map_err(|_| CodeError::PartCount {
        declared,
        expected: N,
    })
}

/// Frame of `bin` fields.
pub fn frame_uints(values: &[u64]) -> BitLabel {
    let parts: Vec<BitLabel> = values.iter().map(|&v| bin(v)).collect();
    frame(&parts)
}

pub fn unframe_uints(bits: &[bool]) -> Result<Vec<u64>, CodeError> {
    unframe(bits)?.into_iter().map(read_bin).collect()
}

/// Normalises positive integer weights so that every weight is at least the
/// average weight of the original function (after dividing by the minimum).
///
/// `ω′(x) = ⌈max(ω(S)/(|S|·m), ω(x)/m)⌉` with `m = min ω`.  The result is
/// invariant under scaling the input by a positive constant.
pub fn nice_weights(weights: &[u64]) -> Result<Vec<u64>, CodeError> {
    if weights.is_empty() {
        return Err(CodeError::EmptySet);
    }
    if let Some(i) = weights.iter().position(|&w| w == 0) {
        return Err(CodeError::NonPositiveWeight(i));
    }
    let m = *weights.iter().min().expect("non-empty") as u128;
    let total: u128 = weights.iter().map(|&w| w as u128).sum();
    let n = weights.len() as u128;
    let floor = total.div_ceil(n * m);
    weights
        .iter()
        .map(|&w| {
            let v = floor.max((w as u128).div_ceil(m));
            u64::try_from(v).map_err(|_| CodeError::WeightOverflow)
        })
        .collect()
}

/// Real-valued variant of [`nice_weights`], used at API boundaries.
pub fn nice_weights_real(weights: &[f64]) -> Result<Vec<u64>, CodeError> {
    if weights.is_empty() {
        return Err(CodeError::EmptySet);
    }
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(CodeError::NonFiniteWeight(i));
        }
        if w <= 0.0 {
            return Err(CodeError::NonPositiveWeight(i));
        }
    }
    let m = weights.iter().cloned().fold(f64::INFINITY, f64::min);
    let avg = weights.iter().sum::<f64>() / (weights.len() as f64 * m);
    weights
        .iter()
        .map(|&w| {
            let v = (w / m).max(avg).ceil();
            if v >= u64::MAX as f64 {
                Err(CodeError::WeightOverflow)
            } else {
                Ok(v as u64)
            }
        })
        .collect()
}

/// `lgg(x) = log₂ max(2, x)`, the logarithm used in budget formulas.
pub fn lgg(x: f64) -> f64 {
    x.max(2.0).log2()
}

/// Integer weight-balanced alphabetic code.
///
/// The keys are the indices `0..m` in their natural order.  Codewords are
/// prefix-free, increase lexicographically with the key, and satisfy
/// `|c(x)| ≤ log(ω(S)/ω(x)) + 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphabeticCode {
    words: Vec<BitLabel>,
}

impl AlphabeticCode {
    /// Builds the code: codewords are the roots of weight-sized subtrees of a
    /// complete binary tree, then unary nodes of the resulting trie are
    /// contracted so that the code tree is full.
    pub fn new(weights: &[u64]) -> Result<Self, CodeError> {
        let raw = alphabetic_code_uncontracted(weights)?;
        let mut words = vec![BitLabel::new(); raw.len()];
        let order: Vec<usize> = (0..raw.len()).collect();
        contract(&raw, &order, 0, &mut words);
        Ok(AlphabeticCode { words })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: usize) -> &BitLabel {
        &self.words[i]
    }

    pub fn words(&self) -> &[BitLabel] {
        &self.words
    }

    pub fn into_words(self) -> Vec<BitLabel> {
        self.words
    }

    /// Hint `π(i)` from which [`predecessor_word`] recovers `c(i-1)` given
    /// `c(i)`.  Because the code tree is full, the predecessor of
    /// `q·1·0^t` is `q·0·1^m` and the hint is `bin(m)`.
    pub fn predecessor_hint(&self, i: usize) -> BitLabel {
        if i == 0 {
            return BitLabel::new();
        }
        let word = &self.words[i];
        let last_one = word
            .iter()
            .rposition(|&b| b)
            .expect("a non-first codeword of a full tree contains a one");
        let prev = &self.words[i - 1];
        let m = prev.len() - last_one - 1;
        debug_assert!(prev[..last_one] == word[..last_one]);
        debug_assert!(!prev[last_one] && prev[last_one + 1..].iter().all(|&b| b));
        bin(m as u64)
    }
}

/// Upper bound on the suffix length accepted by [`predecessor_word`]; larger
/// values can only come from corrupted labels.
const MAX_PREDECESSOR_SUFFIX: u64 = 1 << 16;

/// Recovers the codeword preceding `word` from its hint; `None` for the first
/// codeword (which contains no one bit).
pub fn predecessor_word(word: &[bool], hint: &[bool]) -> Result<Option<BitLabel>, CodeError> {
    let Some(last_one) = word.iter().rposition(|&b| b) else {
        return Ok(None);
    };
    let m = read_bin(hint)?;
    if m > MAX_PREDECESSOR_SUFFIX {
        return Err(CodeError::ValueTooLarge(m));
    }
    let mut out = Vec::with_capacity(last_one + 1 + m as usize);
    out.extend_from_slice(&word[..last_one]);
    out.push(false);
    out.extend(std::iter::repeat(true).take(m as usize));
    Ok(Some(BitLabel(out)))
}

/// Convenience wrapper returning only the codewords of [`AlphabeticCode`].
pub fn alphabetic_code(weights: &[u64]) -> Result<Vec<BitLabel>, CodeError> {
    Ok(AlphabeticCode::new(weights)?.into_words())
}

/// The codewords before unary contraction.
///
/// Element `x` owns `ω(x)` consecutive leaves of the complete binary tree of
/// height `⌈log ω(S)⌉`.  If `ω(x) = 1` its codeword is that leaf.  Otherwise,
/// below the lowest common ancestor `y` of its leaves, the child `z` holding
/// at least half of them is chosen, and the codeword is the largest subtree
/// hanging off the inner boundary path of `z` that consists of leaves of `x`.
pub fn alphabetic_code_uncontracted(weights: &[u64]) -> Result<Vec<BitLabel>, CodeError> {
    if let Some(i) = weights.iter().position(|&w| w == 0) {
        return Err(CodeError::NonPositiveWeight(i));
    }
    let total: u128 = weights.iter().map(|&w| w as u128).sum();
    if total > 1u128 << 100 {
        return Err(CodeError::WeightOverflow);
    }
    let height = if total <= 1 {
        0
    } else {
        bit_length(total - 1)
    };
    let path = |prefix: u128, depth: usize| -> BitLabel {
        BitLabel((0..depth).rev().map(|j| prefix >> j & 1 == 1).collect())
    };
    let mut start: u128 = 0;
    let mut words = Vec::with_capacity(weights.len());
    for &w in weights {
        let w = w as u128;
        let end = start + w - 1;
        if w == 1 {
            words.push(path(start, height));
        } else {
            let split = bit_length(start ^ end);
            let y = start >> split;
            let mid = (y << 1 | 1) << (split - 1);
            let left = mid - start;
            let right = end - mid + 1;
            let (prefix, depth) = if 2 * left >= w {
                let j = bit_length(left) - 1;
                ((mid - (1u128 << j)) >> j, height - j)
            } else {
                let j = bit_length(right) - 1;
                (mid >> j, height - j)
            };
            words.push(path(prefix, depth));
        }
        start += w;
    }
    Ok(words)
}

/// Contracts unary trie nodes.  `group` holds indices of codewords that share
/// their first `depth` bits; their contracted suffixes are appended to `out`.
fn contract(raw: &[BitLabel], group: &[usize], depth: usize, out: &mut [BitLabel]) {
    if group.len() <= 1 {
        return;
    }
    let split = group.partition_point(|&i| !raw[i][depth]);
    let (zeros, ones) = group.split_at(split);
    if zeros.is_empty() || ones.is_empty() {
        contract(raw, group, depth + 1, out);
        return;
    }
    for &i in zeros {
        out[i].push(false);
    }
    for &i in ones {
        out[i].push(true);
    }
    contract(raw, zeros, depth + 1, out);
    contract(raw, ones, depth + 1, out);
}
