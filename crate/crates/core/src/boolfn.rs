//! Completely specified and incompletely defined Boolean functions.
//!
//! Every table in this crate is indexed big-endian: entry `i` holds the value
//! at the input `x = (x_0, ..., x_{n-1})` whose binary encoding is `i`, with
//! `x_0` the most significant bit. The same convention fixes how bit strings
//! such as the coefficient vector `C` map to integers and to statevector
//! basis indices.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, ParseError, ParseErrorKind, Result};

/// Largest input width accepted by truth tables and the statevector simulator.
pub const MAX_REGISTER_N: usize = 20;

/// Largest input width accepted by the exhaustive completion search.
pub const MAX_COMPLETION_N: usize = 12;

/// A fixed-width bit string `b_0 b_1 ... b_{w-1}`, stored big-endian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    width: usize,
    value: u64,
}

impl BitString {
    pub fn new(width: usize, value: u64) -> Result<Self> {
        if width > 64 {
            return Err(Error::InvalidArgument(format!(
                "bit strings are limited to 64 bits, got {width}"
            )));
        }
        if width < 64 && value >> width != 0 {
            return Err(Error::InvalidArgument(format!(
                "value {value} does not fit in {width} bits"
            )));
        }
        Ok(Self { width, value })
    }

    pub fn zeros(width: usize) -> Self {
        Self::new(width, 0).expect("width within 64 bits")
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let value = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Self::new(bits.len(), value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Integer encoding, `b_0` most significant.
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Bit `b_j`, counting from the most significant end.
    pub fn bit(&self, j: usize) -> bool {
        assert!(
            j < self.width,
            "bit {j} out of range for width {}",
            self.width
        );
        (self.value >> (self.width - 1 - j)) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.width).map(|j| self.bit(j)).collect()
    }

    /// XOR of all bits.
    pub fn parity(&self) -> bool {
        self.value.count_ones() & 1 == 1
    }

    /// Inner product `x . y = x_0 y_0 ⊕ ... ⊕ x_{w-1} y_{w-1}`.
    pub fn dot(&self, other: &BitString) -> Result<bool> {
        if self.width != other.width {
            return Err(Error::DimensionMismatch {
                expected: self.width,
                found: other.width,
            });
        }
        Ok(parity_u64(self.value & other.value))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.width {
            f.write_str(if self.bit(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!(
                    "illegal bit character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }
}

/// Parity of a machine word.
pub fn parity_u64(v: u64) -> bool {
    v.count_ones() & 1 == 1
}

/// XOR of all bits of `c`.
pub fn parity(c: &BitString) -> bool {
    c.parity()
}

/// `f(x) = c_0 x_0 ⊕ ... ⊕ c_{n-1} x_{n-1} ⊕ c_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineSpec {
    linear: BitString,
    affinity: bool,
}

impl AffineSpec {
    pub fn new(linear: BitString, affinity: bool) -> Result<Self> {
        if linear.width() == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        Ok(Self { linear, affinity })
    }

    /// Linear function (`c_n = 0`).
    pub fn linear(linear: BitString) -> Result<Self> {
        Self::new(linear, false)
    }

    pub fn from_parts(n: usize, coeffs: u64, affinity: bool) -> Result<Self> {
        Self::new(BitString::new(n, coeffs)?, affinity)
    }

    pub fn n(&self) -> usize {
        self.linear.width()
    }

    /// The coefficient string `C = c_0 ... c_{n-1}`.
    pub fn linear_coeffs(&self) -> BitString {
        self.linear
    }

    /// The affinity bit `c_n`.
    pub fn affinity(&self) -> bool {
        self.affinity
    }

    pub fn is_linear(&self) -> bool {
        !self.affinity
    }

    /// Same coefficients, affinity bit flipped.
    pub fn complement(&self) -> Self {
        Self {
            linear: self.linear,
            affinity: !self.affinity,
        }
    }

    pub fn eval(&self, x: &BitString) -> Result<bool> {
        Ok(self.linear.dot(x)? ^ self.affinity)
    }

    /// Evaluates at the integer-encoded input `index` without width checks.
    pub fn eval_index(&self, index: usize) -> bool {
        parity_u64(self.linear.value() & index as u64) ^ self.affinity
    }

    /// Every affine function of `n` inputs, ordered by (coefficients, affinity).
    pub fn all(n: usize) -> Result<Vec<AffineSpec>> {
        if n == 0 || n > MAX_REGISTER_N {
            return Err(Error::RegisterLimit {
                n,
                limit: MAX_REGISTER_N,
            });
        }
        Ok((0..1u64 << n)
            .flat_map(|c| [false, true].map(move |a| (c, a)))
            .map(|(c, a)| AffineSpec::from_parts(n, c, a).expect("valid width"))
            .collect())
    }
}

impl fmt::Display for AffineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C={} c_n={}", self.linear, self.affinity as u8)
    }
}

pub fn eval_affine(spec: &AffineSpec, x: &BitString) -> Result<bool> {
    spec.eval(x)
}

/// A completely specified function as its `2^n` outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    n: usize,
    outputs: Vec<bool>,
}

impl TruthTable {
    pub fn new(n: usize, outputs: Vec<bool>) -> Result<Self> {
        check_register(n, MAX_REGISTER_N)?;
        if outputs.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: outputs.len(),
            });
        }
        Ok(Self { n, outputs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn outputs(&self) -> &[bool] {
        &self.outputs
    }

    pub fn get(&self, index: usize) -> bool {
        self.outputs[index]
    }

    pub fn ones(&self) -> usize {
        self.outputs.iter().filter(|&&b| b).count()
    }

    pub fn is_balanced(&self) -> bool {
        2 * self.ones() == self.outputs.len()
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.outputs {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn truth_table(spec: &AffineSpec) -> Result<TruthTable> {
    let n = spec.n();
    check_register(n, MAX_REGISTER_N)?;
    let outputs = (0..1usize << n).map(|i| spec.eval_index(i)).collect();
    TruthTable::new(n, outputs)
}

/// Value of an incompletely defined function at one input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entry {
    Zero,
    One,
    DontCare,
}

impl Entry {
    pub fn from_bit(b: bool) -> Self {
        if b {
            Entry::One
        } else {
            Entry::Zero
        }
    }

    /// The defined value, or `None` for a don't care.
    pub fn bit(self) -> Option<bool> {
        match self {
            Entry::Zero => Some(false),
            Entry::One => Some(true),
            Entry::DontCare => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Entry::Zero => '0',
            Entry::One => '1',
            Entry::DontCare => '-',
        }
    }
}

/// An incompletely defined function `g : X^n -> {0, 1, -}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFunction {
    n: usize,
    entries: Vec<Entry>,
    n0_prime: usize,
    n1_prime: usize,
    dc: usize,
}

impl PartialFunction {
    pub fn new(n: usize, entries: Vec<Entry>) -> Result<Self> {
        check_register(n, MAX_REGISTER_N)?;
        if entries.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: entries.len(),
            });
        }
        let (mut n0, mut n1, mut dc) = (0, 0, 0);
        for e in &entries {
            match e {
                Entry::Zero => n0 += 1,
                Entry::One => n1 += 1,
                Entry::DontCare => dc += 1,
            }
        }
        Ok(Self {
            n,
            entries,
            n0_prime: n0,
            n1_prime: n1,
            dc,
        })
    }

    pub fn from_truth_table(table: &TruthTable) -> Self {
        let entries = table
            .outputs()
            .iter()
            .map(|&b| Entry::from_bit(b))
            .collect();
        Self::new(table.n(), entries).expect("truth table already validated")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `N = 2^n`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn entry(&self, index: usize) -> Entry {
        self.entries[index]
    }

    pub fn is_dc(&self, index: usize) -> bool {
        self.entries[index] == Entry::DontCare
    }

    /// Number of OFF entries, `n_0'`.
    pub fn n0_prime(&self) -> usize {
        self.n0_prime
    }

    /// Number of ON entries, `n_1'`.
    pub fn n1_prime(&self) -> usize {
        self.n1_prime
    }

    /// Number of don't cares, `d`.
    pub fn dc_count(&self) -> usize {
        self.dc
    }

    pub fn dc_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| **e == Entry::DontCare)
            .map(|(i, _)| i)
    }

    /// True when `d >= N/2`, where the output of either algorithm is ambiguous.
    pub fn is_half_or_more_dc(&self) -> bool {
        2 * self.dc >= self.len()
    }

    /// Whether `spec` agrees with every defined entry.
    pub fn is_consistent_with(&self, spec: &AffineSpec) -> bool {
        spec.n() == self.n
            && self
                .entries
                .iter()
                .enumerate()
                .all(|(i, e)| e.bit().is_none_or(|b| b == spec.eval_index(i)))
    }
}

impl fmt::Display for PartialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            write!(f, "{}", e.symbol())?;
        }
        Ok(())
    }
}

/// Replaces the listed entries of `table` with don't cares.
pub fn mask<I>(table: &TruthTable, dc_indices: I) -> Result<PartialFunction>
where
    I: IntoIterator<Item = usize>,
{
    let mut entries: Vec<Entry> = table
        .outputs()
        .iter()
        .map(|&b| Entry::from_bit(b))
        .collect();
    let len = entries.len();
    for index in dc_indices {
        let slot = entries
            .get_mut(index)
            .ok_or(Error::IndexOutOfRange { index, len })?;
        *slot = Entry::DontCare;
    }
    PartialFunction::new(table.n(), entries)
}

/// Don't cares split by the value the completion assigns them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct DcSplit {
    pub d0: usize,
    pub d1: usize,
}

impl DcSplit {
    pub fn total(&self) -> usize {
        self.d0 + self.d1
    }

    /// The same split with the roles of `d0` and `d1` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            d0: self.d1,
            d1: self.d0,
        }
    }
}

pub fn dc_split(partial: &PartialFunction, truth: &TruthTable) -> Result<DcSplit> {
    if partial.n() != truth.n() {
        return Err(Error::DimensionMismatch {
            expected: partial.n(),
            found: truth.n(),
        });
    }
    let mut split = DcSplit::default();
    for (index, (e, &t)) in partial.entries().iter().zip(truth.outputs()).enumerate() {
        match e.bit() {
            None if t => split.d1 += 1,
            None => split.d0 += 1,
            Some(b) if b != t => return Err(Error::Inconsistent { index }),
            Some(_) => {}
        }
    }
    Ok(split)
}

/// All affine functions that agree with `partial` on its defined entries,
/// ordered by (coefficients as integer, affinity). Brute force over the
/// `2^{n+1}` candidates.
pub fn consistent_affine_completions(partial: &PartialFunction) -> Result<Vec<AffineSpec>> {
    let n = partial.n();
    check_register(n, MAX_COMPLETION_N)?;
    let defined: Vec<(usize, bool)> = partial
        .entries()
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.bit().map(|b| (i, b)))
        .collect();
    // Candidate k encodes (coeffs = k >> 1, affinity = k & 1); the indexed
    // parallel filter keeps that order.
    let found = (0..1u64 << (n + 1))
        .into_par_iter()
        .filter_map(|k| {
            let spec = AffineSpec::from_parts(n, k >> 1, k & 1 == 1).expect("valid width");
            defined
                .iter()
                .all(|&(i, b)| spec.eval_index(i) == b)
                .then_some(spec)
        })
        .collect();
    Ok(found)
}

/// Parses the `.bfn` text format: an `n=<decimal>` header line, then one line
/// of `2^n` characters over `0`, `1`, `-`. Lines starting with `#` and blank
/// lines are ignored.
pub fn parse_function_file(text: &str) -> Result<PartialFunction> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

    let (header_line, header) = lines.next().ok_or(ParseError {
        line: 1,
        column: 1,
        kind: ParseErrorKind::MissingHeader,
    })?;
    let n = parse_header(header_line, header)?;

    let (table_line, table) = lines.next().ok_or(ParseError {
        line: header_line + 1,
        column: 1,
        kind: ParseErrorKind::MissingTable,
    })?;
    let table = table.trim_end();
    let mut entries = Vec::with_capacity(1 << n);
    for (col, c) in table.chars().enumerate() {
        let e = match c {
            '0' => Entry::Zero,
            '1' => Entry::One,
            '-' => Entry::DontCare,
            other => {
                return Err(ParseError {
                    line: table_line,
                    column: col + 1,
                    kind: ParseErrorKind::IllegalChar(other),
                }
                .into())
            }
        };
        entries.push(e);
    }
    if entries.len() != 1 << n {
        return Err(ParseError {
            line: table_line,
            column: entries.len().min(1 << n) + 1,
            kind: ParseErrorKind::WrongLength {
                expected: 1 << n,
                found: entries.len(),
            },
        }
        .into());
    }
    if let Some((line, _)) = lines.next() {
        return Err(ParseError {
            line,
            column: 1,
            kind: ParseErrorKind::TrailingContent,
        }
        .into());
    }
    PartialFunction::new(n, entries)
}

fn parse_header(line: usize, header: &str) -> Result<usize> {
    let bad = |column: usize, msg: &str| -> Error {
        ParseError {
            line,
            column,
            kind: ParseErrorKind::BadHeader(msg.to_string()),
        }
        .into()
    };
    let header = header.trim_end();
    let Some(digits) = header.strip_prefix("n=") else {
        return Err(bad(1, "expected `n=<decimal>`"));
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad(3, "n must be a decimal integer"));
    }
    let n: usize = digits.parse().map_err(|_| bad(3, "n is too large"))?;
    if n == 0 {
        return Err(bad(3, "n must be at least 1"));
    }
    check_register(n, MAX_REGISTER_N)?;
    Ok(n)
}

pub fn write_function_file(partial: &PartialFunction) -> String {
    format!("n={}\n{}\n", partial.n(), partial)
}

pub(crate) fn check_register(n: usize, limit: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n > limit {
        return Err(Error::RegisterLimit { n, limit });
    }
    Ok(())
}
