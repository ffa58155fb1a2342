//! Input model: matrices over `Z_d`, their boolean block encoding, player
//! views and column-type combinatorics.
//!
//! Rows and columns are 1-indexed in every public accessor. Symbols of
//! `Z_d` are encoded as `t = ⌈log₂ d⌉` bits, most significant bit first, so
//! the t-bit pattern of a block row read as an unsigned integer is the
//! symbol itself.

use std::collections::HashMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::comb::{binomial_u64, ceil_log2};
use crate::error::{Error, Result};

/// Symbol set `Z_d = {0, …, d−1}` together with its block width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    d: u32,
}

impl Alphabet {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!(
                "alphabet size must be at least 2, got {d}"
            )));
        }
        Ok(Self { d })
    }

    /// Alphabet of all t-bit patterns, `Z_{2^t}`.
    pub fn of_blocks(t: u32) -> Result<Self> {
        if t == 0 || t > 16 {
            return Err(Error::InvalidParameter(format!(
                "block width must be in 1..=16, got {t}"
            )));
        }
        Self::new(1 << t)
    }

    pub fn size(&self) -> u32 {
        self.d
    }

    /// Number of nonzero symbols, the dimension of a [`ColumnType`].
    pub fn nonzero(&self) -> usize {
        (self.d - 1) as usize
    }

    /// `t = ⌈log₂ d⌉`.
    pub fn block_width(&self) -> u32 {
        ceil_log2(u64::from(self.d))
    }

    pub fn contains(&self, symbol: u32) -> bool {
        symbol < self.d
    }
}

/// Occurrence counts `(e_1, …, e_D)` of the nonzero symbols in a column.
/// The count of `0` is implicit: `k − level`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColumnType(Vec<u32>);

impl ColumnType {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn zero(nonzero: usize) -> Self {
        Self(vec![0; nonzero])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    /// Count of symbol `s ∈ 1..=D`.
    pub fn get(&self, s: usize) -> u32 {
        self.0[s - 1]
    }

    pub fn nonzero(&self) -> usize {
        self.0.len()
    }

    /// `|e| = e_1 + ⋯ + e_D`.
    pub fn level(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn zero_count(&self, k: u32) -> u32 {
        k - self.level()
    }

    /// `e + unit_s`.
    pub fn plus_unit(&self, s: usize) -> Self {
        let mut c = self.0.clone();
        c[s - 1] += 1;
        Self(c)
    }

    /// `e − unit_s`, or `None` when `e_s = 0`.
    pub fn minus_unit(&self, s: usize) -> Option<Self> {
        if self.0[s - 1] == 0 {
            return None;
        }
        let mut c = self.0.clone();
        c[s - 1] -= 1;
        Some(Self(c))
    }

    /// Componentwise sum, used to glue a prefix type to a suffix type.
    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.0.len(), other.0.len());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Expands the type back to a canonical column of `k` symbols:
    /// zeros first, then each symbol in increasing order.
    pub fn representative(&self, k: u32) -> Vec<u32> {
        let mut col = vec![0; self.zero_count(k) as usize];
        for (s, &c) in self.0.iter().enumerate() {
            col.extend(std::iter::repeat(s as u32 + 1).take(c as usize));
        }
        col
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Type of a column given as a slice of symbols.
pub fn column_type(column: &[u32], alphabet: Alphabet) -> Result<ColumnType> {
    column_type_of(column.iter().copied(), alphabet)
}

pub(crate) fn column_type_of(
    symbols: impl IntoIterator<Item = u32>,
    alphabet: Alphabet,
) -> Result<ColumnType> {
    let mut counts = vec![0u32; alphabet.nonzero()];
    for s in symbols {
        if !alphabet.contains(s) {
            return Err(Error::InvalidInput(format!(
                "symbol {s} outside Z_{}",
                alphabet.size()
            )));
        }
        if s > 0 {
            counts[(s - 1) as usize] += 1;
        }
    }
    Ok(ColumnType(counts))
}

/// All types with `|e| ≤ max_level` over `nonzero` symbols, level-major and
/// lexicographic on `(e_1, …, e_D)` within a level.
pub fn enumerate_types(k: u32, nonzero: usize, max_level: u32) -> Result<Vec<ColumnType>> {
    if max_level > k {
        return Err(Error::InvalidParameter(format!(
            "max_level {max_level} exceeds column height {k}"
        )));
    }
    let mut out = Vec::new();
    for level in 0..=max_level {
        let mut buf = vec![0u32; nonzero];
        push_compositions(&mut out, &mut buf, 0, level);
    }
    Ok(out)
}

fn push_compositions(out: &mut Vec<ColumnType>, buf: &mut [u32], pos: usize, left: u32) {
    if pos + 1 >= buf.len() {
        if let Some(last) = buf.last_mut() {
            *last = left;
            out.push(ColumnType(buf.to_vec()));
        } else if left == 0 {
            out.push(ColumnType(Vec::new()));
        }
        return;
    }
    for v in 0..=left {
        buf[pos] = v;
        push_compositions(out, buf, pos + 1, left - v);
    }
    buf[pos] = 0;
}

/// Canonical numbering of the types of level `≤ max_level`.
///
/// Because the order is level-major, the types of level `≤ L` form the
/// prefix of length [`TypeIndex::prefix_len`]`(L)`.
#[derive(Debug, Clone)]
pub struct TypeIndex {
    max_level: u32,
    nonzero: usize,
    types: Vec<ColumnType>,
    lookup: HashMap<ColumnType, usize>,
}

// the type list is a function of these two fields
impl PartialEq for TypeIndex {
    fn eq(&self, other: &Self) -> bool {
        self.max_level == other.max_level && self.nonzero == other.nonzero
    }
}

impl Eq for TypeIndex {}

impl TypeIndex {
    pub fn new(max_level: u32, nonzero: usize) -> Self {
        let types = enumerate_types(max_level, nonzero, max_level).expect("max_level ≤ k");
        let lookup = types.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Self {
            max_level,
            nonzero,
            types,
            lookup,
        }
    }

    pub fn shared(max_level: u32, nonzero: usize) -> Arc<Self> {
        Arc::new(Self::new(max_level, nonzero))
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn nonzero(&self) -> usize {
        self.nonzero
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn types(&self) -> &[ColumnType] {
        &self.types
    }

    pub fn get(&self, idx: usize) -> &ColumnType {
        &self.types[idx]
    }

    pub fn index_of(&self, e: &ColumnType) -> Option<usize> {
        self.lookup.get(e).copied()
    }

    /// Number of types of level `≤ level`, `C(level + D, D)`.
    pub fn prefix_len(&self, level: u32) -> usize {
        binomial_u64(u64::from(level) + self.nonzero as u64, self.nonzero as u64) as usize
    }
}

/// A `k × n` matrix over `Z_d`; row `i` is written on player `i`'s forehead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputMatrix {
    alphabet: Alphabet,
    rows: Vec<Vec<u32>>,
}

impl InputMatrix {
    pub fn new(alphabet: Alphabet, rows: Vec<Vec<u32>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::InvalidInput("matrix needs at least one row".into()));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::InvalidInput("matrix needs at least one column".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    r.len()
                )));
            }
            if let Some(&s) = r.iter().find(|&&s| !alphabet.contains(s)) {
                return Err(Error::InvalidInput(format!(
                    "entry {s} in row {} outside Z_{}",
                    i + 1,
                    alphabet.size()
                )));
            }
        }
        Ok(Self { alphabet, rows })
    }

    pub fn from_columns(alphabet: Alphabet, columns: &[Vec<u32>]) -> Result<Self> {
        let k = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != k) {
            return Err(Error::DimensionMismatch("columns of unequal height".into()));
        }
        let rows = (0..k).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        Self::new(alphabet, rows)
    }

    pub fn zeros(alphabet: Alphabet, k: usize, n: usize) -> Result<Self> {
        Self::new(alphabet, vec![vec![0; n]; k])
    }

    /// Uniformly random entries.
    pub fn random<R: Rng + ?Sized>(alphabet: Alphabet, k: usize, n: usize, rng: &mut R) -> Self {
        let rows = (0..k)
            .map(|_| (0..n).map(|_| rng.gen_range(0..alphabet.size())).collect())
            .collect();
        Self { alphabet, rows }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    /// Row `i`, 1-indexed.
    pub fn row(&self, i: usize) -> Result<&[u32]> {
        self.check_row(i)?;
        Ok(&self.rows[i - 1])
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.rows[i - 1][j - 1]
    }

    /// Column `j`, 1-indexed.
    pub fn column(&self, j: usize) -> Result<Vec<u32>> {
        if j == 0 || j > self.n() {
            return Err(Error::OutOfRange {
                index: j,
                max: self.n(),
            });
        }
        Ok(self.rows.iter().map(|r| r[j - 1]).collect())
    }

    pub fn columns(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..self.n()).map(move |j| self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn column_types(&self) -> Vec<ColumnType> {
        self.columns()
            .map(|c| column_type(&c, self.alphabet).expect("entries validated"))
            .collect()
    }

    /// Columns `range` (1-indexed, inclusive) as a new matrix.
    pub fn select_columns(&self, range: RangeInclusive<usize>) -> Result<Self> {
        let (lo, hi) = (*range.start(), *range.end());
        if lo == 0 || hi > self.n() || lo > hi {
            return Err(Error::OutOfRange {
                index: hi,
                max: self.n(),
            });
        }
        let rows = self.rows.iter().map(|r| r[lo - 1..hi].to_vec()).collect();
        Ok(Self {
            alphabet: self.alphabet,
            rows,
        })
    }

    /// Reorders columns so that new column `j` is old column `perm[j]` (0-indexed permutation).
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| perm.iter().map(|&p| r[p]).collect())
            .collect();
        Self {
            alphabet: self.alphabet,
            rows,
        }
    }

    /// Reorders rows so that new row `i` is old row `perm[i]` (0-indexed permutation).
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        Self {
            alphabet: self.alphabet,
            rows: perm.iter().map(|&p| self.rows[p].clone()).collect(),
        }
    }

    /// Replaces row `i` (1-indexed).
    pub fn with_row(&self, i: usize, row: Vec<u32>) -> Result<Self> {
        self.check_row(i)?;
        let mut rows = self.rows.clone();
        rows[i - 1] = row;
        Self::new(self.alphabet, rows)
    }

    fn check_row(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.k() {
            return Err(Error::OutOfRange {
                index: i,
                max: self.k(),
            });
        }
        Ok(())
    }

    /// Text format: a header `k n d`, then `k` lines of `n` integers.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.k(), self.n(), self.alphabet.size());
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(u32::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let dims = parse_ints(header)?;
        let [k, n, d] = dims[..] else {
            return Err(Error::Parse(format!("header must be `k n d`, got `{header}`")));
        };
        let rows: Vec<Vec<u32>> = lines
            .map(|l| parse_ints(l).map(|v| v.into_iter().map(|x| x as u32).collect()))
            .collect::<Result<_>>()?;
        if rows.len() as u64 != k {
            return Err(Error::Parse(format!("expected {k} rows, found {}", rows.len())));
        }
        if rows.iter().any(|r| r.len() as u64 != n) {
            return Err(Error::Parse(format!("every row must have {n} entries")));
        }
        Self::new(Alphabet::new(d as u32)?, rows)
    }

    pub fn to_document(&self) -> MatrixDocument {
        MatrixDocument {
            k: self.k(),
            n: self.n(),
            d: self.alphabet.size(),
            rows: self.rows.clone(),
        }
    }

    pub fn from_document(doc: MatrixDocument) -> Result<Self> {
        if doc.rows.len() != doc.k || doc.rows.iter().any(|r| r.len() != doc.n) {
            return Err(Error::DimensionMismatch(format!(
                "document declares {}×{} but rows disagree",
                doc.k, doc.n
            )));
        }
        Self::new(Alphabet::new(doc.d)?, doc.rows)
    }
}

fn parse_ints(line: &str) -> Result<Vec<u64>> {
    line.split_whitespace()
        .map(|w| {
            w.parse::<u64>()
                .map_err(|e| Error::Parse(format!("`{w}`: {e}")))
        })
        .collect()
}

/// Structured form of the matrix file, `{k, n, d, rows}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub k: usize,
    pub n: usize,
    pub d: u32,
    pub rows: Vec<Vec<u32>>,
}

/// A `k × (t·n)` boolean matrix viewed as `n` blocks of width `t`.
///
/// Stored as one t-bit pattern per (row, block); pattern bit `t−v` is the
/// boolean entry of block column `v` (MSB first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockMatrix {
    t: u32,
    patterns: Vec<Vec<u32>>,
}

impl BlockMatrix {
    pub fn from_patterns(t: u32, patterns: Vec<Vec<u32>>) -> Result<Self> {
        let alphabet = Alphabet::of_blocks(t)?;
        let n = patterns.first().map_or(0, Vec::len);
        for r in &patterns {
            if r.len() != n {
                return Err(Error::DimensionMismatch("ragged block rows".into()));
            }
            if r.iter().any(|&p| !alphabet.contains(p)) {
                return Err(Error::InvalidInput(format!("pattern wider than {t} bits")));
            }
        }
        Ok(Self { t, patterns })
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn k(&self) -> usize {
        self.patterns.len()
    }

    /// Number of blocks.
    pub fn n(&self) -> usize {
        self.patterns.first().map_or(0, Vec::len)
    }

    /// Boolean entry at row `u`, boolean column `c` (both 1-indexed, `c ≤ t·n`).
    pub fn bit(&self, u: usize, c: usize) -> bool {
        let (block, v) = ((c - 1) / self.t as usize, (c - 1) % self.t as usize);
        let shift = self.t - 1 - v as u32;
        (self.patterns[u - 1][block] >> shift) & 1 == 1
    }

    /// Block `j` (1-indexed) as `k` row patterns.
    pub fn block(&self, j: usize) -> Vec<u32> {
        self.patterns.iter().map(|r| r[j - 1]).collect()
    }

    pub fn blocks(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (1..=self.n()).map(move |j| self.block(j))
    }

    pub fn patterns(&self) -> &[Vec<u32>] {
        &self.patterns
    }

    /// The block matrix as a matrix over `Z_{2^t}`, one symbol per row pattern.
    pub fn to_pattern_matrix(&self) -> Result<InputMatrix> {
        InputMatrix::new(Alphabet::of_blocks(self.t)?, self.patterns.clone())
    }

    /// Inverse of [`boolean_encode`]; fails if some pattern is not below `d`.
    pub fn decode(&self, alphabet: Alphabet) -> Result<InputMatrix> {
        InputMatrix::new(alphabet, self.patterns.clone())
    }
}

/// Replaces each entry by its t-bit expansion, most significant bit first.
pub fn boolean_encode(m: &InputMatrix, t: u32) -> Result<BlockMatrix> {
    let need = m.alphabet().block_width();
    if t < need {
        return Err(Error::InvalidParameter(format!(
            "block width {t} cannot encode Z_{} (needs {need})",
            m.alphabet().size()
        )));
    }
    BlockMatrix::from_patterns(t, m.rows().to_vec())
}

/// t-bit expansion of one symbol, most significant bit first.
pub fn symbol_bits(symbol: u32, t: u32) -> Vec<bool> {
    (0..t).rev().map(|b| (symbol >> b) & 1 == 1).collect()
}

/// Splits a block matrix into its first `ℓ` rows and, per block, the
/// patterns of rows `ℓ+1..k`.
pub fn restrict_rows(m: &BlockMatrix, l: usize) -> Result<(BlockMatrix, Vec<Vec<u32>>)> {
    if l == 0 || l > m.k() {
        return Err(Error::OutOfRange {
            index: l,
            max: m.k(),
        });
    }
    let prefix = BlockMatrix {
        t: m.t,
        patterns: m.patterns[..l].to_vec(),
    };
    let suffixes = (0..m.n())
        .map(|j| m.patterns[l..].iter().map(|r| r[j]).collect())
        .collect();
    Ok((prefix, suffixes))
}

/// Inverse of [`restrict_rows`].
pub fn reassemble_rows(prefix: &BlockMatrix, suffixes: &[Vec<u32>]) -> Result<BlockMatrix> {
    if suffixes.len() != prefix.n() {
        return Err(Error::DimensionMismatch("one suffix per block required".into()));
    }
    let extra = suffixes.first().map_or(0, Vec::len);
    let mut patterns = prefix.patterns.clone();
    for r in 0..extra {
        patterns.push(suffixes.iter().map(|s| s[r]).collect());
    }
    BlockMatrix::from_patterns(prefix.t, patterns)
}

/// What player `i` sees: every row except their own.
#[derive(Debug, Clone, Copy)]
pub struct PlayerView<'a> {
    matrix: &'a InputMatrix,
    hidden: usize,
}

impl<'a> PlayerView<'a> {
    pub fn player(&self) -> usize {
        self.hidden
    }

    pub fn k(&self) -> usize {
        self.matrix.k()
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.matrix.alphabet()
    }

    pub fn row(&self, r: usize) -> Result<&'a [u32]> {
        if r == self.hidden {
            return Err(Error::HiddenRow {
                player: self.hidden,
                row: r,
            });
        }
        self.matrix.row(r)
    }

    pub fn visible_rows(&self) -> impl Iterator<Item = (usize, &'a [u32])> + '_ {
        let hidden = self.hidden;
        let m = self.matrix;
        (1..=m.k())
            .filter(move |&r| r != hidden)
            .map(move |r| (r, m.rows[r - 1].as_slice()))
    }

    /// Entries of column `j` restricted to `rows`, skipping the hidden row.
    pub fn visible_entries(
        &self,
        j: usize,
        rows: RangeInclusive<usize>,
    ) -> impl Iterator<Item = u32> + '_ {
        let hidden = self.hidden;
        rows.filter(move |&r| r != hidden)
            .map(move |r| self.matrix.rows[r - 1][j - 1])
    }

    /// Type of column `j` over the `k−1` visible rows.
    pub fn column_type(&self, j: usize) -> ColumnType {
        column_type_of(self.visible_entries(j, 1..=self.k()), self.alphabet())
            .expect("entries validated")
    }
}

pub fn player_view(m: &InputMatrix, i: usize) -> Result<PlayerView<'_>> {
    m.check_row(i)?;
    Ok(PlayerView {
        matrix: m,
        hidden: i,
    })
}
