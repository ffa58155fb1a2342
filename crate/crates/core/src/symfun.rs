//! Representations of symmetric functions on `({0,1}^t)^k`: multilinear
//! expansion, Möbius inversion, sorted tuples, monomial symmetric
//! polynomials and mod-p coefficients in the monomial symmetric basis.
//!
//! A boolean point `x ∈ ({0,1}^t)^k` is handled in two shapes:
//! * as `k` row patterns (`u32`, MSB = column 1 of the block), or
//! * as a bitmask in which variable `x_{u,v}` is bit `(u−1)·t + (v−1)`,
//!   used by the generic (non-symmetric) [`TruthTable`] routines.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::comb::{binomial, is_prime, multinomial};
use crate::error::{Error, Result};
use crate::matrix::{column_type_of, Alphabet, ColumnType, TypeIndex};

/// A prime `p` with `n < p < 2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeModulus {
    p: u64,
    n: u64,
}

impl PrimeModulus {
    pub fn new(p: u64, n: u64) -> Result<Self> {
        if !is_prime(p) || p <= n || p >= 2 * n {
            return Err(Error::InvalidParameter(format!(
                "{p} is not a prime in ({n}, {})",
                2 * n
            )));
        }
        Ok(Self { p, n })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn reduce(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.p))
            .to_u64()
            .expect("residue below p")
    }
}

/// Smallest prime in `(n, 2n)`; exists for every `n ≥ 2`.
pub fn smallest_prime_in(n: u64) -> Result<PrimeModulus> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n ≥ 2, got {n}")));
    }
    let p = (n + 1..2 * n)
        .find(|&c| is_prime(c))
        .expect("Bertrand's postulate");
    PrimeModulus::new(p, n)
}

/// Order used inside sorted tuples: Hamming weight, then lexicographic.
fn pattern_key(p: u32) -> (u32, u32) {
    (p.count_ones(), p)
}

/// A tuple `(a_1, …, a_k)` of t-bit rows ordered by Hamming weight and then
/// lexicographically; the canonical representative of a row-permutation orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SortedTuple {
    t: u32,
    rows: Vec<u32>,
}

impl SortedTuple {
    pub fn new(t: u32, rows: Vec<u32>) -> Result<Self> {
        if rows.iter().any(|&r| r >> t != 0) {
            return Err(Error::InvalidInput(format!("row wider than {t} bits")));
        }
        if rows.windows(2).any(|w| pattern_key(w[0]) > pattern_key(w[1])) {
            return Err(Error::InvalidInput("tuple is not sorted".into()));
        }
        Ok(Self { t, rows })
    }

    /// Sorted representative of any tuple.
    pub fn canonicalize(t: u32, rows: &[u32]) -> Self {
        let mut rows = rows.to_vec();
        rows.sort_by_key(|&r| pattern_key(r));
        Self { t, rows }
    }

    /// The tuple whose multiset of rows has the given pattern counts.
    pub fn from_type(t: u32, k: u32, e: &ColumnType) -> Self {
        Self::canonicalize(t, &e.representative(k))
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    /// Total number of ones, `|a|`.
    pub fn weight(&self) -> u32 {
        self.rows.iter().map(|r| r.count_ones()).sum()
    }

    /// Pattern multiset as a column type over `2^t` symbols.
    pub fn to_type(&self) -> ColumnType {
        column_type_of(self.rows.iter().copied(), Alphabet::of_blocks(self.t).expect("t valid"))
            .expect("rows fit in t bits")
    }

    /// Variable bitmask of the monomial `x^a`.
    pub fn mask(&self) -> u64 {
        rows_to_mask(&self.rows, self.t)
    }
}

impl fmt::Display for SortedTuple {
    /// Rows as t-character bit strings joined by `.`, e.g. `01.01.11`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{:0width$b}", r, width = self.t as usize)?;
        }
        Ok(())
    }
}

impl std::str::FromStr for SortedTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('.').collect();
        let t = parts.first().map_or(0, |p| p.len()) as u32;
        if t == 0 || parts.iter().any(|p| p.len() as u32 != t) {
            return Err(Error::Parse(format!("malformed sorted tuple `{s}`")));
        }
        let rows = parts
            .iter()
            .map(|p| u32::from_str_radix(p, 2).map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<_>>()?;
        Self::new(t, rows)
    }
}

pub fn rows_to_mask(rows: &[u32], t: u32) -> u64 {
    let mut mask = 0u64;
    for (u, &r) in rows.iter().enumerate() {
        for v in 0..t {
            if (r >> (t - 1 - v)) & 1 == 1 {
                mask |= 1 << (u as u32 * t + v);
            }
        }
    }
    mask
}

pub fn mask_to_rows(mask: u64, t: u32, k: usize) -> Vec<u32> {
    (0..k)
        .map(|u| {
            (0..t).fold(0u32, |acc, v| {
                (acc << 1) | ((mask >> (u as u32 * t + v)) & 1) as u32
            })
        })
        .collect()
}

/// `Sor(t, k)` in canonical type order. Its size is `C(k + 2^t − 1, 2^t − 1)`.
pub fn sorted_tuples(t: u32, k: u32) -> Result<Vec<SortedTuple>> {
    if t == 0 || k == 0 {
        return Err(Error::InvalidParameter("sorted tuples need t ≥ 1 and k ≥ 1".into()));
    }
    let nonzero = Alphabet::of_blocks(t)?.nonzero();
    Ok(TypeIndex::new(k, nonzero)
        .types()
        .iter()
        .map(|e| SortedTuple::from_type(t, k, e))
        .collect())
}

/// A symmetric `{0,1}`-valued function of `rows` symbols from `alphabet`,
/// stored as one value per column type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricFunction {
    rows: u32,
    alphabet: Alphabet,
    values: Vec<bool>,
}

impl SymmetricFunction {
    pub fn from_fn(rows: u32, alphabet: Alphabet, f: impl Fn(&ColumnType) -> bool) -> Self {
        let index = TypeIndex::new(rows, alphabet.nonzero());
        let values = index.types().iter().map(f).collect();
        Self {
            rows,
            alphabet,
            values,
        }
    }

    /// Builds from values in canonical type order.
    pub fn from_values(rows: u32, alphabet: Alphabet, values: Vec<bool>) -> Result<Self> {
        let expect = TypeIndex::new(rows, alphabet.nonzero()).len();
        if values.len() != expect {
            return Err(Error::DimensionMismatch(format!(
                "table has {} values, {expect} orbits expected",
                values.len()
            )));
        }
        Ok(Self {
            rows,
            alphabet,
            values,
        })
    }

    pub fn constant(rows: u32, alphabet: Alphabet, value: bool) -> Self {
        Self::from_fn(rows, alphabet, |_| value)
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn orbit_count(&self) -> usize {
        self.values.len()
    }

    pub fn index(&self) -> TypeIndex {
        TypeIndex::new(self.rows, self.alphabet.nonzero())
    }

    /// Value on an orbit given by its type.
    pub fn eval_type(&self, e: &ColumnType) -> bool {
        self.values[type_rank(e, self.rows)]
    }

    /// Value on a column of symbols.
    pub fn eval(&self, column: &[u32]) -> Result<bool> {
        if column.len() != self.rows as usize {
            return Err(Error::DimensionMismatch(format!(
                "function takes {} rows, got {}",
                self.rows,
                column.len()
            )));
        }
        Ok(self.eval_type(&column_type_of(column.iter().copied(), self.alphabet)?))
    }

    /// Same function on t-bit block rows, `t = ⌈log₂ d⌉`. Orbits containing a
    /// pattern `≥ d` (not the encoding of any symbol) map to 0.
    pub fn extend_to_blocks(&self) -> Self {
        let blocks = Alphabet::of_blocks(self.alphabet.block_width()).expect("t valid");
        if blocks == self.alphabet {
            return self.clone();
        }
        let d = self.alphabet.nonzero();
        Self::from_fn(self.rows, blocks, |e| {
            if e.counts()[d..].iter().any(|&c| c > 0) {
                false
            } else {
                self.eval_type(&ColumnType::new(e.counts()[..d].to_vec()))
            }
        })
    }
}

/// Position of `e` in the canonical (level-major, then lexicographic) order
/// of types with level `≤ max_level`.
pub(crate) fn type_rank(e: &ColumnType, max_level: u32) -> usize {
    let dims = e.nonzero() as u64;
    let level = u64::from(e.level());
    debug_assert!(level <= u64::from(max_level));
    if dims == 0 {
        return 0;
    }
    // types of lower levels: C(level - 1 + D, D)
    let mut rank = if level == 0 {
        0
    } else {
        binomial(level - 1 + dims, dims).to_usize().expect("rank fits")
    };
    let mut left = level;
    for (pos, &c) in e.counts().iter().enumerate() {
        let rest = dims - pos as u64 - 1;
        if rest == 0 {
            break;
        }
        // compositions of `left − x` into `rest` parts for every x < c
        for x in 0..u64::from(c) {
            rank += binomial(left - x + rest - 1, rest - 1).to_usize().expect("rank fits");
        }
        left -= u64::from(c);
    }
    rank
}

/// An arbitrary boolean function of `vars ≤ 24` variables as a truth table
/// indexed by variable bitmask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    vars: u32,
    values: Vec<bool>,
}

impl TruthTable {
    pub fn new(vars: u32, values: Vec<bool>) -> Result<Self> {
        if vars > 24 || values.len() != 1usize << vars {
            return Err(Error::DimensionMismatch(format!(
                "{vars} variables need a table of length 2^{vars}"
            )));
        }
        Ok(Self { vars, values })
    }

    pub fn from_fn(vars: u32, f: impl Fn(u64) -> bool) -> Result<Self> {
        Self::new(vars, (0..1u64 << vars).map(f).collect())
    }

    /// Truth table of a symmetric function on `({0,1}^t)^k`.
    pub fn from_symmetric(g: &SymmetricFunction, t: u32) -> Result<Self> {
        let k = g.rows() as usize;
        let vars = t * g.rows();
        Self::from_fn(vars, |x| {
            g.eval(&mask_to_rows(x, t, k)).expect("patterns fit the alphabet")
        })
    }

    pub fn vars(&self) -> u32 {
        self.vars
    }

    pub fn eval(&self, x: u64) -> bool {
        self.values[x as usize]
    }
}

/// `ĝ(a) = Σ_{a′ ⊆ a} (−1)^{|a| − |a′|} g(a′)`, by direct subset enumeration.
pub fn mobius_coefficient(g: &TruthTable, a: u64) -> BigInt {
    let weight = a.count_ones();
    let mut acc = 0i64;
    let mut sub = a;
    loop {
        if g.eval(sub) {
            if (weight - sub.count_ones()) % 2 == 0 {
                acc += 1;
            } else {
                acc -= 1;
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & a;
    }
    BigInt::from(acc)
}

/// All multilinear coefficients `ĝ(a)`, indexed by monomial bitmask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourierCoefficients {
    vars: u32,
    coeffs: Vec<BigInt>,
}

impl FourierCoefficients {
    pub fn of(g: &TruthTable) -> Self {
        let coeffs = (0..1u64 << g.vars()).map(|a| mobius_coefficient(g, a)).collect();
        Self {
            vars: g.vars(),
            coeffs,
        }
    }

    pub fn from_vec(vars: u32, coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() != 1usize << vars {
            return Err(Error::DimensionMismatch("one coefficient per monomial".into()));
        }
        Ok(Self { vars, coeffs })
    }

    pub fn vars(&self) -> u32 {
        self.vars
    }

    pub fn get(&self, a: u64) -> &BigInt {
        &self.coeffs[a as usize]
    }
}

/// `Σ_a ĝ(a)·x^a` at a boolean point; `x^a = 1` exactly when `a ⊆ x`.
pub fn multilinear_eval(coeffs: &FourierCoefficients, x: u64) -> BigInt {
    let mut acc = BigInt::zero();
    let mut sub = x;
    loop {
        acc += coeffs.get(sub);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & x;
    }
    acc
}

/// Counts of every t-bit pattern (pattern 0 included) in an orbit of `k` rows.
fn pattern_counts(e: &ColumnType, k: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(e.nonzero() + 1);
    v.push(e.zero_count(k));
    v.extend_from_slice(e.counts());
    v
}

/// Every way to write `total` as an ordered sum of `parts` nonnegative
/// integers, optionally capped per part.
fn compositions(total: u32, caps: &[u32]) -> Vec<Vec<u32>> {
    fn go(out: &mut Vec<Vec<u32>>, buf: &mut Vec<u32>, caps: &[u32], left: u32) {
        let pos = buf.len();
        if pos == caps.len() {
            if left == 0 {
                out.push(buf.clone());
            }
            return;
        }
        let tail_cap: u32 = caps[pos + 1..].iter().sum();
        let lo = left.saturating_sub(tail_cap);
        for v in lo..=left.min(caps[pos]) {
            buf.push(v);
            go(out, buf, caps, left - v);
            buf.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut out, &mut Vec::new(), caps, total);
    out
}

fn submasks(q: u32) -> Vec<u32> {
    let mut subs = Vec::new();
    let mut s = q;
    loop {
        subs.push(s);
        if s == 0 {
            break;
        }
        s = (s - 1) & q;
    }
    subs
}

/// `ĝ(a)` for a symmetric `g` on t-bit rows, with the subsets `a′ ⊆ a`
/// grouped by orbit: the sum runs over orbit types `τ` weighted by the
/// number (and sign) of subsets of `a` of type `τ`.
pub fn symmetric_mobius_coefficient(g: &SymmetricFunction, a: &SortedTuple) -> BigInt {
    let t = a.t();
    let k = a.k() as u32;
    assert_eq!(g.rows(), k, "arity mismatch");
    assert_eq!(g.alphabet().size(), 1 << t, "function must act on t-bit rows");
    let alpha = pattern_counts(&a.to_type(), k);
    let width = alpha.len();

    // state: pattern counts of a′ built so far
    let mut states: HashMap<Vec<u32>, BigInt> = HashMap::new();
    states.insert(vec![0; width], BigInt::one());
    for (q, &count) in alpha.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let q = q as u32;
        let subs = submasks(q);
        let caps = vec![count; subs.len()];
        let moves: Vec<(Vec<u32>, BigInt)> = compositions(count, &caps)
            .into_iter()
            .map(|split| {
                let flips: u32 = split
                    .iter()
                    .zip(&subs)
                    .map(|(&c, &r)| c * (q.count_ones() - r.count_ones()))
                    .sum();
                let mut w = BigInt::from(multinomial(
                    &split.iter().map(|&c| u64::from(c)).collect::<Vec<_>>(),
                ));
                if flips % 2 == 1 {
                    w = -w;
                }
                (split, w)
            })
            .collect();
        let mut next: HashMap<Vec<u32>, BigInt> = HashMap::new();
        for (state, coef) in &states {
            for (split, w) in &moves {
                let mut s = state.clone();
                for (&c, &r) in split.iter().zip(&subs) {
                    s[r as usize] += c;
                }
                *next.entry(s).or_insert_with(BigInt::zero) += coef * w;
            }
        }
        states = next;
    }
    states
        .into_iter()
        .filter(|(s, _)| g.eval_type(&ColumnType::new(s[1..].to_vec())))
        .map(|(_, c)| c)
        .sum()
}

/// `m_a(x)`: the number of distinct monomials `x^{σ(a)}` equal to 1 at `x`.
pub fn monomial_sym_eval(a: &SortedTuple, x: &[u32]) -> BigUint {
    assert_eq!(a.k(), x.len(), "arity mismatch");
    let alphabet = Alphabet::of_blocks(a.t()).expect("t valid");
    let xt = column_type_of(x.iter().copied(), alphabet).expect("x rows fit in t bits");
    monomial_sym_eval_type(a, &xt)
}

/// [`monomial_sym_eval`] at any point of the orbit with pattern counts `x_type`.
///
/// Counts arrangements of the multiset `a` onto the rows of `x` such that
/// every row receives a pattern contained in it.
pub fn monomial_sym_eval_type(a: &SortedTuple, x_type: &ColumnType) -> BigUint {
    let k = a.k() as u32;
    let alpha = pattern_counts(&a.to_type(), k);
    let beta = pattern_counts(x_type, k);
    debug_assert_eq!(alpha.len(), beta.len());

    let mut states: HashMap<Vec<u32>, BigUint> = HashMap::new();
    states.insert(alpha, BigUint::one());
    for (pat, &rows) in beta.iter().enumerate() {
        if rows == 0 {
            continue;
        }
        let subs = submasks(pat as u32);
        let mut next: HashMap<Vec<u32>, BigUint> = HashMap::new();
        for (remaining, ways) in &states {
            let caps: Vec<u32> = subs.iter().map(|&q| remaining[q as usize]).collect();
            for split in compositions(rows, &caps) {
                let mut rem = remaining.clone();
                for (&c, &q) in split.iter().zip(&subs) {
                    rem[q as usize] -= c;
                }
                let w = multinomial(&split.iter().map(|&c| u64::from(c)).collect::<Vec<_>>());
                *next.entry(rem).or_insert_with(BigUint::zero) += ways * w;
            }
        }
        states = next;
    }
    states
        .into_iter()
        .filter(|(rem, _)| rem.iter().all(|&c| c == 0))
        .map(|(_, w)| w)
        .sum()
}

/// Coefficients `c_a(g) ∈ F_p` of `g` in the basis `{m_a : a ∈ Sor(t,k)}`,
/// stored in [`sorted_tuples`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientVector {
    t: u32,
    k: u32,
    p: u64,
    values: Vec<u64>,
}

impl CoefficientVector {
    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Coefficient of the tuple at canonical position `idx`.
    pub fn get(&self, idx: usize) -> u64 {
        self.values[idx]
    }

    pub fn coefficient(&self, a: &SortedTuple) -> u64 {
        self.values[type_rank(&a.to_type(), self.k)]
    }

    /// `Σ_a c_a·m_a(x) mod p`.
    pub fn eval_mod(&self, x: &[u32]) -> u64 {
        let tuples = sorted_tuples(self.t, self.k).expect("valid dims");
        let p = BigUint::from(self.p);
        let mut acc = BigUint::zero();
        for (a, &c) in tuples.iter().zip(&self.values) {
            if c != 0 {
                acc += monomial_sym_eval(a, x) * c;
            }
        }
        (acc % p).to_u64().expect("below p")
    }

    /// Dump format: one `a_repr c_a` line per sorted tuple.
    pub fn to_dump(&self) -> String {
        let tuples = sorted_tuples(self.t, self.k).expect("valid dims");
        let mut s = String::new();
        for (a, c) in tuples.iter().zip(&self.values) {
            s.push_str(&format!("{a} {c}\n"));
        }
        s
    }
}

/// `c_a(g) = ĝ(a) mod p` at the sorted representative of each orbit.
///
/// Narrow blocks use the orbit-grouped sum. From `t = 5` on the pattern
/// alphabet is wide enough that plain subset enumeration over the truth
/// table is cheaper, as long as `t·k ≤ 24`.
pub fn basis_coefficients(
    g: &SymmetricFunction,
    t: u32,
    k: u32,
    p: PrimeModulus,
) -> Result<CoefficientVector> {
    if g.rows() != k || g.alphabet() != Alphabet::of_blocks(t)? {
        return Err(Error::DimensionMismatch(format!(
            "function on {} rows over Z_{} cannot be expanded in Sor({t},{k})",
            g.rows(),
            g.alphabet().size()
        )));
    }
    let tuples = sorted_tuples(t, k)?;
    let values = if t >= 5 && t * k <= 24 {
        let table = TruthTable::from_symmetric(g, t)?;
        tuples
            .iter()
            .map(|a| p.reduce(&mobius_coefficient(&table, a.mask())))
            .collect()
    } else {
        tuples
            .iter()
            .map(|a| p.reduce(&symmetric_mobius_coefficient(g, a)))
            .collect()
    };
    Ok(CoefficientVector {
        t,
        k,
        p: p.p(),
        values,
    })
}

/// `c_a(g)` for a row-symmetric truth table on `({0,1}^t)^k`, one entry per
/// sorted tuple in increasing bitmask order. Works for any block width with
/// `t·k ≤ 24`; no column types over `2^t` symbols are built.
pub fn orbit_coefficients(
    table: &TruthTable,
    t: u32,
    k: u32,
    p: PrimeModulus,
) -> Result<Vec<(SortedTuple, u64)>> {
    if t == 0 || k == 0 || table.vars() != t * k {
        return Err(Error::DimensionMismatch(format!(
            "table on {} variables is not a function of {k} rows of {t} bits",
            table.vars()
        )));
    }
    let size = 1usize << table.vars();
    let mut is_rep = vec![false; size];
    for x in 0..size as u64 {
        let a = SortedTuple::canonicalize(t, &mask_to_rows(x, t, k as usize));
        let rep = a.mask();
        if table.eval(x) != table.eval(rep) {
            return Err(Error::InvalidInput(format!(
                "table is not symmetric under row permutations at {x:#b}"
            )));
        }
        is_rep[rep as usize] = true;
    }
    // in-place Möbius transform
    let mut c: Vec<i64> = table.values.iter().map(|&v| i64::from(v)).collect();
    for bit in 0..table.vars() {
        let step = 1usize << bit;
        for x in 0..size {
            if x & step != 0 {
                c[x] -= c[x ^ step];
            }
        }
    }
    Ok((0..size)
        .filter(|&x| is_rep[x])
        .map(|x| {
            let a = SortedTuple::new(t, mask_to_rows(x as u64, t, k as usize)).expect("representative");
            (a, p.reduce(&BigInt::from(c[x])))
        })
        .collect())
}

/// Shared per-orbit table of `m_a(τ) mod p` for all `a, τ` in `Sor(t,k)`.
#[derive(Debug, Clone)]
pub struct MonomialTable {
    p: u64,
    index: Arc<TypeIndex>,
    rows: Vec<Vec<u64>>,
}

impl MonomialTable {
    pub fn new(t: u32, k: u32, p: u64) -> Result<Self> {
        let tuples = sorted_tuples(t, k)?;
        let index = TypeIndex::shared(k, Alphabet::of_blocks(t)?.nonzero());
        let pb = BigUint::from(p);
        let rows = tuples
            .iter()
            .map(|a| {
                index
                    .types()
                    .iter()
                    .map(|x| (monomial_sym_eval_type(a, x) % &pb).to_u64().expect("below p"))
                    .collect()
            })
            .collect();
        Ok(Self { p, index, rows })
    }

    /// `m_a(x) mod p` with `a` at canonical position `a_idx`.
    pub fn get(&self, a_idx: usize, x: &ColumnType) -> u64 {
        self.rows[a_idx][self.index.index_of(x).expect("orbit in table")]
    }

    /// `Σ_a c_a·m_a(x) mod p`.
    pub fn eval(&self, coeffs: &CoefficientVector, x: &ColumnType) -> u64 {
        let col = self.index.index_of(x).expect("orbit in table");
        coeffs
            .values()
            .iter()
            .zip(&self.rows)
            .fold(0u64, |acc, (&c, row)| (acc + c * row[col]) % self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::comb::binomial_u64;

    fn blocks(t: u32) -> Alphabet {
        Alphabet::of_blocks(t).unwrap()
    }

    fn random_sym(rng: &mut ChaCha8Rng, t: u32, k: u32) -> SymmetricFunction {
        let n = TypeIndex::new(k, blocks(t).nonzero()).len();
        SymmetricFunction::from_values(k, blocks(t), (0..n).map(|_| rng.gen()).collect()).unwrap()
    }

    /// Distinct row permutations of `a`, by brute force.
    fn distinct_arrangements(rows: &[u32]) -> HashSet<Vec<u32>> {
        fn go(out: &mut HashSet<Vec<u32>>, cur: &mut Vec<u32>, left: &mut Vec<u32>) {
            if left.is_empty() {
                out.insert(cur.clone());
                return;
            }
            for i in 0..left.len() {
                let v = left.remove(i);
                cur.push(v);
                go(out, cur, left);
                cur.pop();
                left.insert(i, v);
            }
        }
        let mut out = HashSet::new();
        go(&mut out, &mut Vec::new(), &mut rows.to_vec());
        out
    }

    #[test]
    fn primes() {
        assert_eq!(smallest_prime_in(4).unwrap().p(), 5);
        assert_eq!(smallest_prime_in(2).unwrap().p(), 3);
        assert_eq!(smallest_prime_in(10).unwrap().p(), 11);
        assert_eq!(smallest_prime_in(8).unwrap().p(), 11);
        assert!(smallest_prime_in(1).is_err());
        for n in 2..2000 {
            let p = smallest_prime_in(n).unwrap();
            assert!(n < p.p() && p.p() < 2 * n);
            assert!(!(n + 1..p.p()).any(is_prime));
        }
    }

    #[test]
    fn rank_matches_enumeration() {
        for d in 1..=4 {
            let idx = TypeIndex::new(7, d);
            for (i, e) in idx.types().iter().enumerate() {
                assert_eq!(type_rank(e, 7), i);
            }
        }
    }

    #[test]
    fn mobius_examples() {
        let zero = TruthTable::from_fn(4, |_| false).unwrap();
        assert!((0..16).all(|a| mobius_coefficient(&zero, a).is_zero()));
        // AND of two bits: only the full monomial survives
        let and = TruthTable::from_fn(2, |x| x == 0b11).unwrap();
        let coeffs: Vec<i64> = (0..4)
            .map(|a| mobius_coefficient(&and, a).to_i64().unwrap())
            .collect();
        assert_eq!(coeffs, vec![0, 0, 0, 1]);
        // OR of two bits: x1 + x2 − x1x2
        let or = TruthTable::from_fn(2, |x| x != 0).unwrap();
        let coeffs: Vec<i64> = (0..4)
            .map(|a| mobius_coefficient(&or, a).to_i64().unwrap())
            .collect();
        assert_eq!(coeffs, vec![0, 1, 1, -1]);
    }

    #[test]
    fn multilinear_examples() {
        let zeros = FourierCoefficients::from_vec(3, vec![BigInt::zero(); 8]).unwrap();
        assert!((0..8).all(|x| multilinear_eval(&zeros, x).is_zero()));
        let mut c = vec![BigInt::zero(); 8];
        c[0] = BigInt::from(7);
        let constant = FourierCoefficients::from_vec(3, c).unwrap();
        assert!((0..8).all(|x| multilinear_eval(&constant, x) == BigInt::from(7)));
    }

    #[test]
    fn sorted_tuple_examples() {
        assert_eq!(sorted_tuples(1, 3).unwrap().len(), 4);
        assert_eq!(sorted_tuples(2, 3).unwrap().len(), 20);
        assert_eq!(sorted_tuples(1, 1).unwrap().len(), 2);
        let a: SortedTuple = "01.01.11".parse().unwrap();
        assert_eq!(a.rows(), &[0b01, 0b01, 0b11]);
        assert_eq!(a.to_string(), "01.01.11");
        // weight before lex: 10 (weight 1) precedes 11 but follows 00
        assert!(SortedTuple::new(2, vec![0b00, 0b10, 0b01]).is_err());
        assert!(SortedTuple::new(2, vec![0b00, 0b01, 0b10, 0b11]).is_ok());
        assert_eq!(
            SortedTuple::canonicalize(2, &[0b11, 0b01, 0b00, 0b10]).rows(),
            &[0b00, 0b01, 0b10, 0b11]
        );
        assert!(sorted_tuples(0, 3).is_err());
    }

    #[test]
    fn sorted_tuple_sizes_and_validity() {
        for t in 1..=3u32 {
            for k in 1..=8u32 {
                let tuples = sorted_tuples(t, k).unwrap();
                let size = binomial_u64(u64::from(k) + (1u64 << t) - 1, (1u64 << t) - 1);
                assert_eq!(tuples.len() as u64, size, "t={t} k={k}");
                let distinct: HashSet<_> = tuples.iter().collect();
                assert_eq!(distinct.len(), tuples.len());
                for a in &tuples {
                    assert!(SortedTuple::new(t, a.rows().to_vec()).is_ok());
                }
            }
        }
    }

    #[test]
    fn monomial_example_from_definition() {
        // (t,k) = (2,3), a = ((1,1),(0,1),(0,1)); the three monomials are
        // x11 x12 x22 x32, x12 x21 x22 x32, x12 x22 x31 x32.
        let a = SortedTuple::canonicalize(2, &[0b11, 0b01, 0b01]);
        let arrangements = distinct_arrangements(&[0b11, 0b01, 0b01]);
        assert_eq!(arrangements.len(), 3);
        let x = [0b11, 0b01, 0b01];
        assert_eq!(monomial_sym_eval(&a, &x), BigUint::from(1u32));
        assert_eq!(monomial_sym_eval(&a, &[0b11, 0b11, 0b11]), BigUint::from(3u32));
        assert_eq!(monomial_sym_eval(&a, &[0b11, 0b11, 0b01]), BigUint::from(2u32));
        assert!(monomial_sym_eval(&a, &[0b10, 0b11, 0b11]).is_zero());
        assert_eq!(monomial_sym_eval(&a, &[0b01, 0b11, 0b11]), BigUint::from(2u32));
        assert!(monomial_sym_eval(&a, &[0b01, 0b01, 0b01]).is_zero());
        let empty = SortedTuple::canonicalize(2, &[0, 0, 0]);
        for x in 0..64u64 {
            assert_eq!(monomial_sym_eval(&empty, &mask_to_rows(x, 2, 3)), BigUint::one());
        }
    }

    #[test]
    fn monomial_eval_matches_brute_force() {
        for (t, k) in [(1u32, 4u32), (2, 3), (2, 4), (3, 2)] {
            for a in sorted_tuples(t, k).unwrap() {
                let arr = distinct_arrangements(a.rows());
                let masks: Vec<u64> = arr.iter().map(|r| rows_to_mask(r, t)).collect();
                for x in 0..1u64 << (t * k) {
                    let brute = masks.iter().filter(|&&m| m & !x == 0).count();
                    let rows = mask_to_rows(x, t, k as usize);
                    assert_eq!(monomial_sym_eval(&a, &rows), BigUint::from(brute));
                }
            }
        }
    }

    #[test]
    fn monomials_are_disjoint() {
        for t in 1..=2u32 {
            for k in 1..=4u32 {
                let mut seen: HashSet<u64> = HashSet::new();
                let mut total = 0;
                for a in sorted_tuples(t, k).unwrap() {
                    for r in distinct_arrangements(a.rows()) {
                        total += 1;
                        assert!(seen.insert(rows_to_mask(&r, t)), "shared monomial");
                    }
                }
                // together the m_a cover every monomial exactly once
                assert_eq!(total, 1usize << (t * k));
            }
        }
    }

    #[test]
    fn orbit_grouped_mobius_matches_subset_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (t, k) in [(1u32, 6u32), (2, 3), (2, 4), (3, 2)] {
            for _ in 0..4 {
                let g = random_sym(&mut rng, t, k);
                let table = TruthTable::from_symmetric(&g, t).unwrap();
                for a in 0..1u64 << (t * k) {
                    let canon = SortedTuple::canonicalize(t, &mask_to_rows(a, t, k as usize));
                    assert_eq!(
                        symmetric_mobius_coefficient(&g, &canon),
                        mobius_coefficient(&table, a)
                    );
                }
            }
        }
    }

    #[test]
    fn basis_constant_functions() {
        let p = smallest_prime_in(4).unwrap();
        let zero = SymmetricFunction::constant(3, blocks(2), false);
        let c = basis_coefficients(&zero, 2, 3, p).unwrap();
        assert!(c.values().iter().all(|&v| v == 0));
        let one = SymmetricFunction::constant(3, blocks(2), true);
        let c = basis_coefficients(&one, 2, 3, p).unwrap();
        assert_eq!(c.get(0), 1);
        assert!(c.values()[1..].iter().all(|&v| v == 0));
        assert!(basis_coefficients(&one, 1, 3, p).is_err());
    }

    #[test]
    fn basis_reconstruction_t1_k4_p5() {
        let p = smallest_prime_in(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = random_sym(&mut rng, 1, 4);
            let c = basis_coefficients(&g, 1, 4, p).unwrap();
            assert!(c.values().iter().all(|&v| v < 5));
            for x in 0..16u64 {
                let rows = mask_to_rows(x, 1, 4);
                assert_eq!(c.eval_mod(&rows), u64::from(g.eval(&rows).unwrap()));
            }
        }
    }

    #[test]
    fn orbit_route_agrees_with_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let p = smallest_prime_in(5).unwrap();
        for (t, k) in [(1, 5), (2, 3), (3, 2), (5, 2), (6, 1)] {
            let g = random_sym(&mut rng, t, k);
            let dense = basis_coefficients(&g, t, k, p).unwrap();
            let sparse = orbit_coefficients(&TruthTable::from_symmetric(&g, t).unwrap(), t, k, p).unwrap();
            assert_eq!(sparse.len(), dense.values().len());
            for (a, c) in &sparse {
                assert_eq!(dense.coefficient(a), *c, "t={t} k={k} a={a}");
            }
        }
        let lopsided = TruthTable::from_fn(4, |x| x == 0b0001).unwrap();
        assert!(orbit_coefficients(&lopsided, 2, 2, p).is_err());
        assert!(orbit_coefficients(&lopsided, 3, 2, p).is_err());
    }

    #[test]
    fn dump_format() {
        let p = smallest_prime_in(2).unwrap();
        let g = SymmetricFunction::from_fn(2, blocks(1), |e| e.get(1) == 2);
        let c = basis_coefficients(&g, 1, 2, p).unwrap();
        assert_eq!(c.to_dump(), "0.0 0\n0.1 0\n1.1 1\n");
    }

    #[test]
    fn extension_zeroes_unencodable_patterns() {
        let z3 = Alphabet::new(3).unwrap();
        let g = SymmetricFunction::constant(2, z3, true);
        let ext = g.extend_to_blocks();
        assert_eq!(ext.alphabet().size(), 4);
        assert!(ext.eval(&[1, 2]).unwrap());
        assert!(!ext.eval(&[3, 0]).unwrap());
        assert!(!ext.eval(&[3, 3]).unwrap());
        let z4 = Alphabet::new(4).unwrap();
        let h = SymmetricFunction::constant(2, z4, true);
        assert_eq!(h.extend_to_blocks(), h);
    }

    proptest! {
        #[test]
        fn monomial_symmetric_under_row_permutation(seed: u64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = rng.gen_range(1..=3u32);
            let k = rng.gen_range(1..=5u32);
            let tuples = sorted_tuples(t, k).unwrap();
            let a = tuples.choose(&mut rng).unwrap();
            let x: Vec<u32> = (0..k).map(|_| rng.gen_range(0..1u32 << t)).collect();
            let mut y = x.clone();
            y.shuffle(&mut rng);
            prop_assert_eq!(monomial_sym_eval(a, &x), monomial_sym_eval(a, &y));
        }

        #[test]
        fn mobius_orbit_constant(seed: u64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = rng.gen_range(1..=2u32);
            let k = rng.gen_range(1..=5u32);
            let g = random_sym(&mut rng, t, k);
            let table = TruthTable::from_symmetric(&g, t).unwrap();
            let a: Vec<u32> = (0..k).map(|_| rng.gen_range(0..1u32 << t)).collect();
            let mut b = a.clone();
            b.shuffle(&mut rng);
            prop_assert_eq!(
                mobius_coefficient(&table, rows_to_mask(&a, t)),
                mobius_coefficient(&table, rows_to_mask(&b, t))
            );
        }
    }
}
