//! Named composed functions, random symmetric functions and the direct
//! evaluator every protocol is checked against.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::composed::ComposedSpec;
use crate::error::{Error, Result};
use crate::matrix::{Alphabet, ColumnType, InputMatrix, TypeIndex};
use crate::symfun::SymmetricFunction;

/// How the outer majority treats an exact half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    /// `weight ≥ n/2` gives 1.
    #[default]
    Up,
    /// `weight > n/2` gives 1.
    Down,
}

impl FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "up" | "ge" => Ok(Self::Up),
            "down" | "gt" => Ok(Self::Down),
            other => Err(Error::Parse(format!("tie rule `{other}` (expected up|down)"))),
        }
    }
}

/// Symmetric outer function of `n` bits, stored by Hamming weight `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuterFunction {
    table: Vec<bool>,
}

impl OuterFunction {
    pub fn from_table(table: Vec<bool>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidInput("weight table needs n+1 ≥ 1 entries".into()));
        }
        Ok(Self { table })
    }

    pub fn from_fn(n: usize, f: impl Fn(u64) -> bool) -> Self {
        Self {
            table: (0..=n as u64).map(f).collect(),
        }
    }

    pub fn parity(n: usize) -> Self {
        Self::from_fn(n, |w| w % 2 == 1)
    }

    pub fn nor(n: usize) -> Self {
        Self::from_fn(n, |w| w == 0)
    }

    pub fn majority(n: usize, tie: TieRule) -> Self {
        let n2 = n as u64;
        Self::from_fn(n, |w| match tie {
            TieRule::Up => 2 * w >= n2,
            TieRule::Down => 2 * w > n2,
        })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            table: (0..=n).map(|_| rng.gen()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.table.len() - 1
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn eval(&self, weight: u64) -> Result<bool> {
        usize::try_from(weight)
            .ok()
            .and_then(|w| self.table.get(w).copied())
            .ok_or(Error::OutOfRange {
                index: weight as usize,
                max: self.n(),
            })
    }
}

/// Functions from the standard zoo, addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedFunction {
    /// Parity of the blockwise AND.
    Gip,
    /// NOR of the blockwise AND.
    Disj,
    /// Majority of blockwise bit-majorities.
    MajMaj,
    /// Majority of blockwise thresholds `r_1 + … + r_k ≥ s`.
    MajThr { s: u64 },
}

impl fmt::Display for NamedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gip => f.write_str("GIP"),
            Self::Disj => f.write_str("DISJ"),
            Self::MajMaj => f.write_str("MAJ-MAJ"),
            Self::MajThr { s } => write!(f, "MAJ-THR:{s}"),
        }
    }
}

impl FromStr for NamedFunction {
    type Err = Error;

    /// `GIP`, `DISJ`, `MAJ-MAJ`, `MAJ-THR:<s>` (case-insensitive; `∘` and
    /// `_t` suffixes accepted).
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .trim()
            .to_ascii_uppercase()
            .replace('∘', "-")
            .replace("_T", "")
            .replace('_', "-");
        match norm.as_str() {
            "GIP" => Ok(Self::Gip),
            "DISJ" => Ok(Self::Disj),
            "MAJ-MAJ" | "MAJMAJ" => Ok(Self::MajMaj),
            other => {
                let rest = other
                    .strip_prefix("MAJ-THR")
                    .or_else(|| other.strip_prefix("MAJTHR"))
                    .ok_or_else(|| Error::UnknownFunction(s.to_string()))?;
                let digits = rest.trim_start_matches([':', '-', '=']);
                let s_val = digits.parse().map_err(|_| {
                    Error::InvalidParameter(format!("threshold in `{s}` must be an integer"))
                })?;
                Ok(Self::MajThr { s: s_val })
            }
        }
    }
}

/// Σ_s e_s · popcount(s): number of one bits in the t-bit encoding.
fn bit_weight(e: &ColumnType) -> u64 {
    e.counts()
        .iter()
        .enumerate()
        .map(|(i, &c)| u64::from(c) * u64::from((i as u32 + 1).count_ones()))
        .sum()
}

/// Σ_s e_s · s: sum of the rows read as unsigned integers.
fn value_sum(e: &ColumnType) -> u64 {
    e.counts()
        .iter()
        .enumerate()
        .map(|(i, &c)| u64::from(c) * (i as u64 + 1))
        .sum()
}

/// AND of every bit of the `k × t` block: all rows equal `2^t − 1`.
pub fn block_and(k: u32, alphabet: Alphabet) -> SymmetricFunction {
    let all_ones = (1u32 << alphabet.block_width()) - 1;
    SymmetricFunction::from_fn(k, alphabet, |e| {
        alphabet.contains(all_ones) && e.get(all_ones as usize) == k
    })
}

/// 1 iff at least `kt/2` of the block's bits are set.
pub fn block_majority(k: u32, alphabet: Alphabet) -> SymmetricFunction {
    let t = u64::from(alphabet.block_width());
    SymmetricFunction::from_fn(k, alphabet, |e| 2 * bit_weight(e) >= u64::from(k) * t)
}

/// 1 iff the rows, read as t-bit integers, sum to at least `s`.
pub fn block_threshold(k: u32, alphabet: Alphabet, s: u64) -> SymmetricFunction {
    SymmetricFunction::from_fn(k, alphabet, |e| value_sum(e) >= s)
}

pub fn make_named(name: NamedFunction, k: usize, n: usize, alphabet: Alphabet) -> Result<ComposedSpec> {
    make_named_with(name, k, n, alphabet, TieRule::default())
}

pub fn make_named_with(
    name: NamedFunction,
    k: usize,
    n: usize,
    alphabet: Alphabet,
    tie: TieRule,
) -> Result<ComposedSpec> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidParameter("need k ≥ 1 and n ≥ 1".into()));
    }
    let rows = k as u32;
    let (f, g) = match name {
        NamedFunction::Gip => (OuterFunction::parity(n), block_and(rows, alphabet)),
        NamedFunction::Disj => (OuterFunction::nor(n), block_and(rows, alphabet)),
        NamedFunction::MajMaj => (OuterFunction::majority(n, tie), block_majority(rows, alphabet)),
        NamedFunction::MajThr { s } => (
            OuterFunction::majority(n, tie),
            block_threshold(rows, alphabet, s),
        ),
    };
    ComposedSpec::uniform(f, g, n)
}

/// `f(g_1(B_1), …, g_n(B_n))`, evaluated column by column.
pub fn direct_eval(spec: &ComposedSpec, m: &InputMatrix) -> Result<bool> {
    if m.k() != spec.k() || m.n() != spec.n() || m.alphabet() != spec.alphabet() {
        return Err(Error::DimensionMismatch(format!(
            "spec is for {}×{} over Z_{}, matrix is {}×{} over Z_{}",
            spec.k(),
            spec.n(),
            spec.alphabet().size(),
            m.k(),
            m.n(),
            m.alphabet().size()
        )));
    }
    direct_weight(spec, m).and_then(|w| spec.f().eval(w))
}

/// `Σ_j g_j(B_j)`.
pub fn direct_weight(spec: &ComposedSpec, m: &InputMatrix) -> Result<u64> {
    let mut w = 0;
    for (j, col) in m.columns().enumerate() {
        if spec.inner(j + 1).eval(&col)? {
            w += 1;
        }
    }
    Ok(w)
}

/// Uniformly random orbit table of a symmetric function on `k` rows of
/// t-bit patterns, seeded through ChaCha8.
pub fn random_symmetric(seed: u64, t: u32, k: u32) -> Result<SymmetricFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_symmetric_over(&mut rng, Alphabet::of_blocks(t)?, k))
}

pub fn random_symmetric_over<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: Alphabet,
    k: u32,
) -> SymmetricFunction {
    let orbits = TypeIndex::new(k, alphabet.nonzero()).len();
    let values = (0..orbits).map(|_| rng.gen()).collect();
    SymmetricFunction::from_values(k, alphabet, values).expect("orbit count matches")
}

/// Random outer function with one shared random inner function.
pub fn random_uniform_spec<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: Alphabet,
    k: usize,
    n: usize,
) -> Result<ComposedSpec> {
    let f = OuterFunction::random(n, rng);
    let g = random_symmetric_over(rng, alphabet, k as u32);
    ComposedSpec::uniform(f, g, n)
}

/// Random outer function with pairwise distinct random inner functions.
pub fn random_mixed_spec<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: Alphabet,
    k: usize,
    n: usize,
) -> Result<ComposedSpec> {
    let orbits = TypeIndex::new(k as u32, alphabet.nonzero()).len();
    if orbits < 64 && (1u64 << orbits) < n as u64 {
        return Err(Error::InvalidParameter(format!(
            "only 2^{orbits} symmetric functions exist, cannot pick {n} distinct ones"
        )));
    }
    let f = OuterFunction::random(n, rng);
    let mut inners: Vec<SymmetricFunction> = Vec::with_capacity(n);
    while inners.len() < n {
        let g = random_symmetric_over(rng, alphabet, k as u32);
        if !inners.contains(&g) {
            inners.push(g);
        }
    }
    ComposedSpec::new(f, inners, alphabet)
}
