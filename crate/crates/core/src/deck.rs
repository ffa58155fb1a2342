//! Exact integral solving of the deletion-deck system.
//!
//! Unknowns are the column-type counts `y_e` for every type of level `≤ k`;
//! there is one equation per type of level `≤ k−1`. A column of type `e`
//! contributes `k−|e|` to equation `e` (deleting a zero row) and `e_s` to
//! equation `e − unit_s` (deleting a row holding symbol `s`).
//!
//! Every contribution is nonnegative, which is what makes the pruned search
//! in [`solve_unique`] complete:
//!
//! * a type can appear in a solution only if each of its deletions indexes a
//!   strictly positive right-hand side (otherwise one positive contribution
//!   would already overshoot a zero entry), so the search ranges over those
//!   candidate types only;
//! * partial assignments are abandoned as soon as any residual goes negative,
//!   since later columns can only subtract more;
//! * when a candidate is the last one (in search order) touching some
//!   equation, that equation's residual must be cleared by it alone, which
//!   forces its multiplicity.
//!
//! Branches are explored in canonical type order, so node counts and
//! `LimitExceeded` outcomes are reproducible.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::comb::binomial;
use crate::eqsolve::{deletions, dump_lines, CountVector, DeckVector};
use crate::error::{Error, Result};
use crate::matrix::{ColumnType, TypeIndex};

/// Coefficient structure of the system, shared by all right-hand sides with
/// the same `k` and `D`.
#[derive(Debug, Clone)]
pub struct DeletionStructure {
    index: Arc<TypeIndex>,
    equations: usize,
    /// Per variable: `(equation, coefficient)`.
    terms: Vec<Vec<(usize, u64)>>,
}

impl DeletionStructure {
    pub fn new(k: u32, nonzero: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("deletion system needs k ≥ 1".into()));
        }
        Ok(Self::from_index(TypeIndex::shared(k, nonzero)))
    }

    pub fn from_index(index: Arc<TypeIndex>) -> Self {
        let k = index.max_level();
        let equations = index.prefix_len(k - 1);
        let terms = index.types().iter().map(|e| deletions(&index, e)).collect();
        Self {
            index,
            equations,
            terms,
        }
    }

    pub fn index(&self) -> &Arc<TypeIndex> {
        &self.index
    }

    pub fn k(&self) -> u32 {
        self.index.max_level()
    }

    pub fn nonzero(&self) -> usize {
        self.index.nonzero()
    }

    pub fn equation_count(&self) -> usize {
        self.equations
    }

    pub fn variable_count(&self) -> usize {
        self.index.len()
    }

    /// Equations touched by variable `var`, with coefficients.
    pub fn terms(&self, var: usize) -> &[(usize, u64)] {
        &self.terms[var]
    }

    /// `(variable, coefficient)` pairs of equation `eq`.
    pub fn equation(&self, eq: usize) -> Vec<(usize, u64)> {
        let e = self.index.get(eq);
        let k = self.k();
        let mut out = vec![(eq, u64::from(k - e.level()))];
        for s in 1..=e.nonzero() {
            let up = self.index.index_of(&e.plus_unit(s)).expect("level ≤ k");
            out.push((up, u64::from(e.get(s) + 1)));
        }
        out
    }

    /// Left-hand sides for an assignment of every variable.
    pub fn apply(&self, y: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.equations];
        for (var, &count) in y.iter().enumerate() {
            if count > 0 {
                for &(eq, coef) in &self.terms[var] {
                    out[eq] += coef * count;
                }
            }
        }
        out
    }

    /// Left-hand sides over signed integers.
    pub fn apply_signed(&self, z: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.equations];
        for (var, v) in z.iter().enumerate() {
            if !v.is_zero() {
                for &(eq, coef) in &self.terms[var] {
                    out[eq] += v * BigInt::from(coef);
                }
            }
        }
        out
    }
}

/// The system together with a right-hand side.
#[derive(Debug, Clone)]
pub struct DeletionSystem {
    structure: Arc<DeletionStructure>,
    rhs: Vec<u64>,
}

impl DeletionSystem {
    pub fn new(structure: Arc<DeletionStructure>, b: &DeckVector) -> Result<Self> {
        if b.k() != structure.k() || b.nonzero() != structure.nonzero() {
            return Err(Error::DimensionMismatch(format!(
                "deck for k = {}, D = {} against system for k = {}, D = {}",
                b.k(),
                b.nonzero(),
                structure.k(),
                structure.nonzero()
            )));
        }
        Ok(Self {
            structure,
            rhs: b.values().to_vec(),
        })
    }

    pub fn structure(&self) -> &Arc<DeletionStructure> {
        &self.structure
    }

    pub fn rhs(&self) -> &[u64] {
        &self.rhs
    }

    pub fn is_solution(&self, y: &[u64]) -> bool {
        y.len() == self.structure.variable_count() && self.structure.apply(y) == self.rhs
    }
}

/// Builds the system for a deck given as raw values over levels `≤ k−1`.
pub fn build_system(values: &[u64], k: u32, nonzero: usize) -> Result<DeletionSystem> {
    let structure = Arc::new(DeletionStructure::new(k, nonzero)?);
    let b = DeckVector::new(structure.index().clone(), values.to_vec())?;
    DeletionSystem::new(structure, &b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MultiplicityOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub detect_ambiguity: bool,
    pub node_limit: u64,
    pub order: MultiplicityOrder,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            detect_ambiguity: true,
            node_limit: 10_000_000,
            order: MultiplicityOrder::Ascending,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.node_limit == 0 {
            return Err(Error::InvalidParameter("node_limit must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Unique(CountVector),
    Ambiguous(CountVector, CountVector),
    NoSolution,
}

/// Support filter: types whose every deletion hits a positive entry.
pub fn candidate_types(sys: &DeletionSystem) -> Vec<usize> {
    let st = &sys.structure;
    (0..st.variable_count())
        .filter(|&v| st.terms(v).iter().all(|&(eq, _)| sys.rhs[eq] > 0))
        .collect()
}

struct Search<'a> {
    cands: &'a [usize],
    terms: Vec<&'a [(usize, u64)]>,
    /// Per position: terms whose equation this candidate closes.
    closes: Vec<Vec<(usize, u64)>>,
    residual: Vec<u64>,
    chosen: Vec<u64>,
    nodes: u64,
    limit: u64,
    want: usize,
    order: MultiplicityOrder,
    found: Vec<Vec<u64>>,
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.found.len() >= self.want
    }

    fn dfs(&mut self, pos: usize, remaining: u64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::LimitExceeded { limit: self.limit });
        }
        if pos == self.cands.len() {
            if remaining == 0 {
                self.found.push(self.chosen.clone());
            }
            return Ok(());
        }
        let terms = self.terms[pos];
        let cap = terms
            .iter()
            .map(|&(eq, c)| self.residual[eq] / c)
            .min()
            .unwrap_or(0)
            .min(remaining);
        if let Some(&(eq, c)) = self.closes[pos].first() {
            let r = self.residual[eq];
            if r % c != 0 || r / c > cap {
                return Ok(());
            }
            let m = r / c;
            if self.closes[pos].iter().any(|&(q, cq)| self.residual[q] != m * cq) {
                return Ok(());
            }
            return self.descend(pos, m, remaining);
        }
        match self.order {
            MultiplicityOrder::Ascending => {
                for m in 0..=cap {
                    self.descend(pos, m, remaining)?;
                    if self.done() {
                        break;
                    }
                }
            }
            MultiplicityOrder::Descending => {
                for m in (0..=cap).rev() {
                    self.descend(pos, m, remaining)?;
                    if self.done() {
                        break;
                    }
                }
            }
        }
        Ok(())
    }

    fn descend(&mut self, pos: usize, m: u64, remaining: u64) -> Result<()> {
        let terms = self.terms[pos];
        for &(eq, c) in terms {
            self.residual[eq] -= m * c;
        }
        self.chosen[pos] = m;
        let res = self.dfs(pos + 1, remaining - m);
        self.chosen[pos] = 0;
        for &(eq, c) in terms {
            self.residual[eq] += m * c;
        }
        res
    }
}

/// Nonnegative integral solutions with `Σ y = n`: the unique one, two
/// distinct ones, or none.
pub fn solve_unique(sys: &DeletionSystem, n: u64, config: &SolverConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let st = &sys.structure;
    let k = u64::from(st.k());
    let total: u64 = sys.rhs.iter().sum();
    if Some(total) != k.checked_mul(n) {
        return Ok(SolveOutcome::NoSolution);
    }
    let cands = candidate_types(sys);
    let mut last = vec![usize::MAX; st.equation_count()];
    for (pos, &v) in cands.iter().enumerate() {
        for &(eq, _) in st.terms(v) {
            last[eq] = pos;
        }
    }
    if sys
        .rhs
        .iter()
        .zip(&last)
        .any(|(&b, &l)| b > 0 && l == usize::MAX)
    {
        return Ok(SolveOutcome::NoSolution);
    }
    let closes = cands
        .iter()
        .enumerate()
        .map(|(pos, &v)| {
            st.terms(v)
                .iter()
                .copied()
                .filter(|&(eq, _)| last[eq] == pos)
                .collect()
        })
        .collect();
    let mut search = Search {
        cands: &cands,
        terms: cands.iter().map(|&v| st.terms(v)).collect(),
        closes,
        residual: sys.rhs.clone(),
        chosen: vec![0; cands.len()],
        nodes: 0,
        limit: config.node_limit,
        want: if config.detect_ambiguity { 2 } else { 1 },
        order: config.order,
        found: Vec::new(),
    };
    search.dfs(0, n)?;
    let expand = |chosen: &[u64]| {
        let mut y = vec![0; st.variable_count()];
        for (&v, &m) in cands.iter().zip(chosen) {
            y[v] = m;
        }
        CountVector::new(st.index().clone(), y).expect("full length")
    };
    let mut found = search.found.iter().map(|c| expand(c));
    Ok(match (found.next(), found.next()) {
        (None, _) => SolveOutcome::NoSolution,
        (Some(y), None) => SolveOutcome::Unique(y),
        (Some(a), Some(b)) => SolveOutcome::Ambiguous(a, b),
    })
}

/// Every nonnegative integral solution with `Σ y = n`, by enumerating all
/// `n`-multisets of column types. Independent of [`solve_unique`].
pub fn brute_force_solutions(b: &DeckVector, n: u64, limit: u64) -> Result<Vec<CountVector>> {
    let index = b.index().clone();
    let vars = index.len() as u64;
    let space = binomial(vars + n.max(1) - 1, n);
    if space > BigUint::from(limit) {
        return Err(Error::LimitExceeded { limit });
    }
    let structure = DeletionStructure::from_index(index.clone());
    let mut y = vec![0u64; index.len()];
    let mut out = Vec::new();
    enumerate_multisets(&mut y, 0, n, &mut |y| {
        if structure.apply(y) == b.values() {
            out.push(CountVector::new(index.clone(), y.to_vec()).expect("full length"));
        }
    });
    Ok(out)
}

fn enumerate_multisets(y: &mut [u64], from: usize, left: u64, visit: &mut impl FnMut(&[u64])) {
    if left == 0 {
        visit(y);
        return;
    }
    for v in from..y.len() {
        y[v] += 1;
        enumerate_multisets(y, v, left - 1, visit);
        y[v] -= 1;
    }
}

/// Integral `z` with `(k−|e|)z_e + Σ_s (e_s+1) z_{e+unit_s} = 0` for every
/// `|e| ≤ k−1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousWitness {
    index: Arc<TypeIndex>,
    values: Vec<BigInt>,
}

impl HomogeneousWitness {
    pub fn new(index: Arc<TypeIndex>, values: Vec<BigInt>) -> Result<Self> {
        if values.len() != index.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} types",
                values.len(),
                index.len()
            )));
        }
        Ok(Self { index, values })
    }

    pub fn index(&self) -> &Arc<TypeIndex> {
        &self.index
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn get(&self, e: &ColumnType) -> BigInt {
        self.index
            .index_of(e)
            .map_or_else(BigInt::zero, |i| self.values[i].clone())
    }

    pub fn l1(&self) -> BigUint {
        self.values.iter().map(|v| v.magnitude().clone()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn satisfies_kernel(&self) -> bool {
        DeletionStructure::from_index(self.index.clone())
            .apply_signed(&self.values)
            .iter()
            .all(Zero::is_zero)
    }

    /// Positive and negative parts as column counts: two multisets of
    /// equal size with equal decks.
    pub fn split(&self) -> Option<(CountVector, CountVector)> {
        let mut pos = Vec::with_capacity(self.values.len());
        let mut neg = Vec::with_capacity(self.values.len());
        for v in &self.values {
            let m = v.magnitude().to_u64()?;
            if v.is_negative() {
                pos.push(0);
                neg.push(m);
            } else {
                pos.push(m);
                neg.push(0);
            }
        }
        Some((
            CountVector::new(self.index.clone(), pos).ok()?,
            CountVector::new(self.index.clone(), neg).ok()?,
        ))
    }

    pub fn to_dump(&self) -> String {
        dump_lines(self.index.types(), self.values.iter().map(BigInt::to_string))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomogeneousOutcome {
    /// A nonzero solution of minimal L1 norm among those within the bound.
    Witness(HomogeneousWitness),
    /// Exhaustive search found nothing; `explored` level-`k` assignments.
    Absent { explored: u64 },
}

/// Searches for a nonzero integral kernel element with L1 norm at most
/// `l1_bound`.
///
/// A kernel element is determined by its level-`k` entries: equation `e`
/// gives `z_e = −Σ_s (e_s+1) z_{e+unit_s} / (k−|e|)`, so the search
/// enumerates level-`k` assignments by increasing L1 and propagates downward,
/// rejecting non-integral quotients. `limit` caps the number of assignments.
pub fn homogeneous_search(
    k: u32,
    nonzero: usize,
    l1_bound: u64,
    limit: u64,
) -> Result<HomogeneousOutcome> {
    if k == 0 {
        return Err(Error::InvalidParameter("need k ≥ 1".into()));
    }
    if nonzero == 0 {
        return Err(Error::InvalidParameter("need at least one nonzero symbol".into()));
    }
    let index = TypeIndex::shared(k, nonzero);
    let top_start = index.prefix_len(k - 1);
    let ups: Vec<Vec<(usize, i128)>> = index.types()[..top_start]
        .iter()
        .map(|e| {
            (1..=nonzero)
                .map(|s| {
                    let up = index.index_of(&e.plus_unit(s)).expect("level ≤ k");
                    (up, i128::from(e.get(s) + 1))
                })
                .collect()
        })
        .collect();
    let mut state = Homogeneous {
        k,
        index: index.clone(),
        ups,
        top_start,
        z: vec![0; index.len()],
        explored: 0,
        limit,
        best: None,
        cap: l1_bound,
    };
    let free = index.len() - top_start;
    let mut s = 1;
    while s <= l1_bound {
        if let Some((l1, _)) = &state.best {
            if *l1 <= s {
                break;
            }
        }
        state.assign(0, free, s)?;
        s += 1;
    }
    Ok(match state.best {
        Some((_, z)) => HomogeneousOutcome::Witness(HomogeneousWitness::new(
            index,
            z.into_iter().map(BigInt::from).collect(),
        )?),
        None => HomogeneousOutcome::Absent {
            explored: state.explored,
        },
    })
}

struct Homogeneous {
    k: u32,
    index: Arc<TypeIndex>,
    ups: Vec<Vec<(usize, i128)>>,
    top_start: usize,
    z: Vec<i128>,
    explored: u64,
    limit: u64,
    best: Option<(u64, Vec<i128>)>,
    cap: u64,
}

impl Homogeneous {
    /// Distributes L1 mass `left` over free variables `i..free`.
    fn assign(&mut self, i: usize, free: usize, left: u64) -> Result<()> {
        let slot = self.top_start + i;
        if i + 1 == free {
            for sign in [1i128, -1] {
                self.z[slot] = sign * i128::from(left);
                self.evaluate()?;
            }
            self.z[slot] = 0;
            return Ok(());
        }
        for mag in 0..=left {
            let signs: &[i128] = if mag == 0 { &[1] } else { &[1, -1] };
            for &sign in signs {
                self.z[slot] = sign * i128::from(mag);
                self.assign(i + 1, free, left - mag)?;
            }
        }
        self.z[slot] = 0;
        Ok(())
    }

    fn evaluate(&mut self) -> Result<()> {
        self.explored += 1;
        if self.explored > self.limit {
            return Err(Error::LimitExceeded { limit: self.limit });
        }
        let cap = match &self.best {
            Some((l1, _)) => l1.saturating_sub(1).min(self.cap),
            None => self.cap,
        };
        let mut l1: u64 = self.z[self.top_start..]
            .iter()
            .map(|v| v.unsigned_abs() as u64)
            .sum();
        // levels k−1 down to 0; types are stored level-major
        for level in (0..self.k).rev() {
            let lo = if level == 0 { 0 } else { self.index.prefix_len(level - 1) };
            let hi = self.index.prefix_len(level);
            let div = i128::from(self.k - level);
            for idx in lo..hi {
                let mut sum: i128 = 0;
                for &(up, c) in &self.ups[idx] {
                    sum += c * self.z[up];
                }
                if sum % div != 0 {
                    return Ok(());
                }
                let v = -sum / div;
                l1 += v.unsigned_abs() as u64;
                if l1 > cap {
                    return Ok(());
                }
                self.z[idx] = v;
            }
        }
        self.best = Some((l1, self.z.clone()));
        Ok(())
    }
}

/// Explicit kernel element for one nonzero symbol:
/// `z_i = (−1)^i · C(k, i) · z0`.
pub fn d1_closed_form(z0: &BigInt, k: u32) -> Result<HomogeneousWitness> {
    if k == 0 {
        return Err(Error::InvalidParameter("need k ≥ 1".into()));
    }
    let index = TypeIndex::shared(k, 1);
    let values = (0..=k)
        .map(|i| {
            let v = BigInt::from(binomial(u64::from(k), u64::from(i))) * z0;
            if i % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    HomogeneousWitness::new(index, values)
}
