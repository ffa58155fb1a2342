//! The full simultaneous protocol for `f ∘ (g_1, …, g_n)` with distinct
//! symmetric inner functions over `Z_d`.
//!
//! The input is read as a boolean matrix with blocks of `t = ⌈log₂ d⌉` bits.
//! Only the first `ℓ` rows take part in the counting; rows `ℓ+1..k` are
//! folded into the inner functions: `g̃_j(u) = g_j(u · v_j)` where `v_j` is the
//! bottom of block `j`. Each `g̃_j` expands over `F_p` in the monomial
//! symmetric basis, `g̃_j = Σ_a c_a(g̃_j) m_a`. For every sorted tuple `a`
//! the players run the equation-solving protocol on the matrix `M_a` holding
//! `c_a(g̃_j)` copies of the top block `B̃_j`; the referee turns each
//! recovered count vector into `Σ_j c_a(g̃_j) m_a(B̃_j)` and sums over `a`
//! modulo `p`, which is `Σ_j g_j(B_j)` exactly because that sum is at most
//! `n < p`.
//!
//! Players `1..=ℓ` see all of `v_j`, so they can compute the coefficients;
//! the referee never does.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::comb::{binomial, ceil_log2, count_width, log_threshold, meets_log_threshold};
use crate::deck::{DeletionStructure, SolverConfig};
use crate::eqsolve::{aggregate, recover_with, DeckVector, PlayerCountVector};
use crate::error::{Error, Result};
use crate::matrix::{
    boolean_encode, column_type_of, restrict_rows, Alphabet, BlockMatrix, ColumnType, InputMatrix,
    PlayerView, TypeIndex,
};
use crate::smp::{run_protocol, PlayerMode, PublicParams, Run, SimultaneousProtocol, Transcript};
use crate::symfun::{
    basis_coefficients, monomial_sym_eval_type, smallest_prime_in, sorted_tuples, PrimeModulus,
    SortedTuple, SymmetricFunction,
};
use crate::zoo::OuterFunction;

/// Outer function plus one inner function per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposedSpec {
    f: OuterFunction,
    inners: Vec<SymmetricFunction>,
    alphabet: Alphabet,
}

impl ComposedSpec {
    pub fn new(f: OuterFunction, inners: Vec<SymmetricFunction>, alphabet: Alphabet) -> Result<Self> {
        if inners.is_empty() || f.n() != inners.len() {
            return Err(Error::DimensionMismatch(format!(
                "outer function on {} bits with {} inner functions",
                f.n(),
                inners.len()
            )));
        }
        let k = inners[0].rows();
        if k == 0 || inners.iter().any(|g| g.rows() != k || g.alphabet() != alphabet) {
            return Err(Error::DimensionMismatch(
                "inner functions must share k ≥ 1 rows and the alphabet".into(),
            ));
        }
        Ok(Self { f, inners, alphabet })
    }

    pub fn uniform(f: OuterFunction, g: SymmetricFunction, n: usize) -> Result<Self> {
        let alphabet = g.alphabet();
        Self::new(f, vec![g; n], alphabet)
    }

    pub fn f(&self) -> &OuterFunction {
        &self.f
    }

    pub fn inners(&self) -> &[SymmetricFunction] {
        &self.inners
    }

    /// Inner function of block `j` (1-indexed).
    pub fn inner(&self, j: usize) -> &SymmetricFunction {
        &self.inners[j - 1]
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn k(&self) -> usize {
        self.inners[0].rows() as usize
    }

    pub fn n(&self) -> usize {
        self.inners.len()
    }

    pub fn is_uniform(&self) -> bool {
        self.inners.iter().all(|g| *g == self.inners[0])
    }
}

/// `g̃(u) = g(u · v)` on the top `ℓ` rows of a block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedInner {
    pub suffix: Vec<u32>,
    pub table: SymmetricFunction,
}

/// `g` acts on `k` symbols of `Z_d`; `suffix` holds the t-bit patterns of
/// rows `ℓ+1..=k`. Patterns outside `Z_d` send `g̃` to 0 wherever they occur.
pub fn induce_inner(g: &SymmetricFunction, suffix: &[u32]) -> Result<InducedInner> {
    let k = g.rows() as usize;
    if suffix.len() >= k {
        return Err(Error::InvalidParameter(format!(
            "suffix of {} rows leaves no prefix of a {k}-row block",
            suffix.len()
        )));
    }
    let ext = g.extend_to_blocks();
    let blocks = ext.alphabet();
    let tail = column_type_of(suffix.iter().copied(), blocks)?;
    let l = (k - suffix.len()) as u32;
    let table = SymmetricFunction::from_fn(l, blocks, |e| ext.eval_type(&e.add(&tail)));
    Ok(InducedInner {
        suffix: suffix.to_vec(),
        table,
    })
}

/// `M_a`: block `B̃_j` repeated `c_a(g̃_j)` times, `j` ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicatedMatrix {
    pub a: SortedTuple,
    /// Column patterns of each copied block, `ℓ` rows each.
    pub blocks: Vec<Vec<u32>>,
    /// Source block index of each copy.
    pub sources: Vec<usize>,
}

impl ReplicatedMatrix {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// The copies as an `ℓ × N_a` matrix over `Z_{2^t}`; `None` when empty.
    pub fn to_matrix(&self) -> Result<Option<InputMatrix>> {
        if self.blocks.is_empty() {
            return Ok(None);
        }
        InputMatrix::from_columns(Alphabet::of_blocks(self.a.t())?, &self.blocks).map(Some)
    }
}

/// `prefix_blocks[j]` is `B̃_{j+1}` as patterns; `coeffs[j]` its coefficient.
pub fn replicate(prefix_blocks: &[Vec<u32>], coeffs: &[u64], a: &SortedTuple) -> ReplicatedMatrix {
    assert_eq!(prefix_blocks.len(), coeffs.len(), "one coefficient per block");
    let mut blocks = Vec::new();
    let mut sources = Vec::new();
    for (j, (b, &c)) in prefix_blocks.iter().zip(coeffs).enumerate() {
        for _ in 0..c {
            blocks.push(b.clone());
            sources.push(j + 1);
        }
    }
    ReplicatedMatrix {
        a: a.clone(),
        blocks,
        sources,
    }
}

/// `N_a = Σ b / ℓ`: every block contributes to exactly `ℓ` view counts.
pub fn deduce_block_count(b: &DeckVector, l: usize) -> Result<u64> {
    let total = b.total();
    if l == 0 || total % l as u64 != 0 {
        return Err(Error::CorruptTranscript(format!(
            "deck total {total} is not a multiple of {l} players"
        )));
    }
    Ok(total / l as u64)
}

/// Player threshold of the full protocol: `ℓ ≥ 4^(2^t) · log₂ n`.
pub fn vec_sym_threshold_met(l: usize, t: u32, n: usize) -> bool {
    full_base(t).is_some_and(|base| meets_log_threshold(l as u64, base, n as u64))
}

fn full_base(t: u32) -> Option<u64> {
    4u64.checked_pow(1u32.checked_shl(t)?)
}

/// `min(k, ⌈4^(2^t) · log₂ n⌉)`.
pub fn default_l(k: usize, t: u32, n: usize) -> usize {
    match full_base(t) {
        Some(base) => usize::try_from(log_threshold(base, n as u64)).map_or(k, |l| l.min(k)),
        None => k,
    }
}

/// Cost figures for one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct FullCostBounds {
    /// `|Sor(t,ℓ)| · ℓ · C(ℓ+2^t−1, 2^t−1) · ⌈log₂(n(p−1)+1)⌉`: exactly what is sent.
    pub analytic: BigUint,
    /// `C(ℓ+2^t−1, 2^t−1)² · ℓ · ⌈log₂(2n²)⌉`.
    pub intermediate: BigUint,
    /// `4^(2^(t+2)) · (log₂ n)^(2·2^t)`.
    pub closed: f64,
}

pub fn analytic_cost_full(l: usize, t: u32, n: usize) -> Result<FullCostBounds> {
    if l == 0 || n == 0 || t == 0 {
        return Err(Error::InvalidParameter("need ℓ, t, n ≥ 1".into()));
    }
    let p = smallest_prime_in(n as u64)?;
    let dims = (1u64 << t) - 1;
    let slots = binomial(l as u64 + dims, dims);
    let square = &slots * &slots * BigUint::from(l);
    let bound = n as u64 * (p.p() - 1);
    let nn = 2 * (n as u64) * (n as u64);
    let closed = 4f64.powf((1u64 << (t + 2)) as f64) * (n as f64).log2().powf((2u64 << t) as f64);
    Ok(FullCostBounds {
        analytic: &square * count_width(bound),
        intermediate: square * ceil_log2(nn),
        closed,
    })
}

/// Referee output of the full protocol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullOutcome {
    pub value: bool,
    /// `Σ_j g_j(B_j)`, recovered modulo `p`.
    pub weight: u64,
    /// `N_a` per sorted tuple, canonical order.
    pub block_counts: Vec<u64>,
    /// `Σ_j c_a(g̃_j) m_a(B̃_j) mod p` per sorted tuple.
    pub partials: Vec<u64>,
}

type CoeffKey = (usize, ColumnType);

/// The protocol instance; runs on the pattern matrix over `Z_{2^t}`.
#[derive(Debug)]
pub struct FullProtocol {
    spec: ComposedSpec,
    blocks: Vec<SymmetricFunction>,
    /// Smallest `j′` with `g_{j′} = g_j`; shares coefficient work.
    inner_ids: Vec<usize>,
    params: PublicParams,
    l: usize,
    t: u32,
    p: PrimeModulus,
    tuples: Vec<SortedTuple>,
    sub_structure: Arc<DeletionStructure>,
    solver: SolverConfig,
    coeffs: Mutex<HashMap<CoeffKey, Arc<Vec<u64>>>>,
}

impl FullProtocol {
    pub fn new(spec: ComposedSpec, l: Option<usize>) -> Result<Self> {
        let (k, n) = (spec.k(), spec.n());
        let t = spec.alphabet().block_width();
        let l = l.unwrap_or_else(|| default_l(k, t, n));
        if l == 0 || l > k {
            return Err(Error::InvalidParameter(format!("need 1 ≤ ℓ ≤ k = {k}, got ℓ = {l}")));
        }
        let p = smallest_prime_in(n as u64)?;
        let blocks_alpha = Alphabet::of_blocks(t)?;
        let tuples = sorted_tuples(t, l as u32)?;
        let sub_index = TypeIndex::shared(l as u32, blocks_alpha.nonzero());
        let blocks = spec.inners().iter().map(SymmetricFunction::extend_to_blocks).collect();
        let inner_ids = (0..n)
            .map(|j| (0..=j).find(|&i| spec.inners()[i] == spec.inners()[j]).unwrap_or(j))
            .collect();
        Ok(Self {
            params: PublicParams {
                k,
                n,
                d: blocks_alpha.size(),
            },
            blocks,
            inner_ids,
            spec,
            l,
            t,
            p,
            tuples,
            sub_structure: Arc::new(DeletionStructure::from_index(sub_index)),
            solver: SolverConfig::default(),
            coeffs: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_solver(mut self, solver: SolverConfig) -> Self {
        self.solver = solver;
        self
    }

    pub fn spec(&self) -> &ComposedSpec {
        &self.spec
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn prime(&self) -> PrimeModulus {
        self.p
    }

    pub fn tuples(&self) -> &[SortedTuple] {
        &self.tuples
    }

    pub fn sub_runs(&self) -> usize {
        self.tuples.len()
    }

    fn segment(&self) -> usize {
        self.sub_structure.variable_count()
    }

    /// `c_a(g̃_j) mod p` for every `a`, given the bottom `k−ℓ` patterns of block `j`.
    pub fn coefficients(&self, j: usize, suffix: &[u32]) -> Result<Arc<Vec<u64>>> {
        let blocks = Alphabet::of_blocks(self.t)?;
        let key = (self.inner_ids[j - 1], column_type_of(suffix.iter().copied(), blocks)?);
        if let Some(c) = self.coeffs.lock().expect("cache lock").get(&key) {
            return Ok(c.clone());
        }
        let induced = induce_inner(&self.blocks[j - 1], suffix)?;
        let values = basis_coefficients(&induced.table, self.t, self.l as u32, self.p)?;
        let values = Arc::new(values.values().to_vec());
        self.coeffs
            .lock()
            .expect("cache lock")
            .entry(key)
            .or_insert(values.clone());
        Ok(values)
    }

    /// `M_a` built in the clear from the pattern matrix; for cross-checks only.
    pub fn replicated(&self, patterns: &InputMatrix, a_idx: usize) -> Result<ReplicatedMatrix> {
        let bm = BlockMatrix::from_patterns(self.t, patterns.rows().to_vec())?;
        let (prefix, suffixes) = restrict_rows(&bm, self.l)?;
        let prefix_blocks: Vec<Vec<u32>> = prefix.blocks().collect();
        let coeffs = suffixes
            .iter()
            .enumerate()
            .map(|(j, s)| self.coefficients(j + 1, s).map(|c| c[a_idx]))
            .collect::<Result<Vec<_>>>()?;
        Ok(replicate(&prefix_blocks, &coeffs, &self.tuples[a_idx]))
    }

    /// Deck of sub-run `a_idx` as the referee rebuilds it.
    pub fn sub_deck(&self, decoded: &[Vec<u64>], a_idx: usize) -> Result<DeckVector> {
        let seg = self.segment();
        let msgs: Vec<PlayerCountVector> = decoded
            .iter()
            .enumerate()
            .map(|(i, counts)| PlayerCountVector {
                player: i + 1,
                counts: counts[a_idx * seg..(a_idx + 1) * seg].to_vec(),
            })
            .collect();
        aggregate(&msgs, self.sub_structure.index().clone())
    }

    fn sub_referee(&self, decoded: &[Vec<u64>], a_idx: usize) -> Result<(u64, u64)> {
        let b = self.sub_deck(decoded, a_idx)?;
        let blocks = deduce_block_count(&b, self.l)?;
        if blocks > self.count_bound() {
            return Err(Error::CorruptTranscript(format!(
                "sub-run reports {blocks} blocks, more than n(p−1)"
            )));
        }
        let a = &self.tuples[a_idx];
        let y = recover_with(&self.sub_structure, &b, blocks, &self.solver).map_err(|e| match e {
            Error::Ambiguous => Error::SubrunAmbiguous { tuple: a.to_string() },
            other => other,
        })?;
        let p = BigUint::from(self.p.p());
        let mut acc = BigUint::from(0u32);
        for (e, count) in y.support() {
            acc += monomial_sym_eval_type(a, e) * count;
        }
        Ok((blocks, (acc % p).to_u64().expect("below p")))
    }
}

impl SimultaneousProtocol for FullProtocol {
    type Output = FullOutcome;

    fn id(&self) -> &str {
        "full"
    }

    fn params(&self) -> PublicParams {
        self.params
    }

    fn speakers(&self) -> usize {
        self.l
    }

    fn count_bound(&self) -> u64 {
        self.params.n as u64 * (self.p.p() - 1)
    }

    fn check_hypothesis(&self) -> Result<()> {
        if vec_sym_threshold_met(self.l, self.t, self.params.n) {
            Ok(())
        } else {
            Err(Error::InsufficientPlayers(format!(
                "ℓ = {} < 4^(2^{})·log₂ {} players",
                self.l, self.t, self.params.n
            )))
        }
    }

    fn message(&self, view: &PlayerView<'_>) -> Vec<u64> {
        let (k, l) = (self.params.k, self.l);
        let seg = self.segment();
        let blocks = Alphabet::of_blocks(self.t).expect("t valid");
        let index = self.sub_structure.index();
        let mut out = vec![0u64; self.tuples.len() * seg];
        for j in 1..=self.params.n {
            let suffix: Vec<u32> = view.visible_entries(j, l + 1..=k).collect();
            let coeffs = self.coefficients(j, &suffix).expect("suffix patterns valid");
            let top = column_type_of(view.visible_entries(j, 1..=l), blocks).expect("patterns valid");
            let slot = index.index_of(&top).expect("view type within index");
            for (a_idx, &c) in coeffs.iter().enumerate() {
                out[a_idx * seg + slot] += c;
            }
        }
        out
    }

    fn referee(&self, transcript: &Transcript) -> Result<FullOutcome> {
        let decoded = self.decode_transcript(transcript)?;
        let results: Vec<Result<(u64, u64)>> = (0..self.tuples.len())
            .into_par_iter()
            .map(|a_idx| self.sub_referee(&decoded, a_idx))
            .collect();
        let mut block_counts = Vec::with_capacity(results.len());
        let mut partials = Vec::with_capacity(results.len());
        for r in results {
            let (blocks, partial) = r?;
            block_counts.push(blocks);
            partials.push(partial);
        }
        let weight = partials.iter().fold(0, |acc, &v| (acc + v) % self.p.p());
        if weight > self.params.n as u64 {
            return Err(Error::CorruptTranscript(format!(
                "recovered weight {weight} exceeds n = {}",
                self.params.n
            )));
        }
        Ok(FullOutcome {
            value: self.spec.f().eval(weight)?,
            weight,
            block_counts,
            partials,
        })
    }

    fn analytic_bits(&self) -> u64 {
        let seg = self.segment() as u64;
        self.tuples.len() as u64 * self.l as u64 * seg * u64::from(count_width(self.count_bound()))
    }

    fn log_n_bits(&self) -> u64 {
        analytic_cost_full(self.l, self.t, self.params.n)
            .ok()
            .and_then(|b| b.intermediate.to_u64())
            .unwrap_or(u64::MAX)
    }
}

/// The input as t-bit patterns: one `Z_{2^t}` symbol per block row.
pub fn pattern_matrix(m: &InputMatrix) -> Result<InputMatrix> {
    boolean_encode(m, m.alphabet().block_width())?.to_pattern_matrix()
}

/// Runs the full protocol on `m`. In `Reduced` mode `ℓ` may sit below the
/// threshold; sub-run ambiguity then surfaces as `SubrunAmbiguous`.
pub fn run_full(
    m: &InputMatrix,
    spec: &ComposedSpec,
    l: Option<usize>,
    mode: PlayerMode,
) -> Result<Run<FullOutcome>> {
    if m.k() != spec.k() || m.n() != spec.n() || m.alphabet() != spec.alphabet() {
        return Err(Error::DimensionMismatch("matrix does not match the spec".into()));
    }
    let proto = FullProtocol::new(spec.clone(), l)?;
    run_protocol(&proto, &pattern_matrix(m)?, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqsolve::{player_message, CountVector, EqSolve};
    use crate::matrix::player_view;
    use crate::zoo::{direct_eval, direct_weight, make_named, random_symmetric_over, NamedFunction};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(d: u32) -> Alphabet {
        Alphabet::new(d).unwrap()
    }

    #[test]
    fn induce_examples() {
        let and = crate::zoo::block_and(4, z(2));
        let killed = induce_inner(&and, &[1, 0]).unwrap();
        assert!(killed.table.values().iter().all(|&v| !v));
        let kept = induce_inner(&and, &[1, 1]).unwrap();
        assert_eq!(kept.table.values(), &[false, false, true]);
        let same = induce_inner(&and, &[]).unwrap();
        assert_eq!(same.table, and);
        assert!(induce_inner(&and, &[1, 1, 1, 1]).is_err());
    }

    #[test]
    fn induce_matches_concatenation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (d, k, l) in [(2u32, 8u32, 5u32), (3, 6, 4), (4, 7, 6), (4, 5, 2)] {
            let g = random_symmetric_over(&mut rng, z(d), k);
            let ext = g.extend_to_blocks();
            let t = z(d).block_width();
            for _ in 0..5 {
                let suffix: Vec<u32> = (0..k - l).map(|_| rand::Rng::gen_range(&mut rng, 0..1 << t)).collect();
                let ind = induce_inner(&g, &suffix).unwrap();
                for x in 0u32..(1 << (t * l)) {
                    let u: Vec<u32> = (0..l).map(|r| (x >> (r * t)) & ((1 << t) - 1)).collect();
                    let full: Vec<u32> = u.iter().chain(&suffix).copied().collect();
                    let expect = if full.iter().any(|&v| v >= d) {
                        false
                    } else {
                        g.eval(&full).unwrap()
                    };
                    assert_eq!(ind.table.eval(&u).unwrap(), expect);
                    assert_eq!(ext.eval(&full).unwrap(), expect);
                }
            }
        }
    }

    #[test]
    fn replicate_examples() {
        let a = SortedTuple::new(1, vec![0, 1]).unwrap();
        let b = vec![vec![0, 1], vec![1, 1], vec![1, 0]];
        let r = replicate(&b, &[2, 0, 1], &a);
        assert_eq!(r.blocks, vec![vec![0, 1], vec![0, 1], vec![1, 0]]);
        assert_eq!(r.sources, vec![1, 1, 3]);
        let empty = replicate(&b, &[0, 0, 0], &a);
        assert_eq!(empty.block_count(), 0);
        assert_eq!(empty.to_matrix().unwrap(), None);
    }

    #[test]
    fn block_count_examples() {
        let index = TypeIndex::shared(4, 1);
        let b = DeckVector::new(index.clone(), vec![0; 4]).unwrap();
        assert_eq!(deduce_block_count(&b, 4).unwrap(), 0);
        let b = DeckVector::new(index.clone(), vec![4, 8, 0, 0]).unwrap();
        assert_eq!(deduce_block_count(&b, 4).unwrap(), 3);
        let b = DeckVector::new(index, vec![4, 7, 0, 0]).unwrap();
        assert!(matches!(deduce_block_count(&b, 4), Err(Error::CorruptTranscript(_))));
    }

    #[test]
    fn cost_bound_examples() {
        let c = analytic_cost_full(16, 1, 2).unwrap();
        assert_eq!(c.intermediate, BigUint::from(17u32 * 17 * 16 * 3));
        // n(p−1) = 4 needs 3 bits, as does 2n² − 1 = 7
        assert_eq!(c.analytic, c.intermediate);
        assert_eq!(c.closed, 65536.0);
        assert_eq!(sorted_tuples(1, 16).unwrap().len(), 17);
        assert_eq!(default_l(100, 1, 2), 16);
        assert_eq!(default_l(100, 1, 4), 32);
        assert_eq!(default_l(10, 2, 2), 10);
        for n in 2..=64usize {
            let l = default_l(usize::MAX, 1, n);
            let c = analytic_cost_full(l, 1, n).unwrap();
            assert!(c.analytic <= c.intermediate);
            assert!(c.intermediate.to_f64().unwrap() <= c.closed);
        }
        // from t = 2 on, C(ℓ+3,3)²·ℓ grows like ℓ^7 and overtakes 4^16·log⁸ n
        for n in 2..=64usize {
            let l = default_l(usize::MAX, 2, n);
            let c = analytic_cost_full(l, 2, n).unwrap();
            assert!(c.analytic <= c.intermediate);
            assert!(c.intermediate.to_f64().unwrap() > c.closed);
        }
    }

    #[test]
    fn full_protocol_small_t1() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for name in [NamedFunction::Gip, NamedFunction::Disj, NamedFunction::MajMaj] {
            let spec = make_named(name, 16, 2, z(2)).unwrap();
            for _ in 0..3 {
                let m = InputMatrix::random(z(2), 16, 2, &mut rng);
                let run = run_full(&m, &spec, None, PlayerMode::Strict).unwrap();
                assert_eq!(run.transcript.messages().len(), 16);
                let out = run.outcome.unwrap();
                assert_eq!(out.weight, direct_weight(&spec, &m).unwrap());
                assert_eq!(out.value, direct_eval(&spec, &m).unwrap());
                assert_eq!(run.cost.total_bits, run.cost.analytic_bits);
                assert!(run.cost.total_bits <= run.cost.log_n_bits);
            }
        }
    }

    #[test]
    fn zero_inner_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = SymmetricFunction::constant(6, z(2), false);
        let spec = ComposedSpec::uniform(crate::zoo::OuterFunction::nor(3), g, 3).unwrap();
        let m = InputMatrix::random(z(2), 6, 3, &mut rng);
        let out = run_full(&m, &spec, Some(6), PlayerMode::Reduced).unwrap().outcome.unwrap();
        assert!(out.block_counts.iter().all(|&c| c == 0));
        assert!(out.value);
    }

    #[test]
    fn segments_match_eqsolve_on_replicated_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let spec = crate::zoo::random_mixed_spec(&mut rng, z(3), 6, 3).unwrap();
        let m = InputMatrix::random(z(3), 6, 3, &mut rng);
        let proto = FullProtocol::new(spec, Some(4)).unwrap();
        let pm = pattern_matrix(&m).unwrap();
        let run = run_protocol(&proto, &pm, PlayerMode::Reduced).unwrap();
        let decoded = proto.decode_transcript(&run.transcript).unwrap();
        let seg = proto.segment();
        for a_idx in 0..proto.sub_runs() {
            let rep = proto.replicated(&pm, a_idx).unwrap();
            let b = proto.sub_deck(&decoded, a_idx).unwrap();
            assert_eq!(deduce_block_count(&b, 4).unwrap(), rep.block_count() as u64);
            let Some(ma) = rep.to_matrix().unwrap() else {
                assert_eq!(b.total(), 0);
                continue;
            };
            let eq = EqSolve::new(4, ma.n(), ma.alphabet()).unwrap();
            for i in 1..=4 {
                let direct = player_message(&player_view(&ma, i).unwrap(), eq.index());
                assert_eq!(direct.counts, decoded[i - 1][a_idx * seg..(a_idx + 1) * seg]);
            }
            assert_eq!(DeckVector::of_counts(&CountVector::direct(&ma)), b);
        }
    }

    #[test]
    fn strict_mode_checks_l() {
        let spec = make_named(NamedFunction::Gip, 8, 2, z(2)).unwrap();
        let m = InputMatrix::zeros(z(2), 8, 2).unwrap();
        assert!(matches!(
            run_full(&m, &spec, None, PlayerMode::Strict),
            Err(Error::InsufficientPlayers(_))
        ));
        assert!(FullProtocol::new(spec.clone(), Some(9)).is_err());
        assert!(run_full(&m, &spec, None, PlayerMode::Reduced).is_ok());
    }
}
