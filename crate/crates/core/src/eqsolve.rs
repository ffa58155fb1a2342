//! The equation-solving protocol for symmetric composed functions.
//!
//! Player `i` reports, for every column type `e`, how many columns have type
//! `e` on the `k−1` rows the player sees. Summed over players these counts form the
//! deck `b` of the true column-type counts `y`:
//!
//! ```text
//! (k − |e|)·y_e + Σ_s (e_s + 1)·y_{e + unit_s} = b_e      for |e| ≤ k−1
//! ```
//!
//! and the referee recovers `y` as the unique nonnegative integral solution
//! with `Σ y = n` (see [`crate::deck`]). Messages are laid out over all
//! `C(k+D, D)` types of level `≤ k`; the level-`k` slots are always zero
//! because a player never sees a whole column.

use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use crate::comb::{binomial_u64, ceil_log2, count_width, floor_pow2_ratio, meets_log_threshold};
use crate::deck::{solve_unique, DeletionStructure, DeletionSystem, SolveOutcome, SolverConfig};
use crate::error::{Error, Result};
use crate::matrix::{Alphabet, ColumnType, InputMatrix, PlayerView, TypeIndex};
use crate::smp::{run_protocol, CostReport, PlayerMode, PublicParams, SimultaneousProtocol, Transcript};
use crate::symfun::SymmetricFunction;
use crate::zoo::OuterFunction;

/// Number of columns of each type of level `≤ k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector {
    index: Arc<TypeIndex>,
    values: Vec<u64>,
}

impl CountVector {
    pub fn new(index: Arc<TypeIndex>, values: Vec<u64>) -> Result<Self> {
        if values.len() != index.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} counts for {} types",
                values.len(),
                index.len()
            )));
        }
        Ok(Self { index, values })
    }

    pub fn zeros(index: Arc<TypeIndex>) -> Self {
        let values = vec![0; index.len()];
        Self { index, values }
    }

    /// Direct column-type counting; the oracle for referee recovery.
    pub fn direct(m: &InputMatrix) -> Self {
        Self::direct_with(TypeIndex::shared(m.k() as u32, m.alphabet().nonzero()), m)
    }

    pub fn direct_with(index: Arc<TypeIndex>, m: &InputMatrix) -> Self {
        let mut y = Self::zeros(index);
        for e in m.column_types() {
            y.add_columns(&e, 1);
        }
        y
    }

    pub fn index(&self) -> &Arc<TypeIndex> {
        &self.index
    }

    pub fn k(&self) -> u32 {
        self.index.max_level()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn get(&self, e: &ColumnType) -> u64 {
        self.index.index_of(e).map_or(0, |i| self.values[i])
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }

    pub fn add_columns(&mut self, e: &ColumnType, count: u64) {
        let i = self.index.index_of(e).expect("type within index");
        self.values[i] += count;
    }

    /// Nonzero entries in canonical order.
    pub fn support(&self) -> impl Iterator<Item = (&ColumnType, u64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .map(|(i, &v)| (self.index.get(i), v))
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.index.len() != other.index.len() || self.k() != other.k() {
            return Err(Error::DimensionMismatch("count vectors over different types".into()));
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(())
    }

    /// Dump format: `e_1 … e_D : value` per type, canonical order.
    pub fn to_dump(&self) -> String {
        dump_lines(self.index.types(), self.values.iter().map(u64::to_string))
    }
}

pub(crate) fn dump_lines(types: &[ColumnType], values: impl Iterator<Item = String>) -> String {
    let mut s = String::new();
    for (e, v) in types.iter().zip(values) {
        let parts: Vec<String> = e.counts().iter().map(u32::to_string).collect();
        s.push_str(&parts.join(" "));
        s.push_str(" : ");
        s.push_str(&v);
        s.push('\n');
    }
    s
}

impl fmt::Display for CountVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.support().map(|(e, v)| format!("{e}={v}")).collect();
        write!(f, "{{{}}}", parts.join(" "))
    }
}

/// Aggregated counts `b_e` for every type of level `≤ k−1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeckVector {
    index: Arc<TypeIndex>,
    values: Vec<u64>,
}

impl DeckVector {
    /// `index` covers level `≤ k`; `values` the prefix of level `≤ k−1`.
    pub fn new(index: Arc<TypeIndex>, values: Vec<u64>) -> Result<Self> {
        let k = index.max_level();
        if k == 0 {
            return Err(Error::InvalidParameter("deck needs k ≥ 1".into()));
        }
        let expect = index.prefix_len(k - 1);
        if values.len() != expect {
            return Err(Error::InvalidInput(format!(
                "deck has {} entries, expected one per type of level ≤ {}: {expect}",
                values.len(),
                k - 1
            )));
        }
        Ok(Self { index, values })
    }

    /// The deletion operator applied to `y`.
    pub fn of_counts(y: &CountVector) -> Self {
        let index = y.index.clone();
        let k = index.max_level();
        let mut values = vec![0; index.prefix_len(k - 1)];
        for (e, count) in y.support() {
            for (eq, coef) in deletions(&index, e) {
                values[eq] += coef * count;
            }
        }
        Self { index, values }
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

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn get(&self, e: &ColumnType) -> u64 {
        self.index
            .index_of(e)
            .and_then(|i| self.values.get(i).copied())
            .unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }
}

/// Equations a column of type `e` contributes to, with multiplicity: the
/// view types obtained by deleting one row of the column.
pub(crate) fn deletions(index: &TypeIndex, e: &ColumnType) -> Vec<(usize, u64)> {
    let k = index.max_level();
    let mut out = Vec::with_capacity(e.nonzero() + 1);
    if e.level() < k {
        out.push((index.index_of(e).expect("type in index"), u64::from(k - e.level())));
    }
    for s in 1..=e.nonzero() {
        if let Some(smaller) = e.minus_unit(s) {
            out.push((
                index.index_of(&smaller).expect("type in index"),
                u64::from(e.get(s)),
            ));
        }
    }
    out
}

/// Player `i`'s counts `a^i_e` from their point of view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerCountVector {
    pub player: usize,
    /// One entry per type of level `≤ k`, canonical order.
    pub counts: Vec<u64>,
}

pub fn player_message(view: &PlayerView<'_>, index: &TypeIndex) -> PlayerCountVector {
    let mut counts = vec![0u64; index.len()];
    for j in 1..=view.n() {
        let e = view.column_type(j);
        counts[index.index_of(&e).expect("view type within index")] += 1;
    }
    PlayerCountVector {
        player: view.player(),
        counts,
    }
}

/// `b_e = Σ_i a^i_e`; requires exactly one message from each of players `1..=k`.
pub fn aggregate(messages: &[PlayerCountVector], index: Arc<TypeIndex>) -> Result<DeckVector> {
    let k = index.max_level() as usize;
    for i in 1..=k {
        if messages.get(i - 1).map(|m| m.player) != Some(i) {
            return Err(Error::MissingMessage(i));
        }
    }
    if messages.len() != k {
        return Err(Error::CorruptTranscript(format!(
            "{} messages for {k} players",
            messages.len()
        )));
    }
    let eqs = index.prefix_len(k as u32 - 1);
    let mut values = vec![0u64; eqs];
    for m in messages {
        if m.counts.len() != index.len() {
            return Err(Error::CorruptTranscript(format!(
                "player {} sent {} counts, expected {}",
                m.player,
                m.counts.len(),
                index.len()
            )));
        }
        if m.counts[eqs..].iter().any(|&c| c != 0) {
            return Err(Error::CorruptTranscript(format!(
                "player {} reports a column type involving the hidden row",
                m.player
            )));
        }
        for (b, a) in values.iter_mut().zip(&m.counts) {
            *b += a;
        }
    }
    DeckVector::new(index, values)
}

/// The unique `y` consistent with the deck and `Σ y = n`.
pub fn referee_recover(b: &DeckVector, n: u64, config: &SolverConfig) -> Result<CountVector> {
    let structure = Arc::new(DeletionStructure::from_index(b.index().clone()));
    recover_with(&structure, b, n, config)
}

pub(crate) fn recover_with(
    structure: &Arc<DeletionStructure>,
    b: &DeckVector,
    n: u64,
    config: &SolverConfig,
) -> Result<CountVector> {
    let sys = DeletionSystem::new(structure.clone(), b)?;
    match solve_unique(&sys, n, config)? {
        SolveOutcome::Unique(y) => Ok(y),
        SolveOutcome::Ambiguous(..) => Err(Error::Ambiguous),
        SolveOutcome::NoSolution => Err(Error::NoSolution),
    }
}

/// `f(Σ_{e : g(e) = 1} y_e)`.
pub fn evaluate_sym_composed(
    y: &CountVector,
    f: &OuterFunction,
    g: &SymmetricFunction,
) -> Result<bool> {
    if g.rows() != y.k() || g.alphabet().nonzero() != y.index().nonzero() {
        return Err(Error::DimensionMismatch(
            "inner function does not act on these column types".into(),
        ));
    }
    let weight: u64 = y.support().filter(|(e, _)| g.eval_type(e)).map(|(_, c)| c).sum();
    f.eval(weight)
}

/// Player threshold of the equation-solving protocol over an alphabet with
/// `nonzero` nonzero symbols: `k ≥ 4^D · log₂ n`.
pub fn sym_sym_threshold_met(k: usize, nonzero: usize, n: usize) -> bool {
    meets_log_threshold(k as u64, 4u64.pow(nonzero as u32), n as u64)
}

/// `k · C(k+D, D) · ⌈log₂(n+1)⌉`.
pub fn analytic_cost(k: usize, nonzero: usize, n: usize) -> u64 {
    message_slots(k, nonzero) * k as u64 * u64::from(count_width(n as u64))
}

/// `k · C(k+D, D) · ⌈log₂ n⌉`.
pub fn log_n_cost(k: usize, nonzero: usize, n: usize) -> u64 {
    message_slots(k, nonzero) * k as u64 * u64::from(ceil_log2(n as u64))
}

fn message_slots(k: usize, nonzero: usize) -> u64 {
    binomial_u64(k as u64 + nonzero as u64, nonzero as u64)
}

/// The equation-solving protocol on a `k × n` matrix over `Z_d`.
#[derive(Debug, Clone)]
pub struct EqSolve {
    params: PublicParams,
    alphabet: Alphabet,
    index: Arc<TypeIndex>,
    structure: Arc<DeletionStructure>,
    solver: SolverConfig,
}

impl EqSolve {
    pub fn new(k: usize, n: usize, alphabet: Alphabet) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::InvalidParameter("need k ≥ 1 and n ≥ 1".into()));
        }
        let index = TypeIndex::shared(k as u32, alphabet.nonzero());
        let structure = Arc::new(DeletionStructure::from_index(index.clone()));
        Ok(Self {
            params: PublicParams {
                k,
                n,
                d: alphabet.size(),
            },
            alphabet,
            index,
            structure,
            solver: SolverConfig::default(),
        })
    }

    pub fn with_solver(mut self, solver: SolverConfig) -> Self {
        self.solver = solver;
        self
    }

    pub fn index(&self) -> &Arc<TypeIndex> {
        &self.index
    }

    pub fn nonzero(&self) -> usize {
        self.alphabet.nonzero()
    }

    /// Deck vector the referee would build from a transcript of this protocol.
    pub fn deck(&self, transcript: &Transcript) -> Result<DeckVector> {
        let msgs: Vec<PlayerCountVector> = self
            .decode_transcript(transcript)?
            .into_iter()
            .enumerate()
            .map(|(i, counts)| PlayerCountVector {
                player: i + 1,
                counts,
            })
            .collect();
        aggregate(&msgs, self.index.clone())
    }
}

impl SimultaneousProtocol for EqSolve {
    type Output = CountVector;

    fn id(&self) -> &str {
        "eqsolve"
    }

    fn params(&self) -> PublicParams {
        self.params
    }

    fn count_bound(&self) -> u64 {
        self.params.n as u64
    }

    fn check_hypothesis(&self) -> Result<()> {
        let PublicParams { k, n, .. } = self.params;
        let dims = self.nonzero();
        if sym_sym_threshold_met(k, dims, n) {
            Ok(())
        } else {
            Err(Error::InsufficientPlayers(format!(
                "k = {k} < 4^{dims}·log₂ {n} players"
            )))
        }
    }

    fn message(&self, view: &PlayerView<'_>) -> Vec<u64> {
        player_message(view, &self.index).counts
    }

    fn referee(&self, transcript: &Transcript) -> Result<CountVector> {
        let b = self.deck(transcript)?;
        recover_with(&self.structure, &b, self.params.n as u64, &self.solver)
    }

    fn analytic_bits(&self) -> u64 {
        analytic_cost(self.params.k, self.nonzero(), self.params.n)
    }

    fn log_n_bits(&self) -> u64 {
        log_n_cost(self.params.k, self.nonzero(), self.params.n)
    }
}

/// Cost of one chunk of [`split_protocol`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkReport {
    pub columns: RangeInclusive<usize>,
    pub cost: CostReport,
}

#[derive(Debug, Clone)]
pub struct SplitRun {
    pub counts: CountVector,
    pub chunks: Vec<ChunkReport>,
    pub cost: CostReport,
}

/// Columns per chunk when `4^D ≤ k < 4^D·log₂ n`: `⌊2^(k/4^D)⌋`.
pub fn split_chunk_width(k: usize, nonzero: usize) -> usize {
    floor_pow2_ratio(k as u64, 4u64.pow(nonzero as u32)) as usize
}

/// Runs the protocol separately on consecutive chunks of
/// [`split_chunk_width`] columns (left to right; the last may be shorter)
/// and sums the recovered counts.
pub fn split_protocol(m: &InputMatrix, solver: &SolverConfig) -> Result<SplitRun> {
    let (k, n) = (m.k(), m.n());
    let dims = m.alphabet().nonzero();
    let base = 4usize.pow(dims as u32);
    if k < base || sym_sym_threshold_met(k, dims, n) {
        return Err(Error::InvalidParameter(format!(
            "splitting needs 4^{dims} ≤ k < 4^{dims}·log₂ n, got k = {k}, n = {n}"
        )));
    }
    let width = split_chunk_width(k, dims);
    let index = TypeIndex::shared(k as u32, dims);
    let mut counts = CountVector::zeros(index);
    let mut chunks = Vec::new();
    let mut per_player = vec![0u64; k];
    let (mut analytic, mut log_n) = (0, 0);
    let mut start = 1;
    while start <= n {
        let end = (start + width - 1).min(n);
        let part = m.select_columns(start..=end)?;
        let proto = EqSolve::new(k, part.n(), m.alphabet())?.with_solver(solver.clone());
        let run = run_protocol(&proto, &part, PlayerMode::Strict)?;
        counts.merge(&run.outcome?)?;
        for (acc, b) in per_player.iter_mut().zip(&run.cost.per_player_bits) {
            *acc += b;
        }
        analytic += run.cost.analytic_bits;
        log_n += run.cost.log_n_bits;
        chunks.push(ChunkReport {
            columns: start..=end,
            cost: run.cost,
        });
        start = end + 1;
    }
    let cost = CostReport {
        protocol: "split".into(),
        total_bits: per_player.iter().sum(),
        per_player_bits: per_player,
        analytic_bits: analytic,
        log_n_bits: log_n,
    };
    Ok(SplitRun {
        counts,
        chunks,
        cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::player_view;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(d: u32) -> Alphabet {
        Alphabet::new(d).unwrap()
    }

    fn ty(v: &[u32]) -> ColumnType {
        ColumnType::new(v.to_vec())
    }

    #[test]
    fn zero_matrix_messages() {
        let m = InputMatrix::zeros(z(3), 5, 4).unwrap();
        let index = TypeIndex::new(5, 2);
        for i in 1..=5 {
            let msg = player_message(&player_view(&m, i).unwrap(), &index);
            assert_eq!(msg.counts[0], 4);
            assert!(msg.counts[1..].iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn message_on_small_matrix() {
        // columns (1,1,1) and (0,1,0) over Z_2; player 1 sees (1,1) and (1,0)
        let m = InputMatrix::from_columns(z(2), &[vec![1, 1, 1], vec![0, 1, 0]]).unwrap();
        let index = TypeIndex::new(3, 1);
        let msg = player_message(&player_view(&m, 1).unwrap(), &index);
        assert_eq!(msg.counts, vec![0, 1, 1, 0]);
        assert_eq!(msg.counts.iter().sum::<u64>(), 2);
    }

    #[test]
    fn aggregate_checks() {
        let index = TypeIndex::shared(3, 1);
        let m = InputMatrix::zeros(z(2), 3, 2).unwrap();
        let msgs: Vec<_> = (1..=3)
            .map(|i| player_message(&player_view(&m, i).unwrap(), &index))
            .collect();
        let b = aggregate(&msgs, index.clone()).unwrap();
        assert_eq!(b.values(), &[6, 0, 0]);
        assert_eq!(b.total(), 3 * 2);
        assert!(matches!(
            aggregate(&msgs[..2], index.clone()),
            Err(Error::MissingMessage(3))
        ));
        let mut forged = msgs.clone();
        forged[0].counts[3] = 1;
        assert!(matches!(
            aggregate(&forged, index),
            Err(Error::CorruptTranscript(_))
        ));
    }

    #[test]
    fn recover_zero_matrix() {
        let m = InputMatrix::zeros(z(2), 8, 4).unwrap();
        let proto = EqSolve::new(8, 4, z(2)).unwrap();
        let run = run_protocol(&proto, &m, PlayerMode::Strict).unwrap();
        assert_eq!(run.transcript.messages().len(), 8);
        let y = run.outcome.unwrap();
        assert_eq!(y.get(&ty(&[0])), 4);
        assert_eq!(y.total(), 4);
    }

    #[test]
    fn recover_random_z2_and_z3() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (d, k, n) in [(2u32, 8usize, 4usize), (3, 32, 2), (3, 16, 2)] {
            let proto = EqSolve::new(k, n, z(d)).unwrap();
            for _ in 0..20 {
                let m = InputMatrix::random(z(d), k, n, &mut rng);
                let run = run_protocol(&proto, &m, PlayerMode::Strict).unwrap();
                assert_eq!(run.cost.total_bits, proto.analytic_bits());
                assert_eq!(run.outcome.unwrap(), CountVector::direct(&m));
            }
        }
    }

    #[test]
    fn strict_mode_rejects_few_players() {
        let proto = EqSolve::new(3, 4, z(2)).unwrap();
        let m = InputMatrix::zeros(z(2), 3, 4).unwrap();
        assert!(matches!(
            run_protocol(&proto, &m, PlayerMode::Strict),
            Err(Error::InsufficientPlayers(_))
        ));
        assert!(run_protocol(&proto, &m, PlayerMode::Reduced).is_ok());
    }

    #[test]
    fn reduced_mode_surfaces_ambiguity() {
        // columns {(0,0),(1,1)} and {(0,1),(1,0)} share a deck when k = 2
        let m = InputMatrix::from_columns(z(2), &[vec![0, 0], vec![1, 1]]).unwrap();
        let proto = EqSolve::new(2, 2, z(2)).unwrap();
        let run = run_protocol(&proto, &m, PlayerMode::Reduced).unwrap();
        assert_eq!(run.outcome, Err(Error::Ambiguous));
    }

    #[test]
    fn analytic_examples() {
        assert_eq!(analytic_cost(8, 1, 4), 216);
        assert_eq!(analytic_cost(2, 1, 2), 12);
        assert_eq!(log_n_cost(8, 1, 4), 8 * 9 * 2);
    }

    #[test]
    fn evaluation_examples() {
        use crate::zoo::{make_named, direct_eval, NamedFunction};
        let m = InputMatrix::new(z(2), vec![vec![1; 5]; 4]).unwrap();
        let gip = make_named(NamedFunction::Gip, 4, 5, z(2)).unwrap();
        let y = CountVector::direct(&m);
        assert!(evaluate_sym_composed(&y, gip.f(), gip.inner(1)).unwrap());
        assert!(direct_eval(&gip, &m).unwrap());
        let disj = make_named(NamedFunction::Disj, 4, 5, z(2)).unwrap();
        let zero = CountVector::direct(&InputMatrix::zeros(z(2), 4, 5).unwrap());
        assert!(evaluate_sym_composed(&zero, disj.f(), disj.inner(1)).unwrap());
    }

    #[test]
    fn split_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(split_chunk_width(4, 1), 2);
        let m = InputMatrix::random(z(2), 4, 8, &mut rng);
        let run = split_protocol(&m, &SolverConfig::default()).unwrap();
        assert_eq!(run.chunks.len(), 4);
        assert_eq!(run.counts, CountVector::direct(&m));
        for c in &run.chunks {
            assert_eq!(c.cost.total_bits, 4 * 5 * 2);
        }
        assert_eq!(run.cost.total_bits, 160);
        // odd n: last chunk is a single column of width ⌈log₂ 2⌉ = 1
        let m = InputMatrix::random(z(2), 4, 7, &mut rng);
        let run = split_protocol(&m, &SolverConfig::default()).unwrap();
        assert_eq!(run.chunks.len(), 4);
        assert_eq!(run.chunks[3].cost.total_bits, 4 * 5);
        assert_eq!(run.counts, CountVector::direct(&m));
        // k already above threshold, or below 4^D
        let big = InputMatrix::random(z(2), 8, 4, &mut rng);
        assert!(split_protocol(&big, &SolverConfig::default()).is_err());
        let small = InputMatrix::random(z(2), 3, 8, &mut rng);
        assert!(split_protocol(&small, &SolverConfig::default()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn deck_identity_and_invariances(d in 2u32..5, k in 1usize..9, n in 1usize..7, seed: u64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = InputMatrix::random(z(d), k, n, &mut rng);
            let index = TypeIndex::shared(k as u32, z(d).nonzero());
            let msgs: Vec<_> = (1..=k)
                .map(|i| player_message(&player_view(&m, i).unwrap(), &index))
                .collect();
            for msg in &msgs {
                prop_assert_eq!(msg.counts.iter().sum::<u64>(), n as u64);
            }
            let b = aggregate(&msgs, index.clone()).unwrap();
            prop_assert_eq!(b.total(), (k * n) as u64);
            let y = CountVector::direct_with(index.clone(), &m);
            prop_assert_eq!(y.total(), n as u64);
            // explicit form of each deck equation
            let kk = k as u32;
            for (idx, e) in index.types()[..index.prefix_len(kk - 1)].iter().enumerate() {
                let mut lhs = u64::from(kk - e.level()) * y.get(e);
                for s in 1..=e.nonzero() {
                    lhs += u64::from(e.get(s) + 1) * y.get(&e.plus_unit(s));
                }
                prop_assert_eq!(lhs, b.values()[idx]);
            }
            prop_assert_eq!(&DeckVector::of_counts(&y), &b);

            let mut cols: Vec<usize> = (0..n).collect();
            cols.shuffle(&mut rng);
            let mc = m.permute_columns(&cols);
            for i in 1..=k {
                prop_assert_eq!(
                    &player_message(&player_view(&mc, i).unwrap(), &index),
                    &msgs[i - 1]
                );
            }
            let mut rows: Vec<usize> = (0..k).collect();
            rows.shuffle(&mut rng);
            let mr = m.permute_rows(&rows);
            let msgs_r: Vec<_> = (1..=k)
                .map(|i| player_message(&player_view(&mr, i).unwrap(), &index))
                .collect();
            prop_assert_eq!(aggregate(&msgs_r, index.clone()).unwrap(), b);
            prop_assert_eq!(CountVector::direct_with(index, &mr), y);
        }
    }
}
