//! Experiment descriptors, per-trial results and their CSV/JSON forms.
//!
//! Every trial draws from `ChaCha8Rng::seed_from_u64(seed)` on stream
//! `trial`, so each trial is reproducible on its own and results do not
//! depend on how trials are scheduled.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composed::{run_full, ComposedSpec};
use crate::deck::SolverConfig;
use crate::eqsolve::{evaluate_sym_composed, split_protocol, CountVector, EqSolve};
use crate::error::{Error, Result};
use crate::matrix::{Alphabet, InputMatrix};
use crate::smp::{run_protocol, PlayerMode};
use crate::zoo::{direct_eval, make_named_with, random_mixed_spec, random_uniform_spec, NamedFunction, TieRule};

/// First line of every result file.
pub const SCHEMA: &str = "nof-lab/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Eqsolve,
    Split,
    Full,
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eqsolve" => Ok(Self::Eqsolve),
            "split" => Ok(Self::Split),
            "full" => Ok(Self::Full),
            other => Err(Error::Parse(format!(
                "protocol `{other}` (expected eqsolve|split|full)"
            ))),
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Eqsolve => "eqsolve",
            Self::Split => "split",
            Self::Full => "full",
        })
    }
}

/// Which composed function a trial evaluates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionChoice {
    Named(NamedFunction),
    /// Random outer function, one random inner function for all blocks.
    Random,
    /// Random outer function, pairwise distinct random inner functions.
    RandomMixed,
}

impl FromStr for FunctionChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Self::Random),
            "random-mixed" | "mixed" => Ok(Self::RandomMixed),
            _ => s.parse().map(Self::Named),
        }
    }
}

impl fmt::Display for FunctionChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Named(n) => n.fmt(f),
            Self::Random => f.write_str("random"),
            Self::RandomMixed => f.write_str("random-mixed"),
        }
    }
}

fn default_mode() -> String {
    "strict".into()
}

fn default_function() -> String {
    "GIP".into()
}

fn default_trials() -> u64 {
    1
}

/// Structured experiment description, as read from a JSON file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentDescriptor {
    pub protocol: ProtocolKind,
    pub d: u32,
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default = "default_function")]
    pub function: String,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub tie_down: bool,
}

impl ExperimentDescriptor {
    pub fn function_choice(&self) -> Result<FunctionChoice> {
        self.function.parse()
    }

    pub fn player_mode(&self) -> Result<PlayerMode> {
        self.mode.parse()
    }

    pub fn alphabet(&self) -> Result<Alphabet> {
        Alphabet::new(self.d)
    }

    pub fn tie(&self) -> TieRule {
        if self.tie_down {
            TieRule::Down
        } else {
            TieRule::Up
        }
    }

    /// Checks everything that does not depend on the random draw.
    pub fn validate(&self) -> Result<()> {
        let alphabet = self.alphabet()?;
        self.function_choice()?;
        self.player_mode()?;
        if self.k == 0 || self.n == 0 {
            return Err(Error::InvalidParameter("need k ≥ 1 and n ≥ 1".into()));
        }
        if let Some(l) = self.l {
            if self.protocol != ProtocolKind::Full {
                return Err(Error::InvalidParameter("--l applies to the full protocol only".into()));
            }
            if l == 0 || l > self.k {
                return Err(Error::InvalidParameter(format!("need 1 ≤ ℓ ≤ k, got ℓ = {l}")));
            }
        }
        if self.protocol == ProtocolKind::Full && self.n < 2 {
            return Err(Error::InvalidParameter(
                "the full protocol needs a prime in (n, 2n), so n ≥ 2".into(),
            ));
        }
        // rejects empty dimensions
        InputMatrix::zeros(alphabet, self.k, self.n)?;
        let mode = self.player_mode()?;
        match self.protocol {
            ProtocolKind::Eqsolve if mode == PlayerMode::Strict => {
                use crate::smp::SimultaneousProtocol;
                EqSolve::new(self.k, self.n, alphabet)?.check_hypothesis()
            }
            ProtocolKind::Split => {
                let dims = alphabet.nonzero() as u32;
                let base = 4usize.pow(dims);
                if self.k < base || crate::eqsolve::sym_sym_threshold_met(self.k, dims as usize, self.n) {
                    Err(Error::InvalidParameter(format!(
                        "splitting needs 4^{dims} ≤ k < 4^{dims}·log₂ n"
                    )))
                } else {
                    Ok(())
                }
            }
            ProtocolKind::Full if mode == PlayerMode::Strict => {
                use crate::smp::SimultaneousProtocol;
                let spec = make_named_with(NamedFunction::Gip, self.k, self.n, alphabet, self.tie())?;
                crate::composed::FullProtocol::new(spec, self.l)?.check_hypothesis()
            }
            _ => Ok(()),
        }
    }
}

/// One line of output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub trial: u64,
    pub protocol: ProtocolKind,
    pub d: u32,
    pub k: usize,
    pub n: usize,
    pub l: Option<usize>,
    pub function: String,
    pub mode: String,
    pub seed: u64,
    /// `ok`, `ambiguous` or `error`.
    pub status: String,
    pub output: Option<u8>,
    pub oracle: Option<u8>,
    #[serde(rename = "match")]
    pub matched: Option<bool>,
    /// Recovered column-type counts equal direct counting (eqsolve, split).
    pub counts_match: Option<bool>,
    pub measured_bits: u64,
    pub analytic_bits: u64,
    pub log_n_bits: u64,
    pub detail: String,
    pub wall_ms: Option<f64>,
}

impl ExperimentResult {
    pub fn passed(&self) -> bool {
        self.matched == Some(true) && self.counts_match != Some(false)
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn draw_spec<R: Rng>(desc: &ExperimentDescriptor, alphabet: Alphabet, rng: &mut R) -> Result<ComposedSpec> {
    match desc.function_choice()? {
        FunctionChoice::Named(name) => make_named_with(name, desc.k, desc.n, alphabet, desc.tie()),
        FunctionChoice::Random => random_uniform_spec(rng, alphabet, desc.k, desc.n),
        FunctionChoice::RandomMixed => random_mixed_spec(rng, alphabet, desc.k, desc.n),
    }
}

/// The composed function trial `trial` evaluates (drawn first from its stream).
pub fn trial_spec(desc: &ExperimentDescriptor, trial: u64) -> Result<ComposedSpec> {
    draw_spec(desc, desc.alphabet()?, &mut trial_rng(desc.seed, trial))
}

/// Runs trial `trial` of `desc` on a freshly drawn matrix.
pub fn run_trial(desc: &ExperimentDescriptor, trial: u64, timing: bool) -> Result<ExperimentResult> {
    let alphabet = desc.alphabet()?;
    let mut rng = trial_rng(desc.seed, trial);
    let spec = draw_spec(desc, alphabet, &mut rng)?;
    let m = InputMatrix::random(alphabet, desc.k, desc.n, &mut rng);
    run_on(desc, trial, &spec, &m, timing)
}

/// Runs `desc`'s protocol on a given matrix.
pub fn run_on(
    desc: &ExperimentDescriptor,
    trial: u64,
    spec: &ComposedSpec,
    m: &InputMatrix,
    timing: bool,
) -> Result<ExperimentResult> {
    let mode = desc.player_mode()?;
    let start = Instant::now();
    let oracle = direct_eval(spec, m)?;
    let mut res = ExperimentResult {
        trial,
        protocol: desc.protocol,
        d: desc.d,
        k: desc.k,
        n: desc.n,
        l: None,
        function: desc.function.clone(),
        mode: desc.mode.clone(),
        seed: desc.seed,
        status: "ok".into(),
        output: None,
        oracle: Some(u8::from(oracle)),
        matched: None,
        counts_match: None,
        measured_bits: 0,
        analytic_bits: 0,
        log_n_bits: 0,
        detail: String::new(),
        wall_ms: None,
    };
    let counted = |y: Result<CountVector>, res: &mut ExperimentResult| -> Result<()> {
        match y {
            Ok(y) => {
                res.counts_match = Some(y == CountVector::direct(m));
                res.output = Some(u8::from(evaluate_sym_composed(&y, spec.f(), spec.inner(1))?));
            }
            Err(e) => record_failure(res, &e),
        }
        Ok(())
    };
    match desc.protocol {
        ProtocolKind::Eqsolve => {
            if !spec.is_uniform() {
                return Err(Error::InvalidParameter(
                    "the equation-solving protocol needs one inner function for all columns".into(),
                ));
            }
            let proto = EqSolve::new(desc.k, desc.n, m.alphabet())?;
            let run = run_protocol(&proto, m, mode)?;
            res.measured_bits = run.cost.total_bits;
            res.analytic_bits = run.cost.analytic_bits;
            res.log_n_bits = run.cost.log_n_bits;
            counted(run.outcome, &mut res)?;
        }
        ProtocolKind::Split => {
            if !spec.is_uniform() {
                return Err(Error::InvalidParameter(
                    "the splitting protocol needs one inner function for all columns".into(),
                ));
            }
            let run = split_protocol(m, &SolverConfig::default())?;
            res.measured_bits = run.cost.total_bits;
            res.analytic_bits = run.cost.analytic_bits;
            res.log_n_bits = run.cost.log_n_bits;
            res.detail = format!("chunks={}", run.chunks.len());
            counted(Ok(run.counts), &mut res)?;
        }
        ProtocolKind::Full => {
            let proto = crate::composed::FullProtocol::new(spec.clone(), desc.l)?;
            res.l = Some(proto.l());
            let run = run_full(m, spec, Some(proto.l()), mode)?;
            res.measured_bits = run.cost.total_bits;
            res.analytic_bits = run.cost.analytic_bits;
            res.log_n_bits = run.cost.log_n_bits;
            match run.outcome {
                Ok(out) => {
                    res.output = Some(u8::from(out.value));
                    res.detail = format!("weight={}", out.weight);
                }
                Err(e) => record_failure(&mut res, &e),
            }
        }
    }
    res.matched = res.output.map(|o| Some(o) == res.oracle);
    if timing {
        res.wall_ms = Some((start.elapsed().as_secs_f64() * 1e6).round() / 1e3);
    }
    Ok(res)
}

fn record_failure(res: &mut ExperimentResult, e: &Error) {
    res.status = match e {
        Error::Ambiguous | Error::SubrunAmbiguous { .. } => "ambiguous",
        _ => "error",
    }
    .into();
    res.detail = e.to_string();
}

/// All trials of `desc`, ordered by trial index, using `jobs` workers
/// (`0` = rayon default).
pub fn run_experiment(desc: &ExperimentDescriptor, jobs: usize, timing: bool) -> Result<Vec<ExperimentResult>> {
    desc.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    pool.install(|| {
        (0..desc.trials)
            .into_par_iter()
            .map(|trial| run_trial(desc, trial, timing))
            .collect()
    })
}

pub fn to_csv(results: &[ExperimentResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if results.is_empty() {
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    }
    for r in results {
        w.serialize(r).map_err(csv_err)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| Error::Parse(e.to_string()))?)
        .expect("csv output is utf-8");
    Ok(format!("{SCHEMA}\n{body}"))
}

pub fn from_csv(text: &str) -> Result<Vec<ExperimentResult>> {
    let body = text
        .strip_prefix(SCHEMA)
        .and_then(|s| s.strip_prefix('\n'))
        .ok_or_else(|| Error::Parse(format!("missing `{SCHEMA}` header line")))?;
    csv::Reader::from_reader(body.as_bytes())
        .deserialize()
        .map(|r| r.map_err(csv_err))
        .collect()
}

const CSV_COLUMNS: [&str; 19] = [
    "trial",
    "protocol",
    "d",
    "k",
    "n",
    "l",
    "function",
    "mode",
    "seed",
    "status",
    "output",
    "oracle",
    "match",
    "counts_match",
    "measured_bits",
    "analytic_bits",
    "log_n_bits",
    "detail",
    "wall_ms",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonReport {
    schema: String,
    results: Vec<ExperimentResult>,
}

pub fn to_json(results: &[ExperimentResult]) -> Result<String> {
    serde_json::to_string_pretty(&JsonReport {
        schema: SCHEMA.into(),
        results: results.to_vec(),
    })
    .map_err(|e| Error::Parse(e.to_string()))
}

pub fn from_json(text: &str) -> Result<Vec<ExperimentResult>> {
    let report: JsonReport = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if report.schema != SCHEMA {
        return Err(Error::Parse(format!("schema `{}`", report.schema)));
    }
    Ok(report.results)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desc() -> ExperimentDescriptor {
        ExperimentDescriptor {
            protocol: ProtocolKind::Eqsolve,
            d: 2,
            n: 4,
            k: 8,
            l: None,
            function: "GIP".into(),
            mode: "strict".into(),
            seed: 7,
            trials: 6,
            tie_down: false,
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let a = run_experiment(&desc(), 1, false).unwrap();
        let b = run_experiment(&desc(), 3, false).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(ExperimentResult::passed));
        assert_eq!(a.iter().map(|r| r.trial).collect::<Vec<_>>(), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn csv_and_json_round_trip() {
        let mut res = run_experiment(&desc(), 0, true).unwrap();
        res[0].status = "note, with comma".into();
        let text = to_csv(&res).unwrap();
        assert!(text.starts_with("nof-lab/1\ntrial,protocol,d,k,n,l,"));
        assert_eq!(from_csv(&text).unwrap(), res);
        assert_eq!(from_json(&to_json(&res).unwrap()).unwrap(), res);
        assert_eq!(to_csv(&[]).unwrap().lines().count(), 2);
        assert!(from_csv("trial\n").is_err());
    }

    #[test]
    fn descriptor_document() {
        let doc = r#"{"protocol":"full","d":2,"n":2,"k":16,"function":"DISJ","seed":3}"#;
        let d: ExperimentDescriptor = serde_json::from_str(doc).unwrap();
        assert_eq!(d.trials, 1);
        assert_eq!(d.mode, "strict");
        d.validate().unwrap();
        let r = run_experiment(&d, 0, false).unwrap();
        assert!(r[0].passed());
        assert_eq!(r[0].l, Some(16));
    }

    #[test]
    fn hypothesis_violations() {
        let mut d = desc();
        d.k = 3;
        assert!(matches!(d.validate(), Err(Error::InsufficientPlayers(_))));
        d.mode = "reduced".into();
        d.validate().unwrap();
        d.protocol = ProtocolKind::Split;
        assert!(d.validate().is_err());
        d.k = 4;
        d.n = 8;
        d.validate().unwrap();
    }
}
