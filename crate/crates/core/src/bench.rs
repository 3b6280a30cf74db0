//! Monte Carlo trial harness.
//!
//! Each trial generates a fresh instance, runs one colorer on it and checks
//! the returned coloring against the instance itself, independently of the
//! colorer. Trial `i` draws all of its randomness from `derive(seed, [i])`,
//! so the report depends only on the configuration, never on scheduling.
//!
//! The CSV output starts with a `#` comment line naming the schema version,
//! then a header, one row per trial and a final summary row.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::certified::certified_stream_color;
use crate::error::{Error, Result};
use crate::hypergraph::{validate_coloring, Hypergraph};
use crate::local_lemma::{local_stream_color, LocalConfig};
use crate::outcome::{Failure, RunStats};
use crate::recolor::{p_default, stream_color};
use crate::rng::derive;
use crate::sparse_vertex::{balanced_stream_color, k_balanced_stream_color};
use crate::stream_io::GenSpec;
use crate::tape::RandomTape;

/// First line of every CSV report.
pub const CSV_SCHEMA: &str = "# hypercolor-bench schema=1";

const COLUMNS: [&str; 21] = [
    "kind",
    "trial",
    "algorithm",
    "n",
    "v",
    "q",
    "p",
    "t",
    "k",
    "seed",
    "outcome",
    "flips",
    "blue_residual",
    "red_residual",
    "passes",
    "peak_state",
    "attempts",
    "wall_ms",
    "success_rate",
    "mean_residual",
    "mean_passes",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Plain streaming delayed recoloring; may return invalid colorings.
    Delayed,
    Certified,
    Balanced,
    KBalanced,
    Local,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Delayed,
        Algorithm::Certified,
        Algorithm::Balanced,
        Algorithm::KBalanced,
        Algorithm::Local,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Delayed => "delayed",
            Algorithm::Certified => "certified",
            Algorithm::Balanced => "balanced",
            Algorithm::KBalanced => "kbalanced",
            Algorithm::Local => "local",
        }
    }

    /// Whether a returned coloring is guaranteed valid.
    pub fn is_sound(self) -> bool {
        self != Algorithm::Delayed
    }

    fn uses_p(self) -> bool {
        matches!(self, Algorithm::Delayed | Algorithm::Certified)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown algorithm {s:?}")))
    }
}

/// Algorithm knobs shared by the CLI `color` command and the harness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgorithmParams {
    /// Recoloring probability; `None` means [`p_default`] of `n`.
    pub p: Option<f64>,
    /// Residual cap for `certified`; `None` means `n`.
    pub cap: Option<usize>,
    /// Class count for `kbalanced`.
    pub k: u32,
    pub max_passes: Option<usize>,
}

impl Default for AlgorithmParams {
    fn default() -> Self {
        AlgorithmParams {
            p: None,
            cap: None,
            k: 3,
            max_passes: None,
        }
    }
}

impl AlgorithmParams {
    pub fn resolve_p(&self, n: usize) -> Result<f64> {
        match self.p {
            Some(p) if p > 0.0 && p < 1.0 => Ok(p),
            Some(p) => Err(Error::domain(format!("p must lie in (0, 1), got {p}"))),
            None => p_default(n),
        }
    }
}

/// Runs `algorithm` on an in-memory instance and checks any returned
/// coloring against `h`. `seed` keys all randomness.
///
/// An invalid coloring from an algorithm other than `delayed` is reported as
/// [`Error::Soundness`].
pub fn run_algorithm(
    algorithm: Algorithm,
    h: &Hypergraph,
    params: &AlgorithmParams,
    seed: u64,
) -> Result<AlgorithmRun> {
    let n = h.uniformity();
    let run = match algorithm {
        Algorithm::Delayed => {
            let (c, stats) = stream_color(h.edges(), &RandomTape::new(seed), params.resolve_p(n)?);
            let valid = validate_coloring(h, &c)?.is_empty();
            AlgorithmRun { result: Ok(valid), stats }
        }
        Algorithm::Certified => {
            let cap = params.cap.unwrap_or(n);
            if cap == 0 {
                return Err(Error::domain("cap must be at least 1"));
            }
            let out = certified_stream_color(h.edges(), &RandomTape::new(seed), params.resolve_p(n)?, cap);
            checked(algorithm, h, out.result, out.stats)?
        }
        Algorithm::Balanced => {
            let v = universe(h)?;
            let out = balanced_stream_color(h.edges(), v, n, seed)?;
            checked(algorithm, h, out.result, out.stats)?
        }
        Algorithm::KBalanced => {
            let v = universe(h)?;
            let out = k_balanced_stream_color(h.edges(), v, n, params.k, seed)?;
            checked(algorithm, h, out.result, out.stats)?
        }
        Algorithm::Local => {
            let mut config = LocalConfig::new(seed);
            config.max_passes = params.max_passes;
            let out = local_stream_color(h, n, &config)?;
            checked(algorithm, h, out.result, out.stats)?
        }
    };
    Ok(run)
}

fn universe(h: &Hypergraph) -> Result<u32> {
    h.universe()
        .ok_or_else(|| Error::domain("the split colorers need a known universe size"))
}

fn checked<C: Copy + Eq>(
    algorithm: Algorithm,
    h: &Hypergraph,
    result: std::result::Result<crate::hypergraph::Assignment<C>, Failure>,
    stats: RunStats,
) -> Result<AlgorithmRun> {
    let result = match result {
        Ok(c) => {
            let violations = validate_coloring(h, &c)?.len();
            if violations > 0 {
                return Err(Error::Soundness {
                    algorithm: algorithm.as_str(),
                    violations,
                });
            }
            Ok(true)
        }
        Err(f) => Err(f),
    };
    Ok(AlgorithmRun { result, stats })
}

/// What one algorithm run produced: `Ok(valid)` when it returned a coloring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgorithmRun {
    pub result: std::result::Result<bool, Failure>,
    pub stats: RunStats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub algorithm: Algorithm,
    /// Instance family; its own seed is replaced per trial.
    pub instance: GenSpec,
    pub trials: usize,
    pub seed: u64,
    pub params: AlgorithmParams,
    /// Independent runs per trial, stopping at the first success.
    pub attempts: usize,
    /// Include wall-clock times, which makes the CSV non-reproducible.
    pub timing: bool,
}

impl BenchConfig {
    pub fn new(algorithm: Algorithm, instance: GenSpec, trials: usize, seed: u64) -> Self {
        BenchConfig {
            algorithm,
            instance,
            trials,
            seed,
            params: AlgorithmParams::default(),
            attempts: 1,
            timing: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialOutcome {
    Valid,
    /// Returned a coloring that fails validation. Only possible for `delayed`.
    Invalid,
    Failure(&'static str),
}

impl TrialOutcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrialOutcome::Valid => "valid",
            TrialOutcome::Invalid => "invalid",
            TrialOutcome::Failure(reason) => reason,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub n: usize,
    pub v: u32,
    pub q: u64,
    pub p: Option<f64>,
    /// Seed of this trial; instance and algorithm seeds derive from it.
    pub seed: u64,
    pub outcome: TrialOutcome,
    pub attempts: usize,
    /// Statistics of the last attempt.
    pub stats: RunStats,
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub trials: usize,
    pub success_rate: f64,
    /// Mean of `blue_residual + red_residual`.
    pub mean_residual: f64,
    pub mean_passes: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    derive(seed, &[trial as u64])
}

fn run_trial(config: &BenchConfig, trial: usize) -> Result<TrialRecord> {
    let start = Instant::now();
    let seed = trial_seed(config.seed, trial);
    let (header, h) = config.instance.with_seed(derive(seed, &[1])).materialize()?;
    let n = header.uniformity;
    let p = if config.algorithm.uses_p() {
        Some(config.params.resolve_p(n)?)
    } else {
        None
    };
    let mut attempts = 0;
    let mut run = None;
    while attempts < config.attempts.max(1) {
        let r = run_algorithm(config.algorithm, &h, &config.params, derive(seed, &[2, attempts as u64]))?;
        attempts += 1;
        let done = r.result == Ok(true);
        run = Some(r);
        if done {
            break;
        }
    }
    let run = run.expect("at least one attempt");
    let outcome = match run.result {
        Ok(true) => TrialOutcome::Valid,
        Ok(false) => TrialOutcome::Invalid,
        Err(f) => TrialOutcome::Failure(f.reason()),
    };
    Ok(TrialRecord {
        trial,
        n,
        v: header.universe.unwrap_or(0),
        q: h.len() as u64,
        p,
        seed,
        outcome,
        attempts,
        stats: run.stats,
        wall_ms: config.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

/// Runs all trials in parallel; records come back in trial order.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    if config.trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let records = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect::<Result<Vec<_>>>()?;
    let count = records.len() as f64;
    let summary = Summary {
        trials: records.len(),
        success_rate: records.iter().filter(|r| r.outcome == TrialOutcome::Valid).count() as f64 / count,
        mean_residual: records
            .iter()
            .map(|r| (r.stats.blue_residual_size + r.stats.red_residual_size) as f64)
            .sum::<f64>()
            / count,
        mean_passes: records.iter().map(|r| r.stats.passes as f64).sum::<f64>() / count,
    };
    Ok(BenchReport {
        config: config.clone(),
        records,
        summary,
    })
}

fn instance_t(spec: &GenSpec) -> Option<f64> {
    match spec {
        GenSpec::Erdos { t, .. } => Some(*t),
        _ => None,
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the report as versioned CSV.
pub fn write_csv<W: Write>(mut out: W, report: &BenchReport) -> Result<()> {
    writeln!(out, "{CSV_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    let cfg = &report.config;
    let t = opt(instance_t(&cfg.instance));
    let k = if cfg.algorithm == Algorithm::KBalanced {
        cfg.params.k.to_string()
    } else {
        String::new()
    };
    for r in &report.records {
        let s = &r.stats;
        w.write_record([
            "trial".to_string(),
            r.trial.to_string(),
            cfg.algorithm.to_string(),
            r.n.to_string(),
            r.v.to_string(),
            r.q.to_string(),
            opt(r.p),
            t.clone(),
            k.clone(),
            r.seed.to_string(),
            r.outcome.as_str().to_string(),
            s.flips.to_string(),
            s.blue_residual_size.to_string(),
            s.red_residual_size.to_string(),
            s.passes.to_string(),
            s.peak_state_entries.to_string(),
            r.attempts.to_string(),
            opt(r.wall_ms.map(|ms| format!("{ms:.3}"))),
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    let first = &report.records[0];
    let sm = &report.summary;
    w.write_record([
        "summary".to_string(),
        sm.trials.to_string(),
        cfg.algorithm.to_string(),
        first.n.to_string(),
        first.v.to_string(),
        first.q.to_string(),
        opt(first.p),
        t,
        k,
        cfg.seed.to_string(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        format!("{:.6}", sm.success_rate),
        format!("{:.6}", sm.mean_residual),
        format!("{:.6}", sm.mean_passes),
    ])?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hyperedge;

    fn uniform(v: u32, n: usize, q: u64) -> GenSpec {
        GenSpec::Uniform { v, n, q, seed: 0 }
    }

    fn csv_string(report: &BenchReport) -> String {
        let mut buf = Vec::new();
        write_csv(&mut buf, report).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("greedy".parse::<Algorithm>().is_err());
    }

    #[test]
    fn single_trial_gives_two_rows() {
        let report = run_bench(&BenchConfig::new(Algorithm::Certified, uniform(30, 4, 20), 1, 5)).unwrap();
        let text = csv_string(&report);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_SCHEMA);
        assert_eq!(lines[1].split(',').count(), COLUMNS.len());
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("trial,0,certified,4,30,20,"));
        assert!(lines[3].starts_with("summary,1,certified,"));
    }

    #[test]
    fn reports_are_deterministic() {
        for a in Algorithm::ALL {
            let mut cfg = BenchConfig::new(a, uniform(24, 4, 40), 16, 77);
            cfg.attempts = 2;
            let x = csv_string(&run_bench(&cfg).unwrap());
            let y = csv_string(&run_bench(&cfg).unwrap());
            assert_eq!(x, y, "{a}");
            assert!(!x.contains("NaN"));
        }
    }

    #[test]
    fn trials_differ() {
        let report = run_bench(&BenchConfig::new(Algorithm::Delayed, uniform(40, 5, 60), 8, 1)).unwrap();
        let seeds: std::collections::HashSet<u64> = report.records.iter().map(|r| r.seed).collect();
        assert_eq!(seeds.len(), 8);
        assert!(report.records.iter().enumerate().all(|(i, r)| r.trial == i));
    }

    #[test]
    fn sound_algorithms_never_invalid() {
        for a in [Algorithm::Certified, Algorithm::Balanced, Algorithm::KBalanced, Algorithm::Local] {
            let report = run_bench(&BenchConfig::new(a, uniform(12, 3, 30), 100, 3)).unwrap();
            assert!(report.records.iter().all(|r| r.outcome != TrialOutcome::Invalid));
        }
    }

    #[test]
    fn amplification_helps() {
        let spec = uniform(12, 4, 40);
        let one = run_bench(&BenchConfig::new(Algorithm::Balanced, spec.clone(), 200, 9)).unwrap();
        let mut cfg = BenchConfig::new(Algorithm::Balanced, spec, 200, 9);
        cfg.attempts = 5;
        let five = run_bench(&cfg).unwrap();
        assert!(five.summary.success_rate >= one.summary.success_rate);
        assert!(five.records.iter().all(|r| (1..=5).contains(&r.attempts)));
    }

    #[test]
    fn timing_column_only_when_asked() {
        let mut cfg = BenchConfig::new(Algorithm::Delayed, uniform(20, 3, 10), 2, 0);
        assert!(run_bench(&cfg).unwrap().records.iter().all(|r| r.wall_ms.is_none()));
        cfg.timing = true;
        assert!(run_bench(&cfg).unwrap().records.iter().all(|r| r.wall_ms.is_some()));
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(run_bench(&BenchConfig::new(Algorithm::Delayed, uniform(20, 3, 10), 0, 0)).is_err());
    }

    #[test]
    fn delayed_reports_invalid_outputs() {
        // The Fano plane forces any coloring to be invalid.
        let fano = Hypergraph::from_edges(
            3,
            [[1, 2, 4], [2, 3, 5], [3, 4, 6], [4, 5, 7], [5, 6, 1], [6, 7, 2], [7, 1, 3]]
                .iter()
                .map(|e| Hyperedge::from_ids(e).unwrap()),
        )
        .unwrap();
        let run = run_algorithm(Algorithm::Delayed, &fano, &AlgorithmParams::default(), 0).unwrap();
        assert_eq!(run.result, Ok(false));
        for a in [Algorithm::Certified, Algorithm::Local] {
            let run = run_algorithm(a, &fano, &AlgorithmParams::default(), 0).unwrap();
            assert!(run.result.is_err());
        }
    }
}
