//! Experiment sweeps over (N, D, η, objective) with deterministic output.
//!
//! A sweep runs one optimization per grid point and emits one flat record
//! per point, CSV or JSON, sorted by (N, D, η, objective) regardless of how
//! the work was scheduled. Bond dimension 0 is the sentinel for the direct
//! (brute-force) optimizer, so both curve families share one schema. Points
//! that share (objective, N, η) form a group: MPS bond dimensions run as an
//! ascending ladder with zero-pair-embedded warm starts, and the direct
//! point, when requested, is additionally warm started from the best MPS of
//! its group. Since the MPS family is a subset of the direct search space,
//! this keeps every emitted direct precision at or below its MPS siblings.
//!
//! Reproducibility: each point derives its seed from the master seed and its
//! index in the sorted point list, so reruns and different worker counts
//! produce identical records. The wall-time column is measured; writers
//! zero it when asked for byte-stable output.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::mps::DiagonalMps;
use crate::optimize::{
    direct_params_from_state, embed_params, optimize_direct_outcome, optimize_mps_outcome,
    BestParams, Gauge, ObjectiveKind, ObjectiveSpec, OptimizerOptions, OptimizeError,
    DIRECT_N_CAP,
};
use crate::symstate::SymmetricState;
use crate::util::derive_seed;

/// Environment variable capping the sweep worker count.
pub const WORKERS_ENV: &str = "QMETRO_WORKERS";

/// Frozen CSV header.
pub const CSV_HEADER: &str = "N,D,eta,objective,objective_value,delta_phi,shot_noise_bound,\
asymptotic_bound,converged,iterations,seed,wall_time_s";

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep specification invalid: {0}")]
    BadSpec(String),

    #[error("cannot parse sweep config: {0}")]
    Config(String),

    #[error(transparent)]
    Optimize(#[from] OptimizeError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Full description of a sweep. `d_list` may contain the sentinel 0 to
/// request the direct optimizer alongside the MPS bond dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub n_list: Vec<usize>,
    pub d_list: Vec<usize>,
    pub eta_list: Vec<f64>,
    pub objectives: Vec<ObjectiveKind>,
    /// None = per-objective default gauge.
    pub gauge: Option<Gauge>,
    pub opts: OptimizerOptions,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub dump_states: bool,
    /// None = consult QMETRO_WORKERS, then the rayon default.
    pub workers: Option<usize>,
    /// When false, writers emit 0 in the wall-time column for byte-stable
    /// output across runs.
    pub timing: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            n_list: Vec::new(),
            d_list: Vec::new(),
            eta_list: Vec::new(),
            objectives: Vec::new(),
            gauge: None,
            opts: OptimizerOptions::default(),
            output: None,
            format: OutputFormat::Csv,
            dump_states: false,
            workers: None,
            timing: true,
        }
    }
}

impl SweepSpec {
    /// Sorts and deduplicates the grid lists; rejects empty or out-of-range
    /// entries. Canonicalization makes config round-trips idempotent.
    pub fn validate(&mut self) -> Result<(), SweepError> {
        if self.n_list.is_empty() {
            return Err(SweepError::BadSpec("n list is empty".into()));
        }
        if self.d_list.is_empty() {
            return Err(SweepError::BadSpec("d list is empty".into()));
        }
        if self.eta_list.is_empty() {
            return Err(SweepError::BadSpec("eta list is empty".into()));
        }
        if self.objectives.is_empty() {
            return Err(SweepError::BadSpec("objective list is empty".into()));
        }
        if self.n_list.iter().any(|&n| n == 0) {
            return Err(SweepError::BadSpec("probe counts must be positive".into()));
        }
        if self
            .eta_list
            .iter()
            .any(|&e| !(e > 0.0 && e <= 1.0) || !e.is_finite())
        {
            return Err(SweepError::BadSpec(
                "transmissivities must lie in (0, 1]".into(),
            ));
        }
        self.n_list.sort_unstable();
        self.n_list.dedup();
        self.d_list.sort_unstable();
        self.d_list.dedup();
        self.eta_list.sort_by(f64::total_cmp);
        self.eta_list.dedup();
        self.objectives.sort_by_key(objective_label);
        self.objectives.dedup();
        Ok(())
    }
}

/// One sweep result row. `bond_dim` 0 denotes the direct optimizer.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub n_probes: usize,
    pub bond_dim: usize,
    pub eta: f64,
    pub objective: ObjectiveKind,
    pub status: RecordStatus,
    /// F̃ or Δφ depending on the objective; NaN when skipped.
    pub objective_value: f64,
    pub delta_phi: f64,
    /// 1/√(ηN), the uncorrelated-probe (shot noise) reference.
    pub shot_noise_bound: f64,
    /// √((1−η)/(ηN)), the asymptotic loss bound.
    pub asymptotic_bound: f64,
    pub iterations: u64,
    pub seed: u64,
    pub wall_time_s: f64,
    /// Canonical optimal MPS for D >= 1 points (dump-states support).
    pub mps: Option<DiagonalMps>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordStatus {
    Converged,
    NotConverged,
    /// Direct optimization infeasible at this N; row kept, values NaN.
    Skipped,
}

impl RecordStatus {
    fn label(&self) -> &'static str {
        match self {
            RecordStatus::Converged => "true",
            RecordStatus::NotConverged => "false",
            RecordStatus::Skipped => "skipped",
        }
    }
}

pub fn objective_label(kind: &ObjectiveKind) -> &'static str {
    match kind {
        ObjectiveKind::ApproxQfiMax => "qfi",
        ObjectiveKind::RamseyMin => "ramsey",
    }
}

pub fn shot_noise_bound(n_probes: usize, eta: f64) -> f64 {
    1.0 / (eta * n_probes as f64).sqrt()
}

pub fn asymptotic_bound(n_probes: usize, eta: f64) -> f64 {
    ((1.0 - eta) / (eta * n_probes as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct PointKey {
    n_probes: usize,
    bond_dim: usize,
    eta_bits: u64,
    objective_label: &'static str,
}

fn key_of(n: usize, d: usize, eta: f64, objective: ObjectiveKind) -> PointKey {
    PointKey {
        n_probes: n,
        bond_dim: d,
        // etas are validated positive, so bit order equals numeric order
        eta_bits: eta.to_bits(),
        objective_label: objective_label(&objective),
    }
}

struct GroupTask {
    objective: ObjectiveSpec,
    kind: ObjectiveKind,
    n_probes: usize,
    eta: f64,
    /// Ascending MPS bond dimensions.
    mps_ds: Vec<usize>,
    include_direct: bool,
    /// Per-point seeds keyed like the output records.
    seeds: Vec<(usize, u64)>,
}

fn seed_for(task: &GroupTask, d: usize) -> u64 {
    task.seeds
        .iter()
        .find(|(dd, _)| *dd == d)
        .map(|(_, s)| *s)
        .expect("seed registered for every point")
}

fn run_group(task: &GroupTask, opts: &OptimizerOptions) -> Result<Vec<SweepRecord>, SweepError> {
    let mut records = Vec::new();
    let bounds = (
        shot_noise_bound(task.n_probes, task.eta),
        asymptotic_bound(task.n_probes, task.eta),
    );
    let mut previous: Option<(usize, Vec<f64>)> = None;
    let mut best_mps: Option<(f64, SymmetricState)> = None;

    for &d in &task.mps_ds {
        let mut point_opts = *opts;
        point_opts.seed = seed_for(task, d);
        let warm: Vec<Vec<f64>> = previous
            .as_ref()
            .map(|(prev_d, p)| {
                let mut params = p.clone();
                for grow in *prev_d..d {
                    params = embed_params(grow, task.objective.mps_gauge(), &params);
                }
                vec![params]
            })
            .unwrap_or_default();
        let started = Instant::now();
        let outcome =
            optimize_mps_outcome(task.n_probes, d, &task.objective, &point_opts, &warm)?;
        let wall = started.elapsed().as_secs_f64();
        let result = &outcome.result;
        if best_mps
            .as_ref()
            .map(|(dp, _)| result.delta_phi < *dp)
            .unwrap_or(true)
        {
            best_mps = Some((result.delta_phi, result.state.clone()));
        }
        records.push(SweepRecord {
            n_probes: task.n_probes,
            bond_dim: d,
            eta: task.eta,
            objective: task.kind,
            status: if result.converged {
                RecordStatus::Converged
            } else {
                RecordStatus::NotConverged
            },
            objective_value: result.objective_value,
            delta_phi: result.delta_phi,
            shot_noise_bound: bounds.0,
            asymptotic_bound: bounds.1,
            iterations: result.iterations,
            seed: point_opts.seed,
            wall_time_s: wall,
            mps: match &result.params {
                BestParams::Mps(m) => Some(m.clone()),
                BestParams::Direct(_) => None,
            },
        });
        previous = Some((d, outcome.raw_params));
    }

    if task.include_direct {
        let mut point_opts = *opts;
        point_opts.seed = seed_for(task, 0);
        if task.n_probes > DIRECT_N_CAP {
            records.push(SweepRecord {
                n_probes: task.n_probes,
                bond_dim: 0,
                eta: task.eta,
                objective: task.kind,
                status: RecordStatus::Skipped,
                objective_value: f64::NAN,
                delta_phi: f64::NAN,
                shot_noise_bound: bounds.0,
                asymptotic_bound: bounds.1,
                iterations: 0,
                seed: point_opts.seed,
                wall_time_s: 0.0,
                mps: None,
            });
        } else {
            let warm: Vec<Vec<f64>> = best_mps
                .as_ref()
                .map(|(_, state)| {
                    vec![direct_params_from_state(state, task.objective.direct_gauge())]
                })
                .unwrap_or_default();
            let started = Instant::now();
            let outcome =
                optimize_direct_outcome(task.n_probes, &task.objective, &point_opts, &warm)?;
            let wall = started.elapsed().as_secs_f64();
            let result = outcome.result;
            records.push(SweepRecord {
                n_probes: task.n_probes,
                bond_dim: 0,
                eta: task.eta,
                objective: task.kind,
                status: if result.converged {
                    RecordStatus::Converged
                } else {
                    RecordStatus::NotConverged
                },
                objective_value: result.objective_value,
                delta_phi: result.delta_phi,
                shot_noise_bound: bounds.0,
                asymptotic_bound: bounds.1,
                iterations: result.iterations,
                seed: point_opts.seed,
                wall_time_s: wall,
                mps: None,
            });
        }
    }
    Ok(records)
}

fn worker_count(spec: &SweepSpec) -> usize {
    if let Some(w) = spec.workers {
        return w;
    }
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0)
}

/// Runs every grid point and returns records sorted by (N, D, η, objective).
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>, SweepError> {
    let mut spec = spec.clone();
    spec.validate()?;

    // sorted point list fixes the per-point seeds
    let mut keys: Vec<PointKey> = Vec::new();
    for &obj in &spec.objectives {
        for &n in &spec.n_list {
            for &eta in &spec.eta_list {
                for &d in &spec.d_list {
                    keys.push(key_of(n, d, eta, obj));
                }
            }
        }
    }
    keys.sort_unstable();
    keys.dedup();
    let seed_of = |key: &PointKey| {
        let index = keys.binary_search(key).expect("key enumerated") as u64;
        derive_seed(spec.opts.seed, index)
    };

    let mut groups: Vec<GroupTask> = Vec::new();
    for &kind in &spec.objectives {
        for &n in &spec.n_list {
            for &eta in &spec.eta_list {
                let objective = ObjectiveSpec::new(kind, eta, spec.gauge)?;
                let mps_ds: Vec<usize> =
                    spec.d_list.iter().copied().filter(|&d| d > 0).collect();
                let include_direct = spec.d_list.contains(&0);
                let seeds = spec
                    .d_list
                    .iter()
                    .map(|&d| (d, seed_of(&key_of(n, d, eta, kind))))
                    .collect();
                groups.push(GroupTask {
                    objective,
                    kind,
                    n_probes: n,
                    eta,
                    mps_ds,
                    include_direct,
                    seeds,
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(&spec))
        .build()
        .map_err(|e| SweepError::BadSpec(format!("cannot build worker pool: {e}")))?;
    let results: Vec<Result<Vec<SweepRecord>, SweepError>> = pool.install(|| {
        use rayon::prelude::*;
        groups.par_iter().map(|g| run_group(g, &spec.opts)).collect()
    });

    let mut records = Vec::new();
    for r in results {
        records.extend(r?);
    }
    records.sort_by_key(|r| key_of(r.n_probes, r.bond_dim, r.eta, r.objective));
    Ok(records)
}

fn format_value(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.12e}")
    }
}

/// Writes records as CSV with the frozen header. `timing` = false zeroes the
/// wall-time column so reruns compare byte for byte.
pub fn write_csv(
    records: &[SweepRecord],
    timing: bool,
    out: &mut dyn Write,
) -> Result<(), SweepError> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let wall = if timing { r.wall_time_s } else { 0.0 };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{:.6}",
            r.n_probes,
            r.bond_dim,
            r.eta,
            objective_label(&r.objective),
            format_value(r.objective_value),
            format_value(r.delta_phi),
            format_value(r.shot_noise_bound),
            format_value(r.asymptotic_bound),
            r.status.label(),
            r.iterations,
            r.seed,
            wall,
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RecordRow<'a> {
    #[serde(rename = "N")]
    n_probes: usize,
    #[serde(rename = "D")]
    bond_dim: usize,
    eta: f64,
    objective: &'a str,
    objective_value: Option<f64>,
    delta_phi: Option<f64>,
    shot_noise_bound: f64,
    asymptotic_bound: f64,
    converged: &'a str,
    iterations: u64,
    seed: u64,
    wall_time_s: f64,
}

pub fn write_json(
    records: &[SweepRecord],
    timing: bool,
    out: &mut dyn Write,
) -> Result<(), SweepError> {
    let rows: Vec<RecordRow> = records
        .iter()
        .map(|r| RecordRow {
            n_probes: r.n_probes,
            bond_dim: r.bond_dim,
            eta: r.eta,
            objective: objective_label(&r.objective),
            objective_value: (!r.objective_value.is_nan()).then_some(r.objective_value),
            delta_phi: (!r.delta_phi.is_nan()).then_some(r.delta_phi),
            shot_noise_bound: r.shot_noise_bound,
            asymptotic_bound: r.asymptotic_bound,
            converged: r.status.label(),
            iterations: r.iterations,
            seed: r.seed,
            wall_time_s: if timing { r.wall_time_s } else { 0.0 },
        })
        .collect();
    serde_json::to_writer_pretty(&mut *out, &rows)
        .map_err(|e| SweepError::Config(format!("json write failed: {e}")))?;
    writeln!(out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// flat key = value config files
// ---------------------------------------------------------------------------

fn parse_list<T: std::str::FromStr>(value: &str, key: &str) -> Result<Vec<T>, SweepError>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| SweepError::Config(format!("bad entry {s:?} for {key}: {e}")))
        })
        .collect()
}

/// Parses the flat `key = value` sweep configuration format. Lists are
/// comma separated; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<SweepSpec, SweepError> {
    let mut spec = SweepSpec::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| SweepError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "n" => spec.n_list = parse_list(value, key)?,
            "d" => spec.d_list = parse_list(value, key)?,
            "eta" => spec.eta_list = parse_list(value, key)?,
            "objective" => {
                spec.objectives = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| match s {
                        "qfi" => Ok(ObjectiveKind::ApproxQfiMax),
                        "ramsey" => Ok(ObjectiveKind::RamseyMin),
                        other => Err(SweepError::Config(format!("unknown objective {other:?}"))),
                    })
                    .collect::<Result<_, _>>()?
            }
            "gauge" => {
                spec.gauge = match value {
                    "auto" => None,
                    "real" => Some(Gauge::RealNonneg),
                    "ipower" => Some(Gauge::IPowerReal),
                    "complex" => Some(Gauge::FullComplex),
                    other => {
                        return Err(SweepError::Config(format!("unknown gauge {other:?}")))
                    }
                }
            }
            "starts" => {
                spec.opts.starts = value
                    .parse()
                    .map_err(|e| SweepError::Config(format!("bad starts: {e}")))?
            }
            "max_iters" => {
                spec.opts.max_iters = value
                    .parse()
                    .map_err(|e| SweepError::Config(format!("bad max_iters: {e}")))?
            }
            "tol" => {
                spec.opts.rel_tol = value
                    .parse()
                    .map_err(|e| SweepError::Config(format!("bad tol: {e}")))?
            }
            "seed" => {
                spec.opts.seed = value
                    .parse()
                    .map_err(|e| SweepError::Config(format!("bad seed: {e}")))?
            }
            "spread" => {
                spec.opts.init_spread = value
                    .parse()
                    .map_err(|e| SweepError::Config(format!("bad spread: {e}")))?
            }
            "format" => {
                spec.format = match value {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    other => {
                        return Err(SweepError::Config(format!("unknown format {other:?}")))
                    }
                }
            }
            "out" => spec.output = Some(PathBuf::from(value)),
            "dump_states" => {
                spec.dump_states = value
                    .parse()
                    .map_err(|e| SweepError::Config(format!("bad dump_states: {e}")))?
            }
            "workers" => {
                let w: usize = value
                    .parse()
                    .map_err(|e| SweepError::Config(format!("bad workers: {e}")))?;
                spec.workers = (w > 0).then_some(w);
            }
            "timing" => {
                spec.timing = value
                    .parse()
                    .map_err(|e| SweepError::Config(format!("bad timing: {e}")))?
            }
            other => return Err(SweepError::Config(format!("unknown key {other:?}"))),
        }
    }
    spec.validate()?;
    Ok(spec)
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    let mut out = String::new();
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{x}");
    }
    out
}

/// Canonical serialization; `parse_config(serialize_config(s))` reproduces
/// `s` exactly after validation.
pub fn serialize_config(spec: &SweepSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n = {}", join(&spec.n_list));
    let _ = writeln!(out, "d = {}", join(&spec.d_list));
    let _ = writeln!(out, "eta = {}", join(&spec.eta_list));
    let labels: Vec<&str> = spec.objectives.iter().map(objective_label).collect();
    let _ = writeln!(out, "objective = {}", labels.join(","));
    let gauge = match spec.gauge {
        None => "auto",
        Some(Gauge::RealNonneg) => "real",
        Some(Gauge::IPowerReal) => "ipower",
        Some(Gauge::FullComplex) => "complex",
    };
    let _ = writeln!(out, "gauge = {gauge}");
    let _ = writeln!(out, "starts = {}", spec.opts.starts);
    let _ = writeln!(out, "max_iters = {}", spec.opts.max_iters);
    let _ = writeln!(out, "tol = {}", spec.opts.rel_tol);
    let _ = writeln!(out, "seed = {}", spec.opts.seed);
    let _ = writeln!(out, "spread = {}", spec.opts.init_spread);
    let format = match spec.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let _ = writeln!(out, "format = {format}");
    if let Some(path) = &spec.output {
        let _ = writeln!(out, "out = {}", path.display());
    }
    let _ = writeln!(out, "dump_states = {}", spec.dump_states);
    let _ = writeln!(out, "workers = {}", spec.workers.unwrap_or(0));
    let _ = writeln!(out, "timing = {}", spec.timing);
    out
}

/// Suggested file name for a dumped optimal MPS.
pub fn dump_state_filename(record: &SweepRecord) -> String {
    format!(
        "state_n{}_d{}_eta{}_{}.mps",
        record.n_probes,
        record.bond_dim,
        record.eta,
        objective_label(&record.objective)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            n_list: vec![4],
            d_list: vec![0, 1, 2],
            eta_list: vec![0.9],
            objectives: vec![ObjectiveKind::ApproxQfiMax, ObjectiveKind::RamseyMin],
            opts: OptimizerOptions {
                starts: 3,
                max_iters: 2000,
                rel_tol: 1e-10,
                seed: 5,
                init_spread: 1.0,
            },
            ..SweepSpec::default()
        }
    }

    #[test]
    fn records_sorted_and_complete() {
        let records = run_sweep(&small_spec()).unwrap();
        // 2 objectives x 1 N x 1 eta x 3 D
        assert_eq!(records.len(), 6);
        let keys: Vec<_> = records
            .iter()
            .map(|r| (r.n_probes, r.bond_dim, objective_label(&r.objective)))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        for r in &records {
            assert!(r.delta_phi > 0.0);
            assert_relative_eq!(r.shot_noise_bound, 1.0 / (0.9f64 * 4.0).sqrt());
        }
    }

    #[test]
    fn direct_never_worse_than_mps_in_group() {
        let records = run_sweep(&small_spec()).unwrap();
        for kind in [ObjectiveKind::ApproxQfiMax, ObjectiveKind::RamseyMin] {
            let group: Vec<_> = records.iter().filter(|r| r.objective == kind).collect();
            let direct = group.iter().find(|r| r.bond_dim == 0).unwrap();
            for r in group.iter().filter(|r| r.bond_dim > 0) {
                assert!(r.delta_phi >= direct.delta_phi - 1e-9);
            }
        }
    }

    #[test]
    fn ramsey_d1_matches_shot_noise_record() {
        let spec = SweepSpec {
            n_list: vec![10],
            d_list: vec![1],
            eta_list: vec![0.9],
            objectives: vec![ObjectiveKind::RamseyMin],
            opts: OptimizerOptions {
                starts: 4,
                max_iters: 4000,
                rel_tol: 1e-11,
                seed: 1,
                init_spread: 1.0,
            },
            ..SweepSpec::default()
        };
        let records = run_sweep(&spec).unwrap();
        assert_eq!(records.len(), 1);
        assert_relative_eq!(records[0].delta_phi, 1.0 / 3.0, max_relative = 1e-6);
    }

    #[test]
    fn csv_deterministic_across_worker_counts() {
        let mut spec = small_spec();
        spec.timing = false;
        spec.workers = Some(1);
        let a = run_sweep(&spec).unwrap();
        spec.workers = Some(4);
        let b = run_sweep(&spec).unwrap();
        let mut csv_a = Vec::new();
        let mut csv_b = Vec::new();
        write_csv(&a, spec.timing, &mut csv_a).unwrap();
        write_csv(&b, spec.timing, &mut csv_b).unwrap();
        assert_eq!(csv_a, csv_b);
    }

    #[test]
    fn skipped_direct_beyond_cap() {
        let spec = SweepSpec {
            n_list: vec![160],
            d_list: vec![0],
            eta_list: vec![0.9],
            objectives: vec![ObjectiveKind::RamseyMin],
            ..SweepSpec::default()
        };
        let records = run_sweep(&spec).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].status, RecordStatus::Skipped);
        assert!(records[0].objective_value.is_nan());
        // bounds still present
        assert!(records[0].asymptotic_bound > 0.0);
        let mut csv = Vec::new();
        write_csv(&records, true, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.contains("skipped"));
    }

    #[test]
    fn csv_header_frozen() {
        assert_eq!(
            CSV_HEADER,
            "N,D,eta,objective,objective_value,delta_phi,shot_noise_bound,asymptotic_bound,converged,iterations,seed,wall_time_s"
        );
    }

    #[test]
    fn config_round_trip_is_idempotent() {
        let text = "
            # comment
            n = 20,10
            d = 1, 0, 5
            eta = 0.9, 0.3
            objective = ramsey,qfi
            starts = 8
            seed = 99
            tol = 1e-9
        ";
        let spec = parse_config(text).unwrap();
        let canonical = serialize_config(&spec);
        let spec2 = parse_config(&canonical).unwrap();
        assert_eq!(spec, spec2);
        assert_eq!(canonical, serialize_config(&spec2));
        assert_eq!(spec.n_list, vec![10, 20]);
        assert_eq!(spec.d_list, vec![0, 1, 5]);
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_values() {
        assert!(parse_config("bogus = 1\nn = 1\nd = 1\neta = 0.9\nobjective = qfi").is_err());
        assert!(parse_config("n = 1\nd = 1\neta = 1.5\nobjective = qfi").is_err());
        assert!(parse_config("n = 1\nd = 1\neta = 0.9\nobjective = nonsense").is_err());
        assert!(parse_config("n = \nd = 1\neta = 0.9\nobjective = qfi").is_err());
    }

    #[test]
    fn json_writer_emits_rows() {
        let spec = SweepSpec {
            n_list: vec![2],
            d_list: vec![1],
            eta_list: vec![0.9],
            objectives: vec![ObjectiveKind::ApproxQfiMax],
            opts: OptimizerOptions {
                starts: 2,
                max_iters: 1000,
                rel_tol: 1e-9,
                seed: 3,
                init_spread: 1.0,
            },
            ..SweepSpec::default()
        };
        let records = run_sweep(&spec).unwrap();
        let mut buf = Vec::new();
        write_json(&records, false, &mut buf).unwrap();
        let parsed: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 1);
        assert_eq!(parsed[0]["N"], 2);
        assert_eq!(parsed[0]["objective"], "qfi");
        assert_eq!(parsed[0]["wall_time_s"], 0.0);
    }
}
