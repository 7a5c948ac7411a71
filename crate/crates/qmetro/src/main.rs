//! Thin command-line front end; all logic lives in the library.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qmetro::optimize::{
    minimal_bond_dimension, optimize_direct, optimize_mps, BestParams, Gauge, ObjectiveKind,
    ObjectiveSpec, OptimizationResult, OptimizerOptions,
};
use qmetro::qfi::{exact_qfi, precision_from_qfi, ORACLE_N_CAP};
use qmetro::sweep::{
    self, dump_state_filename, parse_config, run_sweep, write_csv, write_json, OutputFormat,
    SweepSpec,
};
use qmetro::validate::run_validation;

#[derive(Parser)]
#[command(
    name = "qmetro",
    version,
    about = "Optimal probe states for lossy interferometric phase estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one (N, D, eta, objective) point; D = 0 runs the direct
    /// (brute force) optimizer over all N+1 amplitudes
    Optimize(OptimizeArgs),
    /// Sweep over N, D and eta grids and emit CSV or JSON records
    Sweep(SweepArgs),
    /// Find the smallest bond dimension within a threshold of the direct
    /// optimum
    MinBondDim(MinBondDimArgs),
    /// Run the seeded invariant suite and report pass/fail
    Validate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Qfi,
    Ramsey,
}

impl From<ObjectiveArg> for ObjectiveKind {
    fn from(value: ObjectiveArg) -> Self {
        match value {
            ObjectiveArg::Qfi => ObjectiveKind::ApproxQfiMax,
            ObjectiveArg::Ramsey => ObjectiveKind::RamseyMin,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GaugeArg {
    /// Per-objective default (real for qfi, ipower for ramsey)
    Auto,
    Real,
    Ipower,
    Complex,
}

impl GaugeArg {
    fn to_option(self) -> Option<Gauge> {
        match self {
            GaugeArg::Auto => None,
            GaugeArg::Real => Some(Gauge::RealNonneg),
            GaugeArg::Ipower => Some(Gauge::IPowerReal),
            GaugeArg::Complex => Some(Gauge::FullComplex),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args, Clone, Copy)]
struct OptimizerArgs {
    /// Seeded random starts per optimization
    #[arg(long, default_value_t = 16)]
    starts: usize,
    /// Master seed for reproducible runs
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative objective tolerance declaring convergence
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Iteration cap per start
    #[arg(long, default_value_t = 20_000)]
    max_iters: u64,
    /// Half-width of the random initialization interval
    #[arg(long, default_value_t = 1.0)]
    spread: f64,
}

impl OptimizerArgs {
    fn options(&self) -> OptimizerOptions {
        OptimizerOptions {
            starts: self.starts,
            max_iters: self.max_iters,
            rel_tol: self.tol,
            seed: self.seed,
            init_spread: self.spread,
        }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    /// Probe count N
    #[arg(long)]
    n: usize,
    /// Bond dimension D (0 = direct optimization)
    #[arg(long, default_value_t = 0)]
    d: usize,
    /// Transmissivity eta
    #[arg(long)]
    eta: f64,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Qfi)]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value_t = GaugeArg::Auto)]
    gauge: GaugeArg,
    /// Cross-check against the exact QFI oracle (N <= 30)
    #[arg(long, value_enum, default_value_t = Toggle::Off)]
    oracle: Toggle,
    #[command(flatten)]
    optimizer: OptimizerArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep configuration file (flat key = value format)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Probe counts, comma separated
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Bond dimensions, comma separated (0 = direct)
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    /// Transmissivities, comma separated
    #[arg(long, value_delimiter = ',')]
    eta: Vec<f64>,
    /// Objectives, comma separated
    #[arg(long, value_enum, value_delimiter = ',')]
    objective: Vec<ObjectiveArg>,
    #[arg(long, value_enum)]
    gauge: Option<GaugeArg>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write optimal MPS records next to the output
    #[arg(long)]
    dump_states: bool,
    /// Worker cap (also honored from QMETRO_WORKERS)
    #[arg(long)]
    workers: Option<usize>,
    /// Zero the wall-time column for byte-reproducible output
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<u64>,
    #[arg(long)]
    spread: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct MinBondDimArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    eta: f64,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Qfi)]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value_t = GaugeArg::Auto)]
    gauge: GaugeArg,
    /// Relative precision discrepancy to reach
    #[arg(long, default_value_t = 0.01)]
    threshold: f64,
    /// Give up above this bond dimension
    #[arg(long, default_value_t = 12)]
    d_cap: usize,
    #[command(flatten)]
    optimizer: OptimizerArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match cli.command {
        Command::Optimize(args) => cmd_optimize(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::MinBondDim(args) => cmd_min_bond_dim(args),
        Command::Validate => return cmd_validate(),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn print_result(kind: ObjectiveKind, eta: f64, n: usize, d: usize, res: &OptimizationResult) {
    match kind {
        ObjectiveKind::ApproxQfiMax => {
            println!("objective          qfi (maximize F~)");
        }
        ObjectiveKind::RamseyMin => {
            println!("objective          ramsey (minimize delta-phi)");
        }
    }
    println!("N                  {n}");
    if d == 0 {
        println!("D                  direct (all N+1 amplitudes)");
    } else {
        println!("D                  {d}");
    }
    println!("eta                {eta}");
    if kind == ObjectiveKind::ApproxQfiMax {
        println!("F~                 {:.12e}", res.objective_value);
    }
    println!("delta_phi          {:.12e}", res.delta_phi);
    println!(
        "shot_noise_bound   {:.12e}",
        sweep::shot_noise_bound(n, eta)
    );
    println!(
        "asymptotic_bound   {:.12e}",
        sweep::asymptotic_bound(n, eta)
    );
    println!("converged          {}", res.converged);
    println!("iterations         {}", res.iterations);
    println!("seed               {}", res.seed);
    if let BestParams::Mps(mps) = &res.params {
        println!("optimal MPS (canonical form, N D / Re a Im a Re b Im b):");
        print!("{}", mps.to_text());
    }
}

fn cmd_optimize(args: OptimizeArgs) -> Result<(), String> {
    let kind = ObjectiveKind::from(args.objective);
    let objective =
        ObjectiveSpec::new(kind, args.eta, args.gauge.to_option()).map_err(|e| e.to_string())?;
    let opts = args.optimizer.options();
    let res = if args.d == 0 {
        optimize_direct(args.n, &objective, &opts).map_err(|e| e.to_string())?
    } else {
        optimize_mps(args.n, args.d, &objective, &opts).map_err(|e| e.to_string())?
    };
    print_result(kind, args.eta, args.n, args.d, &res);

    if args.oracle == Toggle::On {
        if args.n <= ORACLE_N_CAP {
            let exact = exact_qfi(&res.state, args.eta).map_err(|e| e.to_string())?;
            println!("exact_qfi          {exact:.12e}");
            if kind == ObjectiveKind::ApproxQfiMax {
                let gap = (res.objective_value - exact) / exact.max(f64::MIN_POSITIVE);
                println!("approx_gap         {gap:.6e} (relative, F~ above exact)");
            }
            if let Ok(crb) = precision_from_qfi(exact, 1) {
                println!("exact_crb          {crb:.12e}");
            }
        } else {
            println!(
                "exact_qfi          skipped (N = {} above oracle cap {})",
                args.n, ORACLE_N_CAP
            );
        }
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), String> {
    let mut spec = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| e.to_string())?
        }
        None => SweepSpec::default(),
    };
    // flags extend or override the config
    if !args.n.is_empty() {
        spec.n_list = args.n.clone();
    }
    if !args.d.is_empty() {
        spec.d_list = args.d.clone();
    }
    if !args.eta.is_empty() {
        spec.eta_list = args.eta.clone();
    }
    if !args.objective.is_empty() {
        spec.objectives = args.objective.iter().map(|&o| o.into()).collect();
    }
    if let Some(g) = args.gauge {
        spec.gauge = g.to_option();
    }
    if let Some(v) = args.starts {
        spec.opts.starts = v;
    }
    if let Some(v) = args.seed {
        spec.opts.seed = v;
    }
    if let Some(v) = args.tol {
        spec.opts.rel_tol = v;
    }
    if let Some(v) = args.max_iters {
        spec.opts.max_iters = v;
    }
    if let Some(v) = args.spread {
        spec.opts.init_spread = v;
    }
    if let Some(v) = args.workers {
        spec.workers = Some(v);
    }
    if args.out.is_some() {
        spec.output = args.out.clone();
    }
    if let Some(f) = args.format {
        spec.format = match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    if args.dump_states {
        spec.dump_states = true;
    }
    if args.no_timing {
        spec.timing = false;
    }

    let records = run_sweep(&spec).map_err(|e| e.to_string())?;

    let mut buffer: Vec<u8> = Vec::new();
    match spec.format {
        OutputFormat::Csv => write_csv(&records, spec.timing, &mut buffer),
        OutputFormat::Json => write_json(&records, spec.timing, &mut buffer),
    }
    .map_err(|e| e.to_string())?;

    match &spec.output {
        Some(path) => {
            std::fs::write(path, &buffer)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            eprintln!("wrote {} records to {}", records.len(), path.display());
        }
        None => {
            std::io::stdout()
                .write_all(&buffer)
                .map_err(|e| e.to_string())?;
        }
    }

    if spec.dump_states {
        let dir = spec
            .output
            .as_ref()
            .and_then(|p| p.parent().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        for record in records.iter().filter(|r| r.mps.is_some()) {
            let path = dir.join(dump_state_filename(record));
            let mps = record.mps.as_ref().expect("filtered on presence");
            std::fs::write(&path, mps.to_text())
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
    }
    Ok(())
}

fn cmd_min_bond_dim(args: MinBondDimArgs) -> Result<(), String> {
    let kind = ObjectiveKind::from(args.objective);
    let objective =
        ObjectiveSpec::new(kind, args.eta, args.gauge.to_option()).map_err(|e| e.to_string())?;
    let report = minimal_bond_dimension(
        args.n,
        &objective,
        args.threshold,
        args.d_cap,
        &args.optimizer.options(),
    )
    .map_err(|e| e.to_string())?;

    println!(
        "direct reference   delta_phi = {:.12e}",
        report.direct.delta_phi
    );
    println!("D    delta_phi           relative_gap");
    for point in &report.ladder {
        println!(
            "{:<4} {:.12e}  {:+.6e}",
            point.bond_dim, point.delta_phi, point.relative_gap
        );
    }
    match report.d_star {
        Some(d) => println!(
            "minimal D = {d} reaches the direct optimum within {}",
            report.threshold
        ),
        None => println!(
            "no D <= {} within {} of the direct optimum (cap exceeded)",
            report.d_cap, report.threshold
        ),
    }
    Ok(())
}

fn cmd_validate() -> ExitCode {
    let report = run_validation();
    for c in &report.checks {
        println!(
            "{} {:<32} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    if report.all_passed() {
        println!("validation passed ({} checks)", report.checks.len());
        ExitCode::SUCCESS
    } else {
        println!("validation FAILED");
        ExitCode::from(2)
    }
}
