//! Command-line front end: evaluate bounds, simulate protocols, sweep
//! the saturating family, run the REE optimizer and the detector
//! experiment, and drive the randomized verification suites.
//!
//! Exit codes: 0 on success, 1 when a proven invariant or bound check
//! fails, 2 on input errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use locc_info::bounds::{
    build_detector_setup, delta_e, entropy_bound, verify_protocol_with_result, DeltaEOptions,
};
use locc_info::ensemble::{binary_entropy, Ensemble};
use locc_info::entangle::{ree, ree_bell_diagonal, EntanglementMeasure, ReeOptions};
use locc_info::ensemble::Party;
use locc_info::measure::{
    optimize_one_round_local, optimize_two_round, run_protocol, GridResolution, ProtocolTree,
};
use locc_info::qmat::{CMatrix, DensityMatrix};
use locc_info::states::{
    bell_ensemble, canonical_ensemble, conjugate_detectors, copy_classical, partial4_ensemble,
    product_basis_ensemble, tensor_power_ensemble, EnsembleSpec,
};
use locc_info::verify::{default_trials, run_suite, SUITES};
use locc_info::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "locc-info",
    version,
    about = "Bounds and simulations for locally accessible information in bipartite ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the information bounds for an ensemble.
    Bounds(BoundsArgs),
    /// Run a protocol tree and check it against every bound.
    Simulate(SimulateArgs),
    /// Sweep the saturating family and report achieved vs n - E.
    Sweep(SweepArgs),
    /// Minimize relative entropy over the PPT set for one state.
    Ree(ReeArgs),
    /// Detector experiment: H_s - I_LOCC >= delta_E.
    DeltaE(DeltaEArgs),
    /// Run the randomized property suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct EnsembleSource {
    /// Ensemble family: bell4, canonical_dxd, partial4, tensor_power,
    /// copy_classical, product_basis.
    #[arg(long)]
    family: Option<String>,
    /// a1 parameter(s); repeat for tensor_power pairs.
    #[arg(long = "a1")]
    a1: Vec<f64>,
    /// Local dimension d for d x d families.
    #[arg(long)]
    d: Option<usize>,
    /// Prior probabilities (comma separated).
    #[arg(long, value_delimiter = ',')]
    priors: Option<Vec<f64>>,
    /// Ensemble JSON or family-spec JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: json or csv (csv only for sweep).
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    source: EnsembleSource,
    /// Protocol JSON file or a named protocol: computational,
    /// alice-computational, bob-computational, optimized-one-round-a,
    /// optimized-one-round-b, optimized-two-round.
    #[arg(long)]
    protocol: Option<String>,
    /// Projective-search grid per qubit, as polar x azimuthal.
    #[arg(long, default_value = "24x48")]
    grid: String,
    /// Saturation tolerance, bits.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: EnsembleSource,
    /// Protocol JSON file or a named protocol (see bounds --help).
    #[arg(long, default_value = "computational")]
    protocol: String,
    /// Projective-search grid per qubit, as polar x azimuthal.
    #[arg(long, default_value = "24x48")]
    grid: String,
    /// Saturation tolerance, bits.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Family to sweep: partial4 or tensor_power.
    #[arg(long, default_value = "partial4")]
    family: String,
    /// Number of a1 grid points over [0, 1].
    #[arg(long, default_value_t = 21)]
    points: usize,
    /// Fixed a1 values for the remaining tensor_power pairs.
    #[arg(long = "a1")]
    a1: Vec<f64>,
    /// Maximum allowed |achieved - (n - E)| per point, bits.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ReeArgs {
    /// State JSON file: { "dims": [d1, d2], "matrix": [[[re, im], ...], ...] }.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Bell-diagonal weights, e.g. 0.75,0.25,0,0.
    #[arg(long, value_delimiter = ',')]
    bell_diagonal: Option<Vec<f64>>,
    /// Relative objective-change stopping tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DeltaEArgs {
    /// Signal dimension d (canonical d x d ensemble with conjugate
    /// detectors).
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Signal priors (d^2 values, comma separated; uniform by default).
    #[arg(long, value_delimiter = ',')]
    priors: Option<Vec<f64>>,
    /// Protocol JSON file or a named computational protocol.
    #[arg(long, default_value = "computational")]
    protocol: String,
    /// Also run the PPT optimizer on the joint cut (true/false).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    ppt: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name (see --list) or "all".
    #[arg(long, default_value = "all")]
    suite: String,
    /// Trials per suite (suite default when omitted).
    #[arg(long)]
    trials: Option<usize>,
    /// Seed for the per-trial ChaCha8 generators.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// List available suites and exit.
    #[arg(long)]
    list: bool,
    #[command(flatten)]
    output: OutputArgs,
}

enum CliError {
    Input(String),
    Invariant(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BoundViolation(_) => CliError::Invariant(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("LOCC_INFO_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Invariant(msg)) => {
            eprintln!("invariant violation: {}", msg);
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("input error: {}", msg);
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Ree(args) => cmd_ree(args),
        Command::DeltaE(args) => cmd_delta_e(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn load_ensemble(source: &EnsembleSource) -> Result<Ensemble, CliError> {
    if let Some(path) = &source.input {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {}", path.display(), e)))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: {}", path.display(), e)))?;
        // family-spec files carry a "family" key, ensemble files carry "states"
        if value.get("family").is_some() {
            let spec: EnsembleSpec = serde_json::from_value(value)
                .map_err(|e| CliError::Input(format!("{}: {}", path.display(), e)))?;
            return Ok(spec.build()?);
        }
        return Ok(Ensemble::from_json(&value)?);
    }
    let family = source
        .family
        .as_deref()
        .ok_or_else(|| CliError::Input("missing --family or --input".into()))?;
    let priors = source.priors.as_deref();
    let ensemble = match family {
        "bell4" => bell_ensemble(priors)?,
        "canonical_dxd" => canonical_ensemble(require_d(source)?, priors)?,
        "partial4" => {
            let a1 = *source
                .a1
                .first()
                .ok_or_else(|| CliError::Input("partial4 requires --a1".into()))?;
            partial4_ensemble(a1)?
        }
        "tensor_power" => {
            if source.a1.is_empty() {
                return Err(CliError::Input("tensor_power requires --a1 values".into()));
            }
            tensor_power_ensemble(&source.a1)?
        }
        "copy_classical" => copy_classical(require_d(source)?)?,
        "product_basis" => product_basis_ensemble(require_d(source)?)?,
        other => {
            return Err(CliError::Input(format!(
                "unknown family \"{}\" (expected bell4, canonical_dxd, partial4, tensor_power, copy_classical, product_basis)",
                other
            )))
        }
    };
    Ok(ensemble)
}

fn require_d(source: &EnsembleSource) -> Result<usize, CliError> {
    source
        .d
        .ok_or_else(|| CliError::Input("this family requires --d".into()))
}

fn parse_grid(grid: &str) -> Result<GridResolution, CliError> {
    let (polar, azimuthal) = grid.split_once('x').ok_or_else(|| {
        CliError::Input(format!("grid \"{}\" is not of the form <polar>x<azimuthal>", grid))
    })?;
    let polar = polar
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("bad polar grid count in \"{}\"", grid)))?;
    let azimuthal = azimuthal
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("bad azimuthal grid count in \"{}\"", grid)))?;
    Ok(GridResolution::new(polar, azimuthal))
}

fn load_protocol(name: &str, e: &Ensemble, grid: GridResolution) -> Result<ProtocolTree, CliError> {
    let dims = e.dims();
    if dims.len() != 2 {
        return Err(CliError::Input(format!(
            "protocols require a bipartite ensemble, got dims {:?}",
            dims
        )));
    }
    match name {
        "computational" => Ok(ProtocolTree::two_round_computational(dims[0], dims[1])),
        "alice-computational" => Ok(ProtocolTree::computational_round(Party::A, dims[0])),
        "bob-computational" => Ok(ProtocolTree::computational_round(Party::B, dims[1])),
        "optimized-one-round-a" => {
            let (instrument, _) = optimize_one_round_local(e, Party::A, grid)?;
            Ok(ProtocolTree::round(Party::A, instrument)?)
        }
        "optimized-one-round-b" => {
            let (instrument, _) = optimize_one_round_local(e, Party::B, grid)?;
            Ok(ProtocolTree::round(Party::B, instrument)?)
        }
        "optimized-two-round" => {
            let (tree, _) = optimize_two_round(e, Party::A, grid)?;
            Ok(tree)
        }
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{}: {}", path, e)))?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("{}: {}", path, e)))?;
            Ok(ProtocolTree::from_json(&value)?)
        }
    }
}

fn write_output(output: &OutputArgs, content: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Input(format!("{}: {}", path.display(), e))),
        None => {
            if content.ends_with('\n') {
                print!("{}", content);
            } else {
                println!("{}", content);
            }
            Ok(())
        }
    }
}

fn to_pretty(value: &impl serde::Serialize) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn cmd_bounds(args: BoundsArgs) -> Result<(), CliError> {
    let e = load_ensemble(&args.source)?;
    let report = match &args.protocol {
        Some(name) => {
            let tree = load_protocol(name, &e, parse_grid(&args.grid)?)?;
            locc_info::bounds::verify_protocol_against_bounds(&e, &tree, args.tol)?
        }
        None => entropy_bound(&e)?,
    };
    write_output(&args.output, &to_pretty(&report)?)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let e = load_ensemble(&args.source)?;
    let tree = load_protocol(&args.protocol, &e, parse_grid(&args.grid)?)?;
    let (bounds, protocol) = verify_protocol_with_result(&e, &tree, args.tol)?;
    let combined = serde_json::json!({
        "bounds": bounds,
        "protocol": protocol,
    });
    write_output(&args.output, &serde_json::to_string_pretty(&combined)?)
}

#[derive(serde::Serialize)]
struct SweepRow {
    a1: f64,
    e_bar: f64,
    n_minus_e: f64,
    achieved: f64,
    gap: f64,
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    if args.points < 2 {
        return Err(CliError::Input("sweep needs at least 2 points".into()));
    }
    let mut rows = Vec::with_capacity(args.points);
    for i in 0..args.points {
        let a1 = i as f64 / (args.points - 1) as f64;
        let e = match args.family.as_str() {
            "partial4" => partial4_ensemble(a1)?,
            "tensor_power" => {
                let mut list = vec![a1];
                list.extend(&args.a1);
                tensor_power_ensemble(&list)?
            }
            other => {
                return Err(CliError::Input(format!(
                    "sweep supports partial4 or tensor_power, got \"{}\"",
                    other
                )))
            }
        };
        let dims = e.dims().to_vec();
        let n = (e.dim() as f64).log2();
        let tree = ProtocolTree::two_round_computational(dims[0], dims[1]);
        let achieved = run_protocol(&e, &tree)?.total_info;
        let mut e_bar = binary_entropy(a1 * a1);
        if args.family == "tensor_power" {
            for &rest in &args.a1 {
                e_bar += binary_entropy(rest * rest);
            }
        }
        let n_minus_e = n - e_bar;
        let gap = achieved - n_minus_e;
        rows.push(SweepRow {
            a1,
            e_bar,
            n_minus_e,
            achieved,
            gap,
        });
    }

    let content = match args.output.format.as_str() {
        "csv" => {
            let mut out = String::from("a1,e_bar,n_minus_e,achieved,gap\n");
            for r in &rows {
                out.push_str(&format!(
                    "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                    r.a1, r.e_bar, r.n_minus_e, r.achieved, r.gap
                ));
            }
            out
        }
        "json" => serde_json::to_string_pretty(&rows)?,
        other => {
            return Err(CliError::Input(format!(
                "unknown format \"{}\" (expected json or csv)",
                other
            )))
        }
    };
    write_output(&args.output, &content)?;

    let worst = rows.iter().map(|r| r.gap.abs()).fold(0.0, f64::max);
    if worst > args.tol {
        return Err(CliError::Invariant(format!(
            "sweep gap {} exceeds tolerance {}",
            worst, args.tol
        )));
    }
    Ok(())
}

fn cmd_ree(args: ReeArgs) -> Result<(), CliError> {
    let (rho, expected) = match (&args.input, &args.bell_diagonal) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{}: {}", path.display(), e)))?;
            let parsed: StateJson = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("{}: {}", path.display(), e)))?;
            let mat = CMatrix::from_entries(&parsed.matrix)?;
            (DensityMatrix::new(mat, &parsed.dims)?, None)
        }
        (None, Some(weights)) => {
            let rho = locc_info::states::bell_diagonal_state(weights)?;
            (rho, Some(ree_bell_diagonal(weights)?))
        }
        _ => {
            return Err(CliError::Input(
                "provide exactly one of --input or --bell-diagonal".into(),
            ))
        }
    };
    let opts = ReeOptions {
        tol: args.tol,
        ..Default::default()
    };
    let report = ree(&rho, &[0], &opts)?;
    let mut value = serde_json::to_value(&report)?;
    if let Some(expected) = expected {
        let obj = value.as_object_mut().expect("report is an object");
        obj.insert("closed_form".into(), serde_json::json!(expected));
        obj.insert(
            "closed_form_abs_diff".into(),
            serde_json::json!((report.value - expected).abs()),
        );
    }
    write_output(&args.output, &serde_json::to_string_pretty(&value)?)
}

#[derive(serde::Deserialize)]
struct StateJson {
    dims: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

fn cmd_delta_e(args: DeltaEArgs) -> Result<(), CliError> {
    let signal = canonical_ensemble(args.d, args.priors.as_deref())?;
    let detectors = conjugate_detectors(&signal)?;
    let setup = build_detector_setup(&signal, detectors)?;

    // the uniform-priors joint is separable across AC:BD for this family
    let uniform_signal = canonical_ensemble(args.d, None)?;
    let uniform_detectors = conjugate_detectors(&uniform_signal)?;
    let reference = build_detector_setup(&uniform_signal, uniform_detectors)?
        .joint()
        .clone();

    let tree = load_protocol(&args.protocol, &signal, GridResolution::default())?;
    let report = delta_e(
        &setup,
        &tree,
        EntanglementMeasure::PureEntropy,
        &DeltaEOptions {
            reference: Some(reference),
            run_ppt_optimizer: args.ppt,
            ree_options: None,
        },
    )?;
    write_output(&args.output, &to_pretty(&report)?)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    if args.list {
        for suite in SUITES {
            println!("{} (default {} trials)", suite, default_trials(suite));
        }
        return Ok(());
    }
    let suites: Vec<&str> = if args.suite == "all" {
        SUITES.to_vec()
    } else if let Some(pos) = SUITES.iter().position(|s| *s == args.suite) {
        vec![SUITES[pos]]
    } else {
        return Err(CliError::Input(format!(
            "unknown suite \"{}\"; available: {}",
            args.suite,
            SUITES.join(", ")
        )));
    };

    let mut reports = Vec::new();
    let mut all_passed = true;
    for suite in suites {
        let trials = args.trials.unwrap_or_else(|| default_trials(suite));
        let report = run_suite(suite, args.seed, trials)?;
        eprintln!(
            "suite {:10} {:>4}/{:<4} passed  max violation {:+.3e}{}",
            report.suite,
            report.trials - report.failures,
            report.trials,
            report.max_violation,
            if report.passed() {
                String::new()
            } else {
                format!(
                    "  failing trials {:?} (seed {})",
                    report.failing_trials, report.seed
                )
            }
        );
        all_passed &= report.passed();
        reports.push(report);
    }
    write_output(&args.output, &to_pretty(&reports)?)?;
    if !all_passed {
        return Err(CliError::Invariant("verification suite failures".into()));
    }
    Ok(())
}
