//! Command-line front end: reproducible experiment runs with tabular or
//! structured reports. Every command is a thin adapter over the library;
//! no numerical logic lives here.
//!
//! Exit codes: 0 success, 2 validation / parameter failure, 3 dimension
//! overflow or oversized enumeration, 4 numerical failure, 5 I/O or parse
//! failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cohlab::channels::{
    apply_ensemble, ensemble_entropy_bounds, entropy_exchange_via_purification, UnitaryEnsemble,
};
use cohlab::coherence::{
    incoherent_distance_witness, l1_coherence, relative_entropy_coherence,
};
use cohlab::erasure::{
    chernoff_experiment, derive_cell_seed, rate_curve, sample_eraser, verify_eraser,
    check_exchange_floor, ErasureReport, OperatorFamily,
};
use cohlab::report::{render_structured, render_tabular, Manifest, OutputFormat, TabularRecord};
use cohlab::states::{von_neumann_entropy, DensityMatrix};
use cohlab::typicality::{typical_subspace, typicality_properties};
use cohlab::{Error, Result};

/// Environment variable overriding the operator dimension cap.
const DIM_CAP_ENV: &str = "COHLAB_DIM_CAP";

#[derive(Parser)]
#[command(
    name = "cohlab",
    version,
    about = "Coherence-erasure laboratory: measures, channels, typicality, and sampled erasure experiments"
)]
struct Cli {
    /// Worker threads (0 = machine parallelism). Results are identical for
    /// any value.
    #[arg(long, default_value_t = 0, global = true)]
    threads: usize,

    /// Report destination; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format: tabular (comma-separated) or structured (JSON).
    #[arg(long, default_value = "tabular", global = true)]
    format: OutputFormatArg,

    /// Override the operator dimension cap (also: COHLAB_DIM_CAP).
    #[arg(long, global = true)]
    dim_cap: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy)]
struct OutputFormatArg(OutputFormat);

impl std::str::FromStr for OutputFormatArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.parse().map(OutputFormatArg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Coherence measures of a state document.
    Coherence(StateArg),
    /// Apply an ensemble to a state; report input/output measures.
    Channel(ChannelArgs),
    /// Entropy exchange of an ensemble on a state, by both routes.
    Exchange(EnsembleStateArgs),
    /// Typical-subspace report for n copies of a state's spectrum.
    Typical(TypicalArgs),
    /// Check the entropy-exchange lower bound for an incoherent ensemble.
    Lemma1(Lemma1Args),
    /// Run the sampled erasure construction over seeds.
    Erase(EraseArgs),
    /// Operator concentration experiment against the analytic bound.
    Chernoff(ChernoffArgs),
    /// Rate curve: prescribed-size runs plus the downward size search.
    Rates(RatesArgs),
}

#[derive(Args)]
struct StateArg {
    /// State document (JSON: dim + matrix).
    #[arg(long)]
    state: PathBuf,
}

#[derive(Args)]
struct ChannelArgs {
    /// Ensemble document (JSON: dim + members).
    #[arg(long)]
    ensemble: PathBuf,
    #[arg(long)]
    state: PathBuf,
    /// Also write the output state document here.
    #[arg(long)]
    state_out: Option<PathBuf>,
}

#[derive(Args)]
struct EnsembleStateArgs {
    #[arg(long)]
    ensemble: PathBuf,
    #[arg(long)]
    state: PathBuf,
}

#[derive(Args)]
struct TypicalArgs {
    #[arg(long)]
    state: PathBuf,
    /// Copy count n.
    #[arg(long)]
    copies: usize,
    /// Typicality window delta.
    #[arg(long)]
    delta: f64,
}

#[derive(Args)]
struct Lemma1Args {
    /// Ensemble on the n-copy space (dim must equal state_dim^copies).
    #[arg(long)]
    ensemble: PathBuf,
    #[arg(long)]
    state: PathBuf,
    #[arg(long, default_value_t = 1)]
    copies: usize,
}

#[derive(Args)]
struct EraseArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    copies: usize,
    /// Error budget in (0, 1/2).
    #[arg(long)]
    eps: f64,
    /// Master seed; per-run cell seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of independent runs.
    #[arg(long, default_value_t = 1)]
    seeds: usize,
}

#[derive(Args)]
struct ChernoffArgs {
    #[arg(long)]
    dim: usize,
    /// Operator-mean floor a in (0, 1).
    #[arg(long)]
    mean_a: f64,
    #[arg(long)]
    eps: f64,
    /// Sample-average size N.
    #[arg(long)]
    members: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    eps: f64,
    /// Largest copy count to sweep.
    #[arg(long, default_value_t = 6)]
    max_copies: usize,
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.threads > 0 {
        // Determinism holds for any pool size; this only changes wall time.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    if let Some(cap) = cli.dim_cap {
        cohlab::numkernel::set_dim_cap(cap);
    } else if let Ok(v) = std::env::var(DIM_CAP_ENV) {
        match v.parse::<usize>() {
            Ok(cap) => cohlab::numkernel::set_dim_cap(cap),
            Err(_) => {
                eprintln!("error: {DIM_CAP_ENV}={v} is not a dimension");
                return ExitCode::from(2);
            }
        }
    }

    match run(&cli) {
        Ok(report) => {
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, report) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(5);
                }
            } else {
                print!("{report}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DimensionOverflow { .. } | Error::TooLarge { .. } => 3,
        Error::NumericalFailure { .. } => 4,
        Error::Io(_) | Error::Parse { .. } => 5,
        _ => 2,
    }
}

fn load_state(path: &Path) -> Result<DensityMatrix> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        context: format!("{}: {e}", path.display()),
    })
}

fn load_ensemble(path: &Path) -> Result<UnitaryEnsemble> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        context: format!("{}: {e}", path.display()),
    })
}

fn render_single_row(
    manifest: &Manifest,
    header: &str,
    values: String,
    format: OutputFormat,
    json: serde_json::Value,
) -> String {
    match format {
        OutputFormat::Tabular => {
            let mut out = String::new();
            for line in manifest.header_lines() {
                out.push_str(&line);
                out.push('\n');
            }
            out.push_str(header);
            out.push('\n');
            out.push_str(&values);
            out.push('\n');
            out
        }
        OutputFormat::Structured => {
            let doc = serde_json::json!({ "manifest": manifest_json(manifest), "rows": [json] });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
    }
}

fn manifest_json(m: &Manifest) -> serde_json::Value {
    serde_json::to_value(m).expect("manifest serializes")
}

fn run(cli: &Cli) -> Result<String> {
    let format = cli.format.0;
    match &cli.command {
        Command::Coherence(args) => {
            let rho = load_state(&args.state)?;
            let h = von_neumann_entropy(&rho)?;
            let c_r = relative_entropy_coherence(&rho)?;
            let c_l1 = l1_coherence(&rho);
            let (witness, _) = incoherent_distance_witness(&rho)?;
            let manifest =
                Manifest::new("coherence").param("state", args.state.display());
            Ok(render_single_row(
                &manifest,
                "dim,entropy,c_r,c_l1,witness_eps",
                format!(
                    "{},{:.6},{:.6},{:.6},{:.6}",
                    rho.dim(),
                    h,
                    c_r,
                    c_l1,
                    witness
                ),
                format,
                serde_json::json!({
                    "dim": rho.dim(),
                    "entropy": h,
                    "c_r": c_r,
                    "c_l1": c_l1,
                    "witness_eps": witness,
                }),
            ))
        }
        Command::Channel(args) => {
            let rho = load_state(&args.state)?;
            let e = load_ensemble(&args.ensemble)?;
            let out = apply_ensemble(&e, &rho)?;
            if let Some(path) = &args.state_out {
                fs::write(path, serde_json::to_string_pretty(&out).expect("state serializes"))?;
            }
            let h_in = von_neumann_entropy(&rho)?;
            let h_out = von_neumann_entropy(&out)?;
            let cr_in = relative_entropy_coherence(&rho)?;
            let cr_out = relative_entropy_coherence(&out)?;
            let (witness, _) = incoherent_distance_witness(&out)?;
            let manifest = Manifest::new("channel")
                .param("state", args.state.display())
                .param("ensemble", args.ensemble.display());
            Ok(render_single_row(
                &manifest,
                "dim,members,entropy_in,entropy_out,c_r_in,c_r_out,witness_eps_out",
                format!(
                    "{},{},{:.6},{:.6},{:.6},{:.6},{:.6}",
                    rho.dim(),
                    e.size(),
                    h_in,
                    h_out,
                    cr_in,
                    cr_out,
                    witness
                ),
                format,
                serde_json::json!({
                    "dim": rho.dim(),
                    "members": e.size(),
                    "entropy_in": h_in,
                    "entropy_out": h_out,
                    "c_r_in": cr_in,
                    "c_r_out": cr_out,
                    "witness_eps_out": witness,
                }),
            ))
        }
        Command::Exchange(args) => {
            let rho = load_state(&args.state)?;
            let e = load_ensemble(&args.ensemble)?;
            let (h_e, h_p, log_n) = ensemble_entropy_bounds(&e, &rho)?;
            // The purification route needs dim^2; report NaN when capped.
            let h_e_purified = match entropy_exchange_via_purification(&e, &rho) {
                Ok(v) => v,
                Err(Error::DimensionOverflow { .. }) => f64::NAN,
                Err(other) => return Err(other),
            };
            let manifest = Manifest::new("exchange")
                .param("state", args.state.display())
                .param("ensemble", args.ensemble.display());
            Ok(render_single_row(
                &manifest,
                "members,h_e,h_e_purification,h_p,log2_n",
                format!(
                    "{},{:.6},{:.6},{:.6},{:.6}",
                    e.size(),
                    h_e,
                    h_e_purified,
                    h_p,
                    log_n
                ),
                format,
                serde_json::json!({
                    "members": e.size(),
                    "h_e": h_e,
                    "h_e_purification": if h_e_purified.is_nan() { None } else { Some(h_e_purified) },
                    "h_p": h_p,
                    "log2_n": log_n,
                }),
            ))
        }
        Command::Typical(args) => {
            let rho = load_state(&args.state)?;
            let ts = typical_subspace(&rho, args.copies, args.delta)?;
            let report = typicality_properties(&ts, &rho)?;
            let manifest = Manifest::new("typical")
                .param("state", args.state.display())
                .param("copies", args.copies)
                .param("delta", args.delta);
            let header = "n,delta,entropy,dim_typ,mass,eps,dim_bounds_ok,sandwich_ok";
            let values = format!(
                "{},{:.6},{:.6},{},{:.6},{:.6},{},{}",
                args.copies,
                args.delta,
                ts.base.entropy(),
                report.dim_typ,
                report.mass,
                report.eps,
                report.dim_bounds_ok,
                report.sandwich_ok
            );
            Ok(render_single_row(
                &manifest,
                header,
                values,
                format,
                serde_json::json!({
                    "n": args.copies,
                    "delta": args.delta,
                    "entropy": ts.base.entropy(),
                    "dim_typ": report.dim_typ,
                    "mass": report.mass,
                    "eps": report.eps,
                    "dim_bounds_ok": report.dim_bounds_ok,
                    "sandwich_ok": report.sandwich_ok,
                }),
            ))
        }
        Command::Lemma1(args) => {
            let rho = load_state(&args.state)?;
            let e = load_ensemble(&args.ensemble)?;
            let report = check_exchange_floor(&e, &rho, args.copies)?;
            let manifest = Manifest::new("lemma1")
                .param("state", args.state.display())
                .param("ensemble", args.ensemble.display())
                .param("copies", args.copies);
            Ok(match format {
                OutputFormat::Tabular => render_tabular(&manifest, std::slice::from_ref(&report)),
                OutputFormat::Structured => {
                    render_structured(&manifest, std::slice::from_ref(&report))
                }
            })
        }
        Command::Erase(args) => {
            let rho = load_state(&args.state)?;
            if args.seeds == 0 {
                return Err(Error::param("need at least one seed"));
            }
            let runs: Vec<Result<ErasureReport>> = (0..args.seeds)
                .map(|idx| {
                    let cell = derive_cell_seed(args.seed, args.copies, idx);
                    let se = sample_eraser(&rho, args.copies, args.eps, cell)?;
                    verify_eraser(&se, &rho)
                })
                .collect();
            let rows = runs.into_iter().collect::<Result<Vec<_>>>()?;
            let manifest = Manifest::new("erase")
                .param("state", args.state.display())
                .param("copies", args.copies)
                .param("eps", args.eps)
                .param("seeds", args.seeds)
                .seed(args.seed);
            Ok(match format {
                OutputFormat::Tabular => render_tabular(&manifest, &rows),
                OutputFormat::Structured => render_structured(&manifest, &rows),
            })
        }
        Command::Chernoff(args) => {
            let outcome = chernoff_experiment(
                args.dim,
                args.mean_a,
                args.eps,
                args.members,
                args.trials,
                args.seed,
                OperatorFamily::TwirledState,
            )?;
            let manifest = Manifest::new("chernoff")
                .param("dim", args.dim)
                .param("mean_a", args.mean_a)
                .param("eps", args.eps)
                .param("members", args.members)
                .param("trials", args.trials)
                .seed(args.seed);
            Ok(match format {
                OutputFormat::Tabular => {
                    render_tabular(&manifest, std::slice::from_ref(&outcome))
                }
                OutputFormat::Structured => {
                    render_structured(&manifest, std::slice::from_ref(&outcome))
                }
            })
        }
        Command::Rates(args) => {
            let rho = load_state(&args.state)?;
            let curve = rate_curve(&rho, args.eps, args.max_copies, args.seeds, args.seed)?;
            let manifest = Manifest::new("rates")
                .param("state", args.state.display())
                .param("eps", args.eps)
                .param("max_copies", args.max_copies)
                .param("seeds", args.seeds)
                .seed(args.seed);
            Ok(match format {
                OutputFormat::Tabular => {
                    let mut out = render_tabular(&manifest, &curve.reports);
                    out.push_str("# section=best\n");
                    out.push_str(cohlab::erasure::BestRate::csv_header());
                    out.push('\n');
                    for b in &curve.best {
                        out.push_str(&b.csv_row());
                        out.push('\n');
                    }
                    out
                }
                OutputFormat::Structured => {
                    let doc = serde_json::json!({
                        "manifest": manifest_json(&manifest),
                        "reports": curve.reports,
                        "best": curve.best,
                    });
                    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
                    s.push('\n');
                    s
                }
            })
        }
    }
}
