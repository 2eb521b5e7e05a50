mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use infnear_core::cluster::{render_enriques, DiagramFormat};
use infnear_core::io::{self, ClusterJson};
use infnear_core::local_algebra::{colength, EmbeddedCluster};
use infnear_core::maximal_rank::{
    check_level_statement, dk_maximal_rank, exceptional_families, rank_sweep, LevelStatement,
};
use infnear_core::plane_systems::{
    ell_general, exception_catalog, expected_dimension, forms, max_rank, max_rank_general,
    max_rank_in_degree, DEFAULT_HEIGHT,
};
use infnear_core::specialization::{
    limit_dimension_sweep, limit_identities, one_more_point_experiment, semicontinuity_experiment,
};
use infnear_core::synthesis::{certify, existencia_driver, existencia_in_degree, SingularitySpec};
use infnear_core::{unloading, Error, WeightedCluster};

use report::{ErrorRecord, Report, Timings, Verdict};

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "infnear",
    version,
    about = "Clusters of infinitely near points, plane curves through them, and curves with prescribed tacnodes and cusps"
)]
struct Cli {
    /// Seed for every random draw of the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Height bound for random rationals (at least 2).
    #[arg(long, global = true, env = "INFNEAR_HEIGHT", default_value_t = DEFAULT_HEIGHT)]
    height: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    #[serde(skip)]
    format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    report: Option<PathBuf>,
    #[arg(short, long, global = true, action = ArgAction::Count)]
    #[serde(skip)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Unload a weighted cluster to its consistent form.
    Unload {
        #[arg(long = "in")]
        input: PathBuf,
        /// Include every unloading step.
        #[arg(long)]
        trace: bool,
    },
    /// Length of the cluster scheme; also the colength when the file
    /// places every chain.
    Length {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Dimension of the degree-d system through a union.
    Ell {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        degree: usize,
    },
    /// Maximal rank of a union on the audit window.
    Maxrank {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        all_degrees_up_to: Option<usize>,
    },
    /// The systems of one point and double points without maximal rank.
    Catalog,
    /// Build and certify a curve with prescribed tacnodes and cusps.
    Synthesize {
        #[arg(long, value_delimiter = ',')]
        tacnodes: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        cusps: Vec<usize>,
        /// Singularity specification file, instead of the two lists.
        #[arg(long, conflicts_with_all = ["tacnodes", "cusps"])]
        spec: Option<PathBuf>,
        #[arg(long)]
        degree: Option<usize>,
        /// Curve output file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output file for the placed clusters.
        #[arg(long)]
        union_out: Option<PathBuf>,
    },
    /// Certify that a curve goes sharply through a union and has no other
    /// singularities.
    Verify {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        union: PathBuf,
    },
    Experiment(ExperimentArgs),
    /// Enriques diagram of a cluster.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Diagram::Ascii)]
        diagram: Diagram,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Diagram {
    Ascii,
    Dot,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ExperimentKind {
    Semicontinuity,
    LimitIdentities,
    LimitDimension,
    OneMorePoint,
    Levels,
    RankSweep,
    ExceptionalFamilies,
    Dk,
}

#[derive(Args, Debug, Serialize)]
struct ExperimentArgs {
    #[arg(value_enum)]
    kind: ExperimentKind,
    /// Trials, samples or parameter sets (per kind).
    #[arg(long)]
    trials: Option<usize>,
    /// Multiplicities for semicontinuity and one-more-point.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    mults: Option<Vec<i64>>,
    #[arg(long, default_value_t = 5)]
    max_s: usize,
    #[arg(long, default_value_t = 10)]
    max_m: i64,
    #[arg(long, default_value_t = 12)]
    max_i: usize,
    #[arg(long, default_value_t = 12)]
    max_j: usize,
    #[arg(long, default_value_t = 8)]
    max_degree: usize,
}

enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn record(&self) -> ErrorRecord {
        match self {
            Failure::Io(m) => ErrorRecord {
                kind: "io".into(),
                message: m.clone(),
            },
            Failure::Core(e) => {
                let kind = match e {
                    Error::Parse(_) => "parse",
                    Error::InvalidCluster(_) => "invalid-cluster",
                    Error::Precondition(_) => "precondition",
                    Error::Truncation(_) => "truncation",
                    Error::ForbiddenDirection(_) => "forbidden-direction",
                    Error::Internal(_) => "internal",
                };
                ErrorRecord {
                    kind: kind.into(),
                    message: e.to_string(),
                }
            }
        }
    }
}

type Outcome = Result<(Value, bool), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn cluster_file(path: &Path) -> Result<ClusterJson, Failure> {
    Ok(io::parse_json(&read(path)?)?)
}

fn fully_placed(file: &ClusterJson) -> bool {
    file.chains.iter().all(|c| c.base.is_some())
}

/// Chains of the file as separate single-chain clusters.
fn chain_clusters(file: &ClusterJson) -> Result<Vec<WeightedCluster>, Failure> {
    let wc = io::cluster_from_json(file)?;
    Ok((0..wc.cluster.chains().len())
        .map(|k| wc.chain_component(k))
        .collect())
}

fn run_unload(input: &Path, trace: bool) -> Outcome {
    let wc = io::parse_cluster(&read(input)?)?;
    let t = unloading::unload(&wc)?;
    let mut out = json!({
        "input": wc.mults.0,
        "delta": t.final_mults(),
        "length": unloading::length(&wc)?,
        "steps": t.steps.len(),
    });
    if trace {
        out["trace"] = to_value(&t.steps);
    }
    Ok((out, true))
}

fn run_length(input: &Path) -> Outcome {
    let file = cluster_file(input)?;
    let wc = io::cluster_from_json(&file)?;
    let length = unloading::length(&wc)?;
    if !fully_placed(&file) {
        return Ok((json!({ "length": length }), true));
    }
    let z = io::union_from_json(&file)?;
    let colengths: Vec<usize> = z.components.iter().map(colength).collect();
    let total: usize = colengths.iter().sum();
    Ok((
        json!({ "length": length, "colength": total, "component_colengths": colengths }),
        total as u64 == length,
    ))
}

fn run_ell(input: &Path, d: usize, seed: u64, height: u32) -> Outcome {
    let file = cluster_file(input)?;
    if fully_placed(&file) {
        let v = max_rank_in_degree(&io::union_from_json(&file)?, d)?;
        let ok = v.ok();
        return Ok((
            json!({
                "placement": "given",
                "degree": d,
                "rank": v.rank,
                "expected": v.expected_dimension,
                "actual": v.ell,
                "seed": seed,
            }),
            ok,
        ));
    }
    let clusters = chain_clusters(&file)?;
    let len: u64 = clusters
        .iter()
        .map(unloading::length)
        .sum::<infnear_core::Result<u64>>()?;
    let e = ell_general(&clusters, d, seed, height)?;
    let expected = expected_dimension(len, d);
    Ok((
        json!({
            "placement": "general",
            "degree": d,
            "rank": forms(d) as i64 - 1 - e,
            "expected": expected,
            "actual": e,
            "seed": seed,
        }),
        e == expected,
    ))
}

fn run_maxrank(input: &Path, up_to: Option<usize>, seed: u64, height: u32) -> Outcome {
    let file = cluster_file(input)?;
    let (placement, rep) = if fully_placed(&file) {
        ("given", max_rank(&io::union_from_json(&file)?, up_to)?)
    } else {
        (
            "general",
            max_rank_general(&chain_clusters(&file)?, seed, height, up_to)?,
        )
    };
    let ok = rep.ok;
    Ok((
        json!({ "placement": placement, "seed": seed, "report": rep }),
        ok,
    ))
}

fn run_catalog(seed: u64, height: u32) -> Outcome {
    let entries = exception_catalog(seed, height)?;
    let rows: Vec<Value> = entries
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "points": e.points,
                "failing_degree": e.failing_degree,
                "defect": e.report.defect_at(e.failing_degree),
                "fails_exactly_there": e.report.failing == vec![e.failing_degree],
                "report": e.report,
            })
        })
        .collect();
    let ok = entries
        .iter()
        .all(|e| e.report.failing == vec![e.failing_degree]);
    Ok((json!({ "entries": rows }), ok))
}

#[allow(clippy::too_many_arguments)]
fn run_synthesize(
    tacnodes: &[usize],
    cusps: &[usize],
    spec_path: Option<&Path>,
    degree: Option<usize>,
    out: Option<&Path>,
    union_out: Option<&Path>,
    seed: u64,
    height: u32,
) -> Outcome {
    let spec = match spec_path {
        Some(p) => io::parse_spec(&read(p)?)?,
        None => SingularitySpec::new(tacnodes.to_vec(), cusps.to_vec())?,
    };
    if spec.weight() == 0 {
        return Err(Error::Precondition("no singularities requested".into()).into());
    }
    let rep = match degree {
        Some(d) => existencia_in_degree(&spec, d, seed, height)?,
        None => existencia_driver(&spec, seed, height)?,
    };
    if let (Some(p), Some(c)) = (out, &rep.curve) {
        write(p, &io::to_pretty(&io::curve_to_json(c)))?;
    }
    if let (Some(p), Some(z)) = (union_out, &rep.union) {
        write(p, &io::to_pretty(&io::union_to_json(z)))?;
    }
    let mut v = to_value(&rep);
    if let Some(c) = &rep.curve {
        v["curve"] = to_value(&io::curve_to_json(c));
    }
    Ok((v, rep.ok))
}

fn run_verify(curve: &Path, union: &Path) -> Outcome {
    let c = io::parse_curve(&read(curve)?)?;
    let z = io::parse_union(&read(union)?)?;
    let att = certify(&c, &z)?;
    let ok = att.ok;
    Ok((to_value(&att), ok))
}

fn run_experiment(a: &ExperimentArgs, seed: u64, height: u32) -> Outcome {
    match a.kind {
        ExperimentKind::Semicontinuity => {
            let mults = a.mults.clone().unwrap_or_else(|| vec![4, 2, 2, 1, 1, 1]);
            let rep = semicontinuity_experiment(&mults, a.trials.unwrap_or(100), seed, height)?;
            Ok((to_value(&rep), rep.ok))
        }
        ExperimentKind::LimitIdentities => {
            let rep = limit_identities(a.max_s, a.max_m, a.max_i, a.max_j)?;
            Ok((to_value(&rep), rep.ok))
        }
        ExperimentKind::LimitDimension => {
            let reps = limit_dimension_sweep(a.trials.unwrap_or(20), seed, height)?;
            let ok = reps.iter().all(|r| r.ok);
            Ok((json!({ "tuples": reps }), ok))
        }
        ExperimentKind::OneMorePoint => {
            let mults = a.mults.clone().unwrap_or_else(|| vec![3, 2, 1, 1]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let wc = WeightedCluster::chain(&mults, &[]);
            let origin = (
                infnear_core::Q::from_integer(0.into()),
                infnear_core::Q::from_integer(0.into()),
            );
            let ec = EmbeddedCluster::random(&wc, origin, &mut rng, height)?;
            let rep = one_more_point_experiment(&ec, a.trials.unwrap_or(20), &mut rng, height)?;
            Ok((to_value(&rep), rep.ok))
        }
        ExperimentKind::Levels => {
            let reps = LevelStatement::ALL
                .iter()
                .map(|&st| {
                    check_level_statement(st, a.max_degree, a.trials.unwrap_or(12), seed, height)
                })
                .collect::<infnear_core::Result<Vec<_>>>()?;
            let ok = reps.iter().all(|r| r.ok);
            Ok((json!({ "statements": reps }), ok))
        }
        ExperimentKind::RankSweep => {
            let rep = rank_sweep(a.trials.unwrap_or(60), seed, height, 6, 60)?;
            Ok((to_value(&rep), rep.ok))
        }
        ExperimentKind::ExceptionalFamilies => {
            let rep = exceptional_families(seed, height)?;
            Ok((to_value(&rep), rep.ok))
        }
        ExperimentKind::Dk => {
            let cases = (4..=13)
                .map(|k| dk_maximal_rank(k, seed.wrapping_add(k as u64), height))
                .collect::<infnear_core::Result<Vec<_>>>()?;
            let ok = cases.iter().all(|c| c.ok);
            Ok((json!({ "cases": cases }), ok))
        }
    }
}

fn run_render(input: &Path, diagram: Diagram) -> Outcome {
    let wc = io::parse_cluster(&read(input)?)?;
    let format = match diagram {
        Diagram::Ascii => DiagramFormat::Ascii,
        Diagram::Dot => DiagramFormat::Dot,
    };
    Ok((json!({ "diagram": render_enriques(&wc, format) }), true))
}

fn dispatch(cli: &Cli) -> Outcome {
    if cli.height < 2 {
        return Err(Error::Precondition(format!("height bound {} is below 2", cli.height)).into());
    }
    let (seed, height) = (cli.seed, cli.height);
    match &cli.command {
        Command::Unload { input, trace } => run_unload(input, *trace),
        Command::Length { input } => run_length(input),
        Command::Ell { input, degree } => run_ell(input, *degree, seed, height),
        Command::Maxrank {
            input,
            all_degrees_up_to,
        } => run_maxrank(input, *all_degrees_up_to, seed, height),
        Command::Catalog => run_catalog(seed, height),
        Command::Synthesize {
            tacnodes,
            cusps,
            spec,
            degree,
            out,
            union_out,
        } => run_synthesize(
            tacnodes,
            cusps,
            spec.as_deref(),
            *degree,
            out.as_deref(),
            union_out.as_deref(),
            seed,
            height,
        ),
        Command::Verify { curve, union } => run_verify(curve, union),
        Command::Experiment(a) => run_experiment(a, seed, height),
        Command::Render { input, diagram } => run_render(input, *diagram),
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Experiment(a) => format!(
            "experiment {}",
            to_value(&a.kind).as_str().unwrap_or_default()
        ),
        other => to_value(other)
            .as_object()
            .and_then(|m| m.keys().next().cloned())
            .or_else(|| to_value(other).as_str().map(str::to_string))
            .unwrap_or_default(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    if cli.verbose > 0 {
        eprintln!("seed {} height {}", cli.seed, cli.height);
    }
    let outcome = dispatch(&cli);
    let (verdict, result, error) = match outcome {
        Ok((v, ok)) => (Verdict::from_ok(ok), Some(v), None),
        Err(f) => (Verdict::Error, None, Some(f.record())),
    };
    let report = Report {
        tool: "infnear",
        version: env!("CARGO_PKG_VERSION"),
        command: command_name(&cli.command),
        config: to_value(&cli),
        verdict,
        result,
        error,
        timings: Timings {
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    };
    if let Some(e) = &report.error {
        eprintln!("error ({}): {}", e.kind, e.message);
    }
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &cli.report {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error (io): {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => {
            // a closed pipe is not an error of the run
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    if cli.verbose > 0 {
        eprintln!("done in {:.1} ms", report.timings.total_ms);
    }
    ExitCode::from(verdict.exit_code() as u8)
}
