use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use simplexity::coloring::{exact_expected_size, make_coloring, monte_carlo_size, product_size, size_bound, ColoringStrategy, COLORING_ENUMERATION_LIMIT};
use simplexity::complex::{
    triangulation_weighted_efficiency, type_census, validate_dissection_with, validate_face_to_face_with, weighted_size,
    CheckMode, Triangulation,
};
use simplexity::geometry::{ambient_normalized_volume, ConfigLabel, PointConfiguration};
use simplexity::oracle::{min_weighted_size, Objective, SearchProblem};
use simplexity::pipeline::{build_cube_recursive, report_table, PipelineColoring, PipelineSpec, SeedChoice, PAIRWISE_SIZE_LIMIT};
use simplexity::seeds::{minimal_cube, seed_triangulation, unimodular_cube, SEED_NAMES};

#[derive(Parser)]
#[command(name = "simplexity", version, about = "Small triangulations of cubes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a triangulation.
    Build {
        #[command(subcommand)]
        what: BuildCommand,
    },
    /// Validate a triangulation file.
    Verify {
        path: PathBuf,
        /// Also check that simplices meet face to face.
        #[arg(long)]
        face_to_face: bool,
    },
    /// Write tables.
    Report {
        #[command(subcommand)]
        what: ReportCommand,
    },
    /// Sizes of I^3 x I^q over random colorings, with the expectation bound.
    Expect {
        #[arg(long)]
        q_dim: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
    },
    /// Inspect the built-in seeds.
    Seeds {
        #[command(subcommand)]
        what: SeedsCommand,
    },
    /// Exhaustive search on small configurations.
    Oracle {
        #[command(subcommand)]
        what: OracleCommand,
    },
}

#[derive(Subcommand)]
enum BuildCommand {
    /// Triangulate I^d by repeated products with I^l.
    Cube(BuildCube),
}

#[derive(Args)]
struct BuildCube {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 3)]
    l: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value = "i3d2")]
    seed: String,
    #[arg(long, value_enum, default_value_t = ColoringArg::Random)]
    coloring: ColoringArg,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long, default_value_t = 16)]
    samples: usize,
    /// Check face-to-face when the dimension is at most this.
    #[arg(long, default_value_t = simplexity::pipeline::DEFAULT_FACE_CHECK_LIMIT)]
    face_check_limit: usize,
    /// Triangulation JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Build report JSON output.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColoringArg {
    Balanced,
    Random,
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Per-dimension sizes, efficiencies and bounds as CSV.
    Table {
        #[arg(long, default_value_t = 10)]
        max_dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SeedsCommand {
    /// Print a seed's census and weighted size.
    Show {
        name: String,
        /// Colors, for the seeds that take them.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Also print the simplices.
        #[arg(long)]
        full: bool,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Minimum weighted size (or cardinality) over all triangulations.
    MinWeighted {
        /// Configuration label, for example `product(cube(2),simplex(1))`.
        #[arg(long)]
        config: String,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Weighted)]
        objective: ObjectiveArg,
        /// Witness JSON output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Weighted,
    Cardinality,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` when a requested validation failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Build { what: BuildCommand::Cube(args) } => build_cube(args),
        Command::Verify { path, face_to_face } => verify(&path, face_to_face),
        Command::Report { what: ReportCommand::Table { max_dim, out } } => {
            let csv = report_table(max_dim)?;
            emit(out.as_deref(), &csv)?;
            Ok(true)
        }
        Command::Expect { q_dim, m, samples, rng_seed } => expect(q_dim, m, samples, rng_seed),
        Command::Seeds { what: SeedsCommand::Show { name, m, full } } => show_seed(&name, m, full),
        Command::Oracle { what: OracleCommand::MinWeighted { config, objective, out } } => oracle(&config, objective, out.as_deref()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build_cube(a: BuildCube) -> Result<bool> {
    let spec = PipelineSpec {
        d: a.dim,
        l: a.l,
        m: a.m,
        seed: a.seed.parse::<SeedChoice>()?,
        coloring: match a.coloring {
            ColoringArg::Balanced => PipelineColoring::Balanced,
            ColoringArg::Random => PipelineColoring::Random,
        },
        rng_seed: a.rng_seed,
        samples: a.samples,
        face_check_limit: a.face_check_limit,
    };
    let out = build_cube_recursive(&spec)?;
    let t = out.triangulation.expect("build materializes the triangulation");
    if let Some(p) = &a.out {
        t.write_json(p)?;
    }
    let report = &out.report;
    if let Some(p) = &a.report {
        std::fs::write(p, serde_json::to_string_pretty(report)?).with_context(|| format!("writing {}", p.display()))?;
    }
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    for s in &report.steps {
        println!(
            "step I^{} -> I^{}: m={} seed={} size={} bound={:.2} {}",
            s.q_dim,
            s.d,
            s.m,
            s.seed,
            s.size,
            s.bound_f64,
            if s.bound_holds { "ok" } else { "EXCEEDED" }
        );
    }
    let last = report.rows.last().expect("at least one row");
    let v = report.validation.as_ref().expect("build validates");
    println!("d={} size={} efficiency={:.4}", last.d, last.size, last.efficiency);
    println!(
        "validation ({}): dissection={} face_to_face={} violations={}",
        v.mode,
        v.is_dissection,
        if v.face_to_face_checked { v.is_face_to_face.to_string() } else { "unchecked".into() },
        v.violations
    );
    Ok(v.passed() && report.steps_within_bound())
}

fn verify(path: &Path, face_to_face: bool) -> Result<bool> {
    let t = Triangulation::read_json(path)?;
    let expected = ambient_normalized_volume(t.config().label())
        .with_context(|| format!("no known volume for {}", t.config().label()))?;
    let report = if face_to_face {
        validate_face_to_face_with(&t, &expected)
    } else if t.len() <= PAIRWISE_SIZE_LIMIT {
        validate_dissection_with(&t, &expected, CheckMode::Pairwise)
    } else {
        validate_dissection_with(&t, &expected, CheckMode::FacetAdjacency)
    };
    println!(
        "{} simplices, volume {} of {}; dissection={}{}",
        t.len(),
        report.volume_total,
        expected,
        report.is_dissection,
        if face_to_face { format!(" face_to_face={}", report.is_face_to_face) } else { String::new() }
    );
    for v in report.violations.iter().take(10) {
        println!("  {:?} on simplices {:?}", v.kind, v.simplices);
    }
    Ok(report.is_dissection && (!face_to_face || report.is_face_to_face))
}

fn default_seed(m: usize) -> Result<(&'static str, Triangulation<i64>)> {
    Ok(match m {
        1 => ("minimal3", seed_triangulation("minimal3", 1)?),
        2 => ("i3d1", seed_triangulation("i3d1", 2)?),
        3 => ("i3d2", seed_triangulation("i3d2", 3)?),
        _ => ("unimodular3", seed_triangulation("unimodular3", m)?),
    })
}

fn expect(q_dim: usize, m: usize, samples: usize, rng_seed: u64) -> Result<bool> {
    if q_dim == 0 {
        bail!("q-dim must be at least 1");
    }
    let tq = if q_dim <= 3 { minimal_cube::<i64>(q_dim)? } else { unimodular_cube::<i64>(q_dim)? };
    let n = q_dim + 1;
    let l = 3;
    let (seed_name, t0) = default_seed(m)?;
    let ws = weighted_size(&t0)?;
    let bound = size_bound(tq.len() as u128, &ws, n, m, l)?;
    let nv = tq.config().len();
    let colorings = (m as f64).powi(nv as i32);
    let exact = if colorings <= COLORING_ENUMERATION_LIMIT as f64 {
        Some(exact_expected_size(&tq, &t0, m)?.enumerated)
    } else {
        None
    };
    let d = l + q_dim;
    let exact_cell = exact.as_ref().map(|e| e.to_string()).unwrap_or_default();
    println!("d,m,strategy,seed,size,bound,expected_exact_or_blank");
    let balanced = make_coloring(nv, m, ColoringStrategy::Balanced)?;
    println!("{d},{m},balanced,,{},{bound},{exact_cell}", product_size(&tq, &t0, &balanced)?);
    if samples > 0 {
        let stats = monte_carlo_size(&tq, &t0, m, samples, rng_seed)?;
        for (s, size) in stats.seeds.iter().zip(&stats.sizes) {
            println!("{d},{m},random,{s},{size},{bound},{exact_cell}");
        }
    }
    eprintln!("seed {seed_name}, weighted size {ws}");
    Ok(exact.is_none_or(|e| e <= bound))
}

fn show_seed(name: &str, m: usize, full: bool) -> Result<bool> {
    if !SEED_NAMES.contains(&name) {
        bail!("unknown seed {name:?}; choose one of {}", SEED_NAMES.join(", "));
    }
    let t = seed_triangulation(name, m)?;
    let census: serde_json::Map<String, serde_json::Value> = type_census(&t)?
        .into_iter()
        .map(|(k, v)| (k.t.iter().map(usize::to_string).collect::<Vec<_>>().join(","), json!(v)))
        .collect();
    let report = validate_face_to_face_with(&t, &ambient_normalized_volume(t.config().label())?);
    let mut out = json!({
        "name": name,
        "config": t.config().label().to_string(),
        "simplices": t.len(),
        "census": census,
        "weighted_size": weighted_size(&t)?.to_string(),
        "weighted_efficiency": triangulation_weighted_efficiency(&t)?,
        "face_to_face": report.is_face_to_face,
    });
    if full {
        out["cells"] = json!(t.simplices().iter().map(|s| s.vertices().to_vec()).collect::<Vec<_>>());
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(report.is_face_to_face)
}

fn oracle(config: &str, objective: ObjectiveArg, out: Option<&Path>) -> Result<bool> {
    let label: ConfigLabel = config.parse()?;
    let pc = Arc::new(PointConfiguration::<i64>::from_label(&label)?);
    let objective = match objective {
        ObjectiveArg::Weighted => Objective::Weighted,
        ObjectiveArg::Cardinality => Objective::Cardinality,
    };
    let (value, witness) = min_weighted_size(&SearchProblem::new(pc, objective))?;
    println!("minimum {value}");
    match out {
        Some(p) => witness.write_json(p)?,
        None => println!("{}", witness.to_json()?),
    }
    Ok(true)
}
