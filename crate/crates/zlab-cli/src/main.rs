//! `zlab`: configure the models, run the constructions and the
//! verification suites, emit JSON reports.
//!
//! Exit codes: 0 on pass, 1 on a property failure, 2 on usage errors.
//! Reports are schema-versioned; identical config and seed produce
//! byte-identical reports apart from the `timestamp` field.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use zlab::dirprod::{JoinPoint, ProductPoint, ProductSpace, ProductSpacePoint};
use zlab::freeprod::{FreeProductSpace, PointSpec, ZEpsilonIndex};
use zlab::models::{model_by_name, ZStructureModel};
use zlab::verify::{self, acceptance};

#[derive(Parser)]
#[command(name = "zlab", version, about = "boundary structures on free and direct products")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON config file; command-line flags win over its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed (default: env ZLAB_SEED, then 42).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on worker threads for the parallel sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Report output path (default zlab-report.json).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Factor model for both sides.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Word depth for enumerations and samplers.
    #[arg(long, global = true)]
    depth: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// The glued free-product space.
    Free {
        #[command(subcommand)]
        cmd: FreeCmd,
    },
    /// The join compactification of the direct product.
    Product {
        #[command(subcommand)]
        cmd: ProductCmd,
    },
    /// Verification suites.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum FreeCmd {
    /// Distance between two points of the completion.
    Dist {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Build an eps-net and verify sampled coverage.
    Net {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Null condition by exact scale certificates.
    Null {
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Track-diameter sweep for the homotopies.
    Homotopy {
        /// `k` or `p`.
        #[arg(long, default_value = "k")]
        which: String,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        tsteps: Option<usize>,
    },
}

#[derive(Subcommand)]
enum ProductCmd {
    /// Slope of an interior product point (carrier coordinates).
    Slope {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
    },
    /// Membership of a point in a join neighborhood U(center, eps).
    Nbhd {
        /// `xbar=..|ybar=..|mu=..` (mu=inf allowed).
        #[arg(long)]
        center: String,
        #[arg(long)]
        eps: Option<f64>,
        /// Join point, or interior `x=..|y=..`.
        #[arg(long)]
        z: String,
    },
    /// Null condition on the product via the claims' thresholds.
    Null {
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        grid: Option<i64>,
    },
    /// The product-topology counterexample and its join resolution.
    Counterexample {
        #[arg(long)]
        range: Option<i64>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Metric axioms on random triples of the glued space.
    Metric {
        #[arg(long)]
        n: Option<u64>,
    },
    /// The full acceptance battery.
    All,
}

/// File-backed defaults; flags win.
#[derive(Serialize, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    model: Option<String>,
    depth: Option<usize>,
    seed: Option<u64>,
    jobs: Option<usize>,
    samples: Option<u64>,
    eps: Option<f64>,
    delta: Option<f64>,
    grid: Option<i64>,
    range: Option<i64>,
    out: Option<PathBuf>,
}

struct Resolved {
    model: String,
    depth: usize,
    seed: u64,
    samples: u64,
    eps: f64,
    delta: f64,
    grid: i64,
    range: i64,
    out: PathBuf,
}

fn resolve(common: &Common, file: &RunConfig, overrides: &RunConfig) -> anyhow::Result<Resolved> {
    let env_seed = std::env::var("ZLAB_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok());
    let seed = common
        .seed
        .or(overrides.seed)
        .or(file.seed)
        .or(env_seed)
        .unwrap_or(42);
    let depth = common.depth.or(file.depth).unwrap_or(6);
    if depth == 0 || depth > 32 {
        bail!("depth must lie in 1..=32 (dyadic exponent safety)");
    }
    let samples = overrides.samples.or(file.samples).unwrap_or(10_000);
    if samples == 0 {
        bail!("sampling budget must be positive");
    }
    let jobs = common.jobs.or(file.jobs);
    zlab::sweep::configure_jobs(jobs);
    Ok(Resolved {
        model: common
            .model
            .clone()
            .or_else(|| file.model.clone())
            .unwrap_or_else(|| "int-line".to_string()),
        depth,
        seed,
        samples,
        eps: overrides.eps.or(file.eps).unwrap_or(0.25),
        delta: overrides.delta.or(file.delta).unwrap_or(0.1),
        grid: overrides.grid.or(file.grid).unwrap_or(300),
        range: overrides.range.or(file.range).unwrap_or(100),
        out: common
            .out
            .clone()
            .or_else(|| file.out.clone())
            .unwrap_or_else(|| PathBuf::from("zlab-report.json")),
    })
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: u32,
    command: String,
    seed: u64,
    /// Lives outside the report so reports stay byte-identical.
    timestamp: String,
    report: T,
}

fn write_report<T: Serialize>(
    out: &PathBuf,
    command: &str,
    seed: u64,
    report: &T,
) -> anyhow::Result<()> {
    let envelope = Envelope {
        schema: 1,
        command: command.to_string(),
        seed,
        timestamp: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs().to_string())
            .unwrap_or_default(),
        report,
    };
    let text = serde_json::to_string_pretty(&envelope)?;
    std::fs::write(out, text).with_context(|| format!("writing report to {}", out.display()))?;
    Ok(())
}

fn free_space(model: &str) -> anyhow::Result<FreeProductSpace> {
    let m = model_by_name(model)?;
    Ok(FreeProductSpace::new(Arc::new(m), Arc::new(m)))
}

fn product_space(model: &str, target: f64) -> anyhow::Result<ProductSpace> {
    let m = model_by_name(model)?;
    Ok(ProductSpace::build(Arc::new(m), Arc::new(m), target, target)?)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let file: RunConfig = match &cli.common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str(&text).context("parsing config file")?
        }
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Free { cmd } => run_free(&cli.common, &file, cmd),
        Command::Product { cmd } => run_product(&cli.common, &file, cmd),
        Command::Verify { cmd } => run_verify(&cli.common, &file, cmd),
    }
}

fn run_free(common: &Common, file: &RunConfig, cmd: FreeCmd) -> anyhow::Result<bool> {
    match cmd {
        FreeCmd::Dist { a, b } => {
            let r = resolve(common, file, &RunConfig::default())?;
            let space = free_space(&r.model)?;
            let pa = space.resolve_point(&a.parse::<PointSpec>()?)?;
            let pb = space.resolve_point(&b.parse::<PointSpec>()?)?;
            let d = space.dist_general(&pa, &pb);
            println!("dist = {} (tolerance {})", d.value, d.tolerance);
            write_report(&r.out, "free dist", r.seed, &d)?;
            Ok(true)
        }
        FreeCmd::Net { eps, samples } => {
            let overrides = RunConfig {
                eps,
                samples,
                ..RunConfig::default()
            };
            let r = resolve(common, file, &overrides)?;
            let space = free_space(&r.model)?;
            let report =
                verify::check_total_boundedness(&space, r.eps, r.depth, r.samples, r.seed)?;
            println!(
                "net size {} uncovered {} max gap {:.5} -> {}",
                report.net_size,
                report.uncovered,
                report.max_gap,
                verdict(report.pass)
            );
            write_report(&r.out, "free net", r.seed, &report)?;
            Ok(report.pass)
        }
        FreeCmd::Null { eps } => {
            let overrides = RunConfig {
                eps,
                ..RunConfig::default()
            };
            let r = resolve(common, file, &overrides)?;
            let space = free_space(&r.model)?;
            let compactum = verify::FreeCompactum::base_domain(&space, 0.45, 8);
            let report = verify::check_null_free(&space, &compactum, r.eps, r.depth, r.seed)?;
            println!(
                "big translates {} exceptional {} -> {}",
                report.big_translates.len(),
                report.report.exceptional_size,
                verdict(report.report.pass)
            );
            let pass = report.report.pass;
            write_report(&r.out, "free null", r.seed, &report)?;
            Ok(pass)
        }
        FreeCmd::Homotopy {
            which,
            eps,
            samples,
            tsteps,
        } => {
            let overrides = RunConfig {
                eps,
                samples,
                ..RunConfig::default()
            };
            let r = resolve(common, file, &overrides)?;
            let space = free_space(&r.model)?;
            let steps = tsteps.unwrap_or(50);
            let report = match which.as_str() {
                "k" => {
                    let idx = ZEpsilonIndex::build(&space, r.eps, r.depth)?;
                    verify::check_homotopy_tracks(
                        &verify::TrackHandle::K {
                            space: &space,
                            idx: &idx,
                        },
                        r.samples,
                        steps,
                        r.seed,
                    )?
                }
                "p" => verify::check_homotopy_tracks(
                    &verify::TrackHandle::P { space: &space },
                    r.samples,
                    steps,
                    r.seed,
                )?,
                other => bail!("unknown homotopy `{other}` (expected `k` or `p`)"),
            };
            println!(
                "max track diameter {:.5}{} -> {}",
                report.max_track_diam,
                report
                    .bound
                    .map(|b| format!(" (bound {b})"))
                    .unwrap_or_default(),
                verdict(report.pass)
            );
            write_report(&r.out, "free homotopy", r.seed, &report)?;
            Ok(report.pass)
        }
    }
}

fn parse_product_point(s: &str) -> anyhow::Result<ProductSpacePoint> {
    if s.contains("xbar") {
        Ok(ProductSpacePoint::Join(s.parse::<JoinPoint>()?))
    } else {
        let mut x = None;
        let mut y = None;
        for part in s.split('|') {
            match part.split_once('=') {
                Some(("x", v)) => x = Some(v.trim().parse::<f64>()?),
                Some(("y", v)) => y = Some(v.trim().parse::<f64>()?),
                _ => bail!("cannot parse product point `{s}`"),
            }
        }
        match (x, y) {
            (Some(x), Some(y)) => Ok(ProductSpacePoint::Interior(ProductPoint { x, y })),
            _ => bail!("product point needs both coordinates: `{s}`"),
        }
    }
}

fn run_product(common: &Common, file: &RunConfig, cmd: ProductCmd) -> anyhow::Result<bool> {
    match cmd {
        ProductCmd::Slope { x, y } => {
            let r = resolve(common, file, &RunConfig::default())?;
            let space = product_space(&r.model, 40.0)?;
            model_by_name(&r.model)?.check_carrier(x)?;
            model_by_name(&r.model)?.check_carrier(y)?;
            let mu = space.slope(x, y);
            println!("slope = {mu}");
            #[derive(Serialize)]
            struct SlopeReport {
                x: f64,
                y: f64,
                p: f64,
                q: f64,
                mu: f64,
            }
            write_report(
                &r.out,
                "product slope",
                r.seed,
                &SlopeReport {
                    x,
                    y,
                    p: space.p_of(x),
                    q: space.q_of(y),
                    mu,
                },
            )?;
            Ok(true)
        }
        ProductCmd::Nbhd { center, eps, z } => {
            let overrides = RunConfig {
                eps,
                ..RunConfig::default()
            };
            let r = resolve(common, file, &overrides)?;
            let space = product_space(&r.model, 40.0)?;
            let center = center.parse::<JoinPoint>()?;
            let point = parse_product_point(&z)?;
            let inside = space.nbhd_contains(&center, r.eps, &point)?;
            println!("{}", if inside { "inside" } else { "outside" });
            #[derive(Serialize)]
            struct NbhdReport {
                center: JoinPoint,
                eps: f64,
                inside: bool,
            }
            write_report(
                &r.out,
                "product nbhd",
                r.seed,
                &NbhdReport {
                    center,
                    eps: r.eps,
                    inside,
                },
            )?;
            Ok(true)
        }
        ProductCmd::Null { delta, grid } => {
            let overrides = RunConfig {
                delta,
                grid,
                ..RunConfig::default()
            };
            let r = resolve(common, file, &overrides)?;
            let m = model_by_name(&r.model)?;
            let cfg = verify::NullProductConfig {
                delta: r.delta,
                grid: r.grid,
                seed: r.seed,
                ..verify::NullProductConfig::default()
            };
            let report = verify::check_null_product(Arc::new(m), Arc::new(m), &cfg)?;
            println!(
                "Gamma size {} (exceeds grid: {}), sampled {}, case-1 max diam_mu {:.4} -> {}",
                report.gamma_size,
                report.gamma_exceeds_grid,
                report.sampled,
                report.max_diam_mu_case1,
                verdict(report.pass)
            );
            std::fs::write(r.out.with_extension("csv"), &report.per_cell_csv)?;
            let pass = report.pass;
            write_report(&r.out, "product null", r.seed, &report)?;
            Ok(pass)
        }
        ProductCmd::Counterexample { range } => {
            let overrides = RunConfig {
                range,
                ..RunConfig::default()
            };
            let r = resolve(common, file, &overrides)?;
            if r.range < 1 {
                bail!("range must be at least 1");
            }
            let report = verify::reproduce_counterexample(r.range, 0.1)?;
            println!(
                "product cover: all translates uncovered = {}; join n0 = {:?} -> {}",
                report.product_all_uncovered,
                report.join_n0,
                verdict(report.pass)
            );
            let pass = report.pass;
            write_report(&r.out, "product counterexample", r.seed, &report)?;
            Ok(pass)
        }
    }
}

fn run_verify(common: &Common, file: &RunConfig, cmd: VerifyCmd) -> anyhow::Result<bool> {
    match cmd {
        VerifyCmd::Metric { n } => {
            let overrides = RunConfig {
                samples: n,
                ..RunConfig::default()
            };
            let r = resolve(common, file, &overrides)?;
            let space = free_space(&r.model)?;
            let depth = r.depth;
            let report = verify::check_metric_axioms(
                |rng| verify::random_wpoint(&space, rng, depth, 20),
                |a, b| space.dist(a, b),
                r.samples,
                r.seed,
                1e-9,
            );
            println!(
                "max triangle violation {:.3e}, symmetry {:.1e} -> {}",
                report.max_triangle_violation,
                report.max_symmetry_violation,
                verdict(report.pass)
            );
            write_report(&r.out, "verify metric", r.seed, &report)?;
            Ok(report.pass)
        }
        VerifyCmd::All => {
            let r = resolve(common, file, &RunConfig::default())?;
            let results = acceptance::run_all(&acceptance::AcceptanceConfig { seed: r.seed });
            let mut all = true;
            for c in &results {
                all &= c.pass;
                println!(
                    "criterion {:>2} [{}] {} ({} ms) - {}",
                    c.id,
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.millis,
                    c.detail
                );
            }
            write_report(&r.out, "verify all", r.seed, &results)?;
            Ok(all)
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own message; usage problems exit 2
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
