use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use latent_hops::embed::{aligned_rmse, classical_mds, localize, smacof, SmacofOptions};
use latent_hops::geometry::{coverage_radius, pairwise_distances, sample_uniform, CoverageRegion, PointConfig, Provenance};
use latent_hops::harness::{
    emit_plotdata, ingest_cities_with, parse_domain, parse_graph_model, record_bound, run_preset, CityColumns,
    GraphModel, Manifest, PresetOptions, PRESET_NAMES,
};
use latent_hops::hopdist::{all_pairs_hops, check_general_bound, check_knn_bounds, check_simple_bound, scale_hops};
use latent_hops::io::{
    read_adjacency_binary, read_adjacency_text, read_hops, read_matrix_binary, read_matrix_csv, read_points,
    write_adjacency_binary, write_adjacency_text, write_hops, write_matrix_binary, write_matrix_csv, write_mvu_trace,
    write_points, write_stress_trace,
};
use latent_hops::linkgraph::{generate_from_coords, knn_from_coords, symmetrize, Adjacency, OmegaConvention, Symmetrization};
use latent_hops::mvu::{check_mvu_bound, solve_mvu, PenaltySchedule};
use latent_hops::{Error, Result};

#[derive(Parser)]
#[command(name = "latent-hops", version, about = "Latent distances from hop counts in random geometric graphs")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Multiply every preset sample size (e.g. 0.1 for quick runs).
    #[arg(long, global = true, default_value_t = 1.0)]
    scale_n: f64,
    /// Exit with status 3 when a hard bound check fails.
    #[arg(long, global = true)]
    strict: bool,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample points (or load them) and draw a graph; writes points.csv and the adjacency.
    Generate(GenerateArgs),
    /// All-pairs hop counts of a graph; writes hops.lgh.
    Hops {
        #[arg(long)]
        adjacency: PathBuf,
    },
    /// Scale hop counts by r; writes estimates.lgd (or .csv).
    Estimate {
        #[arg(long)]
        hops: PathBuf,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        csv: bool,
    },
    /// Classical scaling of a dissimilarity matrix, optionally refined by local SMACOF.
    Embed(EmbedArgs),
    /// Maximum-variance unfolding of a graph.
    Mvu {
        #[arg(long)]
        adjacency: PathBuf,
        #[arg(long, default_value_t = 5)]
        rank: usize,
        /// Hop counts, to check γ against the hop distance.
        #[arg(long)]
        hops: Option<PathBuf>,
    },
    /// Check an estimate against the true distances.
    Check(CheckArgs),
    /// Experiment presets.
    Preset {
        #[command(subcommand)]
        action: PresetCmd,
    },
    /// Subsample a cities CSV into planar (lng, lat) points; writes points.csv.
    IngestCities {
        file: PathBuf,
        #[arg(long, default_value_t = 3000)]
        n: usize,
        #[command(flatten)]
        cols: ColumnArgs,
    },
    /// Render SVG panels and scatter tables from a run manifest.
    Plot {
        #[arg(long)]
        manifest: PathBuf,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// Domain, e.g. `rect:2,1`, `hole:0,0,2,1/0.5,0.25,1.5,0.75`, `interval:1`.
    #[arg(long, required_unless_present = "points")]
    domain: Option<String>,
    #[arg(long, required_unless_present = "points")]
    n: Option<usize>,
    /// Use existing points instead of sampling.
    #[arg(long, conflicts_with_all = ["domain", "n"])]
    points: Option<PathBuf>,
    /// Graph model, e.g. `indicator:0.2`, `two-level:0.2,1,0.01`, `knn:25`.
    #[arg(long)]
    graph: String,
    /// Write the adjacency in the packed binary format.
    #[arg(long)]
    binary: bool,
}

#[derive(Args)]
struct EmbedArgs {
    /// Dense dissimilarity matrix (.lgd binary or .csv).
    #[arg(long, required_unless_present = "hops", conflicts_with = "hops")]
    matrix: Option<PathBuf>,
    /// Hop counts; needs `--r`.
    #[arg(long, requires = "r")]
    hops: Option<PathBuf>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Refine with SMACOF on pairs at most this many hops apart.
    #[arg(long, requires = "hops")]
    local: Option<u16>,
    /// True points; reports the aligned RMSE.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    /// Indicator link: 0 ≤ d̂−d ≤ 4(ε/r)d + r.
    Simple,
    /// Any link: report the 1/(1+α) rate and the fitted constant.
    General,
    /// Symmetrized kNN graph.
    Knn,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    hops: PathBuf,
    #[arg(long)]
    r: f64,
    #[arg(long, value_enum, default_value = "simple")]
    bound: BoundKind,
    /// Domain of the points; needed for the coverage radius and kNN depths.
    #[arg(long)]
    domain: Option<String>,
    /// Coverage radius; measured on the domain when omitted.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
}

#[derive(Args)]
struct ColumnArgs {
    #[arg(long, default_value = "lat")]
    lat_col: String,
    #[arg(long, default_value = "lng")]
    lng_col: String,
    #[arg(long)]
    name_col: Option<String>,
}

impl ColumnArgs {
    fn columns(&self) -> CityColumns {
        CityColumns { lat: self.lat_col.clone(), lng: self.lng_col.clone(), name: self.name_col.clone() }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Omega {
    VolumeRatio,
    AreaOnly,
}

#[derive(Subcommand)]
enum PresetCmd {
    /// List preset names.
    List,
    /// Run one preset; writes manifest.json and its files into --out.
    Run {
        name: String,
        /// Cities CSV for the `cities` presets.
        #[arg(long)]
        cities: Option<PathBuf>,
        #[command(flatten)]
        cols: ColumnArgs,
        /// Also run MVU on every connected graph.
        #[arg(long)]
        with_mvu: bool,
        /// Skip writing adjacency, hop and estimate matrices.
        #[arg(long)]
        no_matrices: bool,
        #[arg(long, default_value_t = latent_hops::harness::presets::KNN_C1)]
        knn_c1: f64,
        #[arg(long, value_enum, default_value = "volume-ratio")]
        omega: Omega,
        /// Keep only mutual kNN edges.
        #[arg(long)]
        mutual: bool,
    },
}

enum Outcome {
    Ok,
    BoundFailure,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::BoundFailure) if cli.strict => ExitCode::from(3),
        Ok(Outcome::BoundFailure) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn out_file(cli: &Cli, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(&cli.out)?;
    Ok(cli.out.join(name))
}

fn read_adjacency(path: &Path) -> Result<Adjacency> {
    let mut magic = [0u8; 4];
    let head = std::fs::read(path)?;
    let n = head.len().min(4);
    magic[..n].copy_from_slice(&head[..n]);
    if &magic == b"LGA1" {
        read_adjacency_binary(path)
    } else {
        read_adjacency_text(path)
    }
}

fn loaded(coords: latent_hops::geometry::Coords, path: &Path, domain: Option<&str>) -> Result<PointConfig> {
    let domain = match domain {
        Some(d) => parse_domain(d)?,
        None => latent_hops::geometry::convex_hull(&coords)?,
    };
    PointConfig::new(coords, domain, Provenance::Loaded(path.display().to_string()))
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.cmd {
        Cmd::Generate(a) => {
            let coords = match (&a.points, &a.domain, a.n) {
                (Some(p), _, _) => read_points(p)?,
                (None, Some(d), Some(n)) => sample_uniform(&parse_domain(d)?, n, cli.seed)?.coords,
                _ => return Err(Error::InvalidArgument("need --points or both --domain and --n".into())),
            };
            let adj = match parse_graph_model(&a.graph)? {
                GraphModel::Link(link) => generate_from_coords(&coords, &link, cli.seed),
                GraphModel::Knn { kappa, mode } => symmetrize(&knn_from_coords(&coords, kappa)?, mode),
            };
            if a.points.is_none() {
                write_points(&out_file(cli, "points.csv")?, &coords)?;
            }
            if a.binary {
                write_adjacency_binary(&out_file(cli, "adjacency.lga")?, &adj)?;
            } else {
                write_adjacency_text(&out_file(cli, "adjacency.txt")?, &adj)?;
            }
            println!("n={} edges={} connected={}", adj.n(), adj.edge_count(), adj.is_connected());
        }
        Cmd::Hops { adjacency } => {
            let hops = all_pairs_hops(&read_adjacency(adjacency)?)?;
            write_hops(&out_file(cli, "hops.lgh")?, &hops)?;
            println!("n={} diameter={} disconnected_pairs={}", hops.n(), hops.diameter(), hops.disconnected_pairs());
        }
        Cmd::Estimate { hops, r, csv } => {
            let est = scale_hops(&read_hops(hops)?, *r)?;
            if *csv {
                write_matrix_csv(&out_file(cli, "estimates.csv")?, &est)?;
            } else {
                write_matrix_binary(&out_file(cli, "estimates.lgd")?, &est)?;
            }
        }
        Cmd::Embed(a) => embed(cli, a)?,
        Cmd::Mvu { adjacency, rank, hops } => {
            let adj = read_adjacency(adjacency)?;
            let sol = solve_mvu(&adj, *rank, &PenaltySchedule::default(), cli.seed)?;
            write_points(&out_file(cli, "mvu.csv")?, &sol.coords)?;
            write_mvu_trace(&out_file(cli, "mvu_trace.csv")?, &sol.trace)?;
            println!(
                "objective={} initial_objective={} max_edge_violation={}",
                sol.objective, sol.initial_objective, sol.max_edge_violation
            );
            if let Some(h) = hops {
                let rep = check_mvu_bound(&sol, &read_hops(h)?)?;
                println!("pairs_checked={} violations={} max_excess={}", rep.pairs_checked, rep.violations, rep.max_excess);
                if rep.violations > 0 {
                    return Ok(Outcome::BoundFailure);
                }
            }
        }
        Cmd::Check(a) => return check(cli, a),
        Cmd::Preset { action } => return preset(cli, action),
        Cmd::IngestCities { file, n, cols } => {
            let cfg = ingest_cities_with(file, *n, cli.seed, &cols.columns())?;
            write_points(&out_file(cli, "points.csv")?, &cfg.coords)?;
            println!("n={} domain={}", cfg.n(), latent_hops::harness::format_domain(&cfg.domain));
        }
        Cmd::Plot { manifest } => {
            for f in emit_plotdata(manifest)? {
                println!("{}", f.display());
            }
        }
    }
    Ok(Outcome::Ok)
}

fn embed(cli: &Cli, a: &EmbedArgs) -> Result<()> {
    let (mut emb, hops) = match (&a.matrix, &a.hops) {
        (Some(m), _) => {
            let d = if m.extension().is_some_and(|e| e == "csv") { read_matrix_csv(m)? } else { read_matrix_binary(m)? };
            (classical_mds(&d, a.dim)?, None)
        }
        (None, Some(h)) => {
            let r = a.r.ok_or_else(|| Error::InvalidArgument("--hops needs --r".into()))?;
            let hops = read_hops(h)?;
            let est = scale_hops(&hops, r)?;
            (classical_mds(&est, a.dim)?, Some((hops, r)))
        }
        _ => return Err(Error::InvalidArgument("need --matrix or --hops".into())),
    };
    let eig: Vec<String> = emb.eigenvalues.iter().map(|l| l.to_string()).collect();
    println!("eigenvalues={}", eig.join(","));
    if let (Some(k), Some((hops, r))) = (a.local, hops) {
        let partial = localize(&hops, k, r)?;
        emb = smacof(&partial, &emb.coords, SmacofOptions::default())?;
        write_stress_trace(&out_file(cli, "stress_trace.csv")?, &emb.stress_trace)?;
        println!("smacof_iterations={} stress={}", emb.iterations, emb.stress.unwrap_or(f64::NAN));
    }
    write_points(&out_file(cli, "recovered.csv")?, &emb.coords)?;
    if let Some(t) = &a.truth {
        println!("aligned_rmse={}", aligned_rmse(&emb.coords, &read_points(t)?)?);
    }
    Ok(())
}

fn check(cli: &Cli, a: &CheckArgs) -> Result<Outcome> {
    let coords = read_points(&a.points)?;
    let cfg = loaded(coords, &a.points, a.domain.as_deref())?;
    let est = scale_hops(&read_hops(&a.hops)?, a.r)?;
    if est.n() != cfg.n() {
        return Err(Error::SizeMismatch { left: est.n(), right: cfg.n() });
    }
    let eps = match a.eps {
        Some(e) => e,
        None => {
            let (lo, hi) = cfg.domain.bounding_box();
            let extent = lo.iter().zip(&hi).map(|(l, h)| h - l).fold(f64::INFINITY, f64::min);
            coverage_radius(&cfg, CoverageRegion::Domain, extent / 400.0)?.upper
        }
    };
    let truth = pairwise_distances(&cfg);
    let (rep, asserted) = match a.bound {
        BoundKind::Simple => {
            let rep = check_simple_bound(&est, &truth, eps, a.r)?;
            let met = rep.hypothesis_met;
            (rep, met)
        }
        BoundKind::General => (check_general_bound(&est, &truth, eps, a.r, a.alpha)?, false),
        BoundKind::Knn => (check_knn_bounds(&est, &truth, &cfg, eps, a.r)?, true),
    };
    let mut m = Manifest::new();
    record_bound(&mut m, "bound", &rep, asserted);
    m.write(&out_file(cli, "check.json")?)?;
    print!("{}", m.to_json());
    let failed = rep.lower_violations > 0 || (asserted && rep.upper_violations > 0);
    Ok(if failed { Outcome::BoundFailure } else { Outcome::Ok })
}

fn preset(cli: &Cli, action: &PresetCmd) -> Result<Outcome> {
    match action {
        PresetCmd::List => {
            for p in PRESET_NAMES {
                println!("{p}");
            }
            Ok(Outcome::Ok)
        }
        PresetCmd::Run { name, cities, cols, with_mvu, no_matrices, knn_c1, omega, mutual } => {
            let opts = PresetOptions {
                seed: cli.seed,
                scale_n: cli.scale_n,
                out_dir: Some(cli.out.clone()),
                write_matrices: !no_matrices,
                with_mvu: *with_mvu,
                cities_path: cities.clone(),
                city_columns: cols.columns(),
                omega: match omega {
                    Omega::VolumeRatio => OmegaConvention::VolumeRatio,
                    Omega::AreaOnly => OmegaConvention::AreaOnly,
                },
                knn_c1: *knn_c1,
                symmetrization: if *mutual { Symmetrization::Mutual } else { Symmetrization::Union },
            };
            let outcome = run_preset(name, &opts)?;
            println!("wrote {}", cli.out.join("manifest.json").display());
            for f in &outcome.failures {
                println!("FAIL {f}");
            }
            Ok(if outcome.passed() { Outcome::Ok } else { Outcome::BoundFailure })
        }
    }
}
