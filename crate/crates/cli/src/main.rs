//! `cmlab`: driver for the circle-tree p-modulus laboratory.  One binary
//! with subcommands over a shared TOML experiment config; all outputs are
//! deterministic functions of (config, seed).

mod cache;
mod config;
mod error;
mod plot;
mod report;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cmlab_core::cover::build_cover;
use cmlab_core::gog::{compute_cylinders, expand_bass_serre, tree_of_cylinders, CylTreeVertex};
use cmlab_core::weights::toy_recursion;

use config::ExperimentConfig;
use error::{CliError, Result};

#[derive(Parser)]
#[command(name = "cmlab", about = "combinatorial modulus laboratory", version)]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the config worker count.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory for tables, plots, and run records.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cache directory for built spaces.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the configured space and print its statistics.
    Space,
    /// Build the cover hierarchy and print per-scale statistics.
    Cover,
    /// Solve the modulus grid and print the result table.
    Modulus,
    /// Build the constructed weights and export per-set tables.
    Weights,
    /// Evaluate the one-circle volume recursion.
    Recursion,
    /// Expand a graph of groups and compute its tree of cylinders.
    Cylinders,
    /// Run the full pipeline and persist a run record.
    Sweep,
    /// Emit CSV tables and SVG plots from a persisted run record.
    Report,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_deref()
        .ok_or(CliError::Config("--config is required".to_string()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        cfg.jobs = jobs.max(1);
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli) -> Result<&Path> {
    cli.out
        .as_deref()
        .ok_or(CliError::Config("--out is required".to_string()))
}

fn cmd_space(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli)?;
    let space = cache::load_or_build_space(&cfg.space, cli.cache.as_deref())?;
    let s = sweep::space_stats(&space);
    println!(
        "space: {} circles, {} nodes, level {}, resolution {:.3e}",
        s.circles, s.nodes, s.level, s.resolution
    );
    Ok(true)
}

fn cmd_cover(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli)?;
    let space = cache::load_or_build_space(&cfg.space, cli.cache.as_deref())?;
    println!("n,sets,max_degree,radius");
    for n in cfg.cover.range() {
        let c = sweep::cover_stats(&build_cover(&space, n)?);
        println!("{},{},{},{:.6e}", c.n, c.sets, c.max_degree, c.radius);
    }
    Ok(true)
}

fn cmd_modulus(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli)?;
    if cfg.modulus.p_grid.is_empty() {
        return Err(CliError::Config("modulus.p_grid is empty".to_string()));
    }
    let record = sweep::run_sweep(&cfg, cli.cache.as_deref())?;
    println!("p,n,value,iterations,certificate_low,certificate_high,status");
    for c in &record.cells {
        println!(
            "{},{},{:.8e},{},{:.8e},{:.8e},{}",
            c.p, c.n, c.value, c.iterations, c.cert_low, c.cert_high, c.status
        );
    }
    Ok(record.cells.iter().all(|c| c.status == "converged"))
}

fn cmd_weights(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli)?;
    if cfg.weights.is_none() {
        return Err(CliError::MissingSection("weights"));
    }
    let out = out_dir(cli)?;
    std::fs::create_dir_all(out)?;
    let space = cache::load_or_build_space(&cfg.space, cli.cache.as_deref())?;
    let covers: Vec<_> = cfg
        .cover
        .range()
        .map(|n| Ok(build_cover(&space, n)?))
        .collect::<Result<_>>()?;
    let params = sweep::resolve_params(&cfg, &space, &covers)?.expect("weights section present");
    let weights = sweep::build_weights(&space, &covers, &params)?;
    for pw in &weights {
        let mut w = csv::Writer::from_path(out.join(format!("weights-n{}.csv", pw.n)))?;
        w.write_record(["set", "value", "projection", "branches"])?;
        for sw in &pw.sets {
            let branches: String = sw.factors.iter().map(|f| f.branch.code()).collect();
            w.write_record([
                format!("{}", sw.set),
                format!("{:.12e}", sw.value),
                format!("{}", sw.projection),
                branches,
            ])?;
        }
        w.flush()?;
        println!(
            "n={}: {} sets, sup {:.4e}, k7 {:.4}",
            pw.n,
            pw.sets.len(),
            pw.weights.sup_norm(),
            pw.k7
        );
    }
    Ok(true)
}

fn cmd_recursion(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli)?;
    let rc = cfg
        .recursion
        .as_ref()
        .ok_or(CliError::MissingSection("recursion"))?;
    let rec = toy_recursion(rc.p, rc.depth)?;
    println!("n,a_n");
    for (i, v) in rec.values.iter().enumerate() {
        println!("{i},{v:.12e}");
    }
    println!("c_prime,{:.12e}", rec.c_prime);
    Ok(rec.c_prime.is_finite())
}

fn cmd_cylinders(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli)?;
    let cc = cfg
        .cylinders
        .as_ref()
        .ok_or(CliError::MissingSection("cylinders"))?;
    let t = expand_bass_serre(&cc.graph, &cc.base, cc.depth, cc.branching_cap)?;
    let part = compute_cylinders(&t)?;
    let toc = tree_of_cylinders(&cc.graph, &t, &part)?;
    println!(
        "tree: {} vertices, {} edges; cylinders: {}; bipartite: {}; forest: {}",
        t.vertices.len(),
        t.edges.len(),
        part.cylinders.len(),
        toc.is_bipartite(),
        toc.is_forest()
    );
    if let Some(out) = cli.out.as_deref() {
        std::fs::create_dir_all(out)?;
        let mut w = csv::Writer::from_path(out.join("cylinders.csv"))?;
        w.write_record(["vertex", "kind", "orbit_or_axis", "degree"])?;
        for (vi, v) in toc.vertices.iter().enumerate() {
            let deg = toc
                .edges
                .iter()
                .filter(|&&(a, b)| a == vi || b == vi)
                .count();
            let (kind, key) = match v {
                CylTreeVertex::Original { tree_vertex, .. } => {
                    ("original", t.vertices[*tree_vertex].orbit as u32)
                }
                CylTreeVertex::Cylinder { axis, .. } => ("cylinder", *axis),
            };
            w.write_record([
                format!("{vi}"),
                kind.to_string(),
                format!("{key}"),
                format!("{deg}"),
            ])?;
        }
        w.flush()?;
    }
    Ok(toc.is_bipartite() && toc.is_forest())
}

fn cmd_sweep(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli)?;
    let out = out_dir(cli)?;
    let record = sweep::run_sweep(&cfg, cli.cache.as_deref())?;
    record.save(out)?;
    for c in &record.checks {
        println!("{}: {}", c.name, if c.pass { "pass" } else { "FAIL" });
    }
    println!(
        "record {} with {} cells saved to {}",
        record.config_hash,
        record.cells.len(),
        out.join("run.toml").display()
    );
    Ok(record.all_pass())
}

fn cmd_report(cli: &Cli) -> Result<bool> {
    let out = out_dir(cli)?;
    let record = sweep::RunRecord::load(out)?;
    report::emit_report(&record, out)?;
    println!("report written to {}", out.display());
    Ok(record.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Space => cmd_space(&cli),
        Command::Cover => cmd_cover(&cli),
        Command::Modulus => cmd_modulus(&cli),
        Command::Weights => cmd_weights(&cli),
        Command::Recursion => cmd_recursion(&cli),
        Command::Cylinders => cmd_cylinders(&cli),
        Command::Sweep => cmd_sweep(&cli),
        Command::Report => cmd_report(&cli),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
