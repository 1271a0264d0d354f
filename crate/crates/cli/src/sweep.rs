//! Sweep orchestration: build (or load) the space, construct covers,
//! run the solver grid and the optional weight pipeline, and persist a
//! run record whose tables are fully determined by (config, seed).

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use cmlab_core::cover::{build_cover, resolve_family, Cover, ResolvedFamily};
use cmlab_core::modulus::{solve_modulus, vol_p, Admissibility, SolveStatus};
use cmlab_core::space::ModelSpace;
use cmlab_core::weights::{
    build_paper_weight, calibrate, toy_recursion, verify_admissibility, PaperWeight, WeightParams,
};

use crate::cache::load_or_build_space;
use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceStats {
    pub circles: usize,
    pub nodes: usize,
    pub level: u32,
    pub resolution: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverStats {
    pub n: i32,
    pub sets: usize,
    pub max_degree: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellResult {
    pub p: f64,
    pub n: i32,
    pub value: f64,
    pub cert_low: f64,
    pub cert_high: f64,
    pub iterations: usize,
    /// "converged", "iteration-capped", or "error".
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightScaleRow {
    pub n: i32,
    pub sup: f64,
    pub n_sup: f64,
    pub vol_p: f64,
    pub admissible: bool,
    pub min_length: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecursionResult {
    pub p: f64,
    pub values: Vec<f64>,
    pub c_prime: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub seed: u64,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub space: SpaceStats,
    pub covers: Vec<CoverStats>,
    #[serde(default)]
    pub cells: Vec<CellResult>,
    #[serde(default)]
    pub weight_rows: Vec<WeightScaleRow>,
    /// Exponent the weight rows were built at, when the pipeline ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recursion: Option<RecursionResult>,
    #[serde(default)]
    pub checks: Vec<Check>,
}

impl RunRecord {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn save(&self, out_dir: &Path) -> Result<()> {
        std::fs::create_dir_all(out_dir)?;
        let text = toml::to_string_pretty(self)
            .map_err(|e| CliError::Io(format!("serializing run record: {e}")))?;
        std::fs::write(out_dir.join("run.toml"), text)?;
        Ok(())
    }

    pub fn load(out_dir: &Path) -> Result<Self> {
        let path = out_dir.join("run.toml");
        let text = std::fs::read_to_string(&path)
            .map_err(|_| CliError::MissingRecord(path.display().to_string()))?;
        toml::from_str(&text).map_err(|e| CliError::Io(format!("parsing {}: {e}", path.display())))
    }
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn space_stats(space: &ModelSpace) -> SpaceStats {
    SpaceStats {
        circles: space.tree.circles.len(),
        nodes: space.nodes.len(),
        level: space.tree.level,
        resolution: space.resolution,
    }
}

pub fn cover_stats(cover: &Cover) -> CoverStats {
    CoverStats {
        n: cover.n,
        sets: cover.centers.len(),
        max_degree: cover.max_degree,
        radius: cover.radius,
    }
}

/// Solve the (p, n) grid over shared covers with a bounded worker pool.
fn run_cells(
    cfg: &ExperimentConfig,
    covers: &[Cover],
    families: &[ResolvedFamily],
) -> Vec<CellResult> {
    let cells: Vec<(f64, i32)> = cfg
        .modulus
        .p_grid
        .iter()
        .flat_map(|&p| covers.iter().map(move |c| (p, c.n)))
        .collect();
    let results: Mutex<Vec<Option<CellResult>>> = Mutex::new(vec![None; cells.len()]);
    let next = AtomicUsize::new(0);
    let workers = cfg.jobs.max(1).min(cells.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let (p, n) = cells[i];
                let idx = covers.iter().position(|c| c.n == n).expect("cover for n");
                let cell = match solve_modulus(
                    &covers[idx],
                    &families[idx],
                    p,
                    cfg.modulus.tol,
                    cfg.modulus.max_iters,
                ) {
                    Ok(sol) => CellResult {
                        p,
                        n,
                        value: sol.value,
                        cert_low: sol.certificate.0,
                        cert_high: sol.certificate.1,
                        iterations: sol.iterations,
                        status: match sol.status {
                            SolveStatus::Converged => "converged".into(),
                            SolveStatus::IterationCapped => "iteration-capped".into(),
                        },
                        error: None,
                    },
                    // a failed cell is recorded and the sweep continues
                    Err(e) => CellResult {
                        p,
                        n,
                        value: f64::NAN,
                        cert_low: f64::NAN,
                        cert_high: f64::NAN,
                        iterations: 0,
                        status: "error".into(),
                        error: Some(e.to_string()),
                    },
                };
                results.lock().expect("results lock")[i] = Some(cell);
            });
        }
    });
    results
        .into_inner()
        .expect("results lock")
        .into_iter()
        .map(|c| c.expect("all cells filled"))
        .collect()
}

/// Resolve the configured weight parameters, calibrating when asked.
pub fn resolve_params(
    cfg: &ExperimentConfig,
    space: &ModelSpace,
    covers: &[Cover],
) -> Result<Option<WeightParams>> {
    let Some(wcfg) = &cfg.weights else {
        return Ok(None);
    };
    let base = wcfg.base_params();
    if wcfg.calibrate {
        Ok(Some(calibrate(space, covers, &base)?.params))
    } else {
        Ok(Some(base))
    }
}

pub fn build_weights(
    space: &ModelSpace,
    covers: &[Cover],
    params: &WeightParams,
) -> Result<Vec<PaperWeight>> {
    covers
        .iter()
        .map(|c| Ok(build_paper_weight(space, c, params)?))
        .collect()
}

fn weight_checks(
    params: &WeightParams,
    rows: &[WeightScaleRow],
    weights: &[PaperWeight],
    cells: &[CellResult],
    checks: &mut Vec<Check>,
) {
    for row in rows {
        checks.push(Check {
            name: format!("weights admissible at n={}", row.n),
            pass: row.admissible,
        });
    }
    if rows.len() >= 3 {
        let hi = rows.iter().map(|r| r.n_sup).fold(f64::MIN, f64::max);
        let lo = rows.iter().map(|r| r.n_sup).fold(f64::MAX, f64::min);
        checks.push(Check {
            name: "n*sup within factor-10 band".into(),
            pass: lo > 0.0 && hi / lo <= 10.0,
        });
        let vhi = rows.iter().map(|r| r.vol_p).fold(f64::MIN, f64::max);
        let vlo = rows.iter().map(|r| r.vol_p).fold(f64::MAX, f64::min);
        checks.push(Check {
            name: "volumes within factor-10 band".into(),
            pass: vlo > 0.0 && vhi / vlo <= 10.0,
        });
    }
    // an admissible weight's volume dominates the modulus, so the certified
    // lower bound of a matching solver cell must sit below it
    for cell in cells.iter().filter(|c| c.p == params.p) {
        if let Some(row) = rows.iter().find(|r| r.n == cell.n) {
            if cell.status != "error" {
                checks.push(Check {
                    name: format!("coupling Mod <= Vol at p={}, n={}", cell.p, cell.n),
                    pass: cell.cert_low <= row.vol_p,
                });
            }
        }
    }
    // interpolation inequality on every constructed weight
    for pw in weights {
        let sup = pw.weights.sup_norm();
        let base = vol_p(&pw.weights, params.p).unwrap_or(f64::NAN);
        let pass = [0.1, 0.5].iter().all(|&eps| {
            vol_p(&pw.weights, params.p + eps).map_or(false, |v| {
                v <= sup.powf(eps) * base * (1.0 + 1e-12)
            })
        });
        checks.push(Check {
            name: format!("volume interpolation inequality at n={}", pw.n),
            pass,
        });
    }
}

pub fn run_sweep(cfg: &ExperimentConfig, cache_dir: Option<&Path>) -> Result<RunRecord> {
    let started = now_unix();
    let space = load_or_build_space(&cfg.space, cache_dir)?;
    let covers: Vec<Cover> = cfg
        .cover
        .range()
        .map(|n| Ok(build_cover(&space, n)?))
        .collect::<Result<_>>()?;

    let mut checks = Vec::new();
    let mut cells = Vec::new();
    if !cfg.modulus.p_grid.is_empty() {
        let family = cfg.family.family();
        let families: Vec<ResolvedFamily> = covers
            .iter()
            .map(|c| Ok(resolve_family(&space, c, &family)?))
            .collect::<Result<_>>()?;
        cells = run_cells(cfg, &covers, &families);
        for cell in &cells {
            checks.push(Check {
                name: format!("modulus cell p={}, n={} solved", cell.p, cell.n),
                pass: cell.status == "converged",
            });
        }
    }

    let params = resolve_params(cfg, &space, &covers)?;
    let mut weight_rows = Vec::new();
    let mut weight_p = None;
    if let Some(params) = &params {
        let weights = build_weights(&space, &covers, params)?;
        for (cover, pw) in covers.iter().zip(&weights) {
            let rep = verify_admissibility(&space, cover, pw, params.delta_prime)?;
            let (admissible, min_length) = match rep.result {
                Admissibility::Admissible { min_length, .. } => (true, min_length),
                Admissibility::Violated { length, .. } => (false, length),
            };
            let sup = pw.weights.sup_norm();
            weight_rows.push(WeightScaleRow {
                n: pw.n,
                sup,
                n_sup: f64::from(pw.n) * sup,
                vol_p: vol_p(&pw.weights, params.p)?,
                admissible,
                min_length,
            });
        }
        weight_checks(params, &weight_rows, &weights, &cells, &mut checks);
        weight_p = Some(params.p);
    }

    let recursion = match &cfg.recursion {
        Some(rc) => {
            let rec = toy_recursion(rc.p, rc.depth)?;
            checks.push(Check {
                name: "recursion starts at 1 with finite C'".into(),
                pass: (rec.values[0] - 1.0).abs() < 1e-12 && rec.c_prime.is_finite(),
            });
            Some(RecursionResult {
                p: rc.p,
                values: rec.values,
                c_prime: rec.c_prime,
            })
        }
        None => None,
    };

    Ok(RunRecord {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        started_unix: started,
        finished_unix: now_unix(),
        space: space_stats(&space),
        covers: covers.iter().map(cover_stats).collect(),
        cells,
        weight_rows,
        weight_p,
        recursion,
        checks,
    })
}
