//! Experiment configuration: a TOML document fixing the space, the cover
//! range, the solver grid, and the optional weight / recursion / cylinder
//! sections.  `(config, seed)` determines every emitted number.

use serde::{Deserialize, Serialize};

use cmlab_core::geometry::CircleTreeSpec;
use cmlab_core::gog::GraphOfGroups;
use cmlab_core::weights::WeightParams;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceConfig {
    pub scale_base: u32,
    pub copies_schedule: Vec<u32>,
    pub max_level: u32,
    /// Node spacing; defaults to a^{-max_level}/4, the coarsest value the
    /// space builder accepts at that level.
    pub resolution: Option<f64>,
}

impl SpaceConfig {
    pub fn spec(&self) -> CircleTreeSpec {
        CircleTreeSpec {
            scale_base: self.scale_base,
            copies_schedule: self.copies_schedule.clone(),
            max_level: self.max_level,
        }
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
            .unwrap_or_else(|| f64::from(self.scale_base).powi(-(self.max_level as i32)) / 4.0)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverConfig {
    pub n_min: i32,
    pub n_max: i32,
}

impl CoverConfig {
    pub fn range(&self) -> impl Iterator<Item = i32> {
        self.n_min..=self.n_max
    }
}

fn default_tol() -> f64 {
    1e-2
}

fn default_max_iters() -> usize {
    150
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulusConfig {
    /// Exponents to solve at; empty means no solver runs.
    #[serde(default)]
    pub p_grid: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

impl Default for ModulusConfig {
    fn default() -> Self {
        ModulusConfig {
            p_grid: vec![],
            tol: default_tol(),
            max_iters: default_max_iters(),
        }
    }
}

fn default_delta_prime() -> f64 {
    0.35
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyConfig {
    JoinEnds,
    EndpointSeparation {
        #[serde(default = "default_delta_prime")]
        delta_prime: f64,
    },
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig::EndpointSeparation {
            delta_prime: default_delta_prime(),
        }
    }
}

impl FamilyConfig {
    pub fn family(&self) -> cmlab_core::cover::CurveFamily {
        match self {
            FamilyConfig::JoinEnds => cmlab_core::cover::CurveFamily::JoinEnds,
            FamilyConfig::EndpointSeparation { delta_prime } => {
                cmlab_core::cover::CurveFamily::EndpointSeparation {
                    delta_prime: *delta_prime,
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightsConfig {
    /// Volume exponent of the constructed weight.
    pub p: f64,
    /// Tune (E2, E3, E1) on the configured cover range; otherwise the
    /// base-model defaults are used as-is.
    #[serde(default)]
    pub calibrate: bool,
}

impl WeightsConfig {
    pub fn base_params(&self) -> WeightParams {
        WeightParams::toy(self.p)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecursionConfig {
    pub p: f64,
    pub depth: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CylindersConfig {
    pub graph: GraphOfGroups,
    pub base: String,
    pub depth: u32,
    pub branching_cap: u64,
}

fn default_jobs() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    pub space: SpaceConfig,
    pub cover: CoverConfig,
    #[serde(default)]
    pub modulus: ModulusConfig,
    #[serde(default)]
    pub family: FamilyConfig,
    pub weights: Option<WeightsConfig>,
    pub recursion: Option<RecursionConfig>,
    pub cylinders: Option<CylindersConfig>,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.space
            .spec()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if self.cover.n_min < 1 || self.cover.n_min > self.cover.n_max {
            return Err(CliError::Config(format!(
                "cover range {}..={} is empty or starts below 1",
                self.cover.n_min, self.cover.n_max
            )));
        }
        if self.cover.n_max > self.space.max_level as i32 {
            return Err(CliError::Config(format!(
                "cover scale n = {} exceeds the space level {}",
                self.cover.n_max, self.space.max_level
            )));
        }
        for &p in &self.modulus.p_grid {
            if !(p > 1.0) {
                return Err(CliError::Config(format!("solver exponent p = {p} <= 1")));
            }
        }
        if !(self.space.resolution() > 0.0) {
            return Err(CliError::Config("resolution must be positive".into()));
        }
        if let Some(w) = &self.weights {
            w.base_params()
                .validate()
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical serialized config (seed included).
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        crate::cache::sha256_hex(canonical.as_bytes())
    }
}
