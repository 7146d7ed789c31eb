//! Run configuration: one JSON document per run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

fn yes() -> bool {
    true
}

fn one() -> usize {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_states() -> usize {
    100
}

fn default_time_points() -> usize {
    20
}

fn default_k_candidates() -> Vec<u32> {
    vec![0, 1, 2]
}

fn default_budget() -> usize {
    1_000_000
}

fn default_sobolev_samples() -> usize {
    16
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// The operator; not needed by `continuum`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceSpec>,
    /// Master seed; every random stream is derived from it.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub profiles: ProfileOptions,
    #[serde(default)]
    pub suite: SuiteConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuum: Option<ContinuumConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    Cycle {
        n: usize,
    },
    Torus {
        d: usize,
        n: usize,
    },
    /// Right Cayley graph from a multiplication table.
    CayleyTable {
        table: Vec<Vec<usize>>,
        generators: Vec<usize>,
    },
    /// Quotient `N` of the abelian cover described by a complex file; `labels`
    /// overrides the file's `[labels]` section, `rank` is needed only when
    /// neither gives labels.
    ComplexFile {
        path: PathBuf,
        #[serde(default)]
        degree: usize,
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rank: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<Vec<i64>>>,
        #[serde(default)]
        auto_complete: bool,
    },
    MatrixFile {
        path: PathBuf,
        #[serde(default)]
        invariant: bool,
        #[serde(default = "one")]
        fiber: usize,
    },
}

/// Evaluation grids; missing grids are derived from the spectrum.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksConfig {
    #[serde(default = "yes")]
    pub h_sobolev: bool,
    #[serde(default = "yes")]
    pub n_sobolev: bool,
    #[serde(default = "yes")]
    pub nash: bool,
    #[serde(default = "yes")]
    pub faber_krahn: bool,
    #[serde(default = "yes")]
    pub uncertainty: bool,
    #[serde(default = "yes")]
    pub operator_bounds: bool,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            h_sobolev: true,
            n_sobolev: true,
            nash: true,
            faber_krahn: true,
            uncertainty: true,
            operator_bounds: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "default_states")]
    pub states: usize,
    #[serde(default = "yes")]
    pub structured_states: bool,
    #[serde(default)]
    pub checks: ChecksConfig,
    #[serde(default = "default_time_points")]
    pub time_points: usize,
    /// Multiplies every weight of `F` before certification. Anything but 1
    /// deliberately corrupts the density (negative control).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_factor: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            states: default_states(),
            structured_states: true,
            checks: ChecksConfig::default(),
            time_points: default_time_points(),
            density_factor: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    /// Quotient sizes `N` of the tower.
    pub sizes: Vec<usize>,
    /// Form degree; defaults to the instance's degree, or 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(default = "default_k_candidates")]
    pub k_candidates: Vec<u32>,
    /// Exponent for the Sobolev brackets; none skips them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sobolev_p: Option<f64>,
    #[serde(default = "default_sobolev_samples")]
    pub sobolev_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub index: Vec<u32>,
    pub coefficient: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainConfig {
    Bounding { half_width: f64 },
    Restricted { half_width: f64 },
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumConfig {
    pub dimension: usize,
    /// The symbol `Σ a_I ξ^I`; none means `|ξ|²`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomials: Option<Vec<Monomial>>,
    pub grid: Vec<f64>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    pub domain: DomainConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(default = "default_k_candidates")]
    pub k_candidates: Vec<u32>,
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(CliError::Config(format!("{name} is empty")));
    }
    if grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(CliError::Config(format!("{name} must be positive and finite")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

fn check_window(name: &str, w: &[f64; 2]) -> Result<()> {
    if !(w[0] > 0.0 && w[1] > w[0] && w[1].is_finite()) {
        return Err(CliError::Config(format!("{name} must satisfy 0 < lo < hi, got {w:?}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Json { path: None, source: e })
    }

    /// Reads and validates a config; relative paths resolve against its directory.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_owned(), source: e })?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Json { path: Some(path.to_owned()), source: e })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate(&base)?;
        Ok((cfg, base))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self, base: &Path) -> Result<()> {
        match &self.instance {
            Some(InstanceSpec::Cycle { n }) if *n < 2 => return Err(CliError::Config("cycle needs n ≥ 2".into())),
            Some(InstanceSpec::Torus { d, n }) if *d == 0 || *n < 2 => {
                return Err(CliError::Config("torus needs d ≥ 1 and n ≥ 2".into()))
            }
            Some(InstanceSpec::ComplexFile { path, .. }) | Some(InstanceSpec::MatrixFile { path, .. }) => {
                let p = base.join(path);
                if !p.is_file() {
                    return Err(CliError::Config(format!("referenced file {} does not exist", p.display())));
                }
            }
            _ => {}
        }
        let p = &self.profiles;
        for (name, g) in [("lambda_grid", &p.lambda_grid), ("y_grid", &p.y_grid), ("t_grid", &p.t_grid)] {
            if let Some(g) = g {
                check_grid(name, g)?;
            }
        }
        if let Some(f) = self.suite.density_factor {
            if !(f.is_finite() && f > 0.0) {
                return Err(CliError::Config(format!("density_factor must be positive, got {f}")));
            }
        }
        if let Some(s) = &self.scaling {
            if s.sizes.is_empty() || s.sizes.iter().any(|&n| n < 2) {
                return Err(CliError::Config("scaling sizes must be a nonempty list of N ≥ 2".into()));
            }
            if let Some(w) = &s.window {
                check_window("scaling window", w)?;
            }
            if let Some(p) = s.sobolev_p {
                if p.is_nan() || p < 2.0 {
                    return Err(CliError::Config(format!("sobolev_p must be ≥ 2, got {p}")));
                }
            }
        }
        if let Some(c) = &self.continuum {
            if c.dimension == 0 {
                return Err(CliError::Config("continuum dimension must be ≥ 1".into()));
            }
            check_grid("continuum grid", &c.grid)?;
            if let Some(w) = &c.window {
                check_window("continuum window", w)?;
            }
        }
        Ok(())
    }
}
