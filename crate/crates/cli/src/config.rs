//! Run configuration and flag parsing helpers.

use serde::Serialize;
use thiserror::Error;

use dressage::dressing::{parse_path, KernelKind, Step};
use dressage::Lattice;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("ConfigError: {0}")]
    Invalid(String),
    #[error(transparent)]
    Module(#[from] dressage::Error),
}

pub fn parse_dims(text: &str) -> Result<Vec<usize>, ConfigError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| ConfigError::Invalid(format!("bad extent {t:?} in --dims")))
        })
        .collect()
}

/// Which sites to sample: every site, an explicit list, or `sample:N`
/// (N sites evenly strided through the row-major order).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorSpec {
    All,
    Sample(usize),
    Sites(Vec<Vec<i64>>),
}

impl AnchorSpec {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let text = text.trim();
        if text == "all" {
            return Ok(AnchorSpec::All);
        }
        if let Some(n) = text.strip_prefix("sample:") {
            let n = n
                .parse::<usize>()
                .map_err(|_| ConfigError::Invalid(format!("bad sample size {n:?}")))?;
            if n == 0 {
                return Err(ConfigError::Invalid("sample size must be positive".into()));
            }
            return Ok(AnchorSpec::Sample(n));
        }
        let sites = text
            .split(';')
            .map(|site| {
                site.split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<i64>()
                            .map_err(|_| ConfigError::Invalid(format!("bad coordinate {c:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AnchorSpec::Sites(sites))
    }

    pub fn resolve(&self, lat: &Lattice) -> Result<Vec<usize>, ConfigError> {
        match self {
            AnchorSpec::All => Ok((0..lat.volume()).collect()),
            AnchorSpec::Sample(n) => {
                let n = (*n).min(lat.volume());
                Ok((0..n).map(|i| i * lat.volume() / n).collect())
            }
            AnchorSpec::Sites(sites) => sites
                .iter()
                .map(|c| {
                    if c.len() != lat.ndim() {
                        Err(ConfigError::Invalid(format!(
                            "anchor {c:?} needs {} coordinates",
                            lat.ndim()
                        )))
                    } else {
                        Ok(lat.index(c))
                    }
                })
                .collect(),
        }
    }
}

/// Default anchor sampling: every site on small lattices, 64 strided sites otherwise.
pub fn default_anchors(lat: &Lattice) -> AnchorSpec {
    if lat.volume() <= 4096 {
        AnchorSpec::All
    } else {
        AnchorSpec::Sample(64)
    }
}

/// Kernel selection shared by the commands that build kernels in memory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelChoice {
    pub kind: KernelKind,
    pub path: Option<String>,
}

impl KernelChoice {
    pub fn parse(kind: &str, path: Option<&str>) -> Result<Self, ConfigError> {
        let kind: KernelKind = kind.parse()?;
        match kind {
            KernelKind::Path if path.is_none() => Err(ConfigError::Invalid(
                "--kind path requires --path".into(),
            )),
            KernelKind::Custom => Err(ConfigError::Invalid(
                "custom kernels are loaded from a file with --kernel".into(),
            )),
            _ => Ok(Self {
                kind,
                path: path.map(str::to_string),
            }),
        }
    }

    pub fn steps(&self) -> Result<Vec<Step>, ConfigError> {
        Ok(parse_path(self.path.as_deref().unwrap_or(""))?)
    }
}

/// Echo of the options a command ran with.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub dims: Vec<usize>,
    pub seed: u64,
    pub coupling: f64,
    pub smoothness: f64,
    pub kernel: Option<KernelChoice>,
    pub anchors: Option<AnchorSpec>,
    pub tolerance: Option<f64>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<Lattice, ConfigError> {
        if !(self.coupling.is_finite() && self.coupling != 0.0) {
            return Err(ConfigError::Invalid(format!(
                "--coupling must be finite and nonzero, got {}",
                self.coupling
            )));
        }
        if !(self.smoothness.is_finite() && self.smoothness >= 0.0) {
            return Err(ConfigError::Invalid(format!(
                "--smoothness must be a nonnegative number, got {}",
                self.smoothness
            )));
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(ConfigError::Invalid(format!(
                    "--tolerance must be positive, got {t}"
                )));
            }
        }
        Ok(Lattice::new(&self.dims)?)
    }
}
