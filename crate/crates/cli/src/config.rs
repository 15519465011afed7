//! Run configuration: a single JSON file covering graph construction, frame
//! parameters, the solver, and localization. Partial files are fine — every
//! field has a default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dgw::{DgwError, Result};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub graph: GraphSection,
    pub frame: FrameSection,
    pub solver: SolverSection,
    pub localization: LocalizationSection,
    pub io: IoSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphSection {
    /// Neighbors per vertex in the k-NN construction.
    pub k: usize,
    /// Gaussian kernel width in km; `null` selects the mean k-NN distance.
    pub sigma: Option<f64>,
}

impl Default for GraphSection {
    fn default() -> Self {
        Self { k: 5, sigma: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSection {
    pub num_scales: usize,
    /// Smallest scale; `null` gives the default grid on (0, s_max].
    pub s_min: Option<f64>,
    pub s_max: f64,
    pub beta: f64,
}

impl Default for FrameSection {
    fn default() -> Self {
        Self {
            num_scales: 10,
            s_min: None,
            s_max: 2.0,
            beta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub gamma: f64,
    pub epsilon: f64,
    pub max_iters: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            gamma: 0.1,
            epsilon: 1e-10,
            max_iters: 500,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizationSection {
    /// Relative energy cutoff in (0, 1] for contributor selection.
    pub rho: f64,
}

impl Default for LocalizationSection {
    fn default() -> Self {
        Self { rho: 0.5 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IoSection {
    /// Default output path when `--out` is not given.
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                let cfg: RunConfig = serde_json::from_str(&text)
                    .map_err(|e| DgwError::InvalidParameter(format!("bad config: {e}")))?;
                Ok(cfg)
            }
        }
    }

    /// Scale grid for a graph with the given `lambda_max`: explicit
    /// [s_min, s_max] when s_min is set, otherwise the default grid on
    /// (0, min(s_max, 3.99/lambda_max)].
    pub fn scales(&self, lambda_max: f64) -> Result<Vec<f64>> {
        match self.frame.s_min {
            Some(s_min) => dgw::scale_grid(self.frame.num_scales, s_min, self.frame.s_max),
            None => {
                let cap = if lambda_max > 0.0 {
                    3.99 / lambda_max
                } else {
                    f64::INFINITY
                };
                let s_max = self.frame.s_max.min(cap);
                if self.frame.num_scales == 0 {
                    return Err(DgwError::InvalidParameter("num_scales must be >= 1".into()));
                }
                Ok((1..=self.frame.num_scales)
                    .map(|i| s_max * i as f64 / self.frame.num_scales as f64)
                    .collect())
            }
        }
    }

    pub fn solver_config(&self) -> dgw::SolverConfig {
        dgw::SolverConfig {
            gamma: self.solver.gamma,
            max_iters: self.solver.max_iters,
            tolerance: self.solver.epsilon,
            delta: 1e-12,
            step: None,
        }
    }
}
