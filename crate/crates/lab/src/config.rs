//! Experiment configuration: one JSON document, every field optional, with
//! command-line overrides applied on top.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use apair_core::TGrid;
use serde::{Deserialize, Serialize};

use crate::LabError;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Commbound,
    Expfactor,
    Techlemma,
    Compose,
    Bott,
    Perturb,
    #[serde(rename = "appendixB")]
    AppendixB,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Commbound,
        Experiment::Expfactor,
        Experiment::Techlemma,
        Experiment::Compose,
        Experiment::Bott,
        Experiment::Perturb,
        Experiment::AppendixB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Commbound => "commbound",
            Experiment::Expfactor => "expfactor",
            Experiment::Techlemma => "techlemma",
            Experiment::Compose => "compose",
            Experiment::Bott => "bott",
            Experiment::Perturb => "perturb",
            Experiment::AppendixB => "appendixB",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| LabError::UnknownExperiment(s.to_string()))
    }
}

/// Either an explicit list of points or a geometric range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Geometric { start: f64, end: f64, points: usize },
    Points(Vec<f64>),
}

impl GridSpec {
    pub fn build(&self) -> Result<TGrid, LabError> {
        let grid = match self {
            GridSpec::Geometric { start, end, points } => TGrid::geometric(*start, *end, *points),
            GridSpec::Points(p) => TGrid::new(p.clone()),
        };
        grid.map_err(|e| LabError::InvalidGrid(e.to_string()))
    }
}

/// Overrides for the pass thresholds; unset fields keep the defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub first_order_exponent: Option<f64>,
    pub second_order_exponent: Option<f64>,
    pub exact: Option<f64>,
    pub kernel: Option<f64>,
    pub gap: Option<f64>,
    pub commutator: Option<f64>,
    pub rate_relative: Option<f64>,
    pub techlemma_tail: Option<f64>,
}

/// The on-disk document.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub dims: Option<Vec<usize>>,
    pub t_grid: Option<GridSpec>,
    pub n_grid: Option<Vec<f64>>,
    pub n_basis: Option<usize>,
    pub coords: Option<usize>,
    pub max_norm: Option<f64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved settings for one run. This is what the report records;
/// the output directory is left out so that reports do not depend on it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub t_grid: Vec<f64>,
    pub n_grid: Vec<f64>,
    pub n_basis: usize,
    pub coords: usize,
    pub max_norm: f64,
    pub tolerances: ResolvedTolerances,
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolvedTolerances {
    pub first_order_exponent: f64,
    pub second_order_exponent: f64,
    pub exact: f64,
    pub kernel: f64,
    pub gap: f64,
    pub commutator: f64,
    pub rate_relative: f64,
    pub techlemma_tail: f64,
}

impl ResolvedTolerances {
    fn from(t: &Tolerances) -> Self {
        Self {
            first_order_exponent: t.first_order_exponent.unwrap_or(apair_core::pairs::AP2_EXPONENT),
            second_order_exponent: t
                .second_order_exponent
                .unwrap_or(apair_core::pairs::SECOND_ORDER_EXPONENT),
            exact: t.exact.unwrap_or(1e-12),
            kernel: t.kernel.unwrap_or(1e-8),
            gap: t.gap.unwrap_or(1e-6),
            commutator: t.commutator.unwrap_or(1e-10),
            rate_relative: t.rate_relative.unwrap_or(0.02),
            techlemma_tail: t.techlemma_tail.unwrap_or(apair_core::estimates::TECHLEMMA_TAIL),
        }
    }
}

/// Per-experiment defaults: (trials, dims, t-grid, N-grid, max norm).
fn defaults(e: Experiment) -> (usize, Vec<usize>, GridSpec, Vec<f64>, f64) {
    let default_grid = GridSpec::Geometric {
        start: 1.0,
        end: 1e3,
        points: 60,
    };
    let doubling: Vec<f64> = (0..7).map(|k| f64::from(1u32 << k)).collect();
    let commbound_n = vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    match e {
        Experiment::Commbound => (200, vec![4, 8, 16], default_grid, commbound_n, 1.0),
        Experiment::Expfactor => (
            50,
            vec![8],
            GridSpec::Geometric {
                start: 10.0,
                end: 1e3,
                points: 40,
            },
            commbound_n,
            1.0,
        ),
        Experiment::Techlemma => (20, vec![8], default_grid, doubling, 1.0),
        Experiment::Compose => (50, vec![8], default_grid, commbound_n, 1.0),
        Experiment::Bott => (1, vec![], default_grid, commbound_n, 1.0),
        Experiment::Perturb => (10, vec![6], default_grid, commbound_n, 1.0),
        Experiment::AppendixB => (500, vec![16], default_grid, commbound_n, 3.0),
    }
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Merges file settings, overrides, and defaults. Unknown experiment
    /// names are reported before anything else is validated.
    pub fn resolve(file: ExperimentConfig, overrides: Overrides) -> Result<Self, LabError> {
        let name = overrides
            .experiment
            .or(file.experiment.clone())
            .ok_or_else(|| LabError::UnknownExperiment(String::new()))?;
        let experiment: Experiment = name.parse()?;
        let (trials, dims, grid, n_grid, max_norm) = defaults(experiment);
        let t_grid = file.t_grid.clone().unwrap_or(grid).build()?;
        let n_grid = file.n_grid.clone().unwrap_or(n_grid);
        if n_grid.is_empty() || n_grid.iter().any(|n| !(*n > 0.0 && n.is_finite())) {
            return Err(LabError::InvalidGrid("n_grid must be nonempty and positive".into()));
        }
        let dims = file.dims.clone().unwrap_or(dims);
        if dims.contains(&0) || (dims.is_empty() && experiment != Experiment::Bott) {
            return Err(LabError::InvalidParameter("dims must be nonempty and positive".into()));
        }
        let trials = file.trials.unwrap_or(trials);
        if trials == 0 {
            return Err(LabError::InvalidParameter("trials must be positive".into()));
        }
        let max_norm = file.max_norm.unwrap_or(max_norm);
        if !(max_norm > 0.0 && max_norm.is_finite()) {
            return Err(LabError::InvalidParameter("max_norm must be positive".into()));
        }
        let n_basis = file.n_basis.unwrap_or(64);
        if n_basis < 8 {
            return Err(LabError::InvalidParameter("n_basis must be at least 8".into()));
        }
        let coords = file.coords.unwrap_or(1);
        if coords == 0 {
            return Err(LabError::InvalidParameter("coords must be positive".into()));
        }
        Ok(Self {
            experiment,
            seed: overrides.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            trials,
            dims,
            t_grid: t_grid.points().to_vec(),
            n_grid,
            n_basis,
            coords,
            max_norm,
            tolerances: ResolvedTolerances::from(&file.tolerances),
            out: overrides.out.or(file.out).unwrap_or_else(|| PathBuf::from("lab-out")),
        })
    }

    /// Defaults for `experiment` with the given seed.
    pub fn for_experiment(experiment: Experiment, seed: u64) -> Self {
        Self::resolve(
            ExperimentConfig::default(),
            Overrides {
                experiment: Some(experiment.name().into()),
                seed: Some(seed),
                out: None,
            },
        )
        .expect("defaults are valid")
    }

    pub fn grid(&self) -> TGrid {
        TGrid::new(self.t_grid.clone()).expect("validated on resolve")
    }
}
