//! Experiment configuration files (TOML).
//!
//! ```toml
//! [model]
//! dim = 1
//! seed = 7
//!
//! [model.family]
//! kind = "quadratic"            # quadratic | scaled_l1 | pl1d_mixture | affine_skew | phelps_gallery
//! q = { table = [[1.0, 0.5], [3.0, 0.5]] }
//! b = { dirac = 0.0 }           # also { uniform = [lo, hi] }, { truncated_normal = { mean, sd, lo, hi } }
//!
//! [experiment]
//! n_schedule = [10, 100, 1000]
//! trials = 20
//! point = [0.0]                 # x⋆ for lemma-check and verify
//! ```
//!
//! Defaults for every omitted key:
//!
//! | key                          | default                     |
//! |------------------------------|-----------------------------|
//! | `experiment.n_schedule`      | 10, 30, 100, 300, 1000, 3000, 10000 |
//! | `experiment.trials`          | 20                          |
//! | `experiment.jobs`            | 0 (all cores)               |
//! | `experiment.max_failed_rows` | 0                           |
//! | `probes.count`               | 8                           |
//! | `probes.half_width`          | 5.0                         |
//! | `probes.seed`                | 1                           |
//! | `solver.gamma`               | 1.0                         |
//! | `solver.lambda`              | 1.0                         |
//! | `solver.tol`                 | 1e-9                        |
//! | `solver.max_iter`            | 100000                      |
//! | `zeros.step`                 | 1.0                         |
//! | `zeros.tol`                  | 1e-8                        |
//! | `zeros.max_iter`             | 10000                       |
//! | `checks.max_inversions`      | 1                           |
//! | `checks.final_ratio`         | 0.05                        |
//! | `checks.decay_ratio`         | 0.1                         |
//! | `checks.slope_band`          | none (no slope claim)       |
//! | `checks.inequality_tol`      | 1e-7                        |
//! | `checks.cross_check_tol`     | 1e-6                        |
//! | `output.dir`                 | `$MONOLAB_OUT`, else `monolab-out` |
//! | `output.name`                | config file stem            |
//! | `output.timing`              | false                       |

use std::path::{Path, PathBuf};

use monolab_core::operator::{Matrix, OperatorKind};
use monolab_core::pl1d::Ray;
use monolab_core::{Family, OperatorHandle, Pl1dGraph, Point, ProbeSet, RandomOperatorModel, ScalarLaw, SolverSettings};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "MONOLAB_OUT";
pub const DEFAULT_OUTPUT_DIR: &str = "monolab-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LawSpec {
    Dirac(f64),
    Table(Vec<[f64; 2]>),
    Uniform([f64; 2]),
    TruncatedNormal { mean: f64, sd: f64, lo: f64, hi: f64 },
}

impl LawSpec {
    pub fn to_law(&self) -> ScalarLaw {
        match self {
            LawSpec::Dirac(v) => ScalarLaw::Dirac(*v),
            LawSpec::Table(rows) => ScalarLaw::Table(rows.iter().map(|r| (r[0], r[1])).collect()),
            LawSpec::Uniform([lo, hi]) => ScalarLaw::Uniform { lo: *lo, hi: *hi },
            LawSpec::TruncatedNormal { mean, sd, lo, hi } => {
                ScalarLaw::TruncatedNormal { mean: *mean, sd: *sd, lo: *lo, hi: *hi }
            }
        }
    }

    pub fn from_law(law: &ScalarLaw) -> Self {
        match law {
            ScalarLaw::Dirac(v) => LawSpec::Dirac(*v),
            ScalarLaw::Table(rows) => LawSpec::Table(rows.iter().map(|(v, p)| [*v, *p]).collect()),
            ScalarLaw::Uniform { lo, hi } => LawSpec::Uniform([*lo, *hi]),
            ScalarLaw::TruncatedNormal { mean, sd, lo, hi } => {
                LawSpec::TruncatedNormal { mean: *mean, sd: *sd, lo: *lo, hi: *hi }
            }
        }
    }
}

/// End ray: a nonnegative slope or the string `"vertical"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RaySpec {
    Slope(f64),
    Named(String),
}

impl RaySpec {
    fn to_ray(&self) -> Result<Ray> {
        match self {
            RaySpec::Slope(s) => Ok(Ray::Slope(*s)),
            RaySpec::Named(n) if n == "vertical" => Ok(Ray::Vertical),
            RaySpec::Named(n) => Err(LabError::Config(format!("unknown ray `{n}` (use a slope or \"vertical\")"))),
        }
    }

    fn from_ray(ray: Ray) -> Self {
        match ray {
            Ray::Slope(s) => RaySpec::Slope(s),
            Ray::Vertical => RaySpec::Named("vertical".into()),
        }
    }
}

/// A maximal piecewise-linear graph: vertex list plus end rays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub vertices: Vec<[f64; 2]>,
    pub left: RaySpec,
    pub right: RaySpec,
}

impl GraphSpec {
    pub fn to_graph(&self) -> Result<Pl1dGraph> {
        let vertices = self.vertices.iter().map(|v| (v[0], v[1])).collect();
        Ok(Pl1dGraph::new(vertices, self.left.to_ray()?, self.right.to_ray()?)?)
    }

    pub fn from_graph(g: &Pl1dGraph) -> Result<Self> {
        let (Some(left), Some(right)) = (g.left_ray(), g.right_ray()) else {
            return Err(LabError::Config("only graphs with both end rays can be written".into()));
        };
        if !g.gaps().is_empty() {
            return Err(LabError::Config("graphs with gaps cannot be written".into()));
        }
        Ok(GraphSpec {
            vertices: g.vertices().iter().map(|&(x, y)| [x, y]).collect(),
            left: RaySpec::from_ray(left),
            right: RaySpec::from_ray(right),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedGraph {
    pub prob: f64,
    #[serde(flatten)]
    pub graph: GraphSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Quadratic {
        q: LawSpec,
        b: LawSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shape: Option<Vec<Vec<f64>>>,
    },
    ScaledL1 {
        scale: LawSpec,
        center: LawSpec,
    },
    Pl1dMixture {
        graphs: Vec<WeightedGraph>,
    },
    AffineSkew {
        sym: Vec<Vec<f64>>,
        skew: LawSpec,
        b: LawSpec,
    },
    PhelpsGallery,
}

fn matrix_from_rows(rows: &[Vec<f64>], d: usize) -> Result<Matrix> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(LabError::Config(format!("matrix must be {d}x{d}")));
    }
    Ok(Matrix::from_fn(d, d, |i, j| rows[i][j]))
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub dim: usize,
    pub seed: u64,
    pub family: FamilySpec,
}

impl ModelSpec {
    pub fn build(&self) -> Result<RandomOperatorModel> {
        let d = self.dim;
        let family = match &self.family {
            FamilySpec::Quadratic { q, b, shape } => Family::Quadratic {
                q: q.to_law(),
                b: b.to_law(),
                shape: shape.as_ref().map(|s| matrix_from_rows(s, d)).transpose()?,
            },
            FamilySpec::ScaledL1 { scale, center } => {
                Family::ScaledL1 { scale: scale.to_law(), center: center.to_law() }
            }
            FamilySpec::Pl1dMixture { graphs } => Family::Pl1dMixture {
                table: graphs
                    .iter()
                    .map(|g| Ok((g.graph.to_graph()?, g.prob)))
                    .collect::<Result<Vec<_>>>()?,
            },
            FamilySpec::AffineSkew { sym, skew, b } => Family::AffineSkew {
                sym: matrix_from_rows(sym, d)?,
                skew: skew.to_law(),
                b: b.to_law(),
            },
            FamilySpec::PhelpsGallery => Family::PhelpsGallery,
        };
        RandomOperatorModel::new(family, d, self.seed).map_err(|e| LabError::Config(format!("model: {e}")))
    }
}

/// Serializable description of an operator handle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    Separable { graphs: Vec<GraphSpec> },
    Shifted { inner: Box<OperatorSpec>, shift: Vec<f64> },
    Scaled { inner: Box<OperatorSpec>, factor: f64 },
    WeightedSum { terms: Vec<WeightedOperator> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedOperator {
    pub weight: f64,
    pub operator: OperatorSpec,
}

impl OperatorSpec {
    pub fn from_handle(op: &OperatorHandle) -> Result<Self> {
        Ok(match op.kind() {
            OperatorKind::Affine { matrix, offset } => {
                OperatorSpec::Affine { matrix: matrix_rows(matrix), offset: offset.as_slice().to_vec() }
            }
            OperatorKind::Separable(graphs) => OperatorSpec::Separable {
                graphs: graphs.iter().map(GraphSpec::from_graph).collect::<Result<_>>()?,
            },
            OperatorKind::Shifted { inner, shift } => OperatorSpec::Shifted {
                inner: Box::new(OperatorSpec::from_handle(inner)?),
                shift: shift.as_slice().to_vec(),
            },
            OperatorKind::Scaled { inner, factor } => {
                OperatorSpec::Scaled { inner: Box::new(OperatorSpec::from_handle(inner)?), factor: *factor }
            }
            OperatorKind::WeightedSum(terms) => OperatorSpec::WeightedSum {
                terms: terms
                    .iter()
                    .map(|(w, op)| Ok(WeightedOperator { weight: *w, operator: OperatorSpec::from_handle(op)? }))
                    .collect::<Result<_>>()?,
            },
        })
    }

    pub fn to_handle(&self) -> Result<OperatorHandle> {
        Ok(match self {
            OperatorSpec::Affine { matrix, offset } => {
                OperatorHandle::affine(matrix_from_rows(matrix, offset.len())?, Point::new(offset.clone())?)?
            }
            OperatorSpec::Separable { graphs } => {
                OperatorHandle::separable(graphs.iter().map(GraphSpec::to_graph).collect::<Result<_>>()?)?
            }
            OperatorSpec::Shifted { inner, shift } => inner.to_handle()?.shift(&Point::new(shift.clone())?)?,
            OperatorSpec::Scaled { inner, factor } => inner.to_handle()?.scale(*factor)?,
            OperatorSpec::WeightedSum { terms } => OperatorHandle::weighted_sum(
                terms
                    .iter()
                    .map(|t| Ok((t.weight, t.operator.to_handle()?)))
                    .collect::<Result<_>>()?,
            )?,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub n_schedule: Vec<usize>,
    pub trials: usize,
    pub jobs: usize,
    pub max_failed_rows: usize,
    pub point: Option<Vec<f64>>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            n_schedule: vec![10, 30, 100, 300, 1000, 3000, 10000],
            trials: 20,
            jobs: 0,
            max_failed_rows: 0,
            point: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSpec {
    pub count: usize,
    pub half_width: f64,
    pub seed: u64,
    /// Explicit probe points; replaces the generated set when present.
    pub points: Option<Vec<Vec<f64>>>,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec {
            count: monolab_core::probe::DEFAULT_PROBE_COUNT,
            half_width: monolab_core::probe::DEFAULT_HALF_WIDTH,
            seed: 1,
            points: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub gamma: f64,
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let s = SolverSettings::default();
        SolverSpec { gamma: s.step, lambda: s.relaxation, tol: s.tol, max_iter: s.max_iter }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZerosSpec {
    /// Step of the proximal point iteration.
    pub step: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ZerosSpec {
    fn default() -> Self {
        ZerosSpec { step: 1.0, tol: 1e-8, max_iter: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksSpec {
    pub max_inversions: usize,
    pub final_ratio: f64,
    pub decay_ratio: f64,
    pub slope_band: Option<[f64; 2]>,
    pub inequality_tol: f64,
    pub cross_check_tol: f64,
}

impl Default for ChecksSpec {
    fn default() -> Self {
        ChecksSpec {
            max_inversions: 1,
            final_ratio: 0.05,
            decay_ratio: 0.1,
            slope_band: None,
            inequality_tol: 1e-7,
            cross_check_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub name: Option<String>,
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelSpec,
    #[serde(default)]
    pub experiment: ExperimentSpec,
    #[serde(default)]
    pub probes: ProbeSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub zeros: ZerosSpec,
    #[serde(default)]
    pub checks: ChecksSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config; `output.name` defaults to the file stem.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| LabError::ConfigRead { path: path.to_path_buf(), source })?;
        let mut config = Config::parse(&text)?;
        if config.output.name.is_none() {
            config.output.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        if e.n_schedule.is_empty() || e.n_schedule[0] == 0 {
            return Err(LabError::Config("n_schedule must be non-empty and start at 1 or more".into()));
        }
        if e.n_schedule.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::Config("n_schedule must be strictly increasing".into()));
        }
        if e.trials == 0 {
            return Err(LabError::Config("trials must be at least 1".into()));
        }
        if let Some(p) = &e.point {
            if p.len() != self.model.dim {
                return Err(LabError::Config(format!("point has {} coordinates, model has {}", p.len(), self.model.dim)));
            }
        }
        let z = &self.zeros;
        if !(z.step > 0.0 && z.step.is_finite()) || !(z.tol > 0.0) || z.max_iter == 0 {
            return Err(LabError::Config("zeros.step, zeros.tol and zeros.max_iter must be positive".into()));
        }
        self.settings().validate().map_err(|e| LabError::Config(format!("solver: {e}")))?;
        self.model.build()?;
        self.probe_set()?;
        Ok(())
    }

    pub fn model(&self) -> Result<RandomOperatorModel> {
        self.model.build()
    }

    pub fn settings(&self) -> SolverSettings {
        SolverSettings {
            step: self.solver.gamma,
            relaxation: self.solver.lambda,
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            record_history: false,
        }
    }

    pub fn probe_set(&self) -> Result<ProbeSet> {
        let p = &self.probes;
        let set = match &p.points {
            Some(points) => {
                let points = points.iter().map(|c| Point::new(c.clone())).collect::<monolab_core::Result<Vec<_>>>()?;
                if points.iter().any(|q| q.dim() != self.model.dim) {
                    return Err(LabError::Config("probe dimension differs from model dimension".into()));
                }
                ProbeSet::new(points)
            }
            None => ProbeSet::low_discrepancy(self.model.dim, p.count, p.half_width, p.seed),
        };
        set.map_err(|e| LabError::Config(format!("probes: {e}")))
    }

    pub fn point(&self) -> Result<Point> {
        let coords = self
            .experiment
            .point
            .clone()
            .ok_or_else(|| LabError::Config("experiment.point is required for this command".into()))?;
        Ok(Point::new(coords)?)
    }

    /// Output directory: the config value, else `$MONOLAB_OUT`, else `monolab-out`.
    pub fn output_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }

    pub fn output_name(&self) -> String {
        self.output.name.clone().unwrap_or_else(|| "experiment".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUADRATIC: &str = r#"
[model]
dim = 1
seed = 3

[model.family]
kind = "quadratic"
q = { table = [[1.0, 0.5], [3.0, 0.5]] }
b = { dirac = 0.0 }
"#;

    #[test]
    fn defaults_fill_in() {
        let c = Config::parse(QUADRATIC).unwrap();
        assert_eq!(c.experiment.trials, 20);
        assert_eq!(c.probes.count, 8);
        assert_eq!(c.settings(), SolverSettings::default());
        assert_eq!(Config::parse(&c.to_toml().unwrap()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_configs() {
        let unknown = QUADRATIC.replace("quadratic", "cubic");
        assert!(matches!(Config::parse(&unknown), Err(LabError::Config(_))));
        let schedule = format!("{QUADRATIC}\n[experiment]\nn_schedule = [10, 10]\n");
        assert!(Config::parse(&schedule).is_err());
        let negative = QUADRATIC.replace("[1.0, 0.5], [3.0, 0.5]", "[-1.0, 0.5], [3.0, 0.5]");
        assert!(Config::parse(&negative).is_err());
        let typo = format!("{QUADRATIC}\n[solver]\ntoll = 1e-3\n");
        assert!(Config::parse(&typo).is_err());
    }

    #[test]
    fn graph_literals() {
        let text = r#"
[model]
dim = 1
seed = 3

[model.family]
kind = "pl1d_mixture"
graphs = [
  { prob = 0.5, vertices = [[0.0, -1.0], [0.0, 1.0]], left = 1.0, right = 1.0 },
  { prob = 0.5, vertices = [[0.0, 0.0], [1.0, 0.0]], left = "vertical", right = "vertical" },
]
"#;
        let c = Config::parse(text).unwrap();
        let FamilySpec::Pl1dMixture { graphs } = &c.model.family else { panic!() };
        assert_eq!(graphs[1].graph.to_graph().unwrap(), Pl1dGraph::normal_cone(0.0, 1.0).unwrap());
        let bad = text.replace("\"vertical\", right", "\"sideways\", right");
        assert!(Config::parse(&bad).is_err());
    }
}
