//! TOML experiment configuration.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::laws::TestLaw;
use crate::levy::{AtomicMeasure, LevyMeasure, RadialMeasure, TailPolicy};
use crate::sampling::IncrementMode;
use crate::sde::Coupling;
use crate::wasserstein::MAX_POINTS;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CltRate,
    JumpCoupling,
    SdeConvergence,
    EdgeworthBuild,
    ProbeCramer,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::CltRate => "clt-rate",
            ExperimentKind::JumpCoupling => "jump-coupling",
            ExperimentKind::SdeConvergence => "sde-convergence",
            ExperimentKind::EdgeworthBuild => "edgeworth-build",
            ExperimentKind::ProbeCramer => "probe-cramer",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default)]
    pub clt: CltSection,
    #[serde(default)]
    pub measure: MeasureSection,
    #[serde(default)]
    pub jump: JumpSection,
    #[serde(default)]
    pub sde: SdeSection,
    #[serde(default)]
    pub build: BuildSection,
    #[serde(default)]
    pub probe: ProbeSection,
    /// Directory that relative paths inside the config are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Parameter sweeps. An omitted list takes the experiment's default; an
/// explicitly empty one is an error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    pub p: u32,
    pub n_samples: usize,
    pub replicates: usize,
    pub bootstrap: usize,
    pub confidence: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep { m: None, eps: None, h: None, p: 2, n_samples: 2000, replicates: 20, bootstrap: 1000, confidence: 0.95 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CltMode {
    Gaussian,
    Perturbed,
}

/// How the sample and reference clouds are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    Independent,
    /// Both clouds are quantile transforms of the same uniforms (1D only),
    /// so the sorted matching realizes the quantile coupling.
    CommonUniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CltSection {
    pub law: TestLaw,
    pub mode: CltMode,
    /// Defaults to common uniforms in 1D and independent clouds otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Pairing>,
    /// Moment order `n`; perturbed mode uses `n - 3` corrections.
    pub order: u32,
}

impl Default for CltSection {
    fn default() -> Self {
        CltSection { law: TestLaw::Exponential, mode: CltMode::Gaussian, pairing: None, order: 4 }
    }
}

impl CltSection {
    pub fn pairing(&self) -> Pairing {
        self.pairing.unwrap_or(if self.law.dim() == 1 { Pairing::CommonUniform } else { Pairing::Independent })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    StableLike,
    /// Log-log tabulated radial density.
    #[serde(rename = "custom-radial", alias = "tabulated")]
    Tabulated,
    Atoms,
    Null,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub z: Vec<f64>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureSection {
    pub kind: MeasureKind,
    pub q: usize,
    pub alpha: f64,
    pub tau: f64,
    /// `(radius, radial density)` pairs for the tabulated kind.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub knots: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<AtomSpec>,
}

impl Default for MeasureSection {
    fn default() -> Self {
        MeasureSection { kind: MeasureKind::StableLike, q: 2, alpha: 1.5, tau: 1.0, knots: Vec::new(), atoms: Vec::new() }
    }
}

impl MeasureSection {
    pub fn build(&self) -> Result<Arc<dyn LevyMeasure>> {
        Ok(match self.kind {
            MeasureKind::StableLike => Arc::new(RadialMeasure::stable_like(self.q, self.alpha, self.tau)?),
            MeasureKind::Tabulated => Arc::new(RadialMeasure::tabulated(self.q, &self.knots)?),
            MeasureKind::Atoms => Arc::new(AtomicMeasure::new(
                self.q,
                self.atoms.iter().map(|a| (a.z.clone(), a.weight)).collect(),
            )?),
            MeasureKind::Null => Arc::new(AtomicMeasure::null(self.q)),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JumpSection {
    /// Time horizon of `Z_t^ε`; `t = ε` when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    pub tail: TailPolicy,
    pub tolerance: f64,
    /// Also report the distance between two independent reference clouds.
    pub null_reference: bool,
}

impl Default for JumpSection {
    fn default() -> Self {
        JumpSection { t: None, depth: Some(4), tail: TailPolicy::Gaussian, tolerance: 1e-6, null_reference: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaKind {
    Zero,
    Constant,
    InverseQuadratic,
    Trig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SdeSection {
    pub sigma: SigmaKind,
    /// `d × q` matrix for the constant kind.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_matrix: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<Vec<f64>>,
    /// `q × q1`; identity when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    pub horizon: f64,
    pub mode: IncrementMode,
    pub coupling: Coupling,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    pub tail: TailPolicy,
    pub fine_steps: usize,
}

impl Default for SdeSection {
    fn default() -> Self {
        SdeSection {
            sigma: SigmaKind::InverseQuadratic,
            sigma_matrix: None,
            drift: None,
            diffusion: None,
            x0: None,
            horizon: 1.0,
            mode: IncrementMode::Gaussianized,
            coupling: Coupling::Radial,
            depth: Some(3),
            tail: TailPolicy::Gaussian,
            fine_steps: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildSection {
    /// Cumulant file in the `a_1 … a_q value` line format.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cumulants: Option<PathBuf>,
    /// Inline alternative to `cumulants`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cumulants_text: Option<String>,
    /// Number of correction levels.
    pub order: usize,
    /// Expansion parameter of the moment-match report, as a rational.
    pub moment_eps: String,
}

impl Default for BuildSection {
    fn default() -> Self {
        BuildSection { cumulants: None, cumulants_text: None, order: 1, moment_eps: "1/2".into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSection {
    pub annuli: Vec<i32>,
    pub rho: f64,
    pub rho_max: f64,
    pub points: usize,
    pub directions: usize,
    pub cells: usize,
    pub trials: usize,
    pub a: f64,
    pub b: f64,
}

impl Default for ProbeSection {
    fn default() -> Self {
        ProbeSection {
            annuli: vec![2, 4, 6, 8],
            rho: 1.0,
            rho_max: 32.0,
            points: 64,
            directions: 4,
            cells: 64,
            trials: 200,
            a: 0.5,
            b: 0.05,
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn non_empty<T: Clone>(list: &Option<Vec<T>>, default: &[T], name: &str) -> Result<Vec<T>> {
    match list {
        None => Ok(default.to_vec()),
        Some(v) if v.is_empty() => Err(config_err(format!("sweep `{name}` must not be empty"))),
        Some(v) => Ok(v.clone()),
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| config_err(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Canonical TOML of everything that affects results (the output path
    /// is excluded).
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        toml::to_string(&c).expect("config serializes")
    }

    pub fn m_values(&self) -> Result<Vec<u64>> {
        non_empty(&self.sweep.m, &[16, 64, 256, 1024], "m")
    }

    pub fn eps_values(&self) -> Result<Vec<f64>> {
        non_empty(&self.sweep.eps, &[0.125, 0.0625, 0.03125, 0.015625], "eps")
    }

    pub fn h_values(&self) -> Result<Vec<f64>> {
        non_empty(&self.sweep.h, &[0.0625, 0.03125, 0.015625, 0.0078125], "h")
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.sweep;
        if s.p == 0 || !s.p.is_multiple_of(2) {
            return Err(config_err(format!("p = {} must be a positive even integer", s.p)));
        }
        if s.replicates == 0 || s.n_samples == 0 {
            return Err(config_err("replicates and n_samples must be positive"));
        }
        if !(s.confidence > 0.0 && s.confidence < 1.0) {
            return Err(config_err("confidence must lie in (0, 1)"));
        }
        match self.experiment {
            ExperimentKind::CltRate => {
                self.clt.law.check_cramer()?;
                let m = self.m_values()?;
                if m.contains(&0) {
                    return Err(config_err("m values must be positive"));
                }
                let dim = self.clt.law.dim();
                if self.clt.pairing() == Pairing::CommonUniform && !self.clt.law.has_quantile() {
                    return Err(config_err(format!("common-uniform pairing needs a 1D law with a quantile, not {dim}D")));
                }
                if dim > 1 && s.n_samples > MAX_POINTS {
                    return Err(config_err(format!("n_samples {} exceeds the assignment cap {MAX_POINTS}", s.n_samples)));
                }
                if self.clt.mode == CltMode::Perturbed && self.clt.order < 3 {
                    return Err(config_err("perturbed mode needs order >= 3"));
                }
            }
            ExperimentKind::JumpCoupling => {
                let eps = self.eps_values()?;
                if eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
                    return Err(config_err("eps values must lie in (0, 1)"));
                }
                if self.measure.q > 1 && s.n_samples > MAX_POINTS {
                    return Err(config_err(format!("n_samples {} exceeds the assignment cap {MAX_POINTS}", s.n_samples)));
                }
                if self.jump.t.is_some_and(|t| !(t > 0.0)) {
                    return Err(config_err("t must be positive"));
                }
            }
            ExperimentKind::SdeConvergence => {
                let h = self.h_values()?;
                if h.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
                    return Err(config_err("h values must lie in (0, 1)"));
                }
                if s.replicates < 2 || s.replicates > MAX_POINTS {
                    return Err(config_err(format!("replicates (batch size) must lie in 2..={MAX_POINTS}")));
                }
                if self.sde.sigma == SigmaKind::Constant && self.sde.sigma_matrix.is_none() {
                    return Err(config_err("constant sigma needs sigma_matrix"));
                }
            }
            ExperimentKind::EdgeworthBuild => {
                if self.build.cumulants.is_some() == self.build.cumulants_text.is_some() {
                    return Err(config_err("give exactly one of build.cumulants and build.cumulants_text"));
                }
                if self.build.order == 0 {
                    return Err(config_err("build.order must be positive"));
                }
            }
            ExperimentKind::ProbeCramer => {
                let p = &self.probe;
                if p.annuli.is_empty() {
                    return Err(config_err("probe.annuli must not be empty"));
                }
                if p.points == 0 || p.directions == 0 || !(p.rho > 0.0 && p.rho_max >= p.rho) {
                    return Err(config_err("probe grid needs points, directions > 0 and 0 < rho <= rho_max"));
                }
            }
        }
        Ok(())
    }
}
