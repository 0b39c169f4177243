//! Experiment configuration read from TOML.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cocycle::{CocycleSpec, Scheme};
use crate::driving::{Base, OrbitSequence, RotationBase};
use crate::error::{Error, Result};
use crate::fourier::{DEFAULT_MODES, DEFAULT_QUAD_TOL};
use crate::maps::MapFamily;
use crate::sobolev::SobolevParams;

/// The experiments the driver can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ReproduceFigure,
    UlamSweep,
    FourierSweep,
    ConvolutionStudy,
    StaticStudy,
    Lyapunov,
    ValidateMap,
    NormsLab,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::ReproduceFigure,
        Experiment::UlamSweep,
        Experiment::FourierSweep,
        Experiment::ConvolutionStudy,
        Experiment::StaticStudy,
        Experiment::Lyapunov,
        Experiment::ValidateMap,
        Experiment::NormsLab,
    ];

    pub const NAMES: [&'static str; 8] = [
        "reproduce-figure",
        "ulam-sweep",
        "fourier-sweep",
        "convolution-study",
        "static-study",
        "lyapunov",
        "validate-map",
        "norms-lab",
    ];

    pub fn name(&self) -> &'static str {
        Self::NAMES[Self::ALL.iter().position(|e| e == self).expect("listed")]
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::NAMES
            .iter()
            .position(|n| *n == s)
            .map(|i| Self::ALL[i])
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    /// `example`, `doubling`, `identity`, `rotation` or `custom`.
    pub name: String,
    /// Translation `T_ω + ρ` applied on top of the family.
    pub rho: f64,
    /// Rotation angle for `rotation`.
    pub beta: f64,
    /// Branch endpoints for `custom`, first in `[0, 1)`, last equal to first + 1.
    pub breakpoints: Vec<f64>,
    /// Per-branch polynomial coefficients in the local coordinate, lowest degree first.
    pub coefficients: Vec<Vec<f64>>,
    pub gamma: f64,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self {
            name: "example".into(),
            rho: 0.0,
            beta: 0.0,
            breakpoints: Vec::new(),
            coefficients: Vec::new(),
            gamma: 1.0,
        }
    }
}

impl FamilyConfig {
    pub fn family(&self) -> Result<MapFamily> {
        let base = match self.name.as_str() {
            "example" => MapFamily::Example,
            "doubling" => MapFamily::Doubling,
            "identity" => MapFamily::Identity,
            "rotation" => MapFamily::Rotation { beta: self.beta },
            "custom" => MapFamily::CustomPolynomial {
                breakpoints: self.breakpoints.clone(),
                coefficients: self.coefficients.clone(),
                gamma: self.gamma,
            },
            other => return Err(Error::Config(format!("unknown map family {other:?}"))),
        };
        if !self.rho.is_finite() {
            return Err(Error::Config(format!("family.rho = {} is not finite", self.rho)));
        }
        Ok(if self.rho != 0.0 { base.translated(self.rho) } else { base })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaseConfig {
    pub alpha: f64,
    pub omega0: f64,
    /// Optional file of fiber values replacing the rotation orbit.
    pub orbit_file: Option<PathBuf>,
}

impl Default for BaseConfig {
    fn default() -> Self {
        Self {
            alpha: RotationBase::default().alpha,
            omega0: 0.0,
            orbit_file: None,
        }
    }
}

impl BaseConfig {
    pub fn base(&self) -> Result<Base> {
        match &self.orbit_file {
            Some(path) => Ok(Base::Sequence(OrbitSequence::from_file(path)?)),
            None => {
                if !self.alpha.is_finite() {
                    return Err(Error::Config(format!("base.alpha = {} is not finite", self.alpha)));
                }
                Ok(Base::Rotation(RotationBase::new(self.alpha, 0.0)))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeConfig {
    pub ulam_k: usize,
    pub test_points: usize,
    /// Use exact preimage lengths instead of test points.
    pub exact: bool,
    /// Galerkin modes `K`; 0 disables the Galerkin part of `reproduce-figure`.
    pub modes: usize,
    pub quad_tol: f64,
    /// Burn-in: the first recorded step.
    pub steps: usize,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            ulam_k: 1000,
            test_points: 1000,
            exact: false,
            modes: DEFAULT_MODES,
            quad_tol: DEFAULT_QUAD_TOL,
            steps: 20,
        }
    }
}

impl SchemeConfig {
    pub fn ulam(&self) -> Scheme {
        if self.exact {
            Scheme::UlamExact { k: self.ulam_k }
        } else {
            Scheme::Ulam {
                k: self.ulam_k,
                q: self.test_points,
            }
        }
    }

    pub fn galerkin_cesaro(&self) -> Scheme {
        Scheme::GalerkinCesaro {
            modes: self.modes,
            tol: self.quad_tol,
        }
    }

    pub fn galerkin_plain(&self) -> Scheme {
        Scheme::GalerkinPlain {
            modes: self.modes,
            tol: self.quad_tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SobolevConfig {
    pub p: f64,
    pub t: f64,
    pub t_weak: f64,
    pub grid_n: usize,
}

impl Default for SobolevConfig {
    fn default() -> Self {
        let d = SobolevParams::default();
        Self {
            p: d.p,
            t: d.t,
            t_weak: d.t_weak,
            grid_n: 4096,
        }
    }
}

impl SobolevConfig {
    pub fn params(&self) -> Result<SobolevParams> {
        SobolevParams::new(self.p, self.t, self.t_weak)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub ks: Vec<usize>,
    pub reference_k: usize,
    pub mode_list: Vec<usize>,
    pub fejer_orders: Vec<usize>,
    pub rhos: Vec<f64>,
    pub lyapunov_steps: usize,
    pub trials: usize,
    pub renorm_every: usize,
    pub cross_scheme_threshold: f64,
    pub stationarity_steps: usize,
    pub stationarity_threshold: f64,
    pub validate_fibers: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            ks: vec![125, 250, 500],
            reference_k: 1000,
            mode_list: vec![12, 25, 50, 100],
            fejer_orders: vec![8, 16, 32, 64, 128],
            rhos: vec![1e-1, 1e-2, 1e-3, 1e-4],
            lyapunov_steps: 200,
            trials: 10,
            renorm_every: 10,
            cross_scheme_threshold: 0.2,
            stationarity_steps: 25,
            stationarity_threshold: 1e-3,
            validate_fibers: 16,
        }
    }
}

/// Fully resolved configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub plot: bool,
    pub family: FamilyConfig,
    pub base: BaseConfig,
    pub scheme: SchemeConfig,
    pub sobolev: SobolevConfig,
    pub study: StudyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::ReproduceFigure,
            seed: 0,
            output_dir: PathBuf::from("out"),
            plot: false,
            family: FamilyConfig::default(),
            base: BaseConfig::default(),
            scheme: SchemeConfig::default(),
            sobolev: SobolevConfig::default(),
            study: StudyConfig::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub experiment: Option<Experiment>,
    pub output_dir: Option<PathBuf>,
    pub k: Option<usize>,
    pub modes: Option<usize>,
    pub steps: Option<usize>,
    pub plot: bool,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(e) = o.experiment {
            self.experiment = e;
        }
        if let Some(d) = &o.output_dir {
            self.output_dir = d.clone();
        }
        if let Some(k) = o.k {
            self.scheme.ulam_k = k;
        }
        if let Some(m) = o.modes {
            self.scheme.modes = m;
        }
        if let Some(s) = o.steps {
            self.scheme.steps = s;
        }
        if o.plot {
            self.plot = true;
        }
    }

    pub fn map_family(&self) -> Result<MapFamily> {
        self.family.family()
    }

    /// Cocycle of the configured family and base with the given scheme and length.
    pub fn cocycle(&self, scheme: Scheme, steps: usize) -> Result<CocycleSpec> {
        CocycleSpec::new(self.map_family()?, self.base.base()?, scheme, steps, self.base.omega0)
    }

    /// Check every block before any computation starts.
    pub fn validate(&self) -> Result<()> {
        let family = self.map_family()?;
        family.at(self.base.omega0)?;
        self.base.base()?;
        self.sobolev.params()?;
        if self.sobolev.grid_n < 2 {
            return Err(Error::Config("sobolev.grid_n must be at least 2".into()));
        }
        if self.scheme.steps < 1 {
            return Err(Error::Config("scheme.steps must be at least 1".into()));
        }
        self.scheme.ulam().validate()?;
        if self.scheme.modes > 0 {
            self.scheme.galerkin_cesaro().validate()?;
        }
        let st = &self.study;
        if st.trials < 5 {
            return Err(Error::Config("study.trials must be at least 5".into()));
        }
        if st.lyapunov_steps < 100 {
            return Err(Error::Config("study.lyapunov_steps must be at least 100".into()));
        }
        if st.renorm_every < 1 {
            return Err(Error::Config("study.renorm_every must be at least 1".into()));
        }
        if !(st.cross_scheme_threshold > 0.0) || !(st.stationarity_threshold > 0.0) {
            return Err(Error::Config("study thresholds must be positive".into()));
        }
        if st.mode_list.contains(&0) || st.ks.contains(&0) {
            return Err(Error::Config("resolutions must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(c, back);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn partial_file_uses_defaults() {
        let c = ExperimentConfig::from_toml("experiment = \"lyapunov\"\n[scheme]\nulam_k = 500\n").unwrap();
        assert_eq!(c.experiment, Experiment::Lyapunov);
        assert_eq!(c.scheme.ulam_k, 500);
        assert_eq!(c.scheme.test_points, 1000);
        assert_eq!(c.study.ks, vec![125, 250, 500]);
    }

    #[test]
    fn bad_input_rejected() {
        assert!(ExperimentConfig::from_toml("experiment = \"nope\"").is_err());
        assert!(ExperimentConfig::from_toml("[scheme]\nbogus = 1").is_err());
        let mut c = ExperimentConfig::default();
        c.sobolev.t = 0.7;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.family.name = "tent".into();
        assert!(c.validate().is_err());
    }

    #[test]
    fn overrides_take_precedence() {
        let mut c = ExperimentConfig::default();
        c.apply(&Overrides {
            k: Some(64),
            steps: Some(3),
            plot: true,
            ..Default::default()
        });
        assert_eq!((c.scheme.ulam_k, c.scheme.steps, c.plot), (64, 3, true));
    }

    #[test]
    fn experiment_names() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
    }
}
