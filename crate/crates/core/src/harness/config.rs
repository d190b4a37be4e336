use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catmap::{CoupledSpec, MapSpec, DEFAULT_K, DEFAULT_KC, DEFAULT_N};
use crate::error::{Error, Result};
use crate::hilbert::HilbertDim;
use crate::states::PhasePoint;

/// Largest per-DOF dimension the harness accepts.
pub const MAX_SCENARIO_N: usize = 128;
pub const DEFAULT_T_MAX: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Dynamics {
    /// Elliptic ⊗ elliptic.
    Ee,
    /// Hyperbolic first DOF, elliptic second.
    He,
    /// Hyperbolic ⊗ hyperbolic.
    Hh,
}

impl Dynamics {
    pub fn specs(self, k: f64) -> (MapSpec, MapSpec) {
        match self {
            Dynamics::Ee => (MapSpec::elliptic(k), MapSpec::elliptic(k)),
            Dynamics::He => (MapSpec::hyperbolic(k), MapSpec::elliptic(k)),
            Dynamics::Hh => (MapSpec::hyperbolic(k), MapSpec::hyperbolic(k)),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dynamics::Ee => "ee",
            Dynamics::He => "he",
            Dynamics::Hh => "hh",
        }
    }
}

/// Second operator of the OTOC column(s).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OtocB {
    P2d,
    Rho0,
    Both,
}

impl OtocB {
    pub fn wants_p2d(self) -> bool {
        matches!(self, OtocB::P2d | OtocB::Both)
    }

    pub fn wants_rho0(self) -> bool {
        matches!(self, OtocB::Rho0 | OtocB::Both)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OtocB::P2d => "p2d",
            OtocB::Rho0 => "rho0",
            OtocB::Both => "both",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Entropies,
    Otocs,
    Correlators,
    WignerDump,
    SchmidtSpectrum,
}

impl OutputKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputKind::Entropies => "entropies",
            OutputKind::Otocs => "otocs",
            OutputKind::Correlators => "correlators",
            OutputKind::WignerDump => "wigner_dump",
            OutputKind::SchmidtSpectrum => "schmidt_spectrum",
        }
    }
}

/// Fully resolved scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub dynamics: Dynamics,
    pub n: HilbertDim,
    pub k: f64,
    pub kc: f64,
    pub center1: PhasePoint,
    pub center2: PhasePoint,
    pub t_max: usize,
    pub otoc_b: OtocB,
    /// Sorted, deduplicated.
    pub outputs: Vec<OutputKind>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            dynamics: Dynamics::Hh,
            n: HilbertDim::new(DEFAULT_N).expect("default dimension is valid"),
            k: DEFAULT_K,
            kc: DEFAULT_KC,
            center1: PhasePoint::new(0.5, 0.5),
            center2: PhasePoint::new(0.5, 0.5),
            t_max: DEFAULT_T_MAX,
            otoc_b: OtocB::Both,
            outputs: vec![OutputKind::Entropies, OutputKind::Otocs, OutputKind::Correlators],
        }
    }
}

/// Partial configuration: every field optional, unknown keys rejected.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub dynamics: Option<Dynamics>,
    pub n: Option<usize>,
    pub k: Option<f64>,
    pub kc: Option<f64>,
    pub center1: Option<String>,
    pub center2: Option<String>,
    pub t_max: Option<usize>,
    pub otoc_b: Option<OtocB>,
    pub outputs: Option<Vec<OutputKind>>,
}

impl ConfigOverrides {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// `other` wins wherever it is set.
    pub fn merged_with(&self, other: &ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            dynamics: other.dynamics.or(self.dynamics),
            n: other.n.or(self.n),
            k: other.k.or(self.k),
            kc: other.kc.or(self.kc),
            center1: other.center1.clone().or_else(|| self.center1.clone()),
            center2: other.center2.clone().or_else(|| self.center2.clone()),
            t_max: other.t_max.or(self.t_max),
            otoc_b: other.otoc_b.or(self.otoc_b),
            outputs: other.outputs.clone().or_else(|| self.outputs.clone()),
        }
    }

    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let base = ScenarioConfig::default();
        let mut outputs = self.outputs.clone().unwrap_or(base.outputs);
        outputs.sort();
        outputs.dedup();
        let cfg = ScenarioConfig {
            dynamics: self.dynamics.unwrap_or(base.dynamics),
            n: match self.n {
                Some(n) => HilbertDim::new(n).map_err(|e| Error::Config(e.to_string()))?,
                None => base.n,
            },
            k: self.k.unwrap_or(base.k),
            kc: self.kc.unwrap_or(base.kc),
            center1: parse_center(self.center1.as_deref(), base.center1)?,
            center2: parse_center(self.center2.as_deref(), base.center2)?,
            t_max: self.t_max.unwrap_or(base.t_max),
            otoc_b: self.otoc_b.unwrap_or(base.otoc_b),
            outputs,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_center(s: Option<&str>, default: PhasePoint) -> Result<PhasePoint> {
    match s {
        Some(s) => PhasePoint::from_str(s),
        None => Ok(default),
    }
}

impl ScenarioConfig {
    /// The scenario with the canonical parameters and both centers at `center`.
    pub fn canonical(dynamics: Dynamics, center: PhasePoint) -> Self {
        ScenarioConfig {
            dynamics,
            center1: center,
            center2: center,
            ..ScenarioConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.get() > MAX_SCENARIO_N {
            return Err(Error::Config(format!(
                "n = {} exceeds the harness maximum {MAX_SCENARIO_N}",
                self.n.get()
            )));
        }
        if !self.k.is_finite() || !self.kc.is_finite() {
            return Err(Error::Config("kick strengths must be finite".into()));
        }
        if self.t_max == 0 {
            return Err(Error::Config("t_max must be at least 1".into()));
        }
        Ok(())
    }

    pub fn coupled_spec(&self) -> Result<CoupledSpec> {
        let (s1, s2) = self.dynamics.specs(self.k);
        CoupledSpec::new(s1, s2, self.kc, self.n)
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }

    /// Echo of every resolved field, parseable by [`ConfigOverrides::from_toml_str`].
    pub fn to_toml(&self) -> String {
        let outputs: Vec<String> = self.outputs.iter().map(|o| format!("\"{}\"", o.as_str())).collect();
        format!(
            "dynamics = \"{}\"\nn = {}\nk = {:?}\nkc = {:?}\ncenter1 = \"{:?},{:?}\"\ncenter2 = \"{:?},{:?}\"\nt_max = {}\notoc_b = \"{}\"\noutputs = [{}]\n",
            self.dynamics.as_str(),
            self.n.get(),
            self.k,
            self.kc,
            self.center1.q(),
            self.center1.p(),
            self.center2.q(),
            self.center2.p(),
            self.t_max,
            self.otoc_b.as_str(),
            outputs.join(", ")
        )
    }
}

impl fmt::Display for ScenarioConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} K={} Kc={} centers=({}) ({}) t_max={}",
            self.dynamics.as_str(),
            self.n.get(),
            self.k,
            self.kc,
            self.center1,
            self.center2,
            self.t_max
        )
    }
}

/// `(pi/4, pi/4)` read as literal torus coordinates.
pub fn quarter_pi_center() -> PhasePoint {
    PhasePoint::new(FRAC_PI_4, FRAC_PI_4)
}

/// Sweep document: a list of `[[config]]` override tables.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    #[serde(default)]
    pub config: Vec<ConfigOverrides>,
}

impl SweepFile {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }
}
