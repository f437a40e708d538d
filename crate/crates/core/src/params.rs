//! Model parameters, validation, config parsing and momentum grids.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Open => f.write_str("open"),
            Boundary::Periodic => f.write_str("periodic"),
        }
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "open" | "obc" => Ok(Boundary::Open),
            "periodic" | "pbc" => Ok(Boundary::Periodic),
            other => Err(Error::invalid(
                "boundary",
                format!("unknown boundary `{other}`"),
            )),
        }
    }
}

/// Couplings of the two-chain ladder.
///
/// `omega_a` is the splitting of the free-spin chain A, `omega_b` the
/// splitting of the XY chain B with exchange `j`. `g` and `phi` set the
/// strength and angle of the interchain coupling; `n` is the number of sites
/// per chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    #[serde(rename = "omega0")]
    pub omega_a: f64,
    #[serde(rename = "Omega0")]
    pub omega_b: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub g: f64,
    pub phi: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub boundary: Boundary,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            omega_a: 2.5,
            omega_b: 2.5,
            j: 1.0,
            g: 1.0,
            phi: 0.0,
            n: 8,
            boundary: Boundary::Open,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamWarning {
    /// Chain B is gapless (or soft) without coupling.
    GaplessChainB {
        omega_b: f64,
    },
    NonPositiveSplitting {
        omega_a: f64,
    },
}

impl fmt::Display for ParamWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamWarning::GaplessChainB { omega_b } => {
                write!(f, "Omega0 = {omega_b} <= 2J: decoupled chain B is gapless")
            }
            ParamWarning::NonPositiveSplitting { omega_a } => {
                write!(
                    f,
                    "omega0 = {omega_a} <= 0: decoupled chain A is not gapped"
                )
            }
        }
    }
}

/// Parameters that passed [`ModelParams::validate`], expressed in units of J.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedParams {
    params: ModelParams,
    pub warnings: Vec<ParamWarning>,
}

impl ValidatedParams {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn into_inner(self) -> ModelParams {
        self.params
    }
}

impl std::ops::Deref for ValidatedParams {
    type Target = ModelParams;

    fn deref(&self) -> &ModelParams {
        &self.params
    }
}

impl ModelParams {
    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_j(mut self, j: f64) -> Self {
        self.j = j;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// Checks the parameter invariants and rescales energies so that J = 1.
    pub fn validate(&self) -> Result<ValidatedParams> {
        for (name, v) in [
            ("omega0", self.omega_a),
            ("Omega0", self.omega_b),
            ("J", self.j),
            ("g", self.g),
            ("phi", self.phi),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("{v} is not finite")));
            }
        }
        if !(0.0..=FRAC_PI_2).contains(&self.phi) {
            return Err(Error::invalid(
                "phi",
                format!("{} outside [0, pi/2]", self.phi),
            ));
        }
        if self.j <= 0.0 {
            return Err(Error::invalid("J", format!("{} must be positive", self.j)));
        }
        if self.g < 0.0 {
            return Err(Error::invalid(
                "g",
                format!("{} must be non-negative", self.g),
            ));
        }
        if self.n < 2 {
            return Err(Error::invalid(
                "N",
                format!("{} sites per chain, need at least 2", self.n),
            ));
        }

        let j = self.j;
        let params = ModelParams {
            omega_a: self.omega_a / j,
            omega_b: self.omega_b / j,
            j: 1.0,
            g: self.g / j,
            ..*self
        };

        let mut warnings = Vec::new();
        if params.omega_b <= 2.0 {
            warnings.push(ParamWarning::GaplessChainB {
                omega_b: params.omega_b,
            });
        }
        if params.omega_a <= 0.0 {
            warnings.push(ParamWarning::NonPositiveSplitting {
                omega_a: params.omega_a,
            });
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(ValidatedParams { params, warnings })
    }

    /// Applies one `key = value` assignment using the config key names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let value = value.trim();
        let float = |name: &'static str| -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|e| Error::invalid(name, format!("`{value}`: {e}")))
        };
        match key {
            "omega0" => self.omega_a = float("omega0")?,
            "Omega0" => self.omega_b = float("Omega0")?,
            "J" => self.j = float("J")?,
            "g" => self.g = float("g")?,
            "phi" => self.phi = float("phi")?,
            "N" => {
                self.n = value
                    .parse()
                    .map_err(|e| Error::invalid("N", format!("`{value}`: {e}")))?
            }
            "boundary" => self.boundary = value.parse()?,
            other => return Err(Error::invalid("config", format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines on top of the defaults. `#` starts a comment.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut p = ModelParams::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: i + 1,
                reason: format!("expected `key = value`, got `{line}`"),
            })?;
            p.set(key, value).map_err(|e| Error::Config {
                line: i + 1,
                reason: e.to_string(),
            })?;
        }
        Ok(p)
    }

    pub fn from_config_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_config_str(&text)
    }

    /// Config-file text; parses back to an identical record.
    pub fn to_config_string(&self) -> String {
        format!(
            "omega0 = {:?}\nOmega0 = {:?}\nJ = {:?}\ng = {:?}\nphi = {:?}\nN = {}\nboundary = {}\n",
            self.omega_a, self.omega_b, self.j, self.g, self.phi, self.n, self.boundary
        )
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_config_string())
    }
}

impl FromStr for ModelParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_config_str(s)
    }
}

/// Evenly spaced momenta in (-pi, pi], ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    pub points: Vec<f64>,
}

impl MomentumGrid {
    /// The `count` momenta 2 pi m / count in (-pi, pi]. For the lattice ring
    /// these are exactly the allowed momenta; used with a large count it is
    /// the dense scan grid, which always contains k = 0 and, for even counts,
    /// k = pi.
    pub fn uniform(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::invalid(
                "N",
                format!("grid needs at least 2 points, got {count}"),
            ));
        }
        let lo = -((count as i64 - 1) / 2);
        let hi = count as i64 / 2;
        let points = (lo..=hi)
            .map(|m| {
                if 2 * m == count as i64 {
                    PI
                } else {
                    2.0 * PI * m as f64 / count as f64
                }
            })
            .collect();
        Ok(MomentumGrid { points })
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub const DEFAULT_SCAN_POINTS: usize = 2048;

/// Allowed momenta for a ring of `n` sites, or the default dense scan grid for
/// open chains.
pub fn momentum_grid(n: usize, boundary: Boundary) -> Result<MomentumGrid> {
    if n < 2 {
        return Err(Error::invalid(
            "N",
            format!("{n} sites per chain, need at least 2"),
        ));
    }
    match boundary {
        Boundary::Periodic => MomentumGrid::uniform(n),
        Boundary::Open => MomentumGrid::uniform(DEFAULT_SCAN_POINTS),
    }
}

/// Standing-wave momenta pi m / (n + 1), m = 1..n, of an open hopping chain.
pub fn open_chain_momenta(n: usize) -> Vec<f64> {
    (1..=n).map(|m| PI * m as f64 / (n + 1) as f64).collect()
}
