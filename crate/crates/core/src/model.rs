//! Network parameters, unit conversions and derived quantities.
//!
//! Everything inside the library works in linear units. Decibel values are
//! accepted only through [`from_decibels`] and the `*_db` setters/config keys.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameter `{name}` = {value} violates {constraint}")]
    Invalid {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("config key `{0}` given both in linear and dB form")]
    DuplicateKey(&'static str),
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed config {path}: {message}")]
    Parse { path: String, message: String },
}

/// Converts a decibel value to linear scale.
pub fn from_decibels(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn to_decibels(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Physical and system parameters of the bipolar network seen from the
/// typical receiver. Immutable once built; use [`NetworkParams::to_builder`]
/// to derive a modified copy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetworkParams {
    lambda: f64,
    p_t: f64,
    d0: f64,
    alpha: f64,
    theta: f64,
    sigma2: f64,
    sigma2_c: f64,
    v: f64,
    zeta: f64,
}

impl Default for NetworkParams {
    /// λ = 1e-3, P_t = 50 dB, d0 = 10 m, θ = −5 dB, σ² = σ_C² = 1, v = 0.5,
    /// ζ = 1, α = 4.
    fn default() -> Self {
        NetworkParams {
            lambda: 1e-3,
            p_t: from_decibels(50.0),
            d0: 10.0,
            alpha: 4.0,
            theta: from_decibels(-5.0),
            sigma2: 1.0,
            sigma2_c: 1.0,
            v: 0.5,
            zeta: 1.0,
        }
    }
}

impl NetworkParams {
    pub fn builder() -> NetworkParamsBuilder {
        NetworkParamsBuilder {
            params: NetworkParams::default(),
        }
    }

    pub fn to_builder(&self) -> NetworkParamsBuilder {
        NetworkParamsBuilder { params: *self }
    }

    /// Transmitter density (nodes per unit area).
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    /// Transmit power, linear.
    pub fn p_t(&self) -> f64 {
        self.p_t
    }
    /// Link distance between the typical receiver and its transmitter.
    pub fn d0(&self) -> f64 {
        self.d0
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// SINR decoding threshold, linear.
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
    pub fn sigma2_c(&self) -> f64 {
        self.sigma2_c
    }
    /// Power-splitting ratio: fraction of received power sent to the decoder.
    pub fn v(&self) -> f64 {
        self.v
    }
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Path loss of the useful link, `1 + d0^α`.
    pub fn tau(&self) -> f64 {
        1.0 + self.d0.powf(self.alpha)
    }

    /// Effective noise seen after the power splitter, normalised by `v`:
    /// `σ² + σ_C²/v`.
    pub fn effective_noise(&self) -> f64 {
        self.sigma2 + self.sigma2_c / self.v
    }

    /// Copy with a different split ratio.
    pub fn with_v(&self, v: f64) -> Result<NetworkParams, ModelError> {
        self.to_builder().v(v).build()
    }

    fn validate(&self) -> Result<(), ModelError> {
        fn check(
            name: &'static str,
            value: f64,
            ok: bool,
            constraint: &'static str,
        ) -> Result<(), ModelError> {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(ModelError::Invalid {
                    name,
                    value,
                    constraint,
                })
            }
        }
        check("lambda", self.lambda, self.lambda >= 0.0, "lambda >= 0")?;
        check("p_t", self.p_t, self.p_t > 0.0, "p_t > 0")?;
        check("d0", self.d0, self.d0 > 0.0, "d0 > 0")?;
        check("alpha", self.alpha, self.alpha > 2.0, "alpha > 2")?;
        check("theta", self.theta, self.theta > 0.0, "theta > 0")?;
        check("sigma2", self.sigma2, self.sigma2 >= 0.0, "sigma2 >= 0")?;
        check(
            "sigma2_c",
            self.sigma2_c,
            self.sigma2_c >= 0.0,
            "sigma2_c >= 0",
        )?;
        check("v", self.v, self.v > 0.0 && self.v <= 1.0, "0 < v <= 1")?;
        check(
            "zeta",
            self.zeta,
            self.zeta > 0.0 && self.zeta <= 1.0,
            "0 < zeta <= 1",
        )?;
        Ok(())
    }
}

/// Validating builder for [`NetworkParams`]. Starts from the defaults.
#[derive(Debug, Clone, Copy)]
pub struct NetworkParamsBuilder {
    params: NetworkParams,
}

impl NetworkParamsBuilder {
    pub fn lambda(mut self, lambda: f64) -> Self {
        self.params.lambda = lambda;
        self
    }
    pub fn p_t(mut self, p_t: f64) -> Self {
        self.params.p_t = p_t;
        self
    }
    pub fn p_t_db(self, p_t_db: f64) -> Self {
        self.p_t(from_decibels(p_t_db))
    }
    pub fn d0(mut self, d0: f64) -> Self {
        self.params.d0 = d0;
        self
    }
    pub fn alpha(mut self, alpha: f64) -> Self {
        self.params.alpha = alpha;
        self
    }
    pub fn theta(mut self, theta: f64) -> Self {
        self.params.theta = theta;
        self
    }
    pub fn theta_db(self, theta_db: f64) -> Self {
        self.theta(from_decibels(theta_db))
    }
    pub fn sigma2(mut self, sigma2: f64) -> Self {
        self.params.sigma2 = sigma2;
        self
    }
    pub fn sigma2_c(mut self, sigma2_c: f64) -> Self {
        self.params.sigma2_c = sigma2_c;
        self
    }
    pub fn v(mut self, v: f64) -> Self {
        self.params.v = v;
        self
    }
    pub fn zeta(mut self, zeta: f64) -> Self {
        self.params.zeta = zeta;
        self
    }

    pub fn build(self) -> Result<NetworkParams, ModelError> {
        self.params.validate()?;
        Ok(self.params)
    }
}

/// Interferer ordering used by the simulated SIC receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// Nearest interferer first, the assumption behind the analytic results.
    #[default]
    ByDistance,
    /// Strongest instantaneous received power first.
    ByInstantaneousPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SicConfig {
    /// Maximum number of interferers the receiver will try to cancel.
    pub n_max: usize,
    #[serde(default)]
    pub ordering: Ordering,
}

impl SicConfig {
    pub fn new(n_max: usize) -> Self {
        SicConfig {
            n_max,
            ordering: Ordering::ByDistance,
        }
    }

    pub fn with_ordering(self, ordering: Ordering) -> Self {
        SicConfig { ordering, ..self }
    }
}

/// On-disk parameter set. Every key is optional and falls back to the
/// defaults; keys ending in `_db` are decibel-valued alternatives to their
/// linear counterparts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub lambda: Option<f64>,
    pub p_t: Option<f64>,
    pub p_t_db: Option<f64>,
    pub d0: Option<f64>,
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub theta_db: Option<f64>,
    pub sigma2: Option<f64>,
    pub sigma2_db: Option<f64>,
    pub sigma2_c: Option<f64>,
    pub sigma2_c_db: Option<f64>,
    pub v: Option<f64>,
    pub zeta: Option<f64>,
}

fn pick(
    key: &'static str,
    linear: Option<f64>,
    db: Option<f64>,
) -> Result<Option<f64>, ModelError> {
    match (linear, db) {
        (Some(_), Some(_)) => Err(ModelError::DuplicateKey(key)),
        (Some(x), None) => Ok(Some(x)),
        (None, Some(x_db)) => Ok(Some(from_decibels(x_db))),
        (None, None) => Ok(None),
    }
}

impl ParamsConfig {
    /// Applies the keys present in this config on top of `builder`.
    pub fn apply(&self, mut b: NetworkParamsBuilder) -> Result<NetworkParamsBuilder, ModelError> {
        if let Some(x) = self.lambda {
            b = b.lambda(x);
        }
        if let Some(x) = pick("p_t", self.p_t, self.p_t_db)? {
            b = b.p_t(x);
        }
        if let Some(x) = self.d0 {
            b = b.d0(x);
        }
        if let Some(x) = self.alpha {
            b = b.alpha(x);
        }
        if let Some(x) = pick("theta", self.theta, self.theta_db)? {
            b = b.theta(x);
        }
        if let Some(x) = pick("sigma2", self.sigma2, self.sigma2_db)? {
            b = b.sigma2(x);
        }
        if let Some(x) = pick("sigma2_c", self.sigma2_c, self.sigma2_c_db)? {
            b = b.sigma2_c(x);
        }
        if let Some(x) = self.v {
            b = b.v(x);
        }
        if let Some(x) = self.zeta {
            b = b.zeta(x);
        }
        Ok(b)
    }

    pub fn to_params(&self) -> Result<NetworkParams, ModelError> {
        self.apply(NetworkParams::builder())?.build()
    }

    pub fn from_json_str(s: &str, origin: &str) -> Result<Self, ModelError> {
        serde_json::from_str(s).map_err(|e| ModelError::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })
    }

    pub fn from_json_file(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json_str(&text, &path.display().to_string())
    }
}
