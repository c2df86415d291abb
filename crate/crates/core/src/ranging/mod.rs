//! Distance estimation: synthetic error models applied to true ranges, and
//! the log-normal shadowing conversion between RSSI and distance.

mod trace;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use trace::{
    distance_curve, ingest_rssi_trace, synthetic_trace, write_distance_curve, write_trace,
    RssiSample, SyntheticTrace, TRACE_HEADER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    /// `est = real + e * max_range`
    Constant,
    /// `est = real ± u * real`, `u ~ U[0, e]`, sign uniform
    Random,
    /// `est = real ± e * real`
    Linear,
    /// `est = real + a * e`, `a = ln(real) * e` (`a = 0` at `real = 0`)
    Logarithmic,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 4] = [
        ErrorKind::Constant,
        ErrorKind::Random,
        ErrorKind::Linear,
        ErrorKind::Logarithmic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Constant => "constant",
            ErrorKind::Random => "random",
            ErrorKind::Linear => "linear",
            ErrorKind::Logarithmic => "logarithmic",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ErrorKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown error model '{s}'")))
    }
}

/// Direction of the `±` term in the Linear model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// One of the four range-error models with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    kind: ErrorKind,
    e: f64,
    max_range: f64,
}

impl ErrorModel {
    /// Requires `0 <= e < 1` and `max_range > 0`.
    pub fn new(kind: ErrorKind, e: f64, max_range: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&e) {
            return Err(Error::invalid(format!("error parameter e={e} outside [0, 1)")));
        }
        if !(max_range.is_finite() && max_range > 0.0) {
            return Err(Error::invalid(format!("max_range={max_range} must be positive")));
        }
        Ok(ErrorModel { kind, e, max_range })
    }

    pub fn kind(&self) -> ErrorKind {
        self.kind
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    pub fn max_range(&self) -> f64 {
        self.max_range
    }

    /// Same model with a different `e`.
    pub fn with_e(&self, e: f64) -> Result<Self> {
        ErrorModel::new(self.kind, e, self.max_range)
    }

    /// Estimated distance for a true distance `real`, clamped at zero.
    ///
    /// `rng` is consulted only by the Random model, which always draws two
    /// uniforms: the magnitude `u * e` and then the sign (`Plus` if the
    /// second draw is below 0.5). `sign` only affects the Linear model.
    pub fn apply<R: Rng + ?Sized>(&self, real: f64, rng: &mut R, sign: Sign) -> Result<f64> {
        if !(real.is_finite() && real >= 0.0) {
            return Err(Error::InvalidDistance(real));
        }
        let e = self.e;
        let est = match self.kind {
            ErrorKind::Constant => real + e * self.max_range,
            ErrorKind::Random => {
                let magnitude = e * rng.gen::<f64>();
                let s = if rng.gen::<f64>() < 0.5 { 1.0 } else { -1.0 };
                real + s * magnitude * real
            }
            ErrorKind::Linear => real + sign.factor() * e * real,
            ErrorKind::Logarithmic => {
                let a = if real == 0.0 { 0.0 } else { real.ln() * e };
                real + a * e
            }
        };
        Ok(est.max(0.0))
    }
}

/// Free-function form of [`ErrorModel::apply`].
pub fn apply_error<R: Rng + ?Sized>(
    model: &ErrorModel,
    real_dist: f64,
    rng: &mut R,
    sign: Sign,
) -> Result<f64> {
    model.apply(real_dist, rng, sign)
}

/// Log-normal shadowing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShadowingParams {
    /// Signal strength at the reference distance, dBm.
    pub rssi_0: f64,
    /// Reference distance, m.
    pub d_0: f64,
    /// Attenuation (path-loss) exponent.
    pub n_atten: f64,
    /// Standard deviation of the shadowing term, dB.
    pub sigma: f64,
}

impl Default for ShadowingParams {
    fn default() -> Self {
        ShadowingParams {
            rssi_0: -40.0,
            d_0: 1.0,
            n_atten: 2.0,
            sigma: 0.0,
        }
    }
}

impl ShadowingParams {
    pub fn validate(&self) -> Result<()> {
        if !self.rssi_0.is_finite() {
            return Err(Error::invalid("rssi_0 must be finite"));
        }
        if !(self.d_0.is_finite() && self.d_0 > 0.0) {
            return Err(Error::invalid(format!("d_0={} must be positive", self.d_0)));
        }
        if !(self.n_atten.is_finite() && self.n_atten > 0.0) {
            return Err(Error::invalid(format!("n_atten={} must be positive", self.n_atten)));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::invalid(format!("sigma={} must be non-negative", self.sigma)));
        }
        Ok(())
    }
}

/// `RSSI(d) = rssi_0 - 10 n log10(d / d_0) + X`, with `X ~ N(0, sigma)`
/// drawn from `noise` when given.
pub fn rssi_from_distance<R: Rng + ?Sized>(
    p: &ShadowingParams,
    d: f64,
    noise: Option<&mut R>,
) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidDistance(d));
    }
    let mean = p.rssi_0 - 10.0 * p.n_atten * (d / p.d_0).log10();
    let shadow = match noise {
        Some(rng) if p.sigma > 0.0 => Normal::new(0.0, p.sigma)
            .map_err(|err| Error::invalid(err.to_string()))?
            .sample(rng),
        _ => 0.0,
    };
    Ok(mean + shadow)
}

/// Noise-free inverse: `d = d_0 * 10^((rssi_0 - rssi) / (10 n))`.
pub fn distance_from_rssi(p: &ShadowingParams, rssi: f64) -> f64 {
    p.d_0 * 10f64.powf((p.rssi_0 - rssi) / (10.0 * p.n_atten))
}
