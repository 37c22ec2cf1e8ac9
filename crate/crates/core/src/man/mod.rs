//! Mutual averaged non-commutativity `S(A:B)` and its closed forms.

mod entropy;
mod forms;
mod omega;

pub use entropy::{entropy_decomposition_man, EntropyBlockTerm};
pub use forms::*;
pub use omega::{man_omega, omega_operator, omega_operator_via, OmegaOperator, OmegaRoute};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{OperatorAlgebra, StructuralSummary};
use crate::error::{ManError, Result};

/// Raw values this far outside `[0, 1]` are treated as rounding and clamped.
pub const CLAMP_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }
}

impl FromStr for LogBase {
    type Err = ManError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            other => Err(ManError::InvalidArgument(format!(
                "log base must be 2 or e, got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogBase::Two => f.write_str("2"),
            LogBase::E => f.write_str("e"),
        }
    }
}

/// Which formula produced a reported value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Omega,
    Projection,
    Collinear,
    CollinearDistance,
    Entropy,
    SelfMan,
    SelfManCollinear,
    Lattice,
    Masa,
    AOtoc,
    OrbitAveraged,
    MonteCarlo,
    MonteCarloOrbit,
    ProtocolChoi,
    ProtocolChoiSelf,
    ProtocolStochastic,
    ProtocolStochasticSelf,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Omega => "omega",
            Method::Projection => "projection",
            Method::Collinear => "collinear",
            Method::CollinearDistance => "collinear-distance",
            Method::Entropy => "entropy",
            Method::SelfMan => "self-man",
            Method::SelfManCollinear => "self-man-collinear",
            Method::Lattice => "lattice",
            Method::Masa => "masa",
            Method::AOtoc => "a-otoc",
            Method::OrbitAveraged => "orbit-averaged",
            Method::MonteCarlo => "monte-carlo",
            Method::MonteCarloOrbit => "monte-carlo-orbit",
            Method::ProtocolChoi => "protocol-choi",
            Method::ProtocolChoiSelf => "protocol-choi-self",
            Method::ProtocolStochastic => "protocol-stochastic",
            Method::ProtocolStochasticSelf => "protocol-stochastic-self",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A secondary quantity computed alongside the main value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub label: String,
    #[serde(with = "extended_float")]
    pub value: f64,
}

/// Upper bounds on `S(A:B)` and `S₂(A:B)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManBounds {
    /// `1 - max{d(A'), d(B')}/d²`.
    pub commutant_bound: f64,
    #[serde(with = "extended_float")]
    pub commutant_log_bound: f64,
    /// `1 - 1/min{d(A), d(B)}`.
    pub weak_bound: f64,
    #[serde(with = "extended_float")]
    pub weak_log_bound: f64,
    /// `1 - d(A ∩ B')/d(A)`, only when `A` is collinear.
    pub intersection_bound: Option<f64>,
    #[serde(with = "extended_float_opt", default)]
    pub intersection_log_bound: Option<f64>,
}

impl ManBounds {
    /// Tightest of the reported bounds on `S`.
    pub fn tightest(&self) -> f64 {
        let mut b = self.commutant_bound.min(self.weak_bound);
        if let Some(i) = self.intersection_bound {
            b = b.min(i);
        }
        b
    }

    pub fn respected_by(&self, s: f64) -> bool {
        s <= self.tightest() + CLAMP_MARGIN
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManReport {
    pub s: f64,
    /// `S₂ = -log(1 - S)`; `+inf` when `S = 1`.
    #[serde(with = "extended_float")]
    pub s2: f64,
    pub log_base: LogBase,
    pub method: Method,
    #[serde(default)]
    pub bounds: Option<ManBounds>,
    #[serde(default)]
    pub summaries: Vec<StructuralSummary>,
    #[serde(default)]
    pub cross_checks: Vec<CrossCheck>,
}

impl ManReport {
    /// Clamps `raw` into `[0, 1]` and derives `S₂`.
    pub fn new(raw: f64, method: Method, base: LogBase) -> Result<Self> {
        let s = clamp_unit(raw)?;
        Ok(Self {
            s,
            s2: log_man(s, base),
            log_base: base,
            method,
            bounds: None,
            summaries: Vec::new(),
            cross_checks: Vec::new(),
        })
    }

    pub fn with_summaries(mut self, algebras: &[&OperatorAlgebra]) -> Result<Self> {
        for a in algebras {
            self.summaries.push(a.summary()?);
        }
        Ok(self)
    }

    pub fn with_check(mut self, label: &str, value: f64) -> Self {
        self.cross_checks.push(CrossCheck {
            label: label.to_string(),
            value,
        });
        self
    }

    pub fn with_bounds(mut self, bounds: ManBounds) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn check(&self, label: &str) -> Option<f64> {
        self.cross_checks
            .iter()
            .find(|c| c.label == label)
            .map(|c| c.value)
    }
}

/// Clamps rounding noise at the edges of `[0, 1]`; larger excursions are
/// reported as errors.
pub fn clamp_unit(raw: f64) -> Result<f64> {
    if !raw.is_finite() {
        return Err(ManError::Numerical(format!("non-finite value {raw}")));
    }
    if !(-CLAMP_MARGIN..=1.0 + CLAMP_MARGIN).contains(&raw) {
        return Err(ManError::Numerical(format!(
            "value {raw:.3e} outside [0, 1]"
        )));
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// `-log(1 - s)`.
pub fn log_man(s: f64, base: LogBase) -> f64 {
    if s >= 1.0 {
        f64::INFINITY
    } else {
        -base.log(1.0 - s)
    }
}

/// Serializes non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod extended_float {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad float {other:?}"))),
            },
        }
    }
}

pub mod extended_float_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::extended_float")] f64);

    use serde::Serialize;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

#[cfg(test)]
mod tests;
