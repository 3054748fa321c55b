//! The 1-D nonlinearities `f(x)` driven through the fractional iteration.
//!
//! Maps are stateless value objects separated from the solver, so the same
//! memory-sum iteration drives the logistic nonlinearity, the Puu cubic,
//! and any user-supplied function.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Built-in map families selectable by name (sweeps and the CLI).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapFamily {
    /// `f(x) = p * x * (1 - x)`.
    Logistic,
    /// `f(x) = a * x - (a + 1) * x^3`.
    Puu,
}

impl MapFamily {
    /// Instantiates the family at a parameter value.
    pub fn with_param(self, param: f64) -> MapSpec {
        match self {
            MapFamily::Logistic => MapSpec::Logistic { p: param },
            MapFamily::Puu => MapSpec::Puu { a: param },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MapFamily::Logistic => "logistic",
            MapFamily::Puu => "puu",
        }
    }
}

impl fmt::Display for MapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MapFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "logistic" => Ok(MapFamily::Logistic),
            "puu" => Ok(MapFamily::Puu),
            other => Err(format!("unknown map family `{other}` (expected logistic|puu)")),
        }
    }
}

/// A user-supplied pure map; evaluation must be deterministic and
/// side-effect-free.
#[derive(Clone)]
pub struct CustomMap {
    name: Arc<str>,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl CustomMap {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into().into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMap").field("name", &self.name).finish()
    }
}

/// A map family together with its parameter.
#[derive(Debug, Clone)]
pub enum MapSpec {
    Logistic { p: f64 },
    Puu { a: f64 },
    Custom(CustomMap),
}

/// Rejection of a non-finite evaluation point.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("map evaluated at non-finite x = {x}")]
pub struct NonFiniteInput {
    pub x: f64,
}

impl MapSpec {
    /// `f(x)` without the finiteness guard; callers must ensure `x` is
    /// finite (the solver does so through its divergence check).
    #[inline]
    pub fn eval_raw(&self, x: f64) -> f64 {
        match self {
            MapSpec::Logistic { p } => p * x * (1.0 - x),
            MapSpec::Puu { a } => a * x - (a + 1.0) * (x * x * x),
            MapSpec::Custom(map) => (map.f)(x),
        }
    }

    /// `f(x)`, rejecting non-finite evaluation points.
    #[inline]
    pub fn eval(&self, x: f64) -> Result<f64, NonFiniteInput> {
        if x.is_finite() {
            Ok(self.eval_raw(x))
        } else {
            Err(NonFiniteInput { x })
        }
    }

    /// The parameter value, when the map has one.
    pub fn param(&self) -> Option<f64> {
        match self {
            MapSpec::Logistic { p } => Some(*p),
            MapSpec::Puu { a } => Some(*a),
            MapSpec::Custom(_) => None,
        }
    }

    pub fn family_name(&self) -> &str {
        match self {
            MapSpec::Logistic { .. } => "logistic",
            MapSpec::Puu { .. } => "puu",
            MapSpec::Custom(map) => map.name(),
        }
    }
}
