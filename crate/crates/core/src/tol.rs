//! Global tolerance bundle.
//!
//! Values are stored as `f64` and converted at the point of use, so one
//! bundle serves every scalar type. The `CHEMFLOOD_TOL` environment variable
//! may hold a JSON object overriding any subset of the fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TOL_ENV_VAR: &str = "CHEMFLOOD_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Bisection width for saturation roots.
    pub root: f64,
    pub ode_rtol: f64,
    pub ode_atol: f64,
    /// Relative bracket width when solving for kappa at fixed v.
    pub kappa_rel: f64,
    /// Relative bracket width when solving for v at fixed kappa.
    pub v_rel: f64,
    /// Distance from a saddle along its eigenvector where a manifold starts.
    pub launch_offset: f64,
    /// Width of the c-boundary layers, relative to `c_minus - c_plus`.
    pub boundary_layer: f64,
    /// `|f_s - v|` below which a double root counts as a saddle-node.
    pub saddle_node: f64,
    /// Accepted endpoint change when the launch offset is halved.
    pub launch_check: f64,
    /// Velocity distance mapped onto an intermediate portrait type.
    pub portrait_v: f64,
    /// Saturation distance mapped onto an intermediate portrait type.
    pub portrait_s: f64,
    /// Uniform distance below which two flux curves are considered equal.
    pub coincide: f64,
    /// Slack allowed in speed-compatibility inequalities.
    pub compat: f64,
    /// Step budget for a single manifold integration.
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            root: 1e-12,
            ode_rtol: 1e-10,
            ode_atol: 1e-12,
            kappa_rel: 1e-10,
            v_rel: 1e-10,
            launch_offset: 1e-7,
            boundary_layer: 1e-6,
            saddle_node: 1e-8,
            launch_check: 1e-8,
            portrait_v: 1e-9,
            portrait_s: 1e-8,
            coincide: 1e-12,
            compat: 1e-10,
            max_steps: 4_000_000,
        }
    }
}

impl Tolerances {
    /// Applies a JSON override such as `{"ode_rtol": 1e-9}`.
    pub fn with_override(self, json: &str) -> Result<Self> {
        let mut value = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        let patch: serde_json::Value =
            serde_json::from_str(json).map_err(|e| Error::Config(format!("{TOL_ENV_VAR}: {e}")))?;
        let serde_json::Value::Object(patch) = patch else {
            return Err(Error::Config(format!("{TOL_ENV_VAR} must be a JSON object")));
        };
        for (k, v) in patch {
            value[k] = v;
        }
        serde_json::from_value(value).map_err(|e| Error::Config(format!("{TOL_ENV_VAR}: {e}")))
    }

    /// Defaults, overridden by `CHEMFLOOD_TOL` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOL_ENV_VAR) {
            Ok(s) if !s.trim().is_empty() => Self::default().with_override(&s),
            _ => Ok(Self::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_touches_only_named_fields() {
        let t = Tolerances::default().with_override(r#"{"ode_rtol": 1e-9}"#).unwrap();
        assert_eq!(t.ode_rtol, 1e-9);
        assert_eq!(t.root, Tolerances::default().root);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(Tolerances::default().with_override(r#"{"nope": 1}"#).is_err());
        assert!(Tolerances::default().with_override("[1,2]").is_err());
    }
}
