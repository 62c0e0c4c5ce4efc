//! Every gated tolerance in one table.
//!
//! Reports carry a copy of the [`Tolerances`] they were produced with, so each
//! threshold in a JSON report traces back to a named field here. The CLI
//! accepts `--tol name=value` overrides keyed by the same field names.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative singular-value threshold for numerical rank.
pub const RANK_REL: f64 = 1e-8;
/// Minimal ratio between the last retained and the first discarded singular
/// value before a rank is called ambiguous.
pub const RANK_GAP: f64 = 10.0;

/// Named tolerances used by the verification suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative singular-value threshold for numerical rank.
    pub rank_rel: f64,
    /// Required separation between retained and discarded singular values.
    pub rank_gap: f64,
    /// Discrete Stokes / adjointness defect, relative to the summand scale.
    pub adjointness: f64,
    /// Orthogonality and reconstruction of the four-way decomposition.
    pub hmf: f64,
    /// Idempotence of the decomposition.
    pub hmf_idempotence: f64,
    /// Harmonic field residual `|d a| + |d* a|` relative to `|a|`.
    pub harmonic_residual: f64,
    /// Isotropy of the image of solutions under the restriction map.
    pub isotropy: f64,
    /// Principal angle bound (radians) for subspace containment.
    pub principal_angle: f64,
    /// Bracket / omega antisymmetrization identity.
    pub bracket_identity: f64,
    /// Action / symplectic potential identity.
    pub action_identity: f64,
    /// Bracket additivity over labelled faces.
    pub factorization: f64,
    /// Action composition under gluing.
    pub gluing_action: f64,
    /// Gauge invariance of the action (roundoff level).
    pub gauge_action: f64,
    /// Idempotence of the coclosed gauge fixing.
    pub gauge_idempotence: f64,
    /// Holonomy invariance under large gauge transformations (mod 2 pi).
    pub large_gauge: f64,
    /// Discrete Stokes residual of the two-dimensional line check.
    pub line_residual: f64,
    /// Euler-Lagrange residual accepted when tracing a solution.
    pub solution_residual: f64,
    /// Coclosedness accepted for inputs that must already be coclosed.
    pub coclosed: f64,
    /// Projection residual below which a datum counts as extendable.
    pub extendable: f64,
    /// Round trip restrict-after-extend.
    pub round_trip: f64,
    /// Deviation of the per-face curvature ratio from its mean.
    pub curvature: f64,
    /// Disjoint-union additivity (roundoff level).
    pub additivity: f64,
    /// Orientation-reversal sign flip (roundoff level).
    pub involution: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rel: RANK_REL,
            rank_gap: RANK_GAP,
            adjointness: 1e-12,
            hmf: 1e-10,
            hmf_idempotence: 1e-9,
            harmonic_residual: 1e-9,
            isotropy: 1e-11,
            principal_angle: 1e-7,
            bracket_identity: 1e-11,
            action_identity: 1e-11,
            factorization: 1e-12,
            gluing_action: 1e-11,
            gauge_action: 1e-12,
            gauge_idempotence: 1e-10,
            large_gauge: 1e-10,
            line_residual: 1e-12,
            solution_residual: 1e-9,
            coclosed: 1e-8,
            extendable: 1e-8,
            round_trip: 1e-8,
            curvature: 1e-9,
            additivity: 1e-13,
            involution: 1e-13,
        }
    }
}

impl Tolerances {
    /// Override one tolerance by name. Values must be positive and finite.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Parse(format!(
                "tolerance `{name}` must be positive, got {value}"
            )));
        }
        let mut table = serde_json::to_value(&*self)?;
        let slot = table
            .get_mut(name)
            .ok_or_else(|| Error::Parse(format!("unknown tolerance `{name}`")))?;
        *slot = serde_json::Value::from(value);
        *self = serde_json::from_value(table)?;
        Ok(())
    }

    /// Parse `name=value` and apply it.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected name=value, got `{spec}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad tolerance value in `{spec}`")))?;
        self.set(name.trim(), value)
    }
}
