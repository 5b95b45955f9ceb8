//! Verification records shared by the identity checks.

use crate::integrate::IntegrationSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Version of the serialized report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Which identity a report checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Identity {
    Kadell,
    Sonine0F1,
    SonineBesselB,
    SelbergClosedForm,
    IntegrabilityProbe,
    ClassicalSonine,
    XuIntertwiner,
}

/// Outcome of comparing two numerically computed sides of an identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: Identity,
    pub params: serde_json::Value,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub spec: Option<IntegrationSpec>,
    pub runtime_ms: u64,
    /// Conditioning warnings and auxiliary estimates.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(
        identity: Identity,
        params: serde_json::Value,
        lhs: Complex64,
        rhs: Complex64,
        tolerance: f64,
        spec: Option<IntegrationSpec>,
    ) -> Self {
        let abs_residual = (lhs - rhs).norm();
        let scale = rhs.norm();
        let rel_residual = if scale > 0.0 { abs_residual / scale } else { abs_residual };
        let passed = rel_residual <= tolerance || (lhs.norm() < 1.0 && abs_residual <= tolerance);
        VerificationReport {
            identity,
            params,
            lhs,
            rhs,
            abs_residual,
            rel_residual,
            tolerance,
            passed,
            spec,
            runtime_ms: 0,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_runtime(mut self, start: Instant) -> Self {
        self.runtime_ms = start.elapsed().as_millis() as u64;
        self
    }
}
