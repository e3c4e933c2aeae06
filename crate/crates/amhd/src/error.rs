//! Error types for field evaluation, seed construction, transforms, and
//! verification.
//!
//! Errors carry diagnostic positions as `[f64; 3]` regardless of the scalar
//! type in use, so the enums stay non-generic and easy to match on.

use crate::linalg::Vec3;
use crate::scalar::Real;
use crate::state::StateKind;
use thiserror::Error;

fn fmt_point(p: &[f64; 3]) -> String {
    format!("({}, {}, {})", p[0], p[1], p[2])
}

/// Field evaluation and finite-difference failures.
#[derive(Debug, Error)]
pub enum FieldError {
    #[error("non-finite {what} at {}", fmt_point(point))]
    NonFinite { what: &'static str, point: [f64; 3] },
    #[error("finite-difference stencil hit a non-finite value near {}", fmt_point(point))]
    Stencil { point: [f64; 3] },
}

impl FieldError {
    pub fn non_finite<T: Real>(what: &'static str, p: Vec3<T>) -> Self {
        FieldError::NonFinite {
            what,
            point: p.to_f64(),
        }
    }

    pub fn stencil<T: Real>(p: Vec3<T>) -> Self {
        FieldError::Stencil { point: p.to_f64() }
    }
}

/// Seed construction failures.
#[derive(Debug, Error)]
pub enum SeedError {
    #[error("seed `{seed}` does not provide {what}")]
    UnsupportedMetadata {
        seed: &'static str,
        what: &'static str,
    },
    #[error("invalid parameter for seed `{seed}`: {why}")]
    InvalidParameter { seed: &'static str, why: String },
    #[error("flux label rho({at}) = {value} is not positive")]
    NonPositiveDensity { at: f64, value: f64 },
}

/// Transform precondition and construction failures.
#[derive(Debug, Error)]
pub enum TransformError {
    #[error("firehose violation: C0 = {c0} must be positive")]
    FirehoseViolation { c0: f64 },
    #[error("parameter `{name}` crosses zero on the sampled range (|{name}({at})| = {magnitude})")]
    ParameterDomain {
        name: &'static str,
        at: f64,
        magnitude: f64,
    },
    #[error("input invariant `{what}` fails: deviation {deviation} at {}", fmt_point(worst_point))]
    Precondition {
        what: &'static str,
        deviation: f64,
        worst_point: [f64; 3],
    },
    #[error("a^2 - b^2 deviates from {c} by {deviation} at label value {at}")]
    AbConstancy { c: f64, deviation: f64, at: f64 },
    #[error("firehose domain violation: tau = {tau} >= 1 at {}", fmt_point(point))]
    FirehoseDomain { tau: f64, point: [f64; 3] },
    #[error("density must be positive: rho = {value} at {}", fmt_point(point))]
    Density { value: f64, point: [f64; 3] },
    #[error("state carries no {what}; required by this transform")]
    MissingField { what: &'static str },
    #[error("pressure tensor undefined where |B| = 0, at {}", fmt_point(point))]
    SingularAnisotropy { point: [f64; 3] },
    #[error("transform `{transform}` needs a {expected} state, got {found}")]
    WrongStateKind {
        transform: &'static str,
        expected: StateKind,
        found: StateKind,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Seed(#[from] SeedError),
}

/// Residual verification failures.
#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("evaluation failed for `{context}` at {}", fmt_point(point))]
    Evaluation {
        context: &'static str,
        point: [f64; 3],
    },
    #[error("state carries no {what}; this check needs it")]
    MissingMetadata { what: &'static str },
}

impl VerifyError {
    pub fn evaluation<T: Real>(context: &'static str, p: Vec3<T>) -> Self {
        VerifyError::Evaluation {
            context,
            point: p.to_f64(),
        }
    }
}
