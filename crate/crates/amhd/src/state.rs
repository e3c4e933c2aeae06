//! Equilibrium state bundles.
//!
//! Four kinds of state flow through the transform chain:
//!
//! * vacuum: curl B = 0, div B = 0, optionally with a pressure label that is
//!   constant on field lines;
//! * static isotropic: (curl B) x B = grad p, div B = 0, optionally force-free
//!   with curl B = alpha B;
//! * flowing isotropic: ideal MHD equilibrium with velocity V, density rho,
//!   pressure P, and a flux surface function Psi;
//! * anisotropic: CGL-type equilibrium with perpendicular pressure p_perp and
//!   anisotropy tau = (p_par - p_perp) / B^2.
//!
//! A state is a bundle of fields plus optional metadata; no field is ever
//! recomputed from another behind the caller's back. In particular Psi is
//! stored per state, never inferred.

use crate::error::TransformError;
use crate::field::{ScalarField, VectorField};
use crate::freefn::FreeFunction;
use crate::scalar::Real;
use std::fmt;

/// Function constant on field lines (and streamlines where flow exists).
#[derive(Clone, Debug)]
pub struct SurfaceFunction<T: Real> {
    pub psi: ScalarField<T>,
}

impl<T: Real> SurfaceFunction<T> {
    pub fn new(psi: ScalarField<T>) -> Self {
        SurfaceFunction { psi }
    }
}

/// Vacuum magnetic field, optionally labeled with a pressure-like function
/// constant on field lines (the input non-uniqueness is the caller's choice).
#[derive(Clone, Debug)]
pub struct VacuumState<T: Real> {
    pub b: VectorField<T>,
    pub p_label: Option<ScalarField<T>>,
}

/// Static isotropic plasma equilibrium.
#[derive(Clone, Debug)]
pub struct StaticIsotropicState<T: Real> {
    pub b: VectorField<T>,
    pub p: ScalarField<T>,
    /// Present iff the field is force-free (curl B = alpha B).
    pub alpha: Option<ScalarField<T>>,
    pub psi: Option<SurfaceFunction<T>>,
}

/// Flowing isotropic MHD equilibrium with its Bernoulli-type function:
/// P = bernoulli(Psi) - rho V^2 / 2.
#[derive(Clone, Debug)]
pub struct FlowingIsotropicState<T: Real> {
    pub b: VectorField<T>,
    pub v: VectorField<T>,
    pub rho: ScalarField<T>,
    pub pressure: ScalarField<T>,
    pub psi: SurfaceFunction<T>,
    pub bernoulli: FreeFunction<T>,
}

/// Anisotropic (CGL) equilibrium. Static states (built from vacuum or static
/// isotropic inputs) carry neither flow nor density; `p_par` is always
/// derived as `p_perp + tau B^2`, never stored.
#[derive(Clone, Debug)]
pub struct AnisotropicState<T: Real> {
    pub b: VectorField<T>,
    pub v: Option<VectorField<T>>,
    pub rho: Option<ScalarField<T>>,
    pub p_perp: ScalarField<T>,
    pub tau: ScalarField<T>,
    pub psi: Option<SurfaceFunction<T>>,
}

impl<T: Real> AnisotropicState<T> {
    /// True when the state has no flow (momentum balance reduces to the
    /// static anisotropic system).
    pub fn is_static(&self) -> bool {
        self.v.is_none()
    }

    /// Density, which static anisotropic states do not carry.
    pub fn rho(&self) -> Result<&ScalarField<T>, TransformError> {
        self.rho
            .as_ref()
            .ok_or(TransformError::MissingField { what: "density rho" })
    }

    /// Flow field, which static anisotropic states do not carry.
    pub fn flow(&self) -> Result<&VectorField<T>, TransformError> {
        self.v
            .as_ref()
            .ok_or(TransformError::MissingField { what: "flow field V" })
    }
}

/// Which of the four state kinds a value is; used for chain type-checking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    Vacuum,
    StaticIsotropic,
    FlowingIsotropic,
    Anisotropic,
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            StateKind::Vacuum => "vacuum",
            StateKind::StaticIsotropic => "static_isotropic",
            StateKind::FlowingIsotropic => "flowing_isotropic",
            StateKind::Anisotropic => "anisotropic",
        };
        f.write_str(name)
    }
}

/// Sum over the four state kinds, for runtime transform chains.
#[derive(Clone, Debug)]
pub enum EquilibriumState<T: Real> {
    Vacuum(VacuumState<T>),
    StaticIsotropic(StaticIsotropicState<T>),
    FlowingIsotropic(FlowingIsotropicState<T>),
    Anisotropic(AnisotropicState<T>),
}

/// Borrowed view of one named field inside a state.
#[derive(Clone, Copy)]
pub enum FieldRef<'a, T: Real> {
    Scalar(&'a ScalarField<T>),
    Vector(&'a VectorField<T>),
}

impl<T: Real> EquilibriumState<T> {
    pub fn kind(&self) -> StateKind {
        match self {
            EquilibriumState::Vacuum(_) => StateKind::Vacuum,
            EquilibriumState::StaticIsotropic(_) => StateKind::StaticIsotropic,
            EquilibriumState::FlowingIsotropic(_) => StateKind::FlowingIsotropic,
            EquilibriumState::Anisotropic(_) => StateKind::Anisotropic,
        }
    }

    /// The surface function, for states that carry one.
    pub fn psi(&self) -> Option<&SurfaceFunction<T>> {
        match self {
            EquilibriumState::Vacuum(_) => None,
            EquilibriumState::StaticIsotropic(s) => s.psi.as_ref(),
            EquilibriumState::FlowingIsotropic(s) => Some(&s.psi),
            EquilibriumState::Anisotropic(s) => s.psi.as_ref(),
        }
    }

    /// The magnetic field, present in every state kind.
    pub fn b(&self) -> &VectorField<T> {
        match self {
            EquilibriumState::Vacuum(s) => &s.b,
            EquilibriumState::StaticIsotropic(s) => &s.b,
            EquilibriumState::FlowingIsotropic(s) => &s.b,
            EquilibriumState::Anisotropic(s) => &s.b,
        }
    }

    /// The flow field, where one exists.
    pub fn v(&self) -> Option<&VectorField<T>> {
        match self {
            EquilibriumState::FlowingIsotropic(s) => Some(&s.v),
            EquilibriumState::Anisotropic(s) => s.v.as_ref(),
            _ => None,
        }
    }

    /// Stored fields in a stable order, for sampling and export.
    pub fn fields(&self) -> Vec<(&'static str, FieldRef<'_, T>)> {
        let mut out: Vec<(&'static str, FieldRef<'_, T>)> = Vec::new();
        match self {
            EquilibriumState::Vacuum(s) => {
                out.push(("b", FieldRef::Vector(&s.b)));
                if let Some(label) = &s.p_label {
                    out.push(("p_label", FieldRef::Scalar(label)));
                }
            }
            EquilibriumState::StaticIsotropic(s) => {
                out.push(("b", FieldRef::Vector(&s.b)));
                out.push(("p", FieldRef::Scalar(&s.p)));
                if let Some(alpha) = &s.alpha {
                    out.push(("alpha", FieldRef::Scalar(alpha)));
                }
                if let Some(psi) = &s.psi {
                    out.push(("psi", FieldRef::Scalar(&psi.psi)));
                }
            }
            EquilibriumState::FlowingIsotropic(s) => {
                out.push(("b", FieldRef::Vector(&s.b)));
                out.push(("v", FieldRef::Vector(&s.v)));
                out.push(("rho", FieldRef::Scalar(&s.rho)));
                out.push(("p", FieldRef::Scalar(&s.pressure)));
                out.push(("psi", FieldRef::Scalar(&s.psi.psi)));
            }
            EquilibriumState::Anisotropic(s) => {
                out.push(("b", FieldRef::Vector(&s.b)));
                if let Some(v) = &s.v {
                    out.push(("v", FieldRef::Vector(v)));
                }
                if let Some(rho) = &s.rho {
                    out.push(("rho", FieldRef::Scalar(rho)));
                }
                out.push(("p_perp", FieldRef::Scalar(&s.p_perp)));
                out.push(("tau", FieldRef::Scalar(&s.tau)));
                if let Some(psi) = &s.psi {
                    out.push(("psi", FieldRef::Scalar(&psi.psi)));
                }
            }
        }
        out
    }
}
