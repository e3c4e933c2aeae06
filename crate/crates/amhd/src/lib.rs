//! Closed-form plasma equilibria, transforms that map them to anisotropic
//! equilibria, and residual verification of every governing equation.
//!
//! The crate is built around three ideas:
//!
//! * **Fields carry their own derivatives.** A [`ScalarField`] is a value
//!   closure plus a gradient closure, a [`VectorField`] a value closure plus
//!   a jacobian closure; combinators ([`VectorField::cross`],
//!   [`ScalarField::mul`], [`ScalarField::compose`], ...) propagate
//!   derivatives exactly, so transformed states stay analytically
//!   differentiable no matter how many maps they pass through.
//!
//! * **Transforms are algebraic.** Each map in [`transform`] rescales or
//!   mixes the fields of one equilibrium into the fields of another using
//!   free functions of a flux label, checking its preconditions on a sample
//!   set before constructing anything.
//!
//! * **Verification is dual-route.** Every equation residual in [`verify`]
//!   can be formed either from the propagated analytic derivatives or from
//!   central finite differences of raw field values ([`DiffMode`]); the
//!   finite-difference route never reads a derivative closure, so agreement
//!   between routes is evidence, not circularity.
//!
//! Scalars are generic over [`Real`] (`f32` or `f64`); the `*64` aliases at
//! the crate root cover the common case.

pub mod error;
pub mod fd;
pub mod field;
pub mod freefn;
pub mod linalg;
pub mod sample;
pub mod scalar;
pub mod seeds;
pub mod state;
pub mod transform;
pub mod verify;

pub use error::{FieldError, SeedError, TransformError, VerifyError};
pub use field::{ScalarField, VectorField};
pub use freefn::FreeFunction;
pub use linalg::{Mat3, Vec3};
pub use sample::SampleSet;
pub use scalar::Real;
pub use state::{
    AnisotropicState, EquilibriumState, FlowingIsotropicState, StateKind, StaticIsotropicState,
    SurfaceFunction, VacuumState,
};
pub use transform::{AbPair, Sign, TransformSpec};
pub use verify::{DiffMode, EquationResidual, ResidualReport, SystemKind, ToleranceSpec};

// ---------------------------------------------------------------------------
// f64 aliases
// ---------------------------------------------------------------------------

pub type Vec3d = Vec3<f64>;
pub type Mat3d = Mat3<f64>;
pub type ScalarField64 = ScalarField<f64>;
pub type VectorField64 = VectorField<f64>;
pub type FreeFunction64 = FreeFunction<f64>;
pub type SampleSet64 = SampleSet<f64>;
pub type DiffMode64 = DiffMode<f64>;
pub type EquilibriumState64 = EquilibriumState<f64>;
pub type AnisotropicState64 = AnisotropicState<f64>;
pub type TransformSpec64 = TransformSpec<f64>;
pub type AbPair64 = AbPair<f64>;
