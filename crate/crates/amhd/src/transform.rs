//! Backlund-type maps between equilibrium states.
//!
//! Three maps turn isotropic states into anisotropic ones, and a fourth is an
//! infinite-dimensional symmetry of the anisotropic system itself:
//!
//! * [`backlund_flowing`]: B1 = f(Psi) B, V1 = g(Psi) V on a flowing MHD
//!   equilibrium whose density and Bernoulli function are flux functions;
//! * [`backlund_static`]: B1 = f(p) B on a static equilibrium, the free
//!   function riding on the pressure itself;
//! * [`backlund_vacuum`]: B1 = f(p) B on a vacuum field, with p any label
//!   constant on field lines;
//! * [`mixing_symmetry`]: hyperbolic mixing of B and V controlled by a pair
//!   (a, b) with a^2 - b^2 constant, plus density and anisotropy rescalings
//!   m and n, all free functions of Psi.
//!
//! Every output field carries analytically propagated derivatives, so the
//! finite-difference verifier stays an independent check. Preconditions are
//! validated on an explicit sample set; violations surface as typed errors
//! with the worst offending point.

use crate::error::TransformError;
use crate::field::{ScalarField, VectorField};
use crate::freefn::FreeFunction;
use crate::linalg::{Mat3, Vec3};
use crate::sample::SampleSet;
use crate::scalar::{lit, tiny_floor, Real};
use crate::seeds;
use crate::state::{
    AnisotropicState, EquilibriumState, FlowingIsotropicState, StateKind, StaticIsotropicState,
    VacuumState,
};
use std::fmt;

/// How far a sampled invariant may deviate before a precondition fails.
const INVARIANT_TOL: f64 = 1e-8;

/// Sign choice for the mixed magnetic field; both give valid equilibria.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

/// Mixing pair (a, b) with a^2 - b^2 = c constant; the hyperbolic pair
/// (cosh, sinh) with c = 1 is the canonical example.
#[derive(Clone, Debug)]
pub struct AbPair<T: Real> {
    pub a: FreeFunction<T>,
    pub b: FreeFunction<T>,
    pub c: T,
}

impl<T: Real> AbPair<T> {
    pub fn new(a: FreeFunction<T>, b: FreeFunction<T>, c: T) -> Self {
        AbPair { a, b, c }
    }

    /// a = cosh, b = sinh, c = 1.
    pub fn hyperbolic() -> Self {
        AbPair::new(FreeFunction::cosh(), FreeFunction::sinh(), T::one())
    }

    /// Constant pair with c = a0^2 - b0^2.
    pub fn constants(a0: T, b0: T) -> Self {
        AbPair::new(
            FreeFunction::constant(a0),
            FreeFunction::constant(b0),
            a0 * a0 - b0 * b0,
        )
    }

    /// The inverse pair (a, -b) for the same constant.
    pub fn inverse(&self) -> Self {
        AbPair::new(self.a.clone(), self.b.clone().scaled(-T::one()), self.c)
    }

    /// Checks a^2 - b^2 = c over the given label values to 1e-10.
    fn check_constancy(&self, labels: &[T]) -> Result<(), TransformError> {
        let tol = lit::<T>(1e-10) * T::one().max(self.c.abs());
        for &s in labels {
            let a = self.a.eval(s);
            let b = self.b.eval(s);
            let dev = (a * a - b * b - self.c).abs();
            if !(dev <= tol) {
                return Err(TransformError::AbConstancy {
                    c: self.c.to_f64_lossy(),
                    deviation: dev.to_f64_lossy(),
                    at: s.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

// ---------------------------------------------------------------------------
// Precondition helpers
// ---------------------------------------------------------------------------

fn require_positive_c0<T: Real>(c0: T) -> Result<(), TransformError> {
    if c0 > T::zero() {
        Ok(())
    } else {
        Err(TransformError::FirehoseViolation {
            c0: c0.to_f64_lossy(),
        })
    }
}

/// Rejects free functions that vanish or change sign on the sampled range.
fn require_nonzero<T: Real>(
    f: &FreeFunction<T>,
    name: &'static str,
    labels: &[T],
) -> Result<(), TransformError> {
    let mut reference_sign = T::zero();
    for &s in labels {
        let v = f.eval(s);
        if !v.is_finite() || v == T::zero() || (reference_sign != T::zero() && v.signum() != reference_sign)
        {
            return Err(TransformError::ParameterDomain {
                name,
                at: s.to_f64_lossy(),
                magnitude: v.abs().to_f64_lossy(),
            });
        }
        reference_sign = v.signum();
    }
    Ok(())
}

/// Max over points of |field . grad psi| / (|field| |grad psi| + eps).
fn max_surface_misalignment<T: Real>(
    field: &VectorField<T>,
    psi: &ScalarField<T>,
    points: &[Vec3<T>],
) -> (T, Vec3<T>) {
    let eps = tiny_floor::<T>();
    let mut worst = (T::zero(), Vec3::zero());
    for &p in points {
        let b = field.value_at(p);
        let g = psi.gradient_at(p);
        let r = b.dot(g).abs() / (b.norm() * g.norm() + eps);
        if r > worst.0 {
            worst = (r, p);
        }
    }
    worst
}

/// Max over points of the normalized cross product of two gradients; zero
/// when the first scalar is a function of the second.
fn max_gradient_misalignment<T: Real>(
    s: &ScalarField<T>,
    of: &ScalarField<T>,
    points: &[Vec3<T>],
) -> (T, Vec3<T>) {
    let eps = tiny_floor::<T>();
    let mut worst = (T::zero(), Vec3::zero());
    for &p in points {
        let gs = s.gradient_at(p);
        let go = of.gradient_at(p);
        let r = gs.cross(go).norm() / (gs.norm() * go.norm() + eps);
        if r > worst.0 {
            worst = (r, p);
        }
    }
    worst
}

fn require_invariant<T: Real>(
    what: &'static str,
    (deviation, at): (T, Vec3<T>),
) -> Result<(), TransformError> {
    if deviation.to_f64_lossy() <= INVARIANT_TOL {
        Ok(())
    } else {
        Err(TransformError::Precondition {
            what,
            deviation: deviation.to_f64_lossy(),
            worst_point: at.to_f64(),
        })
    }
}

/// tau(Psi) = 1 - c0 / f(Psi)^2 as a free function.
fn tau_from<T: Real>(f: &FreeFunction<T>, c0: T) -> FreeFunction<T> {
    FreeFunction::constant(c0)
        .times(f.clone().squared().recip())
        .scaled(-T::one())
        .shifted(T::one())
}

/// (c0 - f(Psi)^2) as a free function.
fn c0_minus_f_sq<T: Real>(f: &FreeFunction<T>, c0: T) -> FreeFunction<T> {
    f.clone().squared().scaled(-T::one()).shifted(c0)
}

// ---------------------------------------------------------------------------
// The four maps
// ---------------------------------------------------------------------------

/// Maps a flowing isotropic equilibrium to an anisotropic one:
/// B1 = f(Psi) B, V1 = g(Psi) V, rho1 = c0 rho / g(Psi)^2,
/// tau1 = 1 - c0 / f(Psi)^2, p_perp = c0 P + c1 + (c0 - f(Psi)^2) B^2 / 2.
pub fn backlund_flowing<T: Real>(
    s: &FlowingIsotropicState<T>,
    f: &FreeFunction<T>,
    g: &FreeFunction<T>,
    c0: T,
    c1: T,
    samples: &SampleSet<T>,
) -> Result<AnisotropicState<T>, TransformError> {
    require_positive_c0(c0)?;
    let points = samples.points();
    let labels: Vec<T> = points.iter().map(|&p| s.psi.psi.value_at(p)).collect();
    require_nonzero(f, "f", &labels)?;
    require_nonzero(g, "g", &labels)?;

    require_invariant(
        "B orthogonal to grad Psi",
        max_surface_misalignment(&s.b, &s.psi.psi, &points),
    )?;
    require_invariant(
        "V orthogonal to grad Psi",
        max_surface_misalignment(&s.v, &s.psi.psi, &points),
    )?;
    require_invariant(
        "rho is a flux function",
        max_gradient_misalignment(&s.rho, &s.psi.psi, &points),
    )?;
    // P = bernoulli(Psi) - rho V^2 / 2, checked as grad(P + rho V^2/2) || grad Psi.
    let head = s
        .pressure
        .add(&s.rho.mul(&s.v.norm_sq()).scale(lit::<T>(0.5)));
    require_invariant(
        "P + rho V^2/2 is a flux function",
        max_gradient_misalignment(&head, &s.psi.psi, &points),
    )?;
    for &p in &points {
        let rho = s.rho.value_at(p);
        if !(rho > T::zero()) {
            return Err(TransformError::Density {
                value: rho.to_f64_lossy(),
                point: p.to_f64(),
            });
        }
    }

    let f_psi = ScalarField::compose(f, &s.psi.psi);
    let g_psi = ScalarField::compose(g, &s.psi.psi);
    let b1 = s.b.scaled(&f_psi);
    let v1 = s.v.scaled(&g_psi);
    let rho_factor = FreeFunction::constant(c0).times(g.clone().squared().recip());
    let rho1 = s.rho.mul(&ScalarField::compose(&rho_factor, &s.psi.psi));
    let tau1 = ScalarField::compose(&tau_from(f, c0), &s.psi.psi);
    let wedge = ScalarField::compose(&c0_minus_f_sq(f, c0), &s.psi.psi);
    let p_perp = s
        .pressure
        .scale(c0)
        .offset(c1)
        .add(&s.b.norm_sq().scale(lit::<T>(0.5)).mul(&wedge));

    Ok(AnisotropicState {
        b: b1,
        v: Some(v1),
        rho: Some(rho1),
        p_perp,
        tau: tau1,
        psi: Some(s.psi.clone()),
    })
}

/// Maps a static isotropic equilibrium to a static anisotropic one:
/// B1 = f(p) B, tau1 = 1 - c0 / f(p)^2,
/// p_perp = c0 p + c1 + (c0 - f(p)^2) B^2 / 2.
pub fn backlund_static<T: Real>(
    s: &StaticIsotropicState<T>,
    f: &FreeFunction<T>,
    c0: T,
    c1: T,
    samples: &SampleSet<T>,
) -> Result<AnisotropicState<T>, TransformError> {
    require_positive_c0(c0)?;
    let labels: Vec<T> = samples.points().iter().map(|&p| s.p.value_at(p)).collect();
    require_nonzero(f, "f", &labels)?;

    let f_p = ScalarField::compose(f, &s.p);
    let b1 = s.b.scaled(&f_p);
    let tau1 = ScalarField::compose(&tau_from(f, c0), &s.p);
    let wedge = ScalarField::compose(&c0_minus_f_sq(f, c0), &s.p);
    let p_perp = s
        .p
        .scale(c0)
        .offset(c1)
        .add(&s.b.norm_sq().scale(lit::<T>(0.5)).mul(&wedge));

    Ok(AnisotropicState {
        b: b1,
        v: None,
        rho: None,
        p_perp,
        tau: tau1,
        psi: s.psi.clone(),
    })
}

/// Maps a vacuum field with a pressure label to a static anisotropic state:
/// B1 = f(p) B, tau1 = 1 - c0 / f(p)^2, p_perp = c1 + (c0 - f(p)^2) B^2 / 2.
///
/// Unlike the static map there is no c0 p term: the label only steers f.
pub fn backlund_vacuum<T: Real>(
    s: &VacuumState<T>,
    f: &FreeFunction<T>,
    c0: T,
    c1: T,
    samples: &SampleSet<T>,
) -> Result<AnisotropicState<T>, TransformError> {
    require_positive_c0(c0)?;
    let label = s.p_label.as_ref().ok_or(TransformError::MissingField {
        what: "pressure label constant on field lines",
    })?;
    let points = samples.points();
    let labels: Vec<T> = points.iter().map(|&p| label.value_at(p)).collect();
    require_nonzero(f, "f", &labels)?;
    require_invariant(
        "pressure label constant on field lines",
        max_surface_misalignment(&s.b, label, &points),
    )?;

    let f_p = ScalarField::compose(f, label);
    let b1 = s.b.scaled(&f_p);
    let tau1 = ScalarField::compose(&tau_from(f, c0), label);
    let wedge = ScalarField::compose(&c0_minus_f_sq(f, c0), label);
    let p_perp = ScalarField::constant(c1).add(&s.b.norm_sq().scale(lit::<T>(0.5)).mul(&wedge));

    Ok(AnisotropicState {
        b: b1,
        v: None,
        rho: None,
        p_perp,
        tau: tau1,
        psi: Some(crate::state::SurfaceFunction::new(label.clone())),
    })
}

/// The intrinsic symmetry of anisotropic equilibria: with (a, b) a mixing
/// pair of constant a^2 - b^2 = c and m, n free functions of Psi,
///
/// ```text
/// rho1   = m^2 rho
/// tau1   = 1 - n^2 (1 - tau)
/// V1     = (b sqrt(1-tau) / (m sqrt(rho))) B + (a / m) V
/// B1     = +/- [ (a / n) B + (b sqrt(rho) / (n sqrt(1-tau))) V ]
/// p_perp1 = c p_perp + (c B^2 - B1^2) / 2
/// ```
pub fn mixing_symmetry<T: Real>(
    s: &AnisotropicState<T>,
    ab: &AbPair<T>,
    m: &FreeFunction<T>,
    n: &FreeFunction<T>,
    sign: Sign,
    samples: &SampleSet<T>,
) -> Result<AnisotropicState<T>, TransformError> {
    let psi = s
        .psi
        .as_ref()
        .ok_or(TransformError::MissingField {
            what: "surface function Psi",
        })?;
    let rho = s.rho()?;
    let v = s.flow()?;

    let points = samples.points();
    let labels: Vec<T> = points.iter().map(|&p| psi.psi.value_at(p)).collect();
    for &p in &points {
        let tau = s.tau.value_at(p);
        if !(tau < T::one()) {
            return Err(TransformError::FirehoseDomain {
                tau: tau.to_f64_lossy(),
                point: p.to_f64(),
            });
        }
        let rho_val = rho.value_at(p);
        if !(rho_val > T::zero()) {
            return Err(TransformError::Density {
                value: rho_val.to_f64_lossy(),
                point: p.to_f64(),
            });
        }
    }
    require_nonzero(m, "m", &labels)?;
    require_nonzero(n, "n", &labels)?;
    ab.check_constancy(&labels)?;
    require_invariant(
        "B orthogonal to grad Psi",
        max_surface_misalignment(&s.b, &psi.psi, &points),
    )?;
    require_invariant(
        "V orthogonal to grad Psi",
        max_surface_misalignment(v, &psi.psi, &points),
    )?;
    require_invariant(
        "rho is a flux function",
        max_gradient_misalignment(rho, &psi.psi, &points),
    )?;
    require_invariant(
        "tau is a flux function",
        max_gradient_misalignment(&s.tau, &psi.psi, &points),
    )?;

    let a_psi = ScalarField::compose(&ab.a, &psi.psi);
    let b_psi = ScalarField::compose(&ab.b, &psi.psi);
    let m_psi = ScalarField::compose(m, &psi.psi);
    let n_psi = ScalarField::compose(n, &psi.psi);
    let one_minus_tau = s.tau.neg().offset(T::one());
    let sqrt_one_minus_tau = one_minus_tau.sqrt();
    let sqrt_rho = rho.sqrt();

    let coef_vb = b_psi
        .mul(&sqrt_one_minus_tau)
        .div(&m_psi.mul(&sqrt_rho));
    let coef_vv = a_psi.div(&m_psi);
    let v1 = s.b.scaled(&coef_vb).add(&v.scaled(&coef_vv));

    let coef_bb = a_psi.div(&n_psi);
    let coef_bv = b_psi.mul(&sqrt_rho).div(&n_psi.mul(&sqrt_one_minus_tau));
    let b1 = s
        .b
        .scaled(&coef_bb)
        .add(&v.scaled(&coef_bv))
        .scale(sign.factor::<T>());

    let rho1 = rho.mul(&m_psi.squared());
    let tau1 = n_psi
        .squared()
        .mul(&one_minus_tau)
        .neg()
        .offset(T::one());
    let half = lit::<T>(0.5);
    let p_perp1 = s
        .p_perp
        .scale(ab.c)
        .add(&s.b.norm_sq().scale(ab.c).sub(&b1.norm_sq()).scale(half));

    Ok(AnisotropicState {
        b: b1,
        v: Some(v1),
        rho: Some(rho1),
        p_perp: p_perp1,
        tau: tau1,
        psi: Some(psi.clone()),
    })
}

// ---------------------------------------------------------------------------
// Derived quantities
// ---------------------------------------------------------------------------

/// Parallel pressure p_par = p_perp + tau B^2, always derived, never stored.
pub fn p_parallel<T: Real>(s: &AnisotropicState<T>) -> ScalarField<T> {
    s.p_perp.add(&s.tau.mul(&s.b.norm_sq()))
}

/// The anisotropic pressure tensor p_perp I + tau B (x) B at a point.
///
/// Errors where |B| = 0: the anisotropy direction is undefined there.
pub fn pressure_tensor<T: Real>(
    s: &AnisotropicState<T>,
    p: Vec3<T>,
) -> Result<Mat3<T>, TransformError> {
    let b = s.b.value_at(p);
    if b.norm_sq() == T::zero() {
        return Err(TransformError::SingularAnisotropy { point: p.to_f64() });
    }
    let tau = s.tau.value_at(p);
    let p_perp = s.p_perp.value_at(p);
    Ok(Mat3::identity().scale(p_perp) + Mat3::outer(b, b).scale(tau))
}

/// A negative pressure seen while scanning samples; reported, never fatal.
#[derive(Clone, Copy, Debug)]
pub struct PhysicalityWarning {
    pub quantity: &'static str,
    pub min_value: f64,
    pub at: [f64; 3],
}

impl fmt::Display for PhysicalityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "warning: {} dips to {} at ({}, {}, {})",
            self.quantity, self.min_value, self.at[0], self.at[1], self.at[2]
        )
    }
}

/// Scans p_perp and p_par over the samples; negative minima produce warnings.
pub fn physicality_warnings<T: Real>(
    s: &AnisotropicState<T>,
    samples: &SampleSet<T>,
) -> Vec<PhysicalityWarning> {
    let p_par = p_parallel(s);
    let mut warnings = Vec::new();
    for (name, field) in [("p_perp", &s.p_perp), ("p_par", &p_par)] {
        let mut min = (T::infinity(), Vec3::zero());
        for p in samples.points() {
            let v = field.value_at(p);
            if v < min.0 {
                min = (v, p);
            }
        }
        if min.0 < T::zero() {
            warnings.push(PhysicalityWarning {
                quantity: name,
                min_value: min.0.to_f64_lossy(),
                at: min.1.to_f64(),
            });
        }
    }
    warnings
}

// ---------------------------------------------------------------------------
// Runtime dispatch for transform chains
// ---------------------------------------------------------------------------

/// One step of a transform chain, with everything needed to apply it.
#[derive(Clone, Debug)]
pub enum TransformSpec<T: Real> {
    /// Reinterpret a static isotropic state as anisotropic (zero flow and
    /// anisotropy) with density rho(Psi).
    Embed { rho: FreeFunction<T> },
    BacklundFlowing {
        f: FreeFunction<T>,
        g: FreeFunction<T>,
        c0: T,
        c1: T,
    },
    BacklundStatic {
        f: FreeFunction<T>,
        c0: T,
        c1: T,
    },
    BacklundVacuum {
        f: FreeFunction<T>,
        c0: T,
        c1: T,
    },
    MixingSymmetry {
        ab: AbPair<T>,
        m: FreeFunction<T>,
        n: FreeFunction<T>,
        sign: Sign,
    },
}

impl<T: Real> TransformSpec<T> {
    pub fn name(&self) -> &'static str {
        match self {
            TransformSpec::Embed { .. } => "embed",
            TransformSpec::BacklundFlowing { .. } => "backlund_flowing",
            TransformSpec::BacklundStatic { .. } => "backlund_static",
            TransformSpec::BacklundVacuum { .. } => "backlund_vacuum",
            TransformSpec::MixingSymmetry { .. } => "mixing_symmetry",
        }
    }

    /// Which state kind this step consumes; used to type-check chains before
    /// any field is evaluated.
    pub fn required_input(&self) -> StateKind {
        match self {
            TransformSpec::Embed { .. } => StateKind::StaticIsotropic,
            TransformSpec::BacklundFlowing { .. } => StateKind::FlowingIsotropic,
            TransformSpec::BacklundStatic { .. } => StateKind::StaticIsotropic,
            TransformSpec::BacklundVacuum { .. } => StateKind::Vacuum,
            TransformSpec::MixingSymmetry { .. } => StateKind::Anisotropic,
        }
    }

    /// Applies the step, checking the input kind first.
    pub fn apply(
        &self,
        state: &EquilibriumState<T>,
        samples: &SampleSet<T>,
    ) -> Result<EquilibriumState<T>, TransformError> {
        let mismatch = || TransformError::WrongStateKind {
            transform: self.name(),
            expected: self.required_input(),
            found: state.kind(),
        };
        let out = match (self, state) {
            (TransformSpec::Embed { rho }, EquilibriumState::StaticIsotropic(s)) => {
                seeds::embed_as_anisotropic(s, rho, samples)?
            }
            (
                TransformSpec::BacklundFlowing { f, g, c0, c1 },
                EquilibriumState::FlowingIsotropic(s),
            ) => backlund_flowing(s, f, g, *c0, *c1, samples)?,
            (TransformSpec::BacklundStatic { f, c0, c1 }, EquilibriumState::StaticIsotropic(s)) => {
                backlund_static(s, f, *c0, *c1, samples)?
            }
            (TransformSpec::BacklundVacuum { f, c0, c1 }, EquilibriumState::Vacuum(s)) => {
                backlund_vacuum(s, f, *c0, *c1, samples)?
            }
            (
                TransformSpec::MixingSymmetry { ab, m, n, sign },
                EquilibriumState::Anisotropic(s),
            ) => mixing_symmetry(s, ab, m, n, *sign, samples)?,
            _ => return Err(mismatch()),
        };
        Ok(EquilibriumState::Anisotropic(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::{abc_beltrami, embed_as_anisotropic, field_aligned_flow, theta_pinch};

    fn cube(n: usize) -> SampleSet<f64> {
        SampleSet::unit_cube(n)
    }

    fn rel_diff(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-30)
    }

    fn flow_seed() -> FlowingIsotropicState<f64> {
        field_aligned_flow(1.0, 1.0, &FreeFunction::identity(), 1.0, 1.0).unwrap()
    }

    #[test]
    fn flowing_identity_parameters_are_a_no_op() {
        let s = flow_seed();
        let one = FreeFunction::constant(1.0);
        let out = backlund_flowing(&s, &one, &one, 1.0, 0.0, &cube(200)).unwrap();
        for p in cube(100).points() {
            assert_eq!(out.b.value_at(p), s.b.value_at(p));
            assert_eq!(out.v.as_ref().unwrap().value_at(p), s.v.value_at(p));
            assert_eq!(out.rho.as_ref().unwrap().value_at(p), s.rho.value_at(p));
            assert_eq!(out.p_perp.value_at(p), s.pressure.value_at(p));
            assert_eq!(out.tau.value_at(p), 0.0);
        }
    }

    #[test]
    fn constant_doubling_gives_three_quarters_anisotropy() {
        let s = flow_seed();
        let out = backlund_flowing(
            &s,
            &FreeFunction::constant(2.0),
            &FreeFunction::constant(1.0),
            1.0,
            0.0,
            &cube(200),
        )
        .unwrap();
        for p in cube(100).points() {
            assert_eq!(out.tau.value_at(p), 0.75);
            assert_eq!(out.b.value_at(p), s.b.value_at(p) * 2.0);
        }
    }

    #[test]
    fn non_positive_c0_is_a_firehose_violation() {
        let s = flow_seed();
        let one = FreeFunction::constant(1.0);
        for c0 in [0.0, -2.0] {
            let err = backlund_flowing(&s, &one, &one, c0, 0.0, &cube(50));
            assert!(matches!(err, Err(TransformError::FirehoseViolation { .. })));
        }
    }

    #[test]
    fn zero_crossing_parameter_is_rejected() {
        let s = flow_seed();
        // f(Psi) = Psi - 0.5 crosses zero on the unit cube (Psi = z).
        let f = FreeFunction::poly(&[-0.5, 1.0]);
        let err = backlund_flowing(&s, &f, &FreeFunction::constant(1.0), 1.0, 0.0, &cube(200));
        assert!(matches!(err, Err(TransformError::ParameterDomain { name: "f", .. })));
    }

    #[test]
    fn perturbed_pressure_fails_the_bernoulli_precondition() {
        let mut s = flow_seed();
        s.pressure = s
            .pressure
            .add(&ScalarField::polynomial(&[((1, 0, 0), 0.1)]));
        let one = FreeFunction::constant(1.0);
        match backlund_flowing(&s, &one, &one, 1.0, 0.0, &cube(200)) {
            Err(TransformError::Precondition { what, .. }) => {
                assert!(what.contains("flux function"), "unexpected invariant: {what}");
            }
            other => panic!("expected precondition error, got {other:?}"),
        }
    }

    #[test]
    fn static_map_hits_expected_anisotropy_on_abc() {
        let s = abc_beltrami(1.0, 1.0, 1.0);
        let out = backlund_static(&s, &FreeFunction::constant(3.0), 1.0, 0.0, &cube(200)).unwrap();
        for p in cube(100).points() {
            // tau = 1 - 1/9, p_perp = 0 + (1 - 9) B^2 / 2 = -4 B^2.
            assert!(rel_diff(out.tau.value_at(p), 8.0 / 9.0) < 1e-15);
            let b2 = s.b.value_at(p).norm_sq();
            assert!(rel_diff(out.p_perp.value_at(p), -4.0 * b2) < 1e-14);
            assert_eq!(out.b.value_at(p), s.b.value_at(p) * 3.0);
        }
        assert!(out.is_static());
    }

    #[test]
    fn vacuum_map_has_no_pressure_term() {
        let s = crate::seeds::vacuum_planar_harmonic(crate::seeds::HarmonicKind::ExpTrig, 1.0, None)
            .unwrap();
        let out = backlund_vacuum(&s, &FreeFunction::constant(1.0), 1.0, 2.5, &cube(200)).unwrap();
        for p in cube(100).points() {
            // f = 1, c0 = 1: p_perp = c1 exactly, tau = 0; the label plays no role.
            assert_eq!(out.p_perp.value_at(p), 2.5);
            assert_eq!(out.tau.value_at(p), 0.0);
        }
    }

    #[test]
    fn vacuum_map_requires_a_label() {
        let s = VacuumState::<f64> {
            b: VectorField::constant(Vec3::new(0.0, 0.0, 1.0)),
            p_label: None,
        };
        let err = backlund_vacuum(&s, &FreeFunction::constant(1.0), 1.0, 0.0, &cube(10));
        assert!(matches!(err, Err(TransformError::MissingField { .. })));
    }

    fn embedded_pinch() -> AnisotropicState<f64> {
        let pinch = theta_pinch(&FreeFunction::exp().of_affine(-0.5, 0.0), 1.0);
        embed_as_anisotropic(&pinch, &FreeFunction::constant(1.0), &cube(200)).unwrap()
    }

    #[test]
    fn mixing_identity_parameters_are_a_no_op() {
        let s = embedded_pinch();
        let ab = AbPair::constants(1.0, 0.0);
        let one = FreeFunction::constant(1.0);
        let out = mixing_symmetry(&s, &ab, &one, &one, Sign::Plus, &cube(200)).unwrap();
        for p in cube(100).points() {
            assert_eq!(out.b.value_at(p), s.b.value_at(p));
            assert_eq!(out.v.as_ref().unwrap().value_at(p), Vec3::zero());
            assert_eq!(out.rho.as_ref().unwrap().value_at(p), 1.0);
            assert_eq!(out.tau.value_at(p), 0.0);
            assert_eq!(out.p_perp.value_at(p), s.p_perp.value_at(p));
        }
    }

    #[test]
    fn constant_hyperbolic_mixing_scales_fields_as_expected() {
        let s = embedded_pinch();
        let mu = 0.5f64;
        let ab = AbPair::constants(mu.cosh(), mu.sinh());
        let one = FreeFunction::constant(1.0);
        let out = mixing_symmetry(&s, &ab, &one, &one, Sign::Plus, &cube(200)).unwrap();
        for p in cube(100).points() {
            // With V = 0, rho = 1, tau = 0: V1 = sinh(mu) B, B1 = cosh(mu) B.
            let b = s.b.value_at(p);
            assert!((out.v.as_ref().unwrap().value_at(p) - b * mu.sinh()).max_abs() < 1e-15);
            assert!((out.b.value_at(p) - b * mu.cosh()).max_abs() < 1e-15);
        }
    }

    #[test]
    fn minus_sign_flips_b_but_not_pressure() {
        let s = embedded_pinch();
        let ab = AbPair::hyperbolic();
        let one = FreeFunction::constant(1.0);
        let plus = mixing_symmetry(&s, &ab, &one, &one, Sign::Plus, &cube(200)).unwrap();
        let minus = mixing_symmetry(&s, &ab, &one, &one, Sign::Minus, &cube(200)).unwrap();
        for p in cube(100).points() {
            assert_eq!(minus.b.value_at(p), -plus.b.value_at(p));
            assert_eq!(minus.p_perp.value_at(p), plus.p_perp.value_at(p));
        }
    }

    #[test]
    fn hyperbolic_mixes_compose_by_rapidity_addition() {
        // Constant boosts with m = n = 1 form a one-parameter group.
        let s = embedded_pinch();
        let one = FreeFunction::constant(1.0);
        let (mu1, mu2) = (0.3f64, 0.45f64);
        let first = mixing_symmetry(
            &s,
            &AbPair::constants(mu1.cosh(), mu1.sinh()),
            &one,
            &one,
            Sign::Plus,
            &cube(200),
        )
        .unwrap();
        let second = mixing_symmetry(
            &first,
            &AbPair::constants(mu2.cosh(), mu2.sinh()),
            &one,
            &one,
            Sign::Plus,
            &cube(200),
        )
        .unwrap();
        let direct = mixing_symmetry(
            &s,
            &AbPair::constants((mu1 + mu2).cosh(), (mu1 + mu2).sinh()),
            &one,
            &one,
            Sign::Plus,
            &cube(200),
        )
        .unwrap();
        for p in cube(100).points() {
            let d = (second.b.value_at(p) - direct.b.value_at(p)).max_abs();
            assert!(d < 1e-12, "B mismatch {d} at {p:?}");
            let d = (second.v.as_ref().unwrap().value_at(p)
                - direct.v.as_ref().unwrap().value_at(p))
            .max_abs();
            assert!(d < 1e-12, "V mismatch {d} at {p:?}");
            assert!(rel_diff(second.p_perp.value_at(p), direct.p_perp.value_at(p)) < 1e-12);
        }
    }

    #[test]
    fn inconstant_ab_pair_is_rejected() {
        let s = embedded_pinch();
        let ab = AbPair::new(FreeFunction::cosh(), FreeFunction::cos(), 1.0);
        let one = FreeFunction::constant(1.0);
        let err = mixing_symmetry(&s, &ab, &one, &one, Sign::Plus, &cube(200));
        assert!(matches!(err, Err(TransformError::AbConstancy { .. })));
    }

    #[test]
    fn firehose_domain_and_density_errors() {
        let mut s = embedded_pinch();
        s.tau = ScalarField::constant(1.5);
        let one = FreeFunction::constant(1.0);
        let err = mixing_symmetry(&s, &AbPair::hyperbolic(), &one, &one, Sign::Plus, &cube(50));
        assert!(matches!(err, Err(TransformError::FirehoseDomain { .. })));

        let mut s = embedded_pinch();
        s.rho = Some(ScalarField::constant(-1.0));
        let err = mixing_symmetry(&s, &AbPair::hyperbolic(), &one, &one, Sign::Plus, &cube(50));
        assert!(matches!(err, Err(TransformError::Density { .. })));
    }

    #[test]
    fn mixing_requires_density_and_flow() {
        let s = abc_beltrami(1.0, 1.0, 1.0);
        let aniso = backlund_static(&s, &FreeFunction::constant(2.0), 1.0, 0.0, &cube(50)).unwrap();
        let one = FreeFunction::constant(1.0);
        let err = mixing_symmetry(
            &aniso,
            &AbPair::hyperbolic(),
            &one,
            &one,
            Sign::Plus,
            &cube(50),
        );
        assert!(err.is_err());
    }

    #[test]
    fn parallel_pressure_is_perp_plus_tau_b_squared() {
        let s = AnisotropicState::<f64> {
            b: VectorField::constant(Vec3::new(0.0, 0.0, 2.0)),
            v: None,
            rho: None,
            p_perp: ScalarField::constant(1.0),
            tau: ScalarField::constant(0.5),
            psi: None,
        };
        assert_eq!(p_parallel(&s).value_at(Vec3::zero()), 1.0 + 0.5 * 4.0);
    }

    #[test]
    fn pressure_tensor_eigenstructure() {
        let s = AnisotropicState::<f64> {
            b: VectorField::constant(Vec3::new(0.0, 0.0, 2.0)),
            v: None,
            rho: None,
            p_perp: ScalarField::constant(1.0),
            tau: ScalarField::constant(0.5),
            psi: None,
        };
        let m = pressure_tensor(&s, Vec3::zero()).unwrap();
        // Diagonal (p_perp, p_perp, p_perp + tau B^2) = (1, 1, 3).
        assert_eq!(m.rows[0][0], 1.0);
        assert_eq!(m.rows[1][1], 1.0);
        assert_eq!(m.rows[2][2], 3.0);
        // B is an eigenvector with eigenvalue p_par; transverse directions get p_perp.
        let b = Vec3::new(0.0, 0.0, 2.0);
        assert_eq!(m.mul_vec(b), b * 3.0);
        let t = Vec3::new(1.0, 0.0, 0.0);
        assert_eq!(m.mul_vec(t), t * 1.0);
        // Symmetric by construction.
        assert_eq!(m.transpose(), m);
    }

    #[test]
    fn pressure_tensor_is_singular_where_b_vanishes() {
        let s = AnisotropicState::<f64> {
            b: VectorField::zero(),
            v: None,
            rho: None,
            p_perp: ScalarField::constant(1.0),
            tau: ScalarField::constant(0.0),
            psi: None,
        };
        assert!(pressure_tensor(&s, Vec3::zero()).is_err());
    }

    #[test]
    fn negative_pressures_warn_but_do_not_fail() {
        let s = abc_beltrami(1.0, 1.0, 1.0);
        // f = 3 drives p_perp = -4 B^2 < 0.
        let out = backlund_static(&s, &FreeFunction::constant(3.0), 1.0, 0.0, &cube(100)).unwrap();
        let warnings = physicality_warnings(&out, &cube(100));
        assert!(warnings.iter().any(|w| w.quantity == "p_perp" && w.min_value < 0.0));
    }

    #[test]
    fn chain_dispatch_rejects_wrong_state_kinds() {
        let vacuum = EquilibriumState::Vacuum(
            crate::seeds::vacuum_planar_harmonic(crate::seeds::HarmonicKind::Power(2), 1.0, None)
                .unwrap(),
        );
        let step = TransformSpec::BacklundFlowing {
            f: FreeFunction::constant(1.0),
            g: FreeFunction::constant(1.0),
            c0: 1.0,
            c1: 0.0,
        };
        match step.apply(&vacuum, &cube(10)) {
            Err(TransformError::WrongStateKind { expected, found, .. }) => {
                assert_eq!(expected, StateKind::FlowingIsotropic);
                assert_eq!(found, StateKind::Vacuum);
            }
            other => panic!("expected kind mismatch, got {other:?}"),
        }
    }
}
