//! Residual verification of equilibrium states.
//!
//! Every governing system is checked the same way: sample the domain, form
//! each equation's residual pointwise, and divide the worst residual by the
//! largest magnitude any constituent term reaches anywhere in the sample.
//! The scale uses pre-cancellation bounds (for a term like B x curl B it is
//! |B| |curl B|, not the norm of the cross product), so an equation that is
//! satisfied through delicate cancellation still normalizes against the
//! sizes of the quantities that had to cancel.
//!
//! Derivatives come from one of two independent routes, selected by
//! [`DiffMode`]: the analytic jacobians propagated through field
//! combinators, or central finite differences that touch only field values.
//! Agreement between the routes is the core evidence that a state actually
//! solves its system rather than merely claiming consistent derivatives.

use crate::error::{FieldError, VerifyError};
use crate::fd;
use crate::field::{ScalarField, VectorField};
use crate::linalg::{Mat3, Vec3};
use crate::sample::SampleSet;
use crate::scalar::{lit, tiny_floor, Real};
use crate::state::{
    AnisotropicState, EquilibriumState, FlowingIsotropicState, StaticIsotropicState, VacuumState,
};
use rayon::prelude::*;
use std::fmt;

/// Scales below this floor are treated as exact zeros, so an identically
/// satisfied equation reports 0 instead of roundoff divided by roundoff.
const SCALE_FLOOR: f64 = 1e-30;

// ---------------------------------------------------------------------------
// Differentiation routes
// ---------------------------------------------------------------------------

/// Which derivative route a verification pass uses.
#[derive(Clone, Copy, Debug)]
pub enum DiffMode<T: Real> {
    /// The analytic derivative closures carried by each field.
    Analytic,
    /// Central finite differences of field values with the given step.
    Fd { step: T },
}

impl<T: Real> DiffMode<T> {
    pub fn fd(step: T) -> Self {
        DiffMode::Fd { step }
    }

    pub fn fd_step(&self) -> Option<T> {
        match *self {
            DiffMode::Analytic => None,
            DiffMode::Fd { step } => Some(step),
        }
    }

    /// Short human-readable label, e.g. `analytic` or `fd step=1e-3`.
    pub fn describe(&self) -> String {
        match *self {
            DiffMode::Analytic => "analytic".to_string(),
            DiffMode::Fd { step } => format!("fd step={:e}", step),
        }
    }

    pub fn gradient(&self, f: &ScalarField<T>, p: Vec3<T>) -> Result<Vec3<T>, FieldError> {
        match *self {
            DiffMode::Analytic => f.try_gradient_at(p),
            DiffMode::Fd { step } => fd::fd_gradient(f, p, step),
        }
    }

    pub fn jacobian(&self, v: &VectorField<T>, p: Vec3<T>) -> Result<Mat3<T>, FieldError> {
        match *self {
            DiffMode::Analytic => v.try_jacobian_at(p),
            DiffMode::Fd { step } => fd::fd_jacobian(v, p, step),
        }
    }

    pub fn divergence(&self, v: &VectorField<T>, p: Vec3<T>) -> Result<T, FieldError> {
        self.jacobian(v, p).map(|j| j.trace())
    }

    pub fn curl(&self, v: &VectorField<T>, p: Vec3<T>) -> Result<Vec3<T>, FieldError> {
        self.jacobian(v, p).map(|j| j.curl())
    }
}

/// Gate values for the two derivative routes.
#[derive(Clone, Copy, Debug)]
pub struct ToleranceSpec {
    pub analytic: f64,
    pub fd: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        ToleranceSpec {
            analytic: 1e-7,
            fd: 1e-5,
        }
    }
}

impl ToleranceSpec {
    pub fn for_mode<T: Real>(&self, mode: DiffMode<T>) -> f64 {
        match mode {
            DiffMode::Analytic => self.analytic,
            DiffMode::Fd { .. } => self.fd,
        }
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Which system of equations a report covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    /// Flowing isotropic equilibrium: momentum, continuity, induction, div B.
    Mhd,
    /// Static isotropic force balance: curl B x B = grad p, div B.
    Plasma,
    /// Beltrami alignment: curl B = alpha B, div B.
    ForceFree,
    /// Vacuum field: curl B = 0, div B.
    Vacuum,
    /// Anisotropic equilibrium with flow.
    Anisotropic,
    /// Anisotropic equilibrium without flow.
    AnisotropicStatic,
    /// Fields tangent to the surfaces of a flux function.
    SurfaceOrthogonality,
    /// Divergence of the pressure tensor against its closed form.
    PressureTensorDivergence,
    /// The calculus identity behind field rescaling by a free function.
    ScaledCurl,
    /// Pointwise invariance of rho V^2 - (1 - tau) B^2 up to a constant.
    EnergyBalance,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Mhd => "mhd",
            SystemKind::Plasma => "plasma",
            SystemKind::ForceFree => "force_free",
            SystemKind::Vacuum => "vacuum",
            SystemKind::Anisotropic => "anisotropic",
            SystemKind::AnisotropicStatic => "anisotropic_static",
            SystemKind::SurfaceOrthogonality => "surface_orthogonality",
            SystemKind::PressureTensorDivergence => "pressure_tensor_divergence",
            SystemKind::ScaledCurl => "scaled_curl",
            SystemKind::EnergyBalance => "energy_balance",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Normalized residual statistics for one equation of a system.
#[derive(Clone, Debug)]
pub struct EquationResidual {
    pub equation: &'static str,
    /// Worst pointwise residual divided by `scale`.
    pub linf: f64,
    /// Root-mean-square residual divided by `scale`.
    pub rms: f64,
    /// Largest constituent-term magnitude seen anywhere in the sample.
    pub scale: f64,
    /// Sample point where the worst residual occurred; the origin when the
    /// residual is identically zero.
    pub worst_point: [f64; 3],
}

/// Residuals of every equation of one system over one sample set.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub system: SystemKind,
    pub equations: Vec<EquationResidual>,
    pub sample_count: usize,
    pub fd_step: Option<f64>,
}

impl ResidualReport {
    pub fn max_linf(&self) -> f64 {
        self.equations.iter().map(|e| e.linf).fold(0.0, f64::max)
    }

    pub fn worst(&self) -> Option<&EquationResidual> {
        self.equations
            .iter()
            .max_by(|a, b| a.linf.partial_cmp(&b.linf).expect("linf is finite"))
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_linf() <= tol
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "system={} samples={}", self.system, self.sample_count)?;
        match self.fd_step {
            None => writeln!(f, " mode=analytic")?,
            Some(h) => writeln!(f, " mode=fd fd_step={:e}", h)?,
        }
        for eq in &self.equations {
            writeln!(
                f,
                "  {} linf={:e} rms={:e} scale={:e} worst=({:e},{:e},{:e})",
                eq.equation,
                eq.linf,
                eq.rms,
                eq.scale,
                eq.worst_point[0],
                eq.worst_point[1],
                eq.worst_point[2]
            )?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Core reduction
// ---------------------------------------------------------------------------

/// Evaluates `per_point` (one `(residual, scale bound)` pair per equation)
/// over the sample set in parallel and reduces sequentially, so the report
/// is byte-identical across runs and thread counts.
fn reduce_residuals<T: Real>(
    system: SystemKind,
    names: &[&'static str],
    samples: &SampleSet<T>,
    mode: DiffMode<T>,
    per_point: impl Fn(Vec3<T>) -> Result<Vec<(T, T)>, VerifyError> + Send + Sync,
) -> Result<ResidualReport, VerifyError> {
    let points = samples.points();
    let rows: Vec<(Vec3<T>, Vec<(T, T)>)> = points
        .par_iter()
        .map(|&p| per_point(p).map(|pairs| (p, pairs)))
        .collect::<Result<_, _>>()?;

    struct Acc {
        max_res: f64,
        worst: [f64; 3],
        sum_sq: f64,
        max_scale: f64,
    }
    let mut acc: Vec<Acc> = names
        .iter()
        .map(|_| Acc {
            max_res: 0.0,
            worst: [0.0; 3],
            sum_sq: 0.0,
            max_scale: 0.0,
        })
        .collect();

    for (p, pairs) in &rows {
        debug_assert_eq!(pairs.len(), names.len());
        for (i, &(res, scale)) in pairs.iter().enumerate() {
            let r = res.to_f64_lossy();
            let s = scale.to_f64_lossy();
            if !r.is_finite() || !s.is_finite() {
                return Err(VerifyError::evaluation(names[i], *p));
            }
            let a = &mut acc[i];
            if r > a.max_res {
                a.max_res = r;
                a.worst = p.to_f64();
            }
            a.sum_sq += r * r;
            if s > a.max_scale {
                a.max_scale = s;
            }
        }
    }

    let n = rows.len().max(1) as f64;
    let equations = names
        .iter()
        .zip(acc)
        .map(|(&equation, a)| {
            let denom = a.max_scale.max(SCALE_FLOOR);
            EquationResidual {
                equation,
                linf: a.max_res / denom,
                rms: (a.sum_sq / n).sqrt() / denom,
                scale: a.max_scale,
                worst_point: a.worst,
            }
        })
        .collect();

    Ok(ResidualReport {
        system,
        equations,
        sample_count: rows.len(),
        fd_step: mode.fd_step().map(|h| h.to_f64_lossy()),
    })
}

fn ev<T: Real>(context: &'static str, p: Vec3<T>) -> impl FnOnce(FieldError) -> VerifyError {
    move |_| VerifyError::evaluation(context, p)
}

// ---------------------------------------------------------------------------
// Governing systems
// ---------------------------------------------------------------------------

/// Residuals of the flowing isotropic system:
/// rho V x curl V - B x curl B - grad P - rho grad(V^2/2) = 0,
/// div(rho V) = 0, curl(V x B) = 0, div B = 0.
pub fn residual_mhd<T: Real>(
    s: &FlowingIsotropicState<T>,
    samples: &SampleSet<T>,
    mode: DiffMode<T>,
) -> Result<ResidualReport, VerifyError> {
    let half = lit::<T>(0.5);
    let kinetic = s.v.norm_sq().scale(half);
    let rho_v = s.v.scaled(&s.rho);
    let e = s.v.cross(&s.b);
    reduce_residuals(
        SystemKind::Mhd,
        &["momentum", "continuity", "induction", "div_b"],
        samples,
        mode,
        |p| {
            let b = s.b.value_at(p);
            let v = s.v.value_at(p);
            let rho = s.rho.value_at(p);
            let jb = mode.jacobian(&s.b, p).map_err(ev("momentum", p))?;
            let jv = mode.jacobian(&s.v, p).map_err(ev("momentum", p))?;
            let curl_b = jb.curl();
            let curl_v = jv.curl();
            let grad_p = mode.gradient(&s.pressure, p).map_err(ev("momentum", p))?;
            let grad_k = mode.gradient(&kinetic, p).map_err(ev("momentum", p))?;
            let momentum = v.cross(curl_v) * rho - b.cross(curl_b) - grad_p - grad_k * rho;
            let m_scale = (rho.abs() * v.norm() * curl_v.norm())
                .max(b.norm() * curl_b.norm())
                .max(grad_p.norm())
                .max(rho.abs() * grad_k.norm());

            let div_rho_v = mode.divergence(&rho_v, p).map_err(ev("continuity", p))?;
            let grad_rho = mode.gradient(&s.rho, p).map_err(ev("continuity", p))?;
            let c_scale = (rho.abs() * jv.max_abs()).max(v.norm() * grad_rho.norm());

            let ind = mode.curl(&e, p).map_err(ev("induction", p))?;
            let i_scale = (b.norm() * jv.max_abs()).max(v.norm() * jb.max_abs());

            Ok(vec![
                (momentum.norm(), m_scale),
                (div_rho_v.abs(), c_scale),
                (ind.norm(), i_scale),
                (jb.trace().abs(), jb.max_abs()),
            ])
        },
    )
}

/// Residuals of static isotropic force balance: curl B x B = grad p, div B = 0.
pub fn residual_plasma<T: Real>(
    s: &StaticIsotropicState<T>,
    samples: &SampleSet<T>,
    mode: DiffMode<T>,
) -> Result<ResidualReport, VerifyError> {
    reduce_residuals(
        SystemKind::Plasma,
        &["momentum", "div_b"],
        samples,
        mode,
        |p| {
            let b = s.b.value_at(p);
            let jb = mode.jacobian(&s.b, p).map_err(ev("momentum", p))?;
            let curl_b = jb.curl();
            let grad_p = mode.gradient(&s.p, p).map_err(ev("momentum", p))?;
            let momentum = curl_b.cross(b) - grad_p;
            let m_scale = (curl_b.norm() * b.norm()).max(grad_p.norm());
            Ok(vec![
                (momentum.norm(), m_scale),
                (jb.trace().abs(), jb.max_abs()),
            ])
        },
    )
}

/// Residuals of the Beltrami alignment curl B = alpha B, div B = 0.
///
/// Requires the state to carry its force-free coefficient.
pub fn residual_force_free<T: Real>(
    s: &StaticIsotropicState<T>,
    samples: &SampleSet<T>,
    mode: DiffMode<T>,
) -> Result<ResidualReport, VerifyError> {
    let alpha = s.alpha.as_ref().ok_or(VerifyError::MissingMetadata {
        what: "force-free coefficient alpha",
    })?;
    reduce_residuals(
        SystemKind::ForceFree,
        &["alignment", "div_b"],
        samples,
        mode,
        |p| {
            let b = s.b.value_at(p);
            let a = alpha.value_at(p);
            let jb = mode.jacobian(&s.b, p).map_err(ev("alignment", p))?;
            let curl_b = jb.curl();
            let res = curl_b - b * a;
            let scale = curl_b.norm().max(a.abs() * b.norm());
            Ok(vec![
                (res.norm(), scale),
                (jb.trace().abs(), jb.max_abs()),
            ])
        },
    )
}

/// Residuals of the vacuum system: curl B = 0, div B = 0.
pub fn residual_vacuum<T: Real>(
    s: &VacuumState<T>,
    samples: &SampleSet<T>,
    mode: DiffMode<T>,
) -> Result<ResidualReport, VerifyError> {
    reduce_residuals(
        SystemKind::Vacuum,
        &["curl_b", "div_b"],
        samples,
        mode,
        |p| {
            let jb = mode.jacobian(&s.b, p).map_err(ev("curl_b", p))?;
            Ok(vec![
                (jb.curl().norm(), jb.max_abs()),
                (jb.trace().abs(), jb.max_abs()),
            ])
        },
    )
}

/// Residuals of the anisotropic system. Dispatches on whether the state
/// carries a flow: with one, the full momentum, continuity, induction, and
/// div B equations; without, static force balance and div B.
pub fn residual_anisotropic<T: Real>(
    s: &AnisotropicState<T>,
    samples: &SampleSet<T>,
    mode: DiffMode<T>,
) -> Result<ResidualReport, VerifyError> {
    let half = lit::<T>(0.5);
    let half_b2 = s.b.norm_sq().scale(half);

    if s.is_static() {
        return reduce_residuals(
            SystemKind::AnisotropicStatic,
            &["momentum", "div_b"],
            samples,
            mode,
            |p| {
                let b = s.b.value_at(p);
                let tau = s.tau.value_at(p);
                let jb = mode.jacobian(&s.b, p).map_err(ev("momentum", p))?;
                let curl_b = jb.curl();
                let grad_pp = mode.gradient(&s.p_perp, p).map_err(ev("momentum", p))?;
                let grad_hb2 = mode.gradient(&half_b2, p).map_err(ev("momentum", p))?;
                let grad_tau = mode.gradient(&s.tau, p).map_err(ev("momentum", p))?;
                let lhs = curl_b.cross(b) * (T::one() - tau);
                let rhs = grad_pp + grad_hb2 * tau + b * b.dot(grad_tau);
                let scale = ((T::one() - tau).abs() * curl_b.norm() * b.norm())
                    .max(grad_pp.norm())
                    .max(tau.abs() * grad_hb2.norm())
                    .max(b.norm_sq() * grad_tau.norm());
                Ok(vec![
                    ((lhs - rhs).norm(), scale),
                    (jb.trace().abs(), jb.max_abs()),
                ])
            },
        );
    }

    let v = s.flow().map_err(|_| VerifyError::MissingMetadata {
        what: "flow field V",
    })?;
    let rho = s.rho().map_err(|_| VerifyError::MissingMetadata {
        what: "density rho",
    })?;
    let kinetic = v.norm_sq().scale(half);
    let rho_v = v.scaled(rho);
    let e = v.cross(&s.b);
    reduce_residuals(
        SystemKind::Anisotropic,
        &["momentum", "continuity", "induction", "div_b"],
        samples,
        mode,
        |p| {
            let b = s.b.value_at(p);
            let vv = v.value_at(p);
            let rho_val = rho.value_at(p);
            let tau = s.tau.value_at(p);
            let jb = mode.jacobian(&s.b, p).map_err(ev("momentum", p))?;
            let jv = mode.jacobian(v, p).map_err(ev("momentum", p))?;
            let curl_b = jb.curl();
            let curl_v = jv.curl();
            let grad_pp = mode.gradient(&s.p_perp, p).map_err(ev("momentum", p))?;
            let grad_hb2 = mode.gradient(&half_b2, p).map_err(ev("momentum", p))?;
            let grad_tau = mode.gradient(&s.tau, p).map_err(ev("momentum", p))?;
            let grad_k = mode.gradient(&kinetic, p).map_err(ev("momentum", p))?;
            let lhs = vv.cross(curl_v) * rho_val - b.cross(curl_b) * (T::one() - tau);
            let rhs = grad_pp + grad_hb2 * tau + grad_k * rho_val + b * b.dot(grad_tau);
            let m_scale = (rho_val.abs() * vv.norm() * curl_v.norm())
                .max((T::one() - tau).abs() * b.norm() * curl_b.norm())
                .max(grad_pp.norm())
                .max(tau.abs() * grad_hb2.norm())
                .max(rho_val.abs() * grad_k.norm())
                .max(b.norm_sq() * grad_tau.norm());

            let div_rho_v = mode.divergence(&rho_v, p).map_err(ev("continuity", p))?;
            let grad_rho = mode.gradient(rho, p).map_err(ev("continuity", p))?;
            let c_scale = (rho_val.abs() * jv.max_abs()).max(vv.norm() * grad_rho.norm());

            let ind = mode.curl(&e, p).map_err(ev("induction", p))?;
            let i_scale = (b.norm() * jv.max_abs()).max(vv.norm() * jb.max_abs());

            Ok(vec![
                ((lhs - rhs).norm(), m_scale),
                (div_rho_v.abs(), c_scale),
                (ind.norm(), i_scale),
                (jb.trace().abs(), jb.max_abs()),
            ])
        },
    )
}

/// Residuals of the system a state claims to satisfy, chosen by its kind.
pub fn residual_state<T: Real>(
    state: &EquilibriumState<T>,
    samples: &SampleSet<T>,
    mode: DiffMode<T>,
) -> Result<ResidualReport, VerifyError> {
    match state {
        EquilibriumState::Vacuum(s) => residual_vacuum(s, samples, mode),
        EquilibriumState::StaticIsotropic(s) => residual_plasma(s, samples, mode),
        EquilibriumState::FlowingIsotropic(s) => residual_mhd(s, samples, mode),
        EquilibriumState::Anisotropic(s) => residual_anisotropic(s, samples, mode),
    }
}

/// Every check applicable to a state: its governing system, the Beltrami
/// alignment when it carries alpha, and surface orthogonality when it
/// carries a flux function or field-line label.
pub fn verify_state<T: Real>(
    state: &EquilibriumState<T>,
    samples: &SampleSet<T>,
    mode: DiffMode<T>,
) -> Result<Vec<ResidualReport>, VerifyError> {
    let mut reports = vec![residual_state(state, samples, mode)?];
    if let EquilibriumState::StaticIsotropic(s) = state {
        if s.alpha.is_some() {
            reports.push(residual_force_free(s, samples, mode)?);
        }
    }
    if let Some(psi) = state.psi() {
        reports.push(check_surface(
            state.b(),
            state.v(),
            &psi.psi,
            samples,
            mode,
        )?);
    } else if let EquilibriumState::Vacuum(s) = state {
        if let Some(label) = &s.p_label {
            reports.push(check_surface(&s.b, None, label, samples, mode)?);
        }
    }
    Ok(reports)
}

// ---------------------------------------------------------------------------
// Cross-cutting checks
// ---------------------------------------------------------------------------

/// Checks that B (and V when given) is tangent to the level surfaces of
/// psi: |X . grad psi| / (|X| |grad psi|) pointwise, already normalized.
pub fn check_surface<T: Real>(
    b: &VectorField<T>,
    v: Option<&VectorField<T>>,
    psi: &ScalarField<T>,
    samples: &SampleSet<T>,
    mode: DiffMode<T>,
) -> Result<ResidualReport, VerifyError> {
    let names: &[&'static str] = if v.is_some() {
        &["b_dot_grad_psi", "v_dot_grad_psi"]
    } else {
        &["b_dot_grad_psi"]
    };
    let eps = tiny_floor::<T>();
    reduce_residuals(SystemKind::SurfaceOrthogonality, names, samples, mode, |p| {
        let g = mode.gradient(psi, p).map_err(ev("b_dot_grad_psi", p))?;
        let bb = b.value_at(p);
        let mut out = vec![(bb.dot(g).abs() / (bb.norm() * g.norm() + eps), T::one())];
        if let Some(vf) = v {
            let vv = vf.value_at(p);
            out.push((vv.dot(g).abs() / (vv.norm() * g.norm() + eps), T::one()));
        }
        Ok(out)
    })
}

/// Checks the closed form of the pressure-tensor divergence,
/// div(p_perp I + tau B (x) B) = grad p_perp + tau curl B x B
/// + tau grad(B^2/2) + B (B . grad tau), valid where div B = 0.
///
/// The left side is always a central finite difference of tensor values with
/// step `fd_step`; the right side uses `rhs_mode`, so the two sides never
/// share a derivative route in analytic mode.
pub fn check_pressure_divergence<T: Real>(
    b: &VectorField<T>,
    tau: &ScalarField<T>,
    p_perp: &ScalarField<T>,
    samples: &SampleSet<T>,
    fd_step: T,
    rhs_mode: DiffMode<T>,
) -> Result<ResidualReport, VerifyError> {
    let half = lit::<T>(0.5);
    let half_b2 = b.norm_sq().scale(half);
    let tensor = |q: Vec3<T>| {
        let bv = b.value_at(q);
        Mat3::outer(bv, bv).scale(tau.value_at(q)) + Mat3::identity().scale(p_perp.value_at(q))
    };
    let ctx = "tensor_divergence";
    let report = reduce_residuals(
        SystemKind::PressureTensorDivergence,
        &[ctx],
        samples,
        rhs_mode,
        |p| {
            let two_h = fd_step + fd_step;
            let mut div = Vec3::zero();
            for axis in 0..3 {
                let mut step = Vec3::zero();
                match axis {
                    0 => step.x = fd_step,
                    1 => step.y = fd_step,
                    _ => step.z = fd_step,
                }
                let diff = tensor(p + step) - tensor(p - step);
                if !diff.is_finite() {
                    return Err(VerifyError::evaluation(ctx, p));
                }
                div = div
                    + Vec3::new(diff.rows[0][axis], diff.rows[1][axis], diff.rows[2][axis])
                        * (T::one() / two_h);
            }

            let bv = b.value_at(p);
            let t = tau.value_at(p);
            let jb = rhs_mode.jacobian(b, p).map_err(ev(ctx, p))?;
            let curl_b = jb.curl();
            let grad_pp = rhs_mode.gradient(p_perp, p).map_err(ev(ctx, p))?;
            let grad_hb2 = rhs_mode.gradient(&half_b2, p).map_err(ev(ctx, p))?;
            let grad_tau = rhs_mode.gradient(tau, p).map_err(ev(ctx, p))?;
            let rhs = grad_pp + curl_b.cross(bv) * t + grad_hb2 * t + bv * bv.dot(grad_tau);
            let scale = grad_pp
                .norm()
                .max(t.abs() * curl_b.norm() * bv.norm())
                .max(t.abs() * grad_hb2.norm())
                .max(bv.norm_sq() * grad_tau.norm());
            Ok(vec![((div - rhs).norm(), scale)])
        },
    )?;
    Ok(ResidualReport {
        fd_step: Some(fd_step.to_f64_lossy()),
        ..report
    })
}

/// Checks the rescaling identity
/// (f a) x curl(f a) = f^2 a x curl a + (a^2/2) grad(f^2) - f (a . grad f) a
/// for an arbitrary smooth scalar f and vector field a.
pub fn check_scaled_curl<T: Real>(
    f: &ScalarField<T>,
    a: &VectorField<T>,
    samples: &SampleSet<T>,
    mode: DiffMode<T>,
) -> Result<ResidualReport, VerifyError> {
    let half = lit::<T>(0.5);
    let fa = a.scaled(f);
    let f_sq = f.squared();
    reduce_residuals(
        SystemKind::ScaledCurl,
        &["identity"],
        samples,
        mode,
        |p| {
            let ctx = "identity";
            let fa_v = fa.value_at(p);
            let curl_fa = mode.curl(&fa, p).map_err(ev(ctx, p))?;
            let lhs = fa_v.cross(curl_fa);

            let av = a.value_at(p);
            let fv = f.value_at(p);
            let curl_a = mode.curl(a, p).map_err(ev(ctx, p))?;
            let grad_f = mode.gradient(f, p).map_err(ev(ctx, p))?;
            let grad_f2 = mode.gradient(&f_sq, p).map_err(ev(ctx, p))?;
            let rhs = av.cross(curl_a) * (fv * fv) + grad_f2 * (av.norm_sq() * half)
                - av * (fv * av.dot(grad_f));
            let scale = (fa_v.norm() * curl_fa.norm())
                .max(fv * fv * av.norm() * curl_a.norm())
                .max(av.norm_sq() * half * grad_f2.norm())
                .max(fv.abs() * av.norm_sq() * grad_f.norm());
            Ok(vec![((lhs - rhs).norm(), scale)])
        },
    )
}

/// Checks the pointwise balance rho1 V1^2 - (1 - tau1) B1^2 =
/// c (rho V^2 - (1 - tau) B^2) between an input and an output state.
/// Pure value arithmetic; no derivatives of any kind.
pub fn check_energy_balance<T: Real>(
    input: &AnisotropicState<T>,
    output: &AnisotropicState<T>,
    c: T,
    samples: &SampleSet<T>,
) -> Result<ResidualReport, VerifyError> {
    fn parts<T: Real>(s: &AnisotropicState<T>) -> Result<(&VectorField<T>, &ScalarField<T>), VerifyError> {
        let v = s.flow().map_err(|_| VerifyError::MissingMetadata {
            what: "flow field V",
        })?;
        let rho = s.rho().map_err(|_| VerifyError::MissingMetadata {
            what: "density rho",
        })?;
        Ok((v, rho))
    }
    let (v0, rho0) = parts(input)?;
    let (v1, rho1) = parts(output)?;
    reduce_residuals(
        SystemKind::EnergyBalance,
        &["balance"],
        samples,
        DiffMode::Analytic,
        |p| {
            let one = T::one();
            let in_kin = rho0.value_at(p) * v0.value_at(p).norm_sq();
            let in_mag = (one - input.tau.value_at(p)) * input.b.value_at(p).norm_sq();
            let out_kin = rho1.value_at(p) * v1.value_at(p).norm_sq();
            let out_mag = (one - output.tau.value_at(p)) * output.b.value_at(p).norm_sq();
            let res = ((out_kin - out_mag) - c * (in_kin - in_mag)).abs();
            let scale = out_kin
                .abs()
                .max(out_mag.abs())
                .max((c * in_kin).abs())
                .max((c * in_mag).abs());
            Ok(vec![(res, scale)])
        },
    )
}
