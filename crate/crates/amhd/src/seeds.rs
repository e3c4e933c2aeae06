//! Catalog of closed-form seed equilibria.
//!
//! Each constructor returns a state whose fields satisfy its governing system
//! identically (mu = 1, dimensionless units throughout), with analytic
//! jacobians written out by hand. Where a seed has an obvious flux function
//! it is attached as a `SurfaceFunction`; the ABC field is chaotic and has
//! none, so asking it to feed surface-based transforms is an error.

use crate::error::SeedError;
use crate::field::{ScalarField, VectorField};
use crate::freefn::FreeFunction;
use crate::linalg::{Mat3, Vec3};
use crate::sample::SampleSet;
use crate::scalar::{lit, Real};
use crate::state::{
    AnisotropicState, FlowingIsotropicState, StaticIsotropicState, SurfaceFunction, VacuumState,
};

/// Which harmonic potential the planar vacuum seed uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarmonicKind {
    /// phi = Re((x + iy)^n); n = 2 gives the saddle x^2 - y^2.
    Power(u32),
    /// phi = exp(x) cos(y).
    ExpTrig,
}

/// Integer power of the complex number `re + i im`.
fn zpow<T: Real>(re: T, im: T, n: u32) -> (T, T) {
    let (mut ar, mut ai) = (T::one(), T::zero());
    for _ in 0..n {
        let nr = ar * re - ai * im;
        let ni = ar * im + ai * re;
        ar = nr;
        ai = ni;
    }
    (ar, ai)
}

/// Planar vacuum field B = (phi_x, phi_y, bz0) from a harmonic potential phi.
///
/// The harmonic conjugate of phi is constant on field lines and, mapped
/// through `p_label` (identity when `None`), becomes the pressure label that
/// the vacuum transform consumes.
pub fn vacuum_planar_harmonic<T: Real>(
    kind: HarmonicKind,
    bz0: T,
    p_label: Option<&FreeFunction<T>>,
) -> Result<VacuumState<T>, SeedError> {
    let (b, conjugate) = match kind {
        HarmonicKind::Power(n) => {
            if n == 0 {
                return Err(SeedError::InvalidParameter {
                    seed: "vacuum_planar_harmonic",
                    why: "power must be at least 1".into(),
                });
            }
            let cn = lit::<T>(n as f64);
            let cn1 = lit::<T>((n as f64) * (n as f64 - 1.0));
            let b = VectorField::new(
                move |p: Vec3<T>| {
                    let (dr, di) = zpow(p.x, p.y, n - 1);
                    Vec3::new(cn * dr, -(cn * di), bz0)
                },
                move |p: Vec3<T>| {
                    if n < 2 {
                        return Mat3::zero();
                    }
                    let (wr, wi) = zpow(p.x, p.y, n - 2);
                    let (wr, wi) = (cn1 * wr, cn1 * wi);
                    Mat3::from_rows(
                        Vec3::new(wr, -wi, T::zero()),
                        Vec3::new(-wi, -wr, T::zero()),
                        Vec3::zero(),
                    )
                },
            );
            let conjugate = ScalarField::new(
                move |p: Vec3<T>| {
                    let (_, i) = zpow(p.x, p.y, n);
                    i
                },
                move |p: Vec3<T>| {
                    let (dr, di) = zpow(p.x, p.y, n - 1);
                    Vec3::new(cn * di, cn * dr, T::zero())
                },
            );
            (b, conjugate)
        }
        HarmonicKind::ExpTrig => {
            let b = VectorField::new(
                move |p: Vec3<T>| Vec3::new(p.x.exp() * p.y.cos(), -(p.x.exp() * p.y.sin()), bz0),
                move |p: Vec3<T>| {
                    let (ex, c, s) = (p.x.exp(), p.y.cos(), p.y.sin());
                    Mat3::from_rows(
                        Vec3::new(ex * c, -(ex * s), T::zero()),
                        Vec3::new(-(ex * s), -(ex * c), T::zero()),
                        Vec3::zero(),
                    )
                },
            );
            let conjugate = ScalarField::new(
                |p: Vec3<T>| p.x.exp() * p.y.sin(),
                |p: Vec3<T>| Vec3::new(p.x.exp() * p.y.sin(), p.x.exp() * p.y.cos(), T::zero()),
            );
            (b, conjugate)
        }
    };
    let identity = FreeFunction::identity();
    let q = p_label.unwrap_or(&identity);
    let label = ScalarField::compose(q, &conjugate);
    Ok(VacuumState {
        b,
        p_label: Some(label),
    })
}

/// Helical force-free field B = B0 (sin(alpha z), cos(alpha z), 0) with
/// curl B = alpha B, constant pressure, and flux function Psi = z.
pub fn force_free_helical<T: Real>(b0: T, alpha: T) -> StaticIsotropicState<T> {
    let b = VectorField::new(
        move |p: Vec3<T>| {
            let az = alpha * p.z;
            Vec3::new(b0 * az.sin(), b0 * az.cos(), T::zero())
        },
        move |p: Vec3<T>| {
            let az = alpha * p.z;
            Mat3::from_rows(
                Vec3::new(T::zero(), T::zero(), b0 * alpha * az.cos()),
                Vec3::new(T::zero(), T::zero(), -(b0 * alpha * az.sin())),
                Vec3::zero(),
            )
        },
    );
    StaticIsotropicState {
        b,
        p: ScalarField::constant(T::zero()),
        alpha: Some(ScalarField::constant(alpha)),
        psi: Some(SurfaceFunction::new(ScalarField::coordinate(2))),
    }
}

/// Arnold-Beltrami-Childress field with unit eigenvalue: curl B = B.
///
/// Chaotic field lines; carries no surface function.
pub fn abc_beltrami<T: Real>(a: T, b: T, c: T) -> StaticIsotropicState<T> {
    let field = VectorField::new(
        move |p: Vec3<T>| {
            Vec3::new(
                a * p.z.sin() + c * p.y.cos(),
                b * p.x.sin() + a * p.z.cos(),
                c * p.y.sin() + b * p.x.cos(),
            )
        },
        move |p: Vec3<T>| {
            Mat3::from_rows(
                Vec3::new(T::zero(), -(c * p.y.sin()), a * p.z.cos()),
                Vec3::new(b * p.x.cos(), T::zero(), -(a * p.z.sin())),
                Vec3::new(-(b * p.x.sin()), c * p.y.cos(), T::zero()),
            )
        },
    );
    StaticIsotropicState {
        b: field,
        p: ScalarField::constant(T::zero()),
        alpha: Some(ScalarField::constant(T::one())),
        psi: None,
    }
}

/// Theta pinch B = (0, 0, Bz(r^2)) with p = p0 - Bz^2 / 2 and Psi = r^2,
/// where r^2 = x^2 + y^2 and `bz_profile` maps r^2 to the axial field.
pub fn theta_pinch<T: Real>(bz_profile: &FreeFunction<T>, p0: T) -> StaticIsotropicState<T> {
    let r_sq = ScalarField::polynomial(&[((2, 0, 0), T::one()), ((0, 2, 0), T::one())]);
    let bz = ScalarField::compose(bz_profile, &r_sq);
    let zero = ScalarField::constant(T::zero());
    let b = VectorField::from_components(&zero, &zero, &bz);
    let p = ScalarField::constant(p0).sub(&bz.squared().scale(lit::<T>(0.5)));
    StaticIsotropicState {
        b,
        p,
        alpha: None,
        psi: Some(SurfaceFunction::new(r_sq)),
    }
}

/// Helical field with field-aligned flow V = lambda(z) B, constant density
/// and pressure. The Bernoulli function P0 + rho0 lambda(Psi)^2 B0^2 / 2 is
/// attached so that P = bernoulli(Psi) - rho V^2 / 2 holds identically.
pub fn field_aligned_flow<T: Real>(
    b0: T,
    alpha: T,
    lambda: &FreeFunction<T>,
    rho0: T,
    p0: T,
) -> Result<FlowingIsotropicState<T>, SeedError> {
    if !(rho0 > T::zero()) {
        return Err(SeedError::InvalidParameter {
            seed: "field_aligned_flow",
            why: format!("rho0 = {} must be positive", rho0.to_f64_lossy()),
        });
    }
    let base = force_free_helical(b0, alpha);
    let z = ScalarField::coordinate(2);
    let lam = ScalarField::compose(lambda, &z);
    let v = base.b.scaled(&lam);
    let half_rho_b2 = lit::<T>(0.5) * rho0 * b0 * b0;
    let bernoulli = FreeFunction::constant(p0)
        .plus(lambda.clone().squared().scaled(half_rho_b2));
    Ok(FlowingIsotropicState {
        b: base.b,
        v,
        rho: ScalarField::constant(rho0),
        pressure: ScalarField::constant(p0),
        psi: SurfaceFunction::new(z),
        bernoulli,
    })
}

/// Reinterprets a static isotropic equilibrium as an anisotropic state with
/// zero flow, zero anisotropy, p_perp = p, and density rho(Psi) > 0.
///
/// This is the bridge that lets static seeds feed the anisotropic symmetry
/// transform, which needs both a density and a (possibly zero) flow.
pub fn embed_as_anisotropic<T: Real>(
    s: &StaticIsotropicState<T>,
    rho: &FreeFunction<T>,
    samples: &SampleSet<T>,
) -> Result<AnisotropicState<T>, SeedError> {
    let psi = s.psi.as_ref().ok_or(SeedError::UnsupportedMetadata {
        seed: "embed_as_anisotropic",
        what: "a surface function",
    })?;
    for p in samples.points() {
        let label = psi.psi.value_at(p);
        let value = rho.eval(label);
        if !(value > T::zero() && value.is_finite()) {
            return Err(SeedError::NonPositiveDensity {
                at: label.to_f64_lossy(),
                value: value.to_f64_lossy(),
            });
        }
    }
    Ok(AnisotropicState {
        b: s.b.clone(),
        v: Some(VectorField::zero()),
        rho: Some(ScalarField::compose(rho, &psi.psi)),
        p_perp: s.p.clone(),
        tau: ScalarField::constant(T::zero()),
        psi: Some(psi.clone()),
    })
}

/// One catalog entry: name, one-line description, parameters, and which
/// transforms the seed can feed directly.
pub struct SeedInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [(&'static str, &'static str)],
    pub feeds: &'static [&'static str],
}

/// The seed catalog, alphabetical by name.
pub fn catalog() -> &'static [SeedInfo] {
    &[
        SeedInfo {
            name: "abc_beltrami",
            summary: "Arnold-Beltrami-Childress field, curl B = B; no surface function, and the constant pressure reduces the static map to constant f",
            params: &[
                ("a", "x-mode amplitude"),
                ("b", "y-mode amplitude"),
                ("c", "z-mode amplitude"),
            ],
            feeds: &["backlund_static"],
        },
        SeedInfo {
            name: "field_aligned_flow",
            summary: "helical field with V = lambda(z) B, constant density and pressure, Psi = z",
            params: &[
                ("b0", "field magnitude"),
                ("alpha", "helical pitch"),
                ("lambda", "free function of z scaling the flow"),
                ("rho0", "constant density, positive"),
                ("p0", "constant pressure"),
            ],
            feeds: &["backlund_flowing"],
        },
        SeedInfo {
            name: "force_free_helical",
            summary: "helical field B0 (sin alpha z, cos alpha z, 0), curl B = alpha B, Psi = z",
            params: &[("b0", "field magnitude"), ("alpha", "helical pitch")],
            feeds: &["backlund_static", "embed"],
        },
        SeedInfo {
            name: "theta_pinch",
            summary: "axial field Bz(r^2) balanced by p = p0 - Bz^2/2, Psi = r^2",
            params: &[
                ("bz_profile", "free function mapping r^2 to Bz"),
                ("p0", "pressure offset"),
            ],
            feeds: &["backlund_static", "embed"],
        },
        SeedInfo {
            name: "vacuum_planar_harmonic",
            summary: "B = (phi_x, phi_y, bz0) from a harmonic potential; harmonic conjugate labels the field lines",
            params: &[
                ("kind", "`power` (with n) or `exp_trig`"),
                ("n", "power of x + iy (power kind only)"),
                ("bz0", "uniform axial component"),
                ("p_label", "optional free function applied to the conjugate"),
            ],
            feeds: &["backlund_vacuum"],
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd;

    fn pt(x: f64, y: f64, z: f64) -> Vec3<f64> {
        Vec3::new(x, y, z)
    }

    fn samples(n: usize) -> Vec<Vec3<f64>> {
        SampleSet::unit_cube(n).points()
    }

    #[test]
    fn power_two_harmonic_is_the_saddle_field() {
        let s = vacuum_planar_harmonic(HarmonicKind::Power(2), 0.0, None).unwrap();
        let q = pt(1.0, 2.0, 0.3);
        assert_eq!(s.b.value_at(q), pt(2.0, -4.0, 0.0));
        // Conjugate of x^2 - y^2 is 2xy.
        let label = s.p_label.as_ref().unwrap();
        assert_eq!(label.value_at(q), 4.0);
    }

    #[test]
    fn harmonic_seeds_are_curl_and_divergence_free() {
        for kind in [HarmonicKind::Power(2), HarmonicKind::Power(4), HarmonicKind::ExpTrig] {
            let s = vacuum_planar_harmonic(kind, 1.0, None).unwrap();
            for p in samples(200) {
                assert!(s.b.curl_at(p).max_abs() < 1e-12, "{kind:?} curl at {p:?}");
                assert!(s.b.divergence_at(p).abs() < 1e-12, "{kind:?} div at {p:?}");
            }
        }
    }

    #[test]
    fn harmonic_label_is_constant_on_field_lines() {
        let q = FreeFunction::sin().shifted(2.0);
        let s = vacuum_planar_harmonic(HarmonicKind::ExpTrig, 1.5, Some(&q)).unwrap();
        let label = s.p_label.as_ref().unwrap();
        for p in samples(200) {
            let b = s.b.value_at(p);
            let g = label.gradient_at(p);
            let misalign = b.dot(g).abs() / (b.norm() * g.norm() + 1e-300);
            assert!(misalign < 1e-12, "label drifts along field lines at {p:?}");
        }
    }

    #[test]
    fn harmonic_jacobian_matches_finite_differences() {
        let s = vacuum_planar_harmonic(HarmonicKind::Power(3), 2.0, None).unwrap();
        for p in samples(100) {
            let an = s.b.jacobian_at(p);
            let num = fd::fd_jacobian(&s.b, p, 1e-4).unwrap();
            assert!((an - num).max_abs() < 1e-6);
        }
    }

    #[test]
    fn zero_power_is_rejected() {
        assert!(vacuum_planar_harmonic::<f64>(HarmonicKind::Power(0), 1.0, None).is_err());
    }

    #[test]
    fn helical_field_is_beltrami_with_constant_magnitude() {
        let s = force_free_helical(1.0, 2.0);
        assert_eq!(s.b.value_at(Vec3::zero()), pt(0.0, 1.0, 0.0));
        for p in samples(200) {
            let b = s.b.value_at(p);
            let curl = s.b.curl_at(p);
            assert!((curl - b * 2.0).max_abs() < 1e-12, "curl B != 2B at {p:?}");
            assert!((b.norm_sq() - 1.0).abs() < 1e-12);
            assert!(s.b.divergence_at(p).abs() < 1e-12);
        }
    }

    #[test]
    fn helical_flux_function_is_orthogonal_to_b() {
        let s = force_free_helical(2.0, 0.7);
        let psi = &s.psi.as_ref().unwrap().psi;
        for p in samples(100) {
            assert_eq!(s.b.value_at(p).dot(psi.gradient_at(p)), 0.0);
        }
    }

    #[test]
    fn abc_unit_coefficients_at_origin() {
        let s = abc_beltrami(1.0, 1.0, 1.0);
        let b = s.b.value_at(Vec3::zero());
        assert_eq!(b, pt(1.0, 1.0, 1.0));
        for p in samples(200) {
            let diff = s.b.curl_at(p) - s.b.value_at(p);
            assert!(diff.max_abs() < 1e-12, "curl B != B at {p:?}");
            assert!(s.b.divergence_at(p).abs() < 1e-12);
        }
    }

    #[test]
    fn abc_reduces_to_helical_when_two_amplitudes_vanish() {
        // Only the A-mode: B = (A sin z, A cos z, 0), the helical field.
        let s = abc_beltrami(1.5, 0.0, 0.0);
        let h = force_free_helical(1.5, 1.0);
        for p in samples(50) {
            assert!((s.b.value_at(p) - h.b.value_at(p)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn theta_pinch_balances_pressure_against_field() {
        // Bz = exp(-r^2 / 2).
        let profile = FreeFunction::exp().of_affine(-0.5, 0.0);
        let s = theta_pinch(&profile, 1.0);
        for p in samples(200) {
            let force = s.b.curl_at(p).cross(s.b.value_at(p));
            let grad_p = s.p.gradient_at(p);
            assert!((force - grad_p).max_abs() < 1e-12, "imbalance at {p:?}");
            assert!(s.b.divergence_at(p).abs() < 1e-15);
            // Psi = r^2 is exactly orthogonal to B = Bz e_z.
            let psi = &s.psi.as_ref().unwrap().psi;
            assert_eq!(s.b.value_at(p).dot(psi.gradient_at(p)), 0.0);
        }
    }

    #[test]
    fn constant_theta_profile_is_a_uniform_field() {
        let s = theta_pinch(&FreeFunction::constant(2.0), 0.5);
        for p in samples(50) {
            assert_eq!(s.b.value_at(p), pt(0.0, 0.0, 2.0));
            assert_eq!(s.b.curl_at(p), Vec3::zero());
            assert_eq!(s.p.value_at(p), 0.5 - 2.0);
        }
    }

    #[test]
    fn field_aligned_flow_satisfies_bernoulli_relation() {
        let lambda = FreeFunction::<f64>::identity();
        let s = field_aligned_flow(1.0, 1.0, &lambda, 1.0, 1.0).unwrap();
        assert_eq!(s.v.value_at(pt(0.0, 0.0, 0.5)), s.b.value_at(pt(0.0, 0.0, 0.5)) * 0.5);
        for p in samples(200) {
            let psi_val = s.psi.psi.value_at(p);
            let bern = s.bernoulli.eval(psi_val);
            let v2 = s.v.value_at(p).norm_sq();
            let rho = s.rho.value_at(p);
            let pressure = s.pressure.value_at(p);
            assert!(
                (pressure - (bern - 0.5 * rho * v2)).abs() < 1e-12,
                "Bernoulli relation broken at {p:?}"
            );
        }
    }

    #[test]
    fn zero_flow_scaling_reduces_to_the_static_seed() {
        let s = field_aligned_flow(1.0, 2.0, &FreeFunction::constant(0.0), 1.0, 0.25).unwrap();
        for p in samples(50) {
            assert_eq!(s.v.value_at(p), Vec3::zero());
            assert_eq!(s.v.jacobian_at(p).max_abs(), 0.0);
        }
    }

    #[test]
    fn non_positive_density_is_rejected() {
        let err = field_aligned_flow(1.0, 1.0, &FreeFunction::identity(), 0.0, 1.0);
        assert!(err.is_err());
    }

    #[test]
    fn embed_reinterprets_static_state_without_changing_fields() {
        let pinch = theta_pinch(&FreeFunction::exp().of_affine(-0.5, 0.0), 1.0);
        let cube = SampleSet::unit_cube(100);
        let aniso = embed_as_anisotropic(&pinch, &FreeFunction::constant(1.0), &cube).unwrap();
        for p in samples(50) {
            assert_eq!(aniso.b.value_at(p), pinch.b.value_at(p));
            assert_eq!(aniso.p_perp.value_at(p), pinch.p.value_at(p));
            assert_eq!(aniso.tau.value_at(p), 0.0);
            assert_eq!(aniso.v.as_ref().unwrap().value_at(p), Vec3::zero());
            assert_eq!(aniso.rho.as_ref().unwrap().value_at(p), 1.0);
        }
    }

    #[test]
    fn embed_requires_a_surface_function() {
        let abc = abc_beltrami(1.0, 1.0, 1.0);
        let cube = SampleSet::unit_cube(10);
        let err = embed_as_anisotropic(&abc, &FreeFunction::constant(1.0), &cube);
        assert!(matches!(err, Err(SeedError::UnsupportedMetadata { .. })));
    }

    #[test]
    fn embed_rejects_non_positive_density_profiles() {
        let pinch = theta_pinch(&FreeFunction::constant(1.0), 1.0);
        let cube = SampleSet::unit_cube(100);
        // rho = psi - 10 is negative on the whole unit cube (psi = r^2 <= 2).
        let rho = FreeFunction::poly(&[-10.0, 1.0]);
        assert!(matches!(
            embed_as_anisotropic(&pinch, &rho, &cube),
            Err(SeedError::NonPositiveDensity { .. })
        ));
    }

    #[test]
    fn catalog_is_alphabetical_and_complete() {
        let names: Vec<&str> = catalog().iter().map(|s| s.name).collect();
        let mut sorted = names.clone();
        sorted.sort_unstable();
        assert_eq!(names, sorted);
        assert_eq!(names.len(), 5);
    }
}
