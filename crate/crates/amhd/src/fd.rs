//! Independent finite-difference differentiator.
//!
//! Second-order central differences over *value* closures only. This module
//! never looks at a field's analytic gradient or jacobian, which is what
//! makes it a genuine cross-check: the residual verifier routes every
//! differential quantity through here, so an equilibrium passes verification
//! only if its values (not its claimed derivatives) satisfy the equations.
//!
//! Truncation error scales as h^2; halving the step shrinks smooth-field
//! errors by about 4x, which the verifier's convergence tests pin down.

use crate::error::FieldError;
use crate::field::{ScalarField, VectorField};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::{lit, Real};

/// Central-difference gradient of an arbitrary scalar value closure.
pub fn gradient_of<T: Real>(
    f: impl Fn(Vec3<T>) -> T,
    p: Vec3<T>,
    h: T,
) -> Result<Vec3<T>, FieldError> {
    let two_h = lit::<T>(2.0) * h;
    let mut out = Vec3::zero();
    for axis in 0..3 {
        let e = Vec3::unit(axis) * h;
        let (hi, lo) = (f(p + e), f(p - e));
        if !(hi.is_finite() && lo.is_finite()) {
            return Err(FieldError::stencil(p));
        }
        let d = (hi - lo) / two_h;
        match axis {
            0 => out.x = d,
            1 => out.y = d,
            _ => out.z = d,
        }
    }
    Ok(out)
}

/// Central-difference jacobian of an arbitrary vector value closure,
/// `rows[i][j] = d v_i / d x_j`.
pub fn jacobian_of<T: Real>(
    f: impl Fn(Vec3<T>) -> Vec3<T>,
    p: Vec3<T>,
    h: T,
) -> Result<Mat3<T>, FieldError> {
    let two_h = lit::<T>(2.0) * h;
    let mut m = Mat3::zero();
    for j in 0..3 {
        let e = Vec3::unit(j) * h;
        let (hi, lo) = (f(p + e), f(p - e));
        if !(hi.is_finite() && lo.is_finite()) {
            return Err(FieldError::stencil(p));
        }
        let col = (hi - lo) * (T::one() / two_h);
        m.rows[0][j] = col.x;
        m.rows[1][j] = col.y;
        m.rows[2][j] = col.z;
    }
    Ok(m)
}

/// Finite-difference gradient of a scalar field's values.
pub fn fd_gradient<T: Real>(
    s: &ScalarField<T>,
    p: Vec3<T>,
    h: T,
) -> Result<Vec3<T>, FieldError> {
    gradient_of(|q| s.value_at(q), p, h)
}

/// Finite-difference jacobian of a vector field's values.
pub fn fd_jacobian<T: Real>(
    v: &VectorField<T>,
    p: Vec3<T>,
    h: T,
) -> Result<Mat3<T>, FieldError> {
    jacobian_of(|q| v.value_at(q), p, h)
}

/// Finite-difference divergence, the trace of [`fd_jacobian`].
pub fn fd_divergence<T: Real>(v: &VectorField<T>, p: Vec3<T>, h: T) -> Result<T, FieldError> {
    Ok(fd_jacobian(v, p, h)?.trace())
}

/// Finite-difference curl, from [`fd_jacobian`].
pub fn fd_curl<T: Real>(v: &VectorField<T>, p: Vec3<T>, h: T) -> Result<Vec3<T>, FieldError> {
    Ok(fd_jacobian(v, p, h)?.curl())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::SampleSet;

    #[test]
    fn quadratic_is_differentiated_exactly() {
        // v = (x^2, 0, 0) at (1,0,0): J[0][0] = 2 exactly for central differences.
        let v = VectorField::<f64>::from_components(
            &ScalarField::polynomial(&[((2, 0, 0), 1.0)]),
            &ScalarField::constant(0.0),
            &ScalarField::constant(0.0),
        );
        let j = fd_jacobian(&v, Vec3::new(1.0, 0.0, 0.0), 1e-3).unwrap();
        assert!((j.rows[0][0] - 2.0).abs() < 1e-9);
        assert_eq!(j.rows[1][1], 0.0);
    }

    #[test]
    fn constant_field_has_zero_jacobian() {
        let v = VectorField::constant(Vec3::new(3.0, -1.0, 2.0));
        let j = fd_jacobian(&v, Vec3::new(0.2, 0.4, 0.8), 1e-3).unwrap();
        assert_eq!(j.max_abs(), 0.0);
    }

    #[test]
    fn trig_field_matches_analytic_jacobian_to_truncation_order() {
        let v = VectorField::new(
            |p: Vec3<f64>| Vec3::new((2.0 * p.z).sin(), (2.0 * p.z).cos(), 0.0),
            |p: Vec3<f64>| {
                Mat3::from_rows(
                    Vec3::new(0.0, 0.0, 2.0 * (2.0 * p.z).cos()),
                    Vec3::new(0.0, 0.0, -2.0 * (2.0 * p.z).sin()),
                    Vec3::zero(),
                )
            },
        );
        let h = 1e-3;
        for p in SampleSet::unit_cube(100).points() {
            let fd = fd_jacobian(&v, p, h).unwrap();
            let an = v.jacobian_at(p);
            let err = (fd - an).max_abs();
            assert!(err < 10.0 * h * h, "fd error {err} too large at {p:?}");
        }
    }

    #[test]
    fn halving_h_quarters_the_error() {
        let s = ScalarField::new(|p: Vec3<f64>| (3.0 * p.x).sin(), |_| Vec3::zero());
        let p = Vec3::new(0.3f64, 0.0, 0.0);
        let exact = 3.0 * (3.0 * p.x).cos();
        let e1 = (fd_gradient(&s, p, 1e-2).unwrap().x - exact).abs();
        let e2 = (fd_gradient(&s, p, 5e-3).unwrap().x - exact).abs();
        let ratio = e1 / e2;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio} not near 4");
    }

    #[test]
    fn singular_stencil_is_an_error() {
        let s = ScalarField::coordinate(0).recip();
        let err = fd_gradient(&s, Vec3::new(1e-3, 0.0, 0.0), 1e-3);
        assert!(err.is_err());
    }
}
