//! Scalar and vector fields on R^3 with analytically propagated derivatives.
//!
//! A field is a pair of closures: the pointwise value and its exact first
//! derivative (gradient for scalars, jacobian for vectors). Every combinator
//! builds the derivative of the result from the derivatives of the operands
//! by the product/chain rules, so constructed equilibria carry exact
//! jacobians all the way through a transform chain. Divergence and curl are
//! always derived from the jacobian, never stored separately.
//!
//! The independent finite-difference oracle that cross-checks these closures
//! lives in [`crate::fd`] and touches only the value closures.

use crate::error::FieldError;
use crate::freefn::FreeFunction;
use crate::linalg::{Mat3, Vec3};
use crate::scalar::{lit, Real};
use std::sync::Arc;

type ScalarFn<T> = Arc<dyn Fn(Vec3<T>) -> T + Send + Sync>;
type GradFn<T> = Arc<dyn Fn(Vec3<T>) -> Vec3<T> + Send + Sync>;
type VecFn<T> = Arc<dyn Fn(Vec3<T>) -> Vec3<T> + Send + Sync>;
type JacFn<T> = Arc<dyn Fn(Vec3<T>) -> Mat3<T> + Send + Sync>;

/// Smooth scalar field with an exact gradient.
#[derive(Clone)]
pub struct ScalarField<T: Real> {
    value: ScalarFn<T>,
    gradient: GradFn<T>,
}

impl<T: Real> std::fmt::Debug for ScalarField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField").finish_non_exhaustive()
    }
}

impl<T: Real> ScalarField<T> {
    /// Builds a field from a value closure and its hand-derived gradient.
    pub fn new(
        value: impl Fn(Vec3<T>) -> T + Send + Sync + 'static,
        gradient: impl Fn(Vec3<T>) -> Vec3<T> + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        }
    }

    pub fn constant(c: T) -> Self {
        ScalarField::new(move |_| c, |_| Vec3::zero())
    }

    /// The coordinate function x, y, or z.
    pub fn coordinate(axis: usize) -> Self {
        assert!(axis < 3, "axis out of range: {axis}");
        ScalarField::new(move |p| p[axis], move |_| Vec3::unit(axis))
    }

    /// Trivariate polynomial from `((px, py, pz), coefficient)` monomials.
    pub fn polynomial(terms: &[((u32, u32, u32), T)]) -> Self {
        let base: Vec<PolyTerm<T>> = terms
            .iter()
            .map(|&((px, py, pz), c)| PolyTerm { pows: [px, py, pz], c })
            .collect();
        let dx = diff_terms(&base, 0);
        let dy = diff_terms(&base, 1);
        let dz = diff_terms(&base, 2);
        ScalarField::new(
            move |p| eval_terms(&base, p),
            move |p| Vec3::new(eval_terms(&dx, p), eval_terms(&dy, p), eval_terms(&dz, p)),
        )
    }

    /// Composition `f(inner(p))` with the chain-rule gradient.
    pub fn compose(f: &FreeFunction<T>, inner: &ScalarField<T>) -> Self {
        let (sv, sg) = (inner.value.clone(), inner.gradient.clone());
        let f_val = f.clone();
        let f_der = f.clone();
        let sv2 = inner.value.clone();
        ScalarField {
            value: Arc::new(move |p| f_val.eval(sv(p))),
            gradient: Arc::new(move |p| sg(p) * f_der.deriv(sv2(p))),
        }
    }

    pub fn value_at(&self, p: Vec3<T>) -> T {
        (self.value)(p)
    }

    pub fn gradient_at(&self, p: Vec3<T>) -> Vec3<T> {
        (self.gradient)(p)
    }

    /// Value with a finiteness check.
    pub fn try_value_at(&self, p: Vec3<T>) -> Result<T, FieldError> {
        let v = self.value_at(p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(FieldError::non_finite("scalar value", p))
        }
    }

    /// Gradient with a finiteness check.
    pub fn try_gradient_at(&self, p: Vec3<T>) -> Result<Vec3<T>, FieldError> {
        let g = self.gradient_at(p);
        if g.is_finite() {
            Ok(g)
        } else {
            Err(FieldError::non_finite("scalar gradient", p))
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (av, ag) = (self.value.clone(), self.gradient.clone());
        let (bv, bg) = (other.value.clone(), other.gradient.clone());
        ScalarField {
            value: Arc::new(move |p| av(p) + bv(p)),
            gradient: Arc::new(move |p| ag(p) + bg(p)),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (av, ag) = (self.value.clone(), self.gradient.clone());
        let (bv, bg) = (other.value.clone(), other.gradient.clone());
        ScalarField {
            value: Arc::new(move |p| av(p) - bv(p)),
            gradient: Arc::new(move |p| ag(p) - bg(p)),
        }
    }

    /// Product with the product-rule gradient.
    pub fn mul(&self, other: &Self) -> Self {
        let (av, ag) = (self.value.clone(), self.gradient.clone());
        let (bv, bg) = (other.value.clone(), other.gradient.clone());
        let (av2, bv2) = (self.value.clone(), other.value.clone());
        ScalarField {
            value: Arc::new(move |p| av(p) * bv(p)),
            gradient: Arc::new(move |p| ag(p) * bv2(p) + bg(p) * av2(p)),
        }
    }

    /// Quotient with the quotient-rule gradient.
    pub fn div(&self, other: &Self) -> Self {
        let (av, bv) = (self.value.clone(), other.value.clone());
        let (av2, ag, bv2, bg) = (
            self.value.clone(),
            self.gradient.clone(),
            other.value.clone(),
            other.gradient.clone(),
        );
        ScalarField {
            value: Arc::new(move |p| av(p) / bv(p)),
            gradient: Arc::new(move |p| {
                let b = bv2(p);
                (ag(p) * b - bg(p) * av2(p)) * (T::one() / (b * b))
            }),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-T::one())
    }

    pub fn scale(&self, k: T) -> Self {
        let (av, ag) = (self.value.clone(), self.gradient.clone());
        ScalarField {
            value: Arc::new(move |p| av(p) * k),
            gradient: Arc::new(move |p| ag(p) * k),
        }
    }

    pub fn offset(&self, c: T) -> Self {
        let (av, ag) = (self.value.clone(), self.gradient.clone());
        ScalarField {
            value: Arc::new(move |p| av(p) + c),
            gradient: Arc::new(move |p| ag(p)),
        }
    }

    /// Square root; non-positive values propagate as non-finite gradients.
    pub fn sqrt(&self) -> Self {
        let (av, ag) = (self.value.clone(), self.gradient.clone());
        let av2 = self.value.clone();
        ScalarField {
            value: Arc::new(move |p| av(p).sqrt()),
            gradient: Arc::new(move |p| {
                let half = lit::<T>(0.5);
                ag(p) * (half / av2(p).sqrt())
            }),
        }
    }

    pub fn recip(&self) -> Self {
        let (av, ag) = (self.value.clone(), self.gradient.clone());
        let av2 = self.value.clone();
        ScalarField {
            value: Arc::new(move |p| T::one() / av(p)),
            gradient: Arc::new(move |p| {
                let v = av2(p);
                ag(p) * (-T::one() / (v * v))
            }),
        }
    }

    pub fn squared(&self) -> Self {
        self.mul(self)
    }
}

/// Smooth vector field with an exact jacobian (`rows[i][j] = d v_i / d x_j`).
#[derive(Clone)]
pub struct VectorField<T: Real> {
    value: VecFn<T>,
    jacobian: JacFn<T>,
}

impl<T: Real> std::fmt::Debug for VectorField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorField").finish_non_exhaustive()
    }
}

impl<T: Real> VectorField<T> {
    /// Builds a field from a value closure and its hand-derived jacobian.
    pub fn new(
        value: impl Fn(Vec3<T>) -> Vec3<T> + Send + Sync + 'static,
        jacobian: impl Fn(Vec3<T>) -> Mat3<T> + Send + Sync + 'static,
    ) -> Self {
        VectorField {
            value: Arc::new(value),
            jacobian: Arc::new(jacobian),
        }
    }

    pub fn constant(v: Vec3<T>) -> Self {
        VectorField::new(move |_| v, |_| Mat3::zero())
    }

    pub fn zero() -> Self {
        VectorField::constant(Vec3::zero())
    }

    /// Assembles a vector field from three scalar components; jacobian rows
    /// are the component gradients.
    pub fn from_components(sx: &ScalarField<T>, sy: &ScalarField<T>, sz: &ScalarField<T>) -> Self {
        let (xv, yv, zv) = (sx.value.clone(), sy.value.clone(), sz.value.clone());
        let (xg, yg, zg) = (sx.gradient.clone(), sy.gradient.clone(), sz.gradient.clone());
        VectorField {
            value: Arc::new(move |p| Vec3::new(xv(p), yv(p), zv(p))),
            jacobian: Arc::new(move |p| Mat3::from_rows(xg(p), yg(p), zg(p))),
        }
    }

    pub fn value_at(&self, p: Vec3<T>) -> Vec3<T> {
        (self.value)(p)
    }

    pub fn jacobian_at(&self, p: Vec3<T>) -> Mat3<T> {
        (self.jacobian)(p)
    }

    pub fn try_value_at(&self, p: Vec3<T>) -> Result<Vec3<T>, FieldError> {
        let v = self.value_at(p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(FieldError::non_finite("vector value", p))
        }
    }

    pub fn try_jacobian_at(&self, p: Vec3<T>) -> Result<Mat3<T>, FieldError> {
        let j = self.jacobian_at(p);
        if j.is_finite() {
            Ok(j)
        } else {
            Err(FieldError::non_finite("vector jacobian", p))
        }
    }

    /// Divergence, the trace of the analytic jacobian.
    pub fn divergence_at(&self, p: Vec3<T>) -> T {
        self.jacobian_at(p).trace()
    }

    /// Curl, from the antisymmetric part of the analytic jacobian.
    pub fn curl_at(&self, p: Vec3<T>) -> Vec3<T> {
        self.jacobian_at(p).curl()
    }

    /// Directional derivative `(v . grad) s` at a point.
    ///
    /// Returned pointwise rather than as a `ScalarField`: a field result
    /// would need second derivatives of `s` for its own gradient, and this
    /// crate deliberately stops at first-order propagation.
    pub fn advect_scalar_at(&self, s: &ScalarField<T>, p: Vec3<T>) -> T {
        self.value_at(p).dot(s.gradient_at(p))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (av, aj) = (self.value.clone(), self.jacobian.clone());
        let (bv, bj) = (other.value.clone(), other.jacobian.clone());
        VectorField {
            value: Arc::new(move |p| av(p) + bv(p)),
            jacobian: Arc::new(move |p| aj(p) + bj(p)),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (av, aj) = (self.value.clone(), self.jacobian.clone());
        let (bv, bj) = (other.value.clone(), other.jacobian.clone());
        VectorField {
            value: Arc::new(move |p| av(p) - bv(p)),
            jacobian: Arc::new(move |p| aj(p) - bj(p)),
        }
    }

    pub fn scale(&self, k: T) -> Self {
        let (av, aj) = (self.value.clone(), self.jacobian.clone());
        VectorField {
            value: Arc::new(move |p| av(p) * k),
            jacobian: Arc::new(move |p| aj(p).scale(k)),
        }
    }

    /// Pointwise scaling by a scalar field: `J(s v) = s J_v + v (grad s)^T`.
    pub fn scaled(&self, s: &ScalarField<T>) -> Self {
        let (vv, vj) = (self.value.clone(), self.jacobian.clone());
        let (sv, sg) = (s.value.clone(), s.gradient.clone());
        let (vv2, sv2) = (self.value.clone(), s.value.clone());
        VectorField {
            value: Arc::new(move |p| vv(p) * sv(p)),
            jacobian: Arc::new(move |p| {
                vj(p).scale(sv2(p)) + Mat3::outer(vv2(p), sg(p))
            }),
        }
    }

    /// Cross product; jacobian columns follow the product rule
    /// `d_j (a x b) = (d_j a) x b + a x (d_j b)`.
    pub fn cross(&self, other: &Self) -> Self {
        let (av, bv) = (self.value.clone(), other.value.clone());
        let (av2, aj, bv2, bj) = (
            self.value.clone(),
            self.jacobian.clone(),
            other.value.clone(),
            other.jacobian.clone(),
        );
        VectorField {
            value: Arc::new(move |p| av(p).cross(bv(p))),
            jacobian: Arc::new(move |p| {
                let (a, b) = (av2(p), bv2(p));
                let (ja, jb) = (aj(p), bj(p));
                let mut m = Mat3::zero();
                for j in 0..3 {
                    let col = ja.col(j).cross(b) + a.cross(jb.col(j));
                    m.rows[0][j] = col.x;
                    m.rows[1][j] = col.y;
                    m.rows[2][j] = col.z;
                }
                m
            }),
        }
    }

    /// Dot product as a scalar field; `grad(a . b) = J_a^T b + J_b^T a`.
    pub fn dot(&self, other: &Self) -> ScalarField<T> {
        let (av, bv) = (self.value.clone(), other.value.clone());
        let (av2, aj, bv2, bj) = (
            self.value.clone(),
            self.jacobian.clone(),
            other.value.clone(),
            other.jacobian.clone(),
        );
        ScalarField {
            value: Arc::new(move |p| av(p).dot(bv(p))),
            gradient: Arc::new(move |p| {
                aj(p).transpose().mul_vec(bv2(p)) + bj(p).transpose().mul_vec(av2(p))
            }),
        }
    }

    /// Squared magnitude `|v|^2` as a scalar field.
    pub fn norm_sq(&self) -> ScalarField<T> {
        self.dot(self)
    }
}

struct PolyTerm<T> {
    pows: [u32; 3],
    c: T,
}

fn eval_terms<T: Real>(terms: &[PolyTerm<T>], p: Vec3<T>) -> T {
    let mut acc = T::zero();
    for t in terms {
        let m = t.c
            * p.x.powi(t.pows[0] as i32)
            * p.y.powi(t.pows[1] as i32)
            * p.z.powi(t.pows[2] as i32);
        acc = acc + m;
    }
    acc
}

fn diff_terms<T: Real>(terms: &[PolyTerm<T>], axis: usize) -> Vec<PolyTerm<T>> {
    terms
        .iter()
        .filter(|t| t.pows[axis] > 0)
        .map(|t| {
            let mut pows = t.pows;
            pows[axis] -= 1;
            PolyTerm {
                pows,
                c: t.c * lit::<T>(t.pows[axis] as f64),
            }
        })
        .collect()
}
