//! One-dimensional functions with exact analytic derivatives.
//!
//! Transform parameters (the `f`, `g`, `a`, `b`, `m`, `n` knobs) and seed
//! profiles are drawn from this small closed algebra: polynomials, the usual
//! smooth kernels, affine compositions of those, plus sums, products, and
//! reciprocals so that derived quantities (Bernoulli functions, inverse
//! transform parameters) stay representable. Every variant evaluates both
//! itself and its first derivative in closed form; no numerical
//! differentiation is involved here.

use crate::scalar::{lit, Real};

/// Smooth scalar function of one variable with an exact derivative.
#[derive(Clone, Debug, PartialEq)]
pub enum FreeFunction<T> {
    /// Constant value.
    Constant(T),
    /// Polynomial with ascending coefficients: `c[0] + c[1] s + c[2] s^2 + ...`.
    Poly(Vec<T>),
    Exp,
    Sin,
    Cos,
    Sinh,
    Cosh,
    /// `outer_scale * f(inner_scale * s + inner_shift) + outer_shift`.
    Affine {
        f: Box<FreeFunction<T>>,
        inner_scale: T,
        inner_shift: T,
        outer_scale: T,
        outer_shift: T,
    },
    /// Pointwise sum `f + g`.
    Sum(Box<FreeFunction<T>>, Box<FreeFunction<T>>),
    /// Pointwise product `f * g`.
    Product(Box<FreeFunction<T>>, Box<FreeFunction<T>>),
    /// Pointwise reciprocal `1 / f`; evaluating at a zero of `f` yields a
    /// non-finite value, which downstream checks reject.
    Recip(Box<FreeFunction<T>>),
}

impl<T: Real> FreeFunction<T> {
    pub fn constant(c: T) -> Self {
        FreeFunction::Constant(c)
    }

    /// The identity map `s -> s`.
    pub fn identity() -> Self {
        FreeFunction::Poly(vec![T::zero(), T::one()])
    }

    /// Polynomial from ascending coefficients.
    pub fn poly(coeffs: &[T]) -> Self {
        FreeFunction::Poly(coeffs.to_vec())
    }

    pub fn exp() -> Self {
        FreeFunction::Exp
    }

    pub fn sin() -> Self {
        FreeFunction::Sin
    }

    pub fn cos() -> Self {
        FreeFunction::Cos
    }

    pub fn sinh() -> Self {
        FreeFunction::Sinh
    }

    pub fn cosh() -> Self {
        FreeFunction::Cosh
    }

    /// `self(inner_scale * s + inner_shift)`.
    pub fn of_affine(self, inner_scale: T, inner_shift: T) -> Self {
        FreeFunction::Affine {
            f: Box::new(self),
            inner_scale,
            inner_shift,
            outer_scale: T::one(),
            outer_shift: T::zero(),
        }
    }

    /// `k * self(s)`.
    pub fn scaled(self, k: T) -> Self {
        FreeFunction::Affine {
            f: Box::new(self),
            inner_scale: T::one(),
            inner_shift: T::zero(),
            outer_scale: k,
            outer_shift: T::zero(),
        }
    }

    /// `self(s) + c`.
    pub fn shifted(self, c: T) -> Self {
        FreeFunction::Affine {
            f: Box::new(self),
            inner_scale: T::one(),
            inner_shift: T::zero(),
            outer_scale: T::one(),
            outer_shift: c,
        }
    }

    pub fn plus(self, other: Self) -> Self {
        FreeFunction::Sum(Box::new(self), Box::new(other))
    }

    pub fn times(self, other: Self) -> Self {
        FreeFunction::Product(Box::new(self), Box::new(other))
    }

    pub fn squared(self) -> Self {
        let copy = self.clone();
        self.times(copy)
    }

    pub fn recip(self) -> Self {
        FreeFunction::Recip(Box::new(self))
    }

    /// Function value at `s`.
    pub fn eval(&self, s: T) -> T {
        match self {
            FreeFunction::Constant(c) => *c,
            FreeFunction::Poly(coeffs) => horner(coeffs, s),
            FreeFunction::Exp => s.exp(),
            FreeFunction::Sin => s.sin(),
            FreeFunction::Cos => s.cos(),
            FreeFunction::Sinh => s.sinh(),
            FreeFunction::Cosh => s.cosh(),
            FreeFunction::Affine {
                f,
                inner_scale,
                inner_shift,
                outer_scale,
                outer_shift,
            } => *outer_scale * f.eval(*inner_scale * s + *inner_shift) + *outer_shift,
            FreeFunction::Sum(f, g) => f.eval(s) + g.eval(s),
            FreeFunction::Product(f, g) => f.eval(s) * g.eval(s),
            FreeFunction::Recip(f) => T::one() / f.eval(s),
        }
    }

    /// First derivative at `s`, by the chain/product/quotient rules.
    pub fn deriv(&self, s: T) -> T {
        match self {
            FreeFunction::Constant(_) => T::zero(),
            FreeFunction::Poly(coeffs) => horner_deriv(coeffs, s),
            FreeFunction::Exp => s.exp(),
            FreeFunction::Sin => s.cos(),
            FreeFunction::Cos => -s.sin(),
            FreeFunction::Sinh => s.cosh(),
            FreeFunction::Cosh => s.sinh(),
            FreeFunction::Affine {
                f,
                inner_scale,
                inner_shift,
                outer_scale,
                ..
            } => *outer_scale * *inner_scale * f.deriv(*inner_scale * s + *inner_shift),
            FreeFunction::Sum(f, g) => f.deriv(s) + g.deriv(s),
            FreeFunction::Product(f, g) => f.deriv(s) * g.eval(s) + f.eval(s) * g.deriv(s),
            FreeFunction::Recip(f) => {
                let v = f.eval(s);
                -f.deriv(s) / (v * v)
            }
        }
    }
}

fn horner<T: Real>(coeffs: &[T], s: T) -> T {
    let mut acc = T::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * s + c;
    }
    acc
}

fn horner_deriv<T: Real>(coeffs: &[T], s: T) -> T {
    let mut acc = T::zero();
    for (k, &c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * s + c * lit::<T>(k as f64);
    }
    acc
}
