//! Minimal 3-vector and 3x3-matrix types.
//!
//! Jacobians follow the row convention `J[i][j] = d v_i / d x_j`, so the
//! trace is the divergence and the antisymmetric part yields the curl.

use crate::scalar::Real;
use std::ops::{Add, Index, Mul, Neg, Sub};

/// Point or vector in R^3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3 { x, y, z }
    }

    pub fn zero() -> Self {
        Vec3::new(T::zero(), T::zero(), T::zero())
    }

    /// Unit vector along coordinate axis 0, 1, or 2.
    pub fn unit(axis: usize) -> Self {
        match axis {
            0 => Vec3::new(T::one(), T::zero(), T::zero()),
            1 => Vec3::new(T::zero(), T::one(), T::zero()),
            2 => Vec3::new(T::zero(), T::zero(), T::one()),
            _ => panic!("axis out of range: {axis}"),
        }
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_sq().sqrt()
    }

    /// Largest component magnitude.
    pub fn max_abs(self) -> T {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Componentwise product.
    pub fn hadamard(self, o: Self) -> Self {
        Vec3::new(self.x * o.x, self.y * o.y, self.z * o.z)
    }

    pub fn to_f64(self) -> [f64; 3] {
        [
            self.x.to_f64_lossy(),
            self.y.to_f64_lossy(),
            self.z.to_f64_lossy(),
        ]
    }
}

impl<T: Real> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("axis out of range: {i}"),
        }
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Row-major 3x3 matrix; for jacobians, `rows[i][j] = d v_i / d x_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3<T> {
    pub rows: [[T; 3]; 3],
}

impl<T: Real> Mat3<T> {
    pub fn new(rows: [[T; 3]; 3]) -> Self {
        Mat3 { rows }
    }

    pub fn zero() -> Self {
        Mat3::new([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        let mut m = Mat3::zero();
        for i in 0..3 {
            m.rows[i][i] = T::one();
        }
        m
    }

    pub fn from_rows(r0: Vec3<T>, r1: Vec3<T>, r2: Vec3<T>) -> Self {
        Mat3::new([
            [r0.x, r0.y, r0.z],
            [r1.x, r1.y, r1.z],
            [r2.x, r2.y, r2.z],
        ])
    }

    pub fn row(&self, i: usize) -> Vec3<T> {
        Vec3::new(self.rows[i][0], self.rows[i][1], self.rows[i][2])
    }

    pub fn col(&self, j: usize) -> Vec3<T> {
        Vec3::new(self.rows[0][j], self.rows[1][j], self.rows[2][j])
    }

    /// Outer product: `(a outer b)[i][j] = a_i * b_j`.
    pub fn outer(a: Vec3<T>, b: Vec3<T>) -> Self {
        Mat3::from_rows(b * a.x, b * a.y, b * a.z)
    }

    pub fn transpose(&self) -> Self {
        let mut m = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.rows[i][j] = self.rows[j][i];
            }
        }
        m
    }

    pub fn trace(&self) -> T {
        self.rows[0][0] + self.rows[1][1] + self.rows[2][2]
    }

    /// Curl of the field this jacobian was taken from.
    pub fn curl(&self) -> Vec3<T> {
        Vec3::new(
            self.rows[2][1] - self.rows[1][2],
            self.rows[0][2] - self.rows[2][0],
            self.rows[1][0] - self.rows[0][1],
        )
    }

    pub fn mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        Vec3::new(
            self.row(0).dot(v),
            self.row(1).dot(v),
            self.row(2).dot(v),
        )
    }

    pub fn scale(&self, s: T) -> Self {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.rows[i][j] = m.rows[i][j] * s;
            }
        }
        m
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for r in &self.rows {
            for &e in r {
                m = m.max(e.abs());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|e| e.is_finite()))
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.rows[i][j] = m.rows[i][j] + o.rows[i][j];
            }
        }
        m
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.rows[i][j] = m.rows[i][j] - o.rows[i][j];
            }
        }
        m
    }
}
