//! Deterministic sample-point generation over axis-aligned boxes.
//!
//! Points come from a Halton sequence (bases 2, 3, 5), so regenerating a
//! `SampleSet` with the same parameters yields bit-identical points. That
//! determinism is what makes residual reports and exports reproducible
//! byte-for-byte across runs.

use crate::linalg::Vec3;
use crate::scalar::{lit, Real};
use std::fmt;
use std::sync::Arc;

/// Van der Corput radical inverse of `index` in the given base, in [0, 1).
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv_base = 1.0 / base as f64;
    let mut f = inv_base;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        f *= inv_base;
        index /= base;
    }
    r
}

/// Low-discrepancy point set in a box, with an optional exclusion predicate.
#[derive(Clone)]
pub struct SampleSet<T: Real> {
    min: Vec3<T>,
    max: Vec3<T>,
    count: usize,
    start: u64,
    exclusion: Option<Arc<dyn Fn(Vec3<T>) -> bool + Send + Sync>>,
}

impl<T: Real> SampleSet<T> {
    /// Points in `[min, max]` componentwise. Panics if any `min > max`.
    pub fn in_box(min: Vec3<T>, max: Vec3<T>, count: usize) -> Self {
        assert!(
            min.x <= max.x && min.y <= max.y && min.z <= max.z,
            "degenerate box: min must not exceed max"
        );
        SampleSet {
            min,
            max,
            count,
            start: 1,
            exclusion: None,
        }
    }

    /// Points in the unit cube [0,1]^3.
    pub fn unit_cube(count: usize) -> Self {
        SampleSet::in_box(Vec3::zero(), Vec3::new(T::one(), T::one(), T::one()), count)
    }

    /// Shifts the sequence start index; different starts give disjoint-looking
    /// but equally deterministic point sets.
    pub fn with_start(mut self, start: u64) -> Self {
        self.start = start.max(1);
        self
    }

    /// Drops points for which the predicate returns true.
    pub fn with_exclusion(
        mut self,
        predicate: impl Fn(Vec3<T>) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.exclusion = Some(Arc::new(predicate));
        self
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn bounds(&self) -> (Vec3<T>, Vec3<T>) {
        (self.min, self.max)
    }

    /// Default finite-difference step: 1e-3 of the box diagonal over sqrt(3),
    /// i.e. exactly 1e-3 for the unit cube.
    pub fn default_fd_step(&self) -> T {
        let diag = (self.max - self.min).norm();
        let three = lit::<T>(3.0);
        let step = lit::<T>(1e-3) * diag / three.sqrt();
        if step > T::zero() {
            step
        } else {
            lit::<T>(1e-3)
        }
    }

    /// Generates the points. Deterministic: same parameters, same bytes.
    ///
    /// Panics if the exclusion predicate rejects so much of the box that the
    /// requested count cannot be reached within a generous scan budget.
    pub fn points(&self) -> Vec<Vec3<T>> {
        let span = self.max - self.min;
        let mut out = Vec::with_capacity(self.count);
        let budget = 4096 * (self.count as u64) + 4096;
        let mut index = self.start;
        while out.len() < self.count {
            assert!(
                index < self.start + budget,
                "exclusion predicate rejected nearly the whole box"
            );
            let u = Vec3::new(
                lit::<T>(radical_inverse(index, 2)),
                lit::<T>(radical_inverse(index, 3)),
                lit::<T>(radical_inverse(index, 5)),
            );
            let p = self.min + span.hadamard(u);
            index += 1;
            if let Some(excl) = &self.exclusion {
                if excl(p) {
                    continue;
                }
            }
            out.push(p);
        }
        out
    }
}

impl<T: Real> fmt::Debug for SampleSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampleSet")
            .field("min", &self.min)
            .field("max", &self.max)
            .field("count", &self.count)
            .field("start", &self.start)
            .field("excluded", &self.exclusion.is_some())
            .finish()
    }
}
