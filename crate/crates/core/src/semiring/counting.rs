use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use super::{BinaryOp, Semiring};
use crate::error::Result;

/// Totals of ⊕ and ⊗ invocations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCounter {
    pub plus: u64,
    pub times: u64,
}

/// Wraps a semiring and counts every ⊕ and ⊗ it evaluates.
///
/// Clones share the same counters.
#[derive(Debug, Clone)]
pub struct Counting<S> {
    inner: S,
    plus: Arc<AtomicU64>,
    times: Arc<AtomicU64>,
}

impl<S: Semiring> Counting<S> {
    pub fn new(inner: S) -> Self {
        Self {
            inner,
            plus: Arc::new(AtomicU64::new(0)),
            times: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }

    pub fn counts(&self) -> OpCounter {
        OpCounter {
            plus: self.plus.load(Ordering::Relaxed),
            times: self.times.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.plus.store(0, Ordering::Relaxed);
        self.times.store(0, Ordering::Relaxed);
    }
}

impl<S: PartialEq> PartialEq for Counting<S> {
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

impl<S: Semiring> Semiring for Counting<S> {
    type Elem = S::Elem;
    type Cotangent = S::Cotangent;
    type Image = S::Image;

    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn zero(&self) -> S::Elem {
        self.inner.zero()
    }

    fn one(&self) -> S::Elem {
        self.inner.one()
    }

    fn is_zero(&self, a: S::Elem) -> bool {
        self.inner.is_zero(a)
    }

    fn plus(&self, a: S::Elem, b: S::Elem) -> S::Elem {
        self.plus.fetch_add(1, Ordering::Relaxed);
        self.inner.plus(a, b)
    }

    fn times(&self, a: S::Elem, b: S::Elem) -> S::Elem {
        self.times.fetch_add(1, Ordering::Relaxed);
        self.inner.times(a, b)
    }

    fn morphism(&self, x: S::Elem) -> Result<S::Image> {
        self.inner.morphism(x)
    }

    fn morphism_inv(&self, r: S::Image) -> Result<S::Elem> {
        self.inner.morphism_inv(r)
    }

    fn image_zero(&self) -> S::Image {
        self.inner.image_zero()
    }

    fn pullback_through_sum(&self, z: S::Elem, u: S::Elem, delta: S::Cotangent) -> S::Cotangent {
        self.inner.pullback_through_sum(z, u, delta)
    }

    fn vjp_times_left(&self, a: S::Elem, b: S::Elem, delta: S::Cotangent) -> S::Cotangent {
        self.inner.vjp_times_left(a, b, delta)
    }

    fn vjp_times_right(&self, a: S::Elem, b: S::Elem, delta: S::Cotangent) -> S::Cotangent {
        self.inner.vjp_times_right(a, b, delta)
    }

    fn vjp_plus(
        &self,
        a: S::Elem,
        b: S::Elem,
        delta: S::Cotangent,
    ) -> (S::Cotangent, S::Cotangent) {
        self.inner.vjp_plus(a, b, delta)
    }

    fn direct_partials(
        &self,
        op: BinaryOp,
        a: S::Elem,
        b: S::Elem,
        delta: S::Cotangent,
    ) -> (S::Cotangent, S::Cotangent) {
        self.inner.direct_partials(op, a, b, delta)
    }

    fn coord(&self, x: S::Elem, k: usize) -> f64 {
        self.inner.coord(x, k)
    }

    fn with_coord(&self, x: S::Elem, k: usize, v: f64) -> S::Elem {
        self.inner.with_coord(x, k, v)
    }

    fn tie_count(&self, x: S::Elem) -> Option<f64> {
        self.inner.tie_count(x)
    }

    fn format_elem(&self, x: S::Elem) -> String {
        self.inner.format_elem(x)
    }

    fn parse_elem(&self, s: &str) -> Result<S::Elem> {
        self.inner.parse_elem(s)
    }
}
