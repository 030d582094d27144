//! Differentiable semirings.
//!
//! A [`Semiring`] provides the forward operations (⊕, ⊗, 0̄, 1̄), an optional
//! monoid morphism μ from `(S, ⊕, 0̄)` onto a real vector space, and the three
//! local primitives the flattened backward passes are written against:
//!
//! * [`Semiring::pullback_through_sum`]: `Δ · ∂z/∂μ(z) · ∂μ(u)/∂u` for a term
//!   `u` of a ⊕-sum `z`,
//! * [`Semiring::vjp_times_left`] / [`Semiring::vjp_times_right`]: the two
//!   partials of ⊗.
//!
//! [`Semiring::vjp_plus`] exposes the elementary partials of a binary ⊕, used
//! only by the tape baseline in [`crate::tape`].

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul};

use crate::error::{Error, Result};

mod counted;
mod counting;
mod log;
mod log_expectation;
mod log_kappa;
mod real;

pub use counted::{Counted, CountedValue, Extremum};
pub use counting::{Counting, OpCounter};
pub use log::Log;
pub use log_expectation::{ExpectationValue, LogExpectation};
pub use log_kappa::LogKappa;
pub use real::Real;

/// Default log-semiring temperature.
pub const DEFAULT_TAU: f64 = 1.0;
/// Default κ deformation.
pub const DEFAULT_KAPPA: f64 = 0.5;

/// Temperature and κ settings shared by the scalar log-like semirings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiringParams {
    pub tau: f64,
    pub kappa: f64,
}

impl Default for SemiringParams {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            kappa: DEFAULT_KAPPA,
        }
    }
}

impl SemiringParams {
    pub fn new(tau: f64, kappa: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau must be > 0, got {tau}")));
        }
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "kappa must lie in (0, 1], got {kappa}"
            )));
        }
        Ok(Self { tau, kappa })
    }
}

/// Adjoint values. Cotangents form a real vector space over the
/// differentiable coordinates of a semiring element.
pub trait Cotangent:
    Copy + Debug + PartialEq + Add<Output = Self> + AddAssign + Mul<f64, Output = Self> + 'static
{
    /// Number of real coordinates.
    const DIM: usize;

    fn zero() -> Self;

    /// Unit vector along coordinate `k`.
    fn unit(k: usize) -> Self;

    fn coord(&self, k: usize) -> f64;

    fn from_coords(coords: &[f64]) -> Result<Self>;

    /// Conventional backward seed: the unit along the first coordinate.
    fn seed() -> Self {
        Self::unit(0)
    }
}

impl Cotangent for f64 {
    const DIM: usize = 1;

    fn zero() -> Self {
        0.0
    }

    fn unit(_k: usize) -> Self {
        1.0
    }

    fn coord(&self, _k: usize) -> f64 {
        *self
    }

    fn from_coords(coords: &[f64]) -> Result<Self> {
        match coords {
            [x] => Ok(*x),
            _ => Err(Error::InvalidArgument(format!(
                "expected 1 cotangent coordinate, got {}",
                coords.len()
            ))),
        }
    }
}

/// Two real coordinates. Used both as the cotangent and as the morphism
/// image of pair-valued semirings.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pair(pub f64, pub f64);

impl Add for Pair {
    type Output = Pair;
    fn add(self, rhs: Pair) -> Pair {
        Pair(self.0 + rhs.0, self.1 + rhs.1)
    }
}

impl AddAssign for Pair {
    fn add_assign(&mut self, rhs: Pair) {
        self.0 += rhs.0;
        self.1 += rhs.1;
    }
}

impl Mul<f64> for Pair {
    type Output = Pair;
    fn mul(self, rhs: f64) -> Pair {
        Pair(self.0 * rhs, self.1 * rhs)
    }
}

impl Cotangent for Pair {
    const DIM: usize = 2;

    fn zero() -> Self {
        Pair(0.0, 0.0)
    }

    fn unit(k: usize) -> Self {
        if k == 0 {
            Pair(1.0, 0.0)
        } else {
            Pair(0.0, 1.0)
        }
    }

    fn coord(&self, k: usize) -> f64 {
        if k == 0 {
            self.0
        } else {
            self.1
        }
    }

    fn from_coords(coords: &[f64]) -> Result<Self> {
        match coords {
            [a, b] => Ok(Pair(*a, *b)),
            _ => Err(Error::InvalidArgument(format!(
                "expected 2 cotangent coordinates, got {}",
                coords.len()
            ))),
        }
    }
}

/// Which operation a tape node or elementary partial refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Plus,
    Times,
}

/// A semiring with the primitives needed for reverse-mode differentiation.
///
/// Instances carry their parameters (τ, κ, min/max), so two values of the
/// same type may still describe different semirings; containers compare
/// instances before combining operands.
pub trait Semiring: Clone + Debug + PartialEq {
    type Elem: Copy + Debug + PartialEq;
    type Cotangent: Cotangent;
    /// Target of the morphism μ.
    type Image: Copy + Debug + PartialEq + Add<Output = Self::Image>;

    /// Name used on the command line and in diagnostics.
    fn name(&self) -> &'static str;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn plus(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn times(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }

    /// Forward morphism μ.
    fn morphism(&self, x: Self::Elem) -> Result<Self::Image>;
    /// Inverse morphism μ⁻¹.
    fn morphism_inv(&self, r: Self::Image) -> Result<Self::Elem>;
    /// Identity of the image monoid.
    fn image_zero(&self) -> Self::Image;

    /// `Δ · ∂z/∂u` where `z` is a ⊕-sum containing the term `u`.
    fn pullback_through_sum(
        &self,
        z: Self::Elem,
        u: Self::Elem,
        delta: Self::Cotangent,
    ) -> Self::Cotangent;

    /// `Δ · ∂(a ⊗ b)/∂a`.
    fn vjp_times_left(&self, a: Self::Elem, b: Self::Elem, delta: Self::Cotangent)
        -> Self::Cotangent;

    /// `Δ · ∂(a ⊗ b)/∂b`.
    fn vjp_times_right(
        &self,
        a: Self::Elem,
        b: Self::Elem,
        delta: Self::Cotangent,
    ) -> Self::Cotangent;

    /// Elementary partials of a single binary ⊕, as a generic AD system
    /// would see them.
    fn vjp_plus(
        &self,
        a: Self::Elem,
        b: Self::Elem,
        delta: Self::Cotangent,
    ) -> (Self::Cotangent, Self::Cotangent);

    /// Both partials of `a ∘ b` applied to `delta`.
    fn direct_partials(
        &self,
        op: BinaryOp,
        a: Self::Elem,
        b: Self::Elem,
        delta: Self::Cotangent,
    ) -> (Self::Cotangent, Self::Cotangent) {
        match op {
            BinaryOp::Plus => self.vjp_plus(a, b, delta),
            BinaryOp::Times => (
                self.vjp_times_left(a, b, delta),
                self.vjp_times_right(a, b, delta),
            ),
        }
    }

    /// Differentiable coordinate `k` of `x` (`k < Cotangent::DIM`).
    fn coord(&self, x: Self::Elem, k: usize) -> f64;

    /// `x` with coordinate `k` replaced by `v`.
    fn with_coord(&self, x: Self::Elem, k: usize, v: f64) -> Self::Elem;

    /// Multiplicity carried by counted (idempotent) semirings.
    fn tie_count(&self, _x: Self::Elem) -> Option<f64> {
        None
    }

    fn format_elem(&self, x: Self::Elem) -> String;
    fn parse_elem(&self, s: &str) -> Result<Self::Elem>;
}

pub(crate) fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::InvalidArgument(format!("invalid number `{s}`")))
}

pub(crate) fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::InvalidArgument(format!("expected `v1,v2`, got `{s}`")))?;
    Ok((parse_f64(a)?, parse_f64(b)?))
}

/// Formats a cotangent as comma-separated coordinates.
pub fn format_cotangent<C: Cotangent>(c: C) -> String {
    (0..C::DIM)
        .map(|k| format!("{}", c.coord(k)))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_cotangent<C: Cotangent>(s: &str) -> Result<C> {
    let coords = s
        .split(',')
        .map(parse_f64)
        .collect::<Result<Vec<_>>>()?;
    C::from_coords(&coords)
}

/// `|a - b| <= tol * max(|a|, |b|, 1)`, with equal values (including equal
/// infinities) always accepted.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Coordinatewise [`close`] on elements; counts of counted semirings must
/// match exactly.
pub fn elem_close<S: Semiring>(s: &S, a: S::Elem, b: S::Elem, tol: f64) -> bool {
    if s.tie_count(a) != s.tie_count(b) {
        return false;
    }
    (0..S::Cotangent::DIM).all(|k| close(s.coord(a, k), s.coord(b, k), tol))
}

pub fn cotangent_close<C: Cotangent>(a: C, b: C, tol: f64) -> bool {
    (0..C::DIM).all(|k| close(a.coord(k), b.coord(k), tol))
}

/// Numerically stable `log(exp(a) + exp(b))`.
#[inline]
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}
