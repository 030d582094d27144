use super::{parse_f64, Semiring};
use crate::error::Result;

/// `(ℝ, +, ×, 0, 1)` with the identity morphism.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Real;

impl Semiring for Real {
    type Elem = f64;
    type Cotangent = f64;
    type Image = f64;

    fn name(&self) -> &'static str {
        "real"
    }

    fn zero(&self) -> f64 {
        0.0
    }

    fn one(&self) -> f64 {
        1.0
    }

    #[inline]
    fn plus(&self, a: f64, b: f64) -> f64 {
        a + b
    }

    #[inline]
    fn times(&self, a: f64, b: f64) -> f64 {
        a * b
    }

    fn morphism(&self, x: f64) -> Result<f64> {
        Ok(x)
    }

    fn morphism_inv(&self, r: f64) -> Result<f64> {
        Ok(r)
    }

    fn image_zero(&self) -> f64 {
        0.0
    }

    #[inline]
    fn pullback_through_sum(&self, _z: f64, _u: f64, delta: f64) -> f64 {
        delta
    }

    #[inline]
    fn vjp_times_left(&self, _a: f64, b: f64, delta: f64) -> f64 {
        delta * b
    }

    #[inline]
    fn vjp_times_right(&self, a: f64, _b: f64, delta: f64) -> f64 {
        delta * a
    }

    fn vjp_plus(&self, _a: f64, _b: f64, delta: f64) -> (f64, f64) {
        (delta, delta)
    }

    fn coord(&self, x: f64, _k: usize) -> f64 {
        x
    }

    fn with_coord(&self, _x: f64, _k: usize, v: f64) -> f64 {
        v
    }

    fn format_elem(&self, x: f64) -> String {
        format!("{x}")
    }

    fn parse_elem(&self, s: &str) -> Result<f64> {
        parse_f64(s)
    }
}
