use super::{log_add_exp, parse_pair, Pair, Semiring};
use crate::error::{Error, Result};

/// Element of the log-expectation semiring: a log-domain value and a
/// linear-domain expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationValue {
    pub value: f64,
    pub expectation: f64,
}

impl ExpectationValue {
    pub fn new(value: f64, expectation: f64) -> Self {
        Self { value, expectation }
    }
}

/// `(x,a) ⊕ (y,b) = (log(eˣ+eʸ), a+b)`, `(x,a) ⊗ (y,b) = (x+y, eˣb + eʸa)`,
/// `0̄ = (-∞, 0)`, `1̄ = (0, 0)`, `μ(x,a) = (eˣ, a)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LogExpectation;

impl Semiring for LogExpectation {
    type Elem = ExpectationValue;
    type Cotangent = Pair;
    type Image = Pair;

    fn name(&self) -> &'static str {
        "logexp"
    }

    fn zero(&self) -> ExpectationValue {
        ExpectationValue::new(f64::NEG_INFINITY, 0.0)
    }

    fn one(&self) -> ExpectationValue {
        ExpectationValue::new(0.0, 0.0)
    }

    #[inline]
    fn plus(&self, a: ExpectationValue, b: ExpectationValue) -> ExpectationValue {
        ExpectationValue::new(
            log_add_exp(a.value, b.value),
            a.expectation + b.expectation,
        )
    }

    #[inline]
    fn times(&self, a: ExpectationValue, b: ExpectationValue) -> ExpectationValue {
        ExpectationValue::new(
            a.value + b.value,
            a.value.exp() * b.expectation + b.value.exp() * a.expectation,
        )
    }

    fn morphism(&self, x: ExpectationValue) -> Result<Pair> {
        Ok(Pair(x.value.exp(), x.expectation))
    }

    fn morphism_inv(&self, r: Pair) -> Result<ExpectationValue> {
        if r.0 < 0.0 || r.0.is_nan() {
            return Err(Error::Domain(format!("log of {}", r.0)));
        }
        Ok(ExpectationValue::new(r.0.ln(), r.1))
    }

    fn image_zero(&self) -> Pair {
        Pair(0.0, 0.0)
    }

    #[inline]
    fn pullback_through_sum(&self, z: ExpectationValue, u: ExpectationValue, delta: Pair) -> Pair {
        let w = if u.value == f64::NEG_INFINITY || z.value == f64::NEG_INFINITY {
            0.0
        } else {
            (u.value - z.value).exp()
        };
        Pair(delta.0 * w, delta.1)
    }

    #[inline]
    fn vjp_times_left(&self, a: ExpectationValue, b: ExpectationValue, delta: Pair) -> Pair {
        Pair(
            delta.0 + delta.1 * a.value.exp() * b.expectation,
            delta.1 * b.value.exp(),
        )
    }

    #[inline]
    fn vjp_times_right(&self, a: ExpectationValue, b: ExpectationValue, delta: Pair) -> Pair {
        Pair(
            delta.0 + delta.1 * b.value.exp() * a.expectation,
            delta.1 * a.value.exp(),
        )
    }

    fn vjp_plus(&self, a: ExpectationValue, b: ExpectationValue, delta: Pair) -> (Pair, Pair) {
        let (wa, wb) = match (a.value == f64::NEG_INFINITY, b.value == f64::NEG_INFINITY) {
            (true, true) => (0.0, 0.0),
            (true, false) => (0.0, 1.0),
            (false, true) => (1.0, 0.0),
            (false, false) => (
                1.0 / (1.0 + (b.value - a.value).exp()),
                1.0 / (1.0 + (a.value - b.value).exp()),
            ),
        };
        (Pair(delta.0 * wa, delta.1), Pair(delta.0 * wb, delta.1))
    }

    fn coord(&self, x: ExpectationValue, k: usize) -> f64 {
        if k == 0 {
            x.value
        } else {
            x.expectation
        }
    }

    fn with_coord(&self, x: ExpectationValue, k: usize, v: f64) -> ExpectationValue {
        if k == 0 {
            ExpectationValue::new(v, x.expectation)
        } else {
            ExpectationValue::new(x.value, v)
        }
    }

    fn format_elem(&self, x: ExpectationValue) -> String {
        format!("{},{}", x.value, x.expectation)
    }

    fn parse_elem(&self, s: &str) -> Result<ExpectationValue> {
        let (v, e) = parse_pair(s)?;
        Ok(ExpectationValue::new(v, e))
    }
}
