use super::{log_add_exp, parse_f64, Semiring};
use crate::error::{Error, Result};

/// Log semiring with temperature τ:
/// `x ⊕ y = τ⁻¹ log(e^{τx} + e^{τy})`, `x ⊗ y = x + y`, `0̄ = -∞`, `1̄ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Log {
    tau: f64,
}

impl Default for Log {
    fn default() -> Self {
        Self { tau: 1.0 }
    }
}

impl Log {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau must be > 0, got {tau}")));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

impl Semiring for Log {
    type Elem = f64;
    type Cotangent = f64;
    type Image = f64;

    fn name(&self) -> &'static str {
        "log"
    }

    fn zero(&self) -> f64 {
        f64::NEG_INFINITY
    }

    fn one(&self) -> f64 {
        0.0
    }

    #[inline]
    fn plus(&self, a: f64, b: f64) -> f64 {
        if self.tau == 1.0 {
            log_add_exp(a, b)
        } else {
            log_add_exp(self.tau * a, self.tau * b) / self.tau
        }
    }

    #[inline]
    fn times(&self, a: f64, b: f64) -> f64 {
        a + b
    }

    fn morphism(&self, x: f64) -> Result<f64> {
        Ok((self.tau * x).exp())
    }

    fn morphism_inv(&self, r: f64) -> Result<f64> {
        if r < 0.0 || r.is_nan() {
            return Err(Error::Domain(format!("log morphism inverse of {r}")));
        }
        Ok(r.ln() / self.tau)
    }

    fn image_zero(&self) -> f64 {
        0.0
    }

    #[inline]
    fn pullback_through_sum(&self, z: f64, u: f64, delta: f64) -> f64 {
        if u == f64::NEG_INFINITY || z == f64::NEG_INFINITY {
            return 0.0;
        }
        delta * (self.tau * (u - z)).exp()
    }

    #[inline]
    fn vjp_times_left(&self, _a: f64, _b: f64, delta: f64) -> f64 {
        delta
    }

    #[inline]
    fn vjp_times_right(&self, _a: f64, _b: f64, delta: f64) -> f64 {
        delta
    }

    fn vjp_plus(&self, a: f64, b: f64, delta: f64) -> (f64, f64) {
        match (a == f64::NEG_INFINITY, b == f64::NEG_INFINITY) {
            (true, true) => (0.0, 0.0),
            (true, false) => (0.0, delta),
            (false, true) => (delta, 0.0),
            (false, false) => {
                // softmax weight of `a`: e^{τa} / (e^{τa} + e^{τb})
                let wa = 1.0 / (1.0 + (self.tau * (b - a)).exp());
                let wb = 1.0 / (1.0 + (self.tau * (a - b)).exp());
                (delta * wa, delta * wb)
            }
        }
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
