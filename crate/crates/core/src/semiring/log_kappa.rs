use super::{log_add_exp, parse_f64, Semiring};
use crate::error::{Error, Result};

/// κ-deformed log semiring built on the Kaniadakis exponential.
///
/// `μ = exp_κ`, `x ⊕ y = ln_κ(exp_κ x + exp_κ y)`,
/// `x ⊗ y = x√(1+κ²y²) + y√(1+κ²x²)`, `0̄ = -∞`, `1̄ = 0`.
/// Tends to the log semiring (τ = 1) as κ → 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogKappa {
    kappa: f64,
}

impl Default for LogKappa {
    fn default() -> Self {
        Self {
            kappa: super::DEFAULT_KAPPA,
        }
    }
}

impl LogKappa {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "kappa must lie in (0, 1], got {kappa}"
            )));
        }
        Ok(Self { kappa })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `ln exp_κ(x) = asinh(κx)/κ`.
    #[inline]
    fn log_exp_kappa(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        (self.kappa * x).asinh() / self.kappa
    }

    /// `ln_κ(e^y) = sinh(κy)/κ`.
    #[inline]
    fn ln_kappa_of_exp(&self, y: f64) -> f64 {
        if y == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        (self.kappa * y).sinh() / self.kappa
    }

    #[inline]
    fn root(&self, x: f64) -> f64 {
        (1.0 + self.kappa * self.kappa * x * x).sqrt()
    }

    /// `exp_κ(x) = (√(1+κ²x²) + κx)^{1/κ}`.
    pub fn exp_kappa(&self, x: f64) -> f64 {
        self.log_exp_kappa(x).exp()
    }

    /// `ln_κ(r) = (r^κ − r^{−κ}) / 2κ`.
    pub fn ln_kappa(&self, r: f64) -> f64 {
        self.ln_kappa_of_exp(r.ln())
    }
}

impl Semiring for LogKappa {
    type Elem = f64;
    type Cotangent = f64;
    type Image = f64;

    fn name(&self) -> &'static str {
        "logk"
    }

    fn zero(&self) -> f64 {
        f64::NEG_INFINITY
    }

    fn one(&self) -> f64 {
        0.0
    }

    #[inline]
    fn plus(&self, a: f64, b: f64) -> f64 {
        if a == f64::NEG_INFINITY {
            return b;
        }
        if b == f64::NEG_INFINITY {
            return a;
        }
        let s = log_add_exp(self.log_exp_kappa(a), self.log_exp_kappa(b));
        self.ln_kappa_of_exp(s)
    }

    #[inline]
    fn times(&self, a: f64, b: f64) -> f64 {
        if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        a * self.root(b) + b * self.root(a)
    }

    fn morphism(&self, x: f64) -> Result<f64> {
        Ok(self.exp_kappa(x))
    }

    fn morphism_inv(&self, r: f64) -> Result<f64> {
        if r < 0.0 || r.is_nan() {
            return Err(Error::Domain(format!("ln_kappa of {r}")));
        }
        Ok(self.ln_kappa(r))
    }

    fn image_zero(&self) -> f64 {
        0.0
    }

    /// `Δ · μ'(u)/μ'(z)` with `μ'(x) = exp_κ(x)/√(1+κ²x²)`.
    #[inline]
    fn pullback_through_sum(&self, z: f64, u: f64, delta: f64) -> f64 {
        if u == f64::NEG_INFINITY || z == f64::NEG_INFINITY {
            return 0.0;
        }
        let ratio = (self.log_exp_kappa(u) - self.log_exp_kappa(z)).exp();
        delta * ratio * self.root(z) / self.root(u)
    }

    #[inline]
    fn vjp_times_left(&self, a: f64, b: f64, delta: f64) -> f64 {
        if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
            return 0.0;
        }
        let k2 = self.kappa * self.kappa;
        delta * (self.root(b) + k2 * a * b / self.root(a))
    }

    #[inline]
    fn vjp_times_right(&self, a: f64, b: f64, delta: f64) -> f64 {
        if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
            return 0.0;
        }
        let k2 = self.kappa * self.kappa;
        delta * (self.root(a) + k2 * a * b / self.root(b))
    }

    fn vjp_plus(&self, a: f64, b: f64, delta: f64) -> (f64, f64) {
        if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
            return (0.0, 0.0);
        }
        // ∂r/∂a = E_a/(E_a + E_b) · √(1+κ²r²)/√(1+κ²a²), E = exp_κ
        let r = self.plus(a, b);
        let la = self.log_exp_kappa(a);
        let lb = self.log_exp_kappa(b);
        let wa = 1.0 / (1.0 + (lb - la).exp());
        let wb = 1.0 / (1.0 + (la - lb).exp());
        let ga = if a == f64::NEG_INFINITY {
            0.0
        } else {
            wa * self.root(r) / self.root(a)
        };
        let gb = if b == f64::NEG_INFINITY {
            0.0
        } else {
            wb * self.root(r) / self.root(b)
        };
        (delta * ga, delta * gb)
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
