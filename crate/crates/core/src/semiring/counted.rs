use super::{parse_f64, Semiring};
use crate::error::{Error, Result};

/// Value together with the number of optimal terms it was selected from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountedValue {
    pub value: f64,
    pub count: f64,
}

impl CountedValue {
    pub fn new(value: f64, count: f64) -> Self {
        Self { value, count }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    /// Tropical: ⊕ = min, 0̄ = (+∞, 0).
    Min,
    /// Arctic: ⊕ = max, 0̄ = (-∞, 0).
    Max,
}

/// Count-extended tropical/arctic semiring.
///
/// `(x, Cx) ⊕ (y, Cy)` keeps the better value with its count and adds the
/// counts on an exact tie; `(x, Cx) ⊗ (y, Cy) = (x + y, Cx·Cy)`; `1̄ = (0, 1)`.
/// The counts make the averaged subgradient `1[u = z]·Cu/Cz` of a ⊕-sum
/// available to the backward pass without storing the forward graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counted {
    order: Extremum,
}

impl Counted {
    pub fn tropical() -> Self {
        Self {
            order: Extremum::Min,
        }
    }

    pub fn arctic() -> Self {
        Self {
            order: Extremum::Max,
        }
    }

    pub fn order(&self) -> Extremum {
        self.order
    }

    fn zero_value(&self) -> f64 {
        match self.order {
            Extremum::Min => f64::INFINITY,
            Extremum::Max => f64::NEG_INFINITY,
        }
    }

    /// True when `a` strictly beats `b`.
    #[inline]
    fn better(&self, a: f64, b: f64) -> bool {
        match self.order {
            Extremum::Min => a < b,
            Extremum::Max => a > b,
        }
    }

    /// `1[u.v = z.v] · u.c / z.c`
    #[inline]
    fn share(&self, z: CountedValue, u: CountedValue) -> f64 {
        if u.value != z.value || self.is_zero(u) || self.is_zero(z) || z.count == 0.0 {
            return 0.0;
        }
        u.count / z.count
    }
}

impl Semiring for Counted {
    type Elem = CountedValue;
    type Cotangent = f64;
    type Image = f64;

    fn name(&self) -> &'static str {
        match self.order {
            Extremum::Min => "tropical",
            Extremum::Max => "arctic",
        }
    }

    fn zero(&self) -> CountedValue {
        CountedValue::new(self.zero_value(), 0.0)
    }

    fn one(&self) -> CountedValue {
        CountedValue::new(0.0, 1.0)
    }

    fn is_zero(&self, a: CountedValue) -> bool {
        a.value == self.zero_value()
    }

    #[inline]
    fn plus(&self, a: CountedValue, b: CountedValue) -> CountedValue {
        if self.better(a.value, b.value) {
            a
        } else if self.better(b.value, a.value) {
            b
        } else {
            CountedValue::new(a.value, a.count + b.count)
        }
    }

    #[inline]
    fn times(&self, a: CountedValue, b: CountedValue) -> CountedValue {
        if self.is_zero(a) || self.is_zero(b) {
            return self.zero();
        }
        CountedValue::new(a.value + b.value, a.count * b.count)
    }

    fn morphism(&self, _x: CountedValue) -> Result<f64> {
        Err(Error::Unsupported(format!(
            "the {} semiring has no global morphism",
            self.name()
        )))
    }

    fn morphism_inv(&self, _r: f64) -> Result<CountedValue> {
        Err(Error::Unsupported(format!(
            "the {} semiring has no global morphism",
            self.name()
        )))
    }

    fn image_zero(&self) -> f64 {
        0.0
    }

    #[inline]
    fn pullback_through_sum(&self, z: CountedValue, u: CountedValue, delta: f64) -> f64 {
        delta * self.share(z, u)
    }

    #[inline]
    fn vjp_times_left(&self, _a: CountedValue, _b: CountedValue, delta: f64) -> f64 {
        delta
    }

    #[inline]
    fn vjp_times_right(&self, _a: CountedValue, _b: CountedValue, delta: f64) -> f64 {
        delta
    }

    fn vjp_plus(&self, a: CountedValue, b: CountedValue, delta: f64) -> (f64, f64) {
        let r = self.plus(a, b);
        (delta * self.share(r, a), delta * self.share(r, b))
    }

    fn coord(&self, x: CountedValue, _k: usize) -> f64 {
        x.value
    }

    fn with_coord(&self, x: CountedValue, _k: usize, v: f64) -> CountedValue {
        CountedValue::new(v, x.count)
    }

    fn tie_count(&self, x: CountedValue) -> Option<f64> {
        Some(x.count)
    }

    fn format_elem(&self, x: CountedValue) -> String {
        format!("{},{}", x.value, x.count)
    }

    /// Accepts `value,count` or a bare `value` (count 1).
    fn parse_elem(&self, s: &str) -> Result<CountedValue> {
        match s.split_once(',') {
            Some((v, c)) => {
                let count = parse_f64(c)?;
                if count < 0.0 {
                    return Err(Error::InvalidArgument(format!("negative count in `{s}`")));
                }
                Ok(CountedValue::new(parse_f64(v)?, count))
            }
            None => Ok(CountedValue::new(parse_f64(s)?, 1.0)),
        }
    }
}
