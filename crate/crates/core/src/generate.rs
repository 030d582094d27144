//! Random acyclic automata for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::semiring::{
    log_add_exp, Counted, CountedValue, ExpectationValue, Log, LogExpectation, LogKappa, Real, Semiring,
};
use crate::wfsa::Automaton;

/// Semirings that can draw a random, well-conditioned weight.
pub trait RandomWeight: Semiring {
    fn random_weight<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    /// Adjusts a freshly generated automaton. No-op by default.
    fn condition(&self, _a: &mut Automaton<Self>) {}
}

impl RandomWeight for Real {
    fn random_weight<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.gen_range(0.05..0.6)
    }
}

impl RandomWeight for Log {
    fn random_weight<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.gen_range(-2.0..0.5)
    }
}

/// `ln_κ` grows like a power of its argument, so unless the total mass of
/// the automaton stays near 1, `ν` is huge and finite differences of it are
/// dominated by rounding. Generated automata are therefore made stochastic.
impl RandomWeight for LogKappa {
    fn random_weight<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.ln_kappa(rng.gen_range(-3.0f64..-1.0).exp())
    }

    /// Rescales every state's outgoing and final masses `exp_κ(w)` to sum
    /// to one.
    fn condition(&self, a: &mut Automaton<Self>) {
        let mut total = vec![0.0; a.num_states()];
        for arc in a.arcs() {
            total[arc.origin] += self.exp_kappa(arc.weight);
        }
        for (&q, &w) in a.finals() {
            total[q] += self.exp_kappa(w);
        }
        let rescale = |w: f64, t: f64| self.ln_kappa(self.exp_kappa(w) / t);
        for e in 0..a.num_arcs() {
            let arc = a.arcs()[e];
            a.set_arc_weight(e, rescale(arc.weight, total[arc.origin]));
        }
        let finals: Vec<_> = a.finals().iter().map(|(&q, &w)| (q, w)).collect();
        for (q, w) in finals {
            a.set_final(q, rescale(w, total[q])).expect("state in range");
        }
    }
}

/// The expectation coordinate scales with `exp(ν.value)`, so generated
/// automata are made stochastic in the value coordinate.
impl RandomWeight for LogExpectation {
    fn random_weight<R: Rng + ?Sized>(&self, rng: &mut R) -> ExpectationValue {
        ExpectationValue::new(rng.gen_range(-2.0..0.5), rng.gen_range(-1.0..1.0))
    }

    fn condition(&self, a: &mut Automaton<Self>) {
        let mut total = vec![f64::NEG_INFINITY; a.num_states()];
        for arc in a.arcs() {
            total[arc.origin] = log_add_exp(total[arc.origin], arc.weight.value);
        }
        for (&q, &w) in a.finals() {
            total[q] = log_add_exp(total[q], w.value);
        }
        let shift = |w: ExpectationValue, t: f64| ExpectationValue::new(w.value - t, w.expectation);
        for e in 0..a.num_arcs() {
            let arc = a.arcs()[e];
            a.set_arc_weight(e, shift(arc.weight, total[arc.origin]));
        }
        let finals: Vec<_> = a.finals().iter().map(|(&q, &w)| (q, w)).collect();
        for (q, w) in finals {
            a.set_final(q, shift(w, total[q])).expect("state in range");
        }
    }
}

/// Small integers, so that ties between paths are common.
impl RandomWeight for Counted {
    fn random_weight<R: Rng + ?Sized>(&self, rng: &mut R) -> CountedValue {
        CountedValue::new(rng.gen_range(0..6) as f64, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub max_states: usize,
    pub max_arcs: usize,
    /// Adds arcs `i → i+1` so that `0 → Q-1` is always connected.
    pub backbone: bool,
    /// Probability that a state other than the first (last) gets an
    /// initial (final) weight.
    pub extra_endpoint_prob: f64,
    /// Relabel states randomly, so the result is usually not sorted.
    pub shuffle: bool,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self {
            max_states: 50,
            max_arcs: 200,
            backbone: true,
            extra_endpoint_prob: 0.1,
            shuffle: false,
        }
    }
}

/// Random acyclic automaton with weights drawn from the semiring's default
/// distribution, then passed through [`RandomWeight::condition`].
pub fn random_automaton<S: RandomWeight, R: Rng + ?Sized>(
    semiring: &S,
    rng: &mut R,
    spec: &RandomSpec,
) -> Automaton<S> {
    let mut a = random_automaton_with(semiring, rng, spec, |s, r| s.random_weight(r));
    semiring.condition(&mut a);
    a
}

/// Random acyclic automaton with at most `spec.max_states` states and
/// `spec.max_arcs` arcs, weights drawn by `sample`.
pub fn random_automaton_with<S, R, F>(
    semiring: &S,
    rng: &mut R,
    spec: &RandomSpec,
    mut sample: F,
) -> Automaton<S>
where
    S: Semiring,
    R: Rng + ?Sized,
    F: FnMut(&S, &mut R) -> S::Elem,
{
    let n = rng.gen_range(1..=spec.max_states.max(1));
    let mut ids: Vec<usize> = (0..n).collect();
    if spec.shuffle {
        ids.shuffle(rng);
    }
    let mut a = Automaton::new(semiring.clone(), n);
    let mut budget = spec.max_arcs;
    if spec.backbone {
        for i in 0..n.saturating_sub(1).min(budget) {
            let w = sample(semiring, rng);
            let label = rng.gen_range(0..10);
            a.add_arc(ids[i], ids[i + 1], label, w).expect("state in range");
        }
        budget = budget.saturating_sub(n - 1);
    }
    if n > 1 {
        let extra = rng.gen_range(0..=budget);
        for _ in 0..extra {
            let i = rng.gen_range(0..n - 1);
            let j = rng.gen_range(i + 1..n);
            let w = sample(semiring, rng);
            let label = rng.gen_range(0..10);
            a.add_arc(ids[i], ids[j], label, w).expect("state in range");
        }
    }
    let w = sample(semiring, rng);
    a.set_initial(ids[0], w).expect("state in range");
    let w = sample(semiring, rng);
    a.set_final(ids[n - 1], w).expect("state in range");
    for q in 1..n {
        if rng.gen_bool(spec.extra_endpoint_prob) {
            let w = sample(semiring, rng);
            a.set_initial(ids[q], w).expect("state in range");
        }
    }
    for q in 0..n - 1 {
        if rng.gen_bool(spec.extra_endpoint_prob) {
            let w = sample(semiring, rng);
            a.set_final(ids[q], w).expect("state in range");
        }
    }
    a
}
