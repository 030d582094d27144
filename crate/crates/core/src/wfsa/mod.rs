//! Weighted finite-state automata and the differentiable automaton weight.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::semiring::Semiring;

mod sort;
mod weight;

pub use sort::topological_sort;
pub use weight::{
    build_matrix, shortest_distance, weight, weight_from_matrix, weight_vjp, AutomatonGradients,
    DistanceVector, Forward, WeightMatrix,
};

/// Label reserved for ε.
pub const EPSILON: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc<W> {
    pub origin: usize,
    pub dest: usize,
    pub label: u32,
    pub weight: W,
}

/// A WFSA over semiring `S`.
///
/// States are `0..num_states`. States missing from the initial (final) map
/// carry 0̄ implicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct Automaton<S: Semiring> {
    semiring: S,
    num_states: usize,
    arcs: Vec<Arc<S::Elem>>,
    initial: BTreeMap<usize, S::Elem>,
    finals: BTreeMap<usize, S::Elem>,
}

impl<S: Semiring> Automaton<S> {
    pub fn new(semiring: S, num_states: usize) -> Self {
        Self {
            semiring,
            num_states,
            arcs: Vec::new(),
            initial: BTreeMap::new(),
            finals: BTreeMap::new(),
        }
    }

    fn check_state(&self, q: usize) -> Result<()> {
        if q >= self.num_states {
            return Err(invalid(format!(
                "state {q} out of range (automaton has {} states)",
                self.num_states
            )));
        }
        Ok(())
    }

    /// Appends an arc and returns its index.
    pub fn add_arc(&mut self, origin: usize, dest: usize, label: u32, weight: S::Elem) -> Result<usize> {
        self.check_state(origin)?;
        self.check_state(dest)?;
        self.arcs.push(Arc {
            origin,
            dest,
            label,
            weight,
        });
        Ok(self.arcs.len() - 1)
    }

    /// Sets λ(q), replacing any previous value.
    pub fn set_initial(&mut self, q: usize, w: S::Elem) -> Result<()> {
        self.check_state(q)?;
        self.initial.insert(q, w);
        Ok(())
    }

    /// Sets ρ(q), replacing any previous value.
    pub fn set_final(&mut self, q: usize, w: S::Elem) -> Result<()> {
        self.check_state(q)?;
        self.finals.insert(q, w);
        Ok(())
    }

    /// λ(q) ← λ(q) ⊕ w
    pub fn add_initial(&mut self, q: usize, w: S::Elem) -> Result<()> {
        self.check_state(q)?;
        let s = &self.semiring;
        let merged = match self.initial.get(&q) {
            Some(&old) => s.plus(old, w),
            None => w,
        };
        self.initial.insert(q, merged);
        Ok(())
    }

    /// ρ(q) ← ρ(q) ⊕ w
    pub fn add_final(&mut self, q: usize, w: S::Elem) -> Result<()> {
        self.check_state(q)?;
        let s = &self.semiring;
        let merged = match self.finals.get(&q) {
            Some(&old) => s.plus(old, w),
            None => w,
        };
        self.finals.insert(q, merged);
        Ok(())
    }

    pub fn set_arc_weight(&mut self, e: usize, w: S::Elem) {
        self.arcs[e].weight = w;
    }

    pub fn semiring(&self) -> &S {
        &self.semiring
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    /// `|Q| + |E|`, the size measure used by the benchmarks.
    pub fn size(&self) -> usize {
        self.num_states + self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc<S::Elem>] {
        &self.arcs
    }

    pub fn initial(&self) -> &BTreeMap<usize, S::Elem> {
        &self.initial
    }

    pub fn finals(&self) -> &BTreeMap<usize, S::Elem> {
        &self.finals
    }

    pub fn initial_weight(&self, q: usize) -> S::Elem {
        self.initial.get(&q).copied().unwrap_or_else(|| self.semiring.zero())
    }

    pub fn final_weight(&self, q: usize) -> S::Elem {
        self.finals.get(&q).copied().unwrap_or_else(|| self.semiring.zero())
    }

    /// True when every arc goes from a lower to a strictly higher state.
    pub fn is_topologically_sorted(&self) -> bool {
        self.arcs.iter().all(|a| a.dest > a.origin)
    }

    /// Reinterprets the automaton over another semiring with the same
    /// element type, e.g. a [`crate::semiring::Counting`] wrapper.
    pub fn rebind<T: Semiring<Elem = S::Elem>>(self, semiring: T) -> Automaton<T> {
        Automaton {
            semiring,
            num_states: self.num_states,
            arcs: self.arcs,
            initial: self.initial,
            finals: self.finals,
        }
    }
}

/// Concatenation: every accepting path of `a` followed by every accepting
/// path of `b`.
///
/// `b`'s states are shifted by `a.num_states()`, and an ε-arc `q → r` with
/// weight `ρ_a(q) ⊗ λ_b(r)` joins each final state of `a` to each initial
/// state of `b`. The result keeps `a`'s initial and `b`'s final weights.
pub fn concat<S: Semiring>(a: &Automaton<S>, b: &Automaton<S>) -> Result<Automaton<S>> {
    if a.semiring != b.semiring {
        return Err(invalid(format!(
            "semiring mismatch: {:?} vs {:?}",
            a.semiring, b.semiring
        )));
    }
    let s = &a.semiring;
    let offset = a.num_states;
    let mut arcs = Vec::with_capacity(a.arcs.len() + b.arcs.len() + a.finals.len() * b.initial.len());
    arcs.extend_from_slice(&a.arcs);
    arcs.extend(b.arcs.iter().map(|arc| Arc {
        origin: arc.origin + offset,
        dest: arc.dest + offset,
        ..*arc
    }));
    for (&q, &rho) in &a.finals {
        for (&r, &lambda) in &b.initial {
            arcs.push(Arc {
                origin: q,
                dest: r + offset,
                label: EPSILON,
                weight: s.times(rho, lambda),
            });
        }
    }
    Ok(Automaton {
        semiring: s.clone(),
        num_states: a.num_states + b.num_states,
        arcs,
        initial: a.initial.clone(),
        finals: b.finals.iter().map(|(&q, &w)| (q + offset, w)).collect(),
    })
}

/// `base` concatenated with itself `n` times (`n >= 1`).
pub fn concat_power<S: Semiring>(base: &Automaton<S>, n: usize) -> Result<Automaton<S>> {
    if n == 0 {
        return Err(invalid("concatenation power must be at least 1"));
    }
    let mut out = base.clone();
    for _ in 1..n {
        out = concat(&out, base)?;
    }
    Ok(out)
}
