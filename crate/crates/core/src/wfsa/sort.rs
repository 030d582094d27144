use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use super::{Arc, Automaton};
use crate::error::{Error, Result};
use crate::semiring::Semiring;

/// Relabels states so that every arc goes from a lower to a higher state.
///
/// Kahn's algorithm, always emitting the smallest available state, so an
/// already sorted automaton comes back unchanged with the identity
/// permutation. Returns the relabeled automaton and `perm` with
/// `perm[old] = new`.
pub fn topological_sort<S: Semiring>(a: &Automaton<S>) -> Result<(Automaton<S>, Vec<usize>)> {
    let n = a.num_states;
    let mut indegree = vec![0usize; n];
    let mut succ_ptr = vec![0usize; n + 1];
    for arc in &a.arcs {
        if arc.origin == arc.dest {
            return Err(Error::Cyclic { state: arc.origin });
        }
        indegree[arc.dest] += 1;
        succ_ptr[arc.origin + 1] += 1;
    }
    for i in 0..n {
        succ_ptr[i + 1] += succ_ptr[i];
    }
    let mut fill = succ_ptr.clone();
    let mut succ = vec![0usize; a.arcs.len()];
    for arc in &a.arcs {
        succ[fill[arc.origin]] = arc.dest;
        fill[arc.origin] += 1;
    }

    let mut heap: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&q| indegree[q] == 0).map(Reverse).collect();
    let mut perm = vec![usize::MAX; n];
    let mut next = 0;
    while let Some(Reverse(q)) = heap.pop() {
        perm[q] = next;
        next += 1;
        for &r in &succ[succ_ptr[q]..succ_ptr[q + 1]] {
            indegree[r] -= 1;
            if indegree[r] == 0 {
                heap.push(Reverse(r));
            }
        }
    }
    if next < n {
        return Err(Error::Cyclic {
            state: state_on_cycle(a, &perm),
        });
    }

    let arcs = a
        .arcs
        .iter()
        .map(|arc| Arc {
            origin: perm[arc.origin],
            dest: perm[arc.dest],
            ..*arc
        })
        .collect();
    let remap = |m: &BTreeMap<usize, S::Elem>| m.iter().map(|(&q, &w)| (perm[q], w)).collect();
    let sorted = Automaton {
        semiring: a.semiring.clone(),
        num_states: n,
        arcs,
        initial: remap(&a.initial),
        finals: remap(&a.finals),
    };
    Ok((sorted, perm))
}

/// Every state Kahn's algorithm could not emit has an unemitted predecessor;
/// walking predecessors must eventually revisit a state, which lies on a cycle.
fn state_on_cycle<S: Semiring>(a: &Automaton<S>, perm: &[usize]) -> usize {
    let n = a.num_states;
    let mut pred = vec![usize::MAX; n];
    for arc in &a.arcs {
        if perm[arc.origin] == usize::MAX && perm[arc.dest] == usize::MAX {
            pred[arc.dest] = arc.origin;
        }
    }
    let mut q = (0..n)
        .find(|&q| perm[q] == usize::MAX)
        .expect("an unsorted state exists");
    let mut seen = vec![false; n];
    while !seen[q] {
        seen[q] = true;
        q = pred[q];
    }
    q
}
