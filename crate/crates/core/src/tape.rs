//! Naive tape-based reverse mode over semiring scalars.
//!
//! This is what a generic AD system does when it knows nothing about the
//! semiring: it records every ⊕ and ⊗ as a node (one heap allocation each),
//! keeps the whole graph alive until the backward pass, and chains the
//! elementary partials node by node. It serves as a reference for the
//! flattened rules in [`crate::linalg`] and [`crate::wfsa`] and as the
//! benchmark baseline.

use crate::error::{invalid, Result};
use crate::linalg::SemiringVector;
use crate::semiring::{BinaryOp, Cotangent, Semiring};
use crate::wfsa::{build_matrix, Automaton};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOp {
    Leaf,
    Apply(BinaryOp, usize, usize),
}

#[derive(Debug, Clone)]
pub struct TapeNode<E> {
    pub op: NodeOp,
    pub value: E,
}

/// Append-only computation graph. Node arguments always precede the node.
#[derive(Debug)]
pub struct Tape<S: Semiring> {
    semiring: S,
    nodes: Vec<Box<TapeNode<S::Elem>>>,
    inputs: Vec<usize>,
    output: Option<usize>,
}

impl<S: Semiring> Tape<S> {
    pub fn new(semiring: S) -> Self {
        Self {
            semiring,
            nodes: Vec::new(),
            inputs: Vec::new(),
            output: None,
        }
    }

    fn push(&mut self, op: NodeOp, value: S::Elem) -> usize {
        self.nodes.push(Box::new(TapeNode { op, value }));
        self.nodes.len() - 1
    }

    /// Records a tracked input and returns its node id.
    pub fn input(&mut self, value: S::Elem) -> usize {
        let id = self.push(NodeOp::Leaf, value);
        self.inputs.push(id);
        id
    }

    pub fn plus(&mut self, a: usize, b: usize) -> usize {
        let v = self.semiring.plus(self.nodes[a].value, self.nodes[b].value);
        self.push(NodeOp::Apply(BinaryOp::Plus, a, b), v)
    }

    pub fn times(&mut self, a: usize, b: usize) -> usize {
        let v = self.semiring.times(self.nodes[a].value, self.nodes[b].value);
        self.push(NodeOp::Apply(BinaryOp::Times, a, b), v)
    }

    pub fn set_output(&mut self, id: usize) {
        self.output = Some(id);
    }

    pub fn value(&self, id: usize) -> S::Elem {
        self.nodes[id].value
    }

    pub fn node(&self, id: usize) -> &TapeNode<S::Elem> {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of node allocations performed so far.
    pub fn allocations(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    /// Number of ⊕ and ⊗ nodes.
    pub fn op_counts(&self) -> (usize, usize) {
        self.nodes.iter().fold((0, 0), |(p, t), n| match n.op {
            NodeOp::Apply(BinaryOp::Plus, ..) => (p + 1, t),
            NodeOp::Apply(BinaryOp::Times, ..) => (p, t + 1),
            NodeOp::Leaf => (p, t),
        })
    }

    /// Reverse sweep from the output node. Returns one cotangent per tracked
    /// input, in recording order.
    pub fn backward(&self, delta_z: S::Cotangent) -> Result<Vec<S::Cotangent>> {
        let out = self
            .output
            .ok_or_else(|| invalid("tape has no output node"))?;
        let mut adj = vec![S::Cotangent::zero(); self.nodes.len()];
        adj[out] = delta_z;
        for id in (0..=out).rev() {
            if let NodeOp::Apply(op, a, b) = self.nodes[id].op {
                let g = adj[id];
                let (ga, gb) =
                    self.semiring
                        .direct_partials(op, self.nodes[a].value, self.nodes[b].value, g);
                adj[a] += ga;
                adj[b] += gb;
            }
        }
        Ok(self.inputs.iter().map(|&i| adj[i]).collect())
    }
}

/// Records `(x₁⊗y₁) ⊕ … ⊕ (x_K⊗y_K)` with the same accumulation order as
/// [`crate::linalg::dot`]. Tracked inputs are `x` followed by `y`.
pub fn record_dot<S: Semiring>(
    x: &SemiringVector<S>,
    y: &SemiringVector<S>,
) -> Result<(S::Elem, Tape<S>)> {
    if x.semiring() != y.semiring() || x.len() != y.len() {
        return Err(invalid("dot operands differ in semiring or length"));
    }
    let s = x.semiring();
    let mut tape = Tape::new(s.clone());
    let xs: Vec<usize> = x.as_slice().iter().map(|&v| tape.input(v)).collect();
    let ys: Vec<usize> = y.as_slice().iter().map(|&v| tape.input(v)).collect();
    let mut acc: Option<usize> = None;
    for (&a, &b) in xs.iter().zip(&ys) {
        let u = tape.times(a, b);
        acc = Some(match acc {
            None => u,
            Some(z) => tape.plus(z, u),
        });
    }
    let out = match acc {
        Some(id) => id,
        None => tape.push(NodeOp::Leaf, s.zero()),
    };
    tape.set_output(out);
    Ok((tape.value(out), tape))
}

/// Gradients recovered from a recorded weight computation.
#[derive(Debug, Clone, PartialEq)]
pub struct TapeGradients<C> {
    pub grad_initial: Vec<C>,
    pub grad_final: Vec<C>,
    pub grad_arcs: Vec<C>,
}

/// A recorded `ν(A)` evaluation.
#[derive(Debug)]
pub struct RecordedWeight<S: Semiring> {
    pub nu: S::Elem,
    pub tape: Tape<S>,
    num_states: usize,
    num_arcs: usize,
}

impl<S: Semiring> RecordedWeight<S> {
    pub fn gradients(&self, delta_z: S::Cotangent) -> Result<TapeGradients<S::Cotangent>> {
        let mut g = self.tape.backward(delta_z)?;
        let grad_arcs = g.split_off(2 * self.num_states);
        let grad_final = g.split_off(self.num_states);
        debug_assert_eq!(grad_arcs.len(), self.num_arcs);
        Ok(TapeGradients {
            grad_initial: g,
            grad_final,
            grad_arcs,
        })
    }
}

/// Records the full `ν(A)` computation: the ⊕-merge of parallel arcs, the
/// shortest-distance push recursion and the final dot product, in exactly
/// the order used by [`crate::wfsa::weight`]. Tracked inputs are `λ` for
/// every state, then `ρ` for every state, then every arc weight.
pub fn record_weight<S: Semiring>(a: &Automaton<S>) -> Result<RecordedWeight<S>> {
    let m = build_matrix(a)?;
    let n = a.num_states();
    let mut tape = Tape::new(a.semiring().clone());
    let alpha: Vec<usize> = (0..n).map(|q| tape.input(a.initial_weight(q))).collect();
    let omega: Vec<usize> = (0..n).map(|q| tape.input(a.final_weight(q))).collect();
    let arcs: Vec<usize> = a.arcs().iter().map(|arc| tape.input(arc.weight)).collect();

    let t = &m.transitions;
    let entries: Vec<usize> = (0..t.nnz())
        .map(|k| {
            let contrib = m.contributors(k);
            let mut acc = arcs[contrib[0]];
            for &e in &contrib[1..] {
                acc = tape.plus(acc, arcs[e]);
            }
            acc
        })
        .collect();

    let mut d = alpha.clone();
    let row_ptr = t.row_ptr();
    let cols = t.col_indices();
    for j in 0..n {
        for k in row_ptr[j]..row_ptr[j + 1] {
            let i = cols[k];
            let v = tape.times(d[j], entries[k]);
            d[i] = tape.plus(d[i], v);
        }
    }

    let mut acc: Option<usize> = None;
    for q in 0..n {
        let u = tape.times(d[q], omega[q]);
        acc = Some(match acc {
            None => u,
            Some(z) => tape.plus(z, u),
        });
    }
    let out = match acc {
        Some(id) => id,
        None => tape.push(NodeOp::Leaf, a.semiring().zero()),
    };
    tape.set_output(out);
    Ok(RecordedWeight {
        nu: tape.value(out),
        tape,
        num_states: n,
        num_arcs: a.num_arcs(),
    })
}
