use super::Automaton;
use crate::error::{invalid, Error, Result};
use crate::linalg::{dot_slices, CotangentVector, CsrMatrix, SemiringVector};
use crate::semiring::{Cotangent, Semiring};

/// Single-source shortest distances `dᵀ = αᵀT*`.
pub type DistanceVector<S> = SemiringVector<S>;

/// Matrix form of a sorted automaton: `T`, `α`, `ω`, and for every stored
/// entry of `T` the arcs whose weights were ⊕-merged into it.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix<S: Semiring> {
    pub transitions: CsrMatrix<S>,
    pub alpha: SemiringVector<S>,
    pub omega: SemiringVector<S>,
    contrib_ptr: Vec<usize>,
    contrib_arcs: Vec<usize>,
    arc_entry: Vec<usize>,
}

impl<S: Semiring> WeightMatrix<S> {
    /// Arc indices merged into stored entry `k`, in arc order.
    pub fn contributors(&self, k: usize) -> &[usize] {
        &self.contrib_arcs[self.contrib_ptr[k]..self.contrib_ptr[k + 1]]
    }

    /// Stored entry that arc `e` contributes to.
    pub fn entry_of_arc(&self, e: usize) -> usize {
        self.arc_entry[e]
    }
}

/// Builds `T_ij = ⊕ { w(e) : o(e) = i, d(e) = j }`, `α` and `ω`.
///
/// Parallel arcs are merged in arc-index order. Entries stay stored even if
/// their sum is 0̄ so that every arc keeps a gradient slot.
pub fn build_matrix<S: Semiring>(a: &Automaton<S>) -> Result<WeightMatrix<S>> {
    let s = &a.semiring;
    let n = a.num_states;
    let arcs = &a.arcs;
    if let Some(arc) = arcs.iter().find(|arc| arc.dest <= arc.origin) {
        return Err(Error::Structure {
            row: arc.origin,
            col: arc.dest,
            reason: "breaks topological order",
        });
    }

    // counting sort of arcs by origin, then by (dest, index) inside each row
    let mut row_start = vec![0usize; n + 1];
    for arc in arcs {
        row_start[arc.origin + 1] += 1;
    }
    for i in 0..n {
        row_start[i + 1] += row_start[i];
    }
    let mut order = vec![0usize; arcs.len()];
    let mut fill = row_start.clone();
    for (e, arc) in arcs.iter().enumerate() {
        order[fill[arc.origin]] = e;
        fill[arc.origin] += 1;
    }
    for i in 0..n {
        order[row_start[i]..row_start[i + 1]].sort_unstable_by_key(|&e| (arcs[e].dest, e));
    }

    let mut row_ptr = vec![0usize; n + 1];
    let mut cols = Vec::with_capacity(arcs.len());
    let mut vals: Vec<S::Elem> = Vec::with_capacity(arcs.len());
    let mut contrib_ptr = Vec::with_capacity(arcs.len() + 1);
    let mut arc_entry = vec![0usize; arcs.len()];
    let mut last: Option<(usize, usize)> = None;
    for (pos, &e) in order.iter().enumerate() {
        let arc = &arcs[e];
        let key = (arc.origin, arc.dest);
        if last == Some(key) {
            let top = vals.last_mut().expect("entry exists");
            *top = s.plus(*top, arc.weight);
        } else {
            contrib_ptr.push(pos);
            cols.push(arc.dest);
            vals.push(arc.weight);
            row_ptr[arc.origin + 1] += 1;
            last = Some(key);
        }
        arc_entry[e] = cols.len() - 1;
    }
    contrib_ptr.push(order.len());
    for i in 0..n {
        row_ptr[i + 1] += row_ptr[i];
    }

    let mut alpha = Vec::with_capacity(n);
    let mut omega = Vec::with_capacity(n);
    for q in 0..n {
        alpha.push(a.initial_weight(q));
        omega.push(a.final_weight(q));
    }
    Ok(WeightMatrix {
        transitions: CsrMatrix::from_raw_parts(s.clone(), n, row_ptr, cols, vals, true),
        alpha: SemiringVector::new(s.clone(), alpha),
        omega: SemiringVector::new(s.clone(), omega),
        contrib_ptr,
        contrib_arcs: order,
        arc_entry,
    })
}

/// Computes `dᵀ = αᵀT*` for strictly upper triangular `T`.
///
/// Push schedule: `d ← α`, then for each state `j` in increasing order and
/// each stored `T_ji`, `d_i ← d_i ⊕ (d_j ⊗ T_ji)`. Every predecessor of `i`
/// is finished before `i` is read, so this is the recursion
/// `d_i = α_i ⊕ ⊕_{j<i} d_j ⊗ T_ji` with exactly one ⊗ and one ⊕ per
/// stored entry.
pub fn shortest_distance<S: Semiring>(
    t: &CsrMatrix<S>,
    alpha: &SemiringVector<S>,
) -> Result<DistanceVector<S>> {
    if t.semiring() != alpha.semiring() {
        return Err(invalid("semiring mismatch between T and alpha"));
    }
    if t.dim() != alpha.len() {
        return Err(invalid(format!(
            "dimension mismatch: T is {0}x{0}, alpha has {1} entries",
            t.dim(),
            alpha.len()
        )));
    }
    let s = t.semiring();
    let row_ptr = t.row_ptr();
    let cols = t.col_indices();
    let vals = t.values();
    let mut d = alpha.as_slice().to_vec();
    for j in 0..t.dim() {
        let dj = d[j];
        for k in row_ptr[j]..row_ptr[j + 1] {
            let i = cols[k];
            if i <= j {
                return Err(Error::Structure {
                    row: j,
                    col: i,
                    reason: "is not strictly upper triangular",
                });
            }
            d[i] = s.plus(d[i], s.times(dj, vals[k]));
        }
    }
    Ok(SemiringVector::new(s.clone(), d))
}

/// `ν = dᵀω` and `d`, from a prebuilt matrix.
pub fn weight_from_matrix<S: Semiring>(m: &WeightMatrix<S>) -> Result<(S::Elem, DistanceVector<S>)> {
    let d = shortest_distance(&m.transitions, &m.alpha)?;
    let nu = dot_slices(d.semiring(), d.as_slice(), m.omega.as_slice());
    Ok((nu, d))
}

/// Weight `ν(A) = αᵀT*ω` of a topologically sorted automaton, together
/// with the shortest distances `d`.
pub fn weight<S: Semiring>(a: &Automaton<S>) -> Result<(S::Elem, DistanceVector<S>)> {
    weight_from_matrix(&build_matrix(a)?)
}

/// Everything the backward pass needs from a forward evaluation.
#[derive(Debug, Clone)]
pub struct Forward<S: Semiring> {
    pub matrix: WeightMatrix<S>,
    pub distances: DistanceVector<S>,
    pub nu: S::Elem,
}

impl<S: Semiring> Forward<S> {
    pub fn evaluate(a: &Automaton<S>) -> Result<Self> {
        let matrix = build_matrix(a)?;
        let (nu, distances) = weight_from_matrix(&matrix)?;
        Ok(Self {
            matrix,
            distances,
            nu,
        })
    }

    pub fn backward(&self, a: &Automaton<S>, delta_z: S::Cotangent) -> Result<AutomatonGradients<S::Cotangent>> {
        weight_vjp(a, &self.matrix, &self.distances, self.nu, delta_z)
    }
}

/// Gradients of `ν(A)` with respect to every parameter of the automaton.
#[derive(Debug, Clone, PartialEq)]
pub struct AutomatonGradients<C> {
    /// `∂ν/∂λ(q)` for every state.
    pub grad_initial: CotangentVector<C>,
    /// `∂ν/∂ρ(q)` for every state.
    pub grad_final: CotangentVector<C>,
    /// `∂ν/∂w(e)`, aligned with the automaton's arcs.
    pub grad_arcs: CotangentVector<C>,
    /// `∂ν/∂T_ij`, aligned with the stored entries of `T`.
    pub grad_matrix: CotangentVector<C>,
}

/// Flattened VJP of [`weight`].
///
/// One backward sweep over states `Q-1, …, 0`. When state `i` is visited
/// the adjoints of all its successors are final, so `∇d_i` collects the
/// dot-product term `d_i ⊗ ω_i` and, for each stored `T_ij`, the term
/// `d_i ⊗ T_ij` of the ⊕-sum `d_j`, each through
/// [`Semiring::pullback_through_sum`]. Arc gradients are obtained by pulling
/// `∇T_ij` back through the ⊕-merge of parallel arcs. No intermediate value
/// is stored by the forward pass; allocation is limited to the outputs and
/// one scratch vector.
pub fn weight_vjp<S: Semiring>(
    a: &Automaton<S>,
    m: &WeightMatrix<S>,
    d: &DistanceVector<S>,
    nu: S::Elem,
    delta_z: S::Cotangent,
) -> Result<AutomatonGradients<S::Cotangent>> {
    let n = a.num_states;
    let t = &m.transitions;
    if t.dim() != n || d.len() != n || m.alpha.len() != n || m.omega.len() != n {
        return Err(invalid("stale inputs: dimensions do not match the automaton"));
    }
    if m.arc_entry.len() != a.arcs.len() {
        return Err(invalid("stale inputs: arc count does not match the matrix"));
    }
    if d.semiring() != &a.semiring || t.semiring() != &a.semiring {
        return Err(invalid("semiring mismatch"));
    }
    let s = &a.semiring;
    let dv = d.as_slice();
    let alpha = m.alpha.as_slice();
    let omega = m.omega.as_slice();
    let row_ptr = t.row_ptr();
    let cols = t.col_indices();
    let vals = t.values();
    let zero = S::Cotangent::zero();

    let mut grad_d = vec![zero; n];
    let mut grad_initial = vec![zero; n];
    let mut grad_final = vec![zero; n];
    let mut grad_matrix = vec![zero; t.nnz()];
    for i in (0..n).rev() {
        let di = dv[i];
        let u = s.times(di, omega[i]);
        let p = s.pullback_through_sum(nu, u, delta_z);
        let mut g = s.vjp_times_left(di, omega[i], p);
        grad_final[i] = s.vjp_times_right(di, omega[i], p);
        for k in row_ptr[i]..row_ptr[i + 1] {
            let j = cols[k];
            let v = s.times(di, vals[k]);
            let p = s.pullback_through_sum(dv[j], v, grad_d[j]);
            g += s.vjp_times_left(di, vals[k], p);
            grad_matrix[k] = s.vjp_times_right(di, vals[k], p);
        }
        grad_d[i] = g;
        grad_initial[i] = s.pullback_through_sum(di, alpha[i], g);
    }

    let grad_arcs = a
        .arcs
        .iter()
        .zip(&m.arc_entry)
        .map(|(arc, &k)| s.pullback_through_sum(vals[k], arc.weight, grad_matrix[k]))
        .collect();
    Ok(AutomatonGradients {
        grad_initial,
        grad_final,
        grad_arcs,
        grad_matrix,
    })
}
