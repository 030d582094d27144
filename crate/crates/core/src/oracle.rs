//! Brute-force references: path enumeration, finite differences, the
//! averaged subgradient of counted semirings, and operation counting.
//!
//! Everything here is deliberately independent of the matrix formulation in
//! [`crate::wfsa`] and is meant for tests and the `check` command only.

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, CsrMatrix, SemiringVector};
use crate::semiring::{Cotangent, Counting, OpCounter, Semiring};
use crate::wfsa::{build_matrix, shortest_distance, topological_sort, weight, weight_from_matrix, Automaton};

/// Default cap on enumerated paths.
pub const DEFAULT_MAX_PATHS: usize = 100_000;

/// One accepting path and its weight `λ(o(e₁)) ⊗ w(e₁) ⊗ … ⊗ ρ(d(eₙ))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord<E> {
    pub start: usize,
    pub arcs: Vec<usize>,
    pub weight: E,
}

impl<E> PathRecord<E> {
    pub fn end<S: Semiring<Elem = E>>(&self, a: &Automaton<S>) -> usize {
        self.arcs
            .last()
            .map_or(self.start, |&e| a.arcs()[e].dest)
    }
}

/// Enumerates every accepting path, ordered lexicographically by arc index
/// sequence (ties between empty paths broken by state).
pub fn enumerate_paths<S: Semiring>(
    a: &Automaton<S>,
    max_paths: usize,
) -> Result<Vec<PathRecord<S::Elem>>> {
    // rejects cycles
    topological_sort(a)?;
    let s = a.semiring();
    let n = a.num_states();
    let mut out_arcs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, arc) in a.arcs().iter().enumerate() {
        out_arcs[arc.origin].push(e);
    }
    // states from which a final state is reachable
    let mut live = vec![false; n];
    let mut changed = true;
    for (&q, &w) in a.finals() {
        live[q] = !s.is_zero(w);
    }
    while changed {
        changed = false;
        for arc in a.arcs() {
            if live[arc.dest] && !live[arc.origin] {
                live[arc.origin] = true;
                changed = true;
            }
        }
    }

    struct Walk<'a, S: Semiring> {
        a: &'a Automaton<S>,
        out_arcs: &'a [Vec<usize>],
        live: &'a [bool],
        max_paths: usize,
        stack: Vec<usize>,
        paths: Vec<PathRecord<S::Elem>>,
    }

    impl<S: Semiring> Walk<'_, S> {
        fn visit(&mut self, start: usize, q: usize, w: S::Elem) -> Result<()> {
            let s = self.a.semiring();
            let rho = self.a.final_weight(q);
            if !s.is_zero(rho) {
                if self.paths.len() == self.max_paths {
                    return Err(Error::PathExplosion {
                        limit: self.max_paths,
                    });
                }
                self.paths.push(PathRecord {
                    start,
                    arcs: self.stack.clone(),
                    weight: s.times(w, rho),
                });
            }
            for &e in &self.out_arcs[q] {
                let arc = self.a.arcs()[e];
                if !self.live[arc.dest] {
                    continue;
                }
                self.stack.push(e);
                self.visit(start, arc.dest, s.times(w, arc.weight))?;
                self.stack.pop();
            }
            Ok(())
        }
    }

    let mut walk = Walk {
        a,
        out_arcs: &out_arcs,
        live: &live,
        max_paths,
        stack: Vec::new(),
        paths: Vec::new(),
    };
    for (&q, &lambda) in a.initial() {
        if s.is_zero(lambda) || !live[q] {
            continue;
        }
        walk.visit(q, q, lambda)?;
    }
    let mut paths = walk.paths;
    paths.sort_by(|x, y| x.arcs.cmp(&y.arcs).then(x.start.cmp(&y.start)));
    Ok(paths)
}

/// `ν(A)` as the ⊕-fold of all accepting path weights.
pub fn brute_weight<S: Semiring>(a: &Automaton<S>, max_paths: usize) -> Result<S::Elem> {
    let s = a.semiring();
    Ok(enumerate_paths(a, max_paths)?
        .iter()
        .fold(s.zero(), |acc, p| s.plus(acc, p.weight)))
}

/// A differentiable parameter of an automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Initial(usize),
    Final(usize),
    Arc(usize),
}

impl Param {
    pub fn get<S: Semiring>(&self, a: &Automaton<S>) -> S::Elem {
        match *self {
            Param::Initial(q) => a.initial_weight(q),
            Param::Final(q) => a.final_weight(q),
            Param::Arc(e) => a.arcs()[e].weight,
        }
    }

    pub fn set<S: Semiring>(&self, a: &mut Automaton<S>, w: S::Elem) -> Result<()> {
        match *self {
            Param::Initial(q) => a.set_initial(q, w),
            Param::Final(q) => a.set_final(q, w),
            Param::Arc(e) => {
                if e >= a.num_arcs() {
                    return Err(invalid(format!("arc {e} out of range")));
                }
                a.set_arc_weight(e, w);
                Ok(())
            }
        }
    }

    /// All parameters: λ and ρ of every state, then every arc.
    pub fn all<S: Semiring>(a: &Automaton<S>) -> Vec<Param> {
        let n = a.num_states();
        (0..n)
            .map(Param::Initial)
            .chain((0..n).map(Param::Final))
            .chain((0..a.num_arcs()).map(Param::Arc))
            .collect()
    }
}

/// Central and one-sided difference quotients of one coordinate of `ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate {
    pub central: f64,
    pub forward: f64,
    pub backward: f64,
    pub step: f64,
}

/// Default step `1e-6 · max(1, |θ|)`.
pub fn default_step(theta: f64) -> f64 {
    1e-6 * theta.abs().max(1.0)
}

/// Finite-difference derivative of coordinate `output` of `ν(A)` with
/// respect to coordinate `coord` of `param`.
///
/// The automaton must be topologically sorted. For counted semirings the
/// estimate is refused with [`Error::TieWarning`] when the perturbation
/// changes the optimal count or the one-sided quotients disagree, since the
/// weight is not differentiable there.
pub fn fd_gradient<S: Semiring>(
    a: &Automaton<S>,
    param: Param,
    coord: usize,
    output: usize,
    step: Option<f64>,
) -> Result<FdEstimate> {
    if coord >= S::Cotangent::DIM || output >= S::Cotangent::DIM {
        return Err(invalid("coordinate out of range"));
    }
    let s = a.semiring();
    let base = param.get(a);
    let theta = s.coord(base, coord);
    if !theta.is_finite() {
        return Err(Error::Domain(format!(
            "parameter {param:?} sits at {theta}; not a differentiable coordinate"
        )));
    }
    let h = step.unwrap_or_else(|| default_step(theta));
    if !(h > 0.0) {
        return Err(invalid("finite-difference step must be positive"));
    }
    let mut work = a.clone();
    let mut eval = |t: f64| -> Result<S::Elem> {
        param.set(&mut work, s.with_coord(base, coord, t))?;
        Ok(weight(&work)?.0)
    };
    let nu0 = eval(theta)?;
    let nu_p = eval(theta + h)?;
    let nu_m = eval(theta - h)?;
    let (f0, fp, fm) = (s.coord(nu0, output), s.coord(nu_p, output), s.coord(nu_m, output));
    let est = FdEstimate {
        central: (fp - fm) / (2.0 * h),
        forward: (fp - f0) / h,
        backward: (f0 - fm) / h,
        step: h,
    };
    if let Some(c0) = s.tie_count(nu0) {
        let count_changed = s.tie_count(nu_p) != Some(c0) || s.tie_count(nu_m) != Some(c0);
        let kink = (est.forward - est.backward).abs() > 1e-6 * est.forward.abs().max(1.0);
        if count_changed || kink {
            return Err(Error::TieWarning(format!(
                "{param:?}: one-sided quotients {} and {}",
                est.forward, est.backward
            )));
        }
    }
    Ok(est)
}

/// Averaged subgradient of a counted (tropical/arctic) weight: the share of
/// optimal paths, weighted by their counts, that use `param`.
pub fn subgradient_reference<S: Semiring>(
    a: &Automaton<S>,
    param: Param,
    max_paths: usize,
) -> Result<f64> {
    let s = a.semiring();
    if s.tie_count(s.one()).is_none() {
        return Err(Error::Unsupported(format!(
            "subgradient reference needs a counted semiring, got {}",
            s.name()
        )));
    }
    let paths = enumerate_paths(a, max_paths)?;
    let best = paths.iter().fold(s.zero(), |acc, p| s.plus(acc, p.weight));
    if s.is_zero(best) {
        return Ok(0.0);
    }
    let best_value = s.coord(best, 0);
    let mut through = 0.0;
    let mut total = 0.0;
    for p in paths.iter().filter(|p| s.coord(p.weight, 0) == best_value) {
        let c = s.tie_count(p.weight).unwrap_or(1.0);
        total += c;
        let uses = match param {
            Param::Initial(q) => p.start == q,
            Param::Final(q) => p.end(a) == q,
            Param::Arc(e) => p.arcs.contains(&e),
        };
        if uses {
            through += c;
        }
    }
    Ok(through / total)
}

/// Counts ⊕/⊗ of a semiring dot product.
pub fn count_dot_ops<S: Semiring>(
    x: &SemiringVector<S>,
    y: &SemiringVector<S>,
) -> Result<OpCounter> {
    let c = Counting::new(x.semiring().clone());
    let xs = SemiringVector::new(c.clone(), x.as_slice().to_vec());
    let ys = SemiringVector::new(c.clone(), y.as_slice().to_vec());
    if x.semiring() != y.semiring() {
        return Err(invalid("semiring mismatch"));
    }
    dot(&xs, &ys)?;
    Ok(c.counts())
}

/// Counts ⊕/⊗ of the shortest-distance recursion.
pub fn count_shortest_distance_ops<S: Semiring>(
    t: &CsrMatrix<S>,
    alpha: &SemiringVector<S>,
) -> Result<OpCounter> {
    let c = Counting::new(t.semiring().clone());
    let entries: Vec<_> = t.entries().collect();
    let tc = CsrMatrix::from_triplets_keep_zeros(c.clone(), t.dim(), &entries, t.is_strictly_upper())?;
    let ac = SemiringVector::new(c.clone(), alpha.as_slice().to_vec());
    c.reset();
    shortest_distance(&tc, &ac)?;
    Ok(c.counts())
}

/// Counts ⊕/⊗ of `ν(A)` computed from `T`, `α`, `ω` (the shortest-distance
/// recursion plus the final dot product; building `T` is not counted).
pub fn count_weight_ops<S: Semiring>(a: &Automaton<S>) -> Result<OpCounter> {
    let c = Counting::new(a.semiring().clone());
    let m = build_matrix(&a.clone().rebind(c.clone()))?;
    c.reset();
    weight_from_matrix(&m)?;
    Ok(c.counts())
}

/// Recomputes `d_i = α_i ⊕ ⊕_{j<i} d_j ⊗ T_ji` column by column from a
/// given `d` and returns the right-hand side.
pub fn fixed_point_rhs<S: Semiring>(
    t: &CsrMatrix<S>,
    alpha: &SemiringVector<S>,
    d: &SemiringVector<S>,
) -> Vec<S::Elem> {
    let s = t.semiring();
    (0..t.dim())
        .map(|i| {
            (0..i).fold(alpha[i], |acc, j| {
                let tji = t.get(j, i);
                if s.is_zero(tji) {
                    acc
                } else {
                    s.plus(acc, s.times(d[j], tji))
                }
            })
        })
        .collect()
}
