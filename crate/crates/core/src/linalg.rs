//! Semiring vectors, the CSR transition matrix, and the semiring dot
//! product with its flattened vector-Jacobian product.

use crate::error::{invalid, Error, Result};
use crate::semiring::Semiring;

/// A sequence of semiring elements tagged with the semiring they live in.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiringVector<S: Semiring> {
    semiring: S,
    elems: Vec<S::Elem>,
}

pub type CotangentVector<C> = Vec<C>;

impl<S: Semiring> SemiringVector<S> {
    pub fn new(semiring: S, elems: Vec<S::Elem>) -> Self {
        Self { semiring, elems }
    }

    pub fn zeros(semiring: S, len: usize) -> Self {
        let z = semiring.zero();
        Self::new(semiring, vec![z; len])
    }

    pub fn semiring(&self) -> &S {
        &self.semiring
    }

    pub fn as_slice(&self) -> &[S::Elem] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn into_vec(self) -> Vec<S::Elem> {
        self.elems
    }
}

impl<S: Semiring> std::ops::Index<usize> for SemiringVector<S> {
    type Output = S::Elem;

    fn index(&self, i: usize) -> &S::Elem {
        &self.elems[i]
    }
}

fn check_pair<S: Semiring>(x: &SemiringVector<S>, y: &SemiringVector<S>) -> Result<()> {
    if x.semiring != y.semiring {
        return Err(invalid(format!(
            "semiring mismatch: {:?} vs {:?}",
            x.semiring, y.semiring
        )));
    }
    if x.len() != y.len() {
        return Err(invalid(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// `(x₁⊗y₁) ⊕ … ⊕ (x_K⊗y_K)`, accumulated left to right. Empty input gives 0̄.
#[inline]
pub fn dot_slices<S: Semiring>(s: &S, x: &[S::Elem], y: &[S::Elem]) -> S::Elem {
    debug_assert_eq!(x.len(), y.len());
    let mut terms = x.iter().zip(y).map(|(&a, &b)| s.times(a, b));
    match terms.next() {
        None => s.zero(),
        Some(first) => terms.fold(first, |acc, u| s.plus(acc, u)),
    }
}

/// Semiring dot product of two vectors.
pub fn dot<S: Semiring>(x: &SemiringVector<S>, y: &SemiringVector<S>) -> Result<S::Elem> {
    check_pair(x, y)?;
    Ok(dot_slices(&x.semiring, &x.elems, &y.elems))
}

/// Flattened VJP of [`dot`].
///
/// Each term `u_i = x_i ⊗ y_i` is recomputed rather than read from a tape;
/// the only allocations are the two returned vectors.
pub fn dot_vjp<S: Semiring>(
    x: &SemiringVector<S>,
    y: &SemiringVector<S>,
    z: S::Elem,
    delta_z: S::Cotangent,
) -> Result<(CotangentVector<S::Cotangent>, CotangentVector<S::Cotangent>)> {
    check_pair(x, y)?;
    let s = &x.semiring;
    let mut grad_x = Vec::with_capacity(x.len());
    let mut grad_y = Vec::with_capacity(y.len());
    for (&a, &b) in x.elems.iter().zip(&y.elems) {
        let u = s.times(a, b);
        let p = s.pullback_through_sum(z, u, delta_z);
        grad_x.push(s.vjp_times_left(a, b, p));
        grad_y.push(s.vjp_times_right(a, b, p));
    }
    Ok((grad_x, grad_y))
}

/// Square sparse matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<S: Semiring> {
    semiring: S,
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<S::Elem>,
    strictly_upper: bool,
}

impl<S: Semiring> CsrMatrix<S> {
    /// Builds a matrix from `(row, col, value)` triplets.
    ///
    /// Duplicates are ⊕-combined in input order, entries equal to 0̄ are
    /// dropped and each row is sorted by column.
    pub fn from_triplets(
        semiring: S,
        dim: usize,
        entries: &[(usize, usize, S::Elem)],
        require_strict_upper: bool,
    ) -> Result<Self> {
        let mut m = Self::from_triplets_keep_zeros(semiring, dim, entries, require_strict_upper)?;
        m.drop_zeros();
        Ok(m)
    }

    pub(crate) fn from_triplets_keep_zeros(
        semiring: S,
        dim: usize,
        entries: &[(usize, usize, S::Elem)],
        require_strict_upper: bool,
    ) -> Result<Self> {
        for &(row, col, _) in entries {
            if row >= dim || col >= dim {
                return Err(Error::Structure {
                    row,
                    col,
                    reason: "is out of bounds",
                });
            }
            if require_strict_upper && col <= row {
                return Err(Error::Structure {
                    row,
                    col,
                    reason: "is not strictly upper triangular",
                });
            }
        }
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_unstable_by_key(|&k| (entries[k].0, entries[k].1, k));

        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<S::Elem> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (r, c, v) = entries[k];
            if last == Some((r, c)) {
                let top = vals.last_mut().expect("merged entry exists");
                *top = semiring.plus(*top, v);
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            semiring,
            dim,
            row_ptr,
            cols,
            vals,
            strictly_upper: require_strict_upper,
        })
    }

    pub(crate) fn from_raw_parts(
        semiring: S,
        dim: usize,
        row_ptr: Vec<usize>,
        cols: Vec<usize>,
        vals: Vec<S::Elem>,
        strictly_upper: bool,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), dim + 1);
        debug_assert_eq!(cols.len(), vals.len());
        Self {
            semiring,
            dim,
            row_ptr,
            cols,
            vals,
            strictly_upper,
        }
    }

    fn drop_zeros(&mut self) {
        let s = &self.semiring;
        let mut write = 0;
        let mut start = 0;
        for i in 0..self.dim {
            let end = self.row_ptr[i + 1];
            for k in start..end {
                if !s.is_zero(self.vals[k]) {
                    self.cols[write] = self.cols[k];
                    self.vals[write] = self.vals[k];
                    write += 1;
                }
            }
            start = end;
            self.row_ptr[i + 1] = write;
        }
        self.cols.truncate(write);
        self.vals.truncate(write);
    }

    pub fn semiring(&self) -> &S {
        &self.semiring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_strictly_upper(&self) -> bool {
        self.strictly_upper
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.cols
    }

    pub fn values(&self) -> &[S::Elem] {
        &self.vals
    }

    /// Stored `(col, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, S::Elem)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.vals[range].iter().copied())
    }

    /// Value at `(i, j)`, 0̄ when not stored.
    pub fn get(&self, i: usize, j: usize) -> S::Elem {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[range.clone()].binary_search(&j) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => self.semiring.zero(),
        }
    }

    /// Iterates over all stored `(row, col, value)` entries in storage order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, S::Elem)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }
}
