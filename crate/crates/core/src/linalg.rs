//! Sparse exact matrices, rank, kernels and homology of composable pairs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{axpy_rows, Scalar};

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec<S> = Vec<(usize, S)>;

/// Sum duplicate indices, drop zeros, sort.
pub fn canonical_vec<S: Scalar>(entries: impl IntoIterator<Item = (usize, S)>) -> SparseVec<S> {
    let mut acc: BTreeMap<usize, S> = BTreeMap::new();
    for (i, v) in entries {
        if v.is_zero() {
            continue;
        }
        match acc.get_mut(&i) {
            Some(x) => *x = x.clone() + v,
            None => {
                acc.insert(i, v);
            }
        }
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// Column-major sparse matrix with canonical triplet storage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix<S> {
    rows: usize,
    cols: usize,
    /// Sorted by (col, row).
    entries: Vec<(usize, usize, S)>,
}

impl<S: Scalar> SparseMatrix<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix { rows: n, cols: n, entries: (0..n).map(|i| (i, i, S::one())).collect() }
    }

    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, S)>) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), S> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::ShapeMismatch(format!("entry ({r},{c}) outside a {rows}x{cols} matrix")));
            }
            if v.is_zero() {
                continue;
            }
            match acc.get_mut(&(c, r)) {
                Some(x) => *x = x.clone() + v,
                None => {
                    acc.insert((c, r), v);
                }
            }
        }
        let entries = acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((c, r), v)| (r, c, v)).collect();
        Ok(SparseMatrix { rows, cols, entries })
    }

    /// Build from sparse columns (each column a sparse vector of row indices).
    pub fn from_columns(rows: usize, columns: Vec<SparseVec<S>>) -> Result<Self> {
        let cols = columns.len();
        let trip = columns.into_iter().enumerate().flat_map(|(c, col)| col.into_iter().map(move |(r, v)| (r, c, v)));
        Self::from_triplets(rows, cols, trip)
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::ShapeMismatch("ragged dense matrix".into()));
        }
        let trip = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, v)| (i, j, S::from_i64(*v))));
        Self::from_triplets(nrows, ncols, trip)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, S)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> S {
        self.entries
            .binary_search_by(|(er, ec, _)| (*ec, *er).cmp(&(c, r)))
            .map(|i| self.entries[i].2.clone())
            .unwrap_or_else(|_| S::zero())
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())).collect();
        entries.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
        SparseMatrix { rows: self.cols, cols: self.rows, entries }
    }

    pub fn row_lists(&self) -> Vec<SparseVec<S>> {
        let mut out = vec![Vec::new(); self.rows];
        for (r, c, v) in &self.entries {
            out[*r].push((*c, v.clone()));
        }
        out
    }

    pub fn column_lists(&self) -> Vec<SparseVec<S>> {
        let mut out = vec![Vec::new(); self.cols];
        for (r, c, v) in &self.entries {
            out[*c].push((*r, v.clone()));
        }
        out
    }

    pub fn column(&self, c: usize) -> SparseVec<S> {
        let start = self.entries.partition_point(|(_, ec, _)| *ec < c);
        self.entries[start..].iter().take_while(|(_, ec, _)| *ec == c).map(|(r, _, v)| (*r, v.clone())).collect()
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix<S>) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let left_cols = self.column_lists();
        let mut trip = Vec::new();
        for (k, j, b) in &other.entries {
            for (i, a) in &left_cols[*k] {
                trip.push((*i, *j, a.clone() * b.clone()));
            }
        }
        Self::from_triplets(self.rows, other.cols, trip)
    }

    pub fn apply(&self, v: &[(usize, S)]) -> SparseVec<S> {
        let mut out = Vec::new();
        for (c, x) in v {
            for (r, a) in self.column(*c) {
                out.push((r, a * x.clone()));
            }
        }
        canonical_vec(out)
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero(self.rows, self.cols);
        }
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|(r, c, v)| (*r, *c, v.clone() * s.clone())).collect(),
        }
    }

    pub fn add(&self, other: &SparseMatrix<S>) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Self::from_triplets(self.rows, self.cols, self.entries.iter().chain(other.entries.iter()).cloned())
    }

    pub fn to_dense_strings(&self) -> Vec<Vec<String>> {
        let mut out = vec![vec!["0".to_string(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            out[*r][*c] = v.to_exact_string();
        }
        out
    }
}

/// Rank via fraction-free elimination over the rationals, plain elimination
/// over prime fields. Eliminates along whichever side is shorter.
pub fn rank<S: Scalar>(m: &SparseMatrix<S>) -> usize {
    if m.is_zero() {
        return 0;
    }
    if m.rows <= m.cols {
        S::rank_of_rows(m.row_lists())
    } else {
        S::rank_of_rows(m.column_lists())
    }
}

/// Incrementally maintained reduced row echelon basis of a subspace.
#[derive(Clone, Debug)]
pub struct Echelon<S> {
    /// Pivot column -> row with 1 at the pivot and zeros at every other pivot.
    pivots: BTreeMap<usize, SparseVec<S>>,
}

impl<S: Scalar> Default for Echelon<S> {
    fn default() -> Self {
        Echelon { pivots: BTreeMap::new() }
    }
}

impl<S: Scalar> Echelon<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.pivots.contains_key(&c)
    }

    /// Remainder of `v` modulo the span; supported on non-pivot columns only.
    pub fn reduce(&self, v: &[(usize, S)]) -> SparseVec<S> {
        let mut v: SparseVec<S> = v.to_vec();
        loop {
            let hit = v.iter().find(|(c, _)| self.pivots.contains_key(c)).cloned();
            match hit {
                Some((c, x)) => {
                    let p = &self.pivots[&c];
                    v = axpy_rows(&v, &S::one(), p, &(-x));
                }
                None => return v,
            }
        }
    }

    /// Adds `v` to the span; returns whether it was independent.
    pub fn insert(&mut self, v: &[(usize, S)]) -> bool {
        let r = self.reduce(v);
        let Some((lead, lead_val)) = r.first().cloned() else {
            return false;
        };
        let inv = S::one() / lead_val;
        let r: SparseVec<S> = r.into_iter().map(|(c, x)| (c, x * inv.clone())).collect();
        for row in self.pivots.values_mut() {
            if let Ok(i) = row.binary_search_by(|(c, _)| c.cmp(&lead)) {
                let x = row[i].1.clone();
                *row = axpy_rows(row, &S::one(), &r, &(-x));
            }
        }
        self.pivots.insert(lead, r);
        true
    }

    pub fn contains(&self, v: &[(usize, S)]) -> bool {
        self.reduce(v).is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&usize, &SparseVec<S>)> {
        self.pivots.iter()
    }
}

/// Basis of the null space `{v : m v = 0}`, one vector per free column.
pub fn kernel_basis<S: Scalar>(m: &SparseMatrix<S>) -> Vec<SparseVec<S>> {
    let mut ech = Echelon::new();
    for row in m.row_lists() {
        ech.insert(&row);
    }
    let mut out = Vec::new();
    for f in 0..m.cols {
        if ech.is_pivot(f) {
            continue;
        }
        let mut v = vec![(f, S::one())];
        for (p, row) in ech.rows() {
            if let Ok(i) = row.binary_search_by(|(c, _)| c.cmp(&f)) {
                v.push((*p, -row[i].1.clone()));
            }
        }
        v.sort_by_key(|(c, _)| *c);
        out.push(v);
    }
    out
}

/// `dim ker(d_out) - rank(d_in)` for a composable pair with `d_out * d_in = 0`.
pub fn homology_dim<S: Scalar>(d_in: &SparseMatrix<S>, d_out: &SparseMatrix<S>) -> Result<usize> {
    if d_in.rows != d_out.cols {
        return Err(Error::ShapeMismatch(format!(
            "incoming map has {} rows but outgoing map has {} columns",
            d_in.rows, d_out.cols
        )));
    }
    if !d_out.mul(d_in)?.is_zero() {
        return Err(Error::CompositionNonzero { context: "homology_dim".into() });
    }
    Ok(d_out.cols - rank(d_out) - rank(d_in))
}
