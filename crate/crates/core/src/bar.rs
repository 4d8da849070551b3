//! Normalized bar construction, its deconcatenation coalgebra, and the Koszul
//! dual obtained by dualizing it.
//!
//! Bar words `[a1|…|an]` have degree `Σ(|a_i|+1)`. Writing `ε_k` for the degree
//! of the prefix `[a1|…|ak]`, the differential is
//!
//! ```text
//! d[a1|…|an] = Σ_k −(−1)^{ε_{k−1}} [a1|…|d a_k|…|an]
//!            + Σ_k  (−1)^{ε_k}     [a1|…|a_k a_{k+1}|…|an]
//! ```
//!
//! which is the Koszul rule applied to the suspended factors `s a_i` with
//! `d(s a) = −s(da)` and `s a ⊗ s b ↦ (−1)^{|a|+1} s(ab)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::algebra::{AlgebraParts, BasisElement, Certificate, DGAlgebra, Origin, ValidationReport};
use crate::error::{Error, Result};
use crate::graded::{parity_sign, shift, ChainComplex, DegreeRange, GradedMap, GradedSpace, HomologyRow, HomologyTable, TruncationWindow};
use crate::harness::{DualityReport, Pairing};
use crate::linalg::{canonical_vec, SparseVec};
use crate::scalar::Scalar;

/// A basis element of a bar or cyclic bar complex: an optional head `a₀`
/// (absent means the unit) followed by bar factors, all nonunit basis indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub head: Option<usize>,
    pub word: Vec<usize>,
}

impl Cell {
    pub fn bar(word: Vec<usize>) -> Self {
        Cell { head: None, word }
    }

    /// Number of nonunit tensor factors.
    pub fn cardinality(&self) -> usize {
        self.word.len() + usize::from(self.head.is_some())
    }
}

/// How words are enumerated and where the enumeration is faithful.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    /// All words of total auxiliary weight ≤ cap, together with every word
    /// whose degree lies in `degrees` when that is given.
    Weight { cap: u32, degrees: Option<(Option<i64>, Option<i64>)> },
    /// Words of length ≤ `max_len` with degree inside the given bounds.
    Degree { lo: Option<i64>, hi: Option<i64>, max_len: usize },
}

#[derive(Clone, Debug)]
pub(crate) struct Plan {
    pub mode: Mode,
    /// Degrees in which the enumerated chains (totalled over weights) are
    /// complete.
    pub known: DegreeRange,
    /// Auxiliary weights up to which each weight piece is complete.
    pub weight_exact: Option<u32>,
}

pub(crate) const EMPTY: DegreeRange = DegreeRange { lo: Some(1), hi: Some(0) };

fn require_certificate<S: Scalar>(a: &DGAlgebra<S>, operation: &str) -> Result<()> {
    if a.is_ground() {
        return Ok(());
    }
    match a.certificate() {
        Certificate::None => Err(Error::CertificateMissing { operation: operation.into() }),
        c => {
            if let Some(i) = a.ideal_indices().find(|i| !c.admits(a.degree(*i))) {
                return Err(Error::CertificateRejected {
                    claimed: c.name().into(),
                    reason: format!("{} sits in degree {}", a.label(i), a.degree(i)),
                });
            }
            Ok(())
        }
    }
}

pub(crate) fn weight_enumerable<S: Scalar>(a: &DGAlgebra<S>) -> bool {
    a.is_weighted() && a.ideal_indices().all(|i| a.weight(i).unwrap_or(0) >= 1)
}

/// Extreme degrees of words of each total weight, using stored elements up
/// to the algebra's complete weight and extrapolating linearly beyond it.
/// Returns per weight `(min, max)` over bar words (`cyclic = false`) or
/// cyclic words.
pub(crate) fn degree_extremes<S: Scalar>(a: &DGAlgebra<S>, cyclic: bool, wmax: u32) -> Vec<Option<(i64, i64)>> {
    let stored_limit = a.weight_exact().unwrap_or(u32::MAX);
    let mut elems: Vec<(u32, i64)> = a.ideal_indices().map(|i| (a.weight(i).unwrap_or(1), a.degree(i))).collect();
    // slope bounds |a|/w over stored elements, as fractions (num, den)
    let slope_min = elems.iter().map(|(w, d)| (*d, *w as i64)).min_by(|x, y| (x.0 * y.1).cmp(&(y.0 * x.1)));
    let slope_max = elems.iter().map(|(w, d)| (*d, *w as i64)).max_by(|x, y| (x.0 * y.1).cmp(&(y.0 * x.1)));
    if stored_limit < wmax {
        if let (Some((n1, d1)), Some((n2, d2))) = (slope_min, slope_max) {
            for k in (stored_limit + 1)..=wmax {
                let k64 = k as i64;
                elems.push((k, (k64 * n1).div_euclid(d1)));
                elems.push((k, -((-(k64 * n2)).div_euclid(d2))));
            }
        }
    }
    let n = wmax as usize;
    let mut bar: Vec<Option<(i64, i64)>> = vec![None; n + 1];
    bar[0] = Some((0, 0));
    for u in 1..=n {
        let mut best: Option<(i64, i64)> = None;
        for (w, d) in &elems {
            let w = *w as usize;
            if w > u {
                continue;
            }
            if let Some((lo, hi)) = bar[u - w] {
                let cand = (lo + d + 1, hi + d + 1);
                best = Some(match best {
                    None => cand,
                    Some((a, b)) => (a.min(cand.0), b.max(cand.1)),
                });
            }
        }
        bar[u] = best;
    }
    if !cyclic {
        return bar;
    }
    let mut cyc = bar.clone();
    for (u, slot) in cyc.iter_mut().enumerate() {
        for (w, d) in &elems {
            let w = *w as usize;
            if w > u {
                continue;
            }
            if let Some((lo, hi)) = bar[u - w] {
                let cand = (lo + d, hi + d);
                *slot = Some(match *slot {
                    None => cand,
                    Some((a, b)) => (a.min(cand.0), b.max(cand.1)),
                });
            }
        }
    }
    cyc
}

pub(crate) fn plan<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow, cyclic: bool, operation: &str) -> Result<Plan> {
    require_certificate(a, operation)?;
    let cap = w.weight_cap;
    if a.is_ground() {
        return Ok(Plan { mode: Mode::Weight { cap: cap as u32, degrees: None }, known: DegreeRange::ALL, weight_exact: None });
    }
    if weight_enumerable(a) {
        let cap32 = cap as u32;
        let exact = a.weight_exact().map_or(cap32, |e| e.min(cap32));
        let max_w = a.ideal_indices().filter_map(|i| a.weight(i)).max().unwrap_or(1) as i64;
        let span = w.deg_hi.abs().max(w.deg_lo.abs()) + 3;
        let wmax = (exact as i64 + 1 + span * max_w * 2).min(4096) as u32;
        let ext = degree_extremes(a, cyclic, wmax);
        let beyond = ext.iter().enumerate().skip(exact as usize + 1).filter_map(|(_, e)| *e);
        let known = match a.certificate() {
            Certificate::ConnectedIdeal => match beyond.map(|e| e.0).min() {
                Some(m) => DegreeRange::at_most(m - 1),
                None => DegreeRange::ALL,
            },
            Certificate::Coconnective => match beyond.map(|e| e.1).max() {
                Some(m) => DegreeRange::at_least(m + 1),
                None => DegreeRange::ALL,
            },
            Certificate::None => EMPTY,
        };
        // words of any weight are also complete wherever the algebra is exact
        // in every degree a cell could use
        let e = a.exact();
        // (bar words stay weight-closed so the coalgebra structure is exact)
        let (degrees, by_degree) = match a.certificate() {
            _ if !cyclic => (None, EMPTY),
            Certificate::ConnectedIdeal => {
                let b = e.hi.map_or(w.deg_hi + 1, |h| h.min(w.deg_hi + 1));
                (Some((None, Some(b))), DegreeRange::at_most(b.min(e.hi.unwrap_or(b)) - 1))
            }
            Certificate::Coconnective if a.ideal_indices().all(|i| a.degree(i) <= -2) => {
                let b = e.lo.map_or(w.deg_lo - 1, |l| l.max(w.deg_lo - 1));
                (Some((Some(b), None)), DegreeRange::at_least((b + 1).max(e.lo.map_or(b + 1, |l| l + 2))))
            }
            _ => (None, EMPTY),
        };
        let known = union(known, by_degree);
        return Ok(Plan { mode: Mode::Weight { cap: cap32, degrees }, known, weight_exact: Some(exact) });
    }
    let degs: Vec<i64> = a.ideal_indices().map(|i| a.degree(i)).collect();
    let exact = a.exact();
    match a.certificate() {
        Certificate::ConnectedIdeal => {
            let m = *degs.iter().min().unwrap();
            let bound = w.deg_hi + 1;
            let mut hi = bound.min((cap as i64 + 1) * (m + 1) - 1);
            if let Some(e) = exact.hi {
                hi = hi.min(if cyclic { e } else { e + 1 });
            }
            let known = if exact.lo.is_some_and(|l| l > 1) { EMPTY } else { DegreeRange::at_most(hi) };
            Ok(Plan { mode: Mode::Degree { lo: None, hi: Some(bound), max_len: cap }, known, weight_exact: None })
        }
        Certificate::Coconnective => {
            let m = *degs.iter().max().unwrap();
            if m == -1 {
                return Ok(Plan { mode: Mode::Degree { lo: None, hi: None, max_len: cap }, known: EMPTY, weight_exact: None });
            }
            let bound = w.deg_lo - 1;
            let mut lo = bound.max((cap as i64 + 1) * (m + 1) + 1);
            if let Some(e) = exact.lo {
                lo = lo.max(if cyclic { e } else { e + 1 });
            }
            let known = if exact.hi.is_some_and(|h| h < -1) { EMPTY } else { DegreeRange::at_least(lo) };
            Ok(Plan { mode: Mode::Degree { lo: Some(bound), hi: None, max_len: cap }, known, weight_exact: None })
        }
        Certificate::None => Err(Error::CertificateMissing { operation: operation.into() }),
    }
}

/// Union of two ranges unbounded on the same side; otherwise the larger.
fn union(x: DegreeRange, y: DegreeRange) -> DegreeRange {
    let empty = |r: &DegreeRange| matches!((r.lo, r.hi), (Some(l), Some(h)) if l > h);
    if empty(&x) {
        return y;
    }
    if empty(&y) {
        return x;
    }
    match (x.lo, x.hi, y.lo, y.hi) {
        (None, Some(a), None, Some(b)) => DegreeRange::at_most(a.max(b)),
        (Some(a), None, Some(b), None) => DegreeRange::at_least(a.min(b)),
        _ if x.is_all() || y.is_all() => DegreeRange::ALL,
        _ => x,
    }
}

/// All bar words allowed by the plan.
pub(crate) fn enumerate_words<S: Scalar>(a: &DGAlgebra<S>, mode: &Mode) -> Result<Vec<(Vec<usize>, i64, u32)>> {
    let ideal: Vec<(usize, i64, u32)> = a.ideal_indices().map(|i| (i, a.degree(i) + 1, a.weight(i).unwrap_or(0))).collect();
    let mut out = vec![(Vec::new(), 0i64, 0u32)];
    let mut frontier = vec![(Vec::new(), 0i64, 0u32)];
    const LIMIT: usize = 3_000_000;
    loop {
        let mut next = Vec::new();
        for (word, deg, wt) in &frontier {
            for (i, fd, fw) in &ideal {
                let (nd, nw) = (deg + fd, wt + fw);
                let ok = match mode {
                    Mode::Weight { cap, degrees } => nw <= *cap || degrees.is_some_and(|(lo, hi)| lo.is_none_or(|l| nd >= l) && hi.is_none_or(|h| nd <= h)),
                    Mode::Degree { lo, hi, max_len } => {
                        word.len() < *max_len && hi.is_none_or(|h| nd <= h) && lo.is_none_or(|l| nd >= l)
                    }
                };
                if ok {
                    let mut x = word.clone();
                    x.push(*i);
                    next.push((x, nd, nw));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        out.extend(next.iter().cloned());
        if out.len() > LIMIT {
            return Err(Error::CapExceeded { cap: out.len(), context: "too many bar words; shrink the window or weight cap".into() });
        }
        frontier = next;
    }
    Ok(out)
}

/// A complex whose basis is a set of [`Cell`]s, with its differential split
/// into a weight-preserving part and a part lowering cardinality by one.
#[derive(Clone, Debug)]
pub struct WeightedComplex<S> {
    pub complex: ChainComplex<S>,
    pub cells: BTreeMap<i64, Vec<Cell>>,
    pub index: HashMap<Cell, (i64, usize)>,
    pub d_internal: GradedMap<S>,
    pub d_structural: GradedMap<S>,
    /// Auxiliary weight of each cell, when the algebra is weighted.
    pub aux: HashMap<Cell, u32>,
    pub weight_exact: Option<u32>,
}

/// Differential terms of one cell: `(internal, structural)`.
pub(crate) type Terms<S> = (Vec<(Cell, S)>, Vec<(Cell, S)>);

impl<S: Scalar> WeightedComplex<S> {
    pub(crate) fn assemble(
        cells: Vec<(Cell, i64)>,
        label: impl Fn(&Cell) -> String,
        aux: impl Fn(&Cell) -> Option<u32>,
        known: DegreeRange,
        weight_exact: Option<u32>,
        terms: impl Fn(&Cell) -> Terms<S> + Sync,
    ) -> Result<Self> {
        let mut by_degree: BTreeMap<i64, Vec<Cell>> = BTreeMap::new();
        for (c, d) in cells {
            by_degree.entry(d).or_default().push(c);
        }
        for v in by_degree.values_mut() {
            v.sort_by(|x, y| (x.cardinality(), x).cmp(&(y.cardinality(), y)));
        }
        let mut space = GradedSpace::new();
        let mut index = HashMap::new();
        let mut aux_map = HashMap::new();
        for (d, v) in &by_degree {
            for c in v {
                let k = space.push(*d, label(c))?;
                index.insert(c.clone(), (*d, k));
                if let Some(w) = aux(c) {
                    aux_map.insert(c.clone(), w);
                }
            }
        }
        let columns: BTreeMap<i64, Vec<(SparseVec<S>, SparseVec<S>)>> = by_degree
            .par_iter()
            .map(|(d, v)| {
                let cols = v
                    .iter()
                    .map(|c| {
                        let (int, st) = terms(c);
                        let place = |ts: Vec<(Cell, S)>| -> SparseVec<S> {
                            canonical_vec(ts.into_iter().filter_map(|(t, s)| index.get(&t).map(|(_, k)| (*k, s))))
                        };
                        (place(int), place(st))
                    })
                    .collect();
                (*d, cols)
            })
            .collect();
        let mut internal = BTreeMap::new();
        let mut structural = BTreeMap::new();
        let mut total = BTreeMap::new();
        for (d, cols) in columns {
            let rows = space.dim(d - 1);
            let (ci, cs): (Vec<_>, Vec<_>) = cols.into_iter().unzip();
            let ct: Vec<SparseVec<S>> =
                ci.iter().zip(cs.iter()).map(|(x, y)| canonical_vec(x.iter().chain(y.iter()).cloned())).collect();
            internal.insert(d, crate::linalg::SparseMatrix::from_columns(rows, ci)?);
            structural.insert(d, crate::linalg::SparseMatrix::from_columns(rows, cs)?);
            total.insert(d, crate::linalg::SparseMatrix::from_columns(rows, ct)?);
        }
        let complex = ChainComplex::new(space, GradedMap { shift: -1, blocks: total }, known)?;
        Ok(WeightedComplex {
            complex,
            cells: by_degree,
            index,
            d_internal: GradedMap { shift: -1, blocks: internal },
            d_structural: GradedMap { shift: -1, blocks: structural },
            aux: aux_map,
            weight_exact,
        })
    }

    pub fn cell(&self, d: i64, k: usize) -> &Cell {
        &self.cells[&d][k]
    }

    pub fn aux_weights(&self) -> BTreeSet<u32> {
        self.aux.values().copied().collect()
    }

    /// Summand of auxiliary weight `w`; known everywhere when `w` is within
    /// the complete range.
    pub fn weight_piece(&self, w: u32) -> Result<ChainComplex<S>> {
        let (cx, _) = self.complex.restrict(|d, k| self.aux.get(self.cell(d, k)) == Some(&w))?;
        let known = if self.weight_exact.is_some_and(|e| w <= e) { DegreeRange::ALL } else { EMPTY };
        Ok(cx.with_known(known))
    }

    /// Associated graded piece of cardinality `i`, optionally restricted to
    /// auxiliary weight `aux`, with the weight-preserving differential.
    pub fn cardinality_piece(&self, i: usize, aux: Option<u32>) -> Result<(ChainComplex<S>, BTreeMap<i64, Vec<usize>>)> {
        let graded = ChainComplex::new(self.complex.space().clone(), self.d_internal.clone(), self.complex.known())?;
        graded.restrict(|d, k| {
            let c = self.cell(d, k);
            c.cardinality() == i && aux.is_none_or(|w| self.aux.get(c) == Some(&w))
        })
    }

    /// Per-weight homology over the window, for weights within the complete
    /// range.
    pub fn homology_by_weight(&self, w: &TruncationWindow) -> Result<BTreeMap<u32, HomologyTable>> {
        let Some(exact) = self.weight_exact else { return Ok(BTreeMap::new()) };
        let weights: Vec<u32> = self.aux_weights().into_iter().filter(|x| *x <= exact).collect();
        let tables: Vec<Result<(u32, HomologyTable)>> = weights
            .into_par_iter()
            .map(|wt| {
                let piece = self.weight_piece(wt)?;
                Ok((wt, piece.homology(w)?))
            })
            .collect();
        tables.into_iter().collect()
    }

    /// Total homology over the window. Rows are reliable when the enumerated
    /// chains are complete there (weighted case) or when the degree and its
    /// neighbours are known (degree-enumerated case).
    pub fn total_homology(&self, w: &TruncationWindow) -> Result<HomologyTable> {
        if self.weight_exact.is_none() {
            return self.complex.homology(w);
        }
        // every weight, complete or not: rows are judged by `known`
        let weights: Vec<u32> = self.aux_weights().into_iter().collect();
        let by_weight: Vec<HomologyTable> = weights
            .into_par_iter()
            .map(|wt| self.complex.restrict(|d, k| self.aux.get(self.cell(d, k)) == Some(&wt))?.0.homology(w))
            .collect::<Result<_>>()?;
        let known = self.complex.known();
        Ok(w.degrees()
            .map(|d| {
                let dim = by_weight.iter().map(|t| t.get(&d).map_or(0, |r| r.dim)).sum();
                (d, HomologyRow { dim, reliable: known.contains(d) })
            })
            .collect())
    }
}

fn bar_label<S: Scalar>(a: &DGAlgebra<S>, word: &[usize]) -> String {
    format!("[{}]", word.iter().map(|i| a.label(*i)).collect::<Vec<_>>().join("|"))
}

/// Differential terms of a bar word.
fn bar_terms<S: Scalar>(a: &DGAlgebra<S>, word: &[usize]) -> Terms<S> {
    let mut internal = Vec::new();
    let mut structural = Vec::new();
    let mut eps = 0i64;
    for k in 0..word.len() {
        let sign: S = -parity_sign::<S>(eps);
        for (x, c) in a.d(word[k]) {
            if *x == a.unit() {
                continue;
            }
            let mut w = word.to_vec();
            w[k] = *x;
            internal.push((Cell::bar(w), sign.clone() * c.clone()));
        }
        eps += a.degree(word[k]) + 1;
        if k + 1 < word.len() {
            let sign: S = parity_sign(eps);
            for (x, c) in a.mul(word[k], word[k + 1]) {
                if x == a.unit() {
                    continue;
                }
                let mut w = word[..k].to_vec();
                w.push(x);
                w.extend_from_slice(&word[k + 2..]);
                structural.push((Cell::bar(w), sign.clone() * c));
            }
        }
    }
    (internal, structural)
}

/// Coassociative counital DG coalgebra with sparse coproduct constants.
#[derive(Clone, Debug)]
pub struct DGCoalgebra<S> {
    pub basis: Vec<BasisElement>,
    pub counit: usize,
    pub differential: Vec<SparseVec<S>>,
    /// Coproduct of each basis element as `(left, right, coefficient)`.
    pub coproduct: Vec<Vec<(usize, usize, S)>>,
    pub known: DegreeRange,
    pub weight_exact: Option<u32>,
}

impl<S: Scalar> DGCoalgebra<S> {
    fn tensor_vec(&self, terms: &[(usize, usize, S)]) -> BTreeMap<(usize, usize), S> {
        let mut m: BTreeMap<(usize, usize), S> = BTreeMap::new();
        for (l, r, c) in terms {
            let e = m.entry((*l, *r)).or_insert_with(S::zero);
            *e = e.clone() + c.clone();
        }
        m.retain(|_, v| !v.is_zero());
        m
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.basis.len();
        let mut coassoc = Vec::new();
        let mut counit = Vec::new();
        let mut coleibniz = Vec::new();
        for c in 0..n {
            let mut left: BTreeMap<(usize, usize, usize), S> = BTreeMap::new();
            let mut right: BTreeMap<(usize, usize, usize), S> = BTreeMap::new();
            for (x, y, k) in &self.coproduct[c] {
                for (p, q, k2) in &self.coproduct[*x] {
                    let e = left.entry((*p, *q, *y)).or_insert_with(S::zero);
                    *e = e.clone() + k.clone() * k2.clone();
                }
                for (p, q, k2) in &self.coproduct[*y] {
                    let e = right.entry((*x, *p, *q)).or_insert_with(S::zero);
                    *e = e.clone() + k.clone() * k2.clone();
                }
            }
            left.retain(|_, v| !v.is_zero());
            right.retain(|_, v| !v.is_zero());
            if left != right {
                coassoc.push(format!("coassociativity fails on {}", self.basis[c].label));
            }
            let lc: SparseVec<S> =
                canonical_vec(self.coproduct[c].iter().filter(|(x, _, _)| *x == self.counit).map(|(_, y, k)| (*y, k.clone())));
            let rc: SparseVec<S> =
                canonical_vec(self.coproduct[c].iter().filter(|(_, y, _)| *y == self.counit).map(|(x, _, k)| (*x, k.clone())));
            if lc != vec![(c, S::one())] || rc != vec![(c, S::one())] {
                counit.push(format!("counit law fails on {}", self.basis[c].label));
            }
            // Δd = (d⊗1 + 1⊗d)Δ
            let mut lhs = Vec::new();
            for (x, k) in &self.differential[c] {
                for (p, q, k2) in &self.coproduct[*x] {
                    lhs.push((*p, *q, k.clone() * k2.clone()));
                }
            }
            let mut rhs = Vec::new();
            for (x, y, k) in &self.coproduct[c] {
                for (p, k2) in &self.differential[*x] {
                    rhs.push((*p, *y, k.clone() * k2.clone()));
                }
                let sign: S = parity_sign(self.basis[*x].degree);
                for (q, k2) in &self.differential[*y] {
                    rhs.push((*x, *q, sign.clone() * k.clone() * k2.clone()));
                }
            }
            if self.tensor_vec(&lhs) != self.tensor_vec(&rhs) {
                coleibniz.push(format!("d is not a coderivation on {}", self.basis[c].label));
            }
        }
        report.checks.insert("coassociativity".into(), coassoc.is_empty());
        report.checks.insert("counit".into(), counit.is_empty());
        report.checks.insert("coleibniz".into(), coleibniz.is_empty());
        report.failures.extend(coassoc);
        report.failures.extend(counit);
        report.failures.extend(coleibniz);
        report
    }

    /// Linear dual with the convolution product
    /// `f_a · f_b = Σ_c (−1)^{|f_a||f_b|} ⟨Δc, a⊗b⟩ f_c` and differential
    /// `d f = −(−1)^{|f|} f∘d`.
    pub fn dual_algebra(&self, name: &str) -> Result<DGAlgebra<S>> {
        let n = self.basis.len();
        let basis: Vec<BasisElement> = self
            .basis
            .iter()
            .map(|b| BasisElement { label: crate::graded::dual_label(&b.label), degree: -b.degree, weight: b.weight })
            .collect();
        let mut product: BTreeMap<(usize, usize), Vec<(usize, S)>> = BTreeMap::new();
        for c in 0..n {
            for (x, y, k) in &self.coproduct[c] {
                let sign: S = parity_sign(basis[*x].degree * basis[*y].degree);
                product.entry((*x, *y)).or_default().push((c, sign * k.clone()));
            }
        }
        let product = product.into_iter().map(|(k, v)| (k, canonical_vec(v))).collect();
        let mut differential: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
        for c in 0..n {
            for (x, k) in &self.differential[c] {
                let sign: S = -parity_sign::<S>(basis[*x].degree);
                differential[*x].push((c, sign * k.clone()));
            }
        }
        let differential = differential.into_iter().map(canonical_vec).collect();
        let alg = DGAlgebra::from_parts(AlgebraParts {
            name: name.into(),
            basis,
            unit: self.counit,
            differential,
            product,
            certificate: Certificate::None,
            exact: self.known.negate(),
            weight_exact: self.weight_exact,
            origin: Origin::KoszulDual,
        })?;
        let c = alg.detect_certificate();
        Ok(alg.with_certificate(c))
    }
}

/// Bar construction together with its coalgebra structure.
#[derive(Clone, Debug)]
pub struct BarConstruction<S> {
    pub weighted: WeightedComplex<S>,
    pub coalgebra: DGCoalgebra<S>,
}

impl<S: Scalar> BarConstruction<S> {
    pub fn complex(&self) -> &ChainComplex<S> {
        &self.weighted.complex
    }

    /// Total homology; weighted inputs are summed over complete weights.
    pub fn homology(&self, w: &TruncationWindow) -> Result<HomologyTable> {
        self.weighted.total_homology(w)
    }

    /// Homology of the word-length `i` associated graded (internal
    /// differential only).
    pub fn length_graded_homology(&self, i: usize, w: &TruncationWindow) -> Result<HomologyTable> {
        Ok(self.weighted.cardinality_piece(i, None)?.0.homology(w)?)
    }
}

/// Reduced normalized bar complex of `a`.
pub fn bar<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<BarConstruction<S>> {
    let plan = plan(a, w, false, "bar construction")?;
    let words = enumerate_words(a, &plan.mode)?;
    let weighted_alg = weight_enumerable(a) || a.is_ground();
    let cells: Vec<(Cell, i64)> = words.iter().map(|(wd, d, _)| (Cell::bar(wd.clone()), *d)).collect();
    let aux = |c: &Cell| -> Option<u32> {
        weighted_alg.then(|| c.word.iter().map(|i| a.weight(*i).unwrap_or(0)).sum())
    };
    let weight_exact = if weighted_alg { plan.weight_exact.or(Some(w.weight_cap as u32)) } else { None };
    let wc = WeightedComplex::assemble(cells, |c| bar_label(a, &c.word), aux, plan.known, weight_exact, |c| bar_terms(a, &c.word))?;
    // coalgebra on global indices: flatten degrees
    let mut order: Vec<&Cell> = Vec::new();
    let mut global: HashMap<&Cell, usize> = HashMap::new();
    for v in wc.cells.values() {
        for c in v {
            global.insert(c, order.len());
            order.push(c);
        }
    }
    let basis: Vec<BasisElement> = order
        .iter()
        .map(|c| BasisElement { label: bar_label(a, &c.word), degree: wc.index[*c].0, weight: aux(c) })
        .collect();
    let counit = global[&Cell::bar(Vec::new())];
    let differential: Vec<SparseVec<S>> = order
        .iter()
        .map(|c| {
            let (d, k) = wc.index[*c];
            let col = wc.complex.d_of(d, k);
            canonical_vec(col.into_iter().map(|(r, s)| (global[&wc.cells[&(d - 1)][r]], s)))
        })
        .collect();
    let coproduct: Vec<Vec<(usize, usize, S)>> = order
        .iter()
        .map(|c| {
            (0..=c.word.len())
                .filter_map(|k| {
                    let l = global.get(&Cell::bar(c.word[..k].to_vec()))?;
                    let r = global.get(&Cell::bar(c.word[k..].to_vec()))?;
                    Some((*l, *r, S::one()))
                })
                .collect()
        })
        .collect();
    let coalgebra = DGCoalgebra { basis, counit, differential, coproduct, known: plan.known, weight_exact };
    Ok(BarConstruction { weighted: wc, coalgebra })
}

/// `D a`: the linear dual of the bar construction. `w` is the window for
/// `D a`; the bar construction is taken over the mirrored window.
pub fn koszul_dual<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<DGAlgebra<S>> {
    let b = bar(a, &w.mirrored())?;
    let name = format!("D({})", a.name);
    b.coalgebra.dual_algebra(&name)
}

/// Homology of `D D a` against homology of `a`, degree by degree.
pub fn double_dual_compare<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<DualityReport> {
    let da = koszul_dual(a, w)?;
    let dda = koszul_dual(&da, w)?;
    let left = algebra_homology(a, w)?;
    let right = algebra_homology(&dda, w)?;
    let mut report = DualityReport::compare(&a.name, &dda.name, w, Pairing::Same, &left, &right);
    if a.is_weighted() && dda.is_weighted() {
        let lw = algebra_homology_by_weight(a, w)?;
        let rw = algebra_homology_by_weight(&dda, w)?;
        report.add_weights(&lw, &rw);
    }
    report.finish();
    Ok(report)
}

/// Homology of an algebra's underlying complex, reliable where it is exact.
pub fn algebra_homology<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<HomologyTable> {
    a.complex()?.homology(w)
}

pub fn algebra_homology_by_weight<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<BTreeMap<u32, HomologyTable>> {
    let cx = a.complex()?;
    let mut out = BTreeMap::new();
    let weights: BTreeSet<u32> = a.basis().iter().filter_map(|b| b.weight).collect();
    for wt in weights {
        if a.weight_exact().is_some_and(|e| wt > e) {
            continue;
        }
        let (piece, _) = cx.restrict(|d, k| a.weight(a.basis_in_degree(d)[k]) == Some(wt))?;
        out.insert(wt, piece.with_known(DegreeRange::ALL).homology(w)?);
    }
    Ok(out)
}

/// Compares `H(L(a)[1])` with the auxiliary-weight-1 part of the bar
/// homology (and, for free algebras, with the whole reduced bar homology).
pub fn cotangent_from_bar<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<DualityReport> {
    match a.origin() {
        Origin::Ground | Origin::Free | Origin::Trivial | Origin::Sym => {}
        _ => return Err(Error::ModelNotExact(a.name.clone())),
    }
    if !a.is_weighted() {
        return Err(Error::ModelNotExact(a.name.clone()));
    }
    let l = crate::algebra::cotangent_space(a, w)?;
    let left = shift(&l, 1).with_known(DegreeRange::ALL).homology(w)?;
    let b = bar(a, w)?;
    let by_weight = b.weighted.homology_by_weight(w)?;
    let zero: HomologyTable = w.degrees().map(|d| (d, HomologyRow { dim: 0, reliable: true })).collect();
    let right = if a.origin() == Origin::Free {
        let mut t = zero.clone();
        for (wt, table) in &by_weight {
            if *wt == 0 {
                continue;
            }
            for (d, r) in table {
                t.get_mut(d).expect("window degree").dim += r.dim;
            }
        }
        for (d, r) in t.iter_mut() {
            r.reliable = b.complex().known().contains(*d);
        }
        t
    } else {
        by_weight.get(&1).cloned().unwrap_or(zero)
    };
    let mut report = DualityReport::compare("L(a)[1]", "reduced Bar(a)", w, Pairing::Same, &left, &right);
    report.notes.push("indecomposables model of the cotangent space".into());
    report.finish();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{free_algebra, ground, sym_algebra, trivial_algebra};
    use crate::graded::{reliable_dims, support};
    use crate::scalar::Rational;

    type Q = Rational;

    fn gens(degs: &[i64]) -> ChainComplex<Q> {
        let mut s = GradedSpace::new();
        for (i, d) in degs.iter().enumerate() {
            s.push(*d, format!("v{i}")).unwrap();
        }
        ChainComplex::from_space(s)
    }

    fn win(lo: i64, hi: i64, cap: usize) -> TruncationWindow {
        TruncationWindow::new(lo, hi, cap).unwrap()
    }

    #[test]
    fn bar_of_ground() {
        let b = bar(&ground::<Q>(), &win(-5, 5, 3)).unwrap();
        assert_eq!(support(&reliable_dims(&b.homology(&win(-5, 5, 3)).unwrap())), BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn bar_of_exterior_is_cofree() {
        let a = trivial_algebra(&gens(&[1])).unwrap();
        let w = win(-2, 12, 5);
        let b = bar(&a, &w).unwrap();
        assert!(b.weighted.d_structural.is_zero());
        let h = b.homology(&w).unwrap();
        for d in 0..=10 {
            assert_eq!(h[&d].dim, usize::from(d % 2 == 0), "degree {d}");
            assert!(h[&d].reliable);
        }
        assert!(!h[&12].reliable);
    }

    #[test]
    fn bar_of_free_is_trivial() {
        let w = win(-2, 12, 5);
        let a = free_algebra(&gens(&[1]), &w).unwrap();
        let b = bar(&a, &w).unwrap();
        let h = b.homology(&w).unwrap();
        let rel = support(&reliable_dims(&h));
        assert_eq!(rel, BTreeMap::from([(0, 1), (2, 1)]));
    }

    #[test]
    fn coalgebra_axioms_hold() {
        let w = win(-10, 10, 4);
        for a in [trivial_algebra(&gens(&[1, 2])).unwrap(), free_algebra(&gens(&[1, 2]), &w).unwrap(), sym_algebra(&gens(&[-2]), &w).unwrap()] {
            let b = bar(&a, &w).unwrap();
            let r = b.coalgebra.validate();
            assert!(r.is_ok(), "{:?}", r.failures);
        }
    }

    #[test]
    fn differential_parts_square_to_zero_and_anticommute() {
        let w = win(-12, 12, 4);
        let a = free_algebra(&gens(&[1, 2]), &w).unwrap();
        let b = bar(&a, &w).unwrap();
        let sp = b.complex().space();
        for d in sp.degrees() {
            let di = |k: i64| b.weighted.d_internal.block(k, sp, sp);
            let ds = |k: i64| b.weighted.d_structural.block(k, sp, sp);
            assert!(di(d - 1).mul(&di(d)).unwrap().is_zero());
            assert!(ds(d - 1).mul(&ds(d)).unwrap().is_zero());
            let cross = di(d - 1).mul(&ds(d)).unwrap().add(&ds(d - 1).mul(&di(d)).unwrap()).unwrap();
            assert!(cross.is_zero());
        }
    }

    #[test]
    fn koszul_dual_of_exterior_is_polynomial() {
        let a = trivial_algebra(&gens(&[1])).unwrap();
        let w = win(-12, 2, 6);
        let d = koszul_dual(&a, &w).unwrap();
        let r = d.validate();
        assert!(r.is_ok(), "{:?}", r.failures);
        let h = support(&reliable_dims(&algebra_homology(&d, &w).unwrap()));
        let expected: BTreeMap<i64, usize> = (0..=6).map(|k| (-2 * k, 1)).collect();
        assert_eq!(h, expected);
    }

    #[test]
    fn koszul_duals_validate() {
        let w = win(-10, 10, 4);
        let cases = vec![
            free_algebra(&gens(&[1]), &w).unwrap(),
            free_algebra(&gens(&[1, 2]), &w).unwrap(),
            free_algebra(&gens(&[-2]), &w).unwrap(),
            free_algebra(&gens(&[-2, -3]), &w).unwrap(),
            trivial_algebra(&gens(&[1, 2])).unwrap(),
            sym_algebra(&gens(&[-2]), &w).unwrap(),
        ];
        for a in cases {
            let d = koszul_dual(&a, &w).unwrap();
            let r = d.validate();
            assert!(r.is_ok(), "{}: {:?}", a.name, r.failures);
        }
    }

    #[test]
    fn dual_homology_mirrors_bar_homology() {
        let w = win(-10, 10, 4);
        let a = free_algebra(&gens(&[1, 2]), &w).unwrap();
        let b = bar(&a, &w.mirrored()).unwrap();
        let d = koszul_dual(&a, &w).unwrap();
        let hb = b.homology(&w.mirrored()).unwrap();
        let hd = algebra_homology(&d, &w).unwrap();
        for dd in w.degrees() {
            assert_eq!(hd[&dd].dim, hb[&-dd].dim, "degree {dd}");
        }
    }

    #[test]
    fn double_dual_examples() {
        let w = win(-10, 10, 5);
        for a in [ground::<Q>(), trivial_algebra(&gens(&[1])).unwrap(), free_algebra(&gens(&[-2]), &w).unwrap()] {
            let r = double_dual_compare(&a, &w).unwrap();
            assert_eq!(r.verdict, crate::harness::Verdict::VerifiedInWindow, "{}: {r:?}", a.name);
        }
    }

    #[test]
    fn cotangent_from_bar_examples() {
        let w = win(-4, 10, 4);
        for a in [ground::<Q>(), trivial_algebra(&gens(&[1])).unwrap(), free_algebra(&gens(&[1]), &w).unwrap()] {
            let r = cotangent_from_bar(&a, &w).unwrap();
            assert_eq!(r.verdict, crate::harness::Verdict::VerifiedInWindow, "{}: {r:?}", a.name);
        }
        let g = crate::algebra::ground::<Q>().with_origin(Origin::Document);
        assert!(matches!(cotangent_from_bar(&g, &w), Err(Error::ModelNotExact(_))));
    }

    #[test]
    fn missing_certificate_refused() {
        let w = win(-4, 4, 3);
        let a = free_algebra(&gens(&[1, -1]), &w).unwrap();
        assert!(matches!(bar(&a, &w), Err(Error::CertificateMissing { .. })));
    }
}
