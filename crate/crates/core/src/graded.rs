//! Graded vector spaces, chain complexes and the operations on them.
//!
//! Indexing is homological: differentials lower degree by one. Signs follow a
//! single Koszul rule, `u⊗v ↦ (-1)^{|u||v|} v⊗u`, and
//! `(f⊗g)(u⊗v) = (-1)^{|g||u|} f(u)⊗g(v)`. Every other module derives its
//! signs from this rule.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{homology_dim, SparseMatrix, SparseVec};
use crate::scalar::Scalar;

pub fn parity_sign<S: Scalar>(exponent: i64) -> S {
    S::sign(exponent.rem_euclid(2) == 1)
}

/// A possibly unbounded interval of degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct DegreeRange {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl DegreeRange {
    pub const ALL: DegreeRange = DegreeRange { lo: None, hi: None };

    pub fn between(lo: i64, hi: i64) -> Self {
        DegreeRange { lo: Some(lo), hi: Some(hi) }
    }

    pub fn at_most(hi: i64) -> Self {
        DegreeRange { lo: None, hi: Some(hi) }
    }

    pub fn at_least(lo: i64) -> Self {
        DegreeRange { lo: Some(lo), hi: None }
    }

    pub fn contains(&self, d: i64) -> bool {
        self.lo.is_none_or(|lo| d >= lo) && self.hi.is_none_or(|hi| d <= hi)
    }

    pub fn intersect(&self, other: &DegreeRange) -> DegreeRange {
        let lo = match (self.lo, other.lo) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        DegreeRange { lo, hi }
    }

    pub fn translate(&self, n: i64) -> DegreeRange {
        DegreeRange { lo: self.lo.map(|x| x + n), hi: self.hi.map(|x| x + n) }
    }

    pub fn negate(&self) -> DegreeRange {
        DegreeRange { lo: self.hi.map(|x| -x), hi: self.lo.map(|x| -x) }
    }

    pub fn is_all(&self) -> bool {
        self.lo.is_none() && self.hi.is_none()
    }
}

impl std::fmt::Display for DegreeRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let lo = self.lo.map_or("-inf".to_string(), |x| x.to_string());
        let hi = self.hi.map_or("inf".to_string(), |x| x.to_string());
        write!(f, "[{lo}, {hi}]")
    }
}

/// Degree range and weight cap inside which infinite objects are finitized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationWindow {
    pub deg_lo: i64,
    pub deg_hi: i64,
    pub weight_cap: usize,
}

impl TruncationWindow {
    pub fn new(deg_lo: i64, deg_hi: i64, weight_cap: usize) -> Result<Self> {
        if deg_lo > deg_hi {
            return Err(Error::InvalidInput(format!("window [{deg_lo}, {deg_hi}] is empty")));
        }
        Ok(TruncationWindow { deg_lo, deg_hi, weight_cap })
    }

    pub fn contains(&self, d: i64) -> bool {
        d >= self.deg_lo && d <= self.deg_hi
    }

    pub fn range(&self) -> DegreeRange {
        DegreeRange::between(self.deg_lo, self.deg_hi)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.deg_lo..=self.deg_hi
    }

    pub fn mirrored(&self) -> Self {
        TruncationWindow { deg_lo: -self.deg_hi, deg_hi: -self.deg_lo, weight_cap: self.weight_cap }
    }
}

/// Finite-type graded vector space with labelled basis.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedSpace {
    degrees: BTreeMap<i64, Vec<String>>,
    index: HashMap<String, (i64, usize)>,
}

impl GradedSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_degrees(degrees: BTreeMap<i64, Vec<String>>) -> Result<Self> {
        let mut space = GradedSpace::new();
        for (d, labels) in degrees {
            for l in labels {
                space.push(d, l)?;
            }
        }
        Ok(space)
    }

    /// One-dimensional space in degree `d`.
    pub fn line(d: i64, label: &str) -> Self {
        let mut s = GradedSpace::new();
        s.push(d, label.to_string()).expect("fresh space");
        s
    }

    pub fn push(&mut self, degree: i64, label: String) -> Result<usize> {
        if self.index.contains_key(&label) {
            return Err(Error::InvalidInput(format!("duplicate basis label {label:?}")));
        }
        let v = self.degrees.entry(degree).or_default();
        v.push(label.clone());
        let i = v.len() - 1;
        self.index.insert(label, (degree, i));
        Ok(i)
    }

    pub fn dim(&self, d: i64) -> usize {
        self.degrees.get(&d).map_or(0, |v| v.len())
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.values().map(|v| v.len()).sum()
    }

    pub fn labels(&self, d: i64) -> &[String] {
        self.degrees.get(&d).map_or(&[], |v| v.as_slice())
    }

    pub fn lookup(&self, label: &str) -> Option<(i64, usize)> {
        self.index.get(label).copied()
    }

    /// Degrees with a nonzero summand, ascending.
    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.degrees.iter().filter(|(_, v)| !v.is_empty()).map(|(d, _)| *d)
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.degrees().next()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.degrees().last()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.degrees().map(|d| (d, self.dim(d))).collect()
    }
}

/// Degree-`shift` linear map between graded spaces; missing blocks are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap<S> {
    pub shift: i64,
    /// Source degree -> matrix of shape (dim target(d+shift), dim source(d)).
    pub blocks: BTreeMap<i64, SparseMatrix<S>>,
}

impl<S: Scalar> GradedMap<S> {
    pub fn zero(shift: i64) -> Self {
        GradedMap { shift, blocks: BTreeMap::new() }
    }

    pub fn block(&self, d: i64, source: &GradedSpace, target: &GradedSpace) -> SparseMatrix<S> {
        self.blocks
            .get(&d)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zero(target.dim(d + self.shift), source.dim(d)))
    }

    /// Build from the image of each basis element, given as sparse vectors in
    /// the target degree.
    pub fn from_images(
        shift: i64,
        source: &GradedSpace,
        target: &GradedSpace,
        image: impl Fn(i64, usize) -> SparseVec<S>,
    ) -> Result<Self> {
        let mut blocks = BTreeMap::new();
        for d in source.degrees() {
            let cols: Vec<SparseVec<S>> = (0..source.dim(d)).map(|i| image(d, i)).collect();
            if cols.iter().all(|c| c.is_empty()) {
                continue;
            }
            blocks.insert(d, SparseMatrix::from_columns(target.dim(d + shift), cols)?);
        }
        Ok(GradedMap { shift, blocks })
    }

    pub fn check_shapes(&self, source: &GradedSpace, target: &GradedSpace) -> Result<()> {
        for (d, m) in &self.blocks {
            if m.cols() != source.dim(*d) || m.rows() != target.dim(d + self.shift) {
                return Err(Error::ShapeMismatch(format!(
                    "block at degree {d} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    target.dim(d + self.shift),
                    source.dim(*d)
                )));
            }
        }
        Ok(())
    }

    /// `self ∘ other` where `other: A -> B`, `self: B -> C`.
    pub fn compose(&self, other: &GradedMap<S>, a: &GradedSpace, b: &GradedSpace, c: &GradedSpace) -> Result<Self> {
        let mut blocks = BTreeMap::new();
        for d in a.degrees() {
            let first = other.block(d, a, b);
            let second = self.block(d + other.shift, b, c);
            let m = second.mul(&first)?;
            if !m.is_zero() {
                blocks.insert(d, m);
            }
        }
        Ok(GradedMap { shift: self.shift + other.shift, blocks })
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(|m| m.is_zero())
    }
}

/// A chain complex together with the range of degrees in which it is a
/// faithful model. Outside `known`, the stored data may be a truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex<S> {
    space: GradedSpace,
    differential: GradedMap<S>,
    known: DegreeRange,
}

/// Homology dimension in one degree together with whether it can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyRow {
    pub dim: usize,
    pub reliable: bool,
}

pub type HomologyTable = BTreeMap<i64, HomologyRow>;

pub fn reliable_dims(t: &HomologyTable) -> BTreeMap<i64, usize> {
    t.iter().filter(|(_, r)| r.reliable).map(|(d, r)| (*d, r.dim)).collect()
}

pub fn all_dims(t: &HomologyTable) -> BTreeMap<i64, usize> {
    t.iter().map(|(d, r)| (*d, r.dim)).collect()
}

/// Nonzero entries only.
pub fn support(dims: &BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
    dims.iter().filter(|(_, v)| **v > 0).map(|(d, v)| (*d, *v)).collect()
}

impl<S: Scalar> ChainComplex<S> {
    /// Validates block shapes and `d∘d = 0`.
    pub fn new(space: GradedSpace, differential: GradedMap<S>, known: DegreeRange) -> Result<Self> {
        if differential.shift != -1 {
            return Err(Error::ShapeMismatch(format!("differential has degree {}, expected -1", differential.shift)));
        }
        differential.check_shapes(&space, &space)?;
        let cx = ChainComplex { space, differential, known };
        cx.check_square_zero()?;
        Ok(cx)
    }

    pub fn from_images(space: GradedSpace, known: DegreeRange, image: impl Fn(i64, usize) -> SparseVec<S>) -> Result<Self> {
        let d = GradedMap::from_images(-1, &space, &space, image)?;
        Self::new(space, d, known)
    }

    /// Zero differential.
    pub fn from_space(space: GradedSpace) -> Self {
        ChainComplex { space, differential: GradedMap::zero(-1), known: DegreeRange::ALL }
    }

    /// `𝕜[n]`.
    pub fn point(n: i64, label: &str) -> Self {
        Self::from_space(GradedSpace::line(n, label))
    }

    pub fn zero() -> Self {
        Self::from_space(GradedSpace::new())
    }

    fn check_square_zero(&self) -> Result<()> {
        for d in self.space.degrees() {
            let first = self.d_block(d);
            let second = self.d_block(d - 1);
            if !second.mul(&first)?.is_zero() {
                return Err(Error::NotAComplex(format!("d∘d nonzero on degree {d}")));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn differential(&self) -> &GradedMap<S> {
        &self.differential
    }

    pub fn known(&self) -> DegreeRange {
        self.known
    }

    pub fn with_known(mut self, known: DegreeRange) -> Self {
        self.known = known;
        self
    }

    pub fn dim(&self, d: i64) -> usize {
        self.space.dim(d)
    }

    /// Differential out of degree `d`.
    pub fn d_block(&self, d: i64) -> SparseMatrix<S> {
        self.differential.block(d, &self.space, &self.space)
    }

    pub fn d_of(&self, d: i64, i: usize) -> SparseVec<S> {
        self.differential.blocks.get(&d).map(|m| m.column(i)).unwrap_or_default()
    }

    pub fn homology_at(&self, d: i64) -> Result<usize> {
        homology_dim(&self.d_block(d + 1), &self.d_block(d))
    }

    /// Homology over the window degrees. A degree is reliable when it and
    /// both neighbours lie in the known range.
    pub fn homology(&self, w: &TruncationWindow) -> Result<HomologyTable> {
        self.homology_over(w.deg_lo, w.deg_hi)
    }

    pub fn homology_over(&self, lo: i64, hi: i64) -> Result<HomologyTable> {
        let rows: Vec<Result<(i64, HomologyRow)>> = (lo..=hi)
            .into_par_iter()
            .map(|d| {
                let dim = self.homology_at(d)?;
                let reliable = self.known.contains(d - 1) && self.known.contains(d) && self.known.contains(d + 1);
                Ok((d, HomologyRow { dim, reliable }))
            })
            .collect();
        rows.into_iter().collect()
    }

    /// Homology in every degree where the space is nonzero.
    pub fn homology_all(&self) -> Result<HomologyTable> {
        match (self.space.min_degree(), self.space.max_degree()) {
            (Some(lo), Some(hi)) => self.homology_over(lo, hi),
            _ => Ok(BTreeMap::new()),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.space.degrees().map(|d| if d.rem_euclid(2) == 0 { 1 } else { -1 } * self.dim(d) as i64).sum()
    }

    /// Restrict to the degrees in `[lo, hi]`, marking the range as known only
    /// where it was already.
    pub fn truncate(&self, lo: i64, hi: i64) -> Result<Self> {
        let mut space = GradedSpace::new();
        for d in lo..=hi {
            for l in self.space.labels(d) {
                space.push(d, l.clone())?;
            }
        }
        let mut blocks = BTreeMap::new();
        for d in (lo + 1)..=hi {
            let b = self.d_block(d);
            if !b.is_zero() {
                blocks.insert(d, b);
            }
        }
        let known = self.known.intersect(&DegreeRange::between(lo, hi));
        Self::new(space, GradedMap { shift: -1, blocks }, known)
    }
}

impl<S: Scalar> ChainComplex<S> {
    /// Keep only the basis elements selected by `keep`. Meaningful when the
    /// kept span is a direct summand or a subcomplex; `d∘d = 0` is rechecked.
    pub fn restrict(&self, keep: impl Fn(i64, usize) -> bool) -> Result<(Self, BTreeMap<i64, Vec<usize>>)> {
        let mut space = GradedSpace::new();
        let mut kept: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        let mut new_pos: HashMap<(i64, usize), usize> = HashMap::new();
        for d in self.space.degrees() {
            for (i, l) in self.space.labels(d).iter().enumerate() {
                if keep(d, i) {
                    let k = space.push(d, l.clone())?;
                    kept.entry(d).or_default().push(i);
                    new_pos.insert((d, i), k);
                }
            }
        }
        let cx = ChainComplex::from_images(space, self.known, |d, k| {
            let i = kept[&d][k];
            self.d_of(d, i).into_iter().filter_map(|(j, c)| new_pos.get(&(d - 1, j)).map(|p| (*p, c))).collect()
        })?;
        Ok((cx, kept))
    }
}

/// Result of a tensor product, remembering which factor pair each basis
/// element came from.
#[derive(Clone, Debug)]
pub struct TensorProduct<S> {
    pub complex: ChainComplex<S>,
    /// Per degree, the `(degree of left factor, left index, right index)` of
    /// each basis element.
    pub parts: BTreeMap<i64, Vec<(i64, usize, usize)>>,
}

/// `x ⊗ y` restricted to the window degrees, with Koszul-signed differential.
pub fn tensor_parts<S: Scalar>(x: &ChainComplex<S>, y: &ChainComplex<S>, w: &TruncationWindow) -> Result<TensorProduct<S>> {
    let mut parts: BTreeMap<i64, Vec<(i64, usize, usize)>> = BTreeMap::new();
    let mut lookup: HashMap<(i64, usize, i64, usize), usize> = HashMap::new();
    let mut space = GradedSpace::new();
    let xdeg: Vec<i64> = x.space.degrees().collect();
    let ydeg: Vec<i64> = y.space.degrees().collect();
    for d in w.degrees() {
        for &a in &xdeg {
            let b = d - a;
            if y.space.dim(b) == 0 {
                continue;
            }
            for i in 0..x.dim(a) {
                for j in 0..y.dim(b) {
                    let label = format!("{}⊗{}", x.space.labels(a)[i], y.space.labels(b)[j]);
                    let k = space.push(d, label)?;
                    parts.entry(d).or_default().push((a, i, j));
                    lookup.insert((a, i, b, j), k);
                }
            }
        }
        // The stored factors may be truncations: every partner degree needed
        // for this product degree has to be faithfully known.
        if let Some(&a) = xdeg.iter().find(|&&a| !y.known.contains(d - a)) {
            return Err(Error::WindowOverflow { degree: d, context: format!("right factor unknown in degree {}", d - a) });
        }
        if let Some(&b) = ydeg.iter().find(|&&b| !x.known.contains(d - b)) {
            return Err(Error::WindowOverflow { degree: d, context: format!("left factor unknown in degree {}", d - b) });
        }
    }
    let below = xdeg.iter().any(|a| ydeg.iter().any(|b| a + b < w.deg_lo));
    let above = xdeg.iter().any(|a| ydeg.iter().any(|b| a + b > w.deg_hi));
    let image = |d: i64, k: usize| -> SparseVec<S> {
        let (a, i, j) = parts[&d][k];
        let b = d - a;
        let mut out = Vec::new();
        for (i2, c) in x.d_of(a, i) {
            if let Some(&t) = lookup.get(&(a - 1, i2, b, j)) {
                out.push((t, c));
            }
        }
        let sign: S = parity_sign(a);
        for (j2, c) in y.d_of(b, j) {
            if let Some(&t) = lookup.get(&(a, i, b - 1, j2)) {
                out.push((t, sign.clone() * c));
            }
        }
        crate::linalg::canonical_vec(out)
    };
    // Outside the window the product is known to vanish only when nothing
    // stored or unknown can land there.
    let lo_free = !below && x.known.lo.is_none() && y.known.lo.is_none();
    let hi_free = !above && x.known.hi.is_none() && y.known.hi.is_none();
    let known = DegreeRange { lo: (!lo_free).then_some(w.deg_lo), hi: (!hi_free).then_some(w.deg_hi) };
    let complex = ChainComplex::from_images(space, known, image)?;
    Ok(TensorProduct { complex, parts })
}

pub fn tensor<S: Scalar>(x: &ChainComplex<S>, y: &ChainComplex<S>, w: &TruncationWindow) -> Result<ChainComplex<S>> {
    Ok(tensor_parts(x, y, w)?.complex)
}

/// Wrap a label in `n` suspensions, collapsing nested ones.
pub fn suspend_label(label: &str, n: i64) -> String {
    let (inner, k) = unsuspend_label(label);
    let total = k + n;
    match total {
        0 => inner.to_string(),
        1 => format!("s({inner})"),
        _ => format!("s^{total}({inner})"),
    }
}

/// Split `s^k(inner)` into `(inner, k)`; labels without a single outer
/// suspension wrapper return `k = 0`.
fn unsuspend_label(label: &str) -> (&str, i64) {
    let (k, rest) = if let Some(r) = label.strip_prefix("s(") {
        (1, r)
    } else if let Some(r) = label.strip_prefix("s^") {
        let Some(open) = r.find('(') else { return (label, 0) };
        match r[..open].parse::<i64>() {
            Ok(k) => (k, &r[open + 1..]),
            Err(_) => return (label, 0),
        }
    } else {
        return (label, 0);
    };
    // the parenthesis opened by the wrapper must close at the very end
    let mut depth = 1i32;
    for (pos, ch) in rest.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    if pos + 1 == rest.len() {
                        return (&rest[..pos], k);
                    }
                    return (label, 0);
                }
            }
            _ => {}
        }
    }
    (label, 0)
}

/// `x[n]`: degree `d` holds `x_{d-n}`, differential multiplied by `(-1)^n`.
pub fn shift<S: Scalar>(x: &ChainComplex<S>, n: i64) -> ChainComplex<S> {
    let mut space = GradedSpace::new();
    for d in x.space.degrees() {
        for l in x.space.labels(d) {
            space.push(d + n, suspend_label(l, n)).expect("suspension keeps labels distinct");
        }
    }
    let sign: S = parity_sign(n);
    let blocks = x.differential.blocks.iter().map(|(d, m)| (d + n, m.scale(&sign))).collect();
    ChainComplex { space, differential: GradedMap { shift: -1, blocks }, known: x.known.translate(n) }
}

pub fn dual_label(label: &str) -> String {
    match label.strip_suffix("^∨") {
        Some(inner) => inner.to_string(),
        None => format!("{label}^∨"),
    }
}

/// Linear dual: degree `d` holds `(x_{-d})^∨`; differential blocks are negated
/// transposes, so dualizing twice returns the original complex exactly.
pub fn dual<S: Scalar>(x: &ChainComplex<S>) -> ChainComplex<S> {
    let mut space = GradedSpace::new();
    for d in x.space.degrees() {
        for l in x.space.labels(d) {
            space.push(-d, dual_label(l)).expect("dual keeps labels distinct");
        }
    }
    let minus = -S::one();
    // original block at source degree e maps x_e -> x_{e-1}; its transpose maps
    // x_{e-1}^∨ (degree 1-e) -> x_e^∨ (degree -e).
    let blocks = x.differential.blocks.iter().map(|(e, m)| (1 - e, m.transpose().scale(&minus))).collect();
    ChainComplex { space, differential: GradedMap { shift: -1, blocks }, known: x.known.negate() }
}

/// Mapping cone of a degree-0 chain map `f: x -> y`: `y ⊕ x[1]` with
/// `d(s a) = -s(da) + f(a)`. Degree `d` lists `y_d` first, then `s(x_{d-1})`.
pub fn cone<S: Scalar>(f: &GradedMap<S>, x: &ChainComplex<S>, y: &ChainComplex<S>) -> Result<ChainComplex<S>> {
    if f.shift != 0 {
        return Err(Error::ShapeMismatch("mapping cone needs a degree-0 map".into()));
    }
    f.check_shapes(&x.space, &y.space)?;
    let left = y.differential.compose(f, &x.space, &y.space, &y.space)?;
    let right = f.compose(&x.differential, &x.space, &x.space, &y.space)?;
    for d in x.space.degrees() {
        if left.block(d, &x.space, &y.space) != right.block(d, &x.space, &y.space) {
            return Err(Error::ValidationError(format!("cone: map is not a chain map in degree {d}")));
        }
    }
    let mut space = GradedSpace::new();
    let lo = x.space.min_degree().map(|d| d + 1).into_iter().chain(y.space.min_degree()).min();
    let hi = x.space.max_degree().map(|d| d + 1).into_iter().chain(y.space.max_degree()).max();
    let (Some(lo), Some(hi)) = (lo, hi) else { return Ok(ChainComplex::zero()) };
    for d in lo..=hi {
        for l in y.space.labels(d) {
            space.push(d, l.clone())?;
        }
        for l in x.space.labels(d - 1) {
            space.push(d, suspend_label(l, 1))?;
        }
    }
    let image = |d: i64, k: usize| -> SparseVec<S> {
        let ny = y.dim(d);
        let ny_below = y.dim(d - 1);
        if k < ny {
            y.d_of(d, k)
        } else {
            let i = k - ny;
            let mut out: SparseVec<S> = x.d_of(d - 1, i).into_iter().map(|(r, c)| (ny_below + r, -c)).collect();
            out.extend(f.block(d - 1, &x.space, &y.space).column(i));
            crate::linalg::canonical_vec(out)
        }
    };
    let known = y.known.intersect(&x.known.translate(1));
    ChainComplex::from_images(space, known, image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn wide() -> TruncationWindow {
        TruncationWindow::new(-20, 20, 4).unwrap()
    }

    /// `𝕜 -> 𝕜` isomorphism in degrees 1, 0.
    fn iso_pair() -> ChainComplex<Q> {
        let mut s = GradedSpace::new();
        s.push(1, "a".into()).unwrap();
        s.push(0, "b".into()).unwrap();
        ChainComplex::from_images(s, DegreeRange::ALL, |d, _| if d == 1 { vec![(0, q(1))] } else { vec![] }).unwrap()
    }

    fn dims(t: &HomologyTable) -> BTreeMap<i64, usize> {
        support(&all_dims(t))
    }

    #[test]
    fn rejects_non_complex() {
        let mut s = GradedSpace::new();
        s.push(2, "a".into()).unwrap();
        s.push(1, "b".into()).unwrap();
        s.push(0, "c".into()).unwrap();
        let r = ChainComplex::<Q>::from_images(s, DegreeRange::ALL, |d, _| if d > 0 { vec![(0, q(1))] } else { vec![] });
        assert!(matches!(r, Err(Error::NotAComplex(_))));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let mut s = GradedSpace::new();
        s.push(0, "a".into()).unwrap();
        assert!(s.push(1, "a".into()).is_err());
    }

    #[test]
    fn tensor_examples() {
        let unit = ChainComplex::<Q>::point(0, "1");
        let x = iso_pair();
        let ux = tensor(&unit, &x, &wide()).unwrap();
        assert_eq!(ux.space().dims(), x.space().dims());
        let a = ChainComplex::<Q>::point(2, "a");
        let b = ChainComplex::<Q>::point(3, "b");
        assert_eq!(tensor(&a, &b, &wide()).unwrap().space().dims(), BTreeMap::from([(5, 1)]));
        let xx = tensor(&x, &x, &wide()).unwrap();
        assert_eq!(xx.space().total_dim(), 4);
        assert!(dims(&xx.homology_all().unwrap()).is_empty());
    }

    #[test]
    fn shift_examples() {
        let p = ChainComplex::<Q>::point(0, "1");
        assert_eq!(shift(&p, 1).space().dims(), BTreeMap::from([(1, 1)]));
        let x = iso_pair();
        assert_eq!(shift(&shift(&x, 3), -3), x);
        assert_eq!(shift(&p, 1).space().labels(1), &["s(1)".to_string()]);
        assert_eq!(suspend_label("s(a)⊗s(b)", 1), "s(s(a)⊗s(b))");
        assert_eq!(suspend_label("s^2(a)", -2), "a");
    }

    #[test]
    fn dual_examples() {
        let p = ChainComplex::<Q>::point(4, "e");
        assert_eq!(dual(&p).space().dims(), BTreeMap::from([(-4, 1)]));
        let x = iso_pair();
        assert_eq!(dual(&dual(&x)), x);
    }

    #[test]
    fn homology_examples() {
        let mut s = GradedSpace::new();
        s.push(0, "a".into()).unwrap();
        s.push(1, "b".into()).unwrap();
        s.push(1, "c".into()).unwrap();
        s.push(2, "e".into()).unwrap();
        let z = ChainComplex::<Q>::from_space(s);
        assert_eq!(dims(&z.homology_all().unwrap()), BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
        assert!(dims(&iso_pair().homology_all().unwrap()).is_empty());
        // k --0--> k --1--> k in degrees 2, 1, 0
        let mut s = GradedSpace::new();
        s.push(2, "u".into()).unwrap();
        s.push(1, "v".into()).unwrap();
        s.push(0, "w".into()).unwrap();
        let c = ChainComplex::<Q>::from_images(s, DegreeRange::ALL, |d, _| if d == 1 { vec![(0, q(1))] } else { vec![] }).unwrap();
        assert_eq!(dims(&c.homology_all().unwrap()), BTreeMap::from([(2, 1)]));
    }

    #[test]
    fn window_boundary_flagged() {
        let c = iso_pair().with_known(DegreeRange::between(0, 1));
        let t = c.homology_over(0, 1).unwrap();
        assert!(!t[&0].reliable && !t[&1].reliable);
        let w = TruncationWindow::new(-3, 3, 0).unwrap();
        let t = iso_pair().homology(&w).unwrap();
        assert!(t.values().all(|r| r.reliable));
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let x = iso_pair();
        let id = GradedMap::from_images(0, x.space(), x.space(), |_, i| vec![(i, q(1))]).unwrap();
        let c = cone(&id, &x, &x).unwrap();
        assert!(dims(&c.homology_all().unwrap()).is_empty());
    }

    /// Random bounded complex in degrees 0..=2 with entries in -2..=2.
    fn random_complex() -> impl Strategy<Value = ChainComplex<Q>> {
        (0usize..4, 0usize..4, 0usize..4, any::<u64>()).prop_map(|(a, b, c, seed)| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut s = GradedSpace::new();
            for i in 0..a {
                s.push(0, format!("x{i}")).unwrap();
            }
            for i in 0..b {
                s.push(1, format!("y{i}")).unwrap();
            }
            for i in 0..c {
                s.push(2, format!("z{i}")).unwrap();
            }
            // d2 = d1-kernel combinations to keep d∘d = 0
            let d1: Vec<Vec<i64>> = (0..b).map(|_| (0..a).map(|_| rng.gen_range(-2..3)).collect()).collect();
            let d1m = SparseMatrix::<Q>::from_columns(
                a,
                d1.iter().map(|col| col.iter().enumerate().map(|(r, v)| (r, q(*v))).filter(|(_, v)| !v.is_zero()).collect()).collect(),
            )
            .unwrap();
            let ker = crate::linalg::kernel_basis(&d1m);
            let d2: Vec<SparseVec<Q>> = (0..c)
                .map(|_| {
                    let mut v = Vec::new();
                    for k in &ker {
                        let f = q(rng.gen_range(-2..3));
                        v.extend(k.iter().map(|(i, x)| (*i, x.clone() * f.clone())));
                    }
                    crate::linalg::canonical_vec(v)
                })
                .collect();
            ChainComplex::from_images(s, DegreeRange::ALL, |d, i| match d {
                1 => d1m.column(i),
                2 => d2[i].clone(),
                _ => vec![],
            })
            .unwrap()
        })
    }

    use num_traits::Zero;

    proptest! {
        #[test]
        fn euler_characteristic_of_homology(x in random_complex()) {
            let h = x.homology_all().unwrap();
            let chi_h: i64 = h.iter().map(|(d, r)| if d % 2 == 0 { r.dim as i64 } else { -(r.dim as i64) }).sum();
            prop_assert_eq!(chi_h, x.euler_characteristic());
        }

        #[test]
        fn dual_is_involution_and_mirrors_homology(x in random_complex()) {
            let dx = dual(&x);
            prop_assert_eq!(&dual(&dx), &x);
            let h = dims(&x.homology_all().unwrap());
            let hd = dims(&dx.homology_all().unwrap());
            let mirrored: BTreeMap<i64, usize> = h.iter().map(|(d, v)| (-d, *v)).collect();
            prop_assert_eq!(hd, mirrored);
        }

        #[test]
        fn shift_translates_homology(x in random_complex(), n in -4i64..5) {
            let h = dims(&x.homology_all().unwrap());
            let hs = dims(&shift(&x, n).homology_all().unwrap());
            let moved: BTreeMap<i64, usize> = h.iter().map(|(d, v)| (d + n, *v)).collect();
            prop_assert_eq!(hs, moved);
        }

        #[test]
        fn tensor_is_associative(x in random_complex(), y in random_complex(), z in random_complex()) {
            let w = TruncationWindow::new(-1, 7, 0).unwrap();
            let l = tensor(&tensor(&x, &y, &w).unwrap(), &z, &w).unwrap();
            let r = tensor(&x, &tensor(&y, &z, &w).unwrap(), &w).unwrap();
            // same labels (flat concatenation) up to ordering; compare blocks
            // after permuting r's basis into l's order
            for d in w.degrees() {
                prop_assert_eq!(l.dim(d), r.dim(d));
            }
            for d in w.degrees() {
                for (k, label) in l.space().labels(d).iter().enumerate() {
                    let (_, kr) = r.space().lookup(label).unwrap();
                    let dl: BTreeMap<String, Q> = l.d_of(d, k).into_iter().map(|(i, c)| (l.space().labels(d - 1)[i].clone(), c)).collect();
                    let dr: BTreeMap<String, Q> = r.d_of(d, kr).into_iter().map(|(i, c)| (r.space().labels(d - 1)[i].clone(), c)).collect();
                    prop_assert_eq!(dl, dr);
                }
            }
        }
    }
}
