//! Hochschild homology as factorization homology over the framed circle.
//!
//! Cells `a₀[a1|…|an]` carry degree `|a₀| + Σ(|a_i|+1)`. With `ε_0 = |a₀|`
//! and `ε_k = ε_{k−1} + |a_k| + 1` the differential is
//!
//! ```text
//! b = (d a₀)[…] − Σ_k (−1)^{ε_{k−1}} a₀[…|d a_k|…]
//!   + (−1)^{|a₀|} a₀a₁[a2|…] + Σ_k (−1)^{ε_k} a₀[…|a_k a_{k+1}|…]
//!   − (−1)^{(|a_n|+1) ε_{n−1}} a_n a₀[a1|…|a_{n−1}]
//! ```
//!
//! Terms that keep the number of nonunit factors are the associated graded
//! of the cardinality filtration. Layer `i` of that filtration is compared
//! against the two-term model `cone(1 − t)` on `(Ī[1])^{⊗i}`, where `t` is
//! the Koszul-signed cyclic rotation.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::algebra::{free_algebra, DGAlgebra};
use crate::bar::{enumerate_words, plan, weight_enumerable, Cell, Mode, Terms, WeightedComplex};
use crate::error::{Error, Result, TablePair};
use crate::graded::{
    cone, dual, parity_sign, shift, support, tensor, tensor_parts, ChainComplex, DegreeRange, GradedMap, GradedSpace,
    HomologyRow, HomologyTable, TruncationWindow,
};
use crate::harness::{DualityReport, Pairing};
use crate::scalar::Scalar;

pub type CyclicBarComplex<S> = WeightedComplex<S>;

fn cyclic_label<S: Scalar>(a: &DGAlgebra<S>, c: &Cell) -> String {
    let head = c.head.map_or("1", |h| a.label(h));
    format!("{head}[{}]", c.word.iter().map(|i| a.label(*i)).collect::<Vec<_>>().join("|"))
}

fn cell_degree<S: Scalar>(a: &DGAlgebra<S>, c: &Cell) -> i64 {
    c.head.map_or(0, |h| a.degree(h)) + c.word.iter().map(|i| a.degree(*i) + 1).sum::<i64>()
}

fn cell_weight<S: Scalar>(a: &DGAlgebra<S>, c: &Cell) -> u32 {
    c.head.iter().chain(c.word.iter()).map(|i| a.weight(*i).unwrap_or(0)).sum()
}

/// Hochschild differential of a cell, split into `(cardinality preserving,
/// cardinality lowering)` terms.
fn cyclic_terms<S: Scalar>(a: &DGAlgebra<S>, cell: &Cell) -> Terms<S> {
    let unit = a.unit();
    let word = &cell.word;
    let n = word.len();
    let h0 = cell.head.map_or(0, |h| a.degree(h));
    let mut keep = Vec::new();
    let mut lower = Vec::new();
    if let Some(h) = cell.head {
        for (x, c) in a.d(h) {
            if *x != unit {
                keep.push((Cell { head: Some(*x), word: word.clone() }, c.clone()));
            }
        }
    }
    let mut eps = h0;
    for k in 0..n {
        let sign: S = -parity_sign::<S>(eps);
        for (x, c) in a.d(word[k]) {
            if *x != unit {
                let mut w = word.clone();
                w[k] = *x;
                keep.push((Cell { head: cell.head, word: w }, sign.clone() * c.clone()));
            }
        }
        eps += a.degree(word[k]) + 1;
    }
    if n == 0 {
        return (keep, lower);
    }
    let tail = word[1..].to_vec();
    match cell.head {
        None => keep.push((Cell { head: Some(word[0]), word: tail }, S::one())),
        Some(h) => {
            let sign: S = parity_sign(h0);
            for (x, c) in a.mul(h, word[0]) {
                if x != unit {
                    lower.push((Cell { head: Some(x), word: tail.clone() }, sign.clone() * c));
                }
            }
        }
    }
    let mut eps = h0;
    for k in 0..n - 1 {
        eps += a.degree(word[k]) + 1;
        let sign: S = parity_sign(eps);
        for (x, c) in a.mul(word[k], word[k + 1]) {
            if x != unit {
                let mut w = word[..k].to_vec();
                w.push(x);
                w.extend_from_slice(&word[k + 2..]);
                lower.push((Cell { head: cell.head, word: w }, sign.clone() * c));
            }
        }
    }
    let last = word[n - 1];
    let eps_prev = h0 + word[..n - 1].iter().map(|i| a.degree(*i) + 1).sum::<i64>();
    let sign: S = -parity_sign::<S>((a.degree(last) + 1) * eps_prev);
    let front = word[..n - 1].to_vec();
    match cell.head {
        None => keep.push((Cell { head: Some(last), word: front }, sign)),
        Some(h) => {
            for (x, c) in a.mul(last, h) {
                if x != unit {
                    lower.push((Cell { head: Some(x), word: front.clone() }, sign.clone() * c));
                }
            }
        }
    }
    (keep, lower)
}

/// Normalized cyclic bar complex of `a`, enumerated as the bar construction
/// is (by auxiliary weight when available, otherwise by degree).
pub fn cyclic_bar<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<CyclicBarComplex<S>> {
    let plan = plan(a, w, true, "Hochschild homology")?;
    let words = enumerate_words(a, &plan.mode)?;
    let heads: Vec<Option<usize>> = std::iter::once(None).chain(a.ideal_indices().map(Some)).collect();
    let mut cells = Vec::new();
    for (word, deg, wt) in &words {
        for h in &heads {
            let cell = Cell { head: *h, word: word.clone() };
            let d = deg + h.map_or(0, |h| a.degree(h));
            let ok = match &plan.mode {
                Mode::Weight { cap, degrees } => {
                    wt + h.map_or(0, |h| a.weight(h).unwrap_or(0)) <= *cap
                        || degrees.is_some_and(|(lo, hi)| lo.is_none_or(|l| d >= l) && hi.is_none_or(|x| d <= x))
                }
                Mode::Degree { lo, hi, .. } => lo.is_none_or(|l| d >= l) && hi.is_none_or(|x| d <= x),
            };
            if ok {
                cells.push((cell, d));
            }
        }
    }
    let weighted = weight_enumerable(a) || a.is_ground();
    let weight_exact = if weighted { plan.weight_exact.or(Some(w.weight_cap as u32)) } else { None };
    WeightedComplex::assemble(
        cells,
        |c| cyclic_label(a, c),
        |c| weighted.then(|| cell_weight(a, c)),
        plan.known,
        weight_exact,
        |c| cyclic_terms(a, c),
    )
}

/// Hochschild homology per auxiliary weight, and summed over weights.
#[derive(Clone, Debug, Serialize)]
pub struct HochschildHomology {
    pub by_weight: BTreeMap<u32, HomologyTable>,
    /// Sum over the complete weights; rows are stale where weights beyond the
    /// cap could still contribute.
    pub totals: HomologyTable,
    pub weight_exact: Option<u32>,
}

impl HochschildHomology {
    pub fn weight_dims(&self) -> BTreeMap<(u32, i64), usize> {
        self.by_weight.iter().flat_map(|(wt, t)| t.iter().map(move |(d, r)| ((*wt, *d), r.dim))).collect()
    }
}

pub fn hochschild_homology<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<HochschildHomology> {
    let cx = cyclic_bar(a, w)?;
    Ok(HochschildHomology { by_weight: cx.homology_by_weight(w)?, totals: cx.total_homology(w)?, weight_exact: cx.weight_exact })
}

/// Lowest degree with nonzero homology in each weight `1..=cap` (auxiliary
/// weight when the algebra has one, cardinality otherwise).
pub fn convergence_probe<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<BTreeMap<u32, Option<i64>>> {
    let cx = cyclic_bar(a, w)?;
    let lowest = |t: &HomologyTable| t.iter().find(|(_, r)| r.reliable && r.dim > 0).map(|(d, _)| *d);
    let mut out = BTreeMap::new();
    if cx.weight_exact.is_some() {
        for (wt, t) in cx.homology_by_weight(w)? {
            if wt >= 1 {
                out.insert(wt, lowest(&t));
            }
        }
    } else {
        for i in 1..=w.weight_cap {
            let (piece, _) = cx.cardinality_piece(i, None)?;
            out.insert(i as u32, lowest(&piece.homology(w)?));
        }
    }
    Ok(out)
}

/// Factor of a tensor word: degree and position inside the tensored complex.
type Factor = (i64, usize);

struct TensorPower<S> {
    complex: ChainComplex<S>,
    words: BTreeMap<i64, Vec<Vec<Factor>>>,
}

/// `x^{⊗i}`, keeping after each step only the partial words accepted by
/// `keep(step, degree, word)`. The kept span must be a summand, subcomplex or
/// quotient complex.
fn tensor_power<S: Scalar>(
    x: &ChainComplex<S>,
    i: usize,
    keep: impl Fn(usize, i64, &[Factor]) -> bool,
) -> Result<TensorPower<S>> {
    let x = x.clone().with_known(DegreeRange::ALL);
    if i == 0 {
        return Ok(TensorPower { complex: ChainComplex::point(0, "1"), words: BTreeMap::from([(0, vec![Vec::new()])]) });
    }
    let first: BTreeMap<i64, Vec<Vec<Factor>>> =
        x.space().degrees().map(|d| (d, (0..x.dim(d)).map(|k| vec![(d, k)]).collect())).collect();
    let (mut cur, kept) = x.restrict(|d, k| keep(1, d, &first[&d][k]))?;
    let mut words: BTreeMap<i64, Vec<Vec<Factor>>> =
        kept.iter().map(|(d, ks)| (*d, ks.iter().map(|k| first[d][*k].clone()).collect())).collect();
    for step in 2..=i {
        let bounds = (cur.space().min_degree(), cur.space().max_degree(), x.space().min_degree(), x.space().max_degree());
        let (Some(a), Some(b), Some(c), Some(d)) = bounds else {
            return Ok(TensorPower { complex: ChainComplex::zero(), words: BTreeMap::new() });
        };
        let tp = tensor_parts(&cur, &x, &TruncationWindow::new(a + c, b + d, 0)?)?;
        let mut next: BTreeMap<i64, Vec<Vec<Factor>>> = BTreeMap::new();
        for (deg, parts) in &tp.parts {
            for (ld, li, rj) in parts {
                let mut wd = words[ld][*li].clone();
                wd.push((deg - ld, *rj));
                next.entry(*deg).or_default().push(wd);
            }
        }
        let (pruned, kept) = tp.complex.restrict(|d, k| keep(step, d, &next[&d][k]))?;
        words = kept.iter().map(|(d, ks)| (*d, ks.iter().map(|k| next[d][*k].clone()).collect())).collect();
        cur = pruned.with_known(DegreeRange::ALL);
    }
    Ok(TensorPower { complex: cur, words })
}

/// `cone(1 − t)` on the tensor power (desuspended first when `desuspend`),
/// with `t` the signed cyclic rotation moving the last factor to the front.
fn rotation_cone<S: Scalar>(power: &TensorPower<S>, desuspend: bool, flip: bool) -> Result<ChainComplex<S>> {
    let w = &power.complex;
    let mut index: HashMap<&[Factor], usize> = HashMap::new();
    for ws in power.words.values() {
        for (k, wd) in ws.iter().enumerate() {
            index.insert(wd.as_slice(), k);
        }
    }
    let base = if desuspend { shift(w, -1) } else { w.clone() };
    let offset = i64::from(desuspend);
    let f = GradedMap::from_images(0, base.space(), base.space(), |d, k| {
        let wd = &power.words[&(d + offset)][k];
        let Some((last, rest)) = wd.split_last() else { return Vec::new() };
        let mut rotated = vec![*last];
        rotated.extend_from_slice(rest);
        let exponent = last.0 * rest.iter().map(|f| f.0).sum::<i64>();
        let mut sign: S = parity_sign(exponent);
        if flip {
            sign = -sign;
        }
        let target = index[rotated.as_slice()];
        crate::linalg::canonical_vec([(k, S::one()), (target, -sign)])
    })?;
    cone(&f, &base, &base)
}

/// Two-term model of one cardinality layer, together with the auxiliary
/// weight of each basis element when the algebra is weighted.
struct LayerModel<S> {
    complex: ChainComplex<S>,
    /// Cone basis position of each cardinality-`i` cell.
    position: HashMap<Cell, (i64, usize)>,
    weight: BTreeMap<i64, Vec<Option<u32>>>,
}

fn layer_model<S: Scalar>(a: &DGAlgebra<S>, i: usize, cx: &CyclicBarComplex<S>, flip: bool) -> Result<LayerModel<S>> {
    let ideal = a.ideal_complex()?;
    let x = shift(&ideal, 1);
    let global = |f: &Factor| a.ideal_basis(f.0 - 1)[f.1];
    let weighted = cx.weight_exact.is_some();
    let weight_of = |wd: &[Factor]| -> Option<u32> { weighted.then(|| wd.iter().map(|f| a.weight(global(f)).unwrap_or(0)).sum()) };
    // prune to what the cyclic complex can contain
    let cells = cx.cells.values().flatten().filter(|c| c.cardinality() == i);
    let max_weight = cells.clone().map(|c| cell_weight(a, c)).max();
    let (lo, hi) = cells.fold((None::<i64>, None::<i64>), |(lo, hi), c| {
        let d = cell_degree(a, c) + i64::from(c.head.is_some());
        (Some(lo.map_or(d, |l| l.min(d))), Some(hi.map_or(d, |h| h.max(d))))
    });
    let (xmin, xmax) = (x.space().min_degree().unwrap_or(0), x.space().max_degree().unwrap_or(0));
    let min_weight = a.ideal_indices().filter_map(|j| a.weight(j)).min().unwrap_or(0);
    let keep = |step: usize, d: i64, wd: &[Factor]| -> bool {
        let rest = (i - step) as i64;
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if d + rest * xmax < lo || d + rest * xmin > hi {
                return false;
            }
        } else {
            return false;
        }
        match (weight_of(wd), max_weight) {
            (Some(wt), Some(m)) => wt + (rest as u32) * min_weight <= m,
            _ => true,
        }
    };
    let power = tensor_power(&x, i, keep)?;
    let complex = rotation_cone(&power, true, flip)?;
    let wdim = |d: i64| power.complex.dim(d);
    let mut position = HashMap::new();
    for (d, ws) in &power.words {
        for (k, wd) in ws.iter().enumerate() {
            let word: Vec<usize> = wd.iter().map(global).collect();
            // top copy 1[a1|…|ai] sits after the desuspended copy in degree d
            position.insert(Cell { head: None, word: word.clone() }, (*d, wdim(d + 1) + k));
            position.insert(Cell { head: Some(word[0]), word: word[1..].to_vec() }, (d - 1, k));
        }
    }
    let mut weight = BTreeMap::new();
    for d in complex.space().degrees() {
        let below = wdim(d + 1);
        let ws: Vec<Option<u32>> = (0..complex.dim(d))
            .map(|k| if k < below { weight_of(&power.words[&(d + 1)][k]) } else { weight_of(&power.words[&d][k - below]) })
            .collect();
        weight.insert(d, ws);
    }
    Ok(LayerModel { complex, position, weight })
}

#[derive(Clone, Debug, Serialize)]
pub struct LayerReport {
    pub cardinality: usize,
    pub cyclic: HomologyTable,
    pub model: HomologyTable,
    pub cyclic_by_weight: BTreeMap<u32, HomologyTable>,
    pub model_by_weight: BTreeMap<u32, HomologyTable>,
    /// Whether the associated graded differential equals the model
    /// differential entry by entry under the basis bijection.
    pub matrix_agrees: bool,
}

fn by_weight<S: Scalar>(
    cx: &ChainComplex<S>,
    weight: impl Fn(i64, usize) -> Option<u32>,
    weights: impl IntoIterator<Item = u32>,
    w: &TruncationWindow,
) -> Result<BTreeMap<u32, HomologyTable>> {
    let mut out = BTreeMap::new();
    for wt in weights {
        let (piece, _) = cx.restrict(|d, k| weight(d, k) == Some(wt))?;
        out.insert(wt, piece.with_known(DegreeRange::ALL).homology(w)?);
    }
    Ok(out)
}

/// Homology of cardinality layer `i` of the cyclic bar complex, checked
/// against the two-term cyclic model.
pub fn cardinality_layer<S: Scalar>(a: &DGAlgebra<S>, i: usize, w: &TruncationWindow) -> Result<LayerReport> {
    cardinality_layer_with(a, i, w, false)
}

/// As [`cardinality_layer`]; `flip_rotation` negates the rotation sign of
/// the model, which must then be reported as a mismatch.
#[doc(hidden)]
pub fn cardinality_layer_with<S: Scalar>(a: &DGAlgebra<S>, i: usize, w: &TruncationWindow, flip_rotation: bool) -> Result<LayerReport> {
    let cx = cyclic_bar(a, w)?;
    let (graded, kept) = cx.cardinality_piece(i, None)?;
    let known = cx.complex.known();
    let cell_at = |d: i64, k: usize| cx.cell(d, kept[&d][k]);
    let exact_weights: Vec<u32> = match cx.weight_exact {
        Some(e) => cx.aux_weights().into_iter().filter(|x| *x <= e).collect(),
        None => Vec::new(),
    };
    let cyclic_by_weight = by_weight(&graded, |d, k| cx.aux.get(cell_at(d, k)).copied(), exact_weights.clone(), w)?;
    let cyclic = graded.homology(w)?;

    let (model, model_by_weight, matrix_agrees) = if i == 0 {
        let point: ChainComplex<S> = ChainComplex::point(0, "1");
        let agrees = graded.space().dims() == point.space().dims() && graded.differential().is_zero();
        let mbw = if exact_weights.contains(&0) { BTreeMap::from([(0, point.homology(w)?)]) } else { BTreeMap::new() };
        (point.homology(w)?, mbw, agrees)
    } else {
        let lm = layer_model(a, i, &cx, flip_rotation)?;
        let agrees = matrices_agree(&graded, &cell_at, &lm);
        let model = lm.complex.clone().with_known(known).homology(w)?;
        let mbw = by_weight(&lm.complex, |d, k| lm.weight[&d][k], exact_weights, w)?;
        (model, mbw, agrees)
    };
    let report = LayerReport { cardinality: i, cyclic, model, cyclic_by_weight, model_by_weight, matrix_agrees };
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    for (d, r) in &report.cyclic {
        let m = report.model[d];
        if r.reliable && m.reliable {
            left.insert(d.to_string(), r.dim);
            right.insert(d.to_string(), m.dim);
        }
    }
    for (wt, t) in &report.cyclic_by_weight {
        for (d, r) in t {
            left.insert(format!("{wt}:{d}"), r.dim);
            right.insert(format!("{wt}:{d}"), report.model_by_weight.get(wt).map_or(0, |m| m[d].dim));
        }
    }
    if left != right || !report.matrix_agrees {
        left.insert("matrix".into(), 1);
        right.insert("matrix".into(), usize::from(report.matrix_agrees));
        return Err(Error::LayerMismatch {
            layer: i,
            tables: TablePair { left_name: "cyclic bar".into(), left, right_name: "cyclic model".into(), right },
        });
    }
    Ok(report)
}

fn matrices_agree<'c, S: Scalar>(
    graded: &ChainComplex<S>,
    cell_at: &impl Fn(i64, usize) -> &'c Cell,
    lm: &LayerModel<S>,
) -> bool {
    for d in graded.space().degrees() {
        for k in 0..graded.dim(d) {
            let Some(&(md, mk)) = lm.position.get(cell_at(d, k)) else { return false };
            if md != d {
                return false;
            }
            let mine: Option<BTreeMap<usize, S>> = graded
                .d_of(d, k)
                .into_iter()
                .map(|(r, c)| lm.position.get(cell_at(d - 1, r)).map(|p| (p.1, c)))
                .collect();
            let Some(mine) = mine else { return false };
            let targets: std::collections::HashSet<usize> =
                (0..graded.dim(d - 1)).filter_map(|r| lm.position.get(cell_at(d - 1, r)).map(|p| p.1)).collect();
            let theirs: BTreeMap<usize, S> = lm.complex.d_of(md, mk).into_iter().filter(|(r, _)| targets.contains(r)).collect();
            if mine != theirs {
                return false;
            }
        }
    }
    true
}

/// Per-weight dims of `⊕_i cone(1 − t_i)` on `V^{⊗i}`, the direct-sum
/// formula for the free algebra on `v` over the circle.
pub fn free_calculation_model<S: Scalar>(v: &GradedSpace, w: &TruncationWindow, flip_rotation: bool) -> Result<BTreeMap<u32, HomologyTable>> {
    let vc: ChainComplex<S> = ChainComplex::from_space(v.clone());
    let mut out = BTreeMap::new();
    out.insert(0, ChainComplex::<S>::point(0, "1").homology(w)?);
    for i in 1..=w.weight_cap {
        let power = tensor_power(&vc, i, |_, _, _| true)?;
        let model = rotation_cone(&power, false, flip_rotation)?;
        out.insert(i as u32, model.homology(w)?);
    }
    Ok(out)
}

/// Free-algebra calculation, checked against Hochschild homology of the
/// (weight-capped) free algebra on `v` weight by weight.
pub fn free_calculation<S: Scalar>(v: &GradedSpace, w: &TruncationWindow) -> Result<BTreeMap<u32, HomologyTable>> {
    free_calculation_with::<S>(v, w, false)
}

#[doc(hidden)]
pub fn free_calculation_with<S: Scalar>(v: &GradedSpace, w: &TruncationWindow, flip_rotation: bool) -> Result<BTreeMap<u32, HomologyTable>> {
    let model = free_calculation_model::<S>(v, w, flip_rotation)?;
    let a = free_algebra(&ChainComplex::<S>::from_space(v.clone()), w)?;
    let hh = hochschild_homology(&a, w)?;
    let flatten = |m: &BTreeMap<u32, HomologyTable>| -> BTreeMap<String, usize> {
        m.iter().flat_map(|(wt, t)| t.iter().map(move |(d, r)| (format!("{wt}:{d}"), r.dim))).collect()
    };
    let left = flatten(&model);
    let right = flatten(&hh.by_weight);
    let keys: std::collections::BTreeSet<&String> = left.keys().chain(right.keys()).collect();
    if keys.iter().any(|k| left.get(*k).copied().unwrap_or(0) != right.get(*k).copied().unwrap_or(0)) {
        return Err(Error::FreeCalcMismatch {
            tables: TablePair { left_name: "free calculation".into(), left, right_name: "HH(free)".into(), right },
        });
    }
    Ok(model)
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerReport {
    pub stage: usize,
    /// Sum of the weights `≤ stage`.
    pub truncation: BTreeMap<i64, usize>,
    /// Sum of the weights `stage < j ≤ cap`.
    pub tail: BTreeMap<i64, usize>,
    /// Lowest nonzero degree of each weight `j ≥ 1`.
    pub lowest: BTreeMap<u32, Option<i64>>,
    /// For connected `v`: whether weight `j` starts in degree `≥ j` for all `j`.
    pub convergence: Option<bool>,
}

/// Stage `i` of the Goodwillie tower of the free algebra over the circle.
pub fn goodwillie_truncation_free<S: Scalar>(v: &GradedSpace, i: usize, w: &TruncationWindow) -> Result<TowerReport> {
    let tables = free_calculation::<S>(v, w)?;
    let mut truncation = BTreeMap::new();
    let mut tail = BTreeMap::new();
    let mut lowest = BTreeMap::new();
    for (wt, t) in &tables {
        let target = if (*wt as usize) <= i { &mut truncation } else { &mut tail };
        for (d, r) in t {
            *target.entry(*d).or_insert(0) += r.dim;
        }
        if *wt >= 1 {
            lowest.insert(*wt, t.iter().find(|(_, r)| r.dim > 0).map(|(d, _)| *d));
        }
    }
    let connected = v.min_degree().is_none_or(|m| m >= 1);
    let convergence = connected.then(|| lowest.iter().all(|(j, low)| low.is_none_or(|d| d >= i64::from(*j))));
    Ok(TowerReport { stage: i, truncation: support(&truncation), tail: support(&tail), lowest, convergence })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OneManifold {
    Line,
    Circle,
    Interval,
}

impl OneManifold {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "line" => Ok(OneManifold::Line),
            "circle" => Ok(OneManifold::Circle),
            "interval" => Ok(OneManifold::Interval),
            _ => Err(Error::InvalidInput(format!("unknown manifold {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfReport {
    pub cardinality: usize,
    pub manifold: OneManifold,
    pub dims: BTreeMap<i64, usize>,
    pub action: String,
}

fn factorial(n: usize) -> Result<usize> {
    (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k)).ok_or(Error::CapExceeded { cap: n, context: "factorial overflows".into() })
}

/// Homology of the ordered configuration space of `i` points: `i!`
/// contractible components on the line, `(i−1)!` circles on the circle.
pub fn conf_homology(i: usize, m: OneManifold) -> Result<ConfReport> {
    if i == 0 {
        return Err(Error::InvalidInput("configuration spaces need at least one point".into()));
    }
    let (dims, action) = match m {
        OneManifold::Line | OneManifold::Interval => {
            (BTreeMap::from([(0, factorial(i)?)]), "free Σ_i action permuting the orderings".to_string())
        }
        OneManifold::Circle => {
            let k = factorial(i - 1)?;
            (
                BTreeMap::from([(0, k), (1, k)]),
                format!("cyclic rotation t_{i} on weight-{i} words, sign (-1)^((|a_{i}|+1)·Σ_{{j<{i}}}(|a_j|+1))"),
            )
        }
    };
    Ok(ConfReport { cardinality: i, manifold: m, dims, action })
}

fn cells_of<S: Scalar>(m: OneManifold, relative: bool) -> ChainComplex<S> {
    let mut s = GradedSpace::new();
    match (m, relative) {
        (OneManifold::Circle, _) => {
            s.push(0, "v".into()).expect("fresh label");
            s.push(1, "c".into()).expect("fresh label");
            ChainComplex::from_space(s)
        }
        (_, true) => ChainComplex::point(1, "c"),
        (_, false) => {
            s.push(0, "v0".into()).expect("fresh label");
            s.push(0, "v1".into()).expect("fresh label");
            s.push(1, "c".into()).expect("fresh label");
            ChainComplex::from_images(s, DegreeRange::ALL, |d, _| {
                if d == 1 {
                    vec![(0, -S::one()), (1, S::one())]
                } else {
                    Vec::new()
                }
            })
            .expect("interval boundary squares to zero")
        }
    }
}

/// Poincaré duality with coefficients in a chain complex: `C_*(M; e)`
/// against `C_*(M, ∂M; e^∨)[−1]`, paired in opposite degrees.
pub fn additive_factorization<S: Scalar>(m: OneManifold, e: &ChainComplex<S>) -> Result<DualityReport> {
    if m == OneManifold::Line {
        return Err(Error::InvalidInput("additive duality is computed for the circle and the closed interval".into()));
    }
    let reach = e.space().min_degree().unwrap_or(0).abs().max(e.space().max_degree().unwrap_or(0).abs()) + 2;
    let w = TruncationWindow::new(-reach, reach, 0)?;
    let left = tensor(&cells_of::<S>(m, false), e, &w)?;
    let right = tensor(&cells_of::<S>(m, true), &shift(&dual(e), -1), &w)?;
    let name = match m {
        OneManifold::Circle => "circle",
        _ => "interval",
    };
    let mut report = DualityReport::compare(
        &format!("C_*({name}; e)"),
        &format!("C_*({name}, ∂; e^∨)[-1]"),
        &w,
        Pairing::Dual,
        &left.homology(&w)?,
        &right.homology(&w)?,
    );
    report.finish();
    Ok(report)
}

/// Homology table with every row reliable, from plain dims.
pub fn exact_table(dims: &BTreeMap<i64, usize>, w: &TruncationWindow) -> HomologyTable {
    w.degrees().map(|d| (d, HomologyRow { dim: dims.get(&d).copied().unwrap_or(0), reliable: true })).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ground, sym_algebra, trivial_algebra};
    use crate::graded::reliable_dims;
    use crate::harness::Verdict;
    use crate::scalar::{Rational, F5};

    type Q = Rational;

    fn gens<S: Scalar>(degs: &[i64]) -> ChainComplex<S> {
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
    fn ground_field() {
        let w = win(-4, 4, 3);
        let hh = hochschild_homology(&ground::<Q>(), &w).unwrap();
        assert_eq!(support(&reliable_dims(&hh.totals)), BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn exterior_algebra_has_one_class_per_degree() {
        let w = win(-2, 12, 6);
        let a = trivial_algebra(&gens::<Q>(&[1])).unwrap();
        let cx = cyclic_bar(&a, &w).unwrap();
        assert!(cx.complex.differential().is_zero());
        let hh = hochschild_homology(&a, &w).unwrap();
        for d in 0..=12 {
            assert_eq!(hh.totals[&d].dim, 1, "degree {d}");
            assert!(hh.totals[&d].reliable);
        }
        for wt in 1..=6u32 {
            let s = support(&crate::graded::all_dims(&hh.by_weight[&wt]));
            let w2 = 2 * i64::from(wt);
            assert_eq!(s, BTreeMap::from([(w2 - 1, 1), (w2, 1)]));
        }
    }

    #[test]
    fn polynomial_on_negative_even_class() {
        let w = win(-12, 2, 6);
        let a = sym_algebra(&gens::<Q>(&[-2]), &w).unwrap();
        let hh = hochschild_homology(&a, &w).unwrap();
        for d in -11..=0 {
            assert_eq!(hh.totals[&d].dim, 1, "degree {d}");
        }
        // cells of weight 7 such as 1[y|…|y] in degree −7 are kept; only y^7,
        // in degree −14, is missing from the algebra
        let stale: Vec<i64> = hh.totals.iter().filter(|(_, r)| !r.reliable).map(|(d, _)| *d).collect();
        assert_eq!(stale, vec![-12]);
        for wt in 1..=6u32 {
            let s = support(&crate::graded::all_dims(&hh.by_weight[&wt]));
            let w2 = -2 * i64::from(wt);
            assert_eq!(s, BTreeMap::from([(w2, 1), (w2 + 1, 1)]));
        }
    }

    #[test]
    fn hochschild_differential_squares_to_zero_on_nontrivial_products() {
        let w = win(-12, 12, 4);
        for a in [free_algebra(&gens::<Q>(&[1, 2]), &w).unwrap(), sym_algebra(&gens::<Q>(&[-2, -3]), &w).unwrap()] {
            // assembly rejects d∘d ≠ 0
            let cx = cyclic_bar(&a, &w).unwrap();
            assert!(!cx.d_structural.is_zero());
        }
    }

    #[test]
    fn layer_one_is_two_copies() {
        let w = win(-6, 10, 4);
        let a = trivial_algebra(&gens::<Q>(&[2, 3])).unwrap();
        let r = cardinality_layer(&a, 1, &w).unwrap();
        assert_eq!(support(&crate::graded::all_dims(&r.cyclic)), BTreeMap::from([(2, 1), (3, 2), (4, 1)]));
    }

    #[test]
    fn layers_match_model_on_free_algebras() {
        let w = win(-2, 12, 5);
        for degs in [vec![1], vec![2], vec![1, 2]] {
            let a = free_algebra(&gens::<Q>(&degs), &w).unwrap();
            for i in 0..=5 {
                let r = cardinality_layer(&a, i, &w).unwrap();
                assert!(r.matrix_agrees);
            }
        }
    }

    #[test]
    fn flipped_rotation_is_detected() {
        let w = win(-2, 12, 4);
        let a = free_algebra(&gens::<Q>(&[1]), &w).unwrap();
        let err = cardinality_layer_with(&a, 2, &w, true).unwrap_err();
        assert!(matches!(err, Error::LayerMismatch { layer: 2, .. }));
        let err = free_calculation_with::<Q>(&gens::<Q>(&[1]).space().clone(), &w, true).unwrap_err();
        assert!(err.is_mismatch());
    }

    #[test]
    fn free_calculation_odd_generator() {
        let w = win(-2, 12, 5);
        let v = GradedSpace::line(1, "v");
        let t = free_calculation::<Q>(&v, &w).unwrap();
        for (wt, table) in &t {
            let s = support(&crate::graded::all_dims(table));
            let expected = match wt {
                0 => BTreeMap::from([(0, 1)]),
                k if k % 2 == 1 => BTreeMap::from([(i64::from(*k), 1), (i64::from(*k) + 1, 1)]),
                _ => BTreeMap::new(),
            };
            assert_eq!(s, expected, "weight {wt}");
        }
    }

    #[test]
    fn free_calculation_even_generator_weight_two() {
        let w = win(-2, 14, 3);
        let t = free_calculation::<Q>(&GradedSpace::line(2, "v"), &w).unwrap();
        assert_eq!(support(&crate::graded::all_dims(&t[&2])), BTreeMap::from([(4, 1), (5, 1)]));
    }

    #[test]
    fn free_calculation_in_characteristic_two_classes() {
        // over F5 rotation eigenvalues stay distinct from 1 as over Q
        let w = win(-2, 12, 4);
        let t = free_calculation::<F5>(&GradedSpace::line(1, "v"), &w).unwrap();
        assert!(support(&crate::graded::all_dims(&t[&2])).is_empty());
    }

    #[test]
    fn tower_partial_sums() {
        let w = win(-2, 12, 5);
        let r = goodwillie_truncation_free::<Q>(&GradedSpace::line(1, "v"), 2, &w).unwrap();
        assert_eq!(r.truncation, BTreeMap::from([(0, 1), (1, 1), (2, 1)]));
        assert_eq!(r.tail, BTreeMap::from([(3, 1), (4, 1), (5, 1), (6, 1)]));
        assert_eq!(r.convergence, Some(true));
    }

    #[test]
    fn conf_counts() {
        assert_eq!(conf_homology(1, OneManifold::Circle).unwrap().dims, BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(conf_homology(2, OneManifold::Line).unwrap().dims, BTreeMap::from([(0, 2)]));
        assert_eq!(conf_homology(3, OneManifold::Circle).unwrap().dims, BTreeMap::from([(0, 2), (1, 2)]));
        assert!(conf_homology(0, OneManifold::Circle).is_err());
    }

    #[test]
    fn additive_duality_examples() {
        for n in [0, 3] {
            let e: ChainComplex<Q> = ChainComplex::point(n, "e");
            let r = additive_factorization(OneManifold::Circle, &e).unwrap();
            assert_eq!(r.verdict, Verdict::VerifiedInWindow);
            assert_eq!(support(&r.left_dims()), BTreeMap::from([(n, 1), (n + 1, 1)]));
            let r = additive_factorization(OneManifold::Interval, &e).unwrap();
            assert_eq!(r.verdict, Verdict::VerifiedInWindow);
        }
    }

    #[test]
    fn convergence_probe_on_connected_examples() {
        let w = win(-2, 14, 5);
        for a in [trivial_algebra(&gens::<Q>(&[1])).unwrap(), free_algebra(&gens::<Q>(&[1, 2]), &w).unwrap()] {
            for (i, low) in convergence_probe(&a, &w).unwrap() {
                assert!(low.is_none_or(|d| d >= i64::from(i)), "{}: weight {i} starts at {low:?}", a.name);
            }
        }
    }
}
