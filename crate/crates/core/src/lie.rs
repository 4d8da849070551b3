//! DG Lie algebras, their Chevalley–Eilenberg cochains, enveloping algebras
//! and Maurer–Cartan equations over Artin local bases.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::algebra::{sym_algebra, AlgebraParts, BasisElement, Certificate, DGAlgebra, Origin, ValidationReport};
use crate::error::{Error, Result};
use crate::graded::{dual_label, parity_sign, ChainComplex, DegreeRange, GradedSpace, TruncationWindow};
use crate::linalg::{canonical_vec, kernel_basis, rank, SparseMatrix, SparseVec};
use crate::scalar::{FieldSpec, Scalar};

#[derive(Clone, Debug)]
pub struct LieParts<S> {
    pub name: String,
    pub basis: Vec<(String, i64)>,
    pub differential: Vec<SparseVec<S>>,
    /// `[x_i, x_j]`; the opposite order is filled in by antisymmetry.
    pub bracket: BTreeMap<(usize, usize), SparseVec<S>>,
}

#[derive(Clone, Debug)]
pub struct DGLieAlgebra<S> {
    pub name: String,
    basis: Vec<(String, i64)>,
    index: HashMap<String, usize>,
    differential: Vec<SparseVec<S>>,
    bracket: BTreeMap<(usize, usize), SparseVec<S>>,
}

fn add_into<S: Scalar>(acc: &mut BTreeMap<usize, S>, v: &[(usize, S)], scale: &S) {
    for (i, c) in v {
        let e = acc.entry(*i).or_insert_with(S::zero);
        *e = e.clone() + scale.clone() * c.clone();
    }
}

fn finish<S: Scalar>(acc: BTreeMap<usize, S>) -> SparseVec<S> {
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

impl<S: Scalar> DGLieAlgebra<S> {
    pub fn from_parts(parts: LieParts<S>) -> Result<Self> {
        let n = parts.basis.len();
        let mut index = HashMap::new();
        for (i, (l, _)) in parts.basis.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::ValidationError(format!("duplicate label {l}")));
            }
        }
        if parts.differential.len() != n {
            return Err(Error::ShapeMismatch(format!("{} differentials for {n} basis elements", parts.differential.len())));
        }
        let deg = |i: usize| parts.basis[i].1;
        for (i, dv) in parts.differential.iter().enumerate() {
            if let Some((j, _)) = dv.iter().find(|(j, _)| *j >= n || deg(*j) != deg(i) - 1) {
                return Err(Error::ValidationError(format!("d({}) has a term of the wrong degree (index {j})", parts.basis[i].0)));
            }
        }
        let mut bracket = BTreeMap::new();
        for ((i, j), v) in &parts.bracket {
            if *i >= n || *j >= n {
                return Err(Error::ShapeMismatch("bracket index out of range".into()));
            }
            if let Some((k, _)) = v.iter().find(|(k, _)| *k >= n || deg(*k) != deg(*i) + deg(*j)) {
                return Err(Error::ValidationError(format!(
                    "[{}, {}] has a term of the wrong degree (index {k})",
                    parts.basis[*i].0, parts.basis[*j].0
                )));
            }
            bracket.insert((*i, *j), canonical_vec(v.iter().cloned()));
        }
        for ((i, j), v) in &parts.bracket {
            if !parts.bracket.contains_key(&(*j, *i)) {
                let sign: S = -parity_sign::<S>(deg(*i) * deg(*j));
                bracket.insert((*j, *i), v.iter().map(|(k, c)| (*k, sign.clone() * c.clone())).collect());
            }
        }
        bracket.retain(|_, v: &mut SparseVec<S>| !v.is_empty());
        Ok(DGLieAlgebra { name: parts.name, basis: parts.basis, index, differential: parts.differential, bracket })
    }

    /// Abelian Lie algebra on a complex.
    pub fn abelian(v: &ChainComplex<S>) -> Result<Self> {
        let mut basis = Vec::new();
        let mut offset = BTreeMap::new();
        for d in v.space().degrees() {
            offset.insert(d, basis.len());
            for l in v.space().labels(d) {
                basis.push((l.clone(), d));
            }
        }
        let mut differential = Vec::new();
        for d in v.space().degrees() {
            for i in 0..v.dim(d) {
                let base = offset.get(&(d - 1)).copied().unwrap_or(0);
                differential.push(v.d_of(d, i).into_iter().map(|(j, c)| (base + j, c)).collect());
            }
        }
        Self::from_parts(LieParts { name: "abelian".into(), basis, differential, bracket: BTreeMap::new() })
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].0
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].1
    }

    pub fn lookup(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn d(&self, i: usize) -> &SparseVec<S> {
        &self.differential[i]
    }

    pub fn bracket(&self, i: usize, j: usize) -> SparseVec<S> {
        self.bracket.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn bracket_table(&self) -> &BTreeMap<(usize, usize), SparseVec<S>> {
        &self.bracket
    }

    pub fn is_abelian(&self) -> bool {
        self.bracket.is_empty()
    }

    fn bracket_vec(&self, x: &[(usize, S)], y: &[(usize, S)]) -> SparseVec<S> {
        let mut acc = BTreeMap::new();
        for (i, a) in x {
            for (j, b) in y {
                add_into(&mut acc, &self.bracket(*i, *j), &(a.clone() * b.clone()));
            }
        }
        finish(acc)
    }

    fn d_vec(&self, x: &[(usize, S)]) -> SparseVec<S> {
        let mut acc = BTreeMap::new();
        for (i, a) in x {
            add_into(&mut acc, &self.differential[*i], a);
        }
        finish(acc)
    }

    pub fn complex(&self) -> Result<ChainComplex<S>> {
        let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, (_, d)) in self.basis.iter().enumerate() {
            by_degree.entry(*d).or_default().push(i);
        }
        let mut pos = vec![0; self.dim()];
        let mut space = GradedSpace::new();
        for (d, idx) in &by_degree {
            for &i in idx {
                pos[i] = space.push(*d, self.basis[i].0.clone())?;
            }
        }
        ChainComplex::from_images(space, DegreeRange::ALL, |d, k| {
            self.differential[by_degree[&d][k]].iter().map(|(j, c)| (pos[*j], c.clone())).collect()
        })
    }

    /// Whether every basis element sits in degree `≥ 1`.
    pub fn is_connected(&self) -> bool {
        self.basis.iter().all(|(_, d)| *d >= 1)
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let deg = |i: usize| self.degree(i);
        let e = |i: usize| -> SparseVec<S> { vec![(i, S::one())] };
        let mut report = ValidationReport::default();
        let mut square = Vec::new();
        for i in 0..n {
            if !self.d_vec(&self.differential[i]).is_empty() {
                square.push(format!("d² ≠ 0 on {}", self.label(i)));
            }
        }
        let mut antisym = Vec::new();
        let mut derivation = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let sign: S = -parity_sign::<S>(deg(i) * deg(j));
                let flipped: SparseVec<S> = self.bracket(j, i).into_iter().map(|(k, c)| (k, sign.clone() * c)).collect();
                if self.bracket(i, j) != canonical_vec(flipped) {
                    antisym.push(format!("[{}, {}]", self.label(i), self.label(j)));
                }
                let lhs = self.d_vec(&self.bracket(i, j));
                let mut acc = BTreeMap::new();
                add_into(&mut acc, &self.bracket_vec(self.d(i), &e(j)), &S::one());
                add_into(&mut acc, &self.bracket_vec(&e(i), self.d(j)), &parity_sign(deg(i)));
                if lhs != finish(acc) {
                    derivation.push(format!("d[{}, {}]", self.label(i), self.label(j)));
                }
            }
        }
        let mut jacobi = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    // [x,[y,z]] = [[x,y],z] + (−1)^{|x||y|} [y,[x,z]]
                    let lhs = self.bracket_vec(&e(i), &self.bracket(j, k));
                    let mut acc = BTreeMap::new();
                    add_into(&mut acc, &self.bracket_vec(&self.bracket(i, j), &e(k)), &S::one());
                    add_into(&mut acc, &self.bracket_vec(&e(j), &self.bracket(i, k)), &parity_sign(deg(i) * deg(j)));
                    if lhs != finish(acc) {
                        jacobi.push(format!("({}, {}, {})", self.label(i), self.label(j), self.label(k)));
                    }
                }
            }
        }
        for (name, f) in [("d-squared", square), ("antisymmetry", antisym), ("derivation", derivation), ("jacobi", jacobi)] {
            report.checks.insert(name.into(), f.is_empty());
            report.failures.extend(f.into_iter().map(|x| format!("{name}: {x}")));
        }
        report
    }

    pub fn validated(self) -> Result<Self> {
        let r = self.validate();
        if r.is_ok() {
            Ok(self)
        } else {
            Err(Error::ValidationError(r.failures.join("; ")))
        }
    }
}

/// Chevalley–Eilenberg cochains `Sym(𝔤^∨[−1])`, truncated at polynomial
/// weight `w.weight_cap`.
///
/// The differential is fixed by asking the canonical element
/// `X = Σ ξ^i ⊗ x_i` (degree −1 in `C*𝔤 ⊗ 𝔤`) to satisfy the Maurer–Cartan
/// equation `dX + ½[X, X] = 0`, with `d(a⊗x) = da⊗x + (−1)^{|a|} a⊗dx` and
/// `[a⊗x, b⊗y] = (−1)^{|x||b|} ab⊗[x,y]`. Reading off the coefficient of
/// `x_k`:
///
/// ```text
/// dξ^k = −Σ_l (−1)^{|ξ^l|} D_{kl} ξ^l − ½ Σ_{i,j} (−1)^{|x_i||ξ^j|} f^k_{ij} ξ^i ξ^j
/// ```
///
/// where `d x_l = Σ_k D_{kl} x_k` and `[x_i, x_j] = Σ_k f^k_{ij} x_k`. For the
/// abelian `x, y, z` in degree 1 this is zero; for `[x,y] = z` in degrees
/// 1, 1, 2 it gives `dζ = −½(ξη + (−1)^{1·(−2)} ηξ)·1 = −ξη` with `|ξ| = |η| = −2`.
pub fn ce_cochains<S: Scalar>(g: &DGLieAlgebra<S>, w: &TruncationWindow) -> Result<DGAlgebra<S>> {
    S::field().require_inverses_up_to(2, "Chevalley–Eilenberg cochains")?;
    let mut space = GradedSpace::new();
    for i in 0..g.dim() {
        space.push(-g.degree(i) - 1, dual_label(g.label(i)))?;
    }
    let sym = sym_algebra(&ChainComplex::<S>::from_space(space), w)?;
    let gen: Vec<usize> = (0..g.dim()).map(|i| sym.lookup(&dual_label(g.label(i))).expect("generator present")).collect();
    let xi_deg = |i: usize| -g.degree(i) - 1;
    let half = S::one() / S::from_i64(2);
    let mut dgen: Vec<BTreeMap<usize, S>> = vec![BTreeMap::new(); g.dim()];
    for l in 0..g.dim() {
        let sign: S = -parity_sign::<S>(xi_deg(l));
        for (k, c) in g.d(l) {
            add_into(&mut dgen[*k], &[(gen[l], c.clone())], &sign);
        }
    }
    let mut quadratic = false;
    for ((i, j), v) in g.bracket_table() {
        let prod = sym.mul(gen[*i], gen[*j]);
        let sign: S = -parity_sign::<S>(g.degree(*i) * xi_deg(*j)) * half.clone();
        for (k, c) in v {
            add_into(&mut dgen[*k], &prod, &(sign.clone() * c.clone()));
            quadratic |= !prod.is_empty();
        }
    }
    let dgen: Vec<SparseVec<S>> = dgen.into_iter().map(finish).collect();
    // extend as a derivation, by increasing weight
    let n = sym.dim();
    let mut d: Vec<Option<SparseVec<S>>> = vec![None; n];
    d[sym.unit()] = Some(Vec::new());
    for (i, gi) in gen.iter().enumerate() {
        d[*gi] = Some(dgen[i].clone());
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|m| sym.weight(*m).unwrap_or(0));
    for m in order {
        if d[m].is_some() {
            continue;
        }
        let (gi, rest, c) = gen
            .iter()
            .find_map(|gi| {
                (0..n).find_map(|r| match sym.mul(*gi, r).as_slice() {
                    [(t, c)] if *t == m && d[r].is_some() && r != sym.unit() => Some((*gi, r, c.clone())),
                    _ => None,
                })
            })
            .ok_or_else(|| Error::ValidationError(format!("monomial {} has no factorization", sym.label(m))))?;
        let mut acc = BTreeMap::new();
        add_into(&mut acc, &sym.mul_vec(&d[gi].clone().unwrap_or_default(), &[(rest, S::one())]), &S::one());
        add_into(&mut acc, &sym.mul_vec(&[(gi, S::one())], d[rest].as_ref().expect("lower weight first")), &parity_sign(sym.degree(gi)));
        let inv = S::one() / c;
        d[m] = Some(finish(acc).into_iter().map(|(k, x)| (k, x * inv.clone())).collect());
    }
    let mut parts: AlgebraParts<S> = sym.to_parts();
    parts.differential = d.into_iter().map(|x| x.unwrap_or_default()).collect();
    parts.name = format!("C*({})", g.name);
    parts.origin = Origin::Cochains;
    if quadratic {
        // the bracket part raises polynomial weight, so weight is only a filtration
        for b in parts.basis.iter_mut() {
            b.weight = None;
        }
        parts.weight_exact = None;
    }
    let alg = DGAlgebra::from_parts(parts)?;
    let c = alg.detect_certificate();
    Ok(alg.with_certificate(c))
}

/// Ordered PBW word, letters nondecreasing, odd letters at most once.
type Word = Vec<usize>;

/// PBW straightening for `U𝔤`.
struct Straightener<'g, S> {
    g: &'g DGLieAlgebra<S>,
    memo: HashMap<Word, Vec<(Word, S)>>,
}

impl<'g, S: Scalar> Straightener<'g, S> {
    fn new(g: &'g DGLieAlgebra<S>) -> Self {
        Straightener { g, memo: HashMap::new() }
    }

    fn odd(&self, i: usize) -> bool {
        self.g.degree(i).rem_euclid(2) == 1
    }

    /// Normal form of an arbitrary word as a combination of PBW words.
    fn normal(&mut self, word: &[usize]) -> Vec<(Word, S)> {
        if let Some(v) = self.memo.get(word) {
            return v.clone();
        }
        let bad = word.windows(2).position(|p| p[0] > p[1] || (p[0] == p[1] && self.odd(p[0])));
        let result = match bad {
            None => vec![(word.to_vec(), S::one())],
            Some(k) => {
                let (y, x) = (word[k], word[k + 1]);
                let mut acc: BTreeMap<Word, S> = BTreeMap::new();
                let push = |acc: &mut BTreeMap<Word, S>, terms: Vec<(Word, S)>, scale: S| {
                    for (wd, c) in terms {
                        let e = acc.entry(wd).or_insert_with(S::zero);
                        *e = e.clone() + scale.clone() * c;
                    }
                };
                if y == x {
                    // x x = ½ [x, x] for odd x
                    let half = S::one() / S::from_i64(2);
                    for (z, c) in self.g.bracket(x, x) {
                        let mut wd = word[..k].to_vec();
                        wd.push(z);
                        wd.extend_from_slice(&word[k + 2..]);
                        let t = self.normal(&wd);
                        push(&mut acc, t, half.clone() * c);
                    }
                } else {
                    // y x = (−1)^{|x||y|} x y + [y, x]
                    let mut swapped = word.to_vec();
                    swapped.swap(k, k + 1);
                    let t = self.normal(&swapped);
                    push(&mut acc, t, parity_sign(self.g.degree(x) * self.g.degree(y)));
                    for (z, c) in self.g.bracket(y, x) {
                        let mut wd = word[..k].to_vec();
                        wd.push(z);
                        wd.extend_from_slice(&word[k + 2..]);
                        let t = self.normal(&wd);
                        push(&mut acc, t, c);
                    }
                }
                acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
            }
        };
        self.memo.insert(word.to_vec(), result.clone());
        result
    }
}

/// Normal form of a word in `U𝔤` over ordered PBW monomials, by
/// straightening. Letters are basis indices of `g`.
pub fn pbw_normal_form<S: Scalar>(g: &DGLieAlgebra<S>, word: &[usize]) -> Result<Vec<(Vec<usize>, S)>> {
    if let Some(x) = word.iter().find(|x| **x >= g.dim()) {
        return Err(Error::InvalidInput(format!("letter {x} is not a basis index")));
    }
    if g.basis.iter().any(|(_, d)| d.rem_euclid(2) == 1) {
        S::field().require_inverses_up_to(2, "PBW straightening")?;
    }
    Ok(Straightener::new(g).normal(word))
}

fn pbw_label<S: Scalar>(g: &DGLieAlgebra<S>, m: &[usize]) -> String {
    if m.is_empty() {
        return "1".into();
    }
    let mut parts = Vec::new();
    let mut i = 0;
    while i < m.len() {
        let mut j = i;
        while j < m.len() && m[j] == m[i] {
            j += 1;
        }
        let l = g.label(m[i]);
        parts.push(if j - i == 1 { l.to_string() } else { format!("{l}^{}", j - i) });
        i = j;
    }
    parts.join("·")
}

/// PBW words of length `≤ max_len` (and degree `≤ max_degree` when given).
fn pbw_words<S: Scalar>(g: &DGLieAlgebra<S>, max_len: usize, max_degree: Option<i64>) -> Vec<Word> {
    let odd = |i: usize| g.degree(i).rem_euclid(2) == 1;
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(Word, i64)> = vec![(Vec::new(), 0)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (m, d) in &frontier {
            let start = m.last().copied().unwrap_or(0);
            for x in start..g.dim() {
                if m.last() == Some(&x) && odd(x) {
                    continue;
                }
                let nd = d + g.degree(x);
                if max_degree.is_some_and(|h| nd > h) {
                    continue;
                }
                let mut wd = m.clone();
                wd.push(x);
                next.push((wd, nd));
            }
        }
        if next.is_empty() {
            break;
        }
        out.extend(next.iter().map(|(m, _)| m.clone()));
        frontier = next;
    }
    out
}

/// `U𝔤` on the PBW basis. Abelian `𝔤` is truncated at word length `cap`;
/// connected `𝔤` at degree `cap · (lowest degree)`, which keeps every word
/// of length `≤ cap` in that range and drops an ideal.
pub fn enveloping<S: Scalar>(g: &DGLieAlgebra<S>, cap: usize) -> Result<DGAlgebra<S>> {
    if g.bracket_table().values().any(|v| !v.is_empty()) && g.basis.iter().any(|(_, d)| d.rem_euclid(2) == 1) {
        S::field().require_inverses_up_to(2, "enveloping algebra")?;
    }
    let abelian = g.is_abelian();
    let connected = g.is_connected();
    if !abelian && !connected {
        return Err(Error::CapExceeded {
            cap,
            context: format!("straightening in U({}) escapes any word-length truncation; only connected or abelian 𝔤 can be truncated", g.name),
        });
    }
    let min_deg = g.basis.iter().map(|(_, d)| *d).min().unwrap_or(1);
    let max_degree = (!abelian).then(|| cap as i64 * min_deg);
    let words = pbw_words(g, cap, max_degree);
    let index: HashMap<Word, usize> = words.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let complete = pbw_words(g, cap + 1, max_degree.map(|h| h + 1)).len() == words.len();
    let mut st = Straightener::new(g);
    let place = |terms: Vec<(Word, S)>| -> SparseVec<S> { canonical_vec(terms.into_iter().filter_map(|(m, c)| index.get(&m).map(|i| (*i, c)))) };
    let mut product = BTreeMap::new();
    for (i, a) in words.iter().enumerate().skip(1) {
        for (j, b) in words.iter().enumerate().skip(1) {
            let mut wd = a.clone();
            wd.extend_from_slice(b);
            if abelian && wd.len() > cap {
                continue;
            }
            let v = place(st.normal(&wd));
            if !v.is_empty() {
                product.insert((i, j), v);
            }
        }
    }
    let differential: Vec<SparseVec<S>> = words
        .iter()
        .map(|m| {
            let mut acc = BTreeMap::new();
            let mut prefix = 0;
            for k in 0..m.len() {
                let sign: S = parity_sign(prefix);
                for (h, c) in g.d(m[k]) {
                    let mut wd = m[..k].to_vec();
                    wd.push(*h);
                    wd.extend_from_slice(&m[k + 1..]);
                    add_into(&mut acc, &place(st.normal(&wd)), &(sign.clone() * c.clone()));
                }
                prefix += g.degree(m[k]);
            }
            finish(acc)
        })
        .collect();
    let basis = words
        .iter()
        .map(|m| BasisElement {
            label: pbw_label(g, m),
            degree: m.iter().map(|x| g.degree(*x)).sum(),
            weight: abelian.then_some(m.len() as u32),
        })
        .collect();
    let exact = if complete {
        DegreeRange::ALL
    } else if let Some(h) = max_degree {
        DegreeRange::at_most(h)
    } else {
        crate::algebra::weight_cap_exact_range(g.basis.iter().map(|(_, d)| *d), cap)
    };
    let alg = DGAlgebra::from_parts(AlgebraParts {
        name: format!("U({})", g.name),
        basis,
        unit: 0,
        differential,
        product,
        certificate: Certificate::None,
        exact,
        weight_exact: (abelian && !complete).then_some(cap as u32),
        origin: Origin::Enveloping,
    })?;
    let c = alg.detect_certificate();
    Ok(alg.with_certificate(c))
}

#[derive(Clone, Debug, Serialize)]
pub struct PbwRow {
    pub weight: u32,
    pub degree: i64,
    /// `dim F_w U / F_{w−1} U` in this degree.
    pub associated_graded: usize,
    pub symmetric: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PbwReport {
    pub rows: Vec<PbwRow>,
    pub matches: bool,
}

impl PbwReport {
    /// Total associated graded dimension per weight.
    pub fn weight_totals(&self) -> BTreeMap<u32, usize> {
        let mut out = BTreeMap::new();
        for r in &self.rows {
            *out.entry(r.weight).or_insert(0) += r.associated_graded;
        }
        out
    }
}

/// Compares `gr U𝔤` with `Sym 𝔤` weight by weight. `F_w U` is computed as
/// `T_{≤w} / I_{≤w}`, where `I_{≤w}` is spanned by `a·r·b` with `r` a
/// defining relation `x y − (−1)^{|x||y|} y x − [x,y]` and total length
/// `≤ w`, so the comparison does not assume the PBW basis.
pub fn pbw_check<S: Scalar>(g: &DGLieAlgebra<S>, cap: usize) -> Result<PbwReport> {
    S::field().require_inverses_up_to(cap.max(2) as u64, "PBW comparison")?;
    let n = g.dim();
    let deg = |wd: &[usize]| wd.iter().map(|x| g.degree(*x)).sum::<i64>();
    // all words of length ≤ cap, grouped by degree
    let mut words: Vec<Word> = vec![Vec::new()];
    let mut frontier: Vec<Word> = vec![Vec::new()];
    for _ in 0..cap {
        let next: Vec<Word> = frontier.iter().flat_map(|m| (0..n).map(move |x| [m.as_slice(), &[x]].concat())).collect();
        words.extend(next.iter().cloned());
        frontier = next;
    }
    let mut by_degree: BTreeMap<i64, Vec<&Word>> = BTreeMap::new();
    for wd in &words {
        by_degree.entry(deg(wd)).or_default().push(wd);
    }
    let pos: HashMap<&Word, usize> = by_degree.values().flat_map(|v| v.iter().enumerate().map(|(i, w)| (*w, i))).collect();
    // relation vectors a·r·b by total length and degree
    let mut relations: BTreeMap<(usize, i64), Vec<SparseVec<S>>> = BTreeMap::new();
    for a in &words {
        for b in &words {
            if a.len() + b.len() + 2 > cap {
                continue;
            }
            for x in 0..n {
                for y in 0..n {
                    let sign: S = parity_sign(g.degree(x) * g.degree(y));
                    let mut v = vec![(pos[&[a.as_slice(), &[x, y], b].concat()], S::one())];
                    v.push((pos[&[a.as_slice(), &[y, x], b].concat()], -sign));
                    for (z, c) in g.bracket(x, y) {
                        v.push((pos[&[a.as_slice(), &[z], b].concat()], -c));
                    }
                    let len = a.len() + b.len() + 2;
                    let d = deg(a) + deg(b) + g.degree(x) + g.degree(y);
                    relations.entry((len, d)).or_default().push(canonical_vec(v));
                }
            }
        }
    }
    let sym_in = {
        let mut space = GradedSpace::new();
        for i in 0..n {
            space.push(g.degree(i), g.label(i).to_string())?;
        }
        sym_algebra(&ChainComplex::<S>::from_space(space), &TruncationWindow::new(0, 0, cap)?)?
    };
    let mut sym_dims: BTreeMap<(u32, i64), usize> = BTreeMap::new();
    for b in sym_in.basis() {
        *sym_dims.entry((b.weight.unwrap_or(0), b.degree)).or_insert(0) += 1;
    }
    let mut rows = Vec::new();
    for (d, ws) in &by_degree {
        let mut prev = 0usize;
        for wt in 0..=cap {
            let span = ws.iter().filter(|x| x.len() <= wt).count();
            let rels: Vec<SparseVec<S>> =
                relations.iter().filter(|((l, dd), _)| *l <= wt && dd == d).flat_map(|(_, v)| v.iter().cloned()).collect();
            let r = if rels.is_empty() { 0 } else { rank(&SparseMatrix::from_columns(ws.len(), rels)?) };
            let filtered = span - r;
            let gr = filtered - prev;
            prev = filtered;
            let symmetric = sym_dims.get(&(wt as u32, *d)).copied().unwrap_or(0);
            if gr > 0 || symmetric > 0 {
                rows.push(PbwRow { weight: wt as u32, degree: *d, associated_graded: gr, symmetric });
            }
        }
    }
    rows.sort_by_key(|r| (r.weight, r.degree));
    let matches = rows.iter().all(|r| r.associated_graded == r.symmetric);
    Ok(PbwReport { rows, matches })
}

/// Commutative local `R = 𝕜 ⊕ m` in degree 0. The basis of `m` must be
/// adapted to its power filtration: each element has a stage `j` with
/// `t ∈ m^j ∖ m^{j+1}`, and `t_α t_β` has only terms of stage
/// `≥ stage(α) + stage(β)`.
#[derive(Clone, Debug)]
pub struct ArtinLocalBase<S> {
    pub labels: Vec<String>,
    pub stage: Vec<usize>,
    /// `t_α t_β` over the basis of `m`.
    pub product: BTreeMap<(usize, usize), SparseVec<S>>,
    pub nilpotency: usize,
}

impl<S: Scalar> ArtinLocalBase<S> {
    /// `𝕜[t]/t^k`.
    pub fn truncated_polynomial(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidInput("𝕜[t]/t^k needs k ≥ 1".into()));
        }
        let labels = (1..k).map(|j| if j == 1 { "t".into() } else { format!("t^{j}") }).collect();
        let stage = (1..k).collect();
        let mut product = BTreeMap::new();
        for a in 1..k {
            for b in 1..k {
                if a + b < k {
                    product.insert((a - 1, b - 1), vec![(a + b - 1, S::one())]);
                }
            }
        }
        Self::new(labels, stage, product)
    }

    pub fn new(labels: Vec<String>, stage: Vec<usize>, product: BTreeMap<(usize, usize), SparseVec<S>>) -> Result<Self> {
        if labels.len() != stage.len() {
            return Err(Error::ShapeMismatch("one stage per basis element of m".into()));
        }
        let mut base = ArtinLocalBase { labels, stage, product, nilpotency: 0 };
        base.product.retain(|_, v| !v.is_empty());
        base.check()?;
        Ok(base)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    fn mul(&self, a: usize, b: usize) -> SparseVec<S> {
        self.product.get(&(a, b)).cloned().unwrap_or_default()
    }

    fn check(&mut self) -> Result<()> {
        let n = self.dim();
        if self.stage.iter().any(|s| *s == 0) {
            return Err(Error::NotAdapted("stages start at 1".into()));
        }
        for a in 0..n {
            for b in 0..n {
                if self.mul(a, b) != self.mul(b, a) {
                    return Err(Error::ValidationError(format!("{}·{} ≠ {}·{}", self.labels[a], self.labels[b], self.labels[b], self.labels[a])));
                }
                if let Some((c, _)) = self.mul(a, b).iter().find(|(c, _)| self.stage[*c] < self.stage[a] + self.stage[b]) {
                    return Err(Error::NotAdapted(format!("{}·{} has a term {} of lower stage", self.labels[a], self.labels[b], self.labels[*c])));
                }
                for c in 0..n {
                    let mut l = BTreeMap::new();
                    for (x, s) in self.mul(a, b) {
                        add_into(&mut l, &self.mul(x, c), &s);
                    }
                    let mut r = BTreeMap::new();
                    for (x, s) in self.mul(b, c) {
                        add_into(&mut r, &self.mul(a, x), &s);
                    }
                    if finish(l) != finish(r) {
                        return Err(Error::ValidationError("m is not associative".into()));
                    }
                }
            }
        }
        // m^k = 0: powers of the span of m computed by products
        let mut power: Vec<SparseVec<S>> = (0..n).map(|a| vec![(a, S::one())]).collect();
        let mut k = 1;
        while !power.is_empty() {
            let mut next = Vec::new();
            for v in &power {
                for b in 0..n {
                    let mut acc = BTreeMap::new();
                    for (a, s) in v {
                        add_into(&mut acc, &self.mul(*a, b), s);
                    }
                    let f = finish(acc);
                    if !f.is_empty() {
                        next.push(f);
                    }
                }
            }
            power = next;
            k += 1;
            if k > n + 2 {
                return Err(Error::ValidationError("maximal ideal is not nilpotent".into()));
            }
        }
        self.nilpotency = k;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct McStage {
    pub stage: usize,
    pub unknowns: usize,
    /// Dimension of the kernel of `d` on this stage's unknowns.
    pub tangent_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct McSolution {
    /// Coordinates `c[x⊗t]` on `(𝔤⊗m)_{−1}`.
    pub coordinates: Vec<String>,
    /// One polynomial per component of `(𝔤⊗m)_{−2}`.
    pub equations: Vec<String>,
    pub linear: bool,
    /// Dimension of the solution space when the system is linear.
    pub dimension: Option<usize>,
    /// Basis of the solution space when the system is linear, as
    /// coordinate vectors written `coefficient·coordinate`.
    pub basis: Vec<Vec<String>>,
    pub stages: Vec<McStage>,
    /// Solutions found by lifting stage by stage (finite fields only, when
    /// the system is not linear).
    pub points: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

const POINT_LIMIT: usize = 100_000;

/// Solutions of `dx + ½[x,x] = 0` for `x ∈ (𝔤⊗m)_{−1}`.
pub fn mc_elements<S: Scalar>(g: &DGLieAlgebra<S>, r: &ArtinLocalBase<S>) -> Result<McSolution> {
    S::field().require_inverses_up_to(2, "Maurer–Cartan equation")?;
    let ones: Vec<usize> = (0..g.dim()).filter(|i| g.degree(*i) == -1).collect();
    let twos: Vec<usize> = (0..g.dim()).filter(|i| g.degree(*i) == -2).collect();
    let m = r.dim();
    let var = |a: usize, alpha: usize| a * m + alpha;
    let eq_index: HashMap<(usize, usize), usize> =
        twos.iter().enumerate().flat_map(|(k, b)| (0..m).map(move |beta| ((*b, beta), k * m + beta))).collect();
    let nvars = ones.len() * m;
    let neqs = twos.len() * m;
    let coordinates: Vec<String> =
        ones.iter().flat_map(|a| (0..m).map(move |al| (*a, al))).map(|(a, al)| format!("{}⊗{}", g.label(a), r.labels[al])).collect();
    // linear part
    let mut linear_cols: Vec<SparseVec<S>> = Vec::new();
    for a in &ones {
        for al in 0..m {
            linear_cols.push(canonical_vec(g.d(*a).iter().map(|(b, c)| (eq_index[&(*b, al)], c.clone()))));
        }
    }
    let l = SparseMatrix::from_columns(neqs, linear_cols)?;
    // quadratic part: ½ Σ c_u c_v [x_a, x_b] ⊗ t_α t_β
    let half = S::one() / S::from_i64(2);
    let mut quad: BTreeMap<(usize, usize, usize), S> = BTreeMap::new();
    for (ia, a) in ones.iter().enumerate() {
        for (ib, b) in ones.iter().enumerate() {
            let br = g.bracket(*a, *b);
            if br.is_empty() {
                continue;
            }
            for al in 0..m {
                for be in 0..m {
                    for (gamma, tc) in r.mul(al, be) {
                        for (z, c) in &br {
                            let u = var(ia, al);
                            let v = var(ib, be);
                            let key = (eq_index[&(*z, gamma)], u.min(v), u.max(v));
                            let e = quad.entry(key).or_insert_with(S::zero);
                            *e = e.clone() + half.clone() * tc.clone() * c.clone();
                        }
                    }
                }
            }
        }
    }
    quad.retain(|_, c| !c.is_zero());
    let linear = quad.is_empty();
    let equations: Vec<String> = (0..neqs)
        .map(|e| {
            let mut terms = Vec::new();
            for (i, c) in l.row_lists().get(e).cloned().unwrap_or_default() {
                terms.push(format!("{}·c[{}]", c.to_exact_string(), coordinates[i]));
            }
            for ((q, u, v), c) in &quad {
                if *q == e {
                    terms.push(format!("{}·c[{}]·c[{}]", c.to_exact_string(), coordinates[*u], coordinates[*v]));
                }
            }
            if terms.is_empty() {
                "0 = 0".into()
            } else {
                format!("{} = 0", terms.join(" + "))
            }
        })
        .collect();
    let stage_of_var = |u: usize| r.stage[u % m];
    let max_stage = r.stage.iter().copied().max().unwrap_or(0);
    let mut stages = Vec::new();
    for s in 1..=max_stage {
        let vars: Vec<usize> = (0..nvars).filter(|u| stage_of_var(*u) == s).collect();
        let cols: Vec<SparseVec<S>> = vars.iter().map(|u| l.column(*u)).collect();
        let sub = SparseMatrix::from_columns(neqs, cols)?;
        stages.push(McStage { stage: s, unknowns: vars.len(), tangent_dim: vars.len() - rank(&sub) });
    }
    let show = |v: &[(usize, S)]| -> Vec<String> { v.iter().map(|(i, c)| format!("{}·{}", c.to_exact_string(), coordinates[*i])).collect() };
    let mut notes = vec!["solutions of the strict equation over the base; no gauge reduction".to_string()];
    let (dimension, basis, points) = if linear {
        let k = kernel_basis(&l);
        (Some(k.len()), k.iter().map(|v| show(v)).collect(), Vec::new())
    } else if let FieldSpec::Prime(p) = S::field() {
        let pts = lift_points(&l, &quad, nvars, neqs, &stage_of_var, max_stage, p)?;
        (None, Vec::new(), pts.iter().map(|v| show(&canonical_vec(v.iter().cloned().enumerate()))).collect())
    } else {
        notes.push("system is quadratic over an infinite field: equations and stagewise tangent dimensions reported".into());
        (None, Vec::new(), Vec::new())
    };
    Ok(McSolution { coordinates, equations, linear, dimension, basis, stages, points, notes })
}

/// Enumerates all solutions over `F_p` by lifting through the stages: at
/// stage `s` the quadratic terms only involve lower stages, so the new
/// coordinates solve an affine system.
fn lift_points<S: Scalar>(
    l: &SparseMatrix<S>,
    quad: &BTreeMap<(usize, usize, usize), S>,
    nvars: usize,
    neqs: usize,
    stage_of_var: &impl Fn(usize) -> usize,
    max_stage: usize,
    p: u64,
) -> Result<Vec<Vec<S>>> {
    let mut points: Vec<Vec<S>> = vec![vec![S::zero(); nvars]];
    for s in 1..=max_stage {
        let vars: Vec<usize> = (0..nvars).filter(|u| stage_of_var(*u) == s).collect();
        let mut next = Vec::new();
        for pt in &points {
            // equations restricted to stage s: L_s c_s = −(L_{<s} c + Q(c_{<s}))
            let mut rhs: BTreeMap<usize, S> = BTreeMap::new();
            for u in 0..nvars {
                if stage_of_var(u) < s && !pt[u].is_zero() {
                    add_into(&mut rhs, &l.column(u), &pt[u]);
                }
            }
            for ((e, u, v), c) in quad {
                if stage_of_var(*u) < s && stage_of_var(*v) < s {
                    let val = c.clone() * pt[*u].clone() * pt[*v].clone();
                    add_into(&mut rhs, &[(*e, val)], &S::one());
                }
            }
            // only equation components whose value is decided at this stage
            // matter now; later stages see the rest
            let cols: Vec<SparseVec<S>> = vars.iter().map(|u| l.column(*u)).collect();
            let target: SparseVec<S> = finish(rhs).into_iter().map(|(e, c)| (e, -c)).collect();
            for sol in affine_solutions(neqs, &cols, &target, p)? {
                let mut q = pt.clone();
                for (k, u) in vars.iter().enumerate() {
                    q[*u] = sol[k].clone();
                }
                next.push(q);
                if next.len() > POINT_LIMIT {
                    return Err(Error::CapExceeded { cap: POINT_LIMIT, context: "too many Maurer–Cartan points".into() });
                }
            }
        }
        points = next;
    }
    // keep exact solutions of the full system
    points.retain(|pt| {
        let mut acc: BTreeMap<usize, S> = BTreeMap::new();
        for u in 0..nvars {
            add_into(&mut acc, &l.column(u), &pt[u]);
        }
        for ((e, u, v), c) in quad {
            add_into(&mut acc, &[(*e, c.clone() * pt[*u].clone() * pt[*v].clone())], &S::one());
        }
        finish(acc).is_empty()
    });
    Ok(points)
}

/// All `x` over `F_p` with `Σ x_k cols[k] = target`, restricted to the rows
/// some column touches; other rows are left to later stages.
fn affine_solutions<S: Scalar>(rows: usize, cols: &[SparseVec<S>], target: &SparseVec<S>, p: u64) -> Result<Vec<Vec<S>>> {
    let n = cols.len();
    let touched: std::collections::BTreeSet<usize> = cols.iter().flatten().map(|(r, _)| *r).collect();
    let _ = rows;
    let count = (p as usize).checked_pow(n as u32).filter(|c| *c <= POINT_LIMIT).ok_or(Error::CapExceeded {
        cap: POINT_LIMIT,
        context: "stage has too many coordinates to enumerate".into(),
    })?;
    let mut out = Vec::new();
    for code in 0..count {
        let mut x = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            x.push(S::from_i64((c % p as usize) as i64));
            c /= p as usize;
        }
        let mut acc: BTreeMap<usize, S> = BTreeMap::new();
        for (k, col) in cols.iter().enumerate() {
            add_into(&mut acc, col, &x[k]);
        }
        let lhs: SparseVec<S> = finish(acc);
        let want: SparseVec<S> = target.iter().filter(|(r, _)| touched.contains(r)).cloned().collect();
        if lhs == want {
            out.push(x);
        }
    }
    Ok(out)
}
