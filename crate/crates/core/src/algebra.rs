//! Augmented associative DG algebras given by sparse structure constants.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{parity_sign, ChainComplex, DegreeRange, GradedSpace, TruncationWindow};
use crate::linalg::{canonical_vec, Echelon, SparseVec};
use crate::scalar::Scalar;

/// Connectivity hypothesis on the augmentation ideal, checked on chains:
/// every ideal basis element has degree ≥ 1, respectively ≤ -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    ConnectedIdeal,
    Coconnective,
    None,
}

impl Certificate {
    pub fn name(&self) -> &'static str {
        match self {
            Certificate::ConnectedIdeal => "connected-ideal",
            Certificate::Coconnective => "coconnective(-1)",
            Certificate::None => "none",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "connected-ideal" | "connected" => Ok(Certificate::ConnectedIdeal),
            "coconnective(-1)" | "coconnective" => Ok(Certificate::Coconnective),
            "none" => Ok(Certificate::None),
            _ => Err(Error::InvalidInput(format!("unknown certificate {s:?}"))),
        }
    }

    /// Whether a nonunit basis element of degree `d` is allowed.
    pub fn admits(&self, d: i64) -> bool {
        match self {
            Certificate::ConnectedIdeal => d >= 1,
            Certificate::Coconnective => d <= -1,
            Certificate::None => true,
        }
    }
}

/// How an algebra was produced; used to decide which comparisons are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Ground,
    Free,
    Trivial,
    Sym,
    Enveloping,
    KoszulDual,
    Cochains,
    Document,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub label: String,
    pub degree: i64,
    /// Auxiliary grading preserved by the differential and additive under
    /// products, when the algebra has one.
    pub weight: Option<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: BTreeMap<String, bool>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, check: &str, failures: Vec<String>) {
        self.checks.insert(check.to_string(), failures.is_empty());
        self.failures.extend(failures.into_iter().map(|f| format!("{check}: {f}")));
    }
}

#[derive(Clone, Debug)]
pub struct DGAlgebra<S> {
    pub name: String,
    basis: Vec<BasisElement>,
    index: HashMap<String, usize>,
    unit: usize,
    differential: Vec<SparseVec<S>>,
    product: BTreeMap<(usize, usize), SparseVec<S>>,
    certificate: Certificate,
    /// Degrees in which the stored algebra agrees with the algebra it models.
    exact: DegreeRange,
    /// Weights up to which the stored algebra is complete; `None` means all.
    weight_exact: Option<u32>,
    origin: Origin,
    /// Position of each basis element inside its degree, for the whole
    /// algebra and for the augmentation ideal.
    pos: Vec<usize>,
    ideal_pos: Vec<Option<usize>>,
    by_degree: BTreeMap<i64, Vec<usize>>,
    ideal_by_degree: BTreeMap<i64, Vec<usize>>,
}

pub struct AlgebraParts<S> {
    pub name: String,
    pub basis: Vec<BasisElement>,
    pub unit: usize,
    /// Differential of each basis element, over global indices.
    pub differential: Vec<SparseVec<S>>,
    pub product: BTreeMap<(usize, usize), SparseVec<S>>,
    pub certificate: Certificate,
    pub exact: DegreeRange,
    pub weight_exact: Option<u32>,
    pub origin: Origin,
}

impl<S: Scalar> DGAlgebra<S> {
    /// Checks degree bookkeeping; structural identities are left to
    /// [`DGAlgebra::validate`].
    pub fn from_parts(parts: AlgebraParts<S>) -> Result<Self> {
        let AlgebraParts { name, basis, unit, differential, mut product, certificate, exact, weight_exact, origin } = parts;
        let n = basis.len();
        if unit >= n || basis[unit].degree != 0 {
            return Err(Error::ValidationError("unit must be a basis element of degree 0".into()));
        }
        if differential.len() != n {
            return Err(Error::ShapeMismatch(format!("{} differentials for {n} basis elements", differential.len())));
        }
        let mut index = HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            if index.insert(b.label.clone(), i).is_some() {
                return Err(Error::ValidationError(format!("duplicate basis label {:?}", b.label)));
            }
        }
        for (i, dv) in differential.iter().enumerate() {
            for (j, _) in dv {
                if *j >= n || basis[*j].degree != basis[i].degree - 1 {
                    return Err(Error::ValidationError(format!(
                        "differential of {} has a term of the wrong degree",
                        basis[i].label
                    )));
                }
            }
        }
        for ((i, j), v) in product.iter() {
            for (k, _) in v {
                if *i >= n || *j >= n || *k >= n || basis[*k].degree != basis[*i].degree + basis[*j].degree {
                    return Err(Error::ValidationError(format!(
                        "product {}·{} has a term of the wrong degree",
                        basis.get(*i).map_or("?", |b| &b.label),
                        basis.get(*j).map_or("?", |b| &b.label)
                    )));
                }
            }
        }
        product.retain(|_, v| !v.is_empty());
        let mut pos = vec![0; n];
        let mut ideal_pos = vec![None; n];
        let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        let mut ideal_by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, b) in basis.iter().enumerate() {
            let v = by_degree.entry(b.degree).or_default();
            pos[i] = v.len();
            v.push(i);
            if i != unit {
                let v = ideal_by_degree.entry(b.degree).or_default();
                ideal_pos[i] = Some(v.len());
                v.push(i);
            }
        }
        Ok(DGAlgebra {
            name,
            basis,
            index,
            unit,
            differential,
            product,
            certificate,
            exact,
            weight_exact,
            origin,
            pos,
            ideal_pos,
            by_degree,
            ideal_by_degree,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn weight(&self, i: usize) -> Option<u32> {
        self.basis[i].weight
    }

    pub fn is_weighted(&self) -> bool {
        self.basis.iter().all(|b| b.weight.is_some())
    }

    pub fn lookup(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn certificate(&self) -> Certificate {
        self.certificate
    }

    pub fn exact(&self) -> DegreeRange {
        self.exact
    }

    pub fn weight_exact(&self) -> Option<u32> {
        self.weight_exact
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub(crate) fn to_parts(&self) -> AlgebraParts<S> {
        AlgebraParts {
            name: self.name.clone(),
            basis: self.basis.clone(),
            unit: self.unit,
            differential: self.differential.clone(),
            product: self.product.clone(),
            certificate: self.certificate,
            exact: self.exact,
            weight_exact: self.weight_exact,
            origin: self.origin,
        }
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn with_certificate(mut self, c: Certificate) -> Self {
        self.certificate = c;
        self
    }

    pub fn d(&self, i: usize) -> &SparseVec<S> {
        &self.differential[i]
    }

    pub fn product_table(&self) -> &BTreeMap<(usize, usize), SparseVec<S>> {
        &self.product
    }

    /// `e_i · e_j`. Products with the unit default to the unit law when the
    /// table is silent.
    pub fn mul(&self, i: usize, j: usize) -> SparseVec<S> {
        if let Some(v) = self.product.get(&(i, j)) {
            return v.clone();
        }
        if i == self.unit {
            return vec![(j, S::one())];
        }
        if j == self.unit {
            return vec![(i, S::one())];
        }
        Vec::new()
    }

    pub fn mul_vec(&self, x: &[(usize, S)], y: &[(usize, S)]) -> SparseVec<S> {
        let mut out = Vec::new();
        for (i, a) in x {
            for (j, b) in y {
                let ab = a.clone() * b.clone();
                for (k, c) in self.mul(*i, *j) {
                    out.push((k, ab.clone() * c));
                }
            }
        }
        canonical_vec(out)
    }

    pub fn d_vec(&self, x: &[(usize, S)]) -> SparseVec<S> {
        canonical_vec(x.iter().flat_map(|(i, a)| self.differential[*i].iter().map(move |(k, c)| (*k, a.clone() * c.clone()))))
    }

    /// Nonunit basis indices in degree `d`, in order.
    pub fn ideal_basis(&self, d: i64) -> &[usize] {
        self.ideal_by_degree.get(&d).map_or(&[], |v| v.as_slice())
    }

    pub fn ideal_degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.ideal_by_degree.keys().copied()
    }

    pub fn ideal_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.basis.len()).filter(move |i| *i != self.unit)
    }

    pub fn ideal_position(&self, i: usize) -> Option<usize> {
        self.ideal_pos[i]
    }

    pub fn position(&self, i: usize) -> usize {
        self.pos[i]
    }

    pub fn basis_in_degree(&self, d: i64) -> &[usize] {
        self.by_degree.get(&d).map_or(&[], |v| v.as_slice())
    }

    pub fn is_ground(&self) -> bool {
        self.basis.len() == 1
    }

    /// The whole algebra as a chain complex.
    pub fn complex(&self) -> Result<ChainComplex<S>> {
        let mut space = GradedSpace::new();
        for (d, idx) in &self.by_degree {
            for &i in idx {
                space.push(*d, self.basis[i].label.clone())?;
            }
        }
        ChainComplex::from_images(space, self.exact, |d, k| {
            let i = self.by_degree[&d][k];
            self.differential[i].iter().map(|(j, c)| (self.pos[*j], c.clone())).collect()
        })
    }

    /// The augmentation ideal as a chain complex.
    pub fn ideal_complex(&self) -> Result<ChainComplex<S>> {
        let mut space = GradedSpace::new();
        for (d, idx) in &self.ideal_by_degree {
            for &i in idx {
                space.push(*d, self.basis[i].label.clone())?;
            }
        }
        ChainComplex::from_images(space, self.exact, |d, k| {
            let i = self.ideal_by_degree[&d][k];
            self.differential[i].iter().filter_map(|(j, c)| self.ideal_pos[*j].map(|p| (p, c.clone()))).collect()
        })
    }

    /// Checks every structural identity and reports the offending basis
    /// elements.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.basis.len();
        let lab = |i: usize| self.basis[i].label.as_str();

        let mut fails = Vec::new();
        for i in 0..n {
            let dd = self.d_vec(&self.differential[i]);
            if !dd.is_empty() {
                fails.push(format!("d(d({}))≠0", lab(i)));
            }
        }
        report.record("d-squared", fails);

        let mut fails = Vec::new();
        for i in 0..n {
            if self.mul(self.unit, i) != vec![(i, S::one())] || self.mul(i, self.unit) != vec![(i, S::one())] {
                fails.push(format!("unit law fails on {}", lab(i)));
            }
        }
        if !self.differential[self.unit].is_empty() {
            fails.push("d(unit)≠0".into());
        }
        report.record("unit", fails);

        // partners for nnz-driven enumeration
        let mut right: HashMap<usize, BTreeSet<usize>> = HashMap::new();
        let mut left: HashMap<usize, BTreeSet<usize>> = HashMap::new();
        for (i, j) in self.product.keys() {
            if *i != self.unit && *j != self.unit {
                right.entry(*i).or_default().insert(*j);
                left.entry(*j).or_default().insert(*i);
            }
        }
        let empty = BTreeSet::new();
        let rp = |l: usize| right.get(&l).unwrap_or(&empty);
        let lp = |l: usize| left.get(&l).unwrap_or(&empty);

        let mut triples: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        for ((i, j), v) in &self.product {
            if *i == self.unit || *j == self.unit {
                continue;
            }
            for k in rp(*j) {
                triples.insert((*i, *j, *k));
            }
            for (l, _) in v {
                for k in rp(*l) {
                    triples.insert((*i, *j, *k));
                }
            }
            for h in lp(*i) {
                triples.insert((*h, *i, *j));
            }
            for (l, _) in v {
                for h in lp(*l) {
                    triples.insert((*h, *i, *j));
                }
            }
        }
        let mut fails = Vec::new();
        for (i, j, k) in triples {
            let lhs = self.mul_vec(&self.mul(i, j), &[(k, S::one())]);
            let rhs = self.mul_vec(&[(i, S::one())], &self.mul(j, k));
            if lhs != rhs {
                fails.push(format!("({}·{})·{} ≠ {}·({}·{})", lab(i), lab(j), lab(k), lab(i), lab(j), lab(k)));
            }
        }
        report.record("associativity", fails);

        let mut pairs: BTreeSet<(usize, usize)> = self.product.keys().copied().collect();
        for i in 0..n {
            for (l, _) in &self.differential[i] {
                for j in rp(*l) {
                    pairs.insert((i, *j));
                }
                for h in lp(*l) {
                    pairs.insert((*h, i));
                }
            }
        }
        let mut fails = Vec::new();
        for (i, j) in pairs {
            let lhs = self.d_vec(&self.mul(i, j));
            let sign: S = parity_sign(self.basis[i].degree);
            let mut rhs = self.mul_vec(&self.differential[i], &[(j, S::one())]);
            rhs.extend(self.mul_vec(&[(i, S::one())], &self.differential[j]).into_iter().map(|(k, c)| (k, sign.clone() * c)));
            if lhs != canonical_vec(rhs) {
                fails.push(format!("d({}·{}) violates the Leibniz rule", lab(i), lab(j)));
            }
        }
        report.record("leibniz", fails);

        let mut fails = Vec::new();
        for ((i, j), v) in &self.product {
            if *i != self.unit && *j != self.unit && v.iter().any(|(k, _)| *k == self.unit) {
                fails.push(format!("{}·{} has a unit component", lab(*i), lab(*j)));
            }
        }
        for i in self.ideal_indices() {
            if self.differential[i].iter().any(|(k, _)| *k == self.unit) {
                fails.push(format!("d({}) has a unit component", lab(i)));
            }
        }
        report.record("augmentation", fails);

        if self.is_weighted() {
            let w = |i: usize| self.basis[i].weight.unwrap_or(0);
            let mut fails = Vec::new();
            for ((i, j), v) in &self.product {
                if v.iter().any(|(k, _)| w(*k) != w(*i) + w(*j)) {
                    fails.push(format!("{}·{} is not weight-additive", lab(*i), lab(*j)));
                }
            }
            for i in 0..n {
                if self.differential[i].iter().any(|(k, _)| w(*k) != w(i)) {
                    fails.push(format!("d({}) changes weight", lab(i)));
                }
            }
            if w(self.unit) != 0 {
                fails.push("unit has nonzero weight".into());
            }
            report.record("weights", fails);
        }

        let mut fails = Vec::new();
        for i in self.ideal_indices() {
            if !self.certificate.admits(self.basis[i].degree) {
                fails.push(format!("{} sits in degree {}", lab(i), self.basis[i].degree));
            }
        }
        report.record("certificate", fails);
        report
    }

    /// Fail with a validation error naming the first failing identity.
    pub fn validated(self) -> Result<Self> {
        let r = self.validate();
        if let Some(f) = r.failures.first() {
            if r.checks.get("certificate") == Some(&false) && r.failures.iter().all(|f| f.starts_with("certificate")) {
                return Err(Error::CertificateRejected { claimed: self.certificate.name().into(), reason: f.clone() });
            }
            return Err(Error::ValidationError(f.clone()));
        }
        Ok(self)
    }

    /// Smallest certificate that holds on chains.
    pub fn detect_certificate(&self) -> Certificate {
        let degs: Vec<i64> = self.ideal_indices().map(|i| self.basis[i].degree).collect();
        if degs.iter().all(|d| *d >= 1) {
            Certificate::ConnectedIdeal
        } else if degs.iter().all(|d| *d <= -1) {
            Certificate::Coconnective
        } else {
            Certificate::None
        }
    }
}

fn unit_element(weighted: bool) -> BasisElement {
    BasisElement { label: "1".into(), degree: 0, weight: weighted.then_some(0) }
}

/// Exactness range of a weight-capped algebra generated in degrees `gen`.
pub(crate) fn weight_cap_exact_range(gen_degrees: impl IntoIterator<Item = i64>, cap: usize) -> DegreeRange {
    let degs: Vec<i64> = gen_degrees.into_iter().collect();
    if degs.is_empty() {
        return DegreeRange::ALL;
    }
    let c = cap as i64 + 1;
    let lo = *degs.iter().min().unwrap();
    let hi = *degs.iter().max().unwrap();
    if lo >= 1 {
        DegreeRange::at_most(c * lo - 1)
    } else if hi <= -1 {
        DegreeRange::at_least(c * hi + 1)
    } else {
        DegreeRange::between(1, 0)
    }
}

/// The ground field with its identity augmentation.
pub fn ground<S: Scalar>() -> DGAlgebra<S> {
    DGAlgebra::from_parts(AlgebraParts {
        name: "k".into(),
        basis: vec![unit_element(true)],
        unit: 0,
        differential: vec![Vec::new()],
        product: BTreeMap::new(),
        certificate: Certificate::ConnectedIdeal,
        exact: DegreeRange::ALL,
        weight_exact: None,
        origin: Origin::Ground,
    })
    .expect("ground field is well formed")
}

/// Differential of a generator of `v`, over the positions of generators.
fn generator_differentials<S: Scalar>(v: &ChainComplex<S>) -> (Vec<(String, i64)>, Vec<SparseVec<S>>) {
    let mut gens = Vec::new();
    let mut offset: BTreeMap<i64, usize> = BTreeMap::new();
    for d in v.space().degrees() {
        offset.insert(d, gens.len());
        for l in v.space().labels(d) {
            gens.push((l.clone(), d));
        }
    }
    let mut diffs = Vec::new();
    for d in v.space().degrees() {
        for i in 0..v.dim(d) {
            let base = offset.get(&(d - 1)).copied().unwrap_or(0);
            diffs.push(v.d_of(d, i).into_iter().map(|(j, c)| (base + j, c)).collect());
        }
    }
    (gens, diffs)
}

fn check_unit_label(gens: &[(String, i64)]) -> Result<()> {
    if gens.iter().any(|(l, _)| l == "1") {
        return Err(Error::InvalidInput("generator label \"1\" is reserved for the unit".into()));
    }
    Ok(())
}

/// `𝕜 ⊕ V` with all products of ideal elements zero.
pub fn trivial_algebra<S: Scalar>(v: &ChainComplex<S>) -> Result<DGAlgebra<S>> {
    let (gens, diffs) = generator_differentials(v);
    check_unit_label(&gens)?;
    let mut basis = vec![unit_element(true)];
    basis.extend(gens.iter().map(|(l, d)| BasisElement { label: l.clone(), degree: *d, weight: Some(1) }));
    let mut differential = vec![Vec::new()];
    differential.extend(diffs.into_iter().map(|dv| dv.into_iter().map(|(j, c)| (j + 1, c)).collect()));
    let alg = DGAlgebra::from_parts(AlgebraParts {
        name: "trivial".into(),
        basis,
        unit: 0,
        differential,
        product: BTreeMap::new(),
        certificate: Certificate::None,
        exact: DegreeRange::ALL,
        weight_exact: None,
        origin: Origin::Trivial,
    })?;
    let c = alg.detect_certificate();
    Ok(alg.with_certificate(c))
}

/// Word label: generator labels joined by `·`; the empty word is `1`.
pub fn word_label(labels: &[&str]) -> String {
    if labels.is_empty() {
        "1".into()
    } else {
        labels.join("·")
    }
}

/// Tensor algebra on `V` truncated at word length `w.weight_cap`.
pub fn free_algebra<S: Scalar>(v: &ChainComplex<S>, w: &TruncationWindow) -> Result<DGAlgebra<S>> {
    let (gens, diffs) = generator_differentials(v);
    check_unit_label(&gens)?;
    let cap = w.weight_cap;
    let ng = gens.len();
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..cap {
        if ng == 0 {
            break;
        }
        let mut next = Vec::new();
        for wd in &frontier {
            for g in 0..ng {
                let mut x = wd.clone();
                x.push(g);
                next.push(x);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
        if words.len() > 2_000_000 {
            return Err(Error::CapExceeded { cap, context: "free algebra has too many words".into() });
        }
    }
    let index: HashMap<Vec<usize>, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let basis: Vec<BasisElement> = words
        .iter()
        .map(|wd| BasisElement {
            label: word_label(&wd.iter().map(|g| gens[*g].0.as_str()).collect::<Vec<_>>()),
            degree: wd.iter().map(|g| gens[*g].1).sum(),
            weight: Some(wd.len() as u32),
        })
        .collect();
    let differential: Vec<SparseVec<S>> = words
        .iter()
        .map(|wd| {
            let mut out = Vec::new();
            let mut prefix_deg = 0i64;
            for (k, g) in wd.iter().enumerate() {
                let sign: S = parity_sign(prefix_deg);
                for (h, c) in &diffs[*g] {
                    let mut x = wd.clone();
                    x[k] = *h;
                    out.push((index[&x], sign.clone() * c.clone()));
                }
                prefix_deg += gens[*g].1;
            }
            canonical_vec(out)
        })
        .collect();
    let mut product = BTreeMap::new();
    for (i, a) in words.iter().enumerate().skip(1) {
        for (j, b) in words.iter().enumerate().skip(1) {
            if a.len() + b.len() <= cap {
                let mut x = a.clone();
                x.extend(b);
                product.insert((i, j), vec![(index[&x], S::one())]);
            }
        }
    }
    let alg = DGAlgebra::from_parts(AlgebraParts {
        name: "free".into(),
        basis,
        unit: 0,
        differential,
        product,
        certificate: Certificate::None,
        exact: weight_cap_exact_range(gens.iter().map(|g| g.1), cap),
        weight_exact: Some(cap as u32),
        origin: Origin::Free,
    })?;
    let c = alg.detect_certificate();
    Ok(alg.with_certificate(c))
}

/// Sort a monomial (generator indices) into canonical order, returning the
/// Koszul sign, or `None` if an odd generator repeats.
fn normalize_monomial<S: Scalar>(mut m: Vec<usize>, degree_of: &dyn Fn(usize) -> i64) -> Option<(Vec<usize>, S)> {
    let mut odd_swaps = 0i64;
    // insertion sort counting swaps of odd pairs
    for i in 1..m.len() {
        let mut j = i;
        while j > 0 && m[j - 1] > m[j] {
            if degree_of(m[j - 1]).rem_euclid(2) == 1 && degree_of(m[j]).rem_euclid(2) == 1 {
                odd_swaps += 1;
            }
            m.swap(j - 1, j);
            j -= 1;
        }
    }
    for pair in m.windows(2) {
        if pair[0] == pair[1] && degree_of(pair[0]).rem_euclid(2) == 1 {
            return None;
        }
    }
    Some((m, parity_sign(odd_swaps)))
}

/// Free graded-commutative algebra on `V`, truncated at polynomial degree
/// `w.weight_cap`.
pub fn sym_algebra<S: Scalar>(v: &ChainComplex<S>, w: &TruncationWindow) -> Result<DGAlgebra<S>> {
    S::field().require_inverses_up_to(w.weight_cap as u64, "symmetric algebra")?;
    let (gens, diffs) = generator_differentials(v);
    check_unit_label(&gens)?;
    let cap = w.weight_cap;
    let ng = gens.len();
    let deg = |g: usize| gens[g].1;
    // nondecreasing sequences with odd generators used at most once
    let mut monos: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    let mut complete = false;
    for _ in 0..=cap {
        let mut next = Vec::new();
        for m in &frontier {
            let start = m.last().copied().unwrap_or(0);
            for g in start..ng {
                if m.last() == Some(&g) && deg(g).rem_euclid(2) == 1 {
                    continue;
                }
                let mut x = m.clone();
                x.push(g);
                next.push(x);
            }
        }
        if next.is_empty() {
            complete = true;
            break;
        }
        if frontier[0].len() == cap {
            break;
        }
        monos.extend(next.iter().cloned());
        frontier = next;
    }
    let index: HashMap<Vec<usize>, usize> = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let label = |m: &[usize]| -> String {
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
            let l = &gens[m[i]].0;
            parts.push(if j - i == 1 { l.clone() } else { format!("{l}^{}", j - i) });
            i = j;
        }
        parts.join("·")
    };
    let multiply = |a: &[usize], b: &[usize]| -> Option<(usize, S)> {
        if a.len() + b.len() > cap {
            return None;
        }
        let mut x = a.to_vec();
        x.extend_from_slice(b);
        let (m, s) = normalize_monomial::<S>(x, &deg)?;
        Some((index[&m], s))
    };
    let mut product = BTreeMap::new();
    for (i, a) in monos.iter().enumerate().skip(1) {
        for (j, b) in monos.iter().enumerate().skip(1) {
            if let Some((k, s)) = multiply(a, b) {
                product.insert((i, j), vec![(k, s)]);
            }
        }
    }
    let differential: Vec<SparseVec<S>> = monos
        .iter()
        .map(|m| {
            let mut out = Vec::new();
            let mut prefix_deg = 0;
            for k in 0..m.len() {
                let sign: S = parity_sign(prefix_deg);
                for (h, c) in &diffs[m[k]] {
                    let mut x = m[..k].to_vec();
                    x.push(*h);
                    x.extend_from_slice(&m[k + 1..]);
                    if let Some((y, s)) = normalize_monomial::<S>(x, &deg) {
                        out.push((index[&y], sign.clone() * s * c.clone()));
                    }
                }
                prefix_deg += deg(m[k]);
            }
            canonical_vec(out)
        })
        .collect();
    let basis = monos
        .iter()
        .map(|m| BasisElement { label: label(m), degree: m.iter().map(|g| deg(*g)).sum(), weight: Some(m.len() as u32) })
        .collect();
    let alg = DGAlgebra::from_parts(AlgebraParts {
        name: "sym".into(),
        basis,
        unit: 0,
        differential,
        product,
        certificate: Certificate::None,
        exact: if complete { DegreeRange::ALL } else { weight_cap_exact_range(gens.iter().map(|g| g.1), cap) },
        weight_exact: (!complete).then_some(cap as u32),
        origin: Origin::Sym,
    })?;
    let c = alg.detect_certificate();
    Ok(alg.with_certificate(c))
}

/// Indecomposables `Ī/Ī²` as a chain complex. The basis consists of ideal
/// basis elements not reached as pivots of `Ī²`.
pub fn cotangent_space<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<ChainComplex<S>> {
    let _ = w;
    let mut squares: BTreeMap<i64, Echelon<S>> = BTreeMap::new();
    for ((i, j), v) in a.product_table() {
        if *i == a.unit() || *j == a.unit() || v.is_empty() {
            continue;
        }
        let d = a.degree(*i) + a.degree(*j);
        let vec: SparseVec<S> = v.iter().filter_map(|(k, c)| a.ideal_position(*k).map(|p| (p, c.clone()))).collect();
        squares.entry(d).or_default().insert(&vec);
    }
    let empty = Echelon::new();
    let mut space = GradedSpace::new();
    // ideal position -> position in the quotient basis
    let mut quotient_pos: BTreeMap<i64, HashMap<usize, usize>> = BTreeMap::new();
    for d in a.ideal_degrees() {
        let ech = squares.get(&d).unwrap_or(&empty);
        for (p, &i) in a.ideal_basis(d).iter().enumerate() {
            if !ech.is_pivot(p) {
                let q = space.push(d, a.label(i).to_string())?;
                quotient_pos.entry(d).or_default().insert(p, q);
            }
        }
    }
    let reps: BTreeMap<i64, Vec<usize>> = quotient_pos
        .iter()
        .map(|(d, m)| {
            let mut v: Vec<(usize, usize)> = m.iter().map(|(p, q)| (*q, *p)).collect();
            v.sort();
            (*d, v.into_iter().map(|(_, p)| a.ideal_basis(*d)[p]).collect())
        })
        .collect();
    let image = |d: i64, k: usize| -> SparseVec<S> {
        let i = reps[&d][k];
        let dv: SparseVec<S> = a.d(i).iter().filter_map(|(j, c)| a.ideal_position(*j).map(|p| (p, c.clone()))).collect();
        let reduced = squares.get(&(d - 1)).unwrap_or(&empty).reduce(&dv);
        let qp = quotient_pos.get(&(d - 1));
        canonical_vec(reduced.into_iter().filter_map(|(p, c)| qp.and_then(|m| m.get(&p)).map(|q| (*q, c))))
    };
    ChainComplex::from_images(space, a.exact(), image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::support;
    use crate::scalar::{Rational, F3, F5};

    type Q = Rational;

    fn win(cap: usize) -> TruncationWindow {
        TruncationWindow::new(-30, 30, cap).unwrap()
    }

    fn gens(degs: &[i64]) -> ChainComplex<Q> {
        let mut s = GradedSpace::new();
        for (i, d) in degs.iter().enumerate() {
            s.push(*d, format!("v{i}")).unwrap();
        }
        ChainComplex::from_space(s)
    }

    #[test]
    fn ground_validates() {
        assert!(ground::<Q>().validate().is_ok());
    }

    #[test]
    fn leibniz_violation_reported() {
        // idempotent e in degree 0 with d(e) = f but e·f = f·e = 0
        let basis = vec![
            BasisElement { label: "1".into(), degree: 0, weight: None },
            BasisElement { label: "e".into(), degree: 0, weight: None },
            BasisElement { label: "f".into(), degree: -1, weight: None },
        ];
        let one = Q::from_i64(1);
        let parts = AlgebraParts {
            name: "bad".into(),
            basis,
            unit: 0,
            differential: vec![vec![], vec![(2, one.clone())], vec![]],
            product: BTreeMap::from([((1, 1), vec![(1, one.clone())])]),
            certificate: Certificate::None,
            exact: DegreeRange::ALL,
            weight_exact: None,
            origin: Origin::Document,
        };
        let a = DGAlgebra::from_parts(parts).unwrap();
        let r = a.validate();
        assert_eq!(r.checks["leibniz"], false);
        assert!(r.failures.iter().any(|f| f.contains("e·e")));
    }

    #[test]
    fn polynomial_truncation_is_associative() {
        let y = gens(&[-2]);
        let a = sym_algebra(&y, &win(3)).unwrap();
        assert_eq!(a.dim(), 4);
        let r = a.validate();
        assert!(r.is_ok(), "{:?}", r.failures);
        assert_eq!(a.certificate(), Certificate::Coconnective);
    }

    #[test]
    fn free_algebra_examples() {
        let a = free_algebra(&gens(&[]), &win(3)).unwrap();
        assert_eq!(a.dim(), 1);
        let a = free_algebra(&gens(&[1]), &win(4)).unwrap();
        assert_eq!(a.complex().unwrap().space().dims(), BTreeMap::from([(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)]));
        let a = free_algebra(&gens(&[1, 1]), &win(2)).unwrap();
        assert_eq!(a.complex().unwrap().dim(2), 4);
    }

    #[test]
    fn free_algebras_validate_with_differentials() {
        // V = (v0 -> v1) in degrees 2, 1 plus a loose degree -1 generator
        let mut s = GradedSpace::new();
        s.push(1, "b".into()).unwrap();
        s.push(2, "a".into()).unwrap();
        s.push(-1, "c".into()).unwrap();
        let v = ChainComplex::from_images(s, DegreeRange::ALL, |d, _| if d == 2 { vec![(0, Q::from_i64(1))] } else { vec![] })
            .unwrap();
        let a = free_algebra(&v, &win(3)).unwrap();
        let r = a.validate();
        assert!(r.is_ok(), "{:?}", r.failures);
        for ((i, j), prod) in a.product_table() {
            for (k, _) in prod {
                assert_eq!(a.weight(*k).unwrap(), a.weight(*i).unwrap() + a.weight(*j).unwrap());
            }
        }
    }

    #[test]
    fn trivial_algebra_examples() {
        let a = trivial_algebra(&gens(&[1])).unwrap();
        assert!(a.validate().is_ok());
        assert!(a.product_table().is_empty());
        let l = cotangent_space(&a, &win(2)).unwrap();
        assert_eq!(l.space().dims(), BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn cotangent_of_free_is_generators() {
        let mut s = GradedSpace::new();
        s.push(3, "a".into()).unwrap();
        s.push(2, "b".into()).unwrap();
        let v = ChainComplex::from_images(s, DegreeRange::ALL, |d, _| if d == 3 { vec![(0, Q::from_i64(2))] } else { vec![] })
            .unwrap();
        let a = free_algebra(&v, &win(3)).unwrap();
        let l = cotangent_space(&a, &win(3)).unwrap();
        assert_eq!(l.space().dims(), v.space().dims());
        assert_eq!(l.d_block(3), v.d_block(3));
    }

    #[test]
    fn cotangent_of_truncated_polynomial() {
        let a = sym_algebra(&gens(&[-2]), &win(3)).unwrap();
        let l = cotangent_space(&a, &win(3)).unwrap();
        assert_eq!(support(&l.space().dims()), BTreeMap::from([(-2, 1)]));
    }

    #[test]
    fn sym_algebra_examples() {
        let a = sym_algebra(&gens(&[0]), &win(3)).unwrap();
        assert_eq!(a.complex().unwrap().space().dims(), BTreeMap::from([(0, 4)]));
        let a = sym_algebra(&gens(&[1]), &win(3)).unwrap();
        assert_eq!(a.dim(), 2);
        let a = sym_algebra(&gens(&[0, 0]), &win(2)).unwrap();
        assert_eq!(a.basis().iter().filter(|b| b.weight == Some(2)).count(), 3);
        let mixed = sym_algebra(&gens(&[1, 2, 1]), &win(4)).unwrap();
        assert!(mixed.validate().is_ok());
    }

    #[test]
    fn sym_needs_large_characteristic() {
        let v = ChainComplex::<F3>::point(0, "x");
        assert!(matches!(
            sym_algebra(&v, &TruncationWindow::new(0, 5, 3).unwrap()),
            Err(Error::CharacteristicUnsupported { .. })
        ));
        let v = ChainComplex::<F5>::point(0, "x");
        assert!(sym_algebra(&v, &TruncationWindow::new(0, 5, 3).unwrap()).is_ok());
    }

    #[test]
    fn exactness_ranges() {
        assert_eq!(weight_cap_exact_range([1, 2], 4), DegreeRange::at_most(4));
        assert_eq!(weight_cap_exact_range([-2, -3], 2), DegreeRange::at_least(-5));
    }

    #[test]
    fn free_algebra_validates_on_small_inputs() {
        for degs in [vec![0], vec![-3, 3], vec![1, -1, 2], vec![-2, -2, -3]] {
            let a = free_algebra(&gens(&degs), &win(4)).unwrap();
            assert!(a.validate().is_ok(), "{degs:?}");
            let l = cotangent_space(&a, &win(4)).unwrap();
            assert_eq!(l.space().dims(), gens(&degs).space().dims());
        }
    }
}
