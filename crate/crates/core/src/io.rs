//! Input documents and output reports.
//!
//! Documents are JSON. Coefficients are written as integer fractions
//! `"p/q"` (plain integers are accepted too); decimal numbers are refused so
//! that nothing inexact ever enters a computation.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{AlgebraParts, BasisElement, Certificate, DGAlgebra, Origin};
use crate::error::{Error, Result};
use crate::graded::{ChainComplex, DegreeRange, GradedSpace, TruncationWindow};
use crate::lie::{DGLieAlgebra, LieParts};
use crate::linalg::{canonical_vec, SparseVec};
use crate::scalar::{FieldSpec, Scalar};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Algebra,
    Lie,
    Complex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub label: String,
    pub degree: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<u32>,
}

/// A coefficient: `"p/q"`, `"p"` or a JSON integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Integer(i64),
    Text(String),
}

impl Coefficient {
    fn text(&self) -> String {
        match self {
            Coefficient::Integer(n) => n.to_string(),
            Coefficient::Text(t) => t.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferentialEntry {
    pub from: String,
    pub to: String,
    pub coefficient: Coefficient,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub label: String,
    pub coefficient: Coefficient,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    pub left: String,
    pub right: String,
    pub result: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeEntry {
    #[serde(default)]
    pub lo: Option<i64>,
    #[serde(default)]
    pub hi: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema_version: u32,
    pub name: String,
    pub field: String,
    pub kind: Kind,
    pub basis: Vec<BasisEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub differential: Vec<DifferentialEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub product: Vec<ProductEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bracket: Vec<ProductEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augmentation_complement: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    /// Degrees in which a truncated algebra agrees with the one it models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<RangeEntry>,
    /// Weights up to which a truncated algebra is complete.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_exact: Option<u32>,
}

fn perr(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::ParseError { location: location.into(), message: message.into() }
}

/// Reads the JSON layer; structure is checked when an object is built.
pub fn read_document(text: &str) -> Result<Document> {
    let doc: Document = serde_json::from_str(text).map_err(|e| perr(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(perr("schema_version", format!("unsupported schema version {}", doc.schema_version)));
    }
    FieldSpec::parse(&doc.field).map_err(|e| perr("field", e.to_string()))?;
    Ok(doc)
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A parsed and validated document.
#[derive(Clone, Debug)]
pub enum Parsed<S> {
    Algebra(DGAlgebra<S>),
    Lie(DGLieAlgebra<S>),
    Complex(ChainComplex<S>),
}

pub fn parse<S: Scalar>(text: &str) -> Result<Parsed<S>> {
    let doc = read_document(text)?;
    match doc.kind {
        Kind::Algebra => build_algebra(&doc).map(Parsed::Algebra),
        Kind::Lie => build_lie(&doc).map(Parsed::Lie),
        Kind::Complex => build_complex(&doc).map(Parsed::Complex),
    }
}

/// Rational documents may be read over any field; prime-field documents
/// only over their own field.
fn document_field<S: Scalar>(doc: &Document) -> Result<FieldSpec> {
    let field = FieldSpec::parse(&doc.field)?;
    let target = S::field();
    if field != target && field != FieldSpec::Rationals {
        return Err(Error::UnsupportedField(format!("document over {field} read over {target}")));
    }
    Ok(field)
}

fn coefficient<S: Scalar>(c: &Coefficient, location: &str) -> Result<S> {
    let text = c.text();
    if text.contains('.') || text.contains('e') || text.contains('E') {
        return Err(perr(location, format!("coefficient {text:?} is not an integer fraction")));
    }
    S::parse_exact(&text).map_err(|e| perr(location, e.to_string()))
}

struct Labels {
    index: HashMap<String, usize>,
}

impl Labels {
    fn new(basis: &[BasisEntry]) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            if index.insert(b.label.clone(), i).is_some() {
                return Err(perr(format!("basis[{i}]"), format!("duplicate label {:?}", b.label)));
            }
        }
        Ok(Labels { index })
    }

    fn get(&self, label: &str, location: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| perr(location, format!("undeclared label {label:?}")))
    }
}

fn read_differential<S: Scalar>(doc: &Document, labels: &Labels) -> Result<Vec<SparseVec<S>>> {
    let mut acc: Vec<Vec<(usize, S)>> = vec![Vec::new(); doc.basis.len()];
    for (n, e) in doc.differential.iter().enumerate() {
        let loc = format!("differential[{n}]");
        let from = labels.get(&e.from, &loc)?;
        let to = labels.get(&e.to, &loc)?;
        if doc.basis[to].degree != doc.basis[from].degree - 1 {
            return Err(Error::ValidationError(format!("{loc}: d({}) → {} does not lower degree by one", e.from, e.to)));
        }
        acc[from].push((to, coefficient(&e.coefficient, &loc)?));
    }
    Ok(acc.into_iter().map(canonical_vec).collect())
}

fn read_table<S: Scalar>(
    entries: &[ProductEntry],
    what: &str,
    doc: &Document,
    labels: &Labels,
) -> Result<BTreeMap<(usize, usize), SparseVec<S>>> {
    let mut table: BTreeMap<(usize, usize), Vec<(usize, S)>> = BTreeMap::new();
    for (n, e) in entries.iter().enumerate() {
        let loc = format!("{what}[{n}]");
        let l = labels.get(&e.left, &loc)?;
        let r = labels.get(&e.right, &loc)?;
        let target = doc.basis[l].degree + doc.basis[r].degree;
        let slot = table.entry((l, r)).or_default();
        for (m, t) in e.result.iter().enumerate() {
            let tloc = format!("{loc}.result[{m}]");
            let k = labels.get(&t.label, &tloc)?;
            if doc.basis[k].degree != target {
                return Err(Error::ValidationError(format!(
                    "{loc}: {}·{} has degree {target} but {} has degree {}",
                    e.left, e.right, t.label, doc.basis[k].degree
                )));
            }
            slot.push((k, coefficient(&t.coefficient, &tloc)?));
        }
    }
    Ok(table.into_iter().map(|(k, v)| (k, canonical_vec(v))).collect())
}

fn range_of(r: &Option<RangeEntry>) -> DegreeRange {
    match r {
        None => DegreeRange::ALL,
        Some(RangeEntry { lo, hi }) => DegreeRange { lo: *lo, hi: *hi },
    }
}

pub fn build_algebra<S: Scalar>(doc: &Document) -> Result<DGAlgebra<S>> {
    if doc.kind != Kind::Algebra {
        return Err(perr("kind", "expected an algebra document"));
    }
    document_field::<S>(doc)?;
    let labels = Labels::new(&doc.basis)?;
    let unit_label = doc.unit.as_deref().ok_or_else(|| perr("unit", "algebra documents name their unit"))?;
    let unit = labels.get(unit_label, "unit")?;
    if let Some(comp) = &doc.augmentation_complement {
        let mut given: Vec<usize> = comp.iter().enumerate().map(|(n, l)| labels.get(l, &format!("augmentation_complement[{n}]"))).collect::<Result<_>>()?;
        given.sort_unstable();
        let expected: Vec<usize> = (0..doc.basis.len()).filter(|i| *i != unit).collect();
        if given != expected {
            return Err(Error::ValidationError("augmentation_complement must list every basis element except the unit".into()));
        }
    }
    let weighted = doc.basis.iter().any(|b| b.weight.is_some());
    if weighted && doc.basis.iter().any(|b| b.weight.is_none()) {
        return Err(perr("basis", "weights must be given for all basis elements or none"));
    }
    if weighted && doc.basis[unit].weight != Some(0) {
        return Err(Error::ValidationError("the unit has weight 0".into()));
    }
    let differential = read_differential::<S>(doc, &labels)?;
    let product = read_table::<S>(&doc.product, "product", doc, &labels)?;
    if let Some(((i, j), _)) = product.iter().find(|((i, j), _)| *i == unit || *j == unit) {
        return Err(Error::ValidationError(format!(
            "product {}·{}: products with the unit are implied",
            doc.basis[*i].label, doc.basis[*j].label
        )));
    }
    let basis = doc.basis.iter().map(|b| BasisElement { label: b.label.clone(), degree: b.degree, weight: b.weight }).collect();
    let a = DGAlgebra::from_parts(AlgebraParts {
        name: doc.name.clone(),
        basis,
        unit,
        differential,
        product,
        certificate: Certificate::None,
        exact: range_of(&doc.exact),
        weight_exact: doc.weight_exact,
        origin: Origin::Document,
    })?;
    let certificate = match &doc.certificate {
        None => a.detect_certificate(),
        Some(claim) => {
            let c = Certificate::parse(claim).map_err(|e| perr("certificate", e.to_string()))?;
            if let Some(i) = a.ideal_indices().find(|i| !c.admits(a.degree(*i))) {
                return Err(Error::CertificateRejected {
                    claimed: c.name().into(),
                    reason: format!("{} sits in degree {}", a.label(i), a.degree(i)),
                });
            }
            c
        }
    };
    a.with_certificate(certificate).validated()
}

pub fn build_lie<S: Scalar>(doc: &Document) -> Result<DGLieAlgebra<S>> {
    if doc.kind != Kind::Lie {
        return Err(perr("kind", "expected a lie document"));
    }
    document_field::<S>(doc)?;
    let labels = Labels::new(&doc.basis)?;
    let differential = read_differential::<S>(doc, &labels)?;
    let bracket = read_table::<S>(&doc.bracket, "bracket", doc, &labels)?;
    let g = DGLieAlgebra::from_parts(LieParts {
        name: doc.name.clone(),
        basis: doc.basis.iter().map(|b| (b.label.clone(), b.degree)).collect(),
        differential,
        bracket,
    })?;
    g.validated()
}

pub fn build_complex<S: Scalar>(doc: &Document) -> Result<ChainComplex<S>> {
    if doc.kind != Kind::Complex {
        return Err(perr("kind", "expected a complex document"));
    }
    document_field::<S>(doc)?;
    let labels = Labels::new(&doc.basis)?;
    let differential = read_differential::<S>(doc, &labels)?;
    let mut space = GradedSpace::new();
    let mut pos = Vec::with_capacity(doc.basis.len());
    for b in &doc.basis {
        pos.push(space.push(b.degree, b.label.clone())?);
    }
    let mut by_pos: HashMap<(i64, usize), usize> = HashMap::new();
    for (i, b) in doc.basis.iter().enumerate() {
        by_pos.insert((b.degree, pos[i]), i);
    }
    let cx = ChainComplex::from_images(space, range_of(&doc.exact), |d, k| {
        differential[by_pos[&(d, k)]].iter().map(|(j, c)| (pos[*j], c.clone())).collect()
    })?;
    if !cx.differential().compose(cx.differential(), cx.space(), cx.space(), cx.space())?.is_zero() {
        return Err(Error::ValidationError(format!("{}: d² ≠ 0", doc.name)));
    }
    Ok(cx)
}

fn coeff<S: Scalar>(c: &S) -> Coefficient {
    Coefficient::Text(c.to_exact_string())
}

fn range_entry(r: DegreeRange) -> Option<RangeEntry> {
    (!r.is_all()).then_some(RangeEntry { lo: r.lo, hi: r.hi })
}

fn table_entries<S: Scalar>(table: &BTreeMap<(usize, usize), SparseVec<S>>, label: impl Fn(usize) -> String) -> Vec<ProductEntry> {
    table
        .iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|((i, j), v)| ProductEntry {
            left: label(*i),
            right: label(*j),
            result: v.iter().map(|(k, c)| Term { label: label(*k), coefficient: coeff(c) }).collect(),
        })
        .collect()
}

pub fn algebra_document<S: Scalar>(a: &DGAlgebra<S>) -> Document {
    let label = |i: usize| a.label(i).to_string();
    let differential = (0..a.dim())
        .flat_map(|i| a.d(i).iter().map(move |(j, c)| DifferentialEntry { from: label(i), to: label(*j), coefficient: coeff(c) }))
        .collect();
    Document {
        schema_version: SCHEMA_VERSION,
        name: a.name.clone(),
        field: S::field().to_string(),
        kind: Kind::Algebra,
        basis: a.basis().iter().map(|b| BasisEntry { label: b.label.clone(), degree: b.degree, weight: b.weight }).collect(),
        differential,
        product: table_entries(a.product_table(), label),
        bracket: Vec::new(),
        unit: Some(label(a.unit())),
        augmentation_complement: Some(a.ideal_indices().map(label).collect()),
        certificate: Some(a.certificate().name().to_string()),
        exact: range_entry(a.exact()),
        weight_exact: a.weight_exact(),
    }
}

pub fn lie_document<S: Scalar>(g: &DGLieAlgebra<S>) -> Document {
    let label = |i: usize| g.label(i).to_string();
    let differential = (0..g.dim())
        .flat_map(|i| g.d(i).iter().map(move |(j, c)| DifferentialEntry { from: label(i), to: label(*j), coefficient: coeff(c) }))
        .collect();
    // one entry per unordered pair; the other order follows by antisymmetry
    let half: BTreeMap<(usize, usize), SparseVec<S>> = g.bracket_table().iter().filter(|((i, j), _)| i <= j).map(|(k, v)| (*k, v.clone())).collect();
    Document {
        schema_version: SCHEMA_VERSION,
        name: g.name.clone(),
        field: S::field().to_string(),
        kind: Kind::Lie,
        basis: (0..g.dim()).map(|i| BasisEntry { label: label(i), degree: g.degree(i), weight: None }).collect(),
        differential,
        product: Vec::new(),
        bracket: table_entries(&half, label),
        unit: None,
        augmentation_complement: None,
        certificate: None,
        exact: None,
        weight_exact: None,
    }
}

pub fn complex_document<S: Scalar>(name: &str, c: &ChainComplex<S>) -> Document {
    let mut basis = Vec::new();
    let mut differential = Vec::new();
    for d in c.space().degrees() {
        for (k, l) in c.space().labels(d).iter().enumerate() {
            basis.push(BasisEntry { label: l.clone(), degree: d, weight: None });
            for (j, x) in c.d_of(d, k) {
                differential.push(DifferentialEntry { from: l.clone(), to: c.space().labels(d - 1)[j].clone(), coefficient: coeff(&x) });
            }
        }
    }
    Document {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        field: S::field().to_string(),
        kind: Kind::Complex,
        basis,
        differential,
        product: Vec::new(),
        bracket: Vec::new(),
        unit: None,
        augmentation_complement: None,
        certificate: None,
        exact: range_entry(c.known()),
        weight_exact: None,
    }
}

/// Pretty JSON with a trailing newline.
pub fn serialize(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorReport {
    pub code: String,
    pub message: String,
}

/// Output of one CLI run. Every map is ordered, so serialization is
/// deterministic.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub field: String,
    pub window: Option<TruncationWindow>,
    pub tables: BTreeMap<String, serde_json::Value>,
    pub verdicts: BTreeMap<String, String>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
    pub tool_version: String,
}

impl Report {
    pub fn new(command: &str, input_digest: String, field: FieldSpec, window: Option<TruncationWindow>) -> Self {
        Report {
            command: command.into(),
            input_digest,
            field: field.to_string(),
            window,
            tables: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            notes: Vec::new(),
            error: None,
            tool_version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn table(&mut self, name: &str, value: impl Serialize) {
        self.tables.insert(name.into(), serde_json::to_value(value).expect("tables serialize"));
    }

    pub fn verdict(&mut self, name: &str, value: impl Into<String>) {
        self.verdicts.insert(name.into(), value.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} (koszul {})\nfield: {}\n", self.command, self.tool_version, self.field);
        if let Some(w) = &self.window {
            out += &format!("window: [{}, {}], weight cap {}\n", w.deg_lo, w.deg_hi, w.weight_cap);
        }
        out += &format!("input sha256: {}\n", self.input_digest);
        for (name, v) in &self.verdicts {
            out += &format!("{name}: {v}\n");
        }
        for (name, t) in &self.tables {
            out += &format!("\n[{name}]\n");
            render(t, 0, &mut out);
        }
        for n in &self.notes {
            out += &format!("note: {n}\n");
        }
        if let Some(e) = &self.error {
            out += &format!("error ({}): {}\n", e.code, e.message);
        }
        out
    }
}

fn render(v: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) if m.values().all(|x| !x.is_object() && !x.is_array()) => {
            let line: Vec<String> = m.iter().map(|(k, x)| format!("{k}={}", scalar_text(x))).collect();
            out.push_str(&format!("{pad}{}\n", line.join("  ")));
        }
        Value::Object(m) => {
            for (k, x) in m {
                if x.is_object() || x.is_array() {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar_text(x)));
                }
            }
        }
        Value::Array(xs) => {
            for x in xs {
                render(x, indent, out);
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar_text(x))),
    }
}

fn scalar_text(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        x => x.to_string(),
    }
}
