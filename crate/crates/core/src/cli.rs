//! Batch commands: one invocation in, one report out.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::algebra::DGAlgebra;
use crate::bar::{algebra_homology, algebra_homology_by_weight, bar, koszul_dual};
use crate::corpus;
use crate::error::{Error, Result};
use crate::graded::{ChainComplex, HomologyTable, TruncationWindow};
use crate::harness::{artin_roundtrip, verify_circle_duality, verify_interval_consistency, verify_ug_duality, DualityReport, Verdict};
use crate::hochschild::{
    additive_factorization, cardinality_layer_with, conf_homology, free_calculation_with, goodwillie_truncation_free, hochschild_homology, OneManifold,
};
use crate::io::{algebra_document, digest, parse, read_document, ErrorReport, Parsed, Report};
use crate::lie::{ce_cochains, enveloping, mc_elements, pbw_check, ArtinLocalBase, DGLieAlgebra};
use crate::scalar::{FieldSpec, Scalar};
use crate::{Rational, F101, F11, F13, F2, F2147483647, F3, F32003, F5, F65521, F7};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Bar,
    KoszulDual,
    Hochschild,
    Layers,
    FreeCalc,
    Tower,
    Conf,
    Ce,
    Envelope,
    Pbw,
    Mc,
    VerifyCircle,
    VerifyInterval,
    VerifyUg,
    ArtinRoundtrip,
    AdditivePd,
}

impl Command {
    pub const ALL: [Command; 17] = [
        Command::Validate,
        Command::Bar,
        Command::KoszulDual,
        Command::Hochschild,
        Command::Layers,
        Command::FreeCalc,
        Command::Tower,
        Command::Conf,
        Command::Ce,
        Command::Envelope,
        Command::Pbw,
        Command::Mc,
        Command::VerifyCircle,
        Command::VerifyInterval,
        Command::VerifyUg,
        Command::ArtinRoundtrip,
        Command::AdditivePd,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Bar => "bar",
            Command::KoszulDual => "koszul-dual",
            Command::Hochschild => "hochschild",
            Command::Layers => "layers",
            Command::FreeCalc => "free-calc",
            Command::Tower => "tower",
            Command::Conf => "conf",
            Command::Ce => "ce",
            Command::Envelope => "envelope",
            Command::Pbw => "pbw",
            Command::Mc => "mc",
            Command::VerifyCircle => "verify-circle",
            Command::VerifyInterval => "verify-interval",
            Command::VerifyUg => "verify-ug",
            Command::ArtinRoundtrip => "artin-roundtrip",
            Command::AdditivePd => "additive-pd",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::InvalidInput(format!("unknown command {s:?}")))
    }

    /// `conf` is the only command without an input document.
    pub fn needs_input(&self) -> bool {
        *self != Command::Conf
    }

    fn uses_window(&self) -> bool {
        !matches!(self, Command::Conf | Command::Validate)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" | "machine-readable" => Ok(Format::Json),
            _ => Err(Error::InvalidInput(format!("unknown format {s:?}"))),
        }
    }

    pub fn render(&self, report: &Report) -> String {
        match self {
            Format::Text => report.to_text(),
            Format::Json => report.to_json(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Invocation {
    pub command: Command,
    /// Document text; `None` only for `conf`.
    pub input: Option<String>,
    pub window: (i64, i64),
    pub weight_cap: usize,
    /// Overrides the document's field.
    pub field: Option<String>,
    /// `layers`: a single cardinality instead of `1..=cap`.
    pub layer: Option<usize>,
    /// `tower`: the truncation stage (defaults to the cap).
    pub stage: Option<usize>,
    /// `conf`: number of points.
    pub points: Option<usize>,
    pub manifold: Option<String>,
    /// `mc`: the base is `𝕜[t]/t^artin`.
    pub artin: usize,
    /// Test hook: flips the rotation sign in the configuration model.
    pub flip_rotation: bool,
}

impl Invocation {
    pub fn new(command: Command, input: Option<String>) -> Self {
        Invocation {
            command,
            input,
            window: (-12, 12),
            weight_cap: 6,
            field: None,
            layer: None,
            stage: None,
            points: None,
            manifold: None,
            artin: 2,
            flip_rotation: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    /// 0 on success, 2 on a mismatch verdict, 1 on errors.
    pub exit_code: i32,
}

/// Reads a file, or falls back to a shipped example of that name.
pub fn resolve_input(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(std::fs::read_to_string(path)?);
    }
    let name = arg.strip_prefix("corpus:").unwrap_or(arg);
    corpus::text(name).map(str::to_string).map_err(|_| Error::InvalidInput(format!("{arg:?} is neither a file nor a shipped example")))
}

pub fn run(inv: &Invocation) -> Outcome {
    let input_digest = match &inv.input {
        Some(text) => digest(text.as_bytes()),
        None => digest(format!("{} points={:?} manifold={:?}", inv.command.name(), inv.points, inv.manifold).as_bytes()),
    };
    let field = select_field(inv);
    let window = TruncationWindow::new(inv.window.0, inv.window.1, inv.weight_cap);
    let mut report = Report::new(
        inv.command.name(),
        input_digest,
        *field.as_ref().unwrap_or(&FieldSpec::Rationals),
        window.as_ref().ok().copied().filter(|_| inv.command.uses_window()),
    );
    let result = field.and_then(|f| window.and_then(|w| dispatch(inv, f, &w, &mut report)));
    let exit_code = match result {
        Ok(()) if report.verdicts.values().any(|v| v == Verdict::Mismatch.as_str()) => 2,
        Ok(()) => 0,
        Err(e) => {
            let code = if e.is_mismatch() { 2 } else { 1 };
            if let Error::LayerMismatch { tables, .. } | Error::FreeCalcMismatch { tables } = &e {
                report.table(&tables.left_name, &tables.left);
                report.table(&tables.right_name, &tables.right);
            }
            report.error = Some(ErrorReport { code: e.code().into(), message: e.to_string() });
            code
        }
    };
    Outcome { report, exit_code }
}

fn select_field(inv: &Invocation) -> Result<FieldSpec> {
    if let Some(f) = &inv.field {
        return FieldSpec::parse(f);
    }
    match &inv.input {
        Some(text) => FieldSpec::parse(&read_document(text)?.field),
        None => Ok(FieldSpec::Rationals),
    }
}

fn dispatch(inv: &Invocation, field: FieldSpec, w: &TruncationWindow, report: &mut Report) -> Result<()> {
    match field {
        FieldSpec::Rationals => execute::<Rational>(inv, w, report),
        FieldSpec::Prime(p) => match p {
            2 => execute::<F2>(inv, w, report),
            3 => execute::<F3>(inv, w, report),
            5 => execute::<F5>(inv, w, report),
            7 => execute::<F7>(inv, w, report),
            11 => execute::<F11>(inv, w, report),
            13 => execute::<F13>(inv, w, report),
            101 => execute::<F101>(inv, w, report),
            32003 => execute::<F32003>(inv, w, report),
            65521 => execute::<F65521>(inv, w, report),
            2147483647 => execute::<F2147483647>(inv, w, report),
            _ => Err(Error::UnsupportedField(format!("fp:{p} (no compiled field of that characteristic)"))),
        },
    }
}

#[derive(Serialize)]
struct Row {
    degree: i64,
    dim: usize,
    reliable: bool,
}

#[derive(Serialize)]
struct WeightRow {
    weight: u32,
    degree: i64,
    dim: usize,
    reliable: bool,
}

fn rows(t: &HomologyTable) -> Vec<Row> {
    t.iter().map(|(d, r)| Row { degree: *d, dim: r.dim, reliable: r.reliable }).collect()
}

fn weight_rows(ts: &BTreeMap<u32, HomologyTable>) -> Vec<WeightRow> {
    ts.iter()
        .flat_map(|(wt, t)| t.iter().filter(|(_, r)| r.dim > 0).map(move |(d, r)| WeightRow { weight: *wt, degree: *d, dim: r.dim, reliable: r.reliable }))
        .collect()
}

fn basis_dims<S: Scalar>(a: &DGAlgebra<S>) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for i in 0..a.dim() {
        *out.entry(a.degree(i)).or_insert(0) += 1;
    }
    out
}

fn algebra_input<S: Scalar>(inv: &Invocation) -> Result<DGAlgebra<S>> {
    match parse::<S>(input(inv)?)? {
        Parsed::Algebra(a) => Ok(a),
        _ => Err(Error::InvalidInput(format!("{} expects an algebra document", inv.command.name()))),
    }
}

fn lie_input<S: Scalar>(inv: &Invocation) -> Result<DGLieAlgebra<S>> {
    match parse::<S>(input(inv)?)? {
        Parsed::Lie(g) => Ok(g),
        _ => Err(Error::InvalidInput(format!("{} expects a lie document", inv.command.name()))),
    }
}

fn complex_input<S: Scalar>(inv: &Invocation) -> Result<ChainComplex<S>> {
    match parse::<S>(input(inv)?)? {
        Parsed::Complex(c) => Ok(c),
        _ => Err(Error::InvalidInput(format!("{} expects a complex document", inv.command.name()))),
    }
}

fn input(inv: &Invocation) -> Result<&str> {
    inv.input.as_deref().ok_or_else(|| Error::InvalidInput(format!("{} needs an input document", inv.command.name())))
}

fn manifold(inv: &Invocation, default: OneManifold) -> Result<OneManifold> {
    inv.manifold.as_deref().map_or(Ok(default), OneManifold::parse)
}

fn duality(report: &mut Report, name: &str, d: &DualityReport) {
    report.verdict(name, d.verdict.as_str());
    report.notes.extend(d.notes.iter().cloned());
    report.table(name, d);
}

fn execute<S: Scalar>(inv: &Invocation, w: &TruncationWindow, report: &mut Report) -> Result<()> {
    match inv.command {
        Command::Validate => {
            let (kind, checks) = match parse::<S>(input(inv)?)? {
                Parsed::Algebra(a) => {
                    report.table("basis", basis_dims(&a));
                    report.verdict("certificate", a.certificate().name());
                    ("algebra", a.validate())
                }
                Parsed::Lie(g) => ("lie", g.validate()),
                Parsed::Complex(c) => {
                    report.table("basis", c.space().dims());
                    ("complex", Default::default())
                }
            };
            report.verdict("kind", kind);
            report.verdict("validation", if checks.is_ok() { "valid" } else { "invalid" });
            report.table("checks", &checks.checks);
            if !checks.is_ok() {
                return Err(Error::ValidationError(checks.failures.join("; ")));
            }
        }
        Command::Bar => {
            let a = algebra_input::<S>(inv)?;
            let b = bar(&a, w)?;
            report.table("homology", rows(&b.homology(w)?));
            report.table("homology_by_weight", weight_rows(&b.weighted.homology_by_weight(w)?));
            report.verdict("coalgebra", if b.coalgebra.validate().is_ok() { "valid" } else { "invalid" });
        }
        Command::KoszulDual => {
            let a = algebra_input::<S>(inv)?;
            let da = koszul_dual(&a, w)?;
            report.table("basis", basis_dims(&da));
            report.table("homology", rows(&algebra_homology(&da, w)?));
            report.table("homology_by_weight", weight_rows(&algebra_homology_by_weight(&da, w)?));
            report.table("document", algebra_document(&da));
        }
        Command::Hochschild => {
            let a = algebra_input::<S>(inv)?;
            let hh = hochschild_homology(&a, w)?;
            report.table("homology", rows(&hh.totals));
            report.table("homology_by_weight", weight_rows(&hh.by_weight));
        }
        Command::Layers => {
            let a = algebra_input::<S>(inv)?;
            let layers: Vec<usize> = match inv.layer {
                Some(i) => vec![i],
                None => (1..=w.weight_cap).collect(),
            };
            for i in layers {
                let l = cardinality_layer_with(&a, i, w, inv.flip_rotation)?;
                report.table(&format!("layer_{i}"), &l);
            }
            report.verdict("layers", "agree");
        }
        Command::FreeCalc => {
            let v = complex_input::<S>(inv)?;
            let tables = free_calculation_with::<S>(v.space(), w, inv.flip_rotation)?;
            report.table("homology_by_weight", weight_rows(&tables));
            report.verdict("free-calc", "agree");
        }
        Command::Tower => {
            let v = complex_input::<S>(inv)?;
            let t = goodwillie_truncation_free::<S>(v.space(), inv.stage.unwrap_or(w.weight_cap), w)?;
            if let Some(c) = t.convergence {
                report.verdict("convergence", if c { "holds" } else { "fails" });
            }
            report.table("tower", &t);
        }
        Command::Conf => {
            let points = inv.points.ok_or_else(|| Error::InvalidInput("conf needs --points".into()))?;
            let c = conf_homology(points, manifold(inv, OneManifold::Circle)?)?;
            report.table("conf", &c);
        }
        Command::Ce => {
            let g = lie_input::<S>(inv)?;
            let c = ce_cochains(&g, w)?;
            report.table("basis", basis_dims(&c));
            report.table("homology", rows(&algebra_homology(&c, w)?));
            report.table("document", algebra_document(&c));
        }
        Command::Envelope => {
            let g = lie_input::<S>(inv)?;
            let u = enveloping(&g, w.weight_cap)?;
            report.table("basis", basis_dims(&u));
            report.table("homology", rows(&algebra_homology(&u, w)?));
            report.table("document", algebra_document(&u));
        }
        Command::Pbw => {
            let g = lie_input::<S>(inv)?;
            let p = pbw_check(&g, w.weight_cap)?;
            report.verdict("pbw", if p.matches { Verdict::VerifiedInWindow.as_str() } else { Verdict::Mismatch.as_str() });
            report.table("weight_totals", p.weight_totals());
            report.table("pbw", &p);
        }
        Command::Mc => {
            let g = lie_input::<S>(inv)?;
            let base = ArtinLocalBase::<S>::truncated_polynomial(inv.artin)?;
            let m = mc_elements(&g, &base)?;
            if let Some(d) = m.dimension {
                report.verdict("dimension", d.to_string());
            }
            report.table("mc", &m);
        }
        Command::VerifyCircle => {
            let a = algebra_input::<S>(inv)?;
            duality(report, "circle", &verify_circle_duality(&a, w)?);
        }
        Command::VerifyInterval => {
            let a = algebra_input::<S>(inv)?;
            duality(report, "interval", &verify_interval_consistency(&a, w)?);
        }
        Command::VerifyUg => {
            let g = lie_input::<S>(inv)?;
            duality(report, "ug", &verify_ug_duality(&g, w)?);
        }
        Command::ArtinRoundtrip => {
            let a = algebra_input::<S>(inv)?;
            let r = artin_roundtrip(&a, w)?;
            report.verdict("certificate", if r.certificate.holds() { "holds" } else { "fails" });
            report.verdict("double-dual", r.double_dual.verdict.as_str());
            report.verdict(
                "artin-roundtrip",
                if r.verified {
                    Verdict::VerifiedInWindow.as_str()
                } else if r.double_dual.verdict == Verdict::InconclusiveWindowTooSmall {
                    Verdict::InconclusiveWindowTooSmall.as_str()
                } else {
                    Verdict::Mismatch.as_str()
                },
            );
            report.table("artin", &r);
        }
        Command::AdditivePd => {
            let e = complex_input::<S>(inv)?;
            duality(report, "additive", &additive_factorization(manifold(inv, OneManifold::Circle)?, &e)?);
        }
    }
    Ok(())
}
