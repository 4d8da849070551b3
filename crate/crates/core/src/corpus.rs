//! The shipped example documents.

use crate::algebra::{free_algebra, ground, sym_algebra, trivial_algebra, DGAlgebra};
use crate::error::{Error, Result};
use crate::graded::{ChainComplex, GradedSpace, TruncationWindow};
use crate::io::{build_algebra, build_complex, build_lie, read_document, Document, Kind};
use crate::lie::DGLieAlgebra;
use crate::scalar::Scalar;

macro_rules! shipped {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../corpus/", $name, ".json")))),*]
    };
}

/// `(name, document text)` for every shipped example.
pub const DOCUMENTS: &[(&str, &str)] = shipped![
    "ground",
    "exterior",
    "polynomial_dm2",
    "free_d1",
    "free_d2",
    "free_d1_d1",
    "free_d1_d2",
    "free_dm2",
    "free_dm2_dm3",
    "sl2",
    "affine_line",
    "abelian_d1",
    "abelian_d2",
    "abelian_d1_d1",
    "heisenberg_mc",
    "mc_quadratic",
    "point_d0",
    "point_d3",
    "two_term",
    "line_d1",
    "line_d2",
];

pub fn text(name: &str) -> Result<&'static str> {
    DOCUMENTS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::InvalidInput(format!("no shipped example named {name:?}")))
}

pub fn document(name: &str) -> Result<Document> {
    read_document(text(name)?)
}

pub fn names(kind: Kind) -> Vec<&'static str> {
    DOCUMENTS.iter().filter(|(_, t)| read_document(t).is_ok_and(|d| d.kind == kind)).map(|(n, _)| *n).collect()
}

pub fn algebra<S: Scalar>(name: &str) -> Result<DGAlgebra<S>> {
    build_algebra(&document(name)?)
}

pub fn lie<S: Scalar>(name: &str) -> Result<DGLieAlgebra<S>> {
    build_lie(&document(name)?)
}

pub fn complex<S: Scalar>(name: &str) -> Result<ChainComplex<S>> {
    build_complex(&document(name)?)
}

fn generators<S: Scalar>(degrees: &[i64]) -> ChainComplex<S> {
    let mut s = GradedSpace::new();
    for (i, d) in degrees.iter().enumerate() {
        let label = if degrees.len() == 1 { "v".to_string() } else { format!("v{}", i + 1) };
        s.push(*d, label).expect("distinct labels");
    }
    ChainComplex::from_space(s)
}

/// The algebra examples, built by the constructors they were generated from.
pub fn generated_algebras<S: Scalar>() -> Result<Vec<(&'static str, DGAlgebra<S>)>> {
    let cap5 = TruncationWindow::new(-2, 12, 5)?;
    let cap6 = TruncationWindow::new(-12, 12, 6)?;
    let mut x = GradedSpace::new();
    x.push(1, "x".into())?;
    let mut y = GradedSpace::new();
    y.push(-2, "y".into())?;
    Ok(vec![
        ("ground", ground()),
        ("exterior", trivial_algebra(&ChainComplex::from_space(x))?.with_name("exterior")),
        ("polynomial_dm2", sym_algebra(&ChainComplex::from_space(y), &cap6)?.with_name("polynomial_dm2")),
        ("free_d1", free_algebra(&generators(&[1]), &cap5)?.with_name("free_d1")),
        ("free_d2", free_algebra(&generators(&[2]), &cap5)?.with_name("free_d2")),
        ("free_d1_d1", free_algebra(&generators(&[1, 1]), &cap5)?.with_name("free_d1_d1")),
        ("free_d1_d2", free_algebra(&generators(&[1, 2]), &cap5)?.with_name("free_d1_d2")),
        ("free_dm2", free_algebra(&generators(&[-2]), &cap6)?.with_name("free_dm2")),
        ("free_dm2_dm3", free_algebra(&generators(&[-2, -3]), &cap6)?.with_name("free_dm2_dm3")),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{algebra_document, complex_document, lie_document, serialize};
    use crate::scalar::Rational;

    type Q = Rational;

    /// Rewrites the generated algebra documents:
    /// `cargo test -p koszul-core regenerate_corpus -- --ignored`.
    #[test]
    #[ignore]
    fn regenerate_corpus() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
        for (name, a) in generated_algebras::<Q>().unwrap() {
            std::fs::write(dir.join(format!("{name}.json")), serialize(&algebra_document(&a))).unwrap();
        }
    }

    #[test]
    fn generated_documents_match_constructors() {
        for (name, a) in generated_algebras::<Q>().unwrap() {
            assert_eq!(text(name).unwrap(), serialize(&algebra_document(&a)), "{name}");
        }
    }

    #[test]
    fn every_document_parses_and_round_trips() {
        for (name, t) in DOCUMENTS {
            let doc = read_document(t).unwrap();
            let again = match doc.kind {
                Kind::Algebra => algebra_document(&build_algebra::<Q>(&doc).unwrap()),
                Kind::Lie => lie_document(&build_lie::<Q>(&doc).unwrap()),
                Kind::Complex => complex_document(&doc.name, &build_complex::<Q>(&doc).unwrap()),
            };
            let twice = match again.kind {
                Kind::Algebra => algebra_document(&build_algebra::<Q>(&again).unwrap()),
                Kind::Lie => lie_document(&build_lie::<Q>(&again).unwrap()),
                Kind::Complex => complex_document(&again.name, &build_complex::<Q>(&again).unwrap()),
            };
            assert_eq!(again, twice, "{name}");
            assert_eq!(again.basis.len(), doc.basis.len(), "{name}");
        }
    }

    #[test]
    fn kinds_are_sorted_out() {
        assert_eq!(names(Kind::Algebra).len(), 9);
        assert_eq!(names(Kind::Lie).len(), 7);
        assert_eq!(names(Kind::Complex).len(), 5);
        assert!(text("missing").is_err());
    }
}
