//! Dimension-level verification of the duality statements.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{Certificate, DGAlgebra};
use crate::bar::{algebra_homology, bar, double_dual_compare, koszul_dual};
use crate::error::{Error, Result};
use crate::graded::{parity_sign, DegreeRange, GradedSpace, HomologyTable, TruncationWindow};
use crate::hochschild::hochschild_homology;
use crate::lie::{ce_cochains, enveloping, DGLieAlgebra};
use crate::linalg::canonical_vec;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    VerifiedInWindow,
    Mismatch,
    InconclusiveWindowTooSmall,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::VerifiedInWindow => "verified-in-window",
            Verdict::Mismatch => "mismatch",
            Verdict::InconclusiveWindowTooSmall => "inconclusive-window-too-small",
        }
    }
}

/// How a left degree is matched to a right degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// `d` against `−d`.
    Dual,
    /// `d` against `d`.
    Same,
}

impl Pairing {
    fn partner(&self, d: i64) -> i64 {
        match self {
            Pairing::Dual => -d,
            Pairing::Same => d,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    /// Degree on the left side; the right side is read at the paired degree.
    pub degree: i64,
    pub left_dim: usize,
    pub right_dim: usize,
    pub matches: bool,
    pub stale: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub left: String,
    pub right: String,
    pub window: TruncationWindow,
    pub pairing: Pairing,
    pub rows: Vec<ReportRow>,
    pub weight_rows: BTreeMap<u32, Vec<ReportRow>>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

fn rows(pairing: Pairing, w: &TruncationWindow, left: &HomologyTable, right: &HomologyTable) -> Vec<ReportRow> {
    w.degrees()
        .filter(|d| w.contains(pairing.partner(*d)))
        .map(|d| {
            let l = left.get(&d);
            let r = right.get(&pairing.partner(d));
            let left_dim = l.map_or(0, |x| x.dim);
            let right_dim = r.map_or(0, |x| x.dim);
            let stale = !(l.is_some_and(|x| x.reliable) && r.is_some_and(|x| x.reliable));
            ReportRow { degree: d, left_dim, right_dim, matches: left_dim == right_dim, stale }
        })
        .collect()
}

impl DualityReport {
    /// Report comparing two tables; call [`DualityReport::finish`] after
    /// adding any per-weight rows.
    pub fn compare(left_name: &str, right_name: &str, w: &TruncationWindow, pairing: Pairing, left: &HomologyTable, right: &HomologyTable) -> Self {
        DualityReport {
            left: left_name.into(),
            right: right_name.into(),
            window: *w,
            pairing,
            rows: rows(pairing, w, left, right),
            weight_rows: BTreeMap::new(),
            verdict: Verdict::InconclusiveWindowTooSmall,
            notes: Vec::new(),
        }
    }

    /// Adds per-weight rows for every weight present on either side.
    pub fn add_weights(&mut self, left: &BTreeMap<u32, HomologyTable>, right: &BTreeMap<u32, HomologyTable>) {
        let empty = HomologyTable::new();
        for wt in left.keys().chain(right.keys()) {
            let l = left.get(wt);
            let r = right.get(wt);
            // a weight computed on one side only is incomplete on the other
            let (l, r, missing) = match (l, r) {
                (Some(l), Some(r)) => (l, r, false),
                (Some(l), None) => (l, &empty, true),
                (None, Some(r)) => (&empty, r, true),
                (None, None) => continue,
            };
            let mut rs = rows(self.pairing, &self.window, l, r);
            if missing {
                rs.iter_mut().for_each(|x| x.stale = true);
            }
            self.weight_rows.insert(*wt, rs);
        }
    }

    fn all_rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().chain(self.weight_rows.values().flatten())
    }

    /// Sets the verdict: a mismatch on any non-stale row decides; otherwise
    /// verified when at least one row is non-stale.
    pub fn finish(&mut self) {
        self.verdict = if self.all_rows().any(|r| !r.stale && !r.matches) {
            Verdict::Mismatch
        } else if self.all_rows().any(|r| !r.stale) {
            Verdict::VerifiedInWindow
        } else {
            Verdict::InconclusiveWindowTooSmall
        };
        if !self.weight_rows.is_empty() && self.rows.iter().all(|r| r.stale) {
            self.notes.push("totals are stale throughout; verdict rests on the per-weight tables".into());
        }
    }

    pub fn mismatched_rows(&self) -> usize {
        self.all_rows().filter(|r| !r.stale && !r.matches).count()
    }

    /// Non-stale `(degree, dim)` pairs on the left.
    pub fn left_dims(&self) -> BTreeMap<i64, usize> {
        self.rows.iter().filter(|r| !r.stale).map(|r| (r.degree, r.left_dim)).collect()
    }

    /// Non-stale dims on the right, keyed by the right-hand degree.
    pub fn right_dims(&self) -> BTreeMap<i64, usize> {
        self.rows.iter().filter(|r| !r.stale).map(|r| (self.pairing.partner(r.degree), r.right_dim)).collect()
    }
}

fn require_certificate<S: Scalar>(a: &DGAlgebra<S>, operation: &str) -> Result<()> {
    if a.is_ground() || a.certificate() != Certificate::None {
        Ok(())
    } else {
        Err(Error::CertificateMissing { operation: operation.into() })
    }
}

/// `HH(a)` against `HH(D a)` with degrees paired `d ↔ −d`, totals and,
/// when both sides carry auxiliary weights, weight by weight.
pub fn verify_circle_duality<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<DualityReport> {
    require_certificate(a, "circle duality")?;
    let da = koszul_dual(a, &w.mirrored())?;
    pair_hochschild(a, &da, w)
}

fn pair_hochschild<S: Scalar>(left: &DGAlgebra<S>, right: &DGAlgebra<S>, w: &TruncationWindow) -> Result<DualityReport> {
    let lh = hochschild_homology(left, w)?;
    let rh = hochschild_homology(right, &w.mirrored())?;
    let mut report = DualityReport::compare(&format!("HH({})", left.name), &format!("HH({})", right.name), w, Pairing::Dual, &lh.totals, &rh.totals);
    if !lh.by_weight.is_empty() && !rh.by_weight.is_empty() {
        report.add_weights(&lh.by_weight, &rh.by_weight);
    }
    report.finish();
    Ok(report)
}

/// Unnormalized two-sided bar complex `𝕜 ⊗_A 𝕜` (all basis elements,
/// the unit included, as letters) against the normalized bar construction.
pub fn verify_interval_consistency<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<DualityReport> {
    require_certificate(a, "interval consistency")?;
    let left = unnormalized_two_sided_bar(a, w)?;
    let right = bar(a, w)?.homology(w)?;
    let mut report = DualityReport::compare("k ⊗_A k", &format!("B({})", a.name), w, Pairing::Same, &left, &right);
    if a.certificate() == Certificate::Coconnective && !a.is_ground() {
        report.notes.push("unit letters make the unnormalized complex unbounded below the top length; rows are stale".into());
    }
    report.finish();
    Ok(report)
}

fn unnormalized_two_sided_bar<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<HomologyTable> {
    let connected = a.is_ground() || a.certificate() == Certificate::ConnectedIdeal;
    let top = w.deg_hi + 1;
    let (max_len, lo) = if connected { (usize::MAX, None) } else { (w.weight_cap, Some(w.deg_lo - 1)) };
    let letters: Vec<(usize, i64)> = (0..a.dim()).map(|i| (i, a.degree(i) + 1)).collect();
    let mut words: Vec<(Vec<usize>, i64)> = vec![(Vec::new(), 0)];
    let mut frontier = words.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (wd, d) in &frontier {
            if wd.len() >= max_len {
                continue;
            }
            for (i, ld) in &letters {
                let nd = d + ld;
                if nd > top && connected {
                    continue;
                }
                let mut x = wd.clone();
                x.push(*i);
                next.push((x, nd));
            }
        }
        if words.len() + next.len() > 2_000_000 {
            return Err(Error::CapExceeded { cap: 2_000_000, context: "unnormalized bar words".into() });
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    words.retain(|(_, d)| *d <= top && lo.is_none_or(|l| *d >= l));
    let mut space = GradedSpace::new();
    let mut index = std::collections::HashMap::new();
    for (wd, d) in &words {
        let label = format!("[{}]", wd.iter().map(|i| a.label(*i)).collect::<Vec<_>>().join("|"));
        let k = space.push(*d, label)?;
        index.insert(wd.clone(), k);
    }
    let by_degree: BTreeMap<i64, Vec<&Vec<usize>>> =
        words.iter().fold(BTreeMap::new(), |mut m, (wd, d)| {
            m.entry(*d).or_insert_with(Vec::new).push(wd);
            m
        });
    let unit = a.unit();
    let known = if connected { a.exact().intersect(&DegreeRange::at_most(top)) } else { DegreeRange::between(1, 0) };
    let cx = crate::graded::ChainComplex::from_images(space, known, |d, k| {
        let word = by_degree[&d][k];
        let mut terms: Vec<(Vec<usize>, S)> = Vec::new();
        let mut eps = 0i64;
        // augmentation on the left end
        if word.first() == Some(&unit) {
            terms.push((word[1..].to_vec(), S::one()));
        }
        for k in 0..word.len() {
            let sign: S = -parity_sign::<S>(eps);
            for (x, c) in a.d(word[k]) {
                let mut v = word.clone();
                v[k] = *x;
                terms.push((v, sign.clone() * c.clone()));
            }
            eps += a.degree(word[k]) + 1;
            if k + 1 < word.len() {
                let sign: S = parity_sign(eps);
                for (x, c) in a.mul(word[k], word[k + 1]) {
                    let mut v = word[..k].to_vec();
                    v.push(x);
                    v.extend_from_slice(&word[k + 2..]);
                    terms.push((v, sign.clone() * c));
                }
            }
        }
        // augmentation on the right end
        if word.last() == Some(&unit) {
            terms.push((word[..word.len() - 1].to_vec(), parity_sign(eps)));
        }
        canonical_vec(terms.into_iter().filter_map(|(v, c)| index.get(&v).map(|i| (*i, c))))
    })?;
    cx.homology(w)
}

/// `HH(U𝔤)` against `HH(C*𝔤)`, paired as in [`verify_circle_duality`].
pub fn verify_ug_duality<S: Scalar>(g: &DGLieAlgebra<S>, w: &TruncationWindow) -> Result<DualityReport> {
    if !g.is_connected() {
        return Err(Error::CertificateMissing { operation: format!("U({}) is connected only for 𝔤 in degrees ≥ 1", g.name) });
    }
    let u = enveloping(g, w.weight_cap)?;
    let c = ce_cochains(g, &w.mirrored())?;
    pair_hochschild(&u, &c, w)
}

/// Checks on `D a` for the Artin side of the correspondence.
#[derive(Clone, Debug, Serialize)]
pub struct ArtinCertificate {
    pub algebra: String,
    /// Homology vanishes in negative degrees of the window.
    pub connective: bool,
    /// Homology is finite-dimensional in every reliable window degree, and
    /// some degree is reliable.
    pub finite: bool,
    /// Window degrees beyond the truncated model.
    pub stale_degrees: Vec<i64>,
    /// The augmentation ideal is closed under d and products.
    pub augmented: bool,
}

impl ArtinCertificate {
    pub fn holds(&self) -> bool {
        self.connective && self.finite && self.augmented
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ArtinRoundtrip {
    pub certificate: ArtinCertificate,
    pub double_dual: DualityReport,
    pub verified: bool,
}

pub fn artin_roundtrip<S: Scalar>(a: &DGAlgebra<S>, w: &TruncationWindow) -> Result<ArtinRoundtrip> {
    let da = koszul_dual(a, w)?;
    let h = algebra_homology(&da, w)?;
    let unit = da.unit();
    let ideal: Vec<usize> = da.ideal_indices().collect();
    let augmented = ideal.iter().all(|i| da.d(*i).iter().all(|(j, _)| *j != unit))
        && ideal.iter().all(|i| ideal.iter().all(|j| da.mul(*i, *j).iter().all(|(k, _)| *k != unit)));
    let certificate = ArtinCertificate {
        algebra: da.name.clone(),
        connective: h.iter().filter(|(d, _)| **d < 0).all(|(_, r)| r.reliable && r.dim == 0),
        finite: h.values().any(|r| r.reliable),
        stale_degrees: h.iter().filter(|(_, r)| !r.reliable).map(|(d, _)| *d).collect(),
        augmented,
    };
    let double_dual = double_dual_compare(a, w)?;
    let verified = certificate.holds() && double_dual.verdict == Verdict::VerifiedInWindow;
    Ok(ArtinRoundtrip { certificate, double_dual, verified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{free_algebra, ground, sym_algebra, trivial_algebra};
    use crate::graded::{ChainComplex, GradedSpace};
    use crate::lie::LieParts;
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
    fn ground_is_self_dual() {
        let w = win(-4, 4, 3);
        let r = verify_circle_duality(&ground::<Q>(), &w).unwrap();
        assert_eq!(r.verdict, Verdict::VerifiedInWindow);
        assert_eq!(r.left_dims().into_iter().filter(|(_, n)| *n > 0).collect::<Vec<_>>(), vec![(0, 1)]);
        let r = verify_interval_consistency(&ground::<Q>(), &w).unwrap();
        assert_eq!(r.verdict, Verdict::VerifiedInWindow);
    }

    #[test]
    fn exterior_circle_duality() {
        let w = win(-12, 12, 6);
        let a = trivial_algebra(&gens(&[1])).unwrap();
        let r = verify_circle_duality(&a, &w).unwrap();
        assert_eq!(r.verdict, Verdict::VerifiedInWindow, "{:?}", r.rows);
        let left = r.left_dims();
        for d in 0..=11 {
            assert_eq!(left.get(&d), Some(&1), "degree {d}");
        }
        let right = r.right_dims();
        for d in -11..=0 {
            assert_eq!(right.get(&d), Some(&1), "degree {d}");
        }
    }

    #[test]
    fn interval_consistency_examples() {
        let w = win(-2, 10, 5);
        let a = trivial_algebra(&gens(&[1])).unwrap();
        let r = verify_interval_consistency(&a, &w).unwrap();
        assert_eq!(r.verdict, Verdict::VerifiedInWindow, "{:?}", r.rows);
        assert!(r.rows.iter().filter(|x| !x.stale).all(|x| x.left_dim == usize::from(x.degree >= 0 && x.degree % 2 == 0)));
        let f = free_algebra(&gens(&[2]), &w).unwrap();
        let r = verify_interval_consistency(&f, &w).unwrap();
        assert_eq!(r.verdict, Verdict::VerifiedInWindow, "{:?}", r.rows);
        let dims: BTreeMap<i64, usize> = r.left_dims().into_iter().filter(|(_, n)| *n > 0).collect();
        assert_eq!(dims, BTreeMap::from([(0, 1), (3, 1)]));
    }

    #[test]
    fn transposed_tables_for_free_and_trivial() {
        let w = win(-10, 10, 5);
        for deg in [1, 2] {
            let f = verify_circle_duality(&free_algebra(&gens(&[deg]), &w).unwrap(), &w).unwrap();
            let t = verify_circle_duality(&trivial_algebra(&gens(&[-deg - 1])).unwrap(), &w).unwrap();
            for (wt, rows) in &f.weight_rows {
                let Some(other) = t.weight_rows.get(wt) else { continue };
                for r in rows.iter().filter(|r| !r.stale) {
                    if let Some(o) = other.iter().find(|o| o.degree == -r.degree && !o.stale) {
                        assert_eq!((r.left_dim, r.right_dim), (o.right_dim, o.left_dim));
                    }
                }
            }
        }
    }

    #[test]
    fn ug_duality_abelian() {
        let w = win(-10, 10, 6);
        for degs in [vec![1], vec![2]] {
            let g = DGLieAlgebra::abelian(&gens(&degs)).unwrap();
            let r = verify_ug_duality(&g, &w).unwrap();
            assert_eq!(r.verdict, Verdict::VerifiedInWindow, "{degs:?}: {:?}", r.weight_rows);
        }
    }

    #[test]
    fn ug_duality_heisenberg() {
        let g = DGLieAlgebra::from_parts(LieParts {
            name: "heis".into(),
            basis: vec![("x".into(), 1), ("y".into(), 1), ("z".into(), 2)],
            differential: vec![vec![]; 3],
            bracket: BTreeMap::from([((0, 1), vec![(2, Q::from_i64(1))])]),
        })
        .unwrap();
        let r = verify_ug_duality(&g, &win(-6, 6, 6)).unwrap();
        assert_ne!(r.verdict, Verdict::Mismatch, "{:?}", r.rows);
    }

    #[test]
    fn artin_roundtrip_free_coconnective() {
        let w = win(-12, 12, 6);
        for degs in [vec![-2], vec![-2, -3]] {
            let a = free_algebra(&gens(&degs), &w).unwrap();
            let r = artin_roundtrip(&a, &w).unwrap();
            assert!(r.certificate.holds(), "{degs:?}: {:?}", r.certificate);
            assert!(r.verified, "{degs:?}: {:?}", r.double_dual.rows);
        }
        let r = artin_roundtrip(&sym_algebra(&gens(&[-2]), &w).unwrap(), &w).unwrap();
        assert!(r.certificate.augmented);
    }

    #[test]
    fn nonconnected_lie_is_refused() {
        let g = DGLieAlgebra::abelian(&gens(&[0])).unwrap();
        assert!(matches!(verify_ug_duality(&g, &win(-4, 4, 3)), Err(Error::CertificateMissing { .. })));
    }
}
