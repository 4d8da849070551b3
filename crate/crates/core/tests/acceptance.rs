//! Acceptance run: one line per criterion, exit status 1 if any fails.
//!
//! `cargo test -p koszul-core --test acceptance`

use std::collections::BTreeMap;
use std::time::Instant;

use koszul_core::algebra::{free_algebra, trivial_algebra, Certificate, DGAlgebra};
use koszul_core::bar::{algebra_homology, bar, koszul_dual};
use koszul_core::cli::{run, Command, Invocation};
use koszul_core::corpus;
use koszul_core::graded::{reliable_dims, ChainComplex, DegreeRange, GradedSpace, HomologyTable, TruncationWindow};
use koszul_core::harness::{artin_roundtrip, verify_circle_duality, verify_ug_duality, Verdict};
use koszul_core::hochschild::{additive_factorization, cardinality_layer, conf_homology, convergence_probe, free_calculation, hochschild_homology, OneManifold};
use koszul_core::io::{digest, Kind};
use koszul_core::lie::{ce_cochains, mc_elements, pbw_check, ArtinLocalBase, DGLieAlgebra};
use koszul_core::linalg::canonical_vec;
use koszul_core::{Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = Rational;
type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: koszul_core::Error) -> String {
    e.to_string()
}

fn window(lo: i64, hi: i64, cap: usize) -> TruncationWindow {
    TruncationWindow::new(lo, hi, cap).unwrap()
}

fn generators(degrees: &[i64]) -> ChainComplex<Q> {
    let mut s = GradedSpace::new();
    for (i, d) in degrees.iter().enumerate() {
        s.push(*d, format!("v{i}")).unwrap();
    }
    ChainComplex::from_space(s)
}

/// Window a shipped algebra was truncated for.
fn corpus_window(name: &str) -> TruncationWindow {
    if name.starts_with("free_d") && !name.starts_with("free_dm") {
        window(-2, 12, 5)
    } else {
        window(-12, 12, 6)
    }
}

/// Every window row reliable, and dims as given (absent means zero).
fn exact_rows(t: &HomologyTable, expected: &BTreeMap<i64, usize>) -> Check {
    for (d, r) in t {
        ensure(r.reliable, || format!("degree {d} is stale"))?;
        let want = expected.get(d).copied().unwrap_or(0);
        ensure(r.dim == want, || format!("degree {d}: got {}, expected {want}", r.dim))?;
    }
    Ok(())
}

// Rank oracle over F_p, p = 1_000_003, on small dense integer matrices.

const P: i64 = 1_000_003;

fn rank_mod_p(mut rows: Vec<Vec<i64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    for r in rows.iter_mut() {
        for x in r.iter_mut() {
            *x = x.rem_euclid(P);
        }
    }
    let inv = |a: i64| {
        let (mut base, mut e, mut acc) = (a, P - 2, 1i64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % P;
            }
            base = base * base % P;
            e >>= 1;
        }
        acc
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|i| rows[*i][c] != 0) else { continue };
        rows.swap(rank, pivot);
        let scale = inv(rows[rank][c]);
        for x in rows[rank].iter_mut() {
            *x = *x * scale % P;
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..cols {
                    rows[i][j] = (rows[i][j] - f * rows[rank][j]).rem_euclid(P);
                }
            }
        }
        rank += 1;
    }
    rank
}

// Configuration oracle: the discretized configuration space of ordered
// points on a cycle graph, as a cube complex.

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum GraphCell {
    Vertex(usize),
    Edge(usize),
}

fn closure(c: GraphCell, n: usize) -> Vec<usize> {
    match c {
        GraphCell::Vertex(v) => vec![v],
        GraphCell::Edge(e) => vec![e, (e + 1) % n],
    }
}

fn conf_cells(points: usize, n: usize) -> Vec<Vec<GraphCell>> {
    let all: Vec<GraphCell> = (0..n).map(GraphCell::Vertex).chain((0..n).map(GraphCell::Edge)).collect();
    let mut out = vec![vec![]];
    for _ in 0..points {
        let mut next = Vec::new();
        for partial in &out {
            let used: Vec<usize> = partial.iter().flat_map(|c| closure(*c, n)).collect();
            for c in &all {
                if closure(*c, n).iter().all(|v| !used.contains(v)) {
                    let mut p = partial.clone();
                    p.push(*c);
                    next.push(p);
                }
            }
        }
        out = next;
    }
    out
}

fn conf_nerve_dims(points: usize) -> BTreeMap<usize, usize> {
    let n = points + 2;
    let cells = conf_cells(points, n);
    let dim = |c: &Vec<GraphCell>| c.iter().filter(|x| matches!(x, GraphCell::Edge(_))).count();
    let by_dim: Vec<Vec<&Vec<GraphCell>>> = (0..=points).map(|k| cells.iter().filter(|c| dim(c) == k).collect()).collect();
    let boundary = |k: usize| -> Vec<Vec<i64>> {
        let targets = &by_dim[k - 1];
        let index: BTreeMap<&Vec<GraphCell>, usize> = targets.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        by_dim[k]
            .iter()
            .map(|c| {
                let mut row = vec![0i64; targets.len()];
                let edges = c.iter().enumerate().filter_map(|(slot, x)| if let GraphCell::Edge(e) = x { Some((slot, *e)) } else { None });
                for (pos, (slot, e)) in edges.enumerate() {
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    for (end, s) in [((e + 1) % n, sign), (e, -sign)] {
                        let mut face = (*c).clone();
                        face[slot] = GraphCell::Vertex(end);
                        row[index[&face]] += s;
                    }
                }
                row
            })
            .collect()
    };
    let ranks: Vec<usize> = (0..=points + 1).map(|k| if k == 0 || k > points || by_dim[k].is_empty() { 0 } else { rank_mod_p(boundary(k)) }).collect();
    (0..=points).map(|k| (k, by_dim[k].len() - ranks[k] - ranks[k + 1])).filter(|(_, d)| *d > 0).collect()
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

// Hochschild oracle for Λ(x), |x| = 1: the unnormalized complex
// A^{⊗(n+1)} with the alternating face sum, total degree #x + n.

fn exterior_hh_dims(max_degree: usize) -> BTreeMap<i64, usize> {
    // a tuple is a bitmask over n+1 slots; bit set means x
    let chains = |n: usize, k: usize| -> Vec<u32> { (0u32..(1 << (n + 1))).filter(|m| m.count_ones() as usize == k).collect() };
    let b = |n: usize, k: usize| -> Vec<Vec<i64>> {
        let src = chains(n, k);
        let tgt = chains(n - 1, k);
        let index: BTreeMap<u32, usize> = tgt.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        src.iter()
            .map(|m| {
                let mut row = vec![0i64; tgt.len()];
                let bit = |i: usize| (m >> i) & 1;
                for i in 0..n {
                    if bit(i) + bit(i + 1) == 2 {
                        continue;
                    }
                    // merge slots i and i+1
                    let low = m & ((1 << i) - 1);
                    let merged = (bit(i) | bit(i + 1)) << i;
                    let high = (m >> (i + 2)) << (i + 1);
                    row[index[&(low | merged | high)]] += if i % 2 == 0 { 1 } else { -1 };
                }
                // last face: a_n a_0 ⊗ a_1 ⊗ … ⊗ a_{n−1}
                if bit(n) + bit(0) < 2 {
                    let koszul = bit(n) * (m & ((1 << n) - 1)).count_ones();
                    let sign = if (n as u32 + koszul) % 2 == 0 { 1 } else { -1 };
                    let first = bit(n) | bit(0);
                    let rest = (m & ((1 << n) - 1)) >> 1;
                    row[index[&(first | (rest << 1))]] += sign;
                }
                row
            })
            .collect()
    };
    let rank = |n: usize, k: usize| if n == 0 || k > n + 1 { 0 } else { rank_mod_p(b(n, k)) };
    let mut out = BTreeMap::new();
    for d in 0..=max_degree {
        let mut total = 0;
        for k in 0..=d {
            let n = d - k;
            if k > n + 1 {
                continue;
            }
            let size = chains(n, k).len();
            total += size - rank(n, k) - if k <= n + 2 { rank(n + 1, k) } else { 0 };
        }
        out.insert(d as i64, total);
    }
    out
}

fn criterion_1() -> Check {
    for name in corpus::names(Kind::Algebra) {
        let a = corpus::algebra::<Q>(name).map_err(err)?;
        let v = a.validate();
        ensure(v.is_ok(), || format!("{name}: {:?}", v.failures))?;
    }
    for name in corpus::names(Kind::Lie) {
        let g = corpus::lie::<Q>(name).map_err(err)?;
        let v = g.validate();
        ensure(v.is_ok(), || format!("{name}: {:?}", v.failures))?;
    }
    for name in corpus::names(Kind::Complex) {
        corpus::complex::<Q>(name).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(())
}

fn criterion_2() -> Check {
    let w = window(-2, 12, 5);
    for degs in [vec![1], vec![2], vec![1, 1], vec![1, 2], vec![2, 2]] {
        let b = bar(&free_algebra(&generators(&degs), &w).map_err(err)?, &w).map_err(err)?;
        // weights above the cap may still reach degrees ≥ 7 of the totals,
        // so the comparison runs weight by weight, where every row is exact
        let by_weight = b.weighted.homology_by_weight(&w).map_err(err)?;
        ensure(by_weight.keys().copied().eq(0..=5), || format!("V in degrees {degs:?}: weights {:?}", by_weight.keys()))?;
        for (wt, t) in &by_weight {
            let expected: BTreeMap<i64, usize> = match wt {
                0 => BTreeMap::from([(0, 1)]),
                1 => degs.iter().fold(BTreeMap::new(), |mut m, d| {
                    *m.entry(d + 1).or_insert(0) += 1;
                    m
                }),
                _ => BTreeMap::new(),
            };
            exact_rows(t, &expected).map_err(|e| format!("V in degrees {degs:?}, weight {wt}: {e}"))?;
        }
        let totals = b.homology(&w).map_err(err)?;
        let reliable: Vec<i64> = totals.iter().filter(|(_, r)| r.reliable).map(|(d, _)| *d).collect();
        ensure(reliable.len() >= 8, || format!("V in degrees {degs:?}: reliable totals {reliable:?}"))?;
        for d in reliable {
            let want: usize = usize::from(d == 0) + degs.iter().filter(|g| **g + 1 == d).count();
            ensure(totals[&d].dim == want, || format!("V in degrees {degs:?}: total degree {d}"))?;
        }
    }
    Ok(())
}

fn criterion_3() -> Check {
    for cap in [3usize, 6] {
        let w = window(-2 * cap as i64, 12, cap);
        let a = trivial_algebra(&generators(&[1])).map_err(err)?;
        let h = algebra_homology(&koszul_dual(&a, &w).map_err(err)?, &w).map_err(err)?;
        let expected: BTreeMap<i64, usize> = (0..=cap as i64).map(|k| (-2 * k, 1)).collect();
        let covered: HomologyTable = h.into_iter().filter(|(d, _)| *d >= -2 * cap as i64 && *d <= 0).collect();
        exact_rows(&covered, &expected).map_err(|e| format!("cap {cap}: {e}"))?;
    }
    Ok(())
}

fn criterion_4() -> Check {
    let w = window(-12, 12, 6);
    let a = corpus::algebra::<Q>("exterior").map_err(err)?;
    let r = verify_circle_duality(&a, &w).map_err(err)?;
    ensure(r.verdict == Verdict::VerifiedInWindow, || format!("verdict {}", r.verdict.as_str()))?;
    let oracle = exterior_hh_dims(11);
    ensure(oracle.values().all(|d| *d == 1), || format!("unnormalized oracle disagrees with the expected table: {oracle:?}"))?;
    let left = r.left_dims();
    let right = r.right_dims();
    for d in 0..=11 {
        ensure(left.get(&d) == Some(&1), || format!("left degree {d}: {:?}", left.get(&d)))?;
        ensure(right.get(&-d) == Some(&1), || format!("right degree {}: {:?}", -d, right.get(&-d)))?;
    }
    ensure(left.iter().all(|(d, n)| *n == usize::from(*d >= 0)), || format!("left {left:?}"))?;
    ensure(right.iter().all(|(d, n)| *n == usize::from(*d <= 0)), || format!("right {right:?}"))
}

/// Weight-`w` part of HH of the free algebra on one generator of degree
/// `p`: coinvariants in degree `wp` and invariants in degree `wp + 1` of the
/// cyclic rotation, which acts on `v^{⊗w}` by `(−1)^{p(w−1)}`.
fn free_one_generator(p: i64, wt: u32) -> BTreeMap<i64, usize> {
    if wt == 0 {
        return BTreeMap::from([(0, 1)]);
    }
    let w = i64::from(wt);
    if (p * (w - 1)) % 2 == 0 {
        BTreeMap::from([(w * p, 1), (w * p + 1, 1)])
    } else {
        BTreeMap::new()
    }
}

fn criterion_5() -> Check {
    let w = window(-2, 12, 5);
    for p in [1i64, 2] {
        let v = generators(&[p]);
        let a = free_algebra(&v, &w).map_err(err)?;
        let hh = hochschild_homology(&a, &w).map_err(err)?;
        let model = free_calculation::<Q>(v.space(), &w).map_err(err)?;
        for wt in 0..=5u32 {
            let left = hh.by_weight.get(&wt).ok_or(format!("degree {p}: weight {wt} missing"))?;
            let right = model.get(&wt).ok_or(format!("degree {p}: model weight {wt} missing"))?;
            ensure(reliable_dims(left) == reliable_dims(right), || format!("degree {p}, weight {wt}: {left:?} vs {right:?}"))?;
            exact_rows(left, &free_one_generator(p, wt)).map_err(|e| format!("degree {p}, weight {wt}: {e}"))?;
        }
        for i in 1..=5 {
            let l = cardinality_layer(&a, i, &w).map_err(err)?;
            ensure(l.matrix_agrees, || format!("degree {p}, layer {i}: differentials differ"))?;
        }
    }
    Ok(())
}

fn criterion_6() -> Check {
    for name in corpus::names(Kind::Algebra) {
        let a = corpus::algebra::<Q>(name).map_err(err)?;
        let w = corpus_window(name);
        for i in 1..=5 {
            let l = cardinality_layer(&a, i, &w).map_err(|e| format!("{name}, layer {i}: {e}"))?;
            ensure(reliable_dims(&l.cyclic) == reliable_dims(&l.model) && l.matrix_agrees, || format!("{name}, layer {i}"))?;
        }
    }
    for i in 1..=4 {
        let brute = conf_nerve_dims(i);
        let k = factorial(i - 1);
        ensure(brute == BTreeMap::from([(0, k), (1, k)]), || format!("conf nerve {i}: {brute:?}"))?;
        let c = conf_homology(i, OneManifold::Circle).map_err(err)?;
        ensure(c.dims == BTreeMap::from([(0, k), (1, k)]), || format!("conf_homology {i}: {:?}", c.dims))?;
    }
    Ok(())
}

fn criterion_7() -> Check {
    let mut probed = 0;
    for name in corpus::names(Kind::Algebra) {
        let a: DGAlgebra<Q> = corpus::algebra(name).map_err(err)?;
        if a.certificate() != Certificate::ConnectedIdeal {
            continue;
        }
        let w = corpus_window(name);
        for (i, low) in convergence_probe(&a, &w).map_err(err)? {
            if let Some(d) = low {
                ensure(d >= i64::from(i), || format!("{name}: weight {i} starts in degree {d}"))?;
            }
        }
        probed += 1;
    }
    ensure(probed >= 5, || format!("only {probed} connected algebras"))
}

fn criterion_8() -> Check {
    let w = window(-14, 14, 5);
    for name in ["abelian_d1", "abelian_d2", "abelian_d1_d1"] {
        let g = corpus::lie::<Q>(name).map_err(err)?;
        let r = verify_ug_duality(&g, &w).map_err(err)?;
        ensure(r.verdict == Verdict::VerifiedInWindow, || format!("{name}: {}", r.verdict.as_str()))?;
        ensure(!r.weight_rows.is_empty(), || format!("{name}: no per-weight rows"))?;
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_9() -> Check {
    for (name, generators) in [("affine_line", 2usize), ("sl2", 3)] {
        let g = corpus::lie::<Q>(name).map_err(err)?;
        let r = pbw_check(&g, 6).map_err(err)?;
        ensure(r.matches, || format!("{name}: gr U differs from Sym"))?;
        let totals = r.weight_totals();
        for wt in 0..=6u32 {
            let want = binomial(wt as usize + generators - 1, generators - 1);
            ensure(totals.get(&wt) == Some(&want), || format!("{name}, weight {wt}: {:?} vs {want}", totals.get(&wt)))?;
        }
    }
    Ok(())
}

fn criterion_10() -> Check {
    let g = corpus::lie::<Q>("sl2").map_err(err)?;
    let w = window(-12, 12, 6);
    let c = ce_cochains(&g, &w).map_err(err)?;
    ensure(c.dim() == 8, || format!("{} cochains", c.dim()))?;
    let h = algebra_homology(&c, &w).map_err(err)?;
    exact_rows(&h, &BTreeMap::from([(0, 1), (-3, 1)]))
}

fn criterion_11() -> Check {
    for name in ["free_dm2", "free_dm2_dm3"] {
        let a = corpus::algebra::<Q>(name).map_err(err)?;
        let r = artin_roundtrip(&a, &corpus_window(name)).map_err(err)?;
        ensure(r.certificate.holds(), || format!("{name}: certificate {:?}", r.certificate))?;
        ensure(r.verified && r.double_dual.verdict == Verdict::VerifiedInWindow, || format!("{name}: {}", r.double_dual.verdict.as_str()))?;
    }
    Ok(())
}

fn random_two_term(seed: u64) -> (ChainComplex<Q>, BTreeMap<i64, usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let low: i64 = rng.gen_range(-3..=3);
    let (a, b) = (rng.gen_range(1..=3usize), rng.gen_range(1..=3usize));
    let matrix: Vec<Vec<i64>> = (0..b).map(|_| (0..a).map(|_| rng.gen_range(-2..=2)).collect()).collect();
    let mut s = GradedSpace::new();
    for i in 0..a {
        s.push(low, format!("u{i}")).unwrap();
    }
    for i in 0..b {
        s.push(low + 1, format!("v{i}")).unwrap();
    }
    let c = ChainComplex::from_images(s, DegreeRange::ALL, |d, k| {
        if d == low + 1 {
            canonical_vec(matrix[k].iter().enumerate().map(|(j, x)| (j, Q::from_i64(*x))))
        } else {
            vec![]
        }
    })
    .unwrap();
    let r = rank_mod_p(matrix);
    let h = BTreeMap::from([(low, a - r), (low + 1, b - r)]);
    (c, h)
}

fn criterion_12() -> Check {
    let (random, random_h) = random_two_term(12);
    let cases = [
        ("point_d0", corpus::complex::<Q>("point_d0").map_err(err)?, BTreeMap::from([(0, 1)])),
        ("point_d3", corpus::complex::<Q>("point_d3").map_err(err)?, BTreeMap::from([(3, 1)])),
        ("random", random, random_h),
    ];
    for (name, e, h) in cases {
        let r = additive_factorization(OneManifold::Circle, &e).map_err(err)?;
        ensure(r.verdict == Verdict::VerifiedInWindow && r.rows.iter().all(|x| !x.stale), || format!("{name}: {}", r.verdict.as_str()))?;
        // H(S¹; e) = H(e) ⊕ H(e)[1]
        let mut expected = BTreeMap::new();
        for (d, n) in &h {
            *expected.entry(*d).or_insert(0) += n;
            *expected.entry(d + 1).or_insert(0) += n;
        }
        let left: BTreeMap<i64, usize> = r.left_dims().into_iter().filter(|(_, n)| *n > 0).collect();
        expected.retain(|_, n| *n > 0);
        ensure(left == expected, || format!("{name}: {left:?} vs {expected:?}"))?;
    }
    Ok(())
}

fn criterion_13() -> Check {
    // a, c in degree −1, b in degree −2, da = b
    let mut s = GradedSpace::new();
    s.push(-1, "a".into()).unwrap();
    s.push(-1, "c".into()).unwrap();
    s.push(-2, "b".into()).unwrap();
    let v = ChainComplex::from_images(s, DegreeRange::ALL, |d, k| if d == -1 && k == 0 { vec![(0, Q::from_i64(1))] } else { vec![] }).map_err(err)?;
    let kernel = 2 - rank_mod_p(vec![vec![1], vec![0]]);
    let cases: [(&str, DGLieAlgebra<Q>, usize); 3] = [
        ("with differential", DGLieAlgebra::abelian(&v).map_err(err)?, kernel),
        ("abelian_d1", corpus::lie("abelian_d1").map_err(err)?, 0),
        ("abelian_d1_d1", corpus::lie("abelian_d1_d1").map_err(err)?, 0),
    ];
    for (name, g, ker) in cases {
        for k in [2usize, 3] {
            let sol = mc_elements(&g, &ArtinLocalBase::truncated_polynomial(k).map_err(err)?).map_err(err)?;
            // (𝔤 ⊗ m)_{−1} = 𝔤_{−1} ⊗ m with m of dimension k − 1
            ensure(sol.linear && sol.dimension == Some(ker * (k - 1)), || format!("{name}, t^{k}: {:?}", sol.dimension))?;
        }
    }
    let g = corpus::lie::<Q>("mc_quadratic").map_err(err)?;
    let sol = mc_elements(&g, &ArtinLocalBase::truncated_polynomial(2).map_err(err)?).map_err(err)?;
    ensure(sol.dimension == Some(1) && sol.basis == vec![vec!["1·a⊗t".to_string()]], || format!("quadratic: {:?} {:?}", sol.dimension, sol.basis))
}

fn criterion_14() -> Check {
    let invocations: Vec<Invocation> = [
        (Command::Hochschild, Some("free_d1_d2"), 5),
        (Command::VerifyCircle, Some("exterior"), 6),
        (Command::KoszulDual, Some("free_dm2"), 6),
        (Command::Layers, Some("free_d1"), 3),
        (Command::Pbw, Some("sl2"), 4),
        (Command::Ce, Some("sl2"), 6),
        (Command::Mc, Some("mc_quadratic"), 6),
        (Command::AdditivePd, Some("two_term"), 6),
        (Command::Conf, None, 6),
    ]
    .into_iter()
    .map(|(c, name, cap)| {
        let mut inv = Invocation::new(c, name.map(|n| corpus::text(n).unwrap().to_string()));
        inv.weight_cap = cap;
        if cap == 5 || cap == 3 {
            inv.window = (-2, 12);
        }
        inv.points = Some(3);
        inv
    })
    .collect();
    for inv in &invocations {
        let hashes: Vec<String> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..3).map(|_| s.spawn(|| digest(run(inv).report.to_json().as_bytes()))).collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let out = run(inv);
        ensure(out.exit_code == 0, || format!("{}: exit {} {:?}", inv.command.name(), out.exit_code, out.report.error))?;
        ensure(hashes.iter().all(|h| *h == hashes[0]), || format!("{}: reports differ", inv.command.name()))?;
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 14] = [
        ("structural validity of the corpus", criterion_1),
        ("bar of a free algebra is trivial", criterion_2),
        ("Koszul dual of the trivial algebra on one class", criterion_3),
        ("circle duality for the exterior algebra", criterion_4),
        ("free calculation against Hochschild homology", criterion_5),
        ("cardinality layers and configuration spaces", criterion_6),
        ("convergence probe on connected algebras", criterion_7),
        ("enveloping algebra against cochains", criterion_8),
        ("PBW for the 2-dim nonabelian algebra and sl2", criterion_9),
        ("cochains of sl2", criterion_10),
        ("Artin round trip", criterion_11),
        ("additive Poincare duality on the circle", criterion_12),
        ("Maurer-Cartan solution spaces", criterion_13),
        ("byte-identical reports", criterion_14),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("criterion {:>2} PASS {name} ({secs:.2}s)", n + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.2}s): {e}", n + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
