//! Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.

mod common;

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::Rng;

use common::{naive_invariant, rel_err, schmidt};
use psi_monotones::graph::{
    build_coxeter_cayley, build_cycle, build_cycle_product, build_hypercube, cartesian_product, CoxeterMatrix,
    PsiGraph, DEFAULT_MAX_ELEMENTS,
};
use psi_monotones::io::{read_json, CertificateFile};
use psi_monotones::linalg::{derive_seed, rng};
use psi_monotones::locc::{
    asymmetric_ghz, default_alpha_grid, exp_k, fuzz_monotonicity, ghz_sweep, slocc_apply,
};
use psi_monotones::monotones::{
    bl_monotone, composite_sweep, vidal_monotone, Exponent, GraphSource, MonotoneSpec,
};
use psi_monotones::reflect::{
    are_isomorphic, certificate_for_cycle, certificate_for_product, certificate_for_product_right,
    cut_count_equals_distance, enumerate_reflecting_cuts, identity_certificate, is_edge_reflecting,
    verify_certificate, vertex_certificate, CertificateItems, ConvexityCertificate, VerificationReport,
};
use psi_monotones::tensor::{convexity_probe, evaluate_invariant};
use psi_monotones::PureState;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration) -> String {
    format!("{:.1}s of {}s budget", elapsed.as_secs_f64(), limit.as_secs())
}

/// Graphs of criterion 1 with their display names.
fn oracle_graphs() -> Vec<(String, PsiGraph)> {
    let mut out = Vec::new();
    for n in 1..=4 {
        out.push((format!("C{n}"), build_cycle(n, false).unwrap()));
    }
    for q in 1..=3 {
        out.push((format!("E{q}"), build_hypercube(q).unwrap()));
    }
    out.push((
        "C3xC1".into(),
        cartesian_product(&build_cycle(3, false).unwrap(), &build_cycle(1, true).unwrap()),
    ));
    for n in 1..=4 {
        out.push((format!("C1xC{n}"), build_cycle_product(&[1, n]).unwrap()));
    }
    out
}

/// Local dimensions in {2, 3}, shrunk until the brute-force sum stays small.
fn oracle_dims<R: Rng>(g: &PsiGraph, r: &mut R) -> Vec<usize> {
    let mut dims: Vec<usize> = (0..g.party_count()).map(|_| r.random_range(2..=3)).collect();
    let cost = |d: &[usize]| (d.iter().product::<usize>() as f64).powi(g.ket_count() as i32);
    while cost(&dims) > 2e7 {
        let i = (0..dims.len()).max_by_key(|&i| dims[i]).unwrap();
        dims[i] -= 1;
    }
    dims
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for (gi, (name, g)) in oracle_graphs().into_iter().enumerate() {
        for t in 0..100 {
            let mut r = rng(derive_seed(1000 + gi as u64, t));
            let dims = oracle_dims(&g, &mut r);
            let psi = PureState::random(&dims, &mut r);
            let z = evaluate_invariant(&g, &psi).map_err(|e| format!("{name}: {e}"))?.complex();
            let err = rel_err(z, naive_invariant(&g, &psi));
            if err > worst {
                worst = err;
                worst_at = format!("{name} dims {dims:?}");
            }
        }
    }
    let limit = Duration::from_secs(120);
    let elapsed = start.elapsed();
    check(
        worst <= 1e-10 && elapsed < limit,
        format!("worst relative error {worst:.2e} ({worst_at}), {}", within(elapsed, limit)),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=6 {
        let g = build_cycle(n, false).unwrap();
        for t in 0..20 {
            let mut r = rng(derive_seed(2000 + n as u64, t));
            let dims = [r.random_range(1..=5), r.random_range(1..=5)];
            let psi = PureState::random(&dims, &mut r);
            let z = evaluate_invariant(&g, &psi).map_err(|e| e.to_string())?.real().map_err(|e| e.to_string())?;
            let closed: f64 = schmidt(&psi, &[0]).iter().map(|l| l.powi(n as i32)).sum();
            worst = worst.max((z - closed).abs());
        }
    }
    check(worst <= 1e-10, format!("worst |Z - sum lambda^n| = {worst:.2e} over n <= 6"))
}

fn certificate_ok(report: &VerificationReport) -> bool {
    report.passed && report.min_psd_margin >= -1e-12 && report.worst_sum_residual <= 1e-12
}

/// Certificate for label 0 of a hypercube whose cut along coordinate `b`
/// carries `matrix(b)`.
fn hypercube_certificate(q: usize, matrix: impl Fn(usize) -> DMatrix<f64>) -> (PsiGraph, ConvexityCertificate) {
    let g = build_hypercube(q).unwrap();
    let mut cert = ConvexityCertificate::new(CertificateItems::Edges(0));
    for cut in enumerate_reflecting_cuts(&g).unwrap() {
        let bit = g.edge(cut.cut_edges()[0]).label;
        if bit != 0 {
            cert.add(cut, matrix(bit));
        }
    }
    (g, cert)
}

fn criterion_3() -> Outcome {
    let mut results: Vec<(String, VerificationReport)> = Vec::new();
    let mut run = |name: String, g: &PsiGraph, cert: &ConvexityCertificate| {
        results.push((name, verify_certificate(g, cert).unwrap()));
    };
    for n in 1..=6 {
        for label in 0..2 {
            let (g, cert) = certificate_for_cycle(n, label).unwrap();
            run(format!("C{n} label {label}"), &g, &cert);
        }
    }

    let ones = |d: usize| DMatrix::from_element(d, d, 1.0);
    let eye = |d: usize| DMatrix::identity(d, d);
    let half = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
    let (g3, c) = hypercube_certificate(3, |b| if b == 1 { ones(2) } else { eye(2) });
    run("E3 displayed solution".into(), &g3, &c);
    let (g3, c) = hypercube_certificate(3, |_| half.clone());
    run("E3 symmetric solution".into(), &g3, &c);
    let checker = DMatrix::from_fn(4, 4, |i, j| if (i + j) % 2 == 0 { 1.0 } else { 0.0 });
    let (g4, c) = hypercube_certificate(4, |b| match b {
        1 => ones(4),
        2 => checker.clone(),
        _ => eye(4),
    });
    run("E4 displayed solution".into(), &g4, &c);
    let third = 1.0 / 3.0;
    let sym4 = DMatrix::from_row_slice(
        4,
        4,
        &[1.0, 0.5, 0.5, third, 0.5, 1.0, third, 0.5, 0.5, third, 1.0, 0.5, third, 0.5, 0.5, 1.0],
    );
    let (g4, c) = hypercube_certificate(4, |_| sym4.clone());
    run("E4 symmetric solution".into(), &g4, &c);
    let file: CertificateFile = read_json(std::path::Path::new(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/e4_symmetric.json"
    )))
    .unwrap();
    let fg = file.graph.clone().unwrap();
    let fixture = file.to_certificate(&fg).unwrap();
    let fixture_matches = fixture.cuts.iter().all(|cc| cc.matrix == sym4);
    run("E4 symmetric fixture".into(), &fg, &fixture);

    let k2 = build_hypercube(1).unwrap();
    let k2_cert = identity_certificate(&k2, 0, &enumerate_reflecting_cuts(&k2).unwrap());
    let vk2 = vertex_certificate(&k2, &k2_cert).unwrap();
    let (e2, e2_cert) = certificate_for_cycle(2, 0).unwrap();
    let e3_cert = certificate_for_product(&e2, &e2_cert, &k2, Some(&vk2)).unwrap();
    let e3 = cartesian_product(&e2, &k2);
    run("E2xE1 product".into(), &e3, &e3_cert);
    let e4_cert = certificate_for_product(&e3, &e3_cert, &k2, Some(&vk2)).unwrap();
    run("E3xE1 product".into(), &cartesian_product(&e3, &k2), &e4_cert);

    let c1 = build_cycle(1, true).unwrap();
    let c1_cert = identity_certificate(&c1, 0, &enumerate_reflecting_cuts(&c1).unwrap());
    let vc1 = vertex_certificate(&c1, &c1_cert).unwrap();
    for n in 1..=4 {
        let (cn, cn_cert) = certificate_for_cycle(n, 0).unwrap();
        let vcn = vertex_certificate(&cn, &cn_cert).unwrap();
        let g = cartesian_product(&c1, &cn);
        let cert = certificate_for_product(&c1, &c1_cert, &cn, Some(&vcn)).unwrap();
        run(format!("C1xC{n} label 0"), &g, &cert);
        for label in 0..2 {
            let (_, cc) = certificate_for_cycle(n, label).unwrap();
            let cert = certificate_for_product_right(&c1, Some(&vc1), &cn, &cc).unwrap();
            run(format!("C1xC{n} label {}", label + 1), &g, &cert);
        }
    }

    let failed: Vec<&str> = results
        .iter()
        .filter(|(_, r)| !certificate_ok(r))
        .map(|(n, _)| n.as_str())
        .collect();
    let margin = results.iter().map(|(_, r)| r.min_psd_margin).fold(f64::INFINITY, f64::min);
    let resid = results.iter().map(|(_, r)| r.worst_sum_residual).fold(0.0, f64::max);
    check(
        failed.is_empty() && fixture_matches,
        format!(
            "{} certificates, min PSD margin {margin:.2e}, worst residual {resid:.2e}, fixture matches display: {fixture_matches}, failed: {failed:?}",
            results.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut problems = Vec::new();
    let cases = (1..=6)
        .map(|n| (format!("C{n}"), build_cycle(n, false).unwrap(), n))
        .chain((1..=4).map(|q| (format!("E{q}"), build_hypercube(q).unwrap(), q)));
    let mut checked = 0;
    for (name, g, expected) in cases {
        let cuts = enumerate_reflecting_cuts(&g).unwrap().len();
        let report = cut_count_equals_distance(&g).unwrap();
        if cuts != expected || !report.holds() {
            problems.push(format!("{name}: {cuts} cuts, {} violations", report.violations.len()));
        }
        checked += 1;
    }
    check(
        problems.is_empty(),
        format!("{checked} graphs, cut counts and distances agree; problems: {problems:?}"),
    )
}

fn criterion_5() -> Outcome {
    let c3 = build_cycle(3, false).unwrap();
    let c3c1 = cartesian_product(&c3, &build_cycle(1, true).unwrap());
    let e3 = build_hypercube(3).unwrap();
    let mut worst = f64::NEG_INFINITY;
    let mut runs = 0;
    for (name, g) in [("C3", &c3), ("C3xC1", &c3c1), ("E3", &e3)] {
        for label in 0..g.party_count() {
            let r = convexity_probe(g, label, 2, 1000, 5000 + label as u64).map_err(|e| format!("{name}: {e}"))?;
            worst = worst.max(r.worst_value).max(r.worst_root);
            runs += 1;
        }
    }
    check(
        worst <= 1e-9,
        format!("{runs} probes x 1000 trials, worst midpoint excess {worst:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let specs: Vec<(&str, MonotoneSpec, Vec<usize>)> = vec![
        ("vidal k=1", MonotoneSpec::vidal(&[0], 1), vec![3, 3]),
        ("vidal k=2", MonotoneSpec::vidal(&[0], 2), vec![3, 3]),
        ("1-E3^(1/4)", MonotoneSpec::MultiRenyi { q: 3 }, vec![2, 2, 2]),
        ("nu_2", MonotoneSpec::nu(2), vec![2, 2, 2]),
        ("nu_3", MonotoneSpec::nu(3), vec![2, 2, 2]),
    ];
    let mut worst = f64::INFINITY;
    let mut bad = Vec::new();
    for (i, (name, spec, dims)) in specs.iter().enumerate() {
        let r = fuzz_monotonicity(spec, dims, 1000, 6000 + i as u64).map_err(|e| format!("{name}: {e}"))?;
        worst = worst.min(r.worst_margin);
        if r.worst_margin < -1e-9 {
            bad.push(*name);
        }
    }
    let broken = MonotoneSpec::Graph {
        graph: GraphSource::CycleProduct { ns: vec![1, 2] },
        exponent: Some(Exponent { num: -1, den: 4 }),
    };
    let control = fuzz_monotonicity(&broken, &[2, 2, 2], 1000, 6100).map_err(|e| e.to_string())?;
    let squared = MonotoneSpec::Graph {
        graph: GraphSource::CycleProduct { ns: vec![1, 2] },
        exponent: Some(Exponent { num: 2, den: 4 }),
    };
    let squared = fuzz_monotonicity(&squared, &[2, 2, 2], 1000, 6100).map_err(|e| e.to_string())?;
    check(
        bad.is_empty() && control.violations > 0,
        format!(
            "5 specs x 1000 trials, worst margin {worst:.2e}, failing {bad:?}; control exponent -1/4 gives {} violations (worst {:.2e}); exponent 2/4 gives {} (still monotone)",
            control.violations, control.worst_margin, squared.violations
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let grid = default_alpha_grid();
    let rows = ghz_sweep(&grid, &[2, 3, 4]).map_err(|e| e.to_string())?;
    let zero = rows.iter().find(|r| r.alpha == 0.0).ok_or("no alpha = 0 row")?;
    let a = std::iter::once(zero.p_lower)
        .chain(zero.upper_bounds())
        .all(|x| (x - 1.0).abs() <= 1e-12);
    let b = rows.iter().all(|r| r.upper_bounds().all(|u| r.p_lower <= u + 1e-9));
    let min_n = |r: &psi_monotones::locc::SweepRow| r.p_n.iter().copied().fold(f64::INFINITY, f64::min);
    let c = rows.iter().filter(|r| min_n(r) < r.p_vidal - 1e-6).count();
    let d = rows.iter().filter(|r| min_n(r) < r.p_det - 1e-6).count();
    let psi = asymmetric_ghz();
    let mut asym = 0.0f64;
    for &alpha in &grid {
        let m = exp_k(alpha);
        let (phi, _) = slocc_apply(&psi, &[m.clone(), m.clone(), m]).map_err(|e| e.to_string())?;
        let ratios: Vec<f64> = (0..3)
            .map(|p| {
                let (x, y) = (schmidt(&psi, &[p]), schmidt(&phi, &[p]));
                let tail = |l: &[f64], k: usize| 1.0 - l[..k].iter().sum::<f64>();
                (1..=2)
                    .filter(|&k| tail(&y, k) > 1e-14)
                    .map(|k| tail(&x, k) / tail(&y, k))
                    .fold(1.0, f64::min)
            })
            .collect();
        asym = asym.max(ratios.iter().map(|r| (r - ratios[0]).abs()).fold(0.0, f64::max));
    }
    let e = asym <= 1e-10;
    let limit = Duration::from_secs(60);
    let elapsed = start.elapsed();
    check(
        a && b && c > 0 && d > 0 && e && elapsed < limit,
        format!(
            "(a) {a} (b) {b} (c) {c} alphas (d) {d} alphas (e) asymmetry {asym:.1e}; {} rows, {}",
            rows.len(),
            within(elapsed, limit)
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut worst = 0.0f64;
    for t in 0..100 {
        let mut r = rng(derive_seed(8000, t));
        let dims = [r.random_range(2..=4), r.random_range(2..=4)];
        let ranks = [r.random_range(1..=dims[0]), r.random_range(1..=dims[1])];
        let psi = PureState::random(&dims, &mut r);
        let bl = bl_monotone(&psi, &ranks, 8, t).map_err(|e| e.to_string())?.value;
        let v = vidal_monotone(&psi, &[0], ranks[0].min(ranks[1])).map_err(|e| e.to_string())?;
        worst = worst.max((bl - v).abs());
    }
    check(worst <= 1e-9, format!("100 states, worst |bl - vidal| = {worst:.2e}"))
}

fn criterion_9() -> Outcome {
    let r = composite_sweep(1000, 4, 9000).map_err(|e| e.to_string())?;
    check(
        r.worst_margin >= -1e-12,
        format!("catalog {}, {} checks, worst margin {:.2e}", r.catalog_version, r.checks, r.worst_margin),
    )
}

fn criterion_10() -> Outcome {
    let cayley = |m: &CoxeterMatrix| build_coxeter_cayley(m, DEFAULT_MAX_ELEMENTS).unwrap();
    let a1 = CoxeterMatrix::new(vec![vec![1]]).unwrap();
    let mut problems = Vec::new();
    let mut graphs = Vec::new();
    for n in 2..=8u32 {
        let g = cayley(&CoxeterMatrix::dihedral(n).unwrap());
        if !are_isomorphic(&g, &build_cycle(n as usize, false).unwrap()) {
            problems.push(format!("I2({n}) is not C{n}"));
        }
        graphs.push((format!("I2({n})"), g));
    }
    let d = |n| CoxeterMatrix::dihedral(n).unwrap();
    let blocks = [
        ("I2(3)+I2(4)", CoxeterMatrix::block_diagonal(&d(3), &d(4)), cartesian_product(&build_cycle(3, false).unwrap(), &build_cycle(4, false).unwrap())),
        ("I2(3)+A1", CoxeterMatrix::block_diagonal(&d(3), &a1), cartesian_product(&build_cycle(3, false).unwrap(), &build_cycle(1, true).unwrap())),
        ("A1+A1+A1", CoxeterMatrix::block_diagonal(&CoxeterMatrix::block_diagonal(&a1, &a1), &a1), build_hypercube(3).unwrap()),
        ("I2(2)+I2(5)", CoxeterMatrix::block_diagonal(&d(2), &d(5)), cartesian_product(&build_cycle(2, false).unwrap(), &build_cycle(5, false).unwrap())),
    ];
    for (name, m, expected) in blocks {
        let g = cayley(&m);
        if !are_isomorphic(&g, &expected) {
            problems.push(format!("{name} is not the product"));
        }
        graphs.push((name.to_string(), g));
    }
    for (name, g) in &graphs {
        for label in 0..g.party_count() {
            if !is_edge_reflecting(g, label).unwrap().holds {
                problems.push(format!("{name} label {label} not edge-reflecting"));
            }
        }
    }
    check(
        problems.is_empty(),
        format!("{} Cayley graphs checked; problems: {problems:?}", graphs.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence of invariants", criterion_1),
        ("cycle invariant equals trace of rho^n", criterion_2),
        ("explicit certificates verify", criterion_3),
        ("cut counts and cut-distance property", criterion_4),
        ("convexity probes", criterion_5),
        ("monotonicity fuzz and broken control", criterion_6),
        ("GHZ sweep properties", criterion_7),
        ("bipartite reduction of bl monotone", criterion_8),
        ("composite ratio floor", criterion_9),
        ("Coxeter constructor", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
