mod common;

use common::{naive_invariant, schmidt, C64};
use nalgebra::DMatrix;
use psi_monotones::graph::{build_cycle, build_cycle_product, build_norm_graph};
use psi_monotones::linalg::{derive_seed, haar_unitary, rng};
use psi_monotones::locc::{asymmetric_ghz, exp_k};
use psi_monotones::monotones::{
    bl_monotone, can_convert_with_certainty, composite_ratio_floor, det_ratio, graph_monotone,
    kyfan_crosscheck, projector_maximize, vidal_monotone, Composite, GraphSource, MonotoneSpec,
};
use psi_monotones::{DensityMatrix, PureState};
use rand::Rng;

fn bell() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::from_real(vec![2, 2], &[s, 0.0, 0.0, s]).unwrap()
}

fn product(dims: &[usize]) -> PureState {
    let factors: Vec<Vec<C64>> = dims
        .iter()
        .map(|&d| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[0] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    PureState::product(&factors).unwrap()
}

fn every_kind() -> Vec<MonotoneSpec> {
    vec![
        MonotoneSpec::vidal(&[0], 1),
        MonotoneSpec::vidal(&[1, 2], 2),
        MonotoneSpec::nu(2),
        MonotoneSpec::MultiRenyi { q: 3 },
        MonotoneSpec::graph(GraphSource::Cycle { n: 3 }),
        MonotoneSpec::Bl {
            ranks: vec![1, 1, 1],
            restarts: 4,
            seed: 0,
        },
    ]
}

fn dims_for(spec: &MonotoneSpec) -> Vec<usize> {
    match spec {
        MonotoneSpec::Graph {
            graph: GraphSource::Cycle { .. },
            ..
        } => vec![2, 3],
        _ => vec![2, 2, 2],
    }
}

#[test]
fn vidal_examples() {
    assert!((vidal_monotone(&bell(), &[0], 1).unwrap() - 0.5).abs() < 1e-12);
    assert!(vidal_monotone(&bell(), &[0], 2).unwrap().abs() < 1e-12);
    assert!((vidal_monotone(&asymmetric_ghz(), &[0], 1).unwrap() - 0.2).abs() < 1e-12);
    assert_eq!(vidal_monotone(&product(&[2, 3]), &[0], 1).unwrap(), 0.0);
}

#[test]
fn kyfan_examples() {
    let half = DensityMatrix::new(vec![2], DMatrix::identity(2, 2) * C64::new(0.5, 0.0)).unwrap();
    assert!((kyfan_crosscheck(&half, 1, 10, 0).unwrap().top_k_sum - 0.5).abs() < 1e-12);
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.8, 0.0), C64::new(0.2, 0.0)]));
    let r = kyfan_crosscheck(&DensityMatrix::new(vec![2], diag).unwrap(), 1, 10, 0).unwrap();
    assert!((r.top_k_sum - 0.8).abs() < 1e-12);
    let rho = DensityMatrix::random(&[4], &mut rng(2));
    for k in 1..=4 {
        let r = kyfan_crosscheck(&rho, k, 100, k as u64).unwrap();
        assert!(r.max_sampled <= r.top_k_sum + 1e-12);
    }
}

#[test]
fn graph_monotone_examples() {
    let nu2 = build_cycle_product(&[1, 2]).unwrap();
    assert!(graph_monotone(&nu2, &product(&[2, 2, 2])).unwrap().abs() < 1e-12);
    let ghz = PureState::ghz(3);
    let z = naive_invariant(&nu2, &ghz).re;
    assert!((graph_monotone(&nu2, &ghz).unwrap() - (1.0 - z.powf(0.25))).abs() < 1e-12);
    let c2 = build_cycle(2, false).unwrap();
    assert!((graph_monotone(&c2, &bell()).unwrap() - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
}

#[test]
fn cycle_monotone_matches_eigenvalue_formula() {
    for n in 1..=5 {
        let g = build_cycle(n, false).unwrap();
        for t in 0..10 {
            let mut r = rng(derive_seed(n as u64, t));
            let psi = PureState::random(&[r.random_range(1..=4), r.random_range(1..=4)], &mut r);
            let sum: f64 = schmidt(&psi, &[0]).iter().map(|l| l.powi(n as i32)).sum();
            let want = 1.0 - sum.powf(1.0 / n as f64);
            assert!((graph_monotone(&g, &psi).unwrap() - want).abs() < 1e-10);
        }
    }
}

#[test]
fn product_states_give_zero_for_every_kind() {
    for spec in every_kind() {
        let v = spec.evaluate(&product(&dims_for(&spec))).unwrap();
        assert!(v.abs() < 1e-12, "{spec:?} gave {v}");
    }
}

#[test]
fn values_in_unit_interval_and_lu_invariant() {
    for (i, spec) in every_kind().iter().enumerate() {
        let dims = dims_for(spec);
        let m = spec.prepare(&dims).unwrap();
        let trials = if matches!(spec, MonotoneSpec::Bl { .. }) { 50 } else { 1000 };
        for t in 0..trials {
            let mut r = rng(derive_seed(40 + i as u64, t));
            let psi = PureState::random(&dims, &mut r);
            let mut rotated = psi.clone();
            for (a, &d) in dims.iter().enumerate() {
                rotated = rotated.apply_local(a, &haar_unitary(&mut r, d)).unwrap();
            }
            let (v0, v1) = (m.evaluate(&psi).unwrap(), m.evaluate(&rotated).unwrap());
            assert!((0.0..=1.0).contains(&v0));
            assert!((v0 - v1).abs() < 1e-9, "{spec:?}: {v0} vs {v1}");
        }
    }
}

#[test]
fn vidal_and_bl_shrink_as_ranks_grow() {
    for t in 0..20 {
        let mut r = rng(derive_seed(50, t));
        let psi = PureState::random(&[3, 3], &mut r);
        let v: Vec<f64> = (1..=3).map(|k| vidal_monotone(&psi, &[0], k).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        let psi3 = PureState::random(&[2, 3, 2], &mut r);
        let small = bl_monotone(&psi3, &[1, 1, 1], 8, t).unwrap().value;
        let large = bl_monotone(&psi3, &[1, 2, 1], 8, t).unwrap().value;
        assert!(large <= small + 1e-9);
    }
}

#[test]
fn bl_full_ranks_and_ghz_grid() {
    let psi = PureState::random(&[2, 3, 2], &mut rng(3));
    assert!(bl_monotone(&psi, &[2, 3, 2], 2, 0).unwrap().value.abs() < 1e-12);
    let ghz = asymmetric_ghz();
    let steps = 180;
    let mut best = 0.0f64;
    // amplitudes are real and positive, so real product vectors reach the max
    for i in 0..=steps {
        let (c1, s1) = ((i as f64 / steps as f64) * std::f64::consts::FRAC_PI_2).sin_cos();
        for j in 0..=steps {
            let (c2, s2) = ((j as f64 / steps as f64) * std::f64::consts::FRAC_PI_2).sin_cos();
            for k in 0..=steps {
                let (c3, s3) = ((k as f64 / steps as f64) * std::f64::consts::FRAC_PI_2).sin_cos();
                let overlap = (2.0 * s1 * s2 * s3 + c1 * c2 * c3) / 5f64.sqrt();
                best = best.max(overlap * overlap);
            }
        }
    }
    let bl = bl_monotone(&ghz, &[1, 1, 1], 8, 0).unwrap();
    assert!((bl.value - (1.0 - best)).abs() < 1e-9);
    assert!((bl.value - 0.2).abs() < 1e-9);
    assert!(bl.search.heuristic);
}

#[test]
fn projector_maximize_examples() {
    let psi = PureState::random(&[2, 2, 2], &mut rng(13));
    let g = build_cycle_product(&[1, 2]).unwrap();
    let full = projector_maximize(&g, &[2, 2, 2], &psi, 2, 0).unwrap().best;
    let z = naive_invariant(&g, &psi).re.powf(0.25);
    assert!((full - z).abs() < 1e-10);

    let norm = build_norm_graph(3).unwrap();
    for ranks in [[1, 1, 1], [2, 1, 1], [1, 2, 2]] {
        let via_graph = projector_maximize(&norm, &ranks, &psi, 8, 1).unwrap().best;
        let via_bl = bl_monotone(&psi, &ranks, 8, 1).unwrap().search.best;
        assert!((via_graph - via_bl).abs() < 1e-8, "{ranks:?}: {via_graph} vs {via_bl}");
    }

    let mut last = 0.0;
    for ranks in [[1, 1, 1], [2, 1, 1], [2, 2, 1], [2, 2, 2]] {
        let v = projector_maximize(&g, &ranks, &psi, 8, 2).unwrap().best;
        assert!(v >= last - 1e-9);
        last = v;
    }
}

#[test]
fn det_ratio_examples() {
    let psi = asymmetric_ghz();
    let id = DMatrix::identity(2, 2);
    assert!((det_ratio(&psi, &[id.clone(), id.clone(), id]).unwrap().raw - 1.0).abs() < 1e-12);
    let k0 = exp_k(0.0);
    assert!((det_ratio(&psi, &[k0.clone(), k0.clone(), k0]).unwrap().raw - 1.0).abs() < 1e-12);
    let mut r = rng(4);
    let us: Vec<_> = (0..3).map(|_| haar_unitary(&mut r, 2)).collect();
    assert!((det_ratio(&psi, &us).unwrap().raw - 1.0).abs() < 1e-12);
}

#[test]
fn majorization_examples() {
    let (b, p) = (bell(), product(&[2, 2]));
    assert!(can_convert_with_certainty(&b, &b, &[0]).unwrap());
    assert!(can_convert_with_certainty(&b, &p, &[0]).unwrap());
    assert!(!can_convert_with_certainty(&p, &b, &[0]).unwrap());
}

#[test]
fn composite_examples() {
    let xs = [0.3, 0.7];
    let mut r = rng(0);
    let cat = Composite::catalog(2, &mut r);
    assert!(composite_ratio_floor(&xs, &xs, &cat).unwrap().worst_margin >= -1e-12);
    let g = Composite::sqrt(1);
    assert!((g.eval(&[0.25]) / g.eval(&[1.0]) - 0.5).abs() < 1e-15);
    let rep = composite_ratio_floor(&[0.25], &[1.0], &[g]).unwrap();
    assert!((rep.worst_margin - 0.25).abs() < 1e-15);
}
