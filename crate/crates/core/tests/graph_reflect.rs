mod common;

use proptest::prelude::*;
use psi_monotones::graph::{
    build_coxeter_cayley, build_cycle, build_hypercube, cartesian_product, CoxeterMatrix, Edge, PsiGraph,
};
use psi_monotones::io::read_graph;
use psi_monotones::reflect::{
    are_isomorphic, cut_count_equals_distance, enumerate_reflecting_cuts, is_edge_reflecting,
    is_vertex_reflecting, ReflectingCut,
};

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Small graphs that should be edge-reflecting for every label.
fn reflecting_zoo() -> Vec<PsiGraph> {
    let mut out: Vec<PsiGraph> = (1..=6).map(|n| build_cycle(n, false).unwrap()).collect();
    out.extend((1..=4).map(|q| build_hypercube(q).unwrap()));
    let c1 = build_cycle(1, true).unwrap();
    for n in 1..=3 {
        out.push(cartesian_product(&c1, &build_cycle(n, false).unwrap()));
    }
    out.push(cartesian_product(&build_cycle(3, false).unwrap(), &build_cycle(2, false).unwrap()));
    out
}

/// Re-checks every defining property of a cut without the search code.
fn independently_reflecting(g: &PsiGraph, cut: &ReflectingCut) -> bool {
    let k = cut.involution();
    let n = g.vertex_count();
    if (0..n).any(|v| k[k[v]] != v || g.parity(k[v]) == g.parity(v)) {
        return false;
    }
    let mut image: Vec<(usize, usize, usize)> = g
        .edges()
        .iter()
        .map(|e| (k[e.u].min(k[e.v]), k[e.u].max(k[e.v]), e.label))
        .collect();
    let mut orig: Vec<(usize, usize, usize)> =
        g.edges().iter().map(|e| (e.u.min(e.v), e.u.max(e.v), e.label)).collect();
    image.sort();
    orig.sort();
    if image != orig {
        return false;
    }
    let cut_set: Vec<usize> = (0..g.edges().len())
        .filter(|&i| {
            let e = g.edge(i);
            k[e.u] == e.v
        })
        .collect();
    if cut_set != cut.cut_edges() {
        return false;
    }
    // two components, swapped by k
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = count;
        while let Some(v) = stack.pop() {
            for (i, e) in g.edges().iter().enumerate() {
                if cut_set.contains(&i) {
                    continue;
                }
                let w = if e.u == v { e.v } else if e.v == v { e.u } else { continue };
                if comp[w] == usize::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    count == 2 && (0..n).all(|v| comp[v] != comp[k[v]])
}

#[test]
fn constructors_validate() {
    for g in reflecting_zoo() {
        assert!(g.validate().passed(), "{}", g.validate());
    }
    let c3c1 = cartesian_product(&build_cycle(3, false).unwrap(), &build_cycle(1, true).unwrap());
    assert_eq!(c3c1.vertex_count(), 12);
    assert_eq!(c3c1.party_count(), 3);
}

#[test]
fn e1_squared_is_e2() {
    let k2 = build_hypercube(1).unwrap();
    assert!(are_isomorphic(&cartesian_product(&k2, &k2), &build_cycle(2, false).unwrap()));
    assert!(are_isomorphic(&build_hypercube(2).unwrap(), &build_cycle(2, false).unwrap()));
}

#[test]
fn hypercube_is_power_of_k2() {
    let k2 = build_hypercube(1).unwrap();
    let mut g = k2.clone();
    for q in 2..=4 {
        g = cartesian_product(&g, &k2);
        assert!(are_isomorphic(&g, &build_hypercube(q).unwrap()), "q = {q}");
    }
}

#[test]
fn enumerated_cuts_pass_independent_checks() {
    for g in reflecting_zoo() {
        for cut in enumerate_reflecting_cuts(&g).unwrap() {
            assert!(independently_reflecting(&g, &cut));
        }
    }
}

#[test]
fn zoo_is_edge_and_vertex_reflecting_with_distance_property() {
    for g in reflecting_zoo() {
        for l in 0..g.party_count() {
            assert!(is_edge_reflecting(&g, l).unwrap().holds);
        }
        assert!(is_vertex_reflecting(&g).unwrap().holds);
        assert!(cut_count_equals_distance(&g).unwrap().holds());
    }
}

#[test]
fn antipodal_and_opposite_pairs() {
    let cube = build_hypercube(3).unwrap();
    let cuts = enumerate_reflecting_cuts(&cube).unwrap();
    assert_eq!(cuts.iter().filter(|c| c.separates_vertices(0, 7)).count(), 3);
    let c4 = build_cycle(4, false).unwrap();
    let cuts = enumerate_reflecting_cuts(&c4).unwrap();
    let far = (0..8).find(|&v| c4.distances_from(0)[v] == 4).unwrap();
    assert_eq!(cuts.iter().filter(|c| c.separates_vertices(0, far)).count(), 4);
    let two = (0..8).find(|&v| c4.distances_from(0)[v] == 2).unwrap();
    assert_eq!(cuts.iter().filter(|c| c.separates_vertices(0, two)).count(), 2);
}

#[test]
fn frozen_fixture_has_no_cut() {
    let g = read_graph(&fixture("no_cut.json")).unwrap();
    assert!(g.validate().passed());
    assert!(enumerate_reflecting_cuts(&g).unwrap().is_empty());
    assert!(!is_vertex_reflecting(&g).unwrap().holds);
}

#[test]
fn coxeter_dihedral_is_cycle() {
    for n in 2..=8u32 {
        let g = build_coxeter_cayley(&CoxeterMatrix::dihedral(n).unwrap(), 10_000).unwrap();
        assert!(are_isomorphic(&g, &build_cycle(n as usize, false).unwrap()), "n = {n}");
    }
}

fn relabel(g: &PsiGraph, perm: &[usize]) -> PsiGraph {
    let mut parity = vec![g.parity(0); g.vertex_count()];
    for v in 0..g.vertex_count() {
        parity[perm[v]] = g.parity(v);
    }
    let edges = g.edges().iter().map(|e| Edge::new(perm[e.u], perm[e.v], e.label)).collect();
    PsiGraph::new(g.party_count(), parity, edges)
}

fn small_graph() -> impl Strategy<Value = PsiGraph> {
    prop_oneof![
        (1usize..=5).prop_map(|n| build_cycle(n, false).unwrap()),
        (1usize..=3).prop_map(|q| build_hypercube(q).unwrap()),
        (1usize..=3).prop_map(|n| cartesian_product(&build_cycle(1, true).unwrap(), &build_cycle(n, false).unwrap())),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_is_associative(a in small_graph(), b in small_graph(), c in small_graph()) {
        prop_assume!(a.vertex_count() * b.vertex_count() * c.vertex_count() <= 64);
        let left = cartesian_product(&cartesian_product(&a, &b), &c);
        let right = cartesian_product(&a, &cartesian_product(&b, &c));
        prop_assert!(left.validate().passed());
        prop_assert!(are_isomorphic(&left, &right));
    }

    #[test]
    fn cut_count_survives_renumbering(g in small_graph(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..g.vertex_count()).collect();
        perm.shuffle(&mut psi_monotones::linalg::rng(seed));
        let h = relabel(&g, &perm);
        prop_assert!(are_isomorphic(&g, &h));
        prop_assert_eq!(
            enumerate_reflecting_cuts(&g).unwrap().len(),
            enumerate_reflecting_cuts(&h).unwrap().len()
        );
    }

    #[test]
    fn edge_and_vertex_reflecting_agree(g in small_graph()) {
        prop_assume!(g.party_count() >= 2);
        let all_edges = (0..g.party_count()).all(|l| is_edge_reflecting(&g, l).unwrap().holds);
        prop_assert_eq!(all_edges, is_vertex_reflecting(&g).unwrap().holds);
    }
}
