//! Enumerates reflecting cuts and the reflection properties they decide.

use psi_monotones::graph::{build_cycle, build_hypercube, cartesian_product};
use psi_monotones::reflect::{
    cut_count_equals_distance, enumerate_reflecting_cuts, is_edge_reflecting, is_vertex_reflecting,
};
use psi_monotones::PsiGraph;

fn report(name: &str, g: &PsiGraph) -> psi_monotones::Result<()> {
    let cuts = enumerate_reflecting_cuts(g)?;
    println!("{name}: {} reflecting cuts", cuts.len());
    for (i, cut) in cuts.iter().enumerate() {
        let labels: Vec<usize> = cut.cut_edges().iter().map(|&e| g.edge(e).label).collect();
        println!("  cut {i}: edges {:?} with labels {labels:?}", cut.cut_edges());
    }
    for label in 0..g.party_count() {
        let d = is_edge_reflecting(g, label)?;
        println!("  label {label} edge-reflecting: {}", d.holds);
    }
    println!("  vertex-reflecting: {}", is_vertex_reflecting(g)?.holds);
    let dist = cut_count_equals_distance(g)?;
    println!(
        "  separating cuts equal distance on {} pairs: {}",
        dist.pairs_checked,
        dist.holds()
    );
    Ok(())
}

fn main() -> psi_monotones::Result<()> {
    report("C3", &build_cycle(3, false)?)?;
    report("E3", &build_hypercube(3)?)?;
    report("C3xC1", &cartesian_product(&build_cycle(3, false)?, &build_cycle(1, true)?))?;

    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/no_cut.json");
    report("no_cut fixture", &psi_monotones::io::read_graph(&path)?)?;
    Ok(())
}
