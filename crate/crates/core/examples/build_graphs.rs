//! Builds the standard ψ-graph families and writes one to JSON.
//!
//! Run with `cargo run --example build_graphs [out.json]`.

use psi_monotones::graph::{build_cycle, build_cycle_product, build_hypercube, build_norm_graph, cartesian_product};
use psi_monotones::io::write_json;
use psi_monotones::PsiGraph;

fn describe(name: &str, g: &PsiGraph) {
    let report = g.validate();
    println!(
        "{name:<10} parties {:>2}  vertices {:>3}  kets {:>3}  simple {:<5}  valid {}",
        g.party_count(),
        g.vertex_count(),
        g.ket_count(),
        g.is_simple(),
        report.passed()
    );
}

fn main() -> psi_monotones::Result<()> {
    for n in 1..=4 {
        describe(&format!("C{n}"), &build_cycle(n, false)?);
    }
    describe("C1 merged", &build_cycle(1, true)?);
    for q in 1..=4 {
        describe(&format!("E{q}"), &build_hypercube(q)?);
    }
    describe("norm(3)", &build_norm_graph(3)?);

    // the colored product puts the labels of the second factor after those of the first
    let c3 = build_cycle(3, false)?;
    let c1 = build_cycle(1, true)?;
    let c3c1 = cartesian_product(&c3, &c1);
    describe("C3xC1", &c3c1);
    describe("C1xC2", &build_cycle_product(&[1, 2])?);

    if let Some(path) = std::env::args().nth(1) {
        write_json(std::path::Path::new(&path), &c3c1)?;
        println!("wrote C3xC1 to {path}");
    }
    Ok(())
}
