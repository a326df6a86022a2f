//! Cayley graphs of finite Coxeter groups as ψ-graphs.
//!
//! Dihedral groups give cycles and block-diagonal Coxeter matrices give
//! colored products; every instance here is checked for edge-reflection.

use psi_monotones::graph::{build_coxeter_cayley, build_cycle, DEFAULT_MAX_ELEMENTS};
use psi_monotones::reflect::{are_isomorphic, enumerate_reflecting_cuts, is_edge_reflecting};
use psi_monotones::{CoxeterMatrix, PsiGraph};

fn summarize(name: &str, g: &PsiGraph) -> psi_monotones::Result<()> {
    let reflecting = (0..g.party_count())
        .map(|l| is_edge_reflecting(g, l).map(|d| d.holds))
        .collect::<psi_monotones::Result<Vec<_>>>()?;
    println!(
        "{name:<12} order {:>3}  reflecting cuts {:>2}  edge-reflecting per label {reflecting:?}",
        g.vertex_count(),
        enumerate_reflecting_cuts(g)?.len()
    );
    Ok(())
}

fn main() -> psi_monotones::Result<()> {
    for n in 2..=6u32 {
        let g = build_coxeter_cayley(&CoxeterMatrix::dihedral(n)?, DEFAULT_MAX_ELEMENTS)?;
        let cycle = are_isomorphic(&g, &build_cycle(n as usize, false)?);
        summarize(&format!("I2({n})"), &g)?;
        println!("             isomorphic to C{n}: {cycle}");
    }
    let a1 = CoxeterMatrix::new(vec![vec![1]])?;
    let a3 = CoxeterMatrix::new(vec![vec![1, 3, 2], vec![3, 1, 3], vec![2, 3, 1]])?;
    let blocks = [
        ("I2(3)+A1", CoxeterMatrix::block_diagonal(&CoxeterMatrix::dihedral(3)?, &a1)),
        ("A1+A1+A1", CoxeterMatrix::block_diagonal(&CoxeterMatrix::block_diagonal(&a1, &a1), &a1)),
        ("A3", a3),
    ];
    for (name, m) in &blocks {
        summarize(name, &build_coxeter_cayley(m, DEFAULT_MAX_ELEMENTS)?)?;
    }
    Ok(())
}
