//! Contracts ψ-graphs against states and reduced density matrices.

use psi_monotones::graph::{build_cycle, build_cycle_product, build_hypercube};
use psi_monotones::linalg::rng;
use psi_monotones::locc::asymmetric_ghz;
use psi_monotones::tensor::{evaluate_invariant, evaluate_on_density, partial_trace, InvariantEvaluator};
use psi_monotones::PureState;

fn main() -> psi_monotones::Result<()> {
    let cube = build_hypercube(3)?;
    let ghz = PureState::ghz(3);
    println!("E3 on GHZ: {:?}", evaluate_invariant(&cube, &ghz)?);
    println!("E3 on (2|000> + |111>)/√5: {:?}", evaluate_invariant(&cube, &asymmetric_ghz())?);

    // C_n on a bipartite state is Σ λ^n over the Schmidt spectrum
    let psi = PureState::random(&[3, 3], &mut rng(1));
    let spectrum = partial_trace(&psi, 1)?.eigenvalues();
    for n in 1..=4 {
        let z = evaluate_invariant(&build_cycle(n, false)?, &psi)?.real()?;
        let direct: f64 = spectrum.iter().map(|l| l.powi(n as i32)).sum();
        println!("C{n}: contracted {z:.12}  from spectrum {direct:.12}");
    }

    // the same invariant read off a reduced density matrix
    let g = build_cycle_product(&[1, 2])?;
    let psi = PureState::random(&[2, 2, 2], &mut rng(2));
    let whole = evaluate_invariant(&g, &psi)?.re;
    for label in 0..3 {
        let rho = partial_trace(&psi, label)?;
        let reduced = evaluate_on_density(&g, label, &rho)?.re;
        println!("C1xC2 via party {label} traced out: {reduced:.12} (pure route {whole:.12})");
    }

    // a prepared evaluator reuses its contraction order across states
    let ev = InvariantEvaluator::new(&cube, &[2, 2, 2])?;
    let mut r = rng(3);
    let values: Vec<f64> = (0..5)
        .map(|_| ev.evaluate(&PureState::random(&[2, 2, 2], &mut r)).and_then(|z| z.real()))
        .collect::<psi_monotones::Result<_>>()?;
    println!("E3 on five random qubit states: {values:.4?}");
    Ok(())
}
