//! Evaluates every monotone family on the asymmetric GHZ state.

use psi_monotones::locc::asymmetric_ghz;
use psi_monotones::monotones::{
    can_convert_with_certainty, composite_sweep, kyfan_crosscheck, GraphSource, MonotoneSpec,
};
use psi_monotones::tensor::partial_trace;
use psi_monotones::PureState;

fn main() -> psi_monotones::Result<()> {
    let psi = asymmetric_ghz();
    let specs = [
        ("vidal A|BC, k=1", MonotoneSpec::vidal(&[0], 1)),
        ("vidal AB|C, k=2", MonotoneSpec::vidal(&[0, 1], 2)),
        ("nu_2 (C1xC2)", MonotoneSpec::nu(2)),
        ("nu_3 (C1xC3)", MonotoneSpec::nu(3)),
        ("multi-Renyi E3", MonotoneSpec::MultiRenyi { q: 3 }),
        ("graph C2xC1", MonotoneSpec::graph(GraphSource::CycleProduct { ns: vec![2, 1] })),
        ("bl ranks 1,1,1", MonotoneSpec::Bl { ranks: vec![1, 1, 1], restarts: 8, seed: 0 }),
        ("bl ranks 2,1,1", MonotoneSpec::Bl { ranks: vec![2, 1, 1], restarts: 8, seed: 0 }),
    ];
    for (name, spec) in &specs {
        let v = spec.prepare(psi.dims())?.evaluate_detailed(&psi)?;
        println!("{name:<18} {:.6}", v.value);
    }

    let rho = partial_trace(&psi, 2)?;
    let kf = kyfan_crosscheck(&rho, 2, 1000, 0)?;
    println!("Ky Fan k=2: top sum {:.6}, best of {} samples {:.6}", kf.top_k_sum, kf.samples, kf.max_sampled);

    // majorization across A|BC
    let ghz = PureState::ghz(3);
    println!(
        "GHZ -> asymmetric GHZ with certainty: {}; reverse: {}",
        can_convert_with_certainty(&ghz, &psi, &[0])?,
        can_convert_with_certainty(&psi, &ghz, &[0])?
    );

    let c = composite_sweep(200, 4, 0)?;
    println!("composite floor over {} checks: worst margin {:.2e}, passed {}", c.checks, c.worst_margin, c.passed);
    Ok(())
}
