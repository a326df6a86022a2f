//! Averaged monotonicity under random one-party Kraus instruments.
//!
//! The last spec uses a negative exponent on Z, which breaks monotonicity;
//! the fuzzer should flag it.

use psi_monotones::locc::fuzz_monotonicity;
use psi_monotones::monotones::{Exponent, GraphSource, MonotoneSpec};

fn main() -> psi_monotones::Result<()> {
    let cases = [
        ("vidal A|BC k=1", MonotoneSpec::vidal(&[0], 1), vec![2, 2, 2]),
        ("nu_2", MonotoneSpec::nu(2), vec![2, 2, 2]),
        ("multi-Renyi q=3", MonotoneSpec::MultiRenyi { q: 3 }, vec![2, 2, 2]),
        ("C3 on qutrits", MonotoneSpec::graph(GraphSource::Cycle { n: 3 }), vec![3, 3]),
        (
            "C1xC2, exponent -1/4",
            MonotoneSpec::Graph {
                graph: GraphSource::CycleProduct { ns: vec![1, 2] },
                exponent: Some(Exponent { num: -1, den: 4 }),
            },
            vec![2, 2, 2],
        ),
    ];
    for (name, spec, dims) in &cases {
        let r = fuzz_monotonicity(spec, dims, 300, 0)?;
        println!(
            "{name:<22} passed {:<5}  violations {:>3}/{}  worst margin {:+.2e}",
            r.passed, r.violations, r.trials, r.worst_margin
        );
    }
    Ok(())
}
