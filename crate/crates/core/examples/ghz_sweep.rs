//! Transition-probability bounds along an SLOCC path away from GHZ.
//!
//! `cargo run --example ghz_sweep > sweep.csv` writes the same CSV the
//! `psimono bounds ghz-example` command produces.

use psi_monotones::io::write_sweep_csv;
use psi_monotones::locc::{alpha_grid, ghz_sweep};

fn main() -> psi_monotones::Result<()> {
    let ns = [2, 3, 4];
    let rows = ghz_sweep(&alpha_grid(-1.0, 1.0, 21), &ns)?;
    for row in &rows {
        let tightest = row.upper_bounds().fold(1.0f64, f64::min);
        eprintln!(
            "alpha {:+.2}  lower {:.4}  tightest upper {:.4}  gap {:.4}",
            row.alpha,
            row.p_lower,
            tightest,
            tightest - row.p_lower
        );
    }
    write_sweep_csv(std::io::stdout().lock(), &ns, &rows)
}
