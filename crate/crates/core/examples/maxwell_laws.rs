//! Scaled coordinate moments under normalized curvature measures converge to
//! the bulk and edge limit laws.

use lpvol::maxwell::{convergence_table, gaps_decreasing, limit_density, LimitLaw, Regime};
use lpvol::QuadConfig;

fn main() -> lpvol::Result<()> {
    let cfg = QuadConfig::default();
    let p = 3.0;
    for regime in [Regime::Bulk { alpha: 0.5 }, Regime::LeftEdge { j: 1 }, Regime::RightEdge { m: 1 }] {
        let law = LimitLaw::new(p, regime, &cfg)?;
        let dens: Vec<String> = [0.0, 0.5, 1.0, 1.5].iter().map(|&u| format!("{:.5}", limit_density(&law, u))).collect();
        println!("{regime:?}: density at 0, .5, 1, 1.5 = {}", dens.join(" "));
        let rows = convergence_table(p, regime, &[2.0], &[25, 50, 100, 200], &cfg)?;
        for r in &rows {
            println!("  n={:>4} j={:>4} moment {:.6} limit {:.6} gap {:.2e}", r.n, r.j, r.scaled_moment, r.limit, r.rel_gap);
        }
        println!("  gaps decreasing: {}", gaps_decreasing(&rows, 1e-8));
    }
    Ok(())
}
