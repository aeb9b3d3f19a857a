//! The exponential profile `lim (1/n) log V_{αn}(B_p^n)` and the reference
//! profiles of the cube, ball, crosspolytope and simplex.

use lpvol::asymptotics::{exp_profile, profile_references};
use lpvol::QuadConfig;

fn main() -> lpvol::Result<()> {
    let cfg = QuadConfig::default();
    println!("{:>5} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}", "alpha", "p=1.2", "p=3", "cube", "ball", "cross", "simplex");
    for k in 1..=19 {
        let alpha = 0.05 * k as f64;
        let g12 = exp_profile(1.2, alpha, &cfg)?.g_value;
        let g3 = exp_profile(3.0, alpha, &cfg)?.g_value;
        let r = profile_references(alpha)?;
        println!(
            "{alpha:>5.2} {g12:>10.6} {g3:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            r.g_inf, r.g_2, r.g_1, r.g_simplex
        );
    }
    Ok(())
}
