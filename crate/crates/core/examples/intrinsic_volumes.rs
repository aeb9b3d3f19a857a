//! Exact intrinsic volumes of unit lp-balls, compared with the closed forms
//! at p = 1, 2 and the cube limit.

use lpvol::exactvol::{intrinsic_volume_profile, is_log_concave};
use lpvol::oracles::{ball_vj, crosspolytope_vj, unit_cube_vj};
use lpvol::{PBallSpec, QuadConfig};

fn main() -> lpvol::Result<()> {
    let cfg = QuadConfig::default();
    let n = 5;
    println!("{:>6} {:>3} {:>14} {:>14}", "p", "j", "V_j", "reference");
    for p in [1.05, 1.5, 2.0, 4.0, 64.0] {
        let spec = PBallSpec::unit(p, n)?;
        let profile = intrinsic_volume_profile(&spec, &cfg)?;
        for (j, r) in profile.iter().enumerate() {
            let reference = match p {
                x if x == 2.0 => ball_vj(n, j),
                x if x < 1.1 => crosspolytope_vj(n, j, &cfg)?,
                x if x > 10.0 => unit_cube_vj(n, j),
                _ => f64::NAN,
            };
            println!("{p:>6} {j:>3} {:>14.8} {:>14.8}", r.value_f64(), reference);
        }
        let logs: Vec<_> = profile.iter().map(|r| r.value).collect();
        println!("       log-concave: {}", is_log_concave(&logs, 1e-9));
    }
    Ok(())
}
