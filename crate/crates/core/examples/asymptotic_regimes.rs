//! Exact intrinsic volumes against the bulk, left-edge and right-edge
//! asymptotics as n grows.

use lpvol::asymptotics::{bulk_asymptotic, left_edge_asymptotic, right_edge_asymptotic};
use lpvol::exactvol::intrinsic_volume;
use lpvol::{PBallSpec, QuadConfig};

fn main() -> lpvol::Result<()> {
    let cfg = QuadConfig::default();
    let p = 1.5;
    println!("bulk j = n/2");
    for n in [20, 40, 80, 160] {
        let exact = intrinsic_volume(&PBallSpec::unit(p, n)?, n / 2, &cfg)?.value;
        let asym = bulk_asymptotic(p, n, n / 2, &cfg)?;
        println!("  n={n:>4} exact/asym = {:.6}", (exact.log_abs() - asym.log_abs()).exp());
    }
    println!("left edge j = 1 (ratio V_1 / prediction)");
    for n in [50, 200, 500] {
        let exact = intrinsic_volume(&PBallSpec::unit(p, n)?, 1, &cfg)?.value_f64();
        println!("  n={n:>4} {:.6}", exact / left_edge_asymptotic(p, n, 1)?);
    }
    println!("right edge m = 1, 2");
    for n in [30, 60, 120] {
        let spec = PBallSpec::unit(p, n)?;
        for m in [1, 2] {
            let exact = intrinsic_volume(&spec, n - m, &cfg)?.value;
            let asym = right_edge_asymptotic(p, n, m)?;
            println!("  n={n:>4} m={m} {:.6}", (exact.log_abs() - asym.log_abs()).exp());
        }
    }
    Ok(())
}
