//! Independent closed forms used as references: sphere, cube, crosspolytope,
//! planar perimeter, and the projection onto an lp-ball.

use lpvol::oracles::{ball_vj, crosspolytope_vj, cube_vj, planar_perimeter, project_lp_ball};
use lpvol::{PBallSpec, QuadConfig};

fn main() -> lpvol::Result<()> {
    let cfg = QuadConfig::default();
    for j in 0..=4 {
        println!(
            "n=4 j={j}: ball {:.8} box {:.8} crosspolytope {:.8}",
            ball_vj(4, j),
            cube_vj(j, &[1.0, 0.5, 2.0, 1.0])?,
            crosspolytope_vj(4, j, &cfg)?
        );
    }
    for p in [1.2, 2.0, 8.0] {
        let disk = PBallSpec::unit(p, 2)?;
        println!("perimeter of B_{p}^2: {:.10}", planar_perimeter(&disk, &cfg)?);
    }
    let spec = PBallSpec::new(1.5, vec![1.0, 2.0, 0.5])?;
    let y = project_lp_ball(&spec, &[2.0, -1.0, 0.5])?;
    println!("projection {y:?}, gauge {:.12}", spec.gauge(&y));
    Ok(())
}
