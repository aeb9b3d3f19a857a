//! Weighted balls `{Σ|a_i x_i|^p ≤ 1}`: at p = 2 these are ellipsoids with
//! semi-axes `1/a_i`, and both ellipsoid formulas are checked.

use lpvol::exactvol::intrinsic_volume_weighted;
use lpvol::oracles::{ellipsoid_vj, weighted_crosspolytope_vj, EllipsoidForm};
use lpvol::{PBallSpec, QuadConfig};

fn main() -> lpvol::Result<()> {
    let cfg = QuadConfig::default();
    let a = vec![1.0, 2.0, 4.0];
    let semi: Vec<f64> = a.iter().map(|x| 1.0 / x).collect();
    let spec = PBallSpec::new(2.0, a.clone())?;
    for j in 1..=2 {
        let v = intrinsic_volume_weighted(&spec, j, &cfg)?.value_f64();
        let fa = ellipsoid_vj(&semi, j, &cfg, EllipsoidForm::A)?;
        let fb = ellipsoid_vj(&semi, j, &cfg, EllipsoidForm::B)?;
        println!("ellipsoid j={j}: {v:.12} form A {fa:.12} form B {fb:.12}");
    }
    let near_one = PBallSpec::new(1.02, a.clone())?;
    for j in 1..=2 {
        let v = intrinsic_volume_weighted(&near_one, j, &cfg)?.value_f64();
        let w = weighted_crosspolytope_vj(&a, j, &cfg)?;
        println!("p=1.02 j={j}: {v:.6}, weighted crosspolytope {w:.6}");
    }
    Ok(())
}
