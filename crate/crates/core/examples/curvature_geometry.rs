//! Principal curvatures, curvature densities and the Gauss map at a boundary
//! point of a weighted lp-ball.

use lpvol::curvature::{
    curvature_density, gauss_curvature, gauss_map, inverse_gauss_map, principal_curvatures, support_function,
    BoundaryPoint,
};
use lpvol::PBallSpec;

fn main() -> lpvol::Result<()> {
    let spec = PBallSpec::new(3.0, vec![1.0, 0.5, 2.0, 1.5])?;
    let pt = BoundaryPoint::from_direction(&spec, &[0.3, -1.0, 0.2, 0.7])?;
    println!("point      {:?}", pt.coords());
    println!("curvatures {:?}", principal_curvatures(&pt)?);
    println!("gauss      {:.10}", gauss_curvature(&pt)?);
    for m in 1..=4 {
        println!("density of Phi_{} : {:.10}", 4 - m, curvature_density(&pt, m)?);
    }
    let u = gauss_map(&pt)?;
    let back = inverse_gauss_map(&spec, &u)?;
    println!("normal     {u:?}");
    println!("round trip {:?}", back.coords());
    println!("support    {:.12}", support_function(&spec, &u)?);
    Ok(())
}
