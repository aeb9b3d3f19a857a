//! Coordinates of uniform points on the j-skeleton of the cube and the
//! crosspolytope, compared with their limit distributions.

use lpvol::maxwell::{kolmogorov_distance, sample_crosspolytope_skeleton, sample_cube_skeleton, SkeletonLimit};

fn main() -> lpvol::Result<()> {
    let (n, seed) = (2000, 7);
    for alpha in [0.25, 0.5, 0.75] {
        let j = (alpha * n as f64) as usize;
        let cube = sample_cube_skeleton(n, j, 1, 100_000, seed)?;
        let cross = sample_crosspolytope_skeleton(n, j, 1, 100_000, seed)?;
        let dc = kolmogorov_distance(&cube.column(0), &SkeletonLimit::Cube { alpha });
        let dx = kolmogorov_distance(&cross.column(0), &SkeletonLimit::Crosspolytope { alpha });
        println!("alpha={alpha}: Kolmogorov distance cube {dc:.4}, crosspolytope {dx:.4}");
    }
    Ok(())
}
