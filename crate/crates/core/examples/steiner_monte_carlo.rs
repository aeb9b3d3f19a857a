//! Hit-or-miss volume of the parallel body `B_p^n + t B_2^n` against the
//! Steiner polynomial built from exact intrinsic volumes.

use lpvol::exactvol::intrinsic_volume;
use lpvol::oracles::{steiner_mc_volume, McConfig};
use lpvol::specfun::kappa;
use lpvol::{PBallSpec, QuadConfig};

fn main() -> lpvol::Result<()> {
    let cfg = QuadConfig::default();
    let mc = McConfig::new(400_000, 20_260_416);
    for (p, n) in [(1.5, 2), (3.0, 3)] {
        let spec = PBallSpec::unit(p, n)?;
        let v: Vec<f64> = (0..=n).map(|j| intrinsic_volume(&spec, j, &cfg).map(|r| r.value_f64())).collect::<Result<_, _>>()?;
        for t in [0.1f64, 0.5, 1.0] {
            let steiner: f64 = (0..=n).map(|j| kappa(n - j) * v[j] * t.powi((n - j) as i32)).sum();
            let est = steiner_mc_volume(&spec, t, &mc)?;
            println!(
                "p={p} n={n} t={t}: steiner {steiner:.5}, monte carlo {:.5} +- {:.5} ({:+.2} se)",
                est.estimate,
                est.std_err,
                (est.estimate - steiner) / est.std_err
            );
        }
    }
    Ok(())
}
