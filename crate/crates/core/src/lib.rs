//! Intrinsic volumes, curvature measures and high-dimensional asymptotics of
//! coordinate-weighted lp-balls `{x : Σ |a_i x_i|^p ≤ 1}`.

pub mod asymptotics;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod exactvol;
pub mod logvalue;
pub mod maxwell;
pub mod oracles;
pub mod quad;
pub mod specfun;
pub mod symmetric;

pub use error::{Error, Result};
pub use exactvol::{MomentRequest, PBallSpec};
pub use logvalue::LogValue;
pub use quad::QuadConfig;
pub use specfun::PExponent;
