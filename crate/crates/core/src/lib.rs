pub mod bdg;
pub mod ed;
pub mod error;
pub mod freefermion;
pub mod linalg;
pub mod lswt;
pub mod params;
pub mod scaling;
pub mod sweep;
pub mod topology;

pub use error::{Error, Result};
pub use params::{momentum_grid, Boundary, ModelParams, MomentumGrid, ValidatedParams};
