//! Cayley-Bacharach sets, jet interpolation defects, truncated motivic
//! series and finite-field hypersurface censuses.

pub mod ff;
pub mod rng;
pub mod points;
pub mod cb;
pub mod series;
pub mod classes;
pub mod census;
