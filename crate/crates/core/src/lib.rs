//! Integer chain complexes for relative correspondences over finite
//! geometry models: Čech cycle complexes, function complexes with their
//! structure maps, distinguished subcomplexes and diagonal extensions.

pub mod cech;
pub mod diagonal;
pub mod error;
pub mod funcx;
pub mod geomodel;
pub mod homalg;
pub mod ordsets;

pub use error::{Error, Result};
