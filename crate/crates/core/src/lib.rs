pub mod error;
pub mod harmonic;
pub mod map;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod table;
pub mod trajectory;
pub mod whittaker;

pub use error::{Error, Result};
pub use model::*;
