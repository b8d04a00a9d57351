//! Exact computations with vector bundles and torsion-free sheaves on cycles of projective
//! lines and on the cuspidal cubic.

pub mod birkhoff;
pub mod descriptors;
pub mod error;
pub mod factor;
pub mod field;
pub mod gpfm;
pub mod laurent;
pub mod linalg;
pub mod poly;
pub mod sheaf_ops;
pub mod stable;
pub mod triples;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use laurent::{Laurent, LaurentMatrix};
pub use linalg::Mat;
pub use poly::Poly;
