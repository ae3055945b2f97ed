//! Seeded generators, named fixtures, brute-force oracles and the law suite.

pub mod fixtures;
pub mod matrices;
pub mod oracle;
pub mod presheaf;
pub mod suite;

pub use fixtures::*;
pub use matrices::random_projection_matrix;
pub use oracle::oracle_verify;
pub use presheaf::*;
pub use suite::*;
