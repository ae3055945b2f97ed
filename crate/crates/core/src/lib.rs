//! Sheaves on a finite locale `B` in three interchangeable forms: étale
//! `B`-locales, Hilbert `B`-modules equipped with Hilbert bases, and `B`-valued
//! projection matrices, together with exhaustive checkers for the laws that
//! relate them.

pub mod bmodule;
pub mod error;
pub mod genfix;
pub mod hilbert;
pub mod homs;
pub mod lattice;
pub mod matrix;
pub mod report;
pub mod schema;

pub use error::{Error, Result};
pub use lattice::{downset_frame, verify_frame, Frame, FrameElement, Lattice, Poset};
pub use report::{LawCheck, LawReport, Witness};
