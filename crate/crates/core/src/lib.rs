//! Teleparallel gravity on a chart: tetrads, the Weitzenböck connection and
//! its torsion, the gravity Lie algebroid built on the tetrad frame, and the
//! Euler–Lagrange structure of the quadratic torsion Lagrangian. Every
//! identity is checked numerically by the harness.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod algebroid;
pub mod error;
pub mod expr;
pub mod fieldeq;
pub mod harness;
pub mod linalg;
pub mod telegeom;
pub mod tetrad;

pub use error::{Error, Result};
