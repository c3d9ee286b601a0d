//! Algebra and geometry of maximum scattered linear sets of PG(1,q^5).
//!
//! The crate builds the field tower F_p ⊂ F_q ⊂ F_{q^5}, the algebra of
//! F_q-linearized polynomials with the scatteredness oracle, exact projective
//! geometry in PG(4,q^5) with the canonical subgeometry and its Frobenius
//! collineation, the classification of projecting configurations, the named
//! families of scattered sets, the quartic-curve verification machinery, and
//! the exhaustive search campaigns over these objects.

pub mod config;
pub mod curve;
pub mod families;
pub mod gfield;
pub mod linpoly;
pub mod projgeom;
pub mod search;

pub use gfield::{ArithMode, FFElement, FieldCtx, FieldError, Mat5, Vec5, EXT};
