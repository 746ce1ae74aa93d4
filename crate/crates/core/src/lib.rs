//! Exact computations around Chow rings of fans, tropical cohomology and the tropical
//! Steenbrink complex.

pub mod linalg;
pub mod lp;
pub mod fan;
pub mod matroid;
pub mod chow;
pub mod hodge;
pub mod polyhedral;
pub mod tropcoh;
pub mod steenbrink;
pub mod hlstruct;
