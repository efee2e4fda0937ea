//! p-ary linear codes from projective defining sets.
//!
//! Codes are built from families of coordinate subsets of `[m]`: each block of
//! the family removes a union of coordinate subspaces from `PG(m−1, p)`, and the
//! remaining points become generator-matrix columns. The crate computes exact
//! parameters and weight distributions, checks Griesmer, distance and
//! alphabet optimality, and certifies (2,δ)-locality and availability with
//! explicit, re-verifiable repair sets.

pub mod bounds;
pub mod cli;
pub mod code;
pub mod family;
pub mod gf;
pub mod locality;
pub mod matrix;
pub mod projgeom;
pub mod subset;

pub use code::{build_code, CodeError, CodeParameters, DefiningCode, LinearCode, WeightDistribution};
pub use family::{family_stats, FamilyError, FamilyStats, SubsetFamily};
pub use gf::{FieldError, FpVector, PrimeField};
pub use projgeom::{GeometryError, ProjPoint, ProjSpace};
pub use subset::IndexSet;
