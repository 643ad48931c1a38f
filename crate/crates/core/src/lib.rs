//! Positive Dehn-twist factorizations on a closed genus-g surface, the
//! rewriting moves on them, exact signature and slope ledgers, and the
//! low-slope Lefschetz fibration constructions built from those pieces.
//!
//! The lattice, Smith form, surface and ledger layers are generic over the
//! integer type; the aliases below fix the common choices.

pub mod extension;
pub mod lattice;
pub mod ledger;
pub mod pipelines;
pub mod relators;
pub mod scalar;
pub mod snf;
pub mod surface;
pub mod word;

use num_bigint::BigInt;

pub use lattice::{HomologyClass, Matrix, SymplecticLattice};
pub use ledger::{InvariantLedger, SlopeReport};
pub use surface::{CurveExpr, CurveName, MapExpr, SurfaceModel};
pub use word::Factorization;

pub type Surface = SurfaceModel<i64>;
pub type BigSurface = SurfaceModel<BigInt>;
pub type Class = HomologyClass<i64>;
pub type BigClass = HomologyClass<BigInt>;
pub type IntMatrix = Matrix<i64>;
pub type BigMatrix = Matrix<BigInt>;
pub type Ledger = InvariantLedger<i64>;
pub type BigLedger = InvariantLedger<BigInt>;
pub type Report = SlopeReport<BigInt>;
