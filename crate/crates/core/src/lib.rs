//! Exact arithmetic for the (l,k)-symmetric operation
//! `a ⊛ b = lab + k(a+b) + (k²−k)/l`, generators for the configurations it
//! makes monochromatic, the dyadic operations ⊕ and ⊗, Hales-Jewett word
//! spaces, and a finite-window partition-regularity search engine.

pub mod dyadic;
pub mod families;
pub mod hales_jewett;
pub mod identities;
mod images;
pub mod scalar;
pub mod search;
pub mod symmetric;

pub use families::{generate, FamilyDescriptor, FamilyError, FamilyKind, Instance, Shape};
pub use scalar::ExactScalar;
pub use search::{Coloring, Domain, SearchBudget, SearchOptions, SearchReport, Window};
pub use symmetric::{SymmetricContext, SymmetricError};
