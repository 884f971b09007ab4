//! Pre-dimensions, strong embeddings and the pregeometries of ab-initio
//! classes of n-ary and clique structures.

pub mod acceptance;
pub mod amalgam;
pub mod enumerate;
mod error;
mod flow;
pub mod format;
pub mod gadget;
pub mod generic;
pub mod geometry;
pub mod iso;
pub mod oracle;
pub mod predim;
pub mod pregeometry;
pub mod random;
pub mod reduct;
pub mod structures;

pub use error::{Error, Result};
pub use predim::{delta, in_class, is_strong, lambda, predim, predim_rel, PredimEngine, StrongReport, StrongWitness};
pub use pregeometry::{closure, dims, pg_isomorphic, pregeometry_of, pregeometry_of_bounded, Pregeometry};
pub use structures::{
    set_of, ClassParams, Clique, CliqueStructure, Element, ElementSet, Embedding, Kind, NaryStructure, RTuple, Structure,
    ValidationReport, Violation,
};
