//! A workbench for finite-model constraint logic: relational structures and
//! cores, positive Horn sentences, reference CSP/QCSP evaluators,
//! near-unanimity search, collapsings of quantified instances, and the
//! reductions between QCSP(B) and QCSP of a c-valid structure.

pub mod collapse;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod generate;
pub mod logic;
pub mod microcosm;
pub mod polymorphism;
pub mod solvers;
pub mod structures;
pub mod verify;

pub use error::{Error, Result};
pub use logic::{Atom, FOSentence, Formula, PHSentence, PartitionedStructure, Quantifier, Term};
pub use polymorphism::OperationTable;
pub use structures::{Element, Mapping, Signature, Structure};
