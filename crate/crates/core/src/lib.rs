pub mod coloring;
pub mod config;
pub mod error;
pub mod laws;
pub mod linalg;
pub mod opalg;
pub mod pred;
pub mod qfun;
pub mod qrel;
pub mod qset;
pub mod random;

pub use error::{Error, Result};
pub use linalg::{CMatrix, OperatorSubspace, Tolerance};
pub use opalg::BlockOperator;
pub use qrel::Relation;
pub use qset::{Atom, QuantumSet};
