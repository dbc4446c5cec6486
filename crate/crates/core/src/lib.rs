//! Path semigroups of posets, their loop groups, and the nets of Hilbert
//! spaces and graded algebras built over them.

pub mod algebra_net;
pub mod error;
pub mod fixtures;
pub mod graded;
pub mod homotopy;
pub mod json;
pub mod net;
pub mod paths;
pub mod poset;
pub mod report;
pub mod suite;

pub use error::{AlgebraError, CoronaError, HomotopyError, InputError, NetError, PathError, PosetError};
pub use graded::{GradedElement, QMat};
pub use net::TruncatedNet;
pub use paths::{PathClass, PathSemigroup, PathSeq, Step};
pub use poset::{Elem, Poset};
pub use report::{Report, Status};
