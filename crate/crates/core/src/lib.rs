pub mod classify;
pub mod diagonal;
pub mod duality;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod graph;
pub mod instance;
pub mod io;
pub mod lp;
pub mod maxsa;
pub mod minbaker;
pub mod structure;
pub mod value;

pub use error::{Result, VcspError};
pub use instance::{Assignment, Instance, PartialAssignment};
pub use structure::{Mode, Signature, ValuedStructure};
pub use value::{ExtRat, Rational};
