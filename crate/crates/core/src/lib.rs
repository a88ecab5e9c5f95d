pub mod blackbox;
pub mod chain;
pub mod element;
pub mod error;
pub mod membership;
pub mod oracle;
pub mod random;
pub mod sift;
pub mod slp;

pub use blackbox::{BlackBoxGroup, MultCounter, OrderSet};
pub use element::{ElementKind, GroupElement, Matrix, Perm};
pub use error::{Error, Result};
pub use slp::{Compose, Slp, SlpBuilder};
