//! Sift chains: the text format, compilation and validation.

pub mod compile;
pub mod spec;
pub mod validate;

pub use compile::{compile_chain, CompiledStep, SiftChain};
pub use spec::{ChainSpec, Strategy};
pub use validate::{default_oracle_cap, validate_chain, Mode, Report, Status};
