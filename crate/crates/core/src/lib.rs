pub mod ap_functions;
pub mod cli;
pub mod error;
pub mod generators;
pub mod kronecker;
pub mod matching;
pub mod measures;
pub mod model;
pub mod one_dim;
pub mod signed_examples;
mod spatial;
