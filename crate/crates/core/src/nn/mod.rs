//! Fully-connected networks with hand-written backpropagation, and Adam.

mod adam;
mod mlp;

pub use adam::{AdamConfig, AdamState};
pub use mlp::{Dense, ForwardCache, ForwardMode, Mlp, MlpParams, MlpSpec};
