//! Dense double-precision tensors with tape-based reverse-mode gradients.
//!
//! A forward pass records operations on a [`Tape`]; [`Tape::backward`] walks
//! the record in reverse and returns exact gradients, which
//! [`Tape::backward_params`] accumulates into a [`ParamSet`]. [`Adam`] then
//! updates the parameters in place.

mod checkpoint;
mod gradcheck;
mod matrix;
mod optim;
mod param;
mod tape;

pub use checkpoint::{decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use gradcheck::{grad_check, GradCheckOptions, GradCheckReport};
pub use matrix::DenseMatrix;
pub use optim::{adam_step, Adam};
pub use param::{ParamId, ParamSet, Parameter};
pub use tape::{Gradients, Tape, Var};
