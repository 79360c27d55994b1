//! Help-query detection and response retrieval for conversational assistants.

mod binio;
pub mod error;
pub mod harness;
pub mod models;
pub mod nnet;
pub mod pipeline;
pub mod pos_mapper;
pub mod retrieval;
pub mod textnorm;
pub mod vocab_embed;

pub use error::{Error, Result};
