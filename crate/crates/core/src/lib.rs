//! Bug localization across many repositories.
//!
//! An offline pass turns each repository into a tree of natural-language
//! summaries (file, directory, and a repository seed). Online search then
//! routes a bug report to repositories, narrows to directories, and ranks
//! files, all by prompting a language model over those summaries.

pub mod builder;
pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod kb;
pub mod llm;
pub mod prompts;
pub mod search;
pub mod synth;

pub use error::{Error, Result};
