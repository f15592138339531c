//! Detecting AI-generated Tamil and Malayalam product reviews with
//! TF-IDF and Word2Vec features and classical classifiers.
//!
//! ```
//! use revdetect::textprep::{clean_text, tokenize};
//!
//! let tokens = tokenize(&clean_text("நல்ல தரம்!! 10/10"));
//! assert_eq!(tokens, ["நல்ல", "தரம்"]);
//! ```
//!
//! The [`commands`] module holds the operations behind the `revdetect`
//! binary; the other modules are the pipeline stages.

pub mod analysis;
pub mod bundle;
pub mod classical;
pub mod commands;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod textprep;

pub use error::{Error, Result};
