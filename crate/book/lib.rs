// mdbook cannot run listings that depend on a workspace crate, so each
// chapter is included as a module doc and `cargo test --doc` runs them.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/corpus.md")]
pub mod corpus {}
#[doc = include_str!("src/cleaning.md")]
pub mod cleaning {}
#[doc = include_str!("src/features.md")]
pub mod features {}
#[doc = include_str!("src/classifiers.md")]
pub mod classifiers {}
#[doc = include_str!("src/evaluation.md")]
pub mod evaluation {}
#[doc = include_str!("src/analysis.md")]
pub mod analysis {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
