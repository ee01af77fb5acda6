//! Each chapter of the guide in `book/src` is a module here, so
//! `cargo test --doc -p restless-book` runs every listing in it.

#[doc = include_str!("../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../book/src/chains.md")]
pub mod chains {}
#[doc = include_str!("../../book/src/environment.md")]
pub mod environment {}
#[doc = include_str!("../../book/src/belief.md")]
pub mod belief {}
#[doc = include_str!("../../book/src/policies.md")]
pub mod policies {}
#[doc = include_str!("../../book/src/coupling.md")]
pub mod coupling {}
#[doc = include_str!("../../book/src/experiments.md")]
pub mod experiments {}
