//! Compiles the guide's code blocks as doc-tests so the book cannot drift
//! from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/polynomials.md")]
pub mod polynomials {}
#[doc = include_str!("../../../book/src/recursion.md")]
pub mod recursion {}
#[doc = include_str!("../../../book/src/forms.md")]
pub mod forms {}
#[doc = include_str!("../../../book/src/partition.md")]
pub mod partition {}
#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}
#[doc = include_str!("../../../book/src/momentum.md")]
pub mod momentum {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
