// mdbook cannot run snippets that depend on workspace crates, so every chapter
// is pulled in as module docs and `cargo test --doc` runs the listings.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/basis.md")]
pub mod basis {}
#[doc = include_str!("src/kernels.md")]
pub mod kernels {}
#[doc = include_str!("src/quadrature.md")]
pub mod quadrature {}
#[doc = include_str!("src/coherent.md")]
pub mod coherent {}
#[doc = include_str!("src/transform.md")]
pub mod transform {}
#[doc = include_str!("src/verification.md")]
pub mod verification {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
