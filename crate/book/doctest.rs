// mdbook cannot run examples that depend on workspace crates, so every
// chapter is included here as a module doc and `cargo test` runs its code
// blocks as doctests. One module per chapter keeps failures attributable.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/pulses.md")]
pub mod pulses {}
#[doc = include_str!("src/gates.md")]
pub mod gates {}
#[doc = include_str!("src/scenarios.md")]
pub mod scenarios {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
