//! Keeps the guide in `book/` honest: every fenced Rust snippet in the
//! chapters compiles and runs as a doc test of this crate.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/linear-algebra.md")]
mod linear_algebra {}

#[doc = include_str!("../../../book/src/channels.md")]
mod channels {}

#[doc = include_str!("../../../book/src/fisher-information.md")]
mod fisher_information {}

#[doc = include_str!("../../../book/src/clock-tradeoff.md")]
mod clock_tradeoff {}

#[doc = include_str!("../../../book/src/metrological-codes.md")]
mod metrological_codes {}

#[doc = include_str!("../../../book/src/bounds.md")]
mod bounds {}

#[doc = include_str!("../../../book/src/lindblad.md")]
mod lindblad {}

#[doc = include_str!("../../../book/src/many-body.md")]
mod many_body {}

#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
