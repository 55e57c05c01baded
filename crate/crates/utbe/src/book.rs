//! Runs every code snippet in the guide as a doctest, so the book cannot
//! drift from the library. One module per chapter keeps failures traceable.

#[doc = include_str!("../../../book/src/encoding.md")]
pub mod encoding {}

#[doc = include_str!("../../../book/src/elements.md")]
pub mod elements {}

#[doc = include_str!("../../../book/src/compiling.md")]
pub mod compiling {}

#[doc = include_str!("../../../book/src/simulating.md")]
pub mod simulating {}

#[doc = include_str!("../../../book/src/file-format.md")]
pub mod file_format {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
