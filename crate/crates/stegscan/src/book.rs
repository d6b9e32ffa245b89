//! Runs every code block in the guide (`book/`) as a doc-test, so the book
//! cannot drift from the library. mdBook itself does not execute examples
//! with dependencies; including each chapter as a module doc here makes
//! `cargo test --doc` do it instead, and the module name points at the
//! failing chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/containers.md")]
mod containers {}

#[doc = include_str!("../../../book/src/hiding-data.md")]
mod hiding_data {}

#[doc = include_str!("../../../book/src/statistical-detection.md")]
mod statistical_detection {}

#[doc = include_str!("../../../book/src/spectral-analysis.md")]
mod spectral_analysis {}

#[doc = include_str!("../../../book/src/signatures-and-carving.md")]
mod signatures_and_carving {}

#[doc = include_str!("../../../book/src/integrity.md")]
mod integrity {}

#[doc = include_str!("../../../book/src/zip-cracking.md")]
mod zip_cracking {}

#[doc = include_str!("../../../book/src/corpus-and-evaluation.md")]
mod corpus_and_evaluation {}
