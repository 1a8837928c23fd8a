//! Search-based generation of unit tests for subjects written in a small
//! object language, under two chromosome shapes: the free statement list
//! and the focal-method test whose last statement is the behavior under
//! test.
//!
//! The crate is `no_std` + `alloc`; file handling and the command line live
//! in the `srgen` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod assertions;
pub mod chromosome;
pub mod emitter;
pub mod metrics;
pub mod mutation;
pub mod pipeline;
pub mod runtime;
pub mod search;
pub mod subject;
