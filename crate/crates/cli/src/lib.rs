//! Companion library for the `bloomkit` binary: flag parsing, the
//! measurement harness, key-file IO, report formatting, and the built-in
//! correctness battery.
//!
//! Everything the binary does is reachable from here so integration tests
//! can drive the same code paths in-process.

pub mod args;
pub mod bench;
pub mod keyfile;
pub mod report;
pub mod selftest;
