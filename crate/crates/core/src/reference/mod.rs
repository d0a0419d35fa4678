//! Reference implementations and random generators for testing. Built
//! under `cfg(test)` or with the `reference` feature.

pub mod gen;
pub mod naive;
