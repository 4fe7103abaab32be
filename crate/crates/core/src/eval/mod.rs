//! Scoring, synthetic material and the benchmark runner.

pub mod bench;
pub mod manifest;
pub mod metrics;
pub mod noise;
pub mod synth;
pub mod track;
