//! Streaming novelty detection over text.

pub mod evaluation;
pub mod runner;
pub mod scorers;
pub mod tdf;
pub mod text;
pub mod weighting;
pub mod window;
