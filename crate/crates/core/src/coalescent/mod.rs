//! Event-driven simulation of Λ-coalescents and the statistics read off a
//! merge history: block counts, the frequency of the block of label 1, the
//! ball-count path `Z_ε` and Evans balls.

mod history;
mod sim;

pub use history::{CoalescentHistory, EventRef, ZPath};
pub use sim::{simulate, simulate_with, Stop};
