pub mod cli;
pub mod dialogue;
pub mod flow;
pub mod graph;
pub mod metrics;
pub mod retrieval;
pub mod seq;
pub mod text;
