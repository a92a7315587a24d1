//! Intra-project dependency mining.

pub mod aggregate;
pub mod frontend;
pub mod index;
pub mod model;
pub mod output;
pub mod pipeline;
pub mod project;
pub mod resolver;
pub mod scope;
