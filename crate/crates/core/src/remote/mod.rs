//! Remote-model protocol: wire types, HTTP clients with a retry budget, and
//! an in-process stub server for tests and offline runs.

mod client;
pub mod protocol;
mod stub;

pub use client::{
    adapt_remote, annotate_remote, generate_remote, train_remote, ANNOTATE_BATCH_SIZE,
};
pub use stub::{StubBehavior, StubServer};
