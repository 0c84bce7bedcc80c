//! Fully dynamic single-source reachability on evolving directed multigraphs.
//!
//! The crate provides a dynamic graph, a replayable operation-sequence format,
//! a family of reachability algorithms sharing the [`SsrAlgorithm`] contract,
//! instance generators and ingestion of temporal edge streams.

pub mod algorithm;
pub mod even_shiloach;
pub mod generate;
pub mod graph;
pub mod ingest;
pub mod oracle;
pub mod registry;
pub mod replay;
pub mod sequence;
pub mod simple_incremental;
pub mod static_search;

pub use algorithm::{Counters, EdgeRef, SsrAlgorithm};
pub use even_shiloach::{EsParams, EsVariant, EvenShiloach};
pub use graph::{DiGraph, EdgeId, GraphError, VertexId};
pub use registry::{canonical_configs, AlgorithmSpec};
pub use replay::{replay, verify_against_oracle, ReplayOptions, ReplayOutcome};
pub use sequence::{Operation, OperationSequence, SequenceError};
pub use simple_incremental::{SiParams, SimpleIncremental};
pub use static_search::{CachingSearch, LazySearch, SearchOrder, StaticSearch};
