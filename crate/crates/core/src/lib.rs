//! Graph ingestion, analytics, force-directed layout, incremental
//! exploration and JSON snapshots for interactive network exploration.
//!
//! ```
//! use nodeglass::ingest::{parse_edge_list, ImportSpec};
//! use nodeglass::algorithms::{pagerank, PageRankParams};
//!
//! let g = parse_edge_list(&b"a,b\nb,c\nc,a\n"[..], &ImportSpec::csv()).unwrap();
//! let pr = pagerank(&g, &PageRankParams::default()).unwrap();
//! assert!((pr.scores.sum() - 1.0).abs() < 1e-12);
//! ```

pub mod algorithms;
pub mod exploration;
pub mod graph;
pub mod ingest;
pub mod layout;
pub mod snapshot;

pub use graph::{AttributeValue, Attributes, Edge, Graph, GraphError, Node, NodeId};

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/importing.md")]
    mod importing {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
    #[doc = include_str!("../../../book/src/layout.md")]
    mod layout {}
    #[doc = include_str!("../../../book/src/exploration.md")]
    mod exploration {}
    #[doc = include_str!("../../../book/src/snapshots.md")]
    mod snapshots {}
}
