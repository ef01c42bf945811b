//! Turning CSV/TSV edge lists and GEXF documents into graphs, previewing
//! tabular input, and choosing what to show right after an import.

mod delimited;
mod gexf;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algorithms::{self, AlgorithmError, PageRankParams};
use crate::exploration::ViewState;
use crate::graph::{Graph, GraphError, NodeId};
use crate::layout::{self, LayoutParams};

pub use delimited::{parse_edge_list, preview, preview_with, write_edge_list, PreviewOptions};
pub use gexf::{parse_gexf, parse_gexf_document, write_gexf, GexfDocument, GexfViz};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("input is empty")]
    EmptyInput,
    #[error("line {line}: expected {expected} cells, got {got}")]
    MalformedRow { line: u64, expected: usize, got: usize },
    #[error("line {line}: empty source or target")]
    EmptyEndpoint { line: u64 },
    #[error("line {line}: weight is not a number")]
    NonNumericWeight { line: u64 },
    #[error("line {line}: weight {value} is not a finite positive number")]
    InvalidWeight { line: u64, value: f64 },
    #[error("line {line}: input is not valid UTF-8")]
    Encoding { line: u64 },
    #[error("no column named `{0}`")]
    UnknownColumn(String),
    #[error("invalid import spec: {0}")]
    InvalidSpec(&'static str),
    #[error("read failed: {0}")]
    Io(String),
    #[error("XML error at byte {position}: {message}")]
    Xml { position: u64, message: String },
    #[error("edge `{0}` references an undeclared node")]
    UnknownNodeReference(String),
    #[error("unsupported GEXF feature: {0}")]
    UnsupportedGexfFeature(String),
    #[error("node `{node}`: value `{value}` does not fit attribute `{attribute}`")]
    InvalidAttributeValue {
        node: String,
        attribute: String,
        value: String,
    },
    #[error("graph is empty")]
    EmptyGraph,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl From<AlgorithmError> for IngestError {
    fn from(e: AlgorithmError) -> Self {
        match e {
            AlgorithmError::EmptyGraph => IngestError::EmptyGraph,
            // Default parameters are always valid.
            other => unreachable!("pagerank with default parameters failed: {other}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Tsv,
    Gexf,
}

impl Format {
    pub fn delimiter(self) -> u8 {
        match self {
            Format::Tsv => b'\t',
            _ => b',',
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "tsv" => Ok(Format::Tsv),
            "gexf" => Ok(Format::Gexf),
            _ => Err(format!("unknown format `{s}` (expected csv, tsv or gexf)")),
        }
    }
}

/// A column picked by zero-based position or by header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Index(usize),
    Name(String),
}

impl FromStr for Column {
    type Err = std::convert::Infallible;

    /// All-digit strings are positions, anything else is a header name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => Column::Index(i),
            Err(_) => Column::Name(s.to_owned()),
        })
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Column::Index(i) => write!(f, "{i}"),
            Column::Name(n) => f.write_str(n),
        }
    }
}

/// How to read a delimited edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportSpec {
    pub format: Format,
    pub has_header: bool,
    pub source_column: Column,
    pub target_column: Column,
    pub weight_column: Option<Column>,
    /// Extra columns stored as attributes of each row's source node. The
    /// first non-empty value seen for a node wins.
    pub node_attribute_columns: Vec<Column>,
    pub directed: bool,
}

impl ImportSpec {
    /// Columns 0 and 1 as source and target, no header.
    pub fn new(format: Format) -> Self {
        ImportSpec {
            format,
            has_header: false,
            source_column: Column::Index(0),
            target_column: Column::Index(1),
            weight_column: None,
            node_attribute_columns: Vec::new(),
            directed: false,
        }
    }

    pub fn csv() -> Self {
        ImportSpec::new(Format::Csv)
    }

    pub fn tsv() -> Self {
        ImportSpec::new(Format::Tsv)
    }

    pub fn with_header(mut self, has_header: bool) -> Self {
        self.has_header = has_header;
        self
    }

    pub fn directed(mut self, directed: bool) -> Self {
        self.directed = directed;
        self
    }

    pub fn columns(mut self, source: Column, target: Column) -> Self {
        self.source_column = source;
        self.target_column = target;
        self
    }

    pub fn weight(mut self, column: Column) -> Self {
        self.weight_column = Some(column);
        self
    }

    pub fn delimiter(&self) -> u8 {
        self.format.delimiter()
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.format == Format::Gexf {
            return Err(IngestError::InvalidSpec("GEXF input is not a delimited edge list"));
        }
        if self.source_column == self.target_column {
            return Err(IngestError::InvalidSpec("source and target columns must differ"));
        }
        Ok(())
    }
}

/// The first rows of a delimited file, for an import dialog.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportPreview {
    pub column_names: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Exact when the whole input fit in the preview, otherwise
    /// extrapolated from the input size when known, else a lower bound.
    pub total_row_estimate: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialViewPolicy {
    WholeGraph,
    /// The `k` highest-PageRank nodes.
    TopPageRank { k: usize },
}

impl InitialViewPolicy {
    pub const DEFAULT_TOP_K: usize = 250;

    pub fn top_pagerank() -> Self {
        InitialViewPolicy::TopPageRank {
            k: Self::DEFAULT_TOP_K,
        }
    }
}

/// The view shown right after an import: everything, or the top-`k` nodes
/// by PageRank (ties by ascending id) at seeded positions.
pub fn initial_view(
    graph: &Graph,
    policy: InitialViewPolicy,
    params: &LayoutParams,
) -> Result<ViewState, IngestError> {
    match policy {
        InitialViewPolicy::WholeGraph => Ok(ViewState::whole_graph(graph, params)),
        InitialViewPolicy::TopPageRank { k } => {
            if k == 0 {
                return Err(IngestError::InvalidSpec("initial view size must be at least 1"));
            }
            if graph.is_empty() {
                return Err(IngestError::EmptyGraph);
            }
            let scores = algorithms::pagerank(graph, &PageRankParams::default())?.scores;
            let top: Vec<NodeId> = scores.top(k).into_iter().map(|(id, _)| id).collect();
            let mut view = ViewState::new(params);
            view.layout = layout::seed_positions(&top, params);
            view.visible = top.into_iter().collect();
            view.pagerank_cache = Some(scores);
            Ok(view)
        }
    }
}
