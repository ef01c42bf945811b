//! CSV (RFC 4180 quoting) and TSV (hard tabs, no quoting) edge lists.
//! Lines starting with `#` are comments; blank lines are skipped.

use std::collections::HashMap;
use std::io::Read;

use super::{Column, Format, ImportPreview, ImportSpec, IngestError};
use crate::graph::{AttributeValue, Edge, Graph, Node, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreviewOptions {
    pub rows: usize,
    /// Total input size, when the caller knows it; improves the row
    /// estimate.
    pub total_bytes: Option<u64>,
}

impl Default for PreviewOptions {
    fn default() -> Self {
        PreviewOptions {
            rows: 10,
            total_bytes: None,
        }
    }
}

/// Preview with default options (10 rows).
pub fn preview<R: Read>(input: R, spec: &ImportSpec) -> Result<ImportPreview, IngestError> {
    preview_with(input, spec, PreviewOptions::default())
}

/// Read just enough input to show `options.rows` data rows. Never pulls
/// more than the header plus that many records from `input`.
pub fn preview_with<R: Read>(
    input: R,
    spec: &ImportSpec,
    options: PreviewOptions,
) -> Result<ImportPreview, IngestError> {
    if spec.format == Format::Gexf {
        return Err(IngestError::InvalidSpec("preview needs csv or tsv input"));
    }
    let mut reader = reader_for(input, spec.format);
    let mut records = Records::new(&mut reader);

    let first = match records.next()? {
        Some(r) => r,
        None => return Err(IngestError::EmptyInput),
    };
    let width = first.cells.len();
    let (column_names, mut rows) = if spec.has_header {
        (first.cells.iter().map(|c| c.trim().to_owned()).collect(), Vec::new())
    } else {
        ((0..width).map(|i| format!("col{i}")).collect(), vec![first.cells])
    };
    let data_start = if spec.has_header { records.bytes_consumed() } else { 0 };

    let mut exhausted = false;
    while rows.len() < options.rows {
        match records.next()? {
            Some(r) => {
                if r.cells.len() != width {
                    return Err(IngestError::MalformedRow {
                        line: r.line,
                        expected: width,
                        got: r.cells.len(),
                    });
                }
                rows.push(r.cells);
            }
            None => {
                exhausted = true;
                break;
            }
        }
    }

    let seen = rows.len() as u64;
    let total_row_estimate = match options.total_bytes {
        _ if exhausted => seen,
        Some(total) if seen > 0 => {
            let used = records.bytes_consumed().saturating_sub(data_start).max(1);
            let remaining = total.saturating_sub(data_start);
            (seen * remaining).div_ceil(used).max(seen)
        }
        _ => seen,
    };
    Ok(ImportPreview {
        column_names,
        rows,
        total_row_estimate,
    })
}

/// One edge per data row; nodes appear in order of first mention.
pub fn parse_edge_list<R: Read>(input: R, spec: &ImportSpec) -> Result<Graph, IngestError> {
    spec.validate()?;
    let mut reader = reader_for(input, spec.format);
    let mut records = Records::new(&mut reader);

    let first = match records.next()? {
        Some(r) => r,
        None => return Err(IngestError::EmptyInput),
    };
    let width = first.cells.len();
    let header: Option<Vec<String>> = spec
        .has_header
        .then(|| first.cells.iter().map(|c| c.trim().to_owned()).collect());

    let resolve = |column: &Column| -> Result<usize, IngestError> {
        match column {
            Column::Index(i) => Ok(*i),
            Column::Name(name) => header
                .as_ref()
                .ok_or(IngestError::InvalidSpec("column names need a header row"))?
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| IngestError::UnknownColumn(name.clone())),
        }
    };
    let source_col = resolve(&spec.source_column)?;
    let target_col = resolve(&spec.target_column)?;
    let weight_col = spec.weight_column.as_ref().map(&resolve).transpose()?;
    let attribute_cols: Vec<(usize, String)> = spec
        .node_attribute_columns
        .iter()
        .map(|c| {
            let i = resolve(c)?;
            let name = header
                .as_ref()
                .and_then(|h| h.get(i).cloned())
                .unwrap_or_else(|| format!("col{i}"));
            Ok((i, name))
        })
        .collect::<Result<_, IngestError>>()?;

    let needed = [Some(source_col), Some(target_col), weight_col]
        .into_iter()
        .flatten()
        .chain(attribute_cols.iter().map(|(i, _)| *i))
        .max()
        .expect("at least two columns")
        + 1;
    if width < needed {
        return Err(IngestError::MalformedRow {
            line: first.line,
            expected: needed,
            got: width,
        });
    }

    let mut builder = EdgeListBuilder::default();
    let mut pending = if spec.has_header { None } else { Some(first) };
    loop {
        let record = match pending.take() {
            Some(r) => r,
            None => match records.next()? {
                Some(r) => r,
                None => break,
            },
        };
        if record.cells.len() != width {
            return Err(IngestError::MalformedRow {
                line: record.line,
                expected: width,
                got: record.cells.len(),
            });
        }
        let line = record.line;
        let cell = |i: usize| record.cells[i].trim();
        let endpoint = |i: usize| {
            NodeId::new(cell(i)).map_err(|_| IngestError::EmptyEndpoint { line })
        };
        let source = endpoint(source_col)?;
        let target = endpoint(target_col)?;
        let weight = match weight_col.map(cell) {
            None | Some("") => None,
            Some(raw) => {
                let w: f64 = raw
                    .parse()
                    .map_err(|_| IngestError::NonNumericWeight { line })?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(IngestError::InvalidWeight { line, value: w });
                }
                Some(w)
            }
        };
        let attributes: Vec<(String, AttributeValue)> = attribute_cols
            .iter()
            .filter(|(i, _)| !cell(*i).is_empty())
            .map(|(i, name)| (name.clone(), infer_value(cell(*i))))
            .collect();
        builder.push(source, target, weight, attributes);
    }

    if builder.edges.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    Ok(Graph::build(builder.nodes, builder.edges, spec.directed)?)
}

/// Canonical edge list: header `source,target,weight`, edges sorted by
/// (source, target, weight), empty weight cell for unweighted edges. Only
/// endpoints and weights are written.
pub fn write_edge_list(graph: &Graph, format: Format) -> Result<String, IngestError> {
    if format == Format::Gexf {
        return Err(IngestError::InvalidSpec("use write_gexf for GEXF output"));
    }
    let mut edges: Vec<&Edge> = graph.edges().iter().collect();
    edges.sort_by(|a, b| {
        a.source
            .cmp(&b.source)
            .then_with(|| a.target.cmp(&b.target))
            .then_with(|| a.weight_or_default().total_cmp(&b.weight_or_default()))
            .then_with(|| a.weight.is_some().cmp(&b.weight.is_some()))
    });
    let mut writer = csv::WriterBuilder::new()
        .delimiter(format.delimiter())
        .quote_style(if format == Format::Tsv {
            csv::QuoteStyle::Never
        } else {
            csv::QuoteStyle::Necessary
        })
        .from_writer(Vec::new());
    let io = |e: csv::Error| IngestError::Io(e.to_string());
    writer.write_record(["source", "target", "weight"]).map_err(io)?;
    for e in edges {
        let weight = e.weight.map(|w| w.to_string()).unwrap_or_default();
        writer
            .write_record([e.source.as_str(), e.target.as_str(), weight.as_str()])
            .map_err(io)?;
    }
    let bytes = writer.into_inner().map_err(|e| IngestError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("written from str"))
}

/// `true`/`false` become booleans, finite numbers become numbers, anything
/// else stays text.
fn infer_value(raw: &str) -> AttributeValue {
    match raw {
        "true" => AttributeValue::Bool(true),
        "false" => AttributeValue::Bool(false),
        _ => match raw.parse::<f64>() {
            Ok(x) if x.is_finite() => AttributeValue::Number(x),
            _ => AttributeValue::Text(raw.to_owned()),
        },
    }
}

#[derive(Default)]
struct EdgeListBuilder {
    nodes: Vec<Node>,
    index: HashMap<NodeId, usize>,
    edges: Vec<Edge>,
}

impl EdgeListBuilder {
    fn node(&mut self, id: &NodeId) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        self.nodes.push(Node::new(id.clone()));
        self.index.insert(id.clone(), self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn push(
        &mut self,
        source: NodeId,
        target: NodeId,
        weight: Option<f64>,
        attributes: Vec<(String, AttributeValue)>,
    ) {
        let s = self.node(&source);
        self.node(&target);
        for (name, value) in attributes {
            self.nodes[s].attributes.entry(name).or_insert(value);
        }
        self.edges.push(Edge {
            source,
            target,
            weight,
        });
    }
}

fn reader_for<R: Read>(input: R, format: Format) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .delimiter(format.delimiter())
        .quoting(format == Format::Csv)
        .from_reader(input)
}

struct Row {
    line: u64,
    cells: Vec<String>,
}

/// Pull-based record iterator that maps csv errors onto ours.
struct Records<'r, R> {
    reader: &'r mut csv::Reader<R>,
    record: csv::ByteRecord,
}

impl<'r, R: Read> Records<'r, R> {
    fn new(reader: &'r mut csv::Reader<R>) -> Self {
        Records {
            reader,
            record: csv::ByteRecord::new(),
        }
    }

    fn bytes_consumed(&self) -> u64 {
        self.reader.position().byte()
    }

    fn next(&mut self) -> Result<Option<Row>, IngestError> {
        let line = self.reader.position().line();
        match self.reader.read_byte_record(&mut self.record) {
            Ok(false) => Ok(None),
            Ok(true) => {
                let line = self.record.position().map_or(line, |p| p.line());
                let cells = self
                    .record
                    .iter()
                    .map(|c| {
                        std::str::from_utf8(c)
                            .map(str::to_owned)
                            .map_err(|_| IngestError::Encoding { line })
                    })
                    .collect::<Result<_, _>>()?;
                Ok(Some(Row { line, cells }))
            }
            Err(e) => Err(match e.kind() {
                csv::ErrorKind::Io(io) => IngestError::Io(io.to_string()),
                _ => IngestError::Io(e.to_string()),
            }),
        }
    }
}
