//! `nodeglass`: import graphs into snapshots, inspect them, run layout and
//! expansion on them, and serve them for sharing.
//!
//! Exit codes: 0 success, 1 usage error, 2 bad input data, 3 I/O failure.

use std::fmt::Display;
use std::fs;
use std::io::{self, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nodeglass::algorithms::summarize;
use nodeglass::exploration::SortKey;
use nodeglass::ingest::{
    initial_view, parse_edge_list, parse_gexf_document, Column, Format, ImportSpec,
    IngestError, InitialViewPolicy,
};
use nodeglass::layout::{self, LayoutParams};
use nodeglass::snapshot::{self, Metadata, Snapshot};
use nodeglass::NodeId;
use nodeglass_server::{ServerConfig, ServerError};

#[derive(Debug, Parser)]
#[command(name = "nodeglass", version, about = "Explore large graphs one neighbourhood at a time")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read an edge list or GEXF file and write a snapshot.
    Import(ImportArgs),
    /// Print graph statistics for a snapshot.
    Stats(StatsArgs),
    /// Run force-directed layout iterations on the visible nodes.
    Layout(LayoutArgs),
    /// Reveal the top-ranked hidden neighbours of a node.
    Expand(ExpandArgs),
    /// Run the snapshot sharing server.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct ImportArgs {
    /// csv, tsv or gexf.
    #[arg(long)]
    format: Format,
    /// Source column: zero-based index or header name.
    #[arg(long, default_value = "0")]
    source: Column,
    /// Target column: zero-based index or header name.
    #[arg(long, default_value = "1")]
    target: Column,
    /// The first row names the columns.
    #[arg(long)]
    header: bool,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    weight: Option<Column>,
    /// Column copied onto each row's source node (repeatable).
    #[arg(long = "node-attribute")]
    node_attributes: Vec<Column>,
    /// Start with only the K highest-PageRank nodes visible.
    #[arg(long, value_name = "K")]
    top_pagerank: Option<usize>,
    /// Seed for initial positions.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `-` reads standard input.
    input: PathBuf,
    /// `-` writes standard output.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct StatsArgs {
    snapshot: PathBuf,
    #[arg(long)]
    json: bool,
    /// How many PageRank leaders to list.
    #[arg(long, default_value_t = 10)]
    top: usize,
}

#[derive(Debug, Args)]
struct LayoutArgs {
    snapshot: PathBuf,
    #[arg(long)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ExpandArgs {
    snapshot: PathBuf,
    #[arg(long)]
    node: String,
    #[arg(long)]
    k: usize,
    /// pagerank, degree or attribute:<name>.
    #[arg(long, default_value = "pagerank")]
    by: SortKey,
    /// Seed for placing the new nodes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// TOML file with any of the server settings; flags and environment
    /// variables take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long)]
    bind: Option<SocketAddr>,
    /// Require `Authorization: Bearer <token>` on uploads.
    #[arg(long)]
    token: Option<String>,
    #[arg(long)]
    max_bytes: Option<usize>,
    /// Allowed CORS origin (repeatable); `*` allows any.
    #[arg(long = "cors-origin")]
    cors_origins: Vec<String>,
}

/// An error and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(m: impl Display) -> Self {
        Failure { code: 1, message: m.to_string() }
    }

    fn data(m: impl Display) -> Self {
        Failure { code: 2, message: m.to_string() }
    }

    fn io(m: impl Display) -> Self {
        Failure { code: 3, message: m.to_string() }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io(_) => Failure::io(e),
            IngestError::InvalidSpec(_) => Failure::usage(e),
            _ => Failure::data(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Import(a) => import(a),
        Command::Stats(a) => stats(a),
        Command::Layout(a) => run_layout(a),
        Command::Expand(a) => expand(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("nodeglass: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).map_err(|e| Failure::io(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if path == Path::new("-") {
        let mut out = io::stdout().lock();
        out.write_all(bytes)
            .and_then(|()| out.write_all(b"\n"))
            .map_err(|e| Failure::io(format!("stdout: {e}")))
    } else {
        fs::write(path, bytes).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
    }
}

fn load(path: &Path) -> Result<Snapshot, Failure> {
    let bytes = read_input(path)?;
    snapshot::decode(&bytes).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn save(path: &Path, s: &Snapshot) -> Result<(), Failure> {
    let bytes = s.encode().map_err(Failure::data)?;
    write_output(path, &bytes)
}

/// Status lines go to stderr when the snapshot itself goes to stdout.
fn status(output: &Path, line: impl Display) {
    if output == Path::new("-") {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn import(a: ImportArgs) -> Result<(), Failure> {
    let bytes = read_input(&a.input)?;
    let params = LayoutParams {
        seed: a.seed,
        ..LayoutParams::default()
    };
    let policy = match a.top_pagerank {
        Some(k) => InitialViewPolicy::TopPageRank { k },
        None => InitialViewPolicy::WholeGraph,
    };
    let (graph, view) = match a.format {
        Format::Gexf => {
            let doc = parse_gexf_document(&bytes)?;
            let view = doc.initial_view(policy, &params)?;
            (doc.graph, view)
        }
        format => {
            let mut spec = ImportSpec::new(format)
                .with_header(a.header)
                .directed(a.directed)
                .columns(a.source, a.target);
            spec.weight_column = a.weight;
            spec.node_attribute_columns = a.node_attributes;
            let graph = parse_edge_list(&bytes[..], &spec)?;
            let view = initial_view(&graph, policy, &params)?;
            (graph, view)
        }
    };
    let name = a
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .filter(|s| s != "-")
        .unwrap_or_else(|| "stdin".into());
    let snapshot = Snapshot {
        metadata: Metadata::new(name),
        graph,
        view,
    };
    save(&a.output, &snapshot)?;
    status(
        &a.output,
        format_args!("nodes: {} edges: {}", snapshot.graph.node_count(), snapshot.graph.edge_count()),
    );
    Ok(())
}

fn stats(a: StatsArgs) -> Result<(), Failure> {
    let s = load(&a.snapshot)?;
    let summary = summarize(&s.graph, a.top);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
        return Ok(());
    }
    let opt = |x: Option<f64>| x.map_or_else(|| "n/a".to_owned(), |v| v.to_string());
    println!("nodes: {}", summary.nodes);
    println!("edges: {}", summary.edges);
    println!("directed: {}", summary.directed);
    println!("density: {}", opt(summary.density));
    match summary.diameter {
        Some(d) if summary.disconnected => println!("diameter: {d} (disconnected: largest component only)"),
        Some(d) => println!("diameter: {d}"),
        None => println!("diameter: n/a"),
    }
    println!("clustering coefficient: {}", opt(summary.clustering_coefficient));
    println!("components: {}", summary.components);
    println!("top pagerank:");
    for r in &summary.top_pagerank {
        println!("  {} {}", r.id, r.score);
    }
    Ok(())
}

fn run_layout(a: LayoutArgs) -> Result<(), Failure> {
    let mut s = load(&a.snapshot)?;
    let params = LayoutParams {
        seed: a.seed,
        ..LayoutParams::default()
    };
    s.view.layout = layout::run(
        &s.graph,
        &s.view.visible,
        &s.view.layout,
        &params,
        a.iterations,
        |_| std::ops::ControlFlow::Continue(()),
    )
    .map_err(Failure::data)?;
    save(&a.output, &s)
}

fn expand(a: ExpandArgs) -> Result<(), Failure> {
    let mut s = load(&a.snapshot)?;
    let id = NodeId::new(a.node).map_err(Failure::usage)?;
    let params = LayoutParams {
        seed: a.seed,
        ..LayoutParams::default()
    };
    let added = s
        .view
        .expand(&s.graph, &id, a.k, &a.by, &params)
        .map_err(Failure::data)?;
    save(&a.output, &s)?;
    for id in added {
        status(&a.output, id);
    }
    Ok(())
}

fn serve(a: ServeArgs) -> Result<(), Failure> {
    let mut config = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            ServerConfig::from_toml(&text).map_err(Failure::usage)?
        }
        None => ServerConfig::default(),
    }
    .with_env()
    .map_err(Failure::usage)?;
    if let Some(dir) = a.dir {
        config.storage_dir = dir;
    }
    if let Some(bind) = a.bind {
        config.bind_address = bind;
    }
    if let Some(token) = a.token {
        config.write_token = Some(token);
    }
    if let Some(max) = a.max_bytes {
        config.max_snapshot_bytes = max;
    }
    if !a.cors_origins.is_empty() {
        config.cors_allowed_origins = a.cors_origins;
    }

    let runtime = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .map_err(Failure::io)?;
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    runtime
        .block_on(nodeglass_server::run(config, shutdown, |addr| {
            println!("listening on http://{addr}");
            let _ = io::stdout().flush();
        }))
        .map_err(|e| match e {
            ServerError::Config(_) => Failure::usage(e),
            _ => Failure::io(e),
        })
}
