use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use climakg_cli::{
    ingest_corpus, load_schema_file, render_dot, render_ndjson, render_table, run, CliError, GraphSource,
};
use climakg_core::ingest::{enrich_locations, IngestOptions, OfflineDescriptions, WikidataClient};
use climakg_core::{snapshot, Graph, SchemaDef};
use climakg_service::{AppState, ServiceConfig, DEFAULT_PORT};

#[derive(Debug, Parser)]
#[command(name = "climakg", version, about = "Climate literature knowledge graph tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load an NDJSON corpus, print ingest stats, optionally write a snapshot.
    Ingest(IngestArgs),
    /// Run one query and print the result.
    Query(QueryArgs),
    /// Read queries line by line from standard input.
    Repl(SourceArgs),
    /// Print the result subgraph of a query as Graphviz DOT.
    ExportDot(QueryArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
struct SourceArgs {
    /// Binary snapshot to load.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// NDJSON corpus to ingest on startup (small files).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Schema file; the builtin climate schema otherwise.
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Ndjson,
    Dot,
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, conflicts_with = "query_file")]
    query: Option<String>,
    #[arg(long)]
    query_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Start from this snapshot instead of an empty graph.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    #[arg(long)]
    snapshot_out: Option<PathBuf>,
    /// Refuse records with error-level schema violations; exit 1 if any.
    #[arg(long)]
    strict: bool,
    /// Collapse repeated (paper, target, sentence) mentions.
    #[arg(long)]
    dedup_mentions: bool,
    /// TSV of `name<TAB>description` used to describe locations.
    #[arg(long, conflicts_with = "enrich_wikidata")]
    enrich_offline: Option<PathBuf>,
    /// Describe locations from the Wikidata search API.
    #[arg(long)]
    enrich_wikidata: bool,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = DEFAULT_PORT)]
    port: u16,
    /// Accept POST /api/ingest.
    #[arg(long)]
    writable: bool,
}

fn read_query(args: &QueryArgs) -> Result<String, CliError> {
    match (&args.query, &args.query_file) {
        (Some(q), _) => Ok(q.clone()),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Env(format!("cannot read {}: {e}", path.display()))),
        (None, None) => Err(CliError::User("one of --query or --query-file is required".into())),
    }
}

fn load(source: &SourceArgs) -> Result<(Graph, SchemaDef), CliError> {
    let schema = load_schema_file(source.schema.as_deref())?;
    let graph = GraphSource { snapshot: source.snapshot.clone(), corpus: source.corpus.clone() }.load(&schema)?;
    Ok((graph, schema))
}

fn print(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Env(format!("cannot write output: {e}")))
}

fn cmd_ingest(args: IngestArgs) -> Result<(), CliError> {
    let schema = load_schema_file(args.schema.as_deref())?;
    let mut graph = match &args.snapshot {
        Some(_) => GraphSource { snapshot: args.snapshot.clone(), corpus: None }.load(&schema)?,
        None => Graph::new(),
    };
    let options = IngestOptions { strict: args.strict, dedup_mentions: args.dedup_mentions };
    let stats = ingest_corpus(&mut graph, &schema, &args.corpus, options)?;
    let enriched = match (&args.enrich_offline, args.enrich_wikidata) {
        (Some(path), _) => {
            let file = std::fs::File::open(path)
                .map_err(|e| CliError::Env(format!("cannot read {}: {e}", path.display())))?;
            let mut source = OfflineDescriptions::from_tsv(io::BufReader::new(file))
                .map_err(|e| CliError::Env(format!("{}: {e}", path.display())))?;
            Some(enrich_locations(&mut graph, &mut source))
        }
        (None, true) => Some(enrich_locations(&mut graph, &mut WikidataClient::from_env())),
        (None, false) => None,
    };
    let mut report = serde_json::to_value(stats).expect("stats serialize");
    if let Some(n) = enriched {
        report["locations_enriched"] = n.into();
    }
    print(&format!("{report}\n"))?;
    if args.strict && (stats.violations > 0 || stats.rejected > 0) {
        return Err(CliError::User(format!(
            "strict ingest refused {} record(s) with schema violations",
            stats.rejected
        )));
    }
    if let Some(path) = &args.snapshot_out {
        snapshot::save(&graph, path)
            .map_err(|e| CliError::Env(format!("cannot write snapshot {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_query(args: QueryArgs, force: Option<Format>) -> Result<(), CliError> {
    let text = read_query(&args)?;
    let (graph, _) = load(&args.source)?;
    let table = run(&text, &graph)?;
    let rendered = match force.unwrap_or(args.format) {
        Format::Table => render_table(&table, &graph),
        Format::Ndjson => render_ndjson(&table, &graph),
        Format::Dot => render_dot(&table, &graph),
    };
    print(&rendered)
}

fn cmd_repl(source: SourceArgs) -> Result<(), CliError> {
    let (graph, schema) = load(&source)?;
    let stdin = io::stdin();
    let mut history: Vec<String> = Vec::new();
    let prompt = || {
        eprint!("climakg> ");
        let _ = io::stderr().flush();
    };
    prompt();
    for line in stdin.lock().lines() {
        let line = line.map_err(|e| CliError::Env(format!("cannot read input: {e}")))?;
        let input = line.trim();
        match input {
            "" => {}
            ":quit" | ":q" => break,
            ":schema" => print(&schema.serialize())?,
            ":history" => {
                let lines: String = history.iter().enumerate().map(|(i, q)| format!("{:>3}  {q}\n", i + 1)).collect();
                print(&lines)?;
            }
            ":help" => print(":schema  print the schema\n:history  list queries\n:quit  exit\n")?,
            query => {
                history.push(query.to_owned());
                match run(query, &graph) {
                    Ok(table) => print(&render_table(&table, &graph))?,
                    Err(e) => eprintln!("{e}"),
                }
            }
        }
        prompt();
    }
    eprintln!();
    Ok(())
}

fn cmd_serve(args: ServeArgs) -> Result<(), CliError> {
    let (graph, schema) = load(&args.source)?;
    let config = ServiceConfig { writable: args.writable, snapshot_loaded: args.source.snapshot.is_some() };
    let state = Arc::new(AppState::new(graph, schema, config));
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Env(format!("cannot start runtime: {e}")))?;
    runtime.block_on(async move {
        let listener = climakg_service::bind(args.port)
            .await
            .map_err(|e| CliError::Env(format!("cannot bind port {}: {e}", args.port)))?;
        eprintln!("serving on http://127.0.0.1:{} (writable: {})", args.port, args.writable);
        climakg_service::serve(listener, state)
            .await
            .map_err(|e| CliError::Env(format!("server failed: {e}")))
    })?;
    // give in-flight blocking work a moment to finish
    runtime.shutdown_timeout(Duration::from_secs(2));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // usage mistakes are user errors (1), not clap's default 2
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Query(args) => cmd_query(args, None),
        Command::Repl(source) => cmd_repl(source),
        Command::ExportDot(args) => cmd_query(args, Some(Format::Dot)),
        Command::Serve(args) => cmd_serve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
