//! Operator commands.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use mediahub_core::bench::{BenchReport, BenchTask, LATENCY_BUDGET_MS};
use mediahub_core::ingest::{
    run_import, DatasetFormat, EnrichmentProvider, ImportJob, MappingConfig, StubProvider,
};
use mediahub_core::library::{Hub, GRAPH_FILE, TEXT_FILE};
use mediahub_core::synth::{self, SynthConfig};
use mediahub_core::{fixture, ItemId};

use crate::api::{self, AppState};

/// Task expectations written by `seed`, read by `bench`.
pub const BENCH_FILE: &str = "bench.json";

#[derive(Debug, Parser)]
#[command(name = "mediahub", version, about = "Federated media library server")]
pub struct Cli {
    /// Directory holding the graph snapshot and text dump.
    #[arg(long, global = true, env = "MEDIAHUB_DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP API.
    Serve(ServeArgs),
    /// Import a JSONL or CSV dataset through a mapping.
    Import(ImportArgs),
    /// Fill an empty store with fixture F or a synthetic corpus.
    Seed {
        #[command(subcommand)]
        corpus: SeedCorpus,
    },
    /// Replay the five evaluation tasks against the store.
    Bench {
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Write the stores to another directory.
    Snapshot { out: PathBuf },
    /// Replace the stores with the ones in another directory.
    Load { from: PathBuf },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "MEDIAHUB_ADDR", default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Bearer token for mutating routes.
    #[arg(long, env = "MEDIAHUB_TOKEN", hide_env_values = true)]
    pub token: Option<String>,
    /// JSON file mapping external ids to extra fields, used on import.
    #[arg(long)]
    pub enrichment_stub: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    pub dataset: PathBuf,
    #[arg(long)]
    pub mapping: PathBuf,
    /// `jsonl` or `csv`; guessed from the extension when omitted.
    #[arg(long)]
    pub format: Option<DatasetFormat>,
    #[arg(long, default_value = "cli")]
    pub actor: String,
    #[arg(long)]
    pub enrichment_stub: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SeedCorpus {
    Fixture,
    Synthetic {
        #[arg(long, default_value_t = 5000)]
        items: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

/// Parses the process arguments and runs the command.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

pub fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let dir = cli.data_dir;
    match cli.command {
        Command::Serve(args) => serve(&dir, args),
        Command::Import(args) => import(&dir, args),
        Command::Seed { corpus } => seed(&dir, corpus),
        Command::Bench { json } => bench(&dir, json),
        Command::Snapshot { out } => {
            let hub = open(&dir)?;
            hub.save_to(&out)?;
            copy_bench_file(&dir, &out)?;
            println!(
                "wrote {} and {} to {}",
                GRAPH_FILE,
                TEXT_FILE,
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Load { from } => load(&dir, &from),
    }
}

fn open(dir: &Path) -> anyhow::Result<Hub> {
    Hub::open(dir).with_context(|| format!("opening {}", dir.display()))
}

fn stub(path: Option<&Path>) -> anyhow::Result<Option<Arc<dyn EnrichmentProvider>>> {
    path.map(|p| {
        StubProvider::from_path(p)
            .map(|s| Arc::new(s) as Arc<dyn EnrichmentProvider>)
            .with_context(|| format!("enrichment stub {}", p.display()))
    })
    .transpose()
}

fn runtime() -> anyhow::Result<tokio::runtime::Runtime> {
    Ok(tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?)
}

fn serve(dir: &Path, args: ServeArgs) -> anyhow::Result<ExitCode> {
    let token = args.token.filter(|t| !t.trim().is_empty());
    let Some(token) = token else {
        bail!("a write token is required (--token or MEDIAHUB_TOKEN)");
    };
    let provider = stub(args.enrichment_stub.as_deref())?;
    let hub = Arc::new(open(dir)?);
    let mut state = AppState::new(hub.clone(), token.trim());
    if let Some(p) = provider {
        state = state.with_enrichment(p);
    }
    runtime()?.block_on(async move {
        let listener = tokio::net::TcpListener::bind(args.addr)
            .await
            .with_context(|| format!("binding {}", args.addr))?;
        tracing::info!(addr = %args.addr, "listening");
        axum::serve(listener, api::router(state))
            .with_graceful_shutdown(shutdown_signal())
            .await?;
        anyhow::Ok(())
    })?;
    hub.flush()?;
    tracing::info!("stores flushed");
    Ok(ExitCode::SUCCESS)
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        if let Ok(mut s) = tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate())
        {
            s.recv().await;
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}

fn import(dir: &Path, args: ImportArgs) -> anyhow::Result<ExitCode> {
    let mapping = std::fs::read_to_string(&args.mapping)
        .with_context(|| format!("reading {}", args.mapping.display()))?;
    let mapping = MappingConfig::from_json(&mapping)?;
    let format = match args.format {
        Some(f) => f,
        None => DatasetFormat::from_path(&args.dataset)?,
    };
    let dataset = std::fs::read(&args.dataset)
        .with_context(|| format!("reading {}", args.dataset.display()))?;
    let provider = stub(args.enrichment_stub.as_deref())?;
    let hub = open(dir)?;
    let report = {
        let mut lib = hub.write(false)?;
        run_import(
            &mut lib.graph,
            ImportJob {
                source: &args.dataset.display().to_string(),
                dataset: &dataset,
                format,
                mapping: &mapping,
                provider: provider.as_deref(),
                actor: &args.actor,
            },
        )?
    };
    hub.flush()?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

fn seed(dir: &Path, corpus: SeedCorpus) -> anyhow::Result<ExitCode> {
    let hub = open(dir)?;
    let tasks = {
        let mut lib = hub.write(true)?;
        if !lib.graph.is_empty() || !lib.text.is_empty() {
            bail!(
                "{} already holds data; seed only fills an empty store",
                dir.display()
            );
        }
        match corpus {
            SeedCorpus::Fixture => {
                fixture::seed(&mut lib)?;
                fixture::tasks()
            }
            SeedCorpus::Synthetic { items, seed } => {
                let seeded = synth::generate(SynthConfig::new(items, seed)).seed(&mut lib)?;
                seeded.tasks
            }
        }
    };
    hub.flush()?;
    std::fs::write(dir.join(BENCH_FILE), serde_json::to_vec_pretty(&tasks)?)?;
    let lib = hub.read();
    println!(
        "seeded {} items, {} documents into {}",
        lib.graph.len(),
        lib.text.len(),
        dir.display()
    );
    Ok(ExitCode::SUCCESS)
}

/// Expectations written by `seed`, or the fixture ones if there are none.
pub fn bench_tasks(dir: &Path) -> anyhow::Result<Vec<BenchTask>> {
    let path = dir.join(BENCH_FILE);
    if !path.exists() {
        return Ok(fixture::tasks());
    }
    let raw = std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_slice(&raw).with_context(|| format!("parsing {}", path.display()))
}

fn bench(dir: &Path, json: bool) -> anyhow::Result<ExitCode> {
    let tasks = bench_tasks(dir)?;
    let hub = Arc::new(open(dir)?);
    let items = hub.read().graph.len();
    // only GETs are issued, the token is never presented
    let state = AppState::new(hub, "bench-readonly");
    let router = api::router(state);
    let report = runtime()?.block_on(crate::bench::run(&router, &tasks, items));
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_report(&report);
    }
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn ids(list: &[ItemId]) -> String {
    list.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

pub fn print_report(report: &BenchReport) {
    println!("corpus: {} items", report.items);
    for t in &report.tasks {
        let verdict = if t.passed { "PASS" } else { "FAIL" };
        let slow = if t.latency_ms >= LATENCY_BUDGET_MS {
            " (over budget)"
        } else {
            ""
        };
        println!(
            "{verdict} task {} {:<32} {:>8.2} ms{slow}  calls={} expected={}",
            t.number, t.name, t.latency_ms, t.calls, t.expected
        );
        if let Some(e) = &t.error {
            println!("     error: {e}");
        }
        if !t.missing.is_empty() {
            println!("     missing: {}", ids(&t.missing));
        }
        if !t.unexpected.is_empty() {
            println!("     unexpected: {}", ids(&t.unexpected));
        }
    }
    println!("{}/{} tasks passed", report.passed(), report.tasks.len());
}

fn copy_bench_file(from: &Path, to: &Path) -> anyhow::Result<()> {
    let src = from.join(BENCH_FILE);
    if src.exists() {
        std::fs::copy(&src, to.join(BENCH_FILE))?;
    }
    Ok(())
}

fn load(dir: &Path, from: &Path) -> anyhow::Result<ExitCode> {
    if !from.join(GRAPH_FILE).exists() {
        bail!("{} has no {}", from.display(), GRAPH_FILE);
    }
    let source = open(from)?;
    let available = source.availability();
    if !available.graph || !available.text {
        bail!("{} holds a damaged store; nothing loaded", from.display());
    }
    source.save_to(dir)?;
    copy_bench_file(from, dir)?;
    let lib = source.read();
    println!(
        "loaded {} items, {} documents into {}",
        lib.graph.len(),
        lib.text.len(),
        dir.display()
    );
    Ok(ExitCode::SUCCESS)
}
