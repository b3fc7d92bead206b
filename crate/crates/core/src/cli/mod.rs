//! The `rsforge` command line: construct, verify, stats and export.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad parameters, 3 enumeration
//! cap exceeded, 4 contract violation, 5 manifest or artifact mismatch,
//! 6 unwritable output.

mod config;
pub mod formats;

pub use config::{Format, Identity, RunArgs, RunConfig};

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::construct::{LayeredGraph, ProductGraph};
use crate::error::Error;
use crate::nof::ProtocolKind;
use crate::par;
use crate::pipeline::{run_pipeline, Pipeline};
use crate::verify::{clique_counts, h_bound, VerificationReport};

pub const MANIFEST: &str = "manifest.json";
pub const GRAPH: &str = "graph.edgelist";
pub const PRODUCT: &str = "product.edgelist";
pub const ENTRIES: &str = "entries.txt";
pub const LAYERS: &str = "layers.txt";
pub const STATS: &str = "stats.json";

#[derive(Debug, Parser)]
#[command(name = "rsforge", version, about = "Ruzsa-Szemeredi (hyper)graphs from NOF protocols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the graph and write artifacts to --out.
    Construct(RunArgs),
    /// Re-check the artifacts in --out.
    Verify(VerifyArgs),
    /// Print instance statistics without writing files.
    Stats(RunArgs),
    /// Re-emit the artifacts in --out in the requested format.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Only run the named check (repeatable).
    #[arg(long = "check")]
    pub checks: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Destination file; standard output when absent.
    #[arg(long)]
    pub dest: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Manifest(String),
    Unwritable(String),
    ChecksFailed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed => 1,
            CliError::Core(Error::Parameter(_)) => 2,
            CliError::Core(Error::Resource { .. }) => 3,
            CliError::Core(Error::Contract(_)) => 4,
            CliError::Manifest(_) => 5,
            CliError::Unwritable(_) => 6,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Manifest(m) => write!(f, "manifest error: {m}"),
            CliError::Unwritable(m) => write!(f, "cannot write output: {m}"),
            CliError::ChecksFailed => f.write_str("verification failed"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            if !matches!(e, CliError::ChecksFailed) {
                eprintln!("rsforge: {e}");
            }
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Construct(args) => cmd_construct(&args),
        Command::Verify(v) => cmd_verify(&v.run, &v.checks),
        Command::Stats(args) => cmd_stats(&args),
        Command::Export(e) => cmd_export(&e.run, e.dest.as_deref()),
    }
}

fn apply_threads(cfg: &RunConfig) -> CliResult<()> {
    if cfg.sequential {
        par::set_parallel(false);
    }
    #[cfg(feature = "parallel")]
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(Error::Parameter("--threads must be positive".into()).into());
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct Bounds {
    pub N_le_2q_pow_d: bool,
    pub h_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct Stats {
    pub q: u32,
    pub d: u32,
    pub k: usize,
    pub r: Option<f64>,
    pub protocol: String,
    pub gamma: u32,
    pub N: usize,
    pub Nprime: u64,
    pub p: f64,
    pub layers: usize,
    pub max_clique_per_edge: usize,
    pub bounds: Bounds,
}

/// Statistics of a (possibly re-imported) graph.
pub fn stats_for(
    id: &Identity,
    gamma: u32,
    n: usize,
    big_n: usize,
    s_size: usize,
    graph: &LayeredGraph,
    product: Option<&LayeredGraph>,
) -> Stats {
    let layers = formats::layer_sizes(graph).len();
    let counted = product.unwrap_or(graph);
    let max_clique = clique_counts(counted).into_iter().max().unwrap_or(0);
    let box_size = (((id.k - 1) as u128) * id.q as u128).pow(id.d);
    let protocol_simple = id.protocol == ProtocolKind::Simple.to_string();
    Stats {
        q: id.q,
        d: id.d,
        k: id.k,
        r: (!protocol_simple).then(|| (id.r2 as f64).sqrt()),
        protocol: id.protocol.clone(),
        gamma,
        N: big_n,
        Nprime: ((big_n as u128) << gamma) as u64,
        p: s_size as f64 / (n as f64).powi(id.k as i32 - 1),
        layers,
        max_clique_per_edge: max_clique,
        bounds: Bounds {
            N_le_2q_pow_d: big_n as u128 <= box_size,
            h_bound: h_bound(big_n, gamma, n),
        },
    }
}

fn pipeline_stats(cfg: &RunConfig, p: &Pipeline) -> Stats {
    stats_for(
        &cfg.identity,
        p.gamma,
        p.function.n(),
        p.function.big_n(),
        p.base.len(),
        &p.graph,
        p.product.as_ref().map(|pg| &pg.graph),
    )
}

fn json_text<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub config: Identity,
    pub config_hash: String,
    pub gamma: u32,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub entries: usize,
    pub files: BTreeMap<String, String>,
}

const MANIFEST_FORMAT: &str = "rsforge-manifest v1";

fn write_file(dir: &Path, name: &str, body: &str) -> CliResult<()> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| CliError::Unwritable(format!("{}: {e}", path.display())))
}

fn emit(dest: Option<&Path>, body: &str) -> CliResult<()> {
    match dest {
        Some(path) => fs::write(path, body).map_err(|e| CliError::Unwritable(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

pub fn cmd_construct(args: &RunArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(args)?;
    apply_threads(&cfg)?;
    let p = run_pipeline(&cfg.pipeline()?)?;
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::Unwritable(format!("{}: {e}", cfg.out.display())))?;

    let mut files: Vec<(&str, String)> = vec![
        (ENTRIES, formats::entries_text(p.source(), &p.transcript.to_string())),
        (GRAPH, formats::edgelist(&p.graph)),
        (LAYERS, formats::layers_text(&p.layers)),
    ];
    if let Some(pg) = &p.product {
        files.push((PRODUCT, formats::edgelist(&pg.graph)));
    }
    let stats = pipeline_stats(&cfg, &p);
    files.push((STATS, json_text(&stats)));

    let mut hashes = BTreeMap::new();
    for (name, body) in &files {
        write_file(&cfg.out, name, body)?;
        hashes.insert(name.to_string(), sha256(body.as_bytes()));
    }
    let manifest = Manifest {
        format: MANIFEST_FORMAT.into(),
        config_hash: cfg.identity.hash(),
        config: cfg.identity.clone(),
        gamma: p.gamma,
        n: p.function.n(),
        big_n: p.function.big_n(),
        entries: p.base.len(),
        files: hashes,
    };
    write_file(&cfg.out, MANIFEST, &json_text(&manifest))?;

    match cfg.format {
        Format::Json => print!("{}", json_text(&stats)),
        Format::Edgelist => print!("{}", formats::edgelist(&p.graph)),
    }
    Ok(())
}

pub fn cmd_stats(args: &RunArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(args)?;
    apply_threads(&cfg)?;
    let p = run_pipeline(&cfg.pipeline()?)?;
    print!("{}", json_text(&pipeline_stats(&cfg, &p)));
    Ok(())
}

/// Artifacts read back from a construct directory.
struct Loaded {
    manifest: Manifest,
    graph: LayeredGraph,
    product: Option<LayeredGraph>,
    entries: Vec<Vec<usize>>,
    /// Files whose content no longer matches the manifest but which are
    /// re-checked by content rather than rejected.
    modified: Vec<String>,
}

fn load(dir: &Path) -> CliResult<Loaded> {
    let read = |name: &str| -> CliResult<String> {
        fs::read_to_string(dir.join(name))
            .map_err(|e| CliError::Manifest(format!("cannot read {}: {e}", dir.join(name).display())))
    };
    let manifest: Manifest =
        serde_json::from_str(&read(MANIFEST)?).map_err(|e| CliError::Manifest(format!("corrupt {MANIFEST}: {e}")))?;
    if manifest.format != MANIFEST_FORMAT {
        return Err(CliError::Manifest(format!("unknown manifest format {:?}", manifest.format)));
    }
    if manifest.config.hash() != manifest.config_hash {
        return Err(CliError::Manifest("config hash does not match the recorded config".into()));
    }
    let mut modified = Vec::new();
    let mut texts = BTreeMap::new();
    for (name, hash) in &manifest.files {
        let body = read(name)?;
        if sha256(body.as_bytes()) != *hash {
            // Graph files are judged by their content; everything else must
            // be exactly what construct wrote.
            if name == GRAPH || name == PRODUCT {
                modified.push(name.clone());
            } else {
                return Err(CliError::Manifest(format!("{name} does not match its recorded hash")));
            }
        }
        texts.insert(name.clone(), body);
    }
    let parse_graph = |name: &str| -> CliResult<Option<LayeredGraph>> {
        texts
            .get(name)
            .map(|t| formats::parse_edgelist(t).map_err(|e| CliError::Manifest(format!("{name}: {e}"))))
            .transpose()
    };
    let graph = parse_graph(GRAPH)?.ok_or_else(|| CliError::Manifest(format!("manifest lists no {GRAPH}")))?;
    let product = parse_graph(PRODUCT)?;
    let entries = formats::parse_entries(texts.get(ENTRIES).map(String::as_str).unwrap_or(""))
        .map_err(|e| CliError::Manifest(format!("{ENTRIES}: {e}")))?;
    Ok(Loaded {
        manifest,
        graph,
        product,
        entries,
        modified,
    })
}

#[derive(Debug, Serialize)]
struct Aggregate<'a> {
    passed: bool,
    config_hash: &'a str,
    modified_artifacts: &'a [String],
    reports: &'a [VerificationReport],
}

fn artifact_dir(args: &RunArgs) -> CliResult<PathBuf> {
    if let Some(out) = &args.out {
        return Ok(out.clone());
    }
    Ok(RunConfig::resolve(args)?.out)
}

pub fn cmd_verify(args: &RunArgs, checks: &[String]) -> CliResult<()> {
    let dir = artifact_dir(args)?;
    let loaded = load(&dir)?;
    let id = loaded.manifest.config.clone();
    if args.has_data_flags() {
        let requested = RunConfig::resolve(args)?;
        if requested.identity.hash() != loaded.manifest.config_hash {
            return Err(CliError::Manifest("the given configuration differs from the one in the manifest".into()));
        }
    }
    let cfg = RunConfig {
        identity: id,
        cap: crate::error::Cap(args.cap.unwrap_or(crate::error::Cap::DEFAULT.0)),
        out: dir,
        format: Format::Json,
        threads: args.threads,
        sequential: args.sequential,
    };
    apply_threads(&cfg)?;
    let p = run_pipeline(&cfg.pipeline()?)?;
    let rebuilt: Vec<Vec<usize>> = p.source().iter().cloned().collect();
    if rebuilt != loaded.entries {
        return Err(CliError::Manifest(format!("{ENTRIES} disagrees with the recorded configuration")));
    }
    let product = match (&p.product, loaded.product) {
        (Some(pg), Some(g)) => Some(ProductGraph {
            graph: g,
            ..pg.clone()
        }),
        (None, None) => None,
        _ => return Err(CliError::Manifest(format!("{PRODUCT} presence disagrees with the configuration"))),
    };
    let reports = p.run_checks(checks, &loaded.graph, product.as_ref())?;
    let passed = reports.iter().all(|r| r.passed);
    let agg = Aggregate {
        passed,
        config_hash: &loaded.manifest.config_hash,
        modified_artifacts: &loaded.modified,
        reports: &reports,
    };
    print!("{}", json_text(&agg));
    if passed {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}

pub fn cmd_export(args: &RunArgs, dest: Option<&Path>) -> CliResult<()> {
    let dir = artifact_dir(args)?;
    let loaded = load(&dir)?;
    let format = args.format.unwrap_or_default();
    let m = &loaded.manifest;
    let body = match format {
        Format::Edgelist => formats::edgelist(&loaded.graph),
        Format::Json => json_text(&stats_for(
            &m.config,
            m.gamma,
            m.n,
            m.big_n,
            m.entries,
            &loaded.graph,
            loaded.product.as_ref(),
        )),
    };
    emit(dest, &body)
}
