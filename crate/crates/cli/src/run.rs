//! Driver: configuration loading, worker pool, file emission, manifest.

use std::fs;
use std::path::{Path, PathBuf};

use crate::commands::{CliError, Command, Context, Outcome};
use crate::config::SweepConfig;
use crate::output::{sha256_hex, OutputRecord, RunManifest};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Configuration file or a manifest from an earlier run.
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub shots: Option<usize>,
    /// 0 means one per available core.
    pub workers: usize,
    pub tolerance_scale: Option<f64>,
}

/// What a successful (or contract-violating) run wrote.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub outcome: Outcome,
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Configuration text from a file, accepting manifests for reruns.
pub fn load_config_text(path: &Path) -> Result<String, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    if text.trim_start().starts_with('{') {
        let m = RunManifest::from_json(&text)
            .map_err(|e| CliError::Config(crate::config::ConfigError::general(format!("bad manifest: {e}"))))?;
        return Ok(m.config);
    }
    Ok(text)
}

/// `dir/stem.csv` → `dir/stem<tail>`.
fn sibling(out: &Path, tail: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}{tail}"))
}

/// Resolves settings, runs the command on a pool of `workers` threads and
/// writes its CSV files, optional JSON report and the run manifest.
///
/// Contract violations still produce all files; they are reported through
/// the returned error afterwards.
pub fn execute(command: Command, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let started = chrono::Utc::now();
    let text = match &opts.config {
        Some(p) => load_config_text(p)?,
        None => command.default_config().to_string(),
    };
    let mut cfg = SweepConfig::parse(&text)?;
    if cfg.command.is_none() {
        cfg.command = Some(command.name().to_string());
    }
    let seed = opts.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    cfg.seed = Some(seed);
    let shots = opts.shots.or(cfg.shots).unwrap_or(command.default_shots());
    if command.uses_shots() {
        cfg.shots = Some(shots);
    }
    let out = opts
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", command.name())));
    let ctx = Context {
        seed,
        shots,
        tolerance_scale: opts.tolerance_scale.unwrap_or(1.0),
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    let workers = pool.current_num_threads();
    let outcome = pool.install(|| command.run(&cfg, &ctx))?;

    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let mut outputs = Vec::new();
    for table in &outcome.tables {
        let path = if table.suffix.is_empty() {
            out.clone()
        } else {
            sibling(&out, &format!("_{}.csv", table.suffix))
        };
        let bytes = table.to_csv();
        fs::write(&path, &bytes).map_err(|e| io_err(&path, e))?;
        outputs.push(OutputRecord {
            path: path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            sha256: sha256_hex(&bytes),
        });
    }
    if let Some(json) = &outcome.json {
        let path = sibling(&out, ".json");
        fs::write(&path, json).map_err(|e| io_err(&path, e))?;
    }
    let manifest = RunManifest {
        tool: "thermoq".into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: command.name().into(),
        config: cfg.serialize(),
        master_seed: seed,
        shots: command.uses_shots().then_some(shots),
        workers,
        started_at: started.to_rfc3339(),
        finished_at: chrono::Utc::now().to_rfc3339(),
        outputs,
    };
    let manifest_path = sibling(&out, ".manifest.json");
    fs::write(&manifest_path, manifest.to_json()).map_err(|e| io_err(&manifest_path, e))?;
    Ok(RunSummary {
        outcome,
        manifest,
        manifest_path,
    })
}
