//! Configuration, dispatch and output handling behind the `dirode` binary.

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod seed;

pub use config::{parse_config, parse_ladder, ConfigError, Ladder, LadderParam, Problem, RunConfig};
pub use experiments::{convergence_ladder, LadderReport, RunError};
pub use manifest::{RunManifest, MANIFEST_FILE};
pub use seed::derive_seed;

use std::time::Instant;

/// Resolves `cfg`, runs the experiment into `cfg.out` and writes the manifest there.
///
/// A failing experiment still leaves a manifest with an `error` record. Configuration
/// errors are reported before anything is written.
pub fn dispatch(cfg: &RunConfig) -> Result<RunManifest, RunError> {
    let resolved = cfg.resolve()?;
    let dir = std::path::PathBuf::from(resolved.out.clone().expect("resolved"));
    std::fs::create_dir_all(&dir).map_err(|e| RunError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let start = Instant::now();
    let mut outputs = experiments::Outputs::new(&dir);
    let result = experiments::run_experiment(&resolved, &mut outputs);
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        problem: resolved.problem.expect("resolved").name().to_string(),
        config: resolved.to_json(),
        duration_seconds: start.elapsed().as_secs_f64(),
        metrics: outputs.metrics,
        artifacts: outputs.artifacts,
        error: result.as_ref().err().map(|e| e.to_string()),
    };
    std::fs::write(dir.join(MANIFEST_FILE), manifest.to_text())
        .map_err(|e| RunError::Runtime(format!("cannot write manifest: {e}")))?;
    result.map(|_| manifest)
}

/// Reads a config file; parse errors carry line and column.
pub fn load_config(path: &std::path::Path) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        RunError::Config(ConfigError::Validation {
            key: "config".into(),
            reason: format!("cannot read {}: {e}", path.display()),
        })
    })?;
    Ok(parse_config(&text)?)
}

/// Sizes the global rayon pool from `DIRODE_THREADS` when set.
pub fn init_threads() -> Result<(), RunError> {
    let Ok(v) = std::env::var("DIRODE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        RunError::Config(ConfigError::Validation {
            key: "DIRODE_THREADS".into(),
            reason: format!("must be a positive integer, got `{v}`"),
        })
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| RunError::Runtime(format!("thread pool: {e}")))
}
