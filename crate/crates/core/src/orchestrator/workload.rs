//! On-disk balanced workload.
//!
//! ```text
//! out/
//!   index.json          run metadata, counters, selections, timestamp
//!   diagnostics.json    baseline vs selected distances per metric
//!   posterior.json      bandit mode only
//!   circuits/           copy of the input dataset
//!   candidates/<circuit>/<strategy-digest>.json
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::backend::resolve_backend;
use crate::dataset::{self, read_index, safe_stem, INDEX_FILE};

use super::{adjust_circuits, io_error, AdjustOptions, OrchestratorError, Workload};

pub const WORKLOAD_FORMAT_VERSION: u32 = 1;
pub const DIAGNOSTICS_FILE: &str = "diagnostics.json";
pub const POSTERIOR_FILE: &str = "posterior.json";

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), OrchestratorError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(io_error(path))
}

pub(crate) fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Make `out` an empty directory, replacing it only when `overwrite` is set.
pub(crate) fn prepare_out_dir(out: &Path, overwrite: bool, protect: &[&Path]) -> Result<(), OrchestratorError> {
    if out.exists() {
        let empty = out.is_dir() && fs::read_dir(out).map_err(io_error(out))?.next().is_none();
        if !empty {
            if !overwrite {
                return Err(OrchestratorError::Conflict(out.to_path_buf()));
            }
            let target = out.canonicalize().map_err(io_error(out))?;
            for p in protect {
                if let Ok(p) = p.canonicalize() {
                    if p.starts_with(&target) {
                        return Err(OrchestratorError::Usage(format!(
                            "refusing to overwrite {} because it contains the input {}",
                            out.display(),
                            p.display()
                        )));
                    }
                }
            }
            if out.is_dir() {
                fs::remove_dir_all(out).map_err(io_error(out))?;
            } else {
                fs::remove_file(out).map_err(io_error(out))?;
            }
        }
    }
    fs::create_dir_all(out).map_err(io_error(out))
}

fn copy_dataset(src: &Path, dst: &Path) -> Result<(), OrchestratorError> {
    let index = read_index(src)?;
    fs::create_dir_all(dst).map_err(io_error(dst))?;
    for name in std::iter::once(INDEX_FILE).chain(index.entries.iter().map(|e| e.path.as_str())) {
        let (from, to) = (src.join(name), dst.join(name));
        fs::copy(&from, &to).map_err(io_error(&from))?;
    }
    Ok(())
}

/// Write `w` (minus the dataset copy) into the existing directory `out`.
pub fn write_workload(w: &Workload, out: &Path) -> Result<(), OrchestratorError> {
    let index = json!({
        "format_version": WORKLOAD_FORMAT_VERSION,
        "timestamp": timestamp(),
        "metadata": w.metadata,
        "counters": w.counters,
        "selections": w.selections,
    });
    write_json(&out.join(INDEX_FILE), &index)?;
    write_json(&out.join(DIAGNOSTICS_FILE), &w.diagnostics)?;
    if let Some(p) = &w.posterior {
        write_json(&out.join(POSTERIOR_FILE), &p.to_state())?;
    }

    let root = out.join("candidates");
    let mut used = HashSet::new();
    for (sel, evals) in w.selections.iter().zip(&w.evaluations) {
        let mut stem = safe_stem(&sel.circuit);
        if !used.insert(stem.clone()) {
            stem = format!("{stem}-{}", &sel.fingerprint[..12]);
            used.insert(stem.clone());
        }
        let dir = root.join(&stem);
        fs::create_dir_all(&dir).map_err(io_error(&dir))?;
        for (i, (s, e)) in evals.iter().enumerate() {
            let record = json!({
                "circuit": sel.circuit,
                "index": i,
                "label": s.label(),
                "digest": s.digest(),
                "strategy": s,
                "score": sel.candidates[i].score,
                "pareto": sel.candidates[i].pareto,
                "selected": i == sel.selected_index,
                "evaluation": e,
            });
            write_json(&dir.join(format!("{}.json", s.digest())), &record)?;
        }
    }
    Ok(())
}

/// Load the dataset, resolve the backend, run the adjustment and persist the
/// balanced workload under `out`.
pub fn adjust(
    dataset_dir: &Path,
    backend_spec: &str,
    out: &Path,
    overwrite: bool,
    opts: &AdjustOptions,
) -> Result<Workload, OrchestratorError> {
    let circuits = dataset::load_dataset(dataset_dir)?;
    let backend = resolve_backend(backend_spec)?;
    prepare_out_dir(out, overwrite, &[dataset_dir])?;
    let w = adjust_circuits(&circuits, backend_spec, &backend, opts)?;
    copy_dataset(dataset_dir, &out.join("circuits"))?;
    write_workload(&w, out)?;
    Ok(w)
}
