//! Markdown and HTML summaries of a matrix document.

use std::fs;
use std::path::{Path, PathBuf};

use crate::metrics::{self, MetricRecord};

use super::matrix::MatrixReport;

pub const MISSING: &str = "n/a";
pub const REPORT_MD: &str = "report.md";
pub const REPORT_HTML: &str = "report.html";
pub const MATRIX_COPY: &str = "matrix.json";

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("malformed matrix at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

struct Table {
    title: String,
    headers: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 => format!("{v:.0}"),
        Some(v) if v.is_finite() => format!("{v:.4}"),
        Some(v) => v.to_string(),
        None => MISSING.to_string(),
    }
}

fn metric(r: Option<&MetricRecord>, key: &str) -> String {
    num(r.and_then(|r| r.finite(key)))
}

fn text(x: Option<&str>) -> String {
    x.map_or_else(|| MISSING.to_string(), str::to_string)
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

fn tables(m: &MatrixReport) -> Vec<Table> {
    let mut out = Vec::new();
    out.push(Table {
        title: "Backends".into(),
        headers: vec!["Backend", "Status", "Calibration", "Search", "Pareto", "Execute", "Evaluations"],
        rows: m
            .backends
            .iter()
            .map(|b| {
                let md = b.metadata.as_ref();
                vec![
                    b.backend.clone(),
                    b.error.as_ref().map_or_else(|| "ok".to_string(), |e| format!("error: {e}")),
                    text(md.map(|x| &x.calibration_id[..x.calibration_id.len().min(12)])),
                    text(md.map(|x| if x.search == super::SearchMode::Grid { "grid" } else { "bandit" })),
                    text(md.map(|x| if x.pareto { "yes" } else { "no" })),
                    text(md.map(|x| if x.execute { "yes" } else { "no" })),
                    b.counters.map_or_else(|| MISSING.to_string(), |c| c.evaluations.to_string()),
                ]
            })
            .collect(),
    });

    for b in &m.backends {
        let rows = m
            .cells
            .iter()
            .filter(|c| c.backend == b.backend)
            .map(|c| {
                let r = c.metrics.as_ref();
                let ratios = c.ratios.unwrap_or_default();
                vec![
                    c.circuit.clone(),
                    text(c.selected_label.as_deref()),
                    num(c.selected_score.and_then(|s| s.finite())),
                    metric(r, metrics::DEPTH),
                    metric(r, metrics::TWO_QUBIT),
                    metric(r, metrics::ERR),
                    metric(r, metrics::ENTROPY),
                    metric(r, metrics::P_MAX),
                    num(ratios.r_depth),
                    num(ratios.r_2q),
                    num(ratios.delta_err),
                    text(c.error.as_deref()),
                ]
            })
            .collect();
        out.push(Table {
            title: format!("Selections on {}", b.backend),
            headers: vec![
                "Circuit", "Selected", "Score", "depth", "2q", "err", "entropy", "p_max", "R_depth", "R_2q", "dErr",
                "Note",
            ],
            rows,
        });
    }

    let mut agg = Vec::new();
    for b in &m.backends {
        let ratios: Vec<_> = m.cells.iter().filter(|c| c.backend == b.backend).filter_map(|c| c.ratios).collect();
        let columns: [(&str, Vec<f64>); 3] = [
            ("R_depth", ratios.iter().filter_map(|r| r.r_depth).collect()),
            ("R_2q", ratios.iter().filter_map(|r| r.r_2q).collect()),
            ("dErr", ratios.iter().filter_map(|r| r.delta_err).collect()),
        ];
        for (name, xs) in columns {
            agg.push(vec![b.backend.clone(), name.to_string(), xs.len().to_string(), num(mean(&xs)), num(median(&xs))]);
        }
    }
    out.push(Table {
        title: "Aggregate ratios".into(),
        headers: vec!["Backend", "Ratio", "Cells", "Mean", "Median"],
        rows: agg,
    });

    let mut diag = Vec::new();
    for b in &m.backends {
        if let Some(d) = &b.diagnostics {
            for (key, md) in &d.metrics {
                diag.push(vec![
                    b.backend.clone(),
                    key.clone(),
                    md.baseline.len().min(md.selected.len()).to_string(),
                    num(md.ks),
                    num(md.w1),
                    num(md.cvm),
                    d.notes.join("; "),
                ]);
            }
        }
    }
    out.push(Table {
        title: "Diagnostics (baseline vs selected)".into(),
        headers: vec!["Backend", "Metric", "N", "KS", "W1", "CvM", "Notes"],
        rows: diag,
    });
    out
}

fn md_cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

pub fn render_markdown(m: &MatrixReport) -> String {
    let mut s = String::from("# Strategy selection report\n\n");
    s.push_str(&format!(
        "{} circuit(s) on {} backend(s). Input matrix copied to `{MATRIX_COPY}`.\n",
        m.circuits.len(),
        m.backends.len()
    ));
    for t in tables(m) {
        s.push_str(&format!("\n## {}\n\n", t.title));
        s.push_str(&format!("| {} |\n", t.headers.join(" | ")));
        s.push_str(&format!("|{}\n", "---|".repeat(t.headers.len())));
        if t.rows.is_empty() {
            let blank: Vec<&str> = vec![MISSING; t.headers.len()];
            s.push_str(&format!("| {} |\n", blank.join(" | ")));
        }
        for r in &t.rows {
            let cells: Vec<String> = r.iter().map(|c| md_cell(c)).collect();
            s.push_str(&format!("| {} |\n", cells.join(" | ")));
        }
    }
    s
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_html(m: &MatrixReport) -> String {
    let mut s = String::from(
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Strategy selection report</title>\n\
         <style>table{border-collapse:collapse}td,th{border:1px solid #999;padding:2px 6px}</style>\n\
         </head>\n<body>\n<h1>Strategy selection report</h1>\n",
    );
    s.push_str(&format!(
        "<p>{} circuit(s) on {} backend(s). Input matrix copied to <code>{MATRIX_COPY}</code>.</p>\n",
        m.circuits.len(),
        m.backends.len()
    ));
    for t in tables(m) {
        s.push_str(&format!("<h2>{}</h2>\n<table>\n<tr>", esc(&t.title)));
        for h in &t.headers {
            s.push_str(&format!("<th>{}</th>", esc(h)));
        }
        s.push_str("</tr>\n");
        if t.rows.is_empty() {
            s.push_str(&format!("<tr><td colspan=\"{}\">{MISSING}</td></tr>\n", t.headers.len()));
        }
        for r in &t.rows {
            s.push_str("<tr>");
            for c in r {
                s.push_str(&format!("<td>{}</td>", esc(c)));
            }
            s.push_str("</tr>\n");
        }
        s.push_str("</table>\n");
    }
    s.push_str("</body>\n</html>\n");
    s
}

/// Parse `matrix_file` and write `report.md`, a verbatim `matrix.json` and,
/// when `html` is set, `report.html` into `out_dir`. Returns written paths.
pub fn report(matrix_file: &Path, out_dir: &Path, html: bool) -> Result<Vec<PathBuf>, ReportError> {
    let raw = fs::read_to_string(matrix_file).map_err(io(matrix_file))?;
    let m: MatrixReport = serde_json::from_str(&raw).map_err(|e| ReportError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: &str| -> Result<(), ReportError> {
        let p = out_dir.join(name);
        fs::write(&p, body).map_err(io(&p))?;
        written.push(p);
        Ok(())
    };
    put(REPORT_MD, &render_markdown(&m))?;
    put(MATRIX_COPY, &raw)?;
    if html {
        put(REPORT_HTML, &render_html(&m))?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orchestrator::matrix::{MatrixColumn, MatrixCell, MATRIX_FORMAT_VERSION};

    fn empty_cells() -> MatrixReport {
        MatrixReport {
            format_version: MATRIX_FORMAT_VERSION,
            timestamp: String::new(),
            circuits: vec!["a".into()],
            backends: vec![MatrixColumn {
                backend: "x".into(),
                error: Some("boom".into()),
                metadata: None,
                counters: None,
                diagnostics: None,
            }],
            cells: vec![MatrixCell {
                circuit: "a".into(),
                backend: "x".into(),
                error: Some("boom".into()),
                selected_label: None,
                selected_digest: None,
                selected_strategy: None,
                selected_score: None,
                metrics: None,
                baseline_metrics: None,
                ratios: None,
            }],
        }
    }

    #[test]
    fn empty_cells_render_with_markers() {
        let md = render_markdown(&empty_cells());
        assert!(md.contains("| a | n/a | n/a |"));
        assert!(md.contains("error: boom"));
        let html = render_html(&empty_cells());
        assert!(html.contains("<td>n/a</td>"));
    }

    #[test]
    fn median_and_mean() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(mean(&[1.0, 2.0]), Some(1.5));
        assert_eq!(mean(&[]), None);
    }

    #[test]
    fn parse_error_has_location() {
        let tmp = tempfile::tempdir().unwrap();
        let f = tmp.path().join("m.json");
        fs::write(&f, "{\n  \"format_version\": 1,\n  \"circuits\": [1]\n}").unwrap();
        match report(&f, &tmp.path().join("r"), false) {
            Err(ReportError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn writes_files() {
        let tmp = tempfile::tempdir().unwrap();
        let f = tmp.path().join("m.json");
        let body = serde_json::to_string(&empty_cells()).unwrap();
        fs::write(&f, &body).unwrap();
        let out = tmp.path().join("r");
        report(&f, &out, false).unwrap();
        assert!(out.join(REPORT_MD).is_file());
        assert!(!out.join(REPORT_HTML).exists());
        assert_eq!(fs::read_to_string(out.join(MATRIX_COPY)).unwrap(), body);
        report(&f, &out, true).unwrap();
        assert!(out.join(REPORT_HTML).is_file());
    }
}
