//! Tidy CSVs for plotting a completed run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::CliError;

pub const PLOT_FILES: [&str; 4] = ["r_n.csv", "t_n.csv", "v2_over_n.csv", "cluster_hist.csv"];

struct Row {
    n: u64,
    r: String,
    t: String,
    v2_over_n: f64,
}

fn read_checkpoints(path: &Path) -> Result<Vec<Row>, CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::io(path.display(), e))?;
    let bad = |msg: &str| CliError::Io(format!("{}: {msg}", path.display()));
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::io(path.display(), e))?;
        let n: u64 = rec
            .get(0)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("bad n column"))?;
        let v2: f64 = rec
            .get(2)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("bad V2 column"))?;
        rows.push(Row {
            n,
            r: rec
                .get(4)
                .ok_or_else(|| bad("missing R column"))?
                .to_string(),
            t: rec
                .get(5)
                .ok_or_else(|| bad("missing T column"))?
                .to_string(),
            v2_over_n: v2 / n as f64,
        });
    }
    Ok(rows)
}

/// Window start and bin width for the histogram, from the run summary of
/// cluster experiments.
fn histogram_setup(summary: &Value) -> (u64, f64) {
    let cluster = &summary["results"]["runs"][0]["r_cluster"];
    let start = cluster["window"][0].as_u64().unwrap_or(0);
    let width = cluster["epsilon"].as_f64().unwrap_or(0.1);
    (start, width)
}

/// Writes `r_n.csv`, `t_n.csv`, `v2_over_n.csv` and `cluster_hist.csv`
/// into `out` (default `<run_dir>/plot`). The first three have one row per
/// checkpoint, `T` blank where undefined; the histogram counts `R_n` values
/// in the cluster window.
pub fn emit_plot_data(run_dir: &Path, out: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
    let manifest = run_dir.join("manifest.json");
    if !manifest.is_file() {
        return Err(CliError::Io(format!(
            "{}: no completed run (manifest.json missing)",
            run_dir.display()
        )));
    }
    let summary: Value = fs::read_to_string(run_dir.join("summary.json"))
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok())
        .unwrap_or(Value::Null);
    let (window_start, width) = histogram_setup(&summary);

    let mut files: Vec<PathBuf> = match fs::read_dir(run_dir.join("checkpoints")) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect(),
        Err(_) => Vec::new(),
    };
    files.sort();

    let out_dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| run_dir.join("plot"));
    fs::create_dir_all(&out_dir).map_err(|e| CliError::io(out_dir.display(), e))?;
    let open = |name: &str| {
        let p = out_dir.join(name);
        csv::Writer::from_path(&p).map_err(|e| CliError::io(p.display(), e))
    };
    let werr = |e: csv::Error| CliError::io("plot csv", e);
    let mut r_w = open(PLOT_FILES[0])?;
    let mut t_w = open(PLOT_FILES[1])?;
    let mut v_w = open(PLOT_FILES[2])?;
    let mut h_w = open(PLOT_FILES[3])?;
    r_w.write_record(["run", "n", "R"]).map_err(werr)?;
    t_w.write_record(["run", "n", "T"]).map_err(werr)?;
    v_w.write_record(["run", "n", "V2_over_n"]).map_err(werr)?;
    h_w.write_record(["bin_lo", "bin_hi", "count"])
        .map_err(werr)?;

    let mut hist: BTreeMap<i64, u64> = BTreeMap::new();
    for (k, f) in files.iter().enumerate() {
        let run = k.to_string();
        for row in read_checkpoints(f)? {
            let n = row.n.to_string();
            r_w.write_record([&run, &n, &row.r]).map_err(werr)?;
            t_w.write_record([&run, &n, &row.t]).map_err(werr)?;
            v_w.write_record([run.clone(), n.clone(), format!("{:?}", row.v2_over_n)])
                .map_err(werr)?;
            if row.n >= window_start {
                if let Ok(r) = row.r.parse::<f64>() {
                    *hist.entry((r / width).floor() as i64).or_default() += 1;
                }
            }
        }
    }
    for (bin, count) in hist {
        let lo = bin as f64 * width;
        h_w.write_record([
            format!("{lo:?}"),
            format!("{:?}", lo + width),
            count.to_string(),
        ])
        .map_err(werr)?;
    }
    for w in [&mut r_w, &mut t_w, &mut v_w, &mut h_w] {
        w.flush().map_err(|e| CliError::io(out_dir.display(), e))?;
    }
    Ok(PLOT_FILES.iter().map(|f| out_dir.join(f)).collect())
}
