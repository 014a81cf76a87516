use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::aggregate::{AggregateResult, MethodSummary};
use super::run::{GridRow, GroupRow};

pub const CURVE_HEADER: &str = "round,method,mean_cum_regret,std_cum_regret";
pub const FINAL_HEADER: &str = "# final,method,mean,std,wall_seconds";

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Render curves round-major then method in aggregate order, followed by
/// the per-method final block. Numbers use the shortest representation
/// that parses back to the same `f64`.
pub fn render_csv(agg: &AggregateResult, record_timing: bool) -> String {
    let mut s = String::new();
    s.push_str(CURVE_HEADER);
    s.push('\n');
    if agg.methods.is_empty() {
        return s;
    }
    for t in 0..agg.rounds() {
        for m in &agg.methods {
            let _ = writeln!(s, "{},{},{},{}", t + 1, m.method, m.mean[t], m.std[t]);
        }
    }
    s.push_str(FINAL_HEADER);
    s.push('\n');
    for m in &agg.methods {
        let wall = if record_timing { m.mean_wall_seconds } else { 0.0 };
        let _ = writeln!(s, "# final,{},{},{},{}", m.method, m.final_mean, m.final_std, wall);
    }
    s
}

/// Write the regret-curve CSV. `wall_seconds` is written as 0 unless
/// `record_timing` is set, keeping reruns byte-identical.
pub fn emit_csv(agg: &AggregateResult, path: impl AsRef<Path>, record_timing: bool) -> Result<()> {
    write_file(path.as_ref(), &render_csv(agg, record_timing))
}

/// Parse a file written by [`emit_csv`]. Replication counts are not stored
/// and come back as 0.
pub fn read_csv(path: impl AsRef<Path>) -> Result<AggregateResult> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let err = |line: usize, msg: &str| Error::Parse {
        path: PathBuf::from(path),
        line,
        msg: msg.to_string(),
    };
    let num = |line: usize, f: &str| f.parse::<f64>().map_err(|_| err(line, "invalid number"));
    let mut methods: Vec<MethodSummary> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if line.is_empty() || line == CURVE_HEADER || line == FINAL_HEADER {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if let Some(rest) = line.strip_prefix("# final,") {
            let f: Vec<&str> = rest.split(',').collect();
            if f.len() != 4 {
                return Err(err(n, "final row needs 4 fields"));
            }
            let m = methods
                .iter_mut()
                .find(|m| m.method == f[0])
                .ok_or_else(|| err(n, "final row for unknown method"))?;
            m.final_mean = num(n, f[1])?;
            m.final_std = num(n, f[2])?;
            m.mean_wall_seconds = num(n, f[3])?;
            continue;
        }
        if fields.len() != 4 {
            return Err(err(n, "curve row needs 4 fields"));
        }
        let round: usize = fields[0].parse().map_err(|_| err(n, "invalid round"))?;
        let idx = match methods.iter().position(|m| m.method == fields[1]) {
            Some(i) => i,
            None => {
                methods.push(MethodSummary {
                    method: fields[1].to_string(),
                    mean: Vec::new(),
                    std: Vec::new(),
                    final_mean: 0.0,
                    final_std: 0.0,
                    mean_wall_seconds: 0.0,
                    reps: 0,
                });
                methods.len() - 1
            }
        };
        let m = &mut methods[idx];
        if round != m.mean.len() + 1 {
            return Err(err(n, "rounds out of order"));
        }
        m.mean.push(num(n, fields[2])?);
        m.std.push(num(n, fields[3])?);
    }
    Ok(AggregateResult { methods })
}

/// `value,mean_final,std_final,argmin` with `argmin` 1 on the winning row.
pub fn write_grid_csv(rows: &[GridRow], argmin: f64, path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::from("value,mean_final_regret,std_final_regret,argmin\n");
    for r in rows {
        let flag = u8::from(r.value == argmin);
        let _ = writeln!(s, "{},{},{},{}", r.value, r.mean_final, r.std_final, flag);
    }
    write_file(path.as_ref(), &s)
}

pub fn write_groups_csv(rows: &[GroupRow], path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::from("group,value,centered_mean_reward\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{}", r.group, r.value, r.centered_mean_reward);
    }
    write_file(path.as_ref(), &s)
}
