//! The four subcommands as library calls, so they can be tested without
//! spawning the binary.

use std::path::Path;

use qcomm::instances::{from_toml, to_toml, InstanceKind};

use crate::acceptance::{run_suite, select, Check, Fault};
use crate::config::Settings;
use crate::generate::generate;
use crate::report::{append_rows, ledger_plot_svg, rows_to_csv};
use crate::run::{run, ProtocolName, Row};
use crate::CliError;

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn parse_kind(kind: &str) -> Result<InstanceKind, CliError> {
    kind.parse().map_err(|_| {
        let known: Vec<&str> = InstanceKind::ALL.iter().map(|k| k.name()).collect();
        CliError::Usage(format!("unknown instance kind {kind:?}; known kinds: {}", known.join(", ")))
    })
}

fn protocol_of(s: &Settings) -> Result<ProtocolName, CliError> {
    s.protocol.as_deref().ok_or_else(|| CliError::Usage("--protocol is required".into()))?.parse()
}

/// Generates an instance file. Returns the TOML text, also written to
/// `--out` when given.
pub fn cmd_instance(kind: &str, s: &Settings) -> Result<String, CliError> {
    let inst = generate(parse_kind(kind)?, s)?;
    let text = to_toml(&inst)?;
    if let Some(out) = &s.out {
        write_file(out, &text)?;
    }
    Ok(text)
}

/// Runs `--protocol` on a stored instance and appends its row to `--out`.
pub fn cmd_run(instance_path: &Path, s: &Settings) -> Result<Row, CliError> {
    let protocol = protocol_of(s)?;
    let text =
        std::fs::read_to_string(instance_path).map_err(|e| CliError::Io(instance_path.display().to_string(), e))?;
    let inst = from_toml(&text)?;
    let row = run(protocol, &inst, s)?;
    if let Some(out) = &s.out {
        append_rows(out, std::slice::from_ref(&row))?;
    }
    Ok(row)
}

/// A sweep axis: a flag name and the values it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<String>,
}

/// Parses `name=v1,v2,...` axis specs. A grid with no axes, or an axis with
/// no values, is an error.
pub fn parse_grid(specs: &[String]) -> Result<Vec<Axis>, CliError> {
    if specs.is_empty() {
        return Err(CliError::Usage("empty grid: give at least one --grid name=v1,v2".into()));
    }
    specs
        .iter()
        .map(|spec| {
            let (name, list) = spec
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("grid axis {spec:?} is not name=values")))?;
            let values: Vec<String> =
                list.split(',').map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect();
            if values.is_empty() {
                return Err(CliError::Usage(format!("grid axis {name:?} has no values")));
            }
            Ok(Axis { name: name.trim().to_string(), values })
        })
        .collect()
}

/// Every grid point in row-major order, first axis slowest.
fn grid_points(axes: &[Axis]) -> Vec<Vec<&str>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut point = prefix.clone();
                    point.push(v.as_str());
                    point
                })
            })
            .collect()
    })
}

/// Generates a `kind` instance at each grid point and runs `--protocol` on
/// it. Writes the table to `--out` and, if asked, a plot of the ledger
/// against the first axis.
pub fn cmd_sweep(kind: &str, axes: &[Axis], s: &Settings, plot: Option<&Path>) -> Result<Vec<Row>, CliError> {
    let protocol = protocol_of(s)?;
    let kind = parse_kind(kind)?;
    if axes.is_empty() || axes.iter().any(|a| a.values.is_empty()) {
        return Err(CliError::Usage("empty grid".into()));
    }
    let mut rows = Vec::new();
    let mut xs = Vec::new();
    for point in grid_points(axes) {
        let mut local = s.clone();
        for (axis, value) in axes.iter().zip(&point) {
            local = local.with_param(&axis.name, value)?;
        }
        let inst = generate(kind, &local)?;
        rows.push(run(protocol, &inst, &local)?);
        xs.push(point[0].parse::<f64>().unwrap_or(xs.len() as f64));
    }
    if let Some(out) = &s.out {
        write_file(out, &rows_to_csv(&rows)?)?;
    }
    if let Some(path) = plot {
        write_file(path, &ledger_plot_svg(&axes[0].name, &xs, &rows)?)?;
    }
    Ok(rows)
}

/// Runs the named part of the acceptance suite.
pub fn cmd_verify(suite: &str, fault: Fault) -> Result<Vec<Check>, CliError> {
    Ok(run_suite(&select(suite)?, fault))
}

/// Machine-readable report: one tab-separated line per check, then totals.
pub fn verify_report(checks: &[Check]) -> String {
    let mut out = String::from("status\tid\tname\tdetail\n");
    for c in checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status}\t{}\t{}\t{}\n", c.id, c.name, c.detail));
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    out.push_str(&format!("summary\tpassed={passed}\tfailed={}\n", checks.len() - passed));
    out
}
