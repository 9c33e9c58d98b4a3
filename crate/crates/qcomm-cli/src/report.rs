//! Ledger CSV output and static SVG plots.

use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use crate::run::{Row, COLUMNS};
use crate::CliError;

/// Rows as CSV text with a header line.
pub fn rows_to_csv(rows: &[Row]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(COLUMNS)?;
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Csv(e.to_string()))
}

/// Appends rows to `path`, writing the header only when the file is new or
/// empty. An existing file must already carry the current header.
pub fn append_rows(path: &Path, rows: &[Row]) -> Result<(), CliError> {
    let io = |e| CliError::Io(path.display().to_string(), e);
    let existing = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(io(e)),
    };
    if !existing.is_empty() {
        parse_ledger_csv(&existing)?;
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    if existing.is_empty() {
        w.write_record(COLUMNS)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.to_string()))?;
    let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    if !existing.is_empty() && !existing.ends_with('\n') {
        file.write_all(b"\n").map_err(io)?;
    }
    file.write_all(&bytes).map_err(io)
}

/// Parses a ledger CSV produced by [`rows_to_csv`] or [`append_rows`].
pub fn parse_ledger_csv(text: &str) -> Result<Vec<Row>, CliError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != COLUMNS {
        return Err(CliError::Csv(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record?);
    }
    Ok(rows)
}

/// One curve per ledger total against `x`, y on a log scale.
pub fn ledger_plot_svg(x_label: &str, xs: &[f64], rows: &[Row]) -> Result<String, CliError> {
    if xs.len() != rows.len() || xs.is_empty() {
        return Err(CliError::Usage("plot needs one x value per row".into()));
    }
    let (width, height, margin) = (640.0, 400.0, 60.0);
    let series: [(&str, &str, Vec<f64>); 2] = [
        ("qubits_sent", "#1f77b4", rows.iter().map(|r| r.qubits_sent as f64).collect()),
        ("bits_sent", "#d62728", rows.iter().map(|r| r.bits_sent as f64).collect()),
    ];
    let positive = series.iter().flat_map(|s| s.2.iter()).copied().filter(|v| *v > 0.0);
    let (lo, hi) = positive.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (ylo, yhi) =
        if hi > 0.0 { (lo.log10().floor(), hi.log10().ceil().max(lo.log10().floor() + 1.0)) } else { (0.0, 1.0) };
    let (xlo, xhi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let span = if xhi > xlo { xhi - xlo } else { 1.0 };
    let px = |x: f64| margin + (x - xlo) / span * (width - 2.0 * margin);
    let py = |y: f64| {
        let v = if y > 0.0 { y.log10() } else { ylo };
        height - margin - (v - ylo) / (yhi - ylo) * (height - 2.0 * margin)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0, x1, y1) = (margin, height - margin, width - margin, margin);
    let _ = writeln!(svg, r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" stroke="black" fill="none"/>"#);
    for decade in (ylo as i32)..=(yhi as i32) {
        let y = py(10f64.powi(decade));
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">1e{decade}</text>"#, x0 - 6.0, y + 4.0);
    }
    for &x in xs {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{x}</text>"#, px(x), y0 + 16.0);
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#, width / 2.0, height - 16.0);
    for (k, (name, color, ys)) in series.iter().enumerate() {
        if ys.iter().all(|&y| y == 0.0) {
            continue;
        }
        let points: Vec<String> = xs.iter().zip(ys).map(|(&x, &y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
        let _ =
            writeln!(svg, r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="2"/>"#, points.join(" "));
        let _ = writeln!(svg, r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#, x1 - 90.0, y1 + 16.0 * k as f64);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(qubits: usize) -> Row {
        Row {
            protocol: "coord".into(),
            topology: "coordinator".into(),
            n: 8,
            r: 2,
            kappa: 2.0,
            gamma: 1.0,
            qubits_sent: qubits,
            bits_sent: 0,
            rounds: 3,
            success_prob: 0.5,
            fidelity: 0.9995,
            tv_distance: 0.001,
            seed: 1,
            instance: "coordinator-split".into(),
            eps: 1e-3,
            final_success_prob: 0.99,
            iterations: 2,
            oracle_uses: Some(10),
            degree: None,
            failed: false,
        }
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![row(10), row(20)];
        let text = rows_to_csv(&rows).unwrap();
        assert!(text.starts_with(
            "protocol,topology,n,r,kappa,gamma,qubits_sent,bits_sent,rounds,success_prob,fidelity,tv_distance,seed,"
        ));
        assert_eq!(parse_ledger_csv(&text).unwrap(), rows);
        assert!(parse_ledger_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn append_writes_one_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.csv");
        append_rows(&path, &[row(1)]).unwrap();
        append_rows(&path, &[row(2), row(3)]).unwrap();
        let rows = parse_ledger_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(rows.iter().map(|r| r.qubits_sent).collect::<Vec<_>>(), vec![1, 2, 3]);
        std::fs::write(&path, "not,a,ledger\n").unwrap();
        assert!(append_rows(&path, &[row(4)]).is_err());
    }

    #[test]
    fn plot_has_a_curve() {
        let svg = ledger_plot_svg("kappa", &[2.0, 4.0, 8.0], &[row(10), row(40), row(160)]).unwrap();
        assert!(svg.contains("<polyline") && svg.ends_with("</svg>\n"));
        assert!(ledger_plot_svg("kappa", &[], &[]).is_err());
    }
}
