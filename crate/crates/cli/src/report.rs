//! Bench report renderings. All three carry the same values; the table
//! prints them with `Display`, which round-trips.

use std::io::Write;

use crate::bench::BenchRow;
use crate::error::Result;
use crate::options::Format;

pub const BENCH_COLUMNS: [&str; 13] = [
    "variant",
    "backend",
    "width",
    "precision",
    "atoms",
    "steps",
    "time_s",
    "speedup_ref",
    "speedup_scalar",
    "efficiency",
    "lane_util",
    "time_median_s",
    "potential_energy",
];

fn cells(r: &BenchRow) -> [String; 13] {
    [
        r.variant.clone(),
        r.backend.clone(),
        r.width.to_string(),
        r.precision.clone(),
        r.atoms.to_string(),
        r.steps.to_string(),
        r.time_s.to_string(),
        r.speedup_ref.to_string(),
        r.speedup_scalar.to_string(),
        r.efficiency.to_string(),
        r.lane_util.to_string(),
        r.time_median_s.to_string(),
        r.potential_energy.to_string(),
    ]
}

pub fn write_bench(out: &mut dyn Write, rows: &[BenchRow], format: Format) -> Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(rows)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if rows.is_empty() {
                w.write_record(BENCH_COLUMNS)?;
            }
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Table => {
            let body: Vec<[String; 13]> = rows.iter().map(cells).collect();
            let widths: Vec<usize> = (0..BENCH_COLUMNS.len())
                .map(|c| body.iter().map(|r| r[c].len()).chain([BENCH_COLUMNS[c].len()]).max().unwrap_or(0))
                .collect();
            let line = |cols: &[&str]| {
                cols.iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            writeln!(out, "{}", line(&BENCH_COLUMNS))?;
            for r in &body {
                writeln!(out, "{}", line(&r.iter().map(String::as_str).collect::<Vec<_>>()))?;
            }
        }
    }
    Ok(())
}
