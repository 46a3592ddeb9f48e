use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;

use clap::ValueEnum;
use ordered_float::OrderedFloat;

use crate::sweep::SweepRow;
use crate::{emit, read, write, CliError, ReportArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Csv,
}

type Level = OrderedFloat<f64>;

#[derive(Debug, Default)]
struct Cell {
    benchmark: Vec<f64>,
    hours: Vec<f64>,
    percent: Vec<f64>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation; `None` below two values.
fn sample_std(v: &[f64]) -> Option<f64> {
    if v.len() < 2 {
        return None;
    }
    let m = mean(v);
    Some((v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt())
}

type Grid = BTreeMap<u32, BTreeMap<(Level, Level), Cell>>;

fn collect(rows: &[SweepRow]) -> Grid {
    let mut grid = Grid::new();
    for r in rows {
        let cell = grid
            .entry(r.window_weeks)
            .or_default()
            .entry((OrderedFloat(r.t), OrderedFloat(r.s)))
            .or_default();
        cell.benchmark.push(r.benchmark_hours);
        cell.hours.push(r.saved_hours);
        cell.percent.push(r.saved_percent);
    }
    grid
}

fn axes(cells: &BTreeMap<(Level, Level), Cell>) -> (Vec<Level>, Vec<Level>) {
    let mut ts: Vec<Level> = cells.keys().map(|k| k.0).collect();
    let mut ss: Vec<Level> = cells.keys().map(|k| k.1).collect();
    ts.dedup();
    ss.sort();
    ss.dedup();
    (ts, ss)
}

fn pair(hours: f64, percent: f64) -> String {
    format!("{hours:.2} / {percent:.2}")
}

fn text(grid: &Grid) -> String {
    let mut out = String::new();
    for (weeks, cells) in grid {
        let (ts, ss) = axes(cells);
        let seeds = cells.values().map(|c| c.hours.len()).max().unwrap_or(0);
        let benchmark: Vec<f64> = cells.values().flat_map(|c| c.benchmark.iter().copied()).collect();
        writeln!(
            out,
            "Turnaround time saving, {weeks}-week observation (hours / %), {seeds} seed(s), benchmark {:.3} h",
            mean(&benchmark)
        )
        .unwrap();
        let mut tables = vec![("", false)];
        if seeds > 1 {
            tables.push(("Sample std", true));
        }
        for (title, std) in tables {
            if std {
                writeln!(out, "{title} (hours / %)").unwrap();
            }
            let mut lines = vec![std::iter::once("T/S".to_string())
                .chain(ss.iter().map(|s| s.0.to_string()))
                .collect::<Vec<_>>()];
            for t in &ts {
                let mut line = vec![t.0.to_string()];
                for s in &ss {
                    line.push(match cells.get(&(*t, *s)) {
                        None => "-".into(),
                        Some(c) if std => match (sample_std(&c.hours), sample_std(&c.percent)) {
                            (Some(h), Some(p)) => pair(h, p),
                            _ => "-".into(),
                        },
                        Some(c) => pair(mean(&c.hours), mean(&c.percent)),
                    });
                }
                lines.push(line);
            }
            let widths: Vec<usize> = (0..lines[0].len())
                .map(|i| lines.iter().map(|l| l[i].len()).max().unwrap_or(0))
                .collect();
            for l in &lines {
                let cols: Vec<String> = l.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                writeln!(out, "{}", cols.join("  ").trim_end()).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

fn csv_matrices(grid: &Grid) -> String {
    let mut all_s: Vec<Level> = grid.values().flat_map(|c| c.keys().map(|k| k.1)).collect();
    all_s.sort();
    all_s.dedup();
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["window_weeks".to_string(), "T/S".to_string()]
        .into_iter()
        .chain(all_s.iter().map(|s| s.0.to_string()));
    w.write_record(header).expect("in-memory write");
    for (weeks, cells) in grid {
        let (ts, _) = axes(cells);
        for t in ts {
            let mut rec = vec![weeks.to_string(), t.0.to_string()];
            for s in &all_s {
                rec.push(
                    cells
                        .get(&(t, *s))
                        .map(|c| pair(mean(&c.hours), mean(&c.percent)))
                        .unwrap_or_default(),
                );
            }
            w.write_record(rec).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("UTF-8")
}

const SERIES_HEADER: &str =
    "window_weeks,seeds,benchmark_hours,saved_hours,saved_hours_std,saved_percent,saved_percent_std";

fn series(grid: &Grid) -> BTreeMap<(Level, Level), String> {
    let mut files: BTreeMap<(Level, Level), String> = BTreeMap::new();
    for (weeks, cells) in grid {
        for (key, c) in cells {
            let text = files.entry(*key).or_insert_with(|| format!("{SERIES_HEADER}\n"));
            let std = |v: &[f64]| sample_std(v).map(|x| format!("{x:.4}")).unwrap_or_default();
            writeln!(
                text,
                "{weeks},{},{:.4},{:.4},{},{:.4},{}",
                c.hours.len(),
                mean(&c.benchmark),
                mean(&c.hours),
                std(&c.hours),
                mean(&c.percent),
                std(&c.percent)
            )
            .unwrap();
        }
    }
    files
}

fn load_rows(text: &str) -> Result<Vec<SweepRow>, String> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, r) in rdr.deserialize().enumerate() {
        rows.push(r.map_err(|e| format!("line {}: {e}", i + 2))?);
    }
    Ok(rows)
}

pub(crate) fn run(a: ReportArgs) -> Result<(), CliError> {
    let rows = load_rows(&read(&a.input)?).map_err(|e| CliError::Data(format!("{}: {e}", a.input.display())))?;
    if rows.is_empty() {
        return Err(CliError::Data(format!("{}: no result rows", a.input.display())));
    }
    let grid = collect(&rows);
    let out = match a.format {
        ReportFormat::Text => text(&grid),
        ReportFormat::Csv => csv_matrices(&grid),
    };
    emit(a.output.as_deref(), &out)?;
    if let Some(dir) = &a.series_dir {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        for ((t, s), body) in series(&grid) {
            write(&dir.join(format!("series_t{}_s{}.csv", t.0, s.0)), &body)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(weeks: u32, t: f64, s: f64, seed: u64, hours: f64) -> SweepRow {
        SweepRow {
            window_weeks: weeks,
            t,
            s,
            seed,
            benchmark_hours: 60.14,
            saved_hours: hours,
            saved_percent: 100.0 * hours / 60.14,
            residual_conflicts: 0,
            step2_comparisons: 10,
        }
    }

    #[test]
    fn single_cell_echoes() {
        let out = text(&collect(&[row(1, 0.9, 0.9, 1, 17.07)]));
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[1].split_whitespace().collect::<Vec<_>>(), ["T/S", "0.9"]);
        assert_eq!(
            lines[2].split_whitespace().collect::<Vec<_>>(),
            ["0.9", "17.07", "/", "28.38"]
        );
        assert_eq!(lines.len(), 4);
        assert!(lines[3].is_empty());
    }

    #[test]
    fn seeds_are_averaged_with_sample_std() {
        let grid = collect(&[row(1, 0.5, 0.5, 1, 2.0), row(1, 0.5, 0.5, 2, 4.0)]);
        let out = text(&grid);
        assert!(out.contains("3.00 / "), "{out}");
        assert!(out.contains("Sample std"));
        assert!(out.contains("1.41 / "), "{out}");
    }

    #[test]
    fn csv_matrix_shape() {
        let rows: Vec<_> = [0.1, 0.3, 0.5, 0.7, 0.9]
            .iter()
            .flat_map(|&t| [0.1, 0.3, 0.5, 0.7, 0.9].map(|s| row(1, t, s, 1, 1.0)))
            .collect();
        let out = csv_matrices(&collect(&rows));
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "window_weeks,T/S,0.1,0.3,0.5,0.7,0.9");
        assert_eq!(lines.len(), 6);
        assert!(lines[5].starts_with("1,0.9,1.00 / 1.66,"));
    }

    #[test]
    fn std_needs_two_values() {
        assert_eq!(sample_std(&[1.0]), None);
        assert_eq!(sample_std(&[1.0, 3.0]), Some(2f64.sqrt()));
    }
}
