//! Comparison tables: one row per model, one column per metric.
//!
//! When some model carries the same metric at several sample sizes, that
//! metric is split into one column per size (`IS_202`, `IS_6000`, ...).
//! Reference rows (real data) are shown but never marked best.

use serde::Serialize;

use crate::model::{Better, MetricName, MetricResult};

#[derive(Debug, Clone, PartialEq)]
pub struct ModelRow {
    pub model: String,
    /// Real-data rows: rendered, excluded from best-value marking.
    pub reference: bool,
    pub results: Vec<MetricResult>,
}

impl ModelRow {
    pub fn new(model: impl Into<String>, results: Vec<MetricResult>) -> Self {
        ModelRow {
            model: model.into(),
            reference: false,
            results,
        }
    }

    pub fn reference(model: impl Into<String>, results: Vec<MetricResult>) -> Self {
        ModelRow {
            reference: true,
            ..ModelRow::new(model, results)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format {other:?}")),
        }
    }
}

pub const MISSING: &str = "---";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Column {
    // field order is the column order: grouped by sample size, then metric
    sample_size: Option<usize>,
    metric: MetricName,
}

impl Column {
    fn title(&self) -> String {
        match self.sample_size {
            Some(n) => format!("{}_{n}", self.metric.title()),
            None => self.metric.title().to_owned(),
        }
    }

    fn matches(&self, r: &MetricResult) -> bool {
        r.metric_name == self.metric && self.sample_size.is_none_or(|n| n == r.n_gen)
    }
}

struct Table<'a> {
    columns: Vec<Column>,
    /// `cells[row][col]`
    cells: Vec<Vec<Option<&'a MetricResult>>>,
    best: Vec<Vec<bool>>,
}

fn layout(rows: &[ModelRow]) -> Table<'_> {
    let split: Vec<MetricName> = MetricName::ALL
        .into_iter()
        .filter(|&m| {
            rows.iter()
                .any(|row| row.results.iter().filter(|r| r.metric_name == m).count() > 1)
        })
        .collect();
    let mut columns: Vec<Column> = rows
        .iter()
        .flat_map(|row| &row.results)
        .map(|r| Column {
            metric: r.metric_name,
            sample_size: split.contains(&r.metric_name).then_some(r.n_gen),
        })
        .collect();
    columns.sort();
    columns.dedup();

    let cells: Vec<Vec<Option<&MetricResult>>> = rows
        .iter()
        .map(|row| {
            columns
                .iter()
                .map(|c| row.results.iter().find(|r| c.matches(r)))
                .collect()
        })
        .collect();

    let mut best = vec![vec![false; columns.len()]; rows.len()];
    for (j, column) in columns.iter().enumerate() {
        let better = column.metric.better();
        let candidates = || {
            rows.iter()
                .zip(&cells)
                .enumerate()
                .filter(|(_, (row, _))| !row.reference)
                .filter_map(|(i, (_, cells))| cells[j].map(|r| (i, r.value)))
        };
        let top = candidates()
            .map(|(_, v)| v)
            .reduce(|a, b| if better.prefers(b, a) { b } else { a });
        if let Some(top) = top {
            for (i, v) in candidates() {
                best[i][j] = v == top;
            }
        }
    }
    Table {
        columns,
        cells,
        best,
    }
}

/// Two decimals, with no negative zero.
fn fixed2(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_owned()
    } else {
        s
    }
}

fn display_cell(r: &MetricResult) -> String {
    match r.dispersion {
        Some(sd) => format!("{} ± {}", fixed2(r.value), fixed2(sd)),
        None => fixed2(r.value),
    }
}

/// Renders the comparison table. Output is deterministic and locale-free.
pub fn render_report(rows: &[ModelRow], format: ReportFormat) -> String {
    let table = layout(rows);
    match format {
        ReportFormat::Markdown => markdown(rows, &table),
        ReportFormat::Csv => csv_table(rows, &table),
        ReportFormat::Json => json(rows, &table),
    }
}

fn markdown(rows: &[ModelRow], t: &Table<'_>) -> String {
    let mut out = String::from("| Model |");
    for c in &t.columns {
        out.push_str(&format!(" {} {} |", c.title(), c.metric.better().arrow()));
    }
    out.push_str("\n| --- |");
    for _ in &t.columns {
        out.push_str(" ---: |");
    }
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        out.push_str(&format!("| {} |", row.model.replace('|', "\\|")));
        for (j, cell) in t.cells[i].iter().enumerate() {
            let text = match cell {
                None => MISSING.to_owned(),
                Some(r) if t.best[i][j] => format!("**{}**", display_cell(r)),
                Some(r) => display_cell(r),
            };
            out.push_str(&format!(" {text} |"));
        }
        out.push('\n');
    }
    out
}

fn csv_table(rows: &[ModelRow], t: &Table<'_>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["model".to_owned()];
    for c in &t.columns {
        let title = c.title();
        header.push(title.clone());
        header.push(format!("{title}_sd"));
        header.push(format!("{title}_best"));
    }
    w.write_record(&header).expect("in-memory write");
    for (i, row) in rows.iter().enumerate() {
        let mut record = vec![row.model.clone()];
        for (j, cell) in t.cells[i].iter().enumerate() {
            match cell {
                Some(r) => {
                    record.push(r.value.to_string());
                    record.push(r.dispersion.map(|d| d.to_string()).unwrap_or_default());
                }
                None => {
                    record.push(MISSING.to_owned());
                    record.push(String::new());
                }
            }
            record.push(t.best[i][j].to_string());
        }
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

#[derive(Serialize)]
struct JsonColumn {
    key: String,
    metric: MetricName,
    sample_size: Option<usize>,
    better: Better,
}

#[derive(Serialize)]
struct JsonCell {
    column: String,
    value: Option<f64>,
    dispersion: Option<f64>,
    display: String,
    best: bool,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    model: &'a str,
    reference: bool,
    cells: Vec<JsonCell>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    columns: Vec<JsonColumn>,
    rows: Vec<JsonRow<'a>>,
}

fn json(rows: &[ModelRow], t: &Table<'_>) -> String {
    let report = JsonReport {
        columns: t
            .columns
            .iter()
            .map(|c| JsonColumn {
                key: c.title(),
                metric: c.metric,
                sample_size: c.sample_size,
                better: c.metric.better(),
            })
            .collect(),
        rows: rows
            .iter()
            .enumerate()
            .map(|(i, row)| JsonRow {
                model: &row.model,
                reference: row.reference,
                cells: t.cells[i]
                    .iter()
                    .zip(&t.columns)
                    .enumerate()
                    .map(|(j, (cell, c))| JsonCell {
                        column: c.title(),
                        value: cell.map(|r| r.value),
                        dispersion: cell.and_then(|r| r.dispersion),
                        display: cell.map_or(MISSING.to_owned(), display_cell),
                        best: t.best[i][j],
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&report).expect("plain data serializes");
    s.push('\n');
    s
}
