//! CSV and JSON rendering of reports, and the summary table.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::bounds::{check_bounds, BoundCheck, BoundKind};
use crate::catalog::{ConfigError, CounterConfig};
use crate::composite::LayerKind;
use crate::counter::CounterId;
use crate::harness::{collect_metrics, enumerate_cycle, CycleReport, HarnessError, MetricRecord, CSV_COLUMNS};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

/// One report as exported to JSON.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDoc {
    #[serde(flatten)]
    pub metrics: MetricRecord,
    pub id: CounterId,
    pub steps: u64,
    pub reads_histogram: BTreeMap<usize, u64>,
    pub writes_histogram: BTreeMap<usize, u64>,
    pub hamming_histogram: BTreeMap<usize, u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<BoundCheck>,
}

impl ReportDoc {
    pub fn new(report: &CycleReport, bounds: Vec<BoundCheck>) -> Self {
        ReportDoc {
            metrics: collect_metrics(report),
            id: report.counter.clone(),
            steps: report.steps,
            reads_histogram: report.reads_histogram.clone(),
            writes_histogram: report.writes_histogram.clone(),
            hamming_histogram: report.hamming_histogram.clone(),
            bounds,
        }
    }
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub fn write_csv<W: Write>(out: W, records: &[MetricRecord]) -> Result<(), ExportError> {
    let mut w = csv_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.write_record(r.csv_cells())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<(), ExportError> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Metrics that carry a claimed-bound column in the summary table.
pub const TABLE_BOUND_METRICS: [&str; 6] =
    ["length", "space_efficiency", "avg_reads", "worst_reads", "avg_writes", "worst_writes"];

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    #[serde(flatten)]
    pub metrics: MetricRecord,
    /// Claimed bound per metric, e.g. `<= 6*log(5)`; empty when none is claimed.
    pub paper_bound: BTreeMap<String, String>,
    pub bounds: Vec<BoundCheck>,
}

impl TableRow {
    pub fn csv_header() -> Vec<String> {
        let mut h: Vec<String> = CSV_COLUMNS.iter().map(|s| s.to_string()).collect();
        h.extend(TABLE_BOUND_METRICS.iter().map(|m| format!("paper_bound_{m}")));
        h
    }

    pub fn csv_cells(&self) -> Vec<String> {
        let mut cells = self.metrics.csv_cells();
        cells.extend(TABLE_BOUND_METRICS.iter().map(|m| self.paper_bound.get(*m).cloned().unwrap_or_default()));
        cells
    }
}

fn relation(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::LengthExact | BoundKind::AvgReadsExact | BoundKind::AvgWritesExact => "=",
        BoundKind::EfficiencyGe => ">=",
        _ => "<=",
    }
}

fn paper_bound_cells(checks: &[BoundCheck]) -> BTreeMap<String, String> {
    let mut cells: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for c in checks {
        let metric = c.kind.metric();
        if TABLE_BOUND_METRICS.contains(&metric) {
            let cell = format!("{} {}", relation(c.kind), c.bound);
            let cell = if matches!(c.outcome, crate::bounds::Outcome::Delta { .. }) {
                format!("{cell} (disputed)")
            } else {
                cell
            };
            cells.entry(metric.to_string()).or_default().push(cell);
        }
    }
    cells.into_iter().map(|(k, v)| (k, v.join("; "))).collect()
}

/// Enumerates one configuration and attaches its claimed bounds.
pub fn table_row(cfg: &CounterConfig, cap: u64) -> Result<TableRow, ExportError> {
    let counter = cfg.build()?;
    let report = enumerate_cycle(counter.as_ref(), cap)?;
    let bounds = check_bounds(&report, &cfg.claimed_bounds());
    Ok(TableRow { metrics: collect_metrics(&report), paper_bound: paper_bound_cells(&bounds), bounds })
}

/// Configurations reproduced by the summary table, in output order.
pub fn table1_configs() -> Vec<CounterConfig> {
    let mut v = Vec::new();
    v.extend((2..=10).map(|dim| CounterConfig::Binary { dim }));
    v.extend((2..=10).map(|dim| CounterConfig::Brgc { dim }));
    v.extend((2..=16).map(|dim| CounterConfig::Rpgc { dim }));
    for layers in [vec![6, 3], vec![10, 3, 2], vec![8, 4]] {
        v.push(CounterConfig::Composite { layers, inner: LayerKind::Rpgc });
    }
    for n in [4, 8] {
        for g in 1..=3 {
            v.push(CounterConfig::DoubleSpin { n, g });
        }
    }
    for n in [4, 8] {
        for g in 1..=3 {
            v.push(CounterConfig::Wine { n, g, sub: LayerKind::Brgc });
        }
    }
    v
}

pub fn write_table_csv<W: Write>(out: W, rows: &[TableRow]) -> Result<(), ExportError> {
    let mut w = csv_writer(out);
    w.write_record(TableRow::csv_header())?;
    for r in rows {
        w.write_record(r.csv_cells())?;
    }
    w.flush()?;
    Ok(())
}
