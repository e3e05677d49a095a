//! Exhaustive cycle enumeration and quasi-Gray verification.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::counter::{Counter, CounterId};
use crate::exact::Exact;
use crate::probe::{BitState, ProbeError, ProbeLedger, StepCost};

/// Default enumeration cap, in steps.
pub const DEFAULT_CYCLE_CAP: u64 = 1 << 26;

// Bitmap distinctness tracking up to this dimension (2^28 bits = 32 MiB).
const BITMAP_MAX_DIM: usize = 28;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error("{0}")]
    Usage(String),
}

/// First step (0-based) at which a per-step measurement took a given value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepWitness {
    pub step: u64,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleReport {
    pub counter: CounterId,
    /// Distinct states visited; the cycle length when `closed`.
    pub length: u64,
    pub steps: u64,
    pub closed: bool,
    pub distinct: bool,
    pub total_reads: u64,
    pub total_writes: u64,
    pub worst_reads: usize,
    pub worst_writes: usize,
    pub min_writes: usize,
    pub max_hamming: usize,
    pub reads_histogram: BTreeMap<usize, u64>,
    pub writes_histogram: BTreeMap<usize, u64>,
    pub hamming_histogram: BTreeMap<usize, u64>,
    pub first_writes: BTreeMap<usize, StepWitness>,
    pub first_hamming: BTreeMap<usize, StepWitness>,
}

impl CycleReport {
    pub fn dim(&self) -> usize {
        self.counter.dim
    }

    /// `L / 2^dim`.
    pub fn space_efficiency(&self) -> Exact {
        Exact(Exact::int(self.length).0 / Exact::pow2(self.dim() as i64).0)
    }

    pub fn avg_reads(&self) -> Exact {
        Exact::new(self.total_reads, self.steps.max(1))
    }

    pub fn avg_writes(&self) -> Exact {
        Exact::new(self.total_writes, self.steps.max(1))
    }
}

enum Visited {
    Bitmap(Vec<u64>),
    Hashed(HashSet<Vec<u64>>),
}

impl Visited {
    fn new(dim: usize) -> Self {
        if dim <= BITMAP_MAX_DIM {
            Visited::Bitmap(vec![0; ((1usize << dim) / 64).max(1)])
        } else {
            Visited::Hashed(HashSet::new())
        }
    }

    /// Returns false if the state was already present.
    fn insert(&mut self, s: &BitState) -> bool {
        match self {
            Visited::Bitmap(bits) => {
                let key = s.words()[0] as usize;
                let (w, m) = (key / 64, 1u64 << (key % 64));
                let fresh = bits[w] & m == 0;
                bits[w] |= m;
                fresh
            }
            Visited::Hashed(set) => set.insert(s.words().to_vec()),
        }
    }
}

/// Steps from the initial state until it recurs, a non-initial state
/// repeats, or `cap` steps have been taken.
pub fn enumerate_cycle(counter: &dyn Counter, cap: u64) -> Result<CycleReport, HarnessError> {
    enumerate_cycle_observed(counter, cap, |_, _| {})
}

/// As [`enumerate_cycle`], calling `observe` with each new state and the
/// cost of the step that produced it.
pub fn enumerate_cycle_observed(
    counter: &dyn Counter,
    cap: u64,
    mut observe: impl FnMut(&BitState, StepCost),
) -> Result<CycleReport, HarnessError> {
    if cap == 0 {
        return Err(HarnessError::Usage("cycle cap must be at least 1".into()));
    }
    let dim = counter.dim();
    let initial = counter.initial();
    let mut state = initial.clone();
    let mut prev = initial.clone();
    let mut ledger = ProbeLedger::new(dim);
    let mut visited = Visited::new(dim);
    visited.insert(&state);

    let mut report = CycleReport {
        counter: counter.id(),
        length: 1,
        steps: 0,
        closed: false,
        distinct: true,
        total_reads: 0,
        total_writes: 0,
        worst_reads: 0,
        worst_writes: 0,
        min_writes: usize::MAX,
        max_hamming: 0,
        reads_histogram: BTreeMap::new(),
        writes_histogram: BTreeMap::new(),
        hamming_histogram: BTreeMap::new(),
        first_writes: BTreeMap::new(),
        first_hamming: BTreeMap::new(),
    };

    while report.steps < cap {
        prev.clone_from(&state);
        let cost = counter.step(&mut state, &mut ledger)?;
        let hamming = prev.hamming(&state);
        let step = report.steps;
        report.steps += 1;
        report.total_reads += cost.reads as u64;
        report.total_writes += cost.writes as u64;
        report.worst_reads = report.worst_reads.max(cost.reads);
        report.worst_writes = report.worst_writes.max(cost.writes);
        report.min_writes = report.min_writes.min(cost.writes);
        report.max_hamming = report.max_hamming.max(hamming);
        *report.reads_histogram.entry(cost.reads).or_default() += 1;
        *report.writes_histogram.entry(cost.writes).or_default() += 1;
        *report.hamming_histogram.entry(hamming).or_default() += 1;
        let witness = || StepWitness { step, from: prev.to_string(), to: state.to_string() };
        report.first_writes.entry(cost.writes).or_insert_with(witness);
        report.first_hamming.entry(hamming).or_insert_with(witness);
        observe(&state, cost);

        if state == initial {
            report.closed = true;
            break;
        }
        if !visited.insert(&state) {
            report.distinct = false;
            break;
        }
        report.length += 1;
    }
    if report.steps == 0 {
        report.min_writes = 0;
    }
    Ok(report)
}

/// The first `steps` states after the initial one.
pub fn successors(counter: &dyn Counter, steps: usize) -> Result<Vec<BitState>, HarnessError> {
    let mut state = counter.initial();
    let mut ledger = ProbeLedger::new(counter.dim());
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        counter.step(&mut state, &mut ledger)?;
        out.push(state.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    Hamming,
    Writes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub violation: Violation,
    pub value: usize,
    pub witness: StepWitness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuasiGrayVerdict {
    pub c: usize,
    pub pass: bool,
    pub counterexample: Option<Counterexample>,
}

/// Passes iff consecutive states differ in at most `c` bits and no step
/// wrote more than `c` bits. The counterexample is the earliest offending
/// step.
pub fn verify_quasi_gray(report: &CycleReport, c: usize) -> Result<QuasiGrayVerdict, HarnessError> {
    if !report.closed || !report.distinct {
        return Err(HarnessError::Usage("quasi-Gray verification needs a closed, distinct cycle".into()));
    }
    let candidates = report
        .first_hamming
        .range(c + 1..)
        .map(|(&v, w)| (Violation::Hamming, v, w))
        .chain(report.first_writes.range(c + 1..).map(|(&v, w)| (Violation::Writes, v, w)));
    let counterexample = candidates
        .min_by_key(|(kind, _, w)| (w.step, matches!(kind, Violation::Writes)))
        .map(|(violation, value, w)| Counterexample { violation, value, witness: w.clone() });
    Ok(QuasiGrayVerdict { c, pass: counterexample.is_none(), counterexample })
}

/// Flattened report fields, in export column order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricRecord {
    pub counter: String,
    pub dim: usize,
    pub params: String,
    pub length: u64,
    pub closed: bool,
    pub distinct: bool,
    pub space_efficiency: Exact,
    pub avg_reads: Exact,
    pub worst_reads: usize,
    pub avg_writes: Exact,
    pub worst_writes: usize,
    pub max_hamming: usize,
}

pub const CSV_COLUMNS: [&str; 12] = [
    "counter",
    "dim",
    "params",
    "length",
    "closed",
    "distinct",
    "space_efficiency",
    "avg_reads",
    "worst_reads",
    "avg_writes",
    "worst_writes",
    "max_hamming",
];

pub fn collect_metrics(report: &CycleReport) -> MetricRecord {
    MetricRecord {
        counter: report.counter.name.clone(),
        dim: report.dim(),
        params: report.counter.describe(),
        length: report.length,
        closed: report.closed,
        distinct: report.distinct,
        space_efficiency: report.space_efficiency(),
        avg_reads: report.avg_reads(),
        worst_reads: report.worst_reads,
        avg_writes: report.avg_writes(),
        worst_writes: report.worst_writes,
        max_hamming: report.max_hamming,
    }
}

impl MetricRecord {
    /// CSV cells; rationals in exact `p/q` form.
    pub fn csv_cells(&self) -> Vec<String> {
        vec![
            self.counter.clone(),
            self.dim.to_string(),
            self.params.clone(),
            self.length.to_string(),
            self.closed.to_string(),
            self.distinct.to_string(),
            self.space_efficiency.to_string(),
            self.avg_reads.to_string(),
            self.worst_reads.to_string(),
            self.avg_writes.to_string(),
            self.worst_writes.to_string(),
            self.max_hamming.to_string(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brgc::{Brgc, StandardBinary};
    use crate::lazy::Lazy;
    use crate::rpgc::Rpgc;

    #[test]
    fn rpgc_dim3_cycle() {
        let r = enumerate_cycle(&Rpgc::new(3).unwrap(), DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!((r.length, r.closed, r.distinct, r.max_hamming), (8, true, true, 1));
        assert_eq!(r.space_efficiency(), Exact::int(1));
    }

    #[test]
    fn lazy_n2_cycle() {
        let r = enumerate_cycle(&Lazy::new(2).unwrap(), DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!((r.length, r.closed, r.distinct), (6, true, true));
    }

    #[test]
    fn brgc_dim3_sequence() {
        let mut seen = Vec::new();
        let r = enumerate_cycle_observed(&Brgc::new(3).unwrap(), 100, |s, _| seen.push(s.to_string())).unwrap();
        assert!(r.closed);
        assert_eq!(seen, ["001", "011", "010", "110", "111", "101", "100", "000"]);
    }

    #[test]
    fn cap_exceeded_is_unclosed() {
        let r = enumerate_cycle(&Rpgc::new(5).unwrap(), 10).unwrap();
        assert!(!r.closed);
        assert_eq!(r.steps, 10);
        assert!(verify_quasi_gray(&r, 1).is_err());
        assert!(enumerate_cycle(&Rpgc::new(5).unwrap(), 0).is_err());
    }

    #[test]
    fn quasi_gray_verdicts() {
        let brgc = enumerate_cycle(&Brgc::new(3).unwrap(), 100).unwrap();
        assert!(verify_quasi_gray(&brgc, 1).unwrap().pass);

        let bin = enumerate_cycle(&StandardBinary::new(2).unwrap(), 100).unwrap();
        let v = verify_quasi_gray(&bin, 1).unwrap();
        assert!(!v.pass);
        let cx = v.counterexample.unwrap();
        assert_eq!((cx.witness.from.as_str(), cx.witness.to.as_str()), ("01", "10"));
        assert!(verify_quasi_gray(&bin, 2).unwrap().pass);
    }

    #[test]
    fn metrics_match_table_rows() {
        let m = collect_metrics(&enumerate_cycle(&Brgc::new(3).unwrap(), 100).unwrap());
        assert_eq!(m.avg_reads, Exact::int(3));
        let m = collect_metrics(&enumerate_cycle(&StandardBinary::new(3).unwrap(), 100).unwrap());
        assert_eq!(m.avg_reads, Exact::new(7, 4));
        assert_eq!(m.avg_writes, Exact::new(7, 4));
        let m = collect_metrics(&enumerate_cycle(&Rpgc::new(4).unwrap(), 100).unwrap());
        assert!(m.avg_reads <= Exact::int(8));
        assert_eq!(m.csv_cells().len(), CSV_COLUMNS.len());
    }
}
