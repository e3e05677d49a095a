//! Gray and quasi-Gray code counters instrumented under the bit-probe
//! (decision assignment tree) cost model, plus an exhaustive-enumeration
//! harness that measures cycle length, reads, writes, and space efficiency.

pub mod bounds;
pub mod brgc;
pub mod catalog;
pub mod composite;
pub mod counter;
pub mod exact;
pub mod export;
pub mod harness;
pub mod lazy;
pub mod probe;
pub mod rpgc;

pub use counter::{Counter, CounterId};
pub use exact::Exact;
pub use harness::{enumerate_cycle, verify_quasi_gray, CycleReport};
pub use probe::{BitState, Probe, ProbeError, ProbeLedger, StepCost, View};
