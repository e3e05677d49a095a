use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::probe::{BitState, Probe, ProbeError, ProbeLedger, StepCost};

/// Identity echoed into reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterId {
    pub name: String,
    pub dim: usize,
    pub params: BTreeMap<String, u64>,
    /// Layer list, innermost first, for composite counters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<Vec<(String, usize)>>,
    /// Field encodings for the lazy counters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub encoding: Option<BTreeMap<String, String>>,
}

impl CounterId {
    pub fn new(name: &str, dim: usize) -> Self {
        CounterId { name: name.to_string(), dim, params: BTreeMap::new(), plan: None, encoding: None }
    }

    pub fn param(mut self, key: &str, value: u64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Compact single-field rendering used in the CSV `params` column,
    /// e.g. `g=2;n=4;i=brgc;k=brgc` or `layers=rpgc:10|rpgc:3`.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        if let Some(enc) = &self.encoding {
            parts.extend(enc.iter().map(|(k, v)| format!("{k}={v}")));
        }
        if let Some(plan) = &self.plan {
            let mut s = String::from("layers=");
            for (idx, (kind, dim)) in plan.iter().enumerate() {
                if idx > 0 {
                    s.push('|');
                }
                let _ = write!(s, "{kind}:{dim}");
            }
            parts.push(s);
        }
        parts.join(";")
    }
}

/// Uniform interface over every generator: a fixed dimension, an all-zeros
/// initial state, and a deterministic one-step advance charged to a ledger.
pub trait Counter: Send + Sync {
    fn id(&self) -> CounterId;

    fn dim(&self) -> usize;

    fn initial(&self) -> BitState {
        BitState::zeros(self.dim())
    }

    /// Advances the state by one step. The caller owns step boundaries.
    fn advance(&self, p: &mut Probe<'_>) -> Result<(), ProbeError>;

    /// Opens a step, advances, and closes it.
    fn step(&self, state: &mut BitState, ledger: &mut ProbeLedger) -> Result<StepCost, ProbeError> {
        ledger.open_step()?;
        let mut probe = Probe::new(state, ledger)?;
        self.advance(&mut probe)?;
        ledger.close_step()
    }
}
