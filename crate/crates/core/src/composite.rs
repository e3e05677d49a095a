//! Composite codes: a fast outer layer that, each time it wraps back to its
//! initial state, advances the next layer inward by one step.
//!
//! Layers are listed innermost first and occupy the lowest indices. Every
//! layer starts at all zeros, and the wrap test is an equality check
//! against all zeros scanning the layer upward from its bit 0.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::brgc::brgc_next;
use crate::counter::{Counter, CounterId};
use crate::probe::{scan_is_zero, Probe, ProbeError, View};
use crate::rpgc::rpgc_increment;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("a layer plan needs at least one layer")]
    Empty,
    #[error("layer dimensions must be at least 1")]
    ZeroDim,
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Rpgc,
    Brgc,
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayerKind::Rpgc => "rpgc",
            LayerKind::Brgc => "brgc",
        })
    }
}

impl std::str::FromStr for LayerKind {
    type Err = PlanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rpgc" => Ok(LayerKind::Rpgc),
            "brgc" => Ok(LayerKind::Brgc),
            other => Err(PlanError::Precondition(format!("unknown layer kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Layer {
    pub kind: LayerKind,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerPlan {
    layers: Vec<Layer>,
}

impl LayerPlan {
    pub fn new(layers: Vec<Layer>) -> Result<Self, PlanError> {
        if layers.is_empty() {
            return Err(PlanError::Empty);
        }
        if layers.iter().any(|l| l.dim == 0) {
            return Err(PlanError::ZeroDim);
        }
        Ok(LayerPlan { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn total_dim(&self) -> usize {
        self.layers.iter().map(|l| l.dim).sum()
    }

    /// Worst-case writes claimed for the plan: one per layer.
    pub fn c_writes(&self) -> usize {
        self.layers.len()
    }

    /// `(kind, dim)` pairs, innermost first.
    pub fn pairs(&self) -> Vec<(String, usize)> {
        self.layers.iter().map(|l| (l.kind.to_string(), l.dim)).collect()
    }

    fn views(&self) -> Vec<View> {
        let mut offset = 0;
        self.layers
            .iter()
            .map(|l| {
                let v = View::new(offset, l.dim);
                offset += l.dim;
                v
            })
            .collect()
    }

    fn wrapped(mut self, outer: Layer) -> Self {
        self.layers.push(outer);
        self
    }
}

/// Innermost layer of `inner_kind`, every further layer an RPGC.
pub fn build_layered(dims: &[usize], inner_kind: LayerKind) -> Result<LayerPlan, PlanError> {
    let layers = dims
        .iter()
        .enumerate()
        .map(|(idx, &dim)| Layer { kind: if idx == 0 { inner_kind } else { LayerKind::Rpgc }, dim })
        .collect();
    LayerPlan::new(layers)
}

/// `log^{(k)} x`, or `None` once an intermediate value drops to zero or below.
pub fn iter_log2(x: f64, k: u32) -> Option<f64> {
    let mut v = x;
    for _ in 0..k {
        if v <= 0.0 {
            return None;
        }
        v = v.log2();
    }
    Some(v)
}

/// Smallest `c >= 0` with `log^{(c)} d <= 1`.
pub fn log_star(d: u64) -> u32 {
    let mut x = d as f64;
    let mut c = 0;
    while x > 1.0 {
        x = x.log2();
        c += 1;
    }
    c
}

/// Iterated composite construction achieving at most `c` writes per step.
///
/// `c = 1` is a single RPGC layer. For larger `c` the construction needs
/// `log^{(2c-1)} d >= 11`; below that this returns a precondition error
/// instead of a degraded plan.
pub fn auto_plan(d: usize, c: u32) -> Result<LayerPlan, PlanError> {
    if d == 0 {
        return Err(PlanError::ZeroDim);
    }
    if c == 0 {
        return Err(PlanError::Precondition("c must be at least 1".into()));
    }
    if c == 1 {
        return LayerPlan::new(vec![Layer { kind: LayerKind::Rpgc, dim: d }]);
    }
    let level = 2 * c - 1;
    match iter_log2(d as f64, level) {
        Some(v) if v >= 11.0 => {}
        other => {
            return Err(PlanError::Precondition(format!(
                "log^({level}) {d} >= 11 does not hold (value {})",
                other.map_or("undefined".to_string(), |v| format!("{v:.4}"))
            )))
        }
    }
    // Outer RPGC sized to the inner code's average-read bound.
    let r = 6.0 * iter_log2(d as f64, 2 * c - 3).expect("checked above") + 11.0;
    let outer = r.log2().ceil() as usize;
    let inner = auto_plan(d - outer, c - 1)?;
    Ok(inner.wrapped(Layer { kind: LayerKind::Rpgc, dim: outer }))
}

/// A plan realizing the log*-write construction, with the claims attached
/// to the case that applies at this dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogStarPlan {
    pub plan: LayerPlan,
    /// 1 through 4, by increasing dimension threshold.
    pub case: u8,
    pub claimed_worst_writes: u64,
    /// `None` for case 1, whose claim is `6 * 2^(2^16) + 11`.
    pub claimed_avg_reads: Option<u64>,
}

const BASE_THRESHOLD: u64 = 1 << 16;
// (case, threshold below which the case does not apply, outer layer dim, avg claim)
const WRAPPINGS: [(u8, u64, usize, u64); 3] =
    [(2, 3 + (1 << 17), 3 + (1 << 16), 100), (3, 10 + (1 << 17), 7, 20), (4, 15 + (1 << 17), 5, 17)];

pub fn logstar_plan(d: u64) -> Result<LogStarPlan, PlanError> {
    if d <= BASE_THRESHOLD {
        return Err(PlanError::Precondition(format!("d > 2^16 does not hold (d = {d})")));
    }
    let case = WRAPPINGS.iter().filter(|w| d > w.1).map(|w| w.0).max().unwrap_or(1);
    let plan = logstar_layers(d, case)?;
    let ls = log_star(d) as u64;
    let claimed_worst_writes = (ls - 1 + 2 * (case as u64 - 1)) / 2;
    let claimed_avg_reads = WRAPPINGS.iter().find(|w| w.0 == case).map(|w| w.3);
    Ok(LogStarPlan { plan, case, claimed_worst_writes, claimed_avg_reads })
}

fn logstar_layers(d: u64, case: u8) -> Result<LayerPlan, PlanError> {
    if case == 1 {
        let c = (log_star(d) - 3) / 2;
        return auto_plan(d as usize, c);
    }
    let (_, _, outer, _) = WRAPPINGS[case as usize - 2];
    let inner = logstar_layers(d - outer as u64, case - 1)?;
    Ok(inner.wrapped(Layer { kind: LayerKind::Rpgc, dim: outer }))
}

fn advance_layer(p: &mut Probe<'_>, kind: LayerKind, v: View) -> Result<(), ProbeError> {
    match kind {
        LayerKind::Rpgc => rpgc_increment(p, v),
        LayerKind::Brgc => brgc_next(p, v),
    }
}

/// Advances the outermost layer; while the layer just advanced is back at
/// all zeros, advances the next layer inward.
pub fn composite_step(plan: &LayerPlan, p: &mut Probe<'_>) -> Result<(), ProbeError> {
    if plan.total_dim() != p.dim() {
        return Err(ProbeError::DimMismatch { ledger: p.dim(), state: plan.total_dim() });
    }
    let views = plan.views();
    for idx in (0..views.len()).rev() {
        advance_layer(p, plan.layers[idx].kind, views[idx])?;
        if idx == 0 || !scan_is_zero(p, views[idx])? {
            break;
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Composite {
    plan: LayerPlan,
}

impl Composite {
    pub fn new(plan: LayerPlan) -> Self {
        Composite { plan }
    }

    pub fn plan(&self) -> &LayerPlan {
        &self.plan
    }
}

impl Counter for Composite {
    fn id(&self) -> CounterId {
        let mut id = CounterId::new("composite", self.plan.total_dim()).param("c", self.plan.c_writes() as u64);
        id.plan = Some(self.plan.pairs());
        id
    }

    fn dim(&self) -> usize {
        self.plan.total_dim()
    }

    fn advance(&self, p: &mut Probe<'_>) -> Result<(), ProbeError> {
        composite_step(&self.plan, p)
    }
}
