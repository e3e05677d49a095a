//! Lazy counters. The first `n` bits `b` count through the standard binary
//! numbers, and a pointer field `i` of `log n` bits spreads each carry over
//! several single-bit steps. A phase field `k` of `g` bits lets `i` spin
//! through all its values between real increments, which is where the
//! extra states (and the space efficiency) come from.
//!
//! Layout: `b` at `0..n`, `i` at `n..n+log n`, `k` after that. Integer
//! fields are little-endian within their window.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::brgc::{brgc_next, brgc_rank_tracked};
use crate::composite::LayerKind;
use crate::counter::{Counter, CounterId};
use crate::probe::{
    binary_increment, read_value, scan_is_zero, store_value, BitState, Probe, ProbeError, ProbeLedger, View,
};
use crate::rpgc::rpgc_increment;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("n must be a power of two >= 2, got {0}")]
    BadN(usize),
    #[error("g must be {expected} for {counter}, got {got}")]
    BadG { counter: &'static str, expected: &'static str, got: usize },
    #[error("sub-code of dimension {dim} is not usable: {reason}")]
    BadSubCode { dim: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LazyLayout {
    pub n: usize,
    pub g: usize,
}

impl LazyLayout {
    pub fn new(n: usize, g: usize) -> Result<Self, LayoutError> {
        if n < 2 || !n.is_power_of_two() {
            return Err(LayoutError::BadN(n));
        }
        Ok(LazyLayout { n, g })
    }

    pub fn log_n(&self) -> usize {
        self.n.trailing_zeros() as usize
    }

    pub fn dim(&self) -> usize {
        self.n + self.log_n() + self.g
    }

    pub fn b(&self) -> View {
        View::new(0, self.n)
    }

    pub fn i(&self) -> View {
        View::new(self.n, self.log_n())
    }

    pub fn k(&self) -> View {
        View::new(self.n + self.log_n(), self.g)
    }

    /// Splits a state into `(b, i, k)` with `i` and `k` as raw little-endian
    /// field values.
    pub fn decode(&self, s: &BitState) -> (Vec<bool>, u64, u64) {
        let field = |v: View| (0..v.len).fold(0u64, |acc, j| acc | ((s.get(v.at(j)) as u64) << j));
        let b = (0..self.n).map(|j| s.get(j)).collect();
        (b, field(self.i()), field(self.k()))
    }

    pub fn encode(&self, b: &[bool], i: u64, k: u64) -> BitState {
        assert_eq!(b.len(), self.n);
        let mut s = BitState::zeros(self.dim());
        for (j, &bit) in b.iter().enumerate() {
            s.set(j, bit);
        }
        for (v, value) in [(self.i(), i), (self.k(), k)] {
            for j in 0..v.len {
                s.set(v.at(j), (value >> j) & 1 == 1);
            }
        }
        s
    }
}

/// One step of the Frandsen et al. lazy counter on `(b, i)`: read all of
/// `i`, read `b[i]`; a 1 is cleared and `i` advances, a 0 is set and `i`
/// resets. Only changed bits of `i` are written. Returns the new `i`.
pub fn lazy_increment(layout: &LazyLayout, p: &mut Probe<'_>) -> Result<u64, ProbeError> {
    let iv = layout.i();
    let i = read_value(p, iv)?;
    let pos = layout.b().at(i as usize);
    let next = if p.read(pos)? {
        p.write(pos, false)?;
        (i + 1) % layout.n as u64
    } else {
        p.write(pos, true)?;
        0
    };
    store_value(p, iv, i, next)?;
    Ok(next)
}

/// Brodal's single-bit spin: with `k = 0` spin `i` and raise `k` on
/// rollover; with `k = 1` do a real increment and drop `k` once `i` is 0.
pub fn spin_increment(layout: &LazyLayout, p: &mut Probe<'_>) -> Result<(), ProbeError> {
    let k = layout.k().at(0);
    if !p.read(k)? {
        if binary_increment(p, layout.i())? {
            p.write(k, true)?;
        }
    } else {
        lazy_increment(layout, p)?;
        if scan_is_zero(p, layout.i())? {
            p.write(k, false)?;
        }
    }
    Ok(())
}

/// `g`-bit phase counter. `k < 2^g - 1` is decided by scanning `k` upward
/// for a zero, so the full `g` bits are read only when `k` is all ones.
pub fn double_spin_increment(layout: &LazyLayout, p: &mut Probe<'_>) -> Result<(), ProbeError> {
    let kv = layout.k();
    let mut k_full = true;
    for j in 0..kv.len {
        if !p.read(kv.at(j))? {
            k_full = false;
            break;
        }
    }
    if !k_full {
        if binary_increment(p, layout.i())? {
            // The carry chain of k was just scanned, so this reads nothing new.
            binary_increment(p, kv)?;
        }
    } else {
        lazy_increment(layout, p)?;
        if scan_is_zero(p, layout.i())? {
            for j in 0..kv.len {
                p.write(kv.at(j), false)?;
            }
        }
    }
    Ok(())
}

/// A cyclic code usable for the `i` and `k` fields of [`Wine`].
pub trait CyclicCode: Send + Sync + fmt::Debug {
    fn tag(&self) -> String;

    fn dim(&self) -> usize;

    fn next(&self, p: &mut Probe<'_>, v: View) -> Result<(), ProbeError>;

    /// Rank of the view's contents, charging a read of every bit.
    fn rank(&self, p: &mut Probe<'_>, v: View) -> Result<u64, ProbeError>;

    /// The maximal-rank state, as a little-endian value.
    fn last_state(&self) -> u64;
}

#[derive(Debug, Clone)]
pub struct BrgcCode {
    dim: usize,
}

impl BrgcCode {
    pub fn new(dim: usize) -> Result<Self, LayoutError> {
        if dim == 0 || dim > 63 {
            return Err(LayoutError::BadSubCode { dim, reason: "dimension must be in 1..=63".into() });
        }
        Ok(BrgcCode { dim })
    }
}

impl CyclicCode for BrgcCode {
    fn tag(&self) -> String {
        "brgc".into()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn next(&self, p: &mut Probe<'_>, v: View) -> Result<(), ProbeError> {
        brgc_next(p, v)
    }

    fn rank(&self, p: &mut Probe<'_>, v: View) -> Result<u64, ProbeError> {
        brgc_rank_tracked(p, v).map(|r| r.0)
    }

    fn last_state(&self) -> u64 {
        1 << (self.dim - 1)
    }
}

/// Any space-optimal layer code, with ranks served from a table built by
/// walking the code's cycle once at construction.
#[derive(Debug, Clone)]
pub struct TableCode {
    kind: LayerKind,
    dim: usize,
    ranks: Vec<u32>,
    last: u64,
}

const TABLE_CODE_MAX_DIM: usize = 24;

impl TableCode {
    pub fn new(kind: LayerKind, dim: usize) -> Result<Self, LayoutError> {
        if dim == 0 || dim > TABLE_CODE_MAX_DIM {
            return Err(LayoutError::BadSubCode {
                dim,
                reason: format!("dimension must be in 1..={TABLE_CODE_MAX_DIM}"),
            });
        }
        let size = 1usize << dim;
        let mut ranks = vec![u32::MAX; size];
        let mut state = BitState::zeros(dim);
        let mut ledger = ProbeLedger::new(dim);
        let mut last = 0;
        for r in 0..size {
            let key = state.to_u64().expect("dim <= 24") as usize;
            if ranks[key] != u32::MAX {
                return Err(LayoutError::BadSubCode { dim, reason: format!("{kind} cycle repeats after {r} states") });
            }
            ranks[key] = r as u32;
            last = key as u64;
            ledger.open_step().expect("fresh step");
            let mut probe = Probe::new(&mut state, &mut ledger).expect("same dim");
            Self::advance(kind, &mut probe, View::whole(dim)).expect("in range");
            ledger.close_step().expect("open step");
        }
        if !state.is_zero() {
            return Err(LayoutError::BadSubCode { dim, reason: format!("{kind} does not return to zero") });
        }
        Ok(TableCode { kind, dim, ranks, last })
    }

    fn advance(kind: LayerKind, p: &mut Probe<'_>, v: View) -> Result<(), ProbeError> {
        match kind {
            LayerKind::Rpgc => rpgc_increment(p, v),
            LayerKind::Brgc => brgc_next(p, v),
        }
    }
}

impl CyclicCode for TableCode {
    fn tag(&self) -> String {
        format!("table:{}", self.kind)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn next(&self, p: &mut Probe<'_>, v: View) -> Result<(), ProbeError> {
        Self::advance(self.kind, p, v)
    }

    fn rank(&self, p: &mut Probe<'_>, v: View) -> Result<u64, ProbeError> {
        let value = read_value(p, v)?;
        Ok(self.ranks[value as usize] as u64)
    }

    fn last_state(&self) -> u64 {
        self.last
    }
}

/// Builds the sub-code used for a Wine field of the given dimension.
pub fn sub_code(kind: LayerKind, dim: usize) -> Result<Arc<dyn CyclicCode>, LayoutError> {
    Ok(match kind {
        LayerKind::Brgc => Arc::new(BrgcCode::new(dim)?),
        LayerKind::Rpgc => Arc::new(TableCode::new(kind, dim)?),
    })
}

/// Equality of a view against a constant, scanning upward and stopping at
/// the first mismatch.
fn scan_equals(p: &mut Probe<'_>, v: View, value: u64) -> Result<bool, ProbeError> {
    for j in 0..v.len {
        if p.read(v.at(j))? != ((value >> j) & 1 == 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Blind reset of `k` from its maximal-rank state to zero.
fn clear_from_last(p: &mut Probe<'_>, v: View, last: u64) -> Result<(), ProbeError> {
    for j in 0..v.len {
        if (last >> j) & 1 == 1 {
            p.write(v.at(j), false)?;
        }
    }
    Ok(())
}

/// Lazy counter whose `i` and `k` fields are cyclic Gray codes, so each
/// field changes in at most one bit per step. `i` is not reset after a bit
/// of `b` is set.
pub fn wine_increment(
    layout: &LazyLayout,
    i_code: &dyn CyclicCode,
    k_code: &dyn CyclicCode,
    p: &mut Probe<'_>,
) -> Result<(), ProbeError> {
    let (iv, kv) = (layout.i(), layout.k());
    let k_last = k_code.last_state();
    if !scan_equals(p, kv, k_last)? {
        i_code.next(p, iv)?;
        if scan_is_zero(p, iv)? {
            k_code.next(p, kv)?;
        }
        return Ok(());
    }
    let r = i_code.rank(p, iv)?;
    let pos = layout.b().at(r as usize);
    if p.read(pos)? {
        p.write(pos, false)?;
        i_code.next(p, iv)?;
        if scan_is_zero(p, iv)? {
            clear_from_last(p, kv, k_last)?;
        }
    } else {
        p.write(pos, true)?;
        clear_from_last(p, kv, k_last)?;
    }
    Ok(())
}

fn lazy_id(name: &str, layout: &LazyLayout) -> CounterId {
    let mut id = CounterId::new(name, layout.dim()).param("n", layout.n as u64);
    if layout.g > 0 {
        id = id.param("g", layout.g as u64);
    }
    id
}

fn binary_encoding(g: usize) -> BTreeMap<String, String> {
    let mut enc = BTreeMap::from([("i".to_string(), "binary".to_string())]);
    if g > 0 {
        enc.insert("k".into(), "binary".into());
    }
    enc
}

#[derive(Debug, Clone)]
pub struct Lazy {
    layout: LazyLayout,
}

impl Lazy {
    pub fn new(n: usize) -> Result<Self, LayoutError> {
        Ok(Lazy { layout: LazyLayout::new(n, 0)? })
    }

    pub fn layout(&self) -> &LazyLayout {
        &self.layout
    }
}

impl Counter for Lazy {
    fn id(&self) -> CounterId {
        let mut id = lazy_id("lazy", &self.layout);
        id.encoding = Some(binary_encoding(0));
        id
    }

    fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn advance(&self, p: &mut Probe<'_>) -> Result<(), ProbeError> {
        lazy_increment(&self.layout, p).map(|_| ())
    }
}

#[derive(Debug, Clone)]
pub struct Spin {
    layout: LazyLayout,
}

impl Spin {
    pub fn new(n: usize) -> Result<Self, LayoutError> {
        Ok(Spin { layout: LazyLayout::new(n, 1)? })
    }

    pub fn layout(&self) -> &LazyLayout {
        &self.layout
    }
}

impl Counter for Spin {
    fn id(&self) -> CounterId {
        let mut id = lazy_id("spin", &self.layout);
        id.encoding = Some(binary_encoding(1));
        id
    }

    fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn advance(&self, p: &mut Probe<'_>) -> Result<(), ProbeError> {
        spin_increment(&self.layout, p)
    }
}

#[derive(Debug, Clone)]
pub struct DoubleSpin {
    layout: LazyLayout,
}

impl DoubleSpin {
    pub fn new(n: usize, g: usize) -> Result<Self, LayoutError> {
        if g == 0 || g > 63 {
            return Err(LayoutError::BadG { counter: "doublespin", expected: "in 1..=63", got: g });
        }
        Ok(DoubleSpin { layout: LazyLayout::new(n, g)? })
    }

    pub fn layout(&self) -> &LazyLayout {
        &self.layout
    }
}

impl Counter for DoubleSpin {
    fn id(&self) -> CounterId {
        let mut id = lazy_id("doublespin", &self.layout);
        id.encoding = Some(binary_encoding(self.layout.g));
        id
    }

    fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn advance(&self, p: &mut Probe<'_>) -> Result<(), ProbeError> {
        double_spin_increment(&self.layout, p)
    }
}

#[derive(Debug, Clone)]
pub struct Wine {
    layout: LazyLayout,
    i_code: Arc<dyn CyclicCode>,
    k_code: Arc<dyn CyclicCode>,
}

impl Wine {
    /// BRGC-encoded `i` and `k`.
    pub fn new(n: usize, g: usize) -> Result<Self, LayoutError> {
        Self::with_codes(n, g, LayerKind::Brgc, LayerKind::Brgc)
    }

    pub fn with_codes(n: usize, g: usize, i_kind: LayerKind, k_kind: LayerKind) -> Result<Self, LayoutError> {
        if g == 0 {
            return Err(LayoutError::BadG { counter: "wine", expected: ">= 1", got: g });
        }
        let layout = LazyLayout::new(n, g)?;
        let i_code = sub_code(i_kind, layout.log_n())?;
        let k_code = sub_code(k_kind, g)?;
        Ok(Wine { layout, i_code, k_code })
    }

    pub fn layout(&self) -> &LazyLayout {
        &self.layout
    }
}

impl Counter for Wine {
    fn id(&self) -> CounterId {
        let mut id = lazy_id("wine", &self.layout);
        id.encoding =
            Some(BTreeMap::from([("i".to_string(), self.i_code.tag()), ("k".to_string(), self.k_code.tag())]));
        id
    }

    fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn advance(&self, p: &mut Probe<'_>) -> Result<(), ProbeError> {
        wine_increment(&self.layout, self.i_code.as_ref(), self.k_code.as_ref(), p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(bits: &[u8]) -> Vec<bool> {
        bits.iter().map(|&x| x == 1).collect()
    }

    fn go(c: &dyn Counter, layout: &LazyLayout, bits: &[u8], i: u64, k: u64) -> ((Vec<bool>, u64, u64), usize) {
        let mut s = layout.encode(&b(bits), i, k);
        let mut l = ProbeLedger::new(layout.dim());
        let cost = c.step(&mut s, &mut l).unwrap();
        (layout.decode(&s), cost.writes)
    }

    #[test]
    fn lazy_examples() {
        let c = Lazy::new(4).unwrap();
        let lay = *c.layout();
        assert_eq!(go(&c, &lay, &[0, 0, 0, 0], 0, 0).0, (b(&[1, 0, 0, 0]), 0, 0));
        assert_eq!(go(&c, &lay, &[1, 0, 0, 0], 0, 0).0, (b(&[0, 0, 0, 0]), 1, 0));
        assert_eq!(go(&c, &lay, &[0, 0, 0, 0], 1, 0).0, (b(&[0, 1, 0, 0]), 0, 0));
    }

    #[test]
    fn spin_examples() {
        let c = Spin::new(4).unwrap();
        let lay = *c.layout();
        assert_eq!(go(&c, &lay, &[0, 1, 0, 0], 3, 0).0, (b(&[0, 1, 0, 0]), 0, 1));
        assert_eq!(go(&c, &lay, &[0, 0, 0, 0], 0, 1).0, (b(&[1, 0, 0, 0]), 0, 0));
        assert_eq!(go(&c, &lay, &[1, 1, 0, 0], 1, 0).0, (b(&[1, 1, 0, 0]), 2, 0));
    }

    #[test]
    fn double_spin_examples() {
        let c = DoubleSpin::new(4, 2).unwrap();
        let lay = *c.layout();
        assert_eq!(go(&c, &lay, &[0, 0, 1, 0], 3, 1).0, (b(&[0, 0, 1, 0]), 0, 2));
        assert_eq!(go(&c, &lay, &[0, 0, 0, 0], 0, 3).0, (b(&[1, 0, 0, 0]), 0, 0));
        assert_eq!(go(&c, &lay, &[0, 0, 0, 0], 2, 0).0, (b(&[0, 0, 0, 0]), 3, 0));
    }

    #[test]
    fn wine_examples() {
        let c = Wine::new(2, 1).unwrap();
        let lay = *c.layout();
        assert_eq!(go(&c, &lay, &[0, 0], 0, 0).0, (b(&[0, 0]), 1, 0));
        assert_eq!(go(&c, &lay, &[0, 0], 0, 1), ((b(&[1, 0]), 0, 0), 2));
        assert_eq!(go(&c, &lay, &[1, 0], 0, 1).0, (b(&[0, 0]), 1, 1));
    }

    #[test]
    fn layout_validation() {
        assert_eq!(Wine::new(3, 1).unwrap_err(), LayoutError::BadN(3));
        assert_eq!(Lazy::new(1).unwrap_err(), LayoutError::BadN(1));
        assert!(DoubleSpin::new(4, 0).is_err());
        assert!(Wine::new(4, 0).is_err());
        let lay = LazyLayout::new(8, 2).unwrap();
        assert_eq!(lay.dim(), 13);
        assert_eq!((lay.b(), lay.i(), lay.k()), (View::new(0, 8), View::new(8, 3), View::new(11, 2)));
    }

    #[test]
    fn table_code_matches_brgc_ranks() {
        let t = TableCode::new(LayerKind::Brgc, 4).unwrap();
        for r in 0..16u64 {
            let s = crate::brgc::brgc_unrank(crate::brgc::BrgcRank(r), 4).unwrap();
            assert_eq!(t.ranks[s.to_u64().unwrap() as usize] as u64, r);
        }
        assert_eq!(t.last_state(), BrgcCode::new(4).unwrap().last_state());
        // RPGC's last state is 10…0 read in index order, i.e. bit 0 set.
        assert_eq!(TableCode::new(LayerKind::Rpgc, 5).unwrap().last_state(), 1);
    }
}
