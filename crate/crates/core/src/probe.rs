//! Bit-string state and bit-probe accounting.
//!
//! A counter step is charged the number of *distinct* positions it reads and
//! the number of distinct positions it writes. Within one step a position that
//! was already read or written is "known" and can be consulted again for free,
//! the same way a decision assignment tree path has already fixed the values
//! of the bits on it.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbeError {
    #[error("bit position {pos} out of range for dimension {dim}")]
    OutOfRange { pos: usize, dim: usize },
    #[error("no step is open")]
    NoOpenStep,
    #[error("a step is already open")]
    StepAlreadyOpen,
    #[error("ledger dimension {ledger} does not match state dimension {state}")]
    DimMismatch { ledger: usize, state: usize },
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("invalid bit string: {0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
}

/// A fixed-dimension bit string. Index 0 is the first array element
/// (least significant when the string is read as a binary number).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitState {
    dim: usize,
    words: Vec<u64>,
}

impl BitState {
    pub fn zeros(dim: usize) -> Self {
        BitState { dim, words: vec![0; dim.div_ceil(64).max(1)] }
    }

    /// Builds a state from bits listed in index order `[b0, b1, ...]`.
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = BitState::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    /// Low `dim` bits of `value`, bit `j` of the value at index `j`.
    pub fn from_u64(value: u64, dim: usize) -> Self {
        let mut s = BitState::zeros(dim);
        for j in 0..dim.min(64) {
            s.set(j, (value >> j) & 1 == 1);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.dim, "bit {pos} out of range for dimension {}", self.dim);
        (self.words[pos / 64] >> (pos % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pos: usize, val: bool) {
        assert!(pos < self.dim, "bit {pos} out of range for dimension {}", self.dim);
        let mask = 1u64 << (pos % 64);
        if val {
            self.words[pos / 64] |= mask;
        } else {
            self.words[pos / 64] &= !mask;
        }
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.dim).map(|i| self.get(i)).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Packed words, 64 bits per word, index 0 in the low bit of word 0.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The state as an integer; `None` when `dim > 64`.
    pub fn to_u64(&self) -> Option<u64> {
        (self.dim <= 64).then(|| self.words[0])
    }

    pub fn hamming(&self, other: &BitState) -> usize {
        assert_eq!(self.dim, other.dim);
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    }
}

/// Conventional display: `bits[dim-1]` leftmost, `bits[0]` rightmost.
impl fmt::Display for BitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.dim).rev().map(|i| if self.get(i) { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitState({self})")
    }
}

impl FromStr for BitState {
    type Err = ProbeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(ProbeError::ZeroDim);
        }
        let dim = s.chars().count();
        let mut state = BitState::zeros(dim);
        for (k, c) in s.chars().enumerate() {
            let pos = dim - 1 - k;
            match c {
                '0' => {}
                '1' => state.set(pos, true),
                other => return Err(ProbeError::Parse(format!("unexpected character {other:?}"))),
            }
        }
        Ok(state)
    }
}

/// Cost of one closed step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepCost {
    pub reads: usize,
    pub writes: usize,
}

/// Per-step and cumulative record of distinct positions read and written.
#[derive(Debug, Clone)]
pub struct ProbeLedger {
    dim: usize,
    // Epoch stamps: a position belongs to the current step's set when its
    // stamp equals `epoch`.
    read_stamp: Vec<u32>,
    write_stamp: Vec<u32>,
    epoch: u32,
    open: bool,
    read_set: Vec<usize>,
    write_set: Vec<usize>,
    total_reads: u64,
    total_writes: u64,
    max_reads: usize,
    max_writes: usize,
    steps: u64,
}

impl ProbeLedger {
    pub fn new(dim: usize) -> Self {
        ProbeLedger {
            dim,
            read_stamp: vec![0; dim],
            write_stamp: vec![0; dim],
            epoch: 0,
            open: false,
            read_set: Vec::new(),
            write_set: Vec::new(),
            total_reads: 0,
            total_writes: 0,
            max_reads: 0,
            max_writes: 0,
            steps: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    pub fn open_step(&mut self) -> Result<(), ProbeError> {
        if self.open {
            return Err(ProbeError::StepAlreadyOpen);
        }
        if self.epoch == u32::MAX {
            self.read_stamp.iter_mut().for_each(|s| *s = 0);
            self.write_stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.open = true;
        Ok(())
    }

    fn check(&self, pos: usize) -> Result<(), ProbeError> {
        if !self.open {
            return Err(ProbeError::NoOpenStep);
        }
        if pos >= self.dim {
            return Err(ProbeError::OutOfRange { pos, dim: self.dim });
        }
        Ok(())
    }

    fn known(&self, pos: usize) -> bool {
        self.read_stamp[pos] == self.epoch || self.write_stamp[pos] == self.epoch
    }

    /// Reads `state[pos]`, charging it unless the position is already known
    /// this step.
    pub fn tracked_read(&mut self, state: &BitState, pos: usize) -> Result<bool, ProbeError> {
        self.check(pos)?;
        if state.dim() != self.dim {
            return Err(ProbeError::DimMismatch { ledger: self.dim, state: state.dim() });
        }
        if !self.known(pos) {
            self.read_stamp[pos] = self.epoch;
            self.read_set.push(pos);
        }
        Ok(state.get(pos))
    }

    /// Blind assignment `state[pos] := val`. Never charges a read.
    pub fn tracked_write(&mut self, state: &mut BitState, pos: usize, val: bool) -> Result<(), ProbeError> {
        self.check(pos)?;
        if state.dim() != self.dim {
            return Err(ProbeError::DimMismatch { ledger: self.dim, state: state.dim() });
        }
        if self.write_stamp[pos] != self.epoch {
            self.write_stamp[pos] = self.epoch;
            self.write_set.push(pos);
        }
        state.set(pos, val);
        Ok(())
    }

    pub fn close_step(&mut self) -> Result<StepCost, ProbeError> {
        if !self.open {
            return Err(ProbeError::NoOpenStep);
        }
        let cost = StepCost { reads: self.read_set.len(), writes: self.write_set.len() };
        self.total_reads += cost.reads as u64;
        self.total_writes += cost.writes as u64;
        self.max_reads = self.max_reads.max(cost.reads);
        self.max_writes = self.max_writes.max(cost.writes);
        self.steps += 1;
        self.read_set.clear();
        self.write_set.clear();
        self.open = false;
        Ok(cost)
    }

    /// Positions read so far in the open step, in first-read order.
    pub fn read_set(&self) -> &[usize] {
        &self.read_set
    }

    pub fn write_set(&self) -> &[usize] {
        &self.write_set
    }

    pub fn total_reads(&self) -> u64 {
        self.total_reads
    }

    pub fn total_writes(&self) -> u64 {
        self.total_writes
    }

    pub fn max_reads(&self) -> usize {
        self.max_reads
    }

    pub fn max_writes(&self) -> usize {
        self.max_writes
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }
}

/// A state and its ledger borrowed together for the duration of a step.
pub struct Probe<'a> {
    state: &'a mut BitState,
    ledger: &'a mut ProbeLedger,
}

impl<'a> Probe<'a> {
    pub fn new(state: &'a mut BitState, ledger: &'a mut ProbeLedger) -> Result<Self, ProbeError> {
        if state.dim() != ledger.dim() {
            return Err(ProbeError::DimMismatch { ledger: ledger.dim(), state: state.dim() });
        }
        Ok(Probe { state, ledger })
    }

    #[inline]
    pub fn read(&mut self, pos: usize) -> Result<bool, ProbeError> {
        self.ledger.tracked_read(self.state, pos)
    }

    #[inline]
    pub fn write(&mut self, pos: usize, val: bool) -> Result<(), ProbeError> {
        self.ledger.tracked_write(self.state, pos, val)
    }

    /// Reads then writes the complement.
    pub fn flip(&mut self, pos: usize) -> Result<(), ProbeError> {
        let b = self.read(pos)?;
        self.write(pos, !b)
    }

    /// Uncharged look at the state, for assertions and oracles only.
    pub fn peek(&self) -> &BitState {
        self.state
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }
}

/// A contiguous window `[offset, offset + len)` of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct View {
    pub offset: usize,
    pub len: usize,
}

impl View {
    pub fn new(offset: usize, len: usize) -> Self {
        View { offset, len }
    }

    pub fn whole(dim: usize) -> Self {
        View { offset: 0, len: dim }
    }

    #[inline]
    pub fn at(&self, i: usize) -> usize {
        debug_assert!(i < self.len);
        self.offset + i
    }

    pub fn slice(&self, start: usize, len: usize) -> View {
        debug_assert!(start + len <= self.len);
        View { offset: self.offset + start, len }
    }

    /// First `len / 2` positions and the rest.
    pub fn halves(&self) -> (View, View) {
        let h = self.len / 2;
        (self.slice(0, h), self.slice(h, self.len - h))
    }

    pub fn end(&self) -> usize {
        self.offset + self.len
    }

    pub fn fits(&self, dim: usize) -> bool {
        self.len >= 1 && self.end() <= dim
    }
}

/// Reads every bit of a view (at most 64) as a little-endian integer.
pub(crate) fn read_value(p: &mut Probe<'_>, v: View) -> Result<u64, ProbeError> {
    let mut value = 0u64;
    for j in 0..v.len {
        if p.read(v.at(j))? {
            value |= 1 << j;
        }
    }
    Ok(value)
}

/// Writes only the bits where `new` differs from `old`. The caller must
/// already know every bit of the view this step.
pub(crate) fn store_value(p: &mut Probe<'_>, v: View, old: u64, new: u64) -> Result<(), ProbeError> {
    let diff = old ^ new;
    for j in 0..v.len {
        if (diff >> j) & 1 == 1 {
            p.write(v.at(j), (new >> j) & 1 == 1)?;
        }
    }
    Ok(())
}

/// Equality against the all-zeros string, scanning upward from the view's
/// first bit and stopping at the first 1.
pub(crate) fn scan_is_zero(p: &mut Probe<'_>, v: View) -> Result<bool, ProbeError> {
    for j in 0..v.len {
        if p.read(v.at(j))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Standard binary increment with carry. Returns true when the view wrapped
/// from all ones to all zeros.
pub(crate) fn binary_increment(p: &mut Probe<'_>, v: View) -> Result<bool, ProbeError> {
    for j in 0..v.len {
        if p.read(v.at(j))? {
            p.write(v.at(j), false)?;
        } else {
            p.write(v.at(j), true)?;
            return Ok(false);
        }
    }
    Ok(true)
}
