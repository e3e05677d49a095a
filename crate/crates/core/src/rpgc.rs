//! Recursive partition Gray code.
//!
//! An even-length string is split into halves `A` (low indices) and `B`.
//! Incrementing advances `A` unless `A = B`, in which case `B` steps
//! backwards. Odd lengths use bit 0 as a direction bit over the remaining
//! even-length string `W`: walk `W` forward to its last state `10…0`, flip
//! the direction bit, walk `W` back to `0…0`, flip it again.
//!
//! The comparison routines read bits in a fixed order. The average-read
//! figures depend on it together with the ledger's known-set rule, so the
//! order here is part of the contract.

use crate::counter::{Counter, CounterId};
use crate::probe::{Probe, ProbeError, View};

fn same_len(a: View, b: View) -> Result<(), ProbeError> {
    if a.len != b.len || a.len == 0 {
        return Err(ProbeError::Usage(format!("views must have equal non-zero length, got {} and {}", a.len, b.len)));
    }
    Ok(())
}

/// `A = B`, reading `(A[0], B[0]), (A[1], B[1]), …` up to the first
/// differing pair.
pub fn compare_equal(p: &mut Probe<'_>, a: View, b: View) -> Result<bool, ProbeError> {
    same_len(a, b)?;
    for j in 0..a.len {
        if p.read(a.at(j))? != p.read(b.at(j))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `A` is the successor of `B` in the code of their common length.
pub fn compare_inc(p: &mut Probe<'_>, a: View, b: View) -> Result<bool, ProbeError> {
    same_len(a, b)?;
    if a.len == 1 {
        return Ok(p.read(a.at(0))? != p.read(b.at(0))?);
    }
    if a.len.is_multiple_of(2) {
        let (a1, a2) = a.halves();
        let (b1, b2) = b.halves();
        return if compare_equal(p, b1, b2)? {
            // succ(B) = (B1, pred(B2))
            Ok(compare_equal(p, a1, b1)? && compare_inc(p, b2, a2)?)
        } else {
            // succ(B) = (succ(B1), B2)
            Ok(compare_equal(p, a2, b2)? && compare_inc(p, a1, b1)?)
        };
    }
    // Odd length: direction bit at 0.
    let (aw, bw) = (a.slice(1, a.len - 1), b.slice(1, b.len - 1));
    if !p.read(b.at(0))? {
        if w_is_last(p, bw)? {
            Ok(p.read(a.at(0))? && compare_equal(p, aw, bw)?)
        } else {
            Ok(!p.read(a.at(0))? && compare_inc(p, aw, bw)?)
        }
    } else if w_is_first(p, bw)? {
        Ok(!p.read(a.at(0))? && w_is_first(p, aw)?)
    } else {
        Ok(p.read(a.at(0))? && compare_inc(p, bw, aw)?)
    }
}

/// `W = 10…0` (the last state of its cycle), reading `a0, b0, a1, b1, …`
/// alternately across the halves of `W`.
fn w_is_last(p: &mut Probe<'_>, w: View) -> Result<bool, ProbeError> {
    let (a, b) = w.halves();
    for pos in interleave(a, b) {
        let expect = pos == w.offset;
        if p.read(pos)? != expect {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `W = 0…0`. `W`'s halves are `A, B`; the scan reads `B`'s two halves
/// alternately, then the second half of `A`, then the first half of `A`,
/// so it visits bits in the order the following `compare_inc(A, B)` does.
fn w_is_first(p: &mut Probe<'_>, w: View) -> Result<bool, ProbeError> {
    let (a, b) = w.halves();
    let (b1, b2) = b.halves();
    let (a1, a2) = a.halves();
    let order = interleave(b1, b2).chain(range(a2)).chain(range(a1));
    for pos in order {
        if p.read(pos)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn range(v: View) -> std::ops::Range<usize> {
    v.offset..v.end()
}

/// `x0, y0, x1, y1, …`, then the tail of the longer view.
fn interleave(x: View, y: View) -> impl Iterator<Item = usize> {
    let n = x.len.max(y.len);
    (0..n).flat_map(move |j| {
        let first = (j < x.len).then(|| x.at(j));
        let second = (j < y.len).then(|| y.at(j));
        first.into_iter().chain(second)
    })
}

fn check_pow2(v: View) -> Result<(), ProbeError> {
    if !v.len.is_power_of_two() {
        return Err(ProbeError::Usage(format!("length {} is not a power of two", v.len)));
    }
    Ok(())
}

/// Increment for power-of-two lengths.
pub fn rpgc_increment_pow2(p: &mut Probe<'_>, v: View) -> Result<(), ProbeError> {
    check_pow2(v)?;
    if v.len == 1 {
        return p.flip(v.at(0));
    }
    let (a, b) = v.halves();
    if compare_equal(p, a, b)? {
        rpgc_decrement_pow2(p, b)
    } else {
        rpgc_increment_pow2(p, a)
    }
}

/// Decrement for power-of-two lengths.
pub fn rpgc_decrement_pow2(p: &mut Probe<'_>, v: View) -> Result<(), ProbeError> {
    check_pow2(v)?;
    if v.len == 1 {
        return p.flip(v.at(0));
    }
    let (a, b) = v.halves();
    if compare_inc(p, a, b)? {
        rpgc_increment_pow2(p, b)
    } else {
        rpgc_decrement_pow2(p, a)
    }
}

pub fn rpgc_increment(p: &mut Probe<'_>, v: View) -> Result<(), ProbeError> {
    if v.len == 0 {
        return Err(ProbeError::ZeroDim);
    }
    if v.len.is_power_of_two() {
        return rpgc_increment_pow2(p, v);
    }
    if v.len % 2 == 1 {
        let w = v.slice(1, v.len - 1);
        if !p.read(v.at(0))? {
            if w_is_last(p, w)? {
                p.write(v.at(0), true)
            } else {
                rpgc_increment(p, w)
            }
        } else if w_is_first(p, w)? {
            p.write(v.at(0), false)
        } else {
            rpgc_decrement(p, w)
        }
    } else {
        let (a, b) = v.halves();
        if compare_equal(p, a, b)? {
            rpgc_decrement(p, b)
        } else {
            rpgc_increment(p, a)
        }
    }
}

pub fn rpgc_decrement(p: &mut Probe<'_>, v: View) -> Result<(), ProbeError> {
    if v.len == 0 {
        return Err(ProbeError::ZeroDim);
    }
    if v.len.is_power_of_two() {
        return rpgc_decrement_pow2(p, v);
    }
    if v.len % 2 == 1 {
        let w = v.slice(1, v.len - 1);
        if !p.read(v.at(0))? {
            if w_is_first(p, w)? {
                p.write(v.at(0), true)
            } else {
                rpgc_decrement(p, w)
            }
        } else if w_is_last(p, w)? {
            p.write(v.at(0), false)
        } else {
            rpgc_increment(p, w)
        }
    } else {
        let (a, b) = v.halves();
        if compare_inc(p, a, b)? {
            rpgc_increment(p, b)
        } else {
            rpgc_decrement(p, a)
        }
    }
}

/// Standalone RPGC counter.
#[derive(Debug, Clone)]
pub struct Rpgc {
    dim: usize,
}

impl Rpgc {
    pub fn new(dim: usize) -> Result<Self, ProbeError> {
        if dim == 0 {
            return Err(ProbeError::ZeroDim);
        }
        Ok(Rpgc { dim })
    }
}

impl Counter for Rpgc {
    fn id(&self) -> CounterId {
        CounterId::new("rpgc", self.dim).param("dim", self.dim as u64)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn advance(&self, p: &mut Probe<'_>) -> Result<(), ProbeError> {
        rpgc_increment(p, View::whole(self.dim))
    }
}
