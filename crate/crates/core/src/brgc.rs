//! Binary reflected Gray code.
//!
//! The successor is decided by parity: with an even number of ones flip
//! bit 0, otherwise flip the bit just above the lowest one. The single
//! exception is `10…0`, whose successor wraps to all zeros.

use crate::counter::{Counter, CounterId};
use crate::probe::{BitState, Probe, ProbeError, View};

/// Position of a state in the cycle that starts at all zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BrgcRank(pub u64);

fn read_all(p: &mut Probe<'_>, v: View) -> Result<Vec<bool>, ProbeError> {
    (0..v.len).map(|j| p.read(v.at(j))).collect()
}

pub fn brgc_next(p: &mut Probe<'_>, v: View) -> Result<(), ProbeError> {
    let bits = read_all(p, v)?;
    let ones = bits.iter().filter(|&&b| b).count();
    let target = if ones % 2 == 0 {
        0
    } else {
        let j = bits.iter().position(|&b| b).expect("odd parity has a set bit");
        if j + 1 == v.len {
            j
        } else {
            j + 1
        }
    };
    p.write(v.at(target), !bits[target])
}

pub fn brgc_prev(p: &mut Probe<'_>, v: View) -> Result<(), ProbeError> {
    let bits = read_all(p, v)?;
    let ones = bits.iter().filter(|&&b| b).count();
    let target = if ones % 2 == 1 {
        0
    } else {
        match bits.iter().position(|&b| b) {
            None => v.len - 1,
            // An even-parity state never has its lowest one at the top bit.
            Some(j) => j + 1,
        }
    };
    p.write(v.at(target), !bits[target])
}

fn rank_of_bits(bits: impl DoubleEndedIterator<Item = bool>) -> u64 {
    let mut r = 0u64;
    let mut acc = false;
    for b in bits.rev() {
        acc ^= b;
        r = (r << 1) | acc as u64;
    }
    r
}

/// Pure rank: prefix XOR from the most significant bit down.
pub fn brgc_rank(state: &BitState) -> Result<BrgcRank, ProbeError> {
    if state.dim() > 64 {
        return Err(ProbeError::Usage(format!("rank needs dimension <= 64, got {}", state.dim())));
    }
    Ok(BrgcRank(rank_of_bits((0..state.dim()).map(|i| state.get(i)))))
}

/// Rank of a view, charging a read of every bit in it.
pub fn brgc_rank_tracked(p: &mut Probe<'_>, v: View) -> Result<BrgcRank, ProbeError> {
    if v.len > 64 {
        return Err(ProbeError::Usage(format!("rank needs dimension <= 64, got {}", v.len)));
    }
    let bits = read_all(p, v)?;
    Ok(BrgcRank(rank_of_bits(bits.into_iter())))
}

pub fn brgc_unrank(r: BrgcRank, dim: usize) -> Result<BitState, ProbeError> {
    if dim == 0 {
        return Err(ProbeError::ZeroDim);
    }
    if dim > 64 || (dim < 64 && r.0 >> dim != 0) {
        return Err(ProbeError::Usage(format!("rank {} out of range for dimension {dim}", r.0)));
    }
    Ok(BitState::from_u64(r.0 ^ (r.0 >> 1), dim))
}

/// Standalone BRGC counter.
#[derive(Debug, Clone)]
pub struct Brgc {
    dim: usize,
}

impl Brgc {
    pub fn new(dim: usize) -> Result<Self, ProbeError> {
        if dim == 0 {
            return Err(ProbeError::ZeroDim);
        }
        Ok(Brgc { dim })
    }
}

impl Counter for Brgc {
    fn id(&self) -> CounterId {
        CounterId::new("brgc", self.dim).param("dim", self.dim as u64)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn advance(&self, p: &mut Probe<'_>) -> Result<(), ProbeError> {
        brgc_next(p, View::whole(self.dim))
    }
}

/// Standard binary counter, the folklore baseline.
#[derive(Debug, Clone)]
pub struct StandardBinary {
    dim: usize,
}

impl StandardBinary {
    pub fn new(dim: usize) -> Result<Self, ProbeError> {
        if dim == 0 {
            return Err(ProbeError::ZeroDim);
        }
        Ok(StandardBinary { dim })
    }
}

/// Binary increment: clear trailing ones, set the first zero. Reads and
/// writes equal the carry chain length.
pub fn standard_binary_step(p: &mut Probe<'_>, v: View) -> Result<(), ProbeError> {
    crate::probe::binary_increment(p, v).map(|_| ())
}

impl Counter for StandardBinary {
    fn id(&self) -> CounterId {
        CounterId::new("binary", self.dim).param("dim", self.dim as u64)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn advance(&self, p: &mut Probe<'_>) -> Result<(), ProbeError> {
        standard_binary_step(p, View::whole(self.dim))
    }
}
