//! The RPGC sequence rebuilt from index arithmetic on sub-sequences, with no
//! bit probing, compared state for state against the counter.

use quasigray::harness::enumerate_cycle_observed;
use quasigray::rpgc::Rpgc;

/// Little-endian state values of the code of length `len`, in cycle order
/// starting from zero.
fn oracle(len: usize) -> Vec<u64> {
    if len == 1 {
        return vec![0, 1];
    }
    if len.is_multiple_of(2) {
        let half = len / 2;
        let sub = oracle(half);
        let m = sub.len();
        let (mut ia, mut ib) = (0usize, 0usize);
        let mut out = Vec::with_capacity(m * m);
        for _ in 0..m * m {
            out.push(sub[ia] | (sub[ib] << half));
            if ia == ib {
                ib = (ib + m - 1) % m;
            } else {
                ia = (ia + 1) % m;
            }
        }
        out
    } else {
        let sub = oracle(len - 1);
        let forward = sub.iter().map(|w| w << 1);
        let back = sub.iter().rev().map(|w| 1 | (w << 1));
        forward.chain(back).collect()
    }
}

#[test]
fn counter_matches_index_oracle() {
    for d in 1..=18 {
        let expected = oracle(d);
        assert_eq!(expected.len(), 1 << d);
        let mut got = vec![0u64];
        let report = enumerate_cycle_observed(&Rpgc::new(d).unwrap(), 1 << 20, |s, _| {
            got.push(s.to_u64().unwrap());
        })
        .unwrap();
        assert!(report.closed && report.distinct, "d={d}");
        got.pop();
        assert_eq!(got, expected, "d={d}");
    }
}

#[test]
fn oracle_extremes() {
    // The cycle runs from zero to the state with only bit 0 set.
    for d in 1..=12 {
        let seq = oracle(d);
        assert_eq!(seq[0], 0);
        assert_eq!(*seq.last().unwrap(), 1, "d={d}");
    }
}
