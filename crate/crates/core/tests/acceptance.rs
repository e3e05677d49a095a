//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use quasigray::brgc::{brgc_next, brgc_prev, brgc_rank, brgc_unrank, Brgc, BrgcRank};
use quasigray::composite::{build_layered, Composite, LayerKind};
use quasigray::export::{table1_configs, table_row, write_table_csv};
use quasigray::harness::{enumerate_cycle, enumerate_cycle_observed, successors, CycleReport, DEFAULT_CYCLE_CAP};
use quasigray::lazy::{DoubleSpin, Lazy, Spin, Wine};
use quasigray::rpgc::{rpgc_decrement, rpgc_increment, Rpgc};
use quasigray::{BitState, Counter, Exact, Probe, ProbeError, ProbeLedger, StepCost, View};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'a str, Box<dyn FnMut() -> Outcome>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cycle(c: &dyn Counter) -> CycleReport {
    enumerate_cycle(c, DEFAULT_CYCLE_CAP).expect("enumeration")
}

fn step(state: &mut BitState, f: impl FnOnce(&mut Probe<'_>) -> Result<(), ProbeError>) -> StepCost {
    let mut ledger = ProbeLedger::new(state.dim());
    ledger.open_step().unwrap();
    let mut p = Probe::new(state, &mut ledger).unwrap();
    f(&mut p).unwrap();
    ledger.close_step().unwrap()
}

/// Exact test of `x <= coef * log2(d)` for a non-negative rational `x`:
/// equivalent to `2^(p) <= d^(coef*q)` with `x = p/q`.
fn le_coef_log2(x: &Exact, coef: u32, d: u64) -> bool {
    let lhs = x.to_f64();
    let rhs = coef as f64 * (d as f64).log2();
    if (lhs - rhs).abs() > 1e-6 {
        return lhs < rhs;
    }
    let p = x.numer().to_u64().expect("small numerator");
    let q = x.denom().to_u64().expect("small denominator");
    let two_p = BigInt::one() << p;
    two_p <= num_traits::pow(BigInt::from(d), (coef as u64 * q) as usize)
}

/// Exact test of `x <= a * log2(b) + rest` for rational `x` and `rest`.
fn le_affine_log2(x: &Exact, a: u32, b: u64, rest: &Exact) -> bool {
    let shifted = Exact(&x.0 - &rest.0);
    if shifted.0 < Exact::zero().0 {
        return true;
    }
    le_coef_log2(&shifted, a, b)
}

fn log2_exact(n: usize) -> usize {
    assert!(n.is_power_of_two());
    n.trailing_zeros() as usize
}

fn c1_golden() -> Outcome {
    let start = Instant::now();
    let golden: [&[&str]; 3] =
        [&["0", "1"], &["00", "01", "11", "10"], &["000", "001", "011", "010", "110", "111", "101", "100"]];
    for (i, want) in golden.iter().enumerate() {
        let dim = i + 1;
        let counter = Brgc::new(dim).unwrap();
        let mut seq = vec![counter.initial().to_string()];
        let r = enumerate_cycle_observed(&counter, 1 << dim, |s, _| seq.push(s.to_string())).unwrap();
        ensure(r.closed && r.distinct, || format!("dim {dim} did not close"))?;
        let wrapped = seq.pop().unwrap();
        ensure(wrapped == want[0], || format!("dim {dim} wraps to {wrapped}"))?;
        ensure(seq == *want, || format!("dim {dim}: {seq:?} != {want:?}"))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:?}"))?;
    Ok(format!("dims 1-3 match, 100 -> 000 wrap, {t:.2?}"))
}

fn c2_rpgc_optimal() -> Outcome {
    for d in 1..=18 {
        let r = cycle(&Rpgc::new(d).unwrap());
        ensure(r.closed && r.distinct, || format!("d={d} not closed/distinct"))?;
        ensure(r.length == 1 << d, || format!("d={d} length {}", r.length))?;
        ensure(r.max_hamming == 1 && r.hamming_histogram.len() == 1, || {
            format!("d={d} hamming {:?}", r.hamming_histogram)
        })?;
        ensure(r.worst_writes == 1, || format!("d={d} worst writes {}", r.worst_writes))?;
    }
    Ok("d in 1..=18: length 2^d, distinct, hamming 1, writes 1".into())
}

fn c3_rpgc_reads() -> Outcome {
    let mut worst_ratio: f64 = 0.0;
    for d in 2..=18u64 {
        let r = cycle(&Rpgc::new(d as usize).unwrap());
        let avg = r.avg_reads();
        if d.is_power_of_two() {
            ensure(le_coef_log2(&avg, 4, d), || format!("d={d}: avg {avg} > 4 log d"))?;
        }
        ensure(le_coef_log2(&avg, 6, d), || format!("d={d}: avg {avg} > 6 log d"))?;
        ensure(r.worst_reads <= d as usize, || format!("d={d}: worst {}", r.worst_reads))?;
        if d % 2 == 0 {
            ensure(r.worst_reads == d as usize, || format!("d={d}: worst {} never reaches d", r.worst_reads))?;
        }
        worst_ratio = worst_ratio.max(avg.to_f64() / (d as f64).log2());
    }
    Ok(format!("max avg/log d = {worst_ratio:.4}"))
}

fn c4_inverse() -> Outcome {
    for d in 1..=12usize {
        let v = View::whole(d);
        for x in 0..1u64 << d {
            let s = BitState::from_u64(x, d);
            let mut t = s.clone();
            step(&mut t, |p| rpgc_increment(p, v));
            step(&mut t, |p| rpgc_decrement(p, v));
            ensure(t == s, || format!("d={d}: dec(inc({s})) = {t}"))?;
            step(&mut t, |p| rpgc_decrement(p, v));
            step(&mut t, |p| rpgc_increment(p, v));
            ensure(t == s, || format!("d={d}: inc(dec({s})) = {t}"))?;
        }
    }
    Ok("all states, d in 1..=12".into())
}

fn c5_composite() -> Outcome {
    let inner = cycle(&Rpgc::new(6).unwrap());
    let plan = build_layered(&[6, 3], LayerKind::Rpgc).unwrap();
    let r = cycle(&Composite::new(plan));
    ensure(r.closed && r.distinct && r.length == 1 << 9, || format!("length {}", r.length))?;
    ensure(r.worst_writes <= 2, || format!("worst writes {}", r.worst_writes))?;
    let rest = Exact(Exact::int(2).0 + inner.avg_reads().0 / Exact::int(8).0);
    let avg = r.avg_reads();
    ensure(le_affine_log2(&avg, 6, 3, &rest), || format!("avg {avg} > 6 log 3 + {rest}"))?;
    let target = inner.worst_reads + 3;
    ensure(r.reads_histogram.contains_key(&target), || format!("no step reads {target}: {:?}", r.reads_histogram))?;
    Ok(format!("length 512, avg reads {} (inner avg {}), a step reads {target}", avg.decimal(), inner.avg_reads()))
}

fn c6_layered() -> Outcome {
    let plan = build_layered(&[10, 3, 2], LayerKind::Rpgc).unwrap();
    let r = cycle(&Composite::new(plan));
    ensure(r.closed && r.distinct && r.length == 1 << 15, || format!("length {}", r.length))?;
    ensure(r.worst_writes <= 3, || format!("worst writes {}", r.worst_writes))?;
    let w = r.first_writes.get(&3).ok_or_else(|| "no step writes 3 bits".to_string())?;
    Ok(format!("length 2^15, 3-bit write at step {} ({} -> {})", w.step, w.from, w.to))
}

fn c7_lazy() -> Outcome {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for n in [2usize, 4, 8, 16] {
        let r = cycle(&Lazy::new(n).unwrap());
        let logn = log2_exact(n);
        let want = (1u64 << (n + 1)) - 2;
        if !(r.closed && r.distinct && r.length == want) {
            failures.push(format!("n={n}: length {} != {want}", r.length));
        }
        if r.worst_reads != r.worst_writes || r.worst_reads > logn + 1 {
            failures.push(format!("n={n}: worst reads {} writes {}", r.worst_reads, r.worst_writes));
        }
        let three = Exact::int(3);
        if r.avg_reads() > three {
            failures.push(format!("n={n}: avg reads {} > 3", r.avg_reads()));
        }
        if r.avg_writes() > three {
            failures.push(format!("n={n}: avg writes {} > 3", r.avg_writes()));
        }
        notes.push(format!("n={n} avg r/w {}/{}", r.avg_reads().decimal(), r.avg_writes().decimal()));
    }
    if failures.is_empty() {
        Ok(notes.join(", "))
    } else {
        Err(failures.join("; "))
    }
}

struct Lazies {
    reports: HashMap<(&'static str, usize, usize), CycleReport>,
}

impl Lazies {
    fn get(&mut self, kind: &'static str, n: usize, g: usize) -> &CycleReport {
        self.reports.entry((kind, n, g)).or_insert_with(|| match kind {
            "spin" => cycle(&Spin::new(n).unwrap()),
            "doublespin" => cycle(&DoubleSpin::new(n, g).unwrap()),
            "wine" => cycle(&Wine::new(n, g).unwrap()),
            _ => unreachable!(),
        })
    }
}

fn c8_structural(l: &mut Lazies) -> Outcome {
    for n in [2usize, 4, 8, 16] {
        let logn = log2_exact(n);
        let r = l.get("spin", n, 1);
        ensure(r.closed && r.distinct, || format!("spin n={n} not closed/distinct"))?;
        ensure(r.worst_reads <= logn + 2, || format!("spin n={n}: worst reads {}", r.worst_reads))?;
        let gs: &[usize] = if n == 4 || n == 8 { &[1, 2, 3] } else { &[1, 2] };
        for &g in gs {
            let r = l.get("doublespin", n, g);
            ensure(r.closed && r.distinct, || format!("doublespin n={n} g={g} not closed/distinct"))?;
            ensure(r.worst_reads <= g + logn + 1 && r.worst_writes <= g + logn + 1, || {
                format!("doublespin n={n} g={g}: worst {}/{}", r.worst_reads, r.worst_writes)
            })?;
            let r = l.get("wine", n, g);
            ensure(r.closed && r.distinct, || format!("wine n={n} g={g} not closed/distinct"))?;
            ensure(r.worst_writes <= 3, || format!("wine n={n} g={g}: worst writes {}", r.worst_writes))?;
            ensure(r.worst_reads <= g + logn + 1, || format!("wine n={n} g={g}: worst reads {}", r.worst_reads))?;
        }
        let spin = Spin::new(n).unwrap();
        let len = l.get("spin", n, 1).length as usize;
        let a = successors(&spin, len).unwrap();
        let b = successors(&DoubleSpin::new(n, 1).unwrap(), len).unwrap();
        ensure(a == b, || format!("doublespin g=1 diverges from spin at n={n}"))?;
    }
    Ok("spin, doublespin, wine within worst-case bounds; doublespin g=1 == spin".into())
}

/// Enumerated length minus each claimed closed form.
fn length_deltas(l: &mut Lazies) -> Vec<(String, i128)> {
    let mut out = Vec::new();
    for n in [2usize, 4, 8] {
        let nn = n as i128;
        let p = 1i128 << n;
        let len = l.get("spin", n, 1).length as i128;
        out.push((format!("spin n={n} statement"), len - (nn + 1) * (p - 1)));
        out.push((format!("spin n={n} proof"), len - ((nn + 1) * p - 2)));
        for g in 1..=3usize {
            let pg = 1i128 << g;
            let len = l.get("doublespin", n, g).length as i128;
            out.push((format!("doublespin n={n} g={g}"), len - (nn * p * pg - (nn - 1) * p - 2)));
            let len = l.get("wine", n, g).length as i128;
            out.push((format!("wine n={n} g={g}"), len - (nn * p * pg - (nn + 1) * p + nn)));
        }
    }
    out
}

fn c9_deltas(l: &mut Lazies) -> Outcome {
    let first = length_deltas(l);
    let mut fresh = Lazies { reports: HashMap::new() };
    let second = length_deltas(&mut fresh);
    ensure(first == second, || "deltas differ between runs".into())?;
    for (name, d) in &first {
        println!("    length delta {name}: {d:+}");
    }
    Ok(format!("{} deltas computed and stable across runs", first.len()))
}

fn c10_efficiency(l: &mut Lazies) -> Outcome {
    for kind in ["wine", "doublespin"] {
        for n in [4usize, 8, 16] {
            let mut prev: Option<Exact> = None;
            for g in 1..=3usize {
                let r = l.get(kind, n, g);
                let waste = Exact(Exact::int(1).0 - r.space_efficiency().0);
                let cap = Exact::pow2(2 - g as i64);
                ensure(waste <= cap, || format!("{kind} n={n} g={g}: 1 - eff = {waste} > {cap}"))?;
                if let Some(p) = &prev {
                    ensure(&waste <= p, || format!("{kind} n={n}: waste rises at g={g}"))?;
                }
                prev = Some(waste);
            }
        }
    }
    Ok("1 - efficiency non-increasing in g and <= 2^(2-g)".into())
}

fn c11_table() -> Outcome {
    let rows = table1_configs().iter().map(|c| table_row(c, DEFAULT_CYCLE_CAP)).collect::<Result<Vec<_>, _>>();
    let rows = rows.map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    write_table_csv(&mut buf, &rows).map_err(|e| e.to_string())?;
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (c_counter, c_dim, c_ar, c_aw, c_ww) =
        (col("counter"), col("dim"), col("avg_reads"), col("avg_writes"), col("worst_writes"));
    let mut seen_binary = Vec::new();
    let mut seen_brgc = Vec::new();
    for rec in reader.records() {
        let rec = rec.unwrap();
        let d: u32 = rec[c_dim].parse().unwrap();
        match &rec[c_counter] {
            "binary" => {
                // 2 - 2^(1-d) = (2^d - 1) / 2^(d-1)
                let want = Exact::new((1u64 << d) - 1, 1u64 << (d - 1)).to_string();
                ensure(rec[c_ar] == want && rec[c_aw] == want, || {
                    format!("binary d={d}: {} / {} != {want}", &rec[c_ar], &rec[c_aw])
                })?;
                seen_binary.push(d);
            }
            "brgc" => {
                ensure(rec[c_ar] == d.to_string(), || format!("brgc d={d}: avg reads {}", &rec[c_ar]))?;
                ensure(&rec[c_aw] == "1" && &rec[c_ww] == "1", || format!("brgc d={d}: writes {}", &rec[c_aw]))?;
                seen_brgc.push(d);
            }
            _ => {}
        }
    }
    let all: Vec<u32> = (2..=10).collect();
    ensure(seen_binary == all && seen_brgc == all, || format!("rows {seen_binary:?} {seen_brgc:?}"))?;
    Ok("binary avg = 2 - 2^(1-d) and brgc d/d/1 for d in 2..=10".into())
}

fn c12_walk() -> Outcome {
    let start = Instant::now();
    let d = 1024;
    let counter = Rpgc::new(d).unwrap();
    let mut state = counter.initial();
    let mut ledger = ProbeLedger::new(d);
    let mut max_reads = 0;
    for i in 0..100_000u32 {
        let before = state.clone();
        let cost = counter.step(&mut state, &mut ledger).unwrap();
        ensure(cost.writes == 1 && before.hamming(&state) == 1, || format!("step {i} wrote {}", cost.writes))?;
        ensure(cost.reads <= d, || format!("step {i} read {}", cost.reads))?;
        max_reads = max_reads.max(cost.reads);
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(30), || format!("took {t:?}"))?;
    Ok(format!("10^5 steps, max reads {max_reads}, {t:.2?}"))
}

fn c13_brgc_oracle() -> Outcome {
    for dim in 1..=16usize {
        let mask = (1u64 << dim) - 1;
        let v = View::whole(dim);
        for x in 0..1u64 << dim {
            let s = BitState::from_u64(x, dim);
            let r = brgc_rank(&s).unwrap().0;
            let mut t = s.clone();
            step(&mut t, |p| brgc_next(p, v));
            let want = brgc_unrank(BrgcRank((r + 1) & mask), dim).unwrap();
            ensure(t == want, || format!("dim {dim}: next({s}) = {t}, want {want}"))?;
            let mut t = s.clone();
            step(&mut t, |p| brgc_prev(p, v));
            let want = brgc_unrank(BrgcRank(r.wrapping_sub(1) & mask), dim).unwrap();
            ensure(t == want, || format!("dim {dim}: prev({s}) = {t}, want {want}"))?;
            // The closed form itself, independent of brgc_unrank.
            ensure(brgc_unrank(BrgcRank(x), dim).unwrap() == BitState::from_u64(x ^ (x >> 1), dim), || {
                format!("unrank({x}) disagrees with x ^ (x >> 1)")
            })?;
        }
    }
    Ok("next/prev agree with unrank(rank +- 1) for dim <= 16".into())
}

fn main() {
    let suite_start = Instant::now();
    let mut lazies = Lazies { reports: HashMap::new() };
    let mut criteria: Vec<Criterion> = vec![
        ("golden reflected Gray sequence", Box::new(c1_golden)),
        ("RPGC space-optimality d<=18", Box::new(c2_rpgc_optimal)),
        ("RPGC average and worst reads", Box::new(c3_rpgc_reads)),
        ("RPGC increment/decrement inverse", Box::new(c4_inverse)),
        ("two-layer composite", Box::new(c5_composite)),
        ("layered writes [10,3,2]", Box::new(c6_layered)),
        ("lazy increment length and costs", Box::new(c7_lazy)),
    ];
    let mut outcomes: Vec<(String, Outcome)> = criteria.iter_mut().map(|(name, f)| (name.to_string(), f())).collect();
    outcomes.push(("spin/doublespin/wine structural bounds".into(), c8_structural(&mut lazies)));
    outcomes.push(("lazy-counter length deltas".into(), c9_deltas(&mut lazies)));
    outcomes.push(("space-efficiency trend in g".into(), c10_efficiency(&mut lazies)));
    outcomes.push(("summary table rows".into(), c11_table()));
    outcomes.push(("RPGC d=1024 bounded walk".into(), c12_walk()));
    outcomes.push(("reflected Gray next/prev oracle".into(), c13_brgc_oracle()));

    let mut failed = 0;
    for (i, (name, outcome)) in outcomes.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1?}", outcomes.len() - failed, outcomes.len(), suite_start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
