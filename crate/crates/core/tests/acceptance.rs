//! Acceptance gate: one pass/fail line per criterion, nonzero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use arrowkh::homology::smith_normal_form;
use arrowkh::linalg::BigMatrix;
use arrowkh::verify::{run, Options, Report, Suite};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn suite(s: Suite) -> Report {
    run(s, Options { reduced: true }).unwrap_or_else(|e| panic!("suite {s} could not start: {e}"))
}

fn summarize(r: &Report) -> String {
    let (pass, fail) = r.count();
    let mut out = format!("{pass} checks passed, {fail} failed");
    for c in r.failures().take(4) {
        out += &format!("\n      {c}");
    }
    if fail > 4 {
        out += &format!("\n      ... {} more", fail - 4);
    }
    out
}

fn snf_check(rng: &mut StdRng) -> Result<(), String> {
    let rows = rng.gen_range(1..=8);
    let cols = rng.gen_range(1..=8);
    let mut m = BigMatrix::zeros(rows, cols);
    let sparse = rng.gen_bool(0.3);
    for r in 0..rows {
        for c in 0..cols {
            if !sparse || rng.gen_bool(0.3) {
                m[(r, c)] = BigInt::from(rng.gen_range(-1000i64..=1000));
            }
        }
    }
    let snf = smith_normal_form(&m);
    if &(&snf.u * &m) * &snf.v != snf.d {
        return Err(format!("U·M·V ≠ D for {rows}x{cols}"));
    }
    if !snf.d.is_diagonal() {
        return Err("D is not diagonal".into());
    }
    for t in [&snf.u, &snf.v] {
        if t.determinant().abs() != BigInt::from(1) {
            return Err("transform is not unimodular".into());
        }
    }
    let diag = snf.d.diagonal();
    for w in diag.windows(2) {
        if w[0].is_negative() || (!w[0].is_zero() && !w[1].is_multiple_of(&w[0])) || (w[0].is_zero() && !w[1].is_zero()) {
            return Err(format!("divisibility chain broken: {diag:?}"));
        }
    }
    if diag.last().is_some_and(|x| x.is_negative()) {
        return Err("negative invariant factor".into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, bool, String)> = Vec::new();

    let start = Instant::now();
    let r = suite(Suite::D2);
    let secs = start.elapsed().as_secs_f64();
    results.push((1, "d^2 = 0 on corpus at four presets, unreduced and reduced", r.passed() && secs < 60.0, format!("{}, {secs:.1}s", summarize(&r))));

    let r = suite(Suite::Euler);
    results.push((2, "Euler characteristic equals Jones, reduced times (q + q^-1) equals unreduced", r.passed(), summarize(&r)));

    let r = suite(Suite::CommutingSquare);
    results.push((3, "commuting square on every edge and basis element", r.passed(), summarize(&r)));

    let r = suite(Suite::RmInvariance);
    results.push((4, "Reidemeister classes give identical tables, even and odd, unreduced and reduced", r.passed(), summarize(&r)));

    let r = suite(Suite::GraphSpan);
    results.push((5, "span of admissible subgraphs equals operator lattice; cycle relations", r.passed(), summarize(&r)));

    let r = suite(Suite::ArrowFlip);
    results.push((6, "normal and flipped arrows give identical tables", r.passed(), summarize(&r)));

    let mut rng = StdRng::seed_from_u64(0x5eed);
    let errors: Vec<String> = (0..1000).filter_map(|_| snf_check(&mut rng).err()).collect();
    results.push((7, "Smith normal form on 1000 random matrices", errors.is_empty(), format!("{} failures{}", errors.len(), errors.first().map(|e| format!(": {e}")).unwrap_or_default())));

    let r = suite(Suite::Unknot);
    results.push((8, "unknot: unreduced Z at (0,-1),(0,1); reduced Z at (0,0)", r.passed(), summarize(&r)));

    let mut ok = true;
    for (n, what, passed, detail) in &results {
        ok &= passed;
        println!("[{}] criterion {n}: {what}: {detail}", if *passed { "PASS" } else { "FAIL" });
    }
    if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
