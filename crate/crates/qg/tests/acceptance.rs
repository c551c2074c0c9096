//! Acceptance suite. Prints one `criterion N: PASS|FAIL` line per criterion
//! and exits non-zero when any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use qg_core::accel::{solve_mcr_accelerated, solve_tp_accelerated, NoClamp, SimplePathOracle, ValueOracle};
use qg_core::corpus::{exhaustive, random_arena, RandomSpec};
use qg_core::families::{generate, FamilySpec};
use qg_core::mcr::{classify_minus_infinity, mp_sign, solve_mcr, McrOptions, Sign};
use qg_core::oracle::{enumerate_memoryless, mcr_oracle, mp_oracle, tp_oracle};
use qg_core::strategies::{best_response, extract_max_memoryless, extract_min_mcr, make_switching, play_out};
use qg_core::tp::{build_unfolding, k_bound, solve_tp, TpOptions};
use qg_core::{Arena, ExtValue, Objective, ValueVector};

use ExtValue::{Finite as F, NegInf, PosInf};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

/// `(W, n, plain (k_e, k_i), accelerated (k_e, k_i))`.
type Cell = (i64, usize, (u64, u64), (u64, u64));

fn corpus(objective: Objective) -> impl Iterator<Item = Arena> {
    exhaustive(3, 2, objective).expect("corpus parameters are valid")
}

fn random(objective: Objective, max_vertices: usize, seed: u64, count: u64) -> impl Iterator<Item = Arena> {
    let spec = RandomSpec { objective, max_vertices, max_weight: 3, max_out_degree: 3 };
    (0..count).map(move |i| random_arena(seed, i, spec).expect("random parameters are valid"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fmt_values(xs: &[ExtValue]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn fig2a() -> Verdict {
    let w = 50;
    let a = generate(&FamilySpec::Fig2a { w }).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let sol = solve_mcr(&a, McrOptions { record_trace: true }).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let want = [F(-50), F(-50), F(0)];
    ensure(sol.values.as_slice() == want, || format!("values {}", fmt_values(sol.values.as_slice())))?;
    let trace = sol.trace.as_ref().ok_or("no trace recorded")?;
    let prefix: Vec<(ExtValue, ExtValue)> = trace.iter().take(5).map(|x| (x.as_slice()[0], x.as_slice()[1])).collect();
    let want = [(PosInf, PosInf), (PosInf, F(0)), (F(-1), F(0)), (F(-1), F(-1)), (F(-2), F(-1))];
    ensure(prefix == want, || format!("trace prefix {prefix:?}"))?;
    let expected = 2 * w as u64 + 2;
    ensure(sol.stats.sweeps.abs_diff(expected) <= 2, || {
        format!("{} sweeps, expected {expected} +-2", sol.stats.sweeps)
    })?;
    ensure(elapsed < Duration::from_millis(100), || format!("took {elapsed:?}"))?;
    Ok(format!("values (-50,-50,0), {} sweeps, {elapsed:.2?}", sol.stats.sweeps))
}

fn lsp() -> Verdict {
    let a = generate(&FamilySpec::LspFig5).map_err(|e| e.to_string())?;
    let sol = solve_mcr(&a, McrOptions::default()).map_err(|e| e.to_string())?;
    let got = &sol.values.as_slice()[..4];
    ensure(got == [F(2), F(3), F(1), PosInf], || format!("values {}", fmt_values(got)))?;
    Ok(format!("values {}", fmt_values(got)))
}

fn fig1a() -> Verdict {
    let a = generate(&FamilySpec::Fig1a).map_err(|e| e.to_string())?;
    let sol = solve_tp(&a, TpOptions::default()).map_err(|e| e.to_string())?;
    let want = [F(2), F(0), F(1), F(-1), F(0)];
    ensure(sol.values.as_slice() == want, || format!("values {}", fmt_values(sol.values.as_slice())))?;
    Ok(format!("values {}", fmt_values(sol.values.as_slice())))
}

const CELLS: [Cell; 4] = [
    (50, 100, (151, 12603), (402, 1404)),
    (50, 500, (551, 53003), (2002, 7004)),
    (200, 100, (301, 80103), (402, 1404)),
    (200, 500, (701, 240503), (2002, 7004)),
];

fn layered_pattern(values: &ValueVector, n: usize, w: i64) -> bool {
    (0..n).all(|k| values.as_slice()[3 * k..3 * k + 3] == [F(0), F(0), F(w)])
}

fn within_percent(got: u64, want: u64, pct: u64) -> bool {
    got.abs_diff(want) * 100 <= want * pct
}

fn layered_table() -> Verdict {
    let mut problems = Vec::new();
    let mut rows = Vec::new();
    for (w, n, (ke, ki), (ake, aki)) in CELLS {
        let a = generate(&FamilySpec::Layered { n, w }).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let plain = solve_tp(&a, TpOptions::default()).map_err(|e| e.to_string())?;
        let plain_time = start.elapsed();
        let start = Instant::now();
        let accel = solve_tp_accelerated(&a, &SimplePathOracle::default()).map_err(|e| e.to_string())?;
        let accel_time = start.elapsed();
        let s = plain.stats;
        let t = accel.stats;
        let cell = format!("(W={w},n={n})");
        if !layered_pattern(&plain.values, n, w) {
            problems.push(format!("{cell} value pattern"));
        }
        if s.outer_iterations.abs_diff(ke) > 2 || s.inner_iterations.abs_diff(ki) > s.outer_iterations + 2 {
            problems.push(format!("{cell} plain ({}, {}) vs ({ke}, {ki})", s.outer_iterations, s.inner_iterations));
        }
        if !within_percent(t.outer_iterations, ake, 5) || !within_percent(t.inner_iterations, aki, 5) {
            problems.push(format!(
                "{cell} accelerated ({}, {}) vs ({ake}, {aki}) +-5%",
                t.outer_iterations, t.inner_iterations
            ));
        }
        if accel.values != plain.values {
            problems.push(format!("{cell} accelerated values differ"));
        }
        if plain_time > Duration::from_secs(60) || accel_time > Duration::from_secs(2) {
            problems.push(format!("{cell} wall time {plain_time:.2?} / {accel_time:.2?}"));
        }
        rows.push(format!(
            "{cell} plain ({}, {}) {plain_time:.1?}, accel ({}, {}) {accel_time:.1?}",
            s.outer_iterations, s.inner_iterations, t.outer_iterations, t.inner_iterations
        ));
    }
    if problems.is_empty() {
        Ok(rows.join("; "))
    } else {
        Err(format!("{}; measured {}", problems.join("; "), rows.join("; ")))
    }
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut checked = 0u64;
    let mcr = corpus(Objective::Mcr).chain(random(Objective::Mcr, 6, 5, 500));
    for a in mcr {
        let got = solve_mcr(&a, McrOptions::default()).map_err(|e| e.to_string())?.values;
        ensure(got == mcr_oracle(&a).map_err(|e| e.to_string())?, || format!("mcr mismatch on {a:?}"))?;
        checked += 1;
    }
    let tp = corpus(Objective::Tp).chain(random(Objective::Tp, 5, 7, 500));
    for a in tp {
        let got = solve_tp(&a, TpOptions::default()).map_err(|e| e.to_string())?.values;
        ensure(got == tp_oracle(&a).map_err(|e| e.to_string())?, || format!("tp mismatch on {a:?}"))?;
        checked += 1;
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} arenas, zero mismatches, {elapsed:.1?}"))
}

fn reduction() -> Verdict {
    let mut checked = 0;
    for a in random(Objective::Tp, 4, 13, 100) {
        let values = solve_tp(&a, TpOptions::default()).map_err(|e| e.to_string())?.values;
        let (unfolded, top) = build_unfolding(&a, k_bound(&a) as usize).map_err(|e| e.to_string())?;
        let mcr = solve_mcr(&unfolded, McrOptions::default()).map_err(|e| e.to_string())?.values;
        let threshold = F((a.len() as i64 - 1) * a.max_abs_weight() + 1);
        for v in a.vertices() {
            let u = mcr[top[v.index()]];
            let ok = match values[v] {
                F(_) => u == values[v],
                _ => (u >= threshold) == (values[v] == PosInf),
            };
            ensure(ok, || format!("vertex {v}: unfolding {u}, total payoff {} on {a:?}", values[v]))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} arenas, zero mismatches"))
}

fn strategy_suite() -> Verdict {
    let mut checked = 0;
    for a in corpus(Objective::Mcr) {
        let sol = solve_mcr(&a, McrOptions { record_trace: true }).map_err(|e| e.to_string())?;
        if sol.values.iter().any(|&x| x == NegInf) {
            continue;
        }
        let err = |what: &str| format!("{what} on {a:?}");
        let max = extract_max_memoryless(&a, &sol.values).map_err(|e| e.to_string())?;
        let mins = extract_min_mcr(&a, &sol).map_err(|e| e.to_string())?;
        let switching = make_switching(&a, mins.sigma1, mins.sigma2.clone(), sol.values.clone(), None)
            .map_err(|e| e.to_string())?;
        ensure(best_response(&a, &max).map_err(|e| e.to_string())? == sol.values, || err("max strategy"))?;
        ensure(best_response(&a, &switching).map_err(|e| e.to_string())? == sol.values, || err("switching strategy"))?;
        let finite: Vec<_> = a.vertices().filter(|&v| sol.values[v] != PosInf).collect();
        for &v in &finite {
            let out = play_out(&a, &max, &switching, v, 10_000).map_err(|e| e.to_string())?;
            let mut seen = BTreeSet::new();
            ensure(out.payoff == sol.values[v], || err("optimal profile payoff"))?;
            ensure(out.lasso.prefix.iter().all(|&u| seen.insert(u)), || err("optimal profile loops"))?;
        }
        for other in enumerate_memoryless(&a, qg_core::Player::Max).map_err(|e| e.to_string())? {
            for &v in &finite {
                let out = play_out(&a, &other, &mins.sigma2, v, 10_000).map_err(|e| e.to_string())?;
                ensure(out.lasso.prefix.len() < a.len(), || err("attractor strategy is slow"))?;
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} arenas without -inf vertices"))
}

fn accelerated_agree(a: &Arena, plain: &ValueVector) -> Result<(), String> {
    let oracles: [(&str, &dyn ValueOracle); 2] = [("scc", &NoClamp), ("scc+paths", &SimplePathOracle::default())];
    for (name, oracle) in oracles {
        let got = match a.objective() {
            Objective::Mcr => solve_mcr_accelerated(a, oracle),
            Objective::Tp => solve_tp_accelerated(a, oracle),
        }
        .map_err(|e| format!("{name}: {e} on {a:?}"))?;
        ensure(&got.values == plain, || format!("{name} differs on {a:?}"))?;
    }
    Ok(())
}

fn heuristic_soundness() -> Verdict {
    let mut checked = 0u64;
    for a in corpus(Objective::Mcr) {
        accelerated_agree(&a, &solve_mcr(&a, McrOptions::default()).map_err(|e| e.to_string())?.values)?;
        checked += 1;
    }
    for a in corpus(Objective::Tp) {
        accelerated_agree(&a, &solve_tp(&a, TpOptions::default()).map_err(|e| e.to_string())?.values)?;
        checked += 1;
    }
    let mut layered: Vec<(i64, usize)> = CELLS.iter().map(|c| (c.0, c.1)).collect();
    for w in [1, 2, 5, 50] {
        for n in 1..=5 {
            layered.push((w, n));
        }
    }
    for &(w, n) in &layered {
        let a = generate(&FamilySpec::Layered { n, w }).map_err(|e| e.to_string())?;
        accelerated_agree(&a, &solve_tp(&a, TpOptions::default()).map_err(|e| e.to_string())?.values)?;
        checked += 1;
    }
    for spec in [FamilySpec::Fig2a { w: 50 }, FamilySpec::LspFig5] {
        let a = generate(&spec).map_err(|e| e.to_string())?;
        accelerated_agree(&a, &solve_mcr(&a, McrOptions::default()).map_err(|e| e.to_string())?.values)?;
        checked += 1;
    }
    for spec in [FamilySpec::Fig1a, FamilySpec::Fig2b { w: 50 }] {
        let a = generate(&spec).map_err(|e| e.to_string())?;
        accelerated_agree(&a, &solve_tp(&a, TpOptions::default()).map_err(|e| e.to_string())?.values)?;
        checked += 1;
    }
    Ok(format!("{checked} arenas, both oracles, zero mismatches"))
}

fn trichotomy() -> Verdict {
    let mut checked = 0u64;
    for a in corpus(Objective::Tp) {
        let values = solve_tp(&a, TpOptions::default()).map_err(|e| e.to_string())?.values;
        let mp = mp_oracle(&a).map_err(|e| e.to_string())?;
        let signs = mp_sign(&a).map_err(|e| e.to_string())?;
        for v in a.vertices() {
            let want = match mp[v.index()].signum() {
                1 => (values[v] == PosInf, Sign::Positive),
                -1 => (values[v] == NegInf, Sign::Negative),
                _ => (values[v].is_finite(), Sign::Zero),
            };
            ensure(want.0 && signs[v.index()] == want.1, || format!("tp class at {v} on {a:?}"))?;
        }
        checked += 1;
    }
    for a in corpus(Objective::Mcr) {
        let values = solve_mcr(&a, McrOptions::default()).map_err(|e| e.to_string())?.values;
        let neg: Vec<_> = a.vertices().filter(|&v| values[v] == NegInf).collect();
        ensure(neg == classify_minus_infinity(&a).map_err(|e| e.to_string())?, || format!("mcr -inf set on {a:?}"))?;
        checked += 1;
    }
    Ok(format!("{checked} arenas"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("fig2a value iteration", fig2a),
        ("lsp instance values", lsp),
        ("fig1a total payoff", fig1a),
        ("layered iteration counts", layered_table),
        ("oracle equivalence", oracle_equivalence),
        ("unfolding reduction", reduction),
        ("strategy suite", strategy_suite),
        ("accelerated soundness", heuristic_soundness),
        ("infinity trichotomy", trichotomy),
    ];
    let verdicts: Vec<Verdict> = thread::scope(|s| {
        let handles: Vec<_> = criteria.iter().map(|&(_, f)| s.spawn(f)).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err("panicked".into()))).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), verdict)) in criteria.iter().zip(&verdicts).enumerate() {
        match verdict {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
