//! Cross-validation of the solvers against the brute-force oracles, and
//! shrinking of failing arenas.

use qg_core::accel::{solve_mcr_accelerated, solve_tp_accelerated, NoClamp, SimplePathOracle, ValueOracle};
use qg_core::mcr::{classify_minus_infinity, solve_mcr, McrOptions};
use qg_core::oracle::{mcr_oracle, tp_oracle};
use qg_core::tp::{classify_tp_infinities, solve_tp, TpClass, TpOptions};
use qg_core::{normalize_target, Arena, ArenaBuilder, Error, ExtValue, Objective, ValueVector};

/// `Ok(None)` when every solver agrees with the oracle, `Ok(Some(report))`
/// on the first disagreement.
pub fn check_arena(arena: &Arena) -> Result<Option<String>, Error> {
    let oracles: [(&str, &dyn ValueOracle); 2] = [("scc", &NoClamp), ("scc+paths", &SimplePathOracle::default())];
    let differ = |what: &str, got: &ValueVector, want: &ValueVector| {
        (got != want).then(|| format!("{what}: got {}, expected {}", show(arena, got), show(arena, want)))
    };
    match arena.objective() {
        Objective::Mcr => {
            let plain = solve_mcr(arena, McrOptions::default())?.values;
            if let Some(m) = differ("value iteration vs oracle", &plain, &mcr_oracle(arena)?) {
                return Ok(Some(m));
            }
            for (name, oracle) in oracles {
                let accel = solve_mcr_accelerated(arena, oracle)?.values;
                if let Some(m) = differ(&format!("accelerated ({name}) vs plain"), &accel, &plain) {
                    return Ok(Some(m));
                }
            }
            let neg = classify_minus_infinity(arena)?;
            for v in arena.vertices() {
                if (plain[v] == ExtValue::NegInf) != neg.contains(&v) {
                    return Ok(Some(format!("mean-payoff sign disagrees with -inf at {}", arena.name(v))));
                }
            }
        }
        Objective::Tp => {
            let plain = solve_tp(arena, TpOptions::default())?.values;
            if let Some(m) = differ("value iteration vs oracle", &plain, &tp_oracle(arena)?) {
                return Ok(Some(m));
            }
            for (name, oracle) in oracles {
                let accel = solve_tp_accelerated(arena, oracle)?.values;
                if let Some(m) = differ(&format!("accelerated ({name}) vs plain"), &accel, &plain) {
                    return Ok(Some(m));
                }
            }
            let classes = classify_tp_infinities(arena)?;
            for v in arena.vertices() {
                if classes[v.index()] != TpClass::of(plain[v]) {
                    return Ok(Some(format!("mean-payoff sign disagrees with the value at {}", arena.name(v))));
                }
            }
        }
    }
    Ok(None)
}

fn show(arena: &Arena, values: &ValueVector) -> String {
    let parts: Vec<String> = arena.vertices().map(|v| format!("{}={}", arena.name(v), values[v])).collect();
    format!("({})", parts.join(", "))
}

/// Greedily removes vertices and edges and pulls weights towards zero while
/// `fails` keeps holding. The result fails and is no larger than the input.
pub fn minimize(arena: &Arena, fails: impl Fn(&Arena) -> bool) -> Arena {
    let mut best = arena.clone();
    loop {
        let next = candidates(&best).into_iter().find(|c| fails(c));
        match next {
            Some(c) => best = c,
            None => return best,
        }
    }
}

fn candidates(a: &Arena) -> Vec<Arena> {
    let mut out = Vec::new();
    for drop in a.vertices() {
        let mut b = ArenaBuilder::new();
        let mut map = vec![None; a.len()];
        for v in a.vertices().filter(|&v| v != drop) {
            let id = b.add_vertex(a.name(v), a.owner(v));
            b.set_target(id, a.is_target(v));
            map[v.index()] = Some(id);
        }
        for e in a.edges() {
            if let (Some(s), Some(d)) = (map[e.src.index()], map[e.dst.index()]) {
                b.add_edge(s, d, e.weight);
            }
        }
        out.extend(finish(b, a.objective()));
    }
    for (i, e) in a.edges().iter().enumerate() {
        if a.successors(e.src).len() > 1 {
            let mut b = a.to_builder();
            let mut k = 0;
            b.retain_edges(|_| {
                k += 1;
                k - 1 != i
            });
            out.extend(finish(b, a.objective()));
        }
        if e.weight != 0 {
            let mut b = a.to_builder();
            b.retain_edges(|f| f != e);
            b.add_edge(e.src, e.dst, e.weight / 2);
            out.extend(finish(b, a.objective()));
        }
    }
    out
}

fn finish(b: ArenaBuilder, objective: Objective) -> Option<Arena> {
    let a = b.build(objective).ok()?;
    match objective {
        Objective::Mcr => normalize_target(&a).ok(),
        Objective::Tp => Some(a),
    }
}
