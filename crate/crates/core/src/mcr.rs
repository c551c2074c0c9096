//! Value iteration for min-cost reachability games, mean-payoff sign
//! classification, and the mean-payoff to MCR reduction.
//!
//! Iteration starts from `+∞` everywhere except the target and applies the
//! one-step operator with Jacobi updates. A vertex whose value drops below
//! `−(|V|−1)·W` can only be finite if Min is able to pump a negative cycle
//! forever, so it is set to `−∞` in the same sweep.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::arena::{Arena, ArenaBuilder, Objective, Player, VertexId};
use crate::error::Error;
use crate::value::{ExtValue, ValueVector};

/// Loop-body execution counts. Every execution counts, including the final
/// pass that observes no change.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub outer_iterations: u64,
    pub inner_iterations: u64,
    pub sweeps: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct McrOptions {
    /// Keep every iterate `x_0, x_1, …`; needed for Min strategy extraction.
    pub record_trace: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McrSolution {
    pub values: ValueVector,
    pub stats: SolveStats,
    /// `x_0 … x_sweeps` when requested; the last two entries are equal.
    pub trace: Option<Vec<ValueVector>>,
}

/// Optimal one-step value `opt_{v'} ω(v,v') + value(v')` and the first
/// successor attaining it.
#[inline]
pub(crate) fn best_step(
    arena: &Arena,
    v: VertexId,
    value: impl Fn(VertexId) -> ExtValue,
) -> Result<(ExtValue, VertexId), Error> {
    let succ = arena.successors(v);
    let maximize = arena.owner(v) == Player::Max;
    let mut best = value(succ[0].dst).add_weight(succ[0].weight)?;
    let mut arg = succ[0].dst;
    for e in &succ[1..] {
        let c = value(e.dst).add_weight(e.weight)?;
        if (maximize && c > best) || (!maximize && c < best) {
            best = c;
            arg = e.dst;
        }
    }
    Ok((best, arg))
}

/// `−(|V|−1)·W`: finite values never go below this bound.
pub(crate) fn neg_cutoff(arena: &Arena) -> i64 {
    -((arena.len() as i64 - 1) * arena.max_abs_weight())
}

#[inline]
pub(crate) fn apply_cutoff(x: ExtValue, cutoff: i64) -> ExtValue {
    match x {
        ExtValue::Finite(c) if c < cutoff => ExtValue::NegInf,
        other => other,
    }
}

/// `(2|V|−1)·W·|V| + 2|V|`, the sweep bound for a graph with `n` vertices.
/// Upper bound `(2|V|−1)·W·|V| + 2|V|` on the sweeps of [`solve_mcr`].
pub fn sweep_bound_for(arena: &Arena) -> u64 {
    sweep_bound(arena.len(), arena.max_abs_weight())
}

pub(crate) fn sweep_bound(n: usize, w: i64) -> u64 {
    let n = n as u128;
    let b = (2 * n).saturating_sub(1) * (w as u128) * n + 2 * n;
    u64::try_from(b).unwrap_or(u64::MAX)
}

pub(crate) fn require_normalized(arena: &Arena) -> Result<VertexId, Error> {
    if arena.objective() != Objective::Mcr {
        return Err(Error::WrongObjective { expected: Objective::Mcr });
    }
    arena.canonical_target().ok_or(Error::NotNormalized)
}

pub fn solve_mcr(arena: &Arena, opts: McrOptions) -> Result<McrSolution, Error> {
    let t = require_normalized(arena)?;
    let n = arena.len();
    let cutoff = neg_cutoff(arena);
    let limit = sweep_bound(n, arena.max_abs_weight());
    let mut x = ValueVector::filled(n, ExtValue::PosInf);
    x[t] = ExtValue::ZERO;
    let mut next = x.clone();
    let mut trace = opts.record_trace.then(|| alloc::vec![x.clone()]);
    let mut sweeps = 0u64;
    loop {
        sweeps += 1;
        if sweeps > limit {
            return Err(Error::IterationBound { limit });
        }
        let mut changed = false;
        for v in arena.vertices() {
            if v == t {
                continue;
            }
            let (c, _) = best_step(arena, v, |u| x[u])?;
            let c = apply_cutoff(c, cutoff);
            if c > x[v] {
                return Err(Error::Monotonicity { vertex: v });
            }
            changed |= c != x[v];
            next[v] = c;
        }
        core::mem::swap(&mut x, &mut next);
        if let Some(tr) = trace.as_mut() {
            tr.push(x.clone());
        }
        if !changed {
            break;
        }
    }
    Ok(McrSolution { values: x, stats: SolveStats { outer_iterations: 1, inner_iterations: sweeps, sweeps }, trace })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// Sign of the mean-payoff value of every vertex (targets ignored).
///
/// Runs the finite-horizon recurrence for `N = 4|V|²W + 1` steps. The
/// horizon-`N` optimum stays within `2|V|W` of `N` times the mean-payoff
/// value, and a nonzero value has magnitude at least `1/|V|`, so comparing
/// `2|V|·x_N` against `±N` separates the three cases.
pub fn mp_sign(arena: &Arena) -> Result<Vec<Sign>, Error> {
    let n = arena.len() as u128;
    let w = arena.max_abs_weight() as u128;
    if n * n * w > 100_000_000_000_000 {
        return Err(Error::CapExceeded { what: "mean-payoff horizon |V|^2 W > 10^14" });
    }
    let horizon = 4 * n * n * w + 1;
    let mut x = alloc::vec![0i128; arena.len()];
    let mut next = x.clone();
    for _ in 0..horizon {
        for v in arena.vertices() {
            let succ = arena.successors(v);
            let vals = succ.iter().map(|e| e.weight as i128 + x[e.dst.index()]);
            next[v.index()] = match arena.owner(v) {
                Player::Max => vals.max(),
                Player::Min => vals.min(),
            }
            .unwrap_or(0);
        }
        core::mem::swap(&mut x, &mut next);
    }
    let horizon = horizon as i128;
    let scale = 2 * n as i128;
    Ok(x.iter()
        .map(|&xv| {
            if scale * xv > horizon {
                Sign::Positive
            } else if scale * xv < -horizon {
                Sign::Negative
            } else {
                Sign::Zero
            }
        })
        .collect())
}

/// Vertices with MCR value `−∞`: those in the target attractor whose
/// mean-payoff value is negative in the game restricted to the attractor.
pub fn classify_minus_infinity(arena: &Arena) -> Result<Vec<VertexId>, Error> {
    let t = require_normalized(arena)?;
    let attr = crate::attractor::compute_attractor(arena, &[t]);
    let mut b = arena.to_builder();
    b.retain_edges(|e| !attr.contains(e.src) || attr.contains(e.dst));
    let signs = mp_sign(&b.build(Objective::Tp)?)?;
    Ok(arena.vertices().filter(|&v| attr.contains(v) && signs[v.index()] == Sign::Negative).collect())
}

/// Inserts a 0-weight relay of the opposite owner on every edge joining two
/// vertices of the same owner. Original vertices keep their indices.
pub fn make_bipartite(arena: &Arena) -> Result<Arena, Error> {
    let mut names: BTreeSet<String> = arena.names().iter().cloned().collect();
    let mut b = ArenaBuilder::with_limits(Default::default());
    for v in arena.vertices() {
        let id = b.add_vertex(arena.name(v), arena.owner(v));
        b.set_target(id, arena.is_target(v));
    }
    for e in arena.edges() {
        let owner = arena.owner(e.src);
        if owner == arena.owner(e.dst) {
            let base = format!("r_{}_{}", arena.name(e.src), arena.name(e.dst));
            let name = crate::arena::fresh_name(&base, |s| names.contains(s));
            names.insert(name.clone());
            let r = b.add_vertex(name, owner.opponent());
            b.add_edge(e.src, r, e.weight);
            b.add_edge(r, e.dst, 0);
        } else {
            b.add_edge(e.src, e.dst, e.weight);
        }
    }
    Ok(b.build(arena.objective())?)
}

/// The MCR arena whose `−∞` vertices are exactly the original vertices with
/// negative mean-payoff value: the bipartite version of the arena plus a
/// fresh target reachable at cost 0 from every Min vertex. Original vertices
/// keep their indices.
pub fn mp_to_mcr(arena: &Arena) -> Result<Arena, Error> {
    let bip = make_bipartite(arena)?;
    let mut b = ArenaBuilder::new();
    for v in bip.vertices() {
        b.add_vertex(bip.name(v), bip.owner(v));
    }
    let t = b.add_vertex(bip.fresh_name("t"), Player::Max);
    b.set_target(t, true);
    b.add_edge(t, t, 0);
    for e in bip.edges() {
        b.add_edge(e.src, e.dst, e.weight);
    }
    for v in bip.vertices() {
        if bip.owner(v) == Player::Min {
            b.add_edge(v, t, 0);
        }
    }
    Ok(b.build(Objective::Mcr)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate, FamilySpec};

    fn single(owner: Player, w: i64) -> Arena {
        let mut b = ArenaBuilder::new();
        let v = b.add_vertex("v", owner);
        b.add_edge(v, v, w);
        b.build(Objective::Tp).unwrap()
    }

    #[test]
    fn fig2a_values_and_trace() {
        let a = generate(&FamilySpec::Fig2a { w: 50 }).unwrap();
        let sol = solve_mcr(&a, McrOptions { record_trace: true }).unwrap();
        assert_eq!(sol.values.as_slice(), [ExtValue::Finite(-50), ExtValue::Finite(-50), ExtValue::ZERO]);
        assert_eq!(sol.stats.sweeps, 102);
        let trace = sol.trace.unwrap();
        let pair = |i: usize| (trace[i][0], trace[i][1]);
        use ExtValue::{Finite as F, PosInf as P};
        assert_eq!(pair(0), (P, P));
        assert_eq!(pair(1), (P, F(0)));
        assert_eq!(pair(2), (F(-1), F(0)));
        assert_eq!(pair(3), (F(-1), F(-1)));
        assert_eq!(pair(4), (F(-2), F(-1)));
    }

    #[test]
    fn lsp_values() {
        let a = generate(&FamilySpec::LspFig5).unwrap();
        let sol = solve_mcr(&a, McrOptions::default()).unwrap();
        use ExtValue::{Finite as F, PosInf as P};
        assert_eq!(sol.values.as_slice(), [F(2), F(3), F(1), P, F(0)]);
    }

    #[test]
    fn pumping_min_gets_minus_infinity() {
        let mut b = ArenaBuilder::new();
        let v = b.add_vertex("v", Player::Min);
        let t = b.add_vertex("t", Player::Max);
        b.set_target(t, true);
        b.add_edge(v, v, -1);
        b.add_edge(v, t, 0);
        b.add_edge(t, t, 0);
        let a = b.build(Objective::Mcr).unwrap();
        let sol = solve_mcr(&a, McrOptions::default()).unwrap();
        assert_eq!(sol.values[0], ExtValue::NegInf);
    }

    #[test]
    fn needs_canonical_target() {
        let mut b = ArenaBuilder::new();
        let v = b.add_vertex("v", Player::Min);
        b.set_target(v, true);
        b.add_edge(v, v, 1);
        let a = b.build(Objective::Mcr).unwrap();
        assert_eq!(solve_mcr(&a, McrOptions::default()), Err(Error::NotNormalized));
    }

    #[test]
    fn mp_sign_small_cases() {
        assert_eq!(mp_sign(&single(Player::Max, 3)).unwrap(), [Sign::Positive]);
        assert_eq!(mp_sign(&single(Player::Min, 0)).unwrap(), [Sign::Zero]);
        assert_eq!(mp_sign(&single(Player::Min, -2)).unwrap(), [Sign::Negative]);
        let fig1a = generate(&FamilySpec::Fig1a).unwrap();
        assert_eq!(mp_sign(&fig1a).unwrap(), [Sign::Zero; 5]);
    }

    #[test]
    fn mp_sign_refuses_huge_horizons() {
        assert_eq!(mp_sign(&single(Player::Max, 1000)).unwrap(), [Sign::Positive]);
        let a = generate(&FamilySpec::Layered { n: 2000, w: 10_000_000 }).unwrap();
        assert!(matches!(mp_sign(&a), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn reduction_on_self_loops() {
        let img = mp_to_mcr(&single(Player::Min, -1)).unwrap();
        let sol = solve_mcr(&img, McrOptions::default()).unwrap();
        assert_eq!(sol.values[0], ExtValue::NegInf);
        let img = mp_to_mcr(&single(Player::Max, 1)).unwrap();
        assert_eq!(img.len(), 3);
        let sol = solve_mcr(&img, McrOptions::default()).unwrap();
        assert_ne!(sol.values[0], ExtValue::NegInf);
    }
}
