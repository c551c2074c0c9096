//! Nested value iteration for total-payoff games.
//!
//! The outer vector `Y` starts at `−∞` and increases. Each outer pass solves
//! an MCR-like inner game in which Min, on reaching a vertex `v`, may stop and
//! collect `max(0, Y(v))`. The inner game is never materialized: the inner
//! sweep reads `min(X_pre(v'), Y(v'))` for each successor. [`build_game_y`]
//! materializes it for testing, and [`build_unfolding`] builds the layered MCR
//! game whose values approximate the total payoff.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::arena::{fresh_name, Arena, ArenaBuilder, Limits, Objective, Player, VertexId};
use crate::error::Error;
use crate::mcr::{apply_cutoff, best_step, mp_sign, neg_cutoff, sweep_bound, Sign, SolveStats};
use crate::value::{ExtValue, ValueVector};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TpOptions {
    /// Keep the outer vectors `Y^0 = −∞, Y^1, …`.
    pub record_outer: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TpSolution {
    pub values: ValueVector,
    pub stats: SolveStats,
    pub outer_trace: Option<Vec<ValueVector>>,
}

/// `K = |V|·(2(|V|−1)·W + 1)`, the bound on outer passes.
pub fn k_bound(arena: &Arena) -> u64 {
    let n = arena.len() as u128;
    let w = arena.max_abs_weight() as u128;
    let k = n * (2 * n.saturating_sub(1) * w + 1);
    u64::try_from(k).unwrap_or(u64::MAX)
}

pub(crate) fn require_tp(arena: &Arena) -> Result<(), Error> {
    if arena.objective() == Objective::Tp {
        Ok(())
    } else {
        Err(Error::WrongObjective { expected: Objective::Tp })
    }
}

/// Sweep bound for the inner game, which has `2|V|+1` vertices and stop
/// weights up to `(|V|−1)·W`.
pub(crate) fn inner_sweep_bound(arena: &Arena) -> u64 {
    let n = arena.len();
    let w = arena.max_abs_weight();
    sweep_bound(2 * n + 1, w.max((n as i64 - 1) * w))
}

#[inline]
pub(crate) fn stop_value(y: ExtValue) -> ExtValue {
    y.max(ExtValue::ZERO)
}

#[inline]
pub(crate) fn lift(y: ExtValue, bound: i64) -> ExtValue {
    match y {
        ExtValue::Finite(c) if c > bound => ExtValue::PosInf,
        other => other,
    }
}

pub fn solve_tp(arena: &Arena, opts: TpOptions) -> Result<TpSolution, Error> {
    require_tp(arena)?;
    let n = arena.len();
    let cutoff = neg_cutoff(arena);
    let upper = -cutoff;
    let outer_limit = k_bound(arena).saturating_add(1);
    let inner_limit = inner_sweep_bound(arena);
    let mut y = ValueVector::filled(n, ExtValue::NegInf);
    let mut x = ValueVector::filled(n, ExtValue::PosInf);
    let mut next = x.clone();
    let mut outer_trace = opts.record_outer.then(|| alloc::vec![y.clone()]);
    let mut stats = SolveStats::default();
    loop {
        stats.outer_iterations += 1;
        if stats.outer_iterations > outer_limit {
            return Err(Error::IterationBound { limit: outer_limit });
        }
        let y_pre = y.clone();
        for v in y.as_mut_slice() {
            *v = stop_value(*v);
        }
        x.as_mut_slice().fill(ExtValue::PosInf);
        let mut inner = 0u64;
        loop {
            inner += 1;
            if inner > inner_limit {
                return Err(Error::IterationBound { limit: inner_limit });
            }
            let mut changed = false;
            for v in arena.vertices() {
                let (c, _) = best_step(arena, v, |u| x[u].min(y[u]))?;
                let c = apply_cutoff(c, cutoff);
                if c > x[v] {
                    return Err(Error::Monotonicity { vertex: v });
                }
                changed |= c != x[v];
                next[v] = c;
            }
            core::mem::swap(&mut x, &mut next);
            if !changed {
                break;
            }
        }
        stats.inner_iterations += inner;
        for v in arena.vertices() {
            y[v] = lift(x[v], upper);
            if y[v] < y_pre[v] {
                return Err(Error::Monotonicity { vertex: v });
            }
        }
        if let Some(tr) = outer_trace.as_mut() {
            tr.push(y.clone());
        }
        if y == y_pre {
            break;
        }
    }
    stats.sweeps = stats.inner_iterations;
    Ok(TpSolution { values: y, stats, outer_trace })
}

/// The one-step MCR game `G_Y`. Vertex layout: the original vertices keep
/// their indices `0..n`, the interior vertex of `v` is `n + v`, and the
/// target is `2n`. Original `v → v'` becomes `v → in(v')`; interior vertices
/// belong to Min, who either continues to `v` or, when `Y(v) ≠ +∞`, stops
/// and pays `max(0, Y(v))`.
pub fn build_game_y(arena: &Arena, y: &ValueVector) -> Result<Arena, Error> {
    require_tp(arena)?;
    let n = arena.len();
    if y.len() != n {
        return Err(Error::InvalidParameter("value vector length differs from the arena"));
    }
    let mut taken: BTreeSet<String> = arena.names().iter().cloned().collect();
    let mut fresh = |base: String| {
        let name = fresh_name(&base, |s| taken.contains(s));
        taken.insert(name.clone());
        name
    };
    let mut b = ArenaBuilder::new();
    for v in arena.vertices() {
        b.add_vertex(arena.name(v), arena.owner(v));
    }
    for v in arena.vertices() {
        b.add_vertex(fresh(format!("in_{}", arena.name(v))), Player::Min);
    }
    let t = b.add_vertex(fresh(String::from("t")), Player::Max);
    b.set_target(t, true);
    b.add_edge(t, t, 0);
    let interior = |v: VertexId| VertexId::new(n + v.index());
    for e in arena.edges() {
        b.add_edge(e.src, interior(e.dst), e.weight);
    }
    for v in arena.vertices() {
        b.add_edge(interior(v), v, 0);
        if let ExtValue::Finite(c) = stop_value(y[v]) {
            b.add_edge(interior(v), t, c);
        }
    }
    Ok(b.build(Objective::Mcr)?)
}

/// The unfolded MCR game `G^k` together with the map `v ↦ (v, k)`.
///
/// Copy `j ∈ 1..=k` occupies indices `(j−1)·3n ..`: first the copies
/// `(v, j)`, then the interior vertices `(in, v, j)` (Min), then the exterior
/// vertices `(ex, v, j)` (Max). The target comes last. Min asks to stop at an
/// interior vertex; Max either accepts (edge to the target) or refuses and
/// play resumes in copy `j−1`.
pub fn build_unfolding(arena: &Arena, k: usize) -> Result<(Arena, Vec<VertexId>), Error> {
    build_unfolding_with(arena, k, Limits::default())
}

pub fn build_unfolding_with(arena: &Arena, k: usize, limits: Limits) -> Result<(Arena, Vec<VertexId>), Error> {
    require_tp(arena)?;
    if k == 0 {
        return Err(Error::InvalidParameter("unfolding depth must be at least 1"));
    }
    let n = arena.len();
    let total = n.checked_mul(3).and_then(|x| x.checked_mul(k)).and_then(|x| x.checked_add(1));
    match total {
        Some(c) if c <= limits.max_vertices => {}
        _ => return Err(Error::CapExceeded { what: "unfolding vertex count" }),
    }
    let copy = |v: usize, j: usize| VertexId::new((j - 1) * 3 * n + v);
    let interior = |v: usize, j: usize| VertexId::new((j - 1) * 3 * n + n + v);
    let exterior = |v: usize, j: usize| VertexId::new((j - 1) * 3 * n + 2 * n + v);
    let mut b = ArenaBuilder::with_limits(limits);
    for j in 1..=k {
        for v in arena.vertices() {
            b.add_vertex(format!("c{j}_{}", v.index()), arena.owner(v));
        }
        for v in 0..n {
            b.add_vertex(format!("in{j}_{v}"), Player::Min);
        }
        for v in 0..n {
            b.add_vertex(format!("ex{j}_{v}"), Player::Max);
        }
    }
    let t = b.add_vertex("t", Player::Max);
    b.set_target(t, true);
    b.add_edge(t, t, 0);
    for j in 1..=k {
        for e in arena.edges() {
            b.add_edge(copy(e.src.index(), j), interior(e.dst.index(), j), e.weight);
        }
        for v in 0..n {
            b.add_edge(interior(v, j), copy(v, j), 0);
            b.add_edge(interior(v, j), exterior(v, j), 0);
            b.add_edge(exterior(v, j), t, 0);
            if j > 1 {
                b.add_edge(exterior(v, j), copy(v, j - 1), 0);
            }
        }
    }
    let map = (0..n).map(|v| copy(v, k)).collect();
    Ok((b.build(Objective::Mcr)?, map))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TpClass {
    NegInf,
    Finite,
    PosInf,
}

impl TpClass {
    pub fn of(value: ExtValue) -> TpClass {
        match value {
            ExtValue::NegInf => TpClass::NegInf,
            ExtValue::Finite(_) => TpClass::Finite,
            ExtValue::PosInf => TpClass::PosInf,
        }
    }
}

/// Finite/infinite classification from the mean-payoff sign: a positive
/// mean payoff forces `+∞`, a negative one `−∞`.
pub fn classify_tp_infinities(arena: &Arena) -> Result<Vec<TpClass>, Error> {
    Ok(mp_sign(arena)?
        .into_iter()
        .map(|s| match s {
            Sign::Negative => TpClass::NegInf,
            Sign::Zero => TpClass::Finite,
            Sign::Positive => TpClass::PosInf,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate, generate_with, FamilySpec};
    use crate::mcr::{solve_mcr, McrOptions};
    use ExtValue::{Finite as F, NegInf as N, PosInf as P};

    fn single(owner: Player, w: i64) -> Arena {
        let mut b = ArenaBuilder::new();
        let v = b.add_vertex("v", owner);
        b.add_edge(v, v, w);
        b.build(Objective::Tp).unwrap()
    }

    #[test]
    fn fig1a_values() {
        let a = generate(&FamilySpec::Fig1a).unwrap();
        let sol = solve_tp(&a, TpOptions::default()).unwrap();
        assert_eq!(sol.values.as_slice(), [F(2), F(0), F(1), F(-1), F(0)]);
    }

    #[test]
    fn fig2b_outer_passes_grow_with_w() {
        let mut passes = Vec::new();
        for w in [5, 10, 20] {
            let a = generate(&FamilySpec::Fig2b { w }).unwrap();
            let sol = solve_tp(&a, TpOptions::default()).unwrap();
            assert_eq!(sol.values.as_slice(), [F(0), F(w), F(0)]);
            passes.push(sol.stats.outer_iterations);
        }
        assert_eq!(passes[1] - passes[0], 5);
        assert_eq!(passes[2] - passes[1], 10);
    }

    #[test]
    fn self_loops() {
        assert_eq!(solve_tp(&single(Player::Max, 1), TpOptions::default()).unwrap().values[0], P);
        assert_eq!(solve_tp(&single(Player::Max, -1), TpOptions::default()).unwrap().values[0], N);
        assert_eq!(solve_tp(&single(Player::Min, 0), TpOptions::default()).unwrap().values[0], F(0));
    }

    #[test]
    fn k_bound_formula() {
        let a = generate(&FamilySpec::Fig2a { w: 50 }).unwrap();
        assert_eq!(k_bound(&a), 603);
        assert_eq!(k_bound(&single(Player::Min, 7)), 1);
    }

    #[test]
    fn game_y_extremes() {
        let a = generate(&FamilySpec::Fig1a).unwrap();
        let gy = build_game_y(&a, &ValueVector::filled(5, N)).unwrap();
        assert_eq!(gy.len(), 11);
        for v in 5..10 {
            assert_eq!(gy.weight(VertexId::new(v), VertexId::new(10)), Some(0));
        }
        let gy = build_game_y(&a, &ValueVector::filled(5, P)).unwrap();
        let sol = solve_mcr(&gy, McrOptions::default()).unwrap();
        assert!(sol.values.as_slice()[..5].iter().all(|&x| x == P));
    }

    #[test]
    fn game_y_fixed_point_on_fig2a() {
        let a = generate_with(&FamilySpec::Fig2a { w: 6 }, Objective::Tp, Limits::default()).unwrap();
        let val = solve_tp(&a, TpOptions::default()).unwrap().values;
        let gy = build_game_y(&a, &val).unwrap();
        let h = solve_mcr(&gy, McrOptions::default()).unwrap().values;
        for v in a.vertices() {
            if val[v].is_finite() {
                assert_eq!(h[v], val[v]);
            }
        }
    }

    #[test]
    fn unfolding_shape() {
        let a = generate_with(&FamilySpec::Fig2a { w: 2 }, Objective::Tp, Limits::default()).unwrap();
        let (g, map) = build_unfolding(&a, 3).unwrap();
        assert_eq!(g.len(), 28);
        assert_eq!(map, [VertexId::new(18), VertexId::new(19), VertexId::new(20)]);
        let (g1, _) = build_unfolding(&a, 1).unwrap();
        // Exterior vertices of the only copy lead to the target alone.
        for v in 6..9 {
            assert_eq!(g1.successors(VertexId::new(v)).len(), 1);
        }
        let small = Limits { max_vertices: 27, ..Limits::default() };
        assert!(build_unfolding_with(&a, 3, small).is_err());
    }

    #[test]
    fn naive_single_operator_iteration_does_not_stabilize() {
        // Iterating the one-step operator from 0 on a negative Min self-loop
        // never reaches a fixed point, which is why the nested scheme exists.
        let a = single(Player::Min, -1);
        let mut x = F(0);
        for _ in 0..10_000 {
            let (next, _) = best_step(&a, VertexId::new(0), |_| x).unwrap();
            assert!(next < x);
            x = next;
        }
    }

    #[test]
    fn classification() {
        let a = generate(&FamilySpec::Fig1a).unwrap();
        assert_eq!(classify_tp_infinities(&a).unwrap(), [TpClass::Finite; 5]);
        assert_eq!(classify_tp_infinities(&single(Player::Min, 2)).unwrap(), [TpClass::PosInf]);
        assert_eq!(classify_tp_infinities(&single(Player::Max, -2)).unwrap(), [TpClass::NegInf]);
    }
}
