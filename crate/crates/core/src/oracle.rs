//! Brute-force reference solvers over memoryless strategy profiles.
//!
//! Both players have optimal memoryless strategies in all three games, so
//! enumerating them and evaluating the resulting lassos gives exact values
//! on small arenas. Nothing here shares code with the value iteration.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::arena::{Arena, Objective, Player, VertexId};
use crate::error::Error;
use crate::value::{ExtValue, ValueVector};

/// Maximum number of memoryless strategies one enumeration may produce.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// An ultimately periodic play `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<VertexId>,
    pub cycle: Vec<VertexId>,
}

impl Lasso {
    /// The vertex sequence `prefix · cycle`, i.e. one period unrolled.
    pub fn unrolled(&self, periods: usize) -> Vec<VertexId> {
        let mut out = self.prefix.clone();
        for _ in 0..periods {
            out.extend_from_slice(&self.cycle);
        }
        out
    }
}

/// Exact rational with positive denominator.
#[derive(Clone, Copy, Debug)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub fn signum(self) -> i64 {
        self.num.signum()
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn edge_weight(arena: &Arena, a: VertexId, b: VertexId) -> Result<i64, Error> {
    arena.weight(a, b).ok_or(Error::InvalidParameter("consecutive play vertices are not joined by an edge"))
}

/// Sum of the weights along a finite play; 0 for plays of length 0 or 1.
pub fn tp_of_prefix(arena: &Arena, play: &[VertexId]) -> Result<i64, Error> {
    let mut sum = 0i64;
    for pair in play.windows(2) {
        sum = sum
            .checked_add(edge_weight(arena, pair[0], pair[1])?)
            .ok_or(Error::Value(crate::value::ValueError::Overflow))?;
    }
    Ok(sum)
}

/// Running sums `0, w1, w1+w2, …` along one period of the cycle, starting at
/// the cycle entry, plus the total cycle weight.
fn cycle_sums(arena: &Arena, cycle: &[VertexId]) -> Result<(Vec<i64>, i64), Error> {
    let mut sums = Vec::with_capacity(cycle.len());
    let mut s = 0i64;
    for i in 0..cycle.len() {
        sums.push(s);
        s += edge_weight(arena, cycle[i], cycle[(i + 1) % cycle.len()])?;
    }
    Ok((sums, s))
}

fn check_lasso(lasso: &Lasso) -> Result<(), Error> {
    if lasso.cycle.is_empty() {
        Err(Error::InvalidParameter("lasso cycle is empty"))
    } else {
        Ok(())
    }
}

/// Payoff of a lasso under the total-payoff or min-cost-reachability rule.
///
/// Total payoff: `+∞`/`−∞` for positive/negative cycles; for a zero cycle,
/// the liminf of partial sums is the sum at cycle entry plus the smallest
/// running sum within one period.
pub fn payoff_of_lasso(arena: &Arena, lasso: &Lasso, objective: Objective) -> Result<ExtValue, Error> {
    check_lasso(lasso)?;
    let mut entry = lasso.prefix.clone();
    entry.push(lasso.cycle[0]);
    match objective {
        Objective::Tp => {
            let (sums, total) = cycle_sums(arena, &lasso.cycle)?;
            Ok(match total.cmp(&0) {
                Ordering::Greater => ExtValue::PosInf,
                Ordering::Less => ExtValue::NegInf,
                Ordering::Equal => {
                    let base = tp_of_prefix(arena, &entry)?;
                    ExtValue::Finite(base + sums.iter().min().copied().unwrap_or(0))
                }
            })
        }
        Objective::Mcr => {
            let play = lasso.unrolled(1);
            match play.iter().position(|&v| arena.is_target(v)) {
                Some(i) => Ok(ExtValue::Finite(tp_of_prefix(arena, &play[..=i])?)),
                None => Ok(ExtValue::PosInf),
            }
        }
    }
}

/// Mean payoff of a lasso: the cycle's average weight.
pub fn mean_payoff_of_lasso(arena: &Arena, lasso: &Lasso) -> Result<Ratio, Error> {
    check_lasso(lasso)?;
    let (_, total) = cycle_sums(arena, &lasso.cycle)?;
    Ok(Ratio { num: total, den: lasso.cycle.len() as i64 })
}

/// A memoryless strategy: one successor per vertex of `player`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MemorylessStrategy {
    pub player: Player,
    pub choice: Vec<Option<VertexId>>,
}

impl MemorylessStrategy {
    pub fn get(&self, v: VertexId) -> Option<VertexId> {
        self.choice.get(v.index()).copied().flatten()
    }
}

/// All memoryless strategies of `player`, in lexicographic order of
/// successor positions (the last owned vertex varies fastest).
pub fn enumerate_memoryless(arena: &Arena, player: Player) -> Result<MemorylessIter<'_>, Error> {
    let owned: Vec<VertexId> = arena.vertices().filter(|&v| arena.owner(v) == player).collect();
    let mut count = 1u64;
    for &v in &owned {
        count = count.saturating_mul(arena.successors(v).len() as u64);
        if count > ENUMERATION_LIMIT {
            return Err(Error::TooManyStrategies { limit: ENUMERATION_LIMIT });
        }
    }
    Ok(MemorylessIter { arena, player, digits: alloc::vec![0; owned.len()], owned, done: false })
}

pub struct MemorylessIter<'a> {
    arena: &'a Arena,
    player: Player,
    owned: Vec<VertexId>,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for MemorylessIter<'_> {
    type Item = MemorylessStrategy;

    fn next(&mut self) -> Option<MemorylessStrategy> {
        if self.done {
            return None;
        }
        let mut choice = alloc::vec![None; self.arena.len()];
        for (&v, &d) in self.owned.iter().zip(&self.digits) {
            choice[v.index()] = Some(self.arena.successors(v)[d].dst);
        }
        self.done = true;
        for i in (0..self.owned.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.arena.successors(self.owned[i]).len() {
                self.done = false;
                break;
            }
            self.digits[i] = 0;
        }
        Some(MemorylessStrategy { player: self.player, choice })
    }
}

/// The successor of every vertex under a pair of memoryless strategies.
fn profile_successors(arena: &Arena, a: &MemorylessStrategy, b: &MemorylessStrategy) -> Vec<VertexId> {
    arena
        .vertices()
        .map(|v| {
            let s = if arena.owner(v) == a.player { a.get(v) } else { b.get(v) };
            s.unwrap_or(arena.successors(v)[0].dst)
        })
        .collect()
}

/// The lasso followed from `start` in a functional graph.
pub fn lasso_of(succ: &[VertexId], start: VertexId) -> Lasso {
    let mut seen = alloc::vec![usize::MAX; succ.len()];
    let mut path = Vec::new();
    let mut v = start;
    while seen[v.index()] == usize::MAX {
        seen[v.index()] = path.len();
        path.push(v);
        v = succ[v.index()];
    }
    let cycle = path.split_off(seen[v.index()]);
    Lasso { prefix: path, cycle }
}

fn for_each_profile(
    arena: &Arena,
    mut eval: impl FnMut(&[VertexId], VertexId) -> Result<ExtValue, Error>,
) -> Result<ValueVector, Error> {
    let n = arena.len();
    let mut best = ValueVector::filled(n, ExtValue::NegInf);
    for max in enumerate_memoryless(arena, Player::Max)? {
        let mut worst = ValueVector::filled(n, ExtValue::PosInf);
        for min in enumerate_memoryless(arena, Player::Min)? {
            let succ = profile_successors(arena, &max, &min);
            for v in arena.vertices() {
                let p = eval(&succ, v)?;
                if p < worst[v] {
                    worst[v] = p;
                }
            }
        }
        for v in arena.vertices() {
            best[v] = best[v].max(worst[v]);
        }
    }
    Ok(best)
}

/// Total-payoff values: max over Max profiles of min over Min profiles.
pub fn tp_oracle(arena: &Arena) -> Result<ValueVector, Error> {
    for_each_profile(arena, |succ, v| payoff_of_lasso(arena, &lasso_of(succ, v), Objective::Tp))
}

/// Exact mean-payoff values.
pub fn mp_oracle(arena: &Arena) -> Result<Vec<Ratio>, Error> {
    let n = arena.len();
    let mut best: Vec<Option<Ratio>> = alloc::vec![None; n];
    for max in enumerate_memoryless(arena, Player::Max)? {
        let mut worst: Vec<Option<Ratio>> = alloc::vec![None; n];
        for min in enumerate_memoryless(arena, Player::Min)? {
            let succ = profile_successors(arena, &max, &min);
            for v in arena.vertices() {
                let r = mean_payoff_of_lasso(arena, &lasso_of(&succ, v))?;
                let slot = &mut worst[v.index()];
                if slot.map_or(true, |w| r < w) {
                    *slot = Some(r);
                }
            }
        }
        for (b, w) in best.iter_mut().zip(worst) {
            if b.map_or(true, |x| w.is_some_and(|w| w > x)) {
                *b = w;
            }
        }
    }
    Ok(best.into_iter().map(|r| r.unwrap_or(Ratio { num: 0, den: 1 })).collect())
}

/// MCR values: for every Max memoryless strategy, Min's optimum in the
/// remaining one-player graph by Bellman–Ford towards the target.
pub fn mcr_oracle(arena: &Arena) -> Result<ValueVector, Error> {
    if arena.objective() != Objective::Mcr {
        return Err(Error::WrongObjective { expected: Objective::Mcr });
    }
    let n = arena.len();
    let mut best = ValueVector::filled(n, ExtValue::NegInf);
    for max in enumerate_memoryless(arena, Player::Max)? {
        let edges: Vec<(usize, usize, i64)> = arena
            .edges()
            .iter()
            .filter(|e| !arena.is_target(e.src))
            .filter(|e| arena.owner(e.src) == Player::Min || max.get(e.src) == Some(e.dst))
            .map(|e| (e.src.index(), e.dst.index(), e.weight))
            .collect();
        let dist = shortest_to_targets(arena, &edges);
        for v in arena.vertices() {
            best[v] = best[v].max(dist[v.index()]);
        }
    }
    Ok(best)
}

/// Shortest distance from every vertex to the target set over `edges`,
/// `−∞` where a negative cycle that can still reach a target is reachable.
fn shortest_to_targets(arena: &Arena, edges: &[(usize, usize, i64)]) -> Vec<ExtValue> {
    let n = arena.len();
    let mut d: Vec<Option<i64>> = arena.vertices().map(|v| arena.is_target(v).then_some(0)).collect();
    for _ in 0..n {
        let mut changed = false;
        for &(u, x, w) in edges {
            if let Some(dx) = d[x] {
                if d[u].map_or(true, |du| w + dx < du) {
                    d[u] = Some(w + dx);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut neg = alloc::vec![false; n];
    for &(u, x, w) in edges {
        if let (Some(du), Some(dx)) = (d[u], d[x]) {
            if w + dx < du {
                neg[u] = true;
            }
        }
    }
    // Everything that can reach a still-improving vertex is unbounded below.
    let mut grew = true;
    while grew {
        grew = false;
        for &(u, x, _) in edges {
            if neg[x] && !neg[u] {
                neg[u] = true;
                grew = true;
            }
        }
    }
    (0..n)
        .map(|v| match (neg[v], d[v]) {
            (true, _) => ExtValue::NegInf,
            (false, Some(x)) => ExtValue::Finite(x),
            (false, None) => ExtValue::PosInf,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::ArenaBuilder;
    use crate::families::{generate, FamilySpec};
    use ExtValue::{Finite as F, PosInf as P};

    fn ids(xs: &[usize]) -> Vec<VertexId> {
        xs.iter().map(|&i| VertexId::new(i)).collect()
    }

    #[test]
    fn fig1a_prefix_sums() {
        let a = generate(&FamilySpec::Fig1a).unwrap();
        let play = ids(&[0, 1, 2, 3, 4, 3, 2]);
        let sums: Vec<i64> = (0..play.len()).map(|k| tp_of_prefix(&a, &play[..=k]).unwrap()).collect();
        assert_eq!(sums, [0, 2, 1, 3, 2, 3, 1]);
        assert_eq!(tp_of_prefix(&a, &ids(&[2])).unwrap(), 0);
    }

    #[test]
    fn fig1a_lasso() {
        let a = generate(&FamilySpec::Fig1a).unwrap();
        let l = Lasso { prefix: ids(&[0, 1, 2]), cycle: ids(&[3, 4]) };
        assert_eq!(payoff_of_lasso(&a, &l, Objective::Tp).unwrap(), F(2));
    }

    #[test]
    fn fig2a_lassos() {
        let a = generate(&FamilySpec::Fig2a { w: 5 }).unwrap();
        assert_eq!(tp_of_prefix(&a, &ids(&[0, 1])).unwrap(), -1);
        let l = Lasso { prefix: alloc::vec![], cycle: ids(&[0, 1]) };
        assert_eq!(payoff_of_lasso(&a, &l, Objective::Mcr).unwrap(), P);
        let l = Lasso { prefix: ids(&[0]), cycle: ids(&[2]) };
        assert_eq!(payoff_of_lasso(&a, &l, Objective::Mcr).unwrap(), F(-5));
    }

    #[test]
    fn positive_cycle_is_plus_infinity() {
        let mut b = ArenaBuilder::new();
        let v = b.add_vertex("v", Player::Min);
        b.add_edge(v, v, 1);
        let a = b.build(Objective::Tp).unwrap();
        let l = Lasso { prefix: alloc::vec![], cycle: alloc::vec![v] };
        assert_eq!(payoff_of_lasso(&a, &l, Objective::Tp).unwrap(), P);
        assert_eq!(mean_payoff_of_lasso(&a, &l).unwrap(), Ratio { num: 1, den: 1 });
    }

    #[test]
    fn enumeration_counts() {
        let fig2a = generate(&FamilySpec::Fig2a { w: 5 }).unwrap();
        assert_eq!(enumerate_memoryless(&fig2a, Player::Max).unwrap().count(), 2);
        let fig1a = generate(&FamilySpec::Fig1a).unwrap();
        assert_eq!(enumerate_memoryless(&fig1a, Player::Min).unwrap().count(), 2);
        let layered = generate(&FamilySpec::Layered { n: 2, w: 1 }).unwrap();
        assert_eq!(enumerate_memoryless(&layered, Player::Min).unwrap().count(), 16);
    }

    #[test]
    fn enumeration_guard() {
        let a = generate(&FamilySpec::Layered { n: 30, w: 1 }).unwrap();
        assert!(matches!(enumerate_memoryless(&a, Player::Min), Err(Error::TooManyStrategies { .. })));
    }

    #[test]
    fn oracle_known_values() {
        let fig2a = generate(&FamilySpec::Fig2a { w: 50 }).unwrap();
        assert_eq!(mcr_oracle(&fig2a).unwrap().as_slice(), [F(-50), F(-50), F(0)]);
        let lsp = generate(&FamilySpec::LspFig5).unwrap();
        assert_eq!(mcr_oracle(&lsp).unwrap().as_slice(), [F(2), F(3), F(1), P, F(0)]);
        let fig1a = generate(&FamilySpec::Fig1a).unwrap();
        assert_eq!(tp_oracle(&fig1a).unwrap().as_slice(), [F(2), F(0), F(1), F(-1), F(0)]);
        assert!(mp_oracle(&fig1a).unwrap().iter().all(|r| r.signum() == 0));
    }

    #[test]
    fn target_only_and_zero_loop() {
        let mut b = ArenaBuilder::new();
        let t = b.add_vertex("t", Player::Max);
        b.set_target(t, true);
        b.add_edge(t, t, 0);
        let a = b.build(Objective::Mcr).unwrap();
        assert_eq!(mcr_oracle(&a).unwrap().as_slice(), [F(0)]);
        let a = a.with_objective(Objective::Tp).unwrap();
        assert_eq!(tp_oracle(&a).unwrap().as_slice(), [F(0)]);
        assert_eq!(mp_oracle(&a).unwrap(), [Ratio { num: 0, den: 1 }]);
    }
}
