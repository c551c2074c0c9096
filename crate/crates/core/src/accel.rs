//! SCC decomposition and component-wise solvers with candidate-set clamping.
//!
//! Components are solved bottom-up. Within a component, values of lower
//! components are already final, so the sweep touches only the component's
//! vertices. A [`ValueOracle`] may supply, per vertex, a finite set that is
//! known to contain the value; iterates are then rounded to the nearest
//! candidate in the direction the iteration moves.
//!
//! For total payoff the inner (downward) iteration is clamped with candidates
//! built from the current `Y`, and the outer (upward) iteration is clamped
//! with candidates for the final values. Both sets contain the exact target
//! of their iteration, so the result equals the plain solver's.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::arena::{Arena, Objective, VertexId};
use crate::error::Error;
use crate::mcr::{apply_cutoff, best_step, neg_cutoff, require_normalized, sweep_bound, SolveStats};
use crate::tp::{inner_sweep_bound, k_bound, lift, require_tp, stop_value};
use crate::value::{ExtValue, ValueVector};

pub const DEFAULT_PATH_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    /// Component index of each vertex.
    pub dec: Vec<u32>,
    /// Members of each component in increasing index order.
    pub components: Vec<Vec<VertexId>>,
    /// Position of each vertex inside its component.
    pub pos: Vec<u32>,
}

impl SccDecomposition {
    pub fn component_of(&self, v: VertexId) -> usize {
        self.dec[v.index()] as usize
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Tarjan's algorithm followed by a deterministic renumbering: a component
/// gets the next index once all components it can move into are numbered,
/// preferring the canonical MCR target and then the smallest member index.
pub fn scc_decompose(arena: &Arena) -> SccDecomposition {
    let n = arena.len();
    let raw = tarjan(arena);
    let count = raw.iter().copied().max().map_or(0, |m| m as usize + 1);

    let mut min_member = alloc::vec![usize::MAX; count];
    for (v, &c) in raw.iter().enumerate() {
        min_member[c as usize] = min_member[c as usize].min(v);
    }
    let mut links: Vec<(u32, u32)> =
        arena.edges().iter().map(|e| (raw[e.src.index()], raw[e.dst.index()])).filter(|(a, b)| a != b).collect();
    links.sort_unstable();
    links.dedup();
    let mut pending = alloc::vec![0usize; count];
    let mut into: Vec<Vec<u32>> = alloc::vec![Vec::new(); count];
    for &(a, b) in &links {
        pending[a as usize] += 1;
        into[b as usize].push(a);
    }
    let target_comp =
        if arena.objective() == Objective::Mcr { arena.canonical_target().map(|t| raw[t.index()]) } else { None };
    let key = |c: u32| Reverse((target_comp != Some(c), min_member[c as usize], c));
    let mut ready: BinaryHeap<_> = (0..count as u32).filter(|&c| pending[c as usize] == 0).map(key).collect();
    let mut renumber = alloc::vec![0u32; count];
    let mut next = 0u32;
    while let Some(Reverse((_, _, c))) = ready.pop() {
        renumber[c as usize] = next;
        next += 1;
        for &p in &into[c as usize] {
            pending[p as usize] -= 1;
            if pending[p as usize] == 0 {
                ready.push(key(p));
            }
        }
    }

    let dec: Vec<u32> = raw.iter().map(|&c| renumber[c as usize]).collect();
    let mut components: Vec<Vec<VertexId>> = alloc::vec![Vec::new(); count];
    let mut pos = alloc::vec![0u32; n];
    for v in arena.vertices() {
        let comp = &mut components[dec[v.index()] as usize];
        pos[v.index()] = comp.len() as u32;
        comp.push(v);
    }
    SccDecomposition { dec, components, pos }
}

/// Iterative Tarjan; returns an arbitrary component label per vertex.
fn tarjan(arena: &Arena) -> Vec<u32> {
    const UNSEEN: u32 = u32::MAX;
    let n = arena.len();
    let mut index = alloc::vec![UNSEEN; n];
    let mut low = alloc::vec![0u32; n];
    let mut on_stack = alloc::vec![false; n];
    let mut comp = alloc::vec![UNSEEN; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut counter = 0u32;
    let mut labels = 0u32;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge == 0 && index[v] == UNSEEN {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let succ = arena.successors(VertexId::new(v));
            if let Some(e) = succ.get(*edge) {
                *edge += 1;
                let w = e.dst.index();
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp[w] = labels;
                    if w == v {
                        break;
                    }
                }
                labels += 1;
            }
        }
    }
    comp
}

/// A finite candidate set, sorted and without duplicates. Every set built by
/// the crate contains both infinities.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CandidateSet(Vec<ExtValue>);

impl CandidateSet {
    pub fn from_values(mut values: Vec<ExtValue>) -> Self {
        values.sort_unstable();
        values.dedup();
        CandidateSet(values)
    }

    pub fn as_slice(&self) -> &[ExtValue] {
        &self.0
    }

    pub fn contains(&self, x: ExtValue) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn max(&self) -> ExtValue {
        self.0.last().copied().unwrap_or(ExtValue::PosInf)
    }

    /// Greatest candidate `≤ x`, or `x` itself if there is none.
    pub fn floor(&self, x: ExtValue) -> ExtValue {
        match self.0.binary_search(&x) {
            Ok(_) => x,
            Err(0) => x,
            Err(i) => self.0[i - 1],
        }
    }

    /// Least candidate `≥ x`, or `x` itself if there is none.
    pub fn ceil(&self, x: ExtValue) -> ExtValue {
        match self.0.binary_search(&x) {
            Ok(_) => x,
            Err(i) => self.0.get(i).copied().unwrap_or(x),
        }
    }
}

/// What the solver is about to iterate inside component `q`.
#[derive(Clone, Copy, Debug)]
pub enum OracleQuery<'a> {
    /// MCR values; `exits[u]` is final for `u` in lower components.
    Mcr { exits: &'a [ExtValue] },
    /// Final total-payoff values; `exits[u]` is the final value of `u`.
    TpValues { exits: &'a [ExtValue] },
    /// One inner pass of the total-payoff solver: `exits[u]` is the frozen
    /// successor value of `u` in lower components and `stops[w] = max(0, Y(w))`
    /// is what Min collects by stopping at `w` inside the component.
    TpInner { exits: &'a [ExtValue], stops: &'a [ExtValue] },
}

/// Supplies candidate value sets for the members of a component, in the
/// order of `SccDecomposition::components[q]`. `None` disables clamping.
///
/// Implementations must be sound: the exact value must belong to the set.
pub trait ValueOracle {
    fn candidates(
        &self,
        arena: &Arena,
        scc: &SccDecomposition,
        q: usize,
        query: OracleQuery<'_>,
    ) -> Option<Vec<CandidateSet>>;
}

/// Never clamps; the accelerated solvers then only gain from the
/// component-wise scheduling.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClamp;

impl ValueOracle for NoClamp {
    fn candidates(&self, _: &Arena, _: &SccDecomposition, _: usize, _: OracleQuery<'_>) -> Option<Vec<CandidateSet>> {
        None
    }
}

/// Candidates from simple paths inside the component: an optimal play can
/// be chosen so that its part inside the component does not loop before it
/// leaves, stops, or closes a zero cycle.
#[derive(Clone, Copy, Debug)]
pub struct SimplePathOracle {
    /// Maximum number of candidates per vertex before giving up.
    pub cap: usize,
}

impl Default for SimplePathOracle {
    fn default() -> Self {
        SimplePathOracle { cap: DEFAULT_PATH_CAP }
    }
}

impl ValueOracle for SimplePathOracle {
    fn candidates(
        &self,
        arena: &Arena,
        scc: &SccDecomposition,
        q: usize,
        query: OracleQuery<'_>,
    ) -> Option<Vec<CandidateSet>> {
        enumerate_paths(arena, scc, q, query, self.cap)
    }
}

/// The simple-path candidate sets for MCR component `q` given final values
/// of lower components; `None` when some vertex has more than `cap`.
pub fn simple_path_oracle(
    arena: &Arena,
    scc: &SccDecomposition,
    q: usize,
    finalized: &ValueVector,
    cap: usize,
) -> Option<Vec<CandidateSet>> {
    enumerate_paths(arena, scc, q, OracleQuery::Mcr { exits: finalized.as_slice() }, cap)
}

fn enumerate_paths(
    arena: &Arena,
    scc: &SccDecomposition,
    q: usize,
    query: OracleQuery<'_>,
    cap: usize,
) -> Option<Vec<CandidateSet>> {
    let members = &scc.components[q];
    let budget = cap.saturating_mul(64).max(1024);
    let (exits, stops, keep_prefixes) = match query {
        OracleQuery::Mcr { exits } => (exits, None, false),
        OracleQuery::TpValues { exits } => (exits, None, true),
        OracleQuery::TpInner { exits, stops } => (exits, Some(stops), false),
    };
    let inside = |u: VertexId| scc.dec[u.index()] as usize == q;
    let mut result = Vec::with_capacity(members.len());
    let mut visited = alloc::vec![false; members.len()];
    let mut stack: Vec<(VertexId, usize, i64)> = Vec::new();
    for &start in members {
        let mut found = alloc::vec![ExtValue::NegInf, ExtValue::PosInf];
        let mut work = 0usize;
        visited[scc.pos[start.index()] as usize] = true;
        stack.push((start, 0, 0));
        if keep_prefixes {
            found.push(ExtValue::ZERO);
        }
        while let Some(top) = stack.last_mut() {
            let (v, edge, sum) = *top;
            let succ = arena.successors(v);
            let Some(e) = succ.get(edge) else {
                visited[scc.pos[v.index()] as usize] = false;
                stack.pop();
                continue;
            };
            top.1 += 1;
            work += 1;
            if work > budget || found.len() > cap.saturating_mul(4) {
                return None;
            }
            let reach = sum.checked_add(e.weight)?;
            if !inside(e.dst) {
                found.push(exits[e.dst.index()].add_weight(reach).ok()?);
                continue;
            }
            if let Some(stops) = stops {
                if let ExtValue::Finite(s) = stops[e.dst.index()] {
                    found.push(ExtValue::finite(reach.checked_add(s)?).ok()?);
                }
            }
            let p = scc.pos[e.dst.index()] as usize;
            if !visited[p] {
                visited[p] = true;
                if keep_prefixes {
                    found.push(ExtValue::Finite(reach));
                }
                stack.push((e.dst, 0, reach));
            }
        }
        let set = CandidateSet::from_values(found);
        if set.0.len() > cap {
            return None;
        }
        result.push(set);
    }
    Some(result)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccelSolution {
    pub values: ValueVector,
    pub stats: SolveStats,
    pub scc: SccDecomposition,
}

/// Component-wise MCR value iteration. Produces exactly the values of the
/// plain solver when the oracle is sound.
pub fn solve_mcr_accelerated(arena: &Arena, oracle: &dyn ValueOracle) -> Result<AccelSolution, Error> {
    let t = require_normalized(arena)?;
    let n = arena.len();
    let cutoff = neg_cutoff(arena);
    let limit = sweep_bound(n, arena.max_abs_weight());
    let scc = scc_decompose(arena);
    let mut x = ValueVector::filled(n, ExtValue::PosInf);
    x[t] = ExtValue::ZERO;
    let mut next: Vec<ExtValue> = Vec::new();
    let mut stats = SolveStats { outer_iterations: 1, ..SolveStats::default() };
    for (q, members) in scc.components.iter().enumerate() {
        if members.contains(&t) {
            continue;
        }
        let sets = oracle.candidates(arena, &scc, q, OracleQuery::Mcr { exits: x.as_slice() });
        if let Some(sets) = &sets {
            for (i, &v) in members.iter().enumerate() {
                x[v] = sets[i].max();
            }
        }
        let mut local = 0u64;
        loop {
            local += 1;
            if local > limit {
                return Err(Error::IterationBound { limit });
            }
            next.clear();
            for (i, &v) in members.iter().enumerate() {
                let (c, _) = best_step(arena, v, |u| x[u])?;
                let mut c = apply_cutoff(c, cutoff);
                if let Some(sets) = &sets {
                    c = sets[i].floor(c);
                }
                if c > x[v] {
                    return Err(Error::Monotonicity { vertex: v });
                }
                next.push(c);
            }
            let mut changed = false;
            for (i, &v) in members.iter().enumerate() {
                changed |= x[v] != next[i];
                x[v] = next[i];
            }
            if !changed {
                break;
            }
        }
        stats.sweeps += local;
        if let Some(sets) = &sets {
            check_membership(members, sets, &x)?;
        }
    }
    stats.inner_iterations = stats.sweeps;
    Ok(AccelSolution { values: x, stats, scc })
}

fn check_membership(members: &[VertexId], sets: &[CandidateSet], x: &ValueVector) -> Result<(), Error> {
    match members.iter().zip(sets).find(|(&v, s)| !s.contains(x[v])) {
        Some((&v, _)) => Err(Error::UnsoundOracle { vertex: v }),
        None => Ok(()),
    }
}

/// Component-wise total-payoff value iteration: the full outer loop runs
/// inside each component in turn, with lower components frozen.
pub fn solve_tp_accelerated(arena: &Arena, oracle: &dyn ValueOracle) -> Result<AccelSolution, Error> {
    require_tp(arena)?;
    let n = arena.len();
    let cutoff = neg_cutoff(arena);
    let upper = -cutoff;
    let outer_limit = k_bound(arena).saturating_add(1);
    let inner_limit = inner_sweep_bound(arena);
    let scc = scc_decompose(arena);
    let mut y = ValueVector::filled(n, ExtValue::NegInf);
    let mut x = ValueVector::filled(n, ExtValue::PosInf);
    // Successor value of a finished vertex as seen by later inner sweeps.
    let mut frozen = ValueVector::filled(n, ExtValue::PosInf);
    let mut y_pre: Vec<ExtValue> = Vec::new();
    let mut next: Vec<ExtValue> = Vec::new();
    let mut stats = SolveStats::default();
    for (q, members) in scc.components.iter().enumerate() {
        let finals = oracle.candidates(arena, &scc, q, OracleQuery::TpValues { exits: y.as_slice() });
        let mut outer = 0u64;
        loop {
            outer += 1;
            if outer > outer_limit {
                return Err(Error::IterationBound { limit: outer_limit });
            }
            y_pre.clear();
            y_pre.extend(members.iter().map(|&v| y[v]));
            for &v in members {
                y[v] = stop_value(y[v]);
            }
            let inner_sets = oracle.candidates(
                arena,
                &scc,
                q,
                OracleQuery::TpInner { exits: frozen.as_slice(), stops: y.as_slice() },
            );
            for (i, &v) in members.iter().enumerate() {
                x[v] = inner_sets.as_ref().map_or(ExtValue::PosInf, |s| s[i].max());
            }
            let mut inner = 0u64;
            loop {
                inner += 1;
                if inner > inner_limit {
                    return Err(Error::IterationBound { limit: inner_limit });
                }
                next.clear();
                for (i, &v) in members.iter().enumerate() {
                    let successor = |u: VertexId| {
                        if scc.dec[u.index()] as usize == q {
                            x[u].min(y[u])
                        } else {
                            frozen[u]
                        }
                    };
                    let (c, _) = best_step(arena, v, successor)?;
                    let mut c = apply_cutoff(c, cutoff);
                    if let Some(sets) = &inner_sets {
                        c = sets[i].floor(c);
                    }
                    if c > x[v] {
                        return Err(Error::Monotonicity { vertex: v });
                    }
                    next.push(c);
                }
                let mut changed = false;
                for (i, &v) in members.iter().enumerate() {
                    changed |= x[v] != next[i];
                    x[v] = next[i];
                }
                if !changed {
                    break;
                }
            }
            stats.inner_iterations += inner;
            let mut changed = false;
            for (i, &v) in members.iter().enumerate() {
                let mut up = lift(x[v], upper);
                if let Some(sets) = &finals {
                    up = sets[i].ceil(up);
                }
                if up < y_pre[i] {
                    return Err(Error::Monotonicity { vertex: v });
                }
                changed |= up != y_pre[i];
                y[v] = up;
            }
            if !changed {
                break;
            }
        }
        stats.outer_iterations += outer;
        for &v in members {
            frozen[v] = x[v].min(stop_value(y[v]));
        }
        if let Some(sets) = &finals {
            check_membership(members, sets, &y)?;
        }
    }
    stats.sweeps = stats.inner_iterations;
    Ok(AccelSolution { values: y, stats, scc })
}
