//! Strategy extraction, simulation and evaluation.
//!
//! Every strategy implements [`Strategy`], a deterministic Moore machine:
//! memory starts at `initial(start)`, is updated on every move, and is
//! consulted only at vertices of the strategy's owner.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;

use crate::arena::{Arena, ArenaBuilder, Objective, Player, VertexId};
use crate::attractor::compute_attractor;
use crate::error::Error;
use crate::mcr::{best_step, require_normalized, McrOptions, McrSolution};
pub use crate::oracle::MemorylessStrategy;
use crate::oracle::{payoff_of_lasso, Lasso};
use crate::tp::build_game_y;
use crate::value::{ExtValue, ValueVector};

/// Largest product of arena and strategy memory that is explored.
pub const PRODUCT_LIMIT: usize = 2_000_000;

pub trait Strategy {
    type Memory: Clone + Ord;

    fn player(&self) -> Player;
    fn initial(&self, start: VertexId) -> Self::Memory;
    /// The successor chosen at a vertex owned by [`Strategy::player`].
    fn decide(&self, arena: &Arena, memory: &Self::Memory, at: VertexId) -> VertexId;
    /// Memory after the move `from → to` of weight `weight`.
    fn update(&self, memory: &Self::Memory, from: VertexId, to: VertexId, weight: i64) -> Self::Memory;
}

fn first_successor(arena: &Arena, v: VertexId) -> VertexId {
    arena.successors(v)[0].dst
}

impl Strategy for MemorylessStrategy {
    type Memory = ();

    fn player(&self) -> Player {
        self.player
    }

    fn initial(&self, _: VertexId) {}

    fn decide(&self, arena: &Arena, _: &(), at: VertexId) -> VertexId {
        self.get(at).unwrap_or_else(|| first_successor(arena, at))
    }

    fn update(&self, _: &(), _: VertexId, _: VertexId, _: i64) {}
}

/// An explicit Moore machine over memory states `0..memory_size`.
/// Tables are indexed by `m * n + v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MooreStrategy {
    pub player: Player,
    pub vertices: usize,
    pub memory_size: u32,
    pub initial: u32,
    /// Memory after entering vertex `v` with memory `m`.
    pub update: Vec<u32>,
    pub decision: Vec<Option<VertexId>>,
}

impl Strategy for MooreStrategy {
    type Memory = u32;

    fn player(&self) -> Player {
        self.player
    }

    fn initial(&self, _: VertexId) -> u32 {
        self.initial
    }

    fn decide(&self, arena: &Arena, m: &u32, at: VertexId) -> VertexId {
        self.decision[*m as usize * self.vertices + at.index()].unwrap_or_else(|| first_successor(arena, at))
    }

    fn update(&self, m: &u32, _: VertexId, to: VertexId, _: i64) -> u32 {
        self.update[*m as usize * self.vertices + to.index()]
    }
}

/// Min's counter strategy for MCR games: with `m` moves made so far it plays
/// the argmin of `ω(v,v') + x_{k−m−1}(v')` while `m < k`, and the argmin
/// against `x_0` afterwards, where `x_0 … x_k` are the value iterates and
/// `k` the first index with `x_{k+1} = x_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterStrategy {
    iterates: Vec<ValueVector>,
}

impl CounterStrategy {
    pub fn from_trace(trace: &[ValueVector]) -> Self {
        let k = trace.windows(2).position(|w| w[0] == w[1]).unwrap_or(trace.len().saturating_sub(1));
        CounterStrategy { iterates: trace[..=k].to_vec() }
    }

    /// The stabilization index `k`; memory ranges over `0..=k`.
    pub fn horizon(&self) -> u32 {
        (self.iterates.len() - 1) as u32
    }

    fn iterate_for(&self, m: u32) -> &ValueVector {
        let k = self.horizon();
        if m < k {
            &self.iterates[(k - m - 1) as usize]
        } else {
            &self.iterates[0]
        }
    }

    /// The same strategy as an explicit Moore machine with `k + 1` states.
    pub fn to_moore(&self, arena: &Arena) -> MooreStrategy {
        let n = arena.len();
        let k = self.horizon();
        let mut update = Vec::with_capacity((k as usize + 1) * n);
        let mut decision = Vec::with_capacity((k as usize + 1) * n);
        for m in 0..=k {
            for v in arena.vertices() {
                update.push((m + 1).min(k));
                decision.push((arena.owner(v) == Player::Min).then(|| self.decide(arena, &m, v)));
            }
        }
        MooreStrategy { player: Player::Min, vertices: n, memory_size: k + 1, initial: 0, update, decision }
    }
}

impl Strategy for CounterStrategy {
    type Memory = u32;

    fn player(&self) -> Player {
        Player::Min
    }

    fn initial(&self, _: VertexId) -> u32 {
        0
    }

    fn decide(&self, arena: &Arena, m: &u32, at: VertexId) -> VertexId {
        let x = self.iterate_for(*m);
        best_step(arena, at, |u| x[u]).map_or_else(|_| first_successor(arena, at), |(_, arg)| arg)
    }

    fn update(&self, m: &u32, _: VertexId, _: VertexId, _: i64) -> u32 {
        (*m + 1).min(self.horizon())
    }
}

/// Min strategy that follows `sigma1` while tracking how much of its budget
/// the play has used, and commits to the attractor strategy `sigma2` as soon
/// as `sigma2` alone is guaranteed to finish within the remaining budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchingStrategy {
    pub sigma1: MemorylessStrategy,
    pub sigma2: MemorylessStrategy,
    pub values: ValueVector,
    /// Worst-case MCR payoff of `sigma2` from each vertex.
    pub sigma2_values: ValueVector,
    /// Budget used from `−∞` vertices, where no finite value is available.
    pub threshold: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SwitchMemory {
    /// `budget = Val(start) − TP(prefix)`.
    Following {
        budget: i64,
    },
    Switched,
}

impl SwitchingStrategy {
    fn settle(&self, budget: i64, at: VertexId) -> SwitchMemory {
        if ExtValue::Finite(budget) >= self.sigma2_values[at] {
            SwitchMemory::Switched
        } else {
            SwitchMemory::Following { budget }
        }
    }
}

impl Strategy for SwitchingStrategy {
    type Memory = SwitchMemory;

    fn player(&self) -> Player {
        Player::Min
    }

    fn initial(&self, start: VertexId) -> SwitchMemory {
        match self.values[start] {
            ExtValue::Finite(c) => self.settle(c, start),
            ExtValue::NegInf => match self.threshold {
                Some(c) => self.settle(c, start),
                None => SwitchMemory::Following { budget: i64::MIN / 4 },
            },
            ExtValue::PosInf => SwitchMemory::Switched,
        }
    }

    fn decide(&self, arena: &Arena, m: &SwitchMemory, at: VertexId) -> VertexId {
        match m {
            SwitchMemory::Following { .. } => self.sigma1.decide(arena, &(), at),
            SwitchMemory::Switched => self.sigma2.decide(arena, &(), at),
        }
    }

    fn update(&self, m: &SwitchMemory, _: VertexId, to: VertexId, weight: i64) -> SwitchMemory {
        match m {
            SwitchMemory::Following { budget } => self.settle(budget.saturating_sub(weight), to),
            SwitchMemory::Switched => SwitchMemory::Switched,
        }
    }
}

/// Max's memoryless strategy for an MCR arena: argmax of `ω + Val` at
/// vertices with finite or `−∞` value, and a move that stays outside the
/// target attractor at `+∞` vertices.
pub fn extract_max_mcr(arena: &Arena, values: &ValueVector) -> Result<MemorylessStrategy, Error> {
    let t = require_normalized(arena)?;
    let attr = compute_attractor(arena, &[t]);
    let mut choice = alloc::vec![None; arena.len()];
    for v in arena.vertices().filter(|&v| arena.owner(v) == Player::Max && v != t) {
        choice[v.index()] =
            if !attr.contains(v) { attr.max_avoid[v.index()] } else { Some(best_step(arena, v, |u| values[u])?.1) };
    }
    Ok(MemorylessStrategy { player: Player::Max, choice })
}

/// Max's optimal memoryless strategy for either objective.
pub fn extract_max_memoryless(arena: &Arena, values: &ValueVector) -> Result<MemorylessStrategy, Error> {
    match arena.objective() {
        Objective::Mcr => extract_max_mcr(arena, values),
        Objective::Tp => tp_max_strategy(arena, values),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinStrategies {
    pub sigma1: MemorylessStrategy,
    pub sigma2: MemorylessStrategy,
    pub sigma_star: CounterStrategy,
}

/// The move recorded at the last sweep in which each Min vertex's one-step
/// value changed, replayed from the recorded iterates.
pub fn last_change_choices(arena: &Arena, trace: &[ValueVector]) -> Result<MemorylessStrategy, Error> {
    let mut choice: Vec<Option<VertexId>> = alloc::vec![None; arena.len()];
    for i in 1..trace.len() {
        let prev = &trace[i - 1];
        for v in arena.vertices().filter(|&v| arena.owner(v) == Player::Min && !arena.is_target(v)) {
            let (c, arg) = best_step(arena, v, |u| prev[u])?;
            if c != prev[v] {
                choice[v.index()] = Some(arg);
            }
        }
    }
    for v in arena.vertices().filter(|&v| arena.owner(v) == Player::Min && !arena.is_target(v)) {
        choice[v.index()].get_or_insert(first_successor(arena, v));
    }
    Ok(MemorylessStrategy { player: Player::Min, choice })
}

/// Min's strategies from a traced MCR solve: `sigma1` (last-change moves),
/// `sigma2` (attractor moves) and the counter strategy.
pub fn extract_min_mcr(arena: &Arena, solution: &McrSolution) -> Result<MinStrategies, Error> {
    let t = require_normalized(arena)?;
    let trace = solution.trace.as_ref().ok_or(Error::MissingTrace)?;
    let sigma1 = last_change_choices(arena, trace)?;
    let attr = compute_attractor(arena, &[t]);
    let mut choice = alloc::vec![None; arena.len()];
    for v in arena.vertices().filter(|&v| arena.owner(v) == Player::Min && v != t) {
        choice[v.index()] = Some(attr.min_reach[v.index()].unwrap_or_else(|| first_successor(arena, v)));
    }
    let sigma2 = MemorylessStrategy { player: Player::Min, choice };
    Ok(MinStrategies { sigma1, sigma2, sigma_star: CounterStrategy::from_trace(trace) })
}

/// Builds the switching strategy. `threshold` is the budget used from `−∞`
/// vertices and defaults to `−|V|·W − 1`.
pub fn make_switching(
    arena: &Arena,
    sigma1: MemorylessStrategy,
    sigma2: MemorylessStrategy,
    values: ValueVector,
    threshold: Option<i64>,
) -> Result<SwitchingStrategy, Error> {
    let sigma2_values = best_response(arena, &sigma2)?;
    let floor = -(arena.len() as i64) * arena.max_abs_weight() - 1;
    let threshold = threshold.or(Some(floor));
    Ok(SwitchingStrategy { sigma1, sigma2, values, sigma2_values, threshold })
}

/// Min's memoryless total-payoff strategy read off the inner game `G_Y`
/// solved at `Y = Val`: at `v`, go to `v'` when the recorded move of `v` in
/// `G_Y` is to the interior vertex of `v'`.
pub fn project_tp_min(arena: &Arena, gy_sigma1: &MemorylessStrategy) -> MemorylessStrategy {
    let n = arena.len();
    let choice = arena
        .vertices()
        .map(|v| {
            (arena.owner(v) == Player::Min).then(|| match gy_sigma1.get(v) {
                Some(u) if u.index() >= n && u.index() < 2 * n => VertexId::new(u.index() - n),
                _ => first_successor(arena, v),
            })
        })
        .collect();
    MemorylessStrategy { player: Player::Min, choice }
}

/// Min's optimal memoryless total-payoff strategy: the projection of the
/// last-change Min moves of `G_Val` on vertices of finite or `+∞` value, and
/// an energy strategy for weights `−|R|·ω − 1` on the `−∞` region, which
/// keeps every reachable cycle negative.
pub fn tp_min_strategy(arena: &Arena, values: &ValueVector) -> Result<MemorylessStrategy, Error> {
    let gy = build_game_y(arena, values)?;
    let sol = crate::mcr::solve_mcr(&gy, McrOptions { record_trace: true })?;
    let trace = sol.trace.as_ref().ok_or(Error::MissingTrace)?;
    let mut strategy = project_tp_min(arena, &last_change_choices(&gy, trace)?);
    energy_choices(arena, values, Player::Min, &mut strategy.choice);
    Ok(strategy)
}

/// Max's optimal memoryless total-payoff strategy.
///
/// On finite-valued vertices Max keeps to value-preserving edges and must
/// eventually stop visiting positive-valued vertices: a co-Büchi game on the
/// tight-edge graph, solved by alternating attractors. On `+∞` vertices Max
/// plays an energy strategy for weights `|R|·ω − 1`, which makes every
/// reachable cycle positive. Elsewhere it plays the argmax.
pub fn tp_max_strategy(arena: &Arena, values: &ValueVector) -> Result<MemorylessStrategy, Error> {
    crate::tp::require_tp(arena)?;
    let n = arena.len();
    let mut choice: Vec<Option<VertexId>> = alloc::vec![None; n];
    for v in arena.vertices().filter(|&v| arena.owner(v) == Player::Max) {
        choice[v.index()] = Some(best_step(arena, v, |u| values[u])?.1);
    }
    cobuchi_choices(arena, values, &mut choice)?;
    energy_choices(arena, values, Player::Max, &mut choice);
    Ok(MemorylessStrategy { player: Player::Max, choice })
}

fn tight(values: &ValueVector, v: VertexId, u: VertexId, w: i64) -> bool {
    values[u].is_finite() && values[u].add_weight(w).ok() == Some(values[v])
}

fn cobuchi_choices(arena: &Arena, values: &ValueVector, choice: &mut [Option<VertexId>]) -> Result<(), Error> {
    let n = arena.len();
    let mut remaining: Vec<bool> = arena.vertices().map(|v| values[v].is_finite()).collect();
    let tight_succ = |v: VertexId, live: &[bool]| -> Vec<VertexId> {
        arena
            .successors(v)
            .iter()
            .filter(|e| live[e.dst.index()] && tight(values, v, e.dst, e.weight))
            .map(|e| e.dst)
            .collect()
    };
    while remaining.iter().any(|&r| r) {
        let bad: Vec<VertexId> =
            arena.vertices().filter(|&v| remaining[v.index()] && values[v] > ExtValue::ZERO).collect();
        let (in_bad, _) = sub_attractor(arena, &remaining, &bad, Player::Min, &tight_succ);
        let safe: Vec<VertexId> = arena.vertices().filter(|&v| remaining[v.index()] && !in_bad[v.index()]).collect();
        if safe.is_empty() {
            return Err(Error::InvalidParameter("values are not the total-payoff values of the arena"));
        }
        let mut safe_mask = alloc::vec![false; n];
        for &v in &safe {
            safe_mask[v.index()] = true;
            if arena.owner(v) == Player::Max {
                choice[v.index()] = tight_succ(v, &safe_mask_or(&remaining, &in_bad)).first().copied();
            }
        }
        let (region, via) = sub_attractor(arena, &remaining, &safe, Player::Max, &tight_succ);
        for v in arena.vertices() {
            if region[v.index()] && !safe_mask[v.index()] && arena.owner(v) == Player::Max {
                choice[v.index()] = via[v.index()];
            }
            if region[v.index()] {
                remaining[v.index()] = false;
            }
        }
    }
    Ok(())
}

fn safe_mask_or(remaining: &[bool], excluded: &[bool]) -> Vec<bool> {
    remaining.iter().zip(excluded).map(|(&r, &e)| r && !e).collect()
}

/// Attractor for `player` to `goal` inside the live subgraph, over the edges
/// given by `succ`. Returns membership and, for the attracting player's
/// vertices, the successor through which they were attracted.
fn sub_attractor(
    arena: &Arena,
    live: &[bool],
    goal: &[VertexId],
    player: Player,
    succ: &dyn Fn(VertexId, &[bool]) -> Vec<VertexId>,
) -> (Vec<bool>, Vec<Option<VertexId>>) {
    let n = arena.len();
    let mut inside = alloc::vec![false; n];
    let mut via = alloc::vec![None; n];
    for &g in goal {
        inside[g.index()] = true;
    }
    let lists: Vec<Vec<VertexId>> =
        arena.vertices().map(|v| if live[v.index()] { succ(v, live) } else { Vec::new() }).collect();
    let mut grew = true;
    while grew {
        grew = false;
        for v in arena.vertices() {
            if !live[v.index()] || inside[v.index()] {
                continue;
            }
            let list = &lists[v.index()];
            let enter = if arena.owner(v) == player {
                let hit = list.iter().find(|u| inside[u.index()]).copied();
                via[v.index()] = hit;
                hit.is_some()
            } else {
                !list.is_empty() && list.iter().all(|u| inside[u.index()])
            };
            if enter {
                inside[v.index()] = true;
                grew = true;
            }
        }
    }
    (inside, via)
}

/// Energy strategy for `player` on the region where its value is infinite:
/// with `R` the region and `ω'` the weights scaled by `|R|` in the player's
/// favour minus one, the player keeps the running `ω'`-sum bounded below
/// from some finite credit, so every cycle it allows has positive `ω'`-weight.
fn energy_choices(arena: &Arena, values: &ValueVector, player: Player, choice: &mut [Option<VertexId>]) {
    let infinite = match player {
        Player::Max => ExtValue::PosInf,
        Player::Min => ExtValue::NegInf,
    };
    let region: Vec<bool> = arena.vertices().map(|v| values[v] == infinite).collect();
    let size = region.iter().filter(|&&r| r).count() as i64;
    if size == 0 {
        return;
    }
    let shifted = |w: i64| match player {
        Player::Max => size * w - 1,
        Player::Min => -size * w - 1,
    };
    let bound: i64 = arena
        .edges()
        .iter()
        .filter(|e| region[e.src.index()] && region[e.dst.index()])
        .map(|e| (-shifted(e.weight)).max(0))
        .max()
        .unwrap_or(0)
        .saturating_mul(size);
    // Least credit from which the player keeps the shifted running sum
    // nonnegative; `None` stands for "not enough credit below the bound".
    let mut credit: Vec<Option<i64>> = alloc::vec![Some(0); arena.len()];
    let need = |c: Option<i64>, w: i64| c.map(|c| (c - shifted(w)).max(0)).filter(|&x| x <= bound);
    let mut changed = true;
    while changed {
        changed = false;
        for v in arena.vertices().filter(|&v| region[v.index()]) {
            let options = arena
                .successors(v)
                .iter()
                .filter(|e| region[e.dst.index()])
                .map(|e| need(credit[e.dst.index()], e.weight));
            let c = if arena.owner(v) == player {
                options.min_by(|a, b| cmp_credit(*a, *b))
            } else {
                options.max_by(|a, b| cmp_credit(*a, *b))
            }
            .flatten();
            if c != credit[v.index()] {
                credit[v.index()] = c;
                changed = true;
            }
        }
    }
    for v in arena.vertices().filter(|&v| region[v.index()] && arena.owner(v) == player) {
        let mut best: Option<(Option<i64>, VertexId)> = None;
        for e in arena.successors(v).iter().filter(|e| region[e.dst.index()]) {
            let c = need(credit[e.dst.index()], e.weight);
            if best.map_or(true, |(b, _)| cmp_credit(c, b).is_lt()) {
                best = Some((c, e.dst));
            }
        }
        if let Some((_, u)) = best {
            choice[v.index()] = Some(u);
        }
    }
}

/// Credits ordered with `None` (unbounded) above every number.
fn cmp_credit(a: Option<i64>, b: Option<i64>) -> core::cmp::Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => core::cmp::Ordering::Less,
        (None, Some(_)) => core::cmp::Ordering::Greater,
        (None, None) => core::cmp::Ordering::Equal,
    }
}

/// Keeps only the chosen edge at each vertex of the strategy's owner.
pub fn restrict(arena: &Arena, strategy: &MemorylessStrategy) -> Result<Arena, Error> {
    let mut b = ArenaBuilder::new();
    for v in arena.vertices() {
        let id = b.add_vertex(arena.name(v), arena.owner(v));
        b.set_target(id, arena.is_target(v));
    }
    for v in arena.vertices() {
        let chosen = (arena.owner(v) == strategy.player).then(|| strategy.decide(arena, &(), v));
        for e in arena.successors(v) {
            if chosen.map_or(true, |c| c == e.dst) {
                b.add_edge(e.src, e.dst, e.weight);
            }
        }
    }
    Ok(b.build(arena.objective())?)
}

/// The outcome of a strategy profile from one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// For MCR plays that reach a target, the cycle is that target alone.
    pub lasso: Lasso,
    pub payoff: ExtValue,
}

/// Simulates the unique play of a profile. MCR plays stop at the first
/// target; otherwise the play is closed into a lasso when a
/// (vertex, memory, memory) state repeats.
pub fn play_out<A: Strategy, B: Strategy>(
    arena: &Arena,
    max: &A,
    min: &B,
    start: VertexId,
    max_steps: usize,
) -> Result<Outcome, Error> {
    if max.player() != Player::Max || min.player() != Player::Min {
        return Err(Error::InvalidParameter("strategies are assigned to the wrong players"));
    }
    let objective = arena.objective();
    let mut seen: BTreeMap<(VertexId, A::Memory, B::Memory), usize> = BTreeMap::new();
    let mut path = Vec::new();
    let (mut v, mut ma, mut mb) = (start, max.initial(start), min.initial(start));
    loop {
        if objective == Objective::Mcr && arena.is_target(v) {
            let lasso = Lasso { prefix: path, cycle: alloc::vec![v] };
            let payoff = payoff_of_lasso(arena, &lasso, objective)?;
            return Ok(Outcome { lasso, payoff });
        }
        if let Some(&i) = seen.get(&(v, ma.clone(), mb.clone())) {
            let cycle = path.split_off(i);
            let lasso = Lasso { prefix: path, cycle };
            let payoff = payoff_of_lasso(arena, &lasso, objective)?;
            return Ok(Outcome { lasso, payoff });
        }
        if path.len() >= max_steps {
            return Err(Error::StepBudget { steps: max_steps });
        }
        seen.insert((v, ma.clone(), mb.clone()), path.len());
        path.push(v);
        let to = match arena.owner(v) {
            Player::Max => max.decide(arena, &ma, v),
            Player::Min => min.decide(arena, &mb, v),
        };
        let w = arena.weight(v, to).ok_or(Error::InvalidParameter("strategy chose a non-edge"))?;
        ma = max.update(&ma, v, to, w);
        mb = min.update(&mb, v, to, w);
        v = to;
    }
}

struct Product {
    vertex: Vec<VertexId>,
    edges: Vec<Vec<(usize, i64)>>,
    starts: Vec<usize>,
}

fn build_product<S: Strategy>(arena: &Arena, fixed: &S) -> Result<Product, Error> {
    let mut index: BTreeMap<(VertexId, S::Memory), usize> = BTreeMap::new();
    let mut vertex = Vec::new();
    let mut memory = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |v: VertexId,
                      m: S::Memory,
                      vertex: &mut Vec<VertexId>,
                      memory: &mut Vec<S::Memory>,
                      queue: &mut VecDeque<usize>|
     -> Result<usize, Error> {
        if let Some(&i) = index.get(&(v, m.clone())) {
            return Ok(i);
        }
        let i = vertex.len();
        if i >= PRODUCT_LIMIT {
            return Err(Error::ProductTooLarge { limit: PRODUCT_LIMIT });
        }
        index.insert((v, m.clone()), i);
        vertex.push(v);
        memory.push(m);
        queue.push_back(i);
        Ok(i)
    };
    let mut starts = Vec::with_capacity(arena.len());
    for v in arena.vertices() {
        starts.push(intern(v, fixed.initial(v), &mut vertex, &mut memory, &mut queue)?);
    }
    let mut edges: Vec<Vec<(usize, i64)>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let v = vertex[i];
        let m = memory[i].clone();
        let mut out = Vec::new();
        if !arena.is_target(v) {
            if arena.owner(v) == fixed.player() {
                let to = fixed.decide(arena, &m, v);
                let w = arena.weight(v, to).ok_or(Error::InvalidParameter("strategy chose a non-edge"))?;
                let j = intern(to, fixed.update(&m, v, to, w), &mut vertex, &mut memory, &mut queue)?;
                out.push((j, w));
            } else {
                for e in arena.successors(v) {
                    let j = intern(e.dst, fixed.update(&m, v, e.dst, e.weight), &mut vertex, &mut memory, &mut queue)?;
                    out.push((j, e.weight));
                }
            }
        }
        if edges.len() <= i {
            edges.resize(i + 1, Vec::new());
        }
        edges[i] = out;
    }
    edges.resize(vertex.len(), Vec::new());
    Ok(Product { vertex, edges, starts })
}

/// The MCR value of every vertex when one player is fixed to `fixed` and
/// the other responds optimally, with memory starting at `initial(v)`.
pub fn best_response<S: Strategy>(arena: &Arena, fixed: &S) -> Result<ValueVector, Error> {
    require_normalized(arena)?;
    let p = build_product(arena, fixed)?;
    let values = match fixed.player() {
        Player::Min => longest_to_target(arena, &p),
        Player::Max => shortest_to_target(arena, &p),
    };
    Ok(ValueVector::from_vec(p.starts.iter().map(|&s| values[s]).collect()))
}

/// Max alone against a fixed Min: `+∞` where Max can avoid the target,
/// otherwise the longest path, computed in attractor order.
fn longest_to_target(arena: &Arena, p: &Product) -> Vec<ExtValue> {
    let n = p.vertex.len();
    let mut preds: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for (i, out) in p.edges.iter().enumerate() {
        for &(j, _) in out {
            preds[j].push(i);
        }
    }
    let mut remaining: Vec<usize> = p.edges.iter().map(Vec::len).collect();
    let mut value = alloc::vec![ExtValue::PosInf; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| arena.is_target(p.vertex[i])).collect();
    for &i in &queue {
        value[i] = ExtValue::ZERO;
    }
    while let Some(j) = queue.pop_front() {
        for &i in &preds[j] {
            remaining[i] -= 1;
            if remaining[i] == 0 {
                // Every successor is now final; the largest one is the value.
                value[i] = p.edges[i]
                    .iter()
                    .map(|&(k, w)| value[k].add_weight(w).unwrap_or(ExtValue::PosInf))
                    .max()
                    .unwrap_or(ExtValue::PosInf);
                queue.push_back(i);
            }
        }
    }
    value
}

/// Min alone against a fixed Max: Bellman–Ford towards the target with
/// `−∞` for states that reach a negative cycle from which the target is
/// still reachable.
fn shortest_to_target(arena: &Arena, p: &Product) -> Vec<ExtValue> {
    let n = p.vertex.len();
    let mut d: Vec<Option<i64>> = (0..n).map(|i| arena.is_target(p.vertex[i]).then_some(0)).collect();
    for _ in 0..n {
        let mut changed = false;
        for i in 0..n {
            for &(j, w) in &p.edges[i] {
                if let Some(dj) = d[j] {
                    if d[i].map_or(true, |di| w + dj < di) {
                        d[i] = Some(w + dj);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut neg = alloc::vec![false; n];
    for i in 0..n {
        for &(j, w) in &p.edges[i] {
            if let (Some(di), Some(dj)) = (d[i], d[j]) {
                if w + dj < di {
                    neg[i] = true;
                }
            }
        }
    }
    let mut grew = true;
    while grew {
        grew = false;
        for i in 0..n {
            if !neg[i] && p.edges[i].iter().any(|&(j, _)| neg[j]) {
                neg[i] = true;
                grew = true;
            }
        }
    }
    (0..n)
        .map(|i| match (neg[i], d[i]) {
            (true, _) => ExtValue::NegInf,
            (false, Some(x)) => ExtValue::Finite(x),
            (false, None) => ExtValue::PosInf,
        })
        .collect()
}
