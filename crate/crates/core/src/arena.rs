//! Weighted game graphs with a Min/Max vertex partition.
//!
//! An [`Arena`] is immutable once built. Edges are stored in CSR form sorted
//! by `(src, dst)`, so iterating a vertex's successors visits them in
//! increasing index order; every argmin/argmax in the crate relies on this
//! for its smallest-index tie-break.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub const DEFAULT_MAX_VERTICES: usize = 1_000_000;
pub const MAX_ABS_WEIGHT: i64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(u32);

impl VertexId {
    pub fn new(index: usize) -> Self {
        VertexId(u32::try_from(index).expect("vertex index exceeds u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    Max,
    Min,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Max => Player::Min,
            Player::Min => Player::Max,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Max => "max",
            Player::Min => "min",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Min-cost reachability: weight sum up to the first target visit.
    Mcr,
    /// Total payoff: liminf of partial sums.
    Tp,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Mcr => "mcr",
            Objective::Tp => "tp",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: i64,
}

/// Representation caps checked by [`ArenaBuilder::build`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_vertices: usize,
    pub max_abs_weight: i64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_vertices: DEFAULT_MAX_VERTICES, max_abs_weight: MAX_ABS_WEIGHT }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArenaError {
    DeadlockVertex { vertex: String },
    WeightOverflow { src: String, dst: String, weight: i64 },
    DuplicateEdge { src: String, dst: String },
    EmptyTargetForMcr,
    BadName { name: String },
    DuplicateName { name: String },
    TooManyVertices { count: usize, limit: usize },
    UnknownVertex { index: usize },
}

impl fmt::Display for ArenaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArenaError::DeadlockVertex { vertex } => write!(f, "vertex {vertex} has no outgoing edge"),
            ArenaError::WeightOverflow { src, dst, weight } => {
                write!(f, "edge {src} -> {dst} has weight {weight}, beyond +-{MAX_ABS_WEIGHT}")
            }
            ArenaError::DuplicateEdge { src, dst } => write!(f, "duplicate edge {src} -> {dst}"),
            ArenaError::EmptyTargetForMcr => f.write_str("min-cost reachability arena without a target"),
            ArenaError::BadName { name } => write!(f, "invalid vertex name {name:?}"),
            ArenaError::DuplicateName { name } => write!(f, "vertex name {name} declared twice"),
            ArenaError::TooManyVertices { count, limit } => {
                write!(f, "{count} vertices exceed the limit of {limit}")
            }
            ArenaError::UnknownVertex { index } => write!(f, "edge endpoint #{index} does not exist"),
        }
    }
}

/// True for names matching `[A-Za-z0-9_]+`.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

#[derive(Clone, Debug)]
pub struct ArenaBuilder {
    names: Vec<String>,
    owners: Vec<Player>,
    targets: Vec<bool>,
    edges: Vec<Edge>,
    limits: Limits,
}

impl Default for ArenaBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl ArenaBuilder {
    pub fn new() -> Self {
        Self::with_limits(Limits::default())
    }

    pub fn with_limits(limits: Limits) -> Self {
        ArenaBuilder { names: Vec::new(), owners: Vec::new(), targets: Vec::new(), edges: Vec::new(), limits }
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn add_vertex(&mut self, name: impl Into<String>, owner: Player) -> VertexId {
        let id = VertexId::new(self.names.len());
        self.names.push(name.into());
        self.owners.push(owner);
        self.targets.push(false);
        id
    }

    pub fn set_target(&mut self, v: VertexId, target: bool) {
        self.targets[v.index()] = target;
    }

    pub fn add_edge(&mut self, src: VertexId, dst: VertexId, weight: i64) {
        self.edges.push(Edge { src, dst, weight });
    }

    pub fn retain_edges(&mut self, keep: impl FnMut(&Edge) -> bool) {
        self.edges.retain(keep);
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.index()]
    }

    pub fn owner(&self, v: VertexId) -> Player {
        self.owners[v.index()]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Checks every arena invariant without consuming the builder.
    pub fn validate(&self, objective: Objective) -> Result<(), ArenaError> {
        let n = self.names.len();
        if n > self.limits.max_vertices {
            return Err(ArenaError::TooManyVertices { count: n, limit: self.limits.max_vertices });
        }
        let mut seen = BTreeSet::new();
        for name in &self.names {
            if !is_valid_name(name) {
                return Err(ArenaError::BadName { name: name.clone() });
            }
            if !seen.insert(name.as_str()) {
                return Err(ArenaError::DuplicateName { name: name.clone() });
            }
        }
        let mut pairs = BTreeSet::new();
        let mut has_out = alloc::vec![false; n];
        for e in &self.edges {
            for end in [e.src, e.dst] {
                if end.index() >= n {
                    return Err(ArenaError::UnknownVertex { index: end.index() });
                }
            }
            if e.weight.unsigned_abs() > self.limits.max_abs_weight.unsigned_abs() {
                return Err(ArenaError::WeightOverflow {
                    src: self.names[e.src.index()].clone(),
                    dst: self.names[e.dst.index()].clone(),
                    weight: e.weight,
                });
            }
            if !pairs.insert((e.src, e.dst)) {
                return Err(ArenaError::DuplicateEdge {
                    src: self.names[e.src.index()].clone(),
                    dst: self.names[e.dst.index()].clone(),
                });
            }
            has_out[e.src.index()] = true;
        }
        if let Some(v) = has_out.iter().position(|&b| !b) {
            return Err(ArenaError::DeadlockVertex { vertex: self.names[v].clone() });
        }
        if objective == Objective::Mcr && !self.targets.iter().any(|&t| t) {
            return Err(ArenaError::EmptyTargetForMcr);
        }
        Ok(())
    }

    pub fn build(mut self, objective: Objective) -> Result<Arena, ArenaError> {
        self.validate(objective)?;
        let n = self.names.len();
        self.edges.sort_unstable_by_key(|e| (e.src, e.dst));
        let mut offsets = alloc::vec![0u32; n + 1];
        for e in &self.edges {
            offsets[e.src.index() + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Ok(Arena {
            objective,
            names: self.names,
            owners: self.owners,
            targets: self.targets,
            offsets,
            edges: self.edges,
        })
    }
}

/// A validated game graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    objective: Objective,
    names: Vec<String>,
    owners: Vec<Player>,
    targets: Vec<bool>,
    offsets: Vec<u32>,
    edges: Vec<Edge>,
}

impl Arena {
    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertices(&self) -> impl DoubleEndedIterator<Item = VertexId> + ExactSizeIterator + Clone {
        (0..self.names.len()).map(VertexId::new)
    }

    pub fn owner(&self, v: VertexId) -> Player {
        self.owners[v.index()]
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn find(&self, name: &str) -> Option<VertexId> {
        self.names.iter().position(|n| n == name).map(VertexId::new)
    }

    pub fn is_target(&self, v: VertexId) -> bool {
        self.targets[v.index()]
    }

    pub fn targets(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(move |&v| self.targets[v.index()])
    }

    /// Out-edges of `v` in increasing destination order.
    #[inline]
    pub fn successors(&self, v: VertexId) -> &[Edge] {
        let i = v.index();
        &self.edges[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weight(&self, src: VertexId, dst: VertexId) -> Option<i64> {
        let succ = self.successors(src);
        succ.binary_search_by_key(&dst, |e| e.dst).ok().map(|i| succ[i].weight)
    }

    /// `W`, the largest absolute edge weight.
    pub fn max_abs_weight(&self) -> i64 {
        self.edges.iter().map(|e| e.weight.abs()).max().unwrap_or(0)
    }

    /// Reverse adjacency in CSR form: for each vertex, the sources of edges into it.
    pub fn predecessors(&self) -> Predecessors {
        let n = self.len();
        let mut offsets = alloc::vec![0u32; n + 1];
        for e in &self.edges {
            offsets[e.dst.index() + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut sources = alloc::vec![VertexId(0); self.edges.len()];
        for e in &self.edges {
            let slot = &mut fill[e.dst.index()];
            sources[*slot as usize] = e.src;
            *slot += 1;
        }
        Predecessors { offsets, sources }
    }

    pub fn to_builder(&self) -> ArenaBuilder {
        ArenaBuilder {
            names: self.names.clone(),
            owners: self.owners.clone(),
            targets: self.targets.clone(),
            edges: self.edges.clone(),
            limits: Limits::default(),
        }
    }

    pub fn with_objective(&self, objective: Objective) -> Result<Arena, ArenaError> {
        self.to_builder().build(objective)
    }

    /// All weights multiplied by `c`.
    pub fn scaled(&self, c: i64) -> Result<Arena, ArenaError> {
        let mut b = self.to_builder();
        for e in &mut b.edges {
            e.weight = e.weight.checked_mul(c).unwrap_or(i64::MAX);
        }
        b.build(self.objective)
    }

    /// The unique target if the arena is in canonical single-target form:
    /// exactly one target whose only out-edge is a 0-weight self-loop.
    pub fn canonical_target(&self) -> Option<VertexId> {
        let mut targets = self.targets();
        let t = targets.next()?;
        if targets.next().is_some() {
            return None;
        }
        match self.successors(t) {
            [e] if e.dst == t && e.weight == 0 => Some(t),
            _ => None,
        }
    }

    /// A name not used by any vertex, derived from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        fresh_name(base, |n| self.find(n).is_some())
    }
}

/// Appends underscores to `base` until `taken` rejects it.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut name = String::from(base);
    while taken(&name) {
        name.push('_');
    }
    name
}

#[derive(Clone, Debug)]
pub struct Predecessors {
    offsets: Vec<u32>,
    sources: Vec<VertexId>,
}

impl Predecessors {
    pub fn of(&self, v: VertexId) -> &[VertexId] {
        let i = v.index();
        &self.sources[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }
}

/// Rewrites an MCR arena so that it has a single fresh Max target `t` with a
/// 0-weight self-loop. Each original target loses its out-edges and gets a
/// single 0-weight edge to `t` instead, which keeps every MCR value intact
/// because play stops at the first target visit anyway. Canonical arenas are
/// returned unchanged.
pub fn normalize_target(arena: &Arena) -> Result<Arena, ArenaError> {
    if arena.objective() != Objective::Mcr {
        return Err(ArenaError::EmptyTargetForMcr);
    }
    if arena.canonical_target().is_some() {
        return Ok(arena.clone());
    }
    let mut b = ArenaBuilder::new();
    for v in arena.vertices() {
        b.add_vertex(arena.name(v), arena.owner(v));
    }
    let t = b.add_vertex(arena.fresh_name("t"), Player::Max);
    b.set_target(t, true);
    b.add_edge(t, t, 0);
    for v in arena.vertices() {
        if arena.is_target(v) {
            b.add_edge(v, t, 0);
        } else {
            for e in arena.successors(v) {
                b.add_edge(e.src, e.dst, e.weight);
            }
        }
    }
    b.build(Objective::Mcr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2a(w: i64) -> Arena {
        let mut b = ArenaBuilder::new();
        let v1 = b.add_vertex("v1", Player::Max);
        let v2 = b.add_vertex("v2", Player::Min);
        let v3 = b.add_vertex("v3", Player::Max);
        b.set_target(v3, true);
        b.add_edge(v1, v2, -1);
        b.add_edge(v1, v3, -w);
        b.add_edge(v2, v1, 0);
        b.add_edge(v2, v3, 0);
        b.add_edge(v3, v3, 0);
        b.build(Objective::Mcr).unwrap()
    }

    #[test]
    fn fig2a_validates() {
        let a = fig2a(50);
        assert_eq!(a.len(), 3);
        assert_eq!(a.edges().len(), 5);
        assert_eq!(a.max_abs_weight(), 50);
        assert_eq!(a.canonical_target(), Some(VertexId::new(2)));
    }

    #[test]
    fn deadlock_is_rejected() {
        let mut b = ArenaBuilder::new();
        let a = b.add_vertex("a", Player::Max);
        b.add_vertex("b", Player::Min);
        b.add_edge(a, a, 0);
        assert_eq!(b.build(Objective::Tp), Err(ArenaError::DeadlockVertex { vertex: "b".into() }));
    }

    #[test]
    fn mcr_without_target_is_rejected() {
        let mut b = ArenaBuilder::new();
        let a = b.add_vertex("a", Player::Max);
        b.add_edge(a, a, 0);
        assert_eq!(b.clone().build(Objective::Mcr), Err(ArenaError::EmptyTargetForMcr));
        assert!(b.build(Objective::Tp).is_ok());
    }

    #[test]
    fn weight_cap_and_duplicates() {
        let mut b = ArenaBuilder::new();
        let a = b.add_vertex("a", Player::Max);
        b.add_edge(a, a, MAX_ABS_WEIGHT + 1);
        assert!(matches!(b.build(Objective::Tp), Err(ArenaError::WeightOverflow { .. })));
        let mut b = ArenaBuilder::new();
        let a = b.add_vertex("a", Player::Max);
        b.add_edge(a, a, 1);
        b.add_edge(a, a, 2);
        assert!(matches!(b.build(Objective::Tp), Err(ArenaError::DuplicateEdge { .. })));
    }

    #[test]
    fn names_are_checked() {
        let mut b = ArenaBuilder::new();
        let a = b.add_vertex("a-b", Player::Max);
        b.add_edge(a, a, 0);
        assert!(matches!(b.build(Objective::Tp), Err(ArenaError::BadName { .. })));
        let mut b = ArenaBuilder::new();
        let a = b.add_vertex("a", Player::Max);
        let c = b.add_vertex("a", Player::Max);
        b.add_edge(a, a, 0);
        b.add_edge(c, c, 0);
        assert!(matches!(b.build(Objective::Tp), Err(ArenaError::DuplicateName { .. })));
    }

    #[test]
    fn vertex_cap_is_enforced() {
        let mut b = ArenaBuilder::with_limits(Limits { max_vertices: 1, ..Limits::default() });
        for name in ["a", "b"] {
            let v = b.add_vertex(name, Player::Max);
            b.add_edge(v, v, 0);
        }
        assert_eq!(b.build(Objective::Tp), Err(ArenaError::TooManyVertices { count: 2, limit: 1 }));
    }

    #[test]
    fn successors_are_sorted() {
        let mut b = ArenaBuilder::new();
        let a = b.add_vertex("a", Player::Max);
        let c = b.add_vertex("c", Player::Min);
        b.add_edge(a, c, 1);
        b.add_edge(c, a, 2);
        b.add_edge(a, a, 3);
        let arena = b.build(Objective::Tp).unwrap();
        let dsts: Vec<_> = arena.successors(a).iter().map(|e| e.dst).collect();
        assert_eq!(dsts, [a, c]);
        assert_eq!(arena.weight(a, c), Some(1));
        assert_eq!(arena.weight(c, c), None);
        assert_eq!(arena.predecessors().of(a), &[a, c]);
    }

    #[test]
    fn normalize_is_identity_on_canonical() {
        let a = fig2a(3);
        assert_eq!(normalize_target(&a).unwrap(), a);
    }

    #[test]
    fn normalize_two_targets() {
        let mut b = ArenaBuilder::new();
        let x = b.add_vertex("a", Player::Min);
        let y = b.add_vertex("b", Player::Max);
        let z = b.add_vertex("c", Player::Min);
        b.set_target(x, true);
        b.set_target(y, true);
        b.add_edge(x, y, 4);
        b.add_edge(y, y, 1);
        b.add_edge(z, x, -1);
        b.add_edge(z, y, 2);
        let arena = b.build(Objective::Mcr).unwrap();
        let norm = normalize_target(&arena).unwrap();
        assert_eq!(norm.len(), 4);
        let t = norm.canonical_target().unwrap();
        assert_eq!(norm.name(t), "t");
        assert_eq!(norm.owner(t), Player::Max);
        assert_eq!(norm.weight(x, t), Some(0));
        assert_eq!(norm.weight(y, t), Some(0));
        assert_eq!(norm.weight(x, y), None);
        assert_eq!(normalize_target(&norm).unwrap(), norm);
    }

    #[test]
    fn fresh_name_avoids_collisions() {
        let mut b = ArenaBuilder::new();
        let t = b.add_vertex("t", Player::Max);
        b.set_target(t, true);
        b.add_edge(t, t, 1);
        let arena = b.build(Objective::Mcr).unwrap();
        let norm = normalize_target(&arena).unwrap();
        assert_eq!(norm.name(norm.canonical_target().unwrap()), "t_");
    }
}
