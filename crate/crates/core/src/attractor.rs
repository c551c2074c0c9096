//! Min attractors, computed backwards with per-Max-vertex counters.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::arena::{Arena, Player, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttractorResult {
    /// `rank[v]` is the round in which `v` entered, `None` if it never did.
    pub rank: Vec<Option<u32>>,
    /// For attracted Min vertices outside `from`: the successor to move to.
    pub min_reach: Vec<Option<VertexId>>,
    /// For Max vertices outside the attractor: a successor outside it.
    pub max_avoid: Vec<Option<VertexId>>,
}

impl AttractorResult {
    pub fn contains(&self, v: VertexId) -> bool {
        self.rank[v.index()].is_some()
    }

    pub fn attracted(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.rank.iter().enumerate().filter(|(_, r)| r.is_some()).map(|(i, _)| VertexId::new(i))
    }
}

/// The set of vertices from which Min can force a visit to `from`.
pub fn compute_attractor(arena: &Arena, from: &[VertexId]) -> AttractorResult {
    let n = arena.len();
    let preds = arena.predecessors();
    let mut rank: Vec<Option<u32>> = alloc::vec![None; n];
    let mut remaining: Vec<usize> = arena.vertices().map(|v| arena.successors(v).len()).collect();
    let mut queue = VecDeque::new();
    for &v in from {
        if rank[v.index()].is_none() {
            rank[v.index()] = Some(0);
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        let r = rank[u.index()].unwrap_or(0);
        for &p in preds.of(u) {
            if rank[p.index()].is_some() {
                continue;
            }
            let enter = match arena.owner(p) {
                Player::Min => true,
                Player::Max => {
                    remaining[p.index()] -= 1;
                    remaining[p.index()] == 0
                }
            };
            if enter {
                rank[p.index()] = Some(r + 1);
                queue.push_back(p);
            }
        }
    }
    let mut min_reach = alloc::vec![None; n];
    let mut max_avoid = alloc::vec![None; n];
    for v in arena.vertices() {
        match (arena.owner(v), rank[v.index()]) {
            (Player::Min, Some(r)) if r > 0 => {
                min_reach[v.index()] = arena
                    .successors(v)
                    .iter()
                    .filter_map(|e| rank[e.dst.index()].map(|rd| (rd, e.dst)))
                    .min()
                    .map(|(_, d)| d);
            }
            (Player::Max, None) => {
                max_avoid[v.index()] =
                    arena.successors(v).iter().find(|e| rank[e.dst.index()].is_none()).map(|e| e.dst);
            }
            _ => {}
        }
    }
    AttractorResult { rank, min_reach, max_avoid }
}

/// Vertices with MCR value `+∞`: those outside the target attractor.
pub fn classify_plus_infinity(arena: &Arena) -> Vec<VertexId> {
    let targets: Vec<VertexId> = arena.targets().collect();
    let attr = compute_attractor(arena, &targets);
    arena.vertices().filter(|&v| !attr.contains(v)).collect()
}
