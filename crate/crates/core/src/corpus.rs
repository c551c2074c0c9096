//! Test corpora: every small arena up to isomorphism, and seeded random
//! arenas.
//!
//! A tiny arena on `n` vertices is a digit string: digit `i` selects the
//! owner and out-edge set of vertex `i` (out-degree 1 or 2, weights in
//! `−w..=w`), or, for MCR corpora, marks the vertex as a target. An arena is
//! emitted only when its digit string is the least among all vertex
//! relabellings, so each isomorphism class appears once.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arena::{normalize_target, Arena, ArenaBuilder, Objective, Player};
use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum VertexShape {
    Plain { owner: Player, edges: Vec<(usize, i64)> },
    Target,
}

/// All isomorphism classes of arenas with `n` vertices, out-degree at most
/// 2 and weights in `−w..=w`.
#[derive(Clone, Debug)]
pub struct TinyCorpus {
    n: usize,
    objective: Objective,
    shapes: Vec<VertexShape>,
    /// `relabel[p][s]`: shape `s` with destinations renamed by permutation `p`.
    relabel: Vec<Vec<usize>>,
    perms: Vec<Vec<usize>>,
    digits: Vec<usize>,
    done: bool,
}

impl TinyCorpus {
    pub fn new(n: usize, w: i64, objective: Objective) -> Result<Self, Error> {
        if !(1..=4).contains(&n) || !(0..=3).contains(&w) {
            return Err(Error::InvalidParameter("tiny corpus supports 1 ≤ n ≤ 4 and 0 ≤ w ≤ 3"));
        }
        let mut shapes = Vec::new();
        for owner in [Player::Max, Player::Min] {
            for a in 0..n {
                for wa in -w..=w {
                    shapes.push(VertexShape::Plain { owner, edges: alloc::vec![(a, wa)] });
                }
            }
            for a in 0..n {
                for b in a + 1..n {
                    for wa in -w..=w {
                        for wb in -w..=w {
                            shapes.push(VertexShape::Plain { owner, edges: alloc::vec![(a, wa), (b, wb)] });
                        }
                    }
                }
            }
        }
        if objective == Objective::Mcr {
            shapes.push(VertexShape::Target);
        }
        let perms = permutations(n);
        let relabel = perms
            .iter()
            .map(|p| {
                shapes
                    .iter()
                    .map(|s| {
                        let moved = match s {
                            VertexShape::Plain { owner, edges } => {
                                let mut e: Vec<_> = edges.iter().map(|&(d, x)| (p[d], x)).collect();
                                e.sort_unstable();
                                VertexShape::Plain { owner: *owner, edges: e }
                            }
                            VertexShape::Target => VertexShape::Target,
                        };
                        shapes.iter().position(|t| *t == moved).expect("shape set is closed under relabelling")
                    })
                    .collect()
            })
            .collect();
        Ok(TinyCorpus { n, objective, shapes, relabel, perms, digits: alloc::vec![0; n], done: false })
    }

    /// Number of digit strings scanned, before isomorphism reduction.
    pub fn raw_size(&self) -> u64 {
        (self.shapes.len() as u64).pow(self.n as u32)
    }

    fn advance(&mut self) {
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.shapes.len() {
                return;
            }
            *d = 0;
        }
        self.done = true;
    }

    fn is_canonical(&self) -> bool {
        let mut moved = alloc::vec![0; self.n];
        for (p, table) in self.perms.iter().zip(&self.relabel).skip(1) {
            for (i, &d) in self.digits.iter().enumerate() {
                moved[p[i]] = table[d];
            }
            if moved < self.digits {
                return false;
            }
        }
        true
    }

    fn build(&self) -> Result<Arena, Error> {
        let mut b = ArenaBuilder::new();
        let ids: Vec<_> = (0..self.n)
            .map(|i| {
                let owner = match &self.shapes[self.digits[i]] {
                    VertexShape::Plain { owner, .. } => *owner,
                    VertexShape::Target => Player::Max,
                };
                b.add_vertex(format!("v{}", i + 1), owner)
            })
            .collect();
        for (i, &d) in self.digits.iter().enumerate() {
            match &self.shapes[d] {
                VertexShape::Plain { edges, .. } => {
                    for &(dst, w) in edges {
                        b.add_edge(ids[i], ids[dst], w);
                    }
                }
                VertexShape::Target => {
                    b.set_target(ids[i], true);
                    b.add_edge(ids[i], ids[i], 0);
                }
            }
        }
        let arena = b.build(self.objective)?;
        Ok(match self.objective {
            Objective::Mcr => normalize_target(&arena)?,
            Objective::Tp => arena,
        })
    }
}

impl Iterator for TinyCorpus {
    type Item = Arena;

    fn next(&mut self) -> Option<Arena> {
        while !self.done {
            let keep = self.is_canonical()
                && (self.objective == Objective::Tp
                    || self.digits.iter().any(|&d| self.shapes[d] == VertexShape::Target));
            let arena = keep.then(|| self.build());
            self.advance();
            if let Some(a) = arena {
                return Some(a.expect("corpus arenas are valid"));
            }
        }
        None
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut p, &mut out);
    out.sort();
    out
}

fn heap_permute(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, p, out);
        if k % 2 == 0 {
            p.swap(i, k - 1);
        } else {
            p.swap(0, k - 1);
        }
    }
}

/// Every tiny arena with 1 to `max_n` vertices, out-degree at most 2 and
/// weights in `−w..=w`, one per isomorphism class. MCR arenas have at least
/// one target and are returned normalized.
pub fn exhaustive(max_n: usize, w: i64, objective: Objective) -> Result<impl Iterator<Item = Arena>, Error> {
    let corpora = (1..=max_n).map(|n| TinyCorpus::new(n, w, objective)).collect::<Result<Vec<_>, _>>()?;
    Ok(corpora.into_iter().flatten())
}

/// Parameters for [`random_arena`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    pub objective: Objective,
    /// Vertex count, drawn from `1..=max_vertices`; MCR arenas gain a fresh
    /// target on normalization.
    pub max_vertices: usize,
    pub max_weight: i64,
    pub max_out_degree: usize,
}

/// The `index`-th random arena of the stream seeded by `seed`.
pub fn random_arena(seed: u64, index: u64, spec: RandomSpec) -> Result<Arena, Error> {
    if spec.max_vertices == 0 || spec.max_out_degree == 0 || spec.max_weight < 0 {
        return Err(Error::InvalidParameter("random arenas need a vertex, an edge and a weight range"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n = rng.random_range(1..=spec.max_vertices);
    let mut b = ArenaBuilder::new();
    let ids: Vec<_> = (0..n)
        .map(|i| {
            let owner = if rng.random_bool(0.5) { Player::Max } else { Player::Min };
            b.add_vertex(format!("v{}", i + 1), owner)
        })
        .collect();
    let mut pool = ids.clone();
    for &v in &ids {
        let degree = rng.random_range(1..=spec.max_out_degree.min(n));
        pool.shuffle(&mut rng);
        for &u in &pool[..degree] {
            b.add_edge(v, u, rng.random_range(-spec.max_weight..=spec.max_weight));
        }
    }
    if spec.objective == Objective::Mcr {
        let mut any = false;
        for &v in &ids {
            let hit = rng.random_bool(0.3);
            b.set_target(v, hit);
            any |= hit;
        }
        if !any {
            b.set_target(ids[rng.random_range(0..n)], true);
        }
        return Ok(normalize_target(&b.build(Objective::Mcr)?)?);
    }
    Ok(b.build(spec.objective)?)
}
