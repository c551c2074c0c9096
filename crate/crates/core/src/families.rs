//! Generators for the named example arenas and the layered benchmark family.

use alloc::format;

use crate::arena::{Arena, ArenaBuilder, Limits, Objective, Player, VertexId};
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    /// Five-vertex total-payoff example with two zero cycles.
    Fig1a,
    /// Three-vertex MCR example whose value iteration needs about `2W` sweeps.
    Fig2a { w: i64 },
    /// Three-vertex total-payoff example whose outer loop needs `W` passes.
    Fig2b { w: i64 },
    /// Five-vertex longest-shortest-path comparison instance.
    LspFig5,
    /// `n` layers of three vertices chained into a target.
    Layered { n: usize, w: i64 },
}

impl FamilySpec {
    pub fn default_objective(&self) -> Objective {
        match self {
            FamilySpec::Fig1a | FamilySpec::Fig2b { .. } | FamilySpec::Layered { .. } => Objective::Tp,
            FamilySpec::Fig2a { .. } | FamilySpec::LspFig5 => Objective::Mcr,
        }
    }
}

pub fn generate(spec: &FamilySpec) -> Result<Arena, Error> {
    generate_with(spec, spec.default_objective(), Limits::default())
}

/// Generates with an explicit objective and representation limits.
pub fn generate_with(spec: &FamilySpec, objective: Objective, limits: Limits) -> Result<Arena, Error> {
    let mut b = ArenaBuilder::with_limits(limits);
    match *spec {
        FamilySpec::Fig1a => {
            let owners = [Player::Max, Player::Min, Player::Min, Player::Max, Player::Min];
            let v: alloc::vec::Vec<VertexId> =
                owners.iter().enumerate().map(|(i, &p)| b.add_vertex(format!("v{}", i + 1), p)).collect();
            for (s, d, w) in [(0, 1, 2), (1, 0, -1), (1, 2, -1), (2, 3, 2), (3, 2, -2), (3, 4, -1), (4, 3, 1)] {
                b.add_edge(v[s], v[d], w);
            }
        }
        FamilySpec::Fig2a { w } => {
            check_weight(w)?;
            let v1 = b.add_vertex("v1", Player::Max);
            let v2 = b.add_vertex("v2", Player::Min);
            let v3 = b.add_vertex("v3", Player::Max);
            b.set_target(v3, true);
            b.add_edge(v1, v2, -1);
            b.add_edge(v1, v3, -w);
            b.add_edge(v2, v1, 0);
            b.add_edge(v2, v3, 0);
            b.add_edge(v3, v3, 0);
        }
        FamilySpec::Fig2b { w } => {
            check_weight(w)?;
            let v1 = b.add_vertex("v1", Player::Max);
            let v2 = b.add_vertex("v2", Player::Min);
            let v3 = b.add_vertex("v3", Player::Max);
            b.add_edge(v1, v2, -w);
            b.add_edge(v2, v2, 1);
            b.add_edge(v2, v3, w);
            b.add_edge(v3, v3, 0);
        }
        FamilySpec::LspFig5 => {
            let v1 = b.add_vertex("v1", Player::Max);
            let v2 = b.add_vertex("v2", Player::Min);
            let v3 = b.add_vertex("v3", Player::Min);
            let v4 = b.add_vertex("v4", Player::Max);
            let t = b.add_vertex("t", Player::Max);
            b.set_target(t, true);
            b.add_edge(v1, v2, -1);
            b.add_edge(v1, v3, 0);
            b.add_edge(v2, v1, 1);
            b.add_edge(v2, t, 3);
            b.add_edge(v3, v1, 1);
            b.add_edge(v3, t, 1);
            b.add_edge(v4, v4, -1);
            b.add_edge(v4, t, 0);
            b.add_edge(t, t, 0);
        }
        FamilySpec::Layered { n, w } => {
            check_weight(w)?;
            if n == 0 {
                return Err(Error::InvalidParameter("layered family needs n >= 1"));
            }
            let count = n.checked_mul(3).and_then(|c| c.checked_add(1));
            match count {
                Some(c) if c <= limits.max_vertices => {}
                _ => return Err(Error::CapExceeded { what: "layered family vertex count" }),
            }
            let mut layers = alloc::vec::Vec::with_capacity(n);
            for k in 0..n {
                let a = b.add_vertex(format!("a{k}"), Player::Max);
                let bk = b.add_vertex(format!("b{k}"), Player::Min);
                let c = b.add_vertex(format!("c{k}"), Player::Min);
                layers.push((a, bk, c));
            }
            let t = b.add_vertex("t", Player::Max);
            b.set_target(t, true);
            b.add_edge(t, t, 0);
            for (k, &(a, bk, c)) in layers.iter().enumerate() {
                let next = layers.get(k + 1).map_or(t, |l| l.0);
                b.add_edge(a, bk, -1);
                b.add_edge(a, c, -w);
                b.add_edge(bk, a, 0);
                b.add_edge(bk, c, 0);
                b.add_edge(c, c, 1);
                b.add_edge(c, next, w);
            }
        }
    }
    Ok(b.build(objective)?)
}

fn check_weight(w: i64) -> Result<(), Error> {
    if w < 1 {
        Err(Error::InvalidParameter("W must be at least 1"))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layered_one_layer_shape() {
        let a = generate(&FamilySpec::Layered { n: 1, w: 5 }).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a.edges().len(), 7);
    }

    #[test]
    fn fig1a_weight_bound() {
        assert_eq!(generate(&FamilySpec::Fig1a).unwrap().max_abs_weight(), 2);
    }

    #[test]
    fn parameters_are_checked() {
        assert!(generate(&FamilySpec::Fig2a { w: 0 }).is_err());
        assert!(generate(&FamilySpec::Layered { n: 0, w: 1 }).is_err());
        let small = Limits { max_vertices: 10, ..Limits::default() };
        assert!(generate_with(&FamilySpec::Layered { n: 3, w: 1 }, Objective::Tp, small).is_ok());
        assert!(generate_with(&FamilySpec::Layered { n: 4, w: 1 }, Objective::Tp, small).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = FamilySpec::Layered { n: 7, w: 3 };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }
}
