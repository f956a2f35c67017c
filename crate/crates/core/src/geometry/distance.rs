use std::collections::VecDeque;

use super::GeneratorSet;
use crate::error::{Error, Result};
use crate::group::{CosetPartition, Element, GroupTable, Subgroup};

pub const UNREACHABLE: u32 = u32::MAX;

/// Word-length distances from the identity (or the identity coset) in a
/// Cayley graph, with edges `x -> x s`.
#[derive(Debug, Clone)]
pub struct DistanceField {
    dist: Vec<u32>,
}

impl DistanceField {
    /// Distance to vertex `v`, or `None` if `S` does not reach it.
    pub fn get(&self, v: usize) -> Option<u32> {
        match self.dist[v] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }

    pub fn raw(&self) -> &[u32] {
        &self.dist
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn all_reachable(&self) -> bool {
        self.dist.iter().all(|&d| d != UNREACHABLE)
    }

    /// Maximum distance over the given vertices.
    pub fn max_over<I: IntoIterator<Item = usize>>(&self, vs: I) -> Result<u32> {
        let mut m = 0;
        for v in vs {
            match self.dist[v] {
                UNREACHABLE => return Err(Error::Unreachable),
                d => m = m.max(d),
            }
        }
        Ok(m)
    }

    /// The diameter of the whole graph.
    pub fn diameter(&self) -> Result<u32> {
        self.max_over(0..self.dist.len())
    }
}

fn bfs(n: usize, step: impl Fn(u32, &mut Vec<u32>)) -> DistanceField {
    let mut dist = vec![UNREACHABLE; n];
    let mut queue = VecDeque::new();
    let mut next = Vec::new();
    dist[0] = 0;
    queue.push_back(0u32);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize] + 1;
        next.clear();
        step(v, &mut next);
        for &w in &next {
            if dist[w as usize] == UNREACHABLE {
                dist[w as usize] = d;
                queue.push_back(w);
            }
        }
    }
    DistanceField { dist }
}

fn distinct(s: &GeneratorSet) -> Vec<Element> {
    s.weighted().into_iter().map(|(x, _)| x).collect()
}

/// BFS in `Cay(G, S)`, indexed by element.
pub fn bfs_distances(g: &GroupTable, s: &GeneratorSet) -> DistanceField {
    let gens = distinct(s);
    bfs(g.order(), |v, out| {
        out.extend(gens.iter().map(|&x| g.mul(Element(v), x).0))
    })
}

/// BFS in `Cay(G/N, S_N)`, indexed by coset label.
pub fn bfs_quotient(g: &GroupTable, part: &CosetPartition, s: &GeneratorSet) -> DistanceField {
    let gens = distinct(s);
    bfs(part.len(), |v, out| {
        let r = part.rep(v);
        out.extend(gens.iter().map(|&x| part.project(g.mul(r, x))))
    })
}

/// `Diam_S(H) = max_{h in H} |h|_S`.
pub fn diam_subgroup(field: &DistanceField, h: &Subgroup) -> Result<u32> {
    field.max_over(h.members().into_iter().map(|e| e.index()))
}

/// `Diam_S(H'/H)`: the largest distance in `Cay(G/H, S_H)` from the identity
/// coset to a coset meeting `H'`. `H` must be normal in `G`.
pub fn diam_quotient(
    g: &GroupTable,
    s: &GeneratorSet,
    h_prime: &Subgroup,
    h: &Subgroup,
) -> Result<u32> {
    if !g.is_normal(h) {
        return Err(Error::NotNormal);
    }
    let part = CosetPartition::new(g, h);
    let field = bfs_quotient(g, &part, s);
    field.max_over(
        h_prime
            .members()
            .into_iter()
            .map(|e| part.project(e) as usize),
    )
}

/// Both sides of `Diam_S(H') <= Diam_S(H'/H) + Diam_S(H)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleCheck {
    pub diam_h_prime: u32,
    pub diam_quotient: u32,
    pub diam_h: u32,
}

impl TriangleCheck {
    pub fn holds(&self) -> bool {
        self.diam_h_prime <= self.diam_quotient + self.diam_h
    }
}

pub fn triangle_decomposition_check(
    g: &GroupTable,
    s: &GeneratorSet,
    h: &Subgroup,
    h_prime: &Subgroup,
) -> Result<TriangleCheck> {
    if !h.is_subset_of(h_prime) {
        return Err(Error::InvalidArgument("H is not contained in H'".into()));
    }
    let field = bfs_distances(g, s);
    Ok(TriangleCheck {
        diam_h_prime: diam_subgroup(&field, h_prime)?,
        diam_quotient: diam_quotient(g, s, h_prime, h)?,
        diam_h: diam_subgroup(&field, h)?,
    })
}

/// `Diam_S(G_l / G_{l+1})` for `l = 1..=L`.
pub fn layer_diameters(g: &GroupTable, s: &GeneratorSet) -> Result<Vec<u32>> {
    g.layers()
        .iter()
        .map(|layer| {
            let field = bfs_quotient(g, &layer.quotient, s);
            field.max_over(layer.q_labels.iter().map(|&c| c as usize))
        })
        .collect()
}
