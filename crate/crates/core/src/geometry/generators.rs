use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{uniform_elements, Element, GroupTable};

/// A symmetric generator multiset `S = {Z_i^{±1}}` together with an
/// orientation `R ⊆ S` holding exactly one of each `{s, s^-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSet {
    members: Vec<Element>,
    multiset: Vec<Element>,
    orientation: Vec<Element>,
}

impl GeneratorSet {
    /// `S = {Z_1^{±1}, ..., Z_k^{±1}}` as a multiset of size `2k`.
    pub fn from_members(g: &GroupTable, members: &[Element]) -> GeneratorSet {
        let multiset = members
            .iter()
            .flat_map(|&z| [z, g.inv(z)])
            .collect::<Vec<_>>();
        let orientation = orient(g, &multiset);
        GeneratorSet {
            members: members.to_vec(),
            multiset,
            orientation,
        }
    }

    /// Uses `s` verbatim as the step multiset; fails unless every element
    /// appears as often as its inverse.
    pub fn from_multiset(g: &GroupTable, s: &[Element]) -> Result<GeneratorSet> {
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty generator multiset".into()));
        }
        if !is_symmetric(g, s) {
            return Err(Error::NotSymmetric);
        }
        let orientation = orient(g, s);
        Ok(GeneratorSet {
            members: orientation.clone(),
            multiset: s.to_vec(),
            orientation,
        })
    }

    /// The family's canonical generators with their inverses.
    pub fn canonical(g: &GroupTable) -> GeneratorSet {
        GeneratorSet::from_members(g, g.canonical_generators())
    }

    /// `k` i.i.d. uniform elements with their inverses.
    pub fn random<R: Rng + ?Sized>(g: &GroupTable, k: usize, rng: &mut R) -> GeneratorSet {
        GeneratorSet::from_members(g, &uniform_elements(g, k, rng))
    }

    /// Like [`GeneratorSet::random`], but redraws until `S` generates `G`.
    pub fn random_generating<R: Rng + ?Sized>(
        g: &GroupTable,
        k: usize,
        rng: &mut R,
        max_attempts: usize,
    ) -> Result<GeneratorSet> {
        for _ in 0..max_attempts {
            let s = GeneratorSet::random(g, k, rng);
            if g.generates(s.members()) {
                return Ok(s);
            }
        }
        Err(Error::RankSamplingFailed {
            rank: k,
            attempts: max_attempts,
        })
    }

    /// `k`: the number of generators `Z_i`.
    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[Element] {
        &self.members
    }

    /// The step multiset `S`.
    pub fn multiset(&self) -> &[Element] {
        &self.multiset
    }

    /// `|S|` counted with multiplicity.
    pub fn size(&self) -> usize {
        self.multiset.len()
    }

    pub fn orientation(&self) -> &[Element] {
        &self.orientation
    }

    /// Distinct elements of `S` with their multiplicities, in first-seen order.
    pub fn weighted(&self) -> Vec<(Element, usize)> {
        let mut order = Vec::new();
        let mut counts: HashMap<Element, usize> = HashMap::new();
        for &s in &self.multiset {
            let c = counts.entry(s).or_insert(0);
            if *c == 0 {
                order.push(s);
            }
            *c += 1;
        }
        order.into_iter().map(|s| (s, counts[&s])).collect()
    }
}

fn orient(g: &GroupTable, s: &[Element]) -> Vec<Element> {
    let mut r: Vec<Element> = Vec::new();
    for &x in s {
        if !r.contains(&x) && !r.contains(&g.inv(x)) {
            r.push(x);
        }
    }
    r
}

pub fn is_symmetric(g: &GroupTable, s: &[Element]) -> bool {
    let mut counts: HashMap<Element, i64> = HashMap::new();
    for &x in s {
        *counts.entry(x).or_insert(0) += 1;
    }
    counts
        .iter()
        .all(|(&x, &c)| counts.get(&g.inv(x)).copied().unwrap_or(0) == c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupSpec, DEFAULT_CAP};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orientation_picks_one_of_each_pair() {
        let g = GroupTable::build(&GroupSpec::heisenberg(3, 1), DEFAULT_CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let s = GeneratorSet::random(&g, 4, &mut rng);
            assert_eq!(s.size(), 8);
            assert!(is_symmetric(&g, s.multiset()));
            assert!(s.orientation().len() <= s.k());
            for &x in s.multiset() {
                let hits = s
                    .orientation()
                    .iter()
                    .filter(|&&r| r == x || r == g.inv(x))
                    .count();
                assert_eq!(hits, 1);
            }
        }
    }

    #[test]
    fn asymmetric_multisets_are_rejected() {
        let g = GroupTable::build(&GroupSpec::abelian([5]), DEFAULT_CAP).unwrap();
        let one = g.element_from_coords(&[1]).unwrap();
        let four = g.element_from_coords(&[4]).unwrap();
        assert!(matches!(
            GeneratorSet::from_multiset(&g, &[one]),
            Err(Error::NotSymmetric)
        ));
        assert!(GeneratorSet::from_multiset(&g, &[one, four]).is_ok());
    }

    #[test]
    fn weighted_counts_multiplicity() {
        let g = GroupTable::build(&GroupSpec::abelian([2]), DEFAULT_CAP).unwrap();
        let one = g.element_from_coords(&[1]).unwrap();
        let s = GeneratorSet::from_members(&g, &[one]);
        assert_eq!(s.weighted(), vec![(one, 2)]);
        assert_eq!(s.orientation(), &[one]);
    }
}
