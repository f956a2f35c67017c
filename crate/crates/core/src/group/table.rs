use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::series::{self, CosetPartition, Layer, Subgroup};
use super::spec::{Arith, GroupSpec};
use crate::error::{Error, Result};

/// Default enumeration cap for exact modules.
pub const DEFAULT_CAP: usize = 2_000_000;

/// Index of an element in a [`GroupTable`]. Index 0 is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element(pub u32);

impl Element {
    pub const IDENTITY: Element = Element(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Operations shared by enumerated groups and their quotients.
pub trait FiniteGroup {
    type Elem: Copy + Eq + std::hash::Hash + std::fmt::Debug;

    fn order(&self) -> usize;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Self::Elem;
    /// All elements, identity first.
    fn elements(&self) -> Vec<Self::Elem>;

    fn pow(&self, a: Self::Elem, e: i64) -> Self::Elem {
        let base = if e < 0 { self.inv(a) } else { a };
        let mut e = e.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(sq, sq);
            }
        }
        acc
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    fn commutator(&self, x: Self::Elem, y: Self::Elem) -> Self::Elem {
        let xi = self.inv(x);
        let yi = self.inv(y);
        self.mul(self.mul(xi, yi), self.mul(x, y))
    }
}

/// A fully enumerated finite nilpotent group together with its lower central
/// series, the quotients `G/G_{l+1}`, the layers `Q_l = G_l/G_{l+1}` and
/// their transversals `R_l`.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct GroupTable {
    pub(crate) spec: GroupSpec,
    pub(crate) arith: Arith,
    pub(crate) ncoords: usize,
    pub(crate) radix: Vec<u64>,
    /// Element coordinates, `ncoords` residues per element.
    pub(crate) coords: Vec<u32>,
    /// Mixed-radix code -> element index. Every family enumerates its whole
    /// coordinate space, so the code is a perfect hash into `0..order`.
    pub(crate) lookup: Vec<u32>,
    pub(crate) inverse: Vec<u32>,
    pub(crate) generators: Vec<Element>,
    /// `G_1 = G, G_2, ..., G_{L+1} = {id}`.
    pub(crate) series: Vec<Subgroup>,
    /// One entry per `l = 1..=L`.
    pub(crate) layers: Vec<Layer>,
    pub(crate) ab_invariants: Vec<u64>,
}

const MISSING: u32 = u32::MAX;

impl GroupTable {
    /// Enumerates the group described by `spec` by closure from the family's
    /// canonical generators and computes its lower central series.
    pub fn build(spec: &GroupSpec, cap: usize) -> Result<GroupTable> {
        spec.validate()?;
        let predicted = spec.predicted_order();
        if predicted > cap as u128 {
            return Err(Error::OrderExceedsCap {
                order: predicted,
                cap,
            });
        }
        let arith = Arith::from_spec(spec);
        let ncoords = arith.ncoords();
        let moduli = arith.moduli();
        let mut radix = Vec::with_capacity(ncoords);
        let mut acc = 1u64;
        for &m in &moduli {
            radix.push(acc);
            acc *= m as u64;
        }
        let space = acc as usize;

        let gens_coords = arith.generators();
        let mut table = GroupTable {
            spec: spec.clone(),
            arith,
            ncoords,
            radix,
            coords: vec![0; ncoords],
            lookup: vec![MISSING; space],
            inverse: Vec::new(),
            generators: Vec::new(),
            series: Vec::new(),
            layers: Vec::new(),
            ab_invariants: Vec::new(),
        };
        let id_code = table.code(&vec![0; ncoords]);
        table.lookup[id_code as usize] = 0;

        // Breadth-first closure under right multiplication by the generators.
        let mut queue = VecDeque::from([0u32]);
        let mut buf = vec![0u32; ncoords];
        while let Some(e) = queue.pop_front() {
            for g in &gens_coords {
                let a = &table.coords[e as usize * ncoords..(e as usize + 1) * ncoords];
                table.arith.mul(a, g, &mut buf);
                let c = table.code(&buf) as usize;
                if table.lookup[c] == MISSING {
                    let idx = (table.coords.len() / ncoords) as u32;
                    table.lookup[c] = idx;
                    table.coords.extend_from_slice(&buf);
                    queue.push_back(idx);
                }
            }
        }
        let order = table.coords.len() / ncoords;
        if order as u128 != predicted {
            return Err(Error::InvalidSpec(format!(
                "closure reached {order} elements, expected {predicted}"
            )));
        }

        table.generators = gens_coords
            .iter()
            .map(|g| Element(table.lookup[table.code(g) as usize]))
            .collect();
        table.inverse = (0..order)
            .map(|i| {
                table
                    .arith
                    .inv(&table.coords[i * ncoords..(i + 1) * ncoords], &mut buf);
                table.lookup[table.code(&buf) as usize]
            })
            .collect();

        table.series = series::lower_central_series(&table)?;
        table.layers = series::build_layers(&table);
        table.ab_invariants = table.layers[0].invariants.clone();
        Ok(table)
    }

    fn code(&self, v: &[u32]) -> u64 {
        v.iter().zip(&self.radix).map(|(&c, &r)| c as u64 * r).sum()
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// `|G|`.
    pub fn order(&self) -> usize {
        self.inverse.len()
    }

    /// Nilpotency class `L`.
    pub fn step(&self) -> usize {
        self.series.len() - 1
    }

    /// Canonical generators of the family, used for the series computation.
    pub fn canonical_generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn coords(&self, e: Element) -> &[u32] {
        &self.coords[e.index() * self.ncoords..(e.index() + 1) * self.ncoords]
    }

    /// Looks up an element by its coordinates (reduced or not).
    pub fn element_from_coords(&self, v: &[u32]) -> Option<Element> {
        if v.len() != self.ncoords {
            return None;
        }
        let moduli = self.arith.moduli();
        let reduced: Vec<u32> = v.iter().zip(&moduli).map(|(&c, &m)| c % m).collect();
        let idx = self.lookup[self.code(&reduced) as usize];
        (idx != MISSING).then_some(Element(idx))
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..self.order() as u32).map(Element)
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        let mut buf = [0u32; 64];
        let n = self.ncoords;
        if n <= 64 {
            self.arith.mul(self.coords(a), self.coords(b), &mut buf[..n]);
            Element(self.lookup[self.code(&buf[..n]) as usize])
        } else {
            let mut v = vec![0; n];
            self.arith.mul(self.coords(a), self.coords(b), &mut v);
            Element(self.lookup[self.code(&v) as usize])
        }
    }

    #[inline]
    pub fn inv(&self, a: Element) -> Element {
        Element(self.inverse[a.index()])
    }

    pub fn pow(&self, a: Element, e: i64) -> Element {
        FiniteGroup::pow(self, a, e)
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    pub fn commutator(&self, x: Element, y: Element) -> Element {
        FiniteGroup::commutator(self, x, y)
    }

    /// Left-normed multi-commutator `rho(x_1, ..., x_i) = [rho(x_1..x_{i-1}), x_i]`.
    pub fn rho(&self, xs: &[Element]) -> Result<Element> {
        if xs.len() < 2 {
            return Err(Error::Arity(xs.len()));
        }
        Ok(xs[1..]
            .iter()
            .fold(xs[0], |acc, &x| self.commutator(acc, x)))
    }

    /// Table of `g -> g s` over all elements.
    pub fn right_mul_table(&self, s: Element) -> Vec<u32> {
        self.elements().map(|g| self.mul(g, s).0).collect()
    }

    /// The lower central series `G_1 ⊵ G_2 ⊵ ... ⊵ G_{L+1} = {id}`.
    pub fn series(&self) -> &[Subgroup] {
        &self.series
    }

    /// `G_i` for `1 <= i`; indices past `L + 1` are clamped to the trivial group.
    pub fn series_term(&self, i: usize) -> &Subgroup {
        assert!(i >= 1, "series is indexed from 1");
        &self.series[(i - 1).min(self.series.len() - 1)]
    }

    pub fn series_sizes(&self) -> Vec<usize> {
        self.series.iter().map(|s| s.len()).collect()
    }

    /// Layer `l` (1-based): the partition `G/G_{l+1}` and `Q_l`.
    pub fn layer(&self, l: usize) -> &Layer {
        &self.layers[l - 1]
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Coset partition of `G/G_{l+1}`.
    pub fn quotient(&self, l: usize) -> &CosetPartition {
        &self.layer(l).quotient
    }

    /// Coset partition for the abelianization `G/G_2`.
    pub fn abelianization(&self) -> &CosetPartition {
        self.quotient(1)
    }

    /// `|G_ab|`.
    pub fn ab_order(&self) -> usize {
        self.layers[0].quotient.len()
    }

    /// Invariant factors of `G_ab`, each dividing the next.
    pub fn ab_invariants(&self) -> &[u64] {
        &self.ab_invariants
    }

    /// Rank `r(G)`: the minimal size of a generating set. For nilpotent `G`
    /// this equals the rank of `G_ab`.
    pub fn rank(&self) -> usize {
        self.ab_invariants.len()
    }

    /// `r_l = rank(Q_l)` for `l = 1..=L`.
    pub fn layer_ranks(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.invariants.len()).collect()
    }

    /// Subgroup generated by `gens`.
    pub fn closure(&self, gens: &[Element]) -> Subgroup {
        series::closure(self, gens)
    }

    /// Whether the subgroup is invariant under conjugation by every element.
    pub fn is_normal(&self, h: &Subgroup) -> bool {
        // Conjugation by the canonical generators suffices.
        h.members().iter().all(|&x| {
            self.generators.iter().all(|&s| {
                let c = self.mul(self.mul(self.inv(s), x), s);
                h.contains(c)
            })
        })
    }

    /// Whether the multiset `s` generates the whole group.
    pub fn generates(&self, s: &[Element]) -> bool {
        self.closure(s).len() == self.order()
    }
}

impl FiniteGroup for GroupTable {
    type Elem = Element;

    fn order(&self) -> usize {
        GroupTable::order(self)
    }
    fn identity(&self) -> Element {
        Element::IDENTITY
    }
    fn mul(&self, a: Element, b: Element) -> Element {
        GroupTable::mul(self, a, b)
    }
    fn inv(&self, a: Element) -> Element {
        GroupTable::inv(self, a)
    }
    fn elements(&self) -> Vec<Element> {
        GroupTable::elements(self).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Brute-force oracle: closure of the generator matrices by explicit
    /// `d x d` matrix multiplication mod m, independent of the packed
    /// arithmetic.
    fn brute_unitriangular_order(m: u64, d: usize) -> usize {
        use std::collections::HashSet;
        type Mat = Vec<Vec<u64>>;
        let ident: Mat = (0..d)
            .map(|i| (0..d).map(|j| (i == j) as u64).collect())
            .collect();
        let matmul = |a: &Mat, b: &Mat| -> Mat {
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum::<u64>() % m)
                        .collect()
                })
                .collect()
        };
        let gens: Vec<Mat> = (0..d - 1)
            .map(|i| {
                let mut g = ident.clone();
                g[i][i + 1] = 1;
                g
            })
            .collect();
        let mut seen: HashSet<Mat> = HashSet::from([ident.clone()]);
        let mut frontier = vec![ident];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = matmul(&x, g);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn orders_match_brute_force_closure() {
        assert_eq!(brute_unitriangular_order(3, 3), 27);
        assert_eq!(brute_unitriangular_order(2, 4), 64);
        let h = GroupTable::build(&GroupSpec::heisenberg(3, 1), DEFAULT_CAP).unwrap();
        assert_eq!(h.order(), 27);
        let u = GroupTable::build(&GroupSpec::unitriangular(2, 4), DEFAULT_CAP).unwrap();
        assert_eq!(u.order(), 64);
        let a = GroupTable::build(&GroupSpec::abelian([4, 2]), DEFAULT_CAP).unwrap();
        assert_eq!(a.order(), 8);
    }

    #[test]
    fn cap_is_enforced() {
        let err = GroupTable::build(&GroupSpec::heisenberg(5, 2), 1000).unwrap_err();
        assert!(matches!(err, Error::OrderExceedsCap { order: 3125, cap: 1000 }));
        assert!(GroupTable::build(&GroupSpec::heisenberg(1, 1), 1000).is_err());
    }

    #[test]
    fn identity_and_inverse_laws_hold_on_all_elements() {
        for spec in [
            GroupSpec::heisenberg(3, 1),
            GroupSpec::unitriangular(2, 4),
            GroupSpec::unitriangular(3, 3),
            GroupSpec::abelian([6, 4]),
            GroupSpec::direct_product([GroupSpec::heisenberg(2, 1), GroupSpec::abelian([3])]),
        ] {
            let g = GroupTable::build(&spec, DEFAULT_CAP).unwrap();
            assert_eq!(g.coords(Element::IDENTITY).iter().sum::<u32>(), 0);
            for x in g.elements() {
                assert_eq!(g.mul(Element::IDENTITY, x), x);
                assert_eq!(g.mul(x, Element::IDENTITY), x);
                assert_eq!(g.mul(x, g.inv(x)), Element::IDENTITY);
                assert_eq!(g.mul(g.inv(x), x), Element::IDENTITY);
            }
        }
    }

    #[test]
    fn associativity_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in [
            GroupSpec::heisenberg(5, 1),
            GroupSpec::unitriangular(2, 4),
            GroupSpec::unitriangular(3, 4),
            GroupSpec::heisenberg(3, 2),
        ] {
            let g = GroupTable::build(&spec, DEFAULT_CAP).unwrap();
            let n = g.order() as u32;
            for _ in 0..10_000 {
                let a = Element(rng.random_range(0..n));
                let b = Element(rng.random_range(0..n));
                let c = Element(rng.random_range(0..n));
                assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
            }
        }
    }

    #[test]
    fn abelian_componentwise_sum() {
        let g = GroupTable::build(&GroupSpec::abelian([4, 2]), DEFAULT_CAP).unwrap();
        let a = g.element_from_coords(&[1, 1]).unwrap();
        let b = g.element_from_coords(&[3, 1]).unwrap();
        assert_eq!(g.mul(a, b), Element::IDENTITY);
    }

    #[test]
    fn commutators() {
        let g = GroupTable::build(&GroupSpec::unitriangular(2, 3), DEFAULT_CAP).unwrap();
        // Packing (0,1), (0,2), (1,2).
        let e12 = g.element_from_coords(&[1, 0, 0]).unwrap();
        let e23 = g.element_from_coords(&[0, 0, 1]).unwrap();
        let e13 = g.element_from_coords(&[0, 1, 0]).unwrap();
        assert_eq!(g.commutator(e12, e23), e13);
        for x in g.elements() {
            assert_eq!(g.commutator(x, x), Element::IDENTITY);
            assert_eq!(g.rho(&[x, e12, Element::IDENTITY]).unwrap(), Element::IDENTITY);
        }
        assert!(matches!(g.rho(&[e12]), Err(Error::Arity(1))));
    }

    #[test]
    fn pow_handles_negative_exponents() {
        let g = GroupTable::build(&GroupSpec::heisenberg(5, 1), DEFAULT_CAP).unwrap();
        for x in g.elements().step_by(9) {
            assert_eq!(g.pow(x, 5), Element::IDENTITY);
            assert_eq!(g.pow(x, -1), g.inv(x));
            assert_eq!(g.mul(g.pow(x, 3), g.pow(x, -2)), x);
        }
    }
}
