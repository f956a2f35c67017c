use std::collections::VecDeque;

use super::table::{Element, FiniteGroup, GroupTable};
use crate::error::{Error, Result};

/// A subgroup of an enumerated group, stored as a sorted member list plus a
/// membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    members: Vec<u32>,
    mask: Vec<bool>,
    /// Generators actually used by the closure (an irredundant prefix of the
    /// requested ones).
    gens: Vec<Element>,
}

impl Subgroup {
    pub(crate) fn trivial(order: usize) -> Subgroup {
        let mut mask = vec![false; order];
        mask[0] = true;
        Subgroup {
            members: vec![0],
            mask,
            gens: Vec::new(),
        }
    }

    pub(crate) fn from_members(order: usize, mut members: Vec<u32>) -> Subgroup {
        members.sort_unstable();
        members.dedup();
        let mut mask = vec![false; order];
        for &m in &members {
            mask[m as usize] = true;
        }
        let gens = members.iter().map(|&m| Element(m)).collect();
        Subgroup {
            members,
            mask,
            gens,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    #[inline]
    pub fn contains(&self, e: Element) -> bool {
        self.mask[e.index()]
    }

    /// Member indices in increasing order.
    pub fn members(&self) -> Vec<Element> {
        self.members.iter().map(|&m| Element(m)).collect()
    }

    pub(crate) fn member_indices(&self) -> &[u32] {
        &self.members
    }

    pub fn generators(&self) -> &[Element] {
        &self.gens
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&m| other.mask[m as usize])
    }
}

/// Subgroup generated by `gens`, built incrementally: each generator not
/// already inside the current subgroup triggers a breadth-first extension.
pub(crate) fn closure(table: &GroupTable, gens: &[Element]) -> Subgroup {
    extend(table, Subgroup::trivial(table.order()), gens)
}

pub(crate) fn extend(table: &GroupTable, mut sub: Subgroup, gens: &[Element]) -> Subgroup {
    for &g in gens {
        if sub.mask[g.index()] {
            continue;
        }
        sub.gens.push(g);
        let mut queue: VecDeque<u32> = sub.members.iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            for &u in &sub.gens {
                let y = table.mul(Element(x), u);
                if !sub.mask[y.index()] {
                    sub.mask[y.index()] = true;
                    sub.members.push(y.0);
                    queue.push_back(y.0);
                }
            }
        }
    }
    sub.members.sort_unstable();
    sub
}

/// Smallest normal subgroup containing `sub`: extend by conjugates under the
/// canonical generators until stable.
fn normal_closure(table: &GroupTable, mut sub: Subgroup) -> Subgroup {
    let gens = table.canonical_generators().to_vec();
    loop {
        let missing: Vec<Element> = sub
            .members
            .iter()
            .flat_map(|&x| {
                gens.iter()
                    .map(move |&s| table.mul(table.mul(table.inv(s), Element(x)), s))
            })
            .filter(|c| !sub.mask[c.index()])
            .collect();
        if missing.is_empty() {
            return sub;
        }
        sub = extend(table, sub, &missing);
    }
}

/// `G_1 = G`, `G_{i+1} = [G_i, G]`, down to the trivial subgroup.
pub(crate) fn lower_central_series(table: &GroupTable) -> Result<Vec<Subgroup>> {
    let n = table.order();
    let full = Subgroup::from_members(n, (0..n as u32).collect());
    let full = Subgroup {
        gens: table.canonical_generators().to_vec(),
        ..full
    };
    let mut series = vec![full];
    for _ in 0..=n {
        let cur = series.last().expect("series is nonempty");
        if cur.is_trivial() {
            return Ok(series);
        }
        let mut seen = vec![false; n];
        let mut comms = Vec::new();
        for &x in &cur.members {
            for &s in table.canonical_generators() {
                let c = table.commutator(Element(x), s);
                if !seen[c.index()] {
                    seen[c.index()] = true;
                    comms.push(c);
                }
            }
        }
        let next = normal_closure(table, closure(table, &comms));
        if next.len() == cur.len() {
            return Err(Error::NonNilpotent);
        }
        series.push(next);
    }
    Err(Error::NonNilpotent)
}

/// Partition of `G` into cosets of a normal subgroup `N`. Coset labels are
/// assigned in order of their smallest element, so the representative of
/// each coset is its minimum index and the identity coset has label 0.
#[derive(Debug, Clone)]
pub struct CosetPartition {
    label: Vec<u32>,
    reps: Vec<Element>,
    coset_size: usize,
}

impl CosetPartition {
    pub fn new(table: &GroupTable, normal: &Subgroup) -> CosetPartition {
        const UNSET: u32 = u32::MAX;
        let mut label = vec![UNSET; table.order()];
        let mut reps = Vec::new();
        for g in table.elements() {
            if label[g.index()] != UNSET {
                continue;
            }
            let l = reps.len() as u32;
            reps.push(g);
            for &h in normal.member_indices() {
                label[table.mul(g, Element(h)).index()] = l;
            }
        }
        CosetPartition {
            label,
            reps,
            coset_size: normal.len(),
        }
    }

    /// Number of cosets.
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn coset_size(&self) -> usize {
        self.coset_size
    }

    #[inline]
    pub fn project(&self, e: Element) -> u32 {
        self.label[e.index()]
    }

    pub fn rep(&self, label: u32) -> Element {
        self.reps[label as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.label
    }

    /// The quotient group `G/N` as a group on coset labels.
    pub fn group<'a>(&'a self, table: &'a GroupTable) -> QuotientView<'a> {
        QuotientView {
            table,
            part: self,
            members: (0..self.len() as u32).collect(),
        }
    }
}

/// A subgroup `H/N` of a quotient `G/N`, with elements given by coset labels.
#[derive(Debug, Clone)]
pub struct QuotientView<'a> {
    table: &'a GroupTable,
    part: &'a CosetPartition,
    members: Vec<u32>,
}

impl<'a> QuotientView<'a> {
    /// The image of `sub` in `G/N`.
    pub fn image(table: &'a GroupTable, part: &'a CosetPartition, sub: &Subgroup) -> Self {
        let mut members: Vec<u32> = sub
            .member_indices()
            .iter()
            .map(|&m| part.project(Element(m)))
            .collect();
        members.sort_unstable();
        members.dedup();
        QuotientView {
            table,
            part,
            members,
        }
    }

    pub fn partition(&self) -> &CosetPartition {
        self.part
    }
}

impl FiniteGroup for QuotientView<'_> {
    type Elem = u32;

    fn order(&self) -> usize {
        self.members.len()
    }
    fn identity(&self) -> u32 {
        0
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.part
            .project(self.table.mul(self.part.rep(a), self.part.rep(b)))
    }
    fn inv(&self, a: u32) -> u32 {
        self.part.project(self.table.inv(self.part.rep(a)))
    }
    fn elements(&self) -> Vec<u32> {
        self.members.clone()
    }
}

/// Layer `l` of the lower central series.
#[derive(Debug, Clone)]
pub struct Layer {
    /// Partition of `G` by `G_{l+1}`.
    pub quotient: CosetPartition,
    /// Labels (in `quotient`) of the cosets making up `Q_l = G_l/G_{l+1}`.
    pub q_labels: Vec<u32>,
    /// Transversal `R_l`: the minimum-index element of each coset in `Q_l`.
    pub reps: Vec<Element>,
    /// Invariant factors of `Q_l`.
    pub invariants: Vec<u64>,
}

impl Layer {
    /// `|Q_l|`.
    pub fn q_order(&self) -> usize {
        self.q_labels.len()
    }

    /// `r_l`.
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }
}

pub(crate) fn build_layers(table: &GroupTable) -> Vec<Layer> {
    let l_max = table.series.len() - 1;
    (1..=l_max)
        .map(|l| {
            let quotient = CosetPartition::new(table, &table.series[l]);
            let view = QuotientView::image(table, &quotient, &table.series[l - 1]);
            let q_labels = view.elements();
            let reps = q_labels.iter().map(|&c| quotient.rep(c)).collect();
            let invariants = abelian_invariants(&view);
            Layer {
                quotient,
                q_labels,
                reps,
                invariants,
            }
        })
        .collect()
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Invariant factors `d_1 | d_2 | ... | d_r` (all `> 1`) of a finite abelian
/// group, read off from the sizes of the `p^j`-torsion subgroups.
pub fn abelian_invariants<G: FiniteGroup>(group: &G) -> Vec<u64> {
    let n = group.order() as u64;
    let elems = group.elements();
    let id = group.identity();
    // per prime: elementary divisors p^j, largest first
    let mut per_prime: Vec<Vec<u64>> = Vec::new();
    for (p, e) in prime_factors(n) {
        let mut powers = elems.clone();
        // log_p of the size of the p^j torsion, j = 0, 1, ...
        let mut torsion_log = vec![0u32];
        while *torsion_log.last().unwrap() < e {
            for x in powers.iter_mut() {
                *x = group.pow(*x, p as i64);
            }
            let count = powers.iter().filter(|&&x| x == id).count() as u64;
            let mut lg = 0;
            let mut c = count;
            while c > 1 {
                c /= p;
                lg += 1;
            }
            torsion_log.push(lg);
        }
        // c_j = number of cyclic factors of order >= p^j
        let c: Vec<u32> = torsion_log.windows(2).map(|w| w[1] - w[0]).collect();
        let mut divisors = Vec::new();
        for j in 0..c.len() {
            let next = c.get(j + 1).copied().unwrap_or(0);
            for _ in 0..(c[j] - next) {
                divisors.push(p.pow(j as u32 + 1));
            }
        }
        divisors.sort_unstable_by(|a, b| b.cmp(a));
        per_prime.push(divisors);
    }
    let r = per_prime.iter().map(|d| d.len()).max().unwrap_or(0);
    let mut inv: Vec<u64> = (0..r)
        .map(|i| per_prime.iter().filter_map(|d| d.get(i)).product())
        .collect();
    inv.reverse();
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupSpec, DEFAULT_CAP};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn build(spec: GroupSpec) -> GroupTable {
        GroupTable::build(&spec, DEFAULT_CAP).unwrap()
    }

    /// Oracle: `[G_i, G]` as the closure of all commutators `[x, g]` with
    /// `x` in `G_i` and `g` ranging over the whole group.
    fn brute_series_sizes(g: &GroupTable) -> Vec<usize> {
        let mut sizes = vec![g.order()];
        let mut cur: Vec<Element> = g.elements().collect();
        loop {
            let comms: Vec<Element> = cur
                .iter()
                .flat_map(|&x| g.elements().map(move |y| (x, y)))
                .map(|(x, y)| g.commutator(x, y))
                .collect();
            let next = g.closure(&comms);
            sizes.push(next.len());
            if next.is_trivial() {
                return sizes;
            }
            cur = next.members();
        }
    }

    #[test]
    fn series_sizes_match_brute_force() {
        let h = build(GroupSpec::heisenberg(3, 1));
        assert_eq!(h.series_sizes(), vec![27, 3, 1]);
        assert_eq!(brute_series_sizes(&h), vec![27, 3, 1]);
        let u = build(GroupSpec::unitriangular(2, 4));
        assert_eq!(u.series_sizes(), vec![64, 8, 2, 1]);
        assert_eq!(brute_series_sizes(&u), vec![64, 8, 2, 1]);
        assert_eq!(u.step(), 3);
        let z = build(GroupSpec::abelian([6]));
        assert_eq!(z.series_sizes(), vec![6, 1]);
        assert_eq!(z.step(), 1);
        let u33 = build(GroupSpec::unitriangular(3, 3));
        assert_eq!(u33.series_sizes(), brute_series_sizes(&u33));
        let p = build(GroupSpec::direct_product([
            GroupSpec::heisenberg(2, 1),
            GroupSpec::abelian([3]),
        ]));
        assert_eq!(p.series_sizes(), brute_series_sizes(&p));
    }

    #[test]
    fn series_terms_are_normal_and_nested() {
        for spec in [
            GroupSpec::unitriangular(2, 4),
            GroupSpec::unitriangular(3, 4),
            GroupSpec::heisenberg(5, 1),
        ] {
            let g = build(spec);
            let s = g.series();
            assert_eq!(s[0].len(), g.order());
            assert!(s.last().unwrap().is_trivial());
            assert!(s[s.len() - 2].len() > 1);
            for w in s.windows(2) {
                assert!(w[1].is_subset_of(&w[0]));
                assert!(w[1].len() < w[0].len());
                assert!(g.is_normal(&w[1]));
            }
            let prod: usize = g.layers().iter().map(|l| l.q_order()).product();
            assert_eq!(prod, g.order());
        }
    }

    #[test]
    fn abelianization_and_quotients() {
        let h = build(GroupSpec::heisenberg(3, 1));
        assert_eq!(h.ab_order(), 9);
        assert_eq!(h.ab_invariants(), &[3, 3]);
        assert_eq!(h.rank(), 2);
        assert_eq!(h.layer_ranks(), vec![2, 1]);
        // exponent check: every coset cubed is trivial
        let ab = h.abelianization().group(&h);
        for c in ab.elements() {
            assert_eq!(ab.pow(c, 3), 0);
        }
        let u = build(GroupSpec::unitriangular(2, 4));
        assert_eq!(u.quotient(2).len(), 32);
        let z = build(GroupSpec::abelian([4, 2]));
        assert_eq!(z.ab_order(), 8);
        assert_eq!(z.ab_invariants(), &[2, 4]);
        let z12 = build(GroupSpec::abelian([12]));
        assert_eq!(z12.ab_invariants(), &[12]);
        let z6z4 = build(GroupSpec::abelian([6, 4]));
        assert_eq!(z6z4.ab_invariants(), &[2, 12]);
    }

    #[test]
    fn projection_is_a_homomorphism() {
        let u = build(GroupSpec::unitriangular(2, 4));
        for l in 1..=u.step() {
            let part = u.quotient(l);
            let q = part.group(&u);
            for a in u.elements().step_by(3) {
                for b in u.elements().step_by(5) {
                    assert_eq!(
                        part.project(u.mul(a, b)),
                        q.mul(part.project(a), part.project(b))
                    );
                }
            }
        }
    }

    #[test]
    fn representatives_cover_each_layer() {
        let u = build(GroupSpec::unitriangular(3, 4));
        for (i, layer) in u.layers().iter().enumerate() {
            assert_eq!(layer.reps.len(), layer.q_order());
            let gi = u.series_term(i + 1);
            let mut labels: Vec<u32> = layer
                .reps
                .iter()
                .map(|&r| {
                    assert!(gi.contains(r));
                    layer.quotient.project(r)
                })
                .collect();
            labels.sort_unstable();
            assert_eq!(labels, layer.q_labels);
        }
    }

    #[test]
    fn strong_centrality_and_bilinearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for spec in [GroupSpec::unitriangular(2, 4), GroupSpec::unitriangular(3, 4)] {
            let g = build(spec);
            let l = g.step();
            let pick = |rng: &mut ChaCha8Rng, s: &Subgroup| {
                let m = s.members();
                m[rng.random_range(0..m.len())]
            };
            for i in 1..=l {
                for j in 1..=l {
                    for _ in 0..500 / (l * l) + 1 {
                        let x = pick(&mut rng, g.series_term(i));
                        let y = pick(&mut rng, g.series_term(j));
                        assert!(g.series_term(i + j).contains(g.commutator(x, y)));
                    }
                }
                // G_{i+2}[x^a, y^b] = G_{i+2}[x,y]^{ab} for x in G, y in G_i
                let part_idx = (i + 1).min(l);
                let part = g.quotient(part_idx);
                for _ in 0..20 {
                    let x = pick(&mut rng, g.series_term(1));
                    let y = pick(&mut rng, g.series_term(i));
                    let base = g.commutator(x, y);
                    for a in -3i64..=3 {
                        for b in -3i64..=3 {
                            let lhs = g.commutator(g.pow(x, a), g.pow(y, b));
                            let rhs = g.pow(base, a * b);
                            if i < l {
                                assert_eq!(part.project(lhs), part.project(rhs));
                            } else {
                                assert_eq!(lhs, rhs);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn group_order_bounded_by_abelianization_power() {
        for spec in [
            GroupSpec::heisenberg(3, 1),
            GroupSpec::heisenberg(5, 1),
            GroupSpec::unitriangular(2, 4),
            GroupSpec::unitriangular(3, 3),
            GroupSpec::abelian([12, 2]),
        ] {
            let g = build(spec);
            let exp = 2.0 * (g.rank() as f64).powi(g.step() as i32);
            assert!((g.order() as f64).ln() <= exp * (g.ab_order() as f64).ln() + 1e-12);
            // per-layer bound |Q_i| <= |G_ab|^{r^{i-1}}
            for (i, layer) in g.layers().iter().enumerate() {
                let e = (g.rank() as f64).powi(i as i32);
                assert!((layer.q_order() as f64).ln() <= e * (g.ab_order() as f64).ln() + 1e-12);
            }
        }
    }

    #[test]
    fn generation_criterion_via_abelianization() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for spec in [
            GroupSpec::heisenberg(3, 1),
            GroupSpec::unitriangular(2, 4),
            GroupSpec::unitriangular(3, 3),
        ] {
            let g = build(spec);
            let part = g.abelianization();
            let ab = part.group(&g);
            let n = g.order() as u32;
            for trial in 0..20 {
                let k = 1 + trial % 3;
                let s: Vec<Element> = (0..k).map(|_| Element(rng.random_range(0..n))).collect();
                let gen_g = g.generates(&s);
                // closure of the projected set inside G_ab
                let mut reached = vec![0u32];
                let mut seen = vec![false; part.len()];
                seen[0] = true;
                let mut i = 0;
                while i < reached.len() {
                    let x = reached[i];
                    for &e in &s {
                        let y = ab.mul(x, part.project(e));
                        if !seen[y as usize] {
                            seen[y as usize] = true;
                            reached.push(y);
                        }
                    }
                    i += 1;
                }
                assert_eq!(gen_g, reached.len() == part.len());
            }
        }
    }
}
