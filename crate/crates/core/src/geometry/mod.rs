//! Cayley graph distances, subgroup and quotient diameters, the layered
//! diameter bound and the greedy power decomposition behind it.

mod distance;
mod gcd_law;
mod generators;
mod power;

pub use distance::{
    bfs_distances, bfs_quotient, diam_quotient, diam_subgroup, layer_diameters,
    triangle_decomposition_check, DistanceField, TriangleCheck, UNREACHABLE,
};
pub use gcd_law::{gcd, gcd_subgroup_law, GcdLawReport, ENUMERATION_LIMIT};
pub use generators::{is_symmetric, GeneratorSet};
pub use power::{
    ceil_root, diam_bound_rhs, floor_root, greedy_power_decomposition, PowerDecomposition,
};

use serde::Serialize;

use crate::error::Result;
use crate::group::GroupTable;

/// One row of the diameter table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiameterRow {
    pub group: String,
    pub s_size: usize,
    pub diam_g: u32,
    pub diam_gab: u32,
    pub diam_g2: u32,
    pub bound_rhs: u128,
    /// `Σ_{i>=2} Diam_S(G_i/G_{i+1})`.
    pub layer_sum: u32,
    /// `Diam_S(G_2) / Diam_S(G_ab)^{3/4}`.
    pub ratio: f64,
}

impl DiameterRow {
    pub fn compute(g: &GroupTable, s: &GeneratorSet) -> Result<DiameterRow> {
        let field = bfs_distances(g, s);
        let diam_g = field.diameter()?;
        let diam_g2 = diam_subgroup(&field, g.series_term(2))?;
        let layers = layer_diameters(g, s)?;
        let diam_gab = layers[0];
        let layer_sum = layers[1..].iter().sum();
        let bound_rhs = diam_bound_rhs(s.orientation().len() as u64, g.step(), diam_gab as u64);
        let ratio = if diam_gab == 0 {
            0.0
        } else {
            diam_g2 as f64 / (diam_gab as f64).powf(0.75)
        };
        Ok(DiameterRow {
            group: g.spec().label(),
            s_size: s.size(),
            diam_g,
            diam_gab,
            diam_g2,
            bound_rhs,
            layer_sum,
            ratio,
        })
    }

    pub const HEADER: [&'static str; 6] = ["group", "S", "Diam_G", "Diam_Gab", "Diam_G2", "bound_rhs"];

    pub fn record(&self) -> [String; 6] {
        [
            self.group.clone(),
            self.s_size.to_string(),
            self.diam_g.to_string(),
            self.diam_gab.to_string(),
            self.diam_g2.to_string(),
            self.bound_rhs.to_string(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Element, GroupSpec, DEFAULT_CAP};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_examples() {
        let z5 = GroupTable::build(&GroupSpec::abelian([5]), DEFAULT_CAP).unwrap();
        let s = GeneratorSet::canonical(&z5);
        let f = bfs_distances(&z5, &s);
        assert_eq!(f.get(z5.element_from_coords(&[3]).unwrap().index()), Some(2));

        let only_id = GeneratorSet::from_multiset(&z5, &[Element::IDENTITY]).unwrap();
        let f = bfs_distances(&z5, &only_id);
        assert_eq!(f.get(0), Some(0));
        assert!((1..5).all(|v| f.get(v).is_none()));

        let z6 = GroupTable::build(&GroupSpec::abelian([6]), DEFAULT_CAP).unwrap();
        let s = GeneratorSet::canonical(&z6);
        let f = bfs_distances(&z6, &s);
        let two = z6.element_from_coords(&[2]).unwrap();
        assert_eq!(diam_subgroup(&f, &z6.closure(&[two])).unwrap(), 2);
        assert_eq!(diam_subgroup(&f, z6.series_term(2)).unwrap(), 0);
    }

    #[test]
    fn triangle_trivial_case() {
        let g = GroupTable::build(&GroupSpec::heisenberg(3, 1), DEFAULT_CAP).unwrap();
        let s = GeneratorSet::canonical(&g);
        let id = g.series_term(3);
        let chk = triangle_decomposition_check(&g, &s, id, id).unwrap();
        assert_eq!((chk.diam_h_prime, chk.diam_quotient + chk.diam_h), (0, 0));
    }

    #[test]
    fn distances_are_inverse_symmetric() {
        let g = GroupTable::build(&GroupSpec::unitriangular(3, 3), DEFAULT_CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = GeneratorSet::random_generating(&g, 2, &mut rng, 1000).unwrap();
        let f = bfs_distances(&g, &s);
        for e in g.elements().step_by(g.order() / 100 + 1).take(100) {
            assert_eq!(f.get(e.index()), f.get(g.inv(e).index()));
        }
    }

    #[test]
    fn diameter_bounds_hold_on_small_groups() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for spec in [
            GroupSpec::heisenberg(3, 1),
            GroupSpec::unitriangular(2, 4),
            GroupSpec::unitriangular(3, 3),
        ] {
            let g = GroupTable::build(&spec, DEFAULT_CAP).unwrap();
            let mut sets = vec![GeneratorSet::canonical(&g)];
            for _ in 0..5 {
                sets.push(GeneratorSet::random_generating(&g, 3, &mut rng, 1000).unwrap());
            }
            for s in &sets {
                let row = DiameterRow::compute(&g, s).unwrap();
                assert!(row.diam_g2 <= row.layer_sum, "{row:?}");
                assert!((row.diam_g2 as u128) <= row.bound_rhs, "{row:?}");
                assert!(row.diam_g2 <= row.diam_g);
            }
        }
    }
}
