use rand::Rng;

use super::table::{Element, GroupTable};

/// A uniform element of `G` together with its layer parts
/// `Z = Z_1 Z_2 ... Z_L`, where `Z_l` is uniform on the transversal `R_l`
/// and the parts are independent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredSample {
    pub element: Element,
    pub parts: Vec<Element>,
}

pub fn uniform_layered_sample<R: Rng + ?Sized>(g: &GroupTable, rng: &mut R) -> LayeredSample {
    let parts: Vec<Element> = g
        .layers()
        .iter()
        .map(|layer| layer.reps[rng.random_range(0..layer.reps.len())])
        .collect();
    let element = parts
        .iter()
        .fold(Element::IDENTITY, |acc, &p| g.mul(acc, p));
    LayeredSample { element, parts }
}

/// `k` independent uniform elements.
pub fn uniform_elements<R: Rng + ?Sized>(g: &GroupTable, k: usize, rng: &mut R) -> Vec<Element> {
    (0..k)
        .map(|_| uniform_layered_sample(g, rng).element)
        .collect()
}
