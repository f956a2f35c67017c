use serde::Serialize;

use super::word::WalkWord;
use crate::error::{Error, Result};
use crate::group::{Element, GroupTable};

/// Square integer matrix indexed `[b][a]`, both 0-based.
pub type IntMatrix = Vec<Vec<i64>>;

/// The pair counts of `X (X')^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollectionData {
    pub k: usize,
    /// `m[b][a]` for `a < b`; zero elsewhere.
    pub m: IntMatrix,
    pub mhat: IntMatrix,
    /// `V = W - W'`.
    pub v: Vec<i64>,
}

/// `m_{ba} = -Σ_i Σ_{j<i} η_i η_j 1{σ_i = a, σ_j = b}` for `a < b`, by one
/// left-to-right scan keeping the running signed count `c_b` of each letter.
pub fn pair_matrix(word: &WalkWord) -> IntMatrix {
    let k = word.k;
    let mut m = vec![vec![0i64; k]; k];
    let mut c = vec![0i64; k];
    for s in &word.steps {
        let a = s.sigma as usize;
        let eta = s.eta as i64;
        for b in a + 1..k {
            m[b][a] -= eta * c[b];
        }
        c[a] += eta;
    }
    m
}

/// Quadratic evaluation of the same double sum.
pub fn pair_matrix_bruteforce(word: &WalkWord) -> IntMatrix {
    let k = word.k;
    let mut m = vec![vec![0i64; k]; k];
    for (i, si) in word.steps.iter().enumerate() {
        for sj in &word.steps[..i] {
            let (a, b) = (si.sigma as usize, sj.sigma as usize);
            if a < b {
                m[b][a] -= si.eta as i64 * sj.eta as i64;
            }
        }
    }
    m
}

/// `m̂_{ba} = m_{ba}` for `a < b`, `-m_{ab}` for `b < a`, zero on the diagonal.
pub fn hat_matrix(m: &IntMatrix) -> IntMatrix {
    let k = m.len();
    let mut h = vec![vec![0i64; k]; k];
    for b in 0..k {
        for a in 0..b {
            h[b][a] = m[b][a];
            h[a][b] = -m[b][a];
        }
    }
    h
}

pub fn pair_counts(x: &WalkWord, x_prime: &WalkWord) -> CollectionData {
    let joined = x.concat_inverse(x_prime);
    let m = pair_matrix(&joined);
    let mhat = hat_matrix(&m);
    let v = x
        .net()
        .iter()
        .zip(x_prime.net())
        .map(|(a, b)| a - b)
        .collect();
    CollectionData {
        k: x.k,
        m,
        mhat,
        v,
    }
}

/// `Z_1^{W_1} ... Z_k^{W_k} Π_{a<b} [Z_a, Z_b]^{m_{ba}}`.
fn collected(g: &GroupTable, word: &WalkWord, gens: &[Element]) -> Element {
    let w = word.net();
    let m = pair_matrix(word);
    let mut x = Element::IDENTITY;
    for (a, &z) in gens.iter().enumerate() {
        x = g.mul(x, g.pow(z, w[a]));
    }
    for b in 0..word.k {
        for a in 0..b {
            if m[b][a] != 0 {
                x = g.mul(x, g.pow(g.commutator(gens[a], gens[b]), m[b][a]));
            }
        }
    }
    x
}

/// The collected form of `word` in a group of step at most 2.
pub fn collect_step2(g: &GroupTable, word: &WalkWord, gens: &[Element]) -> Result<Element> {
    if g.step() > 2 {
        return Err(Error::StepNotTwo(g.step()));
    }
    if gens.len() != word.k {
        return Err(Error::InvalidArgument(format!(
            "word uses {} generators, {} given",
            word.k,
            gens.len()
        )));
    }
    Ok(collected(g, word, gens))
}

/// Collected and direct products as coset labels of `G/G_3`, for any step.
pub fn collect_mod_g3(g: &GroupTable, word: &WalkWord, gens: &[Element]) -> (u32, u32) {
    let part = g.quotient(g.step().min(2));
    (
        part.project(collected(g, word, gens)),
        part.project(word.evaluate(g, gens)),
    )
}
