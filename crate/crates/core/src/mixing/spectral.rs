use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::walk::WalkSpace;
use crate::error::{Error, Result};

pub const DENSE_CAP: usize = 4096;
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelaxMode {
    /// Dense up to the cap, then characters when available, else iterative.
    Auto,
    Dense,
    Iterative,
    /// Exact character sums; only for walks on the abelian family.
    Characters,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Relaxation {
    /// Smallest nonzero eigenvalue of `I - P`.
    pub gap: f64,
    pub t_rel: f64,
    pub mode: RelaxMode,
    /// `‖P v - λ v‖` for the returned eigenpair (iterative mode only).
    pub residual: f64,
    pub iterations: usize,
}

impl Relaxation {
    fn new(gap: f64, mode: RelaxMode, residual: f64, iterations: usize) -> Relaxation {
        Relaxation {
            gap,
            t_rel: 1.0 / gap,
            mode,
            residual,
            iterations,
        }
    }
}

pub fn relaxation_time(space: &WalkSpace, mode: RelaxMode) -> Result<Relaxation> {
    relaxation_time_with(space, mode, DENSE_CAP, 200_000)
}

pub fn relaxation_time_with(
    space: &WalkSpace,
    mode: RelaxMode,
    cap: usize,
    max_iter: usize,
) -> Result<Relaxation> {
    if space.len() < 2 {
        return Err(Error::InvalidArgument("walk needs at least two states".into()));
    }
    if !space.is_connected() {
        return Err(Error::NotGenerating);
    }
    match mode {
        RelaxMode::Auto if space.len() <= cap => dense(space, cap),
        RelaxMode::Auto if space.characters.is_some() => characters(space),
        RelaxMode::Auto => iterative(space, max_iter),
        RelaxMode::Dense => dense(space, cap),
        RelaxMode::Iterative => iterative(space, max_iter),
        RelaxMode::Characters => characters(space),
    }
}

fn dense(space: &WalkSpace, cap: usize) -> Result<Relaxation> {
    let n = space.len();
    if n > cap {
        return Err(Error::CapExceeded { size: n, cap });
    }
    let mut m = DMatrix::<f64>::identity(n, n);
    for (table, w) in space.steps() {
        for (x, &y) in table.iter().enumerate() {
            m[(x, y as usize)] -= w;
        }
    }
    let mut eig = SymmetricEigen::new(m).eigenvalues.as_slice().to_vec();
    eig.sort_by(f64::total_cmp);
    Ok(Relaxation::new(eig[1], RelaxMode::Dense, 0.0, 0))
}

fn characters(space: &WalkSpace) -> Result<Relaxation> {
    let ch = space
        .characters
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("character mode needs an abelian group".into()))?;
    let r = ch.moduli.len();
    let mut chi = vec![0u32; r];
    let mut best = f64::INFINITY;
    loop {
        let mut pos = 0;
        while pos < r {
            chi[pos] += 1;
            if chi[pos] < ch.moduli[pos] {
                break;
            }
            chi[pos] = 0;
            pos += 1;
        }
        if pos == r {
            break;
        }
        let lambda: f64 = ch
            .steps
            .iter()
            .map(|(s, w)| {
                let phase: f64 = (0..r)
                    .map(|j| (chi[j] as u64 * s[j] as u64 % ch.moduli[j] as u64) as f64 / ch.moduli[j] as f64)
                    .sum();
                w * (std::f64::consts::TAU * phase).cos()
            })
            .sum();
        best = best.min(1.0 - lambda);
    }
    Ok(Relaxation::new(best, RelaxMode::Characters, 0.0, 0))
}

fn project_out_constants(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    for x in v.iter_mut() {
        *x -= mean;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Modified Gram-Schmidt, applied twice.
fn orthonormalize(block: &mut [Vec<f64>]) {
    for _ in 0..2 {
        for i in 0..block.len() {
            let (done, rest) = block.split_at_mut(i);
            let v = &mut rest[0];
            for u in done.iter() {
                let c = dot(u, v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= c * y;
                }
            }
            let norm = dot(v, v).sqrt();
            for x in v.iter_mut() {
                *x /= norm;
            }
        }
    }
}

/// `(I + P)/2` applied to `v`.
fn apply_shifted(space: &WalkSpace, v: &[f64], out: &mut [f64]) {
    space.step(v, out);
    for (o, x) in out.iter_mut().zip(v) {
        *o = 0.5 * (*o + x);
    }
}

/// Block orthogonal iteration on `(I + P)/2` in the complement of the
/// constants, with a Rayleigh-Ritz step every few sweeps.
fn iterative(space: &WalkSpace, max_iter: usize) -> Result<Relaxation> {
    let n = space.len();
    let b = 8.min(n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x: Vec<Vec<f64>> = (0..b)
        .map(|_| {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            project_out_constants(&mut v);
            v
        })
        .collect();
    orthonormalize(&mut x);
    let mut y = vec![vec![0.0; n]; b];
    let mut iterations = 0;
    let mut last = (f64::NAN, f64::INFINITY);
    while iterations < max_iter {
        for _ in 0..10 {
            for (xi, yi) in x.iter().zip(y.iter_mut()) {
                apply_shifted(space, xi, yi);
                project_out_constants(yi);
            }
            std::mem::swap(&mut x, &mut y);
            orthonormalize(&mut x);
            iterations += 1;
        }
        // Rayleigh-Ritz on span(x).
        for (xi, yi) in x.iter().zip(y.iter_mut()) {
            apply_shifted(space, xi, yi);
        }
        let h = DMatrix::from_fn(b, b, |i, j| 0.5 * (dot(&x[i], &y[j]) + dot(&x[j], &y[i])));
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..b).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let rotate = |src: &[Vec<f64>]| -> Vec<Vec<f64>> {
            order
                .iter()
                .map(|&c| {
                    let mut v = vec![0.0; n];
                    for (r, s) in src.iter().enumerate() {
                        let coef = eig.eigenvectors[(r, c)];
                        for (a, &z) in v.iter_mut().zip(s) {
                            *a += coef * z;
                        }
                    }
                    v
                })
                .collect()
        };
        let new_x = rotate(&x);
        let new_y = rotate(&y);
        let mu = eig.eigenvalues[order[0]];
        let res_shifted = new_y[0]
            .iter()
            .zip(&new_x[0])
            .map(|(a, b)| (a - mu * b).powi(2))
            .sum::<f64>()
            .sqrt();
        x = new_x;
        // For P itself: λ = 2μ - 1 and the residual doubles.
        last = (2.0 * mu - 1.0, 2.0 * res_shifted);
        if last.1 < RESIDUAL_TOL {
            break;
        }
    }
    Ok(Relaxation::new(1.0 - last.0, RelaxMode::Iterative, last.1, iterations))
}
