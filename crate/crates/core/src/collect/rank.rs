use crate::error::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat: a^{p-2}.
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * base as u128 % p as u128) as u64;
        }
        base = (base as u128 * base as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Row echelon data of a matrix over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    pub rank: usize,
    /// Pivot columns in increasing order.
    pub pivot_cols: Vec<usize>,
    /// Original rows that form a basis of the row space, in scan order.
    pub basis_rows: Vec<usize>,
}

/// Gaussian elimination mod `p`, scanning rows in order and keeping a row
/// when it is independent of the ones kept before it.
pub fn echelon_mod_p(m: &[Vec<i64>], p: u64) -> Result<Echelon> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let cols = m.first().map_or(0, Vec::len);
    let reduce = |x: i64| x.rem_euclid(p as i64) as u64;
    // Reduced basis rows keyed by their pivot column.
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut basis_rows = Vec::new();
    for (i, row) in m.iter().enumerate() {
        assert_eq!(row.len(), cols, "ragged matrix");
        let mut r: Vec<u64> = row.iter().map(|&x| reduce(x)).collect();
        for (pc, b) in &basis {
            let f = r[*pc];
            if f != 0 {
                for (x, &y) in r.iter_mut().zip(b) {
                    *x = (*x + p - (f as u128 * y as u128 % p as u128) as u64) % p;
                }
            }
        }
        if let Some(pc) = r.iter().position(|&x| x != 0) {
            let inv = inv_mod(r[pc], p);
            for x in &mut r {
                *x = (*x as u128 * inv as u128 % p as u128) as u64;
            }
            // Keep the basis fully reduced in the new pivot column.
            for (_, b) in &mut basis {
                let f = b[pc];
                if f != 0 {
                    for (x, &y) in b.iter_mut().zip(&r) {
                        *x = (*x + p - (f as u128 * y as u128 % p as u128) as u64) % p;
                    }
                }
            }
            basis.push((pc, r));
            basis_rows.push(i);
        }
    }
    let mut pivot_cols: Vec<usize> = basis.iter().map(|(c, _)| *c).collect();
    pivot_cols.sort_unstable();
    Ok(Echelon {
        rank: basis.len(),
        pivot_cols,
        basis_rows,
    })
}

pub fn rank_mod_p(m: &[Vec<i64>], p: u64) -> Result<usize> {
    Ok(echelon_mod_p(m, p)?.rank)
}

/// `A[rows, cols]`.
pub fn submatrix(m: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> Vec<Vec<i64>> {
    rows.iter()
        .map(|&r| cols.iter().map(|&c| m[r][c]).collect())
        .collect()
}
