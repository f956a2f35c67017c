use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Description of a finite nilpotent group from one of the supported families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GroupSpec {
    /// `d x d` unit upper-triangular matrices over `Z_m`.
    Unitriangular { m: u32, d: u32 },
    /// Heisenberg group of dimension `2d + 1` over `Z_m`, as the
    /// `(d+2) x (d+2)` unitriangular matrices with nonzero entries only in
    /// the first row and the last column.
    Heisenberg { m: u32, d: u32 },
    /// `Z_{m_1} + ... + Z_{m_n}`.
    Abelian { moduli: Vec<u32> },
    DirectProduct { factors: Vec<GroupSpec> },
}

impl GroupSpec {
    pub fn unitriangular(m: u32, d: u32) -> Self {
        GroupSpec::Unitriangular { m, d }
    }

    pub fn heisenberg(m: u32, d: u32) -> Self {
        GroupSpec::Heisenberg { m, d }
    }

    pub fn abelian(moduli: impl Into<Vec<u32>>) -> Self {
        GroupSpec::Abelian {
            moduli: moduli.into(),
        }
    }

    pub fn direct_product(factors: impl Into<Vec<GroupSpec>>) -> Self {
        GroupSpec::DirectProduct {
            factors: factors.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::Unitriangular { m, d } => {
                if *m < 2 {
                    return Err(Error::InvalidSpec(format!("modulus {m} < 2")));
                }
                if *d < 2 {
                    return Err(Error::InvalidSpec(format!(
                        "unitriangular dimension {d} < 2 gives the trivial group"
                    )));
                }
            }
            GroupSpec::Heisenberg { m, d } => {
                if *m < 2 {
                    return Err(Error::InvalidSpec(format!("modulus {m} < 2")));
                }
                if *d < 1 {
                    return Err(Error::InvalidSpec("heisenberg dimension < 1".into()));
                }
            }
            GroupSpec::Abelian { moduli } => {
                if moduli.is_empty() {
                    return Err(Error::InvalidSpec("abelian group with no factors".into()));
                }
                if let Some(m) = moduli.iter().find(|&&m| m < 2) {
                    return Err(Error::InvalidSpec(format!("modulus {m} < 2")));
                }
            }
            GroupSpec::DirectProduct { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidSpec("direct product with no factors".into()));
                }
                for f in factors {
                    f.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Order predicted from the family formula, saturating at `u128::MAX`.
    pub fn predicted_order(&self) -> u128 {
        fn pow(m: u32, e: u64) -> u128 {
            let mut acc: u128 = 1;
            for _ in 0..e {
                acc = acc.saturating_mul(m as u128);
            }
            acc
        }
        match self {
            GroupSpec::Unitriangular { m, d } => {
                let d = *d as u64;
                pow(*m, d * d.saturating_sub(1) / 2)
            }
            GroupSpec::Heisenberg { m, d } => pow(*m, 2 * *d as u64 + 1),
            GroupSpec::Abelian { moduli } => moduli
                .iter()
                .fold(1u128, |acc, &m| acc.saturating_mul(m as u128)),
            GroupSpec::DirectProduct { factors } => factors
                .iter()
                .fold(1u128, |acc, f| acc.saturating_mul(f.predicted_order())),
        }
    }

    /// Short human-readable label, e.g. `heisenberg(3,1)`.
    pub fn label(&self) -> String {
        match self {
            GroupSpec::Unitriangular { m, d } => format!("unitriangular({m},{d})"),
            GroupSpec::Heisenberg { m, d } => format!("heisenberg({m},{d})"),
            GroupSpec::Abelian { moduli } => {
                let parts: Vec<String> = moduli.iter().map(|m| format!("Z{m}")).collect();
                parts.join("+")
            }
            GroupSpec::DirectProduct { factors } => {
                let parts: Vec<String> = factors.iter().map(|f| f.label()).collect();
                format!("({})", parts.join(" x "))
            }
        }
    }
}

/// Coordinate arithmetic for one family. Elements are vectors of residues;
/// the identity is always the all-zero vector.
#[derive(Debug, Clone)]
pub(crate) enum Arith {
    /// Strictly-upper entries of a `d x d` matrix, row-major.
    Unitriangular { m: u32, d: usize },
    /// Layout `(x_1..x_d, y_1..y_d, z)`.
    Heisenberg { m: u32, d: usize },
    Abelian { moduli: Vec<u32> },
    Product { parts: Vec<(usize, Arith)> },
}

impl Arith {
    pub(crate) fn from_spec(spec: &GroupSpec) -> Arith {
        match spec {
            GroupSpec::Unitriangular { m, d } => Arith::Unitriangular {
                m: *m,
                d: *d as usize,
            },
            GroupSpec::Heisenberg { m, d } => Arith::Heisenberg {
                m: *m,
                d: *d as usize,
            },
            GroupSpec::Abelian { moduli } => Arith::Abelian {
                moduli: moduli.clone(),
            },
            GroupSpec::DirectProduct { factors } => {
                let mut offset = 0;
                let parts = factors
                    .iter()
                    .map(|f| {
                        let a = Arith::from_spec(f);
                        let o = offset;
                        offset += a.ncoords();
                        (o, a)
                    })
                    .collect();
                Arith::Product { parts }
            }
        }
    }

    pub(crate) fn ncoords(&self) -> usize {
        match self {
            Arith::Unitriangular { d, .. } => d * (d - 1) / 2,
            Arith::Heisenberg { d, .. } => 2 * d + 1,
            Arith::Abelian { moduli } => moduli.len(),
            Arith::Product { parts } => parts.iter().map(|(_, a)| a.ncoords()).sum(),
        }
    }

    /// Modulus of every coordinate, in coordinate order.
    pub(crate) fn moduli(&self) -> Vec<u32> {
        match self {
            Arith::Unitriangular { m, .. } | Arith::Heisenberg { m, .. } => {
                vec![*m; self.ncoords()]
            }
            Arith::Abelian { moduli } => moduli.clone(),
            Arith::Product { parts } => parts.iter().flat_map(|(_, a)| a.moduli()).collect(),
        }
    }

    /// Canonical generating set, as coordinate vectors.
    pub(crate) fn generators(&self) -> Vec<Vec<u32>> {
        let n = self.ncoords();
        match self {
            Arith::Unitriangular { d, .. } => (0..d - 1)
                .map(|i| {
                    let mut v = vec![0; n];
                    v[upper_index(*d, i, i + 1)] = 1;
                    v
                })
                .collect(),
            Arith::Heisenberg { d, .. } => (0..2 * d)
                .map(|i| {
                    let mut v = vec![0; n];
                    v[i] = 1;
                    v
                })
                .collect(),
            Arith::Abelian { moduli } => (0..moduli.len())
                .map(|i| {
                    let mut v = vec![0; n];
                    v[i] = 1;
                    v
                })
                .collect(),
            Arith::Product { parts } => {
                let mut out = Vec::new();
                for (offset, a) in parts {
                    for g in a.generators() {
                        let mut v = vec![0; n];
                        v[*offset..*offset + g.len()].copy_from_slice(&g);
                        out.push(v);
                    }
                }
                out
            }
        }
    }

    pub(crate) fn mul(&self, a: &[u32], b: &[u32], out: &mut [u32]) {
        match self {
            Arith::Unitriangular { m, d } => {
                let m = *m as u64;
                let d = *d;
                for i in 0..d {
                    for j in i + 1..d {
                        let mut acc = a[upper_index(d, i, j)] as u64 + b[upper_index(d, i, j)] as u64;
                        for k in i + 1..j {
                            acc += a[upper_index(d, i, k)] as u64 * b[upper_index(d, k, j)] as u64;
                        }
                        out[upper_index(d, i, j)] = (acc % m) as u32;
                    }
                }
            }
            Arith::Heisenberg { m, d } => {
                let m64 = *m as u64;
                let d = *d;
                let mut dot = 0u64;
                for i in 0..d {
                    dot += a[i] as u64 * b[d + i] as u64;
                }
                for i in 0..2 * d {
                    out[i] = ((a[i] as u64 + b[i] as u64) % m64) as u32;
                }
                out[2 * d] = ((a[2 * d] as u64 + b[2 * d] as u64 + dot) % m64) as u32;
            }
            Arith::Abelian { moduli } => {
                for (i, &m) in moduli.iter().enumerate() {
                    out[i] = ((a[i] as u64 + b[i] as u64) % m as u64) as u32;
                }
            }
            Arith::Product { parts } => {
                for (offset, arith) in parts {
                    let n = arith.ncoords();
                    let r = *offset..*offset + n;
                    arith.mul(&a[r.clone()], &b[r.clone()], &mut out[r]);
                }
            }
        }
    }

    pub(crate) fn inv(&self, a: &[u32], out: &mut [u32]) {
        match self {
            Arith::Unitriangular { m, d } => {
                // Solve (I + A)(I + B) = I column by column: b_ij = -(a_ij + sum_k a_ik b_kj).
                let m = *m as u64;
                let d = *d;
                for j in 1..d {
                    for i in (0..j).rev() {
                        let mut acc = a[upper_index(d, i, j)] as u64;
                        for k in i + 1..j {
                            acc += a[upper_index(d, i, k)] as u64 * out[upper_index(d, k, j)] as u64;
                        }
                        out[upper_index(d, i, j)] = ((m - acc % m) % m) as u32;
                    }
                }
            }
            Arith::Heisenberg { m, d } => {
                let m64 = *m as u64;
                let d = *d;
                let mut dot = 0u64;
                for i in 0..d {
                    dot += a[i] as u64 * a[d + i] as u64;
                }
                for i in 0..2 * d {
                    out[i] = ((m64 - a[i] as u64 % m64) % m64) as u32;
                }
                // (x,y,z)^{-1} = (-x, -y, -z + x.y)
                out[2 * d] = ((m64 - a[2 * d] as u64 % m64 + dot) % m64) as u32;
            }
            Arith::Abelian { moduli } => {
                for (i, &m) in moduli.iter().enumerate() {
                    out[i] = (m - a[i] % m) % m;
                }
            }
            Arith::Product { parts } => {
                for (offset, arith) in parts {
                    let n = arith.ncoords();
                    let r = *offset..*offset + n;
                    arith.inv(&a[r.clone()], &mut out[r]);
                }
            }
        }
    }
}

/// Position of entry `(i, j)`, `i < j`, in the row-major strictly-upper packing.
pub(crate) fn upper_index(d: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < d);
    i * d - i * (i + 1) / 2 + (j - i - 1)
}
