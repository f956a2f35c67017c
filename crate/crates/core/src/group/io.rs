//! Binary group-table files and JSON summaries.
//!
//! Binary layout (all integers little-endian):
//!
//! ```text
//! magic      4 bytes  "NMX1"
//! version    u32      1
//! spec_len   u32      length of the JSON-encoded GroupSpec
//! spec       bytes
//! order      u64
//! ncoords    u32
//! coords     order * ncoords u32, element-major, identity first
//! nterms     u32      L + 1
//! per term:  u64 size, then size u32 element indices (ascending)
//! ```

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::series::{self, Subgroup};
use super::spec::{Arith, GroupSpec};
use super::table::{Element, GroupTable};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NMX1";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_table<W: Write>(g: &GroupTable, mut w: W) -> Result<()> {
    let spec = serde_json::to_vec(&g.spec)?;
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(spec.len() as u32).to_le_bytes())?;
    w.write_all(&spec)?;
    w.write_all(&(g.order() as u64).to_le_bytes())?;
    w.write_all(&(g.ncoords as u32).to_le_bytes())?;
    for &c in &g.coords {
        w.write_all(&c.to_le_bytes())?;
    }
    w.write_all(&(g.series.len() as u32).to_le_bytes())?;
    for term in &g.series {
        w.write_all(&(term.len() as u64).to_le_bytes())?;
        for &m in term.member_indices() {
            w.write_all(&m.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_table<R: Read>(mut r: R) -> Result<GroupTable> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic bytes".into()));
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let spec_len = read_u32(&mut r)? as usize;
    let mut spec_bytes = vec![0u8; spec_len];
    r.read_exact(&mut spec_bytes)?;
    let spec: GroupSpec = serde_json::from_slice(&spec_bytes)?;
    spec.validate()?;
    let order = read_u64(&mut r)? as usize;
    if order as u128 != spec.predicted_order() {
        return Err(Error::Format(format!(
            "order {order} does not match spec {}",
            spec.label()
        )));
    }
    let arith = Arith::from_spec(&spec);
    let ncoords = read_u32(&mut r)? as usize;
    if ncoords != arith.ncoords() {
        return Err(Error::Format("coordinate count mismatch".into()));
    }
    let moduli = arith.moduli();
    let mut radix = Vec::with_capacity(ncoords);
    let mut acc = 1u64;
    for &m in &moduli {
        radix.push(acc);
        acc *= m as u64;
    }
    let mut coords = Vec::with_capacity(order * ncoords);
    for _ in 0..order * ncoords {
        coords.push(read_u32(&mut r)?);
    }
    let mut lookup = vec![u32::MAX; acc as usize];
    for i in 0..order {
        let v = &coords[i * ncoords..(i + 1) * ncoords];
        if v.iter().zip(&moduli).any(|(&c, &m)| c >= m) {
            return Err(Error::Format(format!("element {i} is not reduced")));
        }
        let code: u64 = v.iter().zip(&radix).map(|(&c, &r)| c as u64 * r).sum();
        if lookup[code as usize] != u32::MAX {
            return Err(Error::Format(format!("duplicate element {i}")));
        }
        lookup[code as usize] = i as u32;
    }
    if coords[..ncoords].iter().any(|&c| c != 0) {
        return Err(Error::Format("element 0 is not the identity".into()));
    }
    let nterms = read_u32(&mut r)? as usize;
    let mut terms = Vec::with_capacity(nterms);
    for _ in 0..nterms {
        let len = read_u64(&mut r)? as usize;
        let mut members = Vec::with_capacity(len);
        for _ in 0..len {
            let m = read_u32(&mut r)?;
            if m as usize >= order {
                return Err(Error::Format("series member out of range".into()));
            }
            members.push(m);
        }
        terms.push(Subgroup::from_members(order, members));
    }
    if terms.len() < 2 || terms[0].len() != order || !terms.last().unwrap().is_trivial() {
        return Err(Error::Format("series must run from G to the trivial group".into()));
    }

    let mut table = GroupTable {
        spec,
        arith,
        ncoords,
        radix,
        coords,
        lookup,
        inverse: Vec::new(),
        generators: Vec::new(),
        series: terms,
        layers: Vec::new(),
        ab_invariants: Vec::new(),
    };
    let mut buf = vec![0u32; ncoords];
    table.inverse = (0..order)
        .map(|i| {
            table
                .arith
                .inv(&table.coords[i * ncoords..(i + 1) * ncoords], &mut buf);
            table.element_from_coords(&buf).map(|e| e.0)
        })
        .collect::<Option<Vec<u32>>>()
        .ok_or_else(|| Error::Format("element set not closed under inversion".into()))?;
    table.generators = table
        .arith
        .generators()
        .iter()
        .map(|g| table.element_from_coords(g))
        .collect::<Option<Vec<Element>>>()
        .ok_or_else(|| Error::Format("canonical generator missing".into()))?;
    table.layers = series::build_layers(&table);
    table.ab_invariants = table.layers[0].invariants.clone();
    Ok(table)
}

/// Human-readable description of a built group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub label: String,
    pub spec: GroupSpec,
    pub order: usize,
    pub step: usize,
    pub rank: usize,
    pub series_sizes: Vec<usize>,
    pub layer_orders: Vec<usize>,
    pub layer_ranks: Vec<usize>,
    pub ab_order: usize,
    pub ab_invariants: Vec<u64>,
    pub canonical_generators: Vec<Vec<u32>>,
}

impl GroupSummary {
    pub fn of(g: &GroupTable) -> GroupSummary {
        GroupSummary {
            label: g.spec.label(),
            spec: g.spec.clone(),
            order: g.order(),
            step: g.step(),
            rank: g.rank(),
            series_sizes: g.series_sizes(),
            layer_orders: g.layers().iter().map(|l| l.q_order()).collect(),
            layer_ranks: g.layer_ranks(),
            ab_order: g.ab_order(),
            ab_invariants: g.ab_invariants().to_vec(),
            canonical_generators: g
                .canonical_generators()
                .iter()
                .map(|&s| g.coords(s).to_vec())
                .collect(),
        }
    }
}
