//! Real-basis Clebsch-Gordan coefficients.
//!
//! `C^{l3,m3}_{l1,m1,l2,m2}` maps the tensor product of a degree-`l1` and a degree-`l2`
//! irrep onto its degree-`l3` component, `w^{m3} = sum C u^{m1} v^{m2}`, isometrically.
//! The sign of each `(l1, l2, l3)` block is fixed by `C^{l3,0}_{l1,0,l2,0} > 0`; where that
//! entry vanishes (odd `l1 + l2 + l3`) and `l1 <= l2`, the first nonzero entry in
//! `(m3, m1, m2)` storage order is positive. Blocks with `l1 > l2` are defined by the
//! exchange relation `C^{l3}_{l1,m1,l2,m2} = (-1)^(l1+l2-l3) C^{l3}_{l2,m2,l1,m1}`.

mod construct;

use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::io::{format_g17, BlobReader, BlobWriter};
use crate::sh::{block_offset, num_components, order_at};
use crate::Capacity;

/// Magic bytes of the binary table format.
pub const CGC_MAGIC: &[u8; 4] = b"CGCT";
pub const CGC_VERSION: u32 = 1;

/// Nonzero entries of one `(l1, l2, l3)` block as `(offset1, offset2, offset3, value)`,
/// offsets being positions inside each degree block.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CouplingBlock {
    pub entries: Vec<(u16, u16, u16, f64)>,
}

/// Precomputed coefficients for all degrees up to `max_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct CgcTable {
    max_degree: usize,
    /// Indexed `((i1 * n) + i2) * n + i3` with `i = l^2 + offset`, `n = (L+1)^2`.
    dense: Vec<f64>,
    blocks: Vec<CouplingBlock>,
}

/// Builds the table under the default capacity.
pub fn build_cgc_table(max_degree: usize) -> Result<CgcTable> {
    CgcTable::build(max_degree, Capacity::default())
}

fn parity_sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl CgcTable {
    pub fn build(max_degree: usize, capacity: Capacity) -> Result<Self> {
        capacity.check(max_degree)?;
        let l = max_degree;
        let n = num_components(l);
        let mut dense = vec![0.0; n * n * n];
        for ((l1, l2, l3), c) in construct::build_blocks(l) {
            let (d1, d2) = (2 * l1 + 1, 2 * l2 + 1);
            let swap = parity_sign(l1 + l2 - l3);
            for o3 in 0..c.nrows() {
                for o1 in 0..d1 {
                    for o2 in 0..d2 {
                        let v = c[(o3, o1 * d2 + o2)];
                        let (i1, i2, i3) = (l1 * l1 + o1, l2 * l2 + o2, l3 * l3 + o3);
                        dense[(i1 * n + i2) * n + i3] = v;
                        if l1 != l2 {
                            dense[(i2 * n + i1) * n + i3] = swap * v;
                        }
                    }
                }
            }
        }
        Ok(Self::from_dense(l, dense))
    }

    fn from_dense(max_degree: usize, dense: Vec<f64>) -> Self {
        let n = num_components(max_degree);
        let nl = max_degree + 1;
        let mut blocks = vec![CouplingBlock::default(); nl * nl * nl];
        for l1 in 0..nl {
            for l2 in 0..nl {
                for l3 in 0..nl {
                    let block = &mut blocks[(l1 * nl + l2) * nl + l3];
                    for o1 in 0..2 * l1 + 1 {
                        for o2 in 0..2 * l2 + 1 {
                            for o3 in 0..2 * l3 + 1 {
                                let (i1, i2, i3) = (l1 * l1 + o1, l2 * l2 + o2, l3 * l3 + o3);
                                let v = dense[(i1 * n + i2) * n + i3];
                                if v != 0.0 {
                                    block.entries.push((o1 as u16, o2 as u16, o3 as u16, v));
                                }
                            }
                        }
                    }
                }
            }
        }
        Self {
            max_degree,
            dense,
            blocks,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Dense coefficients in storage order.
    pub fn as_slice(&self) -> &[f64] {
        &self.dense
    }

    /// Coefficient by flat `(l, m)` indices; no bounds checking beyond the slice.
    #[inline]
    pub fn get_indexed(&self, i1: usize, i2: usize, i3: usize) -> f64 {
        let n = num_components(self.max_degree);
        self.dense[(i1 * n + i2) * n + i3]
    }

    /// Nonzero entries of the `(l1, l2, l3)` block (empty outside the selection rule).
    pub fn block(&self, l1: usize, l2: usize, l3: usize) -> &CouplingBlock {
        let nl = self.max_degree + 1;
        &self.blocks[(l1 * nl + l2) * nl + l3]
    }

    /// The `(l1, l2, l3)` block as a `(2 l3 + 1) x ((2 l1 + 1)(2 l2 + 1))` matrix with
    /// column index `offset1 * (2 l2 + 1) + offset2`.
    pub fn block_matrix(&self, l1: usize, l2: usize, l3: usize) -> DMatrix<f64> {
        let d2 = 2 * l2 + 1;
        let mut m = DMatrix::zeros(2 * l3 + 1, (2 * l1 + 1) * d2);
        for &(o1, o2, o3, v) in &self.block(l1, l2, l3).entries {
            m[(o3 as usize, o1 as usize * d2 + o2 as usize)] = v;
        }
        m
    }

    /// Writes `l1,m1,l2,m2,l3,m3,value` rows for every nonzero coefficient.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "l1,m1,l2,m2,l3,m3,value")?;
        let nl = self.max_degree + 1;
        for l1 in 0..nl {
            for l2 in 0..nl {
                for l3 in 0..nl {
                    for &(o1, o2, o3, v) in &self.block(l1, l2, l3).entries {
                        writeln!(
                            w,
                            "{l1},{},{l2},{},{l3},{},{}",
                            order_at(l1, o1 as usize),
                            order_at(l2, o2 as usize),
                            order_at(l3, o3 as usize),
                            format_g17(v)
                        )?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Little-endian blob: `"CGCT"`, version `u32`, `L` as `u32`, then the dense `f64` array.
    pub fn to_blob(&self) -> Vec<u8> {
        let mut w = BlobWriter::new(CGC_MAGIC, CGC_VERSION);
        w.u32(self.max_degree as u32);
        w.f64s(&self.dense);
        w.finish()
    }

    pub fn from_blob(bytes: &[u8]) -> Result<Self> {
        let mut r = BlobReader::new(bytes, CGC_MAGIC, CGC_VERSION)?;
        let l = r.u32()? as usize;
        if l > crate::HARD_MAX_DEGREE {
            return Err(Error::Format(format!(
                "table degree {l} exceeds the hard ceiling"
            )));
        }
        let n = num_components(l);
        let dense = r.f64s(n * n * n)?;
        r.finish()?;
        Ok(Self::from_dense(l, dense))
    }
}

fn check_order(l: usize, m: i64) -> Result<()> {
    if m.unsigned_abs() as usize > l {
        invalid(format!("order {m} out of range for degree {l}"))
    } else {
        Ok(())
    }
}

/// `C^{l3,m3}_{l1,m1,l2,m2}`; exactly zero outside the selection rule.
pub fn cgc(
    table: &CgcTable,
    l1: usize,
    m1: i64,
    l2: usize,
    m2: i64,
    l3: usize,
    m3: i64,
) -> Result<f64> {
    let lmax = l1.max(l2).max(l3);
    if lmax > table.max_degree {
        return invalid(format!(
            "degree {lmax} exceeds table maximum {}",
            table.max_degree
        ));
    }
    check_order(l1, m1)?;
    check_order(l2, m2)?;
    check_order(l3, m3)?;
    Ok(table.get_indexed(
        l1 * l1 + block_offset(l1, m1),
        l2 * l2 + block_offset(l2, m2),
        l3 * l3 + block_offset(l3, m3),
    ))
}

/// A single irrep of degree `l`: `2l + 1` components in storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct Irrep {
    degree: usize,
    components: Vec<f64>,
}

impl Irrep {
    pub fn new(degree: usize, components: Vec<f64>) -> Result<Self> {
        if components.len() != 2 * degree + 1 {
            return invalid(format!(
                "degree {degree} needs {} components, got {}",
                2 * degree + 1,
                components.len()
            ));
        }
        Ok(Self { degree, components })
    }

    pub fn zeros(degree: usize) -> Self {
        Self {
            degree,
            components: vec![0.0; 2 * degree + 1],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn norm_squared(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum()
    }
}

/// The degree-`l3` component of `u (x) v`.
pub fn couple(table: &CgcTable, u: &Irrep, v: &Irrep, l3: usize) -> Result<Irrep> {
    let lmax = u.degree.max(v.degree).max(l3);
    if lmax > table.max_degree {
        return invalid(format!(
            "degree {lmax} exceeds table maximum {}",
            table.max_degree
        ));
    }
    let mut w = Irrep::zeros(l3);
    for &(o1, o2, o3, c) in &table.block(u.degree, v.degree, l3).entries {
        w.components[o3 as usize] += c * u.components[o1 as usize] * v.components[o2 as usize];
    }
    Ok(w)
}
