//! Irrep features: arrays of shape `(P, (L+1)^2, F)`.
//!
//! With `P = 2` (general layout) row 0 holds the even-parity and row 1 the odd-parity
//! components of every degree. With `P = 1` (compact layout) only proper tensors are
//! stored: the degree-`l` block carries parity `(-1)^l` and pseudotensors are implicitly
//! zero. Storage is parity-major, then degree block, then feature.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::io::{BlobReader, BlobWriter};
use crate::rotations::{GroupElement, WignerDSet};
use crate::sh::num_components;

pub const IRRF_MAGIC: &[u8; 4] = b"IRRF";
pub const IRRF_VERSION: u32 = 1;

/// Largest pseudotensor magnitude accepted by [`IrrepFeatures::to_compact`].
pub const COMPACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity of a proper tensor of degree `l`.
    pub fn of_degree(l: usize) -> Self {
        if l.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            s => invalid(format!("parity must be +1 or -1, got {s}")),
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    /// Parity of a tensor product.
    pub fn product(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Row of this parity in the general layout.
    pub fn row(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Parity::Even => '+',
            Parity::Odd => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    /// Both parities stored, `P = 2`.
    General,
    /// Proper tensors only, `P = 1`.
    Compact,
}

impl Layout {
    pub fn parity_rows(self) -> usize {
        match self {
            Layout::General => 2,
            Layout::Compact => 1,
        }
    }

    /// `(degree, parity)` pairs stored by this layout, degree-major.
    pub fn blocks(self, max_degree: usize) -> Vec<(usize, Parity)> {
        match self {
            Layout::General => (0..=max_degree)
                .flat_map(|l| [(l, Parity::Even), (l, Parity::Odd)])
                .collect(),
            Layout::Compact => (0..=max_degree)
                .map(|l| (l, Parity::of_degree(l)))
                .collect(),
        }
    }
}

/// A copied `(1, 2l+1, F)` sub-array.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrepBlock {
    pub degree: usize,
    pub parity: Parity,
    pub num_features: usize,
    /// `(2l+1) x F`, feature-minor.
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrrepFeatures {
    layout: Layout,
    max_degree: usize,
    num_features: usize,
    data: Vec<f64>,
}

impl IrrepFeatures {
    pub fn zeros(layout: Layout, max_degree: usize, num_features: usize) -> Self {
        let len = layout.parity_rows() * num_components(max_degree) * num_features;
        Self {
            layout,
            max_degree,
            num_features,
            data: vec![0.0; len],
        }
    }

    pub fn from_data(
        layout: Layout,
        max_degree: usize,
        num_features: usize,
        data: Vec<f64>,
    ) -> Result<Self> {
        let len = layout.parity_rows() * num_components(max_degree) * num_features;
        if data.len() != len {
            return invalid(format!(
                "shape ({}, {}, {num_features}) needs {len} values, got {}",
                layout.parity_rows(),
                num_components(max_degree),
                data.len()
            ));
        }
        Ok(Self {
            layout,
            max_degree,
            num_features,
            data,
        })
    }

    /// Independent standard-normal entries in every stored component.
    pub fn random<R: Rng + ?Sized>(
        layout: Layout,
        max_degree: usize,
        num_features: usize,
        rng: &mut R,
    ) -> Self {
        let mut x = Self::zeros(layout, max_degree, num_features);
        for v in &mut x.data {
            *v = rng.sample(StandardNormal);
        }
        x
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    /// `(P, (L+1)^2, F)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (
            self.layout.parity_rows(),
            num_components(self.max_degree),
            self.num_features,
        )
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Parity row holding `(l, parity)`, or `None` when the layout does not store it.
    pub fn row_of(&self, l: usize, parity: Parity) -> Option<usize> {
        match self.layout {
            Layout::General => Some(parity.row()),
            Layout::Compact => (parity == Parity::of_degree(l)).then_some(0),
        }
    }

    fn block_range(&self, row: usize, l: usize) -> std::ops::Range<usize> {
        let n = num_components(self.max_degree);
        let f = self.num_features;
        let start = (row * n + l * l) * f;
        start..start + (2 * l + 1) * f
    }

    /// Stored `(l, parity)` block as a `(2l+1) x F` slice.
    pub fn block(&self, l: usize, parity: Parity) -> Option<&[f64]> {
        if l > self.max_degree {
            return None;
        }
        let row = self.row_of(l, parity)?;
        Some(&self.data[self.block_range(row, l)])
    }

    pub fn block_mut(&mut self, l: usize, parity: Parity) -> Option<&mut [f64]> {
        if l > self.max_degree {
            return None;
        }
        let row = self.row_of(l, parity)?;
        let range = self.block_range(row, l);
        Some(&mut self.data[range])
    }

    /// Stored `(degree, parity)` blocks.
    pub fn blocks(&self) -> Vec<(usize, Parity)> {
        self.layout.blocks(self.max_degree)
    }

    /// Even scalar of every channel, `x^(0+)`.
    pub fn scalars(&self) -> &[f64] {
        &self.data[..self.num_features]
    }

    pub fn get(&self, parity: Parity, index: usize, feature: usize) -> f64 {
        let (l, _) = crate::sh::degree_order(index);
        match self.row_of(l, parity) {
            Some(row) => {
                self.data
                    [(row * num_components(self.max_degree) + index) * self.num_features + feature]
            }
            None => 0.0,
        }
    }

    /// `x^(l_p)` as an owned `(1, 2l+1, F)` array; zeros for pseudotensors of compact features.
    pub fn slice_degree_parity(&self, l: usize, parity: Parity) -> Result<IrrepBlock> {
        if l > self.max_degree {
            return invalid(format!(
                "degree {l} exceeds maximum degree {}",
                self.max_degree
            ));
        }
        let data = match self.block(l, parity) {
            Some(b) => b.to_vec(),
            None => vec![0.0; (2 * l + 1) * self.num_features],
        };
        Ok(IrrepBlock {
            degree: l,
            parity,
            num_features: self.num_features,
            data,
        })
    }

    /// Embeds compact features into the general layout; identity on general features.
    pub fn to_general(&self) -> IrrepFeatures {
        if self.layout == Layout::General {
            return self.clone();
        }
        let mut out = Self::zeros(Layout::General, self.max_degree, self.num_features);
        for l in 0..=self.max_degree {
            let p = Parity::of_degree(l);
            out.block_mut(l, p)
                .expect("general layout stores every block")
                .copy_from_slice(self.block(l, p).expect("proper tensor"));
        }
        out
    }

    /// Drops pseudotensor rows, which must vanish to within [`COMPACT_TOL`].
    pub fn to_compact(&self) -> Result<IrrepFeatures> {
        if self.layout == Layout::Compact {
            return Ok(self.clone());
        }
        for l in 0..=self.max_degree {
            let pseudo = match Parity::of_degree(l) {
                Parity::Even => Parity::Odd,
                Parity::Odd => Parity::Even,
            };
            let block = self.block(l, pseudo).expect("general layout");
            let max = block.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if max > COMPACT_TOL {
                return Err(Error::Precondition(format!(
                    "pseudotensor block (l={l}, parity {}) has magnitude {max:.3e}",
                    pseudo.symbol()
                )));
            }
        }
        let mut out = Self::zeros(Layout::Compact, self.max_degree, self.num_features);
        for l in 0..=self.max_degree {
            let p = Parity::of_degree(l);
            out.block_mut(l, p)
                .expect("proper tensor")
                .copy_from_slice(self.block(l, p).expect("general layout"));
        }
        Ok(out)
    }

    /// Action of `g`: `D^l(R)` on every block, times `g.sign()` on odd-parity blocks.
    pub fn transform(&self, g: &GroupElement, d: &WignerDSet) -> Result<IrrepFeatures> {
        if d.max_degree() < self.max_degree {
            return invalid(format!(
                "Wigner-D set has degree {} but features need {}",
                d.max_degree(),
                self.max_degree
            ));
        }
        let mut out = Self::zeros(self.layout, self.max_degree, self.num_features);
        let f = self.num_features;
        for (l, p) in self.blocks() {
            let mut rotated = d.apply_block(l, self.block(l, p).expect("stored block"), f);
            if p == Parity::Odd && g.is_rotoreflection() {
                for v in &mut rotated {
                    *v = -*v;
                }
            }
            out.block_mut(l, p)
                .expect("stored block")
                .copy_from_slice(&rotated);
        }
        Ok(out)
    }

    /// Same layout and shape.
    pub fn same_shape(&self, other: &IrrepFeatures) -> bool {
        self.layout == other.layout
            && self.max_degree == other.max_degree
            && self.num_features == other.num_features
    }

    /// `alpha * self + beta * other`.
    pub fn linear_combination(&self, alpha: f64, other: &IrrepFeatures, beta: f64) -> Result<Self> {
        if !self.same_shape(other) {
            return invalid("features differ in layout or shape");
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Ok(Self {
            data,
            ..self.clone()
        })
    }

    /// Largest absolute difference after embedding both into the general layout.
    pub fn max_abs_diff(&self, other: &IrrepFeatures) -> Result<f64> {
        if self.max_degree != other.max_degree || self.num_features != other.num_features {
            return invalid("features differ in maximum degree or feature count");
        }
        let (a, b) = (self.to_general(), other.to_general());
        Ok(a.data
            .iter()
            .zip(&b.data)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs())))
    }

    /// `"IRRF"`, version, `P`, `L`, `F` as `u32`, then the data as `f64`, all little-endian.
    pub fn to_blob(&self) -> Vec<u8> {
        let mut w = BlobWriter::new(IRRF_MAGIC, IRRF_VERSION);
        w.u32(self.layout.parity_rows() as u32);
        w.u32(self.max_degree as u32);
        w.u32(self.num_features as u32);
        w.f64s(&self.data);
        w.finish()
    }

    pub fn from_blob(bytes: &[u8]) -> Result<Self> {
        let mut r = BlobReader::new(bytes, IRRF_MAGIC, IRRF_VERSION)?;
        let layout = match r.u32()? {
            1 => Layout::Compact,
            2 => Layout::General,
            p => {
                return Err(Error::Format(format!(
                    "parity axis must be 1 or 2, got {p}"
                )))
            }
        };
        let l = r.u32()? as usize;
        let f = r.u32()? as usize;
        if l > crate::HARD_MAX_DEGREE {
            return Err(Error::Format(format!(
                "degree {l} exceeds the hard ceiling"
            )));
        }
        let n = layout
            .parity_rows()
            .checked_mul(num_components(l))
            .and_then(|n| n.checked_mul(f))
            .ok_or_else(|| Error::Format("shape overflows".into()))?;
        let data = r.f64s(n)?;
        r.finish()?;
        Self::from_data(layout, l, f, data)
    }
}
