use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::io::{BlobReader, BlobWriter};
use crate::irreps::{IrrepFeatures, Layout, Parity};
use crate::rotations::rng_from_seed;

use super::{PARAMS_MAGIC, PARAMS_VERSION};

/// Weights of a dense layer: one `F_in x F_out` matrix per stored `(l, parity)` block,
/// plus a bias on the even scalar block.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseParams {
    layout: Layout,
    max_degree: usize,
    features_in: usize,
    features_out: usize,
    /// Row-major `F_in x F_out`, in `layout.blocks(max_degree)` order.
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

impl DenseParams {
    pub fn new(
        layout: Layout,
        max_degree: usize,
        features_in: usize,
        features_out: usize,
        weights: Vec<Vec<f64>>,
        bias: Vec<f64>,
    ) -> Result<Self> {
        let blocks = layout.blocks(max_degree).len();
        if weights.len() != blocks {
            return invalid(format!(
                "expected {blocks} weight matrices, got {}",
                weights.len()
            ));
        }
        if let Some(w) = weights
            .iter()
            .find(|w| w.len() != features_in * features_out)
        {
            return invalid(format!(
                "weight matrix has {} entries, expected {features_in} x {features_out}",
                w.len()
            ));
        }
        if bias.len() != features_out {
            return invalid(format!(
                "bias has length {}, expected {features_out}",
                bias.len()
            ));
        }
        Ok(Self {
            layout,
            max_degree,
            features_in,
            features_out,
            weights,
            bias,
        })
    }

    /// Every weight matrix set to `w * ones`, bias set to `b`.
    pub fn constant(
        layout: Layout,
        max_degree: usize,
        features_in: usize,
        features_out: usize,
        w: f64,
        b: f64,
    ) -> Self {
        let blocks = layout.blocks(max_degree).len();
        Self {
            layout,
            max_degree,
            features_in,
            features_out,
            weights: vec![vec![w; features_in * features_out]; blocks],
            bias: vec![b; features_out],
        }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn features_in(&self) -> usize {
        self.features_in
    }

    pub fn features_out(&self) -> usize {
        self.features_out
    }

    pub fn num_weight_matrices(&self) -> usize {
        self.weights.len()
    }

    /// `2(L+1) F_in F_out` in the general layout, `(L+1) F_in F_out` in the compact one.
    pub fn num_weight_parameters(&self) -> usize {
        self.weights.iter().map(Vec::len).sum()
    }

    fn block_index(&self, l: usize, parity: Parity) -> Option<usize> {
        if l > self.max_degree {
            return None;
        }
        match self.layout {
            Layout::General => Some(2 * l + parity.row()),
            Layout::Compact => (parity == Parity::of_degree(l)).then_some(l),
        }
    }

    pub fn weight(&self, l: usize, parity: Parity) -> Option<&[f64]> {
        self.block_index(l, parity).map(|i| &self.weights[i][..])
    }

    pub fn weight_mut(&mut self, l: usize, parity: Parity) -> Option<&mut [f64]> {
        self.block_index(l, parity)
            .map(|i| &mut self.weights[i][..])
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    /// `"E3PR"`, version, kind `0`, `P`, `L`, `F_in`, `F_out`, weights, bias.
    pub fn to_blob(&self) -> Vec<u8> {
        let mut w = BlobWriter::new(PARAMS_MAGIC, PARAMS_VERSION);
        w.u32(super::KIND_DENSE);
        w.u32(self.layout.parity_rows() as u32);
        w.u32(self.max_degree as u32);
        w.u32(self.features_in as u32);
        w.u32(self.features_out as u32);
        for m in &self.weights {
            w.f64s(m);
        }
        w.f64s(&self.bias);
        w.finish()
    }

    pub fn from_blob(bytes: &[u8]) -> Result<Self> {
        let mut r = BlobReader::new(bytes, PARAMS_MAGIC, PARAMS_VERSION)?;
        let kind = r.u32()?;
        if kind != super::KIND_DENSE {
            return Err(Error::Format(format!(
                "expected dense parameters, found kind {kind}"
            )));
        }
        let layout = super::layout_from_rows(r.u32()?)?;
        let l = r.u32()? as usize;
        let fi = r.u32()? as usize;
        let fo = r.u32()? as usize;
        if l > crate::HARD_MAX_DEGREE {
            return Err(Error::Format(format!(
                "degree {l} exceeds the hard ceiling"
            )));
        }
        let per = fi
            .checked_mul(fo)
            .ok_or_else(|| Error::Format("shape overflows".into()))?;
        let weights = (0..layout.blocks(l).len())
            .map(|_| r.f64s(per))
            .collect::<Result<Vec<_>>>()?;
        let bias = r.f64s(fo)?;
        r.finish()?;
        Self::new(layout, l, fi, fo, weights, bias)
    }
}

/// Uniform weights with variance `1 / F_in`, zero bias; deterministic in `seed`.
pub fn dense_init(
    seed: u64,
    max_degree: usize,
    features_in: usize,
    features_out: usize,
    layout: Layout,
) -> Result<DenseParams> {
    if features_in == 0 || features_out == 0 {
        return invalid("feature dimensions must be positive");
    }
    let mut rng = rng_from_seed(seed);
    let a = (3.0 / features_in as f64).sqrt();
    let weights = layout
        .blocks(max_degree)
        .iter()
        .map(|_| {
            (0..features_in * features_out)
                .map(|_| rng.random_range(-a..a))
                .collect()
        })
        .collect();
    DenseParams::new(
        layout,
        max_degree,
        features_in,
        features_out,
        weights,
        vec![0.0; features_out],
    )
}

/// `y^(l_p) = x^(l_p) W_(l_p)`, plus the bias on `y^(0+)`.
pub fn dense_apply(p: &DenseParams, x: &IrrepFeatures) -> Result<IrrepFeatures> {
    if x.layout() != p.layout || x.max_degree() != p.max_degree || x.num_features() != p.features_in
    {
        return invalid(format!(
            "features ({:?}, L={}, F={}) do not match dense layer ({:?}, L={}, F_in={})",
            x.layout(),
            x.max_degree(),
            x.num_features(),
            p.layout,
            p.max_degree,
            p.features_in
        ));
    }
    let (fi, fo) = (p.features_in, p.features_out);
    let mut y = IrrepFeatures::zeros(p.layout, p.max_degree, fo);
    for (k, (l, parity)) in p.layout.blocks(p.max_degree).into_iter().enumerate() {
        let w = &p.weights[k];
        let src = x.block(l, parity).expect("layout stores block");
        let dst = y.block_mut(l, parity).expect("layout stores block");
        for (row_in, row_out) in src.chunks_exact(fi).zip(dst.chunks_exact_mut(fo)) {
            for (i, &xi) in row_in.iter().enumerate() {
                if xi == 0.0 {
                    continue;
                }
                for (o, wij) in row_out.iter_mut().zip(&w[i * fo..(i + 1) * fo]) {
                    *o += xi * wij;
                }
            }
        }
    }
    for (o, b) in y.data_mut()[..fo].iter_mut().zip(&p.bias) {
        *o += b;
    }
    Ok(y)
}
