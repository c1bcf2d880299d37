use std::collections::HashMap;
use std::fmt;

use crate::cgc::CgcTable;
use crate::error::{invalid, Error, Result};
use crate::io::{BlobReader, BlobWriter};
use crate::irreps::{IrrepFeatures, Layout, Parity};

use super::dense::{dense_apply, DenseParams};
use super::{layout_from_rows, KIND_TENSOR, PARAMS_MAGIC, PARAMS_VERSION};

/// One coupling path `(a_alpha) x (b_beta) -> (c_gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TensorPath {
    pub a: usize,
    pub alpha: Parity,
    pub b: usize,
    pub beta: Parity,
    pub c: usize,
    pub gamma: Parity,
}

impl TensorPath {
    /// Whether the output block has the parity a compact layout can hold.
    pub fn is_proper(&self) -> bool {
        self.gamma == Parity::of_degree(self.c)
    }
}

impl fmt::Display for TensorPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{} x {}{} -> {}{}",
            self.a,
            self.alpha.symbol(),
            self.b,
            self.beta.symbol(),
            self.c,
            self.gamma.symbol()
        )
    }
}

/// Shape of one side of a tensor product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureShape {
    pub layout: Layout,
    pub max_degree: usize,
}

impl FeatureShape {
    pub fn new(layout: Layout, max_degree: usize) -> Self {
        Self { layout, max_degree }
    }

    pub fn of(x: &IrrepFeatures) -> Self {
        Self::new(x.layout(), x.max_degree())
    }
}

/// All paths allowed by the selection rule `|a-b| <= c <= a+b`, `c <= L_z`, and `gamma = alpha beta`.
pub fn valid_paths(x: FeatureShape, y: FeatureShape, out_degree: usize) -> Vec<TensorPath> {
    let mut paths = Vec::new();
    for (a, alpha) in x.layout.blocks(x.max_degree) {
        for (b, beta) in y.layout.blocks(y.max_degree) {
            for c in a.abs_diff(b)..=(a + b).min(out_degree) {
                paths.push(TensorPath {
                    a,
                    alpha,
                    b,
                    beta,
                    c,
                    gamma: alpha.product(beta),
                });
            }
        }
    }
    paths
}

/// Per-path, per-channel weights of a tensor layer.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorParams {
    x: FeatureShape,
    y: FeatureShape,
    out_degree: usize,
    num_features: usize,
    paths: Vec<TensorPath>,
    weights: Vec<Vec<f64>>,
}

impl TensorParams {
    pub fn new(
        x: FeatureShape,
        y: FeatureShape,
        out_degree: usize,
        num_features: usize,
        paths: Vec<TensorPath>,
        weights: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if out_degree > x.max_degree + y.max_degree {
            return invalid(format!(
                "output degree {out_degree} exceeds {} + {}",
                x.max_degree, y.max_degree
            ));
        }
        if paths.len() != weights.len() {
            return invalid(format!(
                "{} paths but {} weight vectors",
                paths.len(),
                weights.len()
            ));
        }
        let allowed = valid_paths(x, y, out_degree);
        for (i, p) in paths.iter().enumerate() {
            if !allowed.contains(p) {
                return invalid(format!("path {p} violates the coupling rules"));
            }
            if paths[..i].contains(p) {
                return invalid(format!("path {p} listed twice"));
            }
        }
        if let Some(w) = weights.iter().find(|w| w.len() != num_features) {
            return invalid(format!(
                "path weight has length {}, expected {num_features}",
                w.len()
            ));
        }
        Ok(Self {
            x,
            y,
            out_degree,
            num_features,
            paths,
            weights,
        })
    }

    /// Every valid path, weighted `1/sqrt(n)` where `n` counts paths into the same `(c, gamma)`.
    pub fn init(
        x: FeatureShape,
        y: FeatureShape,
        out_degree: usize,
        num_features: usize,
    ) -> Result<Self> {
        let paths = valid_paths(x, y, out_degree);
        let mut counts: HashMap<(usize, Parity), usize> = HashMap::new();
        for p in &paths {
            *counts.entry((p.c, p.gamma)).or_default() += 1;
        }
        let weights = paths
            .iter()
            .map(|p| vec![1.0 / (counts[&(p.c, p.gamma)] as f64).sqrt(); num_features])
            .collect();
        Self::new(x, y, out_degree, num_features, paths, weights)
    }

    /// Every valid path with all weights equal to `w`.
    pub fn constant(
        x: FeatureShape,
        y: FeatureShape,
        out_degree: usize,
        num_features: usize,
        w: f64,
    ) -> Result<Self> {
        let paths = valid_paths(x, y, out_degree);
        let weights = vec![vec![w; num_features]; paths.len()];
        Self::new(x, y, out_degree, num_features, paths, weights)
    }

    /// Drops paths for which `keep` is false.
    pub fn retain<F: FnMut(&TensorPath) -> bool>(&mut self, mut keep: F) {
        let mut i = 0;
        while i < self.paths.len() {
            if keep(&self.paths[i]) {
                i += 1;
            } else {
                self.paths.remove(i);
                self.weights.remove(i);
            }
        }
    }

    pub fn x_shape(&self) -> FeatureShape {
        self.x
    }

    pub fn y_shape(&self) -> FeatureShape {
        self.y
    }

    pub fn out_degree(&self) -> usize {
        self.out_degree
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn paths(&self) -> &[TensorPath] {
        &self.paths
    }

    pub fn weights(&self, path: usize) -> &[f64] {
        &self.weights[path]
    }

    pub fn weights_mut(&mut self, path: usize) -> &mut [f64] {
        &mut self.weights[path]
    }

    pub fn num_parameters(&self) -> usize {
        self.paths.len() * self.num_features
    }

    /// Compact only when both inputs are compact and every path lands on parity `(-1)^c`.
    pub fn output_layout(&self) -> Layout {
        if self.x.layout == Layout::Compact
            && self.y.layout == Layout::Compact
            && self.paths.iter().all(TensorPath::is_proper)
        {
            Layout::Compact
        } else {
            Layout::General
        }
    }

    /// `"E3PR"`, version, kind `1`, `P_x`, `L_x`, `P_y`, `L_y`, `L_z`, `F`, path count,
    /// then per path `a, alpha, b, beta, c, gamma` (parities as `+-1`) and `F` weights.
    pub fn to_blob(&self) -> Vec<u8> {
        let mut w = BlobWriter::new(PARAMS_MAGIC, PARAMS_VERSION);
        w.u32(KIND_TENSOR);
        for s in [self.x, self.y] {
            w.u32(s.layout.parity_rows() as u32);
            w.u32(s.max_degree as u32);
        }
        w.u32(self.out_degree as u32);
        w.u32(self.num_features as u32);
        w.u32(self.paths.len() as u32);
        for (p, ws) in self.paths.iter().zip(&self.weights) {
            w.u32(p.a as u32);
            w.i32(p.alpha.sign());
            w.u32(p.b as u32);
            w.i32(p.beta.sign());
            w.u32(p.c as u32);
            w.i32(p.gamma.sign());
            w.f64s(ws);
        }
        w.finish()
    }

    pub fn from_blob(bytes: &[u8]) -> Result<Self> {
        let mut r = BlobReader::new(bytes, PARAMS_MAGIC, PARAMS_VERSION)?;
        let kind = r.u32()?;
        if kind != KIND_TENSOR {
            return Err(Error::Format(format!(
                "expected tensor parameters, found kind {kind}"
            )));
        }
        let mut shape = || -> Result<FeatureShape> {
            let layout = layout_from_rows(r.u32()?)?;
            Ok(FeatureShape::new(layout, r.u32()? as usize))
        };
        let x = shape()?;
        let y = shape()?;
        let out_degree = r.u32()? as usize;
        let f = r.u32()? as usize;
        let n = r.u32()? as usize;
        if [x.max_degree, y.max_degree, out_degree]
            .iter()
            .any(|&l| l > 2 * crate::HARD_MAX_DEGREE)
        {
            return Err(Error::Format("degree exceeds the hard ceiling".into()));
        }
        let parity = |s: i32| Parity::from_sign(s).map_err(|e| Error::Format(e.to_string()));
        let mut paths = Vec::new();
        let mut weights = Vec::new();
        for _ in 0..n {
            let a = r.u32()? as usize;
            let alpha = parity(r.i32()?)?;
            let b = r.u32()? as usize;
            let beta = parity(r.i32()?)?;
            let c = r.u32()? as usize;
            let gamma = parity(r.i32()?)?;
            paths.push(TensorPath {
                a,
                alpha,
                b,
                beta,
                c,
                gamma,
            });
            weights.push(r.f64s(f)?);
        }
        r.finish()?;
        Self::new(x, y, out_degree, f, paths, weights).map_err(|e| Error::Format(e.to_string()))
    }
}

/// `z^(c_gamma) = sum over paths of w * (x^(a_alpha) (x)^(c) y^(b_beta))`, channel by channel.
pub fn tensor_apply(
    p: &TensorParams,
    table: &CgcTable,
    x: &IrrepFeatures,
    y: &IrrepFeatures,
    out_degree: usize,
) -> Result<IrrepFeatures> {
    let f = p.num_features;
    if x.num_features() != f || y.num_features() != f {
        return invalid(format!(
            "feature counts {} and {} do not match the layer's {f}",
            x.num_features(),
            y.num_features()
        ));
    }
    if FeatureShape::of(x) != p.x || FeatureShape::of(y) != p.y {
        return invalid(format!(
            "input shapes ({:?}, L={}), ({:?}, L={}) do not match the layer",
            x.layout(),
            x.max_degree(),
            y.layout(),
            y.max_degree()
        ));
    }
    if out_degree != p.out_degree {
        return invalid(format!(
            "layer was built for output degree {}, not {out_degree}",
            p.out_degree
        ));
    }
    let needed = p.x.max_degree.max(p.y.max_degree).max(out_degree);
    if table.max_degree() < needed {
        return Err(Error::Capacity {
            requested: needed,
            capacity: table.max_degree(),
        });
    }
    let mut z = IrrepFeatures::zeros(p.output_layout(), out_degree, f);
    for (path, w) in p.paths.iter().zip(&p.weights) {
        let xa = x.block(path.a, path.alpha).expect("validated path");
        let yb = y.block(path.b, path.beta).expect("validated path");
        let dst = z
            .block_mut(path.c, path.gamma)
            .expect("output layout holds path");
        for &(o1, o2, o3, c) in &table.block(path.a, path.b, path.c).entries {
            let u = &xa[o1 as usize * f..(o1 as usize + 1) * f];
            let v = &yb[o2 as usize * f..(o2 as usize + 1) * f];
            let out = &mut dst[o3 as usize * f..(o3 as usize + 1) * f];
            for k in 0..f {
                out[k] += c * w[k] * u[k] * v[k];
            }
        }
    }
    Ok(z)
}

/// `tensor(dense_1(x), dense_2(x))`.
pub fn tensor_dense_apply(
    p1: &DenseParams,
    p2: &DenseParams,
    pt: &TensorParams,
    table: &CgcTable,
    x: &IrrepFeatures,
    out_degree: usize,
) -> Result<IrrepFeatures> {
    let a = dense_apply(p1, x)?;
    let b = dense_apply(p2, x)?;
    tensor_apply(pt, table, &a, &b, out_degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgc::build_cgc_table;
    use crate::rotations::rng_from_seed;

    fn compact(l: usize) -> FeatureShape {
        FeatureShape::new(Layout::Compact, l)
    }

    fn general(l: usize) -> FeatureShape {
        FeatureShape::new(Layout::General, l)
    }

    #[test]
    fn coupling_two_vectors() {
        let t = build_cgc_table(2).unwrap();
        let p = TensorParams::constant(compact(1), compact(1), 2, 1, 1.0).unwrap();
        let v = [0.3, -1.2, 0.7];
        let mut x = IrrepFeatures::zeros(Layout::Compact, 1, 1);
        x.block_mut(1, Parity::Odd).unwrap().copy_from_slice(&v);
        let z = tensor_apply(&p, &t, &x, &x, 2).unwrap();
        assert_eq!(z.layout(), Layout::General);
        let n2: f64 = v.iter().map(|a| a * a).sum();
        assert!((z.block(0, Parity::Even).unwrap()[0] - n2 / 3f64.sqrt()).abs() < 1e-14);
        assert!(z
            .block(1, Parity::Even)
            .unwrap()
            .iter()
            .all(|c| c.abs() < 1e-15));
        let [a, b, c] = v;
        let s = 1.0 / 2f64.sqrt();
        let s6 = 1.0 / 6f64.sqrt();
        // (u (x)^(2) v) for u = v, in m = 2, -2, 1, -1, 0 order
        let expect = [
            s * (a * a - b * b),
            s * 2.0 * a * b,
            s * 2.0 * a * c,
            s * 2.0 * b * c,
            s6 * (2.0 * c * c - a * a - b * b),
        ];
        let got = z.block(2, Parity::Even).unwrap();
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < 1e-14, "{got:?} vs {expect:?}");
        }
    }

    #[test]
    fn scalar_coupling_is_weighted_product() {
        let t = build_cgc_table(1).unwrap();
        let mut p = TensorParams::constant(compact(0), compact(0), 0, 3, 1.0).unwrap();
        p.weights_mut(0).copy_from_slice(&[1.0, 2.0, -0.5]);
        let x = IrrepFeatures::from_data(Layout::Compact, 0, 3, vec![1.0, 2.0, 3.0]).unwrap();
        let y = IrrepFeatures::from_data(Layout::Compact, 0, 3, vec![4.0, -1.0, 2.0]).unwrap();
        let z = tensor_apply(&p, &t, &x, &y, 0).unwrap();
        assert_eq!(z.layout(), Layout::Compact);
        assert_eq!(z.data(), &[4.0, -4.0, -3.0]);
    }

    #[test]
    fn zero_input_gives_zero() {
        let t = build_cgc_table(2).unwrap();
        let p = TensorParams::init(general(2), general(2), 2, 4).unwrap();
        let x = IrrepFeatures::random(Layout::General, 2, 4, &mut rng_from_seed(1));
        let y = IrrepFeatures::zeros(Layout::General, 2, 4);
        assert!(tensor_apply(&p, &t, &x, &y, 2)
            .unwrap()
            .data()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn odd_vectors_couple_into_pseudovector() {
        let t = build_cgc_table(1).unwrap();
        let mut p = TensorParams::constant(compact(1), compact(1), 1, 1, 1.0).unwrap();
        p.retain(|q| q.a == 1 && q.b == 1 && q.c == 1);
        assert_eq!(p.paths().len(), 1);
        assert_eq!(p.paths()[0].gamma, Parity::Even);
        let mut x = IrrepFeatures::zeros(Layout::Compact, 1, 1);
        let mut y = IrrepFeatures::zeros(Layout::Compact, 1, 1);
        x.block_mut(1, Parity::Odd)
            .unwrap()
            .copy_from_slice(&[1.0, 0.0, 0.0]);
        y.block_mut(1, Parity::Odd)
            .unwrap()
            .copy_from_slice(&[0.0, 1.0, 0.0]);
        let z = tensor_apply(&p, &t, &x, &y, 1).unwrap();
        assert_eq!(z.layout(), Layout::General);
        let s = 1.0 / 2f64.sqrt();
        let pv = z.block(1, Parity::Even).unwrap();
        assert!((pv[2] - s).abs() < 1e-15 && pv[0].abs() < 1e-15 && pv[1].abs() < 1e-15);
        assert!(z.block(1, Parity::Odd).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn parity_rule_on_every_path() {
        for p in valid_paths(general(2), compact(2), 3) {
            assert_eq!(p.gamma.sign(), p.alpha.sign() * p.beta.sign());
            assert!(p.a.abs_diff(p.b) <= p.c && p.c <= p.a + p.b && p.c <= 3);
        }
        // compact inputs: the output parity is always (-1)^(a+b)
        for p in valid_paths(compact(3), compact(3), 3) {
            assert_eq!(p.gamma, Parity::of_degree(p.a + p.b));
        }
    }

    #[test]
    fn init_weights() {
        let p = TensorParams::init(compact(1), compact(1), 1, 2).unwrap();
        // (0,0,0+) and (1,1,0+) both feed 0+
        let i = p.paths().iter().position(|q| q.a == 0 && q.b == 0).unwrap();
        assert_eq!(p.weights(i), &[1.0 / 2f64.sqrt(); 2]);
        let j = p
            .paths()
            .iter()
            .position(|q| q.c == 1 && q.gamma == Parity::Even)
            .unwrap();
        assert_eq!(p.weights(j), &[1.0, 1.0]);
    }

    #[test]
    fn errors() {
        let t = build_cgc_table(2).unwrap();
        let p = TensorParams::init(compact(1), compact(1), 2, 2).unwrap();
        let x = IrrepFeatures::zeros(Layout::Compact, 1, 2);
        let y3 = IrrepFeatures::zeros(Layout::Compact, 1, 3);
        assert!(matches!(
            tensor_apply(&p, &t, &x, &y3, 2),
            Err(Error::InvalidArgument(_))
        ));
        assert!(tensor_apply(&p, &t, &x, &x, 1).is_err());
        let small = build_cgc_table(1).unwrap();
        assert!(matches!(
            tensor_apply(&p, &small, &x, &x, 2),
            Err(Error::Capacity { .. })
        ));
        assert!(TensorParams::init(compact(1), compact(1), 3, 2).is_err());
        let bad = TensorPath {
            a: 1,
            alpha: Parity::Odd,
            b: 1,
            beta: Parity::Odd,
            c: 1,
            gamma: Parity::Odd,
        };
        assert!(
            TensorParams::new(compact(1), compact(1), 1, 1, vec![bad], vec![vec![1.0]]).is_err()
        );
    }

    #[test]
    fn tensor_dense_with_identity_params() {
        let t = build_cgc_table(2).unwrap();
        let d = DenseParams::constant(Layout::General, 2, 1, 1, 1.0, 0.0);
        let pt = TensorParams::constant(general(2), general(2), 2, 1, 1.0).unwrap();
        let x = IrrepFeatures::random(Layout::General, 2, 1, &mut rng_from_seed(4));
        let a = tensor_dense_apply(&d, &d, &pt, &t, &x, 2).unwrap();
        let b = tensor_apply(&pt, &t, &x, &x, 2).unwrap();
        assert_eq!(a, b);
        let zero = IrrepFeatures::zeros(Layout::General, 2, 1);
        let z = tensor_dense_apply(&d, &d, &pt, &t, &zero, 2).unwrap();
        assert!(z.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn blob_roundtrip() {
        let mut p = TensorParams::init(general(1), compact(2), 2, 3).unwrap();
        p.retain(|q| q.c != 1);
        let b = p.to_blob();
        assert_eq!(TensorParams::from_blob(&b).unwrap(), p);
        assert!(DenseParams::from_blob(&b).is_err());
        let mut corrupt = b.clone();
        corrupt.push(0);
        assert!(TensorParams::from_blob(&corrupt).is_err());
    }
}
