//! Generic equivariance harness.
//!
//! For random inputs `x` and Haar-random `g` the harness measures
//! `max |op(g x) - g op(x)|` component-wise. Trials alternate between proper rotations
//! and rotoreflections, starting with a proper rotation.

use rand_chacha::ChaCha8Rng;

use crate::cgc::CgcTable;
use crate::error::{invalid, Result};
use crate::irreps::{IrrepFeatures, Layout, Parity};
use crate::rotations::{random_rotation, rng_from_seed, wigner_d, GroupElement};

/// Shape of the random inputs and the trial schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivarianceCheck {
    pub layout: Layout,
    pub max_degree: usize,
    pub num_features: usize,
    pub trials: usize,
    pub seed: u64,
}

impl EquivarianceCheck {
    pub fn new(
        layout: Layout,
        max_degree: usize,
        num_features: usize,
        trials: usize,
        seed: u64,
    ) -> Self {
        Self {
            layout,
            max_degree,
            num_features,
            trials,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDeviation {
    pub degree: usize,
    pub parity: Parity,
    pub max_dev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivarianceReport {
    pub trials: usize,
    pub seed: u64,
    pub max_dev: f64,
    /// Output blocks in general-layout order.
    pub per_block: Vec<BlockDeviation>,
}

impl EquivarianceReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_dev < tol
    }

    /// Label `"<l><+|->"` for a block, e.g. `"1-"`.
    pub fn block_label(b: &BlockDeviation) -> String {
        format!("{}{}", b.degree, b.parity.symbol())
    }
}

fn group_element(rng: &mut ChaCha8Rng, trial: usize) -> GroupElement {
    let g = random_rotation(rng);
    if trial % 2 == 1 {
        g.with_sign(-1)
    } else {
        g
    }
}

/// Runs `op` on single random inputs.
pub fn check_equivariance<F>(
    mut op: F,
    cfg: &EquivarianceCheck,
    table: &CgcTable,
) -> Result<EquivarianceReport>
where
    F: FnMut(&IrrepFeatures) -> Result<IrrepFeatures>,
{
    check_equivariance_n(|xs| op(&xs[0]), 1, cfg, table)
}

/// Runs a two-argument `op`; both inputs are transformed by the same `g`.
pub fn check_equivariance_pair<F>(
    mut op: F,
    cfg: &EquivarianceCheck,
    table: &CgcTable,
) -> Result<EquivarianceReport>
where
    F: FnMut(&IrrepFeatures, &IrrepFeatures) -> Result<IrrepFeatures>,
{
    check_equivariance_n(|xs| op(&xs[0], &xs[1]), 2, cfg, table)
}

fn check_equivariance_n<F>(
    mut op: F,
    inputs: usize,
    cfg: &EquivarianceCheck,
    table: &CgcTable,
) -> Result<EquivarianceReport>
where
    F: FnMut(&[IrrepFeatures]) -> Result<IrrepFeatures>,
{
    if cfg.trials == 0 {
        return invalid("at least one trial is required");
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut per_block: Vec<BlockDeviation> = Vec::new();
    let mut max_dev: f64 = 0.0;
    for trial in 0..cfg.trials {
        let ctx = |e: crate::Error| e.context(format!("trial {trial}"));
        let xs: Vec<IrrepFeatures> = (0..inputs)
            .map(|_| IrrepFeatures::random(cfg.layout, cfg.max_degree, cfg.num_features, &mut rng))
            .collect();
        let g = group_element(&mut rng, trial);
        let y = op(&xs).map_err(ctx)?;
        let d = wigner_d(&g, cfg.max_degree.max(y.max_degree()), table).map_err(ctx)?;
        let gxs = xs
            .iter()
            .map(|x| x.transform(&g, &d))
            .collect::<Result<Vec<_>>>()
            .map_err(ctx)?;
        let lhs = op(&gxs).map_err(ctx)?.to_general();
        let rhs = y.transform(&g, &d).map_err(ctx)?.to_general();
        if !lhs.same_shape(&rhs) {
            return Err(ctx(crate::Error::InvalidArgument(
                "operation output shape depends on its input".into(),
            )));
        }
        if per_block.is_empty() {
            per_block = Layout::General
                .blocks(rhs.max_degree())
                .into_iter()
                .map(|(degree, parity)| BlockDeviation {
                    degree,
                    parity,
                    max_dev: 0.0,
                })
                .collect();
        }
        for b in per_block.iter_mut() {
            let u = lhs.block(b.degree, b.parity).expect("general layout");
            let v = rhs.block(b.degree, b.parity).expect("general layout");
            let dev = u
                .iter()
                .zip(v)
                .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            // NaN must not hide behind max
            let dev = if u.iter().chain(v).any(|t| t.is_nan()) {
                f64::INFINITY
            } else {
                dev
            };
            b.max_dev = b.max_dev.max(dev);
            max_dev = max_dev.max(dev);
        }
    }
    Ok(EquivarianceReport {
        trials: cfg.trials,
        seed: cfg.seed,
        max_dev,
        per_block,
    })
}
