//! Named equivariance suites run by the command-line `check` command.

use crate::basis::{featurize, RadialBasisSpec, RadialKind};
use crate::cgc::{couple, CgcTable, Irrep};
use crate::equivariance::{
    check_equivariance, check_equivariance_pair, EquivarianceCheck, EquivarianceReport,
};
use crate::error::{invalid, Result};
use crate::irreps::{IrrepFeatures, Layout, Parity};
use crate::layers::{
    activation, dense_apply, dense_init, tensor_apply, tensor_dense_apply, ActivationKind,
    FeatureShape, TensorParams,
};
use crate::rotations::{random_rotation, rng_from_seed, wigner_d};
use crate::sh::eval_sh;

/// Suites run by `"all"`, in order.
pub const SUITES: [&str; 9] = [
    "sh",
    "couple",
    "activation",
    "dense",
    "tensor",
    "tensor_dense",
    "featurize",
    "wigner",
    "layout",
];

/// A deliberately non-equivariant operation; expected to fail.
pub const BROKEN_SUITE: &str = "broken-demo";

pub fn is_known_suite(name: &str) -> bool {
    name == "all" || name == BROKEN_SUITE || SUITES.contains(&name)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub max_degree: usize,
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
    pub num_features: usize,
}

impl RunConfig {
    pub fn new(
        max_degree: usize,
        trials: usize,
        tol: f64,
        seed: u64,
        num_features: usize,
    ) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return invalid(format!("tolerance must be positive, got {tol}"));
        }
        if trials == 0 {
            return invalid("trials must be at least 1");
        }
        if num_features == 0 {
            return invalid("feature count must be at least 1");
        }
        Ok(Self {
            max_degree,
            trials,
            tol,
            seed,
            num_features,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub op: String,
    pub trials: usize,
    pub seed: u64,
    pub max_dev: f64,
    pub per_block: Vec<(String, f64)>,
}

impl SuiteResult {
    fn from_report(op: &str, r: EquivarianceReport) -> Self {
        Self {
            op: op.to_string(),
            trials: r.trials,
            seed: r.seed,
            max_dev: r.max_dev,
            per_block: r
                .per_block
                .iter()
                .map(|b| (EquivarianceReport::block_label(b), b.max_dev))
                .collect(),
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_dev < tol
    }
}

/// Runs one suite, or every suite in [`SUITES`] for `"all"`.
pub fn run_suite(name: &str, cfg: &RunConfig, table: &CgcTable) -> Result<Vec<SuiteResult>> {
    if name == "all" {
        return SUITES.iter().map(|s| run_one(s, cfg, table)).collect();
    }
    if !is_known_suite(name) {
        return invalid(format!("unknown suite {name:?}"));
    }
    Ok(vec![run_one(name, cfg, table)?])
}

/// The first channel of the degree-1 block, read as a vector.
fn vector_of(x: &IrrepFeatures) -> [f64; 3] {
    let f = x.num_features();
    let v = x.block(1, Parity::Odd).expect("compact degree-1 block");
    [v[0], v[f], v[2 * f]]
}

fn run_one(name: &str, cfg: &RunConfig, table: &CgcTable) -> Result<SuiteResult> {
    let l = cfg.max_degree;
    let f = cfg.num_features;
    if table.max_degree() < l.max(1) {
        return Err(crate::Error::Capacity {
            requested: l.max(1),
            capacity: table.max_degree(),
        });
    }
    let check = |layout, degree, features| {
        EquivarianceCheck::new(layout, degree, features, cfg.trials, cfg.seed)
    };
    let report = match name {
        "sh" => check_equivariance(
            |x| {
                let y = eval_sh(vector_of(x), l)?;
                IrrepFeatures::from_data(Layout::Compact, l, 1, y.into_values())
            },
            &check(Layout::Compact, 1, 1),
            table,
        )?,
        "couple" => check_equivariance_pair(
            |x, y| {
                let mut z = IrrepFeatures::zeros(Layout::General, l, 1);
                for l1 in 0..=l {
                    let u = Irrep::new(l1, x.block(l1, Parity::of_degree(l1)).unwrap().to_vec())?;
                    for l2 in 0..=l {
                        let v =
                            Irrep::new(l2, y.block(l2, Parity::of_degree(l2)).unwrap().to_vec())?;
                        for l3 in l1.abs_diff(l2)..=(l1 + l2).min(l) {
                            let w = couple(table, &u, &v, l3)?;
                            let dst = z.block_mut(l3, Parity::of_degree(l1 + l2)).unwrap();
                            for (d, c) in dst.iter_mut().zip(w.components()) {
                                *d += c;
                            }
                        }
                    }
                }
                Ok(z)
            },
            &check(Layout::Compact, l, 1),
            table,
        )?,
        "activation" => {
            let p = dense_init(cfg.seed, l, f, f, Layout::General)?;
            check_equivariance(
                |x| Ok(activation(&dense_apply(&p, x)?, ActivationKind::Swish)),
                &check(Layout::General, l, f),
                table,
            )?
        }
        "dense" => {
            let p = dense_init(cfg.seed, l, f, f, Layout::General)?;
            check_equivariance(|x| dense_apply(&p, x), &check(Layout::General, l, f), table)?
        }
        "tensor" => {
            let s = FeatureShape::new(Layout::General, l);
            let p = TensorParams::init(s, s, l, f)?;
            check_equivariance_pair(
                |x, y| tensor_apply(&p, table, x, y, l),
                &check(Layout::General, l, f),
                table,
            )?
        }
        "tensor_dense" => {
            let p1 = dense_init(cfg.seed, l, f, f, Layout::General)?;
            let p2 = dense_init(cfg.seed.wrapping_add(1), l, f, f, Layout::General)?;
            let s = FeatureShape::new(Layout::General, l);
            let pt = TensorParams::init(s, s, l, f)?;
            check_equivariance(
                |x| tensor_dense_apply(&p1, &p2, &pt, table, x, l),
                &check(Layout::General, l, f),
                table,
            )?
        }
        "featurize" => {
            let spec = RadialBasisSpec::new(f, RadialKind::Gaussian, 5.0)?;
            check_equivariance(
                |x| featurize(vector_of(x), &spec, l),
                &check(Layout::Compact, 1, 1),
                table,
            )?
        }
        "layout" => check_equivariance(
            |x| x.to_compact()?.to_general().to_compact(),
            &check(Layout::Compact, l, f),
            table,
        )?,
        "wigner" => return wigner_suite(cfg, table),
        BROKEN_SUITE => check_equivariance(
            |x| {
                let mut y = x.clone();
                let ff = y.num_features();
                if let Some(b) = y.block_mut(1, Parity::Odd) {
                    for v in &mut b[..ff] {
                        *v = -*v;
                    }
                }
                Ok(y)
            },
            &check(Layout::Compact, l.max(1), f),
            table,
        )?,
        other => return invalid(format!("unknown suite {other:?}")),
    };
    Ok(SuiteResult::from_report(name, report))
}

/// Homomorphism `D(ab) = D(a) D(b)` and orthogonality `D D^T = I`, per degree.
fn wigner_suite(cfg: &RunConfig, table: &CgcTable) -> Result<SuiteResult> {
    let l = cfg.max_degree;
    let mut rng = rng_from_seed(cfg.seed);
    let mut per = vec![0.0f64; l + 1];
    for _ in 0..cfg.trials {
        let a = random_rotation(&mut rng);
        let b = random_rotation(&mut rng);
        let da = wigner_d(&a, l, table)?;
        let db = wigner_d(&b, l, table)?;
        let dab = wigner_d(&a.compose(&b), l, table)?;
        for k in 0..=l {
            let hom = (dab.matrix(k) - da.matrix(k) * db.matrix(k)).amax();
            let n = 2 * k + 1;
            let orth = (da.matrix(k) * da.matrix(k).transpose()
                - nalgebra::DMatrix::identity(n, n))
            .amax();
            per[k] = per[k].max(hom).max(orth);
        }
    }
    Ok(SuiteResult {
        op: "wigner".into(),
        trials: cfg.trials,
        seed: cfg.seed,
        max_dev: per.iter().fold(0.0, |m: f64, &v| m.max(v)),
        per_block: per
            .iter()
            .enumerate()
            .map(|(k, &v)| (format!("{k}{}", Parity::of_degree(k).symbol()), v))
            .collect(),
    })
}
