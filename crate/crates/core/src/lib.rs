//! Tensor algebra for E(3)-equivariant features.
//!
//! The crate is organized bottom-up:
//!
//! - [`sh`]: real spherical harmonics `Y_l^m` in the `m = l, -l, l-1, -(l-1), ..., 0`
//!   ordering, so the degree-1 block is proportional to `(x, y, z)`.
//! - [`cgc`]: real-basis Clebsch-Gordan coefficients and single-irrep coupling.
//! - [`rotations`]: O(3) group elements, Haar sampling and Wigner-D matrices.
//! - [`irreps`]: the `(P, (L+1)^2, F)` feature container.
//! - [`layers`]: gated activations, dense, tensor and tensor-dense layers.
//! - [`basis`]: radial bases and featurization of displacement vectors.
//! - [`equivariance`] and [`suites`]: the equivariance harness and named check suites.
//!
//! All arithmetic is `f64`.

pub mod basis;
pub mod cgc;
pub mod equivariance;
pub mod error;
pub mod io;
pub mod irreps;
pub mod layers;
pub mod quadrature;
pub mod rotations;
pub mod sh;
pub mod suites;

pub use basis::{featurize, radial_basis, RadialBasisSpec, RadialKind};
pub use cgc::{build_cgc_table, cgc, couple, CgcTable, Irrep};
pub use equivariance::{check_equivariance, EquivarianceCheck, EquivarianceReport};
pub use error::{Error, Result};
pub use irreps::{IrrepFeatures, Layout, Parity};
pub use layers::{
    activation, dense_apply, dense_init, tensor_apply, tensor_dense_apply, ActivationKind,
    DenseParams, FeatureShape, TensorParams, TensorPath,
};
pub use rotations::{random_rotation, wigner_d, GroupElement, WignerDSet};
pub use sh::{eval_sh, eval_sh_single, eval_solid_sh, PiPolynomial, ShVector};

/// Default maximum degree supported by tables built without explicit configuration.
pub const DEFAULT_MAX_DEGREE: usize = 8;

/// Hard ceiling on the maximum degree; exact factorials up to `2 * 15` fit in `u128`.
pub const HARD_MAX_DEGREE: usize = 15;

/// Environment variable overriding [`DEFAULT_MAX_DEGREE`].
pub const MAX_DEGREE_ENV: &str = "IRREPCORE_MAX_L";

/// Upper bound on the degrees a process is willing to build tables for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity(usize);

impl Capacity {
    pub fn new(max_degree: usize) -> Result<Self> {
        if max_degree > HARD_MAX_DEGREE {
            return Err(Error::Capacity {
                requested: max_degree,
                capacity: HARD_MAX_DEGREE,
            });
        }
        Ok(Self(max_degree))
    }

    /// Reads [`MAX_DEGREE_ENV`], falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_DEGREE_ENV) {
            Ok(s) => {
                let l = s.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidArgument(format!("{MAX_DEGREE_ENV}={s:?} is not an integer"))
                })?;
                Self::new(l)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn max_degree(self) -> usize {
        self.0
    }

    pub fn check(self, requested: usize) -> Result<()> {
        if requested > self.0 {
            Err(Error::Capacity {
                requested,
                capacity: self.0,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Capacity {
    fn default() -> Self {
        Self(DEFAULT_MAX_DEGREE)
    }
}
