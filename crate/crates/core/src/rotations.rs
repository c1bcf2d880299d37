//! O(3) group elements, Haar-uniform rotations and Wigner-D matrices.
//!
//! `D^l(R)` is defined by `Y_l(R r) = D^l(R) Y_l(r)`, so `D^1(R) = R` in `(x, y, z)` order.
//! Higher degrees follow from the coupling recursion
//! `D^l = C (D^(l-1) (x) D^1) C^T` with the `(l-1, 1, l)` coefficient block `C`.

use nalgebra::{DMatrix, Matrix3, Quaternion, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cgc::CgcTable;
use crate::error::{invalid, Result};
use crate::sh::num_components;

/// Tolerance on `R^T R - I` and `det R - 1` for accepted rotations.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

/// Deterministic generator used throughout the crate for seeded randomness.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An element of O(3): a proper rotation, optionally composed with inversion `-e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    rotation: Matrix3<f64>,
    sign: f64,
}

impl GroupElement {
    pub fn new(rotation: Matrix3<f64>, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return invalid(format!("reflection sign must be +1 or -1, got {sign}"));
        }
        let dev = (rotation.transpose() * rotation - Matrix3::identity()).amax();
        if dev >= ORTHOGONALITY_TOL {
            return invalid(format!("matrix is not orthogonal (deviation {dev:.3e})"));
        }
        let det = rotation.determinant();
        if (det - 1.0).abs() >= ORTHOGONALITY_TOL {
            return invalid(format!("rotation must have determinant +1, got {det}"));
        }
        Ok(Self {
            rotation,
            sign: sign as f64,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            sign: 1.0,
        }
    }

    /// The point reflection `-e`.
    pub fn inversion() -> Self {
        Self {
            rotation: Matrix3::identity(),
            sign: -1.0,
        }
    }

    /// Rotation by `angle` about a (not necessarily normalized) axis.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let axis = Vector3::from(axis);
        if axis.norm() == 0.0 {
            return invalid("rotation axis must be nonzero");
        }
        let q = UnitQuaternion::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        Ok(Self {
            rotation: q.to_rotation_matrix().into_inner(),
            sign: 1.0,
        })
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn is_rotoreflection(&self) -> bool {
        self.sign < 0.0
    }

    pub fn with_sign(mut self, sign: i8) -> Self {
        self.sign = if sign < 0 { -1.0 } else { 1.0 };
        self
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            rotation: self.rotation * other.rotation,
            sign: self.sign * other.sign,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            rotation: self.rotation.transpose(),
            sign: self.sign,
        }
    }

    /// Action on a vector: `sign * R v`.
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let w = self.rotation * Vector3::from(v) * self.sign;
        [w.x, w.y, w.z]
    }
}

/// Haar-uniform rotation from a normalized quaternion of four standard normals.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> GroupElement {
    loop {
        let q: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n2: f64 = q.iter().map(|x| x * x).sum();
        if n2 < 1e-20 {
            continue;
        }
        let q = UnitQuaternion::from_quaternion(Quaternion::new(q[0], q[1], q[2], q[3]));
        return GroupElement {
            rotation: q.to_rotation_matrix().into_inner(),
            sign: 1.0,
        };
    }
}

/// Orthogonal matrices `D^0..=D^L` of one rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerDSet {
    matrices: Vec<DMatrix<f64>>,
}

impl WignerDSet {
    pub fn identity(max_degree: usize) -> Self {
        Self {
            matrices: (0..=max_degree)
                .map(|l| DMatrix::identity(2 * l + 1, 2 * l + 1))
                .collect(),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.matrices.len() - 1
    }

    pub fn matrix(&self, l: usize) -> &DMatrix<f64> {
        &self.matrices[l]
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    /// Applies `D^l` to a degree-`l` block stored as `(2l+1) x F`, feature-minor.
    pub fn apply_block(&self, l: usize, block: &[f64], features: usize) -> Vec<f64> {
        let d = &self.matrices[l];
        let n = 2 * l + 1;
        let mut out = vec![0.0; n * features];
        for a in 0..n {
            for b in 0..n {
                let c = d[(a, b)];
                if c == 0.0 {
                    continue;
                }
                let src = &block[b * features..(b + 1) * features];
                let dst = &mut out[a * features..(a + 1) * features];
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += c * s;
                }
            }
        }
        out
    }

    /// Block-diagonal action on a flat vector of all degrees `0..=l` (`(l+1)^2` entries).
    pub fn apply_flat(&self, values: &[f64]) -> Result<Vec<f64>> {
        let l = ((values.len() as f64).sqrt() as usize).saturating_sub(1);
        if values.is_empty() || num_components(l) != values.len() || l > self.max_degree() {
            return invalid(format!(
                "{} values do not form degrees 0..=L with L <= {}",
                values.len(),
                self.max_degree()
            ));
        }
        let mut out = Vec::with_capacity(values.len());
        for k in 0..=l {
            out.extend(self.apply_block(k, &values[k * k..(k + 1) * (k + 1)], 1));
        }
        Ok(out)
    }
}

/// Wigner-D matrices of the rotation part of `g` for degrees `0..=max_degree`.
pub fn wigner_d(g: &GroupElement, max_degree: usize, table: &CgcTable) -> Result<WignerDSet> {
    if max_degree > table.max_degree() {
        return Err(crate::Error::Capacity {
            requested: max_degree,
            capacity: table.max_degree(),
        });
    }
    let mut matrices = Vec::with_capacity(max_degree + 1);
    matrices.push(DMatrix::identity(1, 1));
    if max_degree >= 1 {
        let r = DMatrix::from_iterator(3, 3, g.rotation.iter().copied());
        matrices.push(r);
    }
    for l in 2..=max_degree {
        let c = table.block_matrix(l - 1, 1, l);
        let prod = matrices[l - 1].kronecker(&matrices[1]);
        matrices.push(&c * prod * c.transpose());
    }
    Ok(WignerDSet { matrices })
}
