//! Numerical construction of real-basis coupling blocks.
//!
//! Generators `J^l` of the degree-`l` representation are bootstrapped from `J^1` (the
//! cross-product matrices, since `D^1(R) = R`): the top block `(1, l-1, l)` is found in the
//! Casimir eigenspace of `J^1 (x) 1 + 1 (x) J^(l-1)` and aligned with the spherical-harmonic
//! basis through `C (Y_1(r) (x) Y_(l-1)(r)) = kappa * Y_l(r)`, after which
//! `J^l = C (J^1 (x) 1 + 1 (x) J^(l-1)) C^T`. Every other block is the Casimir eigenspace
//! of its product representation, aligned by solving the intertwiner equation
//! `O M_i = J^(l3)_i O` for the restricted generators `M_i`.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::quadrature::SphereQuadrature;
use crate::sh::eval_sh;

/// Entries with magnitude below this are stored as exact zeros.
pub(crate) const SNAP: f64 = 1e-13;

/// Magnitude above which an entry counts as nonzero for the sign convention.
pub(crate) const SIGN_TOL: f64 = 1e-10;

pub(crate) type Generators = [DMatrix<f64>; 3];

fn degree_one_generators() -> Generators {
    // (J_i)_jk = -eps_ijk, so J_i v = e_i x v
    let mut j = [
        DMatrix::zeros(3, 3),
        DMatrix::zeros(3, 3),
        DMatrix::zeros(3, 3),
    ];
    j[0][(1, 2)] = -1.0;
    j[0][(2, 1)] = 1.0;
    j[1][(0, 2)] = 1.0;
    j[1][(2, 0)] = -1.0;
    j[2][(0, 1)] = -1.0;
    j[2][(1, 0)] = 1.0;
    j
}

fn product_generators(a: &Generators, b: &Generators) -> Generators {
    let ia = DMatrix::identity(a[0].nrows(), a[0].nrows());
    let ib = DMatrix::identity(b[0].nrows(), b[0].nrows());
    [0, 1, 2].map(|i| a[i].kronecker(&ib) + ia.kronecker(&b[i]))
}

/// Eigenpairs of the Casimir `-sum_i A_i^2` of a product representation.
struct Casimir {
    eigen: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl Casimir {
    fn new(gens: &Generators) -> Self {
        let mut k = -(&gens[0] * &gens[0] + &gens[1] * &gens[1] + &gens[2] * &gens[2]);
        // exact symmetry before the symmetric solver
        let kt = k.transpose();
        k = (k + kt) * 0.5;
        Self {
            eigen: SymmetricEigen::new(k),
        }
    }

    /// Orthonormal basis (as columns) of the degree-`l` isotypic subspace.
    fn subspace(&self, l: usize) -> DMatrix<f64> {
        let target = (l * (l + 1)) as f64;
        let cols: Vec<usize> = self
            .eigen
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &ev)| (ev - target).abs() < 0.5)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(
            cols.len(),
            2 * l + 1,
            "isotypic subspace of degree {l} has wrong dimension"
        );
        self.eigen.eigenvectors.select_columns(&cols)
    }
}

/// Scales an intertwiner between orthogonal irreps to an orthogonal matrix.
fn normalize(o: DMatrix<f64>) -> DMatrix<f64> {
    let d = o.nrows() as f64;
    let s = (d / o.norm_squared()).sqrt();
    o * s
}

/// `O` with `O Q^T (Y_a(r) (x) Y_b(r)) = kappa * Y_c(r)` for the top coupling `c = a + b`.
fn align_with_harmonics(q: &DMatrix<f64>, la: usize, lb: usize) -> DMatrix<f64> {
    let lc = la + lb;
    let d = 2 * lc + 1;
    let quad = SphereQuadrature::exact_to(2 * lc + 2);
    let k = quad.len();
    let mut x = DMatrix::zeros(d, k);
    let mut y = DMatrix::zeros(d, k);
    for (col, p) in quad.points.iter().enumerate() {
        let ya = eval_sh(*p, la).expect("unit vector");
        let yb = eval_sh(*p, lb).expect("unit vector");
        let yc = eval_sh(*p, lc).expect("unit vector");
        let ta = DVector::from_column_slice(ya.block(la));
        let tb = DVector::from_column_slice(yb.block(lb));
        let t = ta.kronecker(&tb);
        x.set_column(col, &(q.transpose() * t));
        y.set_column(col, &DVector::from_column_slice(yc.block(lc)));
    }
    let xxt = &x * x.transpose();
    let inv = xxt
        .cholesky()
        .expect("samples span the isotypic subspace")
        .inverse();
    normalize(&y * x.transpose() * inv)
}

/// Solves `O M_i = J_i O` (unique up to scale) by inverse iteration on the normal equations.
fn align_with_generators(m: &Generators, j: &Generators) -> DMatrix<f64> {
    let d = m[0].nrows();
    let id = DMatrix::<f64>::identity(d, d);
    let mut g = DMatrix::<f64>::zeros(d * d, d * d);
    for i in 0..3 {
        // row-major vec: vec(O M) = (1 (x) M^T) vec(O), vec(J O) = (J (x) 1) vec(O)
        let b = id.kronecker(&m[i].transpose()) - j[i].kronecker(&id);
        g += b.transpose() * &b;
    }
    let shift = 1e-10 * (g.trace() / (d * d) as f64 + 1.0);
    for k in 0..d * d {
        g[(k, k)] += shift;
    }
    let chol = Cholesky::new(g).expect("shifted normal matrix is positive definite");
    let mut v = DVector::from_fn(d * d, |k, _| {
        ((k + 1) as f64 * 0.754_877_666_246_692_8).fract() + 0.1
    });
    for _ in 0..4 {
        v = chol.solve(&v);
        let n = v.norm();
        v /= n;
    }
    normalize(DMatrix::from_row_slice(d, d, v.as_slice()))
}

/// Applies the sign convention in place: `C^{c,0}_{a,0,b,0} > 0` when nonzero, otherwise the
/// first nonzero entry in `(m3, m1, m2)` storage order is positive. Also snaps tiny entries.
pub(crate) fn fix_sign(c: &mut DMatrix<f64>, la: usize, lb: usize, lc: usize) {
    let db = 2 * lb + 1;
    let zero = c[(2 * lc, 2 * la * db + 2 * lb)];
    let pivot = if zero.abs() > SIGN_TOL {
        zero
    } else {
        let mut first = 0.0;
        'scan: for r in 0..c.nrows() {
            for col in 0..c.ncols() {
                if c[(r, col)].abs() > SIGN_TOL {
                    first = c[(r, col)];
                    break 'scan;
                }
            }
        }
        first
    };
    if pivot < 0.0 {
        c.neg_mut();
    }
    c.apply(|v| {
        if v.abs() < SNAP {
            *v = 0.0;
        }
    });
}

/// Coupling blocks `C[(m3, m1 * (2 l2 + 1) + m2)]` for all `l1 <= l2 <= max_degree`,
/// `l3 <= max_degree` allowed by the selection rule, keyed by `(l1, l2, l3)`.
pub(crate) fn build_blocks(max_degree: usize) -> Vec<((usize, usize, usize), DMatrix<f64>)> {
    let mut gens: Vec<Generators> = vec![[
        DMatrix::zeros(1, 1),
        DMatrix::zeros(1, 1),
        DMatrix::zeros(1, 1),
    ]];
    let mut blocks = Vec::new();
    if max_degree >= 1 {
        gens.push(degree_one_generators());
    }

    // bootstrap: top blocks (1, l-1, l) and the generators of degree l
    let mut top = Vec::new();
    for l in 2..=max_degree {
        let a = product_generators(&gens[1], &gens[l - 1]);
        let q = Casimir::new(&a).subspace(l);
        let o = align_with_harmonics(&q, 1, l - 1);
        let mut c = o * q.transpose();
        fix_sign(&mut c, 1, l - 1, l);
        let jl = [0, 1, 2].map(|i| &c * &a[i] * c.transpose());
        gens.push(jl);
        top.push(c);
    }

    for l1 in 0..=max_degree {
        for l2 in l1..=max_degree {
            let a = product_generators(&gens[l1], &gens[l2]);
            let casimir = Casimir::new(&a);
            for l3 in (l2 - l1)..=(l1 + l2).min(max_degree) {
                if l1 == 1 && l3 == l2 + 1 {
                    blocks.push(((l1, l2, l3), top[l3 - 2].clone()));
                    continue;
                }
                let q = casimir.subspace(l3);
                let m = [0, 1, 2].map(|i| q.transpose() * &a[i] * &q);
                let o = align_with_generators(&m, &gens[l3]);
                let mut c = o * q.transpose();
                fix_sign(&mut c, l1, l2, l3);
                blocks.push(((l1, l2, l3), c));
            }
        }
    }
    blocks
}
