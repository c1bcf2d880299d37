//! Real spherical harmonics.
//!
//! For `m > 0`, `Y_l^m = sqrt((2l+1)/4pi) * sqrt(2) * Pi_l^m(z) * Re((x+iy)^m)`, for `m < 0`
//! the same with `Im((x+iy)^|m|)`, and `Y_l^0 = sqrt((2l+1)/4pi) * Pi_l^0(z)`. `Pi_l^m` is a
//! polynomial in `z` and `r^2` whose coefficients are computed once, exactly, in integer
//! arithmetic.
//!
//! Components are stored degree by degree; the block of degree `l` occupies
//! `l^2..(l+1)^2` and is ordered `m = l, -l, l-1, -(l-1), ..., 0`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};
use crate::HARD_MAX_DEGREE;

/// Squared-norm threshold below which a direction is undefined.
pub const ZERO_NORM_SQUARED: f64 = 1e-30;

/// Number of components of all degrees `0..=max_degree`.
pub const fn num_components(max_degree: usize) -> usize {
    (max_degree + 1) * (max_degree + 1)
}

/// Position of order `m` inside the degree-`l` block.
pub fn block_offset(l: usize, m: i64) -> usize {
    let l = l as i64;
    debug_assert!(m.abs() <= l);
    let off = if m > 0 {
        2 * (l - m)
    } else if m < 0 {
        2 * (l + m) + 1
    } else {
        2 * l
    };
    off as usize
}

/// Order `m` stored at position `offset` of a degree-`l` block.
pub fn order_at(l: usize, offset: usize) -> i64 {
    let l = l as i64;
    let p = offset as i64;
    if p == 2 * l {
        0
    } else if p % 2 == 0 {
        l - p / 2
    } else {
        -(l - (p - 1) / 2)
    }
}

/// Flat index of `(l, m)`.
pub fn sh_index(l: usize, m: i64) -> usize {
    l * l + block_offset(l, m)
}

/// Inverse of [`sh_index`].
pub fn degree_order(index: usize) -> (usize, i64) {
    let l = (index as f64).sqrt() as usize;
    // guard against rounding at perfect squares
    let l = if (l + 1) * (l + 1) <= index {
        l + 1
    } else if l * l > index {
        l - 1
    } else {
        l
    };
    (l, order_at(l, index - l * l))
}

/// Spherical-harmonic values for all degrees up to `max_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShVector {
    max_degree: usize,
    values: Vec<f64>,
}

impl ShVector {
    pub fn from_values(max_degree: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != num_components(max_degree) {
            return invalid(format!(
                "expected {} values for max degree {max_degree}, got {}",
                num_components(max_degree),
                values.len()
            ));
        }
        Ok(Self { max_degree, values })
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Components of degree `l`, in storage order.
    pub fn block(&self, l: usize) -> &[f64] {
        &self.values[l * l..(l + 1) * (l + 1)]
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        self.values[sh_index(l, m)]
    }
}

/// `Pi_l^m` with exact integer coefficients.
///
/// `Pi_l^m(z) = sqrt((l-m)!/(l+m)!) / 2^l * sum_k coeff_k * r^(2k) * z^(l-2k-m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiPolynomial {
    degree: usize,
    order: usize,
    /// `(-1)^k C(l,k) C(2l-2k,l) (l-2k)!/(l-2k-m)!` for `k = 0..=(l-m)/2`.
    coefficients: Vec<i128>,
    /// Floating-point coefficients including every prefactor of `Y_l^m`.
    scaled: Vec<f64>,
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

impl PiPolynomial {
    pub fn new(degree: usize, order: usize) -> Result<Self> {
        if order > degree {
            return invalid(format!("order {order} exceeds degree {degree}"));
        }
        if degree > HARD_MAX_DEGREE {
            return Err(Error::Capacity {
                requested: degree,
                capacity: HARD_MAX_DEGREE,
            });
        }
        let (l, m) = (degree, order);
        let coefficients: Vec<i128> = (0..=(l - m) / 2)
            .map(|k| {
                let mag = binomial(l, k)
                    * binomial(2 * l - 2 * k, l)
                    * (factorial(l - 2 * k) / factorial(l - 2 * k - m));
                let mag = mag as i128;
                if k % 2 == 0 {
                    mag
                } else {
                    -mag
                }
            })
            .collect();

        // (l+m)!/(l-m)! as an exact integer
        let rising: u128 = ((l - m + 1) as u128..=(l + m) as u128).product();
        let mut prefactor =
            ((2 * l + 1) as f64 / (4.0 * PI)).sqrt() / (rising as f64).sqrt() / 2f64.powi(l as i32);
        if m > 0 {
            prefactor *= std::f64::consts::SQRT_2;
        }
        let scaled = coefficients.iter().map(|&c| c as f64 * prefactor).collect();
        Ok(Self {
            degree,
            order,
            coefficients,
            scaled,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_terms(&self) -> usize {
        self.coefficients.len()
    }

    /// Exact integer coefficients, before the `sqrt((l-m)!/(l+m)!) / 2^l` prefactor.
    pub fn coefficients(&self) -> &[i128] {
        &self.coefficients
    }

    /// Evaluates `Pi_l^m` given powers `z^j` and `(r^2)^k`.
    pub fn eval(&self, z: f64, r2: f64) -> f64 {
        let norm = ((2 * self.degree + 1) as f64 / (4.0 * PI)).sqrt()
            * if self.order > 0 {
                std::f64::consts::SQRT_2
            } else {
                1.0
            };
        let zp = powers(z, self.degree);
        let rp = powers(r2, self.degree / 2);
        self.eval_with(&zp, &rp) / norm
    }

    fn eval_with(&self, zp: &[f64], rp: &[f64]) -> f64 {
        let top = self.degree - self.order;
        self.scaled
            .iter()
            .enumerate()
            .map(|(k, c)| c * rp[k] * zp[top - 2 * k])
            .sum()
    }
}

fn powers(x: f64, n: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    let mut acc = 1.0;
    for _ in 0..=n {
        p.push(acc);
        acc *= x;
    }
    p
}

fn pi_table() -> &'static [Vec<PiPolynomial>] {
    static TABLE: OnceLock<Vec<Vec<PiPolynomial>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=HARD_MAX_DEGREE)
            .map(|l| {
                (0..=l)
                    .map(|m| PiPolynomial::new(l, m).expect("degree within ceiling"))
                    .collect()
            })
            .collect()
    })
}

fn check_degree(max_degree: usize) -> Result<()> {
    if max_degree > HARD_MAX_DEGREE {
        Err(Error::Capacity {
            requested: max_degree,
            capacity: HARD_MAX_DEGREE,
        })
    } else {
        Ok(())
    }
}

/// Writes `|r|^l Y_l^m(r / |r|)` for all `l <= max_degree` into `out`.
pub(crate) fn solid_sh_into(r: [f64; 3], max_degree: usize, out: &mut [f64]) {
    let [x, y, z] = r;
    let r2 = x * x + y * y + z * z;
    let zp = powers(z, max_degree);
    let rp = powers(r2, max_degree / 2);

    // Re/Im of (x + iy)^m by repeated complex multiplication
    let mut re = vec![1.0; max_degree + 1];
    let mut im = vec![0.0; max_degree + 1];
    for m in 1..=max_degree {
        re[m] = x * re[m - 1] - y * im[m - 1];
        im[m] = x * im[m - 1] + y * re[m - 1];
    }

    let table = pi_table();
    for l in 0..=max_degree {
        let base = l * l;
        out[base + 2 * l] = table[l][0].eval_with(&zp, &rp);
        for m in 1..=l {
            let p = table[l][m].eval_with(&zp, &rp);
            out[base + 2 * (l - m)] = p * re[m];
            out[base + 2 * (l - m) + 1] = p * im[m];
        }
    }
}

/// All `Y_l^m(r)` with `l <= max_degree`; depends only on the direction of `r`.
pub fn eval_sh(r: [f64; 3], max_degree: usize) -> Result<ShVector> {
    check_degree(max_degree)?;
    let n2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    if n2 <= ZERO_NORM_SQUARED {
        return invalid("spherical harmonics are undefined at the zero vector");
    }
    let inv = 1.0 / n2.sqrt();
    let mut values = vec![0.0; num_components(max_degree)];
    solid_sh_into(
        [r[0] * inv, r[1] * inv, r[2] * inv],
        max_degree,
        &mut values,
    );
    Ok(ShVector { max_degree, values })
}

/// A single `Y_l^m(r)`.
pub fn eval_sh_single(l: usize, m: i64, r: [f64; 3]) -> Result<f64> {
    if m.unsigned_abs() as usize > l {
        return invalid(format!("order {m} out of range for degree {l}"));
    }
    Ok(eval_sh(r, l)?.get(l, m))
}

/// Solid harmonics `|r|^l Y_l^m(r / |r|)`: homogeneous polynomials, defined at `r = 0`.
pub fn eval_solid_sh(r: [f64; 3], max_degree: usize) -> Result<ShVector> {
    check_degree(max_degree)?;
    let mut values = vec![0.0; num_components(max_degree)];
    solid_sh_into(r, max_degree, &mut values);
    Ok(ShVector { max_degree, values })
}
