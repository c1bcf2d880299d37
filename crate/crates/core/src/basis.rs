//! Radial bases and featurization `a_k(|r|) Y_l^m(r / |r|)` of displacement vectors.
//!
//! Every basis function is multiplied by the smooth cutoff envelope
//! `1 - (6 t^5 - 15 t^4 + 10 t^3)`, `t = r / cutoff`, which vanishes together with its
//! first and second derivatives at `t = 1` and is zero beyond.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::irreps::{IrrepFeatures, Layout};
use crate::sh::{eval_sh, num_components, ZERO_NORM_SQUARED};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialKind {
    /// Gaussians centered at `k * cutoff / (K-1)` with width equal to the spacing.
    Gaussian,
    /// Bernstein polynomials `C(K-1, k) x^k (1-x)^(K-1-k)` in `x = exp(-r)`.
    ReciprocalBernstein,
}

impl RadialKind {
    pub fn name(self) -> &'static str {
        match self {
            RadialKind::Gaussian => "gaussian",
            RadialKind::ReciprocalBernstein => "reciprocal-bernstein",
        }
    }
}

impl FromStr for RadialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(RadialKind::Gaussian),
            "reciprocal-bernstein" | "bernstein" => Ok(RadialKind::ReciprocalBernstein),
            other => invalid(format!("unknown radial basis {other:?}")),
        }
    }
}

impl fmt::Display for RadialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBasisSpec {
    count: usize,
    kind: RadialKind,
    cutoff: f64,
}

impl RadialBasisSpec {
    pub fn new(count: usize, kind: RadialKind, cutoff: f64) -> Result<Self> {
        if count == 0 {
            return invalid("radial basis needs at least one function");
        }
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return invalid(format!("cutoff must be positive and finite, got {cutoff}"));
        }
        Ok(Self {
            count,
            kind,
            cutoff,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn kind(&self) -> RadialKind {
        self.kind
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }
}

/// Smooth cutoff envelope; `1` at `r = 0`, `0` for `r >= cutoff`.
pub fn envelope(r: f64, cutoff: f64) -> f64 {
    if r >= cutoff {
        return 0.0;
    }
    let t = r / cutoff;
    // factored as (1-t)^3 (1 + 3t + 6t^2) to keep precision near the cutoff
    let s = (cutoff - r) / cutoff;
    s * s * s * (1.0 + t * (3.0 + 6.0 * t))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The `K` radial functions at distance `r`.
pub fn radial_basis(r: f64, spec: &RadialBasisSpec) -> Result<Vec<f64>> {
    if r.is_nan() || r < 0.0 {
        return invalid(format!("distance must be nonnegative, got {r}"));
    }
    let k = spec.count;
    let env = envelope(r, spec.cutoff);
    if env == 0.0 || k == 1 {
        return Ok(vec![env; k]);
    }
    let values = match spec.kind {
        RadialKind::Gaussian => {
            let width = spec.cutoff / (k - 1) as f64;
            (0..k)
                .map(|i| {
                    let d = (r - i as f64 * width) / width;
                    (-0.5 * d * d).exp() * env
                })
                .collect()
        }
        RadialKind::ReciprocalBernstein => {
            let n = k - 1;
            let x = (-r).exp();
            let one_minus = -(-r).exp_m1();
            (0..k)
                .map(|i| binomial(n, i) * x.powi(i as i32) * one_minus.powi((n - i) as i32) * env)
                .collect()
        }
    };
    Ok(values)
}

/// Compact features with `F = K`: channel `k`, degree `l` holds `a_k(|r|) Y_l(r / |r|)`.
///
/// The zero vector yields scalar-only content `a_k(0) Y_0^0`.
pub fn featurize(r: [f64; 3], spec: &RadialBasisSpec, max_degree: usize) -> Result<IrrepFeatures> {
    let n2: f64 = r.iter().map(|v| v * v).sum();
    if r.iter().any(|v| !v.is_finite()) {
        return invalid("vector must be finite");
    }
    let k = spec.count;
    let radial = radial_basis(n2.sqrt(), spec)?;
    let mut x = IrrepFeatures::zeros(Layout::Compact, max_degree, k);
    if n2 <= ZERO_NORM_SQUARED {
        crate::Capacity::new(max_degree)?;
        let y00 = 0.5 / std::f64::consts::PI.sqrt();
        for (o, a) in x.data_mut()[..k].iter_mut().zip(&radial) {
            *o = a * y00;
        }
        return Ok(x);
    }
    let y = eval_sh(r, max_degree)?;
    debug_assert_eq!(y.values().len(), num_components(max_degree));
    for (row, yv) in x.data_mut().chunks_exact_mut(k).zip(y.values()) {
        for (o, a) in row.iter_mut().zip(&radial) {
            *o = a * yv;
        }
    }
    Ok(x)
}
