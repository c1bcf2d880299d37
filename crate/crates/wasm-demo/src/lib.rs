//! Browser demo: spherical harmonic maps, vector coupling and radial basis curves.
//!
//! The plain functions are usable (and tested) natively; the `wasm-bindgen`
//! exports only exist on `wasm32`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use irrepcore::sh::degree_order;
use irrepcore::{build_cgc_table, couple, eval_sh, radial_basis, CgcTable, Irrep, RadialBasisSpec, RadialKind};

/// Largest degree offered by the harmonic map.
pub const MAX_MAP_DEGREE: usize = 8;

fn table() -> &'static CgcTable {
    static TABLE: OnceLock<CgcTable> = OnceLock::new();
    TABLE.get_or_init(|| build_cgc_table(2).expect("degree-2 table"))
}

/// `Y_l^m` on an `n_theta x n_phi` grid, row-major in theta.
/// Cell centers: theta in (0, pi), phi in (0, 2 pi).
pub fn sh_grid(l: usize, m: i32, n_theta: usize, n_phi: usize) -> Result<Vec<f64>, String> {
    if l > MAX_MAP_DEGREE {
        return Err(format!("degree {l} above {MAX_MAP_DEGREE}"));
    }
    if m.unsigned_abs() as usize > l {
        return Err(format!("order {m} out of range for degree {l}"));
    }
    if n_theta == 0 || n_phi == 0 {
        return Err("grid must be non-empty".into());
    }
    let idx = (0..(l + 1) * (l + 1))
        .find(|&i| degree_order(i) == (l, m as i64))
        .expect("index exists");
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = PI * (i as f64 + 0.5) / n_theta as f64;
        for j in 0..n_phi {
            let phi = 2.0 * PI * (j as f64 + 0.5) / n_phi as f64;
            let r = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            out.push(eval_sh(r, l).map_err(|e| e.to_string())?.values()[idx]);
        }
    }
    Ok(out)
}

/// Decomposes `u (x) v` of two vectors into degrees 0, 1, 2.
/// Returns 9 values: `[c0, c1 (3), c2 (5)]`, each block in storage order.
pub fn couple_vectors(u: [f64; 3], v: [f64; 3]) -> Vec<f64> {
    let a = Irrep::new(1, u.to_vec()).expect("3 components");
    let b = Irrep::new(1, v.to_vec()).expect("3 components");
    (0..=2)
        .flat_map(|l3| {
            couple(table(), &a, &b, l3)
                .expect("within table")
                .components()
                .to_vec()
        })
        .collect()
}

/// `(l, m)` labels for the output of [`couple_vectors`], as `"l,m"` strings.
pub fn couple_labels() -> Vec<String> {
    (0..=2)
        .flat_map(|l| {
            let base = l * l;
            (0..2 * l + 1).map(move |k| {
                let (_, m) = degree_order(base + k);
                format!("{l},{m}")
            })
        })
        .collect()
}

/// Radial basis sampled at `samples` evenly spaced radii in `[0, 1.2 cutoff]`.
/// Returns `count` curves of `samples` values each, curve-major.
pub fn radial_curves(kind: &str, count: usize, cutoff: f64, samples: usize) -> Result<Vec<f64>, String> {
    let kind: RadialKind = kind.parse().map_err(|e: irrepcore::Error| e.to_string())?;
    let spec = RadialBasisSpec::new(count, kind, cutoff).map_err(|e| e.to_string())?;
    if samples < 2 {
        return Err("need at least 2 samples".into());
    }
    let mut out = vec![0.0; count * samples];
    for s in 0..samples {
        let r = 1.2 * cutoff * s as f64 / (samples - 1) as f64;
        let b = radial_basis(r, &spec).map_err(|e| e.to_string())?;
        for (k, v) in b.into_iter().enumerate() {
            out[k * samples + s] = v;
        }
    }
    Ok(out)
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    #[wasm_bindgen(js_name = shGrid)]
    pub fn sh_grid(l: usize, m: i32, n_theta: usize, n_phi: usize) -> Result<Vec<f64>, JsError> {
        super::sh_grid(l, m, n_theta, n_phi).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = coupleVectors)]
    pub fn couple_vectors(ux: f64, uy: f64, uz: f64, vx: f64, vy: f64, vz: f64) -> Vec<f64> {
        super::couple_vectors([ux, uy, uz], [vx, vy, vz])
    }

    #[wasm_bindgen(js_name = coupleLabels)]
    pub fn couple_labels() -> Vec<String> {
        super::couple_labels()
    }

    #[wasm_bindgen(js_name = radialCurves)]
    pub fn radial_curves(kind: &str, count: usize, cutoff: f64, samples: usize) -> Result<Vec<f64>, JsError> {
        super::radial_curves(kind, count, cutoff, samples).map_err(|e| JsError::new(&e))
    }
}
