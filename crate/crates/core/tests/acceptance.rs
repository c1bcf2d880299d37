//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero on failure.

use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;

use irrepcore::cgc::{couple, CgcTable, Irrep};
use irrepcore::layers::{activation, dense_apply, dense_init, ActivationKind};
use irrepcore::rotations::rng_from_seed;
use irrepcore::sh::{eval_sh, num_components};
use irrepcore::suites::{run_suite, RunConfig, BROKEN_SUITE};
use irrepcore::{
    build_cgc_table, random_rotation, tensor_apply, wigner_d, FeatureShape, GroupElement,
    IrrepFeatures, Layout, Parity, TensorParams,
};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn gaussian3(rng: &mut impl Rng) -> [f64; 3] {
    [
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    ]
}

fn cross(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn dot(u: [f64; 3], v: [f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn det(r: [f64; 3], s: [f64; 3], t: [f64; 3]) -> f64 {
    dot(r, cross(s, t))
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Product rule: Gauss-Legendre in `cos(theta)` times uniform `phi`; exact for polynomials
/// of degree `<= degree`.
fn sphere_rule(degree: usize) -> Vec<([f64; 3], f64)> {
    let (z, wz) = gauss_legendre(degree / 2 + 1);
    let nphi = degree + 1;
    let mut out = Vec::new();
    for (zi, wi) in z.iter().zip(&wz) {
        let rho = (1.0 - zi * zi).sqrt();
        for j in 0..nphi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / nphi as f64;
            out.push((
                [rho * phi.cos(), rho * phi.sin(), *zi],
                wi * 2.0 * std::f64::consts::PI / nphi as f64,
            ));
        }
    }
    out
}

fn criterion_1(table: &CgcTable) -> Outcome {
    let mut rng = rng_from_seed(1);
    let mut worst: f64 = 0.0;
    let s2 = 1.0 / 2f64.sqrt();
    let s3 = 1.0 / 3f64.sqrt();
    for _ in 0..1000 {
        let u = gaussian3(&mut rng);
        let v = gaussian3(&mut rng);
        let iu = Irrep::new(1, u.to_vec()).unwrap();
        let iv = Irrep::new(1, v.to_vec()).unwrap();
        let c0 = couple(table, &iu, &iv, 0).unwrap();
        let c1 = couple(table, &iu, &iv, 1).unwrap();
        let c2 = couple(table, &iu, &iv, 2).unwrap();
        let [ux, uy, uz] = u;
        let [vx, vy, vz] = v;
        let e0 = [s3 * dot(u, v)];
        let e1 = cross(u, v).map(|c| s2 * c);
        let e2 = [
            s2 * (ux * vx - uy * vy),
            s2 * (ux * vy + uy * vx),
            s2 * (ux * vz + uz * vx),
            s2 * (uy * vz + uz * vy),
            s2 * s3 * (2.0 * uz * vz - ux * vx - uy * vy),
        ];
        for (got, want) in [
            (c0.components(), &e0[..]),
            (c1.components(), &e1[..]),
            (c2.components(), &e2[..]),
        ] {
            for (g, w) in got.iter().zip(want) {
                worst = worst.max((g - w).abs());
            }
        }
    }
    outcome(worst < 1e-12, format!("max abs error {worst:.3e}"))
}

fn criterion_2() -> Outcome {
    let l = 8;
    let n = num_components(l);
    let mut gram = vec![0.0; n * n];
    for (p, w) in sphere_rule(16) {
        let y = eval_sh(p, l).unwrap();
        let y = y.values();
        for i in 0..n {
            for j in 0..n {
                gram[i * n + j] += w * y[i] * y[j];
            }
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[i * n + j] - id).abs());
        }
    }
    outcome(worst < 1e-10, format!("max |G - I| {worst:.3e}"))
}

/// Invariant tensor from the triple-sphere integral of `Y_a(r) Y_b(s) Y_c(t)` against
/// `(r.s)^p (s.t)^q (t.r)^k`, times `det(r, s, t)` when `a + b + c` is odd.
/// Returned as `[o3][o1][o2]`, normalized to Frobenius norm `sqrt(2c + 1)`.
fn oracle_block(a: usize, b: usize, c: usize) -> Vec<f64> {
    let odd = (a + b + c) % 2 == 1;
    let shift = usize::from(odd);
    let p = (a + b - c - shift) / 2;
    let q = (b + c - a - shift) / 2;
    let k = (a + c - b - shift) / 2;
    let rule = sphere_rule(2 * a.max(b).max(c) + 2);
    let ys: Vec<Vec<f64>> = rule
        .iter()
        .map(|(pt, _)| eval_sh(*pt, a.max(b).max(c)).unwrap().into_values())
        .collect();
    let (da, db, dc) = (2 * a + 1, 2 * b + 1, 2 * c + 1);
    let mut g = vec![0.0; dc * da * db];
    for (i, (r, wr)) in rule.iter().enumerate() {
        let yr = &ys[i][a * a..a * a + da];
        for (j, (s, ws)) in rule.iter().enumerate() {
            let ys_ = &ys[j][b * b..b * b + db];
            let rs = dot(*r, *s).powi(p as i32);
            let mut h = vec![0.0; dc];
            for (l, (t, wt)) in rule.iter().enumerate() {
                let mut psi = rs * dot(*s, *t).powi(q as i32) * dot(*t, *r).powi(k as i32);
                if odd {
                    psi *= det(*r, *s, *t);
                }
                let yt = &ys[l][c * c..c * c + dc];
                for (hm, y) in h.iter_mut().zip(yt) {
                    *hm += wt * psi * y;
                }
            }
            let w = wr * ws;
            for o3 in 0..dc {
                for o1 in 0..da {
                    for o2 in 0..db {
                        g[(o3 * da + o1) * db + o2] += w * h[o3] * yr[o1] * ys_[o2];
                    }
                }
            }
        }
    }
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(norm > 1e-8, "oracle vanishes for ({a},{b},{c})");
    let scale = ((2 * c + 1) as f64).sqrt() / norm;
    g.iter_mut().for_each(|v| *v *= scale);
    g
}

fn apply_sign_rule(g: &mut [f64], a: usize, b: usize, c: usize) {
    let (da, db) = (2 * a + 1, 2 * b + 1);
    // offset 2l is m = 0
    let zero = g[(2 * c * da + 2 * a) * db + 2 * b];
    let pivot = if zero.abs() > 1e-10 {
        zero
    } else {
        *g.iter().find(|v| v.abs() > 1e-10).unwrap()
    };
    if pivot < 0.0 {
        g.iter_mut().for_each(|v| *v = -*v);
    }
}

fn table_block(table: &CgcTable, a: usize, b: usize, c: usize) -> Vec<f64> {
    let (da, db, dc) = (2 * a + 1, 2 * b + 1, 2 * c + 1);
    let mut out = vec![0.0; dc * da * db];
    for o3 in 0..dc {
        for o1 in 0..da {
            for o2 in 0..db {
                out[(o3 * da + o1) * db + o2] =
                    table.get_indexed(a * a + o1, b * b + o2, c * c + o3);
            }
        }
    }
    out
}

fn criterion_3(table: &CgcTable) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for a in 0..=3 {
        for b in 0..=3 {
            for c in 0..=3 {
                let got = table_block(table, a, b, c);
                if c < a.abs_diff(b) || c > a + b {
                    worst = worst.max(got.iter().fold(0.0, |m: f64, v| m.max(v.abs())));
                    continue;
                }
                let want = if a <= b {
                    let mut g = oracle_block(a, b, c);
                    apply_sign_rule(&mut g, a, b, c);
                    g
                } else {
                    // l1 > l2: exchange of the independently computed (b, a, c) oracle
                    let mut swapped = oracle_block(b, a, c);
                    apply_sign_rule(&mut swapped, b, a, c);
                    let sign = if (a + b - c) % 2 == 0 { 1.0 } else { -1.0 };
                    let (da, db) = (2 * a + 1, 2 * b + 1);
                    let mut g = vec![0.0; got.len()];
                    for o3 in 0..2 * c + 1 {
                        for o1 in 0..da {
                            for o2 in 0..db {
                                g[(o3 * da + o1) * db + o2] =
                                    sign * swapped[(o3 * db + o2) * da + o1];
                            }
                        }
                    }
                    // the direct oracle agrees up to an overall sign
                    let direct = oracle_block(a, b, c);
                    let s = if direct.iter().zip(&g).map(|(x, y)| x * y).sum::<f64>() < 0.0 {
                        -1.0
                    } else {
                        1.0
                    };
                    for (x, y) in direct.iter().zip(&g) {
                        worst = worst.max((s * x - y).abs());
                    }
                    g
                };
                for (x, y) in got.iter().zip(&want) {
                    worst = worst.max((x - y).abs());
                }
                checked += 1;
            }
        }
    }
    // sign convention on every stored triple
    let l = table.max_degree();
    let mut violations = 0;
    for a in 0..=l {
        for b in 0..=l {
            for c in a.abs_diff(b)..=(a + b).min(l) {
                let v = table.get_indexed(a * a + 2 * a, b * b + 2 * b, c * c + 2 * c);
                if v.abs() > 1e-10 && v < 0.0 {
                    violations += 1;
                }
            }
        }
    }
    outcome(
        worst < 1e-10 && violations == 0,
        format!("{checked} blocks, max abs error {worst:.3e}, {violations} sign violations up to L={l}"),
    )
}

fn criterion_4(table: &CgcTable) -> Outcome {
    let mut rng = rng_from_seed(4);
    let mut worst: f64 = 0.0;
    for a in 0..=4 {
        for b in 0..=4 {
            for _ in 0..1000 {
                let u: Vec<f64> = (0..2 * a + 1).map(|_| rng.sample(StandardNormal)).collect();
                let v: Vec<f64> = (0..2 * b + 1).map(|_| rng.sample(StandardNormal)).collect();
                let u = Irrep::new(a, u).unwrap();
                let v = Irrep::new(b, v).unwrap();
                let total: f64 = (a.abs_diff(b)..=a + b)
                    .map(|c| couple(table, &u, &v, c).unwrap().norm_squared())
                    .sum();
                worst = worst.max((total - u.norm_squared() * v.norm_squared()).abs());
            }
        }
    }
    outcome(worst < 1e-12, format!("max abs error {worst:.3e}"))
}

fn criterion_5(table: &CgcTable) -> Outcome {
    // 200 alternating trials: 100 proper rotations and 100 rotoreflections
    let cfg = RunConfig::new(4, 200, 1e-10, 5, 8).unwrap();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for name in ["sh", "couple", "dense", "tensor", "tensor_dense", "featurize"] {
        let r = run_suite(name, &cfg, table).unwrap().remove(0);
        worst = worst.max(r.max_dev);
        parts.push(format!("{name} {:.1e}", r.max_dev));
    }
    outcome(worst < 1e-10, parts.join(", "))
}

fn criterion_6(table: &CgcTable) -> Outcome {
    let mut rng = rng_from_seed(6);
    let mut hom: f64 = 0.0;
    let mut orth: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for _ in 0..100 {
        let a = random_rotation(&mut rng);
        let b = random_rotation(&mut rng);
        let da = wigner_d(&a, 8, table).unwrap();
        let db = wigner_d(&b, 8, table).unwrap();
        let dab = wigner_d(&a.compose(&b), 8, table).unwrap();
        for l in 0..=8 {
            hom = hom.max((dab.matrix(l) - da.matrix(l) * db.matrix(l)).amax());
            let n = 2 * l + 1;
            let i = nalgebra::DMatrix::<f64>::identity(n, n);
            orth = orth.max((da.matrix(l) * da.matrix(l).transpose() - i).amax());
        }
        for r in 0..3 {
            for c in 0..3 {
                d1 = d1.max((da.matrix(1)[(r, c)] - a.rotation()[(r, c)]).abs());
            }
        }
    }
    outcome(
        hom < 1e-10 && orth < 1e-10 && d1 < 1e-14,
        format!("homomorphism {hom:.3e}, orthogonality {orth:.3e}, |D1 - R| {d1:.3e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut worst: f64 = 0.0;
    let (fi, fo) = (16, 8);
    for seed in 0..100 {
        let mut p = dense_init(seed, 0, fi, fo, Layout::Compact).unwrap();
        let mut rng = rng_from_seed(1000 + seed);
        for b in p.bias_mut() {
            *b = rng.sample(StandardNormal);
        }
        let xs: Vec<f64> = (0..fi).map(|_| rng.sample(StandardNormal)).collect();
        let x = IrrepFeatures::from_data(Layout::Compact, 0, fi, xs.clone()).unwrap();
        let y = activation(&dense_apply(&p, &x).unwrap(), ActivationKind::Relu);
        let w = p.weight(0, Parity::Even).unwrap();
        for j in 0..fo {
            let mut affine = 0.0;
            for i in 0..fi {
                affine += xs[i] * w[i * fo + j];
            }
            affine += p.bias()[j];
            worst = worst.max((y.data()[j] - affine.max(0.0)).abs());
        }
    }
    outcome(worst <= 1e-15, format!("max abs error {worst:.3e}"))
}

fn criterion_8(table: &CgcTable) -> Outcome {
    let shape = FeatureShape::new(Layout::Compact, 1);
    let mut p = TensorParams::constant(shape, shape, 1, 1, 1.0).unwrap();
    p.retain(|q| q.a == 1 && q.b == 1 && q.c == 1);
    let mut x = IrrepFeatures::zeros(Layout::Compact, 1, 1);
    let mut y = IrrepFeatures::zeros(Layout::Compact, 1, 1);
    x.block_mut(1, Parity::Odd).unwrap().copy_from_slice(&[0.3, -1.2, 0.5]);
    y.block_mut(1, Parity::Odd).unwrap().copy_from_slice(&[0.9, 0.4, -0.7]);
    let z = tensor_apply(&p, table, &x, &y, 1).unwrap();
    let lands_even = z.layout() == Layout::General
        && z.block(1, Parity::Even).unwrap().iter().any(|&v| v != 0.0)
        && z.block(1, Parity::Odd).unwrap().iter().all(|&v| v == 0.0);

    let inv = GroupElement::inversion();
    let d = wigner_d(&inv, 1, table).unwrap();
    // the pseudovector is invariant, the vectors flip
    let mut w = z.clone();
    w.block_mut(1, Parity::Odd)
        .unwrap()
        .copy_from_slice(&[1.0, 2.0, 3.0]);
    let wi = w.transform(&inv, &d).unwrap();
    let pseudo_kept = wi.block(1, Parity::Even) == w.block(1, Parity::Even);
    let vector_flipped = wi.block(1, Parity::Odd).unwrap() == [-1.0, -2.0, -3.0];
    // and the coupling commutes with inversion: (-x) (x) (-y) = x (x) y
    let xi = x.transform(&inv, &d).unwrap();
    let yi = y.transform(&inv, &d).unwrap();
    let zi = tensor_apply(&p, table, &xi, &yi, 1).unwrap();
    let commutes = zi == z.transform(&inv, &d).unwrap() && zi == z;
    outcome(
        lands_even && pseudo_kept && vector_flipped && commutes,
        format!(
            "lands even {lands_even}, pseudovector kept {pseudo_kept}, vector flipped {vector_flipped}, commutes {commutes}"
        ),
    )
}

fn criterion_9(table: &CgcTable) -> Outcome {
    let cfg = RunConfig::new(2, 20, 1e-10, 9, 4).unwrap();
    let r = run_suite(BROKEN_SUITE, &cfg, table).unwrap().remove(0);
    outcome(r.max_dev > 1e-2, format!("deviation {:.3e}", r.max_dev))
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail = format!("{}; {:.2} s", o.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            o.ok = false;
            o.detail.push_str(&format!(" exceeds {:.0} s", limit.as_secs_f64()));
        }
    }
    o
}

fn main() {
    let small = build_cgc_table(4).unwrap();
    let big = build_cgc_table(8).unwrap();
    let secs = |s| Some(Duration::from_secs(s));
    let results = [
        ("1 vector coupling constants", timed(secs(1), || criterion_1(&small))),
        ("2 spherical harmonic orthonormality", timed(secs(5), criterion_2)),
        ("3 CGC oracle and sign convention", timed(None, || criterion_3(&big))),
        ("4 norm preservation", timed(None, || criterion_4(&big))),
        ("5 equivariance suite", timed(secs(30), || criterion_5(&small))),
        ("6 Wigner-D properties", timed(None, || criterion_6(&big))),
        ("7 ordinary network reduction", timed(None, criterion_7)),
        ("8 parity bookkeeping", timed(None, || criterion_8(&small))),
        ("9 negative control", timed(None, || criterion_9(&small))),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {}", o.detail);
        if !o.ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all {} criteria passed", results.len());
}
