use std::sync::OnceLock;

use proptest::prelude::*;

use irrepcore::cgc::{couple, CgcTable, Irrep};
use irrepcore::layers::valid_paths;
use irrepcore::rotations::rng_from_seed;
use irrepcore::sh::{eval_sh, num_components};
use irrepcore::{
    build_cgc_table, dense_apply, dense_init, featurize, random_rotation, tensor_apply, wigner_d,
    DenseParams, FeatureShape, GroupElement, IrrepFeatures, Layout, Parity, RadialBasisSpec,
    RadialKind, TensorParams,
};

fn table() -> &'static CgcTable {
    static T: OnceLock<CgcTable> = OnceLock::new();
    T.get_or_init(|| build_cgc_table(4).unwrap())
}

fn layout() -> impl Strategy<Value = Layout> {
    prop_oneof![Just(Layout::General), Just(Layout::Compact)]
}

fn vec3() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-3.0f64..3.0)
}

fn irrep(l: usize) -> impl Strategy<Value = Irrep> {
    prop::collection::vec(-2.0f64..2.0, 2 * l + 1).prop_map(move |c| Irrep::new(l, c).unwrap())
}

fn irrep_pair() -> impl Strategy<Value = (Irrep, Irrep)> {
    (0usize..=4, 0usize..=4).prop_flat_map(|(a, b)| (irrep(a), irrep(b)))
}

fn element(seed: u64, sign: bool) -> GroupElement {
    random_rotation(&mut rng_from_seed(seed)).with_sign(if sign { -1 } else { 1 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coupling_preserves_norm((u, v) in irrep_pair()) {
        let (a, b) = (u.degree(), v.degree());
        let total: f64 = (a.abs_diff(b)..=a + b)
            .filter(|&c| c <= 4)
            .map(|c| couple(table(), &u, &v, c).unwrap().norm_squared())
            .sum();
        if a + b <= 4 {
            let expect = u.norm_squared() * v.norm_squared();
            prop_assert!((total - expect).abs() < 1e-12 * expect.max(1.0));
        }
    }

    #[test]
    fn coupling_swap_symmetry((u, v) in irrep_pair()) {
        let (a, b) = (u.degree(), v.degree());
        for c in a.abs_diff(b)..=(a + b).min(4) {
            let uv = couple(table(), &u, &v, c).unwrap();
            let vu = couple(table(), &v, &u, c).unwrap();
            let s = if (a + b - c) % 2 == 0 { 1.0 } else { -1.0 };
            for (x, y) in uv.components().iter().zip(vu.components()) {
                prop_assert!((x - s * y).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn sh_rotates_by_wigner_d(r in vec3(), seed in any::<u64>()) {
        prop_assume!(r.iter().map(|v| v * v).sum::<f64>() > 1e-6);
        let g = element(seed, false);
        let d = wigner_d(&g, 4, table()).unwrap();
        let lhs = eval_sh(g.apply(r), 4).unwrap();
        let rhs = d.apply_flat(eval_sh(r, 4).unwrap().values()).unwrap();
        for (x, y) in lhs.values().iter().zip(&rhs) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn transform_is_a_representation(
        lay in layout(), s1 in any::<u64>(), s2 in any::<u64>(), sx in any::<u64>(),
        f1 in any::<bool>(), f2 in any::<bool>(),
    ) {
        let x = IrrepFeatures::random(lay, 3, 2, &mut rng_from_seed(sx));
        let (a, b) = (element(s1, f1), element(s2, f2));
        let da = wigner_d(&a, 3, table()).unwrap();
        let db = wigner_d(&b, 3, table()).unwrap();
        let ba = b.compose(&a);
        let dba = wigner_d(&ba, 3, table()).unwrap();
        let twice = x.transform(&a, &da).unwrap().transform(&b, &db).unwrap();
        let once = x.transform(&ba, &dba).unwrap();
        prop_assert!(twice.max_abs_diff(&once).unwrap() < 1e-10);
        // orthogonal action
        let n0: f64 = x.data().iter().map(|v| v * v).sum();
        let n1: f64 = once.data().iter().map(|v| v * v).sum();
        prop_assert!((n0 - n1).abs() < 1e-10 * n0.max(1.0));
    }

    #[test]
    fn dense_is_linear_up_to_bias(
        lay in layout(), seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0,
    ) {
        let mut p = dense_init(seed, 2, 3, 4, lay).unwrap();
        p.bias_mut().copy_from_slice(&[0.5, -1.0, 2.0, 0.25]);
        let mut rng = rng_from_seed(seed ^ 1);
        let x = IrrepFeatures::random(lay, 2, 3, &mut rng);
        let y = IrrepFeatures::random(lay, 2, 3, &mut rng);
        let zero = dense_apply(&p, &IrrepFeatures::zeros(lay, 2, 3)).unwrap();
        let lin = |v: &IrrepFeatures| dense_apply(&p, v).unwrap().linear_combination(1.0, &zero, -1.0).unwrap();
        let lhs = lin(&x.linear_combination(alpha, &y, beta).unwrap());
        let rhs = lin(&x).linear_combination(alpha, &lin(&y), beta).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn tensor_is_bilinear(
        lx in layout(), ly in layout(), seed in any::<u64>(), alpha in -2.0f64..2.0, beta in -2.0f64..2.0,
    ) {
        let p = TensorParams::init(FeatureShape::new(lx, 2), FeatureShape::new(ly, 2), 3, 2).unwrap();
        let mut rng = rng_from_seed(seed);
        let x1 = IrrepFeatures::random(lx, 2, 2, &mut rng);
        let x2 = IrrepFeatures::random(lx, 2, 2, &mut rng);
        let y1 = IrrepFeatures::random(ly, 2, 2, &mut rng);
        let y2 = IrrepFeatures::random(ly, 2, 2, &mut rng);
        let t = |a: &IrrepFeatures, b: &IrrepFeatures| tensor_apply(&p, table(), a, b, 3).unwrap();
        let mix = x1.linear_combination(alpha, &x2, beta).unwrap();
        let lhs = t(&mix, &y1);
        let rhs = t(&x1, &y1).linear_combination(alpha, &t(&x2, &y1), beta).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
        let mix = y1.linear_combination(alpha, &y2, beta).unwrap();
        let lhs = t(&x1, &mix);
        let rhs = t(&x1, &y1).linear_combination(alpha, &t(&x1, &y2), beta).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn featurize_parity_under_inversion(r in vec3(), k in 1usize..5) {
        prop_assume!(r.iter().map(|v| v * v).sum::<f64>() > 1e-6);
        let spec = RadialBasisSpec::new(k, RadialKind::ReciprocalBernstein, 8.0).unwrap();
        let a = featurize(r, &spec, 4).unwrap();
        let b = featurize([-r[0], -r[1], -r[2]], &spec, 4).unwrap();
        for l in 0..=4 {
            let p = Parity::of_degree(l);
            let s = p.sign() as f64;
            let ua = a.block(l, p).unwrap();
            let ub = b.block(l, p).unwrap();
            for (x, y) in ua.iter().zip(ub) {
                prop_assert_eq!(*y, s * x);
            }
        }
    }

    #[test]
    fn layout_roundtrip(seed in any::<u64>(), l in 0usize..5, f in 1usize..4) {
        let x = IrrepFeatures::random(Layout::Compact, l, f, &mut rng_from_seed(seed));
        prop_assert_eq!(x.to_general().to_compact().unwrap(), x);
    }

    #[test]
    fn blob_roundtrips(lay in layout(), seed in any::<u64>(), l in 0usize..4, f in 1usize..4) {
        let x = IrrepFeatures::random(lay, l, f, &mut rng_from_seed(seed));
        prop_assert_eq!(IrrepFeatures::from_blob(&x.to_blob()).unwrap(), x);
        let p = dense_init(seed, l, f, f + 1, lay).unwrap();
        prop_assert_eq!(DenseParams::from_blob(&p.to_blob()).unwrap(), p);
        let t = TensorParams::init(FeatureShape::new(lay, l), FeatureShape::new(Layout::Compact, l), l, f).unwrap();
        prop_assert_eq!(TensorParams::from_blob(&t.to_blob()).unwrap(), t);
    }
}

#[test]
fn compact_paths_follow_the_parity_product() {
    for lx in 0..=3 {
        for ly in 0..=3 {
            let s = |l| FeatureShape::new(Layout::Compact, l);
            for p in valid_paths(s(lx), s(ly), lx + ly) {
                assert_eq!(p.alpha, Parity::of_degree(p.a));
                assert_eq!(p.beta, Parity::of_degree(p.b));
                assert_eq!(p.gamma.sign(), p.alpha.sign() * p.beta.sign());
            }
        }
    }
}

#[test]
fn cgc_table_blob_roundtrip() {
    let t = table();
    let back = CgcTable::from_blob(&t.to_blob()).unwrap();
    assert_eq!(&back, t);
    assert_eq!(t.as_slice().len(), num_components(4).pow(3));
}

#[test]
fn haar_mean_vanishes() {
    // E[R_ij] = 0 and Var[R_ij] = 1/3 under the Haar measure
    let n = 100_000;
    let mut rng = rng_from_seed(2024);
    let mut sum = [[0.0f64; 3]; 3];
    for _ in 0..n {
        let g = random_rotation(&mut rng);
        for i in 0..3 {
            for j in 0..3 {
                sum[i][j] += g.rotation()[(i, j)];
            }
        }
    }
    let sigma = (1.0 / 3.0 / n as f64).sqrt();
    for row in sum {
        for s in row {
            assert!((s / n as f64).abs() < 5.0 * sigma, "{s}");
        }
    }
}
