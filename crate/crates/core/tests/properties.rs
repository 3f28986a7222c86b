use lpsq::carleson::{dual_energy, pairing, paraproduct, tb_operator};
use lpsq::conditions::{classify, seminorm_b, seminorm_d, ClassifyParams};
use lpsq::fourier_checks::{
    averaged_energy, decay_profile, default_directions, dyadic_radii, log_energy,
};
use lpsq::grid::{convolve, fourier_transform, inverse_transform, lp_norm};
use lpsq::kernels::{dilate_sample, Sampling};
use lpsq::operators::{square_function, sup_dilation};
use lpsq::weights::{ap_characteristic, bmo_norm};
use lpsq::*;
use proptest::prelude::*;

fn geom(n: usize) -> Geometry {
    Geometry::new(1, 8.0, n).unwrap()
}

fn real(g: Geometry, v: &[f64]) -> SampledFunction {
    SampledFunction::from_real(g, v).unwrap()
}

fn smooth(g: Geometry, c: f64, w: f64, nu: f64) -> SampledFunction {
    SampledFunction::from_real_fn(g, |x| {
        (-(x[0] - c).powi(2) / (2.0 * w * w)).exp() * (nu * x[0]).cos()
    })
    .unwrap()
}

fn catalog() -> Vec<Kernel> {
    vec![
        Kernel::Haar1D,
        Kernel::poisson(1),
        Kernel::poisson(2),
        Kernel::trunc_hom(0.5, SphereFunction::odd_sign(1, 2)).unwrap(),
        Kernel::trunc_hom(0.5, SphereFunction::odd_sign(2, 64)).unwrap(),
    ]
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip(v in values(128)) {
        let f = real(geom(128), &v);
        let back = inverse_transform(&fourier_transform(&f));
        let err: f64 = f.values().iter().zip(back.values()).map(|(a, b)| (a - b).norm_sqr()).sum();
        let norm: f64 = f.values().iter().map(|a| a.norm_sqr()).sum();
        prop_assert!(err.sqrt() <= 1e-12 * norm.sqrt().max(1e-300));
    }

    #[test]
    fn plancherel(v in values(256)) {
        let f = real(geom(256), &v);
        let a = lp_norm(&f, 2.0, None).unwrap();
        let b = fourier_transform(&f).l2_norm();
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn convolution_matches_direct_sum(u in values(64), v in values(64)) {
        let g = geom(64);
        let (a, b) = (real(g, &u), real(g, &v));
        let fast = convolve(&a, &b).unwrap();
        let n = g.n;
        let h = g.step();
        for i in 0..n {
            let direct: f64 = (0..n).map(|j| u[j] * v[(i + n + n / 2 - j) % n]).sum::<f64>() * h;
            prop_assert!((fast.values()[i].re - direct).abs() <= 1e-10);
        }
    }

    #[test]
    fn triangle_inequality(u in values(128), v in values(128), p in 1.0f64..6.0) {
        let g = geom(128);
        let (a, b) = (real(g, &u), real(g, &v));
        let w = Weight::power(0.3);
        let lhs = lp_norm(&a.add(&b).unwrap(), p, Some(&w)).unwrap();
        let rhs = lp_norm(&a, p, Some(&w)).unwrap() + lp_norm(&b, p, Some(&w)).unwrap();
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn majorant_dominates(r in 0.01f64..6.0, th in 0.0f64..std::f64::consts::TAU) {
        for k in catalog() {
            let x = if k.dim() == 1 { [r * th.cos().signum(), 0.0] } else { [r * th.cos(), r * th.sin()] };
            let bound = k.majorant_value(r) * k.sphere_majorant().eval_dir(x);
            prop_assert!(bound >= k.value(x).abs() * (1.0 - 1e-12), "{} at {x:?}", k.name());
        }
    }

    #[test]
    fn dilates_keep_mean_and_scale(e in -4.0f64..2.0) {
        let t = 2f64.powf(e);
        let g = Geometry::new(1, 16.0, 1024).unwrap();
        for k in [Kernel::Haar1D, Kernel::trunc_hom(0.5, SphereFunction::odd_sign(1, 2)).unwrap()] {
            let d = dilate_sample(&k, t, g, Sampling::Averaged).unwrap();
            let mass: f64 = d.samples.values().iter().map(|v| v.re).sum::<f64>() * g.step();
            prop_assert!(mass.abs() <= 1e-12);
        }
        let d = dilate_sample(&Kernel::Haar1D, t, g, Sampling::Averaged).unwrap();
        prop_assert!(d.samples.sup_abs() <= 1.0 / t * (1.0 + 1e-9));
    }

    #[test]
    fn b_is_monotone_in_eps(a in 0.05f64..0.9, gap in 0.01f64..0.09) {
        let k = Kernel::poisson(1);
        let lo = seminorm_b(&k, a).unwrap().value;
        let hi = seminorm_b(&k, a + gap).unwrap().value;
        prop_assert!(hi >= lo);
    }

    #[test]
    fn d_holder_comparison(u in 1.0f64..1.9, extra in 0.0f64..0.09) {
        let v = u + extra;
        for k in [Kernel::poisson(1), Kernel::trunc_hom(0.5, SphereFunction::odd_sign(1, 2)).unwrap()] {
            let du = seminorm_d(&k, u).unwrap().value;
            let dv = seminorm_d(&k, v).unwrap().value;
            prop_assert!(du <= 2f64.powf(1.0 / u - 1.0 / v) * dv * 1.01);
        }
    }

    #[test]
    fn log_energy_is_even(th in 0.0f64..std::f64::consts::PI) {
        let k = Kernel::poisson(2);
        let xi = [th.cos(), th.sin()];
        let (a, _) = log_energy(&k, xi);
        let (b, _) = log_energy(&k, [-xi[0], -xi[1]]);
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn characteristic_at_least_one(a in -0.9f64..0.9, p in 1.2f64..4.0, levels in 1u32..4) {
        prop_assume!(Weight::power_in_ap(a, 1, p));
        let fam = CubeFamily::dyadic_at_origin(1, 1.0, levels).unwrap();
        prop_assert!(ap_characteristic(&Weight::power(a), p, &fam).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn bmo_invariances(v in proptest::collection::vec(-50i32..50, 64), c in -20i32..20, s in 0usize..3) {
        let g = geom(64);
        let b = real(g, &v.iter().map(|x| *x as f64).collect::<Vec<_>>());
        let fam = CubeFamily::dyadic(&g, 1, 4).unwrap();
        let base = bmo_norm(&b, &fam).unwrap();
        let shifted = b.map(|z| z + c as f64);
        prop_assert_eq!(bmo_norm(&shifted, &fam).unwrap(), base);
        let factor = [-2.0, 0.5, 4.0][s];
        prop_assert_eq!(bmo_norm(&b.scale(factor), &fam).unwrap(), factor.abs() * base);
    }

    #[test]
    fn square_function_is_sublinear(c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, nu in 0.0f64..4.0) {
        let g = Geometry::new(1, 16.0, 256).unwrap();
        let tg = TimeGrid::new(-4, 1, 4).unwrap();
        let (f1, f2) = (smooth(g, c1, 0.7, nu), smooth(g, c2, 1.3, 1.0));
        let k = Kernel::Haar1D;
        let s = square_function(&k, &f1.add(&f2).unwrap(), &tg).unwrap().values;
        let a = square_function(&k, &f1, &tg).unwrap().values;
        let b = square_function(&k, &f2, &tg).unwrap().values;
        for ((x, y), z) in s.values().iter().zip(a.values()).zip(b.values()) {
            prop_assert!(x.re <= y.re + z.re + 1e-9);
        }
    }

    #[test]
    fn square_function_commutes_with_shifts(shift in -40i64..40, c in -2.0f64..2.0) {
        let g = Geometry::new(1, 16.0, 256).unwrap();
        let tg = TimeGrid::new(-4, 1, 4).unwrap();
        let f = smooth(g, c, 0.8, 2.0);
        let k = Kernel::poisson(1);
        let a = square_function(&k, &f.translate([shift, 0]), &tg).unwrap().values;
        let b = square_function(&k, &f, &tg).unwrap().values.translate([shift, 0]);
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).norm() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn tb_is_dominated(c in -2.0f64..2.0, nu in 0.0f64..3.0) {
        let g = Geometry::new(1, 16.0, 256).unwrap();
        let tg = TimeGrid::new(-3, 1, 4).unwrap();
        let (psi, phi) = (Kernel::Haar1D, Kernel::PoissonKernel { dim: 1 });
        let b = smooth(g, 0.3, 2.0, 1.5);
        let f = smooth(g, c, 0.9, nu);
        let t = tb_operator(&psi, &phi, &b, &f, &tg).unwrap();
        let sup = sup_dilation(&psi, &b, &tg).unwrap();
        let s = square_function(&phi, &f, &tg).unwrap().values;
        for ((x, m), y) in t.values().iter().zip(sup.values()).zip(s.values()) {
            prop_assert!(x.re <= m.re * y.re + 1e-9);
        }
    }

    #[test]
    fn paraproduct_cauchy_schwarz(cf in -2.0f64..2.0, cg in -2.0f64..2.0, weighted in any::<bool>()) {
        let g = Geometry::new(1, 16.0, 256).unwrap();
        let tg = TimeGrid::new(-3, 1, 4).unwrap();
        let (u, v) = (tg.t_min(), tg.largest_node());
        let (eta, psi, phi) = (Kernel::poisson(1), Kernel::Haar1D, Kernel::PoissonKernel { dim: 1 });
        let w = weighted.then(|| Weight::power(0.5));
        let b = smooth(g, 0.0, 2.0, 1.0);
        let f = smooth(g, cf, 0.8, 1.7);
        let h = smooth(g, cg, 1.1, 0.4);
        let pi = paraproduct(&eta, &psi, &phi, &b, &f, &tg, u, v).unwrap();
        let lhs = pairing(&pi, &h).unwrap().norm();
        let tb = tb_operator(&psi, &phi, &b, &f, &tg).unwrap();
        let rhs = dual_energy(&eta, &h, w.as_ref(), &tg, u, v).unwrap() * lp_norm(&tb, 2.0, w.as_ref()).unwrap();
        prop_assert!(lhs <= rhs + 1e-8, "{lhs} > {rhs}");
    }
}

#[test]
fn catalog_kernels_have_mean_zero() {
    for k in catalog() {
        assert!(k.integral().abs() <= 1e-8, "{}", k.name());
        assert!(k.fourier([0.0, 0.0]).norm() <= 1e-8, "{}", k.name());
    }
}

#[test]
fn radial_profile_is_direction_free() {
    let k = Kernel::poisson(2);
    let p = decay_profile(&k, &default_directions(2, 8), &dyadic_radii(-4, 4, 2), 64).unwrap();
    for i in 0..p.radii.len() {
        let col: Vec<f64> = p.values.iter().map(|row| row[i]).collect();
        let hi = col.iter().cloned().fold(f64::MIN, f64::max);
        let lo = col.iter().cloned().fold(f64::MAX, f64::min);
        assert!(hi - lo <= 1e-8, "radius {}: {lo} .. {hi}", p.radii[i]);
    }
}

#[test]
fn energy_vanishes_at_small_frequencies() {
    for k in catalog() {
        let dir = if k.dim() == 1 { [1.0, 0.0] } else { [0.6, 0.8] };
        let e: Vec<f64> = [1e-4, 1e-3, 1e-2]
            .iter()
            .map(|r| averaged_energy(&k, [r * dir[0], r * dir[1]], 64))
            .collect();
        assert!(e[0] < e[1] && e[1] < e[2], "{}: {e:?}", k.name());
    }
}

#[test]
fn characteristic_decreases_in_p() {
    let fam = CubeFamily::dyadic_at_origin(1, 1.0, 3).unwrap();
    for a in [0.25, 0.5, 0.75] {
        let vals: Vec<f64> = [1.5, 2.0, 3.0]
            .iter()
            .map(|&p| ap_characteristic(&Weight::power(a), p, &fam).unwrap_or(f64::INFINITY))
            .collect();
        assert!(
            vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)),
            "a = {a}: {vals:?}"
        );
    }
}

#[test]
fn classification_is_deterministic() {
    let k = Kernel::trunc_hom(0.5, SphereFunction::odd_sign(1, 2)).unwrap();
    let p = ClassifyParams::default();
    assert_eq!(classify(&k, &p), classify(&k, &p));
}

#[test]
fn square_function_dilation_covariance() {
    // S(f(2 .)) over t in [a, b] on [-R/2, R/2) equals S f over [2a, 2b] on [-R, R) at 2x.
    let (g1, g2) = (
        Geometry::new(1, 8.0, 1024).unwrap(),
        Geometry::new(1, 16.0, 1024).unwrap(),
    );
    let f = |x: f64| (-x * x / 2.0).exp() * (1.3 * x).sin();
    let f2 = SampledFunction::from_real_fn(g1, |x| f(2.0 * x[0])).unwrap();
    let f1 = SampledFunction::from_real_fn(g2, |x| f(x[0])).unwrap();
    for k in [Kernel::poisson(1), Kernel::Haar1D] {
        let a = square_function(&k, &f2, &TimeGrid::new(-6, 0, 8).unwrap())
            .unwrap()
            .values;
        let b = square_function(&k, &f1, &TimeGrid::new(-5, 1, 8).unwrap())
            .unwrap()
            .values;
        let scale = b.sup_abs();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!(
                (x.re - y.re).abs() <= 1e-9 * scale,
                "{}: {x} vs {y}",
                k.name()
            );
        }
    }
}
