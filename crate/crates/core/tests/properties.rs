use num_complex::Complex64;
use proptest::prelude::*;
use rand_acim::cocycle::{CocycleSpec, FiberOperator, Scheme};
use rand_acim::driving::{Base, RotationBase};
use rand_acim::fourier::{self, FourierDensity};
use rand_acim::maps::{self, Interval, MapFamily, PiecewiseMap};
use rand_acim::sobolev::{self, LasotaYorkeSample};
use rand_acim::ulam::{self, BinnedDensity};

fn total_len(iv: &[Interval]) -> f64 {
    iv.iter().map(|i| i.len()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn preimage_is_additive(omega in 0.0..1.0f64, a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
        let t = PiecewiseMap::example_family(omega);
        let mut v = [a, b, c];
        v.sort_by(f64::total_cmp);
        let whole = total_len(&t.preimage(Interval::new(v[0], v[2])).unwrap());
        let left = total_len(&t.preimage(Interval::new(v[0], v[1])).unwrap());
        let right = total_len(&t.preimage(Interval::new(v[1], v[2])).unwrap());
        prop_assert!((whole - left - right).abs() < 1e-12);
    }

    #[test]
    fn full_circle_preimage_has_unit_length(omega in 0.0..1.0f64) {
        let t = PiecewiseMap::example_family(omega);
        let len = total_len(&t.preimage(Interval::new(0.0, 1.0)).unwrap());
        prop_assert!((len - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ulam_push_conserves_mass(omega in 0.0..1.0f64, raw in prop::collection::vec(0.0..1.0f64, 64)) {
        let t = PiecewiseMap::example_family(omega);
        let m = ulam::assemble_exact(&t, 64).unwrap();
        let s: f64 = raw.iter().sum::<f64>() / 64.0;
        prop_assume!(s > 1e-6);
        let v = BinnedDensity::new(raw.iter().map(|x| x / s).collect()).unwrap();
        let out = ulam::push(&v, &m).unwrap();
        prop_assert!((out.integral() - 1.0).abs() < 1e-12);
        prop_assert!(out.values().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn bin_averaging_contracts_l1(samples in prop::collection::vec(-5.0..5.0f64, 256), shift in 0usize..3) {
        let k = [16usize, 32, 64][shift];
        let avg = ulam::conditional_expectation(&samples, k).unwrap();
        let l1_in = ulam::l1_norm(&samples);
        let l1_out = ulam::l1_norm(&avg);
        prop_assert!(l1_out <= l1_in + 1e-12);
        prop_assert!((ulam::integral(&avg) - ulam::integral(&samples)).abs() < 1e-12);
    }

    #[test]
    fn d_ly_is_symmetric(w1 in 0.0..1.0f64, w2 in 0.0..1.0f64, rho in -0.01..0.01f64) {
        let s = PiecewiseMap::example_family(w1);
        let t = PiecewiseMap::example_family(w2).translated(rho);
        let ab = maps::d_ly(&s, &t, 200);
        let ba = maps::d_ly(&t, &s, 200);
        prop_assert_eq!(ab, ba);
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(maps::d_ly(&s, &s, 200), 0.0);
    }
}

#[test]
fn testpoint_assembly_matches_exact_at_k250() {
    for omega in [0.0, 0.21, 0.5, 0.77] {
        let t = PiecewiseMap::example_family(omega);
        let a = ulam::assemble_testpoints(&t, 250, 1000).unwrap();
        let b = ulam::assemble_exact(&t, 250).unwrap();
        let da = a.to_dense();
        let db = b.to_dense();
        let max = da.iter().zip(&db).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(max <= 5e-3, "omega {omega}: max entry difference {max:e}");
    }
}

#[test]
fn galerkin_cocycle_property() {
    let spec = CocycleSpec::new(
        MapFamily::Example,
        Base::Rotation(RotationBase::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)),
        Scheme::GalerkinPlain { modes: 12, tol: 1e-9 },
        3,
        0.0,
    )
    .unwrap();
    let ops = spec.assemble_all(3).unwrap();
    let composed = ops[0].then(&ops[1]).unwrap().then(&ops[2]).unwrap();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 25];
    coeffs[12] = Complex64::new(1.0, 0.0);
    coeffs[13] = Complex64::new(0.3, -0.1);
    coeffs[11] = Complex64::new(0.3, 0.1);
    coeffs[15] = Complex64::new(-0.05, 0.2);
    coeffs[9] = Complex64::new(-0.05, -0.2);
    let f = rand_acim::cocycle::Density::Fourier(FourierDensity::from_coeffs(coeffs, true).unwrap());
    let mut stepwise = f.clone();
    for op in &ops {
        stepwise = op.apply_density(&stepwise).unwrap();
    }
    let direct = composed.apply_density(&f).unwrap();
    let (rand_acim::cocycle::Density::Fourier(a), rand_acim::cocycle::Density::Fourier(b)) = (&stepwise, &direct) else {
        panic!("expected Fourier densities");
    };
    let err = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(err <= 1e-9, "cocycle defect {err:e}");
    assert!(matches!(composed, FiberOperator::Galerkin(_)));
}

#[test]
fn galerkin_preserves_zero_mode() {
    let t = PiecewiseMap::example_family(0.4);
    let a = fourier::galerkin_matrix(&t, 16, 1e-9).unwrap();
    for mp in -16..=16i64 {
        let z = a.get(0, mp);
        let want = if mp == 0 { 1.0 } else { 0.0 };
        assert!((z - Complex64::new(want, 0.0)).norm() < 1e-9, "A[0][{mp}] = {z}");
    }
}

#[test]
fn bin_averaging_bound_for_sine() {
    let n = 4096;
    let g = sobolev::GridFunction::from_fn(n, sobolev::Extension::Circle, |x| {
        (2.0 * std::f64::consts::PI * x).sin()
    })
    .unwrap();
    let params = sobolev::SobolevParams::default();
    let base = sobolev::hpt_norm(&g, &params);
    for k in [8usize, 16, 32, 64, 128, 256, 512] {
        let avg = ulam::expand_bins(&ulam::conditional_expectation(g.samples(), k).unwrap(), n).unwrap();
        let ratio = sobolev::hpt_norm(&g.with_samples(avg), &params) / base;
        assert!(ratio <= 3.0, "k = {k}: ratio {ratio}");
    }
}

#[test]
fn bv_lasota_yorke_contraction_on_step_functions() {
    use rand::{Rng, SeedableRng};
    let t = PiecewiseMap::example_family(0.3);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut samples: Vec<LasotaYorkeSample> = Vec::new();
    for _ in 0..24 {
        let jumps: usize = rng.gen_range(1..8);
        let mut cuts: Vec<f64> = (0..jumps).map(|_| rng.gen::<f64>()).collect();
        cuts.sort_by(f64::total_cmp);
        let levels: Vec<f64> = (0..=jumps).map(|_| rng.gen_range(0.1..3.0)).collect();
        let f = move |x: f64| levels[cuts.partition_point(|&c| c <= x)];
        samples.push(sobolev::lasota_yorke_sample(&t, f, 4096).unwrap());
    }
    let fit = sobolev::fit_lasota_yorke(&samples).unwrap();
    assert!(fit.alpha < 1.0, "alpha = {}", fit.alpha);
    assert!(samples.iter().all(|s| fit.holds(s)));
}
