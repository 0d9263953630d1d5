use biphoton::correlation::{delay_range, fwhm_of, g1_envelope, g2};
use biphoton::crystal::{group_params, solve_collinear_pm_angle, CrystalConfig, PhaseMatchingType};
use biphoton::interferometry::{
    add_accidentals, hom_closed, hom_general, michelson, subtract_accidentals, visibility, Sign,
};
use biphoton::montecarlo::{extract_coincidences, simulate_mca, CountingConfig};
use biphoton::spectral::{build_type1, build_type2, DetuningGrid, FilterSpec, SpectralAmplitude};
use biphoton::tuning::conjugate_wavelength;
use num_complex::Complex64;
use proptest::prelude::*;

fn type1() -> SpectralAmplitude {
    let cfg = CrystalConfig::bbo(2000.0, 0.0).unwrap();
    let th = solve_collinear_pm_angle(351.1, 702.2, PhaseMatchingType::TypeI, &cfg).unwrap();
    let gp = group_params(&cfg, 702.2, th).unwrap();
    let grid = DetuningGrid::for_type1(gp.dpp_fs2_per_um * 2000.0, 32.0, 4097).unwrap();
    build_type1(gp.dpp_fs2_per_um, 2000.0, &grid, 702.2).unwrap()
}

fn type2() -> SpectralAmplitude {
    let grid = DetuningGrid::for_type2(495.0, 64.0, 4097).unwrap();
    build_type2(0.2475, 2000.0, &grid, 702.2).unwrap()
}

/// Gaussian spectrum.
fn gaussian(sigma: f64) -> SpectralAmplitude {
    let grid = DetuningGrid::new(10.0 * sigma, 2049).unwrap();
    let values = grid.nu().iter().map(|&v| Complex64::new((-(v * v) / (2.0 * sigma * sigma)).exp(), 0.0)).collect();
    SpectralAmplitude::custom(grid, values, 2.68, "gaussian").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quadratic_phase_leaves_g1_and_dip(beta in -8000.0..8000.0f64) {
        let t = type2();
        let tau = delay_range(-300.0, 300.0, 7.0);
        let g0 = g1_envelope(&t, &tau).unwrap();
        let d0 = hom_closed(&t, &tau, Sign::Minus).unwrap();
        let tb = t.apply_quadratic_phase(beta);
        let g = g1_envelope(&tb, &tau).unwrap();
        let d = hom_closed(&tb, &tau, Sign::Minus).unwrap();
        for k in 0..tau.len() {
            prop_assert!((g.values[k] - g0.values[k]).abs() < 1e-12);
            prop_assert!((d.rate[k] - d0.rate[k]).abs() < 1e-10);
        }
        for (a, b) in t.values.iter().zip(&tb.values) {
            prop_assert!((a.norm() - b.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn g2_symmetric_for_even_amplitudes(beta in 0.0..3000.0f64) {
        let t = type1().apply_quadratic_phase(beta);
        let tau = delay_range(-400.0, 400.0, 5.0);
        let g = g2(&t, &tau).unwrap();
        let n = tau.len();
        for k in 0..n {
            prop_assert!((g.values[k] - g.values[n - 1 - k]).abs() < 1e-9);
            prop_assert!(g.values[k] >= 0.0);
        }
    }

    #[test]
    fn michelson_envelope_is_twice_the_dip(sigma in 0.02..0.2f64) {
        let t = gaussian(sigma);
        let step = 0.05;
        let reach = 8.0 / sigma;
        let m = michelson(&t, &delay_range(-reach, reach, step)).unwrap();
        let mw = fwhm_of(&m.tau, m.envelope.as_ref().unwrap()).unwrap().fwhm_fs;
        let d = hom_closed(&t, &delay_range(-reach / 2.0, reach / 2.0, step), Sign::Minus).unwrap();
        let env: Vec<f64> = d.rate.iter().map(|r| 1.0 - 2.0 * r).collect();
        let dw = fwhm_of(&d.tau, &env).unwrap().fwhm_fs;
        prop_assert!((mw - 2.0 * dw).abs() <= step, "{} vs {}", mw, dw);
    }

    #[test]
    fn general_analyzers_reduce_to_closed_form(a in 0.0..1.0f64, sigma in 0.03..0.1f64, shift in 0.0..0.1f64, beta in -3000.0..3000.0f64, delay in -200.0..200.0f64) {
        // even magnitude, even phase and a linear phase (pure delay)
        let grid = DetuningGrid::new(10.0 * (sigma + shift), 2049).unwrap();
        let bump = |v: f64| (-(v * v) / (2.0 * sigma * sigma)).exp();
        let values = grid
            .nu()
            .iter()
            .map(|&v| (bump(v) + a * (bump(v - shift) + bump(v + shift))) * Complex64::cis(beta * v * v + delay * v))
            .collect();
        let t = SpectralAmplitude::custom(grid, values, 2.68, "even").unwrap();
        let tau = delay_range(-100.0, 100.0, 2.5);
        for (sign, th2) in [(Sign::Minus, 45.0), (Sign::Plus, -45.0)] {
            let c = hom_closed(&t, &tau, sign).unwrap();
            let g = hom_general(&t, &tau, 45.0, th2).unwrap();
            for k in 0..tau.len() {
                prop_assert!((c.rate[k] - g.rate[k]).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn far_wings_reach_half(beta in 0.0..2000.0f64) {
        let t = type2().apply_quadratic_phase(beta);
        let tau = delay_range(-1200.0, 1200.0, 20.0);
        let dip = hom_closed(&t, &tau, Sign::Minus).unwrap();
        prop_assert!((dip.far_wing_baseline() - 0.5).abs() < 2e-3);
        let tau_m: Vec<f64> = (0..50).map(|k| 800.0 + 0.2 * k as f64).collect();
        let m = michelson(&t, &tau_m).unwrap();
        let mean = m.rate.iter().sum::<f64>() / m.rate.len() as f64;
        prop_assert!((mean - 0.5).abs() < 1e-2);
    }

    #[test]
    fn conjugate_is_an_involution(ls in 400.0..2000.0f64, lp in 200.0..390.0f64) {
        let li = conjugate_wavelength(ls, lp).unwrap();
        let back = conjugate_wavelength(li, lp).unwrap();
        prop_assert!((back - ls).abs() < 1e-9 * ls);
        prop_assert!((1.0 / ls + 1.0 / li - 1.0 / lp).abs() < 1e-15);
    }

    #[test]
    fn accidentals_round_trip(level in 0.0..0.4f64) {
        let t = gaussian(0.05);
        let tau = delay_range(-100.0, 100.0, 2.0);
        let d = hom_closed(&t, &tau, Sign::Minus).unwrap();
        let noisy = add_accidentals(&d, level).unwrap();
        let back = subtract_accidentals(&noisy, level).unwrap();
        for k in 0..tau.len() {
            prop_assert!((back.rate[k] - d.rate[k]).abs() < 1e-9);
        }
        let p = hom_closed(&t, &tau, Sign::Plus).unwrap();
        let v = visibility(&add_accidentals(&d, level).unwrap(), &add_accidentals(&p, level).unwrap()).unwrap();
        let v0 = visibility(&d, &p).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!(v <= v0 + 1e-12);
    }

    #[test]
    fn visibility_bounded_for_filtered_spectra(nm in 1.0..100.0f64) {
        let t = type1();
        let filt = FilterSpec::gaussian(702.2, nm);
        let tf = t.apply_filters(&filt, &filt).unwrap();
        let tau = [-2000.0, 0.0, 2000.0];
        let v = visibility(&hom_closed(&tf, &tau, Sign::Minus).unwrap(), &hom_closed(&tf, &tau, Sign::Plus).unwrap()).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
        prop_assert!((v - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn monte_carlo_is_deterministic(seed in any::<u64>(), shards in 1usize..9) {
        let cfg = CountingConfig { pair_rate: 5e4, singles_excess_rate: [2e4, 3e4], duration_s: 0.02, rng_seed: seed, shards, ..Default::default() };
        let a = simulate_mca(&cfg, 0.4).unwrap();
        let b = simulate_mca(&cfg, 0.4).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn accidentals_follow_poisson_statistics() {
    for seed in 0..8u64 {
        let cfg = CountingConfig {
            pair_rate: 1e6,
            singles_excess_rate: [2e6, 2e6],
            duration_s: 0.05,
            rng_seed: seed,
            ..Default::default()
        };
        let r = 0.5;
        let h = simulate_mca(&cfg, r).unwrap();
        let c = extract_coincidences(&h, cfg.window_width_ns, cfg.accidental_offset_ns).unwrap();
        let expected = cfg.expected_accidentals(r);
        let sigma = expected.sqrt();
        assert!(
            (c.accidental_counts as f64 - expected).abs() < 3.0 * sigma,
            "seed {seed}: {} vs {expected} ± {sigma}",
            c.accidental_counts
        );
    }
}
