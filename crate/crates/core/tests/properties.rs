use proptest::prelude::*;

use relloc::discriminator::{bayes_update, convolve_resolution, HypothesisDensities};
use relloc::momentum::{momentum_density, MomentumDensity, MomentumGrid};
use relloc::rng::seeded;
use relloc::wave1d::{nonscatter_amplitude, RelativeWavefunction1D, ScatterOutcome1D, Scatterer1D};
use relloc::wave3d::{RelativeWavefunction3D, ScatterOutcome3D, Scatterer3D};
use relloc::Error;

fn state_1d(coeffs: &[f64], n: usize) -> RelativeWavefunction1D<f64> {
    RelativeWavefunction1D::from_fn(1.0, n, |x: f64| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * ((k as f64 + 1.0) * x + k as f64).cos())
            .sum::<f64>()
            + 0.05
    })
    .unwrap()
}

fn density(values: Vec<f64>) -> MomentumDensity<f64> {
    let grid = MomentumGrid::new(2.0, values.len()).unwrap();
    MomentumDensity::new(grid, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nonscatter_amplitude_is_even_and_bounded(x in -3.0f64..3.0, lambda in 0.2f64..3.0) {
        let a = nonscatter_amplitude(x, lambda);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(a, nonscatter_amplitude(-x, lambda));
    }

    #[test]
    fn updates_stay_normalised(
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..5),
        theta in 0.0f64..std::f64::consts::TAU,
        lambda in 0.3f64..2.0,
        scattered in any::<bool>(),
    ) {
        let mut state = state_1d(&coeffs, 256);
        let event = if scattered {
            ScatterOutcome1D::Scattered { theta, wavelength: lambda }
        } else {
            ScatterOutcome1D::NonScattered { wavelength: lambda }
        };
        match Scatterer1D::default().apply_event(&mut state, &event) {
            Ok(()) => prop_assert!((state.norm_sq() - 1.0).abs() < 1e-10),
            Err(e) => {
                let collapsed = matches!(e, Error::DegenerateCollapse { .. });
                prop_assert!(collapsed);
            }
        }
    }

    #[test]
    fn even_states_stay_exactly_even(seed in any::<u64>(), photons in 1usize..40) {
        let mut state = RelativeWavefunction1D::<f64>::flat(1.0, 300).unwrap();
        let source = relloc::spectra::SpectralSource::monochromatic(1.0).unwrap();
        Scatterer1D::default()
            .run_localisation(&mut state, photons, &source, &mut seeded(seed))
            .unwrap();
        let c = state.amplitudes();
        for j in 0..c.len() / 2 {
            prop_assert_eq!(c[j], c[c.len() - 1 - j]);
        }
    }

    #[test]
    fn momentum_density_is_even_and_normalised(coeffs in prop::collection::vec(-1.0f64..1.0, 1..5)) {
        let state = state_1d(&coeffs, 200);
        let grid = MomentumGrid::new(6.0, 241).unwrap();
        let q = momentum_density(&state, &grid).unwrap();
        let v = q.values();
        prop_assert!((v.iter().sum::<f64>() * grid.step() - 1.0).abs() < 1e-12);
        for k in 0..v.len() {
            prop_assert_eq!(v[k], v[v.len() - 1 - k]);
        }
    }

    #[test]
    fn blur_keeps_a_density(values in prop::collection::vec(0.0f64..1.0, 41), dp in 0.0f64..1.5) {
        prop_assume!(values.iter().sum::<f64>() > 1e-3);
        let q = density(values);
        let b = convolve_resolution(&q, dp).unwrap();
        prop_assert!(b.values().iter().all(|&v| v >= 0.0));
        prop_assert!((b.values().iter().sum::<f64>() * b.grid().step() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn posterior_is_a_probability(
        prior in 0.0f64..=1.0,
        a in prop::collection::vec(0.01f64..1.0, 9),
        b in prop::collection::vec(0.01f64..1.0, 9),
        p in -2.0f64..2.0,
    ) {
        let h = HypothesisDensities::new(density(a), density(b)).unwrap();
        let post = bayes_update(prior, p, &h).unwrap();
        prop_assert!((0.0..=1.0).contains(&post));
        // The update moves the prior towards the hypothesis with the larger likelihood.
        let (q1, q2) = (h.q1().at(p).unwrap(), h.q2().at(p).unwrap());
        if q1 > q2 { prop_assert!(post >= prior - 1e-15) }
        if q1 < q2 { prop_assert!(post <= prior + 1e-15) }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn three_dimensional_updates_keep_inversion_symmetry(
        theta in 0.0f64..std::f64::consts::PI,
        phi in 0.0f64..std::f64::consts::TAU,
        lambda in 0.5f64..2.0,
        scattered in any::<bool>(),
    ) {
        let mut state = RelativeWavefunction3D::from_fn(1.0, 10, |x: f64, y: f64, z: f64| {
            1.0 + (x * y * z).cos() + (x * x + 2.0 * y * y).exp()
        })
        .unwrap();
        let event = if scattered {
            ScatterOutcome3D::Scattered { theta, phi, wavelength: lambda }
        } else {
            ScatterOutcome3D::NonScattered { wavelength: lambda }
        };
        let mut scatterer = Scatterer3D::new(16, 32).unwrap();
        match scatterer.apply_event(&mut state, &event) {
            Ok(()) => {
                prop_assert_eq!(state.inversion_asymmetry(), 0.0);
                prop_assert!((state.norm_sq() - 1.0).abs() < 1e-10);
            }
            Err(e) => {
                let collapsed = matches!(e, Error::DegenerateCollapse { .. });
                prop_assert!(collapsed);
            }
        }
    }
}
