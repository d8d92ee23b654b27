//! Goodness-of-fit of the event and wavelength samplers against independent
//! quadrature of the outcome densities.

use std::f64::consts::{PI, TAU};

use relloc::rng::seeded;
use relloc::spectra::{BlackbodyWeighting, SpectralSource, SECOND_RADIATION, WIEN};
use relloc::wave1d::{RelativeWavefunction1D, ScatterOutcome1D, Scatterer1D};
use relloc::wave3d::{RelativeWavefunction3D, ScatterOutcome3D, Scatterer3D};

fn j0(z: f64) -> f64 {
    let q = -(z * z) / 4.0;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..120 {
        term *= q / (k as f64 * k as f64);
        sum += term;
    }
    sum
}

fn chi_square(observed: &[u64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum()
}

#[test]
fn one_dimensional_events_follow_the_outcome_densities() {
    let lambda = 0.7;
    let state =
        RelativeWavefunction1D::from_fn(1.0, 256, |x: f64| 1.0 + 0.8 * (3.0 * x).sin() + x * x).unwrap();
    let xs = state.positions().to_vec();
    let rho: Vec<f64> = state.position_density();
    let dx = state.spacing();
    let k = TAU / lambda;

    let bins = 32;
    let width = TAU / bins as f64;
    let p_s = |theta: f64| -> f64 {
        xs.iter()
            .zip(&rho)
            .map(|(&x, &r)| r * (k * x * theta.sin()).cos().powi(2))
            .sum::<f64>()
            * dx
            / TAU
    };
    let mut expected: Vec<f64> = (0..bins)
        .map(|b| {
            // Simpson over the bin.
            let m = 64;
            let h = width / m as f64;
            let a = b as f64 * width;
            (0..=m)
                .map(|i| {
                    let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                    w * p_s(a + i as f64 * h)
                })
                .sum::<f64>()
                * h
                / 3.0
        })
        .collect();
    let p_ns: f64 = xs
        .iter()
        .zip(&rho)
        .map(|(&x, &r)| r * 0.5 * (1.0 - j0(2.0 * k * x)))
        .sum::<f64>()
        * dx;
    assert!((expected.iter().sum::<f64>() + p_ns - 1.0).abs() < 1e-9);
    expected.push(p_ns);

    let draws = 200_000;
    let mut counts = vec![0u64; bins + 1];
    let scatterer = Scatterer1D::default();
    let mut rng = seeded(2718);
    for _ in 0..draws {
        match scatterer.sample_event(&state, lambda, &mut rng) {
            ScatterOutcome1D::NonScattered { .. } => counts[bins] += 1,
            ScatterOutcome1D::Scattered { theta, .. } => {
                assert!((0.0..TAU).contains(&theta));
                counts[((theta / width) as usize).min(bins - 1)] += 1;
            }
        }
    }
    let expected: Vec<f64> = expected.iter().map(|p| p * draws as f64).collect();
    let chi2 = chi_square(&counts, &expected);
    // 32 degrees of freedom; the 0.1% critical value is 62.5.
    assert!(chi2 < 62.5, "chi² = {chi2}");
}

#[test]
fn three_dimensional_events_follow_the_outcome_densities() {
    let lambda = 1.0;
    let state = RelativeWavefunction3D::from_fn(0.8, 10, |x: f64, y: f64, z: f64| {
        (-(x - 0.3).powi(2) * 4.0 - y * y * 2.0 - (z + 0.2).powi(2) * 3.0).exp() + 0.2
    })
    .unwrap();
    let rho = state.position_density();
    let dv = state.cell_volume();
    let points: Vec<[f64; 3]> = (0..rho.len()).map(|q| state.point(q)).collect();
    let k = TAU / lambda;

    let p_s = |theta: f64, phi: f64| -> f64 {
        let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos() - 1.0];
        points
            .iter()
            .zip(&rho)
            .map(|(r, &w)| w * (k * (r[0] * n[0] + r[1] * n[1] + r[2] * n[2])).cos().powi(2))
            .sum::<f64>()
            * dv
            / (4.0 * PI)
    };
    let (nt, np) = (8, 8);
    let (wt, wp) = (PI / nt as f64, TAU / np as f64);
    let sub = 8;
    let mut expected = Vec::with_capacity(nt * np + 1);
    for i in 0..nt {
        for l in 0..np {
            let mut acc = 0.0;
            for a in 0..sub {
                let theta = (i as f64 + (a as f64 + 0.5) / sub as f64) * wt;
                for b in 0..sub {
                    let phi = (l as f64 + (b as f64 + 0.5) / sub as f64) * wp;
                    acc += p_s(theta, phi) * theta.sin();
                }
            }
            expected.push(acc * wt * wp / (sub * sub) as f64);
        }
    }
    let p_ns: f64 = points
        .iter()
        .zip(&rho)
        .map(|(r, &w)| {
            let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
            let sinc = if len == 0.0 { 1.0 } else { (2.0 * k * len).sin() / (2.0 * k * len) };
            w * 0.5 * (1.0 - (2.0 * k * r[2]).cos() * sinc)
        })
        .sum::<f64>()
        * dv;
    assert!((expected.iter().sum::<f64>() + p_ns - 1.0).abs() < 2e-3);
    expected.push(p_ns);

    let draws = 40_000;
    let mut counts = vec![0u64; nt * np + 1];
    let scatterer = Scatterer3D::new(64, 128).unwrap();
    let mut rng = seeded(31415);
    for _ in 0..draws {
        match scatterer.sample_event(&state, lambda, &mut rng) {
            ScatterOutcome3D::NonScattered { .. } => counts[nt * np] += 1,
            ScatterOutcome3D::Scattered { theta, phi, .. } => {
                assert!((0.0..=PI).contains(&theta) && (0.0..TAU).contains(&phi));
                let i = ((theta / wt) as usize).min(nt - 1);
                let l = ((phi / wp) as usize).min(np - 1);
                counts[i * np + l] += 1;
            }
        }
    }
    let total: f64 = expected.iter().sum();
    let expected: Vec<f64> = expected.iter().map(|p| p / total * draws as f64).collect();
    let chi2 = chi_square(&counts, &expected);
    // 64 degrees of freedom; the 0.1% critical value is 106.
    assert!(chi2 < 106.0, "chi² = {chi2}");
}

fn histogram_mode(samples: &[f64], lo: f64, hi: f64, bins: usize) -> (f64, f64) {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &s in samples {
        counts[(((s - lo) / width) as usize).min(bins - 1)] += 1;
    }
    let best = (0..bins).max_by_key(|&b| counts[b]).unwrap();
    (lo + (best as f64 + 0.5) * width, width)
}

#[test]
fn blackbody_mode_sits_at_the_wien_peak() {
    let temperature = 5000.0;
    let reference = 1e-6;
    for (weighting, peak_s) in [
        (BlackbodyWeighting::Energy, SECOND_RADIATION / WIEN),
        // Photon-number density peaks where s = 4(1 − e^{−s}).
        (BlackbodyWeighting::PhotonNumber, 3.920_690_395_251_9),
    ] {
        let source = SpectralSource::blackbody(temperature, 0.999, reference, weighting).unwrap();
        let SpectralSource::Blackbody(bb) = &source else { unreachable!() };
        let (lo, hi) = (bb.lambda_min() / reference, bb.lambda_max() / reference);
        let mut rng = seeded(99);
        let samples: Vec<f64> = (0..1_000_000).map(|_| source.draw_wavelength(&mut rng)).collect();
        assert!(samples.iter().all(|&s| s >= lo && s <= hi));
        let (mode, width) = histogram_mode(&samples, lo, hi, 100);
        let peak = SECOND_RADIATION / (peak_s * temperature) / reference;
        assert!((mode - peak).abs() <= 2.0 * width, "{weighting:?}: mode {mode}, peak {peak}");
    }
}
