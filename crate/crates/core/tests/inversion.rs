use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use qdsm_core::inversion::{
    continuous_indicator_oracle, indicator_far_with, indicator_near_with, Evaluation, OracleOptions,
};
use qdsm_core::phantoms::gaussian_fourier;
use qdsm_core::specialfun::gamma_n;
use qdsm_core::{
    fibonacci_sphere_directions, indicator_far, indicator_near, make_wavenumbers, uniform_circle_directions, Dim,
    DirectionSet, MeasurementGeometry, MeasurementSet, Point, SamplingGrid, WavenumberSet,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn single_point(dim: Dim, z: &Point) -> SamplingGrid {
    let n = dim.value();
    SamplingGrid::new(dim, z[..n].to_vec(), z[..n].iter().map(|v| v + 1.0).collect(), vec![2; n]).unwrap()
}

/// One direction, two wavenumbers 1 and 2, data 1 at k = 1 only.
fn one_term(dim: Dim, geometry: MeasurementGeometry) -> MeasurementSet {
    let theta = if dim == Dim::Two { [1.0, 0.0, 0.0] } else { [0.0, 0.0, 1.0] };
    let dirs = DirectionSet::from_vectors(dim, vec![theta]).unwrap();
    MeasurementSet::new(geometry, dirs, make_wavenumbers(1.0, 2.0, 2).unwrap(), vec![Complex64::new(1.0, 0.0), ZERO])
        .unwrap()
}

#[test]
fn zero_data_gives_zero_indicator() {
    let ks = make_wavenumbers(1.0, 21.0, 11).unwrap();
    let cases = [
        (uniform_circle_directions(16).unwrap(), SamplingGrid::cube(Dim::Two, -0.5, 0.5, 9).unwrap()),
        (fibonacci_sphere_directions(32).unwrap(), SamplingGrid::cube(Dim::Three, -0.5, 0.5, 5).unwrap()),
    ];
    for (dirs, grid) in cases {
        for geometry in [MeasurementGeometry::FarField, MeasurementGeometry::NearField { radius: 4.0 }] {
            let m = MeasurementSet::from_closure(geometry, dirs.clone(), ks.clone(), |_, _| ZERO).unwrap();
            let f = qdsm_core::inversion::indicator(&m, &grid).unwrap();
            assert!(f.values().iter().all(|v| *v == ZERO));
        }
    }
}

#[test]
fn single_term_coefficients() {
    let origin = [0.0; 3];
    let dk = 1.0;

    let far2 = indicator_far(&one_term(Dim::Two, MeasurementGeometry::FarField), &single_point(Dim::Two, &origin)).unwrap();
    let want = Complex64::new(2.0, -2.0) * (2.0 * PI) * dk / PI.powf(1.5);
    assert!((far2.values()[0] - want).norm() < 1e-15 * want.norm());

    let far3 = indicator_far(&one_term(Dim::Three, MeasurementGeometry::FarField), &single_point(Dim::Three, &origin)).unwrap();
    let want = 4.0 * (4.0 * PI) * dk / (PI * PI);
    assert!((far3.values()[0] - want).norm() < 1e-15 * want);

    let r = 3.0;
    let near = MeasurementGeometry::NearField { radius: r };
    let near2 = indicator_near(&one_term(Dim::Two, near), &single_point(Dim::Two, &origin)).unwrap();
    let want = Complex64::new(0.0, -8.0 * r * 2.0 * PI * dk / PI) * Complex64::from_polar(1.0, -2.0 * r);
    assert!((near2.values()[0] - want).norm() < 1e-14 * want.norm());

    let near3 = indicator_near(&one_term(Dim::Three, near), &single_point(Dim::Three, &origin)).unwrap();
    let want = 16.0 * r * r * 4.0 * PI * dk / PI * Complex64::from_polar(1.0, -2.0 * r);
    assert!((near3.values()[0] - want).norm() < 1e-14 * want.norm());
}

#[test]
fn single_term_phase_off_origin() {
    let z = [0.3, -0.2, 0.0];
    let f = indicator_far(&one_term(Dim::Two, MeasurementGeometry::FarField), &single_point(Dim::Two, &z)).unwrap();
    let want = Complex64::new(2.0, -2.0) * 2.0 * PI / PI.powf(1.5) * Complex64::from_polar(1.0, -2.0 * 0.3);
    assert!((f.values()[0] - want).norm() < 1e-14 * want.norm());
}

fn scrambled(dim: Dim, geometry: MeasurementGeometry, ks: WavenumberSet, seed: f64) -> MeasurementSet {
    let dirs = match dim {
        Dim::Two => uniform_circle_directions(17).unwrap(),
        Dim::Three => fibonacci_sphere_directions(23).unwrap(),
    };
    MeasurementSet::from_closure(geometry, dirs, ks, move |t, k| {
        Complex64::new((seed + 5.0 * t[0] + 0.7 * k).sin(), (3.0 * t[1] - t[2] - 0.3 * k * seed).cos())
    })
    .unwrap()
}

#[test]
fn recurrence_matches_direct_evaluation() {
    let ks = make_wavenumbers(1.0, 121.0, 241).unwrap();
    for dim in [Dim::Two, Dim::Three] {
        let grid = SamplingGrid::cube(dim, -0.35, 0.35, if dim == Dim::Two { 11 } else { 5 }).unwrap();
        for geometry in [MeasurementGeometry::FarField, MeasurementGeometry::NearField { radius: 5.0 }] {
            let m = scrambled(dim, geometry, ks.clone(), 0.4);
            let (a, b) = match geometry {
                MeasurementGeometry::FarField => (
                    indicator_far_with(&m, &grid, Evaluation::Direct).unwrap(),
                    indicator_far_with(&m, &grid, Evaluation::Recurrence).unwrap(),
                ),
                MeasurementGeometry::NearField { .. } => (
                    indicator_near_with(&m, &grid, Evaluation::Direct).unwrap(),
                    indicator_near_with(&m, &grid, Evaluation::Recurrence).unwrap(),
                ),
            };
            let scale = a.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).norm() <= 1e-12 * scale, "{dim} {geometry:?}");
            }
        }
    }
}

#[test]
fn oracle_of_zero_is_zero() {
    for dim in [Dim::Two, Dim::Three] {
        let v = continuous_indicator_oracle(|_, _| ZERO, &[0.1, 0.0, 0.0], 1.0, 10.0, dim, OracleOptions::default()).unwrap();
        assert_eq!(v, ZERO);
    }
}

#[test]
fn oracle_at_gaussian_center() {
    // ∫ over the band of the radial transform: A(e^{−k_min²/a} − e^{−k_max²/a}) in the plane
    let (amp, a) = (0.01, 100.0);
    let (k_min, k_max) = (1.0, 41.0);
    let c = [0.0; 3];
    let far = |t: &Point, k: f64| k * k * gamma_n(k, Dim::Two).unwrap() * gaussian_fourier(Dim::Two, Complex64::new(amp, 0.0), &c, a, t, k);
    let v = continuous_indicator_oracle(far, &c, k_min, k_max, Dim::Two, OracleOptions::default()).unwrap();
    let want = amp * ((-k_min * k_min / a).exp() - (-k_max * k_max / a).exp());
    assert!((v - want).norm() < 1e-9 * want, "{v} vs {want}");

    // in space the band integral is 4/√π·A·∫ s² e^{−s²} ds over [k_min, k_max]/√a, by Simpson
    let far3 = |t: &Point, k: f64| k * k * gamma_n(k, Dim::Three).unwrap() * gaussian_fourier(Dim::Three, Complex64::new(amp, 0.0), &c, a, t, k);
    let v3 = continuous_indicator_oracle(far3, &c, k_min, k_max, Dim::Three, OracleOptions::default()).unwrap();
    let (s0, s1) = (k_min / a.sqrt(), k_max / a.sqrt());
    let n = 20_000;
    let h = (s1 - s0) / n as f64;
    let g = |s: f64| s * s * (-s * s).exp();
    let simpson: f64 = (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            w * g(s0 + i as f64 * h)
        })
        .sum::<f64>()
        * h
        / 3.0;
    let want3 = 4.0 / PI.sqrt() * amp * simpson;
    assert!((v3 - want3).norm() < 1e-9 * want3, "{v3} vs {want3}");
}

#[test]
fn oracle_rejects_bad_band() {
    assert!(continuous_indicator_oracle(|_, _| ZERO, &[0.0; 3], 2.0, 1.0, Dim::Two, OracleOptions::default()).is_err());
    assert!(continuous_indicator_oracle(|_, _| ZERO, &[0.0; 3], 0.0, 1.0, Dim::Two, OracleOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn indicator_is_linear(ar in -3.0f64..3.0, ai in -3.0f64..3.0, br in -3.0f64..3.0, near in any::<bool>(), three in any::<bool>()) {
        let dim = if three { Dim::Three } else { Dim::Two };
        let geometry = if near { MeasurementGeometry::NearField { radius: 4.0 } } else { MeasurementGeometry::FarField };
        let ks = make_wavenumbers(1.0, 31.0, 16).unwrap();
        let grid = SamplingGrid::cube(dim, -0.3, 0.3, if three { 3 } else { 7 }).unwrap();
        let (a, b) = (Complex64::new(ar, ai), Complex64::new(br, 0.5));
        let u = scrambled(dim, geometry, ks.clone(), 0.1);
        let v = scrambled(dim, geometry, ks, 1.9);
        let w = u.combine(a, &v, b).unwrap();
        let iu = qdsm_core::inversion::indicator(&u, &grid).unwrap();
        let iv = qdsm_core::inversion::indicator(&v, &grid).unwrap();
        let iw = qdsm_core::inversion::indicator(&w, &grid).unwrap();
        let scale = iu.values().iter().chain(iv.values()).map(|x| x.norm()).fold(0.0, f64::max) * (a.norm() + b.norm());
        for ((x, y), z) in iu.values().iter().zip(iv.values()).zip(iw.values()) {
            prop_assert!((a * x + b * y - z).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn far_indicator_translation_equivariant(tx in -0.2f64..0.2, ty in -0.2f64..0.2, tz in -0.2f64..0.2, three in any::<bool>()) {
        let dim = if three { Dim::Three } else { Dim::Two };
        let t = [tx, ty, if three { tz } else { 0.0 }];
        let ks = make_wavenumbers(1.0, 61.0, 61).unwrap();
        let base = scrambled(dim, MeasurementGeometry::FarField, ks, 0.7);
        let shifted = base.with_data(
            base.directions().dirs().iter().flat_map(|th| {
                let th = *th;
                base.wavenumbers().values().iter().map(move |&k| Complex64::from_polar(1.0, 2.0 * k * (th[0] * t[0] + th[1] * t[1] + th[2] * t[2])))
            })
            .zip(base.data())
            .map(|(p, u)| p * u)
            .collect(),
        ).unwrap();
        let z = [0.11, -0.07, 0.05];
        let zt = [z[0] + t[0], z[1] + t[1], z[2] + t[2]];
        let a = indicator_far(&base, &single_point(dim, &z)).unwrap().values()[0];
        let b = indicator_far(&shifted, &single_point(dim, &zt)).unwrap().values()[0];
        let scale = base.data().iter().map(|u| u.norm()).sum::<f64>() * base.directions().weight() * base.wavenumbers().dk();
        prop_assert!((a - b).norm() <= 1e-10 * scale.max(a.norm()));
    }
}
