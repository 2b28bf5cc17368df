//! A fast suite of oracle comparisons for the analysis and quadrature
//! machinery, run by the `validate` subcommand.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{default_probes, h2_norm, l2_norm, low_freq_moments, truncation_bound, uniqueness_moment_check};
use crate::error::Result;
use crate::forward::MeasurementSet;
use crate::geometry::{
    fibonacci_sphere_directions, make_wavenumbers, uniform_circle_directions, Dim, MeasurementGeometry, Point,
    SamplingGrid,
};
use crate::inversion::{continuous_indicator_oracle, indicator_far, OracleOptions};
use crate::phantoms::{gaussian_bump, gaussian_fourier, rasterize};
use crate::specialfun::{gamma_n, hankel0_h1, hankel1_h1};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    /// The measured discrepancy.
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<OracleCheck>,
}

impl ValidationReport {
    fn record(&mut self, name: &str, value: f64, tolerance: f64) {
        self.checks.push(OracleCheck {
            name: name.to_string(),
            value,
            tolerance,
            passed: value <= tolerance,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

const AMP: f64 = 0.01;
const DECAY: f64 = 100.0;

/// H² norm of A e^{−a|x|²} in the plane, from the radial integral of its transform.
fn gaussian_h2_2d(amp: f64, a: f64) -> f64 {
    let b = 2.0 * a;
    let integral = PI * amp * amp * (PI / a).powi(2) * (b + 2.0 * b * b + 2.0 * b * b * b);
    integral.sqrt() / (2.0 * PI).powi(2)
}

/// Runs every check and collects the outcomes; numerical failures inside a
/// check are errors, tolerance misses are reported as failed checks.
pub fn run_validation() -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    let amp = Complex64::new(AMP, 0.0);
    let origin: Point = [0.0; 3];

    let b = truncation_bound(1.0, 1.0, 1.0, 121.0, Dim::Two)?;
    report.record("truncation_bound_arithmetic", (b - PI.sqrt() * (1.0 / 121.0 + 1.0)).abs(), 1e-15);
    let wider = truncation_bound(1.0, 1.0, 0.5, 242.0, Dim::Three)?;
    let narrower = truncation_bound(1.0, 1.0, 1.0, 121.0, Dim::Three)?;
    report.record("truncation_bound_monotone", (wider - narrower).max(0.0), 0.0);

    let bump = gaussian_bump(Dim::Two, amp, origin, DECAY)?;
    let raster = rasterize(&bump, &SamplingGrid::cube(Dim::Two, -0.5, 0.5, 256)?)?;
    let h2 = h2_norm(&raster)?;
    let exact = gaussian_h2_2d(AMP, DECAY);
    report.record("h2_norm_gaussian_rel", (h2.value - exact).abs() / exact, 1e-2);

    let far = |t: &Point, k: f64| k * k * gamma_n(k, Dim::Two).expect("k > 0") * gaussian_fourier(Dim::Two, amp, &origin, DECAY, t, k);
    let dirs = uniform_circle_directions(16)?;
    let est = low_freq_moments(far, &dirs, &default_probes(bump.support_radius())?)?;
    let mass = AMP * PI / DECAY;
    report.record("moments_gaussian_mass_rel", (est.mass - mass).norm() / mass, 1e-3);
    let first = est.first_moment.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    report.record("moments_gaussian_first", first, 1e-6);

    let quad = SamplingGrid::cube(Dim::Two, -1.0, 1.0, 801)?;
    let disk = uniqueness_moment_check(&[0.0, 0.0], 1.0, 0.8, &quad, 4, 7)?;
    report.record("uniqueness_disk_area", (disk.mass_numeric - PI * 0.64).abs(), 2e-3);
    let lin = uniqueness_moment_check(&[1.0, 0.0], 0.0, 0.8, &quad, 6, 7)?;
    report.record("uniqueness_first_moment", lin.max_discrepancy, 2e-3);

    let fib = fibonacci_sphere_directions(256)?;
    let weight_sum = fib.weight() * fib.len() as f64;
    report.record("fibonacci_weight_sum", (weight_sum - 4.0 * PI).abs(), 1e-12);

    let mut wronskian = 0.0f64;
    for i in 0..=100 {
        let x = 0.5 + 49.5 * i as f64 / 100.0;
        let (h0, h1) = (hankel0_h1(x)?, hankel1_h1(x)?);
        let w = h1.re * h0.im - h0.re * h1.im;
        wronskian = wronskian.max((w - 2.0 / (PI * x)).abs() * PI * x / 2.0);
    }
    report.record("hankel_wronskian_rel", wronskian, 1e-8);

    // continuous indicator: the defect stays under the uniform truncation bound
    let (k_min, k_max) = (1.0, 41.0);
    let l2 = l2_norm(&raster);
    let bound = truncation_bound(h2.value, l2, k_min, k_max, Dim::Two)?;
    let mut worst: f64 = 0.0;
    for z in [[0.0, 0.0, 0.0], [0.07, -0.03, 0.0], [0.2, 0.1, 0.0]] {
        let value = continuous_indicator_oracle(far, &z, k_min, k_max, Dim::Two, OracleOptions::default())?;
        worst = worst.max((value - bump.eval(&z)).norm() / bound);
    }
    report.record("oracle_defect_over_bound", worst, 1.0);

    // discrete indicator against the continuous one at a fine wavenumber step
    let ks = make_wavenumbers(k_min, k_max, 321)?;
    let m = MeasurementSet::from_closure(MeasurementGeometry::FarField, uniform_circle_directions(256)?, ks, far)?;
    let z: Point = [0.07, -0.03, 0.0];
    let grid = SamplingGrid::new(Dim::Two, vec![z[0], z[1]], vec![z[0] + 0.01, z[1] + 0.01], vec![2, 2])?;
    let discrete = indicator_far(&m, &grid)?.values()[0];
    let continuous = continuous_indicator_oracle(far, &z, k_min, k_max, Dim::Two, OracleOptions::default())?;
    report.record("discrete_vs_continuous_rel", (discrete - continuous).norm() / continuous.norm(), 5e-3);

    Ok(report)
}
