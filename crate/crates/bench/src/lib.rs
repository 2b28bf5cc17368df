//! Shared inputs for the kernel benchmarks in `benches/`.

use qdsm_core::forward::{synthesize, LSDiscretization};
use qdsm_core::phantoms::{complex_mountain_2d, gaussian_bump, rasterize};
use qdsm_core::{
    make_wavenumbers, uniform_circle_directions, Complex64, ComplexField, Dim, DirectionSet, ForwardModel,
    MeasurementGeometry, MeasurementSet, SamplingGrid, WavenumberSet,
};

/// The complex mountain on a `count`² raster over [−1.1, 1.1]².
pub fn mountain_raster(count: usize) -> ComplexField {
    let grid = SamplingGrid::cube(Dim::Two, -1.1, 1.1, count).expect("valid grid");
    rasterize(&complex_mountain_2d(), &grid).expect("grid covers the mountain")
}

pub fn acquisition(n_theta: usize, k_max: f64, n_k: usize) -> (DirectionSet, WavenumberSet) {
    (
        uniform_circle_directions(n_theta).expect("n_theta > 0"),
        make_wavenumbers(1.0, k_max, n_k).expect("valid band"),
    )
}

/// Born far-field data of the mountain on a 111² forward raster.
pub fn mountain_data(n_theta: usize, k_max: f64, n_k: usize) -> MeasurementSet {
    let (dirs, ks) = acquisition(n_theta, k_max, n_k);
    let forward = SamplingGrid::cube(Dim::Two, -1.1, 1.1, 111).expect("valid grid");
    synthesize(&complex_mountain_2d(), MeasurementGeometry::FarField, &dirs, &ks, &forward, ForwardModel::Born)
        .expect("forward grid covers the mountain")
}

/// A weak Gaussian bump discretized for the Lippmann–Schwinger solver.
pub fn gaussian_disc(count: usize) -> LSDiscretization {
    let bump = gaussian_bump(Dim::Two, Complex64::new(0.01, 0.0), [0.0; 3], 100.0).expect("valid bump");
    let raster = rasterize(&bump, &SamplingGrid::cube(Dim::Two, -0.7, 0.7, count).expect("valid grid"))
        .expect("grid covers the bump");
    LSDiscretization::new(raster).expect("raster covers the support")
}
