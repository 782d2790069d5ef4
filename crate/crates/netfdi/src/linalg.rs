//! Small numeric helpers shared by the exact and structural analyses.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;

pub(crate) type CMatrix = DMatrix<Complex<f64>>;

pub(crate) fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex::new(x, 0.0))
}

pub(crate) fn cmax_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest eigenvalue modulus; 0 for the zero matrix.
pub(crate) fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Random complex point with modulus strictly above `2 * rho + 1`.
pub(crate) fn sample_lambda(rng: &mut impl Rng, rho: f64) -> Complex<f64> {
    let floor = 2.0 * rho + 1.0;
    let modulus = floor * rng.gen_range(1.1..2.0);
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex::from_polar(modulus, angle)
}

/// Solve `(lambda I - m) X = rhs` in complex arithmetic.
pub(crate) fn resolvent_solve(
    m: &CMatrix,
    lambda: Complex<f64>,
    rhs: &CMatrix,
) -> Option<CMatrix> {
    let n = m.nrows();
    let shifted = CMatrix::identity(n, n) * lambda - m;
    shifted.lu().solve(rhs)
}
