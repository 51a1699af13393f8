//! Floating-point evaluation of exact values, for numeric spot checks only.

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::exact::{CycQ, Rational};

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Value of `c` under the embedding ζ_n ↦ e^{2πi/n}.
pub fn approx(c: &CycQ) -> Complex64 {
    let n = c.conductor() as f64;
    c.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, x)| !num_traits::Zero::is_zero(*x))
        .map(|(k, x)| Complex64::from_polar(rational_to_f64(x), std::f64::consts::TAU * k as f64 / n))
        .sum()
}

/// (2π)⁴/(2·3⁵), the normalizing constant of level-3 weight-4 Eisenstein series.
pub fn g4_normalizer() -> f64 {
    std::f64::consts::TAU.powi(4) / 486.0
}

/// Σ (mτ + n)⁻⁴ over (m, n) ≡ (a, b) mod 3 with |m|, |n| ≤ bound, (m, n) ≠ 0,
/// divided by `g4_normalizer`.
pub fn g4_lattice_sum(a: i64, b: i64, tau: Complex64, bound: i64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let residues = |r: i64| (-bound + (r + bound).rem_euclid(3)..=bound).step_by(3);
    for m in residues(a) {
        let base = tau * m as f64;
        let mut row = Complex64::new(0.0, 0.0);
        for n in residues(b) {
            if m == 0 && n == 0 {
                continue;
            }
            let z = (base + n as f64).inv();
            let z2 = z * z;
            row += z2 * z2;
        }
        total += row;
    }
    total / g4_normalizer()
}
