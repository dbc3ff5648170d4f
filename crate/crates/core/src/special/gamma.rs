//! Complex gamma, reciprocal gamma, log-gamma and digamma.
//!
//! The log-gamma core shifts the argument to |z| >= 15 by upward recurrence
//! and sums the Stirling series there. Left half-plane values come from the
//! reflection formula. All routines are pure and allocation free.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const STIRLING_RADIUS: f64 = 15.0;

/// B_{2n} / (2n (2n-1)) for n = 1..=10.
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// B_{2n} / (2n) for n = 1..=10, used by the digamma asymptotic series.
const DIGAMMA_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
    43_867.0 / 14_364.0,
    -174_611.0 / 6600.0,
];

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// ln Γ(z) for Re z >= 1/2.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let mut shifted = z;
    let mut product = Complex64::new(1.0, 0.0);
    let mut shifts = 0;
    while shifted.norm() < STIRLING_RADIUS {
        product *= shifted;
        shifted += 1.0;
        shifts += 1;
    }
    let inv = shifted.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for &c in STIRLING_COEFFS.iter().rev() {
        series = series * inv2 + c;
    }
    series *= inv;
    let stirling = (shifted - 0.5) * shifted.ln() - shifted + LN_SQRT_2PI + series;
    if shifts == 0 {
        stirling
    } else {
        stirling - product.ln()
    }
}

/// ln sin(πz) without overflow for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 10.0 {
        return (z * PI).sin().ln();
    }
    // sin(πz) = (i/2) e^{-iπz} (1 - e^{2iπz}) for Im z > 0, conjugate otherwise.
    let w = if z.im > 0.0 { z } else { z.conj() };
    let i = Complex64::i();
    let val = (i * 0.5).ln() - i * PI * w + (1.0 - (i * 2.0 * PI * w).exp()).ln();
    if z.im > 0.0 {
        val
    } else {
        val.conj()
    }
}

/// A logarithm of Γ(z). The imaginary part is not reduced to the principal
/// branch; exponentiating the result always gives Γ(z).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z))
    } else {
        let reflected = ln_gamma_right(1.0 - z);
        Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - reflected)
    }
}

/// Γ(z) for complex z.
pub fn cgamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    if z.re >= 0.5 {
        return Ok(ln_gamma_right(z).exp());
    }
    let s = (z * PI).sin();
    if s.norm() > 1e-3 && z.im.abs() < 100.0 {
        Ok(Complex64::new(PI, 0.0) / (s * ln_gamma_right(1.0 - z).exp()))
    } else {
        ln_gamma(z).map(|l| l.exp())
    }
}

/// 1/Γ(z); zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_pole(z) {
        return Complex64::new(0.0, 0.0);
    }
    match ln_gamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// Digamma ψ(z) = Γ'(z)/Γ(z).
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    if z.re < 0.5 {
        let cot = (z * PI).cos() / (z * PI).sin();
        return Ok(digamma(1.0 - z)? - cot * PI);
    }
    let mut shifted = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while shifted.norm() < STIRLING_RADIUS {
        acc -= shifted.inv();
        shifted += 1.0;
    }
    let inv = shifted.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for &c in DIGAMMA_COEFFS.iter().rev() {
        series = series * inv2 + c;
    }
    series *= inv2;
    Ok(acc + shifted.ln() - inv * 0.5 - series)
}
