//! Kummer's confluent hypergeometric function M(a, b, z) = ₁F₁(a; b; z).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{cgamma, rgamma};
use crate::error::{Error, Result};

const MAX_SERIES_TERMS: usize = 5000;
const MAX_ASYMPTOTIC_TERMS: usize = 400;
/// Relative accuracy demanded before a branch is accepted.
const TARGET: f64 = 1e-13;

/// Partial sums of the Kummer series with the absolute-term sum used for
/// the cancellation estimate.
pub(crate) struct SeriesSum {
    pub value: Complex64,
    pub derivative: Complex64,
    pub abs_sum: f64,
}

impl SeriesSum {
    pub fn condition(&self) -> f64 {
        if self.value.norm() == 0.0 {
            f64::INFINITY
        } else {
            self.abs_sum / self.value.norm()
        }
    }
}

/// Σ (a)_n z^n / ((b)_n n!) and its z-derivative.
pub(crate) fn kummer_series(a: Complex64, b: Complex64, z: Complex64) -> Option<SeriesSum> {
    if z.norm() == 0.0 {
        return Some(SeriesSum {
            value: Complex64::new(1.0, 0.0),
            derivative: a / b,
            abs_sum: 1.0,
        });
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut value = term;
    let mut derivative = Complex64::new(0.0, 0.0);
    let mut abs_sum = 1.0;
    for n in 0..MAX_SERIES_TERMS {
        let nf = n as f64;
        let next = term * (a + nf) * z / ((b + nf) * (nf + 1.0));
        derivative += next * (nf + 1.0) / z;
        value += next;
        abs_sum += next.norm();
        term = next;
        let following = ((a + nf + 1.0) * z / ((b + nf + 1.0) * (nf + 2.0))).norm();
        let small = term.norm() <= f64::EPSILON * 0.25 * value.norm();
        if term.norm() == 0.0 || (small && following < 1.0) {
            if !(value.re.is_finite() && value.im.is_finite()) {
                return None;
            }
            return Some(SeriesSum {
                value,
                derivative,
                abs_sum,
            });
        }
    }
    None
}

/// Sum of an asymptotic series whose terms obey t_{s+1} = t_s · ratio(s),
/// truncated at the smallest term. Returns `None` if the smallest term is not
/// below the target relative accuracy.
pub(crate) fn asymptotic_sum(ratio: impl Fn(f64) -> Complex64, target: f64) -> Option<(Complex64, Complex64)> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    // Σ s t_s, needed for derivatives of series in 1/z
    let mut weighted = Complex64::new(0.0, 0.0);
    for s in 0..MAX_ASYMPTOTIC_TERMS {
        let next = term * ratio(s as f64);
        if next.norm() <= target * sum.norm() {
            sum += next;
            weighted += next * (s as f64 + 1.0);
            return Some((sum, weighted));
        }
        if next.norm() > term.norm() && s > 0 {
            return None;
        }
        sum += next;
        weighted += next * (s as f64 + 1.0);
        term = next;
    }
    None
}

fn asymptotic(a: Complex64, b: Complex64, z: Complex64) -> Result<Option<Complex64>> {
    let neg_inv_z = -z.inv();
    let inv_z = z.inv();
    let recessive_coeff = rgamma(b - a);
    let dominant_coeff = rgamma(a);
    let zero = Complex64::new(0.0, 0.0);
    let s1 = if recessive_coeff == zero {
        zero
    } else {
        match asymptotic_sum(|s| (a + s) * (a - b + 1.0 + s) / (s + 1.0) * neg_inv_z, TARGET) {
            Some((sum, _)) => sum,
            None => return Ok(None),
        }
    };
    let s2 = if dominant_coeff == zero {
        zero
    } else {
        match asymptotic_sum(|s| (b - a + s) * (1.0 - a + s) / (s + 1.0) * inv_z, TARGET) {
            Some((sum, _)) => sum,
            None => return Ok(None),
        }
    };
    let sign = if z.arg() > -PI / 2.0 { 1.0 } else { -1.0 };
    let phase = (Complex64::i() * (sign * PI) * a).exp();
    let gamma_b = cgamma(b)?;
    let recessive = phase * (-a * z.ln()).exp() * recessive_coeff * s1;
    let dominant = z.exp() * ((a - b) * z.ln()).exp() * dominant_coeff * s2;
    let value = gamma_b * (recessive + dominant);
    if value.re.is_finite() && value.im.is_finite() {
        Ok(Some(value))
    } else {
        Err(Error::Overflow("hyp1f1 asymptotic expansion"))
    }
}

/// Kummer's function M(a, b, z) for complex parameters.
///
/// The power series is used whenever it converges without catastrophic
/// cancellation; otherwise the large-|z| asymptotic expansion is tried.
pub fn hyp1f1(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64> {
    if b.im == 0.0 && b.re <= 0.0 && b.re == b.re.round() {
        return Err(Error::Pole { re: b.re, im: b.im });
    }
    if z.norm() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let series = kummer_series(a, b, z);
    if let Some(s) = &series {
        if s.condition() * f64::EPSILON <= TARGET {
            return Ok(s.value);
        }
    }
    if let Some(v) = asymptotic(a, b, z)? {
        return Ok(v);
    }
    match series {
        Some(s) if s.condition() * f64::EPSILON <= 1e-8 => Ok(s.value),
        Some(s) => Err(Error::NonConvergence {
            what: "hyp1f1",
            detail: format!("series condition {:e} and asymptotic expansion diverges", s.condition()),
        }),
        None => Err(Error::NonConvergence {
            what: "hyp1f1",
            detail: "neither the series nor the asymptotic expansion converged".into(),
        }),
    }
}
