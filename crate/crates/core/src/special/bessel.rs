//! Bessel functions of the first kind J₀, J₁, J₂ for real argument.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 0.5;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

fn series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for j in 1..=n {
        term *= half / j as f64;
    }
    let mut sum = term;
    let q = -half * half;
    for k in 1..40 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// J₀, J₁, J₂ by Miller's backward recurrence normalized with
/// J₀ + 2 Σ J_{2k} = 1.
fn miller(x: f64) -> [f64; 3] {
    let start = (x + 20.0 + (40.0 * x).sqrt()) as usize;
    let start = start + start % 2;
    let mut above = 0.0;
    let mut current = 1e-30;
    let mut out = [0.0; 3];
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let below = 2.0 * k as f64 / x * current - above;
        above = current;
        current = below;
        let index = k - 1;
        if index < 3 {
            out[index] = current;
        }
        if index % 2 == 0 && index > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > 1e250 {
            current *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += current;
    out.map(|v| v / norm)
}

fn hankel(n: usize, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut previous = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() >= previous {
            break;
        }
        previous = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (n as f64 * 0.5 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// J_n(x) for n ∈ {0, 1, 2} and x ≥ 0.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    if n > 2 {
        return Err(Error::InvalidInput(format!("bessel_j supports orders 0..=2, got {n}")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidInput(format!("bessel_j requires finite x >= 0, got {x}")));
    }
    let n = n as usize;
    Ok(if x <= SERIES_LIMIT {
        series(n, x)
    } else if x <= ASYMPTOTIC_LIMIT {
        miller(x)[n]
    } else {
        hankel(n, x)
    })
}

/// J₂(x)/x², finite at the origin.
pub fn bessel_j2_over_x2(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidInput(format!(
            "bessel_j2_over_x2 requires finite x >= 0, got {x}"
        )));
    }
    if x <= SERIES_LIMIT {
        // Σ (-1)^k (x/2)^{2k} / (4 k! (k+2)!)
        let q = -0.25 * x * x;
        let mut term = 0.125;
        let mut sum = term;
        for k in 1..30 {
            term *= q / (k as f64 * (k + 2) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        Ok(sum)
    } else {
        Ok(bessel_j(2, x)? / (x * x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Power series summed in extended form for moderate x.
    fn oracle(n: i32, x: f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..80 {
            let mut t = 1.0;
            for j in 1..=k {
                t *= -(x * x) / 4.0 / (j as f64 * (j + n) as f64);
            }
            for j in 1..=n {
                t *= x / 2.0 / j as f64;
            }
            sum += t;
        }
        sum
    }

    #[test]
    fn origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(2, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j2_over_x2(0.0).unwrap(), 0.125);
    }

    #[test]
    fn first_zero_of_j0() {
        let zero = 2.404_825_6;
        assert!(oracle(0, zero).abs() < 1e-7);
        assert!(bessel_j(0, zero).unwrap().abs() < 1e-7);
    }

    #[test]
    fn matches_power_series() {
        for i in 1..=80 {
            let x = 0.1 * i as f64;
            for n in 0..3 {
                let v = bessel_j(n as u32, x).unwrap();
                assert!((v - oracle(n, x)).abs() < 1e-13, "J{n}({x}) = {v} vs {}", oracle(n, x));
            }
        }
    }

    #[test]
    fn recurrence_and_branch_continuity() {
        for &x in &[0.49, 0.51, 3.0, 17.0, 24.9, 25.1, 40.0, 300.0] {
            let j0 = bessel_j(0, x).unwrap();
            let j1 = bessel_j(1, x).unwrap();
            let j2 = bessel_j(2, x).unwrap();
            assert!((j0 + j2 - 2.0 * j1 / x).abs() < 1e-14, "x = {x}");
        }
        for &x in &[20.0, 25.0, 30.0] {
            let m = miller(x);
            for (n, value) in m.iter().enumerate() {
                assert!((value - hankel(n, x)).abs() < 1e-15, "n = {n}, x = {x}");
            }
        }
    }

    #[test]
    fn large_argument_wronskian() {
        // J₁(x) Y₀(x) − J₀(x) Y₁(x) = 2/(πx) is not available; use the
        // Lommel-type identity J₀² + 2ΣJ_k² = 1 truncated, whose first terms
        // bound J₀² + 2J₁² + 2J₂² ≤ 1.
        for &x in &[1.0, 10.0, 30.0, 100.0] {
            let s: f64 = bessel_j(0, x).unwrap().powi(2)
                + 2.0 * bessel_j(1, x).unwrap().powi(2)
                + 2.0 * bessel_j(2, x).unwrap().powi(2);
            assert!(s <= 1.0 + 1e-14);
        }
    }

    #[test]
    fn j2_over_x2_continuity() {
        let a = bessel_j2_over_x2(0.5).unwrap();
        let b = bessel_j2_over_x2(0.5 + 1e-12).unwrap();
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn invalid_inputs() {
        assert!(bessel_j(3, 1.0).is_err());
        assert!(bessel_j(0, -1.0).is_err());
    }
}
