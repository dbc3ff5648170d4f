//! Local density of states of the pair as a function of the inter-electron
//! distance: the ρ± integrals, singlet/triplet assembly and closed-form
//! reference densities.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coulomb_gf::{gc_antipodal, gc_coincident_regular, GfConfig};
use crate::error::{Error, Result};
use crate::pair_gf::{origin_density, CM_COEFFICIENT};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::special::{bessel_j, bessel_j2_over_x2};

/// Settings of LDOS evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdosConfig {
    pub gf: GfConfig,
    /// Kinetic coefficient of the centre-of-mass motion.
    pub c_cm: f64,
    pub quad: QuadratureSpec,
}

impl Default for LdosConfig {
    fn default() -> Self {
        Self {
            gf: GfConfig::default(),
            c_cm: CM_COEFFICIENT,
            quad: QuadratureSpec::default().with_tolerances(1e-300, 1e-9),
        }
    }
}

impl LdosConfig {
    pub fn free() -> Self {
        Self {
            gf: GfConfig::free(),
            ..Self::default()
        }
    }
}

/// The direct and exchange (pseudo-LDOS) densities at one (r, E).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoComponents {
    pub rho_plus: f64,
    pub rho_minus: f64,
}

/// Every density at one inter-electron distance and energy, in r_B⁻⁶.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdosPoint {
    pub r: f64,
    pub energy: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub rho_even: f64,
    pub rho_odd: f64,
    pub rho_total: f64,
    pub rho_spinless: f64,
}

impl LdosPoint {
    /// Assembles the channel densities from ρ±.
    pub fn from_components(r: f64, energy: f64, c: RhoComponents) -> Self {
        let rho_even = 0.5 * (c.rho_plus + c.rho_minus);
        let rho_odd = 0.5 * (c.rho_plus - c.rho_minus);
        Self {
            r,
            energy,
            rho_plus: c.rho_plus,
            rho_minus: c.rho_minus,
            rho_even,
            rho_odd,
            rho_total: 2.0 * c.rho_plus - c.rho_minus,
            rho_spinless: 2.0 * c.rho_plus,
        }
    }
}

/// −(1/2π³)·Im ∫₀^{K_m} g(ε_K) K² dK with K = K_m sin θ.
fn band_density<F>(energy: f64, cfg: &LdosConfig, mut gf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let band_edge = (energy / cfg.c_cm).sqrt();
    let integral = integrate(
        |theta: f64| {
            let (s, c) = theta.sin_cos();
            let k = band_edge * s;
            let g = gf(energy * c * c)?;
            Ok(Complex64::new(g.im * k * k * band_edge * c, 0.0))
        },
        0.0,
        FRAC_PI_2,
        &cfg.quad,
    )?;
    Ok(-integral.value.re / (2.0 * PI.powi(3)))
}

fn check_point(r: f64, energy: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("r must be positive and finite, got {r}")));
    }
    if !energy.is_finite() {
        return Err(Error::InvalidInput(format!("energy must be finite, got {energy}")));
    }
    Ok(())
}

/// ρ+ and ρ− at inter-electron distance `r`; both vanish for E ≤ 0.
pub fn rho_components(r: f64, energy: f64, cfg: &LdosConfig) -> Result<RhoComponents> {
    check_point(r, energy)?;
    if energy <= 0.0 {
        return Ok(RhoComponents {
            rho_plus: 0.0,
            rho_minus: 0.0,
        });
    }
    let rho_plus = band_density(energy, cfg, |e| gc_coincident_regular(r, e, &cfg.gf))?;
    let rho_minus = band_density(energy, cfg, |e| gc_antipodal(r, e, &cfg.gf))?;
    Ok(RhoComponents { rho_plus, rho_minus })
}

/// ρ+ alone; the pseudo-LDOS integral is skipped.
pub fn rho_plus(r: f64, energy: f64, cfg: &LdosConfig) -> Result<f64> {
    check_point(r, energy)?;
    if energy <= 0.0 {
        return Ok(0.0);
    }
    band_density(energy, cfg, |e| gc_coincident_regular(r, e, &cfg.gf))
}

/// All densities at one point.
pub fn rho_point(r: f64, energy: f64, cfg: &LdosConfig) -> Result<LdosPoint> {
    Ok(LdosPoint::from_components(r, energy, rho_components(r, energy, cfg)?))
}

/// [`rho_point`] over many (r, E) pairs in parallel; results keep input order.
pub fn rho_batch(points: &[(f64, f64)], cfg: &LdosConfig) -> Vec<Result<LdosPoint>> {
    points.par_iter().map(|&(r, e)| rho_point(r, e, cfg)).collect()
}

/// Free-pair density at the origin, E²/(16π³)·Θ(E).
pub fn rho_free_origin(energy: f64) -> f64 {
    if energy > 0.0 {
        energy * energy / (16.0 * PI.powi(3))
    } else {
        0.0
    }
}

/// Density of two non-interacting electrons at centre separation `big_r` and
/// relative separation `r`, with c_K = 1/4 and c_k = 1.
pub fn rho_free(big_r: f64, r: f64, energy: f64) -> Result<f64> {
    if !(big_r >= 0.0 && r >= 0.0) {
        return Err(Error::InvalidInput("separations must be non-negative".into()));
    }
    if energy <= 0.0 {
        return Ok(0.0);
    }
    let scaled = 4.0 * energy;
    let x = scaled.sqrt() * (big_r * big_r + 0.25 * r * r).sqrt();
    if x == 0.0 {
        return Ok(rho_free_origin(energy));
    }
    let ratio = if x <= 0.5 {
        bessel_j2_over_x2(x)?
    } else {
        bessel_j(2, x)? / (x * x)
    };
    Ok(scaled * scaled * ratio / (32.0 * PI.powi(3)))
}

/// Single-electron reference densities at the origin, in r_B⁻³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleRefs {
    /// Electron in a repulsive Coulomb potential.
    pub rho_c0: f64,
    /// Free electron.
    pub rho_e0: f64,
}

/// ρ_c0(E) = f(√E)/(2π√E) and ρ_e0(E) = √E/(4π²); both zero for E ≤ 0.
pub fn rho_single_refs(energy: f64) -> SingleRefs {
    if energy <= 0.0 {
        return SingleRefs {
            rho_c0: 0.0,
            rho_e0: 0.0,
        };
    }
    let k = energy.sqrt();
    SingleRefs {
        rho_c0: origin_density(k) / (2.0 * PI * k),
        rho_e0: k / (4.0 * PI * PI),
    }
}
