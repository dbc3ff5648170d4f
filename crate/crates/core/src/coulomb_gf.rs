//! One-particle Coulomb Green's function of the relative motion.
//!
//! All forms are built from the scaled Whittaker pair (Ŵ, ℳ) with
//! Ŵ = Γ(l+1−κ)·W, κ = iν, which absorbs the Γ(1−iν) normalization of the
//! closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_gamma, whittaker_scaled, ScaledPair, WhittakerIndex, WronskianCheck};
use crate::Vec3;

/// ln(1e-300): below this |Γ(1−iν)| the retarded value is reported as zero.
const LN_SUPPRESSION_FLOOR: f64 = -690.775_527_898_213_7;

/// Whether the Coulomb interaction is present or ν is forced to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Interaction {
    #[default]
    Coulomb,
    /// ν = 0: the same machinery reduces to the free-particle Green's function.
    Free,
}

/// Convention for the Sommerfeld parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NuConvention {
    /// ν = −1/k.
    #[default]
    Unit,
    /// ν = −1/(2 c_k k), the Coulomb parameter of −c_k∇² + 1/r.
    ReducedMass,
}

/// Boundary condition at E > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Branch {
    #[default]
    Retarded,
    Advanced,
}

/// Kind of a Green's function value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GfKind {
    Retarded,
    Advanced,
    NegativeEnergyReal,
}

/// Settings shared by every Coulomb Green's function evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfConfig {
    /// Kinetic coefficient of the relative motion, H = −c_k∇² + 1/r.
    pub c_k: f64,
    pub interaction: Interaction,
    pub nu_convention: NuConvention,
    pub branch: Branch,
    pub wronskian: WronskianCheck,
}

impl Default for GfConfig {
    fn default() -> Self {
        Self {
            c_k: 1.0,
            interaction: Interaction::Coulomb,
            nu_convention: NuConvention::Unit,
            branch: Branch::Retarded,
            wronskian: WronskianCheck::warn(1e-8),
        }
    }
}

impl GfConfig {
    pub fn free() -> Self {
        Self {
            interaction: Interaction::Free,
            ..Self::default()
        }
    }

    pub fn strict() -> Self {
        Self {
            wronskian: WronskianCheck::default(),
            ..Self::default()
        }
    }
}

/// Wave number and Sommerfeld parameter at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombParams {
    pub energy: f64,
    pub c_k: f64,
    /// k = √(E/c_k) on the Im k ≥ 0 branch.
    pub k: Complex64,
    /// Real for E > 0, imaginary for E < 0.
    pub nu: Complex64,
}

impl CoulombParams {
    /// κ = iν.
    pub fn kappa(&self) -> Complex64 {
        Complex64::i() * self.nu
    }

    fn kind(&self, branch: Branch) -> GfKind {
        if self.energy < 0.0 {
            GfKind::NegativeEnergyReal
        } else {
            match branch {
                Branch::Retarded => GfKind::Retarded,
                Branch::Advanced => GfKind::Advanced,
            }
        }
    }

    /// ln|Γ(1−iν)| = ½ ln(πν / sinh πν) for real ν.
    fn ln_gamma_modulus(&self) -> f64 {
        let x = PI * self.nu.re.abs();
        if self.energy <= 0.0 || x == 0.0 {
            return 0.0;
        }
        0.5 * (x.ln() - x - (-(-2.0 * x).exp()).ln_1p() + 2f64.ln())
    }

    fn suppressed(&self) -> bool {
        self.energy > 0.0 && self.ln_gamma_modulus() < LN_SUPPRESSION_FLOOR
    }
}

/// k and ν for energy `energy` with the default ν = −1/k convention.
pub fn coulomb_params(energy: f64, c_k: f64) -> Result<CoulombParams> {
    params_with(
        energy,
        &GfConfig {
            c_k,
            ..GfConfig::default()
        },
    )
}

fn params_with(energy: f64, cfg: &GfConfig) -> Result<CoulombParams> {
    let c_k = cfg.c_k;
    if !(c_k > 0.0) || !c_k.is_finite() {
        return Err(Error::InvalidInput(format!("c_k must be positive, got {c_k}")));
    }
    if !energy.is_finite() {
        return Err(Error::InvalidInput(format!("energy must be finite, got {energy}")));
    }
    let k = if energy >= 0.0 {
        Complex64::new((energy / c_k).sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-energy / c_k).sqrt())
    };
    let nu = match cfg.interaction {
        Interaction::Free => Complex64::new(0.0, 0.0),
        Interaction::Coulomb if energy == 0.0 => {
            return Err(Error::InvalidInput(
                "the Coulomb Green's function is not evaluated at E = 0".into(),
            ))
        }
        Interaction::Coulomb => {
            let scale = match cfg.nu_convention {
                NuConvention::Unit => 1.0,
                NuConvention::ReducedMass => 0.5 / c_k,
            };
            // −scale/k, built so that the imaginary case stays exactly imaginary
            if energy > 0.0 {
                Complex64::new(-scale / k.re, 0.0)
            } else {
                Complex64::new(0.0, scale / k.im)
            }
        }
    };
    Ok(CoulombParams { energy, c_k, k, nu })
}

/// −i k x, exact on both branches.
fn ray_point(k: Complex64, x: f64) -> Complex64 {
    if k.im == 0.0 {
        Complex64::new(0.0, -k.re * x)
    } else {
        Complex64::new(k.im * x, 0.0)
    }
}

/// A Green's function value with its boundary-condition kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GfValue {
    pub value: Complex64,
    pub kind: GfKind,
    /// The retarded value fell below the Gamow floor and was reported as 0.
    pub suppressed: bool,
}

fn finish(value: Complex64, p: &CoulombParams, cfg: &GfConfig) -> Result<GfValue> {
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Overflow("Coulomb Green's function"));
    }
    let kind = p.kind(cfg.branch);
    let value = match kind {
        GfKind::Advanced => value.conj(),
        _ => value,
    };
    Ok(GfValue {
        value,
        kind,
        suppressed: false,
    })
}

fn suppressed_value(p: &CoulombParams, cfg: &GfConfig) -> GfValue {
    GfValue {
        value: Complex64::new(0.0, 0.0),
        kind: p.kind(cfg.branch),
        suppressed: true,
    }
}

fn checked_pair(idx: &WhittakerIndex, z: Complex64, cfg: &GfConfig) -> Result<ScaledPair> {
    let pair = whittaker_scaled(idx, z)?;
    cfg.wronskian.enforce(pair.relative_residual(), || {
        format!("z = {z}, kappa = {}, l = {}", idx.kappa(), idx.l())
    })?;
    Ok(pair)
}

/// Closed-form Coulomb Green's function g̃c(r1, r2; E).
pub fn gc_closed(r1: &Vec3, r2: &Vec3, energy: f64, cfg: &GfConfig) -> Result<GfValue> {
    let d = (r1 - r2).norm();
    if d == 0.0 {
        return Err(Error::CoincidentArguments);
    }
    let s = r1.norm() + r2.norm();
    let p = params_with(energy, cfg)?;
    if p.suppressed() {
        return Ok(suppressed_value(&p, cfg));
    }
    let idx = WhittakerIndex::coulomb(p.kappa(), 0);
    let u = ray_point(p.k, s + d);
    let at_u = checked_pair(&idx, u, cfg)?;
    let w = at_u.w_hat;
    // s − d ≥ 0 by the triangle inequality; V = 0 uses ℳ(0) = 0, ℳ′(0) = 1.
    let gap = (s - d).max(0.0);
    let bracket = if gap == 0.0 {
        w.value()
    } else {
        let m = checked_pair(&idx, ray_point(p.k, gap), cfg)?.m;
        (w.val * m.der - m.val * w.der) * (w.log_scale + m.log_scale).exp()
    };
    finish(-bracket / (4.0 * PI * d * p.c_k), &p, cfg)
}

/// Radial Coulomb Green's function of angular momentum l.
pub fn gc_radial_l(l: u32, r1: f64, r2: f64, energy: f64, cfg: &GfConfig) -> Result<Complex64> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(Error::InvalidInput(format!("radii must be positive, got {r1}, {r2}")));
    }
    let p = params_with(energy, cfg)?;
    if p.suppressed() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (lesser, greater) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    let idx = WhittakerIndex::coulomb(p.kappa(), l);
    let m = checked_pair(&idx, ray_point(p.k, 2.0 * lesser), cfg)?.m;
    let w = checked_pair(&idx, ray_point(p.k, 2.0 * greater), cfg)?.w_hat;
    let two_ik = Complex64::i() * p.k * 2.0;
    let value = m.val * w.val * (m.log_scale + w.log_scale).exp() / (two_ik * r1 * r2 * p.c_k);
    Ok(finish(value, &p, cfg)?.value)
}

/// Angular-momentum classes retained in a partial-wave sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    All,
    EvenL,
    OddL,
}

impl Parity {
    fn keeps(self, l: u32) -> bool {
        match self {
            Parity::All => true,
            Parity::EvenL => l.is_multiple_of(2),
            Parity::OddL => l % 2 == 1,
        }
    }
}

/// Relative tail bound accepted by [`gc_pw_sum`].
pub const PARTIAL_WAVE_TOLERANCE: f64 = 1e-6;

/// Partial-wave sum Σ (2l+1)/(4π) P_l(cos) g_l(r1, r2; E) over one parity class.
#[allow(clippy::too_many_arguments)]
pub fn gc_pw_sum(
    r1: f64,
    r2: f64,
    cos_angle: f64,
    energy: f64,
    l_max: u32,
    parity: Parity,
    cfg: &GfConfig,
) -> Result<Complex64> {
    if !(cos_angle.abs() <= 1.0) {
        return Err(Error::InvalidInput(format!("|cos_angle| must be ≤ 1, got {cos_angle}")));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut magnitudes = Vec::with_capacity(l_max as usize + 1);
    let (mut p_prev, mut p_cur) = (0.0, 1.0);
    for l in 0..=l_max {
        if l > 0 {
            let lf = l as f64;
            let next = ((2.0 * lf - 1.0) * cos_angle * p_cur - (lf - 1.0) * p_prev) / lf;
            p_prev = p_cur;
            p_cur = next;
        }
        let weight = (2 * l + 1) as f64 / (4.0 * PI);
        let g = gc_radial_l(l, r1, r2, energy, cfg)?;
        magnitudes.push(weight * g.norm());
        if parity.keeps(l) {
            sum += weight * p_cur * g;
        }
    }
    let tail = tail_estimate(&magnitudes);
    // a class can vanish identically (odd l at cos = 0); fall back to the term scale
    let largest_kept = (0..=l_max)
        .filter(|&l| parity.keeps(l))
        .map(|l| magnitudes[l as usize])
        .fold(0.0, f64::max);
    let scale = sum.norm().max(largest_kept * PARTIAL_WAVE_TOLERANCE);
    if tail > PARTIAL_WAVE_TOLERANCE * scale {
        return Err(Error::NonConvergence {
            what: "partial-wave sum",
            detail: format!(
                "tail estimate {tail:e} at l_max = {l_max} against |sum| = {:e}",
                sum.norm()
            ),
        });
    }
    Ok(sum)
}

/// Geometric tail bound from the last three term magnitudes.
fn tail_estimate(magnitudes: &[f64]) -> f64 {
    let n = magnitudes.len();
    if n < 3 {
        return f64::INFINITY;
    }
    let (a, b, c) = (magnitudes[n - 3], magnitudes[n - 2], magnitudes[n - 1]);
    if c == 0.0 {
        return 0.0;
    }
    let ratio = (b / a).max(c / b);
    if !(ratio < 1.0) {
        return f64::INFINITY;
    }
    c * ratio / (1.0 - ratio)
}

/// Finite part of g̃c(r, r+δ; E) after removing −1/(4π c_k δ).
pub fn gc_coincident_regular(r: f64, energy: f64, cfg: &GfConfig) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("r must be positive, got {r}")));
    }
    let p = params_with(energy, cfg)?;
    if p.suppressed() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let idx = WhittakerIndex::coulomb(p.kappa(), 0);
    let z = ray_point(p.k, 2.0 * r);
    let pair = checked_pair(&idx, z, cfg)?;
    let (w, m) = (pair.w_hat, pair.m);
    let mant = (m.der * w.der + m.val * w.val * (p.kappa() / z - 0.25)) * 2.0;
    let bracket = mant * (m.log_scale + w.log_scale).exp();
    let value = Complex64::i() * p.k * bracket / (4.0 * PI * p.c_k);
    Ok(finish(value, &p, cfg)?.value)
}

/// g̃c(r, −r; E), the antipodal value entering the pseudo-LDOS.
pub fn gc_antipodal(r: f64, energy: f64, cfg: &GfConfig) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("r must be positive, got {r}")));
    }
    let p = params_with(energy, cfg)?;
    if p.suppressed() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let idx = WhittakerIndex::coulomb(p.kappa(), 0);
    let w = checked_pair(&idx, ray_point(p.k, 4.0 * r), cfg)?.w_hat;
    let value = -w.value() / (8.0 * PI * r * p.c_k);
    Ok(finish(value, &p, cfg)?.value)
}

/// ln|Γ(1−iν)| evaluated through the complex log-gamma; used by tests and
/// diagnostics to cross-check the suppression threshold.
pub fn ln_gamma_one_minus_i_nu(p: &CoulombParams) -> Result<f64> {
    Ok(ln_gamma(Complex64::new(1.0, 0.0) - Complex64::i() * p.nu)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn params_examples() {
        let p = coulomb_params(1.0, 1.0).unwrap();
        assert_eq!(p.k, Complex64::new(1.0, 0.0));
        assert_eq!(p.nu, Complex64::new(-1.0, 0.0));
        let p = coulomb_params(-1.0, 1.0).unwrap();
        assert_eq!(p.k, Complex64::new(0.0, 1.0));
        assert_eq!(p.nu, Complex64::new(0.0, 1.0));
        let p = coulomb_params(4.0, 1.0).unwrap();
        assert_eq!(p.k, Complex64::new(2.0, 0.0));
        assert_eq!(p.nu, Complex64::new(-0.5, 0.0));
        assert!(coulomb_params(1.0, 0.0).is_err());
    }

    #[test]
    fn reduced_mass_convention() {
        let cfg = GfConfig {
            nu_convention: NuConvention::ReducedMass,
            ..GfConfig::default()
        };
        let p = params_with(4.0, &cfg).unwrap();
        assert_eq!(p.nu, Complex64::new(-0.25, 0.0));
    }

    #[test]
    fn free_example_value() {
        let g = gc_closed(&v(0.3, 0.0, 0.0), &v(1.3, 0.0, 0.0), 1.0, &GfConfig::free()).unwrap();
        // quoted to three significant figures
        assert!((g.value.re + 0.043_000).abs() < 1e-5);
        assert!((g.value.im + 0.066_957).abs() < 1e-5);
        let oracle = -Complex64::new(0.0, 1.0).exp() / (4.0 * PI);
        assert!(rel(g.value, oracle) < 1e-12);
    }

    #[test]
    fn free_reduction_general_geometry() {
        for &(a, b, e) in &[
            (v(0.5, 0.2, -0.1), v(-1.0, 0.4, 2.0), 4.0),
            (v(3.0, 0.0, 0.0), v(0.0, 3.0, 1.0), 0.3),
            (v(0.1, 0.1, 0.1), v(5.0, -4.0, 2.0), 9.0),
            (v(1.0, 2.0, 0.0), v(-1.0, 0.5, 0.0), -2.0),
        ] {
            let g = gc_closed(&a, &b, e, &GfConfig::free()).unwrap().value;
            let p = coulomb_params(e, 1.0).unwrap();
            let d = (a - b).norm();
            let oracle = -(Complex64::i() * p.k * d).exp() / (4.0 * PI * d);
            assert!(rel(g, oracle) < 1e-10, "{g} vs {oracle}");
        }
    }

    #[test]
    fn negative_energy_is_real() {
        for e in [-1.0, -0.05, -7.0] {
            let g = gc_closed(&v(1.0, 0.0, 0.0), &v(0.0, 2.0, 0.5), e, &GfConfig::default()).unwrap();
            assert_eq!(g.kind, GfKind::NegativeEnergyReal);
            assert!(g.value.im.abs() < 1e-10);
            assert!(g.value.re < 0.0);
        }
        let g = gc_radial_l(0, 1.0, 2.0, -0.5, &GfConfig::default()).unwrap();
        assert!(g.im.abs() < 1e-10);
        let g = gc_coincident_regular(1.5, -2.0, &GfConfig::default()).unwrap();
        assert!(g.im.abs() < 1e-10);
    }

    #[test]
    fn no_poles_on_negative_axis() {
        let a = v(0.7, 0.0, 0.0);
        let b = v(0.0, 1.1, 0.0);
        let mut last: Option<f64> = None;
        for i in 0..60 {
            let e = -10.0 * (0.001f64).powf(i as f64 / 59.0);
            let g = gc_closed(&a, &b, e, &GfConfig::strict()).unwrap().value.re;
            assert!(g.is_finite());
            if let Some(prev) = last {
                // monotone approach towards the threshold, no sign change
                assert!(g.signum() == prev.signum());
            }
            last = Some(g);
        }
    }

    #[test]
    fn parity_and_conjugation() {
        let a = v(0.4, -1.2, 0.3);
        let b = v(1.5, 0.2, -0.7);
        let cfg = GfConfig::default();
        let g = gc_closed(&a, &b, 2.0, &cfg).unwrap().value;
        let g_neg = gc_closed(&(-a), &(-b), 2.0, &cfg).unwrap().value;
        assert_eq!(g, g_neg);
        let adv = GfConfig {
            branch: Branch::Advanced,
            ..cfg
        };
        let ga = gc_closed(&a, &b, 2.0, &adv).unwrap();
        assert_eq!(ga.kind, GfKind::Advanced);
        assert_eq!(ga.value, g.conj());
    }

    #[test]
    fn closed_matches_partial_waves() {
        let g = gc_closed(&v(1.0, 0.0, 0.0), &v(0.0, 1.0, 0.0), 1.0, &GfConfig::default())
            .unwrap()
            .value;
        // equal radii converge slowly; use the angular sum only as a loose check
        let r1 = 1.0;
        let r2 = 2.2;
        let g_line = gc_closed(&v(0.0, 0.0, r1), &v(0.0, 0.0, r2), 1.0, &GfConfig::default())
            .unwrap()
            .value;
        let pw = gc_pw_sum(r1, r2, 1.0, 1.0, 40, Parity::All, &GfConfig::default()).unwrap();
        assert!(rel(pw, g_line) < 1e-6, "{pw} vs {g_line}");
        assert!(g.norm() > 0.0);
    }

    #[test]
    fn equal_radii_partial_wave_sum_fails_loudly() {
        let r = gc_pw_sum(1.0, 1.0, 0.0, 1.0, 40, Parity::All, &GfConfig::default());
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn vanishing_parity_class_converges() {
        // P_l(0) = 0 for odd l
        let odd = gc_pw_sum(1.0, 2.5, 0.0, 1.0, 40, Parity::OddL, &GfConfig::default()).unwrap();
        assert_eq!(odd, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn radial_free_limit_matches_spherical_bessel() {
        // −ik j₀(k r<) h₀⁽¹⁾(k r>)
        for &(r1, r2, e) in &[(0.5f64, 1.5f64, 1.0f64), (2.0, 0.3, 4.0), (1.0, 3.0, 0.2)] {
            let k = e.sqrt();
            let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
            let j0 = (k * lo).sin() / (k * lo);
            let h0 = -Complex64::i() * (Complex64::i() * k * hi).exp() / (k * hi);
            let oracle = -Complex64::i() * k * j0 * h0;
            let g = gc_radial_l(0, r1, r2, e, &GfConfig::free()).unwrap();
            assert!(rel(g, oracle) < 1e-12, "{g} vs {oracle}");
        }
    }

    #[test]
    fn radial_free_limit_l_one() {
        // j₁(x) = sin x/x² − cos x/x, h₁(x) = −e^{ix}(x + i)/x²
        let (r1, r2, e) = (0.7f64, 2.1f64, 2.5f64);
        let k = e.sqrt();
        let x = k * r1;
        let y = k * r2;
        let j1 = x.sin() / (x * x) - x.cos() / x;
        let h1 = -(Complex64::i() * y).exp() * (y + Complex64::i()) / (y * y);
        let oracle = -Complex64::i() * k * j1 * h1;
        let g = gc_radial_l(1, r1, r2, e, &GfConfig::free()).unwrap();
        assert!(rel(g, oracle) < 1e-12, "{g} vs {oracle}");
    }

    #[test]
    fn radial_symmetry() {
        let a = gc_radial_l(3, 0.8, 2.6, 1.7, &GfConfig::default()).unwrap();
        let b = gc_radial_l(3, 2.6, 0.8, 1.7, &GfConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parity_classes_partition_the_sum() {
        let cfg = GfConfig::default();
        let all = gc_pw_sum(0.6, 2.0, 0.3, 1.0, 40, Parity::All, &cfg).unwrap();
        let even = gc_pw_sum(0.6, 2.0, 0.3, 1.0, 40, Parity::EvenL, &cfg).unwrap();
        let odd = gc_pw_sum(0.6, 2.0, 0.3, 1.0, 40, Parity::OddL, &cfg).unwrap();
        assert!((even + odd - all).norm() < 1e-15 * all.norm());
    }

    #[test]
    fn antipodal_parity_identity() {
        // Even(x) − Odd(x) = All(−x): the angle flip maps r2 to −r2
        let cfg = GfConfig::default();
        let (r1, r2, e) = (0.8, 2.0, 4.0);
        let even = gc_pw_sum(r1, r2, 1.0, e, 40, Parity::EvenL, &cfg).unwrap();
        let odd = gc_pw_sum(r1, r2, 1.0, e, 40, Parity::OddL, &cfg).unwrap();
        let flipped = gc_closed(&v(0.0, 0.0, r1), &v(0.0, 0.0, -r2), e, &cfg).unwrap().value;
        assert!(rel(even - odd, flipped) < 1e-6);
    }

    #[test]
    fn antipodal_matches_closed_form() {
        let cfg = GfConfig::default();
        let r = 1.0;
        let a = gc_antipodal(r, 4.0, &cfg).unwrap();
        let g = gc_closed(&v(0.0, 0.0, r), &v(0.0, 0.0, -r), 4.0, &cfg).unwrap().value;
        assert!(rel(a, g) < 1e-12);
        // general direction, where |r1|+|r2|−|r1−r2| rounds to a tiny V
        let dir = v(0.3, -0.5, 0.81).normalize();
        let g = gc_closed(&(dir * r), &(dir * -r), 4.0, &cfg).unwrap().value;
        assert!(rel(a, g) < 1e-6);
    }

    #[test]
    fn antipodal_free_mode() {
        let cfg = GfConfig::free();
        for r in [0.5, 2.0, 9.0] {
            let e: f64 = 3.0;
            let k = e.sqrt();
            let a = gc_antipodal(r, e, &cfg).unwrap();
            let oracle = -(Complex64::i() * 2.0 * k * r).exp() / (8.0 * PI * r);
            assert!(rel(a, oracle) < 1e-12);
            assert_relative_eq!(a.norm(), 1.0 / (8.0 * PI * r), max_relative = 1e-12);
        }
    }

    #[test]
    fn antipodal_decays_like_inverse_r() {
        let cfg = GfConfig::default();
        let a = gc_antipodal(20.0, 4.0, &cfg).unwrap().norm() * 20.0;
        let b = gc_antipodal(40.0, 4.0, &cfg).unwrap().norm() * 40.0;
        assert!((a / b - 1.0).abs() < 0.05);
    }

    #[test]
    fn coincidence_free_mode() {
        for e in [0.5f64, 4.0, 16.0] {
            for r in [0.1, 1.0, 7.0] {
                let g = gc_coincident_regular(r, e, &GfConfig::free()).unwrap();
                assert_relative_eq!(g.im, -e.sqrt() / (4.0 * PI), max_relative = 1e-12);
                assert!(g.re.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coincidence_matches_extrapolation() {
        let cfg = GfConfig::default();
        let (r, e) = (1.0, 4.0);
        let base = v(0.0, 0.0, r);
        let dir = v(0.6, 0.0, 0.8);
        let shifted = |delta: f64| {
            let g = gc_closed(&base, &(base + dir * delta), e, &cfg).unwrap().value;
            g + 1.0 / (4.0 * PI * delta)
        };
        // Richardson on δ ∈ {1e-2, 1e-3, 1e-4}, linear error in δ
        let (a, b, c) = (shifted(1e-2), shifted(1e-3), shifted(1e-4));
        let ab = (b * 10.0 - a) / 9.0;
        let bc = (c * 10.0 - b) / 9.0;
        let extrapolated = (bc * 100.0 - ab) / 99.0;
        let analytic = gc_coincident_regular(r, e, &cfg).unwrap();
        assert!(rel(analytic, extrapolated) < 1e-5, "{analytic} vs {extrapolated}");
    }

    #[test]
    fn suppression_threshold() {
        let p = coulomb_params(1e-7, 1.0).unwrap();
        assert!(p.suppressed());
        let cfg = GfConfig::default();
        let g = gc_closed(&v(1.0, 0.0, 0.0), &v(0.0, 1.0, 0.0), 1e-7, &cfg).unwrap();
        assert!(g.suppressed);
        assert_eq!(g.value, Complex64::new(0.0, 0.0));
        let p = coulomb_params(1e-4, 1.0).unwrap();
        assert!(!p.suppressed());
        assert_relative_eq!(
            p.ln_gamma_modulus(),
            ln_gamma_one_minus_i_nu(&p).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn near_threshold_is_finite() {
        let cfg = GfConfig::strict();
        let g = gc_closed(&v(1.0, 0.0, 0.0), &v(0.0, 1.5, 0.0), 1e-3, &cfg).unwrap();
        assert!(g.value.norm().is_finite());
        let g = gc_coincident_regular(2.0, 1e-3, &cfg).unwrap();
        // the barrier suppresses Im far below rounding of Re
        assert!(g.im.abs() < 1e-12 * g.re.abs());
    }

    #[test]
    fn coincident_arguments_rejected() {
        let a = v(1.0, 2.0, 3.0);
        assert_eq!(
            gc_closed(&a, &a, 1.0, &GfConfig::default()),
            Err(Error::CoincidentArguments)
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn exchange_of_arguments(x1 in -3.0f64..3.0, y1 in -3.0f64..3.0, x2 in -3.0f64..3.0, z2 in -3.0f64..3.0,
                                 e in prop::sample::select(vec![-1.0, 0.5, 4.0])) {
            let a = v(x1, y1, 0.2);
            let b = v(x2, 0.1, z2);
            prop_assume!((a - b).norm() > 1e-3);
            let cfg = GfConfig::default();
            let g = gc_closed(&a, &b, e, &cfg).unwrap().value;
            let h = gc_closed(&b, &a, e, &cfg).unwrap().value;
            prop_assert!((g - h).norm() <= 1e-12 * g.norm());
        }
    }
}
