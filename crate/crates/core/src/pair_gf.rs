//! Two-electron Green's function in centre-of-mass and relative coordinates,
//! its divergence classes, the spectral origin value g₀(E) and the
//! singlet/triplet decomposition.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coulomb_gf::{gc_closed, GfConfig};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_real, principal_value, Estimate, QuadratureSpec, Transform};
use crate::Vec3;

/// Kinetic coefficient of the centre-of-mass motion in atomic units.
pub const CM_COEFFICIENT: f64 = 0.25;

/// Decay exponent q·|r1 − r2| past which the negative-energy tail is dropped.
const TAIL_DECAY_EXPONENT: f64 = 45.0;
/// Largest number of initial panels requested for oscillatory integrands.
const MAX_INITIAL_PANELS: usize = 4096;
/// Relative tolerance when comparing argument vectors for degeneracies.
const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// Electron positions of the two arguments of the pair Green's function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairArgs {
    pub a1: Vec3,
    pub b1: Vec3,
    pub a2: Vec3,
    pub b2: Vec3,
    /// Kinetic coefficient of the centre-of-mass motion.
    pub c_cm: f64,
}

impl PairArgs {
    pub fn new(a1: Vec3, b1: Vec3, a2: Vec3, b2: Vec3) -> Self {
        Self {
            a1,
            b1,
            a2,
            b2,
            c_cm: CM_COEFFICIENT,
        }
    }

    /// Arguments from centres of mass and relative vectors.
    pub fn from_relative(centre1: Vec3, rel1: Vec3, centre2: Vec3, rel2: Vec3) -> Self {
        Self::new(
            centre1 + rel1 * 0.5,
            centre1 - rel1 * 0.5,
            centre2 + rel2 * 0.5,
            centre2 - rel2 * 0.5,
        )
    }

    pub fn centre1(&self) -> Vec3 {
        (self.a1 + self.b1) * 0.5
    }

    pub fn centre2(&self) -> Vec3 {
        (self.a2 + self.b2) * 0.5
    }

    pub fn rel1(&self) -> Vec3 {
        self.a1 - self.b1
    }

    pub fn rel2(&self) -> Vec3 {
        self.a2 - self.b2
    }

    /// |R1 − R2|.
    pub fn centre_separation(&self) -> f64 {
        (self.centre1() - self.centre2()).norm()
    }

    /// The exchange partner with a2 and b2 swapped.
    pub fn exchanged(&self) -> Self {
        Self {
            a2: self.b2,
            b2: self.a2,
            ..*self
        }
    }

    /// The arguments with a1 and b1 swapped.
    pub fn swapped_first(&self) -> Self {
        Self {
            a1: self.b1,
            b1: self.a1,
            ..*self
        }
    }
}

/// Geometric degeneracy making the K integral diverge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Degeneracy {
    /// r1 = r2 and R1 = R2, e.g. (x0x0), (xyxy).
    Coincident,
    /// r1 = r2 with distinct centres, e.g. (x00−x).
    Displaced,
    /// r1 = −r2 ≠ 0 with a shared centre, e.g. (x00x), (xyyx).
    Antipodal,
    /// R1 = R2 with r1 ≠ ±r2.
    SharedCentre,
    /// r1 = −r2 ≠ 0 with distinct centres.
    AntipodalDisplaced,
}

/// Divergence class of a set of pair arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DivergenceClass {
    Regular,
    /// All four vectors vanish.
    Group0,
    /// One nonzero vector x among the arguments, up to sign.
    Group1(Degeneracy),
    /// Two or more nonzero vectors distinct up to sign.
    Group2(Degeneracy),
}

impl DivergenceClass {
    pub fn is_regular(self) -> bool {
        self == DivergenceClass::Regular
    }
}

fn same(u: &Vec3, v: &Vec3, scale: f64) -> bool {
    (u - v).norm() <= DEGENERACY_TOLERANCE * scale
}

/// Classifies arguments as regular or by their degeneracy.
pub fn classify_args(p: &PairArgs) -> DivergenceClass {
    let vectors = [p.a1, p.b1, p.a2, p.b2];
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return DivergenceClass::Group0;
    }
    let zero = Vec3::zeros();
    let same_centre = same(&p.centre1(), &p.centre2(), scale);
    let equal_rel = same(&p.rel1(), &p.rel2(), scale);
    let opposite_rel = same(&p.rel1(), &(-p.rel2()), scale) && !same(&p.rel1(), &zero, scale);
    let degeneracy = match (equal_rel, opposite_rel, same_centre) {
        (true, _, true) => Degeneracy::Coincident,
        (true, _, false) => Degeneracy::Displaced,
        (false, true, true) => Degeneracy::Antipodal,
        (false, true, false) => Degeneracy::AntipodalDisplaced,
        (false, false, true) => Degeneracy::SharedCentre,
        (false, false, false) => return DivergenceClass::Regular,
    };
    let mut distinct: Vec<Vec3> = Vec::with_capacity(4);
    for v in vectors.iter().filter(|v| !same(v, &zero, scale)) {
        if !distinct.iter().any(|d| same(d, v, scale) || same(d, &(-v), scale)) {
            distinct.push(*v);
        }
    }
    if distinct.len() == 1 {
        DivergenceClass::Group1(degeneracy)
    } else {
        DivergenceClass::Group2(degeneracy)
    }
}

/// Spin channel of the pair; fixes the exchange sign and trace weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpinChannel {
    /// Spatially even part, weight 1.
    Singlet,
    /// Spatially odd part, weight 3.
    Triplet,
}

impl SpinChannel {
    /// Trace of the spin projector.
    pub fn weight(self) -> u32 {
        match self {
            SpinChannel::Singlet => 1,
            SpinChannel::Triplet => 3,
        }
    }

    /// Sign of the exchange term.
    pub fn exchange_sign(self) -> f64 {
        match self {
            SpinChannel::Singlet => 1.0,
            SpinChannel::Triplet => -1.0,
        }
    }
}

/// Numerical settings of pair Green's function evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairConfig {
    pub gf: GfConfig,
    pub quad: QuadratureSpec,
}

impl Default for PairConfig {
    fn default() -> Self {
        Self {
            gf: GfConfig::default(),
            quad: QuadratureSpec::default().with_tolerances(1e-15, 1e-9),
        }
    }
}

impl PairConfig {
    pub fn free() -> Self {
        Self {
            gf: GfConfig::free(),
            ..Self::default()
        }
    }
}

/// The band integral over 0 < K < K_m and the evanescent tail K > K_m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGfParts {
    /// Zero for E ≤ 0.
    pub band: Estimate<Complex64>,
    /// Real up to rounding.
    pub tail: Estimate<Complex64>,
}

impl PairGfParts {
    pub fn value(&self) -> Complex64 {
        self.band.value + self.tail.value
    }

    pub fn err_est(&self) -> f64 {
        self.band.err_est + self.tail.err_est
    }
}

/// K·sin(K·R12)/(2π²·R12)/K, i.e. the weight per unit K with the K factor removed.
fn sinc_weight(k: f64, separation: f64) -> f64 {
    let x = k * separation;
    let sinc = if x.abs() < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    k * sinc / (2.0 * PI * PI)
}

fn panels_for(phase: f64) -> usize {
    ((phase / PI).ceil() as usize + 1).min(MAX_INITIAL_PANELS)
}

/// Band and tail contributions of the pair Green's function.
pub fn pair_gf_parts(p: &PairArgs, energy: f64, cfg: &PairConfig) -> Result<PairGfParts> {
    let class = classify_args(p);
    if !class.is_regular() {
        return Err(Error::DivergentArguments(class));
    }
    if !(p.c_cm > 0.0) || !energy.is_finite() {
        return Err(Error::InvalidInput(
            "c_cm must be positive and the energy finite".into(),
        ));
    }
    let rel1 = p.rel1();
    let rel2 = p.rel2();
    let separation = p.centre_separation();
    let distance = (rel1 - rel2).norm();
    let path = rel1.norm() + rel2.norm() + distance;
    let c_cm = p.c_cm;
    let c_k = cfg.gf.c_k;
    let zero = Estimate {
        value: Complex64::new(0.0, 0.0),
        err_est: 0.0,
    };

    let band_edge = if energy > 0.0 { (energy / c_cm).sqrt() } else { 0.0 };
    let band = if energy > 0.0 {
        // K = K_m sin θ: ε_K = E cos²θ, analytic in θ
        let spec = cfg
            .quad
            .with_transform(Transform::None)
            .with_panels(panels_for(band_edge * separation + (energy / c_k).sqrt() * path));
        integrate(
            |theta: f64| {
                let (s, c) = theta.sin_cos();
                let k = band_edge * s;
                let g = gc_closed(&rel1, &rel2, energy * c * c, &cfg.gf)?.value;
                Ok(g * (k * sinc_weight(k, separation) * band_edge * c))
            },
            0.0,
            FRAC_PI_2,
            &spec,
        )?
    } else {
        zero
    };

    // K = √(K_m² + t²): ε = min(E, 0) − c t², analytic in t
    let floor = energy.min(0.0);
    let q0 = (-floor / c_k).sqrt();
    let q_end = q0 + TAIL_DECAY_EXPONENT / distance;
    let t_end = ((c_k * q_end * q_end + floor) / c_cm).max(0.0).sqrt();
    let k_end = (band_edge * band_edge + t_end * t_end).sqrt();
    let spec = cfg
        .quad
        .with_transform(Transform::None)
        .with_panels(panels_for(k_end * separation));
    let tail = integrate(
        |t: f64| {
            let k = (band_edge * band_edge + t * t).sqrt();
            let g = gc_closed(&rel1, &rel2, floor - c_cm * t * t, &cfg.gf)?.value;
            Ok(g * (t * sinc_weight(k, separation)))
        },
        0.0,
        t_end,
        &spec,
    )?;
    Ok(PairGfParts { band, tail })
}

/// Two-electron Green's function g(a1 b1 a2 b2; E) for regular arguments.
pub fn pair_gf(p: &PairArgs, energy: f64, cfg: &PairConfig) -> Result<Complex64> {
    Ok(pair_gf_parts(p, energy, cfg)?.value())
}

/// Even (singlet) or odd (triplet) part ½[g(a1 b1 a2 b2) ± g(a1 b1 b2 a2)].
pub fn pair_gf_channel(p: &PairArgs, energy: f64, channel: SpinChannel, cfg: &PairConfig) -> Result<Complex64> {
    let partner = p.exchanged();
    for args in [p, &partner] {
        let class = classify_args(args);
        if !class.is_regular() {
            return Err(Error::DivergentArguments(class));
        }
    }
    let direct = pair_gf(p, energy, cfg)?;
    let exchange = pair_gf(&partner, energy, cfg)?;
    Ok((direct + exchange * channel.exchange_sign()) * 0.5)
}

/// |ψ_k00(0)|², the Coulomb-suppressed s-wave density at the origin.
pub fn origin_density(k: f64) -> f64 {
    if k <= 0.0 {
        return 0.0;
    }
    k / (PI * (2.0 * PI / k).exp_m1())
}

/// Default quadrature for the smooth spectral integrals.
fn spectral_spec() -> QuadratureSpec {
    QuadratureSpec::default().with_tolerances(1e-300, 1e-12)
}

/// Pair density of states at coincident origin, ρ₀(E) = −Im g₀⁺(E)/π.
pub fn g0_dos(energy: f64, c_cm: f64, c_k: f64) -> Result<f64> {
    if !(c_cm > 0.0 && c_k > 0.0) {
        return Err(Error::InvalidInput("kinetic coefficients must be positive".into()));
    }
    if !(energy > 0.0) {
        return Ok(0.0);
    }
    let k_max = (energy / c_k).sqrt();
    let integral = integrate_real(
        |alpha: f64| {
            let c = alpha.cos();
            Ok(origin_density(k_max * alpha.sin()) * c * c)
        },
        0.0,
        FRAC_PI_2,
        &spectral_spec(),
    )?;
    Ok(energy / (4.0 * PI * PI * (c_cm.powi(3) * c_k).sqrt()) * integral.value)
}

/// Re g₀⁺(E) as the Hilbert transform of the band-limited density ρ₀ on [0, W].
///
/// There is no natural bandwidth, so `cutoff` must be supplied.
pub fn g0_real(energy: f64, cutoff: Option<f64>, c_cm: f64, c_k: f64) -> Result<f64> {
    let width = cutoff.ok_or(Error::CutoffRequired)?;
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::InvalidInput(format!(
            "cutoff must be positive and finite, got {width}"
        )));
    }
    if !energy.is_finite() {
        return Err(Error::InvalidInput("energy must be finite".into()));
    }
    if energy == width {
        return Err(Error::InvalidInput(
            "Re g0 diverges logarithmically at the band edge".into(),
        ));
    }
    let spec = spectral_spec().with_tolerances(1e-300, 1e-10);
    let density = |e: f64| g0_dos(e, c_cm, c_k);
    // ∫ ρ₀(E′)/(E − E′) dE′
    if energy > 0.0 && energy < width {
        Ok(-principal_value(density, energy, 0.0, width, &spec)?.value)
    } else {
        Ok(integrate_real(|e| Ok(density(e)? / (energy - e)), 0.0, width, &spec)?.value)
    }
}
