//! Oracle suite behind `pairgf selfcheck`. Every check compares a library
//! value against an independent reference and records its worst residual.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use pairgf::coulomb_gf::{gc_closed, gc_coincident_regular, gc_pw_sum, GfConfig, Parity};
use pairgf::dyson::{
    channel_kernel, dyson_solve, dyson_solve_spin_space, lift_to_spin_space, potential_weights, solve_with_kernel,
    spin_projectors, DysonConfig, GridSpec, PotentialSpec, SingularEntries,
};
use pairgf::ldos::rho_free;
use pairgf::pair_gf::SpinChannel;
use pairgf::quadrature::{integrate_real, QuadratureSpec, Transform};
use pairgf::special::{rgamma, whittaker_pair, WhittakerIndex};
use pairgf::Vec3;
use serde::Serialize;

pub const WRONSKIAN_TOLERANCE: f64 = 1e-8;
pub const FREE_REDUCTION_TOLERANCE: f64 = 1e-8;
pub const PARTIAL_WAVE_CHECK_TOLERANCE: f64 = 1e-6;
pub const COINCIDENCE_TOLERANCE: f64 = 1e-5;
pub const FREE_PAIR_TOLERANCE: f64 = 1e-4;
pub const CROSS_CHANNEL_TOLERANCE: f64 = 1e-12;
pub const SPIN_SPACE_TOLERANCE: f64 = 1e-10;
pub const ZERO_POTENTIAL_TOLERANCE: f64 = 1e-15;

/// Deliberate corruption of library values, used to prove the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Flip the sign of every value under test.
    Sign,
}

impl Fault {
    fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Fault::None => z,
            Fault::Sign => -z,
        }
    }

    fn apply_real(self, x: f64) -> f64 {
        self.apply(Complex64::new(x, 0.0)).re
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn from_residuals(name: &'static str, tolerance: f64, residuals: Result<Vec<f64>, String>) -> Self {
        match residuals {
            Ok(r) => {
                let max_residual = r.iter().copied().fold(0.0, f64::max);
                let finite = r.iter().all(|x| x.is_finite());
                Self {
                    name,
                    passed: finite && max_residual < tolerance,
                    max_residual: if finite { max_residual } else { f64::INFINITY },
                    tolerance,
                    samples: r.len(),
                    detail: None,
                }
            }
            Err(detail) => Self {
                name,
                passed: false,
                max_residual: f64::INFINITY,
                tolerance,
                samples: 0,
                detail: Some(detail),
            },
        }
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn text(e: pairgf::Error) -> String {
    e.to_string()
}

/// Logarithmically spaced points including both ends.
fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => lo * (step * i as f64).exp(),
        })
        .collect()
}

/// |W·M′ − M·W′ − 1/Γ(1−iν)| for μ = 1/2, ν = −1/k, z = −2ikr.
pub fn wronskian_sweep(fault: Fault) -> CheckResult {
    let ks = log_grid(0.1, 10.0, 15);
    let rs = log_grid(0.05, 20.0, 15);
    let residuals = ks
        .iter()
        .flat_map(|&k| rs.iter().map(move |&r| (k, r)))
        .map(|(k, r)| {
            let idx = WhittakerIndex::coulomb(Complex64::new(0.0, -1.0 / k), 0);
            let e = whittaker_pair(&idx, Complex64::new(0.0, -2.0 * k * r)).map_err(text)?;
            let computed = fault.apply(e.w) * e.m_prime - e.m * e.w_prime;
            Ok((computed - rgamma(idx.a())).norm())
        })
        .collect();
    CheckResult::from_residuals("wronskian_sweep", WRONSKIAN_TOLERANCE, residuals)
}

/// Deterministic points on a low-discrepancy sequence in [−1, 1).
fn sequence(i: usize, dim: usize) -> f64 {
    const ALPHAS: [f64; 7] = [
        0.618_033_988_749_895,
        0.414_213_562_373_095,
        0.732_050_807_568_877,
        0.236_067_977_499_79,
        0.645_751_311_064_591,
        0.316_624_790_355_4,
        0.605_551_275_463_989,
    ];
    let x = ((i + 1) as f64 * ALPHAS[dim]).fract();
    2.0 * x - 1.0
}

/// ν = 0 closed form against −e^{ikd}/(4πd) (and −e^{−qd}/(4πd) below zero).
pub fn free_reduction(fault: Fault) -> CheckResult {
    let cfg = GfConfig::free();
    let residuals = (0..20)
        .map(|i| {
            let r1 = Vec3::new(2.0 * sequence(i, 0), 2.0 * sequence(i, 1), 2.0 * sequence(i, 2));
            let r2 = Vec3::new(3.0 * sequence(i, 3), 3.0 * sequence(i, 4), 3.0 * sequence(i, 5));
            let energy = if i % 5 == 4 {
                -1.0 - sequence(i, 6).abs()
            } else {
                0.1 + 4.9 * (sequence(i, 6) + 1.0)
            };
            let d = (r1 - r2).norm();
            let ik = if energy > 0.0 {
                Complex64::new(0.0, energy.sqrt())
            } else {
                Complex64::new(-(-energy).sqrt(), 0.0)
            };
            let reference = -(ik * d).exp() / (4.0 * PI * d);
            let value = gc_closed(&r1, &r2, energy, &cfg).map_err(text)?.value;
            Ok(rel(fault.apply(value), reference))
        })
        .collect();
    CheckResult::from_residuals("free_reduction", FREE_REDUCTION_TOLERANCE, residuals)
}

/// (r1, r2, cos of the angle, E) samples of the partial-wave check. Radii
/// differ by at least a factor 1.6 so that forty waves converge.
pub const PARTIAL_WAVE_SAMPLES: [(f64, f64, f64, f64); 10] = [
    (1.0, 2.2, 1.0, 1.0),
    (0.5, 1.0, 0.3, 4.0),
    (2.0, 0.8, -0.5, 1.0),
    (1.5, 3.0, 0.0, 4.0),
    (0.5, 1.5, 0.8, 1.0),
    (3.0, 1.2, -0.9, 1.0),
    (0.7, 2.0, 0.6, 4.0),
    (1.0, 2.5, -0.2, 4.0),
    (4.0, 1.5, 0.45, 1.0),
    (5.0, 2.0, -1.0, 4.0),
];

/// Partial-wave sum to `l_max` against the closed form.
pub fn partial_waves(l_max: u32, fault: Fault) -> CheckResult {
    let cfg = GfConfig::default();
    let residuals = PARTIAL_WAVE_SAMPLES
        .iter()
        .map(|&(r1, r2, cos, energy)| {
            let sin = (1.0 - cos * cos).max(0.0).sqrt();
            let a = Vec3::new(0.0, 0.0, r1);
            let b = Vec3::new(r2 * sin, 0.0, r2 * cos);
            let closed = gc_closed(&a, &b, energy, &cfg).map_err(text)?.value;
            let sum = gc_pw_sum(r1, r2, cos, energy, l_max, Parity::All, &cfg).map_err(text)?;
            Ok(rel(fault.apply(sum), closed))
        })
        .collect();
    CheckResult::from_residuals("partial_waves", PARTIAL_WAVE_CHECK_TOLERANCE, residuals)
}

/// The coincidence finite part at (r = 1, E = 4) against Richardson
/// extrapolation of g(r, r + δ) + 1/(4πδ) in δ.
pub fn coincidence_extrapolation(fault: Fault) -> CheckResult {
    let cfg = GfConfig::default();
    let (r, energy) = (1.0, 4.0);
    let residual = (|| {
        let base = Vec3::new(0.0, 0.0, r);
        let dir = Vec3::new(0.6, 0.0, 0.8);
        let shifted = |delta: f64| -> Result<Complex64, String> {
            let g = gc_closed(&base, &(base + dir * delta), energy, &cfg)
                .map_err(text)?
                .value;
            Ok(g + 1.0 / (4.0 * PI * delta))
        };
        let (a, b, c) = (shifted(1e-2)?, shifted(1e-3)?, shifted(1e-4)?);
        let ab = (b * 10.0 - a) / 9.0;
        let bc = (c * 10.0 - b) / 9.0;
        let extrapolated = (bc * 100.0 - ab) / 99.0;
        let analytic = gc_coincident_regular(r, energy, &cfg).map_err(text)?;
        Ok(vec![rel(fault.apply(analytic), extrapolated)])
    })();
    CheckResult::from_residuals("coincidence_extrapolation", COINCIDENCE_TOLERANCE, residual)
}

/// Free-pair density from its Bessel closed form against an iterated 2D
/// quadrature of the sin-kernel integral, with sin(x)/x = ∫₀¹ cos(x u) du.
pub fn free_pair_bessel(fault: Fault) -> CheckResult {
    let (big_r, r, energy) = (1.0f64, 1.0f64, 4.0f64);
    let residual = (|| {
        let outer = QuadratureSpec::default()
            .with_tolerances(1e-300, 1e-10)
            .with_transform(Transform::SinEndpoint);
        let inner = QuadratureSpec::default().with_tolerances(1e-300, 1e-12);
        let integral = integrate_real(
            |big_k: f64| {
                let k = (energy - 0.25 * big_k * big_k).max(0.0).sqrt();
                let sinc = integrate_real(|u: f64| Ok((k * r * u).cos()), 0.0, 1.0, &inner)?.value;
                Ok(k * sinc / (4.0 * PI) * big_k * (big_k * big_r).sin() / big_r)
            },
            0.0,
            2.0 * energy.sqrt(),
            &outer,
        )
        .map_err(text)?;
        let oracle = integral.value / (2.0 * PI.powi(3));
        let value = rho_free(big_r, r, energy).map_err(text)?;
        Ok(vec![(fault.apply_real(value) - oracle).abs() / oracle.abs()])
    })();
    CheckResult::from_residuals("free_pair_bessel", FREE_PAIR_TOLERANCE, residual)
}

fn dyson_grid() -> GridSpec {
    GridSpec::new(
        vec![
            (Vec3::new(0.9, 0.1, 0.0), Vec3::new(-0.4, 0.3, 0.2)),
            (Vec3::new(0.2, -0.8, 0.5), Vec3::new(0.6, 0.7, -0.9)),
        ],
        vec![0.4, 0.6],
    )
    .expect("fixed grid is valid")
}

fn dyson_config() -> DysonConfig {
    DysonConfig {
        singular: SingularEntries::Regularised(Complex64::new(-0.05, -0.01)),
        ..DysonConfig::default()
    }
}

fn dyson_potential() -> PotentialSpec {
    PotentialSpec::new(|a| 0.3 * a.norm_squared(), |a, b| 1.0 / (a - b).norm())
}

/// Energy of the Dyson checks, below the band so the kernel is real-valued.
const DYSON_ENERGY: f64 = -0.5;

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn spin_blocks(n: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let p = spin_projectors();
    let lift = |m: &nalgebra::Matrix4<f64>| {
        DMatrix::from_fn(4, 4, |i, j| Complex64::new(m[(i, j)], 0.0)).kronecker(&DMatrix::<Complex64>::identity(n, n))
    };
    (lift(&p.singlet), lift(&p.triplet))
}

/// Singlet-triplet blocks of the full spin-space solution.
pub fn dyson_cross_channel(fault: Fault) -> CheckResult {
    let residual = (|| {
        let grid = dyson_grid();
        let cfg = dyson_config();
        let uw = potential_weights(&grid, &dyson_potential()).map_err(text)?;
        let even = channel_kernel(&grid, DYSON_ENERGY, SpinChannel::Singlet, &cfg).map_err(text)?;
        let odd = channel_kernel(&grid, DYSON_ENERGY, SpinChannel::Triplet, &cfg).map_err(text)?;
        let mut full = dyson_solve_spin_space(&even, &odd, &uw, cfg.condition_bound).map_err(text)?;
        if fault == Fault::Sign {
            // a sign error in one spin component breaks the block structure
            let n = grid.len();
            for j in 0..full.ncols() {
                for i in n..2 * n {
                    full[(i, j)] = -full[(i, j)];
                }
            }
        }
        let (s, t) = spin_blocks(grid.len());
        Ok(vec![(&s * &full * &t).norm(), (&t * &full * &s).norm()])
    })();
    CheckResult::from_residuals("dyson_cross_channel", CROSS_CHANNEL_TOLERANCE, residual)
}

/// Full spin-space solve against the channel-wise solutions lifted to spin space.
pub fn dyson_spin_space(fault: Fault) -> CheckResult {
    let residual = (|| {
        let grid = dyson_grid();
        let cfg = dyson_config();
        let uw = potential_weights(&grid, &dyson_potential()).map_err(text)?;
        let even = channel_kernel(&grid, DYSON_ENERGY, SpinChannel::Singlet, &cfg).map_err(text)?;
        let odd = channel_kernel(&grid, DYSON_ENERGY, SpinChannel::Triplet, &cfg).map_err(text)?;
        let solved_even = solve_with_kernel(&even, &uw, cfg.condition_bound).map_err(text)?;
        let solved_odd = solve_with_kernel(&odd, &uw, cfg.condition_bound).map_err(text)?;
        let full = dyson_solve_spin_space(&even, &odd, &uw, cfg.condition_bound).map_err(text)?;
        let assembled = lift_to_spin_space(&solved_even, &solved_odd).map(|z| fault.apply(z));
        Ok(vec![max_abs(&(full - &assembled)) / max_abs(&assembled)])
    })();
    CheckResult::from_residuals("dyson_spin_space", SPIN_SPACE_TOLERANCE, residual)
}

/// U = 0 must return the bare kernel.
pub fn dyson_zero_potential(fault: Fault) -> CheckResult {
    let residual = (|| {
        let grid = dyson_grid();
        let cfg = dyson_config();
        let mut out = Vec::new();
        for channel in [SpinChannel::Singlet, SpinChannel::Triplet] {
            let bare = channel_kernel(&grid, DYSON_ENERGY, channel, &cfg).map_err(text)?;
            let solved = dyson_solve(&grid, &PotentialSpec::zero(), DYSON_ENERGY, channel, &cfg)
                .map_err(text)?
                .map(|z| fault.apply(z));
            out.push(max_abs(&(solved - &bare)) / max_abs(&bare));
        }
        Ok(out)
    })();
    CheckResult::from_residuals("dyson_zero_potential", ZERO_POTENTIAL_TOLERANCE, residual)
}

/// Report of a full suite run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub wronskian_max_residual: f64,
    pub checks: Vec<CheckResult>,
}

pub fn run_suite(strict: bool, l_max: u32, fault: Fault) -> SuiteReport {
    let mut checks = vec![
        wronskian_sweep(fault),
        free_reduction(fault),
        partial_waves(l_max, fault),
        free_pair_bessel(fault),
        dyson_cross_channel(fault),
        dyson_spin_space(fault),
        dyson_zero_potential(fault),
    ];
    if strict {
        checks.push(coincidence_extrapolation(fault));
    }
    SuiteReport {
        passed: checks.iter().all(|c| c.passed),
        wronskian_max_residual: checks[0].max_residual,
        checks,
    }
}
