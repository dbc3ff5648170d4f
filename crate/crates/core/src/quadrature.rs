//! Adaptive one-dimensional integration: Gauss–Kronrod 7/15 with global
//! bisection, endpoint and semi-infinite substitutions, and Cauchy principal
//! values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Upper bound on the number of live panels, independent of depth.
const MAX_PANELS: usize = 20_000;

/// Change of variables applied before subdivision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Transform {
    #[default]
    None,
    /// x = a + (b − a) sin θ, θ ∈ [0, π/2]; removes inverse-square-root
    /// behaviour at the upper end.
    SinEndpoint,
    /// ∫_a^∞: finite part up to c = max(a, 1) mapped directly, the rest by
    /// x = c/t, t ∈ (0, 1].
    InverseTail,
}

/// Tolerances and limits of one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_depth: u32,
    pub transform: Transform,
    /// Equal panels the interval is cut into before adaptation starts.
    pub initial_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-7,
            max_depth: 40,
            transform: Transform::None,
            initial_panels: 1,
        }
    }
}

impl QuadratureSpec {
    pub fn with_transform(self, transform: Transform) -> Self {
        Self { transform, ..self }
    }

    pub fn with_panels(self, initial_panels: usize) -> Self {
        Self { initial_panels, ..self }
    }

    pub fn with_tolerances(self, abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidInput("quadrature tolerances must be positive".into()));
        }
        if self.max_depth < 1 || self.initial_panels < 1 {
            return Err(Error::InvalidInput(
                "max_depth and initial_panels must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

/// An integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub err_est: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    /// Rounding floor of `error`; bisection cannot push below it.
    floor: f64,
    depth: u32,
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn gk15<F>(f: &mut F, a: f64, b: f64, depth: u32) -> Result<Panel>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.norm() * WGK[7];
    let mut values = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 7];
    for (j, node) in XGK.iter().take(7).enumerate() {
        let dx = half * node;
        let lo = f(center - dx)?;
        let hi = f(center + dx)?;
        values[j] = (lo, hi);
        kronrod += (lo + hi) * WGK[j];
        abs_sum += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (lo + hi) * WG[j / 2];
        }
    }
    if !finite(kronrod) {
        return Err(Error::Overflow("quadrature integrand"));
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).norm();
    for (j, (lo, hi)) in values.iter().enumerate() {
        asc += WGK[j] * ((lo - mean).norm() + (hi - mean).norm());
    }
    let scale = half.abs();
    let value = kronrod * half;
    let resasc = asc * scale;
    let resabs = abs_sum * scale;
    let mut error = ((kronrod - gauss) * half).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let floor = if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        50.0 * f64::EPSILON * resabs
    } else {
        0.0
    };
    error = error.max(floor);
    Ok(Panel {
        a,
        b,
        value,
        error,
        floor,
        depth,
    })
}

/// Global adaptive bisection of [a, b] for a smooth integrand.
fn adapt<F>(f: &mut F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate<Complex64>>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let n = spec.initial_panels;
    let width = (b - a) / n as f64;
    let mut panels = Vec::with_capacity(4 * n + 16);
    for i in 0..n {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n { b } else { a + width * (i + 1) as f64 };
        panels.push(gk15(f, lo, hi, 0)?);
    }
    loop {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        // once every panel sits on its rounding floor, refinement cannot help
        let at_floor = panels.iter().all(|p| p.error <= p.floor);
        if err <= spec.target(total.norm()) || at_floor {
            if at_floor && err > spec.target(total.norm()) {
                log::debug!("quadrature limited by rounding: err_est {err:e}");
            }
            return Ok(Estimate {
                value: total,
                err_est: err,
            });
        }
        // largest error first; ties resolved by position
        let (worst, panel) =
            panels.iter().enumerate().fold(
                (0, panels[0]),
                |best, (i, p)| if p.error > best.1.error { (i, *p) } else { best },
            );
        if panel.depth >= spec.max_depth || panels.len() >= MAX_PANELS {
            return Err(Error::ToleranceNotMet {
                err_est: err,
                target: spec.target(total.norm()),
            });
        }
        let mid = 0.5 * (panel.a + panel.b);
        let left = gk15(f, panel.a, mid, panel.depth + 1)?;
        let right = gk15(f, mid, panel.b, panel.depth + 1)?;
        panels[worst] = left;
        panels.insert(worst + 1, right);
    }
}

/// ∫_a^b f(x) dx for a complex-valued integrand.
///
/// With [`Transform::InverseTail`] the upper limit must be `f64::INFINITY`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate<Complex64>>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    spec.validate()?;
    if a.is_nan() || b.is_nan() {
        return Err(Error::InvalidInput("integration limits must not be NaN".into()));
    }
    match spec.transform {
        Transform::None => {
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidInput(
                    "infinite limits need the InverseTail transform".into(),
                ));
            }
            if a == b {
                return Ok(Estimate {
                    value: Complex64::new(0.0, 0.0),
                    err_est: 0.0,
                });
            }
            adapt(&mut f, a, b, spec)
        }
        Transform::SinEndpoint => {
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidInput("SinEndpoint needs finite limits".into()));
            }
            let span = b - a;
            let mut g = |theta: f64| Ok(f(a + span * theta.sin())? * (span * theta.cos()));
            adapt(&mut g, 0.0, std::f64::consts::FRAC_PI_2, spec)
        }
        Transform::InverseTail => {
            if !(a.is_finite() && b == f64::INFINITY) {
                return Err(Error::InvalidInput(
                    "InverseTail integrates from a finite a to +inf".into(),
                ));
            }
            let split = if a > 0.0 { a } else { 1.0 };
            let head = if split > a {
                adapt(&mut f, a, split, spec)?
            } else {
                Estimate {
                    value: Complex64::new(0.0, 0.0),
                    err_est: 0.0,
                }
            };
            let mut g = |t: f64| Ok(f(split / t)? * (split / (t * t)));
            let tail = adapt(&mut g, 0.0, 1.0, spec)?;
            Ok(Estimate {
                value: head.value + tail.value,
                err_est: head.err_est + tail.err_est,
            })
        }
    }
}

/// ∫_a^b f(x) dx for a real integrand.
pub fn integrate_real<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let est = integrate(|x| f(x).map(|v| Complex64::new(v, 0.0)), a, b, spec)?;
    Ok(Estimate {
        value: est.value.re,
        err_est: est.err_est,
    })
}

/// Cauchy principal value PV∫_a^b f(x)/(x − x0) dx.
///
/// The symmetric neighbourhood [x0 − h, x0 + h] is folded onto
/// ∫_0^h (f(x0 + u) − f(x0 − u))/u du, which is regular; the remainder of the
/// interval is integrated directly.
pub fn principal_value<F>(mut f: F, x0: f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a < x0 && x0 < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!(
            "principal value needs a < x0 < b, got {a}, {x0}, {b}"
        )));
    }
    let inner_spec = spec.with_transform(Transform::None);
    let h = (x0 - a).min(b - x0);
    let inner = integrate_real(|u| Ok((f(x0 + u)? - f(x0 - u)?) / u), 0.0, h, &inner_spec)?;
    let outer = if x0 - a > b - x0 {
        integrate_real(|x| Ok(f(x)? / (x - x0)), a, x0 - h, &inner_spec)?
    } else if b - x0 > x0 - a {
        integrate_real(|x| Ok(f(x)? / (x - x0)), x0 + h, b, &inner_spec)?
    } else {
        Estimate {
            value: 0.0,
            err_est: 0.0,
        }
    };
    Ok(Estimate {
        value: inner.value + outer.value,
        err_est: inner.err_est + outer.err_est,
    })
}
