//! Whittaker functions ℳ_{κ,μ} (Buchholz normalization) and W_{κ,μ} for
//! half-integer μ, with first derivatives and a Wronskian monitor.
//!
//! Internally W is carried as Ŵ = Γ(μ + 1/2 - κ)·W, so that the Wronskian
//! of the pair (Ŵ, ℳ) is exactly one. Values are stored as a mantissa pair
//! plus a real log-scale to survive the exponential growth of ℳ and decay
//! of W on the positive real axis.
//!
//! Evaluation regimes:
//!
//! * W: asymptotic series in 1/z where it converges to machine precision;
//!   otherwise the logarithmic (Tricomi) series where that sum is well
//!   conditioned; otherwise the asymptotic value at a larger radius on the
//!   same ray is carried inward by Taylor steps of the Whittaker equation;
//!   for large |κ| near the origin, where none of these converge, the Laplace
//!   integral of the Tricomi function on a rotated path.
//! * ℳ: Kummer series where well conditioned; on the positive real axis the
//!   dominant asymptotic series for large argument; otherwise the series
//!   value at a smaller radius is carried outward by Taylor steps.

use num_complex::Complex64;

use super::gamma::{digamma, ln_gamma};
use super::hyp1f1::{asymptotic_sum, kummer_series};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec, Transform};

/// Largest tolerated cancellation ratio Σ|terms| / |Σ terms| in a series.
const SERIES_CONDITION_LIMIT: f64 = 8.0;
/// Above this ratio a series value is not returned even as a fallback.
const SERIES_CONDITION_FALLBACK: f64 = 1e8;
/// Relative accuracy demanded from an asymptotic series.
const ASYMPTOTIC_TARGET: f64 = 2e-17;
/// Largest radius tried when searching for an asymptotic starting point.
const MAX_ASYMPTOTIC_RADIUS: f64 = 8192.0;
/// Largest |z| summed directly by the Kummer series.
const MAX_SERIES_RADIUS: f64 = 60.0;
/// Taylor step length in units of the local wavelength scale.
const STEP_PHASE: f64 = 2.0;
const MAX_TAYLOR_TERMS: usize = 400;
/// Relative quadrature tolerance of the Laplace-integral regime.
const LAPLACE_TOLERANCE: f64 = 1e-13;

/// Index pair (κ, μ) of a Whittaker function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittakerIndex {
    kappa: Complex64,
    mu: f64,
}

impl WhittakerIndex {
    /// Builds an index; `mu` must be a non-negative half-integer with 2μ+1 ≥ 2.
    pub fn new(kappa: Complex64, mu: f64) -> Result<Self> {
        let two_mu = 2.0 * mu;
        if !(mu >= 0.5 && two_mu == two_mu.round() && two_mu % 2.0 == 1.0) {
            return Err(Error::InvalidInput(format!("mu = {mu} is not a positive half-integer")));
        }
        if !(kappa.re.is_finite() && kappa.im.is_finite()) {
            return Err(Error::InvalidInput("kappa must be finite".into()));
        }
        Ok(Self { kappa, mu })
    }

    /// The Coulomb index (κ, l + 1/2).
    pub fn coulomb(kappa: Complex64, l: u32) -> Self {
        Self {
            kappa,
            mu: l as f64 + 0.5,
        }
    }

    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Orbital number l = μ - 1/2.
    pub fn l(&self) -> u32 {
        (self.mu - 0.5).round() as u32
    }

    /// Kummer parameter a = μ + 1/2 - κ.
    pub fn a(&self) -> Complex64 {
        Complex64::new(self.mu + 0.5, 0.0) - self.kappa
    }

    fn n(&self) -> usize {
        (2.0 * self.mu).round() as usize
    }
}

/// A value/derivative pair stored as `(val, der) · exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub val: Complex64,
    pub der: Complex64,
    pub log_scale: f64,
}

impl Scaled {
    fn new(val: Complex64, der: Complex64, log_scale: f64) -> Self {
        let mut s = Self { val, der, log_scale };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let size = self.val.norm().max(self.der.norm());
        if size > 0.0 && size.is_finite() && !(1e-30..=1e30).contains(&size) {
            self.val /= size;
            self.der /= size;
            self.log_scale += size.ln();
        }
    }

    fn is_finite(&self) -> bool {
        self.val.re.is_finite()
            && self.val.im.is_finite()
            && self.der.re.is_finite()
            && self.der.im.is_finite()
            && self.log_scale.is_finite()
    }

    /// Unscaled value.
    pub fn value(&self) -> Complex64 {
        self.val * self.log_scale.exp()
    }

    /// Unscaled derivative.
    pub fn derivative(&self) -> Complex64 {
        self.der * self.log_scale.exp()
    }
}

/// Ŵ = Γ(a)·W and ℳ at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPair {
    pub w_hat: Scaled,
    pub m: Scaled,
}

impl ScaledPair {
    /// Ŵ·ℳ′ − ℳ·Ŵ′, which equals one exactly.
    pub fn wronskian(&self) -> Complex64 {
        let mant = self.w_hat.val * self.m.der - self.m.val * self.w_hat.der;
        mant * (self.w_hat.log_scale + self.m.log_scale).exp()
    }

    /// |Ŵ·ℳ′ − ℳ·Ŵ′ − 1|.
    pub fn relative_residual(&self) -> f64 {
        (self.wronskian() - 1.0).norm()
    }
}

/// Unscaled Whittaker pair with derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittakerEval {
    pub w: Complex64,
    pub w_prime: Complex64,
    pub m: Complex64,
    pub m_prime: Complex64,
    /// |W·ℳ′ − ℳ·W′ − 1/Γ(μ + 1/2 − κ)|
    pub wronskian_residual: f64,
}

/// How a Wronskian violation is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WronskianMode {
    /// Return an error.
    #[default]
    Strict,
    /// Log a warning and keep the value.
    Warn,
}

/// Wronskian monitor configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WronskianCheck {
    pub tolerance: f64,
    pub mode: WronskianMode,
}

impl Default for WronskianCheck {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            mode: WronskianMode::Strict,
        }
    }
}

impl WronskianCheck {
    pub fn warn(tolerance: f64) -> Self {
        Self {
            tolerance,
            mode: WronskianMode::Warn,
        }
    }

    pub(crate) fn enforce(&self, residual: f64, context: impl FnOnce() -> String) -> Result<()> {
        if residual <= self.tolerance {
            return Ok(());
        }
        match self.mode {
            WronskianMode::Strict => Err(Error::WronskianViolation {
                residual,
                tolerance: self.tolerance,
            }),
            WronskianMode::Warn => {
                log::warn!(
                    "Wronskian residual {residual:e} above {:e} at {}",
                    self.tolerance,
                    context()
                );
                Ok(())
            }
        }
    }
}

fn exp_split(exponent: Complex64) -> (Complex64, f64) {
    (Complex64::from_polar(1.0, exponent.im), exponent.re)
}

/// Ŵ from the asymptotic expansion, if it converges at z.
fn w_asymptotic(idx: &WhittakerIndex, z: Complex64, ln_gamma_a: Complex64) -> Option<Scaled> {
    let kappa = idx.kappa;
    let mu = idx.mu;
    let neg_inv_z = -z.inv();
    let (sum, weighted) = asymptotic_sum(
        |s| (mu + 0.5 - kappa + s) * (0.5 - mu - kappa + s) / (s + 1.0) * neg_inv_z,
        ASYMPTOTIC_TARGET,
    )?;
    let (phase, log_scale) = exp_split(ln_gamma_a - z * 0.5 + kappa * z.ln());
    let inv_z = z.inv();
    let val = phase * sum;
    let der = phase * ((kappa * inv_z - 0.5) * sum - weighted * inv_z);
    let out = Scaled::new(val, der, log_scale);
    out.is_finite().then_some(out)
}

struct SeriesValue {
    value: Scaled,
    condition: f64,
}

/// Ŵ from the logarithmic series of the Tricomi function.
fn w_log_series(idx: &WhittakerIndex, z: Complex64) -> Result<Option<SeriesValue>> {
    let n = idx.n();
    let nf = n as f64;
    let a = idx.a();
    let inv_z = z.inv();
    let ln_z = z.ln();

    // (-1)^{n+1} (a-n)_n / n!
    let mut prefactor = Complex64::new(if (n + 1).is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0);
    for j in 0..n {
        prefactor *= (a - nf + j as f64) / (j as f64 + 1.0);
    }

    let mut gu = Complex64::new(0.0, 0.0);
    let mut gu_der = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;

    if prefactor.norm() > 0.0 {
        // ψ(a+k) − ψ(1+k) − ψ(n+1+k), advanced by recurrence
        let mut psi_a = digamma(a)?;
        let euler = 0.577_215_664_901_532_9;
        let mut psi_one = -euler;
        let mut psi_n = -euler + (1..=n).map(|j| 1.0 / j as f64).sum::<f64>();
        let mut term = prefactor;
        let mut converged = false;
        for k in 0..10_000usize {
            let kf = k as f64;
            let bracket = ln_z + psi_a - psi_one - psi_n;
            let contribution = term * bracket;
            gu += contribution;
            gu_der += (contribution * kf + term) * inv_z;
            abs_sum += contribution.norm();
            let next = term * (a + kf) * z / ((nf + 1.0 + kf) * (kf + 1.0));
            psi_a += (a + kf).inv();
            psi_one += 1.0 / (kf + 1.0);
            psi_n += 1.0 / (nf + 1.0 + kf);
            let ratio = ((a + kf + 1.0) * z / ((nf + 2.0 + kf) * (kf + 2.0))).norm();
            term = next;
            if term.norm() == 0.0 {
                converged = true;
                break;
            }
            let bound = term.norm() * (ln_z.norm() + psi_a.norm() + psi_n + psi_one.abs() + 1.0);
            if ratio < 0.5 && bound <= 0.25 * f64::EPSILON * gu.norm().max(abs_sum * 1e-300) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Ok(None);
        }
    }

    // Σ_{k=1}^{n} (k-1)! (1-a+k)_{n-k} / (n-k)! z^{-k}
    let mut inv_pow = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        inv_pow *= inv_z;
        let mut coeff = Complex64::new(1.0, 0.0);
        for j in 1..k {
            coeff *= j as f64;
        }
        for j in 0..(n - k) {
            coeff *= (1.0 - a + k as f64 + j as f64) / (j as f64 + 1.0);
        }
        let t = coeff * inv_pow;
        gu += t;
        gu_der -= t * (k as f64) * inv_z;
        abs_sum += t.norm();
    }

    // Ŵ = e^{-z/2} z^{μ+1/2} Γ(a)U
    let power = idx.l() as f64 + 1.0;
    let (phase, log_scale) = exp_split(-z * 0.5 + ln_z * power);
    let val = phase * gu;
    let der = phase * ((power * inv_z - 0.5) * gu + gu_der);
    let value = Scaled::new(val, der, log_scale);
    if !value.is_finite() || gu.norm() == 0.0 {
        return Ok(None);
    }
    Ok(Some(SeriesValue {
        value,
        condition: abs_sum / gu.norm(),
    }))
}

/// ℳ from the Kummer series.
fn m_series(idx: &WhittakerIndex, z: Complex64) -> Result<Option<SeriesValue>> {
    let b = Complex64::new(2.0 * idx.mu + 1.0, 0.0);
    let Some(sum) = kummer_series(idx.a(), b, z) else {
        return Ok(None);
    };
    let power = idx.l() as f64 + 1.0;
    let ln_gamma_b = ln_gamma(b)?;
    let (phase, log_scale) = exp_split(-z * 0.5 + z.ln() * power - ln_gamma_b);
    let inv_z = z.inv();
    let val = phase * sum.value;
    let der = phase * ((power * inv_z - 0.5) * sum.value + sum.derivative);
    let value = Scaled::new(val, der, log_scale);
    if !value.is_finite() {
        return Ok(None);
    }
    Ok(Some(SeriesValue {
        condition: sum.condition(),
        value,
    }))
}

/// ℳ from the dominant large-argument expansion on the positive real axis.
fn m_asymptotic_real(idx: &WhittakerIndex, z: Complex64, ln_gamma_a: Complex64) -> Option<Scaled> {
    if z.im != 0.0 || z.re < 40.0 {
        return None;
    }
    let kappa = idx.kappa;
    let mu = idx.mu;
    let inv_z = z.inv();
    let (sum, weighted) = asymptotic_sum(
        |s| (0.5 - mu + kappa + s) * (0.5 + mu + kappa + s) / (s + 1.0) * inv_z,
        ASYMPTOTIC_TARGET,
    )?;
    let (phase, log_scale) = exp_split(z * 0.5 - kappa * z.ln() - ln_gamma_a);
    let val = phase * sum;
    let der = phase * ((0.5 - kappa * inv_z) * sum - weighted * inv_z);
    let out = Scaled::new(val, der, log_scale);
    out.is_finite().then_some(out)
}

/// Carries a solution of the Whittaker equation from `from` to `to` along
/// their common ray by Taylor steps. Positions are tracked by radius so that
/// step points near the origin carry no cancellation error.
fn continue_ode(idx: &WhittakerIndex, from: Complex64, start: Scaled, to: Complex64) -> Option<Scaled> {
    let kappa = idx.kappa;
    let shift = idx.mu * idx.mu - 0.25;
    let unit = from / from.norm();
    let target = to.norm();
    let mut radius = from.norm();
    let mut state = start;
    if radius == target {
        return Some(state);
    }
    let outward = target > radius;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); MAX_TAYLOR_TERMS + 3];
    while radius != target {
        let z0 = if radius == from.norm() { from } else { unit * radius };
        let inv = z0.inv();
        let local = (0.25 - kappa * inv - shift * inv * inv).norm().sqrt();
        let h_len = (0.5 * radius).min(STEP_PHASE / local.max(1e-300));
        let next_radius = if outward {
            if radius + h_len >= target {
                target
            } else {
                radius + h_len
            }
        } else if radius - h_len <= target {
            target
        } else {
            radius - h_len
        };
        let next_z = if next_radius == target { to } else { unit * next_radius };
        let h = next_z - z0;

        let q0 = z0 * z0 * 0.25 - kappa * z0 + shift;
        let q1 = z0 * 0.5 - kappa;
        let q2 = 0.25;
        let z0sq = z0 * z0;
        let (h2, h3, h4) = (h * h, h * h * h, h * h * h * h);
        coeffs[0] = state.val;
        coeffs[1] = state.der * h;
        let mut value = coeffs[0] + coeffs[1];
        let mut derivative_h = coeffs[1];
        let scale = state.val.norm().max((state.der * h).norm());
        let mut quiet = 0;
        let mut converged = false;
        for n in 0..MAX_TAYLOR_TERMS {
            let nf = n as f64;
            let mut rhs = (h2 * q0 - h2 * nf * (nf - 1.0)) * coeffs[n] - h * z0 * 2.0 * (nf + 1.0) * nf * coeffs[n + 1];
            if n >= 1 {
                rhs += h3 * q1 * coeffs[n - 1];
            }
            if n >= 2 {
                rhs += h4 * q2 * coeffs[n - 2];
            }
            let next = rhs / (z0sq * (nf + 2.0) * (nf + 1.0));
            coeffs[n + 2] = next;
            value += next;
            derivative_h += next * (nf + 2.0);
            let size = value.norm().max(derivative_h.norm()).max(scale * 1e-300);
            if next.norm() * (nf + 2.0) <= 0.1 * f64::EPSILON * size {
                quiet += 1;
                if quiet >= 3 {
                    converged = true;
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        if !converged {
            return None;
        }
        state = Scaled::new(value, derivative_h / h, state.log_scale);
        if !state.is_finite() {
            return None;
        }
        radius = next_radius;
    }
    Some(state)
}

/// Ŵ from the Laplace integral of the Tricomi function,
/// Γ(a)·U(a, b, z) = ∫₀^∞ e^{−zt} t^{a−1} (1+t)^{b−a−1} dt with b = 2μ + 1,
/// valid for Re a > 0. The path is rotated onto t = s·e^{−i arg z} so that
/// e^{−zt} decays without oscillation.
fn w_laplace(idx: &WhittakerIndex, z: Complex64) -> Result<Option<Scaled>> {
    let a = idx.a();
    let b = 2.0 * idx.mu + 1.0;
    if a.re <= 0.0 || z.re < 0.0 {
        return Ok(None);
    }
    let rotation = Complex64::from_polar(1.0, -z.arg());
    let size = z.norm();
    let exponent = |s: f64| {
        let t = rotation * s;
        (a - 1.0) * t.ln() + (b - a - 1.0) * (t + 1.0).ln() - size * s
    };
    // locate the peak of the integrand on a logarithmic grid
    let (mut peak, mut peak_log) = (1.0, f64::NEG_INFINITY);
    for j in 0..=400 {
        let s = (-30.0 + 0.15 * j as f64).exp() / size.clamp(1e-300, 1e300);
        let l = exponent(s).re;
        if l > peak_log {
            peak_log = l;
            peak = s;
        }
    }
    if !peak_log.is_finite() {
        return Ok(None);
    }
    // the integrand is normalised to about one at its peak, so the integral
    // is of the order of the shorter of the peak position and the decay length
    let split = peak.max(1.0 / size);
    let spec = QuadratureSpec {
        max_depth: 64,
        ..QuadratureSpec::default()
    }
    .with_tolerances(LAPLACE_TOLERANCE * 1e-2 * split.min(1.0 / size), LAPLACE_TOLERANCE);
    let mut head_value = Complex64::new(0.0, 0.0);
    let mut head_moment = Complex64::new(0.0, 0.0);
    for (moment, target) in [(false, &mut head_value), (true, &mut head_moment)] {
        let integrand = |s: f64| {
            let w = (exponent(s) - peak_log).exp() * rotation;
            Ok(if moment { w * rotation * s } else { w })
        };
        let head = integrate(integrand, 0.0, split, &spec);
        let tail = integrate(
            integrand,
            split,
            f64::INFINITY,
            &spec.with_transform(Transform::InverseTail),
        );
        match (head, tail) {
            (Ok(h), Ok(t)) => *target = h.value + t.value,
            _ => return Ok(None),
        }
    }
    // Ŵ = e^{−z/2} z^{b/2} I, Ŵ′ = e^{−z/2} z^{b/2} [(b/(2z) − 1/2) I − ∫ t e^{−zt}…]
    let (phase, log_scale) = exp_split(-z * 0.5 + z.ln() * (0.5 * b));
    let val = phase * head_value;
    let der = phase * ((b * 0.5 / z - 0.5) * head_value - head_moment);
    let out = Scaled::new(val, der, log_scale + peak_log);
    Ok(out.is_finite().then_some(out))
}

fn compute_w_hat(idx: &WhittakerIndex, z: Complex64, ln_gamma_a: Complex64) -> Result<Scaled> {
    if let Some(w) = w_asymptotic(idx, z, ln_gamma_a) {
        return Ok(w);
    }
    let series = w_log_series(idx, z)?;
    if let Some(s) = &series {
        if s.condition <= SERIES_CONDITION_LIMIT {
            return Ok(s.value);
        }
    }
    let unit = z / z.norm();
    let mut radius = (2.0 * z.norm()).max(8.0);
    while radius <= MAX_ASYMPTOTIC_RADIUS {
        let start = unit * radius;
        if let Some(w) = w_asymptotic(idx, start, ln_gamma_a) {
            if let Some(out) = continue_ode(idx, start, w, z) {
                return Ok(out);
            }
            break;
        }
        radius *= 2.0;
    }
    if let Some(w) = w_laplace(idx, z)? {
        return Ok(w);
    }
    match series {
        Some(s) if s.condition <= SERIES_CONDITION_FALLBACK => Ok(s.value),
        _ => Err(Error::NonConvergence {
            what: "Whittaker W",
            detail: format!("no stable regime at z = {z}, kappa = {}", idx.kappa),
        }),
    }
}

fn compute_m(idx: &WhittakerIndex, z: Complex64, ln_gamma_a: Complex64) -> Result<Scaled> {
    let direct = if z.norm() <= MAX_SERIES_RADIUS {
        m_series(idx, z)?
    } else {
        None
    };
    if let Some(s) = &direct {
        if s.condition <= SERIES_CONDITION_LIMIT {
            return Ok(s.value);
        }
    }
    if let Some(m) = m_asymptotic_real(idx, z, ln_gamma_a) {
        return Ok(m);
    }
    let unit = z / z.norm();
    let mut radius = z.norm().min(MAX_SERIES_RADIUS) * 0.5;
    while radius > 1e-3 {
        let start = unit * radius;
        if let Some(s) = m_series(idx, start)? {
            if s.condition <= SERIES_CONDITION_LIMIT {
                if let Some(out) = continue_ode(idx, start, s.value, z) {
                    return Ok(out);
                }
                break;
            }
        }
        radius *= 0.5;
    }
    match direct {
        Some(s) if s.condition <= SERIES_CONDITION_FALLBACK => Ok(s.value),
        _ => Err(Error::NonConvergence {
            what: "Whittaker M",
            detail: format!("no stable regime at z = {z}, kappa = {}", idx.kappa),
        }),
    }
}

/// Ŵ = Γ(μ+1/2−κ)·W and ℳ at z, in log-scaled form.
pub fn whittaker_scaled(idx: &WhittakerIndex, z: Complex64) -> Result<ScaledPair> {
    if z.norm() == 0.0 || !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidInput(format!("Whittaker argument z = {z}")));
    }
    let ln_gamma_a = ln_gamma(idx.a())?;
    let w_hat = compute_w_hat(idx, z, ln_gamma_a)?;
    let m = compute_m(idx, z, ln_gamma_a)?;
    Ok(ScaledPair { w_hat, m })
}

/// ℳ, W and derivatives at z with the default Wronskian check.
pub fn whittaker_pair(idx: &WhittakerIndex, z: Complex64) -> Result<WhittakerEval> {
    whittaker_pair_checked(idx, z, &WronskianCheck::default())
}

/// ℳ, W and derivatives at z with an explicit Wronskian check.
pub fn whittaker_pair_checked(idx: &WhittakerIndex, z: Complex64, check: &WronskianCheck) -> Result<WhittakerEval> {
    let pair = whittaker_scaled(idx, z)?;
    let ln_gamma_a = ln_gamma(idx.a())?;
    let w_factor = (Complex64::new(pair.w_hat.log_scale, 0.0) - ln_gamma_a).exp();
    let m_factor = pair.m.log_scale.exp();
    let w = pair.w_hat.val * w_factor;
    let w_prime = pair.w_hat.der * w_factor;
    let m = pair.m.val * m_factor;
    let m_prime = pair.m.der * m_factor;
    let values = [w, w_prime, m, m_prime];
    if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Overflow("unscaled Whittaker pair"));
    }
    let target = (-ln_gamma_a).exp();
    let wronskian_residual = (w * m_prime - m * w_prime - target).norm();
    check.enforce(wronskian_residual, || {
        format!("z = {z}, kappa = {}, mu = {}", idx.kappa, idx.mu)
    })?;
    Ok(WhittakerEval {
        w,
        w_prime,
        m,
        m_prime,
        wronskian_residual,
    })
}
