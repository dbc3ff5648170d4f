//! Nyström discretisation of the channel-decoupled Dyson equation
//! G = g + g·U·G for spin-independent potentials.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pair_gf::{classify_args, pair_gf_channel, PairArgs, PairConfig, SpinChannel};
use crate::Vec3;

/// Default upper bound on the number of grid points.
pub const DEFAULT_GRID_CAP: usize = 512;
/// Default bound on the 1-norm condition number of I − g·U·W.
pub const DEFAULT_CONDITION_BOUND: f64 = 1e12;

/// Singlet and triplet projectors in the basis ↑↑, ↑↓, ↓↑, ↓↓.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinProjectors {
    pub singlet: Matrix4<f64>,
    pub triplet: Matrix4<f64>,
}

pub fn spin_projectors() -> SpinProjectors {
    let mut singlet = Matrix4::zeros();
    singlet[(1, 1)] = 0.5;
    singlet[(2, 2)] = 0.5;
    singlet[(1, 2)] = -0.5;
    singlet[(2, 1)] = -0.5;
    SpinProjectors {
        singlet,
        triplet: Matrix4::identity() - singlet,
    }
}

/// Electron-pair positions (a, b) with positive quadrature weights, closed
/// under the exchange a ↔ b.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    points: Vec<(Vec3, Vec3)>,
    weights: Vec<f64>,
    partners: Vec<usize>,
}

impl GridSpec {
    /// Builds a grid; exchange partners missing from `points` are appended
    /// with the weight of their original.
    pub fn new(points: Vec<(Vec3, Vec3)>, weights: Vec<f64>) -> Result<Self> {
        Self::with_cap(points, weights, DEFAULT_GRID_CAP)
    }

    pub fn with_cap(mut points: Vec<(Vec3, Vec3)>, mut weights: Vec<f64>, cap: usize) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::InvalidInput("grid must not be empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInput(format!("weights must be positive, got {w}")));
        }
        let original = points.len();
        let mut partners = vec![usize::MAX; original];
        for i in 0..original {
            if partners[i] != usize::MAX {
                continue;
            }
            let (a, b) = points[i];
            let found = (0..points.len()).find(|&j| points[j] == (b, a));
            let j = match found {
                Some(j) => j,
                None => {
                    points.push((b, a));
                    weights.push(weights[i]);
                    partners.push(usize::MAX);
                    points.len() - 1
                }
            };
            partners[i] = j;
            partners[j] = i;
        }
        if points.len() > cap {
            return Err(Error::InvalidInput(format!(
                "grid has {} points after symmetrisation, cap is {cap}",
                points.len()
            )));
        }
        Ok(Self {
            points,
            weights,
            partners,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(Vec3, Vec3)] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the exchanged point (b, a).
    pub fn partner(&self, i: usize) -> usize {
        self.partners[i]
    }
}

type ExternalPotential = Box<dyn Fn(&Vec3) -> f64 + Send + Sync>;
type PairPotential = Box<dyn Fn(&Vec3, &Vec3) -> f64 + Send + Sync>;

/// Spin-independent potential U(a, b) = V(a) + V(b) + u(a, b).
pub struct PotentialSpec {
    pub v_ext: ExternalPotential,
    pub u_pair: PairPotential,
}

impl std::fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("PotentialSpec { .. }")
    }
}

impl PotentialSpec {
    pub fn new(
        v_ext: impl Fn(&Vec3) -> f64 + Send + Sync + 'static,
        u_pair: impl Fn(&Vec3, &Vec3) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            v_ext: Box::new(v_ext),
            u_pair: Box::new(u_pair),
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, |_, _| 0.0)
    }

    pub fn total(&self, a: &Vec3, b: &Vec3) -> f64 {
        (self.v_ext)(a) + (self.v_ext)(b) + (self.u_pair)(a, b)
    }

    /// U at every grid point, checking the exchange symmetry of u.
    fn on_grid(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        grid.points
            .iter()
            .map(|(a, b)| {
                let forward = (self.u_pair)(a, b);
                let backward = (self.u_pair)(b, a);
                if (forward - backward).abs() > 1e-12 * forward.abs().max(backward.abs()).max(1e-300) {
                    return Err(Error::InvalidInput(
                        "pair potential is not symmetric under exchange".into(),
                    ));
                }
                let value = self.total(a, b);
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(Error::InvalidInput("potential is not finite on the grid".into()))
                }
            })
            .collect()
    }
}

/// Treatment of kernel entries whose bare Green's function diverges: the
/// diagonal (a b a b) and its exchange partner (a b b a).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SingularEntries {
    /// Raise `DivergentArguments`.
    #[default]
    Reject,
    /// Use the given regularised value on the diagonal and the channel sign
    /// times it on the exchange-partner entries.
    Regularised(Complex64),
}

/// Settings of a Dyson solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DysonConfig {
    pub pair: PairConfig,
    pub singular: SingularEntries,
    pub condition_bound: f64,
}

impl Default for DysonConfig {
    fn default() -> Self {
        Self {
            pair: PairConfig::default(),
            singular: SingularEntries::Reject,
            condition_bound: DEFAULT_CONDITION_BOUND,
        }
    }
}

/// The bare channel Green's function on a grid.
pub fn channel_kernel(
    grid: &GridSpec,
    energy: f64,
    channel: SpinChannel,
    cfg: &DysonConfig,
) -> Result<DMatrix<Complex64>> {
    let n = grid.len();
    let entries: Vec<Result<Complex64>> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let (a1, b1) = grid.points[i];
            let (a2, b2) = grid.points[j];
            let args = PairArgs::new(a1, b1, a2, b2);
            let singular = !classify_args(&args).is_regular() || !classify_args(&args.exchanged()).is_regular();
            match (singular, cfg.singular) {
                (true, SingularEntries::Regularised(value)) if j == i => Ok(value),
                (true, SingularEntries::Regularised(value)) if j == grid.partner(i) => {
                    Ok(value * channel.exchange_sign())
                }
                _ => pair_gf_channel(&args, energy, channel, &cfg.pair),
            }
        })
        .collect();
    let mut out = DMatrix::zeros(n, n);
    for (idx, e) in entries.into_iter().enumerate() {
        out[(idx / n, idx % n)] = e?;
    }
    Ok(out)
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves G = g + g·diag(U·w)·G for a given bare kernel g.
pub fn solve_with_kernel(
    g: &DMatrix<Complex64>,
    potential_weights: &[f64],
    condition_bound: f64,
) -> Result<DMatrix<Complex64>> {
    let n = g.nrows();
    if g.ncols() != n || potential_weights.len() != n {
        return Err(Error::InvalidInput("kernel and potential sizes differ".into()));
    }
    let mut system = -g.clone();
    for (j, uw) in potential_weights.iter().enumerate() {
        system.column_mut(j).scale_mut(*uw);
    }
    for i in 0..n {
        system[(i, i)] += Complex64::new(1.0, 0.0);
    }
    let norm = one_norm(&system);
    let inverse = system.clone().try_inverse().ok_or(Error::SingularSystem {
        condition: f64::INFINITY,
    })?;
    let condition = norm * one_norm(&inverse);
    if !(condition <= condition_bound) {
        return Err(Error::SingularSystem { condition });
    }
    let lu = system.lu();
    lu.solve(g).ok_or(Error::SingularSystem {
        condition: f64::INFINITY,
    })
}

/// U(a, b)·w at every grid point.
pub fn potential_weights(grid: &GridSpec, pot: &PotentialSpec) -> Result<Vec<f64>> {
    Ok(pot
        .on_grid(grid)?
        .into_iter()
        .zip(&grid.weights)
        .map(|(u, w)| u * w)
        .collect())
}

/// Dyson solution G in one spin channel on a grid.
pub fn dyson_solve(
    grid: &GridSpec,
    pot: &PotentialSpec,
    energy: f64,
    channel: SpinChannel,
    cfg: &DysonConfig,
) -> Result<DMatrix<Complex64>> {
    let g = channel_kernel(grid, energy, channel, cfg)?;
    solve_with_kernel(&g, &potential_weights(grid, pot)?, cfg.condition_bound)
}

/// Lifts grid matrices of both channels to spin space: Λ_s⊗even + Λ_t⊗odd.
pub fn lift_to_spin_space(even: &DMatrix<Complex64>, odd: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let p = spin_projectors();
    let to_complex = |m: &Matrix4<f64>| DMatrix::from_fn(4, 4, |i, j| Complex64::new(m[(i, j)], 0.0));
    to_complex(&p.singlet).kronecker(even) + to_complex(&p.triplet).kronecker(odd)
}

/// Solves the Dyson equation in the full two-spin space without using the
/// channel decoupling; `even` and `odd` are the bare channel kernels.
pub fn dyson_solve_spin_space(
    even: &DMatrix<Complex64>,
    odd: &DMatrix<Complex64>,
    potential_weights: &[f64],
    condition_bound: f64,
) -> Result<DMatrix<Complex64>> {
    let lifted = lift_to_spin_space(even, odd);
    let spin_weights: Vec<f64> = (0..4).flat_map(|_| potential_weights.iter().copied()).collect();
    solve_with_kernel(&lifted, &spin_weights, condition_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn max_abs(a: &DMatrix<Complex64>) -> f64 {
        a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn projector_algebra() {
        let p = spin_projectors();
        assert_eq!(p.singlet.trace(), 1.0);
        assert_eq!(p.triplet.trace(), 3.0);
        assert_eq!(p.singlet * p.triplet, Matrix4::zeros());
        assert_eq!(p.singlet * p.singlet, p.singlet);
        assert_eq!(p.triplet * p.triplet, p.triplet);
        assert_eq!(p.singlet + p.triplet, Matrix4::identity());
        assert_eq!(p.singlet, p.singlet.transpose());
    }

    #[test]
    fn grid_is_symmetrised() {
        let grid = GridSpec::new(
            vec![
                (v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)),
                (v(0.5, 0.5, 0.5), v(0.5, 0.5, 0.5)),
            ],
            vec![0.3, 0.7],
        )
        .unwrap();
        assert_eq!(grid.len(), 3);
        assert_eq!(grid.points()[2], (v(0.0, 1.0, 0.0), v(1.0, 0.0, 0.0)));
        assert_eq!(grid.weights()[2], 0.3);
        assert_eq!(grid.partner(0), 2);
        assert_eq!(grid.partner(2), 0);
        assert_eq!(grid.partner(1), 1);
    }

    #[test]
    fn grid_validation() {
        let p = vec![(v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0))];
        assert!(GridSpec::new(p.clone(), vec![0.0]).is_err());
        assert!(GridSpec::new(p.clone(), vec![1.0, 2.0]).is_err());
        assert!(GridSpec::with_cap(p, vec![1.0], 1).is_err());
        assert!(GridSpec::new(vec![], vec![]).is_err());
    }

    #[test]
    fn cross_channel_block_vanishes() {
        let p = spin_projectors();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 3;
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let lifted_u =
            DMatrix::<f64>::identity(4, 4).kronecker(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(u)));
        let s = DMatrix::from_fn(4, 4, |i, j| p.singlet[(i, j)]).kronecker(&DMatrix::<f64>::identity(n, n));
        let t = DMatrix::from_fn(4, 4, |i, j| p.triplet[(i, j)]).kronecker(&DMatrix::<f64>::identity(n, n));
        assert!((&s * &lifted_u * &t).norm() < 1e-12);
    }

    fn random_kernel(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2))
        })
    }

    #[test]
    fn zero_potential_returns_bare_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_kernel(&mut rng, 5);
        let solved = solve_with_kernel(&g, &[0.0; 5], DEFAULT_CONDITION_BOUND).unwrap();
        assert_eq!(solved, g);
    }

    #[test]
    fn scalar_geometric_series() {
        let g = DMatrix::from_element(1, 1, Complex64::new(0.3, -0.2));
        let uw = 1.7;
        let solved = solve_with_kernel(&g, &[uw], DEFAULT_CONDITION_BOUND).unwrap();
        let expected = g[(0, 0)] / (1.0 - g[(0, 0)] * uw);
        assert!((solved[(0, 0)] - expected).norm() < 1e-15);
    }

    #[test]
    fn singular_system_reported() {
        // g·U·w = 1 makes I − gUw singular
        let g = DMatrix::from_element(1, 1, Complex64::new(0.5, 0.0));
        assert!(matches!(
            solve_with_kernel(&g, &[2.0], DEFAULT_CONDITION_BOUND),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn spin_space_solve_matches_channels_for_random_kernels() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 4;
        let even = random_kernel(&mut rng, n);
        let odd = random_kernel(&mut rng, n);
        let uw: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let full = dyson_solve_spin_space(&even, &odd, &uw, DEFAULT_CONDITION_BOUND).unwrap();
        let ge = solve_with_kernel(&even, &uw, DEFAULT_CONDITION_BOUND).unwrap();
        let go = solve_with_kernel(&odd, &uw, DEFAULT_CONDITION_BOUND).unwrap();
        assert!(max_diff(&full, &lift_to_spin_space(&ge, &go)) < 1e-12);
    }

    #[test]
    fn born_series_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 4;
        let g = random_kernel(&mut rng, n);
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            u.iter().map(|x| Complex64::new(*x, 0.0)),
        ));
        let remainder = |lambda: f64| {
            let scaled: Vec<f64> = u.iter().map(|x| x * lambda).collect();
            let solved = solve_with_kernel(&g, &scaled, DEFAULT_CONDITION_BOUND).unwrap();
            let born = &g + &g * &diag * &g * Complex64::new(lambda, 0.0);
            max_abs(&(solved - born)) / (lambda * lambda)
        };
        let (a, b) = (remainder(1e-2), remainder(1e-3));
        assert!(a.is_finite() && b.is_finite());
        assert!((a - b).abs() < 0.05 * a, "{a} vs {b}");
    }

    fn small_grid() -> GridSpec {
        GridSpec::new(
            vec![
                (v(0.9, 0.1, 0.0), v(-0.4, 0.3, 0.2)),
                (v(0.2, -0.8, 0.5), v(0.6, 0.7, -0.9)),
            ],
            vec![0.4, 0.6],
        )
        .unwrap()
    }

    fn regularised() -> DysonConfig {
        DysonConfig {
            singular: SingularEntries::Regularised(Complex64::new(-0.05, -0.01)),
            ..DysonConfig::default()
        }
    }

    #[test]
    fn singular_entries_rejected_by_default() {
        let grid = small_grid();
        let r = channel_kernel(&grid, -1.0, SpinChannel::Singlet, &DysonConfig::default());
        assert!(matches!(r, Err(Error::DivergentArguments(_))));
    }

    #[test]
    fn pair_kernel_channels_decouple_in_spin_space() {
        let grid = small_grid();
        assert_eq!(grid.len(), 4);
        let cfg = regularised();
        let pot = PotentialSpec::new(|a| 0.3 * a.norm_squared(), |a, b| 1.0 / (a - b).norm());
        let uw = potential_weights(&grid, &pot).unwrap();
        let energy = -0.5;
        let even = channel_kernel(&grid, energy, SpinChannel::Singlet, &cfg).unwrap();
        let odd = channel_kernel(&grid, energy, SpinChannel::Triplet, &cfg).unwrap();
        let ge = solve_with_kernel(&even, &uw, cfg.condition_bound).unwrap();
        let go = solve_with_kernel(&odd, &uw, cfg.condition_bound).unwrap();
        let full = dyson_solve_spin_space(&even, &odd, &uw, cfg.condition_bound).unwrap();
        let scale = max_abs(&full);
        assert!(max_diff(&full, &lift_to_spin_space(&ge, &go)) < 1e-10 * scale.max(1.0));
        let zero = dyson_solve(&grid, &PotentialSpec::zero(), energy, SpinChannel::Singlet, &cfg).unwrap();
        assert_eq!(zero, even);
    }

    #[test]
    fn solved_channels_keep_exchange_symmetry() {
        let grid = small_grid();
        let cfg = regularised();
        let pot = PotentialSpec::new(|a| -0.2 * a.norm(), |a, b| 0.5 / (a - b).norm());
        for (channel, sign) in [(SpinChannel::Singlet, 1.0), (SpinChannel::Triplet, -1.0)] {
            let g = dyson_solve(&grid, &pot, 1.0, channel, &cfg).unwrap();
            let scale = max_abs(&g);
            for i in 0..grid.len() {
                let p = grid.partner(i);
                for j in 0..grid.len() {
                    assert!(
                        (g[(p, j)] - g[(i, j)] * sign).norm() < 1e-10 * scale,
                        "{channel:?} {i} {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn asymmetric_pair_potential_rejected() {
        let grid = small_grid();
        let pot = PotentialSpec::new(|_| 0.0, |a, _| a.x);
        assert!(potential_weights(&grid, &pot).is_err());
    }
}
