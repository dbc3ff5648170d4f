//! The three subcommands: grid validation, evaluation and table assembly.

use pairgf::coulomb_gf::{GfConfig, Interaction, NuConvention};
use pairgf::ldos::{rho_batch, rho_free_origin, rho_single_refs, LdosConfig, LdosPoint};
use pairgf::pair_gf::{g0_dos, g0_real, CM_COEFFICIENT};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{FaultChoice, FigR0Args, Format, LdosArgs, NuChoice, SelfcheckArgs};
use crate::checks::{run_suite, Fault, SuiteReport};
use crate::error::{CliError, CliResult};
use crate::output::{Header, Table};

/// Relative-motion kinetic coefficient in atomic units.
const ATOMIC_C_K: f64 = 1.0;

/// Evenly spaced grid from `lo` to `hi`; a single point is `lo`.
fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => lo * (step * i as f64).exp(),
        })
        .collect()
}

fn finite(name: &str, x: f64) -> CliResult<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Config(format!("--{name} must be finite, got {x}")))
    }
}

/// Checks a grid is nonempty and strictly increasing.
fn validate_grid(name: &str, grid: &[f64]) -> CliResult<()> {
    if grid.is_empty() {
        return Err(CliError::Config(format!("the {name} grid is empty")));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::Config(format!("the {name} grid must be strictly increasing")));
    }
    Ok(())
}

fn range_grid(name: &str, lo: f64, hi: f64, n: usize, log: bool) -> CliResult<Vec<f64>> {
    if n == 0 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    if n > 1 && !(hi > lo) {
        return Err(CliError::Config(format!(
            "the {name} range must satisfy min < max, got {lo} ≥ {hi}"
        )));
    }
    if log && !(lo > 0.0) {
        return Err(CliError::Config(format!(
            "a logarithmic {name} grid needs a positive minimum, got {lo}"
        )));
    }
    let grid = if log {
        log_grid(lo, hi, n)
    } else {
        linear_grid(lo, hi, n)
    };
    validate_grid(name, &grid)?;
    Ok(grid)
}

/// A computed dataset ready for output.
pub struct Dataset {
    pub header: Header,
    pub table: Table,
}

#[derive(Debug, Serialize)]
struct FigR0Config<'a> {
    energies: &'a [f64],
    spacing: &'static str,
    cutoff_w: Option<f64>,
    c_cm: f64,
    c_k: f64,
    quad_rel_tol: f64,
    format: Format,
}

/// Columns: E, rho0, rho_f0, rho_c0, rho_e0 and, with a cutoff, re_g0.
pub fn cmd_fig_r0(args: &FigR0Args, format: Format) -> CliResult<Dataset> {
    let energies = range_grid(
        "energy",
        finite("emin", args.emin)?,
        finite("emax", args.emax)?,
        args.n,
        args.log,
    )?;
    if let Some(w) = args.cutoff {
        if !(w > 0.0) || !w.is_finite() {
            return Err(CliError::Config(format!("--cutoff must be positive, got {w}")));
        }
    }
    let rows: Vec<CliResult<Vec<f64>>> = energies
        .par_iter()
        .map(|&energy| {
            let at = |e: pairgf::Error| CliError::at_point(e, format!("E = {energy}"));
            let rho0 = g0_dos(energy, CM_COEFFICIENT, ATOMIC_C_K).map_err(at)?;
            let refs = rho_single_refs(energy);
            let mut row = vec![energy, rho0, rho_free_origin(energy), refs.rho_c0, refs.rho_e0];
            if let Some(w) = args.cutoff {
                row.push(g0_real(energy, Some(w), CM_COEFFICIENT, ATOMIC_C_K).map_err(at)?);
            }
            Ok(row)
        })
        .collect();
    let mut columns = vec!["E", "rho0", "rho_f0", "rho_c0", "rho_e0"];
    if args.cutoff.is_some() {
        columns.push("re_g0");
    }
    let mut table = Table::new(columns);
    for row in rows {
        table.push(row?);
    }
    let config = FigR0Config {
        energies: &energies,
        spacing: if args.log { "log" } else { "linear" },
        cutoff_w: args.cutoff,
        c_cm: CM_COEFFICIENT,
        c_k: ATOMIC_C_K,
        quad_rel_tol: 1e-10,
        format,
    };
    let mut units = vec![
        ("E", "Hartree"),
        ("rho0, rho_f0", "r_B^-6 Hartree^-1"),
        ("rho_c0, rho_e0", "r_B^-3 Hartree^-1"),
    ];
    if args.cutoff.is_some() {
        units.push(("re_g0", "r_B^-6 Hartree^-1"));
    }
    Ok(Dataset {
        header: Header::new("fig-r0", units, serde_json::to_value(&config)?),
        table,
    })
}

#[derive(Debug, Serialize)]
struct LdosRunConfig<'a> {
    radii: &'a [f64],
    energies: &'a [f64],
    interaction: &'static str,
    nu_convention: NuChoice,
    c_cm: f64,
    c_k: f64,
    quad_rel_tol: f64,
    columns: &'a [&'static str],
    format: Format,
}

/// Which of the (r, E) arguments is swept.
enum LdosGrid {
    Radii { energy: f64, radii: Vec<f64> },
    Energies { r: f64, energies: Vec<f64> },
}

fn ldos_grid(args: &LdosArgs) -> CliResult<LdosGrid> {
    let has_energy_range = args.emin.is_some() || args.emax.is_some();
    let has_r_range = args.rmin.is_some() || args.rmax.is_some();
    match (args.energy, args.r) {
        (Some(_), Some(_)) if has_r_range || has_energy_range || args.n.is_some() => Err(CliError::Config(
            "--r with --energy is a single point; drop the grid options".into(),
        )),
        (Some(energy), Some(r)) => Ok(LdosGrid::Radii {
            energy: finite("energy", energy)?,
            radii: vec![finite("r", r)?],
        }),
        (Some(energy), None) => {
            if has_energy_range {
                return Err(CliError::Config(
                    "--energy fixes the energy; --emin/--emax need --r".into(),
                ));
            }
            let rmax = finite(
                "rmax",
                args.rmax
                    .ok_or_else(|| CliError::Config("--energy needs --rmax".into()))?,
            )?;
            let n = args.n.ok_or_else(|| CliError::Config("--energy needs --n".into()))?;
            if n == 0 {
                return Err(CliError::Config("--n must be at least 1".into()));
            }
            let rmin = finite("rmin", args.rmin.unwrap_or(rmax / n as f64))?;
            let radii = if n == 1 {
                vec![rmax]
            } else {
                range_grid("r", rmin, rmax, n, false)?
            };
            Ok(LdosGrid::Radii {
                energy: finite("energy", energy)?,
                radii,
            })
        }
        (None, Some(r)) => {
            if has_r_range {
                return Err(CliError::Config(
                    "--r fixes the distance; --rmin/--rmax need --energy".into(),
                ));
            }
            let missing = || CliError::Config("--r needs --energy, or --emin, --emax and --n".into());
            let emin = finite("emin", args.emin.ok_or_else(missing)?)?;
            let emax = finite("emax", args.emax.ok_or_else(missing)?)?;
            let n = args.n.ok_or_else(missing)?;
            Ok(LdosGrid::Energies {
                r: finite("r", r)?,
                energies: range_grid("energy", emin, emax, n, false)?,
            })
        }
        (None, None) => Err(CliError::Config("ldos needs --energy, --r, or both".into())),
    }
}

fn ldos_columns(args: &LdosArgs) -> Vec<&'static str> {
    if args.full {
        return vec![
            "r",
            "energy",
            "rho_plus",
            "rho_minus",
            "rho_even",
            "rho_odd",
            "rho_total",
            "rho_spinless",
        ];
    }
    let mut columns = vec!["r", "energy", "rho_plus"];
    if args.pseudo {
        columns.push("rho_minus");
    }
    if args.split {
        columns.extend(["rho_even", "rho_odd"]);
    }
    columns.extend(["rho_total", "rho_spinless"]);
    columns
}

fn ldos_field(p: &LdosPoint, column: &str) -> f64 {
    match column {
        "r" => p.r,
        "energy" => p.energy,
        "rho_plus" => p.rho_plus,
        "rho_minus" => p.rho_minus,
        "rho_even" => p.rho_even,
        "rho_odd" => p.rho_odd,
        "rho_total" => p.rho_total,
        "rho_spinless" => p.rho_spinless,
        other => unreachable!("unknown column {other}"),
    }
}

pub fn cmd_ldos(args: &LdosArgs, format: Format) -> CliResult<Dataset> {
    if !(args.ck > 0.0) || !args.ck.is_finite() {
        return Err(CliError::Config(format!("--ck must be positive, got {}", args.ck)));
    }
    if !(args.rel_tol > 0.0 && args.rel_tol < 1.0) {
        return Err(CliError::Config(format!(
            "--rel-tol must lie in (0, 1), got {}",
            args.rel_tol
        )));
    }
    let grid = ldos_grid(args)?;
    let (radii, energies, points): (Vec<f64>, Vec<f64>, Vec<(f64, f64)>) = match &grid {
        LdosGrid::Radii { energy, radii } => (
            radii.clone(),
            vec![*energy],
            radii.iter().map(|&r| (r, *energy)).collect(),
        ),
        LdosGrid::Energies { r, energies } => (vec![*r], energies.clone(), energies.iter().map(|&e| (*r, e)).collect()),
    };
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0)) {
        return Err(CliError::Config(format!("distances must be positive, got {r}")));
    }
    let base = LdosConfig::default();
    let cfg = LdosConfig {
        gf: GfConfig {
            c_k: args.ck,
            interaction: if args.free {
                Interaction::Free
            } else {
                Interaction::Coulomb
            },
            nu_convention: match args.nu {
                NuChoice::Unit => NuConvention::Unit,
                NuChoice::ReducedMass => NuConvention::ReducedMass,
            },
            ..base.gf
        },
        quad: base.quad.with_tolerances(base.quad.abs_tol, args.rel_tol),
        ..base
    };
    let columns = ldos_columns(args);
    let mut table = Table::new(columns.clone());
    for (result, (r, e)) in rho_batch(&points, &cfg).into_iter().zip(&points) {
        let point = result.map_err(|err| CliError::at_point(err, format!("r = {r}, E = {e}")))?;
        table.push(columns.iter().map(|c| ldos_field(&point, c)).collect());
    }
    let config = LdosRunConfig {
        radii: &radii,
        energies: &energies,
        interaction: if args.free { "free" } else { "coulomb" },
        nu_convention: args.nu,
        c_cm: cfg.c_cm,
        c_k: cfg.gf.c_k,
        quad_rel_tol: args.rel_tol,
        columns: &columns,
        format,
    };
    let units = vec![("r", "r_B"), ("energy", "Hartree"), ("rho_*", "r_B^-6 Hartree^-1")];
    Ok(Dataset {
        header: Header::new("ldos", units, serde_json::to_value(&config)?),
        table,
    })
}

/// Runs the oracle suite and wraps the report with a header.
pub fn cmd_selfcheck(args: &SelfcheckArgs) -> CliResult<(SuiteReport, Value)> {
    let fault = match args.inject_fault {
        None => Fault::None,
        Some(FaultChoice::Sign) => Fault::Sign,
    };
    let report = run_suite(args.strict, args.lmax, fault);
    let mut config = json!({ "strict": args.strict, "l_max": args.lmax });
    if fault != Fault::None {
        config["inject_fault"] = json!(format!("{fault:?}").to_lowercase());
    }
    let header = Header::new("selfcheck", vec![("residuals", "dimensionless")], config);
    let doc = json!({
        "header": header.to_json(),
        "passed": report.passed,
        "wronskian_max_residual": report.wronskian_max_residual,
        "checks": report.checks,
    });
    Ok((report, doc))
}
