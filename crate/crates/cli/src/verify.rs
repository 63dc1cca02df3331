//! Invariant suites over one structure: finite-difference gradients,
//! cross-variant equivalence, width independence and NVE conservation.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use tersoff_core::kernels::{compute, BackendSpec, ForceEnergyResult, KernelVariant, VariantTag, EMULATED_WIDTHS};
use tersoff_core::simd::NATIVE_AVAILABLE;
use tersoff_core::system::{maxwell_boltzmann, run, RunConfig, DEFAULT_DT};
use tersoff_core::{vec3, NeighborList, ParamTable, Precision, SimulationState};

use crate::error::{usage, CliError, Result};
use crate::options::{Format, InputArgs, KernelArgs, VariantArg};

/// Faults for testing that the checks can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Negate the forces of the selected variant.
    ForceSign,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Variant for the gradient and conservation checks.
    #[arg(long, value_enum, default_value = "vec-i")]
    pub variant: VariantArg,

    #[command(flatten)]
    pub kernel: KernelArgs,

    /// Multiplies every threshold; 0 demands exact results.
    #[arg(long, default_value_t = 1.0)]
    pub tolerance_scale: f64,

    /// NVE steps for the conservation check.
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,

    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,

    /// Initial temperature (K) of the conservation run.
    #[arg(long, default_value_t = 300.0)]
    pub temperature: f64,

    /// Atoms whose force components are checked by finite differences.
    #[arg(long, default_value_t = 24)]
    pub fd_atoms: usize,

    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,

    /// Also write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,

    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    /// Worst observed value of the checked quantity.
    pub value: f64,
    pub threshold: f64,
    /// `threshold - value`; negative when the check fails.
    pub margin: f64,
    pub passed: bool,
    /// Where `value` was observed.
    pub worst: String,
}

impl Check {
    fn new(name: &str, value: f64, threshold: f64, worst: String) -> Self {
        Check { name: name.into(), value, threshold, margin: threshold - value, passed: value <= threshold, worst }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerifyReport {
    pub structure: String,
    pub atoms: usize,
    pub variant: String,
    pub tolerance_scale: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Finite-difference step (Å).
const FD_STEP: f64 = 1e-5;

struct Ctx<'a> {
    state: &'a SimulationState,
    table: &'a ParamTable,
    nl: NeighborList,
    scale: f64,
    faulty: Option<KernelVariant>,
}

impl Ctx<'_> {
    fn eval(&self, v: &KernelVariant, state: &SimulationState) -> Result<ForceEnergyResult> {
        let mut r = compute(v, state, &self.nl, self.table)?;
        if self.faulty.as_ref() == Some(v) {
            r.forces.iter_mut().flatten().for_each(|f| *f = -*f);
        }
        Ok(r)
    }
}

fn all_variants(precision: Precision) -> Vec<KernelVariant> {
    let mut out = vec![KernelVariant::reference(precision), KernelVariant::scalar_opt(precision)];
    for tag in [VariantTag::VecJ, VariantTag::VecI] {
        let mut backends = vec![BackendSpec::scalar(precision)];
        for w in EMULATED_WIDTHS {
            backends.push(BackendSpec::emulated(w, precision));
            backends.push(BackendSpec::emulated_strict(w, precision));
        }
        if NATIVE_AVAILABLE {
            backends.push(BackendSpec::native(precision));
        }
        out.extend(backends.into_iter().map(|b| KernelVariant { tag, backend: b }));
    }
    out
}

fn max_force_diff(a: &ForceEnergyResult, b: &ForceEnergyResult) -> f64 {
    a.forces.iter().zip(&b.forces).flat_map(|(f, g)| (0..3).map(move |k| (f[k] - g[k]).abs())).fold(0.0, f64::max)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn gradient(ctx: &Ctx, variant: &KernelVariant, fd_atoms: usize) -> Result<Check> {
    let state = ctx.state;
    let n = state.n_atoms();
    let analytic = ctx.eval(variant, state)?;
    // FD of the same kernel in double precision
    let energy_variant = match variant.precision() {
        Precision::Double => *variant,
        Precision::Single => KernelVariant::reference(Precision::Double),
    };
    let double = variant.precision() == Precision::Double;
    let reach = ctx.table.cutoff() + 0.01;
    let picks: Vec<usize> =
        if n <= fd_atoms { (0..n).collect() } else { (0..fd_atoms).map(|s| s * n / fd_atoms).collect() };

    let (mut worst, mut at) = (0.0, String::from("no significant component"));
    for &a in &picks {
        // e_i only depends on atoms within the cutoff of i
        let local: Vec<usize> = (0..n)
            .filter(|&i| i == a || vec3::norm(state.sim_box.delta(state.positions[a], state.positions[i])) < reach)
            .collect();
        for c in 0..3 {
            let energy_at = |offset: f64| -> Result<f64> {
                let mut moved = state.clone();
                moved.positions[a][c] += offset;
                let r = compute(&energy_variant, &moved, &ctx.nl, ctx.table)?;
                Ok(local.iter().map(|&i| r.atom_energy[i]).sum())
            };
            let fd = -(energy_at(FD_STEP)? - energy_at(-FD_STEP)?) / (2.0 * FD_STEP);
            let f = analytic.forces[a][c];
            let err = if double {
                if fd.abs() <= 1e-4 {
                    continue;
                }
                rel(f, fd)
            } else {
                (f - fd).abs()
            };
            if err >= worst {
                worst = err;
                at = format!("atom {a} axis {c}: analytic {f} vs difference {fd}");
            }
        }
    }
    let (name, threshold) = if double { ("gradient (relative)", 1e-6) } else { ("gradient (eV/A)", 1e-3) };
    Ok(Check::new(name, worst, threshold * ctx.scale, at))
}

fn equivalence(ctx: &Ctx) -> Result<Vec<Check>> {
    let reference = ctx.eval(&KernelVariant::reference(Precision::Double), ctx.state)?;
    let mut checks = Vec::new();
    for (precision, e_tol, f_tol) in [(Precision::Double, 1e-10, 1e-8), (Precision::Single, 1e-4, 1e-3)] {
        let (mut e_worst, mut e_at, mut f_worst, mut f_at) = (0.0, String::new(), 0.0, String::new());
        for v in all_variants(precision) {
            let r = ctx.eval(&v, ctx.state)?;
            let e = rel(r.potential_energy, reference.potential_energy);
            let f = max_force_diff(&r, &reference);
            if e >= e_worst {
                (e_worst, e_at) = (e, v.to_string());
            }
            if f >= f_worst {
                (f_worst, f_at) = (f, v.to_string());
            }
        }
        checks.push(Check::new(
            &format!("equivalence {precision} energy (relative)"),
            e_worst,
            e_tol * ctx.scale,
            e_at,
        ));
        checks.push(Check::new(&format!("equivalence {precision} forces (eV/A)"), f_worst, f_tol * ctx.scale, f_at));
    }
    Ok(checks)
}

fn width_independence(ctx: &Ctx) -> Result<Vec<Check>> {
    let opt = ctx.eval(&KernelVariant::scalar_opt(Precision::Double), ctx.state)?;
    let (mut spread, mut spread_at) = (0.0, String::new());
    let (mut bitwise, mut bitwise_at) = (0.0, String::from("identical"));
    for tag in [VariantTag::VecJ, VariantTag::VecI] {
        let one = KernelVariant { tag, backend: BackendSpec::emulated_strict(1, Precision::Double) };
        let base = ctx.eval(&one, ctx.state)?;
        if base.potential_energy.to_bits() != opt.potential_energy.to_bits() || base.forces != opt.forces {
            // nonzero even when the difference underflows
            let diff = (base.potential_energy - opt.potential_energy).abs().max(max_force_diff(&base, &opt));
            (bitwise, bitwise_at) = (diff.max(bitwise).max(f64::MIN_POSITIVE), format!("{one} vs scalar"));
        }
        for w in EMULATED_WIDTHS {
            let v = KernelVariant { tag, backend: BackendSpec::emulated_strict(w, Precision::Double) };
            let e = rel(ctx.eval(&v, ctx.state)?.potential_energy, base.potential_energy);
            if e >= spread {
                (spread, spread_at) = (e, v.to_string());
            }
        }
    }
    Ok(vec![
        Check::new("width independence (relative)", spread, 1e-12 * ctx.scale, spread_at),
        Check::new("strict W=1 equals scalar (max difference)", bitwise, 0.0, bitwise_at),
    ])
}

fn conservation(
    args: &VerifyArgs,
    variant: KernelVariant,
    start: &SimulationState,
    table: &ParamTable,
) -> Result<Vec<Check>> {
    let mut state = start.clone();
    if args.temperature > 0.0 {
        maxwell_boltzmann(&mut state, args.temperature, args.input.seed)?;
    }
    let n = state.n_atoms() as f64;
    let mut ff = args.kernel.evaluator(table.clone(), variant)?;
    let summary = run(&mut state, &mut ff, &RunConfig::nve(args.dt, args.steps), &mut |_, _| Ok(()))?;
    let s = args.tolerance_scale;
    let at = format!("{} steps of {} fs", args.steps, args.dt);
    Ok(vec![
        Check::new("NVE energy drift (relative)", summary.max_relative_drift(), 1e-4 * s, at.clone()),
        Check::new("NVE net force (eV/A)", summary.max_net_force(), 1e-9 * n * s, at.clone()),
        Check::new("NVE momentum (amu A/fs)", summary.max_momentum_change(), 1e-9 * n * s, at),
    ])
}

pub fn execute(args: &VerifyArgs) -> Result<VerifyReport> {
    if !(args.tolerance_scale >= 0.0) {
        return Err(usage("--tolerance-scale must be >= 0"));
    }
    let (state, table) = args.input.load()?;
    let variant = args.kernel.variant(args.variant.into())?;
    let nl = NeighborList::build(&state.positions, &state.sim_box, table.cutoff(), args.kernel.skin.max(1e-3))?;
    let faulty = args.inject_fault.map(|_| variant);
    let ctx = Ctx { state: &state, table: &table, nl, scale: args.tolerance_scale, faulty };

    let mut checks = vec![gradient(&ctx, &variant, args.fd_atoms)?];
    checks.extend(equivalence(&ctx)?);
    checks.extend(width_independence(&ctx)?);
    checks.extend(conservation(args, variant, &state, &table)?);
    Ok(VerifyReport {
        structure: args.input.structure.clone(),
        atoms: state.n_atoms(),
        variant: variant.to_string(),
        tolerance_scale: args.tolerance_scale,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

pub fn write_report(out: &mut dyn Write, report: &VerifyReport, format: Format) -> Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(report)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for c in &report.checks {
                w.serialize(c)?;
            }
            w.flush()?;
        }
        Format::Table => {
            writeln!(out, "{} atoms from {}, {}", report.atoms, report.structure, report.variant)?;
            for c in &report.checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{mark}  {:<44} {:>12.3e} <= {:<10.3e} {}", c.name, c.value, c.threshold, c.worst)?;
            }
        }
    }
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<()> {
    let report = execute(args)?;
    if let Some(path) = &args.report {
        std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    write_report(stdout, &report, args.format)?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(CliError::Verification(failed.join(", ")))
    }
}
