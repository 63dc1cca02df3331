use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use tersoff_core::system::{maxwell_boltzmann, run, xyz, RunConfig, RunSummary, StretchSpec, DEFAULT_DT};
use tersoff_core::SimulationState;

use crate::error::{usage, Result};
use crate::options::{Format, InputArgs, KernelArgs, VariantArg};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[arg(long, value_enum, default_value = "vec-i")]
    pub variant: VariantArg,

    #[command(flatten)]
    pub kernel: KernelArgs,

    #[arg(long, default_value_t = 100)]
    pub steps: usize,

    /// Timestep (fs).
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,

    /// Initial Maxwell-Boltzmann temperature (K); 0 starts at rest.
    #[arg(long, default_value_t = 0.0)]
    pub temperature: f64,

    /// Grip separation speed (Å/fs); makes this a stretching run.
    #[arg(long)]
    pub stretch_speed: Option<f64>,

    /// Grip thickness at each end (Å).
    #[arg(long, default_value_t = 1.5)]
    pub grip_width: f64,

    /// Pulling axis.
    #[arg(long, value_enum, default_value = "z")]
    pub axis: Axis,

    /// XYZ trajectory file.
    #[arg(long)]
    pub dump: Option<PathBuf>,

    /// Steps between trajectory frames; the first and last step are always written.
    #[arg(long, default_value_t = 10)]
    pub dump_every: usize,

    /// Also write the JSON summary here.
    #[arg(long)]
    pub summary: Option<PathBuf>,

    /// table: summary lines, csv: per-step energies, json: summary.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Energies {
    pub potential: f64,
    pub kinetic: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Timings {
    pub neighbor_s: f64,
    pub force_s: f64,
    pub integrate_s: f64,
    pub wall_s: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RunReport {
    pub variant: String,
    pub backend: String,
    pub width: usize,
    pub precision: String,
    pub atoms: usize,
    pub steps: usize,
    pub dt: f64,
    pub stretch_speed: Option<f64>,
    pub initial: Energies,
    #[serde(rename = "final")]
    pub last: Energies,
    pub max_relative_drift: f64,
    pub max_net_force: f64,
    pub max_momentum_change: f64,
    pub neighbor_rebuilds: usize,
    pub force_evaluations: usize,
    pub times: Timings,
    /// Potential energy after the initial evaluation and every step (eV).
    pub potential_trace: Vec<f64>,
}

fn energies(r: &tersoff_core::system::StepRecord) -> Energies {
    Energies { potential: r.potential, kinetic: r.kinetic, total: r.total }
}

fn report(args: &RunArgs, variant: &tersoff_core::KernelVariant, state: &SimulationState, s: &RunSummary) -> RunReport {
    let first = s.records.first().expect("run records the initial state");
    let last = s.records.last().expect("run records the initial state");
    RunReport {
        variant: variant.tag.name().into(),
        backend: variant.backend.name().into(),
        width: variant.width(),
        precision: variant.precision().name().into(),
        atoms: state.n_atoms(),
        steps: args.steps,
        dt: args.dt,
        stretch_speed: args.stretch_speed,
        initial: energies(first),
        last: energies(last),
        max_relative_drift: s.max_relative_drift(),
        max_net_force: s.max_net_force(),
        max_momentum_change: s.max_momentum_change(),
        neighbor_rebuilds: s.times.rebuilds,
        force_evaluations: s.times.evaluations,
        times: Timings {
            neighbor_s: s.times.neighbor.as_secs_f64(),
            force_s: s.times.force.as_secs_f64(),
            integrate_s: s.integrate.as_secs_f64(),
            wall_s: s.wall.as_secs_f64(),
        },
        potential_trace: s.records.iter().map(|r| r.potential).collect(),
    }
}

pub fn execute(args: &RunArgs) -> Result<(RunReport, RunSummary)> {
    let (mut state, table) = args.input.load()?;
    if args.temperature < 0.0 {
        return Err(usage("temperature must be >= 0"));
    }
    if args.temperature > 0.0 {
        maxwell_boltzmann(&mut state, args.temperature, args.input.seed)?;
    }
    let variant = args.kernel.variant(args.variant.into())?;
    let mut ff = args.kernel.evaluator(table, variant)?;
    let stretch =
        args.stretch_speed.map(|speed| StretchSpec { axis: args.axis as usize, grip_width: args.grip_width, speed });
    let cfg = RunConfig { dt: args.dt, steps: args.steps, stretch };

    let mut dump = match &args.dump {
        Some(path) => Some(BufWriter::new(File::create(path)?)),
        None => None,
    };
    let every = args.dump_every.max(1);
    let steps = args.steps;
    let summary = run(&mut state, &mut ff, &cfg, &mut |s, rec| {
        if let Some(out) = dump.as_mut() {
            if rec.step % every == 0 || rec.step == steps {
                xyz::write_frame(out, s, &format!("step={} potential={}", rec.step, rec.potential))?;
            }
        }
        Ok(())
    })?;
    if let Some(mut out) = dump {
        out.flush()?;
    }
    Ok((report(args, &variant, &state, &summary), summary))
}

pub fn cmd_run(args: &RunArgs, stdout: &mut dyn Write) -> Result<()> {
    let (report, summary) = execute(args)?;
    if let Some(path) = &args.summary {
        std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    match args.format {
        Format::Json => writeln!(stdout, "{}", serde_json::to_string_pretty(&report)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(stdout);
            w.write_record(["step", "time_fs", "potential", "kinetic", "total"])?;
            for r in &summary.records {
                w.serialize((r.step, r.time, r.potential, r.kinetic, r.total))?;
            }
            w.flush()?;
        }
        Format::Table => {
            writeln!(
                stdout,
                "{} [{} W={} {}], {} atoms",
                report.variant, report.backend, report.width, report.precision, report.atoms
            )?;
            writeln!(stdout, "steps             {} x {} fs", report.steps, report.dt)?;
            writeln!(stdout, "E_pot initial     {}", report.initial.potential)?;
            writeln!(stdout, "E_pot final       {}", report.last.potential)?;
            writeln!(stdout, "E_total drift     {:e} (relative to |E_pot(0)|)", report.max_relative_drift)?;
            writeln!(stdout, "max |sum F|       {:e}", report.max_net_force)?;
            writeln!(stdout, "max momentum dev  {:e}", report.max_momentum_change)?;
            writeln!(stdout, "rebuilds          {}", report.neighbor_rebuilds)?;
            writeln!(
                stdout,
                "time (s)          force {:.4} neighbor {:.4} integrate {:.4} wall {:.4}",
                report.times.force_s, report.times.neighbor_s, report.times.integrate_s, report.times.wall_s
            )?;
        }
    }
    Ok(())
}
