//! Force-kernel timing across variants.
//!
//! Each configuration starts from the same state, integrates `warmup` steps,
//! then times only the force phase (packing included, neighbor-list builds
//! excluded) over `steps` steps. This is repeated and the minimum and median
//! are reported; speedups and efficiency use the minimum.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use tersoff_core::kernels::{KernelVariant, VariantTag};
use tersoff_core::system::{maxwell_boltzmann, velocity_verlet_step, ForceField, DEFAULT_DT};
use tersoff_core::{Evaluator, SimulationState};

use crate::error::{usage, Result};
use crate::options::{Format, InputArgs, KernelArgs, VariantArg};
use crate::report;

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Variants to time; reference and scalar always run as baselines.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "reference,scalar,vec-j,vec-i")]
    pub variant: Vec<VariantArg>,

    #[command(flatten)]
    pub kernel: KernelArgs,

    /// Timed steps per repetition.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,

    #[arg(long, default_value_t = 2)]
    pub warmup: usize,

    #[arg(long, default_value_t = 5)]
    pub repetitions: usize,

    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,

    /// Initial temperature (K), so that atoms move during the timed steps.
    #[arg(long, default_value_t = 300.0)]
    pub temperature: f64,

    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,

    /// Also write PREFIX.txt, PREFIX.csv and PREFIX.json.
    #[arg(long, value_name = "PREFIX")]
    pub save: Option<PathBuf>,
}

/// One row of the report. Field order is the CSV column order.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BenchRow {
    pub variant: String,
    pub backend: String,
    pub width: usize,
    pub precision: String,
    pub atoms: usize,
    pub steps: usize,
    /// Minimum over repetitions.
    pub time_s: f64,
    pub speedup_ref: f64,
    pub speedup_scalar: f64,
    /// `speedup_scalar / width`.
    pub efficiency: f64,
    pub lane_util: f64,
    pub time_median_s: f64,
    /// After the initial evaluation; equal across repetitions.
    pub potential_energy: f64,
}

/// Timing of one configuration.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub variant: KernelVariant,
    pub times: Vec<f64>,
    pub lane_util: f64,
    pub potential_energy: f64,
}

impl Measurement {
    pub fn min(&self) -> f64 {
        self.times.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn median(&self) -> f64 {
        let mut t = self.times.clone();
        t.sort_by(f64::total_cmp);
        let n = t.len();
        if n % 2 == 1 {
            t[n / 2]
        } else {
            0.5 * (t[n / 2 - 1] + t[n / 2])
        }
    }
}

fn configurations(args: &BenchArgs) -> Result<Vec<KernelVariant>> {
    let precision = args.kernel.precision();
    let mut out = vec![KernelVariant::reference(precision), KernelVariant::scalar_opt(precision)];
    let widths: Vec<Option<usize>> =
        if args.kernel.width.is_empty() { vec![None] } else { args.kernel.width.iter().map(|&w| Some(w)).collect() };
    for &v in &args.variant {
        let tag: VariantTag = v.into();
        if !tag.is_vectorized() {
            continue;
        }
        for &w in &widths {
            let variant = args.kernel.variant_of(tag, w)?;
            if !out.contains(&variant) {
                out.push(variant);
            }
        }
    }
    Ok(out)
}

fn measure(
    args: &BenchArgs,
    start: &SimulationState,
    table: &tersoff_core::ParamTable,
    variant: KernelVariant,
) -> Result<Measurement> {
    let mut counter = Evaluator::new(table.clone(), variant)?.with_skin(args.kernel.skin)?.instrumented(true);
    let first = counter.evaluate(start)?;
    let lane_util = counter.work_counts().lane_utilization();

    let mut times = Vec::with_capacity(args.repetitions);
    for _ in 0..args.repetitions {
        let mut state = start.clone();
        let mut ff = args.kernel.evaluator(table.clone(), variant)?;
        ff.compute_forces(&mut state)?;
        for _ in 0..args.warmup {
            velocity_verlet_step(&mut state, args.dt, &mut ff)?;
        }
        ff.reset_stats();
        for _ in 0..args.steps {
            velocity_verlet_step(&mut state, args.dt, &mut ff)?;
        }
        times.push(ff.times().force.as_secs_f64());
    }
    Ok(Measurement { variant, times, lane_util, potential_energy: first.potential_energy })
}

pub fn rows(measurements: &[Measurement], atoms: usize, steps: usize) -> Vec<BenchRow> {
    let baseline = |tag: VariantTag| measurements.iter().find(|m| m.variant.tag == tag).map(Measurement::min);
    let t_ref = baseline(VariantTag::Reference).unwrap_or(f64::NAN);
    let t_scalar = baseline(VariantTag::ScalarOpt).unwrap_or(f64::NAN);
    measurements
        .iter()
        .map(|m| {
            let t = m.min();
            let speedup_scalar = t_scalar / t;
            BenchRow {
                variant: m.variant.tag.name().into(),
                backend: m.variant.backend.name().into(),
                width: m.variant.width(),
                precision: m.variant.precision().name().into(),
                atoms,
                steps,
                time_s: t,
                speedup_ref: t_ref / t,
                speedup_scalar,
                efficiency: speedup_scalar / m.variant.width() as f64,
                lane_util: m.lane_util,
                time_median_s: m.median(),
                potential_energy: m.potential_energy,
            }
        })
        .collect()
}

pub fn execute(args: &BenchArgs) -> Result<Vec<BenchRow>> {
    if args.repetitions == 0 || args.steps == 0 {
        return Err(usage("bench needs at least one step and one repetition"));
    }
    let (mut state, table) = args.input.load()?;
    if args.temperature > 0.0 {
        maxwell_boltzmann(&mut state, args.temperature, args.input.seed)?;
    }
    let measurements =
        configurations(args)?.into_iter().map(|v| measure(args, &state, &table, v)).collect::<Result<Vec<_>>>()?;
    Ok(rows(&measurements, state.n_atoms(), args.steps))
}

pub fn cmd_bench(args: &BenchArgs, stdout: &mut dyn Write) -> Result<()> {
    let rows = execute(args)?;
    if let Some(prefix) = &args.save {
        for (format, ext) in [(Format::Table, "txt"), (Format::Csv, "csv"), (Format::Json, "json")] {
            let mut f = std::fs::File::create(prefix.with_extension(ext))?;
            report::write_bench(&mut f, &rows, format)?;
        }
    }
    report::write_bench(stdout, &rows, args.format)
}
