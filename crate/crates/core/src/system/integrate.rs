use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

use super::{SimulationState, ACCEL_PER_FORCE};

/// Default timestep for carbon (fs).
pub const DEFAULT_DT: f64 = 0.5;

/// Wall-clock time spent in each phase of force evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseTimes {
    pub neighbor: Duration,
    pub force: Duration,
    pub rebuilds: usize,
    pub evaluations: usize,
}

/// Anything that can fill in forces and potential energy.
pub trait ForceField {
    /// Sets `state.forces` and `state.potential_energy` for the current
    /// positions.
    fn compute_forces(&mut self, state: &mut SimulationState) -> Result<()>;

    fn phase_times(&self) -> PhaseTimes {
        PhaseTimes::default()
    }
}

/// Constant-velocity pulling of both ends of a structure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StretchSpec {
    /// 0, 1 or 2.
    pub axis: usize,
    /// Atoms within this distance of either end along `axis` form the grips (Å).
    pub grip_width: f64,
    /// Rate at which the grips separate (Å/fs); each moves at half of it.
    pub speed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    /// fs
    pub dt: f64,
    pub steps: usize,
    pub stretch: Option<StretchSpec>,
}

impl RunConfig {
    pub fn nve(dt: f64, steps: usize) -> Self {
        RunConfig { dt, steps, stretch: None }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("timestep must be positive, got {}", self.dt)));
        }
        if let Some(s) = &self.stretch {
            if s.axis > 2 || !(s.grip_width > 0.0) || !s.speed.is_finite() {
                return Err(Error::Config("stretch needs axis in 0..3, grip width > 0 and a finite speed".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// fs
    pub time: f64,
    pub potential: f64,
    pub kinetic: f64,
    pub total: f64,
    /// Sum of all forces (eV/Å).
    pub net_force: Vec3,
    /// amu Å/fs
    pub momentum: Vec3,
}

impl StepRecord {
    fn of(step: usize, state: &SimulationState) -> Self {
        let kinetic = state.kinetic_energy();
        StepRecord {
            step,
            time: state.time,
            potential: state.potential_energy,
            kinetic,
            total: state.potential_energy + kinetic,
            net_force: state.total_force(),
            momentum: state.momentum(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    /// Step 0 (initial evaluation) through the last step.
    pub records: Vec<StepRecord>,
    pub times: PhaseTimes,
    /// Position and velocity updates.
    pub integrate: Duration,
    pub wall: Duration,
}

impl RunSummary {
    /// Largest `|E_total(t) - E_total(0)| / |E_pot(0)|`.
    pub fn max_relative_drift(&self) -> f64 {
        let Some(first) = self.records.first() else { return 0.0 };
        let scale = first.potential.abs().max(f64::MIN_POSITIVE);
        self.records.iter().map(|r| (r.total - first.total).abs() / scale).fold(0.0, f64::max)
    }

    pub fn max_net_force(&self) -> f64 {
        self.records.iter().map(|r| vec3::norm(r.net_force)).fold(0.0, f64::max)
    }

    /// Largest deviation of any momentum component from its initial value.
    pub fn max_momentum_change(&self) -> f64 {
        let Some(first) = self.records.first() else { return 0.0 };
        self.records
            .iter()
            .flat_map(|r| (0..3).map(move |a| (r.momentum[a] - first.momentum[a]).abs()))
            .fold(0.0, f64::max)
    }
}

/// Per-atom grip assignment: `0` free, `-1` low end, `+1` high end.
fn grips(state: &SimulationState, spec: &StretchSpec) -> Result<Vec<i8>> {
    let (lo, hi) = state.bounds();
    let a = spec.axis;
    let side: Vec<i8> = state
        .positions
        .iter()
        .map(|p| {
            if p[a] <= lo[a] + spec.grip_width {
                -1
            } else if p[a] >= hi[a] - spec.grip_width {
                1
            } else {
                0
            }
        })
        .collect();
    if !side.contains(&-1) || !side.contains(&1) {
        return Err(Error::Config(format!("grip width {} Å leaves a grip empty", spec.grip_width)));
    }
    Ok(side)
}

fn check_forces(state: &SimulationState) -> Result<()> {
    if !state.potential_energy.is_finite() {
        return Err(Error::Numerical(format!(
            "potential energy became {} at t = {} fs",
            state.potential_energy, state.time
        )));
    }
    if let Some(i) = state.forces.iter().position(|f| f.iter().any(|x| !x.is_finite())) {
        return Err(Error::Numerical(format!("force on atom {i} is not finite at t = {} fs", state.time)));
    }
    Ok(())
}

fn kick(state: &mut SimulationState, half_dt: f64, frozen: Option<&[i8]>) {
    for i in 0..state.n_atoms() {
        if frozen.is_some_and(|g| g[i] != 0) {
            continue;
        }
        let s = half_dt * ACCEL_PER_FORCE / state.mass(i);
        state.velocities[i] = vec3::add(state.velocities[i], vec3::scale(s, state.forces[i]));
    }
}

fn step(state: &mut SimulationState, dt: f64, ff: &mut dyn ForceField, frozen: Option<&[i8]>) -> Result<Duration> {
    let t = Instant::now();
    kick(state, 0.5 * dt, frozen);
    for i in 0..state.n_atoms() {
        let x = vec3::add(state.positions[i], vec3::scale(dt, state.velocities[i]));
        state.positions[i] = state.sim_box.wrap(x);
    }
    state.time += dt;
    let mut spent = t.elapsed();
    ff.compute_forces(state)?;
    check_forces(state)?;
    let t = Instant::now();
    kick(state, 0.5 * dt, frozen);
    spent += t.elapsed();
    Ok(spent)
}

/// One velocity Verlet step; `state.forces` must be current on entry.
pub fn velocity_verlet_step(state: &mut SimulationState, dt: f64, ff: &mut dyn ForceField) -> Result<()> {
    check_forces(state)?;
    step(state, dt, ff, None).map(|_| ())
}

/// NVE run, or a stretch run when `cfg.stretch` is set. `on_step` sees the
/// state after the initial evaluation and after every step.
pub fn run(
    state: &mut SimulationState,
    ff: &mut dyn ForceField,
    cfg: &RunConfig,
    on_step: &mut dyn FnMut(&SimulationState, &StepRecord) -> Result<()>,
) -> Result<RunSummary> {
    cfg.validate()?;
    let wall = Instant::now();
    // a zero pull speed leaves the grips free: the run is plain NVE
    let grips = match &cfg.stretch {
        Some(s) => {
            let g = grips(state, s)?;
            (s.speed != 0.0).then_some((g, *s))
        }
        None => None,
    };
    if let Some((g, s)) = &grips {
        for (v, side) in state.velocities.iter_mut().zip(g) {
            if *side != 0 {
                *v = [0.0; 3];
                v[s.axis] = 0.5 * s.speed * f64::from(*side);
            }
        }
    }
    let frozen = grips.as_ref().map(|(g, _)| g.as_slice());

    ff.compute_forces(state)?;
    check_forces(state)?;
    let mut records = Vec::with_capacity(cfg.steps + 1);
    records.push(StepRecord::of(0, state));
    on_step(state, &records[0])?;
    let mut integrate = Duration::ZERO;
    for s in 1..=cfg.steps {
        integrate += step(state, cfg.dt, ff, frozen)?;
        let rec = StepRecord::of(s, state);
        on_step(state, &rec)?;
        records.push(rec);
    }
    Ok(RunSummary { records, times: ff.phase_times(), integrate, wall: wall.elapsed() })
}

/// [`run`] for a configuration that must carry a stretch.
pub fn run_stretch(state: &mut SimulationState, ff: &mut dyn ForceField, cfg: &RunConfig) -> Result<RunSummary> {
    if cfg.stretch.is_none() {
        return Err(Error::Config("stretch run without a stretch specification".into()));
    }
    run(state, ff, cfg, &mut |_, _| Ok(()))
}
