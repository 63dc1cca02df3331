use std::time::Instant;

use crate::error::{Error, Result};
use crate::neighbor::{NeighborList, DEFAULT_SKIN};
use crate::potential::ParamTable;
use crate::system::{ForceField, PhaseTimes, SimulationState};

use super::{evaluate, ForceEnergyResult, KernelVariant, NoProbe, Tally, WorkCounts};

/// A kernel bound to a parameter table, with its own neighbor list.
///
/// The list is rebuilt whenever an atom has moved more than half the skin
/// since the last build. Neighbor and force time are tracked separately.
pub struct Evaluator {
    table: ParamTable,
    variant: KernelVariant,
    skin: f64,
    threads: usize,
    pool: Option<rayon::ThreadPool>,
    nl: Option<NeighborList>,
    instrumented: bool,
    counts: WorkCounts,
    times: PhaseTimes,
}

impl Evaluator {
    pub fn new(table: ParamTable, variant: KernelVariant) -> Result<Self> {
        variant.backend.validate()?;
        Ok(Evaluator {
            table,
            variant,
            skin: DEFAULT_SKIN,
            threads: 1,
            pool: None,
            nl: None,
            instrumented: false,
            counts: WorkCounts::default(),
            times: PhaseTimes::default(),
        })
    }

    pub fn with_skin(mut self, skin: f64) -> Result<Self> {
        if !(skin >= 0.0 && skin.is_finite()) {
            return Err(Error::Config(format!("skin must be finite and >= 0, got {skin}")));
        }
        self.skin = skin;
        self.nl = None;
        Ok(self)
    }

    /// Worker threads for the chunked driver; results do not depend on it.
    pub fn with_threads(mut self, threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(Error::Config("need at least one thread".into()));
        }
        self.pool = if threads > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {threads} threads: {e}")))?;
            Some(pool)
        } else {
            None
        };
        self.threads = threads;
        Ok(self)
    }

    /// Accumulate [`WorkCounts`] across evaluations (slower).
    pub fn instrumented(mut self, on: bool) -> Self {
        self.instrumented = on;
        self
    }

    pub fn variant(&self) -> &KernelVariant {
        &self.variant
    }

    pub fn table(&self) -> &ParamTable {
        &self.table
    }

    pub fn skin(&self) -> f64 {
        self.skin
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn neighbor_list(&self) -> Option<&NeighborList> {
        self.nl.as_ref()
    }

    pub fn work_counts(&self) -> WorkCounts {
        self.counts
    }

    pub fn times(&self) -> PhaseTimes {
        self.times
    }

    pub fn reset_stats(&mut self) {
        self.counts = WorkCounts::default();
        self.times = PhaseTimes::default();
    }

    /// Rebuilds the neighbor list if it is missing or stale.
    pub fn refresh_neighbors(&mut self, state: &SimulationState) -> Result<&NeighborList> {
        let stale = match &self.nl {
            None => true,
            Some(nl) => nl.needs_rebuild(&state.positions, &state.sim_box),
        };
        if stale {
            let t = Instant::now();
            self.nl = Some(NeighborList::build(&state.positions, &state.sim_box, self.table.cutoff(), self.skin)?);
            self.times.neighbor += t.elapsed();
            self.times.rebuilds += 1;
        }
        Ok(self.nl.as_ref().expect("built above"))
    }

    pub fn evaluate(&mut self, state: &SimulationState) -> Result<ForceEnergyResult> {
        state.validate()?;
        self.refresh_neighbors(state)?;
        let nl = self.nl.as_ref().expect("refreshed");
        let t = Instant::now();
        let result = if self.instrumented {
            let (r, tally) = evaluate::<Tally>(&self.variant, state, nl, &self.table, self.pool.as_ref())?;
            self.counts.add(&tally.counts());
            r
        } else {
            evaluate::<NoProbe>(&self.variant, state, nl, &self.table, self.pool.as_ref())?.0
        };
        self.times.force += t.elapsed();
        self.times.evaluations += 1;
        if !result.potential_energy.is_finite() {
            return Err(Error::Numerical(format!("potential energy is {}", result.potential_energy)));
        }
        if let Some(i) = result.forces.iter().position(|f| f.iter().any(|x| !x.is_finite())) {
            return Err(Error::Numerical(format!("force on atom {i} is not finite")));
        }
        Ok(result)
    }
}

impl ForceField for Evaluator {
    fn compute_forces(&mut self, state: &mut SimulationState) -> Result<()> {
        let r = self.evaluate(state)?;
        state.forces = r.forces;
        state.potential_energy = r.potential_energy;
        Ok(())
    }

    fn phase_times(&self) -> PhaseTimes {
        self.times
    }
}
