/// Work done by one force evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WorkCounts {
    /// `(i, j, k)` slots visited in `zeta` loops, `k = j` included.
    pub zeta_visits: u64,
    /// `zeta` terms actually evaluated (`k != j`, one per active lane).
    pub zeta_evals: u64,
    /// Gather and gather-transpose operations.
    pub gathers: u64,
    /// Lanes carrying a pair, summed over batches.
    pub active_lanes: u64,
    /// All lanes, summed over batches.
    pub total_lanes: u64,
}

impl WorkCounts {
    pub fn lane_utilization(&self) -> f64 {
        if self.total_lanes == 0 {
            0.0
        } else {
            self.active_lanes as f64 / self.total_lanes as f64
        }
    }

    pub(crate) fn add(&mut self, o: &WorkCounts) {
        self.zeta_visits += o.zeta_visits;
        self.zeta_evals += o.zeta_evals;
        self.gathers += o.gathers;
        self.active_lanes += o.active_lanes;
        self.total_lanes += o.total_lanes;
    }
}

/// Instrumentation hooks; [`NoProbe`] compiles them away.
pub trait Probe: Default + Send {
    fn visit(&mut self, n: usize);
    fn eval(&mut self, n: usize);
    fn gather(&mut self, n: usize);
    fn lanes(&mut self, active: usize, total: usize);
    fn merge(&mut self, other: Self);
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NoProbe;

impl Probe for NoProbe {
    #[inline(always)]
    fn visit(&mut self, _: usize) {}
    #[inline(always)]
    fn eval(&mut self, _: usize) {}
    #[inline(always)]
    fn gather(&mut self, _: usize) {}
    #[inline(always)]
    fn lanes(&mut self, _: usize, _: usize) {}
    fn merge(&mut self, _: Self) {}
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Tally(WorkCounts);

impl Tally {
    pub fn counts(&self) -> WorkCounts {
        self.0
    }
}

impl Probe for Tally {
    #[inline]
    fn visit(&mut self, n: usize) {
        self.0.zeta_visits += n as u64;
    }
    #[inline]
    fn eval(&mut self, n: usize) {
        self.0.zeta_evals += n as u64;
    }
    #[inline]
    fn gather(&mut self, n: usize) {
        self.0.gathers += n as u64;
    }
    #[inline]
    fn lanes(&mut self, active: usize, total: usize) {
        self.0.active_lanes += active as u64;
        self.0.total_lanes += total as u64;
    }
    fn merge(&mut self, other: Self) {
        self.0.add(&other.0);
    }
}
