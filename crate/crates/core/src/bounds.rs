//! Exclusivity (1) and no-disturbance (3/2) bookkeeping for three event probabilities.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const EXCLUSIVITY_BOUND: f64 = 1.0;
pub const NO_DISTURBANCE_BOUND: f64 = 1.5;

/// Comparison slack for exact (quantum or analytic) sums.
pub const ANALYTIC_TOL: f64 = 1e-9;
/// Width of the Monte Carlo guard band, in standard errors.
pub const GUARD_SIGMAS: f64 = 3.0;

/// Slack allowed on the `[0, 1]` range of an exact probability before it is rejected.
const RANGE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Quantum,
    HvAnalytic,
    HvMc,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Quantum => "quantum",
            Backend::HvAnalytic => "hv-analytic",
            Backend::HvMc => "hv-mc",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub backend: Backend,
    /// `[a̲b, b̲c, ac̲]`, clamped to `[0, 1]`.
    pub probabilities: [f64; 3],
    pub sum: f64,
    /// Per-event standard errors; `None` for exact backends.
    pub stderr: Option<[f64; 3]>,
    pub exclusivity_violated: bool,
    pub no_disturbance_saturated: bool,
    pub no_disturbance_exceeded: bool,
}

impl BoundReport {
    pub const EXCLUSIVITY_BOUND: f64 = EXCLUSIVITY_BOUND;
    pub const NO_DISTURBANCE_BOUND: f64 = NO_DISTURBANCE_BOUND;

    /// Standard error of the sum, treating the three estimates as independent.
    pub fn sum_stderr(&self) -> Option<f64> {
        self.stderr
            .map(|s| s.iter().map(|x| x * x).sum::<f64>().sqrt())
    }

    /// Tolerance used for every comparison in this report.
    pub fn guard(&self) -> f64 {
        self.sum_stderr().map_or(ANALYTIC_TOL, |s| GUARD_SIGMAS * s)
    }
}

/// Compares `Σ p` against both bounds. Exact inputs use [`ANALYTIC_TOL`]; inputs with standard
/// errors use a [`GUARD_SIGMAS`] band on the sum. A probability more than the band outside
/// `[0, 1]` is an error.
pub fn evaluate_bounds(
    backend: Backend,
    probabilities: [f64; 3],
    stderr: Option<[f64; 3]>,
) -> Result<BoundReport> {
    let mut clamped = [0.0; 3];
    for (i, &p) in probabilities.iter().enumerate() {
        let band = stderr.map_or(0.0, |s| GUARD_SIGMAS * s[i]).max(RANGE_SLACK);
        let (lo, hi) = (-band, 1.0 + band);
        if !(p >= lo && p <= hi) {
            return Err(Error::Probability { value: p, lo, hi });
        }
        clamped[i] = p.clamp(0.0, 1.0);
    }
    if let Some(s) = stderr {
        if s.iter().any(|x| *x < 0.0 || !x.is_finite()) {
            return Err(Error::Config(format!("invalid standard errors {s:?}")));
        }
    }

    let mut report = BoundReport {
        backend,
        probabilities: clamped,
        sum: clamped.iter().sum(),
        stderr,
        exclusivity_violated: false,
        no_disturbance_saturated: false,
        no_disturbance_exceeded: false,
    };
    let guard = report.guard();
    report.exclusivity_violated = report.sum > EXCLUSIVITY_BOUND + guard;
    report.no_disturbance_saturated = (report.sum - NO_DISTURBANCE_BOUND).abs() <= guard;
    report.no_disturbance_exceeded = report.sum > NO_DISTURBANCE_BOUND + guard;
    Ok(report)
}
