//! The pairwise bunching experiment on three bosons `a`, `b`, `c`, one per mode.
//!
//! Each event brings two of the particles together at a beam splitter. The first-listed particle
//! enters on port 1, the second on port 2, and the event "particle k reflected" holds when both
//! bosons leave through the output on k's side: `(2,0)` for the port-1 particle, `(0,2)` for the
//! port-2 particle. The spectator mode is left alone, so all three event projectors live on the
//! same 10-dimensional space of three bosons in three modes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fock::{
    beam_splitter, lift_unitary, FockBasis, FockOperator, FockState, ModeUnitary, Reflectivity,
};
use crate::{Error, Result};

pub const MODES: usize = 3;
pub const PARTICLES: usize = 3;

/// Tolerance used when checking that a projector is Hermitian and idempotent.
pub const PROJECTOR_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Particle {
    A,
    B,
    C,
}

impl Particle {
    pub const ALL: [Particle; 3] = [Particle::A, Particle::B, Particle::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> char {
        match self {
            Particle::A => 'a',
            Particle::B => 'b',
            Particle::C => 'c',
        }
    }
}

/// Which input port of the beam splitter a particle occupies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Port {
    First,
    Second,
}

/// One pairwise event: the particles on ports 1 and 2, and which of them is reflected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EventSpec {
    port1: Particle,
    port2: Particle,
    reflected: Particle,
}

impl EventSpec {
    pub fn new(port1: Particle, port2: Particle, reflected: Particle) -> Result<Self> {
        if port1 == port2 {
            return Err(Error::Event(format!(
                "pairing uses particle {} twice",
                port1.name()
            )));
        }
        if reflected != port1 && reflected != port2 {
            return Err(Error::Event(format!(
                "reflected particle {} is not in the pairing ({}, {})",
                reflected.name(),
                port1.name(),
                port2.name()
            )));
        }
        Ok(EventSpec {
            port1,
            port2,
            reflected,
        })
    }

    /// `a̲b`: `a` reflected in pairing `(a, b)`.
    pub const AB: EventSpec = EventSpec {
        port1: Particle::A,
        port2: Particle::B,
        reflected: Particle::A,
    };
    /// `b̲c`: `b` reflected in pairing `(b, c)`.
    pub const BC: EventSpec = EventSpec {
        port1: Particle::B,
        port2: Particle::C,
        reflected: Particle::B,
    };
    /// `ac̲`: `c` reflected in pairing `(a, c)`.
    pub const AC: EventSpec = EventSpec {
        port1: Particle::A,
        port2: Particle::C,
        reflected: Particle::C,
    };

    /// `[a̲b, b̲c, ac̲]`
    pub fn canonical() -> [EventSpec; 3] {
        [Self::AB, Self::BC, Self::AC]
    }

    pub fn port1(&self) -> Particle {
        self.port1
    }

    pub fn port2(&self) -> Particle {
        self.port2
    }

    pub fn reflected(&self) -> Particle {
        self.reflected
    }

    pub fn reflected_port(&self) -> Port {
        if self.reflected == self.port1 {
            Port::First
        } else {
            Port::Second
        }
    }

    /// Occupations `(n_port1, n_port2)` that realize the event.
    pub fn outcome(&self) -> (usize, usize) {
        match self.reflected_port() {
            Port::First => (2, 0),
            Port::Second => (0, 2),
        }
    }

    /// ASCII label with the reflected particle in brackets, e.g. `[a]b`, `a[c]`.
    pub fn label(&self) -> String {
        let tag = |p: Particle| {
            if p == self.reflected {
                format!("[{}]", p.name())
            } else {
                p.name().to_string()
            }
        };
        format!("{}{}", tag(self.port1), tag(self.port2))
    }
}

impl fmt::Display for EventSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Particle-to-mode assignment, beam-splitter reflectivity and the `|1,1,1⟩` input.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    modes: [usize; 3],
    reflectivity: Reflectivity,
    initial: FockState,
}

impl ExperimentConfig {
    pub fn new(reflectivity: Reflectivity) -> Self {
        ExperimentConfig {
            modes: [0, 1, 2],
            reflectivity,
            initial: FockState::new(vec![1; MODES]),
        }
    }

    /// Custom mode assignment, indexed by [`Particle::index`].
    pub fn with_modes(reflectivity: Reflectivity, modes: [usize; 3]) -> Result<Self> {
        if modes.iter().any(|&m| m >= MODES) {
            return Err(Error::Config(format!(
                "mode assignment {modes:?} out of range"
            )));
        }
        if modes[0] == modes[1] || modes[1] == modes[2] || modes[0] == modes[2] {
            return Err(Error::Config(format!(
                "mode assignment {modes:?} is not one mode per particle"
            )));
        }
        Ok(ExperimentConfig {
            modes,
            ..Self::new(reflectivity)
        })
    }

    pub fn mode_of(&self, p: Particle) -> usize {
        self.modes[p.index()]
    }

    pub fn reflectivity(&self) -> Reflectivity {
        self.reflectivity
    }

    pub fn initial_state(&self) -> &FockState {
        &self.initial
    }

    /// Beam splitter acting on the pairing's modes, identity on the spectator.
    pub fn pairing_unitary(&self, port1: Particle, port2: Particle) -> Result<ModeUnitary> {
        beam_splitter(
            self.reflectivity,
            (self.mode_of(port1), self.mode_of(port2)),
            MODES,
        )
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::new(Reflectivity::BALANCED)
    }
}

/// Heisenberg-picture projector `Φ(U)† P Φ(U)` for an arbitrary outcome `(n_port1, n_port2)`
/// of a pairing.
pub fn outcome_projector(
    port1: Particle,
    port2: Particle,
    outcome: (usize, usize),
    cfg: &ExperimentConfig,
) -> Result<FockOperator> {
    if port1 == port2 {
        return Err(Error::Event(format!(
            "pairing uses particle {} twice",
            port1.name()
        )));
    }
    let basis = FockBasis::new(MODES, PARTICLES)?;
    let (m1, m2) = (cfg.mode_of(port1), cfg.mode_of(port2));
    let selected = basis.states().iter().filter(|s| {
        let n = s.occupations();
        (n[m1], n[m2]) == outcome
    });
    let p_out = FockOperator::basis_projector(&basis, selected)?;
    let lifted = lift_unitary(&cfg.pairing_unitary(port1, port2)?, PARTICLES)?;
    lifted.adjoint().compose(&p_out)?.compose(&lifted)
}

/// Projector `Π` of an event on the shared three-boson space.
pub fn build_projector(event: &EventSpec, cfg: &ExperimentConfig) -> Result<FockOperator> {
    outcome_projector(event.port1, event.port2, event.outcome(), cfg)
}

/// `⟨ψ₀|Π|ψ₀⟩` for the initial state `ψ₀`.
pub fn expectation_in_initial(op: &FockOperator, cfg: &ExperimentConfig) -> Result<f64> {
    let basis = FockBasis::new(MODES, PARTICLES)?;
    let psi = basis.ket(cfg.initial_state())?;
    Ok(op.expectation(&psi).re)
}

pub fn quantum_event_probability(event: &EventSpec, cfg: &ExperimentConfig) -> Result<f64> {
    expectation_in_initial(&build_projector(event, cfg)?, cfg)
}

/// Probability of an arbitrary outcome on a pairing's two output modes, e.g. the coincidence
/// `(1, 1)`.
pub fn quantum_outcome_probability(
    port1: Particle,
    port2: Particle,
    outcome: (usize, usize),
    cfg: &ExperimentConfig,
) -> Result<f64> {
    expectation_in_initial(&outcome_projector(port1, port2, outcome, cfg)?, cfg)
}

pub fn quantum_event_probabilities(cfg: &ExperimentConfig) -> Result<[f64; 3]> {
    let [ab, bc, ac] = EventSpec::canonical();
    Ok([
        quantum_event_probability(&ab, cfg)?,
        quantum_event_probability(&bc, cfg)?,
        quantum_event_probability(&ac, cfg)?,
    ])
}

/// Sum of the three canonical event probabilities.
pub fn quantum_exclusivity_sum(cfg: &ExperimentConfig) -> Result<f64> {
    Ok(quantum_event_probabilities(cfg)?.iter().sum())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorDiagnostic {
    pub event: String,
    pub probability: f64,
    pub trace: f64,
    pub rank: usize,
    /// `‖Π† - Π‖_F`
    pub hermiticity_residual: f64,
    /// `‖Π² - Π‖_F`
    pub idempotence_residual: f64,
    /// `‖Π(I - Π)‖_F`
    pub complement_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDiagnostic {
    pub first: String,
    pub second: String,
    /// `‖Π_i Π_j‖_F`; zero iff the projectors are orthogonal.
    pub product_norm: f64,
    /// `‖[Π_i, Π_j]‖_F`
    pub commutator_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub idempotence: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorReport {
    pub reflectivity: f64,
    pub projectors: Vec<ProjectorDiagnostic>,
    /// Every ordered pair `(i, j)` with `i ≠ j`.
    pub pairs: Vec<PairDiagnostic>,
    pub tolerances: Tolerances,
}

impl ProjectorReport {
    pub fn all_projectors_valid(&self) -> bool {
        self.projectors.iter().all(|p| {
            p.hermiticity_residual <= self.tolerances.hermiticity
                && p.idempotence_residual <= self.tolerances.idempotence
        })
    }
}

pub fn projector_report(cfg: &ExperimentConfig) -> Result<ProjectorReport> {
    let events = EventSpec::canonical();
    let projectors = events
        .iter()
        .map(|e| build_projector(e, cfg))
        .collect::<Result<Vec<_>>>()?;
    let identity = nalgebra::DMatrix::identity(projectors[0].dim(), projectors[0].dim());

    let mut diagnostics = Vec::with_capacity(3);
    for (event, pi) in events.iter().zip(&projectors) {
        let trace = pi.trace().re;
        diagnostics.push(ProjectorDiagnostic {
            event: event.label(),
            probability: expectation_in_initial(pi, cfg)?,
            trace,
            rank: trace.round().max(0.0) as usize,
            hermiticity_residual: pi.hermiticity_residual(),
            idempotence_residual: pi.idempotence_residual(),
            complement_residual: (pi.matrix() * (&identity - pi.matrix())).norm(),
        });
    }

    let mut pairs = Vec::with_capacity(6);
    for (i, (ei, pi)) in events.iter().zip(&projectors).enumerate() {
        for (j, (ej, pj)) in events.iter().zip(&projectors).enumerate() {
            if i == j {
                continue;
            }
            pairs.push(PairDiagnostic {
                first: ei.label(),
                second: ej.label(),
                product_norm: pi.compose(pj)?.frobenius_norm(),
                commutator_norm: pi.commutator(pj)?.norm(),
            });
        }
    }

    Ok(ProjectorReport {
        reflectivity: cfg.reflectivity().value(),
        projectors: diagnostics,
        pairs,
        tolerances: Tolerances {
            hermiticity: PROJECTOR_TOL,
            idempotence: PROJECTOR_TOL,
        },
    })
}
