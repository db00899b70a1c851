//! Parameter presets for the standard mixing configurations and helpers that
//! chain anticrossing search with dressed dynamics.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::algebra::BareLabel;
use crate::dynamics::{run_dynamics, DynamicsOutcome, DynamicsRun, Observable};
use crate::error::Result;
use crate::model::{QubitParams, SystemConfig};
use crate::spectrum::{find_anticrossing, AnticrossingOptions, AnticrossingReport};

/// Qubit and cavity decay rate used in the lossy runs.
pub const DECAY_RATE: f64 = 3e-5;
pub const THETA: f64 = PI / 6.0;

/// Named resonant pair of bare states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarePair(pub String, pub String);

impl BarePair {
    pub fn new(a: &str, b: &str) -> Self {
        Self(a.into(), b.into())
    }

    pub fn labels(&self) -> Result<(BareLabel, BareLabel)> {
        Ok((BareLabel::parse(&self.0)?, BareLabel::parse(&self.1)?))
    }
}

pub fn three_qubit_pair() -> BarePair {
    BarePair::new("gge0", "eeg0")
}

pub fn type_one_pair() -> BarePair {
    BarePair::new("egge0", "geeg0")
}

pub fn type_two_pair() -> BarePair {
    BarePair::new("eggg0", "geee0")
}

/// Three qubits: two ultrastrongly coupled at 0.4 and 0.6, a weakly coupled
/// third at `omega3`, cavity at `1 + 2.5 λ_1`.
pub fn three_qubit_config(omega3: f64) -> SystemConfig {
    let lambda = 0.13;
    SystemConfig::new(
        vec![
            QubitParams::new(0.4, lambda, THETA),
            QubitParams::new(0.6, lambda, THETA),
            QubitParams::new(omega3, 5e-3, THETA),
        ],
        1.0 + 2.5 * lambda,
    )
}

/// Equal couplings `λ`, `ω_1 = ω_2 = ω_3/2` with `ω_3 = 1` and the cavity
/// co-varied as `1 + 2.5 λ`.
pub fn equal_coupling_config(lambda: f64) -> SystemConfig {
    SystemConfig::new(
        vec![
            QubitParams::new(0.5, lambda, THETA),
            QubitParams::new(0.5, lambda, THETA),
            QubitParams::new(1.0, lambda, THETA),
        ],
        1.0 + 2.5 * lambda,
    )
}

/// Four qubits with the cavity at 1.4; qubit 1 is the swept one.
pub fn four_qubit_config(omega1: f64) -> SystemConfig {
    let lambda = 0.15;
    SystemConfig::new(
        vec![
            QubitParams::new(omega1, lambda, THETA),
            QubitParams::new(0.4, lambda, THETA),
            QubitParams::new(0.55, lambda, THETA),
            QubitParams::new(0.7, lambda, THETA),
        ],
        1.4,
    )
}

/// Four qubits with the cavity at 1.75 and a weakly coupled qubit 1.
pub fn type_two_config(omega1: f64) -> SystemConfig {
    SystemConfig::new(
        vec![
            QubitParams::new(omega1, 0.05, THETA),
            QubitParams::new(0.4, 0.15, THETA),
            QubitParams::new(0.55, 0.15, THETA),
            QubitParams::new(0.7, 0.15, THETA),
        ],
        1.75,
    )
}

/// Location of the type-II minimum quoted for the preset.
pub const TYPE_TWO_OMEGA1: f64 = 1.6448;

/// Default anticrossing searches: (parameter, bracket, pair).
pub fn three_qubit_search() -> (&'static str, (f64, f64), BarePair) {
    ("qubits[2].omega", (0.95, 1.05), three_qubit_pair())
}

pub fn type_one_search() -> (&'static str, (f64, f64), BarePair) {
    ("qubits[0].omega", (0.2, 0.3), type_one_pair())
}

pub fn type_two_search() -> (&'static str, (f64, f64), BarePair) {
    ("qubits[0].omega", (1.6, 1.7), type_two_pair())
}

pub fn locate(config: &SystemConfig, search: &(&str, (f64, f64), BarePair), options: &AnticrossingOptions) -> Result<AnticrossingReport> {
    let (a, b) = search.2.labels()?;
    find_anticrossing(config, search.0, search.1, (&a, &b), options)
}

/// Dressed run started from `pair.0` at the anticrossing minimum, over
/// `periods` full exchange periods `π/J`.
pub fn mixing_run(
    config: &SystemConfig,
    report: &AnticrossingReport,
    pair: &BarePair,
    observables: Vec<Observable>,
    periods: f64,
    samples: usize,
) -> Result<DynamicsRun> {
    let at_min = config.with_parameter(&report.parameter, report.location)?;
    let (a, _) = pair.labels()?;
    let j = report.coupling();
    let mut run = DynamicsRun::new(at_min, a, periods * PI / j);
    run.samples = samples;
    run.observables = observables;
    Ok(run)
}

/// Observables plotted for three-qubit mixing.
pub fn three_qubit_observables() -> Vec<Observable> {
    let (a, b) = three_qubit_pair().labels().expect("static labels");
    vec![
        Observable::Excitation(1),
        Observable::Excitation(2),
        Observable::Excitation(3),
        Observable::Correlation(vec![1, 2]),
        Observable::Photons,
        Observable::OutputPhotons,
        Observable::Ghz(a, b),
    ]
}

pub fn type_one_observables() -> Vec<Observable> {
    let (a, b) = type_one_pair().labels().expect("static labels");
    vec![
        Observable::Excitation(1),
        Observable::Excitation(2),
        Observable::Correlation(vec![1, 4]),
        Observable::Correlation(vec![2, 3]),
        Observable::Photons,
        Observable::Ghz(a, b),
    ]
}

pub fn type_two_observables() -> Vec<Observable> {
    vec![
        Observable::Excitation(1),
        Observable::Excitation(2),
        Observable::Correlation(vec![2, 3, 4]),
        Observable::Photons,
    ]
}

/// Convenience: locate, then evolve, with optional losses.
pub fn locate_and_evolve(
    config: &SystemConfig,
    search: &(&str, (f64, f64), BarePair),
    observables: Vec<Observable>,
    lossy: bool,
    periods: f64,
    samples: usize,
) -> Result<(AnticrossingReport, DynamicsOutcome)> {
    let report = locate(config, search, &AnticrossingOptions::default())?;
    let config = if lossy { config.clone().with_decay(DECAY_RATE, DECAY_RATE) } else { config.clone() };
    let run = mixing_run(&config, &report, &search.2, observables, periods, samples)?;
    Ok((report, run_dynamics(&run)?))
}
