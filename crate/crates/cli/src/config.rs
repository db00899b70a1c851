//! Run configuration: JSON schema, scenario presets and their resolution.

use std::path::{Path, PathBuf};

use qmix::dynamics::Observable;
use qmix::scenarios::{self, BarePair, DECAY_RATE, TYPE_TWO_OMEGA1};
use qmix::{BareLabel, HamiltonianKind, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "fig1b")]
    Fig1b,
    #[serde(rename = "fig2")]
    Fig2,
    #[serde(rename = "fig3")]
    Fig3,
    #[serde(rename = "fig4")]
    Fig4,
    #[serde(rename = "fig5a")]
    Fig5a,
    #[serde(rename = "fig5b")]
    Fig5b,
    #[serde(rename = "figS2a")]
    FigS2a,
    #[serde(rename = "figS2b")]
    FigS2b,
    #[serde(rename = "ecc")]
    Ecc,
    #[serde(rename = "custom")]
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub levels: usize,
    /// Extra fine sweep of this half-width around the anticrossing minimum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inset_halfwidth: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnticrossingSpec {
    pub parameter: String,
    pub bracket: (f64, f64),
    pub pair: (String, String),
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Also search the rotating-wave spectrum at the same parameters.
    #[serde(default)]
    pub compare_tavis_cummings: bool,
}

fn default_tolerance() -> f64 {
    1e-6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub initial: String,
    #[serde(rename = "final")]
    pub target: String,
    #[serde(default = "default_order")]
    pub order: usize,
}

fn default_order() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    pub initial: String,
    /// Duration in exchange periods `π/J`; needs an anticrossing section.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<f64>,
    /// Absolute duration, used when `periods` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub kappa: f64,
    /// `exc:1`, `corr:1,2`, `photons`, `output_photons`, `ghz:gge0,eeg0`.
    pub observables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
    #[serde(default = "default_cluster_gap")]
    pub cluster_gap: f64,
}

fn default_samples() -> usize {
    401
}

fn default_cluster_gap() -> f64 {
    qmix::spectrum::DEFAULT_CLUSTER_GAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingScanSpec {
    pub lambdas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EccSpec {
    /// Number of random logical states; each yields the 14-case suite.
    #[serde(default = "default_states")]
    pub states: usize,
}

fn default_states() -> usize {
    1
}

/// File contents as written by the user. Every section is optional for
/// presets and overrides the preset's own section when present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<HamiltonianKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anticrossing: Option<AnticrossingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_scan: Option<CouplingScanSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecc: Option<EccSpec>,
}

/// Fully resolved configuration, echoed in the manifest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub scenario: Scenario,
    pub system: Option<SystemConfig>,
    pub kind: HamiltonianKind,
    pub seed: u64,
    pub sweep: Option<SweepSpec>,
    pub anticrossing: Option<AnticrossingSpec>,
    pub perturbation: Option<PerturbationSpec>,
    pub dynamics: Option<DynamicsSpec>,
    pub coupling_scan: Option<CouplingScanSpec>,
    pub ecc: Option<EccSpec>,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Validation(e.to_string()))
}

fn search_spec((parameter, bracket, pair): (&str, (f64, f64), BarePair), tc: bool) -> AnticrossingSpec {
    AnticrossingSpec {
        parameter: parameter.into(),
        bracket,
        pair: (pair.0, pair.1),
        tolerance: default_tolerance(),
        compare_tavis_cummings: tc,
    }
}

fn sweep_spec(parameter: &str, from: f64, to: f64, points: usize, levels: usize, inset: Option<f64>) -> SweepSpec {
    SweepSpec { parameter: parameter.into(), from, to, points, levels, inset_halfwidth: inset }
}

fn perturbation_spec(pair: BarePair) -> PerturbationSpec {
    PerturbationSpec { initial: pair.0, target: pair.1, order: 4 }
}

fn lossy_dynamics(initial: &str, observables: Vec<Observable>) -> DynamicsSpec {
    DynamicsSpec {
        initial: initial.into(),
        periods: Some(1.0),
        t_end: None,
        samples: 801,
        gamma: DECAY_RATE,
        kappa: DECAY_RATE,
        observables: observables.iter().map(observable_spec).collect(),
        max_step: None,
        cluster_gap: default_cluster_gap(),
    }
}

fn preset(scenario: Scenario) -> Resolved {
    let mut r = Resolved {
        scenario,
        system: None,
        kind: HamiltonianKind::GeneralizedDicke,
        seed: 0,
        sweep: None,
        anticrossing: None,
        perturbation: None,
        dynamics: None,
        coupling_scan: None,
        ecc: None,
    };
    match scenario {
        Scenario::Fig1b => {
            r.system = Some(scenarios::three_qubit_config(1.0));
            r.sweep = Some(sweep_spec("qubits[2].omega", 0.9, 1.1, 201, 6, Some(2e-3)));
            r.anticrossing = Some(search_spec(scenarios::three_qubit_search(), false));
            r.perturbation = Some(perturbation_spec(scenarios::three_qubit_pair()));
        }
        Scenario::Fig2 => {
            // template for the scanned family; λ and ω_c are replaced per point
            r.system = Some(scenarios::equal_coupling_config(0.1));
            r.coupling_scan = Some(CouplingScanSpec { lambdas: vec![0.03, 0.05, 0.075, 0.1, 0.125, 0.15] });
        }
        Scenario::Fig3 => {
            r.system = Some(scenarios::three_qubit_config(1.0));
            r.anticrossing = Some(search_spec(scenarios::three_qubit_search(), false));
            r.dynamics = Some(lossy_dynamics("gge0", scenarios::three_qubit_observables()));
        }
        Scenario::Fig4 => {
            r.system = Some(scenarios::four_qubit_config(0.25));
            r.sweep = Some(sweep_spec("qubits[0].omega", 0.2, 0.8, 241, 10, None));
            r.anticrossing = Some(search_spec(scenarios::type_one_search(), false));
            r.perturbation = Some(perturbation_spec(scenarios::type_one_pair()));
        }
        Scenario::Fig5a => {
            r.system = Some(scenarios::four_qubit_config(0.25));
            r.sweep = Some(sweep_spec("qubits[0].omega", 0.23, 0.265, 141, 10, Some(2e-3)));
            r.anticrossing = Some(search_spec(scenarios::type_one_search(), true));
        }
        Scenario::Fig5b => {
            r.system = Some(scenarios::four_qubit_config(0.25));
            r.anticrossing = Some(search_spec(scenarios::type_one_search(), false));
            r.dynamics = Some(lossy_dynamics("egge0", scenarios::type_one_observables()));
        }
        Scenario::FigS2a => {
            r.system = Some(scenarios::type_two_config(TYPE_TWO_OMEGA1));
            r.sweep = Some(sweep_spec("qubits[0].omega", 1.5, 1.8, 301, 10, Some(2e-3)));
            r.anticrossing = Some(search_spec(scenarios::type_two_search(), false));
        }
        Scenario::FigS2b => {
            r.system = Some(scenarios::type_two_config(TYPE_TWO_OMEGA1));
            r.anticrossing = Some(search_spec(scenarios::type_two_search(), false));
            r.dynamics = Some(lossy_dynamics("eggg0", scenarios::type_two_observables()));
        }
        Scenario::Ecc => r.ecc = Some(EccSpec { states: 1 }),
        Scenario::Custom => {}
    }
    r
}

/// Command-line overrides applied after the file.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub cutoff: Option<usize>,
    pub seed: Option<u64>,
}

pub fn resolve(config: &RunConfig, overrides: Overrides) -> Result<Resolved, CliError> {
    let mut r = preset(config.scenario);
    if config.scenario == Scenario::Custom && config.system.is_none() && config.ecc.is_none() {
        return Err(CliError::Validation("custom scenario needs a `system` section".into()));
    }
    if config.system.is_some() {
        r.system = config.system.clone();
    }
    if let Some(kind) = config.kind {
        r.kind = kind;
    }
    macro_rules! take {
        ($field:ident) => {
            if config.$field.is_some() {
                r.$field = config.$field.clone();
            }
        };
    }
    take!(sweep);
    take!(anticrossing);
    take!(perturbation);
    take!(dynamics);
    take!(coupling_scan);
    take!(ecc);
    r.seed = overrides.seed.or(config.seed).unwrap_or(0);
    if let Some(cutoff) = overrides.cutoff {
        if let Some(system) = r.system.as_mut() {
            system.fock_cutoff = cutoff;
        }
    }
    check(&r)?;
    Ok(r)
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Validation(msg.into()))
}

fn check(r: &Resolved) -> Result<(), CliError> {
    if let Some(system) = &r.system {
        system.validate().map_err(CliError::from)?;
        let probe = |p: &str| system.parameter(p).map(|_| ()).map_err(CliError::from);
        if let Some(s) = &r.sweep {
            probe(&s.parameter)?;
            if s.points < 2 || s.levels == 0 || !(s.to > s.from) {
                return invalid("sweep needs points >= 2, levels >= 1 and to > from");
            }
            if s.inset_halfwidth.is_some_and(|h| !(h > 0.0)) {
                return invalid("sweep.inset_halfwidth must be positive");
            }
        }
        if let Some(a) = &r.anticrossing {
            probe(&a.parameter)?;
            parse_label(&a.pair.0)?;
            parse_label(&a.pair.1)?;
            if !(a.tolerance > 0.0) {
                return invalid("anticrossing.tolerance must be positive");
            }
        }
        if let Some(p) = &r.perturbation {
            parse_label(&p.initial)?;
            parse_label(&p.target)?;
        }
        if let Some(d) = &r.dynamics {
            parse_label(&d.initial)?;
            for o in &d.observables {
                parse_observable(o)?;
            }
            match (d.periods, d.t_end) {
                (Some(p), _) if !(p > 0.0) => return invalid("dynamics.periods must be positive"),
                (Some(_), _) if r.anticrossing.is_none() => {
                    return invalid("dynamics.periods needs an anticrossing section to fix J")
                }
                (None, None) => return invalid("dynamics needs `periods` or `t_end`"),
                (None, Some(t)) if !(t > 0.0) => return invalid("dynamics.t_end must be positive"),
                _ => {}
            }
            if d.samples < 2 || d.gamma < 0.0 || d.kappa < 0.0 {
                return invalid("dynamics needs samples >= 2 and non-negative rates");
            }
        }
    } else if r.sweep.is_some() || r.anticrossing.is_some() || r.perturbation.is_some() || r.dynamics.is_some() {
        return invalid("a `system` section is required for sweep/anticrossing/perturbation/dynamics");
    }
    if let Some(scan) = &r.coupling_scan {
        if r.scenario != Scenario::Fig2 {
            return invalid("coupling_scan is only defined for the fig2 scenario");
        }
        if scan.lambdas.is_empty() || scan.lambdas.iter().any(|l| !(*l > 0.0 && *l < 0.3)) {
            return invalid("coupling_scan.lambdas must be non-empty and in (0, 0.3)");
        }
    }
    Ok(())
}

pub fn parse_label(text: &str) -> Result<BareLabel, CliError> {
    BareLabel::parse(text).map_err(CliError::from)
}

pub fn observable_spec(o: &Observable) -> String {
    let join = |qs: &[usize]| qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",");
    match o {
        Observable::Excitation(q) => format!("exc:{q}"),
        Observable::Correlation(qs) => format!("corr:{}", join(qs)),
        Observable::Photons => "photons".into(),
        Observable::OutputPhotons => "output_photons".into(),
        Observable::Ghz(a, b) => format!("ghz:{a},{b}"),
    }
}

pub fn parse_observable(text: &str) -> Result<Observable, CliError> {
    let bad = || CliError::Validation(format!("unknown observable `{text}`"));
    let qubits = |s: &str| -> Result<Vec<usize>, CliError> {
        s.split(',').map(|q| q.trim().parse::<usize>().ok().filter(|q| *q >= 1).ok_or_else(bad)).collect()
    };
    match text.split_once(':') {
        None if text == "photons" => Ok(Observable::Photons),
        None if text == "output_photons" => Ok(Observable::OutputPhotons),
        Some(("exc", q)) => Ok(Observable::Excitation(qubits(q)?.into_iter().next().ok_or_else(bad)?)),
        Some(("corr", qs)) => Ok(Observable::Correlation(qubits(qs)?)),
        Some(("ghz", pair)) => {
            let (a, b) = pair.split_once(',').ok_or_else(bad)?;
            Ok(Observable::Ghz(parse_label(a)?, parse_label(b)?))
        }
        _ => Err(bad()),
    }
}

/// Physics diagnostics that do not block a run.
pub fn warnings(r: &Resolved) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(system) = &r.system {
        for q in system.dispersive_violations(3.0) {
            let p = system.qubits[q];
            out.push(format!(
                "qubit {}: |omega - omega_c| = {:.4} is below 3 lambda = {:.4}; the dispersive picture does not apply",
                q + 1,
                (p.omega - system.omega_c).abs(),
                3.0 * p.lambda
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves() {
        for s in ["fig1b", "fig2", "fig3", "fig4", "fig5a", "fig5b", "figS2a", "figS2b", "ecc"] {
            let c = parse(&format!("{{\"scenario\": \"{s}\"}}")).unwrap();
            resolve(&c, Overrides::default()).unwrap();
        }
    }

    #[test]
    fn presets_quote_the_stated_parameters() {
        let r = resolve(&parse(r#"{"scenario": "fig3"}"#).unwrap(), Overrides::default()).unwrap();
        let system = r.system.unwrap();
        assert_eq!(system.qubits[2].lambda, 5e-3);
        assert_eq!(system.qubits[0].lambda, 0.13);
        let d = r.dynamics.unwrap();
        assert_eq!((d.gamma, d.kappa), (3e-5, 3e-5));
        let s2 = resolve(&parse(r#"{"scenario": "figS2b"}"#).unwrap(), Overrides::default()).unwrap();
        let system = s2.system.unwrap();
        assert_eq!(system.qubits[0].omega, 1.6448);
        assert_eq!(system.omega_c, 1.75);
    }

    #[test]
    fn fig1b_has_no_warning_for_qubit_three() {
        let r = resolve(&parse(r#"{"scenario": "fig1b"}"#).unwrap(), Overrides::default()).unwrap();
        assert!(warnings(&r).iter().all(|w| !w.starts_with("qubit 3")));
    }

    #[test]
    fn resonant_qubit_warns() {
        let text = r#"{"scenario": "custom", "system": {"qubits": [{"omega": 1.0, "lambda": 0.1}], "omega_c": 1.05}}"#;
        let r = resolve(&parse(text).unwrap(), Overrides::default()).unwrap();
        assert_eq!(warnings(&r).len(), 1);
    }

    #[test]
    fn unknown_field_is_named() {
        let err = parse(r#"{"scenario": "fig1b", "sweeep": {}}"#).unwrap_err();
        assert!(err.to_string().contains("sweeep"), "{err}");
        let err = parse(r#"{"scenario": "custom", "system": {"qubits": [], "omega_c": 1, "omegac": 2}}"#).unwrap_err();
        assert!(err.to_string().contains("omegac"), "{err}");
    }

    #[test]
    fn observables_round_trip() {
        for s in ["exc:2", "corr:1,2,3", "photons", "output_photons", "ghz:gge0,eeg0"] {
            assert_eq!(observable_spec(&parse_observable(s).unwrap()), s);
        }
        assert!(parse_observable("exc:0").is_err());
        assert!(parse_observable("spin").is_err());
    }

    #[test]
    fn cutoff_override_applies() {
        let c = parse(r#"{"scenario": "fig1b"}"#).unwrap();
        let r = resolve(&c, Overrides { cutoff: Some(12), seed: Some(5) }).unwrap();
        assert_eq!(r.system.unwrap().fock_cutoff, 12);
        assert_eq!(r.seed, 5);
    }
}
