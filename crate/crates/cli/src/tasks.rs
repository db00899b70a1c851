//! The computations behind each subcommand. Every task returns its files in
//! memory; nothing touches the output directory until all tasks succeed.

use std::f64::consts::PI;

use qmix::dynamics::{run_dynamics, DynamicsRun};
use qmix::perturbation::{effective_coupling_perturbative, DEFAULT_EPSILON};
use qmix::qecc::{ecc_suite, random_logical, EccReport};
use qmix::scenarios::{equal_coupling_config, three_qubit_pair};
use qmix::spectrum::{find_anticrossing, fmt_f64, sweep_levels, AnticrossingOptions, AnticrossingReport};
use qmix::{Execution, HamiltonianKind, SystemConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::{parse_label, parse_observable, AnticrossingSpec, Resolved};
use crate::CliError;

pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn text(name: &str, text: String) -> Self {
        Self { name: name.into(), bytes: text.into_bytes() }
    }

    fn json<T: Serialize>(name: &str, value: &T) -> Result<Self, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
        text.push('\n');
        Ok(Self::text(name, text))
    }
}

#[derive(Default)]
pub struct Session {
    pub artifacts: Vec<Artifact>,
    anticrossing: Option<AnticrossingReport>,
}

fn missing(section: &str) -> CliError {
    CliError::Validation(format!("this scenario has no `{section}` section; add one to the config"))
}

fn system(r: &Resolved) -> Result<&SystemConfig, CliError> {
    r.system.as_ref().ok_or_else(|| missing("system"))
}

fn grid(from: f64, to: f64, points: usize) -> Vec<f64> {
    (0..points).map(|k| from + (to - from) * k as f64 / (points - 1) as f64).collect()
}

fn options(spec: &AnticrossingSpec, kind: HamiltonianKind) -> AnticrossingOptions {
    AnticrossingOptions { kind, tolerance: spec.tolerance, exec: Execution::Parallel, ..Default::default() }
}

impl Session {
    fn locate(&mut self, r: &Resolved) -> Result<AnticrossingReport, CliError> {
        if let Some(report) = &self.anticrossing {
            return Ok(report.clone());
        }
        let spec = r.anticrossing.as_ref().ok_or_else(|| missing("anticrossing"))?;
        let (a, b) = (parse_label(&spec.pair.0)?, parse_label(&spec.pair.1)?);
        let report = find_anticrossing(system(r)?, &spec.parameter, spec.bracket, (&a, &b), &options(spec, r.kind))?;
        log::info!("anticrossing at {} = {:.8}, splitting {:.6e}", spec.parameter, report.location, report.splitting);
        self.anticrossing = Some(report.clone());
        Ok(report)
    }

    pub fn levels(&mut self, r: &Resolved) -> Result<(), CliError> {
        let spec = r.sweep.as_ref().ok_or_else(|| missing("sweep"))?;
        let config = system(r)?;
        let sweep = sweep_levels(config, r.kind, &spec.parameter, &grid(spec.from, spec.to, spec.points), spec.levels, Execution::Parallel)?;
        self.artifacts.push(Artifact::text("levels.csv", sweep.to_csv()));
        if let (Some(h), Some(_)) = (spec.inset_halfwidth, &r.anticrossing) {
            let centre = self.locate(r)?.location;
            let inset = sweep_levels(config, r.kind, &spec.parameter, &grid(centre - h, centre + h, 201), spec.levels, Execution::Parallel)?;
            self.artifacts.push(Artifact::text("levels_inset.csv", inset.to_csv()));
        }
        Ok(())
    }

    pub fn anticross(&mut self, r: &Resolved) -> Result<(), CliError> {
        let report = self.locate(r)?;
        let spec = r.anticrossing.as_ref().expect("located");
        let mut value = json!({ "report": report, "coupling": report.coupling(), "superposition_overlaps": report.superposition_overlaps() });
        if spec.compare_tavis_cummings {
            let (a, b) = (parse_label(&spec.pair.0)?, parse_label(&spec.pair.1)?);
            let tc_options = AnticrossingOptions {
                tolerance: spec.tolerance.min(1e-12),
                ..options(spec, HamiltonianKind::TavisCummings)
            };
            let tc = find_anticrossing(system(r)?, &spec.parameter, spec.bracket, (&a, &b), &tc_options)?;
            value["tavis_cummings"] = json!({ "location": tc.location, "min_gap": tc.min_gap, "splitting": tc.splitting });
        }
        self.artifacts.push(Artifact::json("anticrossing.json", &value)?);
        Ok(())
    }

    pub fn perturb(&mut self, r: &Resolved) -> Result<(), CliError> {
        let spec = r.perturbation.as_ref().ok_or_else(|| missing("perturbation"))?;
        let report = effective_coupling_perturbative(
            system(r)?,
            r.kind,
            &parse_label(&spec.initial)?,
            &parse_label(&spec.target)?,
            spec.order,
            DEFAULT_EPSILON,
        )?;
        let mut text = report.to_json();
        text.push('\n');
        self.artifacts.push(Artifact::text("perturbation.json", text));
        Ok(())
    }

    pub fn dynamics(&mut self, r: &Resolved) -> Result<(), CliError> {
        let spec = r.dynamics.as_ref().ok_or_else(|| missing("dynamics"))?;
        let mut config = system(r)?.clone();
        let mut coupling = None;
        let t_end = match spec.periods {
            Some(periods) => {
                let report = self.locate(r)?;
                config.set_parameter(&report.parameter, report.location)?;
                coupling = Some(report.coupling());
                periods * PI / report.coupling()
            }
            None => spec.t_end.expect("checked"),
        };
        config = config.with_decay(spec.gamma, spec.kappa);
        let mut run = DynamicsRun::new(config, parse_label(&spec.initial)?, t_end);
        run.kind = r.kind;
        run.samples = spec.samples;
        run.max_step = spec.max_step;
        run.cluster_gap = spec.cluster_gap;
        run.observables = spec.observables.iter().map(|o| parse_observable(o)).collect::<Result<_, _>>()?;
        let outcome = run_dynamics(&run)?;
        let series = &outcome.series;
        let extremes: serde_json::Map<String, serde_json::Value> = series
            .names
            .iter()
            .map(|name| {
                let trace = series.trace(name).expect("named trace");
                let (k, max) = trace.iter().enumerate().fold((0, f64::MIN), |acc, (k, v)| if *v > acc.1 { (k, *v) } else { acc });
                (name.clone(), json!({ "max": max, "t_max": series.times[k], "final": trace.last() }))
            })
            .collect();
        let summary = json!({
            "coupling": coupling,
            "half_period": coupling.map(|j| PI / (2.0 * j)),
            "t_end": t_end,
            "frame_dim": outcome.frame_dim,
            "dissipators": outcome.dissipators,
            "step": outcome.step,
            "max_trace_drift": outcome.max_trace_drift,
            "observables": extremes,
        });
        self.artifacts.push(Artifact::text("dynamics.csv", series.to_csv()));
        self.artifacts.push(Artifact::json("dynamics.json", &summary)?);
        Ok(())
    }

    /// Perturbative `2|J|` against the numerical splitting for the
    /// equal-coupling family `ω_1 = ω_2 = ω_3/2`, `ω_c = 1 + 2.5λ`.
    pub fn coupling_scan(&mut self, r: &Resolved) -> Result<(), CliError> {
        let spec = r.coupling_scan.as_ref().ok_or_else(|| missing("coupling_scan"))?;
        let cutoff = system(r)?.fock_cutoff;
        let (a, b) = three_qubit_pair().labels()?;
        let mut csv = String::from("lambda,omega_c,two_j_perturbative,splitting,location,relative_difference\n");
        for &lambda in &spec.lambdas {
            let config = equal_coupling_config(lambda).with_cutoff(cutoff);
            let j = effective_coupling_perturbative(&config, r.kind, &a, &b, 4, DEFAULT_EPSILON)?.total;
            // stays clear of the cavity-like level at omega_c = 1 + 2.5 lambda
            let bracket = (1.0 - lambda, 1.0 + 0.6 * lambda);
            let report = find_anticrossing(&config, "qubits[2].omega", bracket, (&a, &b), &AnticrossingOptions { kind: r.kind, ..Default::default() })?;
            let two_j = 2.0 * j.abs();
            csv.push_str(&[lambda, config.omega_c, two_j, report.splitting, report.location, (two_j - report.splitting).abs() / report.splitting]
                .map(fmt_f64)
                .join(","));
            csv.push('\n');
        }
        self.artifacts.push(Artifact::text("coupling_scan.csv", csv));
        Ok(())
    }

    pub fn ecc(&mut self, r: &Resolved) -> Result<(), CliError> {
        let spec = r.ecc.as_ref().ok_or_else(|| missing("ecc"))?;
        #[derive(Serialize)]
        struct Row {
            state: usize,
            a: qmix::algebra::C64,
            b: qmix::algebra::C64,
            #[serde(flatten)]
            report: EccReport,
        }
        let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
        let mut rows = Vec::new();
        for state in 0..spec.states {
            let (a, b) = random_logical(&mut rng);
            rows.extend(ecc_suite(a, b)?.into_iter().map(|report| Row { state, a, b, report }));
        }
        let worst = rows.iter().map(|row| (row.report.fidelity - 1.0).abs()).fold(0.0, f64::max);
        if worst > 1e-10 {
            return Err(CliError::Numerical(format!("error correction failed: worst |F - 1| = {worst:.3e}")));
        }
        self.artifacts.push(Artifact::json("ecc.json", &rows)?);
        Ok(())
    }

    /// Every section the resolved configuration defines, in a fixed order.
    pub fn run_all(&mut self, r: &Resolved) -> Result<(), CliError> {
        if r.sweep.is_some() {
            self.levels(r)?;
        }
        if r.anticrossing.is_some() {
            self.anticross(r)?;
        }
        if r.perturbation.is_some() {
            self.perturb(r)?;
        }
        if r.dynamics.is_some() {
            self.dynamics(r)?;
        }
        if r.coupling_scan.is_some() {
            self.coupling_scan(r)?;
        }
        if r.ecc.is_some() {
            self.ecc(r)?;
        }
        if self.artifacts.is_empty() {
            return Err(CliError::Validation("configuration defines nothing to run".into()));
        }
        Ok(())
    }
}
