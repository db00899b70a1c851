//! Virtual-transition path sums between resonant bare states and the
//! closed-form effective couplings they reproduce.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{BareLabel, HilbertLayout, OperatorMatrix};
use crate::error::{Error, Result};
use crate::model::{bare_energies, interaction, HamiltonianKind, SystemConfig};

/// Default guard against intermediates degenerate with the initial state.
pub const DEFAULT_EPSILON: f64 = 1e-9;
/// Matrix elements at or below this magnitude are not links.
const LINK_THRESHOLD: f64 = 1e-14;
const IMAGINARY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitionPath {
    /// Bare indices `i, k, …, f`.
    pub states: Vec<usize>,
    pub labels: Vec<String>,
    pub amplitude: f64,
    /// Bare index of the first intermediate state.
    pub diagram: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PathSumReport {
    pub order: usize,
    pub initial: String,
    pub r#final: String,
    /// `E_i − E_f`; zero for the resonant pairs the sum is meant for.
    pub detuning: f64,
    pub paths: Vec<TransitionPath>,
    /// Subtotal per first intermediate state, keyed by its bare index.
    pub per_diagram: BTreeMap<usize, f64>,
    pub total: f64,
}

impl PathSumReport {
    pub fn path_count(&self) -> usize {
        self.paths.len()
    }

    /// Plain sum of path amplitudes in path order.
    pub fn path_sum(&self) -> f64 {
        self.paths.iter().map(|p| p.amplitude).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// All `order`-step paths `i → … → f` through `v`, with amplitudes
/// `Π V / Π (E_i − E_k)` over the intermediates `k`.
///
/// `i` and `f` never appear as intermediates. An intermediate within
/// `epsilon` of `E_i` on a connected path is an error.
pub fn enumerate_paths(
    energies: &[f64],
    v: &OperatorMatrix,
    i: usize,
    f: usize,
    order: usize,
    epsilon: f64,
) -> Result<PathSumReport> {
    if !(2..=4).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let dim = v.dim();
    if energies.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: energies.len() });
    }
    if i >= dim || f >= dim {
        return Err(Error::DimensionMismatch { expected: dim, got: i.max(f) + 1 });
    }
    let m = v.matrix();
    let links: Vec<Vec<usize>> = (0..dim)
        .map(|from| (0..dim).filter(|to| m[(*to, from)].norm() > LINK_THRESHOLD).collect())
        .collect();
    let is_intermediate = |k: usize| k != i && k != f;
    // reach[d][k]: an intermediate k can reach f in exactly d more links
    let mut reach = vec![vec![false; dim]; order];
    for k in 0..dim {
        reach[1][k] = is_intermediate(k) && m[(f, k)].norm() > LINK_THRESHOLD;
    }
    for d in 2..order {
        for k in 0..dim {
            reach[d][k] = is_intermediate(k) && links[k].iter().any(|to| reach[d - 1][*to]);
        }
    }

    let e_i = energies[i];
    let layout = v.layout();
    let mut paths = Vec::new();
    let mut stack = vec![i];
    walk(&mut stack, order, f, &links, &reach, &mut |states: &[usize]| {
        let mut amp = crate::algebra::c(1.0);
        for w in states.windows(2) {
            amp *= m[(w[1], w[0])];
        }
        for k in &states[1..order] {
            let gap = e_i - energies[*k];
            if gap.abs() <= epsilon {
                return Err(Error::DegenerateIntermediate { state: *k, gap: gap.abs() });
            }
            amp /= gap;
        }
        if amp.im.abs() > IMAGINARY_TOL {
            return Err(Error::ComplexAmplitude(amp.im));
        }
        paths.push(TransitionPath {
            states: states.to_vec(),
            labels: states.iter().map(|s| layout.label_of(*s).to_string()).collect(),
            amplitude: amp.re,
            diagram: states[1],
        });
        Ok(())
    })?;
    paths.sort_by(|a, b| a.states.cmp(&b.states));

    let mut per_diagram: BTreeMap<usize, f64> = BTreeMap::new();
    for p in &paths {
        *per_diagram.entry(p.diagram).or_insert(0.0) += p.amplitude;
    }
    let total = per_diagram.values().sum();
    Ok(PathSumReport {
        order,
        initial: layout.label_of(i).to_string(),
        r#final: layout.label_of(f).to_string(),
        detuning: e_i - energies[f],
        paths,
        per_diagram,
        total,
    })
}

fn walk(
    stack: &mut Vec<usize>,
    order: usize,
    f: usize,
    links: &[Vec<usize>],
    reach: &[Vec<bool>],
    emit: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    let depth = stack.len() - 1;
    let here = *stack.last().unwrap();
    if depth == order - 1 {
        if links[here].contains(&f) {
            stack.push(f);
            let out = emit(stack);
            stack.pop();
            return out;
        }
        return Ok(());
    }
    let remaining = order - 1 - depth;
    for next in &links[here] {
        if reach[remaining][*next] {
            stack.push(*next);
            walk(stack, order, f, links, reach, emit)?;
            stack.pop();
        }
    }
    Ok(())
}

/// Path sum for the Hamiltonian built from `config`, between two bare labels.
pub fn effective_coupling_perturbative(
    config: &SystemConfig,
    kind: HamiltonianKind,
    initial: &BareLabel,
    target: &BareLabel,
    order: usize,
    epsilon: f64,
) -> Result<PathSumReport> {
    config.validate()?;
    let layout: HilbertLayout = config.layout()?;
    let i = layout.index_of(initial)?;
    let f = layout.index_of(target)?;
    let energies = bare_energies(config)?;
    let v = interaction(config, kind)?;
    enumerate_paths(&energies, &v, i, f, order, epsilon)
}

/// Detuning shorthands for qubit frequencies `ω_1..ω_n` and cavity `ω_c`.
/// Indices are 1-based as in the usual notation.
#[derive(Clone, Debug)]
pub struct DetuningTable {
    omegas: Vec<f64>,
    omega_c: f64,
}

impl DetuningTable {
    pub fn new(omegas: &[f64], omega_c: f64) -> Self {
        Self { omegas: omegas.to_vec(), omega_c }
    }

    fn w(&self, n: usize) -> f64 {
        self.omegas[n - 1]
    }

    /// `ω_n − ω_m`
    pub fn delta(&self, n: usize, m: usize) -> f64 {
        self.w(n) - self.w(m)
    }

    /// `ω_n + ω_m`
    pub fn big_omega(&self, n: usize, m: usize) -> f64 {
        self.w(n) + self.w(m)
    }

    /// `ω_c − ω_n`
    pub fn delta_c(&self, n: usize) -> f64 {
        self.omega_c - self.w(n)
    }

    /// `ω_c + ω_n`
    pub fn omega_c(&self, n: usize) -> f64 {
        self.omega_c + self.w(n)
    }

    /// `2ω_c − ω_n`
    pub fn delta_2c(&self, n: usize) -> f64 {
        2.0 * self.omega_c - self.w(n)
    }

    /// `2ω_c + ω_n`
    pub fn omega_2c(&self, n: usize) -> f64 {
        2.0 * self.omega_c + self.w(n)
    }
}

/// Signed coupling sum `λ_{s1 s2 s3} = s1 λ_1 + s2 λ_2 + s3 λ_3`.
pub fn signed_lambda(lambdas: [f64; 3], signs: [i8; 3]) -> f64 {
    lambdas.iter().zip(signs).map(|(l, s)| f64::from(s) * l).sum()
}

fn nonzero(value: f64, what: &str) -> Result<f64> {
    if value.abs() < 1e-300 || !value.is_finite() {
        Err(Error::Pole(what.to_string()))
    } else {
        Ok(value)
    }
}

/// Three-qubit mixing coupling for equal couplings and `ω_1 = ω_2 = ω_3/2`.
pub fn j3_closed_form(lambda: f64, omega3: f64, omega_c: f64, theta: f64) -> Result<f64> {
    let w2 = omega3 * omega3;
    let c2 = omega_c * omega_c;
    nonzero(omega3, "qubit frequency is zero")?;
    nonzero(w2 - c2, "cavity becomes resonant with qubit 3")?;
    nonzero(w2 - 4.0 * c2, "cavity becomes resonant with qubits 1 and 2")?;
    let num = 64.0 * lambda.powi(4) * c2 * (4.0 * c2 - 7.0 * w2) * theta.sin() * theta.cos().powi(3);
    let den = omega3 * (w2 - c2) * (w2 - 4.0 * c2).powi(2);
    Ok(num / den)
}

/// Order-4 coupling `|e,e,g,g,0⟩ ↔ |g,g,e,e,0⟩` under the rotating-wave
/// interaction.
pub fn j4_tc_closed_form(lambdas: [f64; 4], omegas: [f64; 4], omega_c: f64) -> Result<f64> {
    let t = DetuningTable::new(&omegas, omega_c);
    let big_lambda: f64 = lambdas.iter().product();
    let (d13, d24, d14, d23) = (t.delta(1, 3), t.delta(2, 4), t.delta(1, 4), t.delta(2, 3));
    let den = d13 * d23 * d14 * d24 * (-t.delta_c(1)) * (-t.delta_c(2));
    nonzero(den, "vanishing detuning in denominator")?;
    Ok(big_lambda * (d13 + d24) * (d13 * d24 + d14 * d23) / den)
}

/// Order-4 coupling `|e,e,g,g,0⟩ ↔ |g,g,e,e,0⟩` for the full Rabi
/// interaction at zero longitudinal angle.
///
/// The last bracket carries `ω_3² + 4ω_3ω_4 + ω_4²`, symmetric in 3 ↔ 4 like
/// every other factor; without the `ω_4²` term the expression disagrees with
/// the 48-path sum.
pub fn j4_rabi_closed_form(lambdas: [f64; 4], omegas: [f64; 4], omega_c: f64) -> Result<f64> {
    let [w1, w2, w3, w4] = omegas;
    let wc = omega_c;
    let t = DetuningTable::new(&omegas, omega_c);
    let big_lambda: f64 = lambdas.iter().product();
    let o12 = t.big_omega(1, 2);
    let o34 = t.big_omega(3, 4);
    let d23 = t.delta(2, 3);
    let d24 = t.delta(2, 4);

    let term1 = 3.0 * w2 * w3 * w4 * d23 * d24 * o34;
    let term2 = (2.0 * wc * (d23 - w4) - 4.0 * wc * wc)
        * (w3 * w3 * w4 * w4 - 3.0 * w2 * w3 * w4 * o34 + w2 * w2 * (w3 * w3 + 3.0 * w3 * w4 + w4 * w4));
    let term3 = w1 * w1
        * (o12 - o34 - 2.0 * wc)
        * (3.0 * d23 * d24 * o34
            + 2.0 * wc * (w2 * w2 + w3 * w3 + w4 * w4 + 3.0 * w3 * w4 - 3.0 * w2 * o34));
    let term4 = w1
        * (12.0 * wc * wc * d23 * d24 * o34 - 3.0 * d23 * d24 * o34 * (w2 * o34 - w3 * w4)
            + 2.0 * wc
                * (w2 * w2 * (7.0 * w3 * w3 + 15.0 * w3 * w4 + 7.0 * w4 * w4)
                    + w3 * w4 * (3.0 * w3 * w3 + 7.0 * w3 * w4 + 3.0 * w4 * w4)
                    - 3.0 * w2 * o34 * (w2 * w2 + w3 * w3 + 4.0 * w3 * w4 + w4 * w4)));
    let den = o12
        * o34
        * t.omega_c(3)
        * t.omega_c(4)
        * t.delta(1, 3)
        * t.delta(1, 4)
        * d23
        * d24
        * t.delta_c(1)
        * t.delta_c(2);
    nonzero(den, "vanishing detuning in denominator")?;
    Ok(big_lambda * (o12 - o34) * (term1 + term2 + term3 + term4) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{effective_j2, QubitParams};
    use std::f64::consts::PI;

    fn label(s: &str) -> BareLabel {
        BareLabel::parse(s).unwrap()
    }

    fn two_degenerate(theta: f64) -> SystemConfig {
        SystemConfig::new(vec![QubitParams::new(0.5, 0.01, theta), QubitParams::new(0.5, 0.01, theta)], 1.0)
            .with_cutoff(4)
    }

    #[test]
    fn second_order_dicke_has_two_paths() {
        let config = two_degenerate(0.0);
        let report = effective_coupling_perturbative(
            &config,
            HamiltonianKind::GeneralizedDicke,
            &label("eg0"),
            &label("ge0"),
            2,
            DEFAULT_EPSILON,
        )
        .unwrap();
        assert_eq!(report.path_count(), 2);
        assert_eq!(report.paths[0].labels, ["eg0", "gg1", "ge0"]);
        assert_eq!(report.paths[1].labels, ["eg0", "ee1", "ge0"]);
    }

    #[test]
    fn second_order_tc_matches_dispersive_coupling() {
        let config = two_degenerate(0.0);
        let report = effective_coupling_perturbative(
            &config,
            HamiltonianKind::TavisCummings,
            &label("eg0"),
            &label("ge0"),
            2,
            DEFAULT_EPSILON,
        )
        .unwrap();
        let j2 = effective_j2(&config, 1, 2).unwrap();
        assert_eq!(report.path_count(), 1);
        assert!((report.total.abs() - j2.abs()).abs() <= 1e-12 * j2.abs());
    }

    #[test]
    fn third_order_photon_to_pair() {
        let (lambda, w0, theta) = (0.01, 1.0, 0.4);
        let config = SystemConfig::new(
            vec![QubitParams::new(w0, lambda, theta), QubitParams::new(w0, lambda, theta)],
            2.0 * w0,
        )
        .with_cutoff(5);
        let report = effective_coupling_perturbative(
            &config,
            HamiltonianKind::GeneralizedDicke,
            &label("gg1"),
            &label("ee0"),
            3,
            DEFAULT_EPSILON,
        )
        .unwrap();
        let expected = -8.0 / 3.0 * theta.sin() * theta.cos().powi(2) * lambda.powi(3) / (w0 * w0);
        assert!((report.total - expected).abs() <= 1e-10 * expected.abs(), "{} vs {}", report.total, expected);
    }

    #[test]
    fn degenerate_intermediate_is_reported() {
        // ω_c = ω: |g,g,1⟩ is degenerate with |e,g,0⟩
        let config = SystemConfig::new(vec![QubitParams::new(1.0, 0.01, 0.0), QubitParams::new(1.0, 0.01, 0.0)], 1.0)
            .with_cutoff(3);
        let err = effective_coupling_perturbative(
            &config,
            HamiltonianKind::TavisCummings,
            &label("eg0"),
            &label("ge0"),
            2,
            DEFAULT_EPSILON,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateIntermediate { .. }));
    }

    #[test]
    fn unsupported_order() {
        let config = two_degenerate(0.0);
        for order in [0, 1, 5] {
            let err = effective_coupling_perturbative(
                &config,
                HamiltonianKind::TavisCummings,
                &label("eg0"),
                &label("ge0"),
                order,
                DEFAULT_EPSILON,
            )
            .unwrap_err();
            assert_eq!(err, Error::UnsupportedOrder(order));
        }
    }

    #[test]
    fn diagrams_partition_the_total() {
        let config = SystemConfig::new(
            vec![
                QubitParams::new(0.5, 0.1, PI / 6.0),
                QubitParams::new(0.5, 0.1, PI / 6.0),
                QubitParams::new(1.0, 0.1, PI / 6.0),
            ],
            1.25,
        )
        .with_cutoff(5);
        let report = effective_coupling_perturbative(
            &config,
            HamiltonianKind::GeneralizedDicke,
            &label("gge0"),
            &label("eeg0"),
            4,
            DEFAULT_EPSILON,
        )
        .unwrap();
        assert_eq!(report.per_diagram.len(), 4);
        assert!((report.total - report.path_sum()).abs() <= 1e-12 * report.total.abs());
        let json = report.to_json();
        assert!(json.contains("\"per_diagram\""));
    }

    #[test]
    fn closed_form_zeros_and_poles() {
        assert!(j3_closed_form(0.1, 1.0, 7f64.sqrt() / 2.0, PI / 6.0).unwrap().abs() < 1e-18);
        assert_eq!(j3_closed_form(0.1, 1.0, 1.25, 0.0).unwrap(), 0.0);
        assert!(matches!(j3_closed_form(0.1, 1.0, 1.0, 0.3), Err(Error::Pole(_))));
        assert!(matches!(j3_closed_form(0.1, 1.0, 0.5, 0.3), Err(Error::Pole(_))));
        let value = j3_closed_form(0.1, 1.0, 1.25, PI / 6.0).unwrap();
        assert!((value - 1.571e-4).abs() < 1e-7, "{value}");

        let tc = j4_tc_closed_form([0.1; 4], [4.0, 1.2, 3.0, 2.0], 6.0).unwrap();
        assert!((tc + 3.18e-6).abs() < 1e-8, "{tc}");
        assert_eq!(j4_tc_closed_form([0.1, 0.1, 0.0, 0.1], [4.0, 1.2, 3.0, 2.0], 6.0).unwrap(), 0.0);
        assert_eq!(j4_tc_closed_form([0.1; 4], [4.0, 1.0, 3.0, 2.0], 6.0).unwrap(), 0.0);
        assert!(j4_rabi_closed_form([0.1; 4], [4.0, 1.0, 3.0, 2.0], 6.0).unwrap().abs() < 1e-20);
        assert_eq!(j4_rabi_closed_form([0.0; 4], [4.0, 1.2, 3.0, 2.0], 6.0).unwrap(), 0.0);
        assert!(matches!(j4_tc_closed_form([0.1; 4], [4.0, 3.0, 3.0, 2.0], 6.0), Err(Error::Pole(_))));
    }

    #[test]
    fn detuning_table_symmetries() {
        let t = DetuningTable::new(&[0.3, 0.7, 1.1], 1.5);
        for n in 1..=3 {
            for m in 1..=3 {
                assert_eq!(t.delta(n, m), -t.delta(m, n));
                assert_eq!(t.big_omega(n, m), t.big_omega(m, n));
            }
        }
        assert!((t.delta_2c(2) - 2.3).abs() < 1e-15);
        assert!((t.omega_2c(1) - 3.3).abs() < 1e-15);
        assert_eq!(signed_lambda([0.1, 0.2, 0.3], [1, -1, 1]), 0.1 - 0.2 + 0.3);
    }
}
