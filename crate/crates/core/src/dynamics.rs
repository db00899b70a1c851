//! Zero-temperature master equation in the dressed (eigenstate) picture and
//! the excitation/correlation observables built from dressed qubit operators.

use std::fmt::Write as _;

use nalgebra::{DVector, SymmetricEigen};
use serde::Serialize;

use crate::algebra::{c, cavity_quadrature, number_operator, embed_qubit_op, pauli, BareLabel, CMatrix, CVector, KetVector, Level, OperatorMatrix};
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, HamiltonianKind, SystemConfig};
use crate::spectrum::{diagonalize, fmt_f64, DressedBasis, SpectrumResult, DEFAULT_CLUSTER_GAP};

pub const TRACE_DRIFT_TOL: f64 = 1e-7;

/// A density matrix with the time it refers to.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    data: CMatrix,
    time: f64,
}

impl DensityMatrix {
    pub fn new(data: CMatrix, time: f64) -> Result<Self> {
        let rho = Self { data, time };
        rho.validate(1e-8)?;
        Ok(rho)
    }

    pub fn pure(state: &CVector) -> Self {
        let psi = state / c(state.norm());
        Self { data: &psi * psi.adjoint(), time: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        self.data.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn purity(&self) -> f64 {
        (&self.data * &self.data).trace().re
    }

    /// Hermiticity (1e−10), unit trace (`trace_tol`) and positivity (−1e−8).
    pub fn validate(&self, trace_tol: f64) -> Result<()> {
        if !self.data.is_square() {
            return Err(Error::InvalidDensityMatrix("not square".into()));
        }
        let deviation = crate::algebra::hermiticity_deviation(&self.data);
        if deviation > 1e-10 {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian ({deviation:.3e})")));
        }
        if (self.trace() - 1.0).abs() > trace_tol {
            return Err(Error::InvalidDensityMatrix(format!("trace {}", self.trace())));
        }
        let herm = (&self.data + self.data.adjoint()) * c(0.5);
        let min = SymmetricEigen::new(herm).eigenvalues.min();
        if min < -1e-8 {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Channel {
    Cavity,
    /// 1-based qubit index.
    Qubit(usize),
}

/// Jump `|lower⟩⟨upper|` between eigenstates with the given rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Dissipator {
    pub lower: usize,
    pub upper: usize,
    pub rate: f64,
    pub channel: Channel,
}

/// Dressed lowering operator of qubit `qubit` (1-based), in the bare basis:
/// `Σ |φ(g_q, rest)⟩⟨φ(e_q, rest)|` over every context present in `basis`.
pub fn build_dressed_lowering(basis: &DressedBasis, qubit: usize) -> Result<OperatorMatrix> {
    let layout = basis.layout();
    layout.check_qubit(qubit)?;
    let mut m = CMatrix::zeros(layout.dim(), layout.dim());
    for n in 0..basis.len() {
        let label = basis.label(n);
        if label.levels[qubit - 1] != Level::Excited {
            continue;
        }
        let mut lowered = label.clone();
        lowered.levels[qubit - 1] = Level::Ground;
        if let Some(g) = basis.position(&lowered) {
            m += basis.vectors().column(g) * basis.vectors().column(n).adjoint();
        }
    }
    OperatorMatrix::from_matrix(layout, m)
}

/// Eigenstate frame spanning the lowest `dim` levels, with labeled dressed
/// states inside it.
#[derive(Clone, Debug)]
pub struct DressedFrame {
    spectrum: SpectrumResult,
    basis: DressedBasis,
    dim: usize,
}

impl DressedFrame {
    /// Frame covering every level up to `max_energy` (whole clusters).
    pub fn new(spectrum: SpectrumResult, max_energy: f64, cluster_gap: f64) -> Result<Self> {
        let basis = spectrum.dressed_basis(Some(max_energy), cluster_gap)?;
        let dim = basis.eigen_count();
        Ok(Self { spectrum, basis, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spectrum(&self) -> &SpectrumResult {
        &self.spectrum
    }

    pub fn basis(&self) -> &DressedBasis {
        &self.basis
    }

    /// Frame Hamiltonian: ground-offset eigenvalues on the diagonal.
    pub fn hamiltonian(&self) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(self.dim, self.spectrum.energies()[..self.dim].iter().map(|e| c(*e))))
    }

    fn vectors(&self) -> CMatrix {
        self.spectrum.eigenvectors().columns(0, self.dim).into_owned()
    }

    /// `V† O V` restricted to the frame.
    pub fn project(&self, op: &OperatorMatrix) -> CMatrix {
        let v = self.vectors();
        v.adjoint() * op.matrix() * v
    }

    pub fn project_ket(&self, ket: &KetVector) -> CVector {
        self.vectors().adjoint() * ket.amplitudes()
    }

    /// Dressed state with the given label, in frame coordinates.
    pub fn dressed_state(&self, label: &BareLabel) -> Result<CVector> {
        let n = self.basis.position(label).ok_or_else(|| Error::MissingLabel(label.to_string()))?;
        Ok(self.basis.coefficients().view((0, n), (self.dim, 1)).column(0).into_owned())
    }

    /// Dressed lowering operator of `qubit` in frame coordinates.
    pub fn lowering(&self, qubit: usize) -> Result<CMatrix> {
        Ok(self.project(&build_dressed_lowering(&self.basis, qubit)?))
    }

    /// `⟨a|H|b⟩` between two dressed states.
    pub fn coupling(&self, a: &BareLabel, b: &BareLabel) -> Result<f64> {
        let va = self.dressed_state(a)?;
        let vb = self.dressed_state(b)?;
        Ok((va.adjoint() * self.hamiltonian() * vb)[(0, 0)].re)
    }
}

/// Downward jumps inside the lowest `dim` eigenstates, one per channel with a
/// nonzero rate: `κ|⟨j|X|k⟩|²` and `γ_q|⟨j|σ_x^q|k⟩|²`.
pub fn build_dissipators(spectrum: &SpectrumResult, config: &SystemConfig, dim: usize) -> Result<Vec<Dissipator>> {
    let layout = spectrum.layout();
    let dim = dim.min(spectrum.len());
    let v = spectrum.eigenvectors().columns(0, dim).into_owned();
    let mut channels: Vec<(Channel, f64, CMatrix)> = Vec::new();
    if config.kappa > 0.0 {
        channels.push((Channel::Cavity, config.kappa, v.adjoint() * cavity_quadrature(layout).matrix() * &v));
    }
    for (q, qubit) in config.qubits.iter().enumerate() {
        if qubit.gamma > 0.0 {
            let sx = embed_qubit_op(layout, q + 1, &pauli::sigma_x())?;
            channels.push((Channel::Qubit(q + 1), qubit.gamma, v.adjoint() * sx.matrix() * &v));
        }
    }
    let energies = spectrum.energies();
    let mut out = Vec::new();
    for (channel, strength, x) in &channels {
        for k in 0..dim {
            for j in 0..k {
                if energies[k] - energies[j] <= 1e-12 {
                    continue;
                }
                let rate = strength * x[(j, k)].norm_sqr();
                if rate > 1e-12 * strength {
                    out.push(Dissipator { lower: j, upper: k, rate, channel: *channel });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    /// Upper bound on the RK4 step; the step never exceeds `0.01/ω_max` either.
    pub max_step: Option<f64>,
    pub trace_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { max_step: None, trace_tol: TRACE_DRIFT_TOL }
    }
}

struct Generator<'a> {
    h: &'a CMatrix,
    diagonal: Option<Vec<f64>>,
    out_rate: Vec<f64>,
    jumps: &'a [Dissipator],
}

impl Generator<'_> {
    fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let d = rho.nrows();
        let mut out = match &self.diagonal {
            Some(e) => CMatrix::from_fn(d, d, |a, b| c(0.0) - C_I * c(e[a] - e[b]) * rho[(a, b)]),
            None => (self.h * rho - rho * self.h) * (-C_I),
        };
        for b in 0..d {
            for a in 0..d {
                out[(a, b)] -= rho[(a, b)] * (0.5 * (self.out_rate[a] + self.out_rate[b]));
            }
        }
        for jump in self.jumps {
            out[(jump.lower, jump.lower)] += rho[(jump.upper, jump.upper)] * jump.rate;
        }
        out
    }
}

const C_I: crate::algebra::C64 = crate::algebra::C64::new(0.0, 1.0);

fn frequency_span(h: &CMatrix) -> f64 {
    let eig = SymmetricEigen::new((h + h.adjoint()) * c(0.5)).eigenvalues;
    (eig.max() - eig.min()).max(0.0)
}

/// Integrates `ρ̇ = −i[H,ρ] + Σ Γ(LρL† − ½{L†L,ρ})` with fixed-step RK4 and
/// returns a snapshot at every time in `t_grid` (the first entry is the
/// start time of `rho0`'s evolution).
pub fn evolve(
    rho0: &DensityMatrix,
    h: &CMatrix,
    dissipators: &[Dissipator],
    t_grid: &[f64],
    options: &EvolveOptions,
) -> Result<Vec<DensityMatrix>> {
    let d = rho0.dim();
    if h.nrows() != d || h.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: h.nrows() });
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneGrid);
    }
    if let Some(j) = dissipators.iter().find(|j| j.lower >= d || j.upper >= d || j.rate < 0.0) {
        return Err(Error::InvalidConfig(format!("dissipator {j:?} outside a {d}-level frame")));
    }
    let is_diagonal = (0..d).all(|a| (0..d).all(|b| a == b || h[(a, b)] == c(0.0)));
    let mut out_rate = vec![0.0; d];
    for j in dissipators {
        out_rate[j.upper] += j.rate;
    }
    let generator = Generator {
        h,
        diagonal: is_diagonal.then(|| (0..d).map(|a| h[(a, a)].re).collect()),
        out_rate,
        jumps: dissipators,
    };
    let span = frequency_span(h).max(out_rate_max(dissipators, d));
    let mut step = if span > 0.0 { 0.01 / span } else { f64::INFINITY };
    if let Some(cap) = options.max_step {
        step = step.min(cap);
    }

    let mut rho = rho0.data.clone();
    let mut time = t_grid.first().copied().unwrap_or(rho0.time);
    let initial_trace = rho0.trace();
    let mut snapshots = Vec::with_capacity(t_grid.len());
    for &target in t_grid {
        let interval = target - time;
        if interval > 0.0 {
            let n = if step.is_finite() { (interval / step).ceil().max(1.0) as usize } else { 1 };
            let dt = interval / n as f64;
            for _ in 0..n {
                let k1 = generator.rhs(&rho);
                let k2 = generator.rhs(&(&rho + &k1 * c(0.5 * dt)));
                let k3 = generator.rhs(&(&rho + &k2 * c(0.5 * dt)));
                let k4 = generator.rhs(&(&rho + &k3 * c(dt)));
                rho += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(dt / 6.0);
            }
            time = target;
        }
        let drift = (rho.trace().re - initial_trace).abs();
        if drift > options.trace_tol {
            return Err(Error::TraceDrift { drift, time, step });
        }
        snapshots.push(DensityMatrix { data: rho.clone(), time });
    }
    Ok(snapshots)
}

fn out_rate_max(dissipators: &[Dissipator], d: usize) -> f64 {
    let mut total = vec![0.0; d];
    for j in dissipators {
        total[j.upper] += j.rate;
    }
    total.into_iter().fold(0.0, f64::max)
}

/// `Re Tr[ρ · Π ops]`; the imaginary residue must vanish.
pub fn expectation(rho: &DensityMatrix, ops: &[&CMatrix]) -> Result<f64> {
    let d = rho.dim();
    let mut product = CMatrix::identity(d, d);
    for op in ops {
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: op.nrows() });
        }
        product = product * *op;
    }
    let value = (rho.matrix() * product).trace();
    let scale = 1.0 + value.re.abs();
    if value.im.abs() > 1e-10 * scale {
        return Err(Error::InvalidDensityMatrix(format!("expectation has imaginary part {:.3e}", value.im)));
    }
    Ok(value.re)
}

/// `⟨target|ρ|target⟩` for a normalized target.
pub fn state_fidelity(rho: &DensityMatrix, target: &CVector) -> Result<f64> {
    if target.len() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: target.len() });
    }
    let t = target / c(target.norm());
    Ok((t.adjoint() * rho.matrix() * t)[(0, 0)].re.clamp(0.0, 1.0))
}

/// Named observables sampled on a time grid.
#[derive(Clone, Debug, Serialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    /// `values[k][n]` is observable `k` at `times[n]`.
    pub values: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn trace(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|k| self.values[k].as_slice())
    }

    /// Time and value of the first local maximum of `name` that is also at
    /// least `fraction` of the global maximum.
    pub fn first_peak(&self, name: &str, fraction: f64) -> Option<(f64, f64)> {
        let y = self.trace(name)?;
        let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (1..y.len().saturating_sub(1))
            .find(|&n| y[n] >= y[n - 1] && y[n] >= y[n + 1] && y[n] >= fraction * max)
            .map(|n| (self.times[n], y[n]))
    }

    /// `t,obs1,obs2,…` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for n in &self.names {
            write!(out, ",{n}").unwrap();
        }
        out.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            out.push_str(&fmt_f64(*t));
            for v in &self.values {
                write!(out, ",{}", fmt_f64(v[i])).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Observable {
    /// `⟨S₊⁽q⁾S₋⁽q⁾⟩`
    Excitation(usize),
    /// `⟨S₊⁽q1⁾…S₊⁽qn⁾S₋⁽qn⁾…S₋⁽q1⁾⟩`
    Correlation(Vec<usize>),
    /// Bare intracavity photon number `⟨a†a⟩`.
    Photons,
    /// Output photon number `⟨X⁻X⁺⟩`, with `X⁺` the positive-frequency part of
    /// `a + a†` in the eigenbasis.
    OutputPhotons,
    /// Fidelity with `(|a⟩ − i·s|b⟩)/√2`, `s` the sign of the dressed coupling.
    Ghz(BareLabel, BareLabel),
}

impl Observable {
    pub fn name(&self) -> String {
        let join = |qs: &[usize]| qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join("_");
        match self {
            Observable::Excitation(q) => format!("exc_q{q}"),
            Observable::Correlation(qs) => format!("corr_q{}", join(qs)),
            Observable::Photons => "photons".into(),
            Observable::OutputPhotons => "output_photons".into(),
            Observable::Ghz(a, b) => format!("ghz_{a}_{b}"),
        }
    }
}

/// A dressed-picture run from one labeled initial state.
#[derive(Clone, Debug)]
pub struct DynamicsRun {
    pub config: SystemConfig,
    pub kind: HamiltonianKind,
    pub initial: BareLabel,
    pub t_end: f64,
    pub samples: usize,
    pub observables: Vec<Observable>,
    pub max_step: Option<f64>,
    pub cluster_gap: f64,
}

impl DynamicsRun {
    pub fn new(config: SystemConfig, initial: BareLabel, t_end: f64) -> Self {
        Self {
            config,
            kind: HamiltonianKind::GeneralizedDicke,
            initial,
            t_end,
            samples: 401,
            observables: Vec::new(),
            max_step: None,
            cluster_gap: DEFAULT_CLUSTER_GAP,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DynamicsOutcome {
    pub series: TimeSeries,
    pub frame_dim: usize,
    pub dissipators: usize,
    /// Largest `|⟨initial|H|partner⟩|` inside the initial state's cluster.
    pub coupling: f64,
    pub step: f64,
    pub max_trace_drift: f64,
}

/// Builds the frame, dissipators and observables for `run` and integrates.
pub fn run_dynamics(run: &DynamicsRun) -> Result<DynamicsOutcome> {
    run.config.validate()?;
    if !(run.t_end > 0.0) || run.samples < 2 {
        return Err(Error::InvalidConfig("dynamics needs t_end > 0 and at least 2 samples".into()));
    }
    let spectrum = diagonalize(&build_hamiltonian(&run.config, run.kind)?)?;
    // frame: everything up to the cluster holding most of the initial bare state
    let bare = run.config.layout()?.index_of(&run.initial)?;
    let energies = spectrum.energies();
    let vectors = spectrum.eigenvectors();
    let mut top = (0..spectrum.len())
        .max_by(|a, b| vectors[(bare, *a)].norm_sqr().total_cmp(&vectors[(bare, *b)].norm_sqr()).then(b.cmp(a)))
        .unwrap_or(0);
    while top + 1 < spectrum.len() && energies[top + 1] - energies[top] < run.cluster_gap {
        top += 1;
    }
    let start_energy = energies[top];
    let frame = DressedFrame::new(spectrum, start_energy + 1e-9, run.cluster_gap)?;
    let psi0 = frame.dressed_state(&run.initial)?;
    let h = frame.hamiltonian();
    let coupling = {
        let n0 = frame.basis().position(&run.initial).unwrap();
        (0..frame.basis().len())
            .filter(|m| *m != n0 && frame.basis().cluster(*m) == frame.basis().cluster(n0))
            .map(|m| frame.coupling(&run.initial, &frame.basis().label(m)).map(f64::abs))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max)
    };
    let dissipators = build_dissipators(frame.spectrum(), &run.config, frame.dim())?;

    let mut lowering: Vec<Option<CMatrix>> = vec![None; run.config.qubit_count() + 1];
    let mut get_lowering = |q: usize| -> Result<CMatrix> {
        if q == 0 || q >= lowering.len() {
            return Err(Error::QubitIndexOutOfRange { index: q, qubit_count: lowering.len() - 1 });
        }
        if lowering[q].is_none() {
            lowering[q] = Some(frame.lowering(q)?);
        }
        Ok(lowering[q].clone().unwrap())
    };
    enum Compiled {
        Operator(CMatrix),
        Target(CVector),
    }
    let mut compiled = Vec::new();
    for obs in &run.observables {
        let item = match obs {
            Observable::Excitation(q) => {
                let s = get_lowering(*q)?;
                Compiled::Operator(s.adjoint() * s)
            }
            Observable::Correlation(qs) => {
                let mut lower = CMatrix::identity(frame.dim(), frame.dim());
                for q in qs.iter() {
                    lower = get_lowering(*q)? * lower;
                }
                Compiled::Operator(lower.adjoint() * lower)
            }
            Observable::Photons => Compiled::Operator(frame.project(&number_operator(run.config.layout()?))),
            Observable::OutputPhotons => {
                let x = frame.project(&cavity_quadrature(run.config.layout()?));
                let xp = CMatrix::from_fn(frame.dim(), frame.dim(), |j, k| if k > j { x[(j, k)] } else { c(0.0) });
                Compiled::Operator(xp.adjoint() * xp)
            }
            Observable::Ghz(a, b) => {
                let sign = frame.coupling(a, b)?.signum();
                let va = frame.dressed_state(a)?;
                let vb = frame.dressed_state(b)?;
                Compiled::Target((va - vb * (C_I * sign)) * c(std::f64::consts::FRAC_1_SQRT_2))
            }
        };
        compiled.push(item);
    }

    let times: Vec<f64> = (0..run.samples).map(|n| run.t_end * n as f64 / (run.samples - 1) as f64).collect();
    let mut max_step = run.max_step;
    if coupling > 0.0 {
        let cap = 1e-3 * std::f64::consts::PI / coupling;
        max_step = Some(max_step.map_or(cap, |s| s.min(cap)));
    }
    let options = EvolveOptions { max_step, ..Default::default() };
    let rho0 = DensityMatrix::pure(&psi0);
    let snapshots = evolve(&rho0, &h, &dissipators, &times, &options)?;
    let mut values = vec![Vec::with_capacity(times.len()); compiled.len()];
    let mut max_trace_drift: f64 = 0.0;
    for rho in &snapshots {
        max_trace_drift = max_trace_drift.max((rho.trace() - 1.0).abs());
        for (k, item) in compiled.iter().enumerate() {
            let v = match item {
                Compiled::Operator(op) => expectation(rho, &[op])?,
                Compiled::Target(t) => state_fidelity(rho, t)?,
            };
            values[k].push(v);
        }
    }
    let span = frequency_span(&h);
    let mut step = if span > 0.0 { 0.01 / span } else { f64::INFINITY };
    if let Some(cap) = max_step {
        step = step.min(cap);
    }
    Ok(DynamicsOutcome {
        series: TimeSeries { times, names: run.observables.iter().map(Observable::name).collect(), values },
        frame_dim: frame.dim(),
        dissipators: dissipators.len(),
        coupling,
        step,
        max_trace_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bare_state, levels};
    use crate::model::{build_effective_hamiltonian, EffectiveKind, QubitParams};

    fn label(s: &str) -> BareLabel {
        BareLabel::parse(s).unwrap()
    }

    #[test]
    fn effective_three_qubit_rabi() {
        let j = 0.01;
        let h = build_effective_hamiltonian(EffectiveKind::ThreeQubit, j, 3).unwrap();
        let layout = h.layout();
        let psi = bare_state(layout, &levels("gge"), 0).unwrap();
        let rho0 = DensityMatrix::pure(psi.amplitudes());
        let times: Vec<f64> = (0..21).map(|n| n as f64 * 10.0).collect();
        let snaps = evolve(&rho0, h.matrix(), &[], &times, &EvolveOptions::default()).unwrap();
        let p3 = embed_qubit_op(layout, 3, &pauli::sigma_plus()).unwrap();
        let n3 = (&p3 * &p3.adjoint()).into_matrix();
        for (t, rho) in times.iter().zip(&snaps) {
            let want = (j * t).cos().powi(2);
            assert!((expectation(rho, &[&n3]).unwrap() - want).abs() < 1e-9);
        }
    }

    #[test]
    fn static_without_hamiltonian_or_loss() {
        let d = 4;
        let psi = CVector::from_fn(d, |k, _| c(1.0 + k as f64));
        let rho0 = DensityMatrix::pure(&psi);
        let snaps = evolve(&rho0, &CMatrix::zeros(d, d), &[], &[0.0, 1.0, 5.0], &EvolveOptions::default()).unwrap();
        for s in snaps {
            assert!((s.matrix() - rho0.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-15);
        }
    }

    #[test]
    fn diagonal_hamiltonian_with_decay_matches_rate_equation() {
        // three levels, cascade 2 → 1 → 0 plus a direct 2 → 0 channel
        let e = [0.0, 0.7, 1.5];
        let h = CMatrix::from_diagonal(&DVector::from_iterator(3, e.iter().map(|x| c(*x))));
        let jumps = [
            Dissipator { lower: 1, upper: 2, rate: 0.02, channel: Channel::Cavity },
            Dissipator { lower: 0, upper: 2, rate: 0.01, channel: Channel::Qubit(1) },
            Dissipator { lower: 0, upper: 1, rate: 0.05, channel: Channel::Cavity },
        ];
        let psi = CVector::from_vec(vec![c(0.0), c(0.6), c(0.8)]);
        let rho0 = DensityMatrix::pure(&psi);
        let times = [0.0, 3.0, 10.0, 25.0];
        let snaps = evolve(&rho0, &h, &jumps, &times, &EvolveOptions::default()).unwrap();
        let (g2, g1) = (0.03, 0.05);
        for (t, rho) in times.iter().zip(&snaps) {
            let p2 = 0.64 * (-g2 * t).exp();
            let p1 = 0.36 * (-g1 * t).exp() + 0.64 * 0.02 / (g1 - g2) * ((-g2 * t).exp() - (-g1 * t).exp());
            assert!((rho.matrix()[(2, 2)].re - p2).abs() < 1e-10);
            assert!((rho.matrix()[(1, 1)].re - p1).abs() < 1e-10);
            // coherence rotates at E1 − E2 and decays at (Γ1 + Γ2)/2
            let coh = c(0.48) * (C_I * c((e[2] - e[1]) * t)).exp() * (-0.5 * (g1 + g2) * t).exp();
            assert!((rho.matrix()[(1, 2)] - coh).norm() < 1e-10);
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            rho.validate(1e-8).unwrap();
        }
    }

    #[test]
    fn bare_limit_lowering_is_pauli() {
        let config = SystemConfig::new(
            vec![QubitParams::new(0.4, 0.0, 0.5), QubitParams::new(0.6, 0.0, 0.5), QubitParams::new(1.0, 0.0, 0.5)],
            1.3,
        )
        .with_cutoff(3);
        let spectrum = diagonalize(&build_hamiltonian(&config, HamiltonianKind::GeneralizedDicke).unwrap()).unwrap();
        let basis = spectrum.dressed_basis(None, 1e-6).unwrap();
        for q in 1..=3 {
            let s = build_dressed_lowering(&basis, q).unwrap();
            let sigma = embed_qubit_op(config.layout().unwrap(), q, &pauli::sigma_minus()).unwrap();
            assert!((s.matrix() - sigma.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
            assert!((s.matrix() * s.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        }
    }

    #[test]
    fn dissipators_for_a_bare_cavity() {
        let config = SystemConfig::new(vec![QubitParams::new(0.4, 0.0, 0.0)], 1.0).with_cutoff(5).with_decay(0.0, 0.01);
        let spectrum = diagonalize(&build_hamiltonian(&config, HamiltonianKind::GeneralizedDicke).unwrap()).unwrap();
        let jumps = build_dissipators(&spectrum, &config, spectrum.len()).unwrap();
        // each Fock step n → n−1 for both qubit levels, rate κn
        assert_eq!(jumps.len(), 8);
        for j in &jumps {
            let n = spectrum.layout().photons(spectrum.labels()[j.upper].bare_index);
            assert!((j.rate - 0.01 * n as f64).abs() < 1e-14);
            assert_eq!(j.channel, Channel::Cavity);
        }
        let lossless = config.clone().with_decay(0.0, 0.0);
        assert!(build_dissipators(&spectrum, &lossless, spectrum.len()).unwrap().is_empty());
    }

    #[test]
    fn fidelity_and_expectation_basics() {
        let psi = CVector::from_vec(vec![c(1.0), c(0.0)]);
        let rho = DensityMatrix::pure(&psi);
        assert_eq!(state_fidelity(&rho, &psi).unwrap(), 1.0);
        assert_eq!(state_fidelity(&rho, &CVector::from_vec(vec![c(0.0), c(1.0)])).unwrap(), 0.0);
        assert!(expectation(&rho, &[&CMatrix::identity(3, 3)]).is_err());
        assert!(DensityMatrix::new(CMatrix::identity(2, 2), 0.0).is_err());
    }

    #[test]
    fn time_series_csv_and_peaks() {
        let times: Vec<f64> = (0..50).map(|n| n as f64 * 0.1).collect();
        let series = TimeSeries {
            values: vec![times.iter().map(|t| t.sin()).collect()],
            names: vec!["exc_q1".into()],
            times,
        };
        let (t, _) = series.first_peak("exc_q1", 0.5).unwrap();
        assert!((t - 1.6).abs() < 1e-12);
        assert!(series.to_csv().starts_with("t,exc_q1\n"));
    }

    #[test]
    fn lossless_run_follows_exact_propagation() {
        // single-qubit vacuum Rabi oscillation seen through the dressed |e,0⟩
        let config = SystemConfig::new(vec![QubitParams::new(1.0, 0.01, 0.0)], 1.0).with_cutoff(4);
        let mut run = DynamicsRun::new(config, label("e0"), std::f64::consts::PI / 0.02);
        run.kind = HamiltonianKind::TavisCummings;
        run.cluster_gap = 0.05;
        run.samples = 41;
        run.observables = vec![Observable::Excitation(1), Observable::Ghz(label("e0"), label("g1"))];
        let out = run_dynamics(&run).unwrap();
        assert!((out.coupling - 0.01).abs() < 1e-12);
        for (t, p) in out.series.times.iter().zip(&out.series.values[0]) {
            assert!((p - (0.01 * t).cos().powi(2)).abs() < 1e-8);
        }
        // t = π/(4J) is sample 20
        assert!(out.series.values[1][20] > 1.0 - 1e-8);
    }
}
