//! Statevector circuit engine for repetition codes and a five-qubit
//! bit-flip / phase-flip correction circuit, with the entangling steps
//! optionally replaced by spontaneous mixing gates.
//!
//! Wire 0 is the most significant bit of the basis index, matching the
//! qubit ordering used elsewhere in the crate. `|0⟩ ≡ |g⟩`, `|1⟩ ≡ |e⟩`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{c, C64};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const DETERMINISTIC_TOL: f64 = 1e-10;

/// Pure state of `qubit_count` qubits; amplitudes are compared only up to a
/// global phase.
#[derive(Clone, Debug, PartialEq)]
pub struct RegisterState {
    qubit_count: usize,
    amplitudes: Vec<C64>,
}

impl RegisterState {
    pub fn zero(qubit_count: usize) -> Self {
        let mut amplitudes = vec![c(0.0); 1 << qubit_count];
        amplitudes[0] = c(1.0);
        Self { qubit_count, amplitudes }
    }

    pub fn basis(qubit_count: usize, index: usize) -> Result<Self> {
        if index >= 1 << qubit_count {
            return Err(Error::DimensionMismatch { expected: 1 << qubit_count, got: index + 1 });
        }
        let mut amplitudes = vec![c(0.0); 1 << qubit_count];
        amplitudes[index] = c(1.0);
        Ok(Self { qubit_count, amplitudes })
    }

    /// Basis state from a bit string such as `"0110"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let n = bits.len();
        let index = usize::from_str_radix(bits, 2).map_err(|_| Error::InvalidGate(format!("bad bit string `{bits}`")))?;
        Self::basis(n, index)
    }

    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: dim.next_power_of_two().max(2), got: dim });
        }
        let state = Self { qubit_count: dim.trailing_zeros() as usize, amplitudes };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidLogicalState(format!("norm {norm} differs from 1")));
        }
        Ok(state)
    }

    /// `a|0⟩ + b|1⟩` followed by `ancillas` qubits in `|0⟩`.
    pub fn logical(a: C64, b: C64, ancillas: usize) -> Result<Self> {
        check_logical(a, b)?;
        let n = ancillas + 1;
        let mut amplitudes = vec![c(0.0); 1 << n];
        amplitudes[0] = a;
        amplitudes[1 << ancillas] = b;
        Ok(Self { qubit_count: n, amplitudes })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(x, y)| x.conj() * y).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    fn mask(&self, wire: usize) -> usize {
        1 << (self.qubit_count - 1 - wire)
    }

    fn check_wires(&self, wires: &[usize]) -> Result<()> {
        for (k, &w) in wires.iter().enumerate() {
            if w >= self.qubit_count {
                return Err(Error::InvalidGate(format!("wire {w} out of range for {} qubits", self.qubit_count)));
            }
            if wires[..k].contains(&w) {
                return Err(Error::InvalidGate(format!("wire {w} used twice")));
            }
        }
        Ok(())
    }

    fn apply_single(&mut self, wire: usize, m: [[C64; 2]; 2]) {
        let mask = self.mask(wire);
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let (x0, x1) = (self.amplitudes[i], self.amplitudes[i | mask]);
                self.amplitudes[i] = m[0][0] * x0 + m[0][1] * x1;
                self.amplitudes[i | mask] = m[1][0] * x0 + m[1][1] * x1;
            }
        }
    }

    /// Reduced density matrix of one wire.
    pub fn reduced(&self, wire: usize) -> [[C64; 2]; 2] {
        let mask = self.mask(wire);
        let mut rho = [[c(0.0); 2]; 2];
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let (x0, x1) = (self.amplitudes[i], self.amplitudes[i | mask]);
                rho[0][0] += x0 * x0.conj();
                rho[0][1] += x0 * x1.conj();
                rho[1][0] += x1 * x0.conj();
                rho[1][1] += x1 * x1.conj();
            }
        }
        rho
    }

    /// Probability of finding `wire` in `|1⟩`.
    pub fn excited_probability(&self, wire: usize) -> f64 {
        let mask = self.mask(wire);
        self.amplitudes.iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, z)| z.norm_sqr()).sum()
    }
}

impl fmt::Display for RegisterState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, z) in self.amplitudes.iter().enumerate() {
            if z.norm() > 1e-12 {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({:.6}{:+.6}i)|{:0width$b}>", z.re, z.im, i, width = self.qubit_count)?;
            }
        }
        Ok(())
    }
}

fn check_logical(a: C64, b: C64) -> Result<()> {
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL || !norm.is_finite() {
        return Err(Error::InvalidLogicalState(format!("|a|^2 + |b|^2 = {norm}")));
    }
    Ok(())
}

/// Haar-random single-qubit amplitudes.
pub fn random_logical<R: Rng + ?Sized>(rng: &mut R) -> (C64, C64) {
    let u: f64 = rng.gen();
    let (phi_a, phi_b): (f64, f64) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
    let (ra, rb) = (u.sqrt(), (1.0 - u).sqrt());
    (C64::from_polar(ra, phi_a), C64::from_polar(rb, phi_b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum GateSpec {
    Cnot { control: usize, target: usize },
    Y { theta: f64, wire: usize },
    S { wire: usize },
    Sdg { wire: usize },
    X { wire: usize },
    Z { wire: usize },
    /// `|100⟩ ↔ −i|011⟩` on three wires.
    U3Mix { wires: [usize; 3] },
    /// `|1000⟩ ↔ −i|0111⟩` on four wires.
    U4Mix { wires: [usize; 4] },
}

pub fn y_matrix(theta: f64) -> [[C64; 2]; 2] {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co), c(-s)], [c(s), c(co)]]
}

pub fn apply_gate(state: &RegisterState, gate: &GateSpec) -> Result<RegisterState> {
    let mut out = state.clone();
    apply_gate_in_place(&mut out, gate)?;
    Ok(out)
}

pub fn apply_gate_in_place(state: &mut RegisterState, gate: &GateSpec) -> Result<()> {
    let i = C64::i();
    match *gate {
        GateSpec::Cnot { control, target } => {
            state.check_wires(&[control, target])?;
            let (cm, tm) = (state.mask(control), state.mask(target));
            for k in 0..state.amplitudes.len() {
                if k & cm != 0 && k & tm == 0 {
                    state.amplitudes.swap(k, k | tm);
                }
            }
        }
        GateSpec::Y { theta, wire } => {
            state.check_wires(&[wire])?;
            state.apply_single(wire, y_matrix(theta));
        }
        GateSpec::S { wire } => {
            state.check_wires(&[wire])?;
            state.apply_single(wire, [[c(1.0), c(0.0)], [c(0.0), i]]);
        }
        GateSpec::Sdg { wire } => {
            state.check_wires(&[wire])?;
            state.apply_single(wire, [[c(1.0), c(0.0)], [c(0.0), -i]]);
        }
        GateSpec::X { wire } => {
            state.check_wires(&[wire])?;
            state.apply_single(wire, [[c(0.0), c(1.0)], [c(1.0), c(0.0)]]);
        }
        GateSpec::Z { wire } => {
            state.check_wires(&[wire])?;
            state.apply_single(wire, [[c(1.0), c(0.0)], [c(0.0), c(-1.0)]]);
        }
        GateSpec::U3Mix { wires } => mix(state, &wires)?,
        GateSpec::U4Mix { wires } => mix(state, &wires)?,
    }
    Ok(())
}

/// Exchange `|1 0…0⟩ ↔ |0 1…1⟩` on `wires` with amplitude `−i`; identity
/// elsewhere. This is `exp(−i V t)` at the half-period of the mixing
/// interaction.
fn mix(state: &mut RegisterState, wires: &[usize]) -> Result<()> {
    state.check_wires(wires)?;
    let lead = state.mask(wires[0]);
    let rest: usize = wires[1..].iter().map(|&w| state.mask(w)).sum();
    let all = lead | rest;
    for k in 0..state.amplitudes.len() {
        if k & all == lead {
            let partner = (k & !all) | rest;
            let (x, y) = (state.amplitudes[k], state.amplitudes[partner]);
            state.amplitudes[k] = -C64::i() * y;
            state.amplitudes[partner] = -C64::i() * x;
        }
    }
    Ok(())
}

pub fn apply_circuit(state: &RegisterState, gates: &[GateSpec]) -> Result<RegisterState> {
    let mut out = state.clone();
    for gate in gates {
        apply_gate_in_place(&mut out, gate)?;
    }
    Ok(out)
}

pub fn u3_mix(state: &RegisterState, wires: [usize; 3]) -> Result<RegisterState> {
    apply_gate(state, &GateSpec::U3Mix { wires })
}

pub fn u4_mix(state: &RegisterState, wires: [usize; 4]) -> Result<RegisterState> {
    apply_gate(state, &GateSpec::U4Mix { wires })
}

/// Full unitary of `gate` on `qubit_count` wires, column `j` being the image
/// of basis state `j`.
pub fn gate_matrix(gate: &GateSpec, qubit_count: usize) -> Result<Vec<Vec<C64>>> {
    let dim = 1 << qubit_count;
    (0..dim).map(|j| Ok(apply_gate(&RegisterState::basis(qubit_count, j)?, gate)?.amplitudes)).collect()
}

/// Projective measurement of `wire` in the computational basis. The branch
/// is chosen by `coin ∈ [0,1)`: outcome 1 when `coin < P(1)`.
pub fn measure_qubit(state: &RegisterState, wire: usize, coin: f64) -> Result<(u8, RegisterState, f64)> {
    state.check_wires(&[wire])?;
    let p1 = state.excited_probability(wire);
    let outcome = u8::from(coin < p1);
    let p = if outcome == 1 { p1 } else { 1.0 - p1 };
    let mask = state.mask(wire);
    let scale = if p > 0.0 { 1.0 / p.sqrt() } else { 0.0 };
    let amplitudes = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(k, z)| if (k & mask != 0) == (outcome == 1) { z * scale } else { c(0.0) })
        .collect();
    Ok((outcome, RegisterState { qubit_count: state.qubit_count, amplitudes }, p))
}

/// Measures `wire`, requiring a deterministic outcome.
pub fn measure_deterministic(state: &RegisterState, wire: usize) -> Result<(u8, RegisterState)> {
    let p1 = state.excited_probability(wire);
    if p1 > DETERMINISTIC_TOL && p1 < 1.0 - DETERMINISTIC_TOL {
        return Err(Error::NonDeterministicMeasurement { wire, probability: p1 });
    }
    let (outcome, post, _) = measure_qubit(state, wire, 0.5)?;
    Ok((outcome, post))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Implementation {
    Cnot,
    Mix,
}

impl fmt::Display for Implementation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Implementation::Cnot => "cnot",
            Implementation::Mix => "mix",
        })
    }
}

/// Entangling gates encoding wire `source` into `targets` (all in `|0⟩`).
/// The mix variant leaves `source` in `|0⟩` and the logical value on
/// `relay` followed by the targets.
fn fan_out(variant: Implementation, source: usize, relay: Option<usize>, targets: &[usize]) -> Result<Vec<GateSpec>> {
    match variant {
        Implementation::Cnot => Ok(targets.iter().map(|&t| GateSpec::Cnot { control: source, target: t }).collect()),
        Implementation::Mix => {
            let mut wires = vec![source];
            wires.extend(relay);
            wires.extend_from_slice(targets);
            let last = *wires.last().expect("non-empty");
            let gate = match wires.len() {
                3 => GateSpec::U3Mix { wires: [wires[0], wires[1], wires[2]] },
                4 => GateSpec::U4Mix { wires: [wires[0], wires[1], wires[2], wires[3]] },
                n => return Err(Error::InvalidGate(format!("mix gate on {n} wires unsupported"))),
            };
            Ok(vec![gate, GateSpec::S { wire: last }])
        }
    }
}

/// Inverse of `fan_out` for the mix variant: folds the code on `wires`
/// back onto `sink` (in `|0⟩`).
fn fold_in(sink: usize, wires: &[usize]) -> Result<Vec<GateSpec>> {
    let last = *wires.last().expect("non-empty");
    let gate = match wires.len() {
        2 => GateSpec::U3Mix { wires: [sink, wires[0], wires[1]] },
        3 => GateSpec::U4Mix { wires: [sink, wires[0], wires[1], wires[2]] },
        n => return Err(Error::InvalidGate(format!("mix gate on {} wires unsupported", n + 1))),
    };
    Ok(vec![GateSpec::S { wire: last }, gate])
}

fn check_ancillas(state: &RegisterState, wires: impl IntoIterator<Item = usize>) -> Result<()> {
    for w in wires {
        if state.excited_probability(w) > NORM_TOL {
            return Err(Error::AncillaNotReset(w));
        }
    }
    Ok(())
}

/// Repetition encoding of wire 0 onto `n_copies` wires.
///
/// `cnot`: `n_copies` wires, CNOTs from wire 0. `mix`: `n_copies + 1` wires;
/// wire 0 ends in `|0⟩` (returned as the discarded index) and the code sits
/// on wires `1..=n_copies`.
pub fn repetition_encode(state: &RegisterState, n_copies: usize, variant: Implementation) -> Result<(RegisterState, Option<usize>)> {
    if !(2..=3).contains(&n_copies) {
        return Err(Error::InvalidGate(format!("repetition code with {n_copies} copies unsupported")));
    }
    let needed = match variant {
        Implementation::Cnot => n_copies,
        Implementation::Mix => n_copies + 1,
    };
    if state.qubit_count != needed {
        return Err(Error::DimensionMismatch { expected: needed, got: state.qubit_count });
    }
    check_ancillas(state, 1..needed)?;
    let targets: Vec<usize> = (1..needed).collect();
    let (gates, discarded) = match variant {
        Implementation::Cnot => (fan_out(variant, 0, None, &targets)?, None),
        Implementation::Mix => (fan_out(variant, 0, None, &targets)?, Some(0)),
    };
    Ok((apply_circuit(state, &gates)?, discarded))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EccMode {
    Bitflip,
    Phaseflip,
}

impl fmt::Display for EccMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EccMode::Bitflip => "bitflip",
            EccMode::Phaseflip => "phaseflip",
        })
    }
}

/// Error injected on a data wire (1-based, 1..=3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "wire", rename_all = "snake_case")]
pub enum InjectedError {
    None,
    X(usize),
    Z(usize),
}

impl InjectedError {
    pub fn wire(&self) -> Option<usize> {
        match *self {
            InjectedError::None => None,
            InjectedError::X(w) | InjectedError::Z(w) => Some(w),
        }
    }
}

impl fmt::Display for InjectedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InjectedError::None => f.write_str("none"),
            InjectedError::X(w) => write!(f, "X{w}"),
            InjectedError::Z(w) => write!(f, "Z{w}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EccReport {
    pub mode: EccMode,
    pub implementation: Implementation,
    pub error: InjectedError,
    pub syndrome: (u8, u8),
    /// Data wire (1-based) flipped by the correction step.
    pub correction: Option<usize>,
    pub fidelity: f64,
}

/// Wire assignment of one circuit layout.
struct Layout {
    qubits: usize,
    input: usize,
    data: [usize; 3],
    ancillas: [usize; 2],
}

impl Layout {
    fn of(implementation: Implementation) -> Self {
        match implementation {
            // d1 d2 d3 a1 a2; the logical input starts on d1
            Implementation::Cnot => Self { qubits: 5, input: 0, data: [0, 1, 2], ancillas: [3, 4] },
            // in d1 d2 d3 a1 a2; `in` is the extra qubit freed by encoding
            Implementation::Mix => Self { qubits: 6, input: 0, data: [1, 2, 3], ancillas: [4, 5] },
        }
    }
}

/// Syndrome `(m, n)` to data wire (1-based), obtained by simulating each
/// single bit flip once.
pub type SyndromeTable = BTreeMap<(u8, u8), Option<usize>>;

pub fn calibrate_syndromes(implementation: Implementation) -> Result<SyndromeTable> {
    let mut table = SyndromeTable::new();
    let (a, b) = (c(0.6), c(0.8));
    for error in [InjectedError::None, InjectedError::X(1), InjectedError::X(2), InjectedError::X(3)] {
        let run = simulate(a, b, error, EccMode::Bitflip, implementation, None)?;
        if table.insert(run.syndrome, error.wire()).is_some() {
            return Err(Error::InvalidGate(format!("syndrome {:?} is not unique", run.syndrome)));
        }
    }
    Ok(table)
}

/// Runs the correction circuit once: encode, rotate, inject, rotate back,
/// syndrome extraction, measurement, correction from `table`, decode.
pub fn run_ecc(
    a: C64,
    b: C64,
    error: InjectedError,
    mode: EccMode,
    implementation: Implementation,
    table: &SyndromeTable,
) -> Result<EccReport> {
    simulate(a, b, error, mode, implementation, Some(table))
}

fn simulate(
    a: C64,
    b: C64,
    error: InjectedError,
    mode: EccMode,
    implementation: Implementation,
    table: Option<&SyndromeTable>,
) -> Result<EccReport> {
    check_logical(a, b)?;
    if let Some(w) = error.wire() {
        if !(1..=3).contains(&w) {
            return Err(Error::InvalidGate(format!("error wire {w} outside data wires 1..=3")));
        }
    }
    let layout = Layout::of(implementation);
    let mut data = layout.data;
    let mut state = RegisterState::logical(a, b, layout.qubits - 1)?;
    let run = |state: &mut RegisterState, gates: Vec<GateSpec>| -> Result<()> {
        for g in &gates {
            apply_gate_in_place(state, g)?;
        }
        Ok(())
    };

    // A
    let encoder = match implementation {
        Implementation::Cnot => fan_out(implementation, data[0], None, &data[1..])?,
        Implementation::Mix => fan_out(implementation, layout.input, None, &data)?,
    };
    run(&mut state, encoder)?;
    // B
    if mode == EccMode::Phaseflip {
        run(&mut state, data.iter().map(|&w| GateSpec::Y { theta: PI / 2.0, wire: w }).collect())?;
    }
    // E
    match error {
        InjectedError::None => {}
        InjectedError::X(w) => apply_gate_in_place(&mut state, &GateSpec::X { wire: data[w - 1] })?,
        InjectedError::Z(w) => apply_gate_in_place(&mut state, &GateSpec::Z { wire: data[w - 1] })?,
    }
    // B'
    if mode == EccMode::Phaseflip {
        run(&mut state, data.iter().map(|&w| GateSpec::Y { theta: -PI / 2.0, wire: w }).collect())?;
    }
    // S1: copy d1 onto both ancillas; the mix version relays d1 onto the
    // wire freed by the encoder
    let [m_wire, n_wire] = layout.ancillas;
    let output = match implementation {
        Implementation::Cnot => {
            run(&mut state, fan_out(implementation, data[0], None, &[m_wire, n_wire])?)?;
            data[0]
        }
        Implementation::Mix => {
            check_ancillas(&state, [layout.input])?;
            run(&mut state, fan_out(implementation, data[0], Some(layout.input), &[m_wire, n_wire])?)?;
            // the old d1 wire is now free and receives the decoded qubit
            std::mem::replace(&mut data[0], layout.input)
        }
    };
    finish(state, data, output, mode, implementation, error, a, b, layout, table)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    mut state: RegisterState,
    data: [usize; 3],
    output: usize,
    mode: EccMode,
    implementation: Implementation,
    error: InjectedError,
    a: C64,
    b: C64,
    layout: Layout,
    table: Option<&SyndromeTable>,
) -> Result<EccReport> {
    let [m_wire, n_wire] = layout.ancillas;
    // S2
    for (control, target) in [(data[1], m_wire), (data[2], n_wire)] {
        apply_gate_in_place(&mut state, &GateSpec::Cnot { control, target })?;
    }
    let (m, post) = measure_deterministic(&state, m_wire)?;
    let (n, post) = measure_deterministic(&post, n_wire)?;
    state = post;
    let syndrome = (m, n);

    let Some(table) = table else {
        return Ok(EccReport { mode, implementation, error, syndrome, correction: None, fidelity: f64::NAN });
    };
    // C
    let correction = *table.get(&syndrome).ok_or_else(|| Error::InvalidGate(format!("uncalibrated syndrome {syndrome:?}")))?;
    if let Some(w) = correction {
        apply_gate_in_place(&mut state, &GateSpec::X { wire: data[w - 1] })?;
    }
    // A'
    let decoder = match implementation {
        Implementation::Cnot => vec![
            GateSpec::Cnot { control: data[0], target: data[2] },
            GateSpec::Cnot { control: data[0], target: data[1] },
        ],
        Implementation::Mix => {
            check_ancillas(&state, [output])?;
            fold_in(output, &data)?
        }
    };
    for g in &decoder {
        apply_gate_in_place(&mut state, g)?;
    }
    // ⟨ψ|ρ_out|ψ⟩ on the output wire
    let rho = state.reduced(output);
    let psi = [a, b];
    let mut fidelity = c(0.0);
    for r in 0..2 {
        for s in 0..2 {
            fidelity += psi[r].conj() * rho[r][s] * psi[s];
        }
    }
    Ok(EccReport { mode, implementation, error, syndrome, correction, fidelity: fidelity.re.clamp(0.0, 1.0) })
}

/// The standard suite: for each implementation, no error plus single bit
/// flips (bitflip mode) and single phase flips (phaseflip mode) on every
/// data wire. Returns 14 reports.
pub fn ecc_suite(a: C64, b: C64) -> Result<Vec<EccReport>> {
    let mut reports = Vec::new();
    for implementation in [Implementation::Cnot, Implementation::Mix] {
        let table = calibrate_syndromes(implementation)?;
        reports.push(run_ecc(a, b, InjectedError::None, EccMode::Bitflip, implementation, &table)?);
        for w in 1..=3 {
            reports.push(run_ecc(a, b, InjectedError::X(w), EccMode::Bitflip, implementation, &table)?);
        }
        for w in 1..=3 {
            reports.push(run_ecc(a, b, InjectedError::Z(w), EccMode::Phaseflip, implementation, &table)?);
        }
    }
    Ok(reports)
}
