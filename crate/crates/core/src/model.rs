//! Physical and effective Hamiltonians.
//!
//! All frequencies, couplings and rates are in units of a reference
//! frequency ω₀ with ħ = 1.

use serde::{Deserialize, Serialize};

use crate::algebra::{
    cavity_annihilation, cavity_quadrature, embed_qubit_op, number_operator, pauli, HilbertLayout,
    OperatorMatrix,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitParams {
    pub omega: f64,
    pub lambda: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub gamma: f64,
}

impl QubitParams {
    pub fn new(omega: f64, lambda: f64, theta: f64) -> Self {
        Self { omega, lambda, theta, gamma: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub qubits: Vec<QubitParams>,
    pub omega_c: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default = "default_cutoff")]
    pub fock_cutoff: usize,
}

pub const DEFAULT_FOCK_CUTOFF: usize = 8;
pub const CONVERGENCE_FOCK_CUTOFF: usize = 12;

fn default_cutoff() -> usize {
    DEFAULT_FOCK_CUTOFF
}

/// Which interaction the full Hamiltonian carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    /// Transverse plus longitudinal coupling with counter-rotating terms.
    #[default]
    GeneralizedDicke,
    /// Rotating-wave coupling `λ(a σ₊ + a† σ₋)`; mixing angles ignored.
    TavisCummings,
}

impl SystemConfig {
    pub fn new(qubits: Vec<QubitParams>, omega_c: f64) -> Self {
        Self { qubits, omega_c, kappa: 0.0, fock_cutoff: DEFAULT_FOCK_CUTOFF }
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.fock_cutoff = cutoff;
        self
    }

    pub fn with_decay(mut self, gamma: f64, kappa: f64) -> Self {
        for q in &mut self.qubits {
            q.gamma = gamma;
        }
        self.kappa = kappa;
        self
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits.len()
    }

    pub fn layout(&self) -> Result<HilbertLayout> {
        HilbertLayout::new(self.qubits.len(), self.fock_cutoff)
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits.is_empty() {
            return Err(Error::InvalidConfig("at least one qubit is required".into()));
        }
        if !(self.omega_c > 0.0) || !self.omega_c.is_finite() {
            return Err(Error::InvalidConfig(format!("omega_c must be positive, got {}", self.omega_c)));
        }
        if !(self.kappa >= 0.0) {
            return Err(Error::InvalidConfig(format!("kappa must be non-negative, got {}", self.kappa)));
        }
        if self.fock_cutoff == 0 {
            return Err(Error::InvalidConfig("fock_cutoff must be at least 1".into()));
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if !(q.omega > 0.0) || !q.omega.is_finite() {
                return Err(Error::InvalidConfig(format!("qubits[{i}].omega must be positive")));
            }
            if !(q.lambda >= 0.0) || !q.lambda.is_finite() {
                return Err(Error::InvalidConfig(format!("qubits[{i}].lambda must be non-negative")));
            }
            if !q.theta.is_finite() {
                return Err(Error::InvalidConfig(format!("qubits[{i}].theta must be finite")));
            }
            if !(q.gamma >= 0.0) {
                return Err(Error::InvalidConfig(format!("qubits[{i}].gamma must be non-negative")));
            }
        }
        self.layout().map(|_| ())
    }

    /// Reads a scalar addressed by a path such as `omega_c` or `qubits[2].omega`.
    pub fn parameter(&self, path: &str) -> Result<f64> {
        match parse_path(path)? {
            ParamPath::OmegaC => Ok(self.omega_c),
            ParamPath::Kappa => Ok(self.kappa),
            ParamPath::Qubit(Some(i), field) => {
                let q = self.qubits.get(i).ok_or_else(|| Error::UnknownParameter(path.into()))?;
                Ok(field.get(q))
            }
            ParamPath::Qubit(None, field) => {
                let q = self.qubits.first().ok_or_else(|| Error::UnknownParameter(path.into()))?;
                Ok(field.get(q))
            }
        }
    }

    /// Writes a scalar addressed by a path. `qubits[*].field` sets every qubit.
    pub fn set_parameter(&mut self, path: &str, value: f64) -> Result<()> {
        match parse_path(path)? {
            ParamPath::OmegaC => self.omega_c = value,
            ParamPath::Kappa => self.kappa = value,
            ParamPath::Qubit(Some(i), field) => {
                let q = self.qubits.get_mut(i).ok_or_else(|| Error::UnknownParameter(path.into()))?;
                field.set(q, value);
            }
            ParamPath::Qubit(None, field) => {
                for q in &mut self.qubits {
                    field.set(q, value);
                }
            }
        }
        Ok(())
    }

    pub fn with_parameter(&self, path: &str, value: f64) -> Result<Self> {
        let mut out = self.clone();
        out.set_parameter(path, value)?;
        Ok(out)
    }

    /// Qubits whose detuning from the cavity is below `factor · λᵢ`.
    pub fn dispersive_violations(&self, factor: f64) -> Vec<usize> {
        self.qubits
            .iter()
            .enumerate()
            .filter(|(_, q)| q.lambda > 0.0 && (q.omega - self.omega_c).abs() < factor * q.lambda)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
enum QubitField {
    Omega,
    Lambda,
    Theta,
    Gamma,
}

impl QubitField {
    fn get(self, q: &QubitParams) -> f64 {
        match self {
            QubitField::Omega => q.omega,
            QubitField::Lambda => q.lambda,
            QubitField::Theta => q.theta,
            QubitField::Gamma => q.gamma,
        }
    }

    fn set(self, q: &mut QubitParams, value: f64) {
        match self {
            QubitField::Omega => q.omega = value,
            QubitField::Lambda => q.lambda = value,
            QubitField::Theta => q.theta = value,
            QubitField::Gamma => q.gamma = value,
        }
    }
}

enum ParamPath {
    OmegaC,
    Kappa,
    Qubit(Option<usize>, QubitField),
}

fn parse_path(path: &str) -> Result<ParamPath> {
    let unknown = || Error::UnknownParameter(path.to_string());
    match path.trim() {
        "omega_c" => return Ok(ParamPath::OmegaC),
        "kappa" => return Ok(ParamPath::Kappa),
        _ => {}
    }
    let rest = path.trim().strip_prefix("qubits[").ok_or_else(unknown)?;
    let (index, field) = rest.split_once("].").ok_or_else(unknown)?;
    let index = match index {
        "*" => None,
        digits => Some(digits.parse::<usize>().map_err(|_| unknown())?),
    };
    let field = match field {
        "omega" => QubitField::Omega,
        "lambda" => QubitField::Lambda,
        "theta" => QubitField::Theta,
        "gamma" => QubitField::Gamma,
        _ => return Err(unknown()),
    };
    Ok(ParamPath::Qubit(index, field))
}

/// Diagonal of the uncoupled Hamiltonian `Σ (ωᵢ/2) σ_z⁽ⁱ⁾ + ω_c a†a` in the bare basis.
pub fn bare_energies(config: &SystemConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let layout = config.layout()?;
    Ok((0..layout.dim())
        .map(|index| {
            let qubits: f64 = config
                .qubits
                .iter()
                .enumerate()
                .map(|(i, q)| {
                    let sign = if layout.level(index, i + 1).bit() == 1 { 1.0 } else { -1.0 };
                    0.5 * q.omega * sign
                })
                .sum();
            qubits + config.omega_c * layout.photons(index) as f64
        })
        .collect())
}

pub fn bare_hamiltonian(config: &SystemConfig) -> Result<OperatorMatrix> {
    let layout = config.layout()?;
    let mut h = &number_operator(layout) * config.omega_c;
    for (i, q) in config.qubits.iter().enumerate() {
        let z = embed_qubit_op(layout, i + 1, &pauli::sigma_z())?;
        h = &h + &(&z * (0.5 * q.omega));
    }
    Ok(h)
}

/// `V = (a + a†) Σᵢ λᵢ (cos θᵢ σₓ⁽ⁱ⁾ + sin θᵢ σ_z⁽ⁱ⁾)`
pub fn dicke_interaction(config: &SystemConfig) -> Result<OperatorMatrix> {
    config.validate()?;
    let layout = config.layout()?;
    let mut coupling = OperatorMatrix::zeros(layout);
    for (i, q) in config.qubits.iter().enumerate() {
        let x = embed_qubit_op(layout, i + 1, &pauli::sigma_x())?;
        let z = embed_qubit_op(layout, i + 1, &pauli::sigma_z())?;
        coupling = &coupling + &(&x * (q.lambda * q.theta.cos()));
        coupling = &coupling + &(&z * (q.lambda * q.theta.sin()));
    }
    Ok(&cavity_quadrature(layout) * &coupling)
}

/// `V = Σᵢ λᵢ (a σ₊⁽ⁱ⁾ + a† σ₋⁽ⁱ⁾)`
pub fn tavis_cummings_interaction(config: &SystemConfig) -> Result<OperatorMatrix> {
    config.validate()?;
    let layout = config.layout()?;
    let a = cavity_annihilation(layout);
    let a_dag = a.adjoint();
    let mut v = OperatorMatrix::zeros(layout);
    for (i, q) in config.qubits.iter().enumerate() {
        let sp = embed_qubit_op(layout, i + 1, &pauli::sigma_plus())?;
        let sm = embed_qubit_op(layout, i + 1, &pauli::sigma_minus())?;
        let term = &(&a * &sp) + &(&a_dag * &sm);
        v = &v + &(&term * q.lambda);
    }
    Ok(v)
}

pub fn interaction(config: &SystemConfig, kind: HamiltonianKind) -> Result<OperatorMatrix> {
    match kind {
        HamiltonianKind::GeneralizedDicke => dicke_interaction(config),
        HamiltonianKind::TavisCummings => tavis_cummings_interaction(config),
    }
}

pub fn build_generalized_dicke(config: &SystemConfig) -> Result<OperatorMatrix> {
    Ok(&bare_hamiltonian(config)? + &dicke_interaction(config)?)
}

pub fn build_tavis_cummings(config: &SystemConfig) -> Result<OperatorMatrix> {
    Ok(&bare_hamiltonian(config)? + &tavis_cummings_interaction(config)?)
}

pub fn build_hamiltonian(config: &SystemConfig, kind: HamiltonianKind) -> Result<OperatorMatrix> {
    match kind {
        HamiltonianKind::GeneralizedDicke => build_generalized_dicke(config),
        HamiltonianKind::TavisCummings => build_tavis_cummings(config),
    }
}

/// Total excitation number `a†a + Σ σ₊⁽ⁱ⁾σ₋⁽ⁱ⁾`.
pub fn excitation_number(layout: HilbertLayout) -> Result<OperatorMatrix> {
    let mut n = number_operator(layout);
    let proj = pauli::sigma_plus() * pauli::sigma_minus();
    for q in 1..=layout.qubit_count() {
        n = &n + &embed_qubit_op(layout, q, &proj)?;
    }
    Ok(n)
}

/// Parity `exp(iπ N̂)` with `N̂` the excitation number; diagonal ±1.
pub fn parity_operator(layout: HilbertLayout) -> Result<OperatorMatrix> {
    let n = excitation_number(layout)?;
    let mut data = crate::algebra::CMatrix::zeros(layout.dim(), layout.dim());
    for index in 0..layout.dim() {
        let count = n.get(index, index).re.round() as i64;
        data[(index, index)] = crate::algebra::c(if count % 2 == 0 { 1.0 } else { -1.0 });
    }
    OperatorMatrix::from_matrix(layout, data)
}

/// Dispersive two-qubit exchange `J⁽²⁾ = λᵢλⱼ(1/Δᵢ + 1/Δⱼ)/2`, `Δₖ = ωₖ − ω_c`.
///
/// Qubit indices are 1-based.
pub fn effective_j2(config: &SystemConfig, i: usize, j: usize) -> Result<f64> {
    config.validate()?;
    let n = config.qubit_count();
    for index in [i, j] {
        if index == 0 || index > n {
            return Err(Error::QubitIndexOutOfRange { index, qubit_count: n });
        }
    }
    let (qi, qj) = (&config.qubits[i - 1], &config.qubits[j - 1]);
    let delta_i = qi.omega - config.omega_c;
    let delta_j = qj.omega - config.omega_c;
    if delta_i == 0.0 {
        return Err(Error::ResonantQubit { qubit: i });
    }
    if delta_j == 0.0 {
        return Err(Error::ResonantQubit { qubit: j });
    }
    for (k, q, delta) in [(i, qi, delta_i), (j, qj, delta_j)] {
        if q.lambda > 0.0 && delta.abs() < 10.0 * q.lambda {
            log::warn!("qubit {k}: |Δ| = {:.3e} is not ≫ λ = {:.3e}", delta.abs(), q.lambda);
        }
    }
    Ok(qi.lambda * qj.lambda * (1.0 / delta_i + 1.0 / delta_j) / 2.0)
}

/// Operator content of the effective mixing Hamiltonians.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectiveKind {
    /// `J(σ₊⁽²⁾σ₋⁽¹⁾ + h.c.)`
    TwoQubit,
    /// `J(σ₊⁽¹⁾σ₊⁽²⁾σ₋⁽³⁾ + h.c.)`
    ThreeQubit,
    /// `J(σ₋⁽¹⁾σ₋⁽²⁾σ₊⁽³⁾σ₊⁽⁴⁾ + h.c.)`
    FourQubitTypeI,
    /// `J(σ₋⁽¹⁾σ₊⁽²⁾σ₊⁽³⁾σ₊⁽⁴⁾ + h.c.)`
    FourQubitTypeII,
}

impl EffectiveKind {
    pub fn qubit_count(self) -> usize {
        match self {
            EffectiveKind::TwoQubit => 2,
            EffectiveKind::ThreeQubit => 3,
            EffectiveKind::FourQubitTypeI | EffectiveKind::FourQubitTypeII => 4,
        }
    }

    /// `true` for a raising factor on each qubit of the non-conjugated term.
    fn raising_pattern(self) -> &'static [bool] {
        match self {
            EffectiveKind::TwoQubit => &[false, true],
            EffectiveKind::ThreeQubit => &[true, true, false],
            EffectiveKind::FourQubitTypeI => &[false, false, true, true],
            EffectiveKind::FourQubitTypeII => &[false, true, true, true],
        }
    }
}

/// Qubit-only effective Hamiltonian (layout with a single Fock level).
pub fn build_effective_hamiltonian(
    kind: EffectiveKind,
    coupling: f64,
    qubit_count: usize,
) -> Result<OperatorMatrix> {
    if qubit_count != kind.qubit_count() {
        return Err(Error::InvalidConfig(format!(
            "{kind:?} acts on {} qubits, got {qubit_count}",
            kind.qubit_count()
        )));
    }
    let layout = HilbertLayout::qubits_only(qubit_count)?;
    let mut term = OperatorMatrix::identity(layout);
    for (q, raising) in kind.raising_pattern().iter().enumerate() {
        let local = if *raising { pauli::sigma_plus() } else { pauli::sigma_minus() };
        term = &term * &embed_qubit_op(layout, q + 1, &local)?;
    }
    let h = &term + &term.adjoint();
    Ok(&h * coupling)
}
