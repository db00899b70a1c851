//! Operators and kets on the composite space of N two-level atoms and one
//! truncated bosonic mode.
//!
//! The tensor ordering is fixed as `qubit 1 ⊗ qubit 2 ⊗ … ⊗ qubit N ⊗ cavity`
//! with qubit 1 the slowest-varying factor. In each qubit factor index 0 is
//! the ground level `g` and index 1 the excited level `e`, so that
//! `σ_z = diag(-1, +1)` and `σ_+ = |e⟩⟨g|`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const HERMITIAN_TOL: f64 = 1e-12;

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Level of a two-level atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "g")]
    Ground,
    #[serde(rename = "e")]
    Excited,
}

impl Level {
    pub fn bit(self) -> usize {
        match self {
            Level::Ground => 0,
            Level::Excited => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Level::Ground
        } else {
            Level::Excited
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Level::Ground => 'g',
            Level::Excited => 'e',
        }
    }
}

/// Qubit levels plus photon number of one bare basis state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BareLabel {
    pub levels: Vec<Level>,
    pub photons: usize,
}

impl BareLabel {
    pub fn new(levels: Vec<Level>, photons: usize) -> Self {
        Self { levels, photons }
    }

    /// Parses compact labels such as `gge0` or `g,g,e,0`.
    pub fn parse(text: &str) -> Result<Self> {
        let cleaned: String = text
            .chars()
            .filter(|ch| !matches!(ch, ',' | '|' | '>' | '⟩' | ' ' | '_'))
            .collect();
        let split = cleaned
            .find(|ch: char| ch.is_ascii_digit())
            .ok_or_else(|| Error::InvalidConfig(format!("label `{text}` has no photon number")))?;
        let (qubits, photons) = cleaned.split_at(split);
        let levels = qubits
            .chars()
            .map(|ch| match ch {
                'g' | '0' => Ok(Level::Ground),
                'e' | '1' => Ok(Level::Excited),
                _ => Err(Error::InvalidConfig(format!("bad level `{ch}` in label `{text}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let photons = photons
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad photon number in label `{text}`")))?;
        Ok(Self { levels, photons })
    }

    pub fn excitations(&self) -> usize {
        self.photons + self.levels.iter().filter(|l| **l == Level::Excited).count()
    }
}

impl fmt::Display for BareLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for level in &self.levels {
            write!(f, "{}", level.symbol())?;
        }
        write!(f, "{}", self.photons)
    }
}

/// Shape of the composite Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertLayout {
    qubit_count: usize,
    fock_cutoff: usize,
}

impl HilbertLayout {
    pub fn new(qubit_count: usize, fock_cutoff: usize) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::InvalidLayout("qubit_count must be at least 1".into()));
        }
        if fock_cutoff == 0 {
            return Err(Error::InvalidLayout("fock_cutoff must be at least 1".into()));
        }
        if qubit_count > 16 {
            return Err(Error::InvalidLayout(format!("{qubit_count} qubits exceed the dense limit")));
        }
        Ok(Self { qubit_count, fock_cutoff })
    }

    /// Layout with no cavity factor (a single Fock level).
    pub fn qubits_only(qubit_count: usize) -> Result<Self> {
        Self::new(qubit_count, 1)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn dim(&self) -> usize {
        (1 << self.qubit_count) * self.fock_cutoff
    }

    /// Index stride of qubit `q` (1-based).
    fn stride(&self, q: usize) -> usize {
        (1 << (self.qubit_count - q)) * self.fock_cutoff
    }

    pub fn check_qubit(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.qubit_count {
            return Err(Error::QubitIndexOutOfRange { index: q, qubit_count: self.qubit_count });
        }
        Ok(())
    }

    pub fn index_of(&self, label: &BareLabel) -> Result<usize> {
        if label.levels.len() != self.qubit_count {
            return Err(Error::LevelCountMismatch {
                expected: self.qubit_count,
                got: label.levels.len(),
            });
        }
        if label.photons >= self.fock_cutoff {
            return Err(Error::PhotonOutOfRange { photons: label.photons, cutoff: self.fock_cutoff });
        }
        Ok(label
            .levels
            .iter()
            .enumerate()
            .map(|(q, level)| level.bit() * self.stride(q + 1))
            .sum::<usize>()
            + label.photons)
    }

    pub fn label_of(&self, index: usize) -> BareLabel {
        let photons = index % self.fock_cutoff;
        let levels = (1..=self.qubit_count)
            .map(|q| Level::from_bit(index / self.stride(q)))
            .collect();
        BareLabel { levels, photons }
    }

    /// Level of qubit `q` (1-based) in basis state `index`.
    pub fn level(&self, index: usize, q: usize) -> Level {
        Level::from_bit(index / self.stride(q))
    }

    pub fn photons(&self, index: usize) -> usize {
        index % self.fock_cutoff
    }
}

/// Dense operator on a [`HilbertLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    layout: HilbertLayout,
    data: CMatrix,
}

impl OperatorMatrix {
    pub fn from_matrix(layout: HilbertLayout, data: CMatrix) -> Result<Self> {
        if data.nrows() != layout.dim() || data.ncols() != layout.dim() {
            return Err(Error::DimensionMismatch { expected: layout.dim(), got: data.nrows() });
        }
        Ok(Self { layout, data })
    }

    pub fn zeros(layout: HilbertLayout) -> Self {
        Self { layout, data: CMatrix::zeros(layout.dim(), layout.dim()) }
    }

    pub fn identity(layout: HilbertLayout) -> Self {
        Self { layout, data: CMatrix::identity(layout.dim(), layout.dim()) }
    }

    pub fn layout(&self) -> HilbertLayout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self { layout: self.layout, data: self.data.adjoint() }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { layout: self.layout, data: &self.data * factor }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self { layout: self.layout, data: &self.data * &other.data - &other.data * &self.data }
    }

    /// `max |A - A†|` over all entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.data)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_deviation() <= HERMITIAN_TOL
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, ket: &KetVector) -> Result<KetVector> {
        if ket.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: ket.dim() });
        }
        Ok(KetVector { layout: self.layout, amplitudes: &self.data * &ket.amplitudes })
    }
}

pub(crate) fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for col in r..n {
            worst = worst.max((m[(r, col)] - m[(col, r)].conj()).norm());
        }
    }
    worst
}

impl<'a> Add<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.layout, rhs.layout, "layout mismatch");
        OperatorMatrix { layout: self.layout, data: &self.data + &rhs.data }
    }
}

impl<'a> Sub<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.layout, rhs.layout, "layout mismatch");
        OperatorMatrix { layout: self.layout, data: &self.data - &rhs.data }
    }
}

impl<'a> Mul<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.layout, rhs.layout, "layout mismatch");
        OperatorMatrix { layout: self.layout, data: &self.data * &rhs.data }
    }
}

impl Mul<f64> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: f64) -> OperatorMatrix {
        OperatorMatrix { layout: self.layout, data: &self.data * c(rhs) }
    }
}

/// State vector on a [`HilbertLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct KetVector {
    layout: HilbertLayout,
    amplitudes: CVector,
}

impl KetVector {
    pub fn from_amplitudes(layout: HilbertLayout, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::DimensionMismatch { expected: layout.dim(), got: amplitudes.len() });
        }
        Ok(Self { layout, amplitudes })
    }

    pub fn layout(&self) -> HilbertLayout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Self {
        Self { layout: self.layout, amplitudes: self.amplitudes.normalize() }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn superpose(&self, a: C64, other: &Self, b: C64) -> Self {
        Self { layout: self.layout, amplitudes: &self.amplitudes * a + &other.amplitudes * b }
    }
}

/// 2×2 single-qubit matrices in the `(g, e)` basis.
pub mod pauli {
    use super::{c, Matrix2, C64};

    pub fn identity() -> Matrix2<C64> {
        Matrix2::identity()
    }

    pub fn sigma_x() -> Matrix2<C64> {
        Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0))
    }

    pub fn sigma_y() -> Matrix2<C64> {
        Matrix2::new(c(0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), c(0.0))
    }

    pub fn sigma_z() -> Matrix2<C64> {
        Matrix2::new(c(-1.0), c(0.0), c(0.0), c(1.0))
    }

    /// `|e⟩⟨g|`
    pub fn sigma_plus() -> Matrix2<C64> {
        Matrix2::new(c(0.0), c(0.0), c(1.0), c(0.0))
    }

    /// `|g⟩⟨e|`
    pub fn sigma_minus() -> Matrix2<C64> {
        Matrix2::new(c(0.0), c(1.0), c(0.0), c(0.0))
    }
}

/// Embeds a single-qubit operator on `qubit_index` (1-based), identity elsewhere.
pub fn embed_qubit_op(
    layout: HilbertLayout,
    qubit_index: usize,
    local: &Matrix2<C64>,
) -> Result<OperatorMatrix> {
    layout.check_qubit(qubit_index)?;
    let dim = layout.dim();
    let stride = layout.stride(qubit_index);
    let mut data = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let col_bit = (col / stride) & 1;
        let base = col - col_bit * stride;
        for row_bit in 0..2 {
            let value = local[(row_bit, col_bit)];
            if value != C64::new(0.0, 0.0) {
                data[(base + row_bit * stride, col)] = value;
            }
        }
    }
    Ok(OperatorMatrix { layout, data })
}

/// Embeds an operator acting on the cavity factor only.
pub fn embed_cavity_op(layout: HilbertLayout, local: &CMatrix) -> Result<OperatorMatrix> {
    let n = layout.fock_cutoff();
    if local.nrows() != n || local.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: local.nrows() });
    }
    let dim = layout.dim();
    let mut data = CMatrix::zeros(dim, dim);
    for block in 0..(dim / n) {
        let offset = block * n;
        data.view_mut((offset, offset), (n, n)).copy_from(local);
    }
    Ok(OperatorMatrix { layout, data })
}

/// Truncated annihilation operator `a` with `⟨n-1|a|n⟩ = √n`.
pub fn cavity_annihilation(layout: HilbertLayout) -> OperatorMatrix {
    let n = layout.fock_cutoff();
    let mut local = CMatrix::zeros(n, n);
    for photons in 1..n {
        local[(photons - 1, photons)] = c((photons as f64).sqrt());
    }
    embed_cavity_op(layout, &local).expect("cutoff-sized block")
}

pub fn cavity_creation(layout: HilbertLayout) -> OperatorMatrix {
    cavity_annihilation(layout).adjoint()
}

/// `X = a + a†`
pub fn cavity_quadrature(layout: HilbertLayout) -> OperatorMatrix {
    let a = cavity_annihilation(layout);
    &a + &a.adjoint()
}

pub fn number_operator(layout: HilbertLayout) -> OperatorMatrix {
    let a = cavity_annihilation(layout);
    &a.adjoint() * &a
}

/// Unit basis vector for the given qubit levels and photon number.
pub fn bare_state(layout: HilbertLayout, qubit_levels: &[Level], photons: usize) -> Result<KetVector> {
    let label = BareLabel::new(qubit_levels.to_vec(), photons);
    bare_state_from_label(layout, &label)
}

pub fn bare_state_from_label(layout: HilbertLayout, label: &BareLabel) -> Result<KetVector> {
    let index = layout.index_of(label)?;
    Ok(basis_ket(layout, index))
}

pub fn basis_ket(layout: HilbertLayout, index: usize) -> KetVector {
    let mut amplitudes = CVector::zeros(layout.dim());
    amplitudes[index] = c(1.0);
    KetVector { layout, amplitudes }
}

/// Parses a string like `ggeg` into levels.
pub fn levels(text: &str) -> Vec<Level> {
    text.chars()
        .filter_map(|ch| match ch {
            'g' | '0' => Some(Level::Ground),
            'e' | '1' => Some(Level::Excited),
            _ => None,
        })
        .collect()
}
