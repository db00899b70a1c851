//! Diagonalization, bare-state labeling, parameter sweeps and anticrossing
//! search.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::algebra::{c, hermiticity_deviation, BareLabel, CMatrix, CVector, HilbertLayout, KetVector, OperatorMatrix};
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, HamiltonianKind, SystemConfig};
use crate::parallel::{self, Execution};

/// Largest tolerated `max |H − H†|` on input to [`diagonalize`].
pub const DIAGONALIZE_HERMITIAN_TOL: f64 = 1e-9;
/// Eigenvalues closer than this are treated as exactly degenerate.
const EXACT_DEGENERACY: f64 = 1e-10;
/// Default energy gap below which neighbouring levels form one dressed cluster.
pub const DEFAULT_CLUSTER_GAP: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StateLabel {
    pub bare_index: usize,
    pub overlap: f64,
}

/// Full eigendecomposition of one Hamiltonian, ground-offset.
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    layout: HilbertLayout,
    ground_energy: f64,
    energies: Vec<f64>,
    eigenvectors: CMatrix,
    labels: Vec<StateLabel>,
    label_ties: Vec<(usize, usize)>,
}

impl SpectrumResult {
    pub fn layout(&self) -> HilbertLayout {
        self.layout
    }

    /// Energies relative to the ground state, ascending; `energies()[0] == 0`.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Absolute ground-state energy removed from every level.
    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    /// Eigenvectors as columns, in the bare basis.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> KetVector {
        KetVector::from_amplitudes(self.layout, self.eigenvectors.column(k).into_owned())
            .expect("eigenvector matches layout")
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.labels
    }

    pub fn label(&self, k: usize) -> BareLabel {
        self.layout.label_of(self.labels[k].bare_index)
    }

    /// Pairs of eigenstates sharing the same dominant bare label, lower energy first.
    pub fn label_ties(&self) -> &[(usize, usize)] {
        &self.label_ties
    }

    /// Index of the eigenstate labeled by `label`, if exactly one carries it.
    pub fn find_label(&self, label: &BareLabel) -> Option<usize> {
        let index = self.layout.index_of(label).ok()?;
        let mut hits = self.labels.iter().enumerate().filter(|(_, l)| l.bare_index == index);
        let first = hits.next()?.0;
        hits.next().is_none().then_some(first)
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Bare-aligned dressed states for all levels with energy ≤ `max_energy`.
    ///
    /// Levels closer than `cluster_gap` are grouped; inside each group the
    /// eigenvectors are rotated (symmetric orthonormalization of the projected
    /// dominant bare states) so that each member is labeled by one bare state.
    /// Outside resonant groups the dressed states are the eigenstates.
    pub fn dressed_basis(&self, max_energy: Option<f64>, cluster_gap: f64) -> Result<DressedBasis> {
        let limit = max_energy.unwrap_or(f64::INFINITY);
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for k in 0..self.len() {
            match clusters.last_mut() {
                Some(cluster) if self.energies[k] - self.energies[*cluster.last().unwrap()] < cluster_gap => {
                    cluster.push(k)
                }
                _ => {
                    if self.energies[k] > limit {
                        break;
                    }
                    clusters.push(vec![k]);
                }
            }
        }
        let dim = self.layout.dim();
        let mut columns: Vec<CVector> = Vec::new();
        let mut labels = Vec::new();
        let mut members = Vec::new();
        for (cluster_id, cluster) in clusters.iter().enumerate() {
            let block = self.eigenvectors.select_columns(cluster.iter());
            let (aligned, chosen) = if cluster.len() == 1 {
                (block, vec![self.labels[cluster[0]].bare_index])
            } else {
                align_to_bare(&block)
            };
            for (col, bare) in chosen.into_iter().enumerate() {
                columns.push(aligned.column(col).into_owned());
                labels.push(bare);
                members.push(cluster_id);
            }
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        let duplicates: Vec<String> = sorted
            .windows(2)
            .filter(|w| w[0] == w[1])
            .map(|w| self.layout.label_of(w[0]).to_string())
            .collect();
        if !duplicates.is_empty() {
            return Err(Error::AmbiguousLabels(format!(
                "labels shared by several dressed states: {}",
                duplicates.join(", ")
            )));
        }
        let vectors = if columns.is_empty() {
            CMatrix::zeros(dim, 0)
        } else {
            CMatrix::from_columns(&columns)
        };
        // energies as expectation values in the eigenbasis
        let coeffs = self.eigenvectors.adjoint() * &vectors;
        let energies = (0..vectors.ncols())
            .map(|col| {
                coeffs
                    .column(col)
                    .iter()
                    .zip(&self.energies)
                    .map(|(a, e)| a.norm_sqr() * e)
                    .sum()
            })
            .collect();
        let eigen_count = clusters.iter().map(|cl| cl.len()).sum();
        Ok(DressedBasis { layout: self.layout, vectors, coefficients: coeffs, labels, energies, clusters: members, eigen_count })
    }
}

/// Labeled dressed states spanning the lowest `eigen_count` eigenstates.
#[derive(Clone, Debug)]
pub struct DressedBasis {
    layout: HilbertLayout,
    vectors: CMatrix,
    coefficients: CMatrix,
    labels: Vec<usize>,
    energies: Vec<f64>,
    clusters: Vec<usize>,
    eigen_count: usize,
}

impl DressedBasis {
    pub fn layout(&self) -> HilbertLayout {
        self.layout
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of eigenstates (from the bottom of the spectrum) the basis spans.
    pub fn eigen_count(&self) -> usize {
        self.eigen_count
    }

    /// Dressed states as columns in the bare basis.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    /// Dressed states as columns in the eigenbasis.
    pub fn coefficients(&self) -> &CMatrix {
        &self.coefficients
    }

    pub fn bare_index(&self, n: usize) -> usize {
        self.labels[n]
    }

    pub fn label(&self, n: usize) -> BareLabel {
        self.layout.label_of(self.labels[n])
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.energies[n]
    }

    pub fn cluster(&self, n: usize) -> usize {
        self.clusters[n]
    }

    pub fn position(&self, label: &BareLabel) -> Option<usize> {
        let index = self.layout.index_of(label).ok()?;
        self.labels.iter().position(|l| *l == index)
    }

    pub fn state(&self, label: &BareLabel) -> Result<KetVector> {
        let n = self.position(label).ok_or_else(|| Error::MissingLabel(label.to_string()))?;
        KetVector::from_amplitudes(self.layout, self.vectors.column(n).into_owned())
    }
}

fn align_to_bare(block: &CMatrix) -> (CMatrix, Vec<usize>) {
    let (dim, m) = block.shape();
    let mut weights: Vec<(usize, f64)> = (0..dim)
        .map(|b| (b, block.row(b).iter().map(|z| z.norm_sqr()).sum::<f64>()))
        .collect();
    weights.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut chosen: Vec<usize> = weights.iter().take(m).map(|(b, _)| *b).collect();
    chosen.sort_unstable();
    // projections of the chosen bare states onto the cluster subspace
    let mut projected = CMatrix::zeros(dim, m);
    for (col, b) in chosen.iter().enumerate() {
        let row = block.row(*b).adjoint();
        projected.set_column(col, &(block * row));
    }
    let overlap = projected.adjoint() * &projected;
    let eig = SymmetricEigen::new(overlap);
    if eig.eigenvalues.iter().any(|v| *v < 1e-8) {
        let labels = (0..m)
            .map(|col| {
                (0..dim)
                    .max_by(|a, b| block[(*a, col)].norm_sqr().total_cmp(&block[(*b, col)].norm_sqr()).then(b.cmp(a)))
                    .unwrap()
            })
            .collect();
        return (block.clone(), labels);
    }
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| c(1.0 / v.sqrt())));
    let transform = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    (projected * transform, chosen)
}

fn fix_phase(v: &mut CVector) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > best_norm + 1e-12 {
            best = i;
            best_norm = z.norm();
        }
    }
    if best_norm > 0.0 {
        let phase = v[best].conj() / best_norm;
        *v *= phase;
    }
}

fn dominant_label(v: &CVector) -> StateLabel {
    let mut best = StateLabel { bare_index: 0, overlap: -1.0 };
    for (i, z) in v.iter().enumerate() {
        let w = z.norm_sqr();
        if w > best.overlap + 1e-12 {
            best = StateLabel { bare_index: i, overlap: w };
        }
    }
    best
}

/// Full eigendecomposition with bare-state labels.
pub fn diagonalize(h: &OperatorMatrix) -> Result<SpectrumResult> {
    let deviation = h.hermiticity_deviation();
    if deviation > DIAGONALIZE_HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    diagonalize_matrix(h.layout(), h.matrix())
}

pub(crate) fn diagonalize_matrix(layout: HilbertLayout, m: &CMatrix) -> Result<SpectrumResult> {
    let deviation = hermiticity_deviation(m);
    if deviation > DIAGONALIZE_HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let dim = m.nrows();
    let (values, vectors): (Vec<f64>, CMatrix) = if m.iter().all(|z| z.im == 0.0) {
        let real = DMatrix::from_fn(dim, dim, |r, col| 0.5 * (m[(r, col)].re + m[(col, r)].re));
        let eig = SymmetricEigen::new(real);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors.map(c))
    } else {
        let herm = (m + m.adjoint()) * c(0.5);
        let eig = SymmetricEigen::new(herm);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|a, b| values[*a].total_cmp(&values[*b]).then(a.cmp(b)));
    let sorted: Vec<f64> = order.iter().map(|k| values[*k]).collect();
    let mut eigenvectors = vectors.select_columns(order.iter());

    // exactly degenerate groups get a reproducible bare-aligned basis
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && sorted[end] - sorted[end - 1] < EXACT_DEGENERACY * (1.0 + sorted[end].abs()) {
            end += 1;
        }
        if end - start > 1 {
            let block = eigenvectors.columns(start, end - start).into_owned();
            let (aligned, _) = align_to_bare(&block);
            eigenvectors.columns_mut(start, end - start).copy_from(&aligned);
        }
        start = end;
    }
    for mut col in eigenvectors.column_iter_mut() {
        let mut v = col.clone_owned();
        fix_phase(&mut v);
        col.copy_from(&v);
    }

    let ground_energy = sorted.first().copied().unwrap_or(0.0);
    let energies: Vec<f64> = sorted.iter().map(|e| e - ground_energy).collect();
    let labels: Vec<StateLabel> =
        (0..dim).map(|k| dominant_label(&eigenvectors.column(k).into_owned())).collect();
    let mut label_ties = Vec::new();
    for a in 0..dim {
        for b in (a + 1)..dim {
            if labels[a].bare_index == labels[b].bare_index {
                label_ties.push((a, b));
            }
        }
    }
    Ok(SpectrumResult { layout, ground_energy, energies, eigenvectors, labels, label_ties })
}

/// Excited levels at one sweep point.
#[derive(Clone, Debug, Serialize)]
pub struct LevelPoint {
    pub value: f64,
    /// Ground-offset energies of excited levels 1..=level_count.
    pub energies: Vec<f64>,
    pub labels: Vec<StateLabel>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub parameter: String,
    #[serde(skip)]
    pub layout: Option<HilbertLayout>,
    pub points: Vec<LevelPoint>,
    /// `branches[p][b]` is the excited-level number (1-based) that continues
    /// branch `b` at grid point `p`, tracked by eigenvector overlap.
    pub branches: Vec<Vec<usize>>,
}

impl SweepResult {
    pub fn grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Energy of tracked branch `b` along the grid.
    pub fn branch_energies(&self, b: usize) -> Vec<f64> {
        self.points
            .iter()
            .zip(&self.branches)
            .map(|(p, br)| p.energies[br[b] - 1])
            .collect()
    }

    /// Dominant bare label of tracked branch `b` along the grid.
    pub fn branch_labels(&self, b: usize) -> Vec<usize> {
        self.points
            .iter()
            .zip(&self.branches)
            .map(|(p, br)| p.labels[br[b] - 1].bare_index)
            .collect()
    }

    /// `param,E1,…,EL,label1,…,labelL` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let levels = self.points.first().map(|p| p.energies.len()).unwrap_or(0);
        let mut out = String::from("param");
        for k in 1..=levels {
            write!(out, ",E{k}").unwrap();
        }
        for k in 1..=levels {
            write!(out, ",label{k}").unwrap();
        }
        out.push('\n');
        for p in &self.points {
            write!(out, "{}", fmt_f64(p.value)).unwrap();
            for e in &p.energies {
                write!(out, ",{}", fmt_f64(*e)).unwrap();
            }
            for l in &p.labels {
                let text = match self.layout {
                    Some(layout) => layout.label_of(l.bare_index).to_string(),
                    None => l.bare_index.to_string(),
                };
                write!(out, ",{text}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Full-precision float formatting used by every CSV writer.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn spectrum_at(config: &SystemConfig, kind: HamiltonianKind, parameter: &str, value: f64) -> Result<SpectrumResult> {
    let point = config.with_parameter(parameter, value)?;
    diagonalize(&build_hamiltonian(&point, kind)?)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonMonotoneGrid);
    }
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    if increasing || decreasing {
        Ok(())
    } else {
        Err(Error::NonMonotoneGrid)
    }
}

/// Lowest `level_count` excited levels along `grid` for the named parameter.
pub fn sweep_levels(
    config: &SystemConfig,
    kind: HamiltonianKind,
    parameter: &str,
    grid: &[f64],
    level_count: usize,
    exec: Execution,
) -> Result<SweepResult> {
    config.validate()?;
    config.parameter(parameter)?;
    check_grid(grid)?;
    let layout = config.layout()?;
    if level_count + 1 > layout.dim() {
        return Err(Error::InvalidConfig(format!(
            "{level_count} excited levels requested but dimension is {}",
            layout.dim()
        )));
    }
    let keep = (level_count + 3).min(layout.dim() - 1);
    let spectra = parallel::try_map(exec, grid, |x| {
        let spectrum = spectrum_at(config, kind, parameter, *x)?;
        let vectors = spectrum.eigenvectors().columns(1, keep).into_owned();
        let point = LevelPoint {
            value: *x,
            energies: spectrum.energies()[1..=level_count].to_vec(),
            labels: spectrum.labels()[1..=level_count].to_vec(),
        };
        Ok::<_, Error>((point, vectors))
    })?;
    let mut branches: Vec<Vec<usize>> = Vec::with_capacity(grid.len());
    for (p, (_, vectors)) in spectra.iter().enumerate() {
        if p == 0 {
            branches.push((1..=level_count).collect());
            continue;
        }
        let previous = &spectra[p - 1].1;
        let overlap = previous.adjoint() * vectors;
        let last = &branches[p - 1];
        let mut candidates: Vec<(usize, usize, f64)> = Vec::new();
        for (b, level) in last.iter().enumerate() {
            for next in 0..keep {
                candidates.push((b, next, overlap[(level - 1, next)].norm_sqr()));
            }
        }
        candidates.sort_by(|x, y| y.2.total_cmp(&x.2).then(x.0.cmp(&y.0)).then(x.1.cmp(&y.1)));
        let mut assigned = vec![usize::MAX; level_count];
        let mut used = vec![false; keep];
        for (b, next, _) in candidates {
            if assigned[b] == usize::MAX && !used[next] && next < level_count {
                assigned[b] = next + 1;
                used[next] = true;
            }
        }
        // branches leaving the window fall back to the free levels in order
        let mut free = (0..level_count).filter(|k| !used[*k]);
        for a in assigned.iter_mut() {
            if *a == usize::MAX {
                *a = free.next().expect("free level") + 1;
            }
        }
        branches.push(assigned);
    }
    Ok(SweepResult {
        parameter: parameter.to_string(),
        layout: Some(layout),
        points: spectra.into_iter().map(|(p, _)| p).collect(),
        branches,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct AnticrossingOptions {
    pub kind: HamiltonianKind,
    /// Golden-section stopping width in parameter units.
    pub tolerance: f64,
    pub prescan_points: usize,
    /// A third level with more pair weight than this is reported as degeneracy.
    pub mixing_threshold: f64,
    pub exec: Execution,
}

impl Default for AnticrossingOptions {
    fn default() -> Self {
        Self {
            kind: HamiltonianKind::GeneralizedDicke,
            tolerance: 1e-6,
            prescan_points: 200,
            mixing_threshold: 0.25,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnticrossingReport {
    pub parameter: String,
    pub location: f64,
    /// Minimum energy gap between the tracked branches (2J).
    pub splitting: f64,
    /// Smallest gap actually evaluated during the search.
    pub min_gap: f64,
    /// Excited-level numbers of the two branches at the minimum (lower, upper).
    pub levels: (usize, usize),
    pub energies: (f64, f64),
    pub pair: (String, String),
    /// `|⟨ψ|(|u⟩+|v⟩)/√2⟩|²` for the lower and upper eigenstate.
    pub symmetric_overlap: (f64, f64),
    /// `|⟨ψ|(|u⟩−|v⟩)/√2⟩|²` for the lower and upper eigenstate.
    pub antisymmetric_overlap: (f64, f64),
    /// `(|⟨u|ψ⟩|², |⟨v|ψ⟩|²)` for the lower and upper eigenstate.
    pub lower_weights: (f64, f64),
    pub upper_weights: (f64, f64),
}

impl AnticrossingReport {
    /// Half the splitting.
    pub fn coupling(&self) -> f64 {
        0.5 * self.splitting
    }

    /// Larger of the symmetric/antisymmetric overlaps for each eigenstate.
    pub fn superposition_overlaps(&self) -> (f64, f64) {
        (
            self.symmetric_overlap.0.max(self.antisymmetric_overlap.0),
            self.symmetric_overlap.1.max(self.antisymmetric_overlap.1),
        )
    }
}

struct PairGap {
    gap: f64,
    lower: usize,
    upper: usize,
}

fn pair_gap(spectrum: &SpectrumResult, u: usize, v: usize, threshold: f64) -> Result<PairGap> {
    let vectors = spectrum.eigenvectors();
    let mut weights: Vec<(usize, f64)> = (0..spectrum.len())
        .map(|k| (k, vectors[(u, k)].norm_sqr() + vectors[(v, k)].norm_sqr()))
        .collect();
    weights.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    if weights.len() < 2 || weights[1].1 < threshold {
        return Err(Error::BranchesNotFound(format!(
            "only {} level(s) carry pair weight above {threshold}",
            weights.iter().filter(|w| w.1 >= threshold).count()
        )));
    }
    if weights.len() > 2 && weights[2].1 > threshold {
        let levels = weights.iter().take_while(|w| w.1 > threshold).map(|w| w.0).collect();
        return Err(Error::DegenerateBranches { levels });
    }
    let (a, b) = (weights[0].0.min(weights[1].0), weights[0].0.max(weights[1].0));
    Ok(PairGap { gap: spectrum.energies()[b] - spectrum.energies()[a], lower: a, upper: b })
}

/// Locates the minimum gap between the branches dominated by bare states
/// `pair.0` and `pair.1` inside `bracket`.
///
/// A uniform pre-scan picks the best grid cell, golden-section search refines
/// it to `tolerance`, and a parabola through `gap²` around the minimum gives
/// the final splitting.
pub fn find_anticrossing(
    config: &SystemConfig,
    parameter: &str,
    bracket: (f64, f64),
    pair: (&BareLabel, &BareLabel),
    options: &AnticrossingOptions,
) -> Result<AnticrossingReport> {
    config.validate()?;
    config.parameter(parameter)?;
    let layout = config.layout()?;
    let u = layout.index_of(pair.0)?;
    let v = layout.index_of(pair.1)?;
    let (lo, hi) = (bracket.0.min(bracket.1), bracket.0.max(bracket.1));
    if !(hi > lo) {
        return Err(Error::InvalidConfig("anticrossing bracket is empty".into()));
    }
    let threshold = options.mixing_threshold;
    let gap_at = |x: f64| -> Result<f64> {
        let spectrum = spectrum_at(config, options.kind, parameter, x)?;
        Ok(pair_gap(&spectrum, u, v, threshold)?.gap)
    };

    let n = options.prescan_points.max(3);
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let gaps = parallel::try_map(options.exec, &grid, |x| gap_at(*x))?;
    let best = (0..n).min_by(|a, b| gaps[*a].total_cmp(&gaps[*b])).unwrap();
    if best == 0 || best == n - 1 {
        return Err(Error::BranchesNotFound(format!(
            "gap minimum lies on the bracket edge at {}; widen the bracket",
            grid[best]
        )));
    }

    let mut a = grid[best - 1];
    let mut b = grid[best + 1];
    let mut best_x = grid[best];
    let mut best_gap = gaps[best];
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = gap_at(x1)?;
    let mut f2 = gap_at(x2)?;
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f < best_gap {
            best_gap = f;
            best_x = x;
        }
    }
    while b - a > options.tolerance {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = gap_at(x1)?;
            if f1 < best_gap {
                best_gap = f1;
                best_x = x1;
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = gap_at(x2)?;
            if f2 < best_gap {
                best_gap = f2;
                best_x = x2;
            }
        }
    }

    // quadratic model of gap² around the minimum
    let h = (10.0 * options.tolerance).max(1e-9);
    let g_minus = gap_at(best_x - h)?;
    let g_plus = gap_at(best_x + h)?;
    let (y0, ym, yp) = (best_gap * best_gap, g_minus * g_minus, g_plus * g_plus);
    let curvature = (yp + ym - 2.0 * y0) / (h * h);
    let (location, splitting) = if curvature > 0.0 {
        let shift = -(yp - ym) / (2.0 * h) / curvature;
        if shift.abs() <= h {
            let vertex = y0 - 0.5 * curvature * shift * shift;
            (best_x + shift, vertex.max(0.0).sqrt().min(best_gap))
        } else {
            (best_x, best_gap)
        }
    } else {
        (best_x, best_gap)
    };

    let spectrum = spectrum_at(config, options.kind, parameter, location)?;
    let found = pair_gap(&spectrum, u, v, threshold)?;
    let vectors = spectrum.eigenvectors();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let overlaps = |k: usize| {
        let (cu, cv) = (vectors[(u, k)], vectors[(v, k)]);
        ((cu + cv).norm_sqr() * s * s, (cu - cv).norm_sqr() * s * s, cu.norm_sqr(), cv.norm_sqr())
    };
    let lo_o = overlaps(found.lower);
    let hi_o = overlaps(found.upper);
    Ok(AnticrossingReport {
        parameter: parameter.to_string(),
        location,
        splitting,
        min_gap: best_gap.min(found.gap),
        levels: (found.lower, found.upper),
        energies: (spectrum.energies()[found.lower], spectrum.energies()[found.upper]),
        pair: (pair.0.to_string(), pair.1.to_string()),
        symmetric_overlap: (lo_o.0, hi_o.0),
        antisymmetric_overlap: (lo_o.1, hi_o.1),
        lower_weights: (lo_o.2, lo_o.3),
        upper_weights: (hi_o.2, hi_o.3),
    })
}

/// Column of `m` as a normalized ket, used by callers building targets.
pub fn ket_from_column(layout: HilbertLayout, m: &CMatrix, col: usize) -> KetVector {
    KetVector::from_amplitudes(layout, m.column(col).into_owned()).expect("column matches layout")
}
