//! Polariton spectra: Hermitian diagonalization, parameter sweeps, gap
//! location, brightness, and the rotated magnon basis.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    build_hamiltonian, two_sphere_system, HamiltonianMatrix, ModeKind, SystemParams,
};

/// Eigenvalues below this spacing are treated as one degenerate cluster and
/// given a deterministic basis (extremal cavity weight). Well above the
/// ~1e-15 GHz numerical splitting of an exact degeneracy, well below any
/// physical gap resolved by the sweeps.
const DEGENERACY_TOL: f64 = 1e-11;

/// Residual acceptance per branch, relative to the Frobenius norm of H.
const RESIDUAL_TOL: f64 = 1e-10;

/// Diagonalized hybrid system: sorted real frequencies, orthonormal
/// eigenvector columns, and the cavity weight of every branch.
#[derive(Debug, Clone)]
pub struct PolaritonSet {
    /// Polariton frequencies in GHz, ascending.
    pub frequencies: Vec<f64>,
    /// Column mu holds the eigenvector of branch mu in the mode basis of the
    /// input matrix.
    pub vectors: DMatrix<Complex64>,
    /// Per-branch cavity weight `sum_k |u_{mu k}|^2` over cavity modes.
    pub brightness: Vec<f64>,
    /// Indices of the cavity modes in the matrix basis.
    pub cavity_indices: Vec<usize>,
}

impl PolaritonSet {
    pub fn n(&self) -> usize {
        self.frequencies.len()
    }
}

/// Which system parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    OmegaM,
    DeltaM,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::OmegaM => "omega_m",
            SweepParameter::DeltaM => "delta_m",
        }
    }
}

/// Uniform sweep over one system parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, start: f64, stop: f64, steps: usize) -> Result<Self> {
        let spec = SweepSpec {
            parameter,
            start,
            stop,
            steps,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::InvalidParameter(
                "sweep bounds must be finite".into(),
            ));
        }
        if self.steps < 2 {
            return Err(Error::InvalidParameter(format!(
                "sweep needs at least 2 steps (got {})",
                self.steps
            )));
        }
        if self.start >= self.stop {
            return Err(Error::InvalidParameter(format!(
                "sweep start must be < stop (got {}..{})",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    /// The i-th sample point.
    pub fn value(&self, i: usize) -> f64 {
        self.start + (self.stop - self.start) * (i as f64) / ((self.steps - 1) as f64)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }

    /// Apply the sample value to a parameter set.
    pub fn apply(&self, params: &SystemParams, i: usize) -> SystemParams {
        let mut p = params.clone();
        match self.parameter {
            SweepParameter::OmegaM => p.omega_m = self.value(i),
            SweepParameter::DeltaM => p.delta_m = self.value(i),
        }
        p
    }
}

/// One sweep sample: parameter value, branch frequencies, branch brightness.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub frequencies: Vec<f64>,
    pub brightness: Vec<f64>,
}

/// Deterministic table of sweep results, one row per step.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub rows: Vec<SweepRow>,
}

/// Location and size of a minimal branch gap.
#[derive(Debug, Clone, Copy)]
pub struct MinimumGap {
    /// Refined sweep-parameter value of the minimum.
    pub parameter: f64,
    /// Refined gap in GHz (clamped at zero).
    pub gap: f64,
}

/// Diagonalize a Hermitian mode matrix into its polariton branches.
///
/// Frequencies come back ascending; inside a numerically degenerate cluster
/// the basis is rotated to extremal cavity weight and ordered by descending
/// brightness, which pins the dark/bright labeling at exact crossings. Each
/// eigenvector's global phase is fixed by making its largest component real
/// and positive.
pub fn diagonalize(h: &HamiltonianMatrix) -> Result<PolaritonSet> {
    let asym = h.max_asymmetry();
    if asym > 1e-12 {
        return Err(Error::NonHermitian(asym));
    }
    let n = h.n();
    let cavity_indices = h.cavity_indices();
    if n == 0 {
        return Ok(PolaritonSet {
            frequencies: vec![],
            vectors: DMatrix::zeros(0, 0),
            brightness: vec![],
            cavity_indices,
        });
    }

    let eig = SymmetricEigen::new(h.entries().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let frequencies: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (slot, &i) in order.iter().enumerate() {
        vectors.set_column(slot, &eig.eigenvectors.column(i));
    }

    canonicalize_degenerate_clusters(&frequencies, &mut vectors, &cavity_indices);
    fix_column_phases(&mut vectors);

    let h_norm = h.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for mu in 0..n {
        let v = vectors.column(mu);
        let residual = (h.entries() * v - v * Complex64::new(frequencies[mu], 0.0)).norm();
        if residual > RESIDUAL_TOL * h_norm.max(1.0) {
            return Err(Error::Eigensolver(format!(
                "branch {mu} residual {residual:.3e} exceeds tolerance"
            )));
        }
    }

    let brightness = (0..n)
        .map(|mu| cavity_weight(&vectors, mu, &cavity_indices))
        .collect();

    Ok(PolaritonSet {
        frequencies,
        vectors,
        brightness,
        cavity_indices,
    })
}

fn cavity_weight(vectors: &DMatrix<Complex64>, column: usize, cavity_indices: &[usize]) -> f64 {
    cavity_indices
        .iter()
        .map(|&i| vectors[(i, column)].norm_sqr())
        .sum()
}

/// Rotate each numerically degenerate eigenvalue cluster to the basis that
/// diagonalizes the cavity-projector quadratic form, ordered bright-first.
fn canonicalize_degenerate_clusters(
    frequencies: &[f64],
    vectors: &mut DMatrix<Complex64>,
    cavity_indices: &[usize],
) {
    let n = frequencies.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && frequencies[end] - frequencies[end - 1] <= DEGENERACY_TOL {
            end += 1;
        }
        let d = end - start;
        if d > 1 {
            // Gram matrix of cavity components within the cluster.
            let mut gram = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
            for a in 0..d {
                for b in 0..d {
                    let mut s = Complex64::new(0.0, 0.0);
                    for &i in cavity_indices {
                        s += vectors[(i, start + a)].conj() * vectors[(i, start + b)];
                    }
                    gram[(a, b)] = s;
                }
            }
            let ge = SymmetricEigen::new(gram);
            let mut idx: Vec<usize> = (0..d).collect();
            idx.sort_by(|&a, &b| ge.eigenvalues[b].total_cmp(&ge.eigenvalues[a]));

            let block = vectors.columns(start, d).into_owned();
            for (slot, &k) in idx.iter().enumerate() {
                let mut col =
                    nalgebra::DVector::from_element(block.nrows(), Complex64::new(0.0, 0.0));
                for a in 0..d {
                    col += block.column(a) * ge.eigenvectors[(a, k)];
                }
                vectors.set_column(start + slot, &col);
            }
        }
        start = end;
    }
}

/// Make the largest-magnitude component of each column real and positive.
fn fix_column_phases(vectors: &mut DMatrix<Complex64>) {
    let (n, cols) = vectors.shape();
    for c in 0..cols {
        let mut best = 0;
        let mut best_norm = 0.0;
        for r in 0..n {
            let norm = vectors[(r, c)].norm_sqr();
            if norm > best_norm {
                best_norm = norm;
                best = r;
            }
        }
        if best_norm > 0.0 {
            let z = vectors[(best, c)];
            let rot = z.conj() / z.norm();
            for r in 0..n {
                vectors[(r, c)] *= rot;
            }
        }
    }
}

/// Sweep one parameter of the two-sphere system and tabulate branch
/// frequencies and brightness per step.
pub fn sweep_spectrum(params: &SystemParams, sweep: &SweepSpec) -> Result<SweepTable> {
    sweep.validate()?;
    let mut rows = Vec::with_capacity(sweep.steps);
    for i in 0..sweep.steps {
        let p = sweep.apply(params, i);
        let h = build_hamiltonian(&two_sphere_system(&p)?)?;
        let pols = diagonalize(&h)?;
        rows.push(SweepRow {
            value: sweep.value(i),
            frequencies: pols.frequencies,
            brightness: pols.brightness,
        });
    }
    Ok(SweepTable {
        parameter: sweep.parameter,
        rows,
    })
}

/// Locate the sweep point minimizing `omega_high - omega_low`, with 3-point
/// parabolic refinement around the discrete minimum.
pub fn minimum_gap(
    table: &SweepTable,
    branch_low: usize,
    branch_high: usize,
) -> Result<MinimumGap> {
    if table.rows.is_empty() {
        return Err(Error::InvalidParameter("sweep table is empty".into()));
    }
    let n_branches = table.rows[0].frequencies.len();
    for index in [branch_low, branch_high] {
        if index >= n_branches {
            return Err(Error::BranchIndex {
                index,
                count: n_branches,
            });
        }
    }
    let gap_at = |row: &SweepRow| row.frequencies[branch_high] - row.frequencies[branch_low];
    let mut best = 0;
    for (i, row) in table.rows.iter().enumerate() {
        if gap_at(row) < gap_at(&table.rows[best]) {
            best = i;
        }
    }
    let d0 = gap_at(&table.rows[best]);
    let x0 = table.rows[best].value;
    if best == 0 || best + 1 == table.rows.len() {
        return Ok(MinimumGap {
            parameter: x0,
            gap: d0.max(0.0),
        });
    }
    let dl = gap_at(&table.rows[best - 1]);
    let dr = gap_at(&table.rows[best + 1]);
    let h = table.rows[best + 1].value - table.rows[best].value;
    let curvature = dl - 2.0 * d0 + dr;
    if curvature <= 0.0 {
        return Ok(MinimumGap {
            parameter: x0,
            gap: d0.max(0.0),
        });
    }
    let offset = 0.5 * h * (dl - dr) / curvature;
    let gap = d0 - (dl - dr).powi(2) / (8.0 * curvature);
    Ok(MinimumGap {
        parameter: x0 + offset,
        gap: gap.max(0.0),
    })
}

/// Cavity weight of every branch over the given cavity indices.
pub fn brightness_profile(pols: &PolaritonSet, cavity_indices: &[usize]) -> Result<Vec<f64>> {
    let n = pols.n();
    for &index in cavity_indices {
        if index >= n {
            return Err(Error::BranchIndex { index, count: n });
        }
    }
    Ok((0..n)
        .map(|mu| cavity_weight(&pols.vectors, mu, cavity_indices))
        .collect())
}

/// The two-sphere Hamiltonian in the rotated magnon basis
/// `{c0, c1, M_theta, M_theta_pi}` with `M_theta = (m0 + e^{-i theta} m1)/sqrt(2)`.
///
/// Both rotated magnons sit at the mean frequency `omega_m` and mix through
/// `-delta_m`; the cavity couplings become `g~0 cos(theta/2)` and
/// `g~0 sin(theta/2)` to the two combinations and `g~1` to `M_theta`, with
/// `g~k = sqrt(2) g_k`. Unitarily equivalent to the lab-basis matrix.
pub fn rotated_basis_hamiltonian(params: &SystemParams) -> Result<HamiltonianMatrix> {
    params.validate()?;
    let [wc0, wc1] = params.cavity_frequencies();
    let half = 0.5 * params.theta;
    let phase = Complex64::from_polar(1.0, -half);
    let gt0 = std::f64::consts::SQRT_2 * params.g0;
    let gt1 = std::f64::consts::SQRT_2 * params.g1;

    let i_unit = Complex64::new(0.0, 1.0);
    let c0_mt = phase * gt0 * half.cos();
    let c0_mtp = i_unit * phase * gt0 * half.sin();
    let c1_mt = Complex64::new(gt1, 0.0);
    let mm = Complex64::new(-params.delta_m, 0.0);

    let z = Complex64::new(0.0, 0.0);
    let entries = DMatrix::from_row_slice(
        4,
        4,
        &[
            Complex64::new(wc0, 0.0),
            z,
            c0_mt.conj(),
            c0_mtp.conj(),
            z,
            Complex64::new(wc1, 0.0),
            c1_mt.conj(),
            z,
            c0_mt,
            c1_mt,
            Complex64::new(params.omega_m, 0.0),
            mm.conj(),
            c0_mtp,
            z,
            mm,
            Complex64::new(params.omega_m, 0.0),
        ],
    );
    HamiltonianMatrix::from_parts(
        entries,
        vec![
            "c0".into(),
            "c1".into(),
            "M_theta".into(),
            "M_theta_pi".into(),
        ],
        vec![
            ModeKind::Cavity,
            ModeKind::Cavity,
            ModeKind::Magnon,
            ModeKind::Magnon,
        ],
    )
}
