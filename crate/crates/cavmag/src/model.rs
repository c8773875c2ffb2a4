//! Modes, couplings, and Hamiltonian assembly.
//!
//! A hybrid system is described by a [`CouplingGraph`]: bosonic modes (cavity
//! or magnon) as vertices and beam-splitter couplings `g e^{i phi} (from)(to)^+ + h.c`
//! as edges. All frequencies and rates are in GHz (frequency/2pi convention),
//! with hbar factored out everywhere.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Phases equal to a multiple of 2pi within this tolerance normalize to 0.
const PHASE_SNAP: f64 = 1e-12;

/// Reduce a phase to the canonical branch `[0, 2pi)`.
///
/// Values within `1e-12` of a multiple of 2pi collapse to exactly `0.0`, which
/// keeps gauge-fixed graphs and round-tripped configs comparable by equality.
pub fn normalize_phase(phase: f64) -> f64 {
    let r = phase.rem_euclid(TAU);
    if r < PHASE_SNAP || TAU - r < PHASE_SNAP {
        0.0
    } else {
        r
    }
}

/// Whether a mode is a photonic cavity resonance or a magnon (Kittel) mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Cavity,
    Magnon,
}

impl ModeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeKind::Cavity => "cavity",
            ModeKind::Magnon => "magnon",
        }
    }
}

/// A single bosonic mode of the hybrid system.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub id: String,
    pub kind: ModeKind,
    /// Bare resonance frequency in GHz.
    pub bare_frequency: f64,
    /// Intrinsic dissipation rate kappa in GHz.
    pub intrinsic_loss: f64,
    /// External bath coupling rates gamma, keyed by bath label (GHz).
    pub bath_couplings: BTreeMap<String, f64>,
}

impl Mode {
    pub fn new(id: impl Into<String>, kind: ModeKind, bare_frequency: f64) -> Self {
        Mode {
            id: id.into(),
            kind,
            bare_frequency,
            intrinsic_loss: 0.0,
            bath_couplings: BTreeMap::new(),
        }
    }

    pub fn cavity(id: impl Into<String>, bare_frequency: f64) -> Self {
        Mode::new(id, ModeKind::Cavity, bare_frequency)
    }

    pub fn magnon(id: impl Into<String>, bare_frequency: f64) -> Self {
        Mode::new(id, ModeKind::Magnon, bare_frequency)
    }

    pub fn with_loss(mut self, kappa: f64) -> Self {
        self.intrinsic_loss = kappa;
        self
    }

    pub fn with_bath(mut self, label: impl Into<String>, gamma: f64) -> Self {
        self.bath_couplings.insert(label.into(), gamma);
        self
    }

    /// Bath rate for `label`, zero if the mode does not couple to it.
    pub fn bath_rate(&self, label: &str) -> f64 {
        self.bath_couplings.get(label).copied().unwrap_or(0.0)
    }

    fn validate(&self) -> Result<()> {
        if !self.bare_frequency.is_finite() || self.bare_frequency <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mode `{}`: bare frequency must be finite and > 0 (got {})",
                self.id, self.bare_frequency
            )));
        }
        if !self.intrinsic_loss.is_finite() || self.intrinsic_loss < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mode `{}`: intrinsic loss must be finite and >= 0 (got {})",
                self.id, self.intrinsic_loss
            )));
        }
        for (label, gamma) in &self.bath_couplings {
            if !gamma.is_finite() || *gamma < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "mode `{}`: bath `{}` rate must be finite and >= 0 (got {})",
                    self.id, label, gamma
                )));
            }
        }
        Ok(())
    }
}

/// A beam-splitter coupling `g e^{i phi} (from)(to)^+ + h.c` between two modes.
///
/// `from` is the cavity side in the physical setups considered here, but the
/// graph machinery treats it only as an orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub from: String,
    pub to: String,
    /// Coupling strength g >= 0 in GHz.
    pub strength: f64,
    /// Coupling phase phi in `[0, 2pi)` radians.
    pub phase: f64,
}

impl Coupling {
    /// Build a coupling, normalizing a negative strength to `(|g|, phi + pi)`
    /// and reducing the phase to `[0, 2pi)`.
    pub fn new(from: impl Into<String>, to: impl Into<String>, strength: f64, phase: f64) -> Self {
        let (strength, phase) = if strength < 0.0 {
            (-strength, phase + std::f64::consts::PI)
        } else {
            (strength, phase)
        };
        Coupling {
            from: from.into(),
            to: to.into(),
            strength,
            phase: normalize_phase(phase),
        }
    }

    /// Complex amplitude `g e^{i phi}` of the `(from)(to)^+` term.
    pub fn amplitude(&self) -> Complex64 {
        Complex64::from_polar(self.strength, self.phase)
    }

    /// Unordered endpoint pair, lexicographically sorted.
    pub fn pair(&self) -> (&str, &str) {
        if self.from <= self.to {
            (&self.from, &self.to)
        } else {
            (&self.to, &self.from)
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.strength.is_finite() || !self.phase.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupling `{}`-`{}`: non-finite strength or phase",
                self.from, self.to
            )));
        }
        Ok(())
    }
}

/// Modes plus phased couplings; the system's source of truth.
///
/// Mode order is insertion order and defines matrix indices (cavities first,
/// see [`build_hamiltonian`]). Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGraph {
    modes: Vec<Mode>,
    couplings: Vec<Coupling>,
}

impl CouplingGraph {
    /// Validate and assemble a graph.
    ///
    /// Rejects duplicate mode ids, dangling endpoints, self-couplings, more
    /// than one coupling per unordered pair, and non-finite numbers.
    pub fn new(modes: Vec<Mode>, couplings: Vec<Coupling>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for mode in &modes {
            mode.validate()?;
            if seen.insert(mode.id.clone(), ()).is_some() {
                return Err(Error::DuplicateMode(mode.id.clone()));
            }
        }
        let mut pairs = BTreeMap::new();
        for c in &couplings {
            c.validate()?;
            if !seen.contains_key(&c.from) {
                return Err(Error::UnknownMode(c.from.clone()));
            }
            if !seen.contains_key(&c.to) {
                return Err(Error::UnknownMode(c.to.clone()));
            }
            if c.from == c.to {
                return Err(Error::SelfCoupling(c.from.clone()));
            }
            let (a, b) = c.pair();
            if pairs.insert((a.to_string(), b.to_string()), ()).is_some() {
                return Err(Error::DuplicateCoupling(a.to_string(), b.to_string()));
            }
        }
        Ok(CouplingGraph { modes, couplings })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn mode(&self, id: &str) -> Option<&Mode> {
        self.modes.iter().find(|m| m.id == id)
    }

    pub fn contains_mode(&self, id: &str) -> bool {
        self.mode(id).is_some()
    }

    /// All bath labels present on any mode, sorted.
    pub fn bath_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = self
            .modes
            .iter()
            .flat_map(|m| m.bath_couplings.keys().cloned())
            .collect();
        labels.sort();
        labels.dedup();
        labels
    }

    /// Rebuild with a new coupling list over the same modes.
    pub(crate) fn with_couplings(&self, couplings: Vec<Coupling>) -> Self {
        CouplingGraph {
            modes: self.modes.clone(),
            couplings,
        }
    }
}

/// Parameters of the two-sphere / two-cavity-mode system.
///
/// Mean frequencies and half-splittings reconstruct the four bare frequencies
/// as `omega_{o,0} = omega_o - delta_o` and `omega_{o,1} = omega_o + delta_o`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Mean cavity frequency, GHz.
    pub omega_c: f64,
    /// Cavity half-splitting, GHz.
    pub delta_c: f64,
    /// Mean magnon frequency, GHz.
    pub omega_m: f64,
    /// Magnon half-splitting, GHz.
    pub delta_m: f64,
    /// Coupling of both magnons to cavity mode 0, GHz.
    pub g0: f64,
    /// Coupling of both magnons to cavity mode 1, GHz.
    pub g1: f64,
    /// Gauge-invariant loop phase, radians.
    pub theta: f64,
    /// Intrinsic dissipation of every mode, GHz.
    pub kappa: f64,
    /// Input-bath rates of the two cavity modes, GHz.
    pub gamma_a: [f64; 2],
    /// Output-bath rates of the two cavity modes, GHz.
    pub gamma_b: [f64; 2],
}

impl Default for SystemParams {
    /// Reference parameters of the hybrid two-sphere system:
    /// cavity modes at 4 and 6 GHz, both magnons at 5 GHz, g = 0.03 omega_c,
    /// gamma = 5 MHz on both ports, kappa = 1 MHz.
    fn default() -> Self {
        SystemParams {
            omega_c: 5.0,
            delta_c: 1.0,
            omega_m: 5.0,
            delta_m: 0.0,
            g0: 0.15,
            g1: 0.15,
            theta: 0.0,
            kappa: 0.001,
            gamma_a: [0.005, 0.005],
            gamma_b: [0.005, 0.005],
        }
    }
}

impl SystemParams {
    /// Bare cavity frequencies `[omega_c - delta_c, omega_c + delta_c]`.
    pub fn cavity_frequencies(&self) -> [f64; 2] {
        [self.omega_c - self.delta_c, self.omega_c + self.delta_c]
    }

    /// Bare magnon frequencies `[omega_m - delta_m, omega_m + delta_m]`.
    pub fn magnon_frequencies(&self) -> [f64; 2] {
        [self.omega_m - self.delta_m, self.omega_m + self.delta_m]
    }

    /// Complex coupling amplitudes `g_{kk'}` of cavity `k` to magnon `k'`:
    /// `g_{00} = g_{01} = g0`, `g_{10} = g1`, `g_{11} = g1 e^{i theta}`.
    pub fn coupling_amplitudes(&self) -> [[Complex64; 2]; 2] {
        let g0 = Complex64::new(self.g0, 0.0);
        let g1 = Complex64::new(self.g1, 0.0);
        [[g0, g0], [g1, g1 * Complex64::from_polar(1.0, self.theta)]]
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_c", self.omega_c),
            ("delta_c", self.delta_c),
            ("omega_m", self.omega_m),
            ("delta_m", self.delta_m),
            ("g0", self.g0),
            ("g1", self.g1),
            ("theta", self.theta),
            ("kappa", self.kappa),
            ("gamma_a0", self.gamma_a[0]),
            ("gamma_a1", self.gamma_a[1]),
            ("gamma_b0", self.gamma_b[0]),
            ("gamma_b1", self.gamma_b[1]),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite (got {value})"
                )));
            }
        }
        if self.g0 < 0.0 || self.g1 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "coupling strengths must be >= 0 (got g0 = {}, g1 = {})",
                self.g0, self.g1
            )));
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "kappa must be >= 0 (got {})",
                self.kappa
            )));
        }
        for (name, g) in [("gamma_a", self.gamma_a), ("gamma_b", self.gamma_b)] {
            if g[0] < 0.0 || g[1] < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} rates must be >= 0 (got {:?})",
                    g
                )));
            }
        }
        for (name, f) in [
            ("cavity mode 0", self.omega_c - self.delta_c),
            ("cavity mode 1", self.omega_c + self.delta_c),
            ("magnon mode 0", self.omega_m - self.delta_m),
            ("magnon mode 1", self.omega_m + self.delta_m),
        ] {
            if f <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} bare frequency must be > 0 (got {f})"
                )));
            }
        }
        Ok(())
    }
}

/// Build the two-cavity-mode / two-magnon graph with the loop phase folded
/// onto the `(c1, m1)` edge: strengths `(g0, g0, g1, g1)`, phases `(0, 0, 0, theta)`.
pub fn two_sphere_system(params: &SystemParams) -> Result<CouplingGraph> {
    params.validate()?;
    let [wc0, wc1] = params.cavity_frequencies();
    let [wm0, wm1] = params.magnon_frequencies();
    let modes = vec![
        Mode::cavity("c0", wc0)
            .with_loss(params.kappa)
            .with_bath("a", params.gamma_a[0])
            .with_bath("b", params.gamma_b[0]),
        Mode::cavity("c1", wc1)
            .with_loss(params.kappa)
            .with_bath("a", params.gamma_a[1])
            .with_bath("b", params.gamma_b[1]),
        Mode::magnon("m0", wm0).with_loss(params.kappa),
        Mode::magnon("m1", wm1).with_loss(params.kappa),
    ];
    let couplings = vec![
        Coupling::new("c0", "m0", params.g0, 0.0),
        Coupling::new("c0", "m1", params.g0, 0.0),
        Coupling::new("c1", "m0", params.g1, 0.0),
        Coupling::new("c1", "m1", params.g1, params.theta),
    ];
    CouplingGraph::new(modes, couplings)
}

/// N x N complex Hermitian matrix in GHz plus its mode-index map.
///
/// Hermiticity holds bit-exactly by construction: entry `(to, from)` is the
/// coupling amplitude `g e^{i phi}` and `(from, to)` its conjugate; diagonal
/// entries are the real bare frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    entries: DMatrix<Complex64>,
    ids: Vec<String>,
    kinds: Vec<ModeKind>,
}

impl HamiltonianMatrix {
    /// Wrap an existing matrix, verifying Hermiticity to 1e-12.
    pub fn from_parts(
        entries: DMatrix<Complex64>,
        ids: Vec<String>,
        kinds: Vec<ModeKind>,
    ) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n || ids.len() != n || kinds.len() != n {
            return Err(Error::InvalidParameter(
                "matrix, id, and kind dimensions disagree".into(),
            ));
        }
        let h = HamiltonianMatrix {
            entries,
            ids,
            kinds,
        };
        let asym = h.max_asymmetry();
        if asym > 1e-12 {
            return Err(Error::NonHermitian(asym));
        }
        Ok(h)
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn kinds(&self) -> &[ModeKind] {
        &self.kinds
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// Entry by mode ids; panics on unknown ids (use [`Self::index_of`] to probe).
    pub fn entry(&self, row_id: &str, col_id: &str) -> Complex64 {
        let i = self.index_of(row_id).expect("unknown row id");
        let j = self.index_of(col_id).expect("unknown col id");
        self.entries[(i, j)]
    }

    /// Indices of the cavity modes, in matrix order.
    pub fn cavity_indices(&self) -> Vec<usize> {
        self.kinds
            .iter()
            .enumerate()
            .filter(|(_, k)| **k == ModeKind::Cavity)
            .map(|(i, _)| i)
            .collect()
    }

    /// Largest `|A_ij - conj(A_ji)|` over all entries.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let d = (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Assemble the Hermitian Hamiltonian matrix of a coupling graph.
///
/// Mode indices put cavities first (in insertion order), then magnons, so the
/// two-sphere system reproduces the basis vector `(c0, c1, m0, m1)^t`. Each
/// coupling writes `A[to][from] = g e^{i phi}` and the conjugate across the
/// diagonal.
pub fn build_hamiltonian(graph: &CouplingGraph) -> Result<HamiltonianMatrix> {
    // Re-validate so graphs assembled by hand fail loudly here.
    let graph = CouplingGraph::new(graph.modes.clone(), graph.couplings.clone())?;

    let mut order: Vec<usize> = Vec::with_capacity(graph.modes.len());
    for kind in [ModeKind::Cavity, ModeKind::Magnon] {
        order.extend(
            graph
                .modes
                .iter()
                .enumerate()
                .filter(|(_, m)| m.kind == kind)
                .map(|(i, _)| i),
        );
    }

    let n = order.len();
    let ids: Vec<String> = order.iter().map(|&i| graph.modes[i].id.clone()).collect();
    let kinds: Vec<ModeKind> = order.iter().map(|&i| graph.modes[i].kind).collect();
    let index_of = |id: &str| -> usize { ids.iter().position(|x| x == id).unwrap() };

    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (slot, &i) in order.iter().enumerate() {
        entries[(slot, slot)] = Complex64::new(graph.modes[i].bare_frequency, 0.0);
    }
    for c in &graph.couplings {
        let from = index_of(&c.from);
        let to = index_of(&c.to);
        let amp = c.amplitude();
        entries[(to, from)] = amp;
        entries[(from, to)] = amp.conj();
    }

    Ok(HamiltonianMatrix {
        entries,
        ids,
        kinds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn amp(g: f64, phi: f64) -> Complex64 {
        Complex64::from_polar(g, phi)
    }

    /// Dumb independent assembly: scan every ordered index pair and search the
    /// coupling list, without the cavity-first ordering machinery.
    fn brute_force_matrix(graph: &CouplingGraph, ids: &[String]) -> DMatrix<Complex64> {
        let n = ids.len();
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (i, id_i) in ids.iter().enumerate() {
            m[(i, i)] = Complex64::new(graph.mode(id_i).unwrap().bare_frequency, 0.0);
            for (j, id_j) in ids.iter().enumerate() {
                if i == j {
                    continue;
                }
                for c in graph.couplings() {
                    // term g e^{i phi} (from)(to)^+ lands at row `to`, col `from`
                    if c.to == *id_i && c.from == *id_j {
                        m[(i, j)] = amp(c.strength, c.phase);
                    } else if c.from == *id_i && c.to == *id_j {
                        m[(i, j)] = amp(c.strength, c.phase).conj();
                    }
                }
            }
        }
        m
    }

    #[test]
    fn two_sphere_bare_frequencies_and_phases() {
        let params = SystemParams {
            theta: 0.0,
            ..SystemParams::default()
        };
        let graph = two_sphere_system(&params).unwrap();
        let freqs: Vec<f64> = graph.modes().iter().map(|m| m.bare_frequency).collect();
        assert_eq!(freqs, vec![4.0, 6.0, 5.0, 5.0]);
        assert_eq!(graph.couplings().len(), 4);
        assert!(graph.couplings().iter().all(|c| c.phase == 0.0));
    }

    #[test]
    fn two_sphere_theta_pi_lands_on_c1_m1_edge() {
        let params = SystemParams {
            theta: PI,
            ..SystemParams::default()
        };
        let graph = two_sphere_system(&params).unwrap();
        for c in graph.couplings() {
            let expect = if c.from == "c1" && c.to == "m1" {
                PI
            } else {
                0.0
            };
            assert_eq!(c.phase, expect, "edge {}-{}", c.from, c.to);
        }
    }

    #[test]
    fn two_sphere_decoupled_limit_keeps_four_zero_edges() {
        let params = SystemParams {
            g0: 0.0,
            g1: 0.0,
            ..SystemParams::default()
        };
        let graph = two_sphere_system(&params).unwrap();
        assert_eq!(graph.modes().len(), 4);
        assert_eq!(graph.couplings().len(), 4);
        assert!(graph.couplings().iter().all(|c| c.strength == 0.0));
    }

    #[test]
    fn two_sphere_rejects_negative_strength_and_nonfinite() {
        let bad_g = SystemParams {
            g0: -0.1,
            ..SystemParams::default()
        };
        assert!(two_sphere_system(&bad_g).is_err());
        let bad_w = SystemParams {
            omega_c: f64::NAN,
            ..SystemParams::default()
        };
        assert!(two_sphere_system(&bad_w).is_err());
    }

    #[test]
    fn hamiltonian_matches_matrix_of_the_two_sphere_system() {
        // omega_c = 5, delta_c = 1, omega_m = 5, delta_m = 0, g = 0.15, theta = pi
        let params = SystemParams {
            theta: PI,
            ..SystemParams::default()
        };
        let h = build_hamiltonian(&two_sphere_system(&params).unwrap()).unwrap();
        assert_eq!(h.ids(), ["c0", "c1", "m0", "m1"]);

        let g = 0.15;
        let expect = [
            [amp(4.0, 0.0), amp(0.0, 0.0), amp(g, 0.0), amp(g, 0.0)],
            [amp(0.0, 0.0), amp(6.0, 0.0), amp(g, 0.0), amp(g, -PI)],
            [amp(g, 0.0), amp(g, 0.0), amp(5.0, 0.0), amp(0.0, 0.0)],
            [amp(g, 0.0), amp(g, PI), amp(0.0, 0.0), amp(5.0, 0.0)],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(h.entries()[(i, j)].re, expect[i][j].re, epsilon = 1e-15);
                assert_abs_diff_eq!(h.entries()[(i, j)].im, expect[i][j].im, epsilon = 1e-15);
            }
        }
        // A[c1][m1] = g1 e^{-i theta}
        let e = h.entry("c1", "m1");
        assert_abs_diff_eq!(e.re, (amp(g, PI).conj()).re, epsilon = 1e-15);
        assert_abs_diff_eq!(e.im, (amp(g, PI).conj()).im, epsilon = 1e-15);
    }

    #[test]
    fn zero_couplings_give_a_diagonal_matrix() {
        let params = SystemParams {
            g0: 0.0,
            g1: 0.0,
            ..SystemParams::default()
        };
        let h = build_hamiltonian(&two_sphere_system(&params).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(h.entries()[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn builder_agrees_with_brute_force_assembly_exactly() {
        // a 5-mode graph with mixed orientations and a cycle
        let modes = vec![
            Mode::cavity("ca", 4.5),
            Mode::magnon("mb", 5.2),
            Mode::cavity("cc", 6.1),
            Mode::magnon("md", 5.0),
            Mode::magnon("me", 4.9),
        ];
        let couplings = vec![
            Coupling::new("ca", "mb", 0.11, 0.3),
            Coupling::new("cc", "mb", 0.07, 5.9),
            Coupling::new("ca", "md", 0.05, 2.2),
            Coupling::new("cc", "md", 0.02, 1.1),
            Coupling::new("me", "cc", 0.09, 4.0), // magnon listed as `from`
        ];
        let graph = CouplingGraph::new(modes, couplings).unwrap();
        let h = build_hamiltonian(&graph).unwrap();
        let brute = brute_force_matrix(&graph, h.ids());
        assert_eq!(h.entries(), &brute);
        assert_eq!(h.max_asymmetry(), 0.0);
    }

    #[test]
    fn hermiticity_is_bit_exact_and_scaling_is_linear() {
        let params = SystemParams {
            theta: 1.234,
            ..SystemParams::default()
        };
        let h1 = build_hamiltonian(&two_sphere_system(&params).unwrap()).unwrap();
        assert_eq!(h1.max_asymmetry(), 0.0);

        let scaled = SystemParams {
            g0: params.g0 * 3.0,
            g1: params.g1 * 3.0,
            ..params
        };
        let h3 = build_hamiltonian(&two_sphere_system(&scaled).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let got = h3.entries()[(i, j)];
                    let want = h1.entries()[(i, j)] * 3.0;
                    assert_abs_diff_eq!(got.re, want.re, epsilon = 1e-15);
                    assert_abs_diff_eq!(got.im, want.im, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn duplicate_and_dangling_edges_are_rejected() {
        let modes = vec![Mode::cavity("c", 5.0), Mode::magnon("m", 5.0)];
        let dup = vec![
            Coupling::new("c", "m", 0.1, 0.0),
            Coupling::new("m", "c", 0.2, 0.0),
        ];
        assert!(matches!(
            CouplingGraph::new(modes.clone(), dup),
            Err(Error::DuplicateCoupling(_, _))
        ));
        let dangling = vec![Coupling::new("c", "nope", 0.1, 0.0)];
        assert!(matches!(
            CouplingGraph::new(modes.clone(), dangling),
            Err(Error::UnknownMode(_))
        ));
        let selfc = vec![Coupling::new("c", "c", 0.1, 0.0)];
        assert!(matches!(
            CouplingGraph::new(modes, selfc),
            Err(Error::SelfCoupling(_))
        ));
    }

    #[test]
    fn negative_strength_normalizes_to_phase_plus_pi() {
        let c = Coupling::new("c", "m", -0.2, 0.5);
        assert_eq!(c.strength, 0.2);
        assert_abs_diff_eq!(c.phase, 0.5 + PI, epsilon = 1e-15);
    }

    #[test]
    fn phases_normalize_into_canonical_branch() {
        assert_eq!(normalize_phase(TAU), 0.0);
        assert_eq!(normalize_phase(-1e-15), 0.0);
        assert_eq!(normalize_phase(TAU - 1e-15), 0.0);
        assert_abs_diff_eq!(normalize_phase(-PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(normalize_phase(3.0 * PI), PI, epsilon = 1e-12);
    }

    #[test]
    fn random_draws_reproduce_reference_matrix_entry_for_entry() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..100 {
            let params = SystemParams {
                omega_c: rng.random_range(4.0..6.0),
                delta_c: rng.random_range(0.2..1.5),
                omega_m: rng.random_range(4.0..6.0),
                delta_m: rng.random_range(0.0..0.4),
                g0: rng.random_range(0.0..0.3),
                g1: rng.random_range(0.0..0.3),
                theta: rng.random_range(0.0..TAU),
                ..SystemParams::default()
            };
            let h = build_hamiltonian(&two_sphere_system(&params).unwrap()).unwrap();
            let [wc0, wc1] = params.cavity_frequencies();
            let [wm0, wm1] = params.magnon_frequencies();
            let g = params.coupling_amplitudes();
            // rows/cols in (c0, c1, m0, m1) order; A[m k'][c k] = g_{kk'}
            let expect = [
                [
                    Complex64::new(wc0, 0.0),
                    Complex64::new(0.0, 0.0),
                    g[0][0].conj(),
                    g[0][1].conj(),
                ],
                [
                    Complex64::new(0.0, 0.0),
                    Complex64::new(wc1, 0.0),
                    g[1][0].conj(),
                    g[1][1].conj(),
                ],
                [
                    g[0][0],
                    g[1][0],
                    Complex64::new(wm0, 0.0),
                    Complex64::new(0.0, 0.0),
                ],
                [
                    g[0][1],
                    g[1][1],
                    Complex64::new(0.0, 0.0),
                    Complex64::new(wm1, 0.0),
                ],
            ];
            for i in 0..4 {
                for j in 0..4 {
                    let got = h.entries()[(i, j)];
                    assert_abs_diff_eq!(got.re, expect[i][j].re, epsilon = 1e-14);
                    assert_abs_diff_eq!(got.im, expect[i][j].im, epsilon = 1e-14);
                }
            }
        }
    }
}
