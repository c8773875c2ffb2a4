//! Microwave transmission from input-output theory.
//!
//! Two routes compute the same S21: a closed form for the two-cavity /
//! two-magnon system (magnons eliminated analytically) and a general dense
//! frequency-domain solver for arbitrary coupling graphs. Intrinsic loss
//! enters through the substitution `omega_k -> omega_k - i kappa`; each bath
//! `o` damps the modes it touches by `(i/2) sqrt(gamma_{o,k} gamma_{o,k'})`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, CouplingGraph, SystemParams};
use crate::spectrum::SweepSpec;

/// Probe frequencies crossed with a parameter sweep.
#[derive(Debug, Clone)]
pub struct ProbeGrid {
    /// Probe frequencies in GHz, strictly increasing.
    pub probe_ghz: Vec<f64>,
    pub sweep: SweepSpec,
}

impl ProbeGrid {
    pub fn new(probe_ghz: Vec<f64>, sweep: SweepSpec) -> Result<Self> {
        sweep.validate()?;
        if probe_ghz.is_empty() {
            return Err(Error::InvalidParameter("probe grid is empty".into()));
        }
        if probe_ghz.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "probe frequencies must be strictly increasing".into(),
            ));
        }
        if probe_ghz.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "probe frequencies must be finite".into(),
            ));
        }
        Ok(ProbeGrid { probe_ghz, sweep })
    }

    /// Uniform probe from `start` to `stop` with `steps` points.
    pub fn uniform(start: f64, stop: f64, steps: usize, sweep: SweepSpec) -> Result<Self> {
        if steps < 2 || !start.is_finite() || !stop.is_finite() || start >= stop {
            return Err(Error::InvalidParameter(format!(
                "probe range needs start < stop and >= 2 steps (got {start}..{stop} x{steps})"
            )));
        }
        let probe = (0..steps)
            .map(|i| start + (stop - start) * (i as f64) / ((steps - 1) as f64))
            .collect();
        ProbeGrid::new(probe, sweep)
    }
}

/// Complex S21 over a (sweep step, probe step) grid, with the generating
/// parameters kept as metadata.
#[derive(Debug, Clone)]
pub struct TransmissionTrace {
    pub params: SystemParams,
    pub sweep_values: Vec<f64>,
    pub probe_ghz: Vec<f64>,
    /// Row `i` holds S21 along the probe axis at sweep step `i`.
    pub s21: Vec<Vec<Complex64>>,
}

impl TransmissionTrace {
    pub fn magnitude(&self, row: usize, col: usize) -> f64 {
        self.s21[row][col].norm()
    }
}

fn total_loss(params: &SystemParams) -> f64 {
    params.kappa + params.gamma_a.iter().sum::<f64>() + params.gamma_b.iter().sum::<f64>()
}

/// Closed-form S21 of the two-sphere system at one probe frequency.
///
/// Eliminates the magnon amplitudes analytically and solves the remaining
/// 2x2 cavity system; the bath-dressed coefficients generalize to complex
/// coupling amplitudes by conjugating the row index, which reduces to the
/// real-coupling expressions at `theta` equal to 0 or pi.
pub fn s21_closed_form(params: &SystemParams, probe_ghz: f64) -> Result<Complex64> {
    params.validate()?;
    if !probe_ghz.is_finite() {
        return Err(Error::InvalidParameter(
            "probe frequency must be finite".into(),
        ));
    }
    if total_loss(params) <= 0.0 {
        return Err(Error::InvalidParameter(
            "transmission needs kappa > 0 or some gamma > 0".into(),
        ));
    }

    let i = Complex64::new(0.0, 1.0);
    let kappa = Complex64::new(0.0, params.kappa);
    let wc = params.cavity_frequencies();
    let wm = params.magnon_frequencies();
    // omega_k -> omega_k - i kappa on every mode
    let dc = [
        Complex64::new(probe_ghz - wc[0], 0.0) + kappa,
        Complex64::new(probe_ghz - wc[1], 0.0) + kappa,
    ];
    let dm = [
        Complex64::new(probe_ghz - wm[0], 0.0) + kappa,
        Complex64::new(probe_ghz - wm[1], 0.0) + kappa,
    ];
    let dm_prod = dm[0] * dm[1];
    let g = params.coupling_amplitudes();
    let ga = params.gamma_a;
    let gb = params.gamma_b;

    let a_coeff = |k: usize| -> Complex64 {
        (dc[k] + i * 0.5 * (ga[k] + gb[k])) * dm_prod
            - g[k][0].norm_sqr() * dm[1]
            - g[k][1].norm_sqr() * dm[0]
    };
    let b_coeff = |k: usize, l: usize| -> Complex64 {
        i * 0.5 * ((ga[k] * ga[l]).sqrt() + (gb[k] * gb[l]).sqrt()) * dm_prod
            - g[k][0].conj() * g[l][0] * dm[1]
            - g[k][1].conj() * g[l][1] * dm[0]
    };
    let o_in = |k: usize| -> Complex64 { i * ga[k].sqrt() * dm_prod };

    let a0 = a_coeff(0);
    let a1 = a_coeff(1);
    let b01 = b_coeff(0, 1);
    let b10 = b_coeff(1, 0);
    let denom = b10 * b01 - a0 * a1;
    if denom.norm() < 1e-300 {
        return Err(Error::SingularResponse { probe_ghz });
    }
    let s21 = gb[0].sqrt() * (o_in(0) * a1 - o_in(1) * b01) / denom
        - gb[1].sqrt() * (o_in(0) * b10 - o_in(1) * a0) / denom;
    if !(s21.re.is_finite() && s21.im.is_finite()) {
        return Err(Error::SingularResponse { probe_ghz });
    }
    Ok(s21)
}

/// General frequency-domain S21 through an arbitrary coupling graph.
///
/// Builds the response matrix `M(omega)` with
/// `M_kk = omega - omega_k + i kappa_k + (i/2) sum_o gamma_{o,k}` and
/// `M_kl = -A_kl + (i/2) sum_o sqrt(gamma_{o,k} gamma_{o,l})`, solves
/// `M v = -i K_in`, and returns `sum_k sqrt(gamma_{out,k}) v_k`. Agrees with
/// [`s21_closed_form`] on the two-sphere system.
pub fn s21_general(
    graph: &CouplingGraph,
    bath_in: &str,
    bath_out: &str,
    probe_ghz: f64,
) -> Result<Complex64> {
    if !probe_ghz.is_finite() {
        return Err(Error::InvalidParameter(
            "probe frequency must be finite".into(),
        ));
    }
    for label in [bath_in, bath_out] {
        let coupled = graph.modes().iter().any(|m| m.bath_rate(label) > 0.0);
        if !coupled {
            return Err(Error::UnknownBath(label.to_string()));
        }
    }
    let loss: f64 = graph
        .modes()
        .iter()
        .map(|m| m.intrinsic_loss + m.bath_couplings.values().sum::<f64>())
        .sum();
    if loss <= 0.0 {
        return Err(Error::InvalidParameter(
            "transmission needs some intrinsic or bath loss".into(),
        ));
    }

    let h = build_hamiltonian(graph)?;
    let n = h.n();
    let labels = graph.bath_labels();
    let modes: Vec<&crate::model::Mode> = h
        .ids()
        .iter()
        .map(|id| graph.mode(id).expect("hamiltonian ids come from the graph"))
        .collect();

    let i = Complex64::new(0.0, 1.0);
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for k in 0..n {
        for l in 0..n {
            if k == l {
                let damping: f64 = labels.iter().map(|o| modes[k].bath_rate(o)).sum();
                m[(k, k)] = Complex64::new(probe_ghz - h.entries()[(k, k)].re, 0.0)
                    + i * modes[k].intrinsic_loss
                    + i * 0.5 * damping;
            } else {
                let cross: f64 = labels
                    .iter()
                    .map(|o| (modes[k].bath_rate(o) * modes[l].bath_rate(o)).sqrt())
                    .sum();
                m[(k, l)] = -h.entries()[(k, l)] + i * 0.5 * cross;
            }
        }
    }
    let k_in = DVector::from_iterator(
        n,
        modes
            .iter()
            .map(|mode| Complex64::new(mode.bath_rate(bath_in).sqrt(), 0.0)),
    );
    let rhs = k_in * (-i);
    let v = m
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularResponse { probe_ghz })?;
    let s21: Complex64 = modes
        .iter()
        .zip(v.iter())
        .map(|(mode, amp)| mode.bath_rate(bath_out).sqrt() * amp)
        .sum();
    if !(s21.re.is_finite() && s21.im.is_finite()) {
        return Err(Error::SingularResponse { probe_ghz });
    }
    Ok(s21)
}

/// Dense S21 map over a probe-frequency x sweep-parameter grid.
///
/// Every point is an independent closed-form evaluation; failures carry their
/// (row, col) position.
pub fn transmission_map(params: &SystemParams, grid: &ProbeGrid) -> Result<TransmissionTrace> {
    params.validate()?;
    let sweep_values = grid.sweep.values();
    let mut s21 = Vec::with_capacity(sweep_values.len());
    for (row, _) in sweep_values.iter().enumerate() {
        let p = grid.sweep.apply(params, row);
        let mut line = Vec::with_capacity(grid.probe_ghz.len());
        for (col, &probe) in grid.probe_ghz.iter().enumerate() {
            let value = s21_closed_form(&p, probe).map_err(|e| Error::MapPoint {
                row,
                col,
                source: Box::new(e),
            })?;
            line.push(value);
        }
        s21.push(line);
    }
    Ok(TransmissionTrace {
        params: params.clone(),
        sweep_values,
        probe_ghz: grid.probe_ghz.clone(),
        s21,
    })
}
