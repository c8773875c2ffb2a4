//! Dispersive-regime effective Hamiltonian from first-order Schrieffer-Wolff
//! perturbation theory: shifted resonances, virtual-photon-mediated
//! magnon-magnon coupling, and virtual-magnon-mediated photon-photon coupling.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Detunings below this are treated as exact singularities of the expansion.
const DETUNING_TOL: f64 = 1e-12;

/// First-order effective Hamiltonian of the two-sphere system after
/// decoupling light and matter. All entries in GHz.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    /// Shifted cavity resonances `omega'_{c,k}`.
    pub shifted_cavity: [f64; 2],
    /// Shifted magnon resonances `omega'_{m,k}`.
    pub shifted_magnon: [f64; 2],
    /// Photon-photon couplings `kappa_{kk'}` (diagonal entries zero).
    pub photon_photon: [[Complex64; 2]; 2],
    /// Magnon-magnon couplings `G_{kk'}` (diagonal entries zero).
    pub magnon_magnon: [[Complex64; 2]; 2],
    /// Detunings `Delta_{kk'} = omega_{m,k'} - omega_{c,k}`.
    pub detunings: [[f64; 2]; 2],
    /// Small parameters `lambda_{kk'} = g_{kk'} / Delta_{kk'}`.
    pub small_parameters: [[Complex64; 2]; 2],
}

impl EffectiveHamiltonian {
    /// Total magnon exchange amplitude `G_theta = G_01 + conj(G_10)`, the
    /// coefficient of `m_0 m_1^+` after collecting Hermitian pairs.
    pub fn magnon_coupling(&self) -> Complex64 {
        self.magnon_magnon[0][1] + self.magnon_magnon[1][0].conj()
    }

    /// The 2x2 effective magnon block in the `(m0, m1)` basis.
    pub fn magnon_block(&self) -> Matrix2<Complex64> {
        let g = self.magnon_coupling();
        Matrix2::new(
            Complex64::new(self.shifted_magnon[0], 0.0),
            g.conj(),
            g,
            Complex64::new(self.shifted_magnon[1], 0.0),
        )
    }

    /// Eigenfrequencies of the effective magnon block, ascending.
    pub fn magnon_eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.shifted_magnon[0] + self.shifted_magnon[1]);
        let half = 0.5 * (self.shifted_magnon[0] - self.shifted_magnon[1]);
        let r = (half * half + self.magnon_coupling().norm_sqr()).sqrt();
        [mean - r, mean + r]
    }
}

/// Dispersive validity report: the largest `|lambda_{kk'}|`, or a flag when a
/// detuning vanishes and the expansion has no meaning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValidityMargin {
    /// `max |g_{kk'} / Delta_{kk'}|`; predictions are trustworthy below ~0.1.
    Finite(f64),
    /// Some `Delta_{kk'} = 0`.
    Singular { cavity: usize, magnon: usize },
}

fn detunings(params: &SystemParams) -> [[f64; 2]; 2] {
    let wc = params.cavity_frequencies();
    let wm = params.magnon_frequencies();
    let mut d = [[0.0; 2]; 2];
    for k in 0..2 {
        for kp in 0..2 {
            d[k][kp] = wm[kp] - wc[k];
        }
    }
    d
}

/// Evaluate the full first-order effective Hamiltonian.
///
/// Fails with the offending `(cavity, magnon)` pair if any detuning vanishes;
/// singularities are never returned as non-finite numbers.
pub fn effective_hamiltonian(params: &SystemParams) -> Result<EffectiveHamiltonian> {
    params.validate()?;
    let delta = detunings(params);
    for k in 0..2 {
        for kp in 0..2 {
            if delta[k][kp].abs() < DETUNING_TOL {
                return Err(Error::ZeroDetuning {
                    cavity: k,
                    magnon: kp,
                });
            }
        }
    }
    let g = params.coupling_amplitudes();
    let wc = params.cavity_frequencies();
    let wm = params.magnon_frequencies();

    let mut shifted_cavity = [0.0; 2];
    let mut shifted_magnon = [0.0; 2];
    for k in 0..2 {
        shifted_cavity[k] = wc[k]
            - (0..2)
                .map(|kp| g[k][kp].norm_sqr() / delta[k][kp])
                .sum::<f64>();
        shifted_magnon[k] = wm[k]
            + (0..2)
                .map(|kp| g[kp][k].norm_sqr() / delta[kp][k])
                .sum::<f64>();
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut photon_photon = [[zero; 2]; 2];
    let mut magnon_magnon = [[zero; 2]; 2];
    let mut small_parameters = [[zero; 2]; 2];
    for k in 0..2 {
        for kp in 0..2 {
            small_parameters[k][kp] = g[k][kp] / delta[k][kp];
            if k != kp {
                photon_photon[k][kp] = -(0..2)
                    .map(|l| g[k][l] * g[kp][l].conj() / (2.0 * delta[k][l]))
                    .sum::<Complex64>();
                magnon_magnon[k][kp] = (0..2)
                    .map(|l| g[l][kp] * g[l][k].conj() / (2.0 * delta[l][kp]))
                    .sum::<Complex64>();
            }
        }
    }

    Ok(EffectiveHamiltonian {
        shifted_cavity,
        shifted_magnon,
        photon_photon,
        magnon_magnon,
        detunings: delta,
        small_parameters,
    })
}

/// Closed-form cavity-mediated magnon-magnon coupling at `omega_m = omega_c`:
/// `G_theta = delta_c (g0^2 - e^{i theta} g1^2) / (delta_c^2 - delta_m^2)`.
///
/// The interference is destructive for `theta = 0` (vanishing exactly when
/// `g0 = g1`) and constructive for `theta = pi`.
pub fn magnon_magnon_coupling(params: &SystemParams) -> Result<Complex64> {
    params.validate()?;
    let mismatch = params.omega_m - params.omega_c;
    if mismatch.abs() > 1e-9 {
        return Err(Error::DetuningCondition(mismatch));
    }
    let denom = params.delta_c * params.delta_c - params.delta_m * params.delta_m;
    if denom.abs() < DETUNING_TOL {
        // |delta_c| = |delta_m| puts a cavity-magnon pair on resonance
        let (k, kp) =
            if (params.delta_c - params.delta_m).abs() < (params.delta_c + params.delta_m).abs() {
                (0, 0)
            } else {
                (0, 1)
            };
        return Err(Error::ZeroDetuning {
            cavity: k,
            magnon: kp,
        });
    }
    let g0sq = Complex64::new(params.g0 * params.g0, 0.0);
    let g1sq = Complex64::new(params.g1 * params.g1, 0.0);
    Ok((g0sq - Complex64::from_polar(1.0, params.theta) * g1sq) * (params.delta_c / denom))
}

/// Largest dispersive small parameter, or a singular flag on zero detuning.
pub fn validity_margin(params: &SystemParams) -> ValidityMargin {
    let delta = detunings(params);
    let g = params.coupling_amplitudes();
    let mut worst = 0.0_f64;
    for k in 0..2 {
        for kp in 0..2 {
            if delta[k][kp].abs() < DETUNING_TOL {
                if g[k][kp].norm() > 0.0 || delta[k][kp].abs() == 0.0 {
                    return ValidityMargin::Singular {
                        cavity: k,
                        magnon: kp,
                    };
                }
            } else {
                worst = worst.max(g[k][kp].norm() / delta[k][kp].abs());
            }
        }
    }
    ValidityMargin::Finite(worst)
}
