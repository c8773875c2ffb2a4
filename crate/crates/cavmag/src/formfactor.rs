//! Form factor, coupling phase, and coupling strength from discretized cavity
//! magnetic-field maps.
//!
//! Field maps are unstructured point clouds with per-cell volumes, so every
//! integral is a cell-centered Riemann sum with the measure carried by
//! `cell_volume`. The transverse integral `H~ = int H.x + i int H.y` over the
//! sample volume sets both the form factor `eta = |H~| / sqrt(V_m int |H|^2)`
//! and the coupling phase `phi = arg H~`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::normalize_phase;

/// One grid point of an exported cavity field solution. Positions in meters,
/// field components complex phasors in any consistent amplitude unit,
/// `cell_volume` in cubic meters.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPoint {
    pub position: [f64; 3],
    pub h: [Complex64; 3],
    pub cell_volume: f64,
}

/// Discretized cavity magnetic mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    points: Vec<FieldPoint>,
}

impl FieldMap {
    /// Validate and wrap a point cloud: positive cell volumes, finite values,
    /// and at least one point with a nonzero field.
    pub fn new(points: Vec<FieldPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("field map has no points".into()));
        }
        let mut any_field = false;
        for (i, p) in points.iter().enumerate() {
            if !(p.cell_volume.is_finite() && p.cell_volume > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "point {i}: cell volume must be finite and > 0 (got {})",
                    p.cell_volume
                )));
            }
            let finite = p.position.iter().all(|x| x.is_finite())
                && p.h.iter().all(|z| z.re.is_finite() && z.im.is_finite());
            if !finite {
                return Err(Error::InvalidParameter(format!(
                    "point {i}: non-finite position or field"
                )));
            }
            any_field |= p.h.iter().any(|z| z.norm_sqr() > 0.0);
        }
        if !any_field {
            return Err(Error::ZeroFieldEnergy);
        }
        Ok(FieldMap { points })
    }

    pub fn points(&self) -> &[FieldPoint] {
        &self.points
    }

    /// Total discretized cavity volume.
    pub fn total_volume(&self) -> f64 {
        self.points.iter().map(|p| p.cell_volume).sum()
    }

    /// `int |H|^2` over the whole map.
    pub fn field_energy(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.h.iter().map(|z| z.norm_sqr()).sum::<f64>() * p.cell_volume)
            .sum()
    }

    /// Parse the field CSV format
    /// `x_m,y_m,z_m,re_hx,im_hx,re_hy,im_hy,re_hz,im_hz,cell_volume_m3`.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, line)) if line.trim().is_empty() || line.starts_with('#') => continue,
                Some((n, line)) => break (n, line),
                None => {
                    return Err(Error::FieldCsv {
                        line: 0,
                        message: "empty file".into(),
                    })
                }
            }
        };
        let expected = FIELD_CSV_HEADER;
        if header.1.trim() != expected {
            return Err(Error::FieldCsv {
                line: header.0 + 1,
                message: format!("expected header `{expected}`"),
            });
        }
        let mut points = Vec::new();
        for (n, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 10 {
                return Err(Error::FieldCsv {
                    line: n + 1,
                    message: format!("expected 10 columns, found {}", fields.len()),
                });
            }
            let mut v = [0.0_f64; 10];
            for (i, f) in fields.iter().enumerate() {
                v[i] = f.trim().parse().map_err(|_| Error::FieldCsv {
                    line: n + 1,
                    message: format!("bad float `{f}`"),
                })?;
            }
            points.push(FieldPoint {
                position: [v[0], v[1], v[2]],
                h: [
                    Complex64::new(v[3], v[4]),
                    Complex64::new(v[5], v[6]),
                    Complex64::new(v[7], v[8]),
                ],
                cell_volume: v[9],
            });
        }
        FieldMap::new(points)
    }

    /// Serialize to the field CSV format with `%.12e` floats and LF endings.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(self.points.len() * 160);
        out.push_str(FIELD_CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let cols = [
                p.position[0],
                p.position[1],
                p.position[2],
                p.h[0].re,
                p.h[0].im,
                p.h[1].re,
                p.h[1].im,
                p.h[2].re,
                p.h[2].im,
                p.cell_volume,
            ];
            let row: Vec<String> = cols.iter().map(|&x| crate::fmt_e12(x)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub const FIELD_CSV_HEADER: &str = "x_m,y_m,z_m,re_hx,im_hx,re_hy,im_hy,re_hz,im_hz,cell_volume_m3";

/// Spherical sample region (a YIG sphere). Membership is by cell center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRegion {
    pub center: [f64; 3],
    pub radius: f64,
}

impl SampleRegion {
    pub fn new(center: [f64; 3], radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) || center.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample region needs finite center and radius > 0 (got {center:?}, r = {radius})"
            )));
        }
        Ok(SampleRegion { center, radius })
    }

    pub fn contains(&self, position: [f64; 3]) -> bool {
        let d2: f64 = position
            .iter()
            .zip(&self.center)
            .map(|(p, c)| (p - c) * (p - c))
            .sum();
        d2 <= self.radius * self.radius
    }
}

/// Material constants entering the coupling strength. Defaults are YIG.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialConstants {
    /// Spin density n_s in m^-3.
    pub spin_density: f64,
    /// mu / (g_L mu_B), dimensionless (5/2 for YIG).
    pub moment_ratio: f64,
    /// Gyromagnetic ratio in rad s^-1 T^-1.
    pub gyromagnetic_ratio: f64,
    /// Vacuum permeability in T m / A.
    pub mu0: f64,
    /// Reduced Planck constant in J s.
    pub hbar: f64,
}

impl Default for MaterialConstants {
    fn default() -> Self {
        MaterialConstants {
            spin_density: 4.22e27,
            moment_ratio: 2.5,
            gyromagnetic_ratio: std::f64::consts::TAU * 28.0e9,
            mu0: 1.25663706212e-6,
            hbar: 1.054571817e-34,
        }
    }
}

impl MaterialConstants {
    fn validate(&self) -> Result<()> {
        let fields = [
            ("spin_density", self.spin_density),
            ("moment_ratio", self.moment_ratio),
            ("gyromagnetic_ratio", self.gyromagnetic_ratio),
            ("mu0", self.mu0),
            ("hbar", self.hbar),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "material constant {name} must be finite and > 0 (got {v})"
                )));
            }
        }
        Ok(())
    }
}

/// Transverse field integral `H~ = int_{V_m} H.x + i int_{V_m} H.y` as a
/// cell-centered Riemann sum over the sample region.
pub fn h_tilde(field: &FieldMap, region: &SampleRegion) -> Result<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut hit = false;
    for p in field.points() {
        if region.contains(p.position) {
            hit = true;
            sum += (p.h[0] + i * p.h[1]) * p.cell_volume;
        }
    }
    if !hit {
        return Err(Error::EmptyRegion);
    }
    Ok(sum)
}

/// Discretized sample volume: the summed cell volumes inside the region.
pub fn sample_volume(field: &FieldMap, region: &SampleRegion) -> Result<f64> {
    let v: f64 = field
        .points()
        .iter()
        .filter(|p| region.contains(p.position))
        .map(|p| p.cell_volume)
        .sum();
    if v <= 0.0 {
        return Err(Error::EmptyRegion);
    }
    Ok(v)
}

/// Form factor `eta = |H~| / sqrt(V_m int_{V_c} |H|^2)` in `[0, 1]`.
pub fn form_factor(field: &FieldMap, region: &SampleRegion) -> Result<f64> {
    let energy = field.field_energy();
    if energy <= 0.0 {
        return Err(Error::ZeroFieldEnergy);
    }
    let ht = h_tilde(field, region)?;
    let vm = sample_volume(field, region)?;
    Ok(ht.norm() / (vm * energy).sqrt())
}

/// Coupling phase `phi = arg H~`, reduced to `[0, 2pi)`.
pub fn coupling_phase(field: &FieldMap, region: &SampleRegion) -> Result<f64> {
    let ht = h_tilde(field, region)?;
    if ht.norm() == 0.0 {
        return Err(Error::UndefinedPhase);
    }
    Ok(normalize_phase(ht.arg()))
}

/// Coupling strength `g/2pi` in GHz from the form factor:
/// `g/2pi = eta sqrt(omega_c) (gamma/4pi) sqrt(moment_ratio mu0 hbar n_s)`,
/// with `omega_c` converted to angular rad/s internally. Linear in `eta`,
/// scales as `sqrt(omega_c)`.
pub fn coupling_strength(eta: f64, omega_c_ghz: f64, constants: &MaterialConstants) -> Result<f64> {
    constants.validate()?;
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "form factor must lie in [0, 1] (got {eta})"
        )));
    }
    if !(omega_c_ghz.is_finite() && omega_c_ghz > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cavity frequency must be > 0 (got {omega_c_ghz})"
        )));
    }
    let omega_angular = std::f64::consts::TAU * omega_c_ghz * 1e9;
    let g_hz = eta
        * omega_angular.sqrt()
        * (constants.gyromagnetic_ratio / (4.0 * std::f64::consts::PI))
        * (constants.moment_ratio * constants.mu0 * constants.hbar * constants.spin_density).sqrt();
    Ok(g_hz / 1e9)
}

/// Diagnostic for the no-z-dependence assumption:
/// `|int H.z| / (|H~| + |int H.z|)`, 0 for a purely transverse field and 1
/// for a purely axial one. Values above ~0.05 mean the transverse-coupling
/// formulas are applied outside their regime.
pub fn z_component_check(field: &FieldMap, region: &SampleRegion) -> Result<f64> {
    let ht = h_tilde(field, region)?;
    let mut hz = Complex64::new(0.0, 0.0);
    for p in field.points() {
        if region.contains(p.position) {
            hz += p.h[2] * p.cell_volume;
        }
    }
    let denom = ht.norm() + hz.norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(hz.norm() / denom)
}
