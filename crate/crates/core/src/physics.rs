//! Physical constants, unit handling and the desk-scale estimates: spin
//! angular velocity, the size bound it implies, and the zitter frequency.

use serde::Serialize;

use crate::field::{decompose, zitter_braces, FieldParams, SpacetimePoint, UnitMode};
use crate::sta::BladeIndex;
use crate::{Error, Result};

/// CODATA reduced Planck constant, J s.
pub const HBAR_SI: f64 = 1.054571817e-34;
/// Speed of light, m/s (exact).
pub const C_SI: f64 = 2.99792458e8;
/// CODATA electron mass, kg.
pub const ELECTRON_MASS_SI: f64 = 9.1093837015e-31;

/// Note attached to every estimate report: the formula value of the size
/// bound differs from the rounded prose figure sometimes quoted for it.
pub const SIZE_BOUND_NOTE: &str = "size_bound is the formula value c/|omega| = hbar c / Ec \
(the reduced Compton wavelength at kappa = 0, ~3.86e-13 m); this is ~40x larger than the \
often-quoted round figure of 1e-14 m, whose arithmetic is not reproducible from the formula";

/// The constants in force for a unit mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitSystem {
    pub mode: UnitMode,
    pub hbar: f64,
    pub c: f64,
    pub electron_mass: f64,
}

impl UnitSystem {
    pub fn new(mode: UnitMode) -> Self {
        match mode {
            UnitMode::Natural => UnitSystem { mode, hbar: 1.0, c: 1.0, electron_mass: 1.0 },
            UnitMode::Si => UnitSystem {
                mode,
                hbar: HBAR_SI,
                c: C_SI,
                electron_mass: ELECTRON_MASS_SI,
            },
        }
    }
}

/// Signed spin angular velocity `omega = -Ec/hbar` (rotation in the
/// sigma1-sigma2 plane, about the sigma3 axis), rad/s in the params' units.
pub fn angular_velocity(params: &FieldParams) -> f64 {
    -params.ec() / params.hbar()
}

/// Upper bound on the field's radial extent from `r < c/|omega|`; equals the
/// reduced Compton wavelength `hbar/(m c)` at `kappa = 0`.
pub fn size_bound(params: &FieldParams) -> f64 {
    params.c() / angular_velocity(params).abs()
}

/// Oscillation frequency of the zitter factor, `Ec/(2 pi hbar)`, Hz.
pub fn zitter_frequency(params: &FieldParams) -> f64 {
    params.ec() / (2.0 * std::f64::consts::PI * params.hbar())
}

/// The three estimates in SI and natural values, plus the inputs used.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub omega_rad_per_s: f64,
    pub size_bound_m: f64,
    pub zitter_freq_hz: f64,
    pub omega_natural: f64,
    pub size_bound_natural: f64,
    pub zitter_freq_natural: f64,
    /// kappa actually used, in 1/m.
    pub kappa_used_per_m: f64,
    pub note: String,
}

/// Evaluate the estimates for the given parameters in both unit systems.
pub fn estimate_report(params: &FieldParams) -> Result<EstimateReport> {
    let si = params.convert(UnitMode::Si)?;
    let natural = params.convert(UnitMode::Natural)?;
    Ok(EstimateReport {
        omega_rad_per_s: angular_velocity(&si).abs(),
        size_bound_m: size_bound(&si),
        zitter_freq_hz: zitter_frequency(&si),
        omega_natural: angular_velocity(&natural).abs(),
        size_bound_natural: size_bound(&natural),
        zitter_freq_natural: zitter_frequency(&natural),
        kappa_used_per_m: si.kappa(),
        note: SIZE_BOUND_NOTE.to_string(),
    })
}

// sigma1 = -(g0g1 blade), sigma2 = -(g0g2 blade): planar components of an
// even multivector in the canonical coefficient layout.
fn planar_components(mv: &crate::sta::Multivector) -> (f64, f64) {
    (-mv.coeff(BladeIndex::new(0b0011)), -mv.coeff(BladeIndex::new(0b0101)))
}

fn fit_rate(times: &[f64], angles: &[f64]) -> f64 {
    let n = times.len() as f64;
    let mt = times.iter().sum::<f64>() / n;
    let ma = angles.iter().sum::<f64>() / n;
    let stt: f64 = times.iter().map(|t| (t - mt) * (t - mt)).sum();
    let sta: f64 = times.iter().zip(angles).map(|(t, a)| (t - mt) * (a - ma)).sum();
    sta / stt
}

fn unwrap_angles(raw: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out = Vec::new();
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for angle in raw {
        if let Some(p) = prev {
            let mut delta = angle - p;
            while delta > std::f64::consts::PI {
                delta -= 2.0 * std::f64::consts::PI;
                offset -= 2.0 * std::f64::consts::PI;
            }
            while delta < -std::f64::consts::PI {
                delta += 2.0 * std::f64::consts::PI;
                offset += 2.0 * std::f64::consts::PI;
            }
        }
        prev = Some(angle);
        out.push(angle + offset);
    }
    out
}

/// Fit the planar rotation rate of the spin term from sampled times, rad/s.
/// Signed; matches [`angular_velocity`]. The point must lie off the z axis.
pub fn spin_rate_numeric(
    params: &FieldParams,
    p: &SpacetimePoint,
    times: &[f64],
) -> Result<f64> {
    if times.len() < 4 {
        return Err(Error::DegenerateFit("need at least 4 sample times".into()));
    }
    if p.x * p.x + p.y * p.y < 1e-20 {
        return Err(Error::OnAxis);
    }
    let mut raw = Vec::with_capacity(times.len());
    for &t in times {
        let q = SpacetimePoint::new(t, p.x, p.y, p.z);
        let (c1, c2) = planar_components(&decompose(params, &q)?.spin_term);
        if c1 * c1 + c2 * c2 < 1e-24 {
            return Err(Error::OnAxis);
        }
        raw.push(c2.atan2(c1));
    }
    let unwrapped = unwrap_angles(raw.into_iter());
    Ok(fit_rate(times, &unwrapped))
}

/// Fit the oscillation rate of the zitter braces factor, rad/s, magnitude.
pub fn zitter_rate_numeric(
    params: &FieldParams,
    p: &SpacetimePoint,
    times: &[f64],
) -> Result<f64> {
    if times.len() < 4 {
        return Err(Error::DegenerateFit("need at least 4 sample times".into()));
    }
    if p.z == 0.0 {
        return Err(Error::OnAxis);
    }
    let mut raw = Vec::with_capacity(times.len());
    for &t in times {
        let q = SpacetimePoint::new(t, p.x, p.y, p.z);
        let braces = zitter_braces(params, &q);
        // braces/z = (cos th - 1) sigma3 + sin th I; recover th from the offset
        let cos_th = -braces.coeff(BladeIndex::new(0b1001)) / p.z + 1.0;
        let sin_th = braces.coeff(BladeIndex::PSEUDOSCALAR) / p.z;
        raw.push(sin_th.atan2(cos_th));
    }
    let unwrapped = unwrap_angles(raw.into_iter());
    Ok(fit_rate(times, &unwrapped).abs())
}
