//! Closed-form evaluation of the localized field: the scalar ingredients
//! (action phase, Yukawa amplitude, radial vector), the even-multivector
//! solution, its analytic gradient, and the exact three-term decomposition
//! into Klein-Gordon, spinning and zitter parts.

use serde::{Deserialize, Serialize};

use crate::physics::{C_SI, ELECTRON_MASS_SI, HBAR_SI};
use crate::sta::{exp_neg_square, rotor_sandwich, Multivector};
use crate::{Error, Result};

/// Default exclusion radius around the singular origin, natural units.
pub const DEFAULT_R_MIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitMode {
    /// hbar = c = 1, mass in electron masses, lengths in reduced Compton
    /// wavelengths of the electron.
    Natural,
    /// CODATA constants, kg / m / s / J.
    Si,
}

/// Physical parameters of the field, with the derived energy `Ec`.
///
/// The energy relation fixes `Ec = sqrt((m c^2)^2 - (hbar kappa c)^2)`; the
/// checked constructors enforce `hbar kappa c < m c^2` so `Ec` is real and
/// positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    mass: f64,
    kappa: f64,
    unit_mode: UnitMode,
    r_min: f64,
    ec: f64,
}

impl FieldParams {
    pub fn new(mass: f64, kappa: f64, unit_mode: UnitMode) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParams(format!("mass must be positive, got {mass}")));
        }
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParams(format!("kappa must be nonnegative, got {kappa}")));
        }
        let (hbar, c) = constants(unit_mode);
        let rest = mass * c * c;
        let screened = hbar * kappa * c;
        if screened >= rest {
            return Err(Error::InvalidParams(format!(
                "hbar*kappa*c = {screened:.6e} must stay below m*c^2 = {rest:.6e}"
            )));
        }
        let ec = (rest * rest - screened * screened).sqrt();
        let r_min = match unit_mode {
            UnitMode::Natural => DEFAULT_R_MIN,
            UnitMode::Si => DEFAULT_R_MIN * HBAR_SI / (ELECTRON_MASS_SI * C_SI),
        };
        Ok(FieldParams { mass, kappa, unit_mode, r_min, ec })
    }

    /// Natural units with unit mass.
    pub fn natural(kappa: f64) -> Result<Self> {
        Self::new(1.0, kappa, UnitMode::Natural)
    }

    /// SI units with the electron mass.
    pub fn si_electron(kappa: f64) -> Result<Self> {
        Self::new(ELECTRON_MASS_SI, kappa, UnitMode::Si)
    }

    /// Probe constructor that bypasses the energy relation. Used by the
    /// sensitivity checks that deliberately break `Ec`.
    pub fn with_energy(mass: f64, kappa: f64, unit_mode: UnitMode, ec: f64) -> Self {
        let base = Self::new(mass, kappa, unit_mode).expect("base parameters must be valid");
        FieldParams { ec, ..base }
    }

    pub fn with_r_min(self, r_min: f64) -> Self {
        FieldParams { r_min, ..self }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn unit_mode(&self) -> UnitMode {
        self.unit_mode
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn hbar(&self) -> f64 {
        constants(self.unit_mode).0
    }

    pub fn c(&self) -> f64 {
        constants(self.unit_mode).1
    }

    /// The derived energy `Ec`.
    pub fn ec(&self) -> f64 {
        self.ec
    }

    /// Rest energy `m c^2`.
    pub fn rest_energy(&self) -> f64 {
        let c = self.c();
        self.mass * c * c
    }

    /// Express the same physical parameters in the other unit system.
    ///
    /// The natural scales are electron-based: mass in `m_e`, length in the
    /// reduced Compton wavelength `hbar/(m_e c)`.
    pub fn convert(&self, target: UnitMode) -> Result<Self> {
        if target == self.unit_mode {
            return Ok(*self);
        }
        let lambda_bar = HBAR_SI / (ELECTRON_MASS_SI * C_SI);
        let (mass, kappa, r_min) = match target {
            UnitMode::Si => (
                self.mass * ELECTRON_MASS_SI,
                self.kappa / lambda_bar,
                self.r_min * lambda_bar,
            ),
            UnitMode::Natural => (
                self.mass / ELECTRON_MASS_SI,
                self.kappa * lambda_bar,
                self.r_min / lambda_bar,
            ),
        };
        Ok(Self::new(mass, kappa, target)?.with_r_min(r_min))
    }

    pub(crate) fn check_radius(&self, r: f64) -> Result<()> {
        if r < self.r_min {
            Err(Error::Singularity { r, r_min: self.r_min })
        } else {
            Ok(())
        }
    }
}

fn constants(mode: UnitMode) -> (f64, f64) {
    match mode {
        UnitMode::Natural => (1.0, 1.0),
        UnitMode::Si => (HBAR_SI, C_SI),
    }
}

/// An event (t, x, y, z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        SpacetimePoint { t, x, y, z }
    }

    pub fn r(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// The action scalar `S = -Ec t`.
pub fn scalar_s(params: &FieldParams, t: f64) -> f64 {
    -params.ec() * t
}

/// The Yukawa amplitude `a = exp(-kappa r) / r`.
pub fn amplitude_a(params: &FieldParams, r: f64) -> Result<f64> {
    params.check_radius(r)?;
    Ok((-params.kappa() * r).exp() / r)
}

/// The radial vector `R = r_vec (1/r^2 + kappa/r)`.
pub fn r_vector(params: &FieldParams, p: &SpacetimePoint) -> Result<[f64; 3]> {
    let r = p.r();
    params.check_radius(r)?;
    let f = radial_factor(params, r);
    Ok([p.x * f, p.y * f, p.z * f])
}

fn radial_factor(params: &FieldParams, r: f64) -> f64 {
    1.0 / (r * r) + params.kappa() / r
}

/// The phase rotor `exp(I sigma3 S/hbar)`.
fn phase_rotor(theta: f64) -> Multivector {
    Multivector::scalar(theta.cos()) + Multivector::i_sigma3().scale(theta.sin())
}

// The bracket {(Ec + mc^2) + hbar c (Rx g2g0 - Ry g1g0 + Rz I)}.
fn bracket(params: &FieldParams, p: &SpacetimePoint) -> Result<Multivector> {
    let [rx, ry, rz] = r_vector(params, p)?;
    Ok(bracket_from(params, rx, ry, rz))
}

fn bracket_from(params: &FieldParams, rx: f64, ry: f64, rz: f64) -> Multivector {
    let hc = params.hbar() * params.c();
    let g2g0 = Multivector::gamma(2) * Multivector::gamma(0);
    let g1g0 = Multivector::gamma(1) * Multivector::gamma(0);
    Multivector::scalar(params.ec() + params.rest_energy())
        + g2g0.scale(hc * rx)
        - g1g0.scale(hc * ry)
        + Multivector::pseudoscalar().scale(hc * rz)
}

/// The even-multivector solution
/// `psi = a {(Ec + mc^2) + hbar c (Rx g2g0 - Ry g1g0 + Rz I)} exp(I sigma3 S/hbar)`.
pub fn evaluate_psi_sta(params: &FieldParams, p: &SpacetimePoint) -> Result<Multivector> {
    let a = amplitude_a(params, p.r())?;
    let theta = scalar_s(params, p.t) / params.hbar();
    Ok((bracket(params, p)? * phase_rotor(theta)).scale(a))
}

/// The three exact pieces of the solution at one point.
#[derive(Debug, Clone, Copy)]
pub struct DecompositionResult {
    /// `a (Ec + mc^2) exp(I sigma3 S/hbar)` -- the spinless localized part.
    pub kg_term: Multivector,
    /// The rigidly rotating part, constant sigma3 component.
    pub spin_term: Multivector,
    /// `a hbar c Rz sigma3 (exp((S/hbar + pi/2) I sigma3) - 1)` -- the
    /// axial oscillation.
    pub zitter_term: Multivector,
}

impl DecompositionResult {
    pub fn total(&self) -> Multivector {
        self.kg_term + self.spin_term + self.zitter_term
    }
}

/// Split the solution into its Klein-Gordon, spin and zitter terms.
/// The sum reproduces [`evaluate_psi_sta`] as an algebraic identity.
pub fn decompose(params: &FieldParams, p: &SpacetimePoint) -> Result<DecompositionResult> {
    let a = amplitude_a(params, p.r())?;
    let [rx, ry, rz] = r_vector(params, p)?;
    let hc = params.hbar() * params.c();
    let theta = scalar_s(params, p.t) / params.hbar();
    let shifted = phase_rotor(theta + std::f64::consts::FRAC_PI_2);

    let kg_term = phase_rotor(theta).scale(a * (params.ec() + params.rest_energy()));
    let planar = Multivector::sigma(1).scale(hc * rx) + Multivector::sigma(2).scale(hc * ry);
    let spin_term = (planar * shifted + Multivector::sigma(3).scale(hc * rz)).scale(a);
    let zitter_term =
        (Multivector::sigma(3) * (shifted - Multivector::scalar(1.0))).scale(a * hc * rz);
    Ok(DecompositionResult { kg_term, spin_term, zitter_term })
}

/// The spin term in its rotor-sandwich form:
/// `a hbar c R~ (Rx sigma1 + Ry sigma2 + Rz sigma3) R` with the half-angle
/// rotor of `(S/hbar + pi/2) I sigma3`. Agrees with the one-sided form used by
/// [`decompose`] to machine precision.
pub fn spin_term_rotor_form(params: &FieldParams, p: &SpacetimePoint) -> Result<Multivector> {
    let a = amplitude_a(params, p.r())?;
    let [rx, ry, rz] = r_vector(params, p)?;
    let hc = params.hbar() * params.c();
    let theta = scalar_s(params, p.t) / params.hbar() + std::f64::consts::FRAC_PI_2;
    let rotor = exp_neg_square(&Multivector::i_sigma3(), -theta / 2.0)?;
    let vector = Multivector::sigma(1).scale(rx)
        + Multivector::sigma(2).scale(ry)
        + Multivector::sigma(3).scale(rz);
    Ok(rotor_sandwich(&rotor, &vector)?.scale(a * hc))
}

/// The braces factor of the zitter term, `z sigma3 (exp((S/hbar + pi/2) I sigma3) - 1)`.
/// Independent of x and y, exactly linear in z; no singularity.
pub fn zitter_braces(params: &FieldParams, p: &SpacetimePoint) -> Multivector {
    let theta = scalar_s(params, p.t) / params.hbar() + std::f64::consts::FRAC_PI_2;
    let oscillation = phase_rotor(theta) - Multivector::scalar(1.0);
    (Multivector::sigma(3) * oscillation).scale(p.z)
}

/// Closed-form partial derivatives of the solution, ordered
/// `(d/d(ct), d/dx, d/dy, d/dz)`.
pub fn analytic_gradient_psi(params: &FieldParams, p: &SpacetimePoint) -> Result<[Multivector; 4]> {
    let r = p.r();
    let a = amplitude_a(params, r)?;
    let hc = params.hbar() * params.c();
    let theta = scalar_s(params, p.t) / params.hbar();
    let phase = phase_rotor(theta);
    let brk = bracket(params, p)?;

    // d/d(ct): only the phase depends on t, with d(theta)/d(ct) = -Ec/(hbar c).
    let dtheta_dct = -params.ec() / hc;
    let d_ct = (brk * Multivector::i_sigma3() * phase).scale(a * dtheta_dct);

    // a'(r) = -a (kappa + 1/r); f'(r) = -2/r^3 - kappa/r^2.
    let a_prime = -a * (params.kappa() + 1.0 / r);
    let f = radial_factor(params, r);
    let f_prime = -2.0 / (r * r * r) - params.kappa() / (r * r);
    let coords = [p.x, p.y, p.z];

    let mut grads = [d_ct, Multivector::ZERO, Multivector::ZERO, Multivector::ZERO];
    for j in 0..3 {
        // dR_k/dx_j = delta_kj f + x_k x_j f'/r
        let mut dr = [0.0; 3];
        for (k, slot) in dr.iter_mut().enumerate() {
            *slot = coords[k] * coords[j] * f_prime / r;
            if k == j {
                *slot += f;
            }
        }
        let db = bracket_from(params, dr[0], dr[1], dr[2])
            - Multivector::scalar(params.ec() + params.rest_energy());
        let da = a_prime * coords[j] / r;
        grads[j + 1] = (brk * phase).scale(da) + (db * phase).scale(a);
    }
    Ok(grads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sta::BladeIndex;

    fn natural() -> FieldParams {
        FieldParams::natural(0.0).unwrap()
    }

    fn screened() -> FieldParams {
        FieldParams::natural(0.3).unwrap()
    }

    #[test]
    fn energy_relation() {
        let p = screened();
        assert!((p.ec() - (1.0f64 - 0.09).sqrt()).abs() < 1e-15);
        assert!(FieldParams::natural(1.0).is_err());
        assert!(FieldParams::new(-1.0, 0.0, UnitMode::Natural).is_err());
    }

    #[test]
    fn scalar_s_examples() {
        let p = natural();
        assert_eq!(scalar_s(&p, 0.0), 0.0);
        assert!((scalar_s(&p, std::f64::consts::PI) + std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(scalar_s(&p, 2.0), 2.0 * scalar_s(&p, 1.0));
    }

    #[test]
    fn amplitude_examples() {
        let p = natural();
        assert_eq!(amplitude_a(&p, 1.0).unwrap(), 1.0);
        let s = screened();
        assert!((amplitude_a(&s, 1.0).unwrap() - (-0.3f64).exp()).abs() < 1e-15);
        assert!(matches!(amplitude_a(&p, 1e-5), Err(Error::Singularity { .. })));
        // strictly decreasing
        let mut last = f64::INFINITY;
        for i in 1..40 {
            let v = amplitude_a(&s, 0.1 * i as f64).unwrap();
            assert!(v > 0.0 && v < last);
            last = v;
        }
    }

    #[test]
    fn yukawa_identity_by_fd_laplacian() {
        // Laplacian of a equals kappa^2 a away from the origin.
        let params = screened();
        let h = 1e-4;
        for &(x, y, z) in &[(0.8, -0.4, 1.1), (2.0, 0.5, 0.3), (0.6, 0.6, -0.6)] {
            let at = |x: f64, y: f64, z: f64| {
                amplitude_a(&params, (x * x + y * y + z * z).sqrt()).unwrap()
            };
            let center = at(x, y, z);
            let lap = (at(x + h, y, z) + at(x - h, y, z) + at(x, y + h, z) + at(x, y - h, z)
                + at(x, y, z + h)
                + at(x, y, z - h)
                - 6.0 * center)
                / (h * h);
            let expected = params.kappa() * params.kappa() * center;
            assert!((lap - expected).abs() < 1e-4 * center.abs().max(1.0), "lap {lap} vs {expected}");
        }
    }

    #[test]
    fn r_vector_examples() {
        let p = natural();
        let r = r_vector(&p, &SpacetimePoint::new(0.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(r, [1.0, 0.0, 0.0]);
        let on_axis = r_vector(&screened(), &SpacetimePoint::new(0.0, 0.0, 0.0, 2.0)).unwrap();
        assert_eq!(on_axis[0], 0.0);
        assert_eq!(on_axis[1], 0.0);
        // |R| = 1/r + kappa
        let s = screened();
        let pt = SpacetimePoint::new(0.0, 1.2, -0.7, 0.4);
        let rv = r_vector(&s, &pt).unwrap();
        let mag = (rv[0] * rv[0] + rv[1] * rv[1] + rv[2] * rv[2]).sqrt();
        assert!((mag - (1.0 / pt.r() + s.kappa())).abs() < 1e-12);
    }

    #[test]
    fn psi_hand_value_at_unit_x() {
        // t = 0, p = (1,0,0), kappa = 0: psi = 2 + g2 g0.
        let psi = evaluate_psi_sta(&natural(), &SpacetimePoint::new(0.0, 1.0, 0.0, 0.0)).unwrap();
        let expected = Multivector::scalar(2.0) + Multivector::gamma(2) * Multivector::gamma(0);
        assert!(psi.approx_eq(&expected, 1e-14, 0.0));
    }

    #[test]
    fn psi_is_even() {
        let params = screened();
        for i in 0..200 {
            let p = pseudo_point(i);
            assert!(evaluate_psi_sta(&params, &p).unwrap().is_even());
        }
    }

    #[test]
    fn decomposition_reconstructs_psi() {
        for params in [natural(), screened()] {
            for i in 0..300 {
                let p = pseudo_point(i);
                let psi = evaluate_psi_sta(&params, &p).unwrap();
                let d = decompose(&params, &p).unwrap();
                assert!(d.total().approx_eq(&psi, 0.0, 1e-12), "at {p:?}");
                assert!(d.kg_term.is_even() && d.spin_term.is_even() && d.zitter_term.is_even());
            }
        }
    }

    #[test]
    fn zitter_term_vanishing_cases() {
        let params = screened();
        // z = 0 plane
        let d = decompose(&params, &SpacetimePoint::new(1.3, 0.8, -0.5, 0.0)).unwrap();
        assert_eq!(d.zitter_term.norm(), 0.0);
        // S/hbar = -pi/2, i.e. t = pi hbar / (2 Ec)
        let t = std::f64::consts::FRAC_PI_2 * params.hbar() / params.ec();
        let d = decompose(&params, &SpacetimePoint::new(t, 0.4, 0.2, 1.5)).unwrap();
        assert!(d.zitter_term.norm() < 1e-14);
    }

    #[test]
    fn rotor_and_one_sided_spin_forms_agree() {
        for params in [natural(), screened()] {
            for i in 0..100 {
                let p = pseudo_point(i);
                let sandwich = spin_term_rotor_form(&params, &p).unwrap();
                let one_sided = decompose(&params, &p).unwrap().spin_term;
                assert!(sandwich.approx_eq(&one_sided, 0.0, 1e-12));
            }
        }
    }

    #[test]
    fn spin_sigma3_component_is_static() {
        let params = natural();
        let g3g0 = BladeIndex::new(0b1001);
        let base = decompose(&params, &SpacetimePoint::new(0.0, 1.0, 0.4, 0.7)).unwrap();
        for i in 1..50 {
            let t = 0.17 * i as f64;
            let d = decompose(&params, &SpacetimePoint::new(t, 1.0, 0.4, 0.7)).unwrap();
            assert!((d.spin_term.coeff(g3g0) - base.spin_term.coeff(g3g0)).abs() < 1e-12);
        }
    }

    #[test]
    fn zitter_braces_linear_in_z_and_blind_to_xy() {
        let params = screened();
        let t = 0.9;
        let a = zitter_braces(&params, &SpacetimePoint::new(t, 0.0, 0.0, 2.0));
        let b = zitter_braces(&params, &SpacetimePoint::new(t, 5.0, -3.0, 1.0));
        assert!(a.approx_eq(&b.scale(2.0), 1e-15, 0.0));
        assert_eq!(zitter_braces(&params, &SpacetimePoint::new(t, 1.0, 1.0, 0.0)).norm(), 0.0);
    }

    #[test]
    fn zitter_braces_time_average_is_minus_z_sigma3() {
        // Averaging the oscillatory rotor over one period leaves only the -1 offset.
        let params = natural();
        let period = 2.0 * std::f64::consts::PI * params.hbar() / params.ec();
        let z = 1.7;
        let n = 20_000;
        let mut avg = Multivector::ZERO;
        for i in 0..n {
            let t = period * (i as f64 + 0.5) / n as f64;
            avg = avg + zitter_braces(&params, &SpacetimePoint::new(t, 0.3, -0.2, z));
        }
        avg = avg.scale(1.0 / n as f64);
        let expected = Multivector::sigma(3).scale(-z);
        assert!(avg.approx_eq(&expected, 1e-7, 1e-7));
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        for params in [natural(), screened()] {
            for i in 0..40 {
                let p = pseudo_point(i);
                let grads = analytic_gradient_psi(&params, &p).unwrap();
                let fd = fd_gradient(&params, &p, 1e-5);
                for (g, f) in grads.iter().zip(fd.iter()) {
                    assert!(g.approx_eq(f, 1e-8, 1e-7), "at {p:?}");
                }
            }
        }
    }

    #[test]
    fn fd_gradient_converges_at_second_order() {
        let params = screened();
        let p = pseudo_point(7);
        let exact = analytic_gradient_psi(&params, &p).unwrap();
        let err = |h: f64| {
            fd_gradient(&params, &p, h)
                .iter()
                .zip(exact.iter())
                .map(|(f, g)| (*f - *g).norm())
                .sum::<f64>()
        };
        let ratio = err(1e-3) / err(5e-4);
        assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
    }

    #[test]
    fn unit_round_trip() {
        let p = FieldParams::natural(0.25).unwrap();
        let back = p.convert(UnitMode::Si).unwrap().convert(UnitMode::Natural).unwrap();
        assert!((back.mass() - p.mass()).abs() < 1e-12);
        assert!((back.kappa() - p.kappa()).abs() < 1e-12);
        assert!((back.ec() - p.ec()).abs() < 1e-12);
    }

    fn pseudo_point(i: u64) -> SpacetimePoint {
        // cheap deterministic scatter, kept away from the origin
        let f = |k: u64| {
            let x = (i.wrapping_mul(6364136223846793005).wrapping_add(k * 1442695040888963407)) >> 11;
            (x as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let (x, y, z) = (f(1) * 3.0, f(2) * 3.0, f(3) * 3.0);
        let r = (x * x + y * y + z * z).sqrt();
        let s = if r < 0.3 { (0.3 + r) / r.max(1e-9) } else { 1.0 };
        SpacetimePoint::new(f(0) * 5.0, x * s, y * s, z * s)
    }

    fn fd_gradient(params: &FieldParams, p: &SpacetimePoint, h: f64) -> [Multivector; 4] {
        let at = |t: f64, x: f64, y: f64, z: f64| {
            evaluate_psi_sta(params, &SpacetimePoint::new(t, x, y, z)).unwrap()
        };
        let c = params.c();
        [
            (at(p.t + h / c, p.x, p.y, p.z) - at(p.t - h / c, p.x, p.y, p.z)).scale(0.5 / h),
            (at(p.t, p.x + h, p.y, p.z) - at(p.t, p.x - h, p.y, p.z)).scale(0.5 / h),
            (at(p.t, p.x, p.y + h, p.z) - at(p.t, p.x, p.y - h, p.z)).scale(0.5 / h),
            (at(p.t, p.x, p.y, p.z + h) - at(p.t, p.x, p.y, p.z - h)).scale(0.5 / h),
        ]
    }
}
