//! Residual verification: the spacetime-algebra first-order equation, the
//! matrix Dirac equation, the Klein-Gordon equation, finite-difference
//! convergence studies and the rotational-covariance check.

use serde::Serialize;

use crate::dirac::{apply_dirac_operator, DiracOp, PhaseConstants, PsiMatrix, SpinorField};
use crate::field::{
    analytic_gradient_psi, decompose, evaluate_psi_sta, FieldParams,
    SpacetimePoint,
};
use crate::sta::{exp_neg_square, rotor_sandwich, BladeIndex, Multivector};
use crate::{DerivMode, Error, Result};

/// Smallest step admitted by [`convergence_study`]; below this the central
/// difference is dominated by floating-point cancellation rather than
/// truncation and an order fit is meaningless.
pub const MIN_STUDY_STEP: f64 = 1e-6;

/// One residual evaluation. `residual_rel` is the residual norm over the
/// field norm at the same point (coefficient 2-norm over blades for the
/// spacetime-algebra checks, component 2-norm for spinors).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResidualReport {
    pub point: SpacetimePoint,
    pub mode: DerivMode,
    pub residual_abs: f64,
    pub residual_rel: f64,
}

/// Which governing equation a residual or study refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualFamily {
    DiracHestenes,
    MatrixDirac,
    KleinGordon,
}

/// Residual of `hbar grad(psi) I sigma3 = mc psi g0` for a given field value
/// and its partials `(d/d(ct), d/dx, d/dy, d/dz)`. The gradient uses the
/// reciprocal vectors `g^0 = g0`, `g^k = -gk`.
pub fn dirac_hestenes_residual_of(
    params: &FieldParams,
    psi: &Multivector,
    grads: &[Multivector; 4],
) -> Result<(f64, f64)> {
    let nabla = Multivector::gamma(0) * grads[0]
        - Multivector::gamma(1) * grads[1]
        - Multivector::gamma(2) * grads[2]
        - Multivector::gamma(3) * grads[3];
    let lhs = (nabla * Multivector::i_sigma3()).scale(params.hbar());
    let rhs = (*psi * Multivector::gamma(0)).scale(params.mass() * params.c());
    let residual_abs = (lhs - rhs).norm();
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((residual_abs, residual_abs / norm))
}

/// Central-difference partials of the closed-form field, ordered like
/// [`analytic_gradient_psi`]. The step is taken in length units (`h` along
/// each spatial axis, `h/c` in time).
pub fn fd_gradient_psi(
    params: &FieldParams,
    p: &SpacetimePoint,
    h: f64,
) -> Result<[Multivector; 4]> {
    check_step(h)?;
    let at = |t: f64, x: f64, y: f64, z: f64| {
        evaluate_psi_sta(params, &SpacetimePoint::new(t, x, y, z))
    };
    let c = params.c();
    Ok([
        (at(p.t + h / c, p.x, p.y, p.z)? - at(p.t - h / c, p.x, p.y, p.z)?).scale(0.5 / h),
        (at(p.t, p.x + h, p.y, p.z)? - at(p.t, p.x - h, p.y, p.z)?).scale(0.5 / h),
        (at(p.t, p.x, p.y + h, p.z)? - at(p.t, p.x, p.y - h, p.z)?).scale(0.5 / h),
        (at(p.t, p.x, p.y, p.z + h)? - at(p.t, p.x, p.y, p.z - h)?).scale(0.5 / h),
    ])
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::BadStep { h, reason: "step must be positive and finite".into() });
    }
    if h < crate::dirac::MIN_FD_STEP {
        return Err(Error::BadStep { h, reason: "step below the cancellation floor".into() });
    }
    Ok(())
}

/// Residual of the spacetime-algebra equation at one point.
pub fn dirac_hestenes_residual(
    params: &FieldParams,
    p: &SpacetimePoint,
    mode: DerivMode,
) -> Result<ResidualReport> {
    let psi = evaluate_psi_sta(params, p)?;
    let grads = match mode {
        DerivMode::Analytic => analytic_gradient_psi(params, p)?,
        DerivMode::Fd { h } => fd_gradient_psi(params, p, h)?,
    };
    let (residual_abs, residual_rel) = dirac_hestenes_residual_of(params, &psi, &grads)?;
    Ok(ResidualReport { point: *p, mode, residual_abs, residual_rel })
}

/// Residual of `D0` applied to the closed-form matrix solution.
pub fn matrix_dirac_residual(
    params: &FieldParams,
    p: &SpacetimePoint,
    mode: DerivMode,
) -> Result<ResidualReport> {
    let field = PsiMatrix { params: *params, pc: PhaseConstants::u(), op: DiracOp::D1 };
    let out = apply_dirac_operator(DiracOp::D0, &field, p, mode)?;
    let norm = field.value(p)?.norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let residual_abs = out.norm();
    Ok(ResidualReport { point: *p, mode, residual_abs, residual_rel: residual_abs / norm })
}

/// Residual of `hbar^2 (d^2/dt^2 - c^2 lap) phi + m^2 c^4 phi = 0` for the
/// Klein-Gordon term of the decomposition.
pub fn klein_gordon_residual(
    params: &FieldParams,
    p: &SpacetimePoint,
    mode: DerivMode,
) -> Result<ResidualReport> {
    let kg = decompose(params, p)?.kg_term;
    let norm = kg.norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let residual_abs = match mode {
        DerivMode::Analytic => {
            // hbar^2 phi_tt = -Ec^2 phi (phase chain rule); lap phi = kappa^2 phi
            // (Yukawa identity), so the operator multiplies phi by a scalar.
            let hc = params.hbar() * params.c();
            let coefficient = -params.ec() * params.ec()
                - hc * hc * params.kappa() * params.kappa()
                + params.rest_energy() * params.rest_energy();
            coefficient.abs() * norm
        }
        DerivMode::Fd { h } => {
            kg_operator_fd(params, &|q| Ok(decompose(params, q)?.kg_term), p, h)?.norm()
        }
    };
    Ok(ResidualReport { point: *p, mode, residual_abs, residual_rel: residual_abs / norm })
}

/// FD Klein-Gordon residual of the full solution (every term of the image of
/// a componentwise Klein-Gordon solution is itself Klein-Gordon-null).
pub fn klein_gordon_residual_full(
    params: &FieldParams,
    p: &SpacetimePoint,
    h: f64,
) -> Result<ResidualReport> {
    let psi = evaluate_psi_sta(params, p)?;
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let residual_abs =
        kg_operator_fd(params, &|q| evaluate_psi_sta(params, q), p, h)?.norm();
    Ok(ResidualReport {
        point: *p,
        mode: DerivMode::Fd { h },
        residual_abs,
        residual_rel: residual_abs / norm,
    })
}

fn kg_operator_fd(
    params: &FieldParams,
    field: &dyn Fn(&SpacetimePoint) -> Result<Multivector>,
    p: &SpacetimePoint,
    h: f64,
) -> Result<Multivector> {
    check_step(h)?;
    let c = params.c();
    let ht = h / c;
    let center = field(p)?;
    let second = |plus: Multivector, minus: Multivector, step: f64| {
        (plus + minus - center.scale(2.0)).scale(1.0 / (step * step))
    };
    let tt = second(
        field(&SpacetimePoint::new(p.t + ht, p.x, p.y, p.z))?,
        field(&SpacetimePoint::new(p.t - ht, p.x, p.y, p.z))?,
        ht,
    );
    let xx = second(
        field(&SpacetimePoint::new(p.t, p.x + h, p.y, p.z))?,
        field(&SpacetimePoint::new(p.t, p.x - h, p.y, p.z))?,
        h,
    );
    let yy = second(
        field(&SpacetimePoint::new(p.t, p.x, p.y + h, p.z))?,
        field(&SpacetimePoint::new(p.t, p.x, p.y - h, p.z))?,
        h,
    );
    let zz = second(
        field(&SpacetimePoint::new(p.t, p.x, p.y, p.z + h))?,
        field(&SpacetimePoint::new(p.t, p.x, p.y, p.z - h))?,
        h,
    );
    let hbar = params.hbar();
    let mc2 = params.rest_energy();
    Ok(tt.scale(hbar * hbar)
        - (xx + yy + zz).scale(hbar * hbar * c * c)
        + center.scale(mc2 * mc2))
}

/// Residuals over a decreasing list of steps with a log-log order fit.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub family: ResidualFamily,
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Fitted slope of log(residual) against log(h).
    pub fitted_order: f64,
    /// RMS deviation of the fit, in log10 units.
    pub fit_rms: f64,
    pub degenerate: bool,
}

/// Run one residual family at several FD steps and fit the convergence order.
pub fn convergence_study(
    params: &FieldParams,
    family: ResidualFamily,
    points: &[SpacetimePoint],
    h_list: &[f64],
) -> Result<ConvergenceReport> {
    if h_list.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 steps, got {}",
            h_list.len()
        )));
    }
    if !h_list.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::DegenerateFit("steps must be strictly decreasing".into()));
    }
    if points.is_empty() {
        return Err(Error::DegenerateFit("no sample points".into()));
    }
    for &h in h_list {
        if h < MIN_STUDY_STEP {
            return Err(Error::BadStep {
                h,
                reason: "cancellation-dominated step, order fit rejected".into(),
            });
        }
    }
    let mut residuals = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let mode = DerivMode::Fd { h };
        let mut total = 0.0;
        for p in points {
            let report = match family {
                ResidualFamily::DiracHestenes => dirac_hestenes_residual(params, p, mode)?,
                ResidualFamily::MatrixDirac => matrix_dirac_residual(params, p, mode)?,
                ResidualFamily::KleinGordon => klein_gordon_residual(params, p, mode)?,
            };
            total += report.residual_rel;
        }
        residuals.push(total / points.len() as f64);
    }
    let (fitted_order, fit_rms) = log_log_fit(h_list, &residuals);
    let degenerate = !fitted_order.is_finite() || fit_rms > 0.5;
    Ok(ConvergenceReport {
        family,
        steps: h_list.to_vec(),
        residuals,
        fitted_order,
        fit_rms,
        degenerate,
    })
}

fn log_log_fit(steps: &[f64], residuals: &[f64]) -> (f64, f64) {
    let n = steps.len() as f64;
    let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.max(f64::MIN_POSITIVE).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let fit = my + slope * (x - mx);
            (y - fit) * (y - fit)
        })
        .sum::<f64>()
        / n)
        .sqrt()
        / std::f64::consts::LN_10;
    (slope, rms)
}

/// Result of the rotational-covariance check.
#[derive(Debug, Clone)]
pub struct RotationReport {
    /// Residual of the rotated field under the governing equation.
    pub residual: ResidualReport,
    /// Relative deviation of `psi'(p)` from the phase action `psi(p) R`.
    pub phase_action_deviation: f64,
    /// The rotated field value at `p`.
    pub psi_prime: Multivector,
}

/// Rotate the solution about the z axis: with the rotor
/// `R = cos(phi/2) + I sigma3 sin(phi/2)` and `p'` the point whose position
/// vector is `R~ p R`, the transformed field `psi'(p) = R psi(p')` must again
/// solve the equation, and for this axially oriented solution it equals
/// `psi(p) R` (at `phi = 2 pi` the half-angle makes `R = -1`, so a full turn
/// negates the field).
pub fn rotation_covariance_check(
    params: &FieldParams,
    p: &SpacetimePoint,
    phi: f64,
) -> Result<RotationReport> {
    let rotor = exp_neg_square(&Multivector::i_sigma3(), phi / 2.0)?;
    let reversed = rotor.reverse();

    // coordinates of the mapped point and the 2x2 plane rotation matrix
    let image = |v: &Multivector| rotor_sandwich(&reversed, v);
    let g1 = BladeIndex::new(0b0010);
    let g2 = BladeIndex::new(0b0100);
    let col_x = image(&Multivector::gamma(1))?;
    let col_y = image(&Multivector::gamma(2))?;
    let m11 = col_x.coeff(g1);
    let m21 = col_x.coeff(g2);
    let m12 = col_y.coeff(g1);
    let m22 = col_y.coeff(g2);
    let mapped = SpacetimePoint::new(
        p.t,
        m11 * p.x + m12 * p.y,
        m21 * p.x + m22 * p.y,
        p.z,
    );

    let psi_at_mapped = evaluate_psi_sta(params, &mapped)?;
    let psi_prime = rotor * psi_at_mapped;

    // chain rule: d/dx psi'(p) = R (m11 psi_x + m21 psi_y)(p'), etc.
    let grads = analytic_gradient_psi(params, &mapped)?;
    let grads_prime = [
        rotor * grads[0],
        rotor * (grads[1].scale(m11) + grads[2].scale(m21)),
        rotor * (grads[1].scale(m12) + grads[2].scale(m22)),
        rotor * grads[3],
    ];
    let (residual_abs, residual_rel) =
        dirac_hestenes_residual_of(params, &psi_prime, &grads_prime)?;

    let direct = evaluate_psi_sta(params, p)?;
    let phase_action = direct * rotor;
    let phase_action_deviation = (psi_prime - phase_action).norm() / direct.norm();

    Ok(RotationReport {
        residual: ResidualReport {
            point: *p,
            mode: DerivMode::Analytic,
            residual_abs,
            residual_rel,
        },
        phase_action_deviation,
        psi_prime,
    })
}

/// Relative deviation between the rotor-sandwich and one-sided forms of the
/// spin term; the decomposition reconstruction error rides along in
/// [`decompose`] tests.
pub fn spin_form_deviation(params: &FieldParams, p: &SpacetimePoint) -> Result<f64> {
    let sandwich = crate::field::spin_term_rotor_form(params, p)?;
    let one_sided = decompose(params, p)?.spin_term;
    let norm = one_sided.norm().max(sandwich.norm());
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok((sandwich - one_sided).norm() / norm)
}

/// Corruption probe: residual after scaling one blade coefficient of the
/// field value, gradient left exact. A healthy check must light up.
pub fn corrupted_dh_residual(
    params: &FieldParams,
    p: &SpacetimePoint,
    blade: BladeIndex,
    factor: f64,
) -> Result<f64> {
    let mut psi = evaluate_psi_sta(params, p)?;
    psi.0[blade.mask() as usize] *= factor;
    let grads = analytic_gradient_psi(params, p)?;
    Ok(dirac_hestenes_residual_of(params, &psi, &grads)?.1)
}
