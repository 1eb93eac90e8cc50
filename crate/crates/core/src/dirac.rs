//! The independent matrix oracle: 4x4 complex Dirac-Pauli matrices, the
//! first-order operators `D0`/`D1`, the closed-form column-spinor solution,
//! and the map connecting it to the even-multivector form.
//!
//! Conventions: [`gamma_matrices`] returns the upper-index set (the matrices
//! written as `beta` and `beta alpha_k`), with `g^0` diagonal. The generator
//! representation used by [`matrix_rep`] is the lower-index set `g_0 = g^0`,
//! `g_k = -g^k`, which is what makes the substitution identities
//! `i g^1 u = g^2 g^0 u` etc. close the algebra over the first standard
//! column `u`.

use num_complex::Complex64 as C;

use crate::field::{amplitude_a, evaluate_psi_sta, r_vector, scalar_s, FieldParams, SpacetimePoint};
use crate::sta::{BladeIndex, Multivector};
use crate::{DerivMode, Error, Result};

const ONE: C = C::new(1.0, 0.0);
const IM: C = C::new(0.0, 1.0);

/// Smallest admissible central-difference step.
pub const MIN_FD_STEP: f64 = 1e-12;

/// A 4x4 complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4(pub [[C; 4]; 4]);

/// A 4-component complex column spinor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor4(pub [C; 4]);

impl Matrix4 {
    pub const ZERO: Matrix4 = Matrix4([[C::new(0.0, 0.0); 4]; 4]);

    pub fn identity() -> Self {
        let mut m = Self::ZERO;
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn scale(&self, factor: C) -> Self {
        let mut m = *self;
        for row in &mut m.0 {
            for v in row {
                *v *= factor;
            }
        }
        m
    }

    pub fn add(&self, other: &Matrix4) -> Self {
        let mut m = *self;
        for (row, orow) in m.0.iter_mut().zip(other.0) {
            for (v, o) in row.iter_mut().zip(orow) {
                *v += o;
            }
        }
        m
    }

    pub fn matmul(&self, other: &Matrix4) -> Self {
        let mut m = Self::ZERO;
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..4 {
                    m.0[i][j] += a * other.0[k][j];
                }
            }
        }
        m
    }

    pub fn apply(&self, s: &Spinor4) -> Spinor4 {
        let mut out = [C::new(0.0, 0.0); 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i] += self.0[i][j] * s.0[j];
            }
        }
        Spinor4(out)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn conjugate_transpose(&self) -> Self {
        let mut m = Self::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }
}

impl Spinor4 {
    pub const ZERO: Spinor4 = Spinor4([C::new(0.0, 0.0); 4]);

    /// The j-th standard column, j in 0..=3.
    pub fn standard_column(j: usize) -> Self {
        let mut s = Self::ZERO;
        s.0[j] = ONE;
        s
    }

    pub fn add(&self, other: &Spinor4) -> Self {
        let mut s = *self;
        for (v, o) in s.0.iter_mut().zip(other.0) {
            *v += o;
        }
        s
    }

    pub fn sub(&self, other: &Spinor4) -> Self {
        let mut s = *self;
        for (v, o) in s.0.iter_mut().zip(other.0) {
            *v -= o;
        }
        s
    }

    pub fn scale(&self, factor: C) -> Self {
        let mut s = *self;
        for v in &mut s.0 {
            *v *= factor;
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn pauli(k: usize) -> [[C; 2]; 2] {
    let zero = C::new(0.0, 0.0);
    match k {
        1 => [[zero, ONE], [ONE, zero]],
        2 => [[zero, -IM], [IM, zero]],
        3 => [[ONE, zero], [zero, -ONE]],
        _ => unreachable!(),
    }
}

/// The standard Dirac-Pauli matrices `g^0 .. g^3` (upper index): `g^0`
/// diagonal and hermitian, `g^k` anti-hermitian, `{g^mu, g^nu} = 2 eta Id`
/// with `eta = diag(+1, -1, -1, -1)`.
pub fn gamma_matrices() -> [Matrix4; 4] {
    let mut g0 = Matrix4::ZERO;
    g0.0[0][0] = ONE;
    g0.0[1][1] = ONE;
    g0.0[2][2] = -ONE;
    g0.0[3][3] = -ONE;
    let mut out = [g0, Matrix4::ZERO, Matrix4::ZERO, Matrix4::ZERO];
    for k in 1..4 {
        let s = pauli(k);
        let mut m = Matrix4::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j + 2] = s[i][j];
                m.0[i + 2][j] = -s[i][j];
            }
        }
        out[k] = m;
    }
    out
}

/// The lower-index matrices `g_0 = g^0`, `g_k = -g^k`: the faithful matrix
/// representation of the algebra generators used by [`matrix_rep`].
pub fn generator_matrices() -> [Matrix4; 4] {
    let [g0, g1, g2, g3] = gamma_matrices();
    [g0, g1.scale(-ONE), g2.scale(-ONE), g3.scale(-ONE)]
}

/// Algebra homomorphism from multivectors to 4x4 complex matrices:
/// each basis blade maps to the ordered product of its generator matrices.
pub fn matrix_rep(mv: &Multivector) -> Matrix4 {
    let gens = generator_matrices();
    let mut out = Matrix4::ZERO;
    for blade in BladeIndex::all() {
        let coeff = mv.coeff(blade);
        if coeff == 0.0 {
            continue;
        }
        let mut m = Matrix4::identity();
        for b in 0..4 {
            if blade.mask() >> b & 1 == 1 {
                m = m.matmul(&gens[b]);
            }
        }
        out = out.add(&m.scale(C::new(coeff, 0.0)));
    }
    out
}

/// Amplitude/phase constants of the four scalar components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConstants {
    pub amplitudes: [f64; 4],
    pub phases: [f64; 4],
}

impl PhaseConstants {
    /// The canonical choice `u = (1, 0, 0, 0)`.
    pub fn u() -> Self {
        PhaseConstants { amplitudes: [1.0, 0.0, 0.0, 0.0], phases: [0.0; 4] }
    }

    /// Amplitude 1 on component `j` only.
    pub fn standard_column(j: usize) -> Self {
        let mut amplitudes = [0.0; 4];
        amplitudes[j] = 1.0;
        PhaseConstants { amplitudes, phases: [0.0; 4] }
    }

    pub fn column(&self) -> Spinor4 {
        let mut s = Spinor4::ZERO;
        for j in 0..4 {
            s.0[j] = C::from_polar(self.amplitudes[j], self.phases[j]);
        }
        s
    }
}

/// A spinor-valued function of spacetime with closed-form partials
/// `(d/dt, d/dx, d/dy, d/dz)`.
pub trait SpinorField {
    fn params(&self) -> &FieldParams;
    fn value(&self, p: &SpacetimePoint) -> Result<Spinor4>;
    fn partials(&self, p: &SpacetimePoint) -> Result<[Spinor4; 4]>;
}

/// The scalar 4-tuple `phi_j = a exp(iS/hbar) A_j exp(i theta_j)`, a
/// component-wise Klein-Gordon solution.
pub struct KogaPhi {
    pub params: FieldParams,
    pub pc: PhaseConstants,
}

impl SpinorField for KogaPhi {
    fn params(&self) -> &FieldParams {
        &self.params
    }

    fn value(&self, p: &SpacetimePoint) -> Result<Spinor4> {
        let a = amplitude_a(&self.params, p.r())?;
        let phase = C::from_polar(a, scalar_s(&self.params, p.t) / self.params.hbar());
        Ok(self.pc.column().scale(phase))
    }

    fn partials(&self, p: &SpacetimePoint) -> Result<[Spinor4; 4]> {
        let value = self.value(p)?;
        let rv = r_vector(&self.params, p)?;
        let dt = value.scale(-IM * C::new(self.params.ec() / self.params.hbar(), 0.0));
        // d_k phi = -R_k phi
        let spatial = |k: usize| value.scale(C::new(-rv[k], 0.0));
        Ok([dt, spatial(0), spatial(1), spatial(2)])
    }
}

/// Evaluate `phi` directly.
pub fn koga_phi(params: &FieldParams, p: &SpacetimePoint, pc: &PhaseConstants) -> Result<Spinor4> {
    KogaPhi { params: *params, pc: *pc }.value(p)
}

/// Which first-order operator: `D0` carries `-mc^2`, `D1` carries `+mc^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiracOp {
    D0,
    D1,
}

impl DiracOp {
    fn mass_sign(self) -> f64 {
        match self {
            DiracOp::D0 => -1.0,
            DiracOp::D1 => 1.0,
        }
    }

    /// The operator whose kernel contains images of this one.
    pub fn partner(self) -> DiracOp {
        match self {
            DiracOp::D0 => DiracOp::D1,
            DiracOp::D1 => DiracOp::D0,
        }
    }
}

/// The closed-form image `D phi` for either operator and any phase constants:
/// `a exp(iS/hbar) {Ec g^0 +/- mc^2 - i hbar c (Rx g^1 + Ry g^2 + Rz g^3)} col`.
pub struct PsiMatrix {
    pub params: FieldParams,
    pub pc: PhaseConstants,
    pub op: DiracOp,
}

impl PsiMatrix {
    fn braces(&self, rv: [f64; 3]) -> Matrix4 {
        let [g0, g1, g2, g3] = gamma_matrices();
        let hc = self.params.hbar() * self.params.c();
        g0.scale(C::new(self.params.ec(), 0.0))
            .add(&Matrix4::identity().scale(C::new(self.op.mass_sign() * self.params.rest_energy(), 0.0)))
            .add(&g1.scale(-IM * C::new(hc * rv[0], 0.0)))
            .add(&g2.scale(-IM * C::new(hc * rv[1], 0.0)))
            .add(&g3.scale(-IM * C::new(hc * rv[2], 0.0)))
    }
}

impl SpinorField for PsiMatrix {
    fn params(&self) -> &FieldParams {
        &self.params
    }

    fn value(&self, p: &SpacetimePoint) -> Result<Spinor4> {
        let a = amplitude_a(&self.params, p.r())?;
        let rv = r_vector(&self.params, p)?;
        let phase = C::from_polar(a, scalar_s(&self.params, p.t) / self.params.hbar());
        Ok(self.braces(rv).apply(&self.pc.column()).scale(phase))
    }

    fn partials(&self, p: &SpacetimePoint) -> Result<[Spinor4; 4]> {
        let value = self.value(p)?;
        let r = p.r();
        let a = amplitude_a(&self.params, r)?;
        let rv = r_vector(&self.params, p)?;
        let phase = C::from_polar(a, scalar_s(&self.params, p.t) / self.params.hbar());
        let dt = value.scale(-IM * C::new(self.params.ec() / self.params.hbar(), 0.0));

        let [_, g1, g2, g3] = gamma_matrices();
        let hc = self.params.hbar() * self.params.c();
        let f = 1.0 / (r * r) + self.params.kappa() / r;
        let f_prime = -2.0 / (r * r * r) - self.params.kappa() / (r * r);
        let coords = [p.x, p.y, p.z];
        let col = self.pc.column();

        let mut out = [dt, Spinor4::ZERO, Spinor4::ZERO, Spinor4::ZERO];
        for j in 0..3 {
            // amplitude factor: (a'/a)(x_j / r) = -R_j
            let radial = value.scale(C::new(-rv[j], 0.0));
            let dr = |k: usize| {
                let mut d = coords[k] * coords[j] * f_prime / r;
                if k == j {
                    d += f;
                }
                d
            };
            let dbraces = g1
                .scale(-IM * C::new(hc * dr(0), 0.0))
                .add(&g2.scale(-IM * C::new(hc * dr(1), 0.0)))
                .add(&g3.scale(-IM * C::new(hc * dr(2), 0.0)));
            out[j + 1] = radial.add(&dbraces.apply(&col).scale(phase));
        }
        Ok(out)
    }
}

/// The closed-form solution of the matrix Dirac equation, `D1 phi`.
pub fn evaluate_psi_matrix(
    params: &FieldParams,
    p: &SpacetimePoint,
    pc: &PhaseConstants,
) -> Result<Spinor4> {
    PsiMatrix { params: *params, pc: *pc, op: DiracOp::D1 }.value(p)
}

/// Apply `D0` or `D1` to a spinor field, analytically or by central differences.
pub fn apply_dirac_operator(
    which: DiracOp,
    field: &dyn SpinorField,
    p: &SpacetimePoint,
    mode: DerivMode,
) -> Result<Spinor4> {
    let partials = match mode {
        DerivMode::Analytic => field.partials(p)?,
        DerivMode::Fd { h } => fd_partials(field, p, h)?,
    };
    let [g0, g1, g2, g3] = gamma_matrices();
    let value = field.value(p)?;
    let params = field.params();
    let (hbar, c, mc2) = (params.hbar(), params.c(), params.rest_energy());
    // i hbar g^0 d_t + i hbar c g^k d_k +/- mc^2
    let mut out = g0.apply(&partials[0]).scale(IM * C::new(hbar, 0.0));
    out = out.add(&g1.apply(&partials[1]).scale(IM * C::new(hbar * c, 0.0)));
    out = out.add(&g2.apply(&partials[2]).scale(IM * C::new(hbar * c, 0.0)));
    out = out.add(&g3.apply(&partials[3]).scale(IM * C::new(hbar * c, 0.0)));
    Ok(out.add(&value.scale(C::new(which.mass_sign() * mc2, 0.0))))
}

fn fd_partials(field: &dyn SpinorField, p: &SpacetimePoint, h: f64) -> Result<[Spinor4; 4]> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::BadStep { h, reason: "step must be positive and finite".into() });
    }
    if h < MIN_FD_STEP {
        return Err(Error::BadStep { h, reason: "step below the cancellation floor".into() });
    }
    let at = |t: f64, x: f64, y: f64, z: f64| field.value(&SpacetimePoint::new(t, x, y, z));
    let diff = |plus: Spinor4, minus: Spinor4| plus.sub(&minus).scale(C::new(0.5 / h, 0.0));
    Ok([
        diff(at(p.t + h, p.x, p.y, p.z)?, at(p.t - h, p.x, p.y, p.z)?),
        diff(at(p.t, p.x + h, p.y, p.z)?, at(p.t, p.x - h, p.y, p.z)?),
        diff(at(p.t, p.x, p.y + h, p.z)?, at(p.t, p.x, p.y - h, p.z)?),
        diff(at(p.t, p.x, p.y, p.z + h)?, at(p.t, p.x, p.y, p.z - h)?),
    ])
}

/// Relative deviation between the two formulations through the column map:
/// `|matrix_rep(psi_sta) u - psi_matrix| / |psi_matrix|`.
pub fn hestenes_map_residual(params: &FieldParams, p: &SpacetimePoint) -> Result<f64> {
    let psi_sta = evaluate_psi_sta(params, p)?;
    let mapped = matrix_rep(&psi_sta).apply(&Spinor4::standard_column(0));
    let direct = evaluate_psi_matrix(params, p, &PhaseConstants::u())?;
    let denom = direct.norm();
    if denom == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(mapped.sub(&direct).norm() / denom)
}

/// The four closed-form solutions: `D1 phi` with columns `e1`, `e2` (kernel of
/// `D0`) and `D0 phi` with columns `e1`, `e2` (kernel of `D1`).
pub fn solution_family(params: &FieldParams, p: &SpacetimePoint) -> Result<[Spinor4; 4]> {
    let member = |op: DiracOp, j: usize| {
        PsiMatrix { params: *params, pc: PhaseConstants::standard_column(j), op }.value(p)
    };
    Ok([
        member(DiracOp::D1, 0)?,
        member(DiracOp::D1, 1)?,
        member(DiracOp::D0, 0)?,
        member(DiracOp::D0, 1)?,
    ])
}

/// The field each family member annihilates, in order.
pub fn family_operators() -> [DiracOp; 4] {
    [DiracOp::D0, DiracOp::D0, DiracOp::D1, DiracOp::D1]
}

/// Build the family member fields themselves (for residual checks).
pub fn family_fields(params: &FieldParams) -> [PsiMatrix; 4] {
    [
        PsiMatrix { params: *params, pc: PhaseConstants::standard_column(0), op: DiracOp::D1 },
        PsiMatrix { params: *params, pc: PhaseConstants::standard_column(1), op: DiracOp::D1 },
        PsiMatrix { params: *params, pc: PhaseConstants::standard_column(0), op: DiracOp::D0 },
        PsiMatrix { params: *params, pc: PhaseConstants::standard_column(1), op: DiracOp::D0 },
    ]
}
