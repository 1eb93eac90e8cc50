//! The real spacetime algebra Cl(1,3).
//!
//! Basis blades are indexed by a 4-bit mask: bit `b` set means the generator
//! `gamma_b` appears in the canonical (ascending-index) product. Mask 0 is the
//! scalar, mask 15 the pseudoscalar `I = g0 g1 g2 g3`. The metric signature is
//! (+, -, -, -), so `g0^2 = +1` and `gk^2 = -1` for k = 1, 2, 3, with distinct
//! generators anticommuting. All blade-level signs are computed in integer
//! arithmetic and cached in a 16x16 table.

use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::{Error, Result};

/// Number of basis blades.
pub const DIM: usize = 16;

/// Tolerance for the `B^2 = -1` precondition of [`exp_neg_square`] and the
/// unit-rotor precondition of [`rotor_sandwich`].
pub const UNIT_TOL: f64 = 1e-12;

/// A basis blade of Cl(1,3), identified by its generator mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BladeIndex(u8);

impl BladeIndex {
    pub const SCALAR: BladeIndex = BladeIndex(0);
    pub const PSEUDOSCALAR: BladeIndex = BladeIndex(15);

    pub const fn new(mask: u8) -> Self {
        assert!(mask < 16, "blade mask out of range");
        BladeIndex(mask)
    }

    pub const fn mask(self) -> u8 {
        self.0
    }

    /// Number of generators in the blade, in 0..=4.
    pub const fn grade(self) -> u32 {
        self.0.count_ones()
    }

    pub fn all() -> impl Iterator<Item = BladeIndex> {
        (0u8..16).map(BladeIndex)
    }
}

/// Column names for the 16 coefficients, in mask order.
pub const BLADE_NAMES: [&str; DIM] = [
    "s", "g0", "g1", "g0g1", "g2", "g0g2", "g1g2", "g0g1g2", "g3", "g0g3", "g1g3", "g0g1g3",
    "g2g3", "g0g2g3", "g1g2g3", "I",
];

// Sign from reordering the concatenated generator list of `a` then `b`
// into ascending order (each transposition of distinct generators flips it).
const fn reorder_sign(a: u8, b: u8) -> i8 {
    let mut rest = a >> 1;
    let mut swaps = 0u32;
    while rest != 0 {
        swaps += (rest & b).count_ones();
        rest >>= 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

// Shared generators square out; g1..g3 each contribute -1.
const fn metric_sign(a: u8, b: u8) -> i8 {
    if (a & b & 0b1110).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

const fn build_table() -> [[(i8, u8); DIM]; DIM] {
    let mut table = [[(0i8, 0u8); DIM]; DIM];
    let mut a = 0;
    while a < DIM {
        let mut b = 0;
        while b < DIM {
            let sign = reorder_sign(a as u8, b as u8) * metric_sign(a as u8, b as u8);
            table[a][b] = (sign, (a ^ b) as u8);
            b += 1;
        }
        a += 1;
    }
    table
}

const PRODUCT_TABLE: [[(i8, u8); DIM]; DIM] = build_table();

/// Geometric product of two basis blades: sign and resulting canonical blade.
pub const fn blade_product(a: BladeIndex, b: BladeIndex) -> (i8, BladeIndex) {
    let (sign, mask) = PRODUCT_TABLE[a.0 as usize][b.0 as usize];
    (sign, BladeIndex(mask))
}

/// A general multivector: 16 real coefficients over the canonical blade basis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Multivector(pub [f64; DIM]);

impl Multivector {
    pub const ZERO: Multivector = Multivector([0.0; DIM]);

    pub fn scalar(value: f64) -> Self {
        let mut c = [0.0; DIM];
        c[0] = value;
        Multivector(c)
    }

    pub fn basis(blade: BladeIndex) -> Self {
        let mut c = [0.0; DIM];
        c[blade.0 as usize] = 1.0;
        Multivector(c)
    }

    /// Generator `gamma_i`, i in 0..=3.
    pub fn gamma(i: usize) -> Self {
        assert!(i < 4);
        Self::basis(BladeIndex::new(1 << i))
    }

    /// The pseudoscalar `I = g0 g1 g2 g3`.
    pub fn pseudoscalar() -> Self {
        Self::basis(BladeIndex::PSEUDOSCALAR)
    }

    /// `sigma_k = gamma_k gamma_0`, k in 1..=3.
    pub fn sigma(k: usize) -> Self {
        assert!((1..=3).contains(&k));
        Self::gamma(k) * Self::gamma(0)
    }

    /// `I sigma_3 = g2 g1`, the generator of rotations in the sigma1-sigma2 plane.
    pub fn i_sigma3() -> Self {
        Self::pseudoscalar() * Self::sigma(3)
    }

    pub fn coeff(&self, blade: BladeIndex) -> f64 {
        self.0[blade.0 as usize]
    }

    pub fn scalar_part(&self) -> f64 {
        self.0[0]
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut c = self.0;
        for v in &mut c {
            *v *= factor;
        }
        Multivector(c)
    }

    /// Zero every coefficient whose blade grade differs from `k`.
    pub fn grade_project(&self, k: u32) -> Self {
        let mut c = [0.0; DIM];
        for b in BladeIndex::all() {
            if b.grade() == k {
                c[b.0 as usize] = self.0[b.0 as usize];
            }
        }
        Multivector(c)
    }

    /// Reversion: each grade-k blade picks up (-1)^(k(k-1)/2).
    pub fn reverse(&self) -> Self {
        let mut c = self.0;
        for b in BladeIndex::all() {
            let k = b.grade();
            if (k * k.saturating_sub(1) / 2) % 2 == 1 {
                c[b.0 as usize] = -c[b.0 as usize];
            }
        }
        Multivector(c)
    }

    /// Coefficient 2-norm over the 16 blades.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// True when every odd-grade coefficient vanishes exactly.
    pub fn is_even(&self) -> bool {
        BladeIndex::all().all(|b| b.grade() % 2 == 0 || self.0[b.0 as usize] == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Norm-based comparison with caller-supplied absolute and relative tolerances.
    pub fn approx_eq(&self, other: &Multivector, abs_tol: f64, rel_tol: f64) -> bool {
        let diff = (*self - *other).norm();
        diff <= abs_tol + rel_tol * self.norm().max(other.norm())
    }
}

impl Index<BladeIndex> for Multivector {
    type Output = f64;

    fn index(&self, blade: BladeIndex) -> &f64 {
        &self.0[blade.0 as usize]
    }
}

impl Add for Multivector {
    type Output = Multivector;

    fn add(self, rhs: Multivector) -> Multivector {
        let mut c = self.0;
        for (v, r) in c.iter_mut().zip(rhs.0) {
            *v += r;
        }
        Multivector(c)
    }
}

impl Sub for Multivector {
    type Output = Multivector;

    fn sub(self, rhs: Multivector) -> Multivector {
        let mut c = self.0;
        for (v, r) in c.iter_mut().zip(rhs.0) {
            *v -= r;
        }
        Multivector(c)
    }
}

impl Neg for Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

/// Geometric product, the bilinear extension of [`blade_product`].
impl Mul for Multivector {
    type Output = Multivector;

    fn mul(self, rhs: Multivector) -> Multivector {
        let mut c = [0.0; DIM];
        for a in 0..DIM {
            let ca = self.0[a];
            if ca == 0.0 {
                continue;
            }
            for b in 0..DIM {
                let cb = rhs.0[b];
                if cb == 0.0 {
                    continue;
                }
                let (sign, mask) = PRODUCT_TABLE[a][b];
                c[mask as usize] += sign as f64 * ca * cb;
            }
        }
        Multivector(c)
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;

    fn mul(self, rhs: f64) -> Multivector {
        self.scale(rhs)
    }
}

/// `exp(B theta) = cos(theta) + B sin(theta)` for a blade-like element with
/// `B^2 = -1`. The square is checked to [`UNIT_TOL`]; anything else is rejected
/// (the general multivector exponential is out of scope).
pub fn exp_neg_square(bivector: &Multivector, theta: f64) -> Result<Multivector> {
    let square = *bivector * *bivector;
    let deviation = (square + Multivector::scalar(1.0)).norm();
    if deviation > UNIT_TOL {
        return Err(Error::NotUnitBivector { deviation });
    }
    Ok(Multivector::scalar(theta.cos()) + bivector.scale(theta.sin()))
}

/// `R v R~` for a unit rotor R. Grade-preserving; rejects non-unit R.
pub fn rotor_sandwich(rotor: &Multivector, v: &Multivector) -> Result<Multivector> {
    let deviation = (*rotor * rotor.reverse() - Multivector::scalar(1.0)).norm();
    if deviation > UNIT_TOL {
        return Err(Error::NonUnitRotor { deviation });
    }
    Ok(*rotor * *v * rotor.reverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(i: usize) -> Multivector {
        Multivector::gamma(i)
    }

    #[test]
    fn generator_squares_follow_the_metric() {
        assert_eq!(blade_product(BladeIndex::new(1), BladeIndex::new(1)), (1, BladeIndex::SCALAR));
        for k in 1..4u8 {
            let b = BladeIndex::new(1 << k);
            assert_eq!(blade_product(b, b), (-1, BladeIndex::SCALAR));
        }
    }

    #[test]
    fn distinct_generators_anticommute() {
        let g1 = BladeIndex::new(0b0010);
        let g2 = BladeIndex::new(0b0100);
        assert_eq!(blade_product(g1, g2), (1, BladeIndex::new(0b0110)));
        assert_eq!(blade_product(g2, g1), (-1, BladeIndex::new(0b0110)));
    }

    #[test]
    fn g2g1_squares_to_minus_one() {
        // (g2 g1)^2 = -1; needed for the phase rotor exp(I sigma3 theta).
        let g2g1 = g(2) * g(1);
        assert_eq!((g2g1 * g2g1).0, Multivector::scalar(-1.0).0);
    }

    #[test]
    fn pseudoscalar_is_product_of_sigmas() {
        let sigma_product = Multivector::sigma(1) * Multivector::sigma(2) * Multivector::sigma(3);
        assert_eq!(sigma_product.0, Multivector::pseudoscalar().0);
        assert_eq!((Multivector::pseudoscalar() * Multivector::pseudoscalar()).0, Multivector::scalar(-1.0).0);
    }

    #[test]
    fn i_sigma3_is_g2g1() {
        assert_eq!(Multivector::i_sigma3().0, (g(2) * g(1)).0);
        let isig3 = Multivector::i_sigma3();
        assert_eq!((isig3 * isig3).0, Multivector::scalar(-1.0).0);
    }

    #[test]
    fn idempotent_pair_annihilates() {
        let a = Multivector::scalar(1.0) + g(0);
        let b = Multivector::scalar(1.0) - g(0);
        assert_eq!((a * b).norm(), 0.0);
    }

    #[test]
    fn grade_projection_examples() {
        let a = Multivector::scalar(2.0) + g(2) * g(0);
        assert_eq!(a.grade_project(2).0, (g(2) * g(0)).0);
        assert_eq!(Multivector::pseudoscalar().grade_project(4).0, Multivector::pseudoscalar().0);
    }

    #[test]
    fn reverse_examples() {
        assert_eq!((g(1) * g(2)).reverse().0, (-(g(1) * g(2))).0);
        assert_eq!(Multivector::scalar(3.5).reverse().0, Multivector::scalar(3.5).0);
    }

    #[test]
    fn pseudoscalar_commutation_by_grade() {
        // I commutes with even blades, anticommutes with odd ones.
        let i = Multivector::pseudoscalar();
        for b in BladeIndex::all() {
            let v = Multivector::basis(b);
            let comm = i * v - v * i;
            if b.grade() % 2 == 0 {
                assert_eq!(comm.norm(), 0.0, "I should commute with grade {}", b.grade());
            } else {
                assert_eq!((i * v + v * i).norm(), 0.0, "I should anticommute with grade {}", b.grade());
            }
        }
    }

    #[test]
    fn exp_examples() {
        let isig3 = Multivector::i_sigma3();
        assert_eq!(exp_neg_square(&isig3, 0.0).unwrap().0, Multivector::scalar(1.0).0);
        let quarter = exp_neg_square(&isig3, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(quarter.approx_eq(&(g(2) * g(1)), 1e-15, 0.0));
    }

    #[test]
    fn exp_rejects_non_unit_square() {
        let bad = Multivector::scalar(1.0) + g(1);
        assert!(matches!(exp_neg_square(&bad, 1.0), Err(Error::NotUnitBivector { .. })));
    }

    #[test]
    fn sandwich_identity_rotor() {
        let v = g(1) * g(0) + Multivector::scalar(0.5);
        let out = rotor_sandwich(&Multivector::scalar(1.0), &v).unwrap();
        assert_eq!(out.0, v.0);
    }

    #[test]
    fn sandwich_rejects_non_unit_rotor() {
        let r = Multivector::scalar(2.0);
        assert!(matches!(rotor_sandwich(&r, &g(1)), Err(Error::NonUnitRotor { .. })));
    }

    #[test]
    fn i_sigma3_rotor_fixes_sigma3_and_rotates_the_plane() {
        let isig3 = Multivector::i_sigma3();
        let rotor = exp_neg_square(&isig3, std::f64::consts::FRAC_PI_4).unwrap();
        let s3 = rotor_sandwich(&rotor, &Multivector::sigma(3)).unwrap();
        assert!(s3.approx_eq(&Multivector::sigma(3), 1e-14, 0.0));
        let s1 = rotor_sandwich(&rotor, &Multivector::sigma(1)).unwrap();
        assert!((s1.norm() - 1.0).abs() < 1e-14);
        // lands in the sigma1/sigma2 plane
        let outside = s1
            - Multivector::basis(BladeIndex::new(0b0011)).scale(s1.coeff(BladeIndex::new(0b0011)))
            - Multivector::basis(BladeIndex::new(0b0101)).scale(s1.coeff(BladeIndex::new(0b0101)));
        assert!(outside.norm() < 1e-14);
    }

    fn arb_mv() -> impl Strategy<Value = Multivector> {
        prop::array::uniform16(-5.0f64..5.0).prop_map(Multivector)
    }

    proptest! {
        #[test]
        fn product_is_associative(a in arb_mv(), b in arb_mv(), c in arb_mv()) {
            let left = (a * b) * c;
            let right = a * (b * c);
            prop_assert!(left.approx_eq(&right, 1e-9, 1e-12));
        }

        #[test]
        fn grade_projections_partition(a in arb_mv()) {
            let sum = (0..=4).fold(Multivector::ZERO, |acc, k| acc + a.grade_project(k));
            prop_assert_eq!(sum.0, a.0);
        }

        #[test]
        fn reversion_is_an_anti_automorphism(a in arb_mv(), b in arb_mv()) {
            let left = (a * b).reverse();
            let right = b.reverse() * a.reverse();
            prop_assert!(left.approx_eq(&right, 1e-9, 1e-12));
        }

        #[test]
        fn even_subalgebra_is_closed(a in arb_mv(), b in arb_mv()) {
            let ae = a.grade_project(0) + a.grade_project(2) + a.grade_project(4);
            let be = b.grade_project(0) + b.grade_project(2) + b.grade_project(4);
            prop_assert!((ae * be).is_even());
        }

        #[test]
        fn exp_satisfies_the_group_law(theta in -6.0f64..6.0, phi in -6.0f64..6.0) {
            let isig3 = Multivector::i_sigma3();
            let composed = exp_neg_square(&isig3, theta).unwrap() * exp_neg_square(&isig3, phi).unwrap();
            let direct = exp_neg_square(&isig3, theta + phi).unwrap();
            prop_assert!(composed.approx_eq(&direct, 1e-12, 1e-12));
        }

        #[test]
        fn i_sigma3_rotors_fix_sigma3(theta in -6.0f64..6.0) {
            let rotor = exp_neg_square(&Multivector::i_sigma3(), theta).unwrap();
            let out = rotor_sandwich(&rotor, &Multivector::sigma(3)).unwrap();
            prop_assert!(out.approx_eq(&Multivector::sigma(3), 1e-12, 1e-12));
        }
    }
}
