//! Exact octonions and the three 8-dimensional actions of spin elements.
//!
//! Basis `e_0 = 1, e_1, …, e_7` with `e_i e_j = a_{ijk} e_k - δ_{ij}` where
//! `a_{ijk}` is totally antisymmetric and equals 1 on the triples
//! 123, 154, 264, 374, 176, 257, 365.
//!
//! A spin element is kept as its list of Clifford factors `b_1 … b_n`; only
//! the matrix images
//!
//! * `ρ_V(u) = U_{b_1} ⋯ U_{b_n}` with `U_b = L_b R_b`,
//! * `ρ_L(u) = L_{b_1} ⋯ L_{b_n}`,
//! * `ρ_R(u) = R_{b_1} ⋯ R_{b_n}`
//!
//! are modeled, each rescaled by the unique positive scalar that makes it
//! orthogonal.

use alloc::vec::Vec;
use core::array;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{divisors, mobius};
use crate::eta::CycleShape;
use crate::series::{rational_from_int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpinError {
    #[error("spin factor {0} has zero norm")]
    ZeroFactor(usize),
    #[error("normalizing scalar is irrational (squared scale {0})")]
    IrrationalNormalizer(Rational),
    #[error("composite map is not a scalar multiple of an orthogonal map")]
    NotConformal,
    #[error("matrix order exceeds {0}")]
    OrderExceedsCap(u32),
    #[error("matrix is not a product of cyclotomic blocks (x^a - 1)^b")]
    NotProductOfCyclotomicBlocks,
    #[error("L_b R_b and R_b L_b differ for factor {0}")]
    NonCommutingBimultiplication(usize),
}

/// Signed structure constants: `STRUCTURE[i][j] = (k, sign)` for `e_i e_j = sign·e_k`.
const TRIPLES: [[usize; 3]; 7] = [[1, 2, 3], [1, 5, 4], [2, 6, 4], [3, 7, 4], [1, 7, 6], [2, 5, 7], [3, 6, 5]];

fn basis_product(i: usize, j: usize) -> (usize, i64) {
    if i == 0 {
        return (j, 1);
    }
    if j == 0 {
        return (i, 1);
    }
    if i == j {
        return (0, -1);
    }
    for t in TRIPLES {
        for r in 0..3 {
            let (a, b, c) = (t[r], t[(r + 1) % 3], t[(r + 2) % 3]);
            if (a, b) == (i, j) {
                return (c, 1);
            }
            if (b, a) == (i, j) {
                return (c, -1);
            }
        }
    }
    unreachable!("every pair of distinct imaginary units lies on one triple")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Octonion(pub [Rational; 8]);

impl Octonion {
    pub fn zero() -> Self {
        Octonion(array::from_fn(|_| Rational::zero()))
    }

    pub fn one() -> Self {
        Self::basis(0)
    }

    pub fn basis(i: usize) -> Self {
        let mut c = Self::zero();
        c.0[i] = Rational::one();
        c
    }

    pub fn from_ints(c: [i64; 8]) -> Self {
        Octonion(c.map(rational_from_int))
    }

    /// Quadratic form `N(a) = Σ a_i²`.
    pub fn norm(&self) -> Rational {
        self.0.iter().map(|c| c * c).fold(Rational::zero(), |a, b| a + b)
    }

    pub fn conj(&self) -> Self {
        let mut c = self.clone();
        for x in c.0.iter_mut().skip(1) {
            *x = -x.clone();
        }
        c
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Octonion(array::from_fn(|i| &self.0[i] * s))
    }
}

impl Mul for &Octonion {
    type Output = Octonion;

    fn mul(self, rhs: &Octonion) -> Octonion {
        let mut out = Octonion::zero();
        for i in 0..8 {
            if self.0[i].is_zero() {
                continue;
            }
            for j in 0..8 {
                if rhs.0[j].is_zero() {
                    continue;
                }
                let (k, s) = basis_product(i, j);
                let t = &self.0[i] * &rhs.0[j];
                if s > 0 {
                    out.0[k] += t;
                } else {
                    out.0[k] -= t;
                }
            }
        }
        out
    }
}

impl Add for &Octonion {
    type Output = Octonion;

    fn add(self, rhs: &Octonion) -> Octonion {
        Octonion(array::from_fn(|i| &self.0[i] + &rhs.0[i]))
    }
}

impl Sub for &Octonion {
    type Output = Octonion;

    fn sub(self, rhs: &Octonion) -> Octonion {
        Octonion(array::from_fn(|i| &self.0[i] - &rhs.0[i]))
    }
}

impl Neg for &Octonion {
    type Output = Octonion;

    fn neg(self) -> Octonion {
        Octonion(array::from_fn(|i| -&self.0[i]))
    }
}

/// Exact 8×8 rational matrix acting on column vectors of octonion coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix8(pub [[Rational; 8]; 8]);

impl Matrix8 {
    pub fn zero() -> Self {
        Matrix8(array::from_fn(|_| array::from_fn(|_| Rational::zero())))
    }

    pub fn identity() -> Self {
        Matrix8(array::from_fn(|i| array::from_fn(|j| if i == j { Rational::one() } else { Rational::zero() })))
    }

    /// Matrix of a linear map given by its action on basis vectors.
    pub fn from_map<F: Fn(&Octonion) -> Octonion>(f: F) -> Self {
        let cols: Vec<Octonion> = (0..8).map(|j| f(&Octonion::basis(j))).collect();
        Matrix8(array::from_fn(|i| array::from_fn(|j| cols[j].0[i].clone())))
    }

    pub fn left_mul(b: &Octonion) -> Self {
        Self::from_map(|x| b * x)
    }

    pub fn right_mul(b: &Octonion) -> Self {
        Self::from_map(|x| x * b)
    }

    pub fn apply(&self, x: &Octonion) -> Octonion {
        Octonion(array::from_fn(|i| {
            (0..8).fold(Rational::zero(), |acc, j| acc + &self.0[i][j] * &x.0[j])
        }))
    }

    pub fn transpose(&self) -> Self {
        Matrix8(array::from_fn(|i| array::from_fn(|j| self.0[j][i].clone())))
    }

    pub fn trace(&self) -> Rational {
        (0..8).fold(Rational::zero(), |acc, i| acc + &self.0[i][i])
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Matrix8(array::from_fn(|i| array::from_fn(|j| &self.0[i][j] * s)))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn is_orthogonal(&self) -> bool {
        (&self.transpose() * self).is_identity()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficients (constant term first) of `det(x·I - M)`, by Faddeev–LeVerrier.
    pub fn char_poly(&self) -> Vec<Rational> {
        let n = 8usize;
        let mut coeffs = alloc::vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut m = Self::zero();
        for k in 1..=n {
            let mut next = self * &m;
            for i in 0..n {
                next.0[i][i] += &coeffs[n - k + 1];
            }
            m = next;
            let am = self * &m;
            coeffs[n - k] = -(am.trace() / rational_from_int(k as i64));
        }
        coeffs
    }

    /// Permutation `i -> j` of basis vectors, if the matrix is one.
    pub fn as_permutation(&self) -> Option<[usize; 8]> {
        let mut out = [0usize; 8];
        for (j, slot) in out.iter_mut().enumerate() {
            let mut target = None;
            for i in 0..8 {
                let v = &self.0[i][j];
                if v.is_one() && target.is_none() {
                    target = Some(i);
                } else if !v.is_zero() {
                    return None;
                }
            }
            *slot = target?;
        }
        Some(out)
    }
}

impl Mul for &Matrix8 {
    type Output = Matrix8;

    fn mul(self, rhs: &Matrix8) -> Matrix8 {
        Matrix8(array::from_fn(|i| {
            array::from_fn(|j| (0..8).fold(Rational::zero(), |acc, k| acc + &self.0[i][k] * &rhs.0[k][j]))
        }))
    }
}

impl fmt::Display for Matrix8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

/// Element `1b_1 ⋯ 1b_n` of the even Clifford group, kept as its factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinElement {
    factors: Vec<Octonion>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Vector,
    Left,
    Right,
}

impl SpinElement {
    pub fn new(factors: Vec<Octonion>) -> Self {
        assert!(factors.len() % 2 == 0, "a spin element has an even number of factors");
        SpinElement { factors }
    }

    pub fn identity() -> Self {
        SpinElement { factors: Vec::new() }
    }

    pub fn factors(&self) -> &[Octonion] {
        &self.factors
    }

    /// `∏ N(b_i)`.
    pub fn norm_product(&self) -> Rational {
        self.factors.iter().fold(Rational::one(), |acc, b| acc * b.norm())
    }

    /// Unnormalized composite of the per-factor operators, rightmost factor
    /// applied first.
    fn raw(&self, action: Action) -> Result<Matrix8, SpinError> {
        let mut m = Matrix8::identity();
        for (i, b) in self.factors.iter().enumerate() {
            if b.norm().is_zero() {
                return Err(SpinError::ZeroFactor(i));
            }
            let op = match action {
                Action::Left => Matrix8::left_mul(b),
                Action::Right => Matrix8::right_mul(b),
                Action::Vector => {
                    let l = Matrix8::left_mul(b);
                    let r = Matrix8::right_mul(b);
                    let lr = &l * &r;
                    if lr != &r * &l {
                        return Err(SpinError::NonCommutingBimultiplication(i));
                    }
                    lr
                }
            };
            m = &m * &op;
        }
        Ok(m)
    }

    /// Positive scalar `c` with `c·raw` orthogonal.
    pub fn normalizer(&self, action: Action) -> Result<Rational, SpinError> {
        let raw = self.raw(action)?;
        conformal_normalizer(&raw)
    }

    pub fn rho(&self, action: Action) -> Result<Matrix8, SpinError> {
        let raw = self.raw(action)?;
        let c = conformal_normalizer(&raw)?;
        Ok(raw.scale(&c))
    }

    pub fn rho_v(&self) -> Result<Matrix8, SpinError> {
        self.rho(Action::Vector)
    }

    pub fn rho_l(&self) -> Result<Matrix8, SpinError> {
        self.rho(Action::Left)
    }

    pub fn rho_r(&self) -> Result<Matrix8, SpinError> {
        self.rho(Action::Right)
    }
}

/// For `M` with `MᵀM = s·I`, returns `1/√s`.
fn conformal_normalizer(m: &Matrix8) -> Result<Rational, SpinError> {
    let mtm = &m.transpose() * m;
    let s = mtm.0[0][0].clone();
    if s.is_zero() || mtm != Matrix8::identity().scale(&s) {
        return Err(SpinError::NotConformal);
    }
    let root = rational_sqrt(&s).ok_or_else(|| SpinError::IrrationalNormalizer(s.clone()))?;
    Ok(root.recip())
}

fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// The twisting elements of order 3 and 7 (and the identity for order 1).
pub fn build_twist_element(order: u32) -> Option<SpinElement> {
    let diff = |i: usize, j: usize| &Octonion::basis(i) - &Octonion::basis(j);
    match order {
        1 => Some(SpinElement::identity()),
        3 => Some(SpinElement::new(alloc::vec![diff(2, 3), diff(1, 2), diff(6, 7), diff(5, 6)])),
        7 => Some(SpinElement::new(alloc::vec![
            diff(6, 7),
            diff(5, 6),
            diff(4, 5),
            diff(3, 4),
            diff(2, 3),
            diff(1, 2),
        ])),
        _ => None,
    }
}

/// Scalar printed in front of the twisting element.
pub fn printed_normalizer(order: u32) -> Option<Rational> {
    match order {
        1 => Some(Rational::one()),
        3 => Some(Rational::new(BigInt::one(), BigInt::from(4))),
        7 => Some(Rational::new(BigInt::one(), BigInt::from(8))),
        _ => None,
    }
}

/// Printed action of `ρ_V(u)` on the basis: `PRINTED[i] = j` for `e_i -> e_j`.
pub fn printed_vector_action(order: u32) -> Option<[usize; 8]> {
    match order {
        1 => Some([0, 1, 2, 3, 4, 5, 6, 7]),
        3 => Some([0, 3, 1, 2, 4, 7, 5, 6]),
        7 => Some([0, 7, 1, 2, 3, 4, 5, 6]),
        _ => None,
    }
}

/// Least `k ≤ cap` with `M^k = I`.
pub fn matrix_order(m: &Matrix8, cap: u32) -> Result<u32, SpinError> {
    let mut p = m.clone();
    for k in 1..=cap {
        if p.is_identity() {
            return Ok(k);
        }
        p = &p * m;
    }
    Err(SpinError::OrderExceedsCap(cap))
}

/// Recovers the cycle shape from traces of powers by Möbius inversion of
/// `tr(M^d) = Σ_{a | d} a·b_a`, then checks the characteristic polynomial.
pub fn cycle_shape(m: &Matrix8) -> Result<CycleShape, SpinError> {
    let order = u64::from(matrix_order(m, 1024)?);
    let mut traces = alloc::collections::BTreeMap::new();
    for d in divisors(order) {
        let t = m.pow(d as u32).trace();
        if !t.is_integer() {
            return Err(SpinError::NotProductOfCyclotomicBlocks);
        }
        traces.insert(d, t.to_integer());
    }
    let mut cycles = Vec::new();
    for a in divisors(order) {
        let mut s = BigInt::zero();
        for d in divisors(a) {
            s += BigInt::from(mobius(a / d)) * &traces[&d];
        }
        let a_big = BigInt::from(a);
        if s.is_negative() || (&s % &a_big) != BigInt::zero() {
            return Err(SpinError::NotProductOfCyclotomicBlocks);
        }
        let b = u32::try_from(s / a_big).map_err(|_| SpinError::NotProductOfCyclotomicBlocks)?;
        if b > 0 {
            cycles.push((a as u32, b));
        }
    }
    let shape = CycleShape::new(&cycles);
    let expected: Vec<Rational> = shape.char_poly().into_iter().map(rational_from_int).collect();
    if shape.degree() != 8 || m.char_poly() != expected {
        return Err(SpinError::NotProductOfCyclotomicBlocks);
    }
    Ok(shape)
}

/// `ρ_V(u)(ab) = (ρ_L(u)a)(ρ_R(u)b)` on all basis pairs and the extra samples.
pub fn verify_triality(u: &SpinElement, sample: &[(Octonion, Octonion)]) -> Result<bool, SpinError> {
    let v = u.rho_v()?;
    let l = u.rho_l()?;
    let r = u.rho_r()?;
    let holds = |a: &Octonion, b: &Octonion| v.apply(&(a * b)) == &l.apply(a) * &r.apply(b);
    for i in 0..8 {
        for j in 0..8 {
            if !holds(&Octonion::basis(i), &Octonion::basis(j)) {
                return Ok(false);
            }
        }
    }
    Ok(sample.iter().all(|(a, b)| holds(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn oct() -> impl Strategy<Value = Octonion> {
        prop::array::uniform8(-6i64..=6).prop_map(Octonion::from_ints)
    }

    #[test]
    fn basis_products() {
        let e = Octonion::basis;
        for i in 0..8 {
            assert_eq!(&e(0) * &e(i), e(i));
            assert_eq!(&e(i) * &e(0), e(i));
        }
        assert_eq!(&e(1) * &e(2), e(3));
        assert_eq!(&e(2) * &e(1), -&e(3));
        for i in 1..8 {
            assert_eq!(&e(i) * &e(i), -&e(0));
        }
        assert_eq!(&e(1) * &e(5), e(4));
        assert_eq!(&e(3) * &e(6), e(5));
    }

    #[test]
    fn not_associative() {
        let e = Octonion::basis;
        // e1, e2, e4 do not lie in a common quaternion subalgebra.
        let left = &(&e(1) * &e(2)) * &e(4);
        let right = &e(1) * &(&e(2) * &e(4));
        assert_ne!(left, right);
        assert_eq!(left, -&right);
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(a in oct(), b in oct()) {
            prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
        }

        #[test]
        fn alternative_laws(a in oct(), b in oct()) {
            prop_assert_eq!(&a * &(&a * &b), &(&a * &a) * &b);
            prop_assert_eq!(&(&a * &b) * &b, &a * &(&b * &b));
        }
    }

    #[test]
    fn order_three_actions_agree_with_printed_table() {
        let u = build_twist_element(3).unwrap();
        let v = u.rho_v().unwrap();
        assert_eq!(v.as_permutation().unwrap(), printed_vector_action(3).unwrap());
        assert_eq!(u.rho_l().unwrap(), v);
        assert_eq!(u.rho_r().unwrap(), v);
        assert_eq!(u.normalizer(Action::Left).unwrap(), printed_normalizer(3).unwrap());
        assert_eq!(matrix_order(&v, 100).unwrap(), 3);
        assert_eq!(cycle_shape(&v).unwrap(), CycleShape::new(&[(1, 2), (3, 2)]));
    }

    #[test]
    fn order_seven_vector_action_matches_printed_table() {
        let u = build_twist_element(7).unwrap();
        let v = u.rho_v().unwrap();
        assert_eq!(v.as_permutation().unwrap(), printed_vector_action(7).unwrap());
        assert_eq!(u.normalizer(Action::Left).unwrap(), printed_normalizer(7).unwrap());
        assert_eq!(u.normalizer(Action::Vector).unwrap(), Rational::new(BigInt::one(), BigInt::from(64)));
        assert_eq!(matrix_order(&v, 100).unwrap(), 7);
        assert_eq!(cycle_shape(&v).unwrap(), CycleShape::new(&[(1, 1), (7, 1)]));
    }

    #[test]
    fn order_seven_spinor_actions_share_shape_and_trace() {
        // The 7-cycle is not an automorphism of this multiplication table,
        // so ρ_L and ρ_R are conjugate to ρ_V but not equal to it.
        let u = build_twist_element(7).unwrap();
        let v = u.rho_v().unwrap();
        let l = u.rho_l().unwrap();
        let r = u.rho_r().unwrap();
        assert_ne!(l, v);
        assert_eq!(l.trace(), r.trace());
        assert_eq!(cycle_shape(&l).unwrap(), cycle_shape(&v).unwrap());
        assert_eq!(cycle_shape(&r).unwrap(), cycle_shape(&v).unwrap());
    }

    #[test]
    fn rho_matrices_are_orthogonal() {
        for order in [1, 3, 7] {
            let u = build_twist_element(order).unwrap();
            for a in [Action::Vector, Action::Left, Action::Right] {
                assert!(u.rho(a).unwrap().is_orthogonal(), "order {order} {a:?}");
            }
        }
    }

    #[test]
    fn triality_holds() {
        let sample = [
            (Octonion::from_ints([1, 2, -1, 0, 3, 0, 1, -2]), Octonion::from_ints([0, 1, 1, 1, -1, 2, 0, 5])),
            (Octonion::from_ints([3, 0, 0, 1, 0, -4, 2, 1]), Octonion::from_ints([1, -1, 2, -2, 3, -3, 4, -4])),
        ];
        for order in [1, 3, 7] {
            let u = build_twist_element(order).unwrap();
            assert!(verify_triality(&u, &sample).unwrap(), "order {order}");
        }
    }

    #[test]
    fn triality_detects_mismatched_actions() {
        // A single non-unit factor pair still satisfies triality; swapping
        // the roles of the spinor actions does not.
        let u = build_twist_element(7).unwrap();
        let v = u.rho_v().unwrap();
        let l = u.rho_l().unwrap();
        let r = u.rho_r().unwrap();
        let (a, b) = (Octonion::basis(1), Octonion::basis(2));
        assert_eq!(v.apply(&(&a * &b)), &l.apply(&a) * &r.apply(&b));
        let broken = (0..8).any(|i| {
            (0..8).any(|j| {
                let (a, b) = (Octonion::basis(i), Octonion::basis(j));
                v.apply(&(&a * &b)) != &r.apply(&a) * &l.apply(&b)
            })
        });
        assert!(broken);
    }

    #[test]
    fn identity_matrix_facts() {
        let i = Matrix8::identity();
        assert_eq!(matrix_order(&i, 5).unwrap(), 1);
        assert_eq!(cycle_shape(&i).unwrap(), CycleShape::identity(8));
    }

    #[test]
    fn order_cap_is_enforced() {
        let u = build_twist_element(7).unwrap();
        let v = u.rho_v().unwrap();
        assert_eq!(matrix_order(&v, 6).unwrap_err(), SpinError::OrderExceedsCap(6));
    }

    #[test]
    fn irrational_normalizer_is_rejected() {
        // N(e1 - e2) · N(e3) = 2 is not a square.
        let e = Octonion::basis;
        let u = SpinElement::new(alloc::vec![&e(1) - &e(2), e(3)]);
        assert!(matches!(u.rho_l(), Err(SpinError::IrrationalNormalizer(_))));
        assert!(u.rho_v().is_ok());
    }

    #[test]
    fn non_cyclotomic_matrix_is_rejected() {
        // A quarter turn in one plane: traces 6, 6, 8 force 4·b_4 = 2.
        let mut m = Matrix8::identity();
        m.0[0][0] = Rational::zero();
        m.0[1][1] = Rational::zero();
        m.0[0][1] = -Rational::one();
        m.0[1][0] = Rational::one();
        assert_eq!(cycle_shape(&m).unwrap_err(), SpinError::NotProductOfCyclotomicBlocks);
    }

    #[test]
    fn characteristic_polynomial_of_twists() {
        for order in [3, 7] {
            let v = build_twist_element(order).unwrap().rho_v().unwrap();
            let shape = cycle_shape(&v).unwrap();
            let expected: Vec<Rational> = shape.char_poly().into_iter().map(rational_from_int).collect();
            assert_eq!(v.char_poly(), expected);
        }
    }
}
