//! Root multiplicities of the twisted algebras: the Möbius convolution over
//! divisors of `gcd((α, L), N)` and the closed forms in terms of a single
//! eta quotient, cross-checked against each other.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

pub use crate::arith::mobius;
use crate::arith::divisors;
use crate::eta::{dim_gf, tail_series, trace_gf_even, trace_gf_odd, CycleShape, NamedSeries};
use crate::lattice::{
    coset_complement_shift, e8, fixed_sublattice, orthogonal_complement, DiscriminantGroup, IntegralLattice,
    LatticeError, LorentzianLattice, LorentzianPoint, Q,
};
use crate::octonion::{build_twist_element, cycle_shape, matrix_order, SpinError};
use crate::series::{exponent, int_exponent, Exponent, QSeries, Rational, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MultError {
    #[error("no twist of order {0} is available (even orders are not supported)")]
    UnsupportedOrder(u32),
    #[error("traces of g^{0} are not available for this twist")]
    UnsupportedDivisor(u64),
    #[error("spinor traces differ: tr ρ_L = {left}, tr ρ_R = {right}")]
    SpinorTraceMismatch { left: i64, right: i64 },
    #[error("multiplicity at {point} is not an integer: {value}")]
    NonIntegralMultiplicity { point: LorentzianPoint, value: Rational },
    #[error("multiplicity formulas disagree at {point}: theorem {theorem1:?}, closed form {closed:?}")]
    TheoremClosedFormMismatch { point: LorentzianPoint, theorem1: (i128, i128), closed: (i128, i128) },
    #[error("invalid multiplicity at {point}: {reason}")]
    InvalidMultiplicity { point: LorentzianPoint, reason: &'static str },
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// Everything needed to evaluate multiplicities for one twist `g` of odd
/// order `N`, precomputed up to a height bound.
#[derive(Clone, Debug)]
pub struct TwistClass {
    order: u32,
    shape_v: CycleShape,
    shape_l: CycleShape,
    trace_l: i64,
    fixed: IntegralLattice,
    complement: IntegralLattice,
    disc: DiscriminantGroup,
    lorentz: LorentzianLattice,
    coset_shifts: BTreeMap<Vec<i128>, Vec<Q>>,
    gf_even: QSeries,
    gf_odd: QSeries,
    gf_dim: BTreeMap<Vec<i128>, QSeries>,
    c_series: QSeries,
    tail: QSeries,
    max_height: i64,
    max_norm: i64,
}

fn small_int(x: &Rational) -> Option<i128> {
    if x.is_integer() {
        x.to_integer().to_i128()
    } else {
        None
    }
}

impl TwistClass {
    /// Builds the twist of order 1, 3 or 7 with caches valid on the cone up
    /// to `max_height`.
    pub fn new(order: u32, max_height: i64) -> Result<Self, MultError> {
        let h = max_height.max(1);
        Self::with_bounds(order, max_height, h * h / 2)
    }

    /// Caches valid for points of height at most `max_height` and
    /// `-α² ≤ max_norm`.
    pub fn with_bounds(order: u32, max_height: i64, max_norm: i64) -> Result<Self, MultError> {
        if order % 2 == 0 {
            return Err(MultError::UnsupportedOrder(order));
        }
        let u = build_twist_element(order).ok_or(MultError::UnsupportedOrder(order))?;
        let rho_v = u.rho_v()?;
        let rho_l = u.rho_l()?;
        let rho_r = u.rho_r()?;
        let found = matrix_order(&rho_v, 1024)?;
        assert_eq!(found, order, "twisting element has the wrong order");
        let shape_v = cycle_shape(&rho_v)?;
        let shape_l = cycle_shape(&rho_l)?;
        let trace = |m: &crate::octonion::Matrix8| m.trace().to_integer().to_i64().expect("trace of a permutation");
        let (left, right) = (trace(&rho_l), trace(&rho_r));
        if left != right {
            return Err(MultError::SpinorTraceMismatch { left, right });
        }

        let e8 = e8();
        let fixed = fixed_sublattice(&rho_v, &e8)?;
        let complement = orthogonal_complement(&fixed, &e8);
        let disc = fixed.discriminant_group()?;
        let lorentz = LorentzianLattice::new(fixed.clone())?;

        // Largest exponent ever read is (1 - α²)/2.
        let h = max_height.max(1);
        let prec = exponent(1 + max_norm.max(0), 2) + int_exponent(1);
        let mut coset_shifts = BTreeMap::new();
        let mut gf_dim = BTreeMap::new();
        for label in disc.labels() {
            let r_star = fixed.shortest_in_coset(&fixed.vector(&disc.representative(&label)))?;
            let shift = coset_complement_shift(&fixed, &e8, &r_star, Q::from_integer(32))?;
            let theta = complement.theta_coset(&shift, prec)?;
            gf_dim.insert(label.clone(), dim_gf(&theta, prec));
            coset_shifts.insert(label, shift);
        }
        let c_series = match order {
            1 => NamedSeries::FakeC,
            3 => NamedSeries::C3,
            7 => NamedSeries::C7,
            _ => return Err(MultError::UnsupportedOrder(order)),
        }
        .expand(prec);
        Ok(TwistClass {
            order,
            gf_even: trace_gf_even(&shape_v, prec),
            gf_odd: trace_gf_odd(&shape_v, left, prec),
            tail: tail_series(&shape_v, &shape_l, int_exponent(h + 1)),
            shape_v,
            shape_l,
            trace_l: left,
            fixed,
            complement,
            disc,
            lorentz,
            coset_shifts,
            gf_dim,
            c_series,
            max_height,
            max_norm,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn max_height(&self) -> i64 {
        self.max_height
    }

    /// Bound on `-α²` for which the caches are valid.
    pub fn max_norm(&self) -> i64 {
        self.max_norm
    }

    pub fn shape_v(&self) -> &CycleShape {
        &self.shape_v
    }

    pub fn shape_l(&self) -> &CycleShape {
        &self.shape_l
    }

    pub fn trace_l(&self) -> i64 {
        self.trace_l
    }

    pub fn fixed_lattice(&self) -> &IntegralLattice {
        &self.fixed
    }

    pub fn complement(&self) -> &IntegralLattice {
        &self.complement
    }

    pub fn discriminant(&self) -> &DiscriminantGroup {
        &self.disc
    }

    pub fn lorentzian(&self) -> &LorentzianLattice {
        &self.lorentz
    }

    pub fn coset_shifts(&self) -> &BTreeMap<Vec<i128>, Vec<Q>> {
        &self.coset_shifts
    }

    /// The series `c` of the closed multiplicity formula.
    pub fn c_series(&self) -> &QSeries {
        &self.c_series
    }

    /// The coefficients `a(k)` on the isotropic side.
    pub fn tail(&self) -> &QSeries {
        &self.tail
    }

    /// Discriminant class of the definite part of `β ∈ L*`.
    pub fn coset_label(&self, beta: &LorentzianPoint) -> Vec<i128> {
        self.disc.label(&self.lorentz.definite_coords(beta))
    }

    fn exponent_of(&self, beta: &LorentzianPoint) -> Exponent {
        let e = (Q::from_integer(1) - self.lorentz.norm(beta)) / Q::from_integer(2);
        Exponent::new(e.numer().to_i64().expect("small"), e.denom().to_i64().expect("small"))
    }

    /// `tr(g^d | Ẽ_β)` for the given parity, read off the generating
    /// functions.
    pub fn trace_term(&self, d: u64, beta: &LorentzianPoint, parity: Parity) -> Result<Rational, MultError> {
        let n = u64::from(self.order);
        let e = self.exponent_of(beta);
        if d % n == 0 {
            // g^d = 1: the dimension, the same for both parities.
            let label = self.coset_label(beta);
            return Ok(self.gf_dim[&label].coeff(e)?);
        }
        if d.gcd(&n) != 1 {
            return Err(MultError::UnsupportedDivisor(d));
        }
        if !self.lorentz.in_lattice(beta) {
            return Ok(Rational::zero());
        }
        let gf = match parity {
            Parity::Even => &self.gf_even,
            Parity::Odd => &self.gf_odd,
        };
        Ok(gf.coeff(e)?)
    }

    /// `Σ_{ds | ((α,L), N)} μ(s)/(ds) · tr(g^d | Ẽ_{α/ds})`.
    pub fn mult_theorem1(&self, alpha: &LorentzianPoint, parity: Parity) -> Result<i128, MultError> {
        let n = u64::from(self.order);
        let g = (self.lorentz.pairing_divisor(alpha).unsigned_abs()).gcd(&n);
        let mut total = Rational::zero();
        for k in divisors(g) {
            for d in divisors(k) {
                let s = k / d;
                let mu = mobius(s);
                if mu == 0 {
                    continue;
                }
                let beta = alpha.divided(k as i64).expect("k divides (α, L)");
                let t = self.trace_term(d, &beta, parity)?;
                total += t * Rational::new(BigInt::from(mu), BigInt::from(k));
            }
        }
        small_int(&total).ok_or_else(|| MultError::NonIntegralMultiplicity { point: alpha.clone(), value: total })
    }

    /// `c(-α²/2)` on `L`, plus `c(-α²/2N)` on `N·L*`, zero off `L`.
    pub fn mult_closed(&self, alpha: &LorentzianPoint) -> Result<(i128, i128), MultError> {
        if !self.lorentz.in_lattice(alpha) {
            return Ok((0, 0));
        }
        let in_dual = self.order > 1 && self.lorentz.in_scaled_dual(alpha, self.order.into());
        let v = self.closed_form_value(-self.lorentz.norm(alpha), in_dual)?;
        let v = small_int(&v).ok_or_else(|| MultError::NonIntegralMultiplicity { point: alpha.clone(), value: v })?;
        Ok((v, v))
    }

    /// `c(a/2) + [in_scaled_dual]·c(a/2N)` for `a = -α²`.
    pub fn closed_form_value(&self, neg_norm: Q, in_scaled_dual: bool) -> Result<Rational, MultError> {
        let c = |x: Q| -> Result<Rational, MultError> {
            let e = Exponent::new(x.numer().to_i64().expect("small"), x.denom().to_i64().expect("small"));
            Ok(self.c_series.coeff(e)?)
        };
        let half = neg_norm / Q::from_integer(2);
        let mut v = c(half)?;
        if in_scaled_dual {
            v += c(half / Q::from_integer(self.order.into()))?;
        }
        Ok(v)
    }

    /// Both parities of the convolution formula.
    pub fn mult_pair(&self, alpha: &LorentzianPoint) -> Result<(i128, i128), MultError> {
        Ok((self.mult_theorem1(alpha, Parity::Even)?, self.mult_theorem1(alpha, Parity::Odd)?))
    }

    /// Multiplicities of `k` times a primitive isotropic vector: the number
    /// of cycles whose length divides `k`, for `ρ_V` and `ρ_L`.
    pub fn simple_root_mult(&self, k: u32) -> (u32, u32) {
        let count = |s: &CycleShape| s.cycles().iter().filter(|(a, _)| k % a == 0).map(|(_, b)| b).sum();
        (count(&self.shape_v), count(&self.shape_l))
    }
}

/// One point of a multiplicity table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultRow {
    pub point: LorentzianPoint,
    pub coset: Vec<i128>,
    pub norm: Q,
    pub divisor: i64,
    pub in_lattice: bool,
    pub in_scaled_dual: bool,
    pub theorem1: (i128, i128),
    pub closed: (i128, i128),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultTable {
    pub rows: Vec<MultRow>,
}

/// Evaluates both formulas on every cone point with `h ≤ max_height` and
/// `-α² ≤ max_norm`, without comparing them.
pub fn evaluate_mult_table(tc: &TwistClass, max_height: i64, max_norm: Option<Q>) -> Result<MultTable, MultError> {
    let lorentz = tc.lorentzian();
    let mut rows = Vec::new();
    if max_height < 1 {
        return Ok(MultTable { rows });
    }
    for point in lorentz.positive_cone_enum(max_height)? {
        let norm = lorentz.norm(&point);
        if max_norm.is_some_and(|b| -norm > b) {
            continue;
        }
        rows.push(MultRow {
            coset: tc.coset_label(&point),
            norm,
            divisor: lorentz.pairing_divisor(&point),
            in_lattice: lorentz.in_lattice(&point),
            in_scaled_dual: lorentz.in_scaled_dual(&point, tc.order().into()),
            theorem1: tc.mult_pair(&point)?,
            closed: tc.mult_closed(&point)?,
            point,
        });
    }
    Ok(MultTable { rows })
}

impl MultTable {
    /// First row violating agreement of the formulas, non-negativity,
    /// equality of both parities or vanishing off `L`.
    pub fn validate(&self) -> Result<(), MultError> {
        for r in &self.rows {
            let point = r.point.clone();
            if r.theorem1 != r.closed {
                return Err(MultError::TheoremClosedFormMismatch { point, theorem1: r.theorem1, closed: r.closed });
            }
            if r.theorem1.0 < 0 || r.theorem1.1 < 0 {
                return Err(MultError::InvalidMultiplicity { point, reason: "negative" });
            }
            if r.theorem1.0 != r.theorem1.1 {
                return Err(MultError::InvalidMultiplicity { point, reason: "even and odd differ" });
            }
            if !r.in_lattice && r.theorem1 != (0, 0) {
                return Err(MultError::InvalidMultiplicity { point, reason: "nonzero off L" });
            }
        }
        Ok(())
    }
}

/// [`evaluate_mult_table`] followed by [`MultTable::validate`].
pub fn build_mult_table(tc: &TwistClass, max_height: i64, max_norm: Option<Q>) -> Result<MultTable, MultError> {
    let table = evaluate_mult_table(tc, max_height, max_norm)?;
    table.validate()?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn point(tc: &TwistClass, want_norm: Q, in_l: bool, in_n: bool) -> LorentzianPoint {
        let n = tc.order().into();
        tc.lorentzian()
            .positive_cone_enum(tc.max_height())
            .unwrap()
            .into_iter()
            .find(|p| {
                let l = tc.lorentzian();
                l.norm(p) == want_norm && l.in_lattice(p) == in_l && l.in_scaled_dual(p, n) == in_n
            })
            .expect("a point with the requested properties")
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    #[test]
    fn mobius_values() {
        assert_eq!((mobius(1), mobius(3), mobius(7), mobius(9)), (1, -1, -1, 0));
    }

    #[test]
    fn shapes_come_from_octonions() {
        let t3 = TwistClass::new(3, 2).unwrap();
        assert_eq!(t3.shape_v(), &CycleShape::new(&[(1, 2), (3, 2)]));
        assert_eq!(t3.shape_l(), t3.shape_v());
        assert_eq!(t3.trace_l(), 2);
        let t7 = TwistClass::new(7, 2).unwrap();
        assert_eq!(t7.shape_l(), &CycleShape::new(&[(1, 1), (7, 1)]));
        assert_eq!(t7.trace_l(), 1);
    }

    #[test]
    fn unsupported_orders() {
        assert_eq!(TwistClass::new(2, 2).unwrap_err(), MultError::UnsupportedOrder(2));
        assert_eq!(TwistClass::new(5, 2).unwrap_err(), MultError::UnsupportedOrder(5));
    }

    #[test]
    fn tails_match_named_series() {
        let p = int_exponent(7);
        assert!(TwistClass::new(3, 6).unwrap().tail().agrees_with(&NamedSeries::A3.expand(p)).unwrap());
        assert!(TwistClass::new(7, 6).unwrap().tail().agrees_with(&NamedSeries::A7.expand(p)).unwrap());
    }

    #[test]
    fn trace_terms_order_three() {
        let tc = TwistClass::new(3, 4).unwrap();
        let beta = point(&tc, Q::from_integer(-2), true, false);
        assert_eq!(tc.trace_term(1, &beta, Parity::Even).unwrap(), r(8));
        let off = point(&tc, Q::new(-2, 3), false, false);
        assert_eq!(tc.trace_term(1, &off, Parity::Even).unwrap(), r(0));
        assert_eq!(tc.trace_term(3, &off, Parity::Even).unwrap(), r(24));
    }

    #[test]
    fn theorem_examples() {
        let tc = TwistClass::with_bounds(3, 9, 6).unwrap();
        let a = point(&tc, Q::from_integer(-2), true, false);
        assert_eq!(tc.mult_theorem1(&a, Parity::Even).unwrap(), 8);
        let b = point(&tc, Q::from_integer(-6), true, true);
        assert!(!tc.lorentzian().in_scaled_lattice(&b, 3));
        assert_eq!(tc.mult_theorem1(&b, Parity::Even).unwrap(), 80);
        let c = point(&tc, Q::from_integer(-4), true, false);
        assert_eq!(tc.mult_closed(&c).unwrap(), (24, 24));

        let t7 = TwistClass::with_bounds(7, 14, 14).unwrap();
        assert_eq!(t7.closed_form_value(Q::from_integer(14), true).unwrap(), r(68));
        // Norms of E8^{u*} avoid 12/7 mod 2, so no point of 7L* has norm -14.
        let l = t7.lorentzian();
        let cone = l.positive_cone_enum(14).unwrap();
        assert!(!cone.iter().any(|p| l.norm(p) == Q::from_integer(-14) && l.in_scaled_dual(p, 7)));
        // The smallest non-isotropic points of 7L* have norm -42; at small
        // heights only multiples of isotropic vectors occur.
        assert!(cone.iter().all(|p| !l.in_scaled_dual(p, 7) || l.norm(p).is_zero() || -l.norm(p) >= Q::from_integer(42)));
        let d = LorentzianPoint::new(vec![0, 0], 7, 0);
        assert_eq!(t7.mult_pair(&d).unwrap(), (2, 2));
        assert_eq!(t7.mult_closed(&d).unwrap(), (2, 2));
    }

    #[test]
    fn untwisted_simple_roots_have_multiplicity_eight() {
        let tc = TwistClass::new(1, 2).unwrap();
        let p = LorentzianPoint::new(vec![0; 8], 1, 0);
        assert_eq!(tc.mult_pair(&p).unwrap(), (8, 8));
        assert_eq!(tc.simple_root_mult(5), (8, 8));
    }

    #[test]
    fn simple_root_multiplicities() {
        let t3 = TwistClass::new(3, 2).unwrap();
        assert_eq!([1, 2, 3, 6].map(|k| t3.simple_root_mult(k)), [(2, 2), (2, 2), (4, 4), (4, 4)]);
        let t7 = TwistClass::new(7, 2).unwrap();
        assert_eq!((t7.simple_root_mult(1), t7.simple_root_mult(7)), ((1, 1), (2, 2)));
    }

    #[test]
    fn tables_are_consistent() {
        for (order, h) in [(3, 4), (7, 6), (1, 3)] {
            let tc = TwistClass::new(order, h).unwrap();
            let t = build_mult_table(&tc, h, None).unwrap();
            assert!(!t.rows.is_empty());
        }
        let tc = TwistClass::new(3, 2).unwrap();
        assert!(build_mult_table(&tc, 0, None).unwrap().rows.is_empty());
    }
}
