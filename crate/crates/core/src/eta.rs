//! Eta quotients, cycle-shape products and the named q-series attached to
//! the order 1, 3 and 7 twists.
//!
//! Every product over the eigenvalues of an orthogonal map with cycle shape
//! `∏ a^b` collapses to an integer product: the eigenvalues of one `a`-cycle
//! are the `a`-th roots of unity and `∏_{ζ^a = 1} (1 - ζx) = 1 - x^a`. No
//! cyclotomic arithmetic is needed anywhere.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::series::{exponent, int_exponent, rational_from_int, Discrepancy, Exponent, QSeries, Rational, SeriesError};

/// `∏ η(q^k)^e` over distinct scales `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotient {
    factors: Vec<(u32, i32)>,
}

impl EtaQuotient {
    pub fn new(factors: &[(u32, i32)]) -> Self {
        let mut factors: Vec<(u32, i32)> = factors.iter().copied().filter(|&(_, e)| e != 0).collect();
        factors.sort_unstable();
        for w in factors.windows(2) {
            assert!(w[0].0 != w[1].0, "eta quotient scales must be distinct");
        }
        assert!(factors.iter().all(|&(k, _)| k > 0), "eta scales must be positive");
        EtaQuotient { factors }
    }

    pub fn factors(&self) -> &[(u32, i32)] {
        &self.factors
    }

    /// Exponent of the leading `q`-power, `Σ k·e / 24`.
    pub fn leading_exponent(&self) -> Exponent {
        let s: i64 = self.factors.iter().map(|&(k, e)| i64::from(k) * i64::from(e)).sum();
        exponent(s, 24)
    }

    /// Exact expansion below `prec`.
    pub fn expand(&self, prec: Exponent) -> QSeries {
        let lead = self.leading_exponent();
        let rel = prec - lead;
        let n = ceil_exponent(rel).max(0) as usize;
        let mut s = unit_dense(n);
        for &(k, e) in &self.factors {
            let k = k as usize;
            for m in (k..n).step_by(k.max(1)) {
                apply_binomial_power(&mut s, m, -1, e);
            }
        }
        QSeries::from_dense(1, 0, to_rationals(s), rel).shift(lead)
    }
}

fn ceil_exponent(e: Exponent) -> i64 {
    e.ceil().to_integer()
}

fn unit_dense(n: usize) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); n];
    if n > 0 {
        s[0] = BigInt::one();
    }
    s
}

fn to_rationals(s: Vec<BigInt>) -> Vec<Rational> {
    s.into_iter().map(Rational::from_integer).collect()
}

/// Multiplies `s` in place by `(1 + c·x^m)^e` for `c = ±1`.
fn apply_binomial_power(s: &mut [BigInt], m: usize, c: i32, e: i32) {
    let n = s.len();
    if m == 0 || m >= n {
        return;
    }
    for _ in 0..e.unsigned_abs() {
        if e > 0 {
            for i in (m..n).rev() {
                let t = s[i - m].clone();
                if c > 0 {
                    s[i] += t;
                } else {
                    s[i] -= t;
                }
            }
        } else {
            // Division by 1 + c·x^m.
            for i in m..n {
                let t = s[i - m].clone();
                if c > 0 {
                    s[i] -= t;
                } else {
                    s[i] += t;
                }
            }
        }
    }
}

/// Cycle shape `∏ a^{b_a}` of a finite-order orthogonal map; encodes the
/// characteristic polynomial `∏ (x^a - 1)^{b_a}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleShape {
    cycles: Vec<(u32, u32)>,
}

impl CycleShape {
    pub fn new(cycles: &[(u32, u32)]) -> Self {
        let mut merged: Vec<(u32, u32)> = Vec::new();
        let mut sorted: Vec<(u32, u32)> = cycles.iter().copied().filter(|&(_, b)| b > 0).collect();
        sorted.sort_unstable();
        for (a, b) in sorted {
            assert!(a > 0, "cycle length must be positive");
            match merged.last_mut() {
                Some(last) if last.0 == a => last.1 += b,
                _ => merged.push((a, b)),
            }
        }
        CycleShape { cycles: merged }
    }

    pub fn identity(dim: u32) -> Self {
        CycleShape::new(&[(1, dim)])
    }

    pub fn cycles(&self) -> &[(u32, u32)] {
        &self.cycles
    }

    /// Dimension `Σ a·b`.
    pub fn degree(&self) -> u32 {
        self.cycles.iter().map(|&(a, b)| a * b).sum()
    }

    /// Order of the map: lcm of the cycle lengths.
    pub fn order(&self) -> u32 {
        self.cycles.iter().fold(1u32, |acc, &(a, _)| acc.lcm(&a))
    }

    /// `tr(M^d) = Σ_{a | d} a·b_a`.
    pub fn trace_of_power(&self, d: u32) -> i64 {
        self.cycles.iter().filter(|&&(a, _)| d % a == 0).map(|&(a, b)| i64::from(a * b)).sum()
    }

    pub fn trace(&self) -> i64 {
        self.trace_of_power(1)
    }

    /// `Σ_{a | k} b_a`: multiplicity of the eigenvalue 1 of `M^k`.
    pub fn fixed_count(&self, k: u32) -> u32 {
        self.cycles.iter().filter(|&&(a, _)| k % a == 0).map(|&(_, b)| b).sum()
    }

    /// Coefficients (constant term first) of `∏ (x^a - 1)^b`.
    pub fn char_poly(&self) -> Vec<i64> {
        let mut p = vec![1i64];
        for &(a, b) in &self.cycles {
            for _ in 0..b {
                let mut next = vec![0i64; p.len() + a as usize];
                for (i, &c) in p.iter().enumerate() {
                    next[i + a as usize] += c;
                    next[i] -= c;
                }
                p = next;
            }
        }
        p
    }

    /// Coefficients of `det(1 - M t) = ∏ (1 - t^a)^b`.
    pub fn reversed_char_poly(&self) -> Vec<i64> {
        let mut p = vec![1i64];
        for &(a, b) in &self.cycles {
            for _ in 0..b {
                let mut next = vec![0i64; p.len() + a as usize];
                for (i, &c) in p.iter().enumerate() {
                    next[i] += c;
                    next[i + a as usize] -= c;
                }
                p = next;
            }
        }
        p
    }
}

impl fmt::Display for CycleShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(a, b)) in self.cycles.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}^{b}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Exponent offset inside `∏_n`: `q^{a n}` or `q^{a (n - 1/2)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    Integral,
    Half,
}

/// `∏_{n ≥ 1} ∏_i (1 ± ε_i x_n)` over the eigenvalues of a map with the given
/// cycle shape, with `x_n = q^n` or `q^{n - 1/2}`, exact below `prec`.
pub fn cycle_product(shape: &CycleShape, sign: Sign, shift: Shift, prec: Exponent) -> QSeries {
    // Work on the grid q^{1/denom}.
    let denom: i64 = match shift {
        Shift::Integral => 1,
        Shift::Half => 2,
    };
    let n = ceil_exponent(prec * denom).max(0) as usize;
    let mut s = unit_dense(n);
    for &(a, b) in &shape.cycles {
        // ∏_{ζ^a=1}(1 + ζx) = 1 - (-x)^a, ∏_{ζ^a=1}(1 - ζx) = 1 - x^a.
        let c = match sign {
            Sign::Minus => -1,
            Sign::Plus if a % 2 == 1 => 1,
            Sign::Plus => -1,
        };
        let mut k = 1usize;
        loop {
            let e = match shift {
                Shift::Integral => a as usize * k,
                Shift::Half => a as usize * (2 * k - 1),
            };
            if e >= n {
                break;
            }
            apply_binomial_power(&mut s, e, c, b as i32);
            k += 1;
        }
    }
    QSeries::from_dense(denom, 0, to_rationals(s), prec)
}

/// Generating function of `tr(g | Ẽ_{0,α})`: the coefficient of
/// `q^{(1-α²)/2}` for α in the fixed lattice.
pub fn trace_gf_even(shape: &CycleShape, prec: Exponent) -> QSeries {
    let plus = cycle_product(shape, Sign::Plus, Shift::Half, prec);
    let minus = cycle_product(shape, Sign::Minus, Shift::Half, prec);
    let denom = cycle_product(shape, Sign::Minus, Shift::Integral, prec);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let numer = (&plus - &minus).scale(&half);
    &numer * &denom.inv().expect("constant term 1")
}

/// Generating function of `tr(g | Ẽ_{1,α})`, valid when the two spinor
/// traces agree.
pub fn trace_gf_odd(shape: &CycleShape, trace_l: i64, prec: Exponent) -> QSeries {
    let half = exponent(1, 2);
    let inner = prec - half;
    let num = cycle_product(shape, Sign::Plus, Shift::Integral, inner);
    let den = cycle_product(shape, Sign::Minus, Shift::Integral, inner);
    (&num * &den.inv().expect("constant term 1")).scale(&rational_from_int(trace_l)).shift(half)
}

/// `∏_n ∏_i (1 - ε_i q^n) / (1 + σ_i q^n)`: the coefficients `a(m)` on the
/// isotropic side of the identity.
pub fn tail_series(shape_v: &CycleShape, shape_l: &CycleShape, prec: Exponent) -> QSeries {
    let num = cycle_product(shape_v, Sign::Minus, Shift::Integral, prec);
    let den = cycle_product(shape_l, Sign::Plus, Shift::Integral, prec);
    &num * &den.inv().expect("constant term 1")
}

/// Cycle shape and spinor trace of the shipped twists.
pub fn twist_shape(order: u32) -> Option<(CycleShape, i64)> {
    match order {
        1 => Some((CycleShape::identity(8), 8)),
        3 => Some((CycleShape::new(&[(1, 2), (3, 2)]), 2)),
        7 => Some((CycleShape::new(&[(1, 1), (7, 1)]), 1)),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SusyReport {
    pub shape: CycleShape,
    pub prec: Exponent,
    /// Even and odd trace generating functions differ here, if anywhere.
    pub trace_mismatch: Option<Discrepancy>,
    /// The bare product identity
    /// `(∏(1+…q^{n-1/2}) - ∏(1-…q^{n-1/2})) / 2q^{1/2} = tr·∏(1+…q^n)`
    /// differs here, if anywhere.
    pub product_mismatch: Option<Discrepancy>,
}

impl SusyReport {
    pub fn passed(&self) -> bool {
        self.trace_mismatch.is_none() && self.product_mismatch.is_none()
    }
}

/// Checks the supersymmetry relation for an arbitrary cycle shape.
pub fn verify_susy(shape: &CycleShape, trace_l: i64, prec: Exponent) -> Result<SusyReport, SeriesError> {
    let even = trace_gf_even(shape, prec);
    let odd = trace_gf_odd(shape, trace_l, prec);
    let trace_mismatch = even.first_difference(&odd)?;

    let half = exponent(1, 2);
    let plus = cycle_product(shape, Sign::Plus, Shift::Half, prec);
    let minus = cycle_product(shape, Sign::Minus, Shift::Half, prec);
    let lhs = (&plus - &minus).scale(&Rational::new(BigInt::one(), BigInt::from(2))).shift(-half);
    let rhs = cycle_product(shape, Sign::Plus, Shift::Integral, prec - half).scale(&rational_from_int(trace_l));
    let product_mismatch = lhs.first_difference(&rhs)?;
    Ok(SusyReport { shape: shape.clone(), prec, trace_mismatch, product_mismatch })
}

/// Supersymmetry relation for the order 1, 3 or 7 twist.
pub fn verify_susy_identity(order: u32, prec: Exponent) -> Option<Result<SusyReport, SeriesError>> {
    let (shape, trace_l) = twist_shape(order)?;
    Some(verify_susy(&shape, trace_l, prec))
}

/// Generating function of `dim Ẽ_{0,α} = dim Ẽ_{1,α}` given the theta series
/// of the matching translated complement lattice.
pub fn dim_gf(coset_theta: &QSeries, prec: Exponent) -> QSeries {
    let fake = NamedSeries::FakeC.expand(prec);
    (&fake * coset_theta).shift(exponent(1, 2)).truncate(prec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NamedSeries {
    FakeC,
    C3,
    C7,
    A3,
    A7,
}

impl NamedSeries {
    pub const ALL: [NamedSeries; 5] = [Self::FakeC, Self::C3, Self::C7, Self::A3, Self::A7];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::FakeC => "fake_c",
            Self::C3 => "c3",
            Self::C7 => "c7",
            Self::A3 => "a3",
            Self::A7 => "a7",
        }
    }

    /// Scalar times eta quotient.
    pub fn definition(self) -> (i64, EtaQuotient) {
        match self {
            Self::FakeC => (8, EtaQuotient::new(&[(2, 8), (1, -16)])),
            Self::C3 => (2, EtaQuotient::new(&[(6, 2), (2, 2), (3, -4), (1, -4)])),
            Self::C7 => (1, EtaQuotient::new(&[(14, 1), (2, 1), (7, -2), (1, -2)])),
            // (1 - q^n)/(1 + q^n) = η(q)² / η(q²) up to the q-power.
            Self::A3 => (1, EtaQuotient::new(&[(1, 4), (3, 4), (2, -2), (6, -2)])),
            Self::A7 => (1, EtaQuotient::new(&[(1, 2), (7, 2), (2, -1), (14, -1)])),
        }
    }

    pub fn expand(self, prec: Exponent) -> QSeries {
        let (c, q) = self.definition();
        q.expand(prec).scale(&rational_from_int(c))
    }
}

impl fmt::Display for NamedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NamedSeries {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NamedSeries::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| alloc::format!("unknown series `{s}` (expected fake_c, c3, c7, a3 or a7)"))
    }
}

pub fn named_series(name: NamedSeries, prec: Exponent) -> QSeries {
    name.expand(prec)
}

/// The two complement lattices with closed theta-coset formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaCase {
    /// `A2 ⊕ A2`, discriminant group `Z3 × Z3`.
    A2A2,
    /// `A6`, discriminant group `Z7`.
    A6,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ThetaError {
    #[error("norm class {0} mod 2 is not realized by a coset")]
    InvalidClass(Exponent),
}

impl ThetaCase {
    pub fn modulus(self) -> i64 {
        match self {
            Self::A2A2 => 3,
            Self::A6 => 7,
        }
    }

    /// Norms mod 2 of the cosets of the lattice in its dual.
    pub fn realized_classes(self) -> Vec<Exponent> {
        let mut out: Vec<Exponent> = match self {
            // (a, b) ∈ (Z/3)², norm 2(a² + b²)/3.
            Self::A2A2 => (0..3).flat_map(|a| (0..3).map(move |b| exponent(2 * (a * a + b * b), 3))).collect(),
            // k ∈ Z/7, norm k(7 - k)/7.
            Self::A6 => (0..7).map(|k| exponent(k * (7 - k), 7)).collect(),
        };
        for e in out.iter_mut() {
            *e = reduce_mod2(*e);
        }
        out.sort();
        out.dedup();
        out
    }
}

fn reduce_mod2(e: Exponent) -> Exponent {
    let two = int_exponent(2);
    let k = (e / two).floor();
    e - k * two
}

/// Closed theta-coset formula with the root-of-unity sums replaced by
/// multisection: `Σ_j ε^{-jN r²/2} F(ε^j q^{1/N}) = N · (terms of F(x) with
/// exponent ≡ N r²/2 mod N)`, re-indexed to `q^{k/N}`.
pub fn theta_coset_formula(case: ThetaCase, norm_class: Exponent, prec: Exponent) -> Result<QSeries, ThetaError> {
    let class = reduce_mod2(norm_class);
    if !case.realized_classes().contains(&class) {
        return Err(ThetaError::InvalidClass(norm_class));
    }
    let m = case.modulus();
    let (scale, prefactor, delta, inner) = match case {
        ThetaCase::A2A2 => (
            4,
            EtaQuotient::new(&[(1, 12), (2, -6)]),
            EtaQuotient::new(&[(6, 2), (3, -4)]),
            EtaQuotient::new(&[(2, 2), (1, -4)]),
        ),
        ThetaCase::A6 => (
            8,
            EtaQuotient::new(&[(1, 14), (2, -7)]),
            EtaQuotient::new(&[(14, 1), (7, -2)]),
            EtaQuotient::new(&[(2, 1), (1, -2)]),
        ),
    };
    let residue = (class * Ratio::from_integer(m) / int_exponent(2)).to_integer();
    let f = inner.expand(prec * m);
    let sect = f
        .multisection(m, residue)
        .expect("integral exponents")
        .scale(&rational_from_int(m))
        .scale_exponents(exponent(1, m));
    let mut braces = sect;
    if class.is_zero() {
        braces = &braces + &delta.expand(prec);
    }
    let out = &prefactor.expand(prec) * &braces;
    Ok(out.scale(&Rational::new(BigInt::one(), BigInt::from(scale))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: i64) -> Exponent {
        int_exponent(n)
    }

    fn ints(s: &QSeries, n: usize) -> Vec<i64> {
        s.integer_coeffs(n)
            .unwrap()
            .into_iter()
            .map(|c| i64::try_from(c.to_integer()).unwrap())
            .collect()
    }

    /// Euler's pentagonal theorem oracle for ∏(1 - q^n).
    fn pentagonal(n: usize) -> Vec<i64> {
        let mut out = vec![0i64; n];
        for k in -20i64..=20 {
            let g = (k * (3 * k - 1) / 2) as usize;
            if g < n {
                out[g] += if k % 2 == 0 { 1 } else { -1 };
            }
        }
        out
    }

    #[test]
    fn eta_is_pentagonal() {
        let eta = EtaQuotient::new(&[(1, 1)]);
        assert_eq!(eta.leading_exponent(), exponent(1, 24));
        let s = eta.expand(t(15)).shift(-exponent(1, 24));
        assert_eq!(ints(&s, 15), pentagonal(15));
    }

    #[test]
    fn empty_quotient_is_one() {
        let s = EtaQuotient::new(&[]).expand(t(10));
        assert!(s.agrees_with(&QSeries::one(t(10))).unwrap());
    }

    #[test]
    fn fake_c_leading_coefficients() {
        let s = NamedSeries::FakeC.expand(t(5));
        assert_eq!(ints(&s, 5), [8, 128, 1152, 7680, 42112]);
    }

    #[test]
    fn named_series_coefficients() {
        assert_eq!(ints(&NamedSeries::C3.expand(t(8)), 8), [2, 8, 24, 72, 184, 432, 984, 2112]);
        assert_eq!(ints(&NamedSeries::C7.expand(t(8)), 8), [1, 2, 4, 8, 14, 24, 40, 66]);
        assert_eq!(ints(&NamedSeries::A3.expand(t(7)), 7), [1, -4, 4, -4, 20, -24, 4]);
        assert_eq!(ints(&NamedSeries::A7.expand(t(12)), 12), [1, -2, 0, 0, 2, 0, 0, -2, 4, -2, 0, -4]);
    }

    #[test]
    fn named_series_round_trip_names() {
        for n in NamedSeries::ALL {
            assert_eq!(n.as_str().parse::<NamedSeries>().unwrap(), n);
        }
        assert!("c5".parse::<NamedSeries>().is_err());
    }

    #[test]
    fn scaled_eta_product_matches_direct() {
        let base = EtaQuotient::new(&[(1, 1)]).expand(t(10)).shift(-exponent(1, 24));
        let scaled = base.scale_exponents(t(7));
        let direct = EtaQuotient::new(&[(7, 1)]).expand(t(70)).shift(-exponent(7, 24));
        assert!(scaled.agrees_with(&direct).unwrap());
    }

    #[test]
    fn cycle_products_match_printed_forms() {
        let p = cycle_product(&CycleShape::identity(8), Sign::Minus, Shift::Integral, t(20));
        let e8 = EtaQuotient::new(&[(1, 8)]).expand(t(21)).shift(-exponent(1, 3));
        assert!(p.agrees_with(&e8).unwrap());

        let s = CycleShape::new(&[(1, 2), (3, 2)]);
        let p = cycle_product(&s, Sign::Minus, Shift::Integral, t(20));
        let direct = EtaQuotient::new(&[(1, 2), (3, 2)]).expand(t(21)).shift(-exponent(8, 24));
        assert!(p.agrees_with(&direct).unwrap());

        // (1 + q^{7n-7/2})(1 + q^{n-1/2}), expanded factor by factor.
        let s = CycleShape::new(&[(1, 1), (7, 1)]);
        let p = cycle_product(&s, Sign::Plus, Shift::Half, t(10));
        let mut direct = QSeries::one(t(10));
        for n in 1..=10i64 {
            for a in [1i64, 7] {
                let e = exponent(a * (2 * n - 1), 2);
                let f = &QSeries::one(t(10)) + &QSeries::monomial(Rational::one(), e, t(10));
                direct = &direct * &f;
            }
        }
        assert!(p.agrees_with(&direct).unwrap());
    }

    #[test]
    fn shape_bookkeeping() {
        let s = CycleShape::new(&[(3, 2), (1, 2)]);
        assert_eq!(s.degree(), 8);
        assert_eq!(s.order(), 3);
        assert_eq!(s.trace(), 2);
        assert_eq!(s.trace_of_power(3), 8);
        assert_eq!(s.fixed_count(1), 2);
        assert_eq!(s.fixed_count(3), 4);
        assert_eq!(alloc::format!("{s}"), "1^2 3^2");
        // (x - 1)^2 (x^3 - 1)^2
        assert_eq!(s.char_poly(), [1, -2, 1, -2, 4, -2, 1, -2, 1]);
    }

    #[test]
    fn untwisted_trace_is_fake_c() {
        let s = trace_gf_even(&CycleShape::identity(8), t(40));
        let fake = NamedSeries::FakeC.expand(t(40)).shift(exponent(1, 2));
        assert!(s.agrees_with(&fake).unwrap());
    }

    #[test]
    fn twisted_traces_are_c_series() {
        let (s3, tr3) = twist_shape(3).unwrap();
        let c3 = NamedSeries::C3.expand(t(30)).shift(exponent(1, 2));
        assert!(trace_gf_even(&s3, t(30)).agrees_with(&c3).unwrap());
        assert!(trace_gf_odd(&s3, tr3, t(30)).agrees_with(&c3).unwrap());

        let (s7, tr7) = twist_shape(7).unwrap();
        let c7 = NamedSeries::C7.expand(t(30)).shift(exponent(1, 2));
        assert!(trace_gf_even(&s7, t(30)).agrees_with(&c7).unwrap());
        assert!(trace_gf_odd(&s7, tr7, t(30)).agrees_with(&c7).unwrap());
    }

    #[test]
    fn zero_spinor_trace_gives_zero() {
        assert!(trace_gf_odd(&CycleShape::identity(8), 0, t(10)).is_zero());
    }

    #[test]
    fn susy_identities_hold() {
        for order in [1, 3, 7] {
            let r = verify_susy_identity(order, t(50)).unwrap().unwrap();
            assert!(r.passed(), "order {order}: {r:?}");
        }
        assert!(verify_susy_identity(5, t(10)).is_none());
    }

    #[test]
    fn perturbed_shape_breaks_susy() {
        let r = verify_susy(&CycleShape::new(&[(1, 1), (3, 1)]), 1, t(50)).unwrap();
        assert!(!r.passed());
        let d = r.trace_mismatch.expect("trace generating functions differ");
        assert!(d.exponent < t(50));
    }

    #[test]
    fn tail_series_match_named() {
        let (s3, _) = twist_shape(3).unwrap();
        assert!(tail_series(&s3, &s3, t(30)).agrees_with(&NamedSeries::A3.expand(t(30))).unwrap());
        let (s7, _) = twist_shape(7).unwrap();
        assert!(tail_series(&s7, &s7, t(30)).agrees_with(&NamedSeries::A7.expand(t(30))).unwrap());
    }

    #[test]
    fn dim_gf_untwisted_is_shifted_fake_c() {
        let d = dim_gf(&QSeries::one(t(20)), t(20));
        let fake = NamedSeries::FakeC.expand(t(20)).shift(exponent(1, 2));
        assert!(d.agrees_with(&fake).unwrap());
    }

    #[test]
    fn theta_formula_leading_terms() {
        let triv = theta_coset_formula(ThetaCase::A2A2, t(0), t(3)).unwrap();
        assert_eq!(triv.coeff(t(0)).unwrap(), rational_from_int(1));
        assert_eq!(triv.coeff(t(1)).unwrap(), rational_from_int(12));
        let nontriv = theta_coset_formula(ThetaCase::A2A2, exponent(2, 3), t(3)).unwrap();
        assert_eq!(nontriv.valuation(), Some(exponent(1, 3)));
        assert_eq!(nontriv.coeff(exponent(1, 3)).unwrap(), rational_from_int(3));
        let a6 = theta_coset_formula(ThetaCase::A6, t(0), t(3)).unwrap();
        assert_eq!(a6.coeff(t(1)).unwrap(), rational_from_int(42));
    }

    #[test]
    fn theta_formula_rejects_unrealized_class() {
        assert_eq!(
            theta_coset_formula(ThetaCase::A2A2, exponent(1, 3), t(3)).unwrap_err(),
            ThetaError::InvalidClass(exponent(1, 3))
        );
        assert!(theta_coset_formula(ThetaCase::A6, exponent(2, 7), t(3)).is_err());
    }

    #[test]
    fn realized_classes() {
        assert_eq!(ThetaCase::A2A2.realized_classes(), [t(0), exponent(2, 3), exponent(4, 3)]);
        assert_eq!(ThetaCase::A6.realized_classes(), [t(0), exponent(6, 7), exponent(10, 7), exponent(12, 7)]);
    }
}
