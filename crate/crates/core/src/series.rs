//! Truncated Puiseux series with exact rational coefficients.
//!
//! A [`QSeries`] stores the coefficient of `q^{k/D}` for integer `k` and a
//! single positive denominator `D`. Every series carries its own truncation
//! `T`: coefficients of exponents `< T` are exact, everything at or above `T`
//! is unknown. Binary operations merge denominators by lcm and propagate the
//! tightest truncation that is still sound.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

/// Exact rational coefficient.
pub type Rational = BigRational;

/// Exponents, truncation points and precisions. These stay small, so a
/// machine-word ratio is enough.
pub type Exponent = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series has no nonzero coefficient below its truncation")]
    ZeroLeadingTerm,
    #[error("series has non-integral exponents")]
    NonIntegerExponents,
    #[error("exponent {exponent} is not below the truncation {trunc}")]
    BeyondTruncation { exponent: Exponent, trunc: Exponent },
    #[error("series share no exactly-known exponent range")]
    EmptyComparisonRange,
}

/// First exponent at which two series differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub exponent: Exponent,
    pub expected: Rational,
    pub got: Rational,
}

#[derive(Clone, Debug)]
pub struct QSeries {
    denom: i64,
    terms: BTreeMap<i64, Rational>,
    trunc: Exponent,
}

pub fn exponent(num: i64, den: i64) -> Exponent {
    Ratio::new(num, den)
}

pub fn int_exponent(n: i64) -> Exponent {
    Ratio::from_integer(n)
}

pub fn rational_from_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

impl QSeries {
    pub fn zero(trunc: Exponent) -> Self {
        QSeries { denom: 1, terms: BTreeMap::new(), trunc }
    }

    pub fn one(trunc: Exponent) -> Self {
        Self::monomial(Rational::one(), Exponent::zero(), trunc)
    }

    /// `coeff · q^exp`, exact below `trunc`.
    pub fn monomial(coeff: Rational, exp: Exponent, trunc: Exponent) -> Self {
        let mut terms = BTreeMap::new();
        let denom = *exp.denom();
        if exp < trunc && !coeff.is_zero() {
            terms.insert(*exp.numer(), coeff);
        }
        QSeries { denom, terms, trunc }.normalized()
    }

    /// Dense constructor: `coeffs[i]` is the coefficient of `q^{(start+i)/denom}`.
    /// Entries at or beyond `trunc` are dropped.
    pub fn from_dense(denom: i64, start: i64, coeffs: Vec<Rational>, trunc: Exponent) -> Self {
        assert!(denom > 0, "exponent denominator must be positive");
        let mut terms = BTreeMap::new();
        for (i, c) in coeffs.into_iter().enumerate() {
            let k = start + i as i64;
            if !c.is_zero() && Ratio::new(k, denom) < trunc {
                terms.insert(k, c);
            }
        }
        QSeries { denom, terms, trunc }.normalized()
    }

    /// Integer-exponent series `Σ coeffs[i] q^i`.
    pub fn from_integers(coeffs: &[i64], trunc: Exponent) -> Self {
        let coeffs = coeffs.iter().map(|&c| rational_from_int(c)).collect();
        Self::from_dense(1, 0, coeffs, trunc)
    }

    pub fn from_terms<I>(terms: I, trunc: Exponent) -> Self
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let terms: Vec<(Exponent, Rational)> = terms.into_iter().collect();
        let denom = terms.iter().fold(1i64, |d, (e, _)| d.lcm(e.denom()));
        let mut map: BTreeMap<i64, Rational> = BTreeMap::new();
        for (e, c) in terms {
            if e >= trunc {
                continue;
            }
            let k = *e.numer() * (denom / *e.denom());
            let slot = map.entry(k).or_insert_with(Rational::zero);
            *slot += c;
        }
        map.retain(|_, c| !c.is_zero());
        QSeries { denom, terms: map, trunc }.normalized()
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn trunc(&self) -> Exponent {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<Exponent> {
        self.terms.keys().next().map(|&k| Ratio::new(k, self.denom))
    }

    /// Lowest exponent that could carry a nonzero coefficient; the
    /// truncation point for a series that is zero below it.
    fn effective_valuation(&self) -> Exponent {
        self.valuation().unwrap_or(self.trunc)
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &Rational)> + '_ {
        self.terms.iter().map(move |(&k, c)| (Ratio::new(k, self.denom), c))
    }

    /// Coefficient at `e`; exponents off the grid are zero.
    pub fn coeff(&self, e: Exponent) -> Result<Rational, SeriesError> {
        if e >= self.trunc {
            return Err(SeriesError::BeyondTruncation { exponent: e, trunc: self.trunc });
        }
        let scaled = e * self.denom;
        if !scaled.is_integer() {
            return Ok(Rational::zero());
        }
        Ok(self.terms.get(&scaled.to_integer()).cloned().unwrap_or_else(Rational::zero))
    }

    /// Integer coefficients `a_0, …, a_{n-1}` of an integer-exponent series.
    pub fn integer_coeffs(&self, n: usize) -> Result<Vec<Rational>, SeriesError> {
        (0..n as i64).map(|k| self.coeff(int_exponent(k))).collect()
    }

    /// Lowers the truncation to `t` (no-op when `t` is not lower).
    pub fn truncate(&self, t: Exponent) -> Self {
        if t >= self.trunc {
            return self.clone();
        }
        let denom = self.denom;
        let terms = self
            .terms
            .iter()
            .filter(|(&k, _)| Ratio::new(k, denom) < t)
            .map(|(&k, c)| (k, c.clone()))
            .collect();
        QSeries { denom, terms, trunc: t }.normalized()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return QSeries::zero(self.trunc);
        }
        let terms = self.terms.iter().map(|(&k, v)| (k, v * c)).collect();
        QSeries { denom: self.denom, terms, trunc: self.trunc }
    }

    /// Multiplication by `q^e`; the truncation moves with the terms.
    pub fn shift(&self, e: Exponent) -> Self {
        let denom = self.denom.lcm(e.denom());
        let step = *e.numer() * (denom / *e.denom());
        let factor = denom / self.denom;
        let terms = self.terms.iter().map(|(&k, v)| (k * factor + step, v.clone())).collect();
        QSeries { denom, terms, trunc: self.trunc + e }.normalized()
    }

    /// Formal substitution `q -> q^k` for positive rational `k`.
    pub fn scale_exponents(&self, k: Exponent) -> Self {
        assert!(k > Exponent::zero(), "exponent scale must be positive");
        let denom = self.denom * *k.denom();
        let terms = self.terms.iter().map(|(&e, v)| (e * *k.numer(), v.clone())).collect();
        QSeries { denom, terms, trunc: self.trunc * k }.normalized()
    }

    /// Terms whose (integral) exponent is congruent to `r` modulo `m`.
    pub fn multisection(&self, m: i64, r: i64) -> Result<Self, SeriesError> {
        assert!(m > 0, "multisection modulus must be positive");
        if self.denom != 1 {
            return Err(SeriesError::NonIntegerExponents);
        }
        let r = r.rem_euclid(m);
        let terms = self
            .terms
            .iter()
            .filter(|(&k, _)| k.rem_euclid(m) == r)
            .map(|(&k, v)| (k, v.clone()))
            .collect();
        Ok(QSeries { denom: 1, terms, trunc: self.trunc }.normalized())
    }

    pub fn inv(&self) -> Result<Self, SeriesError> {
        let v_key = match self.terms.keys().next() {
            Some(&k) => k,
            None => return Err(SeriesError::ZeroLeadingTerm),
        };
        let v = Ratio::new(v_key, self.denom);
        // a = lead · q^v · b with b = 1 + …, exact below T - v.
        let rel_trunc = self.trunc - v;
        let n = ceil_div(*rel_trunc.numer() * self.denom, *rel_trunc.denom()).max(0) as usize;
        let mut dense = vec![Rational::zero(); n];
        for (&k, c) in &self.terms {
            let idx = (k - v_key) as usize;
            if idx < n {
                dense[idx] = c.clone();
            }
        }
        let inverse = dense_inverse(&dense);
        let out = QSeries::from_dense(self.denom, 0, inverse, rel_trunc);
        // Shifting back by q^{-v}: exact below T - 2v.
        Ok(out.shift(-v))
    }

    /// Integer power by repeated squaring; negative powers invert first.
    pub fn pow(&self, e: i64) -> Result<Self, SeriesError> {
        if e == 0 {
            // x^0 = 1; the truncation follows x·x^{-1} when x is invertible.
            let t = match self.valuation() {
                Some(v) => self.trunc - v,
                None => self.trunc,
            };
            return Ok(QSeries::one(t));
        }
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc: Option<QSeries> = None;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(acc.expect("nonzero exponent"))
    }

    /// Exponents in which two series can be compared: below the smaller
    /// truncation. Errors when that range contains nothing to compare.
    fn comparison_trunc(&self, other: &QSeries) -> Result<Exponent, SeriesError> {
        let t = self.trunc.min(other.trunc);
        let low = Exponent::zero().min(self.effective_valuation()).min(other.effective_valuation());
        if t <= low {
            return Err(SeriesError::EmptyComparisonRange);
        }
        Ok(t)
    }

    pub fn first_difference(&self, other: &QSeries) -> Result<Option<Discrepancy>, SeriesError> {
        let t = self.comparison_trunc(other)?;
        let mut exps: Vec<Exponent> = self
            .terms()
            .chain(other.terms())
            .map(|(e, _)| e)
            .filter(|e| *e < t)
            .collect();
        exps.sort();
        exps.dedup();
        for e in exps {
            let a = self.coeff(e)?;
            let b = other.coeff(e)?;
            if a != b {
                return Ok(Some(Discrepancy { exponent: e, expected: a, got: b }));
            }
        }
        Ok(None)
    }

    /// Equality on the common exactly-known range.
    pub fn agrees_with(&self, other: &QSeries) -> Result<bool, SeriesError> {
        Ok(self.first_difference(other)?.is_none())
    }

    fn normalized(mut self) -> Self {
        let mut g = self.denom;
        for &k in self.terms.keys() {
            if g == 1 {
                break;
            }
            g = g.gcd(&k);
        }
        if g > 1 {
            self.denom /= g;
            self.terms = core::mem::take(&mut self.terms).into_iter().map(|(k, v)| (k / g, v)).collect();
        }
        self
    }

    /// Dense coefficient vector on a grid of denominator `denom` starting at
    /// `start`, covering every grid point below `trunc`.
    fn dense_on(&self, denom: i64, start: i64, trunc: Exponent) -> Vec<Rational> {
        let n = ceil_div(*trunc.numer() * denom, *trunc.denom()) - start;
        let n = n.max(0) as usize;
        let factor = denom / self.denom;
        let mut out = vec![Rational::zero(); n];
        for (&k, v) in &self.terms {
            let idx = k * factor - start;
            if idx >= 0 && (idx as usize) < n {
                out[idx as usize] = v.clone();
            }
        }
        out
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*q^({e})")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^({}))", self.trunc)
    }
}

fn all_integral(v: &[Rational]) -> bool {
    v.iter().all(|c| c.is_integer())
}

fn dense_mul(a: &[Rational], b: &[Rational], n: usize) -> Vec<Rational> {
    if all_integral(a) && all_integral(b) {
        let ai: Vec<BigInt> = a.iter().map(|c| c.to_integer()).collect();
        let bi: Vec<BigInt> = b.iter().map(|c| c.to_integer()).collect();
        let mut out = vec![BigInt::zero(); n];
        for (i, x) in ai.iter().enumerate().take(n) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in bi.iter().enumerate().take(n - i) {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        return out.into_iter().map(Rational::from_integer).collect();
    }
    let mut out = vec![Rational::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Inverse of a dense series with nonzero constant term.
fn dense_inverse(b: &[Rational]) -> Vec<Rational> {
    let n = b.len();
    if n == 0 {
        return Vec::new();
    }
    let lead = &b[0];
    if all_integral(b) && lead.abs().is_one() {
        let bi: Vec<BigInt> = b.iter().map(|c| c.to_integer()).collect();
        let sign = bi[0].clone();
        let mut out: Vec<BigInt> = Vec::with_capacity(n);
        out.push(sign.clone());
        for k in 1..n {
            let mut s = BigInt::zero();
            for j in 1..=k {
                if !bi[j].is_zero() {
                    s += &bi[j] * &out[k - j];
                }
            }
            out.push(-(s * &sign));
        }
        return out.into_iter().map(Rational::from_integer).collect();
    }
    let lead_inv = lead.recip();
    let mut out: Vec<Rational> = Vec::with_capacity(n);
    out.push(lead_inv.clone());
    for k in 1..n {
        let mut s = Rational::zero();
        for j in 1..=k {
            if !b[j].is_zero() {
                s += &b[j] * &out[k - j];
            }
        }
        out.push(-(s * &lead_inv));
    }
    out
}

impl Add for &QSeries {
    type Output = QSeries;

    fn add(self, rhs: &QSeries) -> QSeries {
        let denom = self.denom.lcm(&rhs.denom);
        let trunc = self.trunc.min(rhs.trunc);
        let mut terms: BTreeMap<i64, Rational> = BTreeMap::new();
        for s in [self, rhs] {
            let factor = denom / s.denom;
            for (&k, v) in &s.terms {
                if Ratio::new(k, s.denom) >= trunc {
                    continue;
                }
                let slot = terms.entry(k * factor).or_insert_with(Rational::zero);
                *slot += v;
            }
        }
        terms.retain(|_, v| !v.is_zero());
        QSeries { denom, terms, trunc }.normalized()
    }
}

impl Neg for &QSeries {
    type Output = QSeries;

    fn neg(self) -> QSeries {
        let terms = self.terms.iter().map(|(&k, v)| (k, -v)).collect();
        QSeries { denom: self.denom, terms, trunc: self.trunc }
    }
}

impl Sub for &QSeries {
    type Output = QSeries;

    fn sub(self, rhs: &QSeries) -> QSeries {
        self + &(-rhs)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;

    fn mul(self, rhs: &QSeries) -> QSeries {
        let va = self.effective_valuation();
        let vb = rhs.effective_valuation();
        let trunc = (self.trunc + vb).min(rhs.trunc + va);
        if self.is_zero() || rhs.is_zero() {
            return QSeries::zero(trunc);
        }
        let denom = self.denom.lcm(&rhs.denom);
        let sa = *self.terms.keys().next().unwrap() * (denom / self.denom);
        let sb = *rhs.terms.keys().next().unwrap() * (denom / rhs.denom);
        // Product coefficients at grid index i + j relative to sa + sb.
        let rel = trunc - Ratio::new(sa + sb, denom);
        let n = ceil_div(*rel.numer() * denom, *rel.denom()).max(0) as usize;
        let a = self.dense_on(denom, sa, Ratio::new(sa, denom) + rel);
        let b = rhs.dense_on(denom, sb, Ratio::new(sb, denom) + rel);
        let prod = dense_mul(&a, &b, n);
        QSeries::from_dense(denom, sa + sb, prod, trunc)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

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

    #[test]
    fn cancellation_and_identity() {
        let a = QSeries::from_integers(&[1, 1], t(50));
        let b = QSeries::from_integers(&[1, -1], t(50));
        assert_eq!(ints(&(&a + &b), 3), [2, 0, 0]);
        let z = QSeries::zero(t(50));
        assert!((&a + &z).agrees_with(&a).unwrap());
    }

    #[test]
    fn termwise_sum_against_direct_formula() {
        let n: Vec<i64> = (0..20).collect();
        let ones = vec![1i64; 20];
        let s = &QSeries::from_integers(&n, t(20)) + &QSeries::from_integers(&ones, t(20));
        let expected: Vec<i64> = (1..=20).collect();
        assert_eq!(ints(&s, 20), expected);
    }

    #[test]
    fn geometric_series_product() {
        let a = QSeries::from_integers(&[1, -1], t(50));
        let g = QSeries::from_integers(&[1; 50], t(50));
        let p = &a * &g;
        assert_eq!(p.trunc(), t(50));
        assert!(p.agrees_with(&QSeries::one(t(50))).unwrap());
    }

    #[test]
    fn half_exponents_add() {
        let h = QSeries::monomial(Rational::one(), exponent(1, 2), t(10));
        let p = &h * &h;
        assert_eq!(p.denom(), 1);
        assert_eq!(p.coeff(t(1)).unwrap(), Rational::one());
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn three_factor_euler_product() {
        let mut p = QSeries::one(t(100));
        for n in 1..=3usize {
            let mut f = vec![0i64; n + 1];
            f[0] = 1;
            f[n] = -1;
            p = &p * &QSeries::from_integers(&f, t(100));
        }
        assert_eq!(ints(&p, 8), [1, -1, -1, 0, 1, 1, -1, 0]);
    }

    #[test]
    fn inverse_examples() {
        let a = QSeries::from_integers(&[1, 1], t(10));
        assert_eq!(ints(&a.inv().unwrap(), 6), [1, -1, 1, -1, 1, -1]);

        let h = QSeries::monomial(Rational::one(), exponent(1, 2), t(10));
        let hi = h.inv().unwrap();
        assert_eq!(hi.valuation(), Some(exponent(-1, 2)));
        assert_eq!(hi.trunc(), t(9));

        // Fibonacci recurrence oracle.
        let mut fib = vec![1i64, 1];
        while fib.len() < 30 {
            let k = fib.len();
            fib.push(fib[k - 1] + fib[k - 2]);
        }
        let f = QSeries::from_integers(&[1, -1, -1], t(30)).inv().unwrap();
        assert_eq!(ints(&f, 30), fib);
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(QSeries::zero(t(5)).inv().unwrap_err(), SeriesError::ZeroLeadingTerm);
    }

    #[test]
    fn powers() {
        let a = QSeries::from_integers(&[1, 1], t(20));
        assert_eq!(ints(&a.pow(2).unwrap(), 4), [1, 2, 1, 0]);
        let b = QSeries::from_integers(&[1, -1], t(20));
        assert_eq!(ints(&b.pow(-1).unwrap(), 5), [1; 5]);
        assert!(a.pow(0).unwrap().agrees_with(&QSeries::one(t(20))).unwrap());
        // Binomial oracle: (1-q)^{-8} = Σ C(n+7, 7) q^n.
        let binom = |n: i64, k: i64| -> i64 { (0..k).fold(1i64, |acc, i| acc * (n - i) / (i + 1)) };
        let expected: Vec<i64> = (0..=10).map(|n| binom(n + 7, 7)).collect();
        assert_eq!(ints(&b.pow(-8).unwrap(), 11), expected);
    }

    #[test]
    fn exponent_scaling() {
        let a = QSeries::from_integers(&[1, 1], t(10));
        let s = a.scale_exponents(t(3));
        assert_eq!(ints(&s, 4), [1, 0, 0, 1]);
        assert_eq!(s.trunc(), t(30));
        let h = QSeries::monomial(Rational::one(), exponent(1, 2), t(10));
        let s = h.scale_exponents(t(2));
        assert_eq!(s.coeff(t(1)).unwrap(), Rational::one());
        assert_eq!(s.denom(), 1);
    }

    #[test]
    fn multisection_examples() {
        let a = QSeries::from_integers(&[1, 1, 1, 1], t(10));
        assert_eq!(ints(&a.multisection(2, 0).unwrap(), 4), [1, 0, 1, 0]);
        assert!(a.multisection(1, 0).unwrap().agrees_with(&a).unwrap());
        let h = QSeries::monomial(Rational::one(), exponent(1, 2), t(10));
        assert_eq!(h.multisection(2, 0).unwrap_err(), SeriesError::NonIntegerExponents);
    }

    #[test]
    fn comparison_on_common_range() {
        let a = QSeries::from_integers(&[1, 2, 3], t(3));
        let b = QSeries::from_integers(&[1, 2, 3, 4, 5], t(5));
        assert!(a.agrees_with(&b).unwrap());
        let c = QSeries::from_integers(&[1, 2, 4], t(3));
        let d = a.first_difference(&c).unwrap().unwrap();
        assert_eq!(d.exponent, t(2));
        assert_eq!(d.expected, rational_from_int(3));
        assert_eq!(d.got, rational_from_int(4));
    }

    #[test]
    fn empty_comparison_range_is_an_error() {
        let a = QSeries::zero(t(0));
        let b = QSeries::from_integers(&[1], t(5));
        assert_eq!(a.agrees_with(&b).unwrap_err(), SeriesError::EmptyComparisonRange);
    }

    #[test]
    fn lookup_beyond_truncation_fails() {
        let a = QSeries::from_integers(&[1, 2], t(2));
        assert!(matches!(a.coeff(t(2)), Err(SeriesError::BeyondTruncation { .. })));
        assert_eq!(a.coeff(exponent(1, 3)).unwrap(), Rational::zero());
    }

    #[test]
    fn mul_truncation_accounts_for_valuation() {
        // q·(1 + q + …) known below 5, times 1 + … known below 4.
        let a = QSeries::from_dense(1, 1, vec![rational_from_int(1); 4], t(5));
        let b = QSeries::from_integers(&[1, 1, 1, 1], t(4));
        assert_eq!((&a * &b).trunc(), t(5));
    }
}
