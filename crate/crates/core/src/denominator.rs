//! Lattice-graded expansion of both sides of the (twisted) denominator
//! identity, truncated at a height bound.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{ToPrimitive, Zero};

use crate::lattice::{LatticeError, LorentzianPoint};
use crate::multiplicity::{MultError, TwistClass};
use crate::series::{int_exponent, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DenominatorError {
    #[error("coefficient overflow while expanding the product")]
    Overflow,
    #[error("height bound {0} is not positive")]
    BadHeight(i64),
    #[error(transparent)]
    Mult(#[from] MultError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `Σ c_α e^α` over `α` with `0 ≤ h(α) ≤ H`, stored level by level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSeries {
    max_height: i64,
    rank: usize,
    levels: Vec<BTreeMap<LorentzianPoint, i128>>,
}

fn add_checked(level: &mut BTreeMap<LorentzianPoint, i128>, p: LorentzianPoint, v: i128) -> Result<(), DenominatorError> {
    match level.entry(p) {
        Entry::Vacant(e) => {
            if v != 0 {
                e.insert(v);
            }
        }
        Entry::Occupied(mut e) => {
            let s = e.get().checked_add(v).ok_or(DenominatorError::Overflow)?;
            if s == 0 {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
    Ok(())
}

/// First key at which two series differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMismatch {
    pub point: LorentzianPoint,
    pub expected: i128,
    pub got: i128,
}

impl fmt::Display for SeriesMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: expected {}, got {}", self.point, self.expected, self.got)
    }
}

impl LatticeSeries {
    pub fn zero(rank: usize, max_height: i64) -> Self {
        let levels = (0..=max_height.max(0)).map(|_| BTreeMap::new()).collect();
        LatticeSeries { max_height, rank, levels }
    }

    pub fn one(rank: usize, max_height: i64) -> Self {
        let mut s = Self::zero(rank, max_height);
        s.add_term(LorentzianPoint::origin(rank), 1);
        s
    }

    pub fn max_height(&self) -> i64 {
        self.max_height
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Adds `c·e^α`; terms above the height bound are dropped.
    pub fn add_term(&mut self, point: LorentzianPoint, c: i128) {
        let h = point.height();
        assert!(h >= 0, "negative height");
        if h > self.max_height || c == 0 {
            return;
        }
        add_checked(&mut self.levels[h as usize], point, c).expect("coefficient overflow");
    }

    pub fn coeff(&self, point: &LorentzianPoint) -> i128 {
        let h = point.height();
        if h < 0 || h > self.max_height {
            return 0;
        }
        self.levels[h as usize].get(point).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Terms in increasing height order.
    pub fn iter(&self) -> impl Iterator<Item = (&LorentzianPoint, &i128)> + '_ {
        self.levels.iter().flat_map(|l| l.iter())
    }

    /// Same series cut at a lower height.
    pub fn restrict(&self, max_height: i64) -> Self {
        let h = max_height.min(self.max_height);
        LatticeSeries { max_height: h, rank: self.rank, levels: self.levels[..=(h.max(0) as usize)].to_vec() }
    }

    /// Multiplies in place by `Σ_k coeffs[k]·e^{kα}` (`coeffs[0]` must be 1).
    pub fn mul_geometric(&mut self, alpha: &LorentzianPoint, coeffs: &[i128]) -> Result<(), DenominatorError> {
        debug_assert_eq!(coeffs.first(), Some(&1));
        let h = alpha.height();
        assert!(h >= 1, "factor must have positive height");
        // Targets at height t read only strictly lower levels, so walking
        // down keeps the sources unmodified.
        for t in (h..=self.max_height).rev() {
            let mut updates: Vec<(LorentzianPoint, i128)> = Vec::new();
            for (k, &ck) in coeffs.iter().enumerate().skip(1) {
                let src = t - (k as i64) * h;
                if src < 0 {
                    break;
                }
                if ck == 0 {
                    continue;
                }
                for (beta, &c) in &self.levels[src as usize] {
                    let v = c.checked_mul(ck).ok_or(DenominatorError::Overflow)?;
                    updates.push((beta.add_scaled(alpha, k as i64), v));
                }
            }
            let level = &mut self.levels[t as usize];
            for (p, v) in updates {
                add_checked(level, p, v)?;
            }
        }
        Ok(())
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self, DenominatorError> {
        let h = self.max_height.min(other.max_height);
        let mut out = Self::zero(self.rank, h);
        for (a, &ca) in self.iter() {
            if a.height() > h {
                break;
            }
            for level in &other.levels[..=((h - a.height()) as usize)] {
                for (b, &cb) in level {
                    let v = ca.checked_mul(cb).ok_or(DenominatorError::Overflow)?;
                    let p = a.add_scaled(b, 1);
                    add_checked(&mut out.levels[p.height() as usize], p, v)?;
                }
            }
        }
        Ok(out)
    }

    /// First point, in height order, where `self` (expected) and `other`
    /// (got) differ, comparing up to the smaller height bound.
    pub fn first_difference(&self, other: &Self) -> Option<SeriesMismatch> {
        let h = self.max_height.min(other.max_height);
        for t in 0..=(h.max(0) as usize) {
            let keys: alloc::collections::BTreeSet<&LorentzianPoint> =
                self.levels[t].keys().chain(other.levels[t].keys()).collect();
            for k in keys {
                let (a, b) = (self.coeff(k), other.coeff(k));
                if a != b {
                    return Some(SeriesMismatch { point: k.clone(), expected: a, got: b });
                }
            }
        }
        None
    }
}

/// Coefficients of `(1 - x)^{m_even} (1 + x)^{-m_odd}` up to `x^k_max`.
pub fn factor_coefficients(m_even: i128, m_odd: i128, k_max: usize) -> Result<Vec<i128>, DenominatorError> {
    let binom_row = |neg: bool, m: i128| -> Result<Vec<i128>, DenominatorError> {
        // (1 - x)^m = Σ (-1)^k C(m,k) x^k; (1 + x)^{-m} = Σ (-1)^k C(m+k-1,k) x^k.
        let mut out = vec![1i128];
        let mut c: i128 = 1;
        for k in 1..=k_max as i128 {
            let top = if neg { m + k - 1 } else { m - k + 1 };
            c = c.checked_mul(top).ok_or(DenominatorError::Overflow)? / k;
            out.push(if k % 2 == 1 { -c } else { c });
        }
        Ok(out)
    };
    let a = binom_row(false, m_even)?;
    let b = binom_row(true, m_odd)?;
    let mut out = vec![0i128; k_max + 1];
    for i in 0..=k_max {
        for j in 0..=k_max - i {
            let v = a[i].checked_mul(b[j]).ok_or(DenominatorError::Overflow)?;
            out[i + j] = out[i + j].checked_add(v).ok_or(DenominatorError::Overflow)?;
        }
    }
    Ok(out)
}

/// `(1 - e^α)^{m_even} (1 + e^α)^{-m_odd}` as a lattice series.
pub fn expand_factor(
    alpha: &LorentzianPoint,
    m_even: i128,
    m_odd: i128,
    max_height: i64,
) -> Result<LatticeSeries, DenominatorError> {
    let mut s = LatticeSeries::one(alpha.z.len(), max_height);
    let h = alpha.height();
    if h >= 1 && h <= max_height {
        let coeffs = factor_coefficients(m_even, m_odd, (max_height / h) as usize)?;
        s.mul_geometric(alpha, &coeffs)?;
    }
    Ok(s)
}

/// Which product is expanded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProductForm {
    /// Separate products over `L^+` with exponent `c(-α²/2)` and over
    /// `L^+ ∩ N·L*` with exponent `c(-α²/2N)`.
    Split,
    /// One factor per `α ∈ L*^+` with the convolution multiplicity.
    Theorem1,
}

/// One factor `(1 - e^α)^{m} (1 + e^α)^{-m'}` with its expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub point: LorentzianPoint,
    pub m_even: i128,
    pub m_odd: i128,
    pub coeffs: Vec<i128>,
}

fn c_coeff(tc: &TwistClass, x: crate::lattice::Q) -> Result<i128, DenominatorError> {
    let e = crate::series::Exponent::new(x.numer().to_i64().expect("small"), x.denom().to_i64().expect("small"));
    let c = tc.c_series().coeff(e)?;
    c.to_integer().to_i128().ok_or(DenominatorError::Overflow)
}

/// Factors of the product side in enumeration order, skipping trivial ones.
pub fn factor_list(tc: &TwistClass, max_height: i64, form: ProductForm) -> Result<Vec<Factor>, DenominatorError> {
    if max_height < 1 {
        return Err(DenominatorError::BadHeight(max_height));
    }
    let lorentz = tc.lorentzian();
    let n = i64::from(tc.order());
    let mut out = Vec::new();
    let mut push = |point: &LorentzianPoint, m_even: i128, m_odd: i128| -> Result<(), DenominatorError> {
        if m_even == 0 && m_odd == 0 {
            return Ok(());
        }
        let coeffs = factor_coefficients(m_even, m_odd, (max_height / point.height()) as usize)?;
        out.push(Factor { point: point.clone(), m_even, m_odd, coeffs });
        Ok(())
    };
    for alpha in lorentz.positive_cone_enum(max_height)? {
        match form {
            ProductForm::Theorem1 => {
                let (e, o) = tc.mult_pair(&alpha)?;
                push(&alpha, e, o)?;
            }
            ProductForm::Split => {
                if !lorentz.in_lattice(&alpha) {
                    continue;
                }
                let half = -lorentz.norm(&alpha) / crate::lattice::Q::from_integer(2);
                let m = c_coeff(tc, half)?;
                push(&alpha, m, m)?;
                if n > 1 && lorentz.in_scaled_dual(&alpha, n) {
                    let m = c_coeff(tc, half / crate::lattice::Q::from_integer(n.into()))?;
                    push(&alpha, m, m)?;
                }
            }
        }
    }
    Ok(out)
}

/// Product of the given factors, truncated at `max_height`.
pub fn partial_product(factors: &[Factor], rank: usize, max_height: i64) -> Result<LatticeSeries, DenominatorError> {
    let mut acc = LatticeSeries::one(rank, max_height);
    for f in factors {
        acc.mul_geometric(&f.point, &f.coeffs)?;
    }
    Ok(acc)
}

/// Sequential expansion of the product side.
pub fn product_side(tc: &TwistClass, max_height: i64, form: ProductForm) -> Result<LatticeSeries, DenominatorError> {
    let factors = factor_list(tc, max_height, form)?;
    partial_product(&factors, tc.lorentzian().rank(), max_height)
}

/// `1 + Σ_λ Σ_{k h(λ) ≤ H} a(k) e^{kλ}` over primitive isotropic `λ ∈ L^+`.
pub fn sum_side(tc: &TwistClass, max_height: i64) -> Result<LatticeSeries, DenominatorError> {
    if max_height < 1 {
        return Err(DenominatorError::BadHeight(max_height));
    }
    let rank = tc.lorentzian().rank();
    let mut s = LatticeSeries::one(rank, max_height);
    for (lambda, kmax) in tc.lorentzian().primitive_isotropic_enum(max_height)? {
        for k in 1..=kmax {
            let a = tc.tail().coeff(int_exponent(k))?;
            let a = a.to_integer().to_i128().ok_or(DenominatorError::Overflow)?;
            s.add_term(lambda.scaled(k), a);
        }
    }
    Ok(s)
}

/// Outcome of comparing both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub order: u32,
    pub max_height: i64,
    pub factor_count: usize,
    pub product_terms: usize,
    pub sum_terms: usize,
    /// Sum side (expected) against the split product (got).
    pub mismatch: Option<SeriesMismatch>,
    /// Split product (expected) against the single-product form (got).
    pub form_mismatch: Option<SeriesMismatch>,
    /// A negative-norm point with a nonzero product coefficient.
    pub anisotropic_violation: Option<SeriesMismatch>,
    pub negative_norm_points: usize,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none() && self.form_mismatch.is_none() && self.anisotropic_violation.is_none()
    }
}

/// Compares already expanded products against the sum side.
pub fn assemble_report(
    tc: &TwistClass,
    max_height: i64,
    factor_count: usize,
    split: &LatticeSeries,
    theorem1: &LatticeSeries,
) -> Result<IdentityReport, DenominatorError> {
    let lorentz = tc.lorentzian();
    let sum = sum_side(tc, max_height)?;
    let mismatch = sum.first_difference(split);
    let form_mismatch = split.first_difference(theorem1);
    let mut anisotropic_violation = None;
    let mut negative_norm_points = 0;
    for p in lorentz.positive_cone_enum(max_height)? {
        if lorentz.norm(&p) < crate::lattice::Q::zero() {
            negative_norm_points += 1;
            let got = split.coeff(&p);
            if got != 0 && anisotropic_violation.is_none() {
                anisotropic_violation = Some(SeriesMismatch { point: p, expected: 0, got });
            }
        }
    }
    Ok(IdentityReport {
        order: tc.order(),
        max_height,
        factor_count,
        product_terms: split.len(),
        sum_terms: sum.len(),
        mismatch,
        form_mismatch,
        anisotropic_violation,
        negative_norm_points,
    })
}

/// Expands both product forms sequentially and compares with the sum side.
pub fn verify_identity(tc: &TwistClass, max_height: i64) -> Result<IdentityReport, DenominatorError> {
    let split_factors = factor_list(tc, max_height, ProductForm::Split)?;
    let rank = tc.lorentzian().rank();
    let split = partial_product(&split_factors, rank, max_height)?;
    let theorem1 = product_side(tc, max_height, ProductForm::Theorem1)?;
    assemble_report(tc, max_height, split_factors.len(), &split, &theorem1)
}
