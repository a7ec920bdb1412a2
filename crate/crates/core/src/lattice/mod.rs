//! Integral lattices in Euclidean space, sublattices of `E8` cut out by an
//! isometry, translated theta series and the Lorentzian lattices
//! `L = E8^u ⊕ II_{1,1}`.

pub mod intmat;
mod lorentz;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::octonion::Matrix8;
use crate::series::{Exponent, QSeries, Rational};
use intmat::{IMat, QMat};

pub use lorentz::{LorentzianLattice, LorentzianPoint};

/// Exact rational used for lattice geometry. Entries stay tiny here.
pub type Q = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("Gram matrix is singular")]
    SingularGram,
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("vector does not lie in the span of the lattice")]
    OutsideSpan,
    #[error("matrix does not preserve the lattice")]
    NotPreserved,
    #[error("matrix entry does not fit machine-size rationals")]
    EntryTooLarge,
    #[error("no preimage found among vectors of norm at most {0}")]
    SearchExhausted(Q),
}

/// Lattice spanned by the rows of `basis` inside Euclidean `ℚ^ambient_dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralLattice {
    ambient_dim: usize,
    basis: QMat,
    gram: QMat,
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

fn combination(coeffs: &[Q], rows: &[Vec<Q>], dim: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); dim];
    for (c, row) in coeffs.iter().zip(rows) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            *o += c * x;
        }
    }
    out
}

impl IntegralLattice {
    pub fn from_basis(ambient_dim: usize, basis: QMat) -> Self {
        assert!(basis.iter().all(|b| b.len() == ambient_dim));
        let gram = basis.iter().map(|a| basis.iter().map(|b| dot(a, b)).collect()).collect();
        IntegralLattice { ambient_dim, basis, gram }
    }

    pub fn from_integer_basis(ambient_dim: usize, basis: &[Vec<i64>]) -> Self {
        let rows = basis.iter().map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect()).collect();
        Self::from_basis(ambient_dim, rows)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn gram(&self) -> &[Vec<Q>] {
        &self.gram
    }

    pub fn det(&self) -> Q {
        intmat::determinant(&self.gram)
    }

    pub fn is_integral(&self) -> bool {
        self.gram.iter().flatten().all(Q::is_integer)
    }

    pub fn is_even(&self) -> bool {
        self.is_integral() && (0..self.rank()).all(|i| self.gram[i][i].to_integer() % 2 == 0)
    }

    /// Integer Gram matrix; panics if the lattice is not integral.
    pub fn integer_gram(&self) -> IMat {
        assert!(self.is_integral(), "lattice is not integral");
        self.gram.iter().map(|r| r.iter().map(Q::to_integer).collect()).collect()
    }

    pub fn gram_inverse(&self) -> Result<QMat, LatticeError> {
        intmat::inverse(&self.gram).ok_or(LatticeError::SingularGram)
    }

    /// Dual lattice: basis `G⁻¹B`, Gram `G⁻¹`.
    pub fn dual(&self) -> Result<Self, LatticeError> {
        let inv = self.gram_inverse()?;
        let basis = inv.iter().map(|row| combination(row, &self.basis, self.ambient_dim)).collect();
        Ok(IntegralLattice { ambient_dim: self.ambient_dim, basis, gram: inv })
    }

    /// Ambient vector `Σ c_i b_i`.
    pub fn vector(&self, coords: &[Q]) -> Vec<Q> {
        combination(coords, &self.basis, self.ambient_dim)
    }

    /// Coordinates of an ambient vector in the span, in this basis.
    pub fn coords_of(&self, v: &[Q]) -> Result<Vec<Q>, LatticeError> {
        let inv = self.gram_inverse()?;
        let pairings: Vec<Q> = self.basis.iter().map(|b| dot(b, v)).collect();
        let coords: Vec<Q> = inv.iter().map(|row| dot(row, &pairings)).collect();
        if self.vector(&coords) != v {
            return Err(LatticeError::OutsideSpan);
        }
        Ok(coords)
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.coords_of(v).is_ok_and(|c| c.iter().all(Q::is_integer))
    }

    /// Orthogonal projection of an ambient vector onto the span.
    pub fn project(&self, v: &[Q]) -> Result<Vec<Q>, LatticeError> {
        let inv = self.gram_inverse()?;
        let pairings: Vec<Q> = self.basis.iter().map(|b| dot(b, v)).collect();
        let coords: Vec<Q> = inv.iter().map(|row| dot(row, &pairings)).collect();
        Ok(self.vector(&coords))
    }

    /// Same lattice with an LLL-reduced basis.
    pub fn lll_reduced(&self) -> Self {
        let t = intmat::lll(&self.gram);
        let basis = t
            .iter()
            .map(|row| {
                let c: Vec<Q> = row.iter().map(|&x| Q::from_integer(x)).collect();
                self.vector(&c)
            })
            .collect();
        Self::from_basis(self.ambient_dim, basis)
    }

    /// Sublattice spanned by integer combinations (rows of `t`) of the basis.
    fn sublattice(&self, t: &[Vec<i128>]) -> Self {
        let basis = t
            .iter()
            .map(|row| {
                let c: Vec<Q> = row.iter().map(|&x| Q::from_integer(x)).collect();
                self.vector(&c)
            })
            .collect();
        Self::from_basis(self.ambient_dim, basis)
    }

    /// Least `N ≥ 1` with `N·β²` even for every dual vector `β`.
    pub fn level(&self) -> Result<i128, LatticeError> {
        let inv = self.gram_inverse()?;
        let mut n = 1i128;
        for (i, row) in inv.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let x = if i == j { x / Q::from_integer(2) } else { *x };
                n = num_integer::lcm(n, *x.denom());
            }
        }
        Ok(n)
    }

    /// Invariant factors and generators of `L*/L` from the Smith normal form
    /// of the Gram matrix.
    pub fn discriminant_group(&self) -> Result<DiscriminantGroup, LatticeError> {
        if self.det().is_zero() {
            return Err(LatticeError::SingularGram);
        }
        let (diag, _u, v) = intmat::smith_normal_form(&self.integer_gram());
        let vq = intmat::int_to_q(&v);
        let v_inv = intmat::inverse(&vq).expect("unimodular");
        let mut invariants = Vec::new();
        let mut generators = Vec::new();
        let mut label_rows = Vec::new();
        for (i, &d) in diag.iter().enumerate() {
            if d == 1 {
                continue;
            }
            invariants.push(d);
            let col: Vec<Q> = (0..self.rank()).map(|r| vq[r][i] / Q::from_integer(d)).collect();
            generators.push(col);
            label_rows.push(v_inv[i].clone());
        }
        Ok(DiscriminantGroup { invariants, generators, label_rows })
    }

    /// Every `v ∈ shift + L` with `v² ≤ max_norm`, in lexicographic order of
    /// ambient coordinates.
    pub fn enumerate_coset(&self, shift: &[Q], max_norm: Q) -> Result<Vec<Vec<Q>>, LatticeError> {
        let s = self.coords_of(shift)?;
        let mut out: Vec<Vec<Q>> =
            short_vectors(&self.gram, &s, max_norm)?.into_iter().map(|(c, _)| self.vector(&c)).collect();
        out.sort();
        Ok(out)
    }

    /// Shortest (then lexicographically least) vector of `shift + L`.
    pub fn shortest_in_coset(&self, shift: &[Q]) -> Result<Vec<Q>, LatticeError> {
        let mut bound = Q::from_integer(2);
        loop {
            let mut vs = self.enumerate_coset(shift, bound)?;
            if !vs.is_empty() {
                vs.sort_by(|a, b| dot(a, a).cmp(&dot(b, b)).then_with(|| a.cmp(b)));
                return Ok(vs.swap_remove(0));
            }
            bound *= Q::from_integer(2);
        }
    }

    /// `Σ_{v ∈ shift + L} q^{v²/2}`, exact below `prec`.
    pub fn theta_coset(&self, shift: &[Q], prec: Exponent) -> Result<QSeries, LatticeError> {
        let bound = Q::new((*prec.numer()).into(), (*prec.denom()).into()) * Q::from_integer(2);
        let s = self.coords_of(shift)?;
        let mut counts: BTreeMap<Q, i64> = BTreeMap::new();
        for (_, norm) in short_vectors(&self.gram, &s, bound)? {
            *counts.entry(norm).or_insert(0) += 1;
        }
        let terms = counts.into_iter().map(|(norm, k)| {
            let e = norm / Q::from_integer(2);
            let e = Exponent::new(e.numer().to_i64().expect("small"), e.denom().to_i64().expect("small"));
            (e, Rational::from_integer(BigInt::from(k)))
        });
        Ok(QSeries::from_terms(terms, prec))
    }
}

/// `L*/L ≅ ⊕ ℤ/d_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantGroup {
    invariants: Vec<i128>,
    /// Generator of the `i`-th cyclic factor, in lattice-basis coordinates.
    generators: Vec<Vec<Q>>,
    /// Rows of `V⁻¹` picking out the label of a dual vector.
    label_rows: Vec<Vec<Q>>,
}

impl DiscriminantGroup {
    pub fn invariants(&self) -> &[i128] {
        &self.invariants
    }

    pub fn order(&self) -> i128 {
        self.invariants.iter().product()
    }

    pub fn generators(&self) -> &[Vec<Q>] {
        &self.generators
    }

    /// Class of a dual vector (lattice-basis coordinates) as residues
    /// `a_i mod d_i`.
    pub fn label(&self, coords: &[Q]) -> Vec<i128> {
        self.label_rows
            .iter()
            .zip(&self.invariants)
            .map(|(row, &d)| {
                let x = dot(row, coords) * Q::from_integer(d);
                assert!(x.is_integer(), "vector is not in the dual lattice");
                x.to_integer().rem_euclid(d)
            })
            .collect()
    }

    /// All labels in lexicographic order.
    pub fn labels(&self) -> Vec<Vec<i128>> {
        let mut out = vec![Vec::new()];
        for &d in &self.invariants {
            out = out.into_iter().flat_map(|p| (0..d).map(move |a| [p.as_slice(), &[a]].concat())).collect();
        }
        out
    }

    /// Coordinates `Σ a_i g_i` of the class with the given label.
    pub fn representative(&self, label: &[i128]) -> Vec<Q> {
        let rank = self.generators.first().map_or(0, Vec::len);
        let mut out = vec![Q::zero(); rank];
        for (a, g) in label.iter().zip(&self.generators) {
            for (o, x) in out.iter_mut().zip(g) {
                *o += x * Q::from_integer(*a);
            }
        }
        out
    }
}

/// All `x ∈ s + ℤ^n` with `xᵀGx ≤ bound`, with their norms. Exact
/// Fincke–Pohst: each coordinate is scanned outward from the center of its
/// admissible interval.
pub fn short_vectors(gram: &[Vec<Q>], shift: &[Q], bound: Q) -> Result<Vec<(Vec<Q>, Q)>, LatticeError> {
    let n = gram.len();
    let mut out = Vec::new();
    if bound.is_negative() {
        return Ok(out);
    }
    if n == 0 {
        out.push((Vec::new(), Q::zero()));
        return Ok(out);
    }
    let (d, r) = intmat::ldl(gram).ok_or(LatticeError::NotPositiveDefinite)?;
    let mut x = vec![Q::zero(); n];
    descend(n - 1, &d, &r, shift, bound, Q::zero(), &mut x, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn descend(i: usize, d: &[Q], r: &[Vec<Q>], s: &[Q], bound: Q, used: Q, x: &mut [Q], out: &mut Vec<(Vec<Q>, Q)>) {
    let n = d.len();
    let center = -(i + 1..n).fold(Q::zero(), |acc, j| acc + r[i][j] * x[j]);
    let remaining = bound - used;
    let start = (center - s[i]).round().to_integer();
    let visit = |k: i128, x: &mut [Q], out: &mut Vec<(Vec<Q>, Q)>| -> bool {
        let xi = s[i] + Q::from_integer(k);
        let t = xi - center;
        let cost = d[i] * t * t;
        if cost > remaining {
            return false;
        }
        x[i] = xi;
        if i == 0 {
            out.push((x.to_vec(), used + cost));
        } else {
            descend(i - 1, d, r, s, bound, used + cost, x, out);
        }
        true
    };
    if !visit(start, x, out) {
        return;
    }
    let mut k = start + 1;
    while visit(k, x, out) {
        k += 1;
    }
    let mut k = start - 1;
    while visit(k, x, out) {
        k -= 1;
    }
}

fn half_vec(signs: [i64; 8]) -> Vec<Q> {
    signs.iter().map(|&s| Q::new(s.into(), 2)).collect()
}

/// `E8 = {x ∈ ℤ^8 ∪ (ℤ+½)^8 : Σx_i even}` with a simple-root basis.
pub fn e8() -> IntegralLattice {
    let mut basis = vec![half_vec([1, -1, -1, -1, -1, -1, -1, 1])];
    let unit = |i: usize| -> Vec<Q> { (0..8).map(|j| Q::from_integer(i128::from(i == j))).collect() };
    let add = |a: Vec<Q>, b: Vec<Q>, sign: i128| -> Vec<Q> {
        a.iter().zip(&b).map(|(x, y)| x + y * Q::from_integer(sign)).collect()
    };
    basis.push(add(unit(0), unit(1), 1));
    for i in 0..6 {
        basis.push(add(unit(i + 1), unit(i), -1));
    }
    IntegralLattice::from_basis(8, basis)
}

/// Root lattice `A_n` as the sum-zero vectors of `ℤ^{n+1}`.
pub fn a_n(n: usize) -> IntegralLattice {
    let basis = (0..n)
        .map(|i| (0..=n).map(|j| Q::from_integer(if j == i { 1 } else if j == i + 1 { -1 } else { 0 })).collect())
        .collect();
    IntegralLattice::from_basis(n + 1, basis)
}

/// Orthogonal direct sum, ambient spaces placed side by side.
pub fn direct_sum(a: &IntegralLattice, b: &IntegralLattice) -> IntegralLattice {
    let dim = a.ambient_dim + b.ambient_dim;
    let mut basis = Vec::new();
    for row in &a.basis {
        let mut v = row.clone();
        v.resize(dim, Q::zero());
        basis.push(v);
    }
    for row in &b.basis {
        let mut v = vec![Q::zero(); a.ambient_dim];
        v.extend(row.iter().copied());
        basis.push(v);
    }
    IntegralLattice::from_basis(dim, basis)
}

pub fn matrix_to_q(m: &Matrix8) -> Result<[[Q; 8]; 8], LatticeError> {
    let conv = |x: &Rational| -> Result<Q, LatticeError> {
        let n = x.numer().to_i128().ok_or(LatticeError::EntryTooLarge)?;
        let d = x.denom().to_i128().ok_or(LatticeError::EntryTooLarge)?;
        Ok(Q::new(n, d))
    };
    let mut out = [[Q::zero(); 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            out[i][j] = conv(&m.0[i][j])?;
        }
    }
    Ok(out)
}

fn apply(m: &[[Q; 8]; 8], v: &[Q]) -> Vec<Q> {
    (0..8).map(|i| dot(&m[i], v)).collect()
}

/// Whether `M` maps the (ambient dimension 8) lattice onto itself.
pub fn preserves(m: &Matrix8, lattice: &IntegralLattice) -> Result<bool, LatticeError> {
    let mq = matrix_to_q(m)?;
    Ok(lattice.basis.iter().all(|b| lattice.contains(&apply(&mq, b))))
}

/// Vectors of `lattice` fixed by `M`, as a primitive sublattice with an
/// LLL-reduced basis.
pub fn fixed_sublattice(m: &Matrix8, lattice: &IntegralLattice) -> Result<IntegralLattice, LatticeError> {
    if lattice.ambient_dim != 8 {
        return Err(LatticeError::OutsideSpan);
    }
    if !preserves(m, lattice)? {
        return Err(LatticeError::NotPreserved);
    }
    let mq = matrix_to_q(m)?;
    // Column j of (M - I)Bᵀ is M b_j - b_j.
    let images: Vec<Vec<Q>> =
        lattice.basis.iter().map(|b| apply(&mq, b).iter().zip(b).map(|(x, y)| x - y).collect()).collect();
    let a = intmat::clear_row_denominators(&intmat::transpose(&images, 8));
    let kernel = intmat::integer_kernel(&a, lattice.rank());
    Ok(lattice.sublattice(&kernel).lll_reduced())
}

/// Vectors of `container` orthogonal to `sub`, LLL-reduced.
pub fn orthogonal_complement(sub: &IntegralLattice, container: &IntegralLattice) -> IntegralLattice {
    let pairings: QMat = sub.basis.iter().map(|s| container.basis.iter().map(|b| dot(s, b)).collect()).collect();
    let a = intmat::clear_row_denominators(&pairings);
    let kernel = intmat::integer_kernel(&a, container.rank());
    container.sublattice(&kernel).lll_reduced()
}

/// For `r*` in the dual of `fixed`, finds the shortest (then lexicographically
/// least) `x ∈ container` projecting to `r*` and returns `x - r*`, a vector
/// in the dual of the orthogonal complement.
pub fn coset_complement_shift(
    fixed: &IntegralLattice,
    container: &IntegralLattice,
    r_star: &[Q],
    max_norm: Q,
) -> Result<Vec<Q>, LatticeError> {
    // π(x) = r* iff x and r* pair identically with a basis of `fixed`.
    let target: Vec<Q> = fixed.basis.iter().map(|b| dot(b, r_star)).collect();
    let zero = vec![Q::zero(); container.ambient_dim];
    let mut bound = dot(r_star, r_star).ceil() + Q::from_integer(2);
    loop {
        let bound_now = bound.min(max_norm);
        let mut candidates = container.enumerate_coset(&zero, bound_now)?;
        candidates.retain(|x| fixed.basis.iter().zip(&target).all(|(b, t)| dot(b, x) == *t));
        candidates.sort_by(|a, b| dot(a, a).cmp(&dot(b, b)).then_with(|| a.cmp(b)));
        if let Some(x) = candidates.first() {
            return Ok(x.iter().zip(r_star).map(|(a, b)| a - b).collect());
        }
        if bound_now >= max_norm {
            return Err(LatticeError::SearchExhausted(max_norm));
        }
        bound += Q::from_integer(2);
    }
}

pub fn q_to_rational(x: Q) -> Rational {
    Rational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

#[cfg(test)]
mod tests;
