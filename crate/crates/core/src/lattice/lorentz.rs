use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_integer::Integer;
use num_traits::Zero;

use super::intmat::QMat;
use super::{dot, short_vectors, IntegralLattice, LatticeError, Q};

/// `α = (r*; m, n)` in `L* = F* ⊕ II_{1,1}`, where `z` are the coordinates of
/// `r*` in the dual basis of `F` (so `z_j = (r*, b_j)`) and `(m, n)` pair via
/// `[[0, -1], [-1, 0]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LorentzianPoint {
    pub z: Vec<i64>,
    pub m: i64,
    pub n: i64,
}

impl LorentzianPoint {
    pub fn new(z: Vec<i64>, m: i64, n: i64) -> Self {
        LorentzianPoint { z, m, n }
    }

    pub fn origin(rank: usize) -> Self {
        LorentzianPoint { z: alloc::vec![0; rank], m: 0, n: 0 }
    }

    pub fn height(&self) -> i64 {
        self.m + self.n
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0 && self.n == 0 && self.z.iter().all(|&x| x == 0)
    }

    pub fn add_scaled(&self, other: &Self, k: i64) -> Self {
        LorentzianPoint {
            z: self.z.iter().zip(&other.z).map(|(a, b)| a + k * b).collect(),
            m: self.m + k * other.m,
            n: self.n + k * other.n,
        }
    }

    pub fn scaled(&self, k: i64) -> Self {
        LorentzianPoint { z: self.z.iter().map(|a| a * k).collect(), m: self.m * k, n: self.n * k }
    }

    /// `self / k` if every coordinate is divisible by `k`.
    pub fn divided(&self, k: i64) -> Option<Self> {
        let divides = |x: &i64| x % k == 0;
        if !(self.z.iter().all(divides) && divides(&self.m) && divides(&self.n)) {
            return None;
        }
        Some(LorentzianPoint { z: self.z.iter().map(|a| a / k).collect(), m: self.m / k, n: self.n / k })
    }

    /// `gcd(z, m, n)`, the gcd of all pairings with an `L`-basis.
    pub fn coordinate_gcd(&self) -> i64 {
        self.z.iter().fold(self.m.gcd(&self.n), |g, x| g.gcd(x))
    }
}

// Height first, so ordered maps iterate level by level.
impl Ord for LorentzianPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.height()
            .cmp(&other.height())
            .then_with(|| other.m.cmp(&self.m))
            .then_with(|| self.z.cmp(&other.z))
    }
}

impl PartialOrd for LorentzianPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LorentzianPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.z.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "; {}, {})", self.m, self.n)
    }
}

/// `L = F ⊕ II_{1,1}` for a positive definite even lattice `F`.
#[derive(Clone, Debug)]
pub struct LorentzianLattice {
    definite: IntegralLattice,
    inv: QMat,
    // G⁻¹ = inv_num / inv_den with integer entries.
    inv_num: Vec<Vec<i128>>,
    inv_den: i128,
}

impl LorentzianLattice {
    pub fn new(definite: IntegralLattice) -> Result<Self, LatticeError> {
        let inv = definite.gram_inverse()?;
        let inv_den = inv.iter().flatten().fold(1i128, |l, x| l.lcm(x.denom()));
        let inv_num = inv.iter().map(|r| r.iter().map(|x| (x * Q::from_integer(inv_den)).to_integer()).collect()).collect();
        Ok(LorentzianLattice { definite, inv, inv_num, inv_den })
    }

    pub fn definite(&self) -> &IntegralLattice {
        &self.definite
    }

    pub fn rank(&self) -> usize {
        self.definite.rank()
    }

    fn z_q(p: &LorentzianPoint) -> Vec<Q> {
        p.z.iter().map(|&x| Q::from_integer(x.into())).collect()
    }

    /// `D·G⁻¹z` with `D` the common denominator of `G⁻¹`.
    fn scaled_coords(&self, p: &LorentzianPoint) -> Vec<i128> {
        self.inv_num.iter().map(|row| row.iter().zip(&p.z).map(|(a, &b)| a * i128::from(b)).sum()).collect()
    }

    /// `r*²` for the definite part.
    pub fn definite_norm(&self, p: &LorentzianPoint) -> Q {
        let w = self.scaled_coords(p);
        let num: i128 = w.iter().zip(&p.z).map(|(a, &b)| a * i128::from(b)).sum();
        Q::new(num, self.inv_den)
    }

    /// `α² = r*² - 2mn`.
    pub fn norm(&self, p: &LorentzianPoint) -> Q {
        self.definite_norm(p) - Q::from_integer(2 * i128::from(p.m) * i128::from(p.n))
    }

    /// Coordinates of `r*` in the basis of `F`.
    pub fn definite_coords(&self, p: &LorentzianPoint) -> Vec<Q> {
        let z = Self::z_q(p);
        self.inv.iter().map(|row| dot(row, &z)).collect()
    }

    /// Ambient vector of `r*`.
    pub fn definite_vector(&self, p: &LorentzianPoint) -> Vec<Q> {
        self.definite.vector(&self.definite_coords(p))
    }

    /// `L`-coordinates `(c; m, n)` if `α ∈ L`.
    pub fn lattice_coords(&self, p: &LorentzianPoint) -> Option<Vec<i64>> {
        self.scaled_coords(p)
            .iter()
            .map(|c| if c % self.inv_den == 0 { i64::try_from(c / self.inv_den).ok() } else { None })
            .collect()
    }

    pub fn in_lattice(&self, p: &LorentzianPoint) -> bool {
        self.scaled_coords(p).iter().all(|c| c % self.inv_den == 0)
    }

    /// `α ∈ k·L*`.
    pub fn in_scaled_dual(&self, p: &LorentzianPoint, k: i64) -> bool {
        p.divided(k).is_some()
    }

    /// `α ∈ k·L`.
    pub fn in_scaled_lattice(&self, p: &LorentzianPoint, k: i64) -> bool {
        p.divided(k).is_some_and(|q| self.in_lattice(&q))
    }

    /// `(α, L)`: gcd of the pairings of `α` with a basis of `L`.
    pub fn pairing_divisor(&self, p: &LorentzianPoint) -> i64 {
        p.coordinate_gcd()
    }

    pub fn in_positive_cone(&self, p: &LorentzianPoint) -> bool {
        !p.is_zero() && p.m >= 0 && p.n >= 0 && self.norm(p) <= Q::zero()
    }

    /// Dual vectors `z` with `r*² ≤ bound`, sorted by `z`.
    pub fn dual_vectors(&self, bound: Q) -> Result<Vec<(Vec<i64>, Q)>, LatticeError> {
        let zero = alloc::vec![Q::zero(); self.rank()];
        let mut out: Vec<(Vec<i64>, Q)> = short_vectors(&self.inv, &zero, bound)?
            .into_iter()
            .map(|(z, norm)| (z.iter().map(|x| i64::try_from(x.to_integer()).expect("small")).collect(), norm))
            .collect();
        out.sort();
        Ok(out)
    }

    /// Nonzero `α ∈ L*` with `m, n ≥ 0`, `m + n ≤ max_height` and `α² ≤ 0`,
    /// ordered by height, then decreasing `m`, then `z`.
    pub fn positive_cone_enum(&self, max_height: i64) -> Result<Vec<LorentzianPoint>, LatticeError> {
        let max_mn = (max_height / 2) * (max_height - max_height / 2);
        let vectors = self.dual_vectors(Q::from_integer(2 * i128::from(max_mn.max(0))))?;
        let mut out = Vec::new();
        for h in 1..=max_height {
            for m in (0..=h).rev() {
                let n = h - m;
                let bound = Q::from_integer(2 * i128::from(m) * i128::from(n));
                for (z, norm) in &vectors {
                    if *norm <= bound {
                        out.push(LorentzianPoint::new(z.clone(), m, n));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Primitive isotropic `λ ∈ L^+` with `h(λ) ≤ max_height`, each with the
    /// largest `k` such that `k·h(λ) ≤ max_height`.
    pub fn primitive_isotropic_enum(&self, max_height: i64) -> Result<Vec<(LorentzianPoint, i64)>, LatticeError> {
        let mut out = Vec::new();
        for p in self.positive_cone_enum(max_height)? {
            if !self.norm(&p).is_zero() {
                continue;
            }
            let Some(c) = self.lattice_coords(&p) else {
                continue;
            };
            let g = c.iter().fold(p.m.gcd(&p.n), |g, x| g.gcd(x));
            if g == 1 {
                let k = max_height / p.height();
                out.push((p, k));
            }
        }
        Ok(out)
    }
}
