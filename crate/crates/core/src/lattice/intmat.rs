//! Small dense integer and rational matrix routines: kernels over ℤ, Smith
//! normal form, rational inversion and LLL on a Gram matrix.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::Q;

pub type IMat = Vec<Vec<i128>>;
pub type QMat = Vec<Vec<Q>>;

/// `(g, x, y)` with `g = gcd(a, b) = x·a + y·b` and `g ≥ 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn identity_int(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

pub fn identity_q(n: usize) -> QMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>], cols: usize) -> Vec<Vec<T>> {
    (0..cols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_mul_q(a: &[Vec<Q>], b: &[Vec<Q>]) -> QMat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Q::zero(), |acc, k| acc + row[k] * b[k][j]))
                .collect()
        })
        .collect()
}

pub fn int_to_q(m: &[Vec<i128>]) -> QMat {
    m.iter().map(|r| r.iter().map(|&x| Q::from_integer(x)).collect()).collect()
}

/// Scales each row by the lcm of its denominators.
pub fn clear_row_denominators(m: &[Vec<Q>]) -> IMat {
    m.iter()
        .map(|row| {
            let l = row.iter().fold(1i128, |l, x| num_integer::lcm(l, *x.denom()));
            row.iter().map(|x| (x * Q::from_integer(l)).to_integer()).collect()
        })
        .collect()
}

/// Basis (as rows) of `{c ∈ ℤ^cols : A c = 0}`.
///
/// Row-reduces `[Aᵀ | I]` with unimodular operations; rows whose left block
/// vanishes carry a basis of the kernel.
pub fn integer_kernel(a: &[Vec<i128>], cols: usize) -> IMat {
    let rows = a.len();
    let mut m: Vec<(Vec<i128>, Vec<i128>)> = (0..cols)
        .map(|j| {
            let left: Vec<i128> = (0..rows).map(|i| a[i][j]).collect();
            let right: Vec<i128> = (0..cols).map(|k| i128::from(k == j)).collect();
            (left, right)
        })
        .collect();
    let mut pivot = 0usize;
    for c in 0..rows {
        if pivot == cols {
            break;
        }
        for i in pivot + 1..cols {
            let (x, y) = (m[pivot].0[c], m[i].0[c]);
            if y == 0 {
                continue;
            }
            let (g, s, t) = ext_gcd(x, y);
            let (xa, ya) = (x / g, y / g);
            let p = m[pivot].clone();
            let q = m[i].clone();
            m[pivot] = combine(&p, s, &q, t);
            m[i] = combine(&p, -ya, &q, xa);
        }
        if m[pivot].0[c] != 0 {
            pivot += 1;
        }
    }
    m.into_iter().skip(pivot).map(|(_, right)| right).collect()
}

fn combine(p: &(Vec<i128>, Vec<i128>), a: i128, q: &(Vec<i128>, Vec<i128>), b: i128) -> (Vec<i128>, Vec<i128>) {
    let f = |u: &[i128], v: &[i128]| -> Vec<i128> {
        u.iter().zip(v).map(|(&x, &y)| checked(a.checked_mul(x), b.checked_mul(y))).collect()
    };
    (f(&p.0, &q.0), f(&p.1, &q.1))
}

fn checked(a: Option<i128>, b: Option<i128>) -> i128 {
    a.zip(b).and_then(|(a, b)| a.checked_add(b)).expect("integer overflow in lattice reduction")
}

/// Smith normal form `U·M·V = D` of a square integer matrix. Returns the
/// diagonal of `D` (nonnegative, each dividing the next) with `U` and `V`.
pub fn smith_normal_form(m: &[Vec<i128>]) -> (Vec<i128>, IMat, IMat) {
    let n = m.len();
    let mut a: IMat = m.to_vec();
    let mut u = identity_int(n);
    let mut v = identity_int(n);
    for t in 0..n {
        loop {
            // Smallest nonzero entry of the trailing block goes to (t, t).
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                break;
            };
            a.swap(t, bi);
            u.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            for row in v.iter_mut() {
                row.swap(t, bj);
            }
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    for j in 0..n {
                        a[i][j] -= q * a[t][j];
                        u[i][j] -= q * u[t][j];
                    }
                }
                dirty |= a[i][t] != 0;
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    for i in 0..n {
                        a[i][j] -= q * a[i][t];
                        v[i][j] -= q * v[i][t];
                    }
                }
                dirty |= a[t][j] != 0;
            }
            if dirty {
                continue;
            }
            // Enforce divisibility of the remaining block.
            let bad = (t + 1..n).flat_map(|i| (t + 1..n).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % p != 0);
            match bad {
                Some((i, _)) => {
                    for j in 0..n {
                        a[t][j] += a[i][j];
                        u[t][j] += u[i][j];
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for j in 0..n {
                a[t][j] = -a[t][j];
                u[t][j] = -u[t][j];
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), u, v)
}

/// Inverse by Gauss–Jordan elimination, `None` if singular.
pub fn inverse(m: &[Vec<Q>]) -> Option<QMat> {
    let n = m.len();
    let mut a: QMat = m.to_vec();
    let mut inv = identity_q(n);
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        inv.swap(c, p);
        let s = a[c][c].recip();
        for j in 0..n {
            a[c][j] *= s;
            inv[c][j] *= s;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c];
                for j in 0..n {
                    let (x, y) = (a[c][j], inv[c][j]);
                    a[r][j] -= f * x;
                    inv[r][j] -= f * y;
                }
            }
        }
    }
    Some(inv)
}

pub fn determinant(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a: QMat = m.to_vec();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if !f.is_zero() {
                for j in c..n {
                    let x = a[c][j];
                    a[r][j] -= f * x;
                }
            }
        }
    }
    det
}

/// `G = Rᵀ·diag(d)·R` with `R` unit upper triangular, so that
/// `xᵀGx = Σ_i d_i (x_i + Σ_{j>i} R_ij x_j)²`. Requires `G` positive definite.
pub fn ldl(g: &[Vec<Q>]) -> Option<(Vec<Q>, QMat)> {
    let n = g.len();
    let mut d = vec![Q::zero(); n];
    let mut r = identity_q(n);
    for i in 0..n {
        let mut di = g[i][i];
        for k in 0..i {
            di -= d[k] * r[k][i] * r[k][i];
        }
        if !di.is_positive() {
            return None;
        }
        d[i] = di;
        for j in i + 1..n {
            let mut s = g[i][j];
            for k in 0..i {
                s -= d[k] * r[k][i] * r[k][j];
            }
            r[i][j] = s / di;
        }
    }
    Some((d, r))
}

/// LLL reduction (δ = 3/4) of a positive definite Gram matrix. Returns the
/// unimodular transform `T` whose rows express the reduced basis.
pub fn lll(gram: &[Vec<Q>]) -> IMat {
    let n = gram.len();
    let mut t = identity_int(n);
    if n < 2 {
        return t;
    }
    let delta = Q::new(3, 4);
    let current = |t: &IMat| {
        let tq = int_to_q(t);
        mat_mul_q(&mat_mul_q(&tq, gram), &transpose(&tq, n))
    };
    let mut k = 1usize;
    while k < n {
        let mut g = current(&t);
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&g);
            let q = mu[k][j].round().to_integer();
            if q != 0 {
                let row = t[j].clone();
                for (x, y) in t[k].iter_mut().zip(row) {
                    *x -= q * y;
                }
                g = current(&t);
            }
        }
        let (mu, b) = gram_schmidt(&g);
        if b[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            k += 1;
        } else {
            t.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    t
}

fn gram_schmidt(g: &[Vec<Q>]) -> (QMat, Vec<Q>) {
    let n = g.len();
    let mut mu = vec![vec![Q::zero(); n]; n];
    let mut b = vec![Q::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j];
            for l in 0..j {
                s -= mu[j][l] * mu[i][l] * b[l];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = g[i][i];
        for j in 0..i {
            s -= mu[i][j] * mu[i][j] * b[j];
        }
        b[i] = s;
    }
    (mu, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128) -> Q {
        Q::from_integer(n)
    }

    #[test]
    fn gcd_coefficients() {
        for (a, b) in [(12, 18), (-7, 3), (0, 5), (5, 0), (-4, -6)] {
            let (g, x, y) = ext_gcd(a, b);
            assert_eq!(g, num_integer::gcd(a, b));
            assert_eq!(x * a + y * b, g);
        }
    }

    #[test]
    fn kernel_of_small_matrix() {
        let a = vec![vec![1, 2, 3], vec![2, 4, 6]];
        let k = integer_kernel(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v[0] + 2 * v[1] + 3 * v[2], 0);
        }
        // Saturation: the kernel lattice has index 1 in its rational span.
        let m: QMat = k.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        let g = mat_mul_q(&m, &transpose(&m, 3));
        assert_eq!(determinant(&g), q(14));
    }

    #[test]
    fn smith_form_of_a2_pair() {
        let g = vec![vec![2, -1, 0, 0], vec![-1, 2, 0, 0], vec![0, 0, 2, -1], vec![0, 0, -1, 2]];
        let (d, u, v) = smith_normal_form(&g);
        assert_eq!(d, vec![1, 1, 3, 3]);
        let prod = mat_mul_q(&mat_mul_q(&int_to_q(&u), &int_to_q(&g)), &int_to_q(&v));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(prod[i][j], q(if i == j { d[i] } else { 0 }));
            }
        }
    }

    #[test]
    fn inverse_and_determinant() {
        let g: QMat = vec![vec![q(2), q(-1)], vec![q(-1), q(2)]];
        let inv = inverse(&g).unwrap();
        assert_eq!(inv[0][0], Q::new(2, 3));
        assert_eq!(inv[0][1], Q::new(1, 3));
        assert_eq!(determinant(&g), q(3));
        assert!(inverse(&[vec![q(1), q(2)], vec![q(2), q(4)]]).is_none());
    }

    #[test]
    fn lll_shortens_skewed_basis() {
        // Basis (1, 0), (100, 1) of ℤ².
        let g: QMat = vec![vec![q(1), q(100)], vec![q(100), q(10001)]];
        let t = lll(&g);
        let tq = int_to_q(&t);
        let reduced = mat_mul_q(&mat_mul_q(&tq, &g), &transpose(&tq, 2));
        assert_eq!(reduced[0][0], q(1));
        assert_eq!(reduced[1][1], q(1));
    }
}
