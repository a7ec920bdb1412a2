use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::*;
use crate::octonion::build_twist_element;
use crate::series::exponent;

fn q(n: i128) -> Q {
    Q::from_integer(n)
}

fn fixed(order: u32) -> IntegralLattice {
    let v = build_twist_element(order).unwrap().rho_v().unwrap();
    fixed_sublattice(&v, &e8()).unwrap()
}

fn theta_ints(l: &IntegralLattice, n: usize) -> Vec<i64> {
    let zero = vec![Q::zero(); l.ambient_dim()];
    let t = l.theta_coset(&zero, exponent(n as i64, 1)).unwrap();
    t.integer_coeffs(n).unwrap().iter().map(|c| i64::try_from(c.to_integer()).unwrap()).collect()
}

#[test]
fn e8_basics() {
    let e = e8();
    assert_eq!(e.rank(), 8);
    assert_eq!(e.det(), q(1));
    assert!(e.is_even());
    assert_eq!(e.level().unwrap(), 1);
    assert!(e.discriminant_group().unwrap().invariants().is_empty());
    let zero = vec![Q::zero(); 8];
    assert_eq!(e.enumerate_coset(&zero, q(2)).unwrap().len(), 241);
    assert_eq!(theta_ints(&e, 4), vec![1, 240, 2160, 6720]);
    assert!(e.enumerate_coset(&zero, Q::new(-1, 2)).unwrap().is_empty());
}

#[test]
fn e8_dual_is_itself() {
    let e = e8();
    let d = e.dual().unwrap();
    assert!(d.basis().iter().all(|b| e.contains(b)));
    assert_eq!(d.dual().unwrap().gram(), e.gram());
}

#[test]
fn a2_dual_coset() {
    let a2 = a_n(2);
    let dual = a2.dual().unwrap();
    assert_eq!(dual.det(), Q::new(1, 3));
    let g = a2.discriminant_group().unwrap();
    assert_eq!(g.invariants(), &[3]);
    let rep = a2.vector(&g.representative(&[1]));
    let vs = a2.enumerate_coset(&rep, Q::new(2, 3)).unwrap();
    assert_eq!(vs.len(), 3);
    assert!(vs.iter().all(|v| dot(v, v) == Q::new(2, 3)));
}

#[test]
fn fixed_lattice_of_order_three() {
    let f = fixed(3);
    assert_eq!((f.rank(), f.det()), (4, q(9)));
    assert!(f.is_even());
    assert_eq!(f.level().unwrap(), 3);
    assert_eq!(f.discriminant_group().unwrap().invariants(), &[3, 3]);
    for b in f.dual().unwrap().basis() {
        let tripled: Vec<Q> = b.iter().map(|x| x * q(3)).collect();
        assert!(f.contains(&tripled));
    }
    assert_eq!(theta_ints(&f, 11), printed_point_set_theta(3, 11));
}

#[test]
fn fixed_lattice_of_order_seven() {
    let f = fixed(7);
    assert_eq!((f.rank(), f.det()), (2, q(7)));
    assert_eq!(f.level().unwrap(), 7);
    assert_eq!(f.discriminant_group().unwrap().invariants(), &[7]);
    assert_eq!(theta_ints(&f, 11), printed_point_set_theta(7, 11));
}

/// Theta series of the explicitly described fixed point sets: half-integral
/// or integral coordinates with an even (order 3) or parity-twisted
/// (order 7) sum, weighted by `diag(1,1,3,3)` resp. `diag(1,7)`.
fn printed_point_set_theta(order: u32, n: usize) -> Vec<i64> {
    let mut counts = vec![0i64; n];
    let r = 2 * n as i64 + 2;
    match order {
        3 => {
            for a in -r..=r {
                for b in -r..=r {
                    for c in -r..=r {
                        for d in -r..=r {
                            // Doubled coordinates.
                            let all_even = [a, b, c, d].iter().all(|x| x % 2 == 0);
                            let all_odd = [a, b, c, d].iter().all(|x| x % 2 != 0);
                            if !(all_even || all_odd) || (a + b + c + d) % 4 != 0 {
                                continue;
                            }
                            let norm4 = a * a + b * b + 3 * c * c + 3 * d * d;
                            let e = norm4 / 8;
                            if norm4 % 8 == 0 && (e as usize) < n {
                                counts[e as usize] += 1;
                            }
                        }
                    }
                }
            }
        }
        7 => {
            for a in -r..=r {
                for b in -r..=r {
                    let ok = if a % 2 == 0 && b % 2 == 0 {
                        (a + b) % 4 == 0
                    } else if a % 2 != 0 && b % 2 != 0 {
                        (a + b).rem_euclid(4) == 2
                    } else {
                        false
                    };
                    if !ok {
                        continue;
                    }
                    let norm4 = a * a + 7 * b * b;
                    if norm4 % 8 == 0 && ((norm4 / 8) as usize) < n {
                        counts[(norm4 / 8) as usize] += 1;
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    counts
}

#[test]
fn complements_match_root_lattices() {
    let e = e8();
    let c3 = orthogonal_complement(&fixed(3), &e);
    assert_eq!((c3.rank(), c3.det()), (4, q(9)));
    let a2a2 = direct_sum(&a_n(2), &a_n(2));
    let t = theta_ints(&c3, 11);
    assert_eq!(t[1], 12);
    assert_eq!(t, theta_ints(&a2a2, 11));

    let c7 = orthogonal_complement(&fixed(7), &e);
    assert_eq!((c7.rank(), c7.det()), (6, q(7)));
    let t = theta_ints(&c7, 11);
    assert_eq!(t[1], 42);
    assert_eq!(t, theta_ints(&a_n(6), 11));
}

#[test]
fn trivial_fixed_and_complement() {
    let e = e8();
    let id = crate::octonion::Matrix8::identity();
    let f = fixed_sublattice(&id, &e).unwrap();
    assert_eq!((f.rank(), f.det()), (8, q(1)));
    assert_eq!(orthogonal_complement(&f, &e).rank(), 0);
    let empty = orthogonal_complement(&f, &e);
    assert_eq!(theta_ints(&empty, 3), vec![1, 0, 0]);
}

#[test]
fn dual_of_dual_is_original() {
    for l in [fixed(3), fixed(7), a_n(6)] {
        let dd = l.dual().unwrap().dual().unwrap();
        assert_eq!(dd.gram(), l.gram());
        assert_eq!(dd.basis(), l.basis());
    }
}

#[test]
fn discriminant_order_equals_determinant() {
    for l in [e8(), fixed(3), fixed(7), direct_sum(&a_n(2), &a_n(2)), a_n(6)] {
        assert_eq!(Q::from_integer(l.discriminant_group().unwrap().order()), l.det());
    }
}

#[test]
fn discriminant_labels_are_consistent() {
    let f = fixed(3);
    let g = f.discriminant_group().unwrap();
    let labels = g.labels();
    assert_eq!(labels.len(), 9);
    for l in &labels {
        assert_eq!(&g.label(&g.representative(l)), l);
    }
    // Lattice vectors have the trivial label.
    assert_eq!(g.label(&[q(1), q(-2), q(0), q(5)]), vec![0, 0]);
}

#[test]
fn complement_shifts() {
    let e = e8();
    for order in [3u32, 7] {
        let f = fixed(order);
        let c = orthogonal_complement(&f, &e);
        let cd = c.dual().unwrap();
        let g = f.discriminant_group().unwrap();
        for label in g.labels() {
            let r_star = f.shortest_in_coset(&f.vector(&g.representative(&label))).unwrap();
            let shift = coset_complement_shift(&f, &e, &r_star, q(16)).unwrap();
            assert!(cd.contains(&shift));
            let total = dot(&r_star, &r_star) + dot(&shift, &shift);
            assert!(total.is_integer() && total.to_integer() % 2 == 0);
            let n = Q::from_integer(order.into()) * dot(&shift, &shift) / q(2);
            assert!(n.is_integer());
            if label.iter().all(|&a| a == 0) {
                assert!(c.contains(&shift));
            } else {
                assert!(!c.contains(&shift));
            }
        }
    }
}

#[test]
fn twist_preserves_e8() {
    for order in [1u32, 3, 7] {
        let u = build_twist_element(order).unwrap();
        assert!(preserves(&u.rho_v().unwrap(), &e8()).unwrap());
        assert!(preserves(&u.rho_l().unwrap(), &e8()).unwrap());
    }
    assert!(preserves(&build_twist_element(3).unwrap().rho_r().unwrap(), &e8()).unwrap());
    // In these coordinates the right action of the order 7 element does not
    // keep E8 invariant.
    assert!(!preserves(&build_twist_element(7).unwrap().rho_r().unwrap(), &e8()).unwrap());
}

#[test]
fn cone_at_height_one() {
    for order in [1u32, 3, 7] {
        let l = LorentzianLattice::new(fixed(order)).unwrap();
        let r = l.rank();
        let pts = l.positive_cone_enum(1).unwrap();
        assert_eq!(pts, vec![LorentzianPoint::new(vec![0; r], 1, 0), LorentzianPoint::new(vec![0; r], 0, 1)]);
        assert_eq!(l.pairing_divisor(&pts[0]), 1);
        let iso = l.primitive_isotropic_enum(1).unwrap();
        assert_eq!(iso.len(), 2);
    }
}

#[test]
fn cone_matches_bounding_box_scan() {
    let l = LorentzianLattice::new(fixed(7)).unwrap();
    let h = 4;
    let pts = l.positive_cone_enum(h).unwrap();
    let mut scan = Vec::new();
    for a in -12i64..=12 {
        for b in -12i64..=12 {
            for m in 0..=h {
                for n in 0..=h - m {
                    let p = LorentzianPoint::new(vec![a, b], m, n);
                    if l.in_positive_cone(&p) {
                        scan.push(p);
                    }
                }
            }
        }
    }
    scan.sort();
    assert_eq!(pts, scan);
    assert!(pts.iter().all(|p| l.norm(p) <= Q::zero()));
    // Height 2 contains (0; 1, 1) and every dual vector of norm ≤ 2 there.
    let at_11: Vec<_> = pts.iter().filter(|p| p.m == 1 && p.n == 1).collect();
    assert_eq!(at_11.len(), l.dual_vectors(q(2)).unwrap().len());
    assert!(at_11.iter().any(|p| p.z == vec![0, 0]));
}

#[test]
fn divisibility_by_three() {
    let l = LorentzianLattice::new(fixed(3)).unwrap();
    for p in l.positive_cone_enum(3).unwrap() {
        let t = p.scaled(3);
        assert_eq!(l.pairing_divisor(&t) % 3 == 0, l.in_scaled_dual(&t, 3));
        assert!(l.in_lattice(&t));
    }
}

#[test]
fn isotropic_vectors_are_primitive_and_null() {
    let l = LorentzianLattice::new(fixed(3)).unwrap();
    let iso = l.primitive_isotropic_enum(4).unwrap();
    assert!(iso.iter().all(|(p, k)| l.norm(p).is_zero() && *k == 4 / p.height() && l.pairing_divisor(p) >= 1));
    // Brute force: (r; m, n) with r in F, r² = 2mn, primitive in L.
    let mut count = 0;
    for p in l.positive_cone_enum(4).unwrap() {
        if let Some(c) = l.lattice_coords(&p) {
            let g = c.iter().fold(num_integer::gcd(p.m, p.n), |g, x| num_integer::gcd(g, *x));
            if l.norm(&p).is_zero() && g == 1 {
                count += 1;
            }
        }
    }
    assert_eq!(iso.len(), count);
    assert!(iso.len() > 2);
}
