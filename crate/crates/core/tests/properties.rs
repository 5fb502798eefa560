//! Randomized invariants checked against brute-force oracles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use surfsing::fan_census::{
    binomial, census as fan_census, faces, fixture_library, singular_orbit_count,
    weighted_projective_fan, FanNd,
};
use surfsing::lattice::{
    det2, int, is_negative_definite, primitive, random_unimodular, smith_normal_form,
    solve_rational, IntMatrix, LatticeVector, RationalMatrix,
};
use surfsing::surface::{chain_surface, SurfaceModel};
use surfsing::toric::{
    canonical_degree, hj_evaluate, hj_expand, quotient_type, random_complete_fan,
    resolve_singularity, toric_intersection, toric_mmp, Cone2, QuotientSingularity,
};
use surfsing::wps::{
    stratum_points, vertex_membership, StratumCount, VertexMembership, WeightedFamily,
};

/// Laplace expansion along the first row.
fn cofactor_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] as i128 * cofactor_det(&minor)
        })
        .sum()
}

fn square(max_d: usize, lo: i64, hi: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_d).prop_flat_map(move |d| prop::collection::vec(prop::collection::vec(lo..=hi, d), d))
}

fn symmetric(max_d: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_d)
        .prop_flat_map(|d| {
            (
                prop::collection::vec(-8i64..=0, d),
                prop::collection::vec(-3i64..=3, d * d),
            )
        })
        .prop_map(|(diag, off)| {
            let d = diag.len();
            let mut m = vec![vec![0; d]; d];
            for i in 0..d {
                m[i][i] = diag[i];
                for j in i + 1..d {
                    m[i][j] = off[i * d + j];
                    m[j][i] = off[i * d + j];
                }
            }
            m
        })
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn apply(m: &IntMatrix, v: [i64; 2]) -> [i64; 2] {
    let w = m.apply(&LatticeVector::new(v.to_vec())).unwrap();
    [w.coords()[0], w.coords()[1]]
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn primitive_is_idempotent(x in -1000i64..1000, y in -1000i64..1000, z in -1000i64..1000) {
        let v = LatticeVector::new(vec![x, y, z]);
        prop_assume!(!v.is_zero());
        let p = primitive(&v).unwrap();
        prop_assert!(p.is_primitive());
        prop_assert_eq!(primitive(&p).unwrap(), p);
    }

    #[test]
    fn det2_alternating_and_scaling(a in prop::array::uniform2(-500i64..500),
                                    b in prop::array::uniform2(-500i64..500),
                                    k in -20i64..20) {
        let (u, v) = (LatticeVector::new(a.to_vec()), LatticeVector::new(b.to_vec()));
        prop_assert_eq!(det2(&u, &v).unwrap(), -det2(&v, &u).unwrap());
        let ku = LatticeVector::new(vec![k * a[0], k * a[1]]);
        prop_assert_eq!(det2(&ku, &v).unwrap(), k * det2(&u, &v).unwrap());
    }

    #[test]
    fn smith_factors_multiply_to_determinant(m in square(4, -6, 6)) {
        let d = m.len();
        let det = cofactor_det(&m);
        let snf = smith_normal_form(&IntMatrix::from_rows(&m));
        let factors = snf.invariant_factors();
        if det == 0 {
            prop_assert!(snf.rank() < d);
        } else {
            prop_assert_eq!(factors.len(), d);
            let prod: BigInt = factors.iter().product();
            prop_assert_eq!(prod.abs(), BigInt::from(det.abs()));
            prop_assert!(factors.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
        }
    }

    #[test]
    fn solve_back_substitutes(m in square(5, -5, 5), rhs in prop::collection::vec(-9i64..9, 5)) {
        prop_assume!(cofactor_det(&m) != 0);
        let g = RationalMatrix::from_i64_rows(&m);
        let b: Vec<BigRational> = rhs[..m.len()].iter().map(|&x| int(x)).collect();
        let x = solve_rational(&g, &b).unwrap();
        prop_assert_eq!(g.mul_vec(&x), b);
    }

    #[test]
    fn negative_definite_matches_principal_minors(m in symmetric(6)) {
        let d = m.len();
        // negative definite iff every principal minor of size k has sign (-1)^k
        let oracle = (1u32..1 << d).all(|mask| {
            let idx: Vec<usize> = (0..d).filter(|i| mask >> i & 1 == 1).collect();
            let sub: Vec<Vec<i64>> = idx.iter().map(|&i| idx.iter().map(|&j| m[i][j]).collect()).collect();
            let det = cofactor_det(&sub);
            if idx.len().is_multiple_of(2) { det > 0 } else { det < 0 }
        });
        prop_assert_eq!(is_negative_definite(&RationalMatrix::from_i64_rows(&m)).unwrap(), oracle);
    }

    #[test]
    fn quotient_type_is_gl2_invariant(u in prop::array::uniform2(-12i64..12),
                                      v in prop::array::uniform2(-12i64..12),
                                      seed in any::<u64>()) {
        let (u, v) = (LatticeVector::new(u.to_vec()), LatticeVector::new(v.to_vec()));
        prop_assume!(!u.is_zero() && !v.is_zero());
        let (pu, pv) = (primitive(&u).unwrap(), primitive(&v).unwrap());
        let (a, b) = ([pu.coords()[0], pu.coords()[1]], [pv.coords()[0], pv.coords()[1]]);
        prop_assume!(det2(&pu, &pv).unwrap() > 0);
        let cone = Cone2::new(a, b).unwrap();
        let m = random_unimodular(seed, 2);
        let (ma, mb) = (apply(&m, a), apply(&m, b));
        // an orientation-reversing M swaps the generator order
        let image = Cone2::new(ma, mb).or_else(|_| Cone2::new(mb, ma)).unwrap();
        prop_assert_eq!(quotient_type(&cone).normalized(), quotient_type(&image).normalized());
    }

    #[test]
    fn hj_round_trip_and_resolution(r in 2u64..=200, a in 1u64..200) {
        let a = a % r;
        prop_assume!(a > 0 && num_integer::gcd(a, r) == 1);
        let chain = hj_expand(r, a).unwrap();
        prop_assert!(chain.iter().all(|&b| b >= 2));
        prop_assert_eq!(hj_evaluate(&chain).unwrap(), BigRational::new(r.into(), a.into()));
        let res = resolve_singularity(&QuotientSingularity::new(r, a).unwrap()).unwrap();
        prop_assert!(is_negative_definite(&res.gram()).unwrap());
        let minus_one = -BigRational::from_integer(1.into());
        prop_assert!(res.discrepancies.iter().all(|d| *d > minus_one && !d.is_positive()));
        prop_assert_eq!(res.is_canonical(), chain.iter().all(|&b| b == 2));
    }

    #[test]
    fn anticanonical_degrees_agree(seed in any::<u64>(), bound in 1i64..6) {
        let f = random_complete_fan(seed, 8, bound);
        let g = toric_intersection(&f);
        for i in 0..f.len() {
            let row_sum: BigRational = g.row(i).iter().sum();
            prop_assert_eq!(row_sum, -canonical_degree(&f, i));
        }
        prop_assert!(g.is_symmetric());
    }

    #[test]
    fn mmp_steps_drop_at_most_two_points(seed in any::<u64>(), bound in 1i64..6) {
        let run = toric_mmp(&random_complete_fan(seed, 8, bound));
        prop_assert!(run.invariant_holds(), "{:?}", run.steps);
        prop_assert!(run.output.picard_number() <= 2);
    }

    #[test]
    fn smooth_cones_have_index_one(seed in any::<u64>(), bound in 1i64..6) {
        let f = random_complete_fan(seed, 8, bound);
        let nd = FanNd::from_fan2(&f);
        let mut singular = 0;
        for c in nd.maximal_cones() {
            let smooth = nd.cone_is_smooth(c);
            prop_assert_eq!(smooth, nd.cone_multiplicity(c) == BigInt::from(1));
            singular += usize::from(!smooth);
        }
        prop_assert_eq!(singular, f.singular_count());
    }

    #[test]
    fn weighted_projective_fans(w in prop::collection::vec(1i64..7, 2..=4)) {
        prop_assume!(w.iter().fold(0, |g, &x| num_integer::gcd(g, x)) == 1);
        let d = w.len();
        let f = weighted_projective_fan(&w).unwrap();
        check_fan_nd(&f)?;
        prop_assert_eq!(fan_census(&f).counts[0], d + 1);
    }

    #[test]
    fn membership_matches_monomials(w in prop::collection::vec(1u64..=50, 3..=5), d in 1u64..=300) {
        let f = WeightedFamily::new(w.clone(), d).unwrap();
        for (i, &wi) in w.iter().enumerate() {
            let pure_power = (1..=d).any(|m| m * wi == d);
            let on = matches!(vertex_membership(&f, i).unwrap(), VertexMembership::OnMember { .. });
            prop_assert_eq!(on, !pure_power);
        }
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if let Ok(StratumCount::Points { count, order }) = stratum_points(&f, i, j) {
                    prop_assert_eq!(count * order, d);
                }
            }
        }
    }
}

fn check_fan_nd(f: &FanNd) -> Result<(), TestCaseError> {
    let fs = faces(f);
    for (k, set) in &fs {
        for face in set.iter().filter(|_| *k >= 2) {
            for skip in 0..face.len() {
                let mut sub = face.clone();
                sub.remove(skip);
                prop_assert!(fs[&(k - 1)].contains(&sub), "{sub:?} missing");
            }
        }
    }
    let r = fan_census(f);
    prop_assert!(r.euler_ok && r.binomial_ok && r.picard_identity);
    let d = f.dimension();
    for k in 2..=d {
        let sing = singular_orbit_count(f, k).unwrap();
        let count = r.counts[k - 1];
        prop_assert!(sing <= count);
        prop_assert!(count as u128 <= binomial(f.rays().len() as u64, k as u64));
    }
    Ok(())
}

#[test]
fn fixture_fans_are_closed_and_bounded() {
    for (name, f) in fixture_library() {
        check_fan_nd(&f).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

fn labels_of(s: &SurfaceModel) -> Vec<String> {
    s.curves().map(|c| c.label.clone()).collect()
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn blow_ups_keep_adjunction_and_contract_back(choices in prop::collection::vec(prop::collection::vec(any::<bool>(), 8), 1..6)) {
        let mut s = SurfaceModel::start_quadric();
        for (t, pick) in choices.iter().enumerate() {
            let labels = labels_of(&s);
            let incident: Vec<(&str, u64)> = labels
                .iter()
                .zip(pick.iter().cycle())
                .filter(|(_, &p)| p)
                .take(2)
                .map(|(l, _)| (l.as_str(), 1))
                .collect();
            let exc = format!("x{t}");
            let next = s.blow_up(&exc, &incident).unwrap();
            prop_assert!(next.adjunction_failures().is_empty(), "{:?}", next.adjunction_failures());

            // contracting the fresh curve recovers the old intersection form
            let c = next.contract(&[exc.as_str()]).unwrap();
            for i in 0..s.rank() {
                for j in 0..s.rank() {
                    let mut a = vec![BigRational::zero(); next.rank()];
                    let mut b = a.clone();
                    a[i] = int(1);
                    b[j] = int(1);
                    prop_assert_eq!(c.pairing(&a, &b).unwrap(), s.gram().row(i)[j].clone());
                }
            }
            s = next;
        }
    }

    #[test]
    fn pullback_is_linear_and_kills_contracted_curves(chain in prop::collection::vec(2u64..6, 1..4),
                                                      x in prop::collection::vec(-3i64..=3, 24),
                                                      y in prop::collection::vec(-3i64..=3, 24),
                                                      p in -3i64..=3, q in -3i64..=3) {
        let (s, labels) = chain_surface(&chain).unwrap();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let c = s.contract(&refs).unwrap();
        let n = s.rank();
        let dx: Vec<BigRational> = x.iter().cycle().take(n).map(|&v| int(v)).collect();
        let dy: Vec<BigRational> = y.iter().cycle().take(n).map(|&v| int(v)).collect();
        let combo: Vec<BigRational> = dx.iter().zip(&dy).map(|(a, b)| int(p) * a + int(q) * b).collect();
        let (px, py) = (c.pullback(&dx).unwrap(), c.pullback(&dy).unwrap());
        let expected: Vec<BigRational> = px.iter().zip(&py).map(|(a, b)| int(p) * a + int(q) * b).collect();
        prop_assert_eq!(c.pullback(&combo).unwrap(), expected);
        for l in &refs {
            prop_assert!(s.dot(&px, s.class(l).unwrap()).is_zero());
            prop_assert!(c.image(l).unwrap().iter().all(Zero::is_zero));
        }
        prop_assert_eq!(c.pairing(&dx, &dy).unwrap(), c.pairing(&dy, &dx).unwrap());
        prop_assert_eq!(c.pairing(&dx, &dy).unwrap(), s.dot(&px, &dy));
    }
}
