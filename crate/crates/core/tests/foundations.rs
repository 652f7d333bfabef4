use gradinv::abgroup::{characters, FinAbGroup};
use gradinv::cocycle::{
    bicharacter_beta, coboundary, is_cocycle, is_nondegenerate, twisted_product, Bicharacter,
    FactorSet, PairSpec, SymplecticShape,
};
use gradinv::{CycNum, RootOfUnity};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn shapes() -> Vec<SymplecticShape> {
    let mut out: Vec<_> = [2, 3, 4, 5, 6].into_iter().map(SymplecticShape::pauli).collect();
    out.push(SymplecticShape::with_pairs(vec![PairSpec::new(2), PairSpec::new(2)]).unwrap());
    out.push(SymplecticShape::with_pairs(vec![PairSpec::new(2), PairSpec::new(3)]).unwrap());
    out.push(
        SymplecticShape::with_pairs(vec![PairSpec {
            order: 5,
            epsilon_exp: 2,
        }])
        .unwrap(),
    );
    out
}

#[test]
fn standard_cocycles_satisfy_identity() {
    for s in shapes() {
        let sigma = FactorSet::Standard(s.clone());
        assert!(is_cocycle(&sigma), "{}", s.group());
        assert!(is_nondegenerate(&Bicharacter::of(&sigma)), "{}", s.group());
    }
}

#[test]
fn coboundary_twists_stay_cocycles() {
    let s = SymplecticShape::pauli(3);
    let t = s.group();
    let lambda: Vec<RootOfUnity> = (0..t.size())
        .map(|i| RootOfUnity::new(s.ambient(), (i * i + 1) as i64))
        .collect();
    let d = coboundary(t, &lambda).unwrap();
    assert!(is_cocycle(&d));
    assert!(Bicharacter::of(&d).is_trivial());
    let perturbed = FactorSet::Standard(s.clone()).perturbed(
        &t.generator(0),
        &t.generator(1),
        RootOfUnity::new(s.ambient(), 1),
    );
    assert!(!is_cocycle(&perturbed));
}

#[test]
fn twisted_basis_products_associate() {
    for s in shapes() {
        let sigma = FactorSet::Standard(s.clone());
        let t = s.group();
        let one = RootOfUnity::one(s.ambient());
        for u in t.elements() {
            for v in t.elements() {
                for w in t.elements() {
                    let left = twisted_product(
                        &sigma,
                        (&twisted_product(&sigma, (&u, one), (&v, one)).0, twisted_product(&sigma, (&u, one), (&v, one)).1),
                        (&w, one),
                    );
                    let vw = twisted_product(&sigma, (&v, one), (&w, one));
                    let right = twisted_product(&sigma, (&u, one), (&vw.0, vw.1));
                    assert_eq!(left, right);
                }
            }
        }
    }
}

#[test]
fn characters_separate_points() {
    for desc in ["Z2^2", "Z3^2", "Z4^2", "Z2x Z4", "Z6^2", "Z2^4"] {
        let t = FinAbGroup::parse(&desc.replace(' ', "")).unwrap();
        let chars = characters(&t);
        assert_eq!(chars.len() as u64, t.size());
        let amb = t.exponent();
        for g in t.elements() {
            let nontrivial = chars.iter().any(|c| !c.eval(&g, amb).unwrap().is_one());
            assert_eq!(nontrivial, !g.is_zero(), "{desc} {g}");
        }
        for (i, a) in chars.iter().enumerate() {
            for b in &chars[i + 1..] {
                assert!(t.elements().any(|g| a.eval(&g, amb) != b.eval(&g, amb)));
            }
        }
    }
}

#[test]
fn beta_is_alternating_bicharacter() {
    for s in shapes() {
        let sigma = FactorSet::Standard(s.clone());
        let b = Bicharacter::of(&sigma);
        assert!(b.is_bimultiplicative() && b.is_alternating());
        let t = s.group();
        for u in t.elements() {
            for v in t.elements() {
                assert_eq!(bicharacter_beta(&sigma, &u, &v), b.eval(&u, &v));
            }
        }
    }
}

/// A sparse element of the twisted group algebra, multiplied through `σ`.
fn algebra_mul(s: &SymplecticShape, x: &[CycNum], y: &[CycNum]) -> Vec<CycNum> {
    let t = s.group();
    let m = s.ambient();
    let elems: Vec<_> = t.elements().collect();
    let mut out = vec![CycNum::zero(m); elems.len()];
    for (i, u) in elems.iter().enumerate() {
        if x[i].is_zero() {
            continue;
        }
        for (j, v) in elems.iter().enumerate() {
            if y[j].is_zero() {
                continue;
            }
            let k = t.index_of(&t.add(u, v));
            let c = CycNum::zeta_pow(m, s.sigma(u, v).exp() as i64);
            out[k].add_assign_ref(&(&(&x[i] * &y[j]) * &c));
        }
    }
    out
}

fn small_cyc(order: u64) -> impl Strategy<Value = CycNum> {
    prop::collection::vec((-4i64..5, 1i64..4), 0..4).prop_map(move |terms| {
        let mut acc = CycNum::zero(order);
        for (k, (num, den)) in terms.into_iter().enumerate() {
            let q = BigRational::new(BigInt::from(num), BigInt::from(den));
            acc.add_assign_ref(&CycNum::zeta_pow(order, 3 * k as i64 + 1).scale(&q));
        }
        acc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn algebra_associates(
        x in prop::collection::vec(small_cyc(8), 4),
        y in prop::collection::vec(small_cyc(8), 4),
        z in prop::collection::vec(small_cyc(8), 4),
    ) {
        let s = SymplecticShape::pauli(2);
        let left = algebra_mul(&s, &algebra_mul(&s, &x, &y), &z);
        let right = algebra_mul(&s, &x, &algebra_mul(&s, &y, &z));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn field_axioms(order in prop::sample::select(vec![3u64, 4, 5, 8, 9, 12, 18, 32]),
                    seed in prop::collection::vec((-5i64..6, 1i64..5), 1..6),
                    seed2 in prop::collection::vec((-5i64..6, 1i64..5), 1..6)) {
        let build = |s: &[(i64, i64)]| {
            let mut acc = CycNum::zero(order);
            for (k, &(num, den)) in s.iter().enumerate() {
                let q = BigRational::new(BigInt::from(num), BigInt::from(den));
                acc.add_assign_ref(&CycNum::zeta_pow(order, k as i64 * 5 + 2).scale(&q));
            }
            acc
        };
        let a = build(&seed);
        let b = build(&seed2);
        let one = CycNum::one(order);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) * &a, &(&a * &a) + &(&b * &a));
        prop_assert_eq!(&a * &one, a.clone());
        prop_assert!((&a + &(-&a)).is_zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), one);
        } else {
            prop_assert!(a.inv().is_err());
        }
    }

    #[test]
    fn roots_of_unity_embed_multiplicatively(m in 2u64..40, e1 in 0i64..80, e2 in 0i64..80) {
        let a = RootOfUnity::new(m, e1);
        let b = RootOfUnity::new(m, e2);
        let ca = CycNum::zeta_pow(m, e1);
        let cb = CycNum::zeta_pow(m, e2);
        let prod = &ca * &cb;
        prop_assert_eq!(prod.as_root_of_unity(), Some(a * b));
        prop_assert_eq!(ca.pow(m).is_one(), true);
    }
}
