use proptest::prelude::*;
use summa_core::norms::{holder_verify, lp_interpolate, lp_norm, lp_sum_pow, p_subadditivity_check};
use summa_core::scalar::{q, tolerance};
use summa_core::{Exponent, Scalar, SeqVector, Q};

fn rat() -> impl Strategy<Value = Q> {
    (-20i64..=20, 1i64..=8).prop_map(|(n, d)| q(n, d))
}

fn exact_vec(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(rat(), len)
}

fn float_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 1..=10)
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        (1i64..=16, 1i64..=4).prop_map(|(n, d)| Exponent::ratio(n, d)),
        Just(Exponent::Infinity),
    ]
}

fn norm(v: &SeqVector, p: &Exponent) -> f64 {
    lp_norm(v, p).unwrap().to_f64()
}

proptest! {
    #[test]
    fn monotone_in_p(v in float_vec(), a in exponent(), b in exponent()) {
        let (p, r) = if a <= b { (a, b) } else { (b, a) };
        let v = SeqVector::Float(v);
        prop_assert!(norm(&v, &r) <= norm(&v, &p) + tolerance() * (1.0 + norm(&v, &p)));
        prop_assert!(norm(&v, &Exponent::Infinity) <= norm(&v, &p) + tolerance() * (1.0 + norm(&v, &p)));
    }

    #[test]
    fn integer_exponents_are_exact(v in exact_vec(0..=8), c in rat()) {
        // ‖cv‖₁ = |c| ‖v‖₁ and the same for ‖·‖∞ and ‖·‖₂², with no rounding.
        let v = SeqVector::Exact(v.clone());
        let cv = match &v {
            SeqVector::Exact(xs) => SeqVector::Exact(xs.iter().map(|x| x * &c).collect()),
            _ => unreachable!(),
        };
        let abs_c = if c < q(0, 1) { -c.clone() } else { c.clone() };
        for p in [Exponent::int(1), Exponent::Infinity] {
            let lhs = lp_norm(&cv, &p).unwrap();
            let rhs = lp_norm(&v, &p).unwrap();
            prop_assert_eq!(lhs.as_exact().cloned(), rhs.as_exact().map(|x| x * &abs_c));
        }
        let two = Exponent::int(2);
        let lhs = lp_sum_pow(&cv, &two).unwrap();
        let rhs = lp_sum_pow(&v, &two).unwrap();
        prop_assert_eq!(lhs.as_exact().cloned(), rhs.as_exact().map(|x| x * &c * &c));
    }

    #[test]
    fn triangle_inequality(v in float_vec(), w in float_vec(), p in exponent()) {
        prop_assume!(p >= Exponent::int(1));
        let n = v.len().min(w.len());
        let (v, w) = (&v[..n], &w[..n]);
        let sum: Vec<f64> = v.iter().zip(w).map(|(a, b)| a + b).collect();
        let lhs = norm(&SeqVector::Float(sum), &p);
        let rhs = norm(&SeqVector::Float(v.to_vec()), &p) + norm(&SeqVector::Float(w.to_vec()), &p);
        prop_assert!(lhs <= rhs + tolerance() * (1.0 + rhs));
    }

    #[test]
    fn p_norm_subadditive_below_one(v in float_vec(), w in float_vec(), k in 1i64..=4) {
        let p = Exponent::ratio(1, k);
        let n = v.len().min(w.len());
        let pow = |x: &[f64]| lp_sum_pow(&SeqVector::Float(x.to_vec()), &p).unwrap().to_f64();
        let sum: Vec<f64> = v[..n].iter().zip(&w[..n]).map(|(a, b)| a + b).collect();
        let rhs = pow(&v[..n]) + pow(&w[..n]);
        prop_assert!(pow(&sum) <= rhs + tolerance() * (1.0 + rhs));
        let a = Scalar::Float(v[0].abs());
        let b = Scalar::Float(w[0].abs());
        prop_assert!(p_subadditivity_check(&a, &b, &p).unwrap());
    }

    #[test]
    fn holder(f in exact_vec(1..=8), g in exact_vec(1..=8), p in exponent()) {
        prop_assume!(p >= Exponent::int(1));
        let n = f.len().min(g.len());
        let q = p.conjugate().unwrap();
        let r = holder_verify(&SeqVector::Exact(f[..n].to_vec()), &SeqVector::Exact(g[..n].to_vec()), &p, &q).unwrap();
        prop_assert!(r.holds, "{:?}", r);
    }

    #[test]
    fn interpolation(f in exact_vec(1..=8), a in exponent(), b in exponent(), t in 1u32..=7) {
        let (p, r) = if a <= b { (a, b) } else { (b, a) };
        // 1/s = t/p + (1−t)/r with t = k/8.
        let tq = q(t as i64, 8);
        let inv = &tq * p.reciprocal() + (q(1, 1) - &tq) * r.reciprocal();
        prop_assume!(p < r);
        let s = Exponent::from_reciprocal(&inv).unwrap();
        let rep = lp_interpolate(&SeqVector::Exact(f), &p, &r, &s).unwrap();
        prop_assert!(rep.holds, "{:?}", rep);
    }
}

#[test]
fn examples() {
    let v = SeqVector::from_ints(&[3, 4]);
    assert_eq!(lp_norm(&v, &Exponent::int(2)).unwrap(), Scalar::Exact(q(5, 1)));
    assert_eq!(lp_norm(&v, &Exponent::Infinity).unwrap(), Scalar::Exact(q(4, 1)));
    assert_eq!(lp_norm(&v, &Exponent::int(1)).unwrap(), Scalar::Exact(q(7, 1)));
}
