use proptest::prelude::*;
use wcflobdd::construct::{fold, unfold};
use wcflobdd::pointwise::{add, multiply, subtract};
use wcflobdd::validate::validate;
use wcflobdd::{Manager, Rational, Semifield};

fn table(level: u32) -> impl Strategy<Value = Vec<i64>> {
    let n = 1usize << (1usize << level);
    prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => Just(1i64), 2 => -3i64..4], n)
}

fn tables() -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (0u32..3).prop_flat_map(|l| (table(l), table(l)))
}

fn q(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_i64(x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fold_round_trips((a, _) in tables()) {
        let mut mgr = Manager::<Rational>::new();
        let c = fold(&mut mgr, &q(&a)).unwrap();
        prop_assert_eq!(unfold(&mgr, &c), q(&a));
        prop_assert!(validate(&mgr, &c).is_empty(), "{:?}", validate(&mgr, &c));
        let values = unfold(&mgr, &c);
        let again = fold(&mut mgr, &values).unwrap();
        prop_assert!(again.same(&c));
    }

    #[test]
    fn multiply_is_canonical((a, b) in tables()) {
        let mut mgr = Manager::<Rational>::new();
        let ca = fold(&mut mgr, &q(&a)).unwrap();
        let cb = fold(&mut mgr, &q(&b)).unwrap();
        let p = multiply(&mut mgr, &ca, &cb).unwrap();
        let dense: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        prop_assert_eq!(unfold(&mgr, &p), q(&dense));
        prop_assert!(validate(&mgr, &p).is_empty(), "{:?}", validate(&mgr, &p));
        prop_assert!(p.same(&fold(&mut mgr, &q(&dense)).unwrap()));
    }

    #[test]
    fn add_is_canonical((a, b) in tables()) {
        let mut mgr = Manager::<Rational>::new();
        let ca = fold(&mut mgr, &q(&a)).unwrap();
        let cb = fold(&mut mgr, &q(&b)).unwrap();
        let s = add(&mut mgr, &ca, &cb).unwrap();
        let dense: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        prop_assert_eq!(unfold(&mgr, &s), q(&dense));
        prop_assert!(validate(&mgr, &s).is_empty(), "{:?}", validate(&mgr, &s));
        prop_assert!(s.same(&fold(&mut mgr, &q(&dense)).unwrap()));
        let d = subtract(&mut mgr, &s, &cb).unwrap();
        prop_assert!(d.same(&ca));
    }
}
