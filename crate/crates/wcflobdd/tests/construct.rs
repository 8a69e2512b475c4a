use proptest::prelude::*;
use wcflobdd::construct::{
    constant, constant_zero, exp_family, fold, hadamard_dyadic, hadamard_family, scalar_multiply, tree_to_wdt, unfold,
};
use wcflobdd::dot::export_dot;
use wcflobdd::validate::validate;
use wcflobdd::{Complex64, Manager, Rational, Semifield, Tropical};

fn q(x: i64) -> Rational {
    Rational::from_i64(x)
}

#[test]
fn exp_sizes_follow_formula() {
    let mut mgr = Manager::<Tropical>::new();
    for l in 0..=10u32 {
        let c = exp_family(&mut mgr, 1 << l).unwrap();
        assert_eq!(mgr.size(&c).total, 13 * (1 << l) - 7, "l = {l}");
        assert!(validate(&mgr, &c).is_empty());
    }
    let mut exact = Manager::<Rational>::new();
    for l in 0..=4u32 {
        let c = exp_family(&mut exact, 1 << l).unwrap();
        assert_eq!(exact.size(&c).total, 13 * (1 << l) - 7);
        assert!(validate(&exact, &c).is_empty());
    }
    assert!(exp_family(&mut exact, 1 << 6).is_err());
}

#[test]
fn exp_values() {
    let mut mgr = Manager::<Rational>::new();
    let c = exp_family(&mut mgr, 4).unwrap();
    assert_eq!(mgr.evaluate(&c, &[true, false, true, true]).unwrap(), q(2048));
    let table: Vec<Rational> = (0..16u32).map(|x| Rational::from_integer(num_bigint::BigInt::from(1) << x)).collect();
    assert!(fold(&mut mgr, &table).unwrap().same(&c));
    assert_eq!(unfold(&mgr, &c), table);
}

#[test]
fn hadamard_sizes_follow_formula() {
    let mut mgr = Manager::<f64>::new();
    for l in 1..=10u32 {
        let h = hadamard_family(&mut mgr, l).unwrap();
        assert_eq!(mgr.size(&h).total, 8 * l as usize + 22, "l = {l}");
        assert!(validate(&mgr, &h).is_empty(), "l = {l}");
    }
    let h2 = hadamard_family(&mut mgr, 1).unwrap();
    let v = mgr.evaluate(&h2, &[true, true]).unwrap();
    assert_eq!(v.to_display(), "-0.7071067812");
    let dot = export_dot(&mgr, &h2);
    assert_eq!(dot.matches("subgraph cluster_").count(), 4);
}

#[test]
fn dyadic_hadamard_is_scaled_walsh() {
    let mut mgr = Manager::<Rational>::new();
    assert!(hadamard_dyadic(&mut mgr, 1).is_err());
    for l in 2..=4u32 {
        let h = hadamard_dyadic(&mut mgr, l).unwrap();
        assert!(validate(&mgr, &h).is_empty());
        assert_eq!(mgr.size(&h).total, 8 * l as usize + 22, "l = {l}");
        let n = 1usize << (l - 1);
        let scale = Rational::from_ratio(1, 1 << (n / 2));
        let values = unfold(&mgr, &h);
        for (i, v) in values.iter().enumerate() {
            let (mut row, mut col) = (0usize, 0usize);
            for k in 0..n {
                row = row << 1 | (i >> (2 * (n - 1 - k) + 1)) & 1;
                col = col << 1 | (i >> (2 * (n - 1 - k))) & 1;
            }
            let sign = if (row & col).count_ones() % 2 == 1 { q(-1) } else { q(1) };
            assert_eq!(*v, sign.mul(&scale), "l = {l}, entry {i}");
        }
    }
}

#[test]
fn complex_hadamard_matches_real() {
    let mut mgr = Manager::<Complex64>::new();
    let h = hadamard_family(&mut mgr, 2).unwrap();
    let values = unfold(&mgr, &h);
    for (i, a) in values.iter().enumerate() {
        let odd = ((i >> 3) & (i >> 2) & 1) ^ ((i >> 1) & i & 1);
        let b = if odd == 1 { -0.5 } else { 0.5 };
        assert!((a - Complex64::new(b, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn constants() {
    let mut mgr = Manager::<Rational>::new();
    let z = constant_zero(&mut mgr, 3);
    assert_eq!(mgr.size(&z).groupings, 4);
    assert!(validate(&mgr, &z).is_empty());
    let seven = constant(&mut mgr, 2, q(7));
    assert!(unfold(&mgr, &seven).iter().all(|v| *v == q(7)));
    let zero = scalar_multiply(&mut mgr, &q(0), &seven);
    assert!(zero.same(&constant_zero(&mut mgr, 2)));
}

fn leaf() -> impl Strategy<Value = Rational> {
    prop_oneof![
        Just(q(0)),
        Just(q(1)),
        Just(q(-1)),
        Just(q(2)),
        Just(q(-2)),
        Just(Rational::new(1.into(), 2.into()))
    ]
}

proptest! {
    #[test]
    fn wdt_reproduces_leaves(leaves in prop::collection::vec(leaf(), 8)) {
        let t = tree_to_wdt(&leaves).unwrap();
        for (i, v) in leaves.iter().enumerate() {
            let a: Vec<bool> = (0..3).map(|b| (i >> (2 - b)) & 1 == 1).collect();
            prop_assert_eq!(&t.evaluate(&a), v);
        }
        for (l, r) in &t.edges {
            prop_assert!((l.is_one()) || (l.is_zero() && r.is_one()));
        }
    }

    #[test]
    fn distinct_functions_get_distinct_handles(
        a in prop::collection::vec(leaf(), 16),
        b in prop::collection::vec(leaf(), 16),
    ) {
        let mut mgr = Manager::<Rational>::new();
        let ca = fold(&mut mgr, &a).unwrap();
        let cb = fold(&mut mgr, &b).unwrap();
        prop_assert_eq!(ca.same(&cb), a == b);
    }
}
