use bigon::expr::{parse, Expr, Func};
use proptest::prelude::*;

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

fn func() -> impl Strategy<Value = Func> {
    prop_oneof![
        Just(Func::Sin),
        Just(Func::Cos),
        Just(Func::Exp),
        Just(Func::Tanh)
    ]
}

fn exponent() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..5).prop_map(|k| Expr::Num(k as f64)),
        (1u32..4).prop_map(|k| Expr::Neg(bx(Expr::Num(k as f64)))),
    ]
}

/// Trees the parser can produce: literals are non-negative, exponents constant integers.
fn any_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.0f64..1e4).prop_map(Expr::Num),
        (0u32..1000).prop_map(|k| Expr::Num(k as f64)),
        (0usize..9).prop_map(Expr::Var),
    ];
    leaf.prop_recursive(6, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(bx(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(bx(a), bx(b))),
            (inner.clone(), exponent()).prop_map(|(a, k)| Expr::Pow(bx(a), bx(k))),
            (func(), inner).prop_map(|(f, a)| Expr::Call(f, bx(a))),
        ]
    })
}

/// Smooth trees without poles on the sampled box.
fn tame_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.0f64..2.0).prop_map(Expr::Num),
        (0usize..3).prop_map(Expr::Var),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(bx(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(
                bx(a),
                bx(Expr::Add(
                    bx(Expr::Num(1.0)),
                    bx(Expr::Pow(bx(b), bx(Expr::Num(2.0))))
                ))
            )),
            (inner.clone(), 0u32..4).prop_map(|(a, k)| Expr::Pow(bx(a), bx(Expr::Num(k as f64)))),
            (func(), inner).prop_map(|(f, a)| Expr::Call(f, bx(Expr::Call(Func::Tanh, bx(a))))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(e in any_tree()) {
        let printed = e.to_string();
        prop_assert_eq!(parse(&printed).unwrap(), e, "printed as {}", printed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn symbolic_derivative_matches_central_difference(
        e in tame_tree(),
        p in prop::array::uniform3(-1.0f64..1.0),
        var in 0usize..3,
    ) {
        let h = 1e-5;
        let mut hi = p;
        let mut lo = p;
        hi[var] += h;
        lo[var] -= h;
        let fd = (e.eval(&hi).unwrap() - e.eval(&lo).unwrap()) / (2.0 * h);
        let sym = e.differentiate(var).eval(&p).unwrap();
        prop_assert!((sym - fd).abs() < 1e-6 * (1.0 + sym.abs()), "{} d{}: {} vs {}", e, var, sym, fd);
    }

    #[test]
    fn derivative_prints_and_reparses(e in tame_tree(), var in 0usize..3) {
        let d = e.differentiate(var);
        let back = parse(&d.to_string()).unwrap();
        let p = [0.3, -0.2, 0.7];
        let (a, b) = (d.eval(&p).unwrap(), back.eval(&p).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
}
