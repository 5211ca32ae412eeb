use proptest::prelude::*;

use transeig_core::exactarith::{GaussianRational, Generator, Monomial, SymbolExpr};

fn gens() -> [Generator; 7] {
    [Generator::Z, Generator::PSI, Generator::H, Generator::n(1), Generator::r(0), Generator::qs(2), Generator::qf(1)]
}

fn gaussian() -> impl Strategy<Value = GaussianRational> {
    (-9i64..=9, 1i64..=6, -9i64..=9, 1i64..=6).prop_map(|(a, b, c, d)| GaussianRational::from_parts((a, b), (c, d)))
}

fn nonzero_gaussian() -> impl Strategy<Value = GaussianRational> {
    gaussian().prop_filter("nonzero", |g| !g.is_zero())
}

fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec((0..7usize, 1u32..=3), 0..3)
        .prop_map(|fs| Monomial::from_factors(fs.into_iter().map(|(i, e)| (gens()[i], e))))
}

fn expr() -> impl Strategy<Value = SymbolExpr> {
    prop::collection::vec((gaussian(), monomial(), -4i32..=4), 0..5).prop_map(|terms| {
        terms.into_iter().fold(SymbolExpr::zero(), |acc, (c, m, d)| acc + SymbolExpr::term(c, m, d))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in expr(), b in expr(), c in expr()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &SymbolExpr::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
        prop_assert!((&a * &SymbolExpr::zero()).is_zero());
    }

    #[test]
    fn leibniz_rule(a in expr(), b in expr(), g in 0..7usize) {
        let g = gens()[g];
        let lhs = (&a * &b).partial_derivative(g);
        let rhs = &a.partial_derivative(g) * &b + &a * &b.partial_derivative(g);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn divide_undoes_multiply(a in expr(), c in nonzero_gaussian(), d in -5i32..=5) {
        let product = &a * &SymbolExpr::constant(c.clone()).shift_rho(d);
        prop_assert_eq!(product.divide_by_rho_monomial(&c, d).unwrap(), a);
    }

    #[test]
    fn gaussian_field_axioms(x in gaussian(), y in nonzero_gaussian()) {
        prop_assert_eq!(&x.checked_div(&y).unwrap() * &y, x.clone());
        prop_assert_eq!(&y * &y.inv().unwrap(), GaussianRational::one());
        prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
    }

    #[test]
    fn text_round_trip(a in expr()) {
        let text = a.to_text("rho");
        prop_assert_eq!(SymbolExpr::parse(&text, "rho").unwrap(), a.clone());
        let g: GaussianRational = a.rho_coefficients().next().and_then(|(_, p)| p.terms().next().map(|(_, c)| c.clone()))
            .unwrap_or_else(GaussianRational::zero);
        prop_assert_eq!(g.to_string().parse::<GaussianRational>().unwrap(), g);
    }
}
