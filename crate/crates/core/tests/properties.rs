//! Randomised identities that must hold at every working precision.

mod support;

use proptest::prelude::*;
use spps_core::expr::{parse_expression, Constant, Expression, Func, Op};
use support::checks::*;

fn leaf() -> impl Strategy<Value = Expression> {
    prop_oneof![
        (0u32..1000).prop_map(|v| Expression::Number(v.to_string())),
        (1u32..100, 1u32..100).prop_map(|(a, b)| Expression::Number(format!("{a}.{b}"))),
        Just(Expression::Number("1e-3".into())),
        Just(Expression::Const(Constant::Pi)),
        Just(Expression::Const(Constant::E)),
        Just(Expression::Const(Constant::I)),
        Just(Expression::X),
    ]
}

fn expression() -> impl Strategy<Value = Expression> {
    let funcs = [Func::Sin, Func::Cos, Func::Tan, Func::Sinh, Func::Cosh, Func::Tanh, Func::Exp, Func::Log, Func::Sqrt, Func::Abs];
    let ops = [Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Pow];
    leaf().prop_recursive(5, 40, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expression::Neg(Box::new(a))),
            (0..funcs.len(), inner.clone()).prop_map(move |(k, a)| Expression::Call(funcs[k], Box::new(a))),
            (0..ops.len(), inner.clone(), inner).prop_map(move |(k, a, b)| Expression::Bin(ops[k], Box::new(a), Box::new(b))),
        ]
    })
}

/// Fully parenthesised rendering: parsing it must give the same tree as
/// the minimal-parenthesis printer.
fn explicit(ex: &Expression) -> String {
    match ex {
        Expression::Number(s) => s.clone(),
        Expression::Const(Constant::Pi) => "pi".into(),
        Expression::Const(Constant::E) => "e".into(),
        Expression::Const(Constant::I) => "i".into(),
        Expression::X => "x".into(),
        Expression::Neg(a) => format!("(-{})", explicit(a)),
        Expression::Call(_, a) => {
            let shown = ex.to_string();
            let name = &shown[..shown.find('(').unwrap()];
            format!("{name}({})", explicit(a))
        }
        Expression::Bin(op, a, b) => {
            let sym = match op {
                Op::Add => "+",
                Op::Sub => "-",
                Op::Mul => "*",
                Op::Div => "/",
                Op::Pow => "^",
            };
            format!("({}{sym}{})", explicit(a), explicit(b))
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn wronskian_is_constant(case in wronskian_inputs()) {
        wronskian_case(case);
    }

    #[test]
    fn powers_vanish_at_the_anchor(case in anchor_inputs()) {
        anchor_case(case);
    }

    #[test]
    fn tail_bound_dominates_truncation(case in tail_inputs()) {
        tail_case(case);
    }

    #[test]
    fn quadrature_is_linear_and_cubic_exact(case in quadrature_inputs()) {
        quadrature_case(case);
    }

    #[test]
    fn printed_expressions_parse_back(ex in expression()) {
        let shown = ex.to_string();
        prop_assert_eq!(parse_expression(&shown).unwrap(), ex.clone(), "{}", shown);
        prop_assert_eq!(parse_expression(&explicit(&ex)).unwrap(), ex);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 3, ..ProptestConfig::default() })]

    #[test]
    fn paine_upper_eigenvalues_do_not_depend_on_the_shift(star in shift_inputs()) {
        shift_case(star);
    }
}
