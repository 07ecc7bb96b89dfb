use std::f64::consts::TAU;

use proptest::prelude::*;
use tilesemi::arith::{field_arith, field_make, field_sign, FieldElement, Op, Part, Rational};

fn element(conductor: u32) -> impl Strategy<Value = FieldElement> {
    let d = field_make(conductor).degree();
    prop::collection::vec((-30i64..=30, 1i64..=6), d).prop_map(move |cs| {
        let k = field_make(conductor);
        FieldElement::from_poly(&k, &cs.iter().map(|&(n, m)| Rational::new(n, m)).collect::<Vec<_>>())
    })
}

/// Plain f64 evaluation of Σ c_k ζ^k, independent of the library's enclosures.
fn float_value(x: &FieldElement) -> (f64, f64) {
    let n = x.spec().conductor() as f64;
    let mut re = 0.0;
    let mut im = 0.0;
    for (k, c) in x.coeffs().iter().enumerate() {
        let c = c.to_f64().unwrap();
        re += c * (TAU * k as f64 / n).cos();
        im += c * (TAU * k as f64 / n).sin();
    }
    (re, im)
}

fn golden() -> FieldElement {
    let k = field_make(10);
    &FieldElement::zeta(&k, 1) + &FieldElement::zeta(&k, -1)
}

#[test]
fn field_degrees() {
    for (n, d) in [(1, 1), (5, 4), (10, 4), (6, 2), (12, 4)] {
        assert_eq!(field_make(n).degree(), d, "conductor {n}");
    }
}

#[test]
fn golden_ratio_and_roots_of_unity() {
    let k = field_make(10);
    let g = golden();
    assert_eq!(&g * &g, &g + &FieldElement::one(&k));
    assert_eq!(&g + &FieldElement::zero(&k), g);
    let k5 = field_make(5);
    assert_eq!(FieldElement::zeta(&k5, 1).pow(5), FieldElement::one(&k5));
    assert_eq!(field_sign(&(&g - &FieldElement::one(&k)), Part::Real), 1);
    assert_eq!(field_sign(&g, Part::Imaginary), 0);
    assert_eq!(field_sign(&FieldElement::zero(&k), Part::Real), 0);
}

#[test]
fn checked_arithmetic_rejects_mixed_fields_and_zero_division() {
    let a = FieldElement::one(&field_make(10));
    let b = FieldElement::one(&field_make(6));
    assert!(field_arith(&a, &b, Op::Add).is_err());
    assert!(field_arith(&a, &FieldElement::zero(&field_make(10)), Op::Div).is_err());
    assert_eq!(field_arith(&a, &a, Op::Div).unwrap(), a);
}

proptest! {
    #[test]
    fn field_axioms(a in element(10), b in element(10), c in element(10)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), FieldElement::one(a.spec()));
        }
    }

    #[test]
    fn hexagonal_field_axioms(a in element(6), b in element(6)) {
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a * &b.inv().unwrap()) * &b, a);
        }
    }

    #[test]
    fn zero_test_matches_signs(a in element(10)) {
        let both_zero = a.sign(Part::Real) == 0 && a.sign(Part::Imaginary) == 0;
        prop_assert_eq!(a.is_zero(), both_zero);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn signs_agree_with_floating_evaluation(a in element(10)) {
        let (re, im) = float_value(&a);
        for (part, v) in [(Part::Real, re), (Part::Imaginary, im)] {
            let s = field_sign(&a, part);
            if v.abs() > 1e-9 {
                prop_assert_eq!(s, v.signum() as i32, "{:?} of {:?}", part, a);
            } else if s != 0 {
                // Exact nonzero values this close to zero must still be tiny.
                prop_assert!(v.abs() < 1e-6);
            }
        }
    }
}

#[test]
fn near_cancellation_is_resolved_exactly() {
    // γ¹⁰ − 122.99… : F₁₀γ + F₉ with F = 55, 34, so γ¹⁰ − 55γ − 34 = 0 exactly.
    let k = field_make(10);
    let g = golden();
    let v = &g.pow(10) - &(&g * &FieldElement::from_int(&k, 55));
    let w = &v - &FieldElement::from_int(&k, 34);
    assert!(w.is_zero());
    let tiny = &w + &FieldElement::from_rational(&k, Rational::new(1, 1_000_000_000_000));
    assert_eq!(tiny.sign(Part::Real), 1);
}
