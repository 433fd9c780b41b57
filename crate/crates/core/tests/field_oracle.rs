//! Sign decisions checked against a 100-digit decimal evaluation.

use std::cmp::Ordering;

use cnp_core::field::{ratio, FieldElement, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIGITS: u32 = 100;

/// `floor(√r · 10^DIGITS)` for r in {3, 11, 33}.
fn scaled_sqrt(r: u32) -> BigInt {
    (BigInt::from(r) * BigInt::from(10).pow(2 * DIGITS)).sqrt()
}

/// Sign of `x - r` from decimal expansions, or `None` when the error bound
/// is too wide to decide.
fn oracle_cmp(x: &FieldElement, r: &Rational) -> Option<Ordering> {
    if x.coeffs()[1..].iter().all(Zero::is_zero) {
        return Some(x.coeffs()[0].cmp(r));
    }
    let scale = Rational::from_integer(BigInt::from(10).pow(DIGITS));
    let [a, b, c, d] = x.coeffs().clone();
    let estimate = (a - r) * &scale
        + &b * Rational::from_integer(scaled_sqrt(3))
        + &c * Rational::from_integer(scaled_sqrt(11))
        + &d * Rational::from_integer(scaled_sqrt(33));
    // each truncated root is low by less than one unit
    let slack = b.abs() + c.abs() + d.abs();
    if estimate > Rational::zero() {
        return Some(Ordering::Greater);
    }
    if estimate + &slack < Rational::zero() {
        return Some(Ordering::Less);
    }
    None
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(-60..=60), rng.gen_range(1..=40))
}

fn random_element(rng: &mut ChaCha8Rng) -> FieldElement {
    FieldElement::new(
        random_rational(rng),
        random_rational(rng),
        random_rational(rng),
        random_rational(rng),
    )
}

#[test]
fn ten_thousand_comparisons_match_decimal_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut decided = 0;
    for _ in 0..10_000 {
        let x = random_element(&mut rng);
        let r = random_rational(&mut rng);
        if let Some(expected) = oracle_cmp(&x, &r) {
            assert_eq!(x.cmp_to_rational(&r), expected, "{x} vs {r}");
            decided += 1;
        }
    }
    assert!(decided > 9_900, "oracle undecided too often: {decided}");
}

#[test]
fn near_cancellation_is_decided() {
    // 19/11 and 1351/780 bracket √3 closely
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (p, q) in [(97, 56), (1351, 780), (18817, 10864), (199, 60), (3970, 1197)] {
        for radicand_slot in [1usize, 2, 3] {
            let mut coeffs = [Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero()];
            coeffs[0] = -ratio(p, q);
            coeffs[radicand_slot] = ratio(1, 1);
            let [a, b, c, d] = coeffs;
            let x = FieldElement::new(a, b, c, d);
            let expected = oracle_cmp(&x, &Rational::zero()).expect("decidable at 100 digits");
            assert_eq!(x.signum(), expected);
        }
        let x = random_element(&mut rng);
        let y = random_element(&mut rng);
        if let Some(expected) = oracle_cmp(&(&x - &y), &Rational::zero()) {
            assert_eq!((&x - &y).signum(), expected);
        }
    }
}

fn element() -> impl Strategy<Value = FieldElement> {
    let q = (-30i64..=30, 1i64..=12).prop_map(|(n, d)| ratio(n, d));
    (q.clone(), q.clone(), q.clone(), q).prop_map(|(a, b, c, d)| FieldElement::new(a, b, c, d))
}

proptest! {
    #[test]
    fn ring_axioms(x in element(), y in element(), z in element()) {
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x + &FieldElement::zero(), x.clone());
        prop_assert_eq!(&x * &FieldElement::one(), x.clone());
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn text_round_trip(x in element()) {
        let back: FieldElement = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn signum_agrees_with_f64_when_far_from_zero(x in element()) {
        let approx = x.to_f64();
        prop_assume!(approx.abs() > 1e-9);
        let expected = if approx > 0.0 { Ordering::Greater } else { Ordering::Less };
        prop_assert_eq!(x.signum(), expected);
    }

    #[test]
    fn product_sign_is_product_of_signs(x in element(), y in element()) {
        prop_assert_eq!((&x * &y).signum(), match (x.signum(), y.signum()) {
            (Ordering::Equal, _) | (_, Ordering::Equal) => Ordering::Equal,
            (a, b) if a == b => Ordering::Greater,
            _ => Ordering::Less,
        });
    }

    #[test]
    fn enclosure_contains_the_value(x in element(), bits in 8u32..80) {
        let (lo, hi) = x.enclosure(bits);
        prop_assert!(lo <= hi);
        prop_assert_ne!(x.cmp_to_rational(&lo), Ordering::Less);
        prop_assert_ne!(x.cmp_to_rational(&hi), Ordering::Greater);
    }
}
