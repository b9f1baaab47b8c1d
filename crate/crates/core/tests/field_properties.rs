use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use rootfock_core::cyclo::CycloScalar;
use rootfock_core::qcore::q_bracket;
use rootfock_core::{ComplexField, CyclotomicField, ScalarField};

/// Relative error allowed between the float embedding of an exact result and
/// the same computation done in floating point.
const EMBED_TOL: f64 = 1e-12;

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn admissible() -> impl Strategy<Value = (u32, u32)> {
    (2u32..=7).prop_flat_map(|k| (Just(k), 1..k)).prop_filter("coprime", |(k, l)| gcd(*k, *l) == 1)
}

fn field(k: u32, l: u32) -> CyclotomicField {
    CyclotomicField::new(k, l).unwrap()
}

/// Random element with small rational coefficients on the first powers of ω.
fn scalar(f: &CyclotomicField, coeffs: &[(i32, u32)]) -> CycloScalar {
    let c: Vec<BigRational> = coeffs
        .iter()
        .take(f.degree())
        .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
        .collect();
    f.from_coeffs(&c)
}

fn coeffs() -> impl Strategy<Value = Vec<(i32, u32)>> {
    prop::collection::vec((-6i32..=6, 1u32..=4), 1..12)
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= EMBED_TOL * (1.0 + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conjugation_is_an_involution((k, l) in admissible(), a in coeffs()) {
        let f = field(k, l);
        let x = scalar(&f, &a);
        prop_assert_eq!(f.conj(&f.conj(&x)), x);
    }

    #[test]
    fn ring_axioms((k, l) in admissible(), a in coeffs(), b in coeffs(), c in coeffs()) {
        let f = field(k, l);
        let (x, y, z) = (scalar(&f, &a), scalar(&f, &b), scalar(&f, &c));
        prop_assert_eq!(f.mul(&f.add(&x, &y), &z), f.add(&f.mul(&x, &z), &f.mul(&y, &z)));
        prop_assert_eq!(f.mul(&x, &y), f.mul(&y, &x));
        prop_assert_eq!(f.mul(&f.mul(&x, &y), &z), f.mul(&x, &f.mul(&y, &z)));
        prop_assert!(f.is_zero(&f.add(&x, &f.neg(&x))));
        prop_assert_eq!(f.conj(&f.mul(&x, &y)), f.mul(&f.conj(&x), &f.conj(&y)));
    }

    #[test]
    fn nonzero_elements_invert((k, l) in admissible(), a in coeffs()) {
        let f = field(k, l);
        let x = scalar(&f, &a);
        prop_assume!(!f.is_zero(&x));
        prop_assert_eq!(f.mul(&x, &f.inv(&x).unwrap()), f.one());
    }

    #[test]
    fn float_embedding_is_a_homomorphism(
        (k, l) in admissible(),
        factors in prop::collection::vec(prop::collection::vec((-1i32..=1, 1u32..=1), 1..6), 1..=10),
        a in coeffs(),
    ) {
        let f = field(k, l);
        let xs: Vec<CycloScalar> = factors.iter().map(|c| scalar(&f, c)).collect();
        let exact = xs.iter().fold(f.one(), |acc, x| f.mul(&acc, x));
        let float = xs.iter().fold(Complex64::new(1.0, 0.0), |acc, x| acc * f.to_complex(x));
        prop_assert!(close(f.to_complex(&exact), float));
        let y = scalar(&f, &a);
        prop_assert!(close(f.to_complex(&f.add(&exact, &y)), float + f.to_complex(&y)));
        prop_assert!(close(f.to_complex(&f.conj(&y)), f.to_complex(&y).conj()));
    }

    #[test]
    fn q_is_a_root_of_unity((k, l) in admissible()) {
        let f = field(k, l);
        prop_assert_eq!(f.q_pow(2 * k as i64), f.one());
        let sign = if l % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(f.q_pow(k as i64), f.from_i64(sign));
        let q = f.q_pow(1);
        prop_assert_eq!(f.conj(&q), f.q_pow(-1));
        // q^(1/2) squared is q and √2 squared is 2
        prop_assert_eq!(f.mul(&f.q_half_pow(1), &f.q_half_pow(1)), q);
        prop_assert_eq!(f.mul(&f.sqrt2(), &f.sqrt2()), f.from_i64(2));
        prop_assert!(f.to_complex(&f.sqrt2()).re > 0.0);
    }

    #[test]
    fn q_numbers_are_odd_and_real((k, l) in admissible(), x in -40i64..=40) {
        let f = field(k, l);
        let b = q_bracket(&f, x);
        prop_assert_eq!(&b, &f.neg(&q_bracket(&f, -x)));
        prop_assert_eq!(f.conj(&b), b.clone());
        // oracle: [x] = sin(πlx/k) / sin(πl/k)
        let t = std::f64::consts::PI * l as f64 / k as f64;
        prop_assert!((f.to_complex(&b).re - (t * x as f64).sin() / t.sin()).abs() < 1e-9);
    }

    #[test]
    fn power_sums_are_q_numbers((k, l) in admissible(), n in 0u32..=14) {
        prop_assume!(n <= 2 * k);
        let f = field(k, l);
        let mut even = f.zero();
        for j in 0..=n as i64 {
            even = f.add(&even, &f.q_pow(2 * j));
            if j > 0 {
                even = f.add(&even, &f.q_pow(-2 * j));
            }
        }
        prop_assert_eq!(even, q_bracket(&f, 2 * n as i64 + 1));
        let mut odd = f.zero();
        for j in 0..=n as i64 {
            odd = f.add(&odd, &f.add(&f.q_pow(2 * j + 1), &f.q_pow(-2 * j - 1)));
        }
        prop_assert_eq!(odd, q_bracket(&f, 2 * n as i64 + 2));
    }

    #[test]
    fn float_field_agrees_with_exact_constants((k, l) in admissible(), e in -20i64..=20) {
        let (ex, fl) = (field(k, l), ComplexField::new(k, l).unwrap());
        prop_assert!(close(ex.to_complex(&ex.q_half_pow(e)), fl.q_half_pow(e)));
        prop_assert!(close(ex.to_complex(&ex.sqrt2()), fl.sqrt2()));
    }
}
