use exlab_core::bounds::{a_k, a_k_complement, compression_error_bound, majority_error_formula};
use exlab_core::protocols::{half_angle_sq, theta};
use exlab_core::ExactRational;

// Reference values computed independently at 60 significant digits.
const A_4_2_2: &str = "0.98881673824159220275052772631553064955302246105";
const TAIL_4_2_2: f64 = 0.011183261758407797249472273684469350446977538944704;
const EPS_BOUND_16_8_4: f64 = 0.000378878354262998351262390522059;
const TAIL_100_10_10: f64 = 5.97131489685410857391965716604e-12;
const TAIL_1024_32_6: f64 = 8.71162589031922448809828089382e-7;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn a_k_matches_fifty_digit_reference() {
    let value = a_k(4, 2, 2).unwrap();
    assert_eq!(value.to_decimal(47), A_4_2_2);
}

#[test]
fn tails_match_reference_in_relative_precision() {
    assert!(rel(a_k_complement(4, 2, 2).unwrap().to_f64(), TAIL_4_2_2) < 1e-12);
    assert!(rel(compression_error_bound(16, 8, 4).unwrap(), EPS_BOUND_16_8_4) < 1e-12);
    assert!(rel(a_k_complement(100, 10, 10).unwrap().to_f64(), TAIL_100_10_10) < 1e-12);
    assert!(rel(a_k_complement(1024, 32, 6).unwrap().to_f64(), TAIL_1024_32_6) < 1e-12);
}

#[test]
fn theta_reference() {
    assert_eq!(theta(1).unwrap(), core::f64::consts::FRAC_PI_2);
    assert!((theta(4).unwrap() - 0.3739931524730452).abs() < 1e-15);
}

#[test]
fn half_angle_below_inverse_square() {
    for m in 2..=10_000usize {
        let (_, s2) = half_angle_sq(m).unwrap();
        assert!(s2 * ((m * m) as f64) < 1.0, "m={m}");
    }
}

#[test]
fn majority_formula_at_scale() {
    let eps = majority_error_formula(100, 10).unwrap();
    assert!(eps < ExactRational::pow2_neg(11));
    assert!(rel(eps.to_f64(), 3.3479796818436353e-4) < 1e-9);
}
