//! Property tests for the truncated Taylor arithmetic: ring axioms on the
//! coefficients, inverse round trips, and composition identities.

use proptest::prelude::*;

use finsler_core::jets::{Jet, JetShape};

fn jet_strategy(dims: usize, order: usize) -> impl Strategy<Value = Jet> {
    let shape = JetShape::get(dims, order).unwrap();
    let len = shape.len();
    proptest::collection::vec(-2.0f64..2.0, len).prop_map(move |coeffs| {
        let mut j = Jet::constant(shape, 0.0);
        let mut idx = 0usize;
        // fill by enumerating the shape's multi-indices through set_coeff
        for total in 0..=order {
            fill_degree(&mut j, dims, total, &mut vec![0usize; dims], 0, &coeffs, &mut idx);
        }
        j
    })
}

fn fill_degree(
    j: &mut Jet,
    dims: usize,
    remaining: usize,
    alpha: &mut Vec<usize>,
    at: usize,
    coeffs: &[f64],
    idx: &mut usize,
) {
    if at == dims {
        if remaining == 0 {
            j.set_coeff(alpha, coeffs[*idx % coeffs.len()]);
            *idx += 1;
        }
        return;
    }
    for e in 0..=remaining {
        alpha[at] = e;
        fill_degree(j, dims, remaining - e, alpha, at + 1, coeffs, idx);
    }
    alpha[at] = 0;
}

fn max_coeff_diff(a: &Jet, b: &Jet) -> f64 {
    a.coefficients()
        .iter()
        .zip(b.coefficients())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_distributes(a in jet_strategy(3, 3), b in jet_strategy(3, 3), c in jet_strategy(3, 3)) {
        let left = (a.clone() + b.clone()) * c.clone();
        let right = a * c.clone() + b * c;
        prop_assert!(max_coeff_diff(&left, &right) < 1e-12);
    }

    #[test]
    fn multiplication_associates(a in jet_strategy(2, 4), b in jet_strategy(2, 4), c in jet_strategy(2, 4)) {
        let left = (a.clone() * b.clone()) * c.clone();
        let right = a * (b * c);
        prop_assert!(max_coeff_diff(&left, &right) < 1e-10);
    }

    #[test]
    fn division_round_trips(a in jet_strategy(3, 3), mut b in jet_strategy(3, 3)) {
        // push the divisor's leading value away from zero
        let lead = b.value();
        b.set_coeff(&[0, 0, 0], lead.signum().max(0.5) * (lead.abs() + 0.5));
        let q = a.clone() / b.clone();
        let back = q * b;
        prop_assert!(max_coeff_diff(&back, &a) < 1e-9);
    }

    #[test]
    fn sqrt_squares_back(mut a in jet_strategy(2, 4)) {
        a.set_coeff(&[0, 0], a.value().abs() + 0.5);
        let r = a.sqrt();
        let back = r.clone() * r;
        prop_assert!(max_coeff_diff(&back, &a) < 1e-10);
    }

    #[test]
    fn exp_ln_round_trips(mut a in jet_strategy(2, 3)) {
        a.set_coeff(&[0, 0], a.value().abs() + 0.5);
        let back = a.ln().exp();
        prop_assert!(max_coeff_diff(&back, &a) < 1e-9);
    }

    #[test]
    fn sin_cos_pythagoras(a in jet_strategy(2, 4)) {
        let s = a.sin();
        let c = a.cos();
        let one = s.clone() * s + c.clone() * c;
        let mut expect = Jet::constant(a.shape(), 1.0);
        expect.set_coeff(&[0, 0], 1.0);
        prop_assert!(max_coeff_diff(&one, &expect) < 1e-12);
    }
}
