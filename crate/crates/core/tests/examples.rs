//! Worked examples with independent oracles: closed forms, finite
//! differences, and classical identities, exercised per operation.

use serde_json::{json, Value};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use finsler_core::catalog;
use finsler_core::connection::{self, christoffel_s};
use finsler_core::curvature::{flag_curvature, jacobi_operator_spray};
use finsler_core::curve::{PiecewiseCurve, Side, VectorFieldAlongCurve};
use finsler_core::fd;
use finsler_core::geodesic::{exponential_map, integrate_geodesic, parallel_transport};
use finsler_core::jacobi::{dexp, orthogonality_report, p_jacobi_basis, solve_jacobi, wronskian};
use finsler_core::jets::{lift, Dir};
use finsler_core::ode::OdeOptions;
use finsler_core::submanifold::{circle_patch, line_patch, point_patch, split_tan_nor};
use finsler_core::variation::{critical_point_test, legendre, second_variation};

fn ode() -> OdeOptions {
    OdeOptions::default()
}

#[test]
fn quartic_mixed_derivative_matches_richardson_fd() {
    // ∂²√(v₁⁴+v₂⁴)/∂v₁∂v₂ at (1,1) = −√2
    let m = catalog::build("quartic", &Value::Null).unwrap();
    let lifted = lift(
        m.lagrangian(),
        &[0.0f64, 0.0],
        &[1.0, 1.0],
        &[Dir::V(0), Dir::V(1)],
        2,
    )
    .unwrap();
    let jet_value = lifted.partial(&[1, 1]);
    assert!((jet_value + SQRT_2).abs() < 1e-12, "{jet_value}");
    let f = |z: &[f64]| m.evaluate_unchecked(&[0.0, 0.0], z);
    // the h = 1e-4 stencil floor is set by roundoff amplification ~ ε/h²
    let fd_value = fd::mixed_partial(&f, &[1.0, 1.0], &[1, 1], 1e-4);
    assert!((jet_value - fd_value).abs() < 1e-6, "{jet_value} vs {fd_value}");
}

#[test]
fn audits_across_the_catalog() {
    let eu = catalog::build("euclidean", &Value::Null).unwrap();
    assert!(eu.audit(100, 1).unwrap().max_violation() <= 1e-10);

    let ra = catalog::build("randers", &Value::Null).unwrap();
    assert!(ra.audit(100, 1).unwrap().max_violation() <= 1e-8);

    // negative control: the broken entry must blow the homogeneity check
    let broken = catalog::build("broken", &Value::Null).unwrap();
    let report = broken.audit(50, 1).unwrap();
    let homog = report
        .entries
        .iter()
        .find(|e| e.check == "L 2-homogeneity")
        .unwrap();
    assert!(homog.max_violation > 1e-2, "{}", homog.max_violation);
}

#[test]
fn covariant_derivative_satisfies_leibniz() {
    let m = catalog::build("randers", &Value::Null).unwrap();
    let curve = PiecewiseCurve::from_closure([0.1, 1.2], |t| {
        vec![0.2 * t, 0.1 + 0.05 * (2.0 * t).sin()]
    })
    .unwrap();
    // dense grids keep the product field's representation error below the
    // 1e-9 the identity is checked at
    let ts: Vec<f64> = (0..=2200).map(|k| 0.1 + 1.1 * k as f64 / 2200.0).collect();
    let x_samples: Vec<Vec<f64>> = ts.iter().map(|&t| vec![0.4 + t, (1.3 * t).cos()]).collect();
    let fx_samples: Vec<Vec<f64>> = ts
        .iter()
        .map(|&t| vec![t * t * (0.4 + t), t * t * (1.3 * t).cos()])
        .collect();
    let x_field =
        VectorFieldAlongCurve::from_segment_samples(&[(ts.clone(), x_samples)]).unwrap();
    let fx_field =
        VectorFieldAlongCurve::from_segment_samples(&[(ts.clone(), fx_samples)]).unwrap();
    let w_ref = VectorFieldAlongCurve::from_closure(&curve, |_| vec![1.0, 0.3]).unwrap();
    let t0 = 0.7;
    let d_fx = connection::covariant_derivative(&m, &curve, &fx_field, &w_ref, t0, None).unwrap();
    let d_x = connection::covariant_derivative(&m, &curve, &x_field, &w_ref, t0, None).unwrap();
    let xv = x_field.value(t0, None).unwrap();
    for i in 0..2 {
        let expect = 2.0 * t0 * xv[i] + t0 * t0 * d_x[i];
        assert!((d_fx[i] - expect).abs() < 1e-9, "{d_fx:?}");
    }
}

#[test]
fn almost_g_compat_reduces_to_metric_compatibility_for_parallel_reference() {
    let m = catalog::build("funk", &Value::Null).unwrap();
    let curve = PiecewiseCurve::from_closure([0.0, 0.8], |t| {
        vec![0.1 + 0.2 * t, -0.1 + 0.08 * (1.5 * t).sin()]
    })
    .unwrap();
    // a parallel reference field along the curve
    let w_ref = parallel_transport(&m, &curve, &[0.7, 0.4], &ode()).unwrap();
    let x_field =
        VectorFieldAlongCurve::from_closure(&curve, |t| vec![(t).cos(), 0.5 * t]).unwrap();
    let y_field =
        VectorFieldAlongCurve::from_closure(&curve, |t| vec![0.2, (2.0 * t).sin()]).unwrap();
    for k in 1..8 {
        let t = 0.1 * k as f64;
        let r = connection::check_almost_g_compat(&m, &curve, &x_field, &y_field, &w_ref, t, None)
            .unwrap();
        assert!(r < 1e-7, "t = {t}: residual {r}");
    }
}

/// Christoffel symbols against an all-finite-difference assembly of the same
/// construction (horizontal derivative, nonlinear connection from the spray).
#[test]
fn christoffel_matches_finite_difference_assembly() {
    for id in ["randers", "hyperbolic"] {
        let m = catalog::build(id, &Value::Null).unwrap();
        let n = m.dim();
        let x = [0.21, -0.13];
        let v = [0.8, 0.55];
        let h = 1e-5;

        let g_at = |x: &[f64], v: &[f64]| -> Vec<f64> {
            let g = m.fundamental_tensor(x, v).unwrap();
            (0..n * n).map(|k| g.matrix()[(k / n, k % n)]).collect()
        };
        let spray_at = |v: &[f64]| -> Vec<f64> {
            connection::spray_s::<f64>(&m, &x, v).unwrap()
        };

        // ∂g/∂xⁱ and ∂g/∂vᵐ by central differences
        let mut dg_dx = vec![vec![0.0; n * n]; n];
        let mut dg_dv = vec![vec![0.0; n * n]; n];
        for i in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let gp = g_at(&xp, &v);
            let gm = g_at(&xm, &v);
            for k in 0..n * n {
                dg_dx[i][k] = (gp[k] - gm[k]) / (2.0 * h);
            }
            let mut vp = v.to_vec();
            let mut vm = v.to_vec();
            vp[i] += h;
            vm[i] -= h;
            let gp = g_at(&x, &vp);
            let gm = g_at(&x, &vm);
            for k in 0..n * n {
                dg_dv[i][k] = (gp[k] - gm[k]) / (2.0 * h);
            }
        }
        // Nᵐᵢ = ∂Gᵐ/∂vⁱ by central differences
        let mut nonlinear = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut vp = v.to_vec();
            let mut vm = v.to_vec();
            vp[i] += h;
            vm[i] -= h;
            let gp = spray_at(&vp);
            let gm = spray_at(&vm);
            for mm in 0..n {
                nonlinear[mm][i] = (gp[mm] - gm[mm]) / (2.0 * h);
            }
        }
        let delta = |i: usize, j: usize, k: usize| -> f64 {
            let mut acc = dg_dx[i][j * n + k];
            for mm in 0..n {
                acc -= nonlinear[mm][i] * dg_dv[mm][j * n + k];
            }
            acc
        };
        let g = m.fundamental_tensor(&x, &v).unwrap();
        let ginv = g.matrix().clone().try_inverse().unwrap();
        let gamma = christoffel_s::<f64>(&m, &x, &v).unwrap();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for s in 0..n {
                        acc += ginv[(k, s)] * (delta(i, s, j) + delta(j, s, i) - delta(s, i, j));
                    }
                    let expect = 0.5 * acc;
                    let got = gamma[(k * n + i) * n + j];
                    assert!(
                        (got - expect).abs() < 1e-6,
                        "{id} Γ^{k}_{i}{j}: {got} vs fd {expect}"
                    );
                }
            }
        }
    }
}

#[test]
fn exponential_map_traces_the_geodesic() {
    let m = catalog::build("funk", &Value::Null).unwrap();
    let p = [0.15, -0.2];
    let v = [0.5, 0.4];
    let geo = integrate_geodesic(&m, &p, &v, [0.0, 1.0], &ode()).unwrap();
    for s in [0.25, 0.5, 1.0] {
        let vs: Vec<f64> = v.iter().map(|c| c * s).collect();
        let q = exponential_map(&m, &p, &vs, &ode()).unwrap();
        let expect = geo.position(s);
        for i in 0..2 {
            assert!((q[i] - expect[i]).abs() < 1e-9, "s = {s}: {q:?} vs {expect:?}");
        }
    }
}

#[test]
fn latitude_circle_holonomy() {
    // transport around the θ = π/3 latitude rotates by 2π·cos(π/3) = π
    let m = catalog::build("sphere", &Value::Null).unwrap();
    let th = PI / 3.0;
    let curve =
        PiecewiseCurve::from_closure([0.0, 2.0 * PI], move |t| vec![th, t]).unwrap();
    let transported = parallel_transport(&m, &curve, &[1.0, 0.0], &ode()).unwrap();
    let w_end = transported.value(2.0 * PI, Some(Side::Left)).unwrap();
    // rotation by π sends ∂θ to −∂θ exactly
    assert!((w_end[0] + 1.0).abs() < 1e-6, "{w_end:?}");
    assert!(w_end[1].abs() < 1e-6, "{w_end:?}");
}

#[test]
fn jacobi_operator_pairs_to_zero_with_the_velocity() {
    // g_v(Rᵞ(v,w)v, v) = 0
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for id in catalog::CATALOG_IDS {
        let m = catalog::build(id, &Value::Null).unwrap();
        for _ in 0..10 {
            let (x, v) = m.sample_admissible(&mut rng).unwrap();
            let w: Vec<f64> = (0..m.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let op = jacobi_operator_spray(&m, &x, &v).unwrap();
            let g = m.fundamental_tensor(&x, &v).unwrap();
            let pairing = g.inner(&op.apply(&w), &v);
            assert!(pairing.abs() < 1e-9, "{id}: {pairing}");
        }
    }
}

#[test]
fn flag_curvature_scale_invariances() {
    let m = catalog::build("funk", &Value::Null).unwrap();
    let x = [0.2, 0.1];
    let v = [0.6, -0.3];
    let w = [0.2, 0.9];
    let k0 = flag_curvature(&m, &x, &v, &w).unwrap();
    // w ↦ w + μv
    let shifted: Vec<f64> = w.iter().zip(&v).map(|(a, b)| a + 0.8 * b).collect();
    let k1 = flag_curvature(&m, &x, &v, &shifted).unwrap();
    // w ↦ λw
    let scaled: Vec<f64> = w.iter().map(|c| -2.5 * c).collect();
    let k2 = flag_curvature(&m, &x, &v, &scaled).unwrap();
    assert!((k0 - k1).abs() < 1e-9, "{k0} vs {k1}");
    assert!((k0 - k2).abs() < 1e-9, "{k0} vs {k2}");
}

#[test]
fn legendre_identities() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    for id in catalog::CATALOG_IDS {
        let m = catalog::build(id, &Value::Null).unwrap();
        for _ in 0..10 {
            let (x, v) = m.sample_admissible(&mut rng).unwrap();
            let l = m.evaluate_unchecked(&x, &v);
            let cov = legendre(&m, &x, &v).unwrap();
            let pairing: f64 = cov.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!((pairing - l).abs() < 1e-10, "{id}: ℒ(v)(v) = {pairing} vs L = {l}");
            // ℒ(λv) = λ ℒ(v)
            let v2: Vec<f64> = v.iter().map(|c| 2.0 * c).collect();
            let cov2 = legendre(&m, &x, &v2).unwrap();
            for (a, b) in cov.iter().zip(&cov2) {
                assert!((2.0 * a - b).abs() < 1e-9, "{id}");
            }
        }
    }
}

#[test]
fn sphere_second_variation_sign_flips_at_pi() {
    let m = catalog::build("sphere", &Value::Null).unwrap();
    for (len, expect_positive) in [(PI - 0.1, true), (PI + 0.1, false)] {
        let geo = integrate_geodesic(&m, &[FRAC_PI_2, 0.0], &[0.0, 1.0], [0.0, len], &ode())
            .unwrap();
        let curve = geo.to_curve();
        // sin(πt/len) times the parallel unit normal ∂θ; vanishes at the ends
        let w = VectorFieldAlongCurve::from_closure(&curve, move |t| {
            vec![(PI * t / len).sin(), 0.0]
        })
        .unwrap();
        let e2 = second_variation(&m, &geo, &w, None).unwrap();
        // closed form: (len/2)((π/len)² − 1)
        let closed = (len / 2.0) * ((PI / len).powi(2) - 1.0);
        assert!((e2 - closed).abs() < 1e-6, "len = {len}: {e2} vs {closed}");
        assert_eq!(e2 > 0.0, expect_positive, "len = {len}: {e2}");
    }
}

#[test]
fn smooth_geodesic_between_points_is_critical() {
    let m = catalog::build("hyperbolic", &Value::Null).unwrap();
    let geo = integrate_geodesic(&m, &[0.1, 0.0], &[0.3, 0.2], [0.0, 1.0], &ode()).unwrap();
    let curve = geo.to_curve();
    let p = point_patch(geo.position(0.0));
    let q = point_patch(geo.position(1.0));
    let rep = critical_point_test(&m, &curve, &p, &q, 16, 1e-6).unwrap();
    assert!(rep.critical, "{rep:?}");
}

#[test]
fn split_is_idempotent_and_fixes_tangents() {
    let m = catalog::build("randers", &Value::Null).unwrap();
    let patch = line_patch(vec![0.0, 0.0], vec![1.0, 0.4]);
    let u = [0.2];
    let basis = patch.tangent_basis(&u).unwrap();
    let n_vec =
        finsler_core::submanifold::normal_section(&m, &patch, &u, None).unwrap();
    // a tangent-basis vector splits into (itself, 0)
    let (tan, nor) = split_tan_nor(&m, &patch, &u, &n_vec, &basis[0]).unwrap();
    for i in 0..2 {
        assert!((tan[i] - basis[0][i]).abs() < 1e-12);
        assert!(nor[i].abs() < 1e-12);
    }
    // idempotence on a generic vector
    let y = [0.3, -1.1];
    let (tan, nor) = split_tan_nor(&m, &patch, &u, &n_vec, &y).unwrap();
    let (tan2, nor2a) = split_tan_nor(&m, &patch, &u, &n_vec, &tan).unwrap();
    let (tan3, nor3) = split_tan_nor(&m, &patch, &u, &n_vec, &nor).unwrap();
    for i in 0..2 {
        assert!((tan2[i] - tan[i]).abs() < 1e-11);
        assert!(nor2a[i].abs() < 1e-11);
        assert!(tan3[i].abs() < 1e-11);
        assert!((nor3[i] - nor[i]).abs() < 1e-11);
    }
}

#[test]
fn p_jacobi_basis_for_a_point_reduces_to_vanishing_fields() {
    let m = catalog::build("euclidean", &Value::Null).unwrap();
    let geo = integrate_geodesic(&m, &[0.3, -0.2], &[1.0, 0.0], [0.0, 1.0], &ode()).unwrap();
    let p = point_patch(vec![0.3, -0.2]);
    let basis = p_jacobi_basis(&m, &geo, &p, &ode()).unwrap();
    assert_eq!(basis.len(), 2);
    for b in &basis {
        let j0 = b.value(0.0);
        assert!(j0.iter().all(|c| c.abs() < 1e-10), "{j0:?}");
        let dj0 = b.derivative(0.0);
        assert!(dj0.iter().any(|c| c.abs() > 0.5), "{dj0:?}");
    }
}

#[test]
fn hyperplane_p_fields_are_constant_translations() {
    let m = catalog::build("euclidean", &Value::Null).unwrap();
    // P = x-axis; orthogonal geodesic straight up
    let p = line_patch(vec![0.0, 0.0], vec![1.0, 0.0]);
    let geo = integrate_geodesic(&m, &[0.0, 0.0], &[0.0, 1.0], [0.0, 1.5], &ode()).unwrap();
    let basis = p_jacobi_basis(&m, &geo, &p, &ode()).unwrap();
    // the tangential field stays the constant tangent translation
    let tangential = &basis[0];
    for k in 0..=5 {
        let t = 0.3 * k as f64;
        let j = tangential.value(t);
        assert!((j[0] - 1.0).abs() < 1e-9 && j[1].abs() < 1e-9, "t = {t}: {j:?}");
    }
}

#[test]
fn outward_circle_p_field_grows_linearly() {
    // P the unit circle, outward radial geodesic from (1, 0): the tangential
    // P-Jacobi field is (1 + t)·e_tangent
    let m = catalog::build("euclidean", &Value::Null).unwrap();
    let p = circle_patch([0.0, 0.0], 1.0);
    let geo = integrate_geodesic(&m, &[1.0, 0.0], &[1.0, 0.0], [0.0, 1.2], &ode()).unwrap();
    let basis = p_jacobi_basis(&m, &geo, &p, &ode()).unwrap();
    let tangential = &basis[0];
    let j0 = tangential.value(0.0);
    let sign = j0[1].signum();
    for k in 0..=4 {
        let t = 0.3 * k as f64;
        let j = tangential.value(t);
        assert!(j[0].abs() < 1e-8, "{j:?}");
        assert!((j[1] - sign * (1.0 + t)).abs() < 1e-8, "t = {t}: {j:?}");
    }
}

#[test]
fn wronskian_flat_closed_form() {
    let m = catalog::build("euclidean", &Value::Null).unwrap();
    let geo = integrate_geodesic(&m, &[0.0, 0.0], &[1.0, 0.0], [0.0, 1.0], &ode()).unwrap();
    let j1 = solve_jacobi(&m, &geo, &[0.0, 0.0], &[0.0, 1.0], &ode()).unwrap();
    let j2 = solve_jacobi(&m, &geo, &[0.0, 1.0], &[0.0, 0.0], &ode()).unwrap();
    let rep = wronskian(&m, &geo, &j1, &j2).unwrap();
    assert!((rep.values[0].1 + 1.0).abs() < 1e-10);
    assert!(rep.drift < 1e-10);
}

#[test]
fn dexp_along_the_velocity_returns_the_endpoint_velocity() {
    let m = catalog::build("sphere", &Value::Null).unwrap();
    let p = [1.2, 0.3];
    let v = [0.25, 0.55];
    let geo = integrate_geodesic(&m, &p, &v, [0.0, 1.0], &ode()).unwrap();
    let d = dexp(&m, &p, &v, &v, &ode()).unwrap();
    let v1 = geo.velocity(1.0);
    for i in 0..2 {
        assert!((d[i] - v1[i]).abs() < 1e-6, "{d:?} vs {v1:?}");
    }
}

#[test]
fn orthogonality_report_examples() {
    // (a) initial pairing and its rate zero → pairing identically zero
    let m = catalog::build("funk", &Value::Null).unwrap();
    let geo = integrate_geodesic(&m, &[0.1, 0.05], &[0.5, 0.3], [0.0, 0.9], &ode()).unwrap();
    let (x0, v0) = geo.state(0.0);
    let g0 = m.fundamental_tensor(&x0, &v0).unwrap();
    // pick J(0) ⊥ γ̇ and J′(0) ⊥ γ̇
    let perp = |seed: &[f64]| -> Vec<f64> {
        let c = g0.inner(seed, &v0) / g0.inner(&v0, &v0);
        seed.iter().zip(&v0).map(|(a, b)| a - c * b).collect()
    };
    let j = solve_jacobi(&m, &geo, &perp(&[1.0, 0.0]), &perp(&[0.0, 1.0]), &ode()).unwrap();
    let rep = orthogonality_report(&m, &geo, &j).unwrap();
    assert!(rep.pairing_endpoints[0].abs() < 1e-9);
    assert!(rep.pairing_endpoints[1].abs() < 1e-7);
    assert!(rep.affine_deviation < 1e-7, "{rep:?}");

    // (b) flat split: J = (t, t) along the x-axis
    let m = catalog::build("euclidean", &Value::Null).unwrap();
    let geo = integrate_geodesic(&m, &[0.0, 0.0], &[1.0, 0.0], [0.0, 1.0], &ode()).unwrap();
    let j = solve_jacobi(&m, &geo, &[0.0, 0.0], &[1.0, 1.0], &ode()).unwrap();
    let rep = orthogonality_report(&m, &geo, &j).unwrap();
    assert!(rep.tan_jacobi_residual < 1e-9, "{rep:?}");
    assert!(rep.nor_jacobi_residual < 1e-9, "{rep:?}");
    assert!(rep.commutation_residual < 1e-9, "{rep:?}");

    // (c) sphere superposition: sin(t)·E + (2t+1)·γ̇ along the equator
    let m = catalog::build("sphere", &Value::Null).unwrap();
    let geo =
        integrate_geodesic(&m, &[FRAC_PI_2, 0.0], &[0.0, 1.0], [0.0, 2.0], &ode()).unwrap();
    let j = solve_jacobi(&m, &geo, &[0.0, 1.0], &[1.0, 2.0], &ode()).unwrap();
    let at = j.value(1.0);
    assert!((at[0] - 1.0f64.sin()).abs() < 1e-8 && (at[1] - 3.0).abs() < 1e-8, "{at:?}");
    let rep = orthogonality_report(&m, &geo, &j).unwrap();
    assert!(rep.affine_deviation < 1e-7, "{rep:?}");
    assert!(rep.tan_jacobi_residual < 1e-6, "{rep:?}");
    assert!(rep.nor_jacobi_residual < 1e-6, "{rep:?}");
    assert!(rep.commutation_residual < 1e-6, "{rep:?}");
}

#[test]
fn quartic_cartan_fixed_by_fd_oracle() {
    // C(e₁,e₁,e₁) vanishes at the symmetric point (1,1) and is fixed by the
    // finite-difference oracle of ∂g₁₁/∂v₁ elsewhere
    let m = catalog::build("quartic", &Value::Null).unwrap();
    let c = m.cartan_tensor(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    assert!(c.get(0, 0, 0).abs() < 1e-12, "{}", c.get(0, 0, 0));

    let v = [1.0, 2.0];
    let c = m.cartan_tensor(&[0.0, 0.0], &v).unwrap();
    let g11 = |v1: f64| {
        m.fundamental_tensor(&[0.0, 0.0], &[v1, v[1]])
            .unwrap()
            .matrix()[(0, 0)]
    };
    let dg = fd::derivative(|h| g11(v[0] + h), 1e-4);
    assert!(
        (c.get(0, 0, 0) - 0.5 * dg).abs() < 1e-8,
        "{} vs fd {}",
        c.get(0, 0, 0),
        0.5 * dg
    );
}

/// Simple sanity on a 3-dimensional chart so nothing is hardwired to n = 2.
#[test]
fn three_dimensional_euclidean_round_trip() {
    let m = catalog::build("euclidean", &json!({ "dim": 3 })).unwrap();
    let geo = integrate_geodesic(
        &m,
        &[0.0, 0.0, 0.0],
        &[1.0, -0.5, 0.25],
        [0.0, 1.0],
        &ode(),
    )
    .unwrap();
    let p = geo.position(1.0);
    assert!((p[0] - 1.0).abs() < 1e-10 && (p[1] + 0.5).abs() < 1e-10 && (p[2] - 0.25).abs() < 1e-10);
    let k = flag_curvature(&m, &[0.0; 3], &[1.0, 0.2, 0.0], &[0.0, 1.0, 0.5]).unwrap();
    assert!(k.abs() < 1e-10);
}

#[test]
fn pseudo_euclidean_meridian_values() {
    // spot values from the spec's tables
    let m = catalog::build("pseudo_euclidean", &Value::Null).unwrap();
    assert_eq!(m.evaluate(&[0.0, 0.0], &[1.0, 2.0]).unwrap(), 3.0);
    let sphere = catalog::build("sphere", &Value::Null).unwrap();
    let g = sphere
        .fundamental_tensor(&[FRAC_PI_4, 0.0], &[0.3, 0.9])
        .unwrap();
    assert!((g.matrix()[(1, 1)] - 0.5).abs() < 1e-13);
}

#[test]
fn hyperplane_has_no_focal_points() {
    let m = catalog::build("euclidean", &Value::Null).unwrap();
    let p = line_patch(vec![0.0, 0.0], vec![1.0, 0.0]);
    let geo = integrate_geodesic(&m, &[0.3, 0.0], &[0.0, 1.0], [0.0, 3.0], &ode()).unwrap();
    let zeros = finsler_core::jacobi::focal_points(&m, &geo, &p, &ode()).unwrap();
    assert!(zeros.is_empty(), "{zeros:?}");
}

#[test]
fn reparametrization_variation_matches_fd() {
    // W = γ̇: the chart-linear family reparametrizes the geodesic
    let m = catalog::build("sphere", &Value::Null).unwrap();
    let geo =
        integrate_geodesic(&m, &[FRAC_PI_2, 0.2], &[0.4, 0.9], [0.0, 0.7], &ode()).unwrap();
    let curve = geo.to_curve();
    let w = VectorFieldAlongCurve::from_closure(&curve, |t| geo.velocity(t)).unwrap();
    let acc =
        finsler_core::variation::chart_linear_transverse_acceleration(&m, &geo, &w).unwrap();
    let formula = second_variation(&m, &geo, &w, Some(&acc)).unwrap();
    let fd_value =
        finsler_core::variation::energy_second_fd(&m, &curve, &w, 1e-3).unwrap();
    assert!(
        (formula - fd_value).abs() / formula.abs().max(1.0) < 1e-5,
        "{formula} vs {fd_value}"
    );
}

#[test]
fn variation_surface_probes_admissibility() {
    use finsler_core::curvature::VariationSurface;
    let m = catalog::build("quartic", &Value::Null).unwrap();
    let curve = PiecewiseCurve::from_closure([0.0, 1.0], |t| vec![t, 0.8 * t]).unwrap();
    let w = VectorFieldAlongCurve::from_closure(&curve, |t| vec![0.0, 0.2 * (PI * t).sin()])
        .unwrap();
    let surface = VariationSurface::new(&curve, &w).unwrap();
    surface.check_admissible(&m, 0.1, 16).unwrap();
    // a transverse push that rotates the velocity onto the degenerate axis
    let bad_w =
        VectorFieldAlongCurve::from_closure(&curve, |t| vec![0.0, -0.8 * t]).unwrap();
    let bad = VariationSurface::new(&curve, &bad_w).unwrap();
    assert!(bad.check_admissible(&m, 1.0, 16).is_err());
}
