//! Algebraic identities between the catalog methods and independently built
//! oracles (cell products through the Brezinski inverse, the geometric
//! product, Mann/extrapolation forms, Anderson and Wynn).

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use steffensen_core::geometric::{geometric_step, GeometricCase};
use steffensen_core::steffensen::{
    anderson2_step, compute_abc, lambda_for, scalar_steffensen_step, vector_step, wynn_k2_scalar,
};
use steffensen_core::vector::brezinski_inverse;
use steffensen_core::{AbcTriple, Method, MethodSpec, RealVector};

fn random_vec(rng: &mut StdRng, n: usize) -> RealVector {
    RealVector::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn random_triple(rng: &mut StdRng) -> (RealVector, AbcTriple) {
    let n = rng.random_range(4..=64);
    let x = random_vec(rng, n);
    let a = random_vec(rng, n);
    let b = random_vec(rng, n);
    let t = AbcTriple::from_residuals(&x, a, b).unwrap();
    (x, t)
}

fn rel_dev(got: &RealVector, oracle: &RealVector) -> f64 {
    let scale = oracle.as_slice().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    got.max_abs_diff(oracle) / scale
}

fn step(m: Method, x: &RealVector, t: &AbcTriple) -> RealVector {
    vector_step(&MethodSpec::unlimited(m), x, t, 1.0)
        .unwrap()
        .next_x
}

/// Product patterns of the scalar cases, with `c⁻¹` left abstract.
#[derive(Clone, Copy, Debug)]
enum Cell {
    /// x + a a c⁻¹
    A11,
    /// x + a c⁻¹ a
    A12,
    /// φ + a b c⁻¹
    A21,
    /// φ + a c⁻¹ b
    A22,
    /// φ + b c⁻¹ a
    A23,
    /// φφ + b b c⁻¹
    A31,
    /// φφ + b c⁻¹ b
    A32,
}

/// Choice of the second vector of the Brezinski pair.
#[derive(Clone, Copy, Debug)]
enum Inv {
    /// c⁻¹ = c / ‖c‖²
    B1,
    /// c⁻¹ = a / aᵀc
    B2,
    /// c⁻¹ = b / bᵀc
    B3,
}

fn cell(cell: Cell, inv: Inv, x: &RealVector, t: &AbcTriple) -> RealVector {
    let (a, b, c) = (t.a(), t.b(), t.c());
    let v = match inv {
        Inv::B1 => c,
        Inv::B2 => a,
        Inv::B3 => b,
    };
    let ci = brezinski_inverse(c, v).unwrap();
    match cell {
        Cell::A11 => x.axpy(a.dot(a), &ci),
        Cell::A12 => x.axpy(a.dot(&ci), a),
        Cell::A21 => t.phi_x().axpy(a.dot(b), &ci),
        Cell::A22 => t.phi_x().axpy(a.dot(&ci), b),
        Cell::A23 => t.phi_x().axpy(b.dot(&ci), a),
        Cell::A31 => t.phi_phi_x().axpy(b.dot(b), &ci),
        Cell::A32 => t.phi_phi_x().axpy(b.dot(&ci), b),
    }
}

fn merged_groups() -> Vec<(Method, Vec<(Cell, Inv)>)> {
    use Cell::*;
    use Inv::*;
    vec![
        (Method::A1, vec![(A11, B2), (A12, B2), (A21, B2), (A23, B2)]),
        (Method::A2, vec![(A12, B1), (A23, B1)]),
        (Method::A3, vec![(A12, B3), (A23, B3)]),
        (Method::A4, vec![(A31, B2)]),
        (Method::B1, vec![(A11, B3)]),
        (Method::B2, vec![(A22, B1), (A32, B1)]),
        (Method::B3, vec![(A21, B3), (A22, B3), (A31, B3), (A32, B3)]),
        (Method::B4, vec![(A22, B2), (A32, B2)]),
        (Method::C1, vec![(A11, B1)]),
        (Method::C2, vec![(A21, B1)]),
        (Method::C3, vec![(A31, B1)]),
    ]
}

#[test]
fn a11_b2_matches_a21_b2() {
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..100 {
        let (x, t) = random_triple(&mut rng);
        let lhs = cell(Cell::A11, Inv::B2, &x, &t);
        let rhs = cell(Cell::A21, Inv::B2, &x, &t);
        assert!(rel_dev(&lhs, &rhs) <= 1e-12);
    }
}

#[test]
fn merged_cells_are_one_iteration() {
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..100 {
        let (x, t) = random_triple(&mut rng);
        for (method, cells) in merged_groups() {
            let got = step(method, &x, &t);
            for (c, inv) in cells {
                let oracle = cell(c, inv, &x, &t);
                let dev = rel_dev(&got, &oracle);
                assert!(dev <= 1e-12, "{method} vs {c:?}-{inv:?}: {dev:e}");
            }
        }
    }
}

#[test]
fn eps_matches_explicit_form() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..100 {
        let (x, t) = random_triple(&mut rng);
        let (a, b, c) = (t.a(), t.b(), t.c());
        let cc = c.dot(c);
        let oracle = t.phi_x().axpy(a.dot(a) / cc, b).axpy(-b.dot(b) / cc, a);
        assert!(rel_dev(&step(Method::Eps, &x, &t), &oracle) <= 1e-12);
    }
}

#[test]
fn geometric_cases_collapse() {
    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..100 {
        let (x, t) = random_triple(&mut rng);
        for case in GeometricCase::ALL {
            let got = geometric_step(case, &x, &t).unwrap();
            let target = step(case.equivalent(), &x, &t);
            let dev = rel_dev(&got, &target);
            assert!(dev <= 1e-12, "{case}: {dev:e}");
        }
    }
}

#[test]
fn geometric_targets_are_the_three_documented() {
    use GeometricCase::*;
    for (case, m) in [
        (A1_1, Method::C1),
        (A2_1, Method::C1),
        (A2_6, Method::C1),
        (A1_2, Method::Eps),
        (A2_2, Method::Eps),
        (A2_3, Method::Eps),
        (A3_2, Method::Eps),
        (A2_4, Method::C3),
        (A2_5, Method::C3),
        (A3_1, Method::C3),
    ] {
        assert_eq!(case.equivalent(), m, "{case}");
    }
}

#[test]
fn anderson_two_is_b2() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..100 {
        let (x, t) = random_triple(&mut rng);
        let aa = anderson2_step(&t).unwrap();
        assert!(rel_dev(&aa, &step(Method::B2, &x, &t)) <= 1e-12);
    }
}

#[test]
fn wynn_two_is_scalar_a2() {
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..100 {
        let x: f64 = rng.random_range(-3.0..3.0);
        let phi = |y: f64| 0.5 * y.cos() + 0.2;
        let (p, pp) = (phi(x), phi(phi(x)));
        let w = wynn_k2_scalar(x, p, pp).unwrap();
        // A2: x + a·(a − b)/(a − b)² written as x + a·ac/cc in scalar form
        let (a, b) = (p - x, pp - p);
        let c = a - b;
        let a2 = x + (a * c / (c * c)) * a;
        assert!((w - a2).abs() <= 1e-12 * a2.abs().max(1.0));
        let v = step(
            Method::A2,
            &RealVector::new(vec![x]).unwrap(),
            &AbcTriple::from_evaluations(
                &RealVector::new(vec![x]).unwrap(),
                RealVector::new(vec![p]).unwrap(),
                RealVector::new(vec![pp]).unwrap(),
            )
            .unwrap(),
        );
        assert!((w - v.as_slice()[0]).abs() <= 1e-12 * w.abs().max(1.0));
    }
}

/// A nonlinear, coupled map used for the Mann-form identities.
fn phi(x: &RealVector) -> RealVector {
    let s = x.as_slice();
    let n = s.len();
    RealVector::from_vec(
        (0..n)
            .map(|i| 0.5 * s[i].cos() + 0.1 * s[(i + 1) % n] + 0.05)
            .collect(),
    )
}

fn mann(y: &RealVector, lambda: f64) -> RealVector {
    y.axpy(lambda, &phi(y).sub(y))
}

fn extrapolate(x: &RealVector, lambda: f64) -> RealVector {
    let p = phi(x);
    p.axpy(lambda, &p.sub(x))
}

#[test]
fn mann_forms_hold() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..100 {
        let n = rng.random_range(4..=64);
        let x = random_vec(&mut rng, n);
        let mu = rng.random_range(0.1..2.0);
        let t = compute_abc(phi, &x).unwrap();
        let y = phi(&x);
        let (a, b) = (t.a(), t.b());
        for m in Method::ALL {
            let spec = MethodSpec::new(m, 0.75).unwrap();
            let s = vector_step(&spec, &x, &t, mu).unwrap();
            let l = mu * s.lambda_clipped;
            use Method::*;
            let oracle = match m {
                A1 | A2 | A3 => mann(&x, l),
                B2 | B3 | B4 => mann(&y, l),
                A4 => extrapolate(&x, l).add(b),
                B1 => mann(&y, l).sub(a),
                C1 => mann(&x, l).axpy(-l, b),
                C2 => extrapolate(&x, l).axpy(-l, b),
                C3 => extrapolate(&y, -l).axpy(l, a),
                Eps => mann(&y, l).axpy(-mu * s.eta_clipped.unwrap(), a),
            };
            let dev = rel_dev(&s.next_x, &oracle);
            assert!(dev <= 1e-12, "{m}: {dev:e}");
        }
    }
}

#[test]
fn mann_and_extrapolation_relation() {
    let mut rng = StdRng::seed_from_u64(8);
    let x = random_vec(&mut rng, 16);
    for l in [-1.5, -0.25, 0.0, 0.5, 2.0] {
        assert!(rel_dev(&mann(&x, 1.0 + l), &extrapolate(&x, l)) <= 1e-12);
    }
}

#[test]
fn scalar_consistency() {
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..100 {
        let x0: f64 = rng.random_range(-2.0..2.0);
        let expect = scalar_steffensen_step(f64::cos, x0).unwrap();
        let x = RealVector::new(vec![x0]).unwrap();
        let t = compute_abc(
            |v: &RealVector| RealVector::from_vec(vec![v.as_slice()[0].cos()]),
            &x,
        )
        .unwrap();
        for m in Method::ALL {
            let got = step(m, &x, &t).as_slice()[0];
            assert!(
                (got - expect).abs() <= 1e-12 * expect.abs().max(1.0),
                "{m} at {x0}: {got} vs {expect}"
            );
        }
    }
}

fn scaled(t: &AbcTriple, mu: f64) -> AbcTriple {
    let x = RealVector::zeros(t.len());
    AbcTriple::from_residuals(&x, t.a().scale(mu), t.b().scale(mu)).unwrap()
}

#[test]
fn mu_cancellation_bit_exact_on_integer_triples() {
    let mut rng = StdRng::seed_from_u64(10);
    for _ in 0..100 {
        let n = rng.random_range(4..=64);
        let int_vec = |rng: &mut StdRng| {
            RealVector::new(
                (0..n)
                    .map(|_| rng.random_range(-50i32..=50) as f64)
                    .collect(),
            )
            .unwrap()
        };
        let x = RealVector::zeros(n);
        let t = AbcTriple::from_residuals(&x, int_vec(&mut rng), int_vec(&mut rng)).unwrap();
        for mu in [0.5, 1.0, 2.0, 10.0] {
            let ts = scaled(&t, mu);
            assert_eq!(ts.c(), &t.c().scale(mu));
            for m in Method::ALL {
                let l0 = lambda_for(m, &t);
                let l1 = lambda_for(m, &ts);
                assert_eq!(l0.lambda.to_bits(), l1.lambda.to_bits(), "{m} mu={mu}");
                assert_eq!(l0.eta.map(f64::to_bits), l1.eta.map(f64::to_bits));
            }
        }
    }
}

#[test]
fn mu_cancellation_real_triples() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..100 {
        let (_, t) = random_triple(&mut rng);
        for mu in [0.5, 1.0, 2.0, 10.0] {
            let ts = scaled(&t, mu);
            for m in Method::ALL {
                let (l0, l1) = (lambda_for(m, &t).lambda, lambda_for(m, &ts).lambda);
                if mu == 0.5 || mu == 1.0 || mu == 2.0 {
                    // power-of-two scaling is exact
                    assert_eq!(l0.to_bits(), l1.to_bits(), "{m} mu={mu}");
                } else {
                    assert!((l0 - l1).abs() <= 1e-12 * l0.abs().max(1.0), "{m} mu={mu}");
                }
            }
        }
    }
}
