use nalgebra::DMatrix;
use proptest::prelude::*;

use transportq::algebra::{check_cstar_identity, matrix_exp, pauli, I};
use transportq::derivation::{derivation_superoperator, one_parameter_group, InnerDerivation};
use transportq::scenario::{random_hermitian, random_matrix, random_state, rng_from_seed};
use transportq::transport::{
    commuting_superoperator_evolution, evolve_state, heisenberg_transport, transport,
};
use transportq::{ComplexMatrix, HamiltonianPath, HermitianMatrix, Method, PathKind, Polynomial, Sign, UnitaryMatrix, C64};

fn matrix(seed: u64, n: usize) -> ComplexMatrix {
    random_matrix(n, &mut rng_from_seed(seed))
}

fn hermitian(seed: u64, n: usize) -> HermitianMatrix {
    random_hermitian(n, &mut rng_from_seed(seed))
}

fn with_norm(a: &ComplexMatrix, target: f64) -> ComplexMatrix {
    let norm = a.operator_norm();
    if norm == 0.0 {
        a.clone()
    } else {
        a.scale_real(target / norm)
    }
}

/// `Σ_{k ≤ degree} a^k / k!`.
fn taylor_exp(a: &ComplexMatrix, degree: usize) -> ComplexMatrix {
    let n = a.dim();
    let mut term = ComplexMatrix::identity(n);
    let mut sum = term.clone();
    for k in 1..=degree {
        term = (&term * a).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    sum
}

/// `exp(iH) = V diag(e^{iλ}) V*` from the Hermitian eigendecomposition.
fn spectral_exp_i(h: &HermitianMatrix) -> ComplexMatrix {
    let eig = h.matrix().as_inner().clone().symmetric_eigen();
    let n = h.dim();
    let d = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            (I * eig.eigenvalues[i]).exp()
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let v = &eig.eigenvectors;
    ComplexMatrix::new(v * d * v.adjoint()).unwrap()
}

/// `sqrt(λ_max(a*a))` from the Hermitian eigensolver.
fn norm_via_gram(a: &ComplexMatrix) -> f64 {
    let gram = a.as_inner().adjoint() * a.as_inner();
    gram.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(0.0, f64::max)
        .sqrt()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / f64::max(1.0, b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_is_an_involution(seed in any::<u64>(), n in 1usize..=8) {
        let a = matrix(seed, n);
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn operator_norm_matches_gram_eigenvalue(seed in any::<u64>(), n in 1usize..=8) {
        let a = matrix(seed, n);
        let norm = a.operator_norm();
        prop_assert!((norm - norm_via_gram(&a)).abs() <= 1e-10 * norm.max(1e-300));
    }

    #[test]
    fn norm_is_submultiplicative(seed in any::<u64>(), n in 1usize..=8) {
        let a = matrix(seed, n);
        let b = matrix(seed.wrapping_add(1), n);
        prop_assert!((&a * &b).operator_norm() <= a.operator_norm() * b.operator_norm() + 1e-9);
    }

    #[test]
    fn cstar_identity_holds(seed in any::<u64>(), n in 1usize..=8) {
        prop_assert!(check_cstar_identity(&matrix(seed, n)) <= 1e-9);
    }

    #[test]
    fn exp_times_exp_of_negative_is_identity(seed in any::<u64>(), n in 1usize..=8, norm in 0.0f64..=5.0) {
        let a = with_norm(&matrix(seed, n), norm);
        let prod = &matrix_exp(&a).unwrap() * &matrix_exp(&(-&a)).unwrap();
        prop_assert!(prod.distance(&ComplexMatrix::identity(n)).unwrap() <= 1e-10);
    }

    #[test]
    fn exp_of_anti_hermitian_is_unitary(seed in any::<u64>(), n in 1usize..=8, norm in 0.0f64..=10.0) {
        let h = hermitian(seed, n);
        let a = with_norm(h.matrix(), norm).scale(I);
        prop_assert!(UnitaryMatrix::new(matrix_exp(&a).unwrap()).is_ok());
    }

    #[test]
    fn exp_matches_taylor_for_small_norm(seed in any::<u64>(), n in 1usize..=8, norm in 0.0f64..=1.0) {
        let a = with_norm(&matrix(seed, n), norm);
        let gap = matrix_exp(&a).unwrap().distance(&taylor_exp(&a, 30)).unwrap();
        prop_assert!(gap <= 1e-10, "gap {:e}", gap);
    }

    #[test]
    fn exp_matches_spectral_oracle(seed in any::<u64>(), n in 1usize..=8, norm in 0.0f64..=10.0) {
        let h = HermitianMatrix::new(with_norm(hermitian(seed, n).matrix(), norm)).unwrap();
        let exact = spectral_exp_i(&h);
        let got = matrix_exp(&h.matrix().scale(I)).unwrap();
        // exp(iH) has unit norm, so absolute and relative error coincide
        prop_assert!(got.distance(&exact).unwrap() <= 1e-12);
    }

    #[test]
    fn group_is_an_isometric_automorphism(seed in any::<u64>(), n in 1usize..=8, r in -3.0f64..3.0, s in -3.0f64..3.0) {
        let d = InnerDerivation::new(hermitian(seed, n));
        let a = matrix(seed.wrapping_add(1), n);
        let b = matrix(seed.wrapping_add(2), n);
        let scale = f64::max(1.0, a.operator_norm() * b.operator_norm());
        let lhs = one_parameter_group(&d, r, &(&a * &b)).unwrap();
        let rhs = &one_parameter_group(&d, r, &a).unwrap() * &one_parameter_group(&d, r, &b).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() / scale <= 1e-10);

        let ga = one_parameter_group(&d, r, &a).unwrap();
        prop_assert!(rel(ga.operator_norm(), a.operator_norm()) <= 1e-9);

        let combined = one_parameter_group(&d, r + s, &a).unwrap();
        let nested = one_parameter_group(&d, r, &one_parameter_group(&d, s, &a).unwrap()).unwrap();
        prop_assert!(combined.distance(&nested).unwrap() / f64::max(1.0, a.operator_norm()) <= 1e-10);
    }

    #[test]
    fn derivation_norm_is_bounded(seed in any::<u64>(), n in 1usize..=6) {
        let h = hermitian(seed, n);
        let bound = 2.0 * h.operator_norm();
        let d = InnerDerivation::new(h);
        prop_assert!(derivation_superoperator(&d).operator_norm() <= bound + 1e-9);
    }

    #[test]
    fn transport_stays_unitary_and_composes(seed in any::<u64>(), n in 1usize..=4, split in 1usize..20) {
        let p0 = hermitian(seed, n);
        let p1 = hermitian(seed.wrapping_add(1), n);
        let path = HamiltonianPath::new(
            PathKind::PauliSum(vec![
                (Polynomial::new(vec![1.0, -0.5]).unwrap(), p0),
                (Polynomial::new(vec![0.0, 0.0, 1.0]).unwrap(), p1),
            ]),
            Sign::Plus,
        ).unwrap();
        let dt = 0.05;
        let t_split = split as f64 * dt;
        for m in Method::ALL {
            let direct = transport(&path, 0.0, 1.0, 20, m).unwrap();
            prop_assert!(direct.unitarity_defects().iter().all(|&d| d <= 1e-10));
            let composed = transport(&path, 0.0, t_split, split, m).unwrap()
                .then(&transport(&path, t_split, 1.0, 20 - split, m).unwrap()).unwrap();
            for (a, b) in composed.unitaries().iter().zip(direct.unitaries()) {
                prop_assert!(a.matrix().distance(b.matrix()).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn mean_value_duality_and_isometry(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = rng_from_seed(seed);
        let path = HamiltonianPath::new(
            PathKind::PauliSum(vec![
                (Polynomial::constant(1.0), random_hermitian(n, &mut rng)),
                (Polynomial::new(vec![0.0, 1.0]).unwrap(), random_hermitian(n, &mut rng)),
            ]),
            Sign::Minus,
        ).unwrap();
        let y = random_state(n, &mut rng);
        let a = random_matrix(n, &mut rng);
        let g = transport(&path, 0.0, 1.0, 32, Method::Magnus4).unwrap();
        let psi = evolve_state(&g, &y).unwrap();
        let alpha = heisenberg_transport(&g, &a).unwrap();
        for (k, p) in psi.values().iter().enumerate() {
            let forward = p.inner_product(&transportq::StateVector::apply(&a, p).unwrap()).unwrap();
            let pulled = y.inner_product(&transportq::StateVector::apply(&g.pullback(k, &a).unwrap(), &y).unwrap()).unwrap();
            prop_assert!((forward - pulled).norm() <= 1e-10 * f64::max(1.0, a.operator_norm() * y.norm() * y.norm()));
            prop_assert!(rel(p.norm(), y.norm()) <= 1e-9);
            prop_assert!(rel(alpha.values()[k].operator_norm(), a.operator_norm()) <= 1e-9);
        }
    }
}

#[test]
fn norm_bound_is_attained_for_sigma_z() {
    let d = InnerDerivation::new(pauli::hermitian(pauli::sigma_z()));
    assert!((derivation_superoperator(&d).operator_norm() - 2.0).abs() <= 1e-9);
}

#[test]
fn generator_is_the_derivative_of_the_group() {
    // (g_h(a) - a)/h - δ(a) = O(h)
    let d = InnerDerivation::new(hermitian(5, 3));
    let a = matrix(6, 3);
    let delta_a = d.apply(&a).unwrap();
    let hs = [1e-2, 1e-3, 1e-4];
    let errs: Vec<f64> = hs
        .iter()
        .map(|&h| {
            let diff = (&one_parameter_group(&d, h, &a).unwrap() - &a).scale_real(1.0 / h);
            diff.distance(&delta_a).unwrap()
        })
        .collect();
    let slope = ((errs[0] / errs[2]).ln()) / ((hs[0] / hs[2]).ln());
    assert!((slope - 1.0).abs() < 0.1, "slope {slope}, errors {errs:?}");
}

#[test]
fn heisenberg_matches_integrated_superoperator_on_commuting_families() {
    // magnus4 is exact for cubic coefficients (two-point Gauss), midpoint for linear ones
    let cases = [
        (vec![0.3, -1.0, 2.0, 0.5], Method::Magnus4),
        (vec![1.0, 2.0], Method::Midpoint),
    ];
    for (coeffs, method) in cases {
        for seed in 0..5u64 {
            let n = 2 + (seed as usize % 3);
            let path = HamiltonianPath::new(
                PathKind::Commuting {
                    coefficient: Polynomial::new(coeffs.clone()).unwrap(),
                    generator: hermitian(seed, n),
                },
                Sign::Plus,
            )
            .unwrap();
            let a = matrix(seed + 100, n);
            let g = transport(&path, 0.0, 1.5, 30, method).unwrap();
            let alpha = heisenberg_transport(&g, &a).unwrap();
            for (&t, v) in g.grid().iter().zip(alpha.values()) {
                let exact = commuting_superoperator_evolution(&path, 0.0, t, &a).unwrap().unwrap();
                assert!(v.distance(&exact).unwrap() <= 1e-8, "{method} t={t}");
            }
        }
    }
    // pairwise-commuting Pauli sums are recognised as commuting
    let diag = HamiltonianPath::new(
        PathKind::PauliSum(vec![
            (Polynomial::new(vec![0.0, 1.0]).unwrap(), pauli::hermitian(pauli::sigma_z())),
            (Polynomial::constant(2.0), HermitianMatrix::identity(2)),
        ]),
        Sign::Plus,
    )
    .unwrap();
    assert!(diag.is_commuting());
    let a = pauli::sigma_x();
    let g = transport(&diag, 0.0, 1.0, 10, Method::Midpoint).unwrap();
    let exact = commuting_superoperator_evolution(&diag, 0.0, 1.0, &a).unwrap().unwrap();
    assert!(g.last().conjugate(&a).unwrap().distance(&exact).unwrap() <= 1e-8);
}
