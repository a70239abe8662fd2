use num_complex::Complex64;
use proptest::prelude::*;
use qnet_core::algorithms::number::{gcd, modpow};
use qnet_core::algorithms::qft::{qft_matrix, qft_network};
use qnet_core::algorithms::shor::{shor_run, ShorMeasurement};
use qnet_core::compiler::{exchange_form, gate_diagonal};
use qnet_core::elements::{exchange_gate, materialize_element, Element};
use qnet_core::linalg::{expm_oracle, kron, random_amplitude, random_operator, random_state};
use qnet_core::network::{
    closed_form, compose_product, compose_sum, materialize_network, materialize_tilde, q_of,
};
use qnet_core::schrodinger::{evolve_network, hamiltonian, kinetic_op, momentum_op, EvolutionSpec, Grid, Potential};
use qnet_core::verify::branch_output;
use qnet_core::{Check, Operator, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn raising(r: &mut ChaCha8Rng, d: usize) -> Element {
    let m = r.random_range(0..d);
    let n = r.random_range(0..d);
    let amp = random_amplitude(r);
    if m == n {
        Element::Rotator { m, amp }
    } else {
        Element::Transitor { m, n, amp }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn apply_is_associative(seed: u64, d in 1usize..=64) {
        let mut r = rng(seed);
        let a = random_operator(&mut r, d, d);
        let b = random_operator(&mut r, d, d);
        let v = random_state(&mut r, d);
        let lhs = a.apply(&b.apply(&v).unwrap()).unwrap();
        let rhs = a.matmul(&b).unwrap().apply(&v).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn kron_mixed_product(seed: u64, p in 1usize..=4, q in 1usize..=4) {
        let mut r = rng(seed);
        let (a, c) = (random_operator(&mut r, p, p), random_operator(&mut r, p, p));
        let (b, d) = (random_operator(&mut r, q, q), random_operator(&mut r, q, q));
        let lhs = kron(&a, &b).unwrap().matmul(&kron(&c, &d).unwrap()).unwrap();
        let rhs = kron(&a.matmul(&c).unwrap(), &b.matmul(&d).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
    }

    #[test]
    fn expm_inverse(seed: u64, d in 1usize..=8, size in 0.0f64..5.0) {
        let mut r = rng(seed);
        let a = random_operator(&mut r, d, d);
        let a = a.scale(Complex64::new(size / a.norm_one().max(1e-300), 0.0));
        let prod = expm_oracle(&a).unwrap().matmul(&expm_oracle(&a.scale(Complex64::new(-1.0, 0.0))).unwrap()).unwrap();
        prop_assert!(prod.max_abs_diff(&Operator::identity(d)).unwrap() <= 1e-10);
    }

    #[test]
    fn raising_elements_commute(seed: u64, d in 1usize..=16) {
        let mut r = rng(seed);
        let a = materialize_element(&raising(&mut r, d), d).unwrap();
        let b = materialize_element(&raising(&mut r, d), d).unwrap();
        prop_assert!(a.matmul(&b).unwrap().max_abs_diff(&b.matmul(&a).unwrap()).unwrap() <= 1e-14);
    }

    #[test]
    fn exchange_gate_transits(d in 2usize..=64, m in 0usize..64, n in 0usize..64) {
        let (m, n) = (m % d, n % d);
        prop_assume!(m != n);
        let e = exchange_gate(m, n, d).unwrap();
        prop_assert_eq!(e.column(n), Vector::basis(m, d));
        prop_assert_eq!(e.adjoint().column(m), Vector::basis(n, d));
    }

    #[test]
    fn q_of_closed_form(seed: u64, d in 1usize..=24) {
        let u = random_operator(&mut rng(seed), d, d);
        let q = materialize_network(&q_of(&u).unwrap()).unwrap();
        prop_assert!(q.max_abs_diff(&closed_form(&u).unwrap()).unwrap() <= 1e-14);
    }

    #[test]
    fn sum_is_permutation_invariant(seed: u64, d in 1usize..=8, count in 2usize..=5) {
        let mut r = rng(seed);
        let ops: Vec<Operator> = (0..count).map(|_| random_operator(&mut r, d, d)).collect();
        let mut nets: Vec<_> = ops.iter().map(|u| q_of(u).unwrap()).collect();
        let forward = materialize_network(&compose_sum(&nets).unwrap()).unwrap();
        nets.rotate_left(1);
        nets.swap(0, count - 1);
        let shuffled = materialize_network(&compose_sum(&nets).unwrap()).unwrap();
        let total = ops.iter().skip(1).fold(ops[0].clone(), |acc, u| acc.add(u).unwrap());
        prop_assert!(forward.max_abs_diff(&shuffled).unwrap() <= 1e-12);
        prop_assert!(forward.max_abs_diff(&closed_form(&total).unwrap()).unwrap() <= 1e-12);
    }

    #[test]
    fn product_law_non_unitary(seed: u64, d in 1usize..=16, factors in 1usize..=6) {
        let mut r = rng(seed);
        let us: Vec<Operator> = (0..factors).map(|_| random_operator(&mut r, d, d)).collect();
        let prod = compose_product(&us.iter().map(|u| q_of(u).unwrap()).collect::<Vec<_>>()).unwrap();
        let psi = random_state(&mut r, d);
        let expect = us.iter().rev().fold(psi.clone(), |v, u| u.apply(&v).unwrap());
        let got = branch_output(&prod, &psi).unwrap();
        prop_assert!(got.max_abs_diff(&expect).unwrap() <= 1e-11 * expect.norm().max(1.0));
        if d <= 8 {
            let t = materialize_tilde(&prod).unwrap();
            prop_assert!(t.matmul(&t).unwrap().max_abs() <= 1e-12);
        }
    }

    #[test]
    fn exchange_and_natural_forms_agree(seed: u64, k in 1usize..=4) {
        let d = 1 << k;
        let mut r = rng(seed);
        let u = random_operator(&mut r, d, d);
        let f = exchange_form(&u).unwrap();
        prop_assert!(f.reconstruct().unwrap().max_abs_diff(&u).unwrap() <= 1e-12);
        let psi = random_state(&mut r, d);
        let a = branch_output(&f.network, &psi).unwrap();
        let b = branch_output(&q_of(&u).unwrap(), &psi).unwrap();
        prop_assert!(a.max_abs_diff(&b).unwrap() <= 1e-12);
        let diag: Vec<_> = (0..d).map(|_| random_amplitude(&mut r)).collect();
        let g = branch_output(&gate_diagonal(&diag).unwrap(), &psi).unwrap();
        prop_assert!(g.max_abs_diff(&Operator::diagonal(&diag).apply(&psi).unwrap()).unwrap() <= 1e-14);
    }

    #[test]
    fn qft_network_matches_matrix(seed: u64, k in 1usize..=5) {
        let psi = random_state(&mut rng(seed), 1 << k);
        let out = branch_output(&qft_network(k).unwrap(), &psi).unwrap();
        prop_assert!(out.max_abs_diff(&qft_matrix(k).unwrap().apply(&psi).unwrap()).unwrap() <= 1e-11);
    }

    #[test]
    fn check_passes_iff_within_tolerance(err in 0.0f64..1.0, tol in 0.0f64..1.0) {
        prop_assert_eq!(Check::new("c", err, tol).passed, err <= tol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn shor_distribution_invariants(a in 2u64..21, k in 5usize..=6) {
        let n = 21;
        prop_assume!(gcd(a, n) == 1);
        let r = shor_run(n, a, Some(k), ShorMeasurement::FullDistribution).unwrap();
        let total: f64 = r.peak_distribution.iter().map(|p| p.1).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(r.peak_distribution.iter().all(|p| (0.0..=1.0).contains(&p.1)));
        if let Some(period) = r.period_r {
            prop_assert_eq!(modpow(a, period, n), 1);
        }
        if let Some((p, q)) = r.factors {
            prop_assert_eq!(p * q, n);
        }
    }

    #[test]
    fn shor_support_is_multiples_when_period_divides(a in 2u64..15, k in 4usize..=6) {
        prop_assume!(gcd(a, 15) == 1);
        let r = shor_run(15, a, Some(k), ShorMeasurement::FullDistribution).unwrap();
        let period = r.period_r.unwrap();
        let step = (1u64 << k) / period;
        let ys: Vec<u64> = r.peak_distribution.iter().map(|p| p.0).collect();
        prop_assert_eq!(ys, (0..period).map(|j| j * step).collect::<Vec<_>>());
    }

    #[test]
    fn shor_sampling_reports_hold(seed: u64, a in 2u64..15) {
        prop_assume!(gcd(a, 15) == 1);
        let first = shor_run(15, a, Some(5), ShorMeasurement::Sample(seed)).unwrap();
        let again = shor_run(15, a, Some(5), ShorMeasurement::Sample(seed)).unwrap();
        prop_assert_eq!(serde_json::to_string(&first).unwrap(), serde_json::to_string(&again).unwrap());
        if let Some(period) = first.period_r {
            prop_assert_eq!(modpow(a, period, 15), 1);
        }
        if let Some((p, q)) = first.factors {
            prop_assert_eq!(p * q, 15);
        }
    }

    #[test]
    fn grid_operators(log_n in 1u32..=6, length in 0.5f64..20.0, mu in 0.1f64..5.0) {
        let g = Grid::new(1 << log_n, length).unwrap();
        let p = momentum_op(&g);
        let t = kinetic_op(&g, mu).unwrap();
        prop_assert!(p.max_abs_diff(&p.adjoint()).unwrap() <= 1e-14);
        prop_assert!(t.max_abs_diff(&t.adjoint()).unwrap() <= 1e-14 * t.max_abs().max(1.0));
        let p2 = p.matmul(&p).unwrap().scale(Complex64::new(0.5 / mu, 0.0));
        prop_assert!(t.max_abs_diff(&p2).unwrap() <= 1e-12 * p2.max_abs().max(1.0));
    }

    #[test]
    fn evolution_network_is_euler_power(seed: u64, log_n in 2u32..=5, steps in 1usize..=40) {
        let n = 1usize << log_n;
        let g = Grid::new(n, 8.0).unwrap();
        let spec = EvolutionSpec {
            mass_mu: 1.0,
            dt: 1e-3,
            total_t: steps as f64 * 1e-3,
            potential: Potential::Harmonic { omega: 2.0 },
        };
        let psi = random_state(&mut rng(seed), n);
        let h = hamiltonian(&g, &spec).unwrap();
        let step = Operator::identity(n).sub(&h.scale(Complex64::new(0.0, spec.dt))).unwrap();
        let expect = (0..steps).fold(psi.clone(), |v, _| step.apply(&v).unwrap());
        let got = branch_output(&evolve_network(&g, &spec).unwrap().without_spectator(), &psi).unwrap();
        prop_assert!(got.max_abs_diff(&expect).unwrap() <= 1e-10 * expect.norm().max(1.0));
    }
}
