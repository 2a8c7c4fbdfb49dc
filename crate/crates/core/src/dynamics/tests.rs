use super::*;
use crate::factorize::{construct_product_tps, negativity};
use crate::hilbert::{max_abs_diff, unitary_exponential, CVec};
use crate::pauli::{Pauli, PauliString};
use crate::random::{random_density, random_hermitian, random_state, random_unitary, rng};
use crate::scalar::c;
use proptest::prelude::*;
use std::f64::consts::PI;

fn cut(d: usize, dd: usize) -> Bipartition {
    Bipartition::new(d, dd).unwrap()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn phases(p: [f64; 4]) -> GieParams<f64> {
    GieParams::Phases { phases: p }
}

#[test]
fn evolution_at_zero_and_commuting() {
    let mut r = rng(1);
    let h = random_hermitian::<f64>(4, &mut r);
    let rho0 = DensityMatrix::new(random_density::<f64>(4, &mut r)).unwrap();
    let spec = EvolutionSpec::new(h.clone(), QuantumState::Mixed(rho0.clone()), vec![0.0], SignConvention::Positive).unwrap();
    assert!(max_abs_diff(evolve(&spec, 0.0).unwrap().density().matrix(), rho0.matrix()) < 1e-12);

    // an eigenvector of H only acquires a phase
    let eig = eig_hermitian(&h).unwrap();
    let v = StateVector::new(eig.vectors.column(2).into_owned()).unwrap();
    let spec = EvolutionSpec::new(h, QuantumState::Pure(v.clone()), vec![], SignConvention::Positive).unwrap();
    for tau in [0.3, 1.7, -4.0] {
        assert!(max_abs_diff(evolve(&spec, tau).unwrap().density().matrix(), v.density().matrix()) < 1e-12);
    }
}

#[test]
fn default_sign_convention_uses_positive_exponent() {
    let z = Pauli::Z.matrix::<f64>();
    let plus = StateVector::normalized(CVec::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
    let tau = 0.4;
    let s = 0.5f64.sqrt();
    let expect = CVec::from_vec(vec![crate::scalar::cis(tau).scale(s), crate::scalar::cis(-tau).scale(s)]);
    let spec = EvolutionSpec::new(z.clone(), QuantumState::Pure(plus.clone()), vec![], SignConvention::Positive).unwrap();
    let got = evolve(&spec, tau).unwrap();
    assert!((got.as_pure().unwrap().amplitudes() - &expect).camax() < 1e-14);

    let flipped = EvolutionSpec::new(z, QuantumState::Pure(plus), vec![], SignConvention::Schrodinger).unwrap();
    let back = evolve(&flipped, -tau).unwrap();
    assert!((back.as_pure().unwrap().amplitudes() - &expect).camax() < 1e-14);
}

#[test]
fn evolution_preserves_spectrum_trace_and_purity() {
    let mut r = rng(2);
    for _ in 0..3 {
        let h = random_hermitian::<f64>(8, &mut r);
        let rho0 = DensityMatrix::new(random_density::<f64>(8, &mut r)).unwrap();
        let spec = EvolutionSpec::new(h, QuantumState::Mixed(rho0.clone()), vec![], SignConvention::Positive).unwrap();
        let ev0 = sorted(rho0.eigenvalues());
        for tau in [0.1, 1.0, 5.0, -2.5] {
            let rho = evolve(&spec, tau).unwrap().density();
            assert!((rho.trace() - 1.0).abs() < 1e-9);
            assert!((rho.purity() - rho0.purity()).abs() < 1e-9);
            for (a, b) in sorted(rho.eigenvalues()).iter().zip(&ev0) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn rejects_bad_specs() {
    let h = CMat::<f64>::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 0.0));
    let psi = QuantumState::Pure(StateVector::<f64>::basis(2, 0).unwrap());
    assert!(matches!(EvolutionSpec::new(h, psi.clone(), vec![], SignConvention::Positive), Err(Error::NotHermitian { .. })));
    let z = Pauli::Z.matrix::<f64>();
    assert!(EvolutionSpec::new(z.clone(), psi.clone(), vec![1.0, 0.0], SignConvention::Positive).is_err());
    let big = QuantumState::Pure(StateVector::<f64>::basis(4, 0).unwrap());
    assert!(EvolutionSpec::new(z, big, vec![], SignConvention::Positive).is_err());
}

#[test]
fn global_invariant_values() {
    let mut r = rng(3);
    let rho = random_density::<f64>(4, &mut r);
    assert!((global_invariant(&rho, &CMat::identity(4, 4)).unwrap() - 1.0).abs() < 1e-12);
    let zero = StateVector::<f64>::basis(2, 0).unwrap().density().into_matrix();
    assert_eq!(global_invariant(&zero, &Pauli::Z.matrix()).unwrap(), 1.0);
    for _ in 0..10 {
        let rho = random_density::<f64>(6, &mut r);
        let o = random_hermitian::<f64>(6, &mut r);
        let oracle = (&rho * &o).trace().re;
        assert!((global_invariant(&rho, &o).unwrap() - oracle).abs() < 1e-10);
    }
    assert!(global_invariant(&rho, &Pauli::Z.matrix()).is_err());
}

#[test]
fn convex_decomposition_cases() {
    let z = Pauli::Z.matrix::<f64>();
    let prod = StateVector::product(&[StateVector::basis(2, 1).unwrap(), random_state::<f64>(4, &mut rng(4))]).unwrap();
    let dec = convex_decomposition(&prod, &z, cut(2, 4)).unwrap();
    assert_eq!(dec.terms.len(), 1);
    assert!((dec.terms[0].0 - 1.0).abs() < 1e-12 && (dec.value + 1.0).abs() < 1e-12);

    let dec = convex_decomposition(&StateVector::<f64>::bell(), &z, cut(2, 2)).unwrap();
    assert!(dec.value.abs() < 1e-12);
    let mut vals: Vec<f64> = dec.terms.iter().map(|t| t.1).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
    assert!(dec.terms.iter().all(|t| (t.0 - 0.5).abs() < 1e-12));
    assert!(convex_decomposition(&StateVector::<f64>::bell(), &CMat::identity(4, 4), cut(2, 2)).is_err());
}

#[test]
fn convex_identity_random() {
    let mut r = rng(5);
    for (d, dd) in [(2, 8), (4, 4)] {
        for _ in 0..100 {
            let psi = random_state::<f64>(d * dd, &mut r);
            let o = random_hermitian::<f64>(d, &mut r);
            let dec = convex_decomposition(&psi, &o, cut(d, dd)).unwrap();
            assert!((dec.convex_sum() - dec.value).abs() < 1e-9);
        }
    }
}

#[test]
fn measurement_on_product_state() {
    let z = Pauli::Z.matrix::<f64>();
    let psi = StateVector::product(&[StateVector::basis(2, 1).unwrap(), random_state::<f64>(2, &mut rng(6))]).unwrap();
    let id = Tps::identity(vec![2, 2]).unwrap();
    let rec = single_outcome_measure(&psi, &id, &z, cut(2, 2), SelectionPolicy::MaxOverlap).unwrap();
    assert_eq!(rec.index, 0);
    assert_eq!(rec.value, -1.0);
    assert!(rec.residual < 1e-10);
}

#[test]
fn measurement_pipeline_on_bell_state() {
    let bell = StateVector::<f64>::bell();
    let z = Pauli::Z.matrix::<f64>();
    let t = construct_product_tps(&bell, cut(2, 2)).unwrap();
    let rec = single_outcome_measure(&bell, &t, &z, cut(2, 2), SelectionPolicy::MaxOverlap).unwrap();
    assert!(rec.residual < 1e-9);
    assert!(rec.value == 1.0 || rec.value == -1.0);
    assert!(entanglement_entropy(&rec.final_state, cut(2, 2)).unwrap() < 1e-10);

    let refused = single_outcome_measure(&bell, &Tps::identity(vec![2, 2]).unwrap(), &z, cut(2, 2), SelectionPolicy::MaxOverlap);
    match refused {
        Err(Error::NotFactorized { entropy }) => assert!((entropy - 2f64.ln()).abs() < 1e-12),
        other => panic!("expected refusal, got {other:?}"),
    }
}

#[test]
fn trajectory_for_commuting_product() {
    let z = PauliString::single(2, 0, Pauli::Z).matrix::<f64>();
    let psi = QuantumState::Pure(StateVector::<f64>::basis(4, 1).unwrap());
    let spec = EvolutionSpec::new(z, psi, vec![0.0, 0.5, 1.0, 2.0], SignConvention::Positive).unwrap();
    let traj = tps_entropy_trajectory(&spec, cut(2, 2), &SearchOptions::default()).unwrap();
    assert_eq!(traj.len(), 4);
    for p in &traj {
        assert!(p.entropy_before < 1e-12 && p.entropy_after < 1e-12);
        assert_eq!(p.iterations, 0);
        assert!(p.converged);
    }
}

fn xx_spec(grid: Vec<f64>) -> EvolutionSpec<f64> {
    let xx = PauliString::from_sites(2, &[(0, Pauli::X), (1, Pauli::X)]).matrix::<f64>();
    let psi = QuantumState::Pure(StateVector::<f64>::basis(4, 0).unwrap());
    EvolutionSpec::new(xx, psi, grid, SignConvention::Positive).unwrap()
}

#[test]
fn trajectory_under_xx_coupling() {
    let grid: Vec<f64> = (0..=12).map(|k| k as f64 * 0.125).collect();
    let traj = tps_entropy_trajectory(&xx_spec(grid.clone()), cut(2, 2), &SearchOptions::default()).unwrap();
    for (p, &tau) in traj.iter().zip(&grid) {
        // e^{iτXX}|00⟩ = cos τ |00⟩ + i sin τ |11⟩
        let (c2, s2) = (tau.cos().powi(2), tau.sin().powi(2));
        let oracle: f64 = [c2, s2].iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum();
        assert!((p.entropy_before - oracle).abs() < 1e-10, "tau {tau}");
        assert!(p.entropy_after < 1e-6 && p.converged, "tau {tau}: {}", p.entropy_after);
    }
}

#[test]
fn warm_start_steps_shrink_with_refinement() {
    let coarse: Vec<f64> = (0..=4).map(|k| k as f64 * 0.2).collect();
    let fine: Vec<f64> = (0..=16).map(|k| k as f64 * 0.05).collect();
    let opts = SearchOptions::default();
    let max_step = |g: Vec<f64>| {
        let traj = tps_entropy_trajectory(&xx_spec(g), cut(2, 2), &opts).unwrap();
        traj.iter().skip(1).map(|p| p.generator_step).fold(0.0, f64::max)
    };
    let (a, b) = (max_step(coarse), max_step(fine));
    assert!(b < a, "coarse {a}, fine {b}");
}

#[test]
fn trajectory_requires_pure_state() {
    let rho = DensityMatrix::new(CMat::<f64>::identity(4, 4).scale(0.25)).unwrap();
    let spec = EvolutionSpec::new(CMat::identity(4, 4), QuantumState::Mixed(rho), vec![0.0], SignConvention::Positive).unwrap();
    assert!(tps_entropy_trajectory(&spec, cut(2, 2), &SearchOptions::default()).is_err());
    assert!(tps_entropy_trajectory(&xx_spec(vec![]), cut(2, 2), &SearchOptions::default()).is_err());
}

/// Negativity of a two-qubit pure state through an explicitly written partial transpose.
fn pt_negativity_oracle(a: &CVec<f64>) -> f64 {
    let rho = a * a.adjoint();
    // (ρ^{T_B})[(i,j),(k,l)] = ρ[(i,l),(k,j)]
    let pt = CMat::from_fn(4, 4, |r, col| {
        let (i, j, k, l) = (r / 2, r % 2, col / 2, col % 2);
        rho[(i * 2 + l, k * 2 + j)]
    });
    eig_hermitian(&pt).unwrap().values.iter().filter(|&&x| x < 0.0).map(|x| -x).sum()
}

#[test]
fn gie_bipartite_cases() {
    let eq = gie_bipartite_state(&phases([0.7; 4])).unwrap();
    assert!(eq.negativity < 1e-12);

    let g = gie_bipartite_state(&phases([PI / 2.0, 0.0, 0.0, 0.0])).unwrap();
    let oracle = pt_negativity_oracle(g.state.amplitudes());
    assert!(g.negativity > 0.1);
    assert!((g.negativity - oracle).abs() < 1e-12);
    // pure two-qubit closed form ½|sin(Δ/2)|
    assert!((g.negativity - 0.5 * (PI / 4.0).sin()).abs() < 1e-12);

    let a = g.state.amplitudes();
    let det = a[0] * a[3] - a[1] * a[2];
    assert!((det.norm() - g.negativity).abs() < 1e-12);
}

#[test]
fn gie_physical_parameters() {
    let p = GieParams::Physical { m1: 1e-14, m2: 1e-14, tf: 2.5, separations: [2.5e-4, 4.5e-4, 0.5e-4, 2.5e-4] };
    let ph = p.phases().unwrap();
    let expect = G_NEWTON * 1e-28 * 2.5 / (HBAR * 2.5e-4);
    assert!((ph[0] - expect).abs() < 1e-12 * expect);
    assert_eq!(ph[0], ph[3]);
    assert!(gie_bipartite_state(&p).unwrap().negativity > 0.0);
    let bad = GieParams::Physical { m1: 1.0, m2: 1.0, tf: 1.0, separations: [1.0, 0.0, 1.0, 1.0] };
    assert!(matches!(bad.phases(), Err(Error::InvalidParameter(_))));
}

#[test]
fn phase_defect_wraps() {
    assert!(phase_defect(&[2.0 * PI, 0.0, 0.0, 0.0]) < 1e-15);
    assert!((phase_defect(&[0.0f64, 0.0, 0.0, -0.5]) - 0.5).abs() < 1e-15);
    assert!((phase_defect(&[PI, 0.0, 0.0, 0.0]) - PI).abs() < 1e-15);
}

#[test]
fn mediator_gram_matrix() {
    for s in [0.0, 0.3, 1.0] {
        let g = mediator_states::<f64>(s).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { s };
                assert!((g.column(i).dotc(&g.column(j)) - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }
    assert!(mediator_states::<f64>(1.2).is_err());
    assert!("quantumish".parse::<Mediator>().is_err());
    assert_eq!("classical".parse::<Mediator>().unwrap(), Mediator::Classical);
}

#[test]
fn tripartite_cases() {
    let p = phases([PI / 2.0, 0.0, 0.3, 0.0]);
    let bi = gie_bipartite_state(&p).unwrap();
    let q0 = gie_tripartite_state(&p, Mediator::Quantum, 0.0).unwrap();
    assert!(q0.mass_negativity < 1e-12);
    let q1 = gie_tripartite_state(&p, Mediator::Quantum, 1.0).unwrap();
    assert!((q1.mass_negativity - bi.negativity).abs() < 1e-9);
    assert!(max_abs_diff(&q1.masses, bi.state.density().matrix()) < 1e-12);
    let cl = gie_tripartite_state(&p, Mediator::Classical, 1.0).unwrap();
    assert!(cl.mass_negativity < 1e-10 && cl.pure.is_none());
    // intermediate overlap interpolates
    let qh = gie_tripartite_state(&p, Mediator::Quantum, 0.5).unwrap();
    assert!(qh.mass_negativity > 0.0 && qh.mass_negativity < bi.negativity);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn invariants_survive_joint_unitary(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_density::<f64>(4, &mut r);
        let o = random_hermitian::<f64>(4, &mut r);
        let t = random_unitary::<f64>(4, &mut r);
        let a = global_invariant(&rho, &o).unwrap();
        let b = global_invariant(&(&t * &rho * t.adjoint()), &(&t * &o * t.adjoint())).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn propagator_group_law(seed in any::<u64>(), t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
        let h = random_hermitian::<f64>(4, &mut rng(seed));
        let spec = EvolutionSpec::new(h.clone(), QuantumState::Pure(StateVector::basis(4, 0).unwrap()), vec![], SignConvention::Positive).unwrap();
        let lhs = spec.propagator(t1 + t2);
        prop_assert!(max_abs_diff(&lhs, &(spec.propagator(t1) * spec.propagator(t2))) < 1e-9);
        prop_assert!(max_abs_diff(&lhs, &unitary_exponential(&h, t1 + t2).unwrap()) < 1e-9);
    }

    #[test]
    fn measured_value_is_an_eigenvalue(seed in any::<u64>(), born in any::<bool>()) {
        let mut r = rng(seed);
        let psi = random_state::<f64>(16, &mut r);
        let o = random_hermitian::<f64>(2, &mut r);
        let t = construct_product_tps(&psi, cut(2, 8)).unwrap();
        let policy = if born { SelectionPolicy::BornRandom { seed } } else { SelectionPolicy::MaxOverlap };
        let rec = single_outcome_measure(&psi, &t, &o, cut(2, 8), policy).unwrap();
        prop_assert!(rec.residual < 1e-9);
        let spectrum = eig_hermitian(&o).unwrap().values;
        prop_assert!(spectrum.iter().any(|&l| (l - rec.value).abs() < 1e-9));
    }

    #[test]
    fn gie_negativity_shift_invariant(p in prop::array::uniform4(-PI..PI), shift in -10.0f64..10.0) {
        let a = gie_bipartite_state(&phases(p)).unwrap().negativity;
        let b = gie_bipartite_state(&phases(p.map(|x| x + shift))).unwrap().negativity;
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn classical_mediator_never_entangles(p in prop::array::uniform4(-PI..PI), s in 0.0f64..=1.0) {
        let cl = gie_tripartite_state(&phases(p), Mediator::Classical, s).unwrap();
        prop_assert!(cl.mass_negativity < 1e-10);
        prop_assert!(negativity(&cl.masses, cut(2, 2)).unwrap() < 1e-10);
    }
}
