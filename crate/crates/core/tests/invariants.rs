use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

use fluxion::clifford::{CliffordCircuit, Gate};
use fluxion::dense::{
    clifford_unitary, flux_tomography, maximize_isotropic_flux, observable_matrix,
    optimal_cloning_time, pauli_matrix, SpinHamiltonian,
};
use fluxion::open::{
    evolve_density, evolve_observable, open_flux_tomography, DensityMatrix, LindbladSpec,
};
use fluxion::state::product_state;
use fluxion::transfer::{flux_components, transfer_amplitude, CouplingProfile};
use fluxion::{BlochVector, Pauli, PauliObservable, PauliString, Phase, RegisterState, TimeLabel};

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    let mask = (1u64 << n) - 1;
    (any::<u64>(), any::<u64>(), 0i64..4).prop_map(move |(x, z, k)| {
        PauliString::from_masks(n, x & mask, z & mask, Phase::from_exponent(k)).unwrap()
    })
}

fn gate(n: usize) -> impl Strategy<Value = Gate> {
    (0..n, 1..n.max(2), 0..6u8).prop_map(move |(q, shift, kind)| match kind {
        0 if n > 1 => Gate::Cnot {
            control: q,
            target: (q + shift) % n,
        },
        0 | 1 => Gate::H(q),
        2 => Gate::S(q),
        3 => Gate::X(q),
        4 => Gate::Y(q),
        _ => Gate::Z(q),
    })
}

fn circuit(n: usize) -> impl Strategy<Value = CliffordCircuit> {
    prop::collection::vec(gate(n), 0..16)
        .prop_map(move |g| CliffordCircuit::from_gates(n, g).unwrap())
}

fn state(n: usize) -> impl Strategy<Value = RegisterState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1usize << n)
        .prop_filter("nonzero", |v| {
            v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
        })
        .prop_map(|v| {
            RegisterState::normalized(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
                .unwrap()
        })
}

fn qubit() -> impl Strategy<Value = [Complex64; 2]> {
    (0.0f64..std::f64::consts::PI, 0.0f64..std::f64::consts::TAU).prop_map(|(theta, phi)| {
        [
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        ]
    })
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn dense_expectation(m: &DMatrix<Complex64>, s: &RegisterState) -> Complex64 {
    let v = DVector::from_column_slice(s.amplitudes());
    (v.adjoint() * m * &v)[(0, 0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_is_a_homomorphism(
        (c, p, q) in (2usize..6).prop_flat_map(|n| (circuit(n), pauli_string(n), pauli_string(n)))
    ) {
        let lhs = c.conjugate_string(&p.multiply(&q).unwrap()).unwrap();
        let rhs = c.conjugate_string(&p).unwrap().multiply(&c.conjugate_string(&q).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugation_matches_dense_unitary(
        (c, p) in (1usize..5).prop_flat_map(|n| (circuit(n), pauli_string(n)))
    ) {
        let u = clifford_unitary(&c).unwrap();
        let want = u.adjoint() * pauli_matrix(&p) * &u;
        let got = pauli_matrix(&c.conjugate_string(&p).unwrap());
        prop_assert!(max_diff(&want, &got) < 1e-12);
    }

    #[test]
    fn string_expectation_matches_dense(
        (p, s) in (1usize..6).prop_flat_map(|n| (pauli_string(n), state(n)))
    ) {
        let got = p.expectation(&s).unwrap();
        let want = dense_expectation(&pauli_matrix(&p), &s);
        prop_assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn bloch_vector_matches_single_qubit_expectations(
        (s, q) in (1usize..6).prop_flat_map(|n| (state(n), 0..n))
    ) {
        let n = s.n_qubits();
        let b = s.bloch_of_qubit(q).unwrap();
        for (letter, v) in [(Pauli::X, b.x), (Pauli::Y, b.y), (Pauli::Z, b.z)] {
            let e = PauliString::single(n, q, letter).unwrap().expectation(&s).unwrap();
            prop_assert!((e.re - v).abs() < 1e-12 && e.im.abs() < 1e-12);
        }
        prop_assert!(b.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn flux_matrix_predicts_target_bloch_vector(
        (n, reg, input, t) in (2usize..5).prop_flat_map(|n| (Just(n), state(n - 1), qubit(), 0.0f64..5.0)),
        lambda in 0.0f64..3.0,
    ) {
        let h = SpinHamiltonian::heisenberg_chain(n, 1.0, lambda).unwrap();
        let m = flux_tomography(&h, t, 0, &reg, n - 1).unwrap();
        let out = fluxion::dense::SpectralPropagator::new(&h)
            .unwrap()
            .evolve(&product_state(input, &reg).unwrap(), t)
            .unwrap();
        let got = out.bloch_of_qubit(n - 1).unwrap();
        let want = m.apply(&BlochVector::from_amplitudes(input));
        prop_assert!((got.x - want.x).abs() < 1e-10);
        prop_assert!((got.y - want.y).abs() < 1e-10);
        prop_assert!((got.z - want.z).abs() < 1e-10);
    }

    #[test]
    fn chain_amplitude_is_bounded_and_flux_consistent(
        couplings in prop::collection::vec(-2.0f64..2.0, 1..40),
        t in 0.0f64..50.0,
    ) {
        let n = couplings.len() + 1;
        let profile = CouplingProfile::from_couplings(couplings).unwrap();
        let f = transfer_amplitude(&profile, t).unwrap();
        prop_assert!(f.norm() <= 1.0 + 1e-12);
        let m = flux_components(f, n - 1, TimeLabel::Time(t)).unwrap();
        let xx = m.get(Pauli::X, Pauli::X);
        let yx = m.get(Pauli::Y, Pauli::X);
        prop_assert!((m.get(Pauli::Z, Pauli::Z) - (xx * xx + yx * yx)).abs() < 1e-12);
        prop_assert!(m.entries_bounded(1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn adjoint_evolution_agrees_with_state_evolution(
        s in state(2),
        o in pauli_string(2),
        gamma in 0.0f64..1.5,
        deph in 0.0f64..0.5,
        nbar in 0.0f64..1.0,
        t in 0.0f64..3.0,
    ) {
        let obs = PauliObservable::from_string(o.with_phase(Phase::ONE));
        let h = SpinHamiltonian::heisenberg_chain(2, 0.8, 1.3).unwrap();
        let spec = LindbladSpec::new(gamma, deph).with_hamiltonian(h).with_nbar(nbar);
        let rho0 = DensityMatrix::from_pure(&s).unwrap();
        let schrodinger = evolve_density(&rho0, &spec, t).unwrap().expectation(&obs).unwrap();
        let heisenberg = (evolve_observable(&obs, &spec, t).unwrap() * rho0.matrix()).trace();
        prop_assert!((schrodinger - heisenberg.re).abs() < 1e-7);
        prop_assert!(heisenberg.im.abs() < 1e-7);
    }

    #[test]
    fn dephasing_never_increases_purity(s in state(2), deph in 0.01f64..2.0) {
        let spec = LindbladSpec::new(0.0, deph);
        let mut rho = DensityMatrix::from_pure(&s).unwrap();
        let mut last = rho.purity();
        for _ in 0..6 {
            rho = evolve_density(&rho, &spec, 0.3).unwrap();
            let p = rho.purity();
            prop_assert!(p <= last + 1e-10);
            prop_assert!(rho.min_eigenvalue() > -1e-9);
            last = p;
        }
    }

    #[test]
    fn damped_xy_pair_follows_closed_form(j in 0.2f64..3.0, gamma in 0.0f64..2.0, t in 0.0f64..4.0) {
        let profile = CouplingProfile::from_couplings(vec![j]).unwrap();
        let spec = LindbladSpec::new(gamma, 0.0).with_hamiltonian(SpinHamiltonian::xy_chain(&profile).unwrap());
        let m = open_flux_tomography(&spec, t, 0, &RegisterState::ground(1).unwrap(), 1).unwrap();
        let s = (j * t).sin();
        prop_assert!((m.get(Pauli::X, Pauli::Y) - s * (-gamma * t / 2.0).exp()).abs() < 1e-7);
        prop_assert!((m.get(Pauli::Z, Pauli::Z) - s * s * (-gamma * t).exp()).abs() < 1e-7);
        prop_assert!(m.get(Pauli::X, Pauli::X).abs() < 1e-7);
    }
}

#[test]
fn isotropic_register_optimum_is_psi_plus() {
    let opt = maximize_isotropic_flux(1.0, 2.0, optimal_cloning_time(1.0)).unwrap();
    let overlap = opt.state.inner(&RegisterState::psi_plus()).unwrap().norm();
    assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-6);
    assert_abs_diff_eq!(opt.score, 2.0 / 3.0, epsilon = 1e-9);
}

#[test]
fn observable_matrix_is_linear() {
    let a = PauliString::from_letters(&[Pauli::X, Pauli::Y]);
    let b = PauliString::from_letters(&[Pauli::Z, Pauli::I]);
    let obs = PauliObservable::from_terms(
        2,
        [
            (Complex64::new(0.5, 0.0), a),
            (Complex64::new(-2.0, 0.0), b),
        ],
    )
    .unwrap();
    let want =
        pauli_matrix(&a) * Complex64::new(0.5, 0.0) - pauli_matrix(&b) * Complex64::new(2.0, 0.0);
    assert!(max_diff(&observable_matrix(&obs), &want) < 1e-15);
}
