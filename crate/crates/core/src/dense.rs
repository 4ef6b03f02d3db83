//! Exact small-register Hamiltonian evolution and flux tomography.
//!
//! Propagators come from the Hermitian eigendecomposition of the dense
//! Hamiltonian, `U(t) = V e^{−iEt} V†` (ħ = 1, time in units of 1/J).
//! Flux tomography evolves the input qubit prepared in `|0⟩, |1⟩, |+⟩, |+i⟩`
//! next to a fixed register state, reads the target qubit's Bloch vector for
//! each, and solves the four-point affine system for the 3×4 flux matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::clifford::{CliffordCircuit, Gate};
use crate::error::{FluxError, Result};
use crate::flux::{probe_inputs, FluxMatrix, TimeLabel};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::pauli::{check_qubit, reverse_low_bits, Pauli, PauliObservable, PauliString};
use crate::state::{BlochVector, RegisterState};
use crate::transfer::CouplingProfile;

/// Largest register evolved densely.
pub const DENSE_DYNAMICS_CAP: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Real-weighted sum of Hermitian Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinHamiltonian {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl SpinHamiltonian {
    /// Builds a Hamiltonian; strings with phase −1 have the sign folded into
    /// the coupling, and anti-Hermitian strings are rejected.
    pub fn new(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (f64, PauliString)>,
    ) -> Result<Self> {
        let mut out = Vec::new();
        for (c, p) in terms {
            if p.n_qubits() != n_qubits {
                return Err(FluxError::SizeMismatch {
                    expected: n_qubits,
                    found: p.n_qubits(),
                });
            }
            if !p.is_hermitian() {
                return Err(FluxError::InvalidArgument(format!(
                    "term {p} is anti-Hermitian"
                )));
            }
            if !c.is_finite() {
                return Err(FluxError::InvalidArgument("non-finite coupling".into()));
            }
            let sign = if p.phase().exponent() == 2 { -1.0 } else { 1.0 };
            out.push((c * sign, p.unsigned()));
        }
        Ok(Self {
            n_qubits,
            terms: out,
        })
    }

    /// `(J/2) Σ_i (X_i X_{i+1} + Y_i Y_{i+1} + λ Z_i Z_{i+1})` on an open chain.
    pub fn heisenberg_chain(n_qubits: usize, j: f64, anisotropy: f64) -> Result<Self> {
        if n_qubits < 2 {
            return Err(FluxError::InvalidArgument(
                "a chain needs at least two qubits".into(),
            ));
        }
        let mut terms = Vec::with_capacity(3 * (n_qubits - 1));
        for i in 0..n_qubits - 1 {
            for (letter, w) in [(Pauli::X, 1.0), (Pauli::Y, 1.0), (Pauli::Z, anisotropy)] {
                terms.push((0.5 * j * w, pair(n_qubits, i, letter)?));
            }
        }
        Self::new(n_qubits, terms)
    }

    /// `½ Σ_i J_i (X_i X_{i+1} + Y_i Y_{i+1})` for the given coupling profile.
    pub fn xy_chain(profile: &CouplingProfile) -> Result<Self> {
        let n = profile.n_qubits();
        let mut terms = Vec::with_capacity(2 * (n - 1));
        for (i, &j) in profile.couplings().iter().enumerate() {
            for letter in [Pauli::X, Pauli::Y] {
                terms.push((0.5 * j, pair(n, i, letter)?));
            }
        }
        Self::new(n, terms)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// True when every term has an even number of `Y` letters, so the dense
    /// matrix is real symmetric.
    pub fn is_real(&self) -> bool {
        self.terms
            .iter()
            .all(|(_, p)| (p.x_mask() & p.z_mask()).count_ones() % 2 == 0)
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        check_cap(self.n_qubits)?;
        let dim = 1usize << self.n_qubits;
        let mut h = DMatrix::from_element(dim, dim, ZERO);
        for (c, p) in &self.terms {
            add_string(&mut h, p, Complex64::new(*c, 0.0));
        }
        Ok(h)
    }
}

fn pair(n: usize, i: usize, letter: Pauli) -> Result<PauliString> {
    let a = PauliString::single(n, i, letter)?;
    a.multiply(&PauliString::single(n, i + 1, letter)?)
}

fn check_cap(n: usize) -> Result<()> {
    if n > DENSE_DYNAMICS_CAP {
        Err(FluxError::CapExceeded {
            what: "dense dynamics qubit count",
            requested: n,
            cap: DENSE_DYNAMICS_CAP,
        })
    } else {
        Ok(())
    }
}

/// Adds `c · P` to a dense matrix in the crate's basis ordering.
pub(crate) fn add_string(m: &mut DMatrix<Complex64>, p: &PauliString, c: Complex64) {
    let n = p.n_qubits();
    let flip = reverse_low_bits(p.x_mask(), n) as usize;
    let zsign = reverse_low_bits(p.z_mask(), n) as usize;
    let y = crate::pauli::Phase::from_exponent((p.x_mask() & p.z_mask()).count_ones() as i64);
    let base = c * (p.phase() * y).to_complex();
    for b in 0..m.ncols() {
        let v = if (b & zsign).count_ones() % 2 == 1 {
            -base
        } else {
            base
        };
        m[(b ^ flip, b)] += v;
    }
}

/// Dense matrix of a Pauli string.
pub fn pauli_matrix(p: &PauliString) -> DMatrix<Complex64> {
    let dim = 1usize << p.n_qubits();
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    add_string(&mut m, p, Complex64::new(1.0, 0.0));
    m
}

/// Dense matrix of an observable.
pub fn observable_matrix(obs: &PauliObservable) -> DMatrix<Complex64> {
    let dim = 1usize << obs.n_qubits();
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    for (c, p) in obs.terms() {
        add_string(&mut m, &p, c);
    }
    m
}

/// Expands a dense operator over the Pauli basis: `O = Σ_P Tr(P O)/2^N · P`.
pub fn pauli_decompose(m: &DMatrix<Complex64>) -> Result<PauliObservable> {
    let dim = m.nrows();
    if dim != m.ncols() || !dim.is_power_of_two() || dim < 2 {
        return Err(FluxError::InvalidArgument(
            "operator must be 2^N × 2^N".into(),
        ));
    }
    let n = dim.trailing_zeros() as usize;
    check_cap(n)?;
    let mut obs = PauliObservable::zero(n);
    for x in 0..dim as u64 {
        for z in 0..dim as u64 {
            let p = PauliString::from_masks(n, x, z, crate::pauli::Phase::ONE)?;
            let flip = reverse_low_bits(x, n) as usize;
            let zsign = reverse_low_bits(z, n) as usize;
            let y = crate::pauli::Phase::from_exponent((x & z).count_ones() as i64).to_complex();
            // Tr(P O) = Σ_b ⟨b|P O|b⟩ = Σ_b P_{b, b^flip} O_{b^flip, b}
            let mut tr = ZERO;
            for b in 0..dim {
                // P|b'⟩ = y (−1)^{b'·z} |b' ^ flip⟩ with b' = b ^ flip
                let bp = b ^ flip;
                let s = if (bp & zsign).count_ones() % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                tr += y * s * m[(bp, b)];
            }
            obs.add_term(tr / dim as f64, &p);
        }
    }
    Ok(obs)
}

/// Dense unitary of a Clifford circuit (gates applied in listed order).
pub fn clifford_unitary(circuit: &CliffordCircuit) -> Result<DMatrix<Complex64>> {
    let n = circuit.n_qubits();
    check_cap(n)?;
    let dim = 1usize << n;
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    let bit = |q: usize| 1usize << (n - 1 - q);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for g in circuit.gates() {
        let mut gm = DMatrix::from_element(dim, dim, ZERO);
        for b in 0..dim {
            match *g {
                Gate::Cnot { control, target } => {
                    let out = if b & bit(control) != 0 {
                        b ^ bit(target)
                    } else {
                        b
                    };
                    gm[(out, b)] = Complex64::new(1.0, 0.0);
                }
                Gate::H(q) => {
                    let one = b & bit(q) != 0;
                    gm[(b & !bit(q), b)] += Complex64::new(h, 0.0);
                    gm[(b | bit(q), b)] += Complex64::new(if one { -h } else { h }, 0.0);
                }
                Gate::S(q) => {
                    gm[(b, b)] = if b & bit(q) != 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(1.0, 0.0)
                    };
                }
                Gate::X(q) => gm[(b ^ bit(q), b)] = Complex64::new(1.0, 0.0),
                Gate::Y(q) => {
                    // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                    let v = if b & bit(q) != 0 { -1.0 } else { 1.0 };
                    gm[(b ^ bit(q), b)] = Complex64::new(0.0, v);
                }
                Gate::Z(q) => {
                    gm[(b, b)] = Complex64::new(if b & bit(q) != 0 { -1.0 } else { 1.0 }, 0.0);
                }
            }
        }
        u = gm * u;
    }
    Ok(u)
}

/// Spectral form of `exp(−iHt)`, reusable across many times.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    n_qubits: usize,
    energies: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl SpectralPropagator {
    pub fn new(h: &SpinHamiltonian) -> Result<Self> {
        check_cap(h.n_qubits)?;
        let dense = h.to_dense()?;
        let (energies, vectors) = if h.is_real() {
            let real = dense.map(|c| c.re);
            let eig = SymmetricEigen::new(real);
            (
                eig.eigenvalues.iter().cloned().collect(),
                eig.eigenvectors.map(|v| Complex64::new(v, 0.0)),
            )
        } else {
            let eig = SymmetricEigen::new(dense);
            (eig.eigenvalues.iter().cloned().collect(), eig.eigenvectors)
        };
        Ok(Self {
            n_qubits: h.n_qubits,
            energies,
            vectors,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    fn phases(&self, t: f64) -> DVector<Complex64> {
        DVector::from_iterator(
            self.energies.len(),
            self.energies
                .iter()
                .map(|e| Complex64::from_polar(1.0, -e * t)),
        )
    }

    /// `U(t) = V e^{−iEt} V†`.
    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let mut scaled = self.vectors.clone();
        let ph = self.phases(t);
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= ph[j];
        }
        scaled * self.vectors.adjoint()
    }

    /// `U(t)|ψ⟩`.
    pub fn evolve(&self, state: &RegisterState, t: f64) -> Result<RegisterState> {
        if state.n_qubits() != self.n_qubits {
            return Err(FluxError::SizeMismatch {
                expected: self.n_qubits,
                found: state.n_qubits(),
            });
        }
        let psi = DVector::from_column_slice(state.amplitudes());
        let mut coeffs = self.vectors.adjoint() * psi;
        let ph = self.phases(t);
        coeffs.component_mul_assign(&ph);
        let out = &self.vectors * coeffs;
        Ok(RegisterState::from_amplitudes_unchecked(
            out.iter().cloned().collect(),
        ))
    }

    /// Flux matrix of `target_qubit` at time `t`.
    pub fn flux(
        &self,
        t: f64,
        input_qubit: usize,
        register: &RegisterState,
        target_qubit: usize,
    ) -> Result<FluxMatrix> {
        tomography(
            self.n_qubits,
            input_qubit,
            register,
            target_qubit,
            TimeLabel::Time(t),
            |s| self.evolve(s, t),
        )
    }
}

/// Shared four-probe reconstruction: `evolve` maps the full initial state
/// to the final state.
pub(crate) fn tomography<F>(
    n_qubits: usize,
    input_qubit: usize,
    register: &RegisterState,
    target_qubit: usize,
    time: TimeLabel,
    evolve: F,
) -> Result<FluxMatrix>
where
    F: Fn(&RegisterState) -> Result<RegisterState>,
{
    check_qubit(input_qubit, n_qubits)?;
    check_qubit(target_qubit, n_qubits)?;
    if register.n_qubits() + 1 != n_qubits {
        return Err(FluxError::SizeMismatch {
            expected: n_qubits - 1,
            found: register.n_qubits(),
        });
    }
    register.check_normalized()?;
    let mut responses = [BlochVector::default(); 4];
    for (slot, probe) in responses.iter_mut().zip(probe_inputs()) {
        let initial = register.insert_qubit(input_qubit, probe)?;
        *slot = evolve(&initial)?.bloch_of_qubit(target_qubit)?;
    }
    Ok(FluxMatrix::from_probe_responses(
        target_qubit,
        time,
        responses,
    ))
}

/// `exp(−iHt)` as a dense unitary.
pub fn propagator(h: &SpinHamiltonian, t: f64) -> Result<DMatrix<Complex64>> {
    Ok(SpectralPropagator::new(h)?.unitary(t))
}

/// Flux matrix of `target_qubit` after evolving for time `t` under `h`, with
/// the input on `input_qubit` and `register` on the remaining qubits.
pub fn flux_tomography(
    h: &SpinHamiltonian,
    t: f64,
    input_qubit: usize,
    register: &RegisterState,
    target_qubit: usize,
) -> Result<FluxMatrix> {
    SpectralPropagator::new(h)?.flux(t, input_qubit, register, target_qubit)
}

/// Flux tomography through an explicit unitary (e.g. a composed circuit).
pub fn unitary_flux_tomography(
    u: &DMatrix<Complex64>,
    input_qubit: usize,
    register: &RegisterState,
    target_qubit: usize,
    time: TimeLabel,
) -> Result<FluxMatrix> {
    let n = u.nrows().trailing_zeros() as usize;
    tomography(n, input_qubit, register, target_qubit, time, |s| {
        let psi = DVector::from_column_slice(s.amplitudes());
        let out = u * psi;
        Ok(RegisterState::from_amplitudes_unchecked(
            out.iter().cloned().collect(),
        ))
    })
}

/// Three-qubit anisotropic Heisenberg cloner: input on the middle qubit,
/// `|ψ+⟩` on the outer pair, clones read from the outer qubits.
#[derive(Debug, Clone)]
pub struct ChainCloner {
    propagator: SpectralPropagator,
    register: RegisterState,
}

impl ChainCloner {
    pub fn new(j: f64, anisotropy: f64) -> Result<Self> {
        Self::with_register(j, anisotropy, RegisterState::psi_plus())
    }

    pub fn with_register(j: f64, anisotropy: f64, register: RegisterState) -> Result<Self> {
        let h = SpinHamiltonian::heisenberg_chain(3, j, anisotropy)?;
        Ok(Self {
            propagator: SpectralPropagator::new(&h)?,
            register,
        })
    }

    /// Flux toward clone `target` (0 or 2) at time `t`.
    pub fn flux(&self, t: f64, target: usize) -> Result<FluxMatrix> {
        self.propagator.flux(t, 1, &self.register, target)
    }
}

/// `t* = π / (2√3 J)`, where the λ = 2 cloner reaches flux 2/3.
pub fn optimal_cloning_time(j: f64) -> f64 {
    std::f64::consts::PI / (2.0 * 3f64.sqrt() * j)
}

/// Fidelity of the first clone of the λ = 2 chain cloner at time `t` for a
/// pure input with Bloch vector `input`.
pub fn uqcm_chain_fidelity(j: f64, t: f64, input: &BlochVector) -> Result<f64> {
    let cloner = ChainCloner::new(j, 2.0)?;
    Ok(cloner.flux(t, 0)?.fidelity(input))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniversalityPoint {
    pub anisotropy: f64,
    /// Grid time maximizing the mean diagonal flux toward the first clone.
    pub t_opt: f64,
    pub mean_flux_at_opt: f64,
    /// `max |I^{ΣΣ} − I^{Σ'Σ'}|` at `t_opt`.
    pub deviation_at_opt: f64,
    /// The same deviation maximized over the whole time grid.
    pub max_deviation: f64,
}

/// For each anisotropy, scans the time grid and reports how far the cloner's
/// diagonal fluxes are from isotropic (universal) at the flux-maximizing time.
pub fn universality_scan(
    anisotropies: &[f64],
    j: f64,
    t_grid: &[f64],
) -> Result<Vec<UniversalityPoint>> {
    if t_grid.is_empty() {
        return Err(FluxError::InvalidArgument("empty time grid".into()));
    }
    anisotropies
        .iter()
        .map(|&lambda| {
            let cloner = ChainCloner::new(j, lambda)?;
            let mut best = UniversalityPoint {
                anisotropy: lambda,
                t_opt: t_grid[0],
                mean_flux_at_opt: f64::NEG_INFINITY,
                deviation_at_opt: 0.0,
                max_deviation: 0.0,
            };
            for &t in t_grid {
                let m = cloner.flux(t, 0)?;
                let mean = m.diagonal().iter().sum::<f64>() / 3.0;
                let dev = m.isotropy_deviation();
                best.max_deviation = best.max_deviation.max(dev);
                if mean > best.mean_flux_at_opt + 1e-14 {
                    best.mean_flux_at_opt = mean;
                    best.t_opt = t;
                    best.deviation_at_opt = dev;
                }
            }
            Ok(best)
        })
        .collect()
}

/// Result of [`maximize_isotropic_flux`].
#[derive(Debug, Clone)]
pub struct RegisterOptimum {
    pub state: RegisterState,
    /// Smallest diagonal flux minus cross and identity-column leakage.
    pub score: f64,
    pub flux: FluxMatrix,
}

/// Searches all two-qubit register states (complex amplitudes) of the chain
/// cloner for the largest isotropic flux toward the first clone at time `t`.
/// Used to check numerically that `|ψ+⟩` is the unique optimum.
pub fn maximize_isotropic_flux(j: f64, anisotropy: f64, t: f64) -> Result<RegisterOptimum> {
    let h = SpinHamiltonian::heisenberg_chain(3, j, anisotropy)?;
    let prop = SpectralPropagator::new(&h)?;
    let state_of = |x: &[f64]| {
        let amps: Vec<Complex64> = (0..4)
            .map(|k| Complex64::new(x[2 * k], x[2 * k + 1]))
            .collect();
        RegisterState::normalized(amps)
    };
    let score = |m: &FluxMatrix| {
        m.diagonal().iter().cloned().fold(f64::INFINITY, f64::min) - m.max_cross() - m.max_offset()
    };
    let objective = |x: &[f64]| -> f64 {
        match state_of(x).and_then(|s| prop.flux(t, 1, &s, 0)) {
            Ok(m) => -score(&m),
            Err(_) => f64::INFINITY,
        }
    };
    let opts = NelderMeadOptions {
        initial_step: 0.4,
        f_tol: 1e-14,
        x_tol: 1e-10,
        max_iter: 40_000,
    };
    // deterministic spread of starting points
    let starts: Vec<Vec<f64>> = (0..12)
        .map(|k| {
            (0..8)
                .map(|d| ((k * 8 + d) as f64 * 2.399_963).sin())
                .collect()
        })
        .collect();
    let mut best: Option<crate::optimize::Minimum> = None;
    for s in &starts {
        let m = nelder_mead(objective, s, &opts);
        let m = nelder_mead(
            objective,
            &m.x,
            &NelderMeadOptions {
                initial_step: 0.05,
                ..opts.clone()
            },
        );
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let best = best.expect("starts are non-empty");
    let state = state_of(&best.x)?;
    let flux = prop.flux(t, 1, &state, 0)?;
    Ok(RegisterOptimum {
        score: score(&flux),
        state,
        flux,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn propagator_at_zero_is_identity() {
        let h = SpinHamiltonian::heisenberg_chain(3, 1.0, 0.7).unwrap();
        let u = propagator(&h, 0.0).unwrap();
        let id = DMatrix::<Complex64>::identity(8, 8);
        assert!((u - id).norm() < 1e-12);
    }

    #[test]
    fn two_qubit_xy_rabi_amplitude() {
        let profile = CouplingProfile::from_couplings(vec![1.3]).unwrap();
        let h = SpinHamiltonian::xy_chain(&profile).unwrap();
        for &t in &[0.1, 0.5, 1.7, 4.0] {
            let u = propagator(&h, t).unwrap();
            // |01⟩ = index 1, |10⟩ = index 2
            assert!((u[(2, 1)].norm() - (1.3 * t).sin().abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let h = SpinHamiltonian::heisenberg_chain(13, 1.0, 1.0).unwrap();
        assert!(matches!(
            SpectralPropagator::new(&h),
            Err(FluxError::CapExceeded { .. })
        ));
    }

    #[test]
    fn flux_at_time_zero_is_identity_on_input() {
        let h = SpinHamiltonian::heisenberg_chain(3, 1.0, 2.0).unwrap();
        let m = flux_tomography(&h, 0.0, 1, &RegisterState::psi_plus(), 1).unwrap();
        assert!(m.max_abs_diff(&FluxMatrix::identity(1, TimeLabel::Time(0.0))) < 1e-14);
    }

    #[test]
    fn cloner_matches_closed_form() {
        let j = 1.0;
        let cloner = ChainCloner::new(j, 2.0).unwrap();
        for &t in &[0.0, 0.2, 0.5, 0.9, 1.4] {
            let m = cloner.flux(t, 0).unwrap();
            let want = 2.0 / 3.0 * (3f64.sqrt() * j * t).sin().powi(2);
            for d in m.diagonal() {
                assert!((d - want).abs() < 1e-12, "t = {t}: {d} vs {want}");
            }
            assert!(m.max_cross() < 1e-12 && m.max_offset() < 1e-12);
        }
    }

    #[test]
    fn chain_fidelity_at_optimal_time() {
        let t = optimal_cloning_time(1.0);
        let r = BlochVector::from_angles(0.8, 2.1);
        assert!((uqcm_chain_fidelity(1.0, t, &r).unwrap() - 5.0 / 6.0).abs() < 1e-12);
        let eq = BlochVector::from_angles(std::f64::consts::FRAC_PI_2, 0.4);
        assert!((uqcm_chain_fidelity(1.0, 0.0, &eq).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pauli_decompose_round_trip() {
        let obs = PauliObservable::from_terms(
            2,
            [
                (Complex64::new(0.3, 0.0), "XZ".parse().unwrap()),
                (Complex64::new(-1.1, 0.0), "YY".parse().unwrap()),
                (Complex64::new(0.0, 0.5), "IZ".parse().unwrap()),
            ],
        )
        .unwrap();
        let back = pauli_decompose(&observable_matrix(&obs)).unwrap();
        for (c, p) in obs.terms() {
            assert!((back.coefficient(&p) - c).norm() < 1e-14);
        }
        assert_eq!(back.len(), 3);
    }

    #[test]
    fn clifford_unitary_agrees_with_conjugation() {
        let c = CliffordCircuit::from_gates(
            3,
            [
                Gate::H(0),
                Gate::Cnot {
                    control: 0,
                    target: 2,
                },
                Gate::S(1),
                Gate::Y(2),
                Gate::Cnot {
                    control: 2,
                    target: 1,
                },
                Gate::Z(0),
            ],
        )
        .unwrap();
        let u = clifford_unitary(&c).unwrap();
        for k in 0..64 {
            let p = crate::pauli::chi_basis_string(3, k);
            let dense = u.adjoint() * pauli_matrix(&p) * &u;
            let exact = pauli_matrix(&c.conjugate_string(&p).unwrap());
            assert!((dense - exact).norm() < 1e-12, "string {p}");
        }
    }
}
