//! Markovian open-system dynamics of small registers.
//!
//! Each qubit couples to its own bath:
//!
//! ```text
//! dρ/dt = −i[H, ρ]
//!         + Σ_q Γ(n̄+1) (σ₋ρσ₊ − ½{σ₊σ₋, ρ}) + Γ n̄ (σ₊ρσ₋ − ½{σ₋σ₊, ρ})
//!         − (γ/2) [σ_z, [σ_z, ρ]]
//! ```
//!
//! with `σ₋ = |0⟩⟨1|`, so damping relaxes toward `|0…0⟩`. Populations decay at
//! `Γ` and coherences at `Γ/2 + 2γ` (for `n̄ = 0`). Integration is adaptive
//! Dormand–Prince RK45 with local error tolerance [`LOCAL_TOLERANCE`].

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::dense::{observable_matrix, SpinHamiltonian};
use crate::error::{FluxError, Result};
use crate::flux::{probe_inputs, FluxMatrix, TimeLabel};
use crate::pauli::{check_qubit, PauliObservable};
use crate::state::{BlochVector, RegisterState};

/// Largest register integrated as a density matrix.
pub const OPEN_DYNAMICS_CAP: usize = 8;
/// Per-step error tolerance of the integrator (max-norm, absolute).
pub const LOCAL_TOLERANCE: f64 = 1e-10;

const TRACE_TOLERANCE: f64 = 1e-9;
const HERMITIAN_TOLERANCE: f64 = 1e-10;
const POSITIVITY_TOLERANCE: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_cap(n: usize) -> Result<()> {
    if n > OPEN_DYNAMICS_CAP {
        Err(FluxError::CapExceeded {
            what: "open dynamics qubit count",
            requested: n,
            cap: OPEN_DYNAMICS_CAP,
        })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates trace, Hermiticity and positivity.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || !dim.is_power_of_two() {
            return Err(FluxError::InvalidArgument(
                "density matrix must be 2^N × 2^N".into(),
            ));
        }
        let rho = Self {
            n_qubits: dim.trailing_zeros() as usize,
            matrix,
        };
        check_cap(rho.n_qubits)?;
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(FluxError::InvalidArgument(format!("trace {tr} is not 1")));
        }
        if rho.hermiticity_error() > HERMITIAN_TOLERANCE {
            return Err(FluxError::InvalidArgument(
                "density matrix is not Hermitian".into(),
            ));
        }
        let min = rho.min_eigenvalue();
        if min < -POSITIVITY_TOLERANCE {
            return Err(FluxError::InvalidArgument(format!(
                "density matrix has negative eigenvalue {min}"
            )));
        }
        Ok(rho)
    }

    pub fn from_pure(state: &RegisterState) -> Result<Self> {
        check_cap(state.n_qubits())?;
        state.check_normalized()?;
        let a = state.amplitudes();
        let dim = a.len();
        Ok(Self {
            n_qubits: state.n_qubits(),
            matrix: DMatrix::from_fn(dim, dim, |i, j| a[i] * a[j].conj()),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// `Tr[O ρ]` (real part; `O` is expected Hermitian).
    pub fn expectation(&self, obs: &PauliObservable) -> Result<f64> {
        if obs.n_qubits() != self.n_qubits {
            return Err(FluxError::SizeMismatch {
                expected: self.n_qubits,
                found: obs.n_qubits(),
            });
        }
        Ok((observable_matrix(obs) * &self.matrix).trace().re)
    }

    pub fn reduced_qubit(&self, qubit: usize) -> Result<[[Complex64; 2]; 2]> {
        check_qubit(qubit, self.n_qubits)?;
        let bit = 1usize << (self.n_qubits - 1 - qubit);
        let mut r = [[ZERO; 2]; 2];
        for i in 0..self.matrix.nrows() {
            if i & bit != 0 {
                continue;
            }
            r[0][0] += self.matrix[(i, i)];
            r[0][1] += self.matrix[(i, i | bit)];
            r[1][0] += self.matrix[(i | bit, i)];
            r[1][1] += self.matrix[(i | bit, i | bit)];
        }
        Ok(r)
    }

    pub fn bloch_of_qubit(&self, qubit: usize) -> Result<BlochVector> {
        Ok(BlochVector::from_density(self.reduced_qubit(qubit)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSpec {
    /// Damping rate Γ per qubit.
    pub gamma_diss: f64,
    /// Dephasing rate γ per qubit.
    pub gamma_deph: f64,
    /// Mean bath occupation n̄.
    pub nbar: f64,
    pub hamiltonian: Option<SpinHamiltonian>,
}

impl LindbladSpec {
    pub fn new(gamma_diss: f64, gamma_deph: f64) -> Self {
        Self {
            gamma_diss,
            gamma_deph,
            nbar: 0.0,
            hamiltonian: None,
        }
    }

    pub fn closed(h: SpinHamiltonian) -> Self {
        Self {
            hamiltonian: Some(h),
            ..Self::new(0.0, 0.0)
        }
    }

    pub fn with_hamiltonian(mut self, h: SpinHamiltonian) -> Self {
        self.hamiltonian = Some(h);
        self
    }

    pub fn with_nbar(mut self, nbar: f64) -> Self {
        self.nbar = nbar;
        self
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for (name, v) in [
            ("gamma_diss", self.gamma_diss),
            ("gamma_deph", self.gamma_deph),
            ("nbar", self.nbar),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(FluxError::InvalidArgument(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        if let Some(h) = &self.hamiltonian {
            if h.n_qubits() != n_qubits {
                return Err(FluxError::SizeMismatch {
                    expected: n_qubits,
                    found: h.n_qubits(),
                });
            }
        }
        check_cap(n_qubits)
    }
}

/// The generator and its adjoint, applied matrix-free.
struct Generator {
    n_qubits: usize,
    /// Nonzero entries of `H` as `(row, col, value)`.
    h: Vec<(usize, usize, Complex64)>,
    down: f64,
    up: f64,
    deph: f64,
}

impl Generator {
    fn new(spec: &LindbladSpec, n_qubits: usize) -> Result<Self> {
        spec.validate(n_qubits)?;
        let mut h = Vec::new();
        if let Some(ham) = &spec.hamiltonian {
            let dense = ham.to_dense()?;
            for j in 0..dense.ncols() {
                for i in 0..dense.nrows() {
                    let v = dense[(i, j)];
                    if v != ZERO {
                        h.push((i, j, v));
                    }
                }
            }
        }
        Ok(Self {
            n_qubits,
            h,
            down: spec.gamma_diss * (spec.nbar + 1.0),
            up: spec.gamma_diss * spec.nbar,
            deph: spec.gamma_deph,
        })
    }

    /// `L(ρ)` when `adjoint` is false, `L†(O)` otherwise.
    fn apply(&self, rho: &DMatrix<Complex64>, adjoint: bool) -> DMatrix<Complex64> {
        let dim = rho.nrows();
        let mut out = DMatrix::from_element(dim, dim, ZERO);
        // −i[H, ρ] or +i[H, O]
        let s = if adjoint {
            Complex64::new(0.0, 1.0)
        } else {
            Complex64::new(0.0, -1.0)
        };
        for &(r, c, v) in &self.h {
            // (Hρ)[r, :] += v ρ[c, :] and (ρH)[:, c] += ρ[:, r] v
            for k in 0..dim {
                out[(r, k)] += s * v * rho[(c, k)];
                out[(k, c)] -= s * rho[(k, r)] * v;
            }
        }
        // The adjoint swaps the sandwich terms (σ₋Xσ₊ ↔ σ₊Xσ₋) but keeps the
        // anticommutators.
        let (into_ground, into_excited) = if adjoint {
            (self.up, self.down)
        } else {
            (self.down, self.up)
        };
        for q in 0..self.n_qubits {
            let bit = 1usize << (self.n_qubits - 1 - q);
            for b in 0..dim {
                let nb = (b & bit != 0) as u8 as f64;
                for a in 0..dim {
                    let na = (a & bit != 0) as u8 as f64;
                    let mut v = ZERO;
                    if into_ground != 0.0 && a & bit == 0 && b & bit == 0 {
                        v += into_ground * rho[(a | bit, b | bit)];
                    }
                    if into_excited != 0.0 && a & bit != 0 && b & bit != 0 {
                        v += into_excited * rho[(a ^ bit, b ^ bit)];
                    }
                    v -= 0.5 * (self.down * (na + nb) + self.up * (2.0 - na - nb)) * rho[(a, b)];
                    if self.deph != 0.0 && na != nb {
                        v -= 2.0 * self.deph * rho[(a, b)];
                    }
                    out[(a, b)] += v;
                }
            }
        }
        out
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dy/dt = f(y)` from 0 to `t` (`t ≥ 0`).
fn integrate<F>(y0: &DMatrix<Complex64>, t: f64, f: F) -> Result<DMatrix<Complex64>>
where
    F: Fn(&DMatrix<Complex64>) -> DMatrix<Complex64>,
{
    if !(t >= 0.0 && t.is_finite()) {
        return Err(FluxError::InvalidArgument(format!(
            "integration time must be ≥ 0, got {t}"
        )));
    }
    let mut y = y0.clone();
    if t == 0.0 {
        return Ok(y);
    }
    let mut now = 0.0;
    let mut h = (t / 100.0).min(0.01);
    let mut k0 = f(&y);
    while now < t {
        let last = h >= t - now;
        let step = if last { t - now } else { h };
        let mut k: Vec<DMatrix<Complex64>> = Vec::with_capacity(7);
        k.push(k0.clone());
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[s][j] != 0.0 {
                    ys += kj * Complex64::new(step * A[s][j], 0.0);
                }
            }
            k.push(f(&ys));
        }
        let mut y5 = y.clone();
        let mut diff = DMatrix::from_element(y.nrows(), y.ncols(), ZERO);
        for s in 0..7 {
            if B5[s] != 0.0 {
                y5 += &k[s] * Complex64::new(step * B5[s], 0.0);
            }
            let d = B5[s] - B4[s];
            if d != 0.0 {
                diff += &k[s] * Complex64::new(step * d, 0.0);
            }
        }
        let err = diff.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * (LOCAL_TOLERANCE / err).powf(0.2)).clamp(0.2, 5.0)
        };
        if err <= LOCAL_TOLERANCE {
            now = if last { t } else { now + step };
            y = y5;
            // first-same-as-last
            k0 = k.swap_remove(6);
            // a short final step says nothing about the next step size
            if !last {
                h = step * factor;
            }
        } else {
            h = step * factor;
            if h < 1e-14 * now.abs().max(1.0) {
                return Err(FluxError::StepUnderflow { t: now });
            }
        }
    }
    Ok(y)
}

/// `ρ(t)` under the master equation.
pub fn evolve_density(rho0: &DensityMatrix, spec: &LindbladSpec, t: f64) -> Result<DensityMatrix> {
    let g = Generator::new(spec, rho0.n_qubits)?;
    let m = integrate(&rho0.matrix, t, |r| g.apply(r, false))?;
    Ok(DensityMatrix {
        n_qubits: rho0.n_qubits,
        matrix: m,
    })
}

/// `O(t)` under the adjoint generator, so that `Tr[O(t) ρ0] = Tr[O ρ(t)]`.
pub fn evolve_observable(
    obs: &PauliObservable,
    spec: &LindbladSpec,
    t: f64,
) -> Result<DMatrix<Complex64>> {
    let g = Generator::new(spec, obs.n_qubits())?;
    integrate(&observable_matrix(obs), t, |o| g.apply(o, true))
}

/// `Tr[obs ρ(t)]` along a nondecreasing, nonnegative time grid.
pub fn expectation_trajectory(
    spec: &LindbladSpec,
    obs: &PauliObservable,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Vec<f64>> {
    let g = Generator::new(spec, rho0.n_qubits)?;
    if obs.n_qubits() != rho0.n_qubits {
        return Err(FluxError::SizeMismatch {
            expected: rho0.n_qubits,
            found: obs.n_qubits(),
        });
    }
    let o = observable_matrix(obs);
    let mut rho = rho0.matrix.clone();
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < now {
            return Err(FluxError::InvalidArgument(
                "time grid must be nondecreasing and ≥ 0".into(),
            ));
        }
        rho = integrate(&rho, t - now, |r| g.apply(r, false))?;
        now = t;
        out.push((&o * &rho).trace().re);
    }
    Ok(out)
}

/// Four-probe flux tomography under the master equation.
pub fn open_flux_tomography(
    spec: &LindbladSpec,
    t: f64,
    input_qubit: usize,
    register: &RegisterState,
    target_qubit: usize,
) -> Result<FluxMatrix> {
    let n = register.n_qubits() + 1;
    check_cap(n)?;
    check_qubit(input_qubit, n)?;
    check_qubit(target_qubit, n)?;
    register.check_normalized()?;
    let g = Generator::new(spec, n)?;
    let mut responses = [BlochVector::default(); 4];
    for (slot, probe) in responses.iter_mut().zip(probe_inputs()) {
        let rho0 = DensityMatrix::from_pure(&register.insert_qubit(input_qubit, probe)?)?;
        let m = integrate(&rho0.matrix, t, |r| g.apply(r, false))?;
        let rho = DensityMatrix {
            n_qubits: n,
            matrix: m,
        };
        *slot = rho.bloch_of_qubit(target_qubit)?;
    }
    Ok(FluxMatrix::from_probe_responses(
        target_qubit,
        TimeLabel::Time(t),
        responses,
    ))
}
