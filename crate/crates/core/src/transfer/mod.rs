//! State transfer along open XY chains.
//!
//! With the register in the all-ground state, `H = ½ Σ_i J_i (X_i X_{i+1} +
//! Y_i Y_{i+1})` keeps a single excitation in the `N`-dimensional sector where
//! it hops with the real symmetric tridiagonal matrix `M` (off-diagonal
//! `J_i`). Everything about the end-to-end flux follows from the amplitude
//! `f(t) = [e^{−iMt}]_{N,1}`.

mod series;
mod sweep;
mod tridiag;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{FluxError, Result};
use crate::flux::{cloning_fidelity, FluxMatrix, TimeLabel};
use crate::pauli::Pauli;
use crate::state::BlochVector;

pub use series::{
    required_order, series_flux, series_truncation_bound, SeriesResult, SERIES_TOLERANCE,
};
pub use sweep::{
    disorder_ensemble, eta_sweep, DisorderEnsemble, SweepArgmax, SweepSurface, TIE_TOLERANCE,
};
pub use tridiag::{symmetric_tridiagonal_eigen, TridiagonalEigen};

/// Nearest-neighbour couplings `J_1 … J_{N−1}` of an open chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingProfile {
    couplings: Vec<f64>,
}

impl CouplingProfile {
    pub fn from_couplings(couplings: Vec<f64>) -> Result<Self> {
        if couplings.is_empty() {
            return Err(FluxError::InvalidArgument(
                "a chain needs at least two qubits".into(),
            ));
        }
        if let Some(bad) = couplings.iter().find(|j| !j.is_finite()) {
            return Err(FluxError::InvalidArgument(format!(
                "non-finite coupling {bad}"
            )));
        }
        Ok(Self { couplings })
    }

    /// Bulk coupling `J` with end couplings `J_1 = J_{N−1} = ηJ`.
    pub fn uniform_eta(n_qubits: usize, j: f64, eta: f64) -> Result<Self> {
        if n_qubits < 2 {
            return Err(FluxError::InvalidArgument(
                "a chain needs at least two qubits".into(),
            ));
        }
        let mut c = vec![j; n_qubits - 1];
        c[0] = eta * j;
        c[n_qubits - 2] = eta * j;
        Self::from_couplings(c)
    }

    /// `J_i = λ √(i (N − i))`.
    pub fn perfect(n_qubits: usize, lambda: f64) -> Result<Self> {
        if n_qubits < 2 {
            return Err(FluxError::InvalidArgument(
                "a chain needs at least two qubits".into(),
            ));
        }
        Self::from_couplings(
            (1..n_qubits)
                .map(|i| lambda * ((i * (n_qubits - i)) as f64).sqrt())
                .collect(),
        )
    }

    /// Adds independent Gaussian offsets `δ_i ~ N(0, (σ J_i)²)` drawn from
    /// `rng`. Negative results are kept.
    pub fn with_disorder<R: rand::Rng + ?Sized>(
        &self,
        sigma_fraction: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if !(sigma_fraction >= 0.0 && sigma_fraction.is_finite()) {
            return Err(FluxError::InvalidArgument(format!(
                "sigma_fraction must be nonnegative, got {sigma_fraction}"
            )));
        }
        let couplings = self
            .couplings
            .iter()
            .map(|&j| {
                let sd = sigma_fraction * j.abs();
                if sd == 0.0 {
                    j
                } else {
                    j + Normal::new(0.0, sd)
                        .expect("finite positive sd")
                        .sample(rng)
                }
            })
            .collect();
        Ok(Self { couplings })
    }

    pub fn n_qubits(&self) -> usize {
        self.couplings.len() + 1
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let c = &self.couplings;
        (0..c.len()).all(|i| (c[i] - c[c.len() - 1 - i]).abs() <= tol)
    }

    pub fn has_negative(&self) -> bool {
        self.couplings.iter().any(|&j| j < 0.0)
    }

    /// Bound on the spectral norm of the hopping matrix.
    pub fn norm_bound(&self) -> f64 {
        let c = &self.couplings;
        (0..self.n_qubits())
            .map(|i| {
                let left = if i > 0 { c[i - 1].abs() } else { 0.0 };
                let right = if i < c.len() { c[i].abs() } else { 0.0 };
                left + right
            })
            .fold(0.0, f64::max)
    }
}

/// Disorder model for ensemble runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub sigma_fraction: f64,
    pub trials: usize,
    pub seed: u64,
}

impl DisorderSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_fraction >= 0.0 && self.sigma_fraction.is_finite()) {
            return Err(FluxError::InvalidArgument(format!(
                "sigma_fraction must be nonnegative, got {}",
                self.sigma_fraction
            )));
        }
        if self.trials == 0 {
            return Err(FluxError::InvalidArgument(
                "trials must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Generator for one trial: ChaCha20 keyed by the seed, stream = trial.
    pub fn trial_rng(&self, trial: usize) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

/// Single-excitation propagator of a profile, diagonalized once.
#[derive(Debug, Clone)]
pub struct ChainPropagator {
    eigen: TridiagonalEigen,
}

impl ChainPropagator {
    pub fn new(profile: &CouplingProfile) -> Result<Self> {
        let n = profile.n_qubits();
        Ok(Self {
            eigen: symmetric_tridiagonal_eigen(&vec![0.0; n], profile.couplings())?,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.eigen.dim()
    }

    pub fn eigen(&self) -> &TridiagonalEigen {
        &self.eigen
    }

    /// `[e^{−iMt}]_{to, from}` (0-indexed sites).
    pub fn amplitude(&self, t: f64, from: usize, to: usize) -> Complex64 {
        let e = &self.eigen;
        (0..e.dim())
            .map(|j| {
                Complex64::from_polar(
                    e.component(to, j) * e.component(from, j),
                    -e.eigenvalues[j] * t,
                )
            })
            .sum()
    }

    /// Column `from` of `e^{−iMt}`.
    pub fn column(&self, t: f64, from: usize) -> Vec<Complex64> {
        let e = &self.eigen;
        let n = e.dim();
        let phases: Vec<Complex64> = e
            .eigenvalues
            .iter()
            .map(|l| Complex64::from_polar(1.0, -l * t))
            .collect();
        (0..n)
            .map(|to| {
                (0..n)
                    .map(|j| phases[j] * (e.component(to, j) * e.component(from, j)))
                    .sum()
            })
            .collect()
    }

    /// End-to-end amplitude `f(t)`.
    pub fn end_to_end(&self, t: f64) -> Complex64 {
        self.amplitude(t, 0, self.n_qubits() - 1)
    }
}

/// `f = [e^{−iMt}]_{N,1}`.
pub fn transfer_amplitude(profile: &CouplingProfile, t: f64) -> Result<Complex64> {
    Ok(ChainPropagator::new(profile)?.end_to_end(t))
}

/// Flux matrix of the last qubit implied by the amplitude `f`:
/// `I^{XX} = I^{YY} = Re f`, `I^{XY} = −Im f`, `I^{YX} = Im f`,
/// `I^{ZZ} = |f|²` and identity-column `Z` entry `1 − |f|²`.
pub fn flux_components(f: Complex64, target_qubit: usize, time: TimeLabel) -> Result<FluxMatrix> {
    let p = f.norm_sqr();
    if p.sqrt() > 1.0 + 1e-9 || !p.is_finite() {
        return Err(FluxError::AmplitudeTooLarge(p.sqrt()));
    }
    let mut m = FluxMatrix::zero(target_qubit, time);
    m.set(Pauli::X, Pauli::X, f.re);
    m.set(Pauli::Y, Pauli::Y, f.re);
    m.set(Pauli::X, Pauli::Y, -f.im);
    m.set(Pauli::Y, Pauli::X, f.im);
    m.set(Pauli::Z, Pauli::Z, p);
    m.set(Pauli::Z, Pauli::I, 1.0 - p);
    Ok(m)
}

/// `F = ½[1 + r·(M r + c)]` for the transfer channel.
pub fn transfer_fidelity(flux: &FluxMatrix, input: &BlochVector) -> f64 {
    cloning_fidelity(flux, input)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferResult {
    pub amplitude: Complex64,
    pub flux: FluxMatrix,
    /// `|f|²`: the fidelity for input `|1⟩`, the worst case once the known
    /// phase `arg f` is undone on the last qubit.
    pub worst_case_fidelity: f64,
    pub time: f64,
}

/// Amplitude, flux and worst-case fidelity at time `t`.
pub fn transfer(profile: &CouplingProfile, t: f64) -> Result<TransferResult> {
    let f = transfer_amplitude(profile, t)?;
    Ok(TransferResult {
        amplitude: f,
        flux: flux_components(f, profile.n_qubits() - 1, TimeLabel::Time(t))?,
        worst_case_fidelity: f.norm_sqr(),
        time: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn profiles() {
        let p = CouplingProfile::uniform_eta(6, 2.0, 0.5).unwrap();
        assert_eq!(p.couplings(), &[1.0, 2.0, 2.0, 2.0, 1.0]);
        let q = CouplingProfile::perfect(7, 0.5).unwrap();
        assert!(q.is_symmetric(1e-15));
        assert!((q.couplings()[0] - 0.5 * 6f64.sqrt()).abs() < 1e-15);
        assert!(CouplingProfile::uniform_eta(1, 1.0, 1.0).is_err());
        assert!(CouplingProfile::from_couplings(vec![f64::NAN]).is_err());
    }

    #[test]
    fn three_site_uniform() {
        let p = CouplingProfile::uniform_eta(3, 1.0, 1.0).unwrap();
        for &t in &[0.0, 0.3, 1.1, 2.0, 5.5] {
            let f = transfer_amplitude(&p, t).unwrap();
            let s2 = (t / SQRT_2).sin().powi(2);
            assert!((f.re + s2).abs() < 1e-13 && f.im.abs() < 1e-13);
        }
        let f = transfer_amplitude(&p, PI / SQRT_2).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn perfect_profile_transfers_at_quarter_period() {
        for n in [2, 4, 7, 32, 101] {
            let p = CouplingProfile::perfect(n, 0.7).unwrap();
            let f = transfer_amplitude(&p, PI / (2.0 * 0.7)).unwrap();
            assert!((f.norm() - 1.0).abs() < 1e-9, "n = {n}: {}", f.norm());
        }
    }

    #[test]
    fn flux_component_examples() {
        let m = flux_components(Complex64::new(1.0, 0.0), 4, TimeLabel::Time(1.0)).unwrap();
        assert_eq!(m.diagonal(), [1.0, 1.0, 1.0]);
        assert_eq!(m.offset(), [0.0, 0.0, 0.0]);
        let z = flux_components(Complex64::new(0.0, 0.0), 4, TimeLabel::Time(0.0)).unwrap();
        assert_eq!(z.transfer_block(), [[0.0; 3]; 3]);
        assert_eq!(z.offset(), [0.0, 0.0, 1.0]);
        assert!(flux_components(Complex64::new(0.8, 0.7), 1, TimeLabel::Time(0.0)).is_err());
        for &r in &[
            BlochVector::PLUS_X,
            BlochVector::PLUS_Y,
            BlochVector::MINUS_Z,
        ] {
            assert!((transfer_fidelity(&m, &r) - 1.0).abs() < 1e-15);
        }
        assert_eq!(transfer_fidelity(&z, &BlochVector::PLUS_Z), 1.0);
    }

    #[test]
    fn column_is_unitary_and_mirror_symmetric() {
        let p = CouplingProfile::uniform_eta(9, 1.0, 0.6).unwrap();
        let prop = ChainPropagator::new(&p).unwrap();
        for &t in &[0.7, 3.1, 12.0] {
            let col = prop.column(t, 0);
            let norm: f64 = col.iter().map(|c| c.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            assert!((prop.amplitude(t, 0, 8) - prop.amplitude(t, 8, 0)).norm() < 1e-13);
            assert!((col[8] - prop.end_to_end(t)).norm() < 1e-14);
        }
    }

    #[test]
    fn disorder_streams_are_deterministic() {
        let spec = DisorderSpec {
            sigma_fraction: 0.05,
            trials: 3,
            seed: 11,
        };
        let p = CouplingProfile::uniform_eta(10, 1.0, 0.5).unwrap();
        let a = p.with_disorder(0.05, &mut spec.trial_rng(2)).unwrap();
        let b = p.with_disorder(0.05, &mut spec.trial_rng(2)).unwrap();
        let c = p.with_disorder(0.05, &mut spec.trial_rng(1)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(p.with_disorder(0.0, &mut spec.trial_rng(0)).unwrap(), p);
        assert!(p.with_disorder(-0.1, &mut spec.trial_rng(0)).is_err());
    }
}
