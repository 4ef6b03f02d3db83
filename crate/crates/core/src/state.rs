//! Dense register states and single-qubit Bloch vectors.
//!
//! Basis ordering is fixed crate-wide: qubit 0 (the first qubit of the
//! register) is the most significant bit of a basis-state index, so
//! `|q0 q1 … q(N-1)⟩` has index `Σ q_j 2^(N-1-j)`.

use num_complex::Complex64;

use crate::error::{FluxError, Result};
use crate::pauli::check_qubit;

/// Largest register for which dense state vectors are built.
pub const DENSE_STATE_CAP: usize = 14;

/// Tolerance on `| ‖ψ‖² − 1 |` for a state to count as normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RegisterState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl RegisterState {
    /// Wraps an amplitude vector whose length is `2^N`; fails if it is not
    /// normalized.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let s = Self::from_amplitudes_unchecked(amps);
        s.check_normalized()?;
        Ok(s)
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Wraps amplitudes without the norm check (length must still be `2^N`).
    pub fn from_amplitudes_unchecked(amps: Vec<Complex64>) -> Self {
        assert!(
            amps.len().is_power_of_two(),
            "amplitude vector length must be a power of two"
        );
        let n_qubits = amps.len().trailing_zeros() as usize;
        assert!(n_qubits <= DENSE_STATE_CAP, "dense state cap exceeded");
        Self { n_qubits, amps }
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(FluxError::InvalidArgument(
                "cannot normalize a zero vector".into(),
            ));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self::from_amplitudes_unchecked(amps))
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_dense_cap(n_qubits)?;
        if n_qubits == 0 {
            return Err(FluxError::InvalidArgument(
                "register needs at least one qubit".into(),
            ));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(FluxError::InvalidArgument(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// The zero-qubit register (a single unit amplitude), used when the input
    /// qubit is the whole system.
    pub fn empty() -> Self {
        Self {
            n_qubits: 0,
            amps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// All qubits in `|0⟩` (the empty register when `n_qubits` is 0).
    pub fn ground(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Ok(Self::empty());
        }
        Self::basis(n_qubits, 0)
    }

    /// `(2|00⟩ + |01⟩ + |10⟩)/√6`, the register preparation of the optimal
    /// 1→2 cloning circuit.
    pub fn uqcm_preparation() -> Self {
        let a = 1.0 / 6f64.sqrt();
        Self::from_amplitudes_unchecked(
            [2.0 * a, a, a, 0.0]
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect(),
        )
    }

    /// `(|01⟩ + |10⟩)/√2`.
    pub fn psi_plus() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_amplitudes_unchecked(
            [0.0, a, a, 0.0]
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect(),
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            Err(FluxError::Unnormalized { norm_sqr: n })
        } else {
            Ok(())
        }
    }

    pub fn inner(&self, other: &RegisterState) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(FluxError::SizeMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &RegisterState) -> Result<Self> {
        check_dense_cap(self.n_qubits + other.n_qubits)?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        })
    }

    /// Inserts a single-qubit state so that it becomes qubit `position` of the
    /// result; the register's qubits keep their relative order.
    pub fn insert_qubit(&self, position: usize, qubit: [Complex64; 2]) -> Result<Self> {
        let n = self.n_qubits + 1;
        check_dense_cap(n)?;
        if position > self.n_qubits {
            return Err(FluxError::QubitOutOfRange {
                index: position,
                n_qubits: n,
            });
        }
        check_single_qubit_norm(&qubit)?;
        // bit of the inserted qubit in the enlarged index
        let shift = n - 1 - position;
        let low = (1usize << shift) - 1;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (r, &a) in self.amps.iter().enumerate() {
            let base = ((r & !low) << 1) | (r & low);
            amps[base] = qubit[0] * a;
            amps[base | (1 << shift)] = qubit[1] * a;
        }
        Ok(Self { n_qubits: n, amps })
    }

    /// Reduced 2×2 density matrix of `qubit`, as `[[ρ00, ρ01], [ρ10, ρ11]]`.
    pub fn reduced_qubit(&self, qubit: usize) -> Result<[[Complex64; 2]; 2]> {
        check_qubit(qubit, self.n_qubits)?;
        let bit = 1usize << (self.n_qubits - 1 - qubit);
        let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, &a) in self.amps.iter().enumerate() {
            if i & bit != 0 {
                continue;
            }
            let b = self.amps[i | bit];
            rho[0][0].re += a.norm_sqr();
            rho[1][1].re += b.norm_sqr();
            rho[0][1] += a * b.conj();
        }
        rho[1][0] = rho[0][1].conj();
        Ok(rho)
    }

    /// `(⟨X_q⟩, ⟨Y_q⟩, ⟨Z_q⟩)` of one qubit.
    pub fn bloch_of_qubit(&self, qubit: usize) -> Result<BlochVector> {
        let rho = self.reduced_qubit(qubit)?;
        Ok(BlochVector::from_density(rho))
    }
}

/// Product state `|φ⟩ ⊗ |ψ⟩` with the input qubit first.
pub fn product_state(input: [Complex64; 2], register: &RegisterState) -> Result<RegisterState> {
    register.insert_qubit(0, input)
}

fn check_dense_cap(n: usize) -> Result<()> {
    if n > DENSE_STATE_CAP {
        Err(FluxError::CapExceeded {
            what: "dense state qubit count",
            requested: n,
            cap: DENSE_STATE_CAP,
        })
    } else {
        Ok(())
    }
}

fn check_single_qubit_norm(q: &[Complex64; 2]) -> Result<()> {
    let n = q[0].norm_sqr() + q[1].norm_sqr();
    if (n - 1.0).abs() > NORM_TOLERANCE {
        Err(FluxError::Unnormalized { norm_sqr: n })
    } else {
        Ok(())
    }
}

/// Single-qubit Bloch vector `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const PLUS_Z: BlochVector = BlochVector {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };
    pub const MINUS_Z: BlochVector = BlochVector {
        x: 0.0,
        y: 0.0,
        z: -1.0,
    };
    pub const PLUS_X: BlochVector = BlochVector {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const PLUS_Y: BlochVector = BlochVector {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };

    /// Validating constructor: the vector must lie in the unit ball.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self { x, y, z };
        if v.norm_sqr() > 1.0 + 1e-10 || !v.norm_sqr().is_finite() {
            return Err(FluxError::InvalidArgument(format!(
                "Bloch vector ({x}, {y}, {z}) lies outside the unit ball"
            )));
        }
        Ok(v)
    }

    /// Pure state on the sphere at polar angle `theta`, azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }

    pub fn from_amplitudes(c: [Complex64; 2]) -> Self {
        let rho = [
            [c[0] * c[0].conj(), c[0] * c[1].conj()],
            [c[1] * c[0].conj(), c[1] * c[1].conj()],
        ];
        Self::from_density(rho)
    }

    pub fn from_density(rho: [[Complex64; 2]; 2]) -> Self {
        // ρ01 = (x − i y)/2
        Self {
            x: 2.0 * rho[0][1].re,
            y: -2.0 * rho[0][1].im,
            z: (rho[0][0] - rho[1][1]).re,
        }
    }

    /// Amplitudes `(cos θ/2, e^{iφ} sin θ/2)` of the pure state in the
    /// direction of this vector (which must be nonzero).
    pub fn to_amplitudes(&self) -> [Complex64; 2] {
        let r = self.norm();
        let theta = (self.z / r).clamp(-1.0, 1.0).acos();
        let phi = self.y.atan2(self.x);
        [
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        ]
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self {
            x: a[0],
            y: a[1],
            z: a[2],
        }
    }

    pub fn dot(&self, o: &BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}
