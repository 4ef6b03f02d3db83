//! Information-flux matrices and the fidelity they imply.
//!
//! A [`FluxMatrix`] holds the twelve coefficients `I^{ΣΣ'}` for one target
//! qubit: row `Σ ∈ {X, Y, Z}` of the target, column `Σ' ∈ {X, Y, Z, I}` of the
//! input qubit. Read as an affine map it sends the input Bloch vector `r` to
//! the target Bloch vector `M r + c`, where `M` is the 3×3 block and `c` the
//! identity column.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::pauli::Pauli;
use crate::state::BlochVector;

/// Generalized time tag: number of gates applied or a (dimensionless) time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeLabel {
    Gates(usize),
    Time(f64),
}

impl fmt::Display for TimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeLabel::Gates(k) => write!(f, "t{k}"),
            TimeLabel::Time(t) => write!(f, "{t}"),
        }
    }
}

/// Column index of an input letter (`I` is the last column).
pub fn column_index(letter: Pauli) -> usize {
    match letter {
        Pauli::X => 0,
        Pauli::Y => 1,
        Pauli::Z => 2,
        Pauli::I => 3,
    }
}

/// Row index of a target letter; `None` for the identity.
pub fn row_index(letter: Pauli) -> Option<usize> {
    match letter {
        Pauli::X => Some(0),
        Pauli::Y => Some(1),
        Pauli::Z => Some(2),
        Pauli::I => None,
    }
}

/// Input states used for flux tomography: `|0⟩, |1⟩, |+⟩, |+i⟩`.
pub fn probe_inputs() -> [[Complex64; 2]; 4] {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [
        [one, zero],
        [zero, one],
        [h, h],
        [h, Complex64::new(0.0, FRAC_1_SQRT_2)],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxMatrix {
    pub target_qubit: usize,
    pub time: TimeLabel,
    /// `entries[row][col]`, rows X, Y, Z of the target, columns X, Y, Z, I of
    /// the input.
    pub entries: [[f64; 4]; 3],
}

impl FluxMatrix {
    pub fn zero(target_qubit: usize, time: TimeLabel) -> Self {
        Self {
            target_qubit,
            time,
            entries: [[0.0; 4]; 3],
        }
    }

    /// Identity transfer: every letter maps onto itself with unit flux.
    pub fn identity(target_qubit: usize, time: TimeLabel) -> Self {
        let mut m = Self::zero(target_qubit, time);
        for i in 0..3 {
            m.entries[i][i] = 1.0;
        }
        m
    }

    /// Solves the affine system given the target Bloch vectors obtained for
    /// the four [`probe_inputs`] (in that order). The system is exactly
    /// determined: `c = (b0 + b1)/2`, `M e_z = (b0 − b1)/2`,
    /// `M e_x = b+ − c`, `M e_y = b+i − c`.
    pub fn from_probe_responses(
        target_qubit: usize,
        time: TimeLabel,
        responses: [BlochVector; 4],
    ) -> Self {
        let [b0, b1, bx, by] = responses.map(|b| b.as_array());
        let mut m = Self::zero(target_qubit, time);
        for row in 0..3 {
            let c = 0.5 * (b0[row] + b1[row]);
            m.entries[row][0] = bx[row] - c;
            m.entries[row][1] = by[row] - c;
            m.entries[row][2] = 0.5 * (b0[row] - b1[row]);
            m.entries[row][3] = c;
        }
        m
    }

    pub fn get(&self, target: Pauli, input: Pauli) -> f64 {
        let r = row_index(target).expect("flux rows are X, Y, Z");
        self.entries[r][column_index(input)]
    }

    pub fn set(&mut self, target: Pauli, input: Pauli, value: f64) {
        let r = row_index(target).expect("flux rows are X, Y, Z");
        self.entries[r][column_index(input)] = value;
    }

    pub fn set_row(&mut self, target: Pauli, row: [f64; 4]) {
        let r = row_index(target).expect("flux rows are X, Y, Z");
        self.entries[r] = row;
    }

    pub fn transfer_block(&self) -> [[f64; 3]; 3] {
        let e = &self.entries;
        [
            [e[0][0], e[0][1], e[0][2]],
            [e[1][0], e[1][1], e[1][2]],
            [e[2][0], e[2][1], e[2][2]],
        ]
    }

    pub fn offset(&self) -> [f64; 3] {
        [self.entries[0][3], self.entries[1][3], self.entries[2][3]]
    }

    pub fn diagonal(&self) -> [f64; 3] {
        [self.entries[0][0], self.entries[1][1], self.entries[2][2]]
    }

    /// Largest off-diagonal magnitude of the 3×3 block.
    pub fn max_cross(&self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                if r != c {
                    m = m.max(self.entries[r][c].abs());
                }
            }
        }
        m
    }

    pub fn max_offset(&self) -> f64 {
        self.offset().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max_{Σ,Σ'} |I^{ΣΣ} − I^{Σ'Σ'}|`.
    pub fn isotropy_deviation(&self) -> f64 {
        let d = self.diagonal();
        let max = d.iter().cloned().fold(f64::MIN, f64::max);
        let min = d.iter().cloned().fold(f64::MAX, f64::min);
        max - min
    }

    /// Target Bloch vector for input Bloch vector `r`: `M r + c`.
    pub fn apply(&self, r: &BlochVector) -> BlochVector {
        let v = r.as_array();
        let mut out = [0.0; 3];
        for (row, o) in out.iter_mut().enumerate() {
            let e = &self.entries[row];
            *o = e[0] * v[0] + e[1] * v[1] + e[2] * v[2] + e[3];
        }
        BlochVector::from_array(out)
    }

    /// Fidelity between a pure input and the target qubit:
    /// `F = ½[1 + r·(M r + c)]`.
    pub fn fidelity(&self, input: &BlochVector) -> f64 {
        cloning_fidelity(self, input)
    }

    pub fn max_abs_diff(&self, other: &FluxMatrix) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..3 {
            for c in 0..4 {
                m = m.max((self.entries[r][c] - other.entries[r][c]).abs());
            }
        }
        m
    }

    /// Every entry lies in `[−1 − tol, 1 + tol]`.
    pub fn entries_bounded(&self, tol: f64) -> bool {
        self.entries.iter().flatten().all(|v| v.abs() <= 1.0 + tol)
    }

    /// Largest image norm over a deterministic spread of unit input vectors.
    pub fn max_image_norm(&self, samples: usize) -> f64 {
        let n = samples.max(2);
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..n)
            .map(|k| {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * k as f64;
                let v = BlochVector {
                    x: r * phi.cos(),
                    y: r * phi.sin(),
                    z,
                };
                self.apply(&v).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `F = ½[1 + r·(M r + c)]` for a pure input with Bloch vector `r`.
///
/// With a diagonal block and no identity column this reduces to
/// `½[1 + Σ_Σ I^{ΣΣ} r_Σ²]`.
pub fn cloning_fidelity(flux: &FluxMatrix, input: &BlochVector) -> f64 {
    let out = flux.apply(input);
    0.5 * (1.0 + input.dot(&out))
}
