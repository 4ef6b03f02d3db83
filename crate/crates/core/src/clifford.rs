//! Heisenberg-picture conjugation of Pauli observables through Clifford
//! circuits, flux extraction against a known register state, and the
//! preparation-state optimizer for the 1→2 cloning circuit.
//!
//! Gates are listed in execution order. For a circuit `U = g_m ⋯ g_1` the
//! evolved operator is `U† Σ U = g_1† ⋯ g_m† Σ g_m ⋯ g_1`, so conjugation
//! walks the gate list from the last gate back to the first. All arithmetic
//! is on masks and phases; no floating point touches the strings.

use num_complex::Complex64;

use crate::error::{FluxError, Result};
use crate::flux::{column_index, FluxMatrix, TimeLabel};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::pauli::{check_qubit, Pauli, PauliObservable, PauliString, Phase};
use crate::state::RegisterState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    H(usize),
    S(usize),
    X(usize),
    Y(usize),
    Z(usize),
}

impl Gate {
    fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            Gate::Cnot { control, target } => ([control, target], 2),
            Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => ([q, q], 1),
        }
    }

    /// `g† X_q g` for a qubit `q` touched by the gate.
    fn image_x(&self, n: usize, q: usize) -> PauliString {
        let s = |letters: &[(usize, Pauli)], phase: Phase| {
            let mut p = PauliString::identity(n);
            for &(k, l) in letters {
                p = p
                    .multiply(&PauliString::single(n, k, l).expect("qubit validated"))
                    .expect("sizes match");
            }
            p.with_phase(phase)
        };
        match *self {
            Gate::Cnot { control, target } if q == control => {
                s(&[(control, Pauli::X), (target, Pauli::X)], Phase::ONE)
            }
            Gate::Cnot { .. } => s(&[(q, Pauli::X)], Phase::ONE),
            Gate::H(_) => s(&[(q, Pauli::Z)], Phase::ONE),
            Gate::S(_) => s(&[(q, Pauli::Y)], Phase::MINUS_ONE),
            Gate::X(_) => s(&[(q, Pauli::X)], Phase::ONE),
            Gate::Y(_) | Gate::Z(_) => s(&[(q, Pauli::X)], Phase::MINUS_ONE),
        }
    }

    /// `g† Z_q g` for a qubit `q` touched by the gate.
    fn image_z(&self, n: usize, q: usize) -> PauliString {
        let single = |l: Pauli, phase: Phase| {
            PauliString::single(n, q, l)
                .expect("qubit validated")
                .with_phase(phase)
        };
        match *self {
            Gate::Cnot { control, target } if q == target => {
                let zc = PauliString::single(n, control, Pauli::Z).expect("qubit validated");
                zc.multiply(&single(Pauli::Z, Phase::ONE))
                    .expect("sizes match")
            }
            Gate::Cnot { .. } => single(Pauli::Z, Phase::ONE),
            Gate::H(_) => single(Pauli::X, Phase::ONE),
            Gate::S(_) | Gate::Z(_) => single(Pauli::Z, Phase::ONE),
            Gate::X(_) | Gate::Y(_) => single(Pauli::Z, Phase::MINUS_ONE),
        }
    }

    fn image_letter(&self, n: usize, q: usize, letter: Pauli) -> PauliString {
        match letter {
            Pauli::I => PauliString::identity(n),
            Pauli::X => self.image_x(n, q),
            Pauli::Z => self.image_z(n, q),
            // Y = iXZ
            Pauli::Y => {
                let xz = self
                    .image_x(n, q)
                    .multiply(&self.image_z(n, q))
                    .expect("sizes match");
                xz.with_phase(xz.phase() * Phase::I)
            }
        }
    }

    /// `g† p g`.
    pub fn conjugate_string(&self, p: &PauliString) -> PauliString {
        let n = p.n_qubits();
        let (qs, count) = self.qubits();
        let mut letters = p.letters();
        let touched: Vec<(usize, Pauli)> = qs[..count].iter().map(|&q| (q, letters[q])).collect();
        for &(q, _) in &touched {
            letters[q] = Pauli::I;
        }
        let mut out = PauliString::from_letters(&letters).with_phase(p.phase());
        for (q, l) in touched {
            if l != Pauli::I {
                out = out
                    .multiply(&self.image_letter(n, q, l))
                    .expect("sizes match");
            }
        }
        out
    }
}

/// An ordered list of Clifford gates on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl CliffordCircuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let (qs, count) = gate.qubits();
        for &q in &qs[..count] {
            check_qubit(q, self.n_qubits)?;
        }
        if let Gate::Cnot { control, target } = gate {
            if control == target {
                return Err(FluxError::InvalidArgument(
                    "CNOT control and target must differ".into(),
                ));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Copying stage of the 1→2 cloning circuit on qubits (input, clone A,
    /// clone B) = (0, 1, 2): CNOT 0→1, CNOT 0→2, CNOT 1→0, CNOT 2→0.
    pub fn uqcm_copying_stage() -> Self {
        Self::from_gates(
            3,
            [
                Gate::Cnot {
                    control: 0,
                    target: 1,
                },
                Gate::Cnot {
                    control: 0,
                    target: 2,
                },
                Gate::Cnot {
                    control: 1,
                    target: 0,
                },
                Gate::Cnot {
                    control: 2,
                    target: 0,
                },
            ],
        )
        .expect("static circuit is valid")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// The first `k` gates.
    pub fn prefix(&self, k: usize) -> Self {
        Self {
            n_qubits: self.n_qubits,
            gates: self.gates[..k.min(self.gates.len())].to_vec(),
        }
    }

    /// Circuit implementing `U†` (S is inverted as S³).
    pub fn inverse(&self) -> Self {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in self.gates.iter().rev() {
            match *g {
                Gate::S(q) => gates.extend([Gate::S(q); 3]),
                other => gates.push(other),
            }
        }
        Self {
            n_qubits: self.n_qubits,
            gates,
        }
    }

    /// `U† p U`.
    pub fn conjugate_string(&self, p: &PauliString) -> Result<PauliString> {
        if p.n_qubits() != self.n_qubits {
            return Err(FluxError::SizeMismatch {
                expected: self.n_qubits,
                found: p.n_qubits(),
            });
        }
        Ok(self
            .gates
            .iter()
            .rev()
            .fold(*p, |acc, g| g.conjugate_string(&acc)))
    }

    /// `U† obs U`, term by term.
    pub fn conjugate(&self, obs: &PauliObservable) -> Result<PauliObservable> {
        if obs.n_qubits() != self.n_qubits {
            return Err(FluxError::SizeMismatch {
                expected: self.n_qubits,
                found: obs.n_qubits(),
            });
        }
        let mut out = PauliObservable::zero(self.n_qubits);
        for (c, p) in obs.terms() {
            out.add_term(c, &self.conjugate_string(&p)?);
        }
        Ok(out)
    }
}

/// `U† obs U` (free-function form).
pub fn conjugate(obs: &PauliObservable, circuit: &CliffordCircuit) -> Result<PauliObservable> {
    circuit.conjugate(obs)
}

/// One row of the table of evolved operators.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedRow {
    /// 0-based qubit whose operator is evolved.
    pub qubit: usize,
    pub letter: Pauli,
    /// Evolved operator after each of the gates `t1 … t4`.
    pub after_gate: Vec<PauliObservable>,
}

impl EvolvedRow {
    /// Row label such as `X~1`.
    pub fn label(&self) -> String {
        format!("{}~{}", self.letter.symbol(), self.qubit + 1)
    }
}

/// Evolved `X̃_i` and `Z̃_i` (i = 1, 2, 3) after each gate of the copying stage,
/// in the order X̃1, Z̃1, X̃2, Z̃2, X̃3, Z̃3.
pub fn table1() -> Vec<EvolvedRow> {
    let circuit = CliffordCircuit::uqcm_copying_stage();
    let mut rows = Vec::with_capacity(6);
    for qubit in 0..3 {
        for letter in [Pauli::X, Pauli::Z] {
            let op = PauliObservable::from_string(
                PauliString::single(3, qubit, letter).expect("static qubit"),
            );
            let after_gate = (1..=circuit.len())
                .map(|k| circuit.prefix(k).conjugate(&op).expect("sizes match"))
                .collect();
            rows.push(EvolvedRow {
                qubit,
                letter,
                after_gate,
            });
        }
    }
    rows
}

/// Collects an evolved target operator into the four flux coefficients
/// `(X', Y', Z', I')` of the input qubit.
///
/// Each term `c · σ_{Σ'} ⊗ G` contributes `c ⟨G⟩` to column `Σ'`, the
/// expectation being taken on the register state of the remaining qubits.
pub fn flux_from_observable(
    evolved: &PauliObservable,
    register: &RegisterState,
    input_qubit: usize,
) -> Result<[f64; 4]> {
    let n = evolved.n_qubits();
    check_qubit(input_qubit, n)?;
    if register.n_qubits() + 1 != n {
        return Err(FluxError::SizeMismatch {
            expected: n - 1,
            found: register.n_qubits(),
        });
    }
    register.check_normalized()?;
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for (c, p) in evolved.terms() {
        let (letter, rest) = p.split_off(input_qubit)?;
        acc[column_index(letter)] += c * rest.expectation(register)?;
    }
    Ok(acc.map(|v| v.re))
}

/// Full flux matrix of `target_qubit` after the circuit, for a register
/// prepared in `register` (covering every qubit except `input_qubit`).
pub fn circuit_flux(
    circuit: &CliffordCircuit,
    register: &RegisterState,
    input_qubit: usize,
    target_qubit: usize,
) -> Result<FluxMatrix> {
    let n = circuit.n_qubits();
    check_qubit(target_qubit, n)?;
    let mut m = FluxMatrix::zero(target_qubit, TimeLabel::Gates(circuit.len()));
    for letter in Pauli::XYZ {
        let op = PauliObservable::from_string(PauliString::single(n, target_qubit, letter)?);
        let evolved = circuit.conjugate(&op)?;
        m.set_row(
            letter,
            flux_from_observable(&evolved, register, input_qubit)?,
        );
    }
    Ok(m)
}

/// Constraint family for [`optimize_preparation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreparationTarget {
    /// Identical clones (`I₂^{ΣΣ} = I₃^{ΣΣ}`) independent of the input letter.
    SymmetricUniversal,
    /// Unit flux onto the first clone: `I₂^{ΣΣ} = 1` for every Σ.
    FullyBiased,
}

#[derive(Debug, Clone)]
pub struct PreparationOptimum {
    /// Real amplitudes `(α, β, γ, δ)` on `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub amplitudes: [f64; 4],
    pub state: RegisterState,
    /// Common diagonal flux achieved (the constrained objective).
    pub flux: f64,
    pub flux_clone_a: FluxMatrix,
    pub flux_clone_b: FluxMatrix,
    pub iterations: usize,
}

/// Real unit 4-vector from three hyperspherical angles.
pub fn sphere_point(angles: &[f64]) -> [f64; 4] {
    let (a, b, c) = (angles[0], angles[1], angles[2]);
    [
        a.cos(),
        a.sin() * b.cos(),
        a.sin() * b.sin() * c.cos(),
        a.sin() * b.sin() * c.sin(),
    ]
}

/// Objective evaluator for the copying stage: the evolved X, Y, Z operators of
/// both clones are computed once and reused for every candidate register.
pub struct CopyingStageFlux {
    evolved: Vec<(usize, Pauli, PauliObservable)>,
}

impl Default for CopyingStageFlux {
    fn default() -> Self {
        Self::new()
    }
}

impl CopyingStageFlux {
    pub fn new() -> Self {
        let circuit = CliffordCircuit::uqcm_copying_stage();
        let mut evolved = Vec::new();
        for target in [1, 2] {
            for letter in Pauli::XYZ {
                let op = PauliObservable::from_string(
                    PauliString::single(3, target, letter).expect("static qubit"),
                );
                evolved.push((target, letter, circuit.conjugate(&op).expect("sizes match")));
            }
        }
        Self { evolved }
    }

    /// Flux matrices of clone A (qubit 1) and clone B (qubit 2).
    pub fn fluxes(&self, register: &RegisterState) -> Result<(FluxMatrix, FluxMatrix)> {
        let mut a = FluxMatrix::zero(1, TimeLabel::Gates(4));
        let mut b = FluxMatrix::zero(2, TimeLabel::Gates(4));
        for (target, letter, obs) in &self.evolved {
            let row = flux_from_observable(obs, register, 0)?;
            if *target == 1 {
                a.set_row(*letter, row);
            } else {
                b.set_row(*letter, row);
            }
        }
        Ok((a, b))
    }

    /// Constrained objective (larger is better): the smallest diagonal flux
    /// among the constrained entries, less any cross or identity-column flux.
    pub fn score(&self, register: &RegisterState, target: PreparationTarget) -> Result<f64> {
        let (a, b) = self.fluxes(register)?;
        let leak = |m: &FluxMatrix| m.max_cross() + m.max_offset();
        Ok(match target {
            PreparationTarget::SymmetricUniversal => {
                let lo = a
                    .diagonal()
                    .into_iter()
                    .chain(b.diagonal())
                    .fold(f64::INFINITY, f64::min);
                lo - leak(&a) - leak(&b)
            }
            PreparationTarget::FullyBiased => {
                a.diagonal().into_iter().fold(f64::INFINITY, f64::min) - leak(&a)
            }
        })
    }
}

/// Searches real two-qubit preparations for the copying stage that maximize
/// the constrained flux. Deterministic: a fixed lattice of starting angles,
/// each refined with Nelder–Mead.
pub fn optimize_preparation(target: PreparationTarget) -> Result<PreparationOptimum> {
    let eval = CopyingStageFlux::new();
    let objective = |angles: &[f64]| -> f64 {
        let v = sphere_point(angles);
        let s = RegisterState::from_real(&v).expect("unit vector");
        -eval.score(&s, target).expect("sizes match")
    };
    let opts = NelderMeadOptions {
        initial_step: 0.3,
        // a few ulps of the objective (≈ 2/3)
        f_tol: 1e-15,
        x_tol: 1e-12,
        max_iter: 20_000,
    };
    let starts = [0.4, 1.2, 2.0, 2.7];
    let mut best: Option<crate::optimize::Minimum> = None;
    let mut iterations = 0;
    for &a in &starts {
        for &b in &starts {
            for &c in &[0.5, 2.0, 3.6, 5.2] {
                let m = nelder_mead(objective, &[a, b, c], &opts);
                iterations += m.iterations;
                if best.as_ref().is_none_or(|bm| m.value < bm.value) {
                    best = Some(m);
                }
            }
        }
    }
    let best = best.expect("at least one start");
    // polish from the best point
    let polished = nelder_mead(
        objective,
        &best.x,
        &NelderMeadOptions {
            initial_step: 1e-3,
            ..opts
        },
    );
    iterations += polished.iterations;
    let m = if polished.value <= best.value {
        polished
    } else {
        best
    };
    if !m.converged {
        return Err(FluxError::NoConvergence {
            iterations,
            best_value: -m.value,
            best_point: sphere_point(&m.x).to_vec(),
        });
    }
    let mut v = sphere_point(&m.x);
    // fix the global sign: first significant amplitude positive
    if let Some(first) = v.iter().find(|a| a.abs() > 1e-8) {
        if *first < 0.0 {
            v.iter_mut().for_each(|a| *a = -*a);
        }
    }
    for a in v.iter_mut() {
        if a.abs() < 1e-15 {
            *a = 0.0;
        }
    }
    let state = RegisterState::from_real(&v)?;
    let (fa, fb) = eval.fluxes(&state)?;
    Ok(PreparationOptimum {
        amplitudes: v,
        flux: -m.value,
        state,
        flux_clone_a: fa,
        flux_clone_b: fb,
        iterations,
    })
}
