//! Exact algebra of N-qubit Pauli strings and sparse Pauli observables.
//!
//! Qubits are indexed from 0. Index 0 is the first qubit of the register and
//! the most significant bit of a computational-basis index (see
//! [`crate::state`]). A string is stored in letter form: `phase · σ_0 ⊗ σ_1 ⊗ …`
//! where each `σ_q ∈ {I, X, Y, Z}` is encoded by an `(x, z)` bit pair, with
//! `(1, 1)` denoting `Y` itself. Products are evaluated with `Y = iXZ`, so
//! `X·Z = −iY`, `Z·X = iY` and so on; the resulting phase always lies in
//! `{±1, ±i}`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{FluxError, Result};
use crate::state::RegisterState;

/// Maximum register size representable by a [`PauliString`].
pub const MAX_PAULI_QUBITS: usize = 64;

/// Coefficients below this magnitude are dropped from observables.
pub const PRUNE_TOLERANCE: f64 = 1e-14;

/// Maximum register size (qubits 2..N) for which [`chi_vector`] is materialized.
pub const CHI_QUBIT_CAP: usize = 8;

/// Single-qubit Pauli letter. The discriminant is the digit used by the
/// canonical base-4 ordering of [`chi_vector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    /// The three non-identity letters, in row order of a flux matrix.
    pub const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_digit(d: usize) -> Self {
        Pauli::ALL[d & 3]
    }
}

impl TryFrom<char> for Pauli {
    type Error = FluxError;

    fn try_from(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(FluxError::InvalidArgument(format!(
                "'{other}' is not a Pauli letter"
            ))),
        }
    }
}

/// A power of `i`: the phase `i^k` with `k ∈ {0, 1, 2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Phase exponent picked up when multiplying letter strings `a·b` qubit-wise.
fn product_phase_exponent(ax: u64, az: u64, bx: u64, bz: u64) -> i64 {
    let (a_x, a_y, a_z) = (ax & !az, ax & az, !ax & az);
    let (b_x, b_y, b_z) = (bx & !bz, bx & bz, !bx & bz);
    // XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i.
    let plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x);
    let minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z);
    plus.count_ones() as i64 - minus.count_ones() as i64
}

/// Tensor product of single-qubit Pauli operators with a global phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(
            (1..=MAX_PAULI_QUBITS).contains(&n_qubits),
            "Pauli strings support 1..=64 qubits"
        );
        Self {
            n_qubits,
            x_mask: 0,
            z_mask: 0,
            phase: Phase::ONE,
        }
    }

    /// Builds a string from raw masks. Bits beyond `n_qubits` are rejected.
    pub fn from_masks(n_qubits: usize, x_mask: u64, z_mask: u64, phase: Phase) -> Result<Self> {
        if !(1..=MAX_PAULI_QUBITS).contains(&n_qubits) {
            return Err(FluxError::CapExceeded {
                what: "Pauli string qubit count",
                requested: n_qubits,
                cap: MAX_PAULI_QUBITS,
            });
        }
        let m = low_mask(n_qubits);
        if x_mask & !m != 0 || z_mask & !m != 0 {
            return Err(FluxError::InvalidArgument(
                "mask has bits beyond the register size".into(),
            ));
        }
        Ok(Self {
            n_qubits,
            x_mask,
            z_mask,
            phase,
        })
    }

    /// The operator `σ` acting on `qubit` and identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, letter: Pauli) -> Result<Self> {
        check_qubit(qubit, n_qubits)?;
        let mut s = Self::identity(n_qubits);
        s.set_letter(qubit, letter);
        Ok(s)
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut s = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            s.set_letter(q, l);
        }
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        let bit = 1u64 << qubit;
        Pauli::from_bits(self.x_mask & bit != 0, self.z_mask & bit != 0)
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n_qubits).map(|q| self.letter(q)).collect()
    }

    fn set_letter(&mut self, qubit: usize, letter: Pauli) {
        let bit = 1u64 << qubit;
        let (x, z) = letter.bits();
        self.x_mask = if x {
            self.x_mask | bit
        } else {
            self.x_mask & !bit
        };
        self.z_mask = if z {
            self.z_mask | bit
        } else {
            self.z_mask & !bit
        };
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    /// Drops the global phase, leaving the bare letter string.
    pub fn unsigned(&self) -> Self {
        self.with_phase(Phase::ONE)
    }

    /// Group product `self · other`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        check_sizes(self.n_qubits, other.n_qubits)?;
        let k = product_phase_exponent(self.x_mask, self.z_mask, other.x_mask, other.z_mask);
        Ok(PauliString {
            n_qubits: self.n_qubits,
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
            phase: self.phase * other.phase * Phase::from_exponent(k),
        })
    }

    /// True iff the symplectic inner product of the two strings is even.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        check_sizes(self.n_qubits, other.n_qubits)?;
        let s = (self.x_mask & other.z_mask) ^ (self.z_mask & other.x_mask);
        Ok(s.count_ones().is_multiple_of(2))
    }

    /// Removes `qubit` from the string, returning its letter and the string on
    /// the remaining qubits (order preserved, phase kept on the residual).
    pub fn split_off(&self, qubit: usize) -> Result<(Pauli, PauliString)> {
        check_qubit(qubit, self.n_qubits)?;
        if self.n_qubits == 1 {
            return Err(FluxError::InvalidArgument(
                "cannot split the only qubit of a string".into(),
            ));
        }
        let letter = self.letter(qubit);
        let remove = |m: u64| {
            let low = m & ((1u64 << qubit) - 1);
            let high = (m >> (qubit + 1)) << qubit;
            low | high
        };
        Ok((
            letter,
            PauliString {
                n_qubits: self.n_qubits - 1,
                x_mask: remove(self.x_mask),
                z_mask: remove(self.z_mask),
                phase: self.phase,
            },
        ))
    }

    /// `⟨ψ|P|ψ⟩` on a dense register state.
    pub fn expectation(&self, state: &RegisterState) -> Result<Complex64> {
        check_sizes(self.n_qubits, state.n_qubits())?;
        Ok(self.phase.to_complex() * letter_expectation(self.x_mask, self.z_mask, state))
    }

    /// Compact notation, e.g. `X1X2X3`, `-iY2` or `I`.
    pub fn symbolic(&self) -> String {
        let mut out = String::new();
        match self.phase.exponent() {
            1 => out.push('i'),
            2 => out.push('-'),
            3 => out.push_str("-i"),
            _ => {}
        }
        if self.is_identity() {
            out.push('I');
            return out;
        }
        for q in 0..self.n_qubits {
            let l = self.letter(q);
            if l != Pauli::I {
                out.push(l.symbol());
                out.push_str(&(q + 1).to_string());
            }
        }
        out
    }
}

/// Expectation of the bare letter string given by the masks (phase +1).
fn letter_expectation(x_mask: u64, z_mask: u64, state: &RegisterState) -> Complex64 {
    let n = state.n_qubits();
    let flip = reverse_low_bits(x_mask, n) as usize;
    let zsign = reverse_low_bits(z_mask, n) as usize;
    let y_phase = Phase::from_exponent((x_mask & z_mask).count_ones() as i64).to_complex();
    let amps = state.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for (b, &a) in amps.iter().enumerate() {
        if a.re == 0.0 && a.im == 0.0 {
            continue;
        }
        let term = amps[b ^ flip].conj() * a;
        if (b & zsign).count_ones() % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    y_phase * acc
}

/// Maps qubit-indexed mask bits to basis-index bit positions (qubit 0 is the
/// most significant of `n` bits).
pub(crate) fn reverse_low_bits(mask: u64, n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    mask.reverse_bits() >> (64 - n)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase.exponent() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{sign}")?;
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q).symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = FluxError;

    /// Parses `[+|-][i]LETTERS`, e.g. `XIZ`, `-iYY`.
    fn from_str(s: &str) -> Result<Self> {
        let mut rest = s.trim();
        let mut k = 0i64;
        if let Some(r) = rest.strip_prefix('-') {
            k += 2;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        if let Some(r) = rest.strip_prefix('i') {
            k += 1;
            rest = r;
        }
        let letters = rest
            .chars()
            .map(Pauli::try_from)
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() || letters.len() > MAX_PAULI_QUBITS {
            return Err(FluxError::InvalidArgument(format!(
                "cannot parse Pauli string '{s}'"
            )));
        }
        Ok(PauliString::from_letters(&letters).with_phase(Phase::from_exponent(k)))
    }
}

fn check_sizes(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(FluxError::SizeMismatch { expected, found })
    } else {
        Ok(())
    }
}

pub(crate) fn check_qubit(index: usize, n_qubits: usize) -> Result<()> {
    if index >= n_qubits {
        Err(FluxError::QubitOutOfRange { index, n_qubits })
    } else {
        Ok(())
    }
}

/// Sparse complex combination of Pauli strings.
///
/// Terms are keyed by the bare letter string; each coefficient absorbs the
/// string's phase. Coefficients with magnitude below [`PRUNE_TOLERANCE`] are
/// never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliObservable {
    n_qubits: usize,
    terms: BTreeMap<(u64, u64), Complex64>,
}

impl PauliObservable {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_string(p: PauliString) -> Self {
        let mut obs = Self::zero(p.n_qubits);
        obs.add_term(Complex64::new(1.0, 0.0), &p);
        obs
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, PauliString)>,
    {
        let mut obs = Self::zero(n_qubits);
        for (c, p) in terms {
            check_sizes(n_qubits, p.n_qubits)?;
            obs.add_term(c, &p);
        }
        Ok(obs)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff · p` (the phase of `p` is folded into the coefficient).
    pub fn add_term(&mut self, coeff: Complex64, p: &PauliString) {
        debug_assert_eq!(p.n_qubits, self.n_qubits);
        let key = (p.x_mask, p.z_mask);
        let c = coeff * p.phase.to_complex();
        let entry = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() < PRUNE_TOLERANCE {
            self.terms.remove(&key);
        }
    }

    /// Iterates `(coefficient, bare string)` pairs in canonical mask order.
    pub fn terms(&self) -> impl Iterator<Item = (Complex64, PauliString)> + '_ {
        self.terms.iter().map(move |(&(x, z), &c)| {
            (
                c,
                PauliString {
                    n_qubits: self.n_qubits,
                    x_mask: x,
                    z_mask: z,
                    phase: Phase::ONE,
                },
            )
        })
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms
            .get(&(p.x_mask, p.z_mask))
            .map(|c| *c * p.phase.to_complex().conj())
            .unwrap_or_default()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.n_qubits);
        for (c, p) in self.terms() {
            out.add_term(c * s, &p);
        }
        out
    }

    pub fn add(&self, other: &PauliObservable) -> Result<Self> {
        check_sizes(self.n_qubits, other.n_qubits)?;
        let mut out = self.clone();
        for (c, p) in other.terms() {
            out.add_term(c, &p);
        }
        Ok(out)
    }

    pub fn multiply(&self, other: &PauliObservable) -> Result<Self> {
        check_sizes(self.n_qubits, other.n_qubits)?;
        let mut out = Self::zero(self.n_qubits);
        for (ca, pa) in self.terms() {
            for (cb, pb) in other.terms() {
                let p = pa.multiply(&pb)?;
                out.add_term(ca * cb, &p);
            }
        }
        Ok(out)
    }

    /// True when every coefficient is real within `tol` (all stored strings
    /// are bare letter strings, hence Hermitian).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// If the observable is a single string with coefficient in `{±1, ±i}`,
    /// returns it as a phased [`PauliString`].
    pub fn as_single_string(&self) -> Option<PauliString> {
        if self.terms.len() != 1 {
            return None;
        }
        let (c, p) = self.terms().next()?;
        let k = [
            (Complex64::new(1.0, 0.0), Phase::ONE),
            (Complex64::new(0.0, 1.0), Phase::I),
            (Complex64::new(-1.0, 0.0), Phase::MINUS_ONE),
            (Complex64::new(0.0, -1.0), Phase::MINUS_I),
        ]
        .into_iter()
        .find(|(v, _)| (c - v).norm() < 1e-12)?
        .1;
        Some(p.with_phase(k))
    }

    /// Compact rendering: `X1X3`, `-Z2`, or a sum with explicit
    /// coefficients when the observable is not a single phased string.
    pub fn symbolic(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        if let Some(p) = self.as_single_string() {
            return p.symbolic();
        }
        self.terms()
            .map(|(c, p)| format!("({:.12}{:+.12}i)*{}", c.re, c.im, p.symbolic()))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `⟨state|obs|state⟩`.
pub fn expectation(obs: &PauliObservable, state: &RegisterState) -> Result<Complex64> {
    check_sizes(obs.n_qubits, state.n_qubits())?;
    state.check_normalized()?;
    Ok(obs
        .terms
        .iter()
        .map(|(&(x, z), &c)| c * letter_expectation(x, z, state))
        .sum())
}

/// The vector `χ_k = ⟨ψ|G_k|ψ⟩` over all Pauli strings `G_k` on the register.
///
/// Ordering: base-4 digits `(I, X, Y, Z) = (0, 1, 2, 3)`, the register's first
/// qubit most significant. Entry 0 (all identity) is always 1.
pub fn chi_vector(register: &RegisterState) -> Result<Vec<Complex64>> {
    let n = register.n_qubits();
    if n > CHI_QUBIT_CAP {
        return Err(FluxError::CapExceeded {
            what: "chi-vector register size",
            requested: n,
            cap: CHI_QUBIT_CAP,
        });
    }
    register.check_normalized()?;
    Ok((0..4usize.pow(n as u32))
        .map(|k| {
            let p = chi_basis_string(n, k);
            letter_expectation(p.x_mask, p.z_mask, register)
        })
        .collect())
}

/// The `k`-th basis string of [`chi_vector`]'s ordering.
pub fn chi_basis_string(n_qubits: usize, k: usize) -> PauliString {
    let letters: Vec<Pauli> = (0..n_qubits)
        .map(|q| Pauli::from_digit(k >> (2 * (n_qubits - 1 - q))))
        .collect();
    PauliString::from_letters(&letters)
}
