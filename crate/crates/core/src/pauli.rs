//! Pauli strings in symplectic form and weighted sums of them.
//!
//! Qubit `j` corresponds to bit `j` of both masks and to bit `j` of a
//! computational-basis index. A string with masks `(x, z)` denotes the
//! Hermitian operator `i^{|x & z|} X^x Z^z`, so `x = z = 1` on a qubit is `Y`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, CMatrix};

/// Largest register a [`PauliString`] can describe.
pub const MAX_QUBITS: usize = 128;

/// Coefficients at or below this magnitude are dropped from a [`PauliSum`].
pub const DEFAULT_PRUNE_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("qubit count {0} outside 1..=128")]
    BadQubitCount(usize),
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("invalid Pauli label {0:?}")]
    BadLabel(char),
    #[error("term {term} has support {support} larger than block size {block}")]
    SupportTooLarge { term: String, support: u32, block: u32 },
    #[error("nested commutator depth {0} unsupported (max 2)")]
    DepthTooLarge(usize),
    #[error("{0} qubits exceeds the dense cap of {1}")]
    TooLargeForDense(usize, usize),
}

/// Power of `i`: the value is `i^k` with `k` in `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn power(self) -> u32 {
        self.0 as u32
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn conj(self) -> Self {
        Phase((4 - self.0) % 4)
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

/// A Hermitian Pauli word on `n_qubits` qubits. The derived ordering is
/// `(n_qubits, x_mask, z_mask)`, which is the canonical term order everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: u32,
    x: u128,
    z: u128,
}

fn width_mask(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Result<Self, PauliError> {
        Self::from_masks(n_qubits, 0, 0)
    }

    pub fn from_masks(n_qubits: usize, x: u128, z: u128) -> Result<Self, PauliError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(PauliError::BadQubitCount(n_qubits));
        }
        let w = width_mask(n_qubits);
        if x & !w != 0 || z & !w != 0 {
            let stray = ((x | z) & !w).trailing_zeros() as usize;
            return Err(PauliError::QubitOutOfRange { index: stray, n: n_qubits });
        }
        Ok(PauliString { n_qubits: n_qubits as u32, x, z })
    }

    /// Builds a string from `(qubit, label)` pairs; later entries on the same
    /// qubit overwrite earlier ones.
    pub fn from_ops(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self, PauliError> {
        let mut s = Self::identity(n_qubits)?;
        for &(q, p) in ops {
            if q >= n_qubits {
                return Err(PauliError::QubitOutOfRange { index: q, n: n_qubits });
            }
            let (bx, bz) = p.bits();
            let bit = 1u128 << q;
            s.x = (s.x & !bit) | if bx { bit } else { 0 };
            s.z = (s.z & !bit) | if bz { bit } else { 0 };
        }
        Ok(s)
    }

    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Result<Self, PauliError> {
        Self::from_ops(n_qubits, &[(qubit, p)])
    }

    /// Parses labels such as `"XIZY"`; character `j` acts on qubit `j`.
    pub fn parse(label: &str) -> Result<Self, PauliError> {
        let ops = label
            .chars()
            .enumerate()
            .map(|(j, c)| {
                let p = match c {
                    'I' => Pauli::I,
                    'X' => Pauli::X,
                    'Y' => Pauli::Y,
                    'Z' => Pauli::Z,
                    other => return Err(PauliError::BadLabel(other)),
                };
                Ok((j, p))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_ops(label.chars().count(), &ops)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits as usize
    }

    pub fn x_mask(&self) -> u128 {
        self.x
    }

    pub fn z_mask(&self) -> u128 {
        self.z
    }

    pub fn support(&self) -> u128 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// True for products of `Z` only.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        let bx = (self.x >> qubit) & 1 == 1;
        let bz = (self.z >> qubit) & 1 == 1;
        match (bx, bz) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Applies the string to basis state `b`: returns `(phase, b')` with
    /// `P|b> = phase |b'>`.
    pub fn apply_to_basis(&self, b: u128) -> (Phase, u128) {
        let sign = 2 * ((self.z & b).count_ones() % 2);
        (Phase::from_power(self.y_count() + sign), b ^ self.x)
    }

    /// Dense `2^n x 2^n` matrix (column-major, basis index bit `j` = qubit `j`).
    pub fn to_dense(&self) -> CMatrix {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let (ph, out) = self.apply_to_basis(b as u128);
            m[(out as usize, b)] = ph.to_complex();
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n_qubits() {
            let c = match self.get(j) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Product `a * b = phase * product`.
pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<(Phase, PauliString), PauliError> {
    if a.n_qubits != b.n_qubits {
        return Err(PauliError::QubitMismatch(a.n_qubits(), b.n_qubits()));
    }
    Ok(pauli_mul_unchecked(a, b))
}

pub(crate) fn pauli_mul_unchecked(a: &PauliString, b: &PauliString) -> (Phase, PauliString) {
    let prod = PauliString { n_qubits: a.n_qubits, x: a.x ^ b.x, z: a.z ^ b.z };
    let k = a.y_count() + b.y_count() + 2 * (a.z & b.x).count_ones() + 4 * 128 - prod.y_count();
    (Phase::from_power(k), prod)
}

/// A complex-weighted sum of Pauli strings on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
    prune_tol: f64,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: BTreeMap::new(), prune_tol: DEFAULT_PRUNE_TOL }
    }

    pub fn with_prune_tol(mut self, tol: f64) -> Self {
        self.prune_tol = tol;
        self.prune();
        self
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self, PauliError>
    where
        I: IntoIterator<Item = (PauliString, Complex64)>,
    {
        let mut s = Self::zero(n_qubits);
        for (p, c) in terms {
            s.add_term(p, c)?;
        }
        Ok(s)
    }

    pub fn from_real_terms<I>(n_qubits: usize, terms: I) -> Result<Self, PauliError>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        Self::from_terms(n_qubits, terms.into_iter().map(|(p, c)| (p, Complex64::new(c, 0.0))))
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

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    pub fn add_term(&mut self, p: PauliString, c: Complex64) -> Result<(), PauliError> {
        if p.n_qubits() != self.n_qubits {
            return Err(PauliError::QubitMismatch(self.n_qubits, p.n_qubits()));
        }
        let entry = self.terms.entry(p).or_default();
        *entry += c;
        if entry.norm() <= self.prune_tol {
            self.terms.remove(&p);
        }
        Ok(())
    }

    fn check(&self, other: &PauliSum) -> Result<(), PauliError> {
        if self.n_qubits != other.n_qubits {
            Err(PauliError::QubitMismatch(self.n_qubits, other.n_qubits))
        } else {
            Ok(())
        }
    }

    pub fn prune(&mut self) {
        let tol = self.prune_tol;
        self.terms.retain(|_, c| c.norm() > tol);
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        let mut out = PauliSum { n_qubits: self.n_qubits, terms: BTreeMap::new(), prune_tol: self.prune_tol };
        for (p, c) in &self.terms {
            let v = c * factor;
            if v.norm() > self.prune_tol {
                out.terms.insert(*p, v);
            }
        }
        out
    }

    pub fn scale_real(&self, factor: f64) -> PauliSum {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum, PauliError> {
        self.check(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(*p, *c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum, PauliError> {
        self.add(&other.scale_real(-1.0))
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum, PauliError> {
        self.check(other)?;
        let mut out = PauliSum::zero(self.n_qubits).with_prune_tol(self.prune_tol);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (ph, p) = pauli_mul_unchecked(a, b);
                *out.terms.entry(p).or_default() += ca * cb * ph.to_complex();
            }
        }
        out.prune();
        Ok(out)
    }

    /// `self * other - other * self`. Only anticommuting pairs contribute.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum, PauliError> {
        self.check(other)?;
        let mut out = PauliSum::zero(self.n_qubits).with_prune_tol(self.prune_tol);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.commutes_with(b) {
                    continue;
                }
                let (ph, p) = pauli_mul_unchecked(a, b);
                *out.terms.entry(p).or_default() += 2.0 * ca * cb * ph.to_complex();
            }
        }
        out.prune();
        Ok(out)
    }

    /// Every coefficient real to within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(PauliString::is_diagonal)
    }

    pub fn support(&self) -> u128 {
        self.terms.keys().fold(0, |acc, p| acc | p.support())
    }

    /// Sum of coefficient magnitudes; an upper bound on the spectral norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn max_coeff_diff(&self, other: &PauliSum) -> f64 {
        let mut keys: Vec<&PauliString> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().map(|k| (self.coeff(k) - other.coeff(k)).norm()).fold(0.0, f64::max)
    }

    /// Diagonal of a Z-only sum as a vector over basis states.
    pub fn diagonal(&self) -> Vec<f64> {
        let dim = 1usize << self.n_qubits;
        let mut d = vec![0.0; dim];
        for (p, c) in &self.terms {
            for (b, v) in d.iter_mut().enumerate() {
                let parity = (p.z_mask() & b as u128).count_ones() % 2;
                *v += if parity == 0 { c.re } else { -c.re };
            }
        }
        d
    }

    pub fn to_dense(&self) -> CMatrix {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (p, c) in &self.terms {
            for b in 0..dim {
                let (ph, out) = p.apply_to_basis(b as u128);
                m[(out as usize, b)] += c * ph.to_complex();
            }
        }
        m
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}*{}", c.re, p)?;
            } else {
                write!(f, "({}{:+}i)*{}", c.re, c.im, p)?;
            }
        }
        Ok(())
    }
}

/// Terms split into layers; each layer is a set of blocks with disjoint
/// qubit supports, no block wider than `block_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct TermLayering {
    pub block_size: u32,
    pub layers: Vec<Vec<PauliString>>,
}

impl TermLayering {
    /// Qubit masks of the blocks in a layer (connected components of the
    /// term supports).
    pub fn blocks(&self, layer: usize) -> Vec<u128> {
        merge_supports(self.layers[layer].iter().map(PauliString::support))
    }

    /// Restrict `h` to each layer, in layer order.
    pub fn split(&self, h: &PauliSum) -> Vec<PauliSum> {
        self.layers
            .iter()
            .map(|layer| {
                let mut s = PauliSum::zero(h.n_qubits());
                for p in layer {
                    s.terms.insert(*p, h.coeff(p));
                }
                s
            })
            .collect()
    }
}

/// Union-find over bit masks: returns the connected components of a family
/// of supports.
pub(crate) fn merge_supports<I: IntoIterator<Item = u128>>(supports: I) -> Vec<u128> {
    let mut blocks: Vec<u128> = Vec::new();
    for s in supports {
        if s == 0 {
            continue;
        }
        let mut merged = s;
        loop {
            let before = merged;
            blocks.retain(|&b| {
                if b & merged != 0 {
                    merged |= b;
                    false
                } else {
                    true
                }
            });
            if merged == before {
                break;
            }
        }
        blocks.push(merged);
    }
    blocks.sort_by_key(|b| b.trailing_zeros());
    blocks
}

/// Greedy colouring of `h`'s terms in canonical order. A term joins the first
/// layer in which it, together with every block it touches, still fits in
/// `block_size` qubits. Identity terms go to the first layer.
pub fn group_layers(h: &PauliSum, block_size: u32) -> Result<TermLayering, PauliError> {
    let mut layers: Vec<Vec<PauliString>> = Vec::new();
    let mut blocks: Vec<Vec<u128>> = Vec::new();
    for p in h.terms.keys() {
        let s = p.support();
        if s.count_ones() > block_size {
            return Err(PauliError::SupportTooLarge { term: p.to_string(), support: s.count_ones(), block: block_size });
        }
        let mut placed = false;
        for (layer, bl) in layers.iter_mut().zip(blocks.iter_mut()) {
            let merged = bl.iter().filter(|&&b| b & s != 0).fold(s, |acc, b| acc | b);
            if merged.count_ones() <= block_size {
                bl.retain(|&b| b & s == 0);
                if merged != 0 {
                    bl.push(merged);
                }
                layer.push(*p);
                placed = true;
                break;
            }
        }
        if !placed {
            layers.push(vec![*p]);
            blocks.push(if s != 0 { vec![s] } else { vec![] });
        }
    }
    Ok(TermLayering { block_size, layers })
}

/// Spectral norm of a sum that is Hermitian or anti-Hermitian (as all nested
/// commutators of Hermitian operators are); falls back to `sqrt(eig(C^dag C))`.
pub fn spectral_norm(h: &PauliSum, dense_cap: usize) -> Result<f64, PauliError> {
    if h.is_empty() {
        return Ok(0.0);
    }
    if h.n_qubits() > dense_cap {
        return Err(PauliError::TooLargeForDense(h.n_qubits(), dense_cap));
    }
    let tol = 1e-12 * h.one_norm().max(1.0);
    if h.is_hermitian(tol) {
        return Ok(linalg::hermitian_spectral_norm(&h.to_dense()));
    }
    let rotated = h.scale(Complex64::new(0.0, -1.0));
    if rotated.is_hermitian(tol) {
        return Ok(linalg::hermitian_spectral_norm(&rotated.to_dense()));
    }
    let d = h.to_dense();
    let g = d.adjoint() * &d;
    Ok(linalg::hermitian_spectral_norm(&g).sqrt())
}

/// Dense cap used by [`nested_commutator_sum`].
pub const NESTED_DENSE_CAP: usize = 12;

/// Sum over all ordered index tuples of `‖[H_{p+1}, ... [H_2, H_1] ...]‖`.
pub fn nested_commutator_sum(parts: &[PauliSum], depth: usize) -> Result<f64, PauliError> {
    if depth == 0 || depth > 2 {
        return Err(PauliError::DepthTooLarge(depth));
    }
    let Some(first) = parts.first() else {
        return Ok(0.0);
    };
    for p in parts {
        first.check(p)?;
    }
    if first.n_qubits() > NESTED_DENSE_CAP {
        return Err(PauliError::TooLargeForDense(first.n_qubits(), NESTED_DENSE_CAP));
    }
    let mut total = 0.0;
    for a in parts {
        for b in parts {
            let inner = b.commutator(a)?;
            if depth == 1 {
                total += spectral_norm(&inner, NESTED_DENSE_CAP)?;
            } else {
                for c in parts {
                    total += spectral_norm(&c.commutator(&inner)?, NESTED_DENSE_CAP)?;
                }
            }
        }
    }
    Ok(total)
}
