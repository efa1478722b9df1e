//! Benchmark Hamiltonians split as `H = H0 + alpha * sum_g H1^g`.
//!
//! All lattices use open boundaries. Fermi-Hubbard uses a Jordan-Wigner
//! layout with the spin-up rail on qubits `0..L` and spin-down on `L..2L`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{group_layers, Pauli, PauliError, PauliString, PauliSum, TermLayering};

/// Name of the generator behind [`random_fields`], echoed in outputs.
pub const RNG_NAME: &str = "ChaCha8Rng(seed_from_u64)";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid dimensions {0:?} for {1}")]
    BadDimensions(Vec<usize>, &'static str),
    #[error("coupling `{0}` required for {1}")]
    MissingCoupling(&'static str, &'static str),
    #[error("coupling `{0}` not used by {1}")]
    UnusedCoupling(&'static str, &'static str),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "tfim_1d")]
    Tfim1d,
    #[serde(rename = "tfim_2d")]
    Tfim2d,
    #[serde(rename = "heisenberg_1d")]
    Heisenberg1d,
    #[serde(rename = "fermi_hubbard_1d")]
    FermiHubbard1d,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Tfim1d => "tfim_1d",
            ModelKind::Tfim2d => "tfim_2d",
            ModelKind::Heisenberg1d => "heisenberg_1d",
            ModelKind::FermiHubbard1d => "fermi_hubbard_1d",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [ModelKind::Tfim1d, ModelKind::Tfim2d, ModelKind::Heisenberg1d, ModelKind::FermiHubbard1d]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Model description. Only the couplings used by `kind` may be set:
/// TFIM uses `h, j`; Heisenberg `h, j, rng_seed`; Fermi-Hubbard `t_hop, u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_hop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
}

impl ModelSpec {
    pub fn tfim_1d(l: usize, h: f64, j: f64) -> Self {
        ModelSpec { kind: ModelKind::Tfim1d, dims: vec![l], h: Some(h), j: Some(j), t_hop: None, u: None, rng_seed: None }
    }

    pub fn tfim_2d(lx: usize, ly: usize, h: f64, j: f64) -> Self {
        ModelSpec { kind: ModelKind::Tfim2d, dims: vec![lx, ly], h: Some(h), j: Some(j), t_hop: None, u: None, rng_seed: None }
    }

    pub fn heisenberg_1d(l: usize, h: f64, j: f64, seed: u64) -> Self {
        ModelSpec {
            kind: ModelKind::Heisenberg1d,
            dims: vec![l],
            h: Some(h),
            j: Some(j),
            t_hop: None,
            u: None,
            rng_seed: Some(seed),
        }
    }

    pub fn fermi_hubbard_1d(l: usize, t_hop: f64, u: f64) -> Self {
        ModelSpec { kind: ModelKind::FermiHubbard1d, dims: vec![l], h: None, j: None, t_hop: Some(t_hop), u: Some(u), rng_seed: None }
    }

    /// Same model with the perturbation strength set to `alpha`
    /// (`J = alpha` for spin models, `t_hop = -alpha` for Fermi-Hubbard).
    pub fn with_alpha(&self, alpha: f64) -> Self {
        let mut s = self.clone();
        match s.kind {
            ModelKind::FermiHubbard1d => s.t_hop = Some(-alpha),
            _ => s.j = Some(alpha),
        }
        s
    }

    /// Chain length (or `Lx * Ly` sites for 2D).
    pub fn sites(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn n_qubits(&self) -> usize {
        match self.kind {
            ModelKind::FermiHubbard1d => 2 * self.sites(),
            _ => self.sites(),
        }
    }

    /// Characteristic linear size used for `T = c * L` sweeps.
    pub fn linear_size(&self) -> usize {
        self.dims.first().copied().unwrap_or(0)
    }

    pub fn with_size(&self, l: usize) -> Self {
        let mut s = self.clone();
        s.dims = match s.kind {
            ModelKind::Tfim2d => vec![l, l],
            _ => vec![l],
        };
        s
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let name = self.kind.name();
        let want_dims = if self.kind == ModelKind::Tfim2d { 2 } else { 1 };
        if self.dims.len() != want_dims || self.dims.iter().any(|&d| d == 0) || self.n_qubits() > 128 {
            return Err(ModelError::BadDimensions(self.dims.clone(), name));
        }
        let need = |v: Option<f64>, label| v.map(|_| ()).ok_or(ModelError::MissingCoupling(label, name));
        let forbid = |v: bool, label| if v { Err(ModelError::UnusedCoupling(label, name)) } else { Ok(()) };
        match self.kind {
            ModelKind::Tfim1d | ModelKind::Tfim2d => {
                need(self.h, "h")?;
                need(self.j, "j")?;
                forbid(self.t_hop.is_some(), "t_hop")?;
                forbid(self.u.is_some(), "u")?;
                forbid(self.rng_seed.is_some(), "rng_seed")?;
            }
            ModelKind::Heisenberg1d => {
                need(self.h, "h")?;
                need(self.j, "j")?;
                forbid(self.t_hop.is_some(), "t_hop")?;
                forbid(self.u.is_some(), "u")?;
                if self.rng_seed.is_none() {
                    return Err(ModelError::MissingCoupling("rng_seed", name));
                }
            }
            ModelKind::FermiHubbard1d => {
                need(self.t_hop, "t_hop")?;
                need(self.u, "u")?;
                forbid(self.h.is_some(), "h")?;
                forbid(self.j.is_some(), "j")?;
                forbid(self.rng_seed.is_some(), "rng_seed")?;
            }
        }
        Ok(())
    }
}

/// One perturbation group `H1^g` (unit-strength; the model's `alpha`
/// multiplies it inside `full`).
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub label: String,
    pub sum: PauliSum,
    /// Layering of the group's own terms into disjoint 2-qubit blocks.
    pub layering: TermLayering,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedHamiltonian {
    pub kind: ModelKind,
    pub spec: ModelSpec,
    pub n_qubits: usize,
    pub h0: PauliSum,
    pub alpha: f64,
    pub groups: Vec<Group>,
    pub full: PauliSum,
    /// Widest block any `H0 + alpha * H1^g` needs.
    pub thrift_block_size: u32,
    /// On-site fields (Heisenberg only).
    pub fields: Option<Vec<f64>>,
}

impl PartitionedHamiltonian {
    /// Number of groups.
    pub fn gamma(&self) -> usize {
        self.groups.len()
    }

    /// `sum_g H1^g` (without `alpha`).
    pub fn h1(&self) -> PauliSum {
        self.groups.iter().fold(PauliSum::zero(self.n_qubits), |acc, g| acc.add(&g.sum).expect("same register"))
    }

    /// `alpha * H1^g`.
    pub fn scaled_group(&self, g: usize) -> PauliSum {
        self.groups[g].sum.scale_real(self.alpha)
    }

    /// `H0 + alpha * H1^g`.
    pub fn thrift_generator(&self, g: usize) -> PauliSum {
        self.h0.add(&self.scaled_group(g)).expect("same register")
    }

    /// Copy with a different perturbation strength.
    pub fn with_alpha(&self, alpha: f64) -> Self {
        let mut p = self.clone();
        p.alpha = alpha;
        p.spec = self.spec.with_alpha(alpha);
        p.full = assemble_full(&p.h0, alpha, &p.groups);
        p
    }
}

fn assemble_full(h0: &PauliSum, alpha: f64, groups: &[Group]) -> PauliSum {
    groups.iter().fold(h0.clone(), |acc, g| acc.add(&g.sum.scale_real(alpha)).expect("same register"))
}

/// Uniform fields in `[-h, h]` from a seeded ChaCha8 stream.
pub fn random_fields(l: usize, h: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..l).map(|_| h * (2.0 * rng.gen::<f64>() - 1.0)).collect()
}

fn string(n: usize, ops: &[(usize, Pauli)]) -> Result<PauliString, PauliError> {
    PauliString::from_ops(n, ops)
}

fn bond_sum(n: usize, bonds: &[(usize, usize)], paulis: &[Pauli], weight: f64) -> Result<PauliSum, PauliError> {
    let mut s = PauliSum::zero(n);
    for &(a, b) in bonds {
        for &p in paulis {
            s.add_term(string(n, &[(a, p), (b, p)])?, Complex64::new(weight, 0.0))?;
        }
    }
    Ok(s)
}

fn make_group(label: &str, sum: PauliSum) -> Result<Group, PauliError> {
    let layering = group_layers(&sum, 2)?;
    Ok(Group { label: label.to_string(), sum, layering })
}

fn chain_bonds(l: usize, parity: usize) -> Vec<(usize, usize)> {
    (0..l.saturating_sub(1)).filter(|j| j % 2 == parity).map(|j| (j, j + 1)).collect()
}

pub fn build_model(spec: &ModelSpec) -> Result<PartitionedHamiltonian, ModelError> {
    spec.validate()?;
    let n = spec.n_qubits();
    let mut fields = None;
    let (h0, alpha, raw_groups, block): (PauliSum, f64, Vec<(String, PauliSum)>, u32) = match spec.kind {
        ModelKind::Tfim1d => {
            let l = spec.dims[0];
            let h = spec.h.unwrap_or_default();
            let h0 = PauliSum::from_real_terms(n, (0..l).map(|j| (string(n, &[(j, Pauli::Z)]).expect("in range"), h)))?;
            let groups = vec![
                ("even".to_string(), bond_sum(n, &chain_bonds(l, 0), &[Pauli::X], 1.0)?),
                ("odd".to_string(), bond_sum(n, &chain_bonds(l, 1), &[Pauli::X], 1.0)?),
            ];
            (h0, spec.j.unwrap_or_default(), groups, 2)
        }
        ModelKind::Tfim2d => {
            let (lx, ly) = (spec.dims[0], spec.dims[1]);
            let h = spec.h.unwrap_or_default();
            let q = |x: usize, y: usize| y * lx + x;
            let h0 = PauliSum::from_real_terms(n, (0..n).map(|j| (string(n, &[(j, Pauli::Z)]).expect("in range"), h)))?;
            let horiz = |parity: usize| -> Vec<(usize, usize)> {
                (0..ly)
                    .flat_map(|y| (0..lx.saturating_sub(1)).filter(move |x| x % 2 == parity).map(move |x| (q(x, y), q(x + 1, y))))
                    .collect()
            };
            let vert = |parity: usize| -> Vec<(usize, usize)> {
                (0..ly.saturating_sub(1))
                    .filter(|y| y % 2 == parity)
                    .flat_map(|y| (0..lx).map(move |x| (q(x, y), q(x, y + 1))))
                    .collect()
            };
            let groups = vec![
                ("h_even".to_string(), bond_sum(n, &horiz(0), &[Pauli::X], 1.0)?),
                ("h_odd".to_string(), bond_sum(n, &horiz(1), &[Pauli::X], 1.0)?),
                ("v_even".to_string(), bond_sum(n, &vert(0), &[Pauli::X], 1.0)?),
                ("v_odd".to_string(), bond_sum(n, &vert(1), &[Pauli::X], 1.0)?),
            ];
            (h0, spec.j.unwrap_or_default(), groups, 2)
        }
        ModelKind::Heisenberg1d => {
            let l = spec.dims[0];
            let f = random_fields(l, spec.h.unwrap_or_default(), spec.rng_seed.unwrap_or_default());
            let h0 = PauliSum::from_real_terms(n, f.iter().enumerate().map(|(j, &hj)| (string(n, &[(j, Pauli::Z)]).expect("in range"), hj)))?;
            fields = Some(f);
            let xyz = [Pauli::X, Pauli::Y, Pauli::Z];
            let groups = vec![
                ("even".to_string(), bond_sum(n, &chain_bonds(l, 0), &xyz, 1.0)?),
                ("odd".to_string(), bond_sum(n, &chain_bonds(l, 1), &xyz, 1.0)?),
            ];
            (h0, spec.j.unwrap_or_default(), groups, 2)
        }
        ModelKind::FermiHubbard1d => {
            let l = spec.dims[0];
            let u = spec.u.unwrap_or_default();
            let mut h0 = PauliSum::zero(n);
            for i in 0..l {
                let (a, b) = (i, l + i);
                h0.add_term(PauliString::identity(n)?, Complex64::new(u / 4.0, 0.0))?;
                h0.add_term(string(n, &[(a, Pauli::Z)])?, Complex64::new(-u / 4.0, 0.0))?;
                h0.add_term(string(n, &[(b, Pauli::Z)])?, Complex64::new(-u / 4.0, 0.0))?;
                h0.add_term(string(n, &[(a, Pauli::Z), (b, Pauli::Z)])?, Complex64::new(u / 4.0, 0.0))?;
            }
            let hop = |parity: usize| -> Result<PauliSum, PauliError> {
                let bonds: Vec<(usize, usize)> =
                    chain_bonds(l, parity).into_iter().flat_map(|(a, b)| [(a, b), (l + a, l + b)]).collect();
                bond_sum(n, &bonds, &[Pauli::X, Pauli::Y], 0.5)
            };
            let groups = vec![("even".to_string(), hop(0)?), ("odd".to_string(), hop(1)?)];
            (h0, -spec.t_hop.unwrap_or_default(), groups, 4)
        }
    };
    let groups = raw_groups
        .into_iter()
        .filter(|(_, s)| !s.is_empty())
        .map(|(label, s)| make_group(&label, s))
        .collect::<Result<Vec<_>, _>>()?;
    let full = assemble_full(&h0, alpha, &groups);
    Ok(PartitionedHamiltonian {
        kind: spec.kind,
        spec: spec.clone(),
        n_qubits: n,
        h0,
        alpha,
        groups,
        full,
        thrift_block_size: block,
        fields,
    })
}
