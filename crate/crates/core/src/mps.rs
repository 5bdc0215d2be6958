//! Translation-invariant matrix product states with periodic (trace) closure.
//!
//! A state on `m` sites is `sum_p Tr(A_{p_1} ... A_{p_m}) |p_1 ... p_m>`.
//! States are never normalized implicitly: every consumer divides by the
//! norm it needs. Basis vectors of finite chains are ordered
//! lexicographically with `p_1` as the most significant digit.

use crate::error::{Error, Result};
use crate::linalg::{max_abs, r, CMatrix, CVector, ONE, ZERO};
use crate::transfer::transfer_operator;

/// Largest state vector produced unless a caller raises the budget.
pub const DEFAULT_STATE_BUDGET: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct UniformMps {
    tensors: Vec<CMatrix>,
    phys_dim: usize,
    bond_dim: usize,
}

impl UniformMps {
    /// Validates one `D x D` matrix per physical label.
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::DimensionMismatch("no site matrices given".into()))?;
        let bond_dim = first.nrows();
        if bond_dim == 0 {
            return Err(Error::DimensionMismatch("bond dimension must be positive".into()));
        }
        for (p, m) in matrices.iter().enumerate() {
            if m.nrows() != bond_dim || m.ncols() != bond_dim {
                return Err(Error::DimensionMismatch(format!(
                    "matrix {p} is {}x{}, expected {bond_dim}x{bond_dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        if matrices.iter().all(|m| max_abs(m) == 0.0) {
            return Err(Error::NullState);
        }
        Ok(Self {
            phys_dim: matrices.len(),
            bond_dim,
            tensors: matrices,
        })
    }

    pub fn tensors(&self) -> &[CMatrix] {
        &self.tensors
    }

    pub fn tensor(&self, label: usize) -> &CMatrix {
        &self.tensors[label]
    }

    pub fn phys_dim(&self) -> usize {
        self.phys_dim
    }

    pub fn bond_dim(&self) -> usize {
        self.bond_dim
    }

    /// Same state up to a positive factor, with the largest entry of unit size.
    pub fn rescaled(&self) -> Self {
        let s = self.tensors.iter().fold(0.0f64, |acc, m| acc.max(max_abs(m)));
        Self {
            tensors: self.tensors.iter().map(|m| m / r(s)).collect(),
            ..self.clone()
        }
    }

    /// `A_p -> X A_p X^{-1}`; leaves every amplitude unchanged.
    pub fn gauge_transform(&self, x: &CMatrix) -> Result<Self> {
        if x.nrows() != self.bond_dim || x.ncols() != self.bond_dim {
            return Err(Error::DimensionMismatch("gauge matrix has wrong size".into()));
        }
        let inv = x
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("gauge matrix is singular".into()))?;
        Self::new(self.tensors.iter().map(|a| x * a * &inv).collect())
    }

    /// `A_p -> sum_q U_pq A_q`, a change of local basis by `U`.
    pub fn mix_physical(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.phys_dim || u.ncols() != self.phys_dim {
            return Err(Error::DimensionMismatch("mixing matrix has wrong size".into()));
        }
        let d = self.bond_dim;
        let mixed = (0..self.phys_dim)
            .map(|p| {
                (0..self.phys_dim).fold(CMatrix::zeros(d, d), |acc, q| acc + &self.tensors[q] * u[(p, q)])
            })
            .collect();
        Self::new(mixed)
    }
}

/// Number of sites of a periodic chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainLength(usize);

impl ChainLength {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("chain length must be at least 1".into()));
        }
        Ok(Self(m))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfiguration(Vec<usize>);

impl SpinConfiguration {
    pub fn new(labels: Vec<usize>) -> Self {
        Self(labels)
    }

    /// Configuration at lexicographic position `index` on `m` sites.
    pub fn from_index(mut index: usize, d: usize, m: usize) -> Self {
        let mut labels = vec![0; m];
        for slot in labels.iter_mut().rev() {
            *slot = index % d;
            index /= d;
        }
        Self(labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    pub fn index(&self, d: usize) -> usize {
        self.0.iter().fold(0, |acc, &p| acc * d + p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Finite-chain state vector together with its Euclidean norm.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub amplitudes: CVector,
    pub norm: f64,
    pub phys_dim: usize,
    pub sites: usize,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: CVector, phys_dim: usize, sites: usize) -> Result<Self> {
        let expected = (phys_dim as u128).checked_pow(sites as u32);
        if expected != Some(amplitudes.len() as u128) {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes do not match {phys_dim}^{sites}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        Ok(Self {
            amplitudes,
            norm,
            phys_dim,
            sites,
        })
    }

    pub fn normalized(&self) -> CVector {
        &self.amplitudes / r(self.norm)
    }
}

/// `Tr(A_{p_1} A_{p_2} ... A_{p_m})`.
pub fn amplitude(mps: &UniformMps, config: &SpinConfiguration) -> Result<num_complex::Complex64> {
    let d = mps.phys_dim();
    let mut acc = CMatrix::identity(mps.bond_dim(), mps.bond_dim());
    for &p in config.labels() {
        if p >= d {
            return Err(Error::LabelOutOfRange { label: p, dim: d });
        }
        acc *= mps.tensor(p);
    }
    Ok(acc.trace())
}

fn budget_check(d: usize, m: usize, budget: u128) -> Result<usize> {
    let entries = (d as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if entries > budget {
        return Err(Error::BudgetExceeded { entries, budget });
    }
    Ok(entries as usize)
}

/// All ordered products of `k` site matrices, in lexicographic label order.
fn word_products(mps: &UniformMps, k: usize) -> Vec<CMatrix> {
    let dim = mps.bond_dim();
    let mut words = vec![CMatrix::identity(dim, dim)];
    for _ in 0..k {
        words = words
            .iter()
            .flat_map(|w| mps.tensors().iter().map(move |a| w * a))
            .collect();
    }
    words
}

pub fn state_vector(mps: &UniformMps, m: ChainLength) -> Result<StateVector> {
    state_vector_with_budget(mps, m, DEFAULT_STATE_BUDGET)
}

pub fn state_vector_with_budget(mps: &UniformMps, m: ChainLength, budget: u128) -> Result<StateVector> {
    let d = mps.phys_dim();
    let m = m.get();
    let total = budget_check(d, m, budget)?;
    // Meet in the middle: amplitude(i, j) = Tr(prefix_i * suffix_j).
    let head = m / 2;
    let prefixes = word_products(mps, head);
    let suffixes = word_products(mps, m - head);
    let n_suffix = suffixes.len();
    let amplitudes = CVector::from_fn(total, |idx, _| {
        let p = &prefixes[idx / n_suffix];
        let s = &suffixes[idx % n_suffix];
        let mut t = ZERO;
        for a in 0..p.nrows() {
            for b in 0..p.ncols() {
                t += p[(a, b)] * s[(b, a)];
            }
        }
        t
    });
    StateVector::from_amplitudes(amplitudes, d, m)
}

/// `<psi|psi> = Tr(E^m)`.
pub fn norm_sq(mps: &UniformMps, m: ChainLength) -> f64 {
    let e = transfer_operator(mps);
    let (p, log_scale) = crate::linalg::scaled_power(e.matrix(), m.get() as u64);
    p.trace().re * log_scale.exp()
}

/// `(|0101...> + |1010...>) / 2` on `m` sites; period two, so it has no
/// uniform representation.
pub fn antiferro_ghz_state(m: ChainLength) -> Result<StateVector> {
    let m = m.get();
    let total = budget_check(2, m, DEFAULT_STATE_BUDGET)?;
    let mut amplitudes = CVector::from_element(total, ZERO);
    let pattern = |start: usize| {
        SpinConfiguration::new((0..m).map(|i| (i + start) % 2).collect()).index(2)
    };
    amplitudes[pattern(0)] += ONE * 0.5;
    amplitudes[pattern(1)] += ONE * 0.5;
    StateVector::from_amplitudes(amplitudes, 2, m)
}
