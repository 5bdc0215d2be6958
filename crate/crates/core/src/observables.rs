//! Nearest-neighbour reduced density matrices, concurrence, and the
//! logarithmic fidelity per site.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigh, kron, max_abs, r, log_spectral_radius, scaled_power, CMatrix, CVector};
use crate::mps::UniformMps;
use crate::transfer::{fixed_point_matrices, transfer_operator, DEGENERACY_TOL};

/// Chain length used when the infinite-chain contraction is unavailable.
pub const FALLBACK_SITES: usize = 12;
/// Eigenvalues of a density matrix down to this value are rounded up to zero.
const PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdmSource {
    InfiniteChain,
    FiniteChain(usize),
}

/// Density matrix of two neighbouring sites, rows `(p, q) -> p * d + q`.
#[derive(Debug, Clone)]
pub struct TwoSiteDensity {
    pub matrix: CMatrix,
    pub phys_dim: usize,
    pub source: RdmSource,
}

impl TwoSiteDensity {
    fn from_unnormalized(raw: CMatrix, phys_dim: usize, source: RdmSource) -> Result<Self> {
        let t = raw.trace();
        if t.norm() == 0.0 {
            return Err(Error::NullState);
        }
        let m = &raw / t;
        let matrix = (&m + m.adjoint()) * r(0.5);
        Ok(Self {
            matrix,
            phys_dim,
            source,
        })
    }
}

/// `W = sum_p A_p (x) conj(B_p)`.
#[derive(Debug, Clone)]
pub struct MixedTransfer {
    pub matrix: CMatrix,
}

pub fn mixed_transfer(a: &UniformMps, b: &UniformMps) -> Result<MixedTransfer> {
    if a.phys_dim() != b.phys_dim() {
        return Err(Error::DimensionMismatch(format!(
            "physical dimensions {} and {} differ",
            a.phys_dim(),
            b.phys_dim()
        )));
    }
    let n = a.bond_dim() * b.bond_dim();
    let matrix = a
        .tensors()
        .iter()
        .zip(b.tensors())
        .fold(CMatrix::zeros(n, n), |acc, (x, y)| acc + kron(x, &y.map(|z| z.conj())));
    Ok(MixedTransfer { matrix })
}

/// Two-site density matrix of the infinite chain from the dominant fixed
/// points; states with a degenerate dominant eigenvalue fall back to a ring of
/// [`FALLBACK_SITES`] sites.
pub fn two_site_rdm(mps: &UniformMps) -> Result<TwoSiteDensity> {
    let mps = mps.rescaled();
    let e = transfer_operator(&mps);
    match fixed_point_matrices(&e, DEGENERACY_TOL) {
        Ok((_, right, left)) => {
            let d = mps.phys_dim();
            let raw = CMatrix::from_fn(d * d, d * d, |row, col| {
                let (p, q) = (row / d, row % d);
                let (pp, qp) = (col / d, col % d);
                let ket = mps.tensor(p) * mps.tensor(q);
                let bra = mps.tensor(pp) * mps.tensor(qp);
                (&left * ket * &right * bra.adjoint()).trace()
            });
            TwoSiteDensity::from_unnormalized(raw, d, RdmSource::InfiniteChain)
        }
        Err(Error::DegenerateDominantEigenvalue { .. }) => two_site_rdm_finite(&mps, FALLBACK_SITES),
        Err(e) => Err(e),
    }
}

/// `rho_{(pq),(p'q')} = Tr[(A_p (x) conj A_p')(A_q (x) conj A_q') E^{m-2}] / Tr E^m`.
pub fn two_site_rdm_finite(mps: &UniformMps, m: usize) -> Result<TwoSiteDensity> {
    if m < 2 {
        return Err(Error::InvalidArgument("a two-site density needs at least two sites".into()));
    }
    let mps = mps.rescaled();
    let e = transfer_operator(&mps);
    let (rest, _) = scaled_power(e.matrix(), (m - 2) as u64);
    let d = mps.phys_dim();
    let raw = CMatrix::from_fn(d * d, d * d, |row, col| {
        let (p, q) = (row / d, row % d);
        let (pp, qp) = (col / d, col % d);
        let ket = mps.tensor(p) * mps.tensor(q);
        let bra = mps.tensor(pp) * mps.tensor(qp);
        (kron(&ket, &bra.map(|z| z.conj())) * &rest).trace()
    });
    TwoSiteDensity::from_unnormalized(raw, d, RdmSource::FiniteChain(m))
}

/// Density matrix of the first two sites of an explicit state on `m` sites.
pub fn two_site_rdm_from_state(state: &CVector, d: usize, m: usize) -> Result<TwoSiteDensity> {
    let expected = (d as u128).checked_pow(m as u32);
    if m < 2 || expected != Some(state.len() as u128) {
        return Err(Error::DimensionMismatch(format!("state of length {} is not {d}^{m}", state.len())));
    }
    let rest = state.len() / (d * d);
    let raw = CMatrix::from_fn(d * d, d * d, |a, b| {
        (0..rest)
            .map(|k| state[a * rest + k] * state[b * rest + k].conj())
            .sum()
    });
    TwoSiteDensity::from_unnormalized(raw, d, RdmSource::FiniteChain(m))
}

fn sigma_y_pair() -> CMatrix {
    // sigma_y (x) sigma_y is real
    crate::linalg::real_matrix(
        4,
        4,
        &[0., 0., 0., -1., 0., 0., 1., 0., 0., 1., 0., 0., -1., 0., 0., 0.],
    )
}

/// Wootters concurrence `max(0, s1 - s2 - s3 - s4)` of a two-qubit state.
pub fn concurrence(rho: &TwoSiteDensity) -> Result<f64> {
    if rho.phys_dim != 2 {
        return Err(Error::NotQubits(rho.phys_dim));
    }
    let (vals, vecs) = hermitian_eigh(&rho.matrix);
    if let Some(&low) = vals.iter().find(|&&v| v < -PSD_TOL) {
        return Err(Error::InternalConsistency(format!("density matrix eigenvalue {low:e} is negative")));
    }
    let roots = CVector::from_iterator(4, vals.iter().map(|&v| r(v.max(0.0).sqrt())));
    let sqrt_rho = &vecs * CMatrix::from_diagonal(&roots) * vecs.adjoint();
    let m = &sqrt_rho * sigma_y_pair() * sqrt_rho.map(|z| z.conj());
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// `2 log|mu_1(W)| - log lambda_1(E_1) - log lambda_1(E_2)`.
pub fn fidelity_per_site(a: &UniformMps, b: &UniformMps) -> Result<f64> {
    let (a, b) = (a.rescaled(), b.rescaled());
    let w = mixed_transfer(&a, &b)?;
    let mu = log_spectral_radius(&w.matrix);
    let la = log_spectral_radius(transfer_operator(&a).matrix());
    let lb = log_spectral_radius(transfer_operator(&b).matrix());
    if mu == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(2.0 * mu - la - lb)
}

/// Largest entrywise difference between two density matrices.
pub fn rdm_distance(a: &TwoSiteDensity, b: &TwoSiteDensity) -> f64 {
    max_abs(&(&a.matrix - &b.matrix))
}
