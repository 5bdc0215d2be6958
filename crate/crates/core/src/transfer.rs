//! Transfer operator, two-site merging, and fixed-point spectra.
//!
//! Index convention: row `(alpha, mu) -> alpha * D + mu`, column
//! `(beta, nu) -> beta * D + nu`; `alpha, beta` belong to the ket copy and
//! `mu, nu` to the conjugated copy.

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, fix_phase, hermitian_eigh, hermitian_part, kron, max_abs, null_vector, psd_sqrt, r,
    scaled_power, sort_by_magnitude, unvec, vec_rows, CMatrix, CVector,
};
use crate::mps::UniformMps;
use num_complex::Complex64;

/// Relative gap below which two dominant magnitudes count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Singular values below this fraction of the largest are dropped when merging.
pub const MERGE_RANK_CUT: f64 = 1e-12;
/// Magnitudes agreeing to this relative tolerance are ordered as ties.
const TIE_TOL: f64 = 1e-9;
/// Relative eigenvalue floor for the rank of a fixed-point matrix.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TransferOperator {
    matrix: CMatrix,
    bond_dim: usize,
}

impl TransferOperator {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        let bond_dim = (n as f64).sqrt().round() as usize;
        if matrix.ncols() != n || bond_dim * bond_dim != n || n == 0 {
            return Err(Error::DimensionMismatch(format!(
                "transfer operator must be D^2 x D^2, got {}x{}",
                n,
                matrix.ncols()
            )));
        }
        Ok(Self { matrix, bond_dim })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn bond_dim(&self) -> usize {
        self.bond_dim
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: &self.matrix * r(factor),
            bond_dim: self.bond_dim,
        }
    }

    /// `E^k` as a mantissa operator and the log of its scale factor.
    pub fn power(&self, k: u64) -> (Self, f64) {
        let (m, log_scale) = scaled_power(&self.matrix, k);
        (
            Self {
                matrix: m,
                bond_dim: self.bond_dim,
            },
            log_scale,
        )
    }
}

/// `sum_p A_p (x) conj(A_p)`.
pub fn transfer_operator(mps: &UniformMps) -> TransferOperator {
    let n = mps.bond_dim() * mps.bond_dim();
    let matrix = mps
        .tensors()
        .iter()
        .fold(CMatrix::zeros(n, n), |acc, a| acc + kron(a, &a.map(|z| z.conj())));
    TransferOperator {
        matrix,
        bond_dim: mps.bond_dim(),
    }
}

/// Block-site tensors `A'_l = lambda_l V^l` produced by one merging step.
#[derive(Debug, Clone)]
pub struct MergedSite {
    pub tensors: Vec<CMatrix>,
    pub singular_values: Vec<f64>,
}

impl MergedSite {
    pub fn to_mps(&self) -> Result<UniformMps> {
        UniformMps::new(self.tensors.clone())
    }
}

/// Merges two neighbouring sites into one block site through an SVD of the
/// `d^2 x D^2` matrix `[A_p A_q]_{alpha gamma}`.
pub fn merge_sites(mps: &UniformMps) -> Result<MergedSite> {
    let d = mps.phys_dim();
    let dim = mps.bond_dim();
    let mut m = CMatrix::zeros(d * d, dim * dim);
    for p in 0..d {
        for q in 0..d {
            let prod = mps.tensor(p) * mps.tensor(q);
            m.row_mut(p * d + q).copy_from(&vec_rows(&prod).transpose());
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let top = order.first().map(|&i| svd.singular_values[i]).unwrap_or(0.0);
    if top == 0.0 {
        return Err(Error::NullState);
    }
    let mut tensors = Vec::new();
    let mut singular_values = Vec::new();
    for &l in &order {
        let s = svd.singular_values[l];
        if s < MERGE_RANK_CUT * top {
            continue;
        }
        let v = v_t.row(l).transpose();
        tensors.push(unvec(&v, dim) * r(s));
        singular_values.push(s);
    }
    Ok(MergedSite {
        tensors,
        singular_values,
    })
}

/// One RG step on the operator level: `E -> E^2`.
pub fn rg_step(e: &TransferOperator) -> TransferOperator {
    TransferOperator {
        matrix: &e.matrix * &e.matrix,
        bond_dim: e.bond_dim,
    }
}

/// All eigenvalues, descending by magnitude with ties ordered by real then
/// imaginary part.
pub fn dominant_spectrum(e: &TransferOperator) -> Vec<Complex64> {
    let s = max_abs(&e.matrix);
    if s == 0.0 {
        return vec![Complex64::new(0.0, 0.0); e.matrix.nrows()];
    }
    let vals = eigenvalues(&(&e.matrix / r(s)));
    sort_by_magnitude(vals.into_iter().map(|z| z * s).collect(), TIE_TOL)
}

/// Normalized Schmidt coefficients of the fixed point, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    values: Vec<f64>,
}

impl SchmidtSpectrum {
    /// Normalizes `values` to unit sum and sorts them; zeros are dropped.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument("Schmidt values must be finite and nonnegative".into()));
        }
        values.retain(|&v| v > 0.0);
        let total: f64 = values.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidArgument("Schmidt spectrum is empty".into()));
        }
        values.iter_mut().for_each(|v| *v /= total);
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Dominant eigenvalue with the checked gap to the next magnitude.
fn nondegenerate_dominant(e: &CMatrix, tol: f64) -> Result<Complex64> {
    let spec = sort_by_magnitude(eigenvalues(e), 0.0);
    let first = spec[0].norm();
    if let Some(second) = spec.get(1).map(|z| z.norm()) {
        if first - second <= tol * first {
            return Err(Error::DegenerateDominantEigenvalue { first, second });
        }
    }
    Ok(spec[0])
}

/// Dominant right and left fixed-point matrices `(R, L)` with
/// `sum_p A_p R A_p^dag = lambda R` and `sum_p A_p^dag L A_p = lambda L`.
pub fn fixed_point_matrices(e: &TransferOperator, degeneracy_tol: f64) -> Result<(Complex64, CMatrix, CMatrix)> {
    let scale = max_abs(&e.matrix);
    if scale == 0.0 {
        return Err(Error::NullState);
    }
    let m = &e.matrix / r(scale);
    let mu = nondegenerate_dominant(&m, degeneracy_tol)?;
    let n = m.nrows();
    let shift = CMatrix::identity(n, n) * mu;
    let mut right = null_vector(&(&m - &shift));
    let mut left = null_vector(&(m.adjoint() - shift.adjoint()));
    fix_phase(&mut right);
    fix_phase(&mut left);
    let dim = e.bond_dim;
    Ok((mu * scale, unvec(&right, dim), unvec(&left, dim).adjoint()))
}

/// Spectrum of the left fixed point in the gauge where the right fixed point
/// is the identity.
pub fn fixed_point_spectrum(e: &TransferOperator, degeneracy_tol: f64) -> Result<SchmidtSpectrum> {
    let (_, right, left) = fixed_point_matrices(e, degeneracy_tol)?;
    let dim = e.bond_dim;
    let (rvals, rvecs) = hermitian_eigh(&hermitian_part(&right));
    let rank = rvals.iter().filter(|&&v| v > RANK_TOL * rvals[0]).count();
    if rvals[0] <= 0.0 || rank < dim {
        return Err(Error::RankDeficientFixedPoint { rank, dim });
    }
    let sqrt_vals = CVector::from_iterator(dim, rvals.iter().map(|&v| r(v.sqrt())));
    let x = &rvecs * CMatrix::from_diagonal(&sqrt_vals);
    let gauged = x.adjoint() * left * &x;
    let deviation = max_abs(&(&gauged - gauged.adjoint())) / max_abs(&gauged).max(f64::MIN_POSITIVE);
    if deviation > 1e-8 {
        return Err(Error::NonDiagonalizableFixedPoint(deviation));
    }
    let (vals, _) = hermitian_eigh(&gauged);
    let sign = if vals.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let top = vals.iter().fold(0.0f64, |a, v| a.max((sign * v).abs()));
    let cleaned: Vec<f64> = vals
        .iter()
        .map(|v| sign * v)
        .map(|v| if v < RANK_TOL * top { 0.0 } else { v })
        .collect();
    SchmidtSpectrum::new(cleaned)
}

/// `E_inf = -log lambda_1`.
pub fn fixed_point_entanglement(spec: &SchmidtSpectrum) -> f64 {
    -spec.values[0].ln()
}

/// `S = -2 sum_i lambda_i log lambda_i`.
pub fn fixed_point_entropy(spec: &SchmidtSpectrum) -> f64 {
    -2.0 * spec.values.iter().map(|&v| v * v.ln()).sum::<f64>()
}

/// Transfer operator brought to a canonical gauge, normalized to unit
/// spectral radius.
///
/// Each irreducible block is gauged so its right fixed point is the identity.
/// Reducible operators are split along invariant subspaces of the site
/// matrices; couplings between blocks and nilpotent blocks are removed. Both
/// steps leave every amplitude `Tr(A_{p_1} ... A_{p_m})` unchanged.
#[derive(Debug, Clone)]
pub struct CanonicalTransfer {
    pub operator: TransferOperator,
    pub spectral_radius: f64,
    /// Block label of each bond index, `None` for removed indices.
    pub blocks: Vec<Option<usize>>,
}

pub fn canonical_transfer(e: &TransferOperator) -> Result<CanonicalTransfer> {
    let dim = e.bond_dim;
    let scale = max_abs(&e.matrix);
    if scale == 0.0 {
        return Err(Error::NullState);
    }
    let t = &e.matrix / r(scale);
    let lambda = crate::linalg::spectral_radius(&t);
    if lambda == 0.0 {
        return Err(Error::NullState);
    }
    let t = &t / r(lambda);
    let mut next_label = 0;
    let (g, blocks) = reduce(&t, dim, &mut next_label)?;
    let g_inv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InternalConsistency("canonical gauge is singular".into()))?;
    let gc = g.map(|z| z.conj());
    let gc_inv = g_inv.map(|z| z.conj());
    let mut gauged = kron(&g_inv, &gc_inv) * &t * kron(&g, &gc);
    let keep = |a: usize, b: usize| match (blocks[a], blocks[b]) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    };
    for row in 0..dim * dim {
        for col in 0..dim * dim {
            let (alpha, mu) = (row / dim, row % dim);
            let (beta, nu) = (col / dim, col % dim);
            if !(keep(alpha, beta) && keep(mu, nu)) {
                gauged[(row, col)] = r(0.0);
            }
        }
    }
    Ok(CanonicalTransfer {
        operator: TransferOperator {
            matrix: gauged,
            bond_dim: dim,
        },
        spectral_radius: lambda * scale,
        blocks,
    })
}

/// Positive semidefinite dominant fixed point of the completely positive map
/// `t`, found by repeated squaring of `(1 + t / lambda) / 2` applied to the
/// identity. The averaging suppresses peripheral eigenvalues other than
/// `lambda`; Jordan structure at `lambda` converges to its eigenvector.
fn psd_fixed_point(t: &CMatrix, n: usize, lambda: f64) -> CMatrix {
    let id = CMatrix::identity(n * n, n * n);
    let mut m = (&id + t / r(lambda)) * r(0.5);
    for _ in 0..64 {
        m = &m * &m;
        let s = max_abs(&m);
        if s > 0.0 {
            m /= r(s);
        }
    }
    let v = m * vec_rows(&CMatrix::identity(n, n));
    // rounding leaves the top eigenvalue of the averaged map slightly off the
    // real axis, and 2^64 powers turn that into an arbitrary global phase
    let raw = unvec(&v, n);
    let tr = raw.trace();
    let raw = if tr.norm() > 0.0 { raw * (tr.conj() / tr.norm()) } else { raw };
    let rm = hermitian_part(&raw);
    let s = max_abs(&rm);
    rm / r(s)
}

fn reduce(t: &CMatrix, n: usize, next_label: &mut usize) -> Result<(CMatrix, Vec<Option<usize>>)> {
    let lambda = crate::linalg::spectral_radius(t);
    if lambda <= 1e-12 {
        return Ok((CMatrix::identity(n, n), vec![None; n]));
    }
    let rm = psd_fixed_point(t, n, lambda);
    let (vals, vecs) = hermitian_eigh(&rm);
    let rank = vals.iter().filter(|&&v| v > RANK_TOL * vals[0]).count();
    if rank == 0 || vals[0].is_nan() {
        return Err(Error::InternalConsistency(format!("fixed point of the transfer operator has no positive part: {vals:?}")));
    }
    if rank == n {
        let label = *next_label;
        *next_label += 1;
        return Ok((psd_sqrt(&rm), vec![Some(label); n]));
    }
    // range(R) is invariant under every A_p: A_p is block upper triangular in
    // the basis (range, kernel) and the off-diagonal block drops out of traces.
    let q = vecs;
    let qc = q.map(|z| z.conj());
    let rotated = kron(&q.adjoint(), &qc.adjoint()) * t * kron(&q, &qc);
    let sub = |lo: usize, hi: usize| {
        let k = hi - lo;
        CMatrix::from_fn(k * k, k * k, |row, col| {
            let (a, m) = (lo + row / k, lo + row % k);
            let (b, v) = (lo + col / k, lo + col % k);
            rotated[(a * n + m, b * n + v)]
        })
    };
    let (g1, l1) = reduce(&sub(0, rank), rank, next_label)?;
    let (g2, l2) = reduce(&sub(rank, n), n - rank, next_label)?;
    let mut g = CMatrix::zeros(n, n);
    g.view_mut((0, 0), (rank, rank)).copy_from(&g1);
    g.view_mut((rank, rank), (n - rank, n - rank)).copy_from(&g2);
    let mut labels = l1;
    labels.extend(l2);
    Ok((q * g, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, real_matrix};
    use crate::models::{catalog_mps, ModelPoint};

    fn e_of(p: ModelPoint) -> TransferOperator {
        transfer_operator(&catalog_mps(&p).unwrap())
    }

    /// GHZ with `A = (1 +- sigma_z) / sqrt 2`, normalized so that `E` has
    /// eigenvalue 2; the catalog matrices `1 +- sigma_z` give twice this `E`.
    fn unit_ghz() -> TransferOperator {
        let mps = catalog_mps(&ModelPoint::ghz()).unwrap();
        transfer_operator(&UniformMps::new(mps.tensors().iter().map(|a| a / r(2f64.sqrt())).collect()).unwrap())
    }

    #[test]
    fn ghz_transfer_is_diagonal() {
        let e = unit_ghz();
        let expect = real_matrix(
            4,
            4,
            &[2.0, 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 2.0],
        );
        assert!(max_abs_diff(e_of(ModelPoint::ghz()).matrix(), &(&expect * r(2.0))) < 1e-15);
        assert!(max_abs_diff(e.matrix(), &expect) < 1e-14);
        let sq = rg_step(&e);
        assert!(max_abs_diff(sq.matrix(), &(expect * r(2.0))) < 1e-14);
    }

    #[test]
    fn model1_transfer_rows() {
        let g = 0.5;
        let e = e_of(ModelPoint::model1(g));
        let expect = real_matrix(
            4,
            4,
            &[1.0, g, g, g * g, 0., 0., 0., 0., 0., 0., 0., 0., 1., 1., 1., 1.],
        );
        assert!(max_abs_diff(e.matrix(), &expect) < 1e-15);
    }

    #[test]
    fn spectra_of_examples() {
        let check = |e: TransferOperator, expect: &[f64]| {
            let s = dominant_spectrum(&e);
            for (z, e) in s.iter().zip(expect) {
                assert!((z - r(*e)).norm() < 1e-10, "{s:?}");
            }
        };
        check(e_of(ModelPoint::aklt()), &[3.0, -1.0, -1.0, -1.0]);
        check(unit_ghz(), &[2.0, 2.0, 0.0, 0.0]);
        check(e_of(ModelPoint::model2(0.5)), &[1.5, -1.0, -1.0, 0.5]);
    }

    #[test]
    fn cluster_square_is_bell_projector() {
        let e = e_of(ModelPoint::cluster());
        let merged = transfer_operator(&merge_sites(&catalog_mps(&ModelPoint::cluster()).unwrap()).unwrap().to_mps().unwrap());
        let phi = real_matrix(
            4,
            4,
            &[1., 0., 0., 1., 0., 0., 0., 0., 0., 0., 0., 0., 1., 0., 0., 1.],
        ) * r(2.0);
        assert!(max_abs_diff(rg_step(&e).matrix(), &phi) < 1e-12);
        assert!(max_abs_diff(merged.matrix(), &phi) < 1e-12);
    }

    #[test]
    fn ghz_merge_keeps_diagonal_form() {
        let merged = merge_sites(&catalog_mps(&ModelPoint::ghz()).unwrap()).unwrap();
        assert_eq!(merged.singular_values.len(), 2);
        for s in &merged.singular_values {
            assert!((s - 4.0).abs() < 1e-12);
        }
        for t in &merged.tensors {
            assert!(t[(0, 1)].norm() < 1e-12 && t[(1, 0)].norm() < 1e-12);
        }
    }

    #[test]
    fn trivial_product_merge() {
        let mps = UniformMps::new(vec![real_matrix(1, 1, &[1.0])]).unwrap();
        let merged = merge_sites(&mps).unwrap();
        assert_eq!(merged.singular_values.len(), 1);
        assert!((merged.singular_values[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_examples() {
        let aklt = fixed_point_spectrum(&e_of(ModelPoint::aklt()), DEGENERACY_TOL).unwrap();
        assert!((aklt.values()[0] - 0.5).abs() < 1e-10 && (aklt.values()[1] - 0.5).abs() < 1e-10);
        let m1 = fixed_point_spectrum(&e_of(ModelPoint::model1(4.0)), DEGENERACY_TOL).unwrap();
        assert!((m1.values()[0] - 0.9).abs() < 1e-10 && (m1.values()[1] - 0.1).abs() < 1e-10);
        assert!((fixed_point_entanglement(&m1) - (10.0f64 / 9.0).ln()).abs() < 1e-10);
        let direct = -2.0 * (0.9 * 0.9f64.ln() + 0.1 * 0.1f64.ln());
        assert!((fixed_point_entropy(&m1) - direct).abs() < 1e-10);
        assert!(matches!(
            fixed_point_spectrum(&e_of(ModelPoint::ghz()), DEGENERACY_TOL),
            Err(Error::DegenerateDominantEigenvalue { .. })
        ));
        let product = SchmidtSpectrum::new(vec![1.0]).unwrap();
        assert_eq!(fixed_point_entanglement(&product), 0.0);
        assert_eq!(fixed_point_entropy(&product), 0.0);
    }

    #[test]
    fn canonical_form_of_jordan_cases() {
        // model 1 at g = 0 is the GHZ state; model 2 at g = 0 is a product state.
        let c = canonical_transfer(&e_of(ModelPoint::model1(0.0))).unwrap();
        let diag = real_matrix(4, 4, &[1., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 1.]);
        assert!(max_abs_diff(c.operator.matrix(), &diag) < 1e-10, "{}", c.operator.matrix());
        let c2 = canonical_transfer(&e_of(ModelPoint::model2(0.0))).unwrap();
        let (sq, _) = c2.operator.power(2);
        assert!(max_abs_diff(sq.matrix(), &CMatrix::identity(4, 4)) < 1e-10);
    }

    #[test]
    fn canonical_right_fixed_point_is_identity() {
        let c = canonical_transfer(&e_of(ModelPoint::model1(-0.4))).unwrap();
        let id = vec_rows(&CMatrix::identity(2, 2));
        let image = c.operator.matrix() * &id;
        assert!((image - id).norm() < 1e-10);
    }
}
