//! Small dense linear-algebra helpers on top of nalgebra, specialised to the
//! complex matrices that show up in transfer-operator work.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Builds a complex matrix from real row-major entries.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| r(x)))
}

/// Kronecker product with row index `(i, k) -> i * b.nrows() + k`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Vec<C64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let (_, t) = m.clone().schur().unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Sorts eigenvalues by descending magnitude. Values whose magnitudes agree
/// to `rel_tol` form a tie group ordered by descending real part, then by
/// descending imaginary part.
pub fn sort_by_magnitude(mut vals: Vec<C64>, rel_tol: f64) -> Vec<C64> {
    vals.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let scale = vals.first().map(|z| z.norm()).unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(vals.len());
    let mut start = 0;
    while start < vals.len() {
        let head = vals[start].norm();
        let mut end = start + 1;
        while end < vals.len() && (head - vals[end].norm()).abs() <= rel_tol * scale {
            end += 1;
        }
        let mut group = vals[start..end].to_vec();
        group.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        out.extend(group);
        start = end;
    }
    out
}

/// Spectral radius of a square matrix.
pub fn spectral_radius(m: &CMatrix) -> f64 {
    eigenvalues(m).iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Exponent of growth used by [`log_spectral_radius`].
const GROWTH_POWER: u64 = 1 << 40;

/// `ln rho(m)` from the growth of `m^k` at `k = 2^40`. Unlike eigenvalues of
/// a defective matrix, which carry errors near `sqrt(eps)`, this is accurate
/// to about `ln(k) / k`. Returns `-inf` for nilpotent matrices.
pub fn log_spectral_radius(m: &CMatrix) -> f64 {
    let (mantissa, log_scale) = scaled_power(m, GROWTH_POWER);
    let top = max_abs(&mantissa);
    if top == 0.0 || !top.is_finite() {
        return f64::NEG_INFINITY;
    }
    (log_scale + top.ln()) / GROWTH_POWER as f64
}

/// Unit vector spanning the (numerical) kernel of `m`, taken from the right
/// singular vector with the smallest singular value.
pub fn null_vector(m: &CMatrix) -> CVector {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty matrix");
    v_t.row(idx).adjoint()
}

/// Rotates the global phase of `v` so that its largest-magnitude entry is
/// real and positive.
pub fn fix_phase(v: &mut CVector) {
    let mut best = ZERO;
    for z in v.iter() {
        if z.norm() > best.norm() {
            best = *z;
        }
    }
    if best.norm() > 0.0 {
        let phase = best.conj() / best.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in descending
/// order; columns of the returned matrix are the matching eigenvectors.
pub fn hermitian_eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |row, col| eig.eigenvectors[(row, order[col])]);
    (vals, vecs)
}

/// Eigenvector of the largest eigenvalue of a Hermitian matrix.
pub fn top_eigenvector(m: &CMatrix) -> (f64, CVector) {
    let (vals, vecs) = hermitian_eigh(m);
    (vals[0], vecs.column(0).into_owned())
}

/// Row-major reshape of a length-`n*n` vector into an `n x n` matrix.
pub fn unvec(v: &CVector, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| v[i * n + j])
}

pub fn vec_rows(m: &CMatrix) -> CVector {
    let (rows, cols) = m.shape();
    CVector::from_fn(rows * cols, |k, _| m[(k / cols, k % cols)])
}

/// `m^k` returned as `(mantissa, log_scale)` with `m^k = exp(log_scale) * mantissa`
/// and the mantissa's largest entry of unit magnitude. Keeps high powers of
/// operators with large spectral radius finite.
pub fn scaled_power(m: &CMatrix, k: u64) -> (CMatrix, f64) {
    let n = m.nrows();
    let mut result = CMatrix::identity(n, n);
    let mut result_log = 0.0;
    let mut base = m.clone();
    let mut base_log = 0.0;
    normalize_in_place(&mut base, &mut base_log);
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
            result_log += base_log;
            normalize_in_place(&mut result, &mut result_log);
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
            base_log *= 2.0;
            normalize_in_place(&mut base, &mut base_log);
        }
    }
    (result, result_log)
}

fn normalize_in_place(m: &mut CMatrix, log_scale: &mut f64) {
    let s = max_abs(m);
    if s > 0.0 && s.is_finite() {
        *m /= r(s);
        *log_scale += s.ln();
    }
}

/// `log |Tr(m^k)|` computed through [`scaled_power`]; `-inf` for a vanishing trace.
pub fn log_abs_trace_power(m: &CMatrix, k: u64) -> f64 {
    let (p, log_scale) = scaled_power(m, k);
    let t = p.trace();
    if t.norm() == 0.0 {
        f64::NEG_INFINITY
    } else {
        t.norm().ln() + log_scale
    }
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigh(m);
    let n = m.nrows();
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        n,
        vals.iter().map(|&v| r(v.max(0.0).sqrt())),
    ));
    &vecs * d * vecs.adjoint()
}

pub fn frobenius_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}
