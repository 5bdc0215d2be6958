//! Block geometric entanglement.
//!
//! The transfer-operator route maximizes the quartic form
//! `(r (x) conj r)^dag E^L (r (x) conj r)` over unit bond vectors `r`; the
//! brute-force route maximizes the overlap of a finite state vector with
//! product states directly.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, log_abs_trace_power, r, top_eigenvector, CMatrix, CVector, ZERO};
use crate::transfer::{canonical_transfer, TransferOperator};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Negative entanglement values down to this size are treated as rounding.
pub const CLAMP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximizeOptions {
    pub restarts: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            tol: 1e-12,
            seed: 0,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceOptions {
    pub restarts: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        Self {
            restarts: 50,
            tol: 1e-11,
            seed: 0,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Maximizer {
    BondVector(CVector),
    ProductFactors(Vec<CVector>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    pub block_size: usize,
    pub dmax_sq: f64,
    /// Natural log of `dmax_sq`, kept separately since `dmax_sq` overflows
    /// for long blocks.
    pub log_dmax_sq: f64,
    pub per_block: f64,
    pub total: Option<f64>,
    pub overlap_sq: Option<f64>,
    pub maximizer: Maximizer,
    /// Set for odd block sizes, where the identical-block ansatz can fail.
    pub odd_block: bool,
}

/// Result of maximizing the quartic form of one operator.
#[derive(Debug, Clone)]
pub struct QuarticMax {
    pub value: f64,
    pub log_value: f64,
    pub r: CVector,
}

/// `C_{alpha beta} = sum_{mu nu} P_{(alpha mu),(beta nu)} r_mu conj(r_nu)`, so
/// that the quartic form equals `r^dag C(r) r`.
fn contracted(p: &CMatrix, v: &CVector) -> CMatrix {
    let dim = v.len();
    CMatrix::from_fn(dim, dim, |a, b| {
        let mut acc = ZERO;
        for mu in 0..dim {
            for nu in 0..dim {
                acc += p[(a * dim + mu, b * dim + nu)] * v[mu] * v[nu].conj();
            }
        }
        acc
    })
}

fn quartic(p: &CMatrix, v: &CVector) -> Complex64 {
    let c = contracted(p, v);
    (v.adjoint() * c * v)[(0, 0)]
}

/// Number of linearization steps before switching to Newton polishing.
const LINEAR_STEPS: usize = 200;
const NEWTON_STEPS: usize = 100;

/// Ascent from one start. Linearization steps (`r` becomes the top
/// eigenvector of the Hermitian part of `C(r)`, rotated by the phase of the
/// current value) never decrease the value but crawl on flat landscapes, so
/// they are followed by Newton steps on the sphere.
fn ascend(p: &CMatrix, start: CVector, tol: f64, max_iter: usize) -> (f64, CVector, bool) {
    let mut v = start.normalize();
    let mut q = quartic(p, &v);
    let mut settled = false;
    for _ in 0..max_iter.min(LINEAR_STEPS) {
        let phase = if q.norm() > 0.0 { q.conj() / q.norm() } else { r(1.0) };
        let c = hermitian_part(&(contracted(p, &v) * phase));
        let (_, next) = top_eigenvector(&c);
        let qn = quartic(p, &next);
        if qn.norm() < q.norm() {
            settled = true;
            break;
        }
        let done = (qn.norm() - q.norm()).abs() <= tol * qn.norm().max(f64::MIN_POSITIVE);
        v = next;
        q = qn;
        if done {
            settled = true;
            break;
        }
    }
    let (value, v, polished) = newton_polish(p, v, tol, max_iter.saturating_sub(LINEAR_STEPS).clamp(1, NEWTON_STEPS));
    (value, v, polished || (settled && value >= q.norm()))
}

/// Real coordinates `(Re r, Im r)`.
fn to_real(v: &CVector) -> Vec<f64> {
    v.iter().map(|z| z.re).chain(v.iter().map(|z| z.im)).collect()
}

fn from_real(x: &[f64]) -> CVector {
    let n = x.len() / 2;
    CVector::from_fn(n, |i, _| Complex64::new(x[i], x[n + i]))
}

/// `Re(phase * Q(r))`, a real quartic polynomial in the real coordinates.
fn objective(p: &CMatrix, phase: Complex64, x: &[f64]) -> f64 {
    (phase * quartic(p, &from_real(x))).re
}

fn shifted(x: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(dir).map(|(a, b)| a + t * b).collect()
}

/// First and second directional derivatives. The five-point stencils are
/// exact for polynomials of degree four, so a unit step loses nothing.
fn directional(f: &dyn Fn(&[f64]) -> f64, x: &[f64], dir: &[f64]) -> (f64, f64) {
    let fm2 = f(&shifted(x, dir, -1.0));
    let fm1 = f(&shifted(x, dir, -0.5));
    let f0 = f(x);
    let fp1 = f(&shifted(x, dir, 0.5));
    let fp2 = f(&shifted(x, dir, 1.0));
    let h = 0.5;
    let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    (d1, d2)
}

fn newton_polish(p: &CMatrix, v: CVector, tol: f64, steps: usize) -> (f64, CVector, bool) {
    let q0 = quartic(p, &v);
    let phase = if q0.norm() > 0.0 { q0.conj() / q0.norm() } else { r(1.0) };
    let f = |x: &[f64]| objective(p, phase, x);
    let n = 2 * v.len();
    let mut x = to_real(&v);
    let mut fx = f(&x);
    let unit = |i: usize| -> Vec<f64> { (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect() };
    for _ in 0..steps {
        // tangent space: orthogonal to x and to the phase direction i r
        let jx: Vec<f64> = {
            let h = n / 2;
            (0..n).map(|k| if k < h { -x[h + k] } else { x[k - h] }).collect()
        };
        let project = |w: &[f64]| -> Vec<f64> {
            let a: f64 = w.iter().zip(&x).map(|(p, q)| p * q).sum();
            let b: f64 = w.iter().zip(&jx).map(|(p, q)| p * q).sum();
            w.iter().zip(&x).zip(&jx).map(|((w, xi), ji)| w - a * xi - b * ji).collect()
        };
        let grad: Vec<f64> = (0..n).map(|i| directional(&f, &x, &unit(i)).0).collect();
        let rgrad = project(&grad);
        let gnorm = rgrad.iter().map(|g| g * g).sum::<f64>().sqrt();
        let scale = fx.abs().max(f64::MIN_POSITIVE);
        if gnorm <= 1e-14 * scale {
            return (fx.abs(), from_real(&x), true);
        }
        let mut hess = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            hess[(i, i)] = directional(&f, &x, &unit(i)).1;
        }
        for i in 0..n {
            for j in i + 1..n {
                let plus: Vec<f64> = (0..n).map(|k| if k == i || k == j { 1.0 } else { 0.0 }).collect();
                let minus: Vec<f64> = (0..n).map(|k| if k == i { 1.0 } else if k == j { -1.0 } else { 0.0 }).collect();
                let h = (directional(&f, &x, &plus).1 - directional(&f, &x, &minus).1) / 4.0;
                hess[(i, j)] = h;
                hess[(j, i)] = h;
            }
        }
        // Riemannian Hessian of a degree-four form on the sphere
        let radial: f64 = grad.iter().zip(&x).map(|(g, xi)| g * xi).sum();
        for i in 0..n {
            hess[(i, i)] -= radial;
        }
        let eig = nalgebra::SymmetricEigen::new(hess);
        let mut step = vec![0.0; n];
        for k in 0..n {
            let col: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            let tangent = project(&col);
            let weight: f64 = tangent.iter().map(|t| t * t).sum();
            if weight < 0.5 {
                continue;
            }
            let coef: f64 = tangent.iter().zip(&rgrad).map(|(a, b)| a * b).sum::<f64>() / weight;
            let curvature = eig.eigenvalues[k].abs().max(1e-12 * scale);
            for (s, t) in step.iter_mut().zip(&tangent) {
                *s += coef / curvature * t;
            }
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = shifted(&x, &step, t);
            let norm = trial.iter().map(|a| a * a).sum::<f64>().sqrt();
            let trial: Vec<f64> = trial.iter().map(|a| a / norm).collect();
            let ft = f(&trial);
            if ft >= fx {
                let gain = ft - fx;
                x = trial;
                fx = ft;
                accepted = true;
                if gain <= tol * scale && gnorm <= tol.sqrt() * scale {
                    return (fx.abs(), from_real(&x), true);
                }
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // no ascent direction left at working precision
            return (fx.abs(), from_real(&x), gnorm <= tol.sqrt() * scale);
        }
    }
    (fx.abs(), from_real(&x), false)
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    if v.norm() == 0.0 {
        CVector::from_element(n, r(1.0))
    } else {
        v.normalize()
    }
}

fn maximize_quartic(p: &CMatrix, log_scale: f64, dim: usize, opts: &MaximizeOptions) -> Result<QuarticMax> {
    let mut starts: Vec<CVector> = (0..dim)
        .map(|i| CVector::from_fn(dim, |j, _| if i == j { r(1.0) } else { ZERO }))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    starts.extend((0..opts.restarts).map(|_| random_unit(&mut rng, dim)));
    let mut best: Option<(f64, CVector)> = None;
    let mut converged = false;
    for s in starts {
        let (val, v, ok) = ascend(p, s, opts.tol, opts.max_iter);
        converged |= ok;
        if best.as_ref().is_none_or(|(b, _)| val > *b) {
            best = Some((val, v));
        }
    }
    if !converged {
        return Err(Error::NoConvergence(opts.max_iter));
    }
    let (val, v) = best.expect("at least one start");
    Ok(QuarticMax {
        value: val * log_scale.exp(),
        log_value: val.ln() + log_scale,
        r: v,
    })
}

/// Maximum of `|(r (x) conj r)^dag E^L (r (x) conj r)|` over unit `r`.
pub fn dmax_sq(e: &TransferOperator, l: usize, opts: &MaximizeOptions) -> Result<QuarticMax> {
    if l == 0 {
        return Err(Error::InvalidArgument("block size must be at least 1".into()));
    }
    let (p, log_scale) = e.power(l as u64);
    maximize_quartic(p.matrix(), log_scale, e.bond_dim(), opts)
}

fn clamp_entanglement(v: f64) -> Result<f64> {
    if v < -CLAMP_TOL {
        return Err(Error::InternalConsistency(format!("negative entanglement {v:e}")));
    }
    Ok(v.max(0.0))
}

/// Per-block entanglement `L log lambda_dom - log dmax_sq`, the large-chain
/// limit. The maximization runs on the canonical form of `e`.
pub fn entanglement_per_block(e: &TransferOperator, l: usize) -> Result<EntanglementReport> {
    entanglement_per_block_with(e, l, &MaximizeOptions::default())
}

pub fn entanglement_per_block_with(e: &TransferOperator, l: usize, opts: &MaximizeOptions) -> Result<EntanglementReport> {
    let canon = canonical_transfer(e)?;
    let best = dmax_sq(&canon.operator, l, opts)?;
    let log_lambda = canon.spectral_radius.ln();
    let per_block = clamp_entanglement(-best.log_value)?;
    let log_dmax_sq = best.log_value + l as f64 * log_lambda;
    Ok(EntanglementReport {
        block_size: l,
        dmax_sq: log_dmax_sq.exp(),
        log_dmax_sq,
        per_block,
        total: None,
        overlap_sq: None,
        maximizer: Maximizer::BondVector(best.r),
        odd_block: l % 2 == 1,
    })
}

/// Total entanglement of `n` blocks of size `L` on a ring of `n L` sites:
/// `-log(dmax_sq^n / Tr E^{nL})`.
pub fn total_block_entanglement(e: &TransferOperator, l: usize, n: usize) -> Result<EntanglementReport> {
    total_block_entanglement_with(e, l, n, &MaximizeOptions::default())
}

pub fn total_block_entanglement_with(
    e: &TransferOperator,
    l: usize,
    n: usize,
    opts: &MaximizeOptions,
) -> Result<EntanglementReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("block count must be at least 1".into()));
    }
    let mut report = entanglement_per_block_with(e, l, opts)?;
    let log_trace = log_abs_trace_power(e.matrix(), (n * l) as u64);
    let total = log_trace - n as f64 * report.log_dmax_sq;
    report.total = Some(total);
    report.overlap_sq = Some((-total).exp());
    Ok(report)
}

/// Product-state families for the brute-force optimizer. Block variants use
/// one factor per group of `block_size` consecutive sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzKind {
    Identical,
    Alternating,
    Arbitrary,
    BlockIdentical(usize),
    BlockAlternating(usize),
    BlockArbitrary(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tying {
    Identical,
    Alternating,
    Free,
}

impl AnsatzKind {
    /// Same tying pattern with blocks of `block` sites.
    pub fn with_block(self, block: usize) -> Self {
        match self {
            AnsatzKind::Identical | AnsatzKind::BlockIdentical(_) => AnsatzKind::BlockIdentical(block),
            AnsatzKind::Alternating | AnsatzKind::BlockAlternating(_) => AnsatzKind::BlockAlternating(block),
            AnsatzKind::Arbitrary | AnsatzKind::BlockArbitrary(_) => AnsatzKind::BlockArbitrary(block),
        }
    }

    pub fn block_size(self) -> usize {
        match self {
            AnsatzKind::BlockIdentical(b) | AnsatzKind::BlockAlternating(b) | AnsatzKind::BlockArbitrary(b) => b,
            _ => 1,
        }
    }

    fn tying(self) -> Tying {
        match self {
            AnsatzKind::Identical | AnsatzKind::BlockIdentical(_) => Tying::Identical,
            AnsatzKind::Alternating | AnsatzKind::BlockAlternating(_) => Tying::Alternating,
            AnsatzKind::Arbitrary | AnsatzKind::BlockArbitrary(_) => Tying::Free,
        }
    }
}

/// Contraction of `psi` with `conj(phi_j)` for every block `j != k`.
fn contract_except(psi: &[Complex64], factors: &[CVector], dim: usize, k: usize) -> CVector {
    let nb = factors.len();
    let mut w: Vec<Complex64> = psi.to_vec();
    // leading blocks: index = i_j * rest + tail
    for phi in &factors[..k] {
        let rest = w.len() / dim;
        let mut next = vec![ZERO; rest];
        for (i, f) in phi.iter().enumerate() {
            let f = f.conj();
            let row = &w[i * rest..(i + 1) * rest];
            for (acc, x) in next.iter_mut().zip(row) {
                *acc += f * x;
            }
        }
        w = next;
    }
    // trailing blocks: index = head * dim + i_j
    for phi in factors[k + 1..nb].iter().rev() {
        let head = w.len() / dim;
        let conj: Vec<Complex64> = phi.iter().map(|z| z.conj()).collect();
        w = (0..head)
            .map(|h| w[h * dim..(h + 1) * dim].iter().zip(&conj).map(|(a, b)| a * b).sum())
            .collect();
    }
    CVector::from_vec(w)
}

fn overlap(v: &CVector, phi: &CVector) -> Complex64 {
    phi.dotc(v)
}

struct Run {
    overlap_sq: f64,
    factors: Vec<CVector>,
    converged: bool,
}

#[allow(clippy::too_many_arguments)]
fn optimize_once(
    psi: &[Complex64],
    norm_sq: f64,
    dim: usize,
    nb: usize,
    tying: Tying,
    mut factors: Vec<CVector>,
    tol: f64,
    max_iter: usize,
) -> Run {
    let group_of = |k: usize| match tying {
        Tying::Identical => 0,
        Tying::Alternating => k % 2,
        Tying::Free => k,
    };
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..max_iter {
        let mut current = 0.0;
        match tying {
            Tying::Free => {
                for k in 0..nb {
                    let v = contract_except(psi, &factors, dim, k);
                    let n = v.norm();
                    if n > 0.0 {
                        factors[k] = v / r(n);
                    }
                    current = n * n / norm_sq;
                }
            }
            Tying::Identical | Tying::Alternating => {
                let groups = if tying == Tying::Identical { 1 } else { 2 };
                for grp in 0..groups {
                    let mut u = CVector::zeros(dim);
                    for k in (0..nb).filter(|&k| group_of(k) == grp) {
                        let v = contract_except(psi, &factors, dim, k);
                        let o = overlap(&v, &factors[k]);
                        let phase = if o.norm() > 0.0 { o.conj() / o.norm() } else { r(1.0) };
                        u += v * phase;
                    }
                    if u.norm() > 0.0 {
                        let mixed = (&factors[grp] + u.normalize()) * r(0.5);
                        let phi = if mixed.norm() > 0.0 { mixed.normalize() } else { u.normalize() };
                        for k in (0..nb).filter(|&k| group_of(k) == grp) {
                            factors[k] = phi.clone();
                        }
                    }
                }
                let v = contract_except(psi, &factors, dim, 0);
                current = overlap(&v, &factors[0]).norm_sqr() / norm_sq;
            }
        }
        if (current - prev).abs() < tol {
            return Run {
                overlap_sq: current,
                factors,
                converged: true,
            };
        }
        prev = current;
    }
    Run {
        overlap_sq: prev,
        factors,
        converged: false,
    }
}

/// Maximizes `|<Phi|psi>|^2 / <psi|psi>` over the chosen product family.
pub fn brute_force_geometric(state: &CVector, d: usize, ansatz: AnsatzKind, opts: &BruteForceOptions) -> Result<EntanglementReport> {
    let len = state.len();
    let mut m = 0usize;
    let mut size = 1usize;
    while size < len {
        size *= d;
        m += 1;
    }
    if d < 1 || size != len || m == 0 {
        return Err(Error::DimensionMismatch(format!("state of length {len} is not a power of {d}")));
    }
    let block = ansatz.block_size();
    if block == 0 || !m.is_multiple_of(block) {
        return Err(Error::BlockMismatch { block, sites: m });
    }
    let nb = m / block;
    let tying = ansatz.tying();
    if tying == Tying::Alternating && nb % 2 == 1 {
        return Err(Error::BlockMismatch { block: 2 * block, sites: m });
    }
    let dim = d.pow(block as u32);
    let norm_sq = state.norm_squared();
    if norm_sq == 0.0 {
        return Err(Error::NullState);
    }
    let psi: Vec<Complex64> = state.iter().copied().collect();
    let runs: Vec<Run> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            let mut factors: Vec<CVector> = (0..nb).map(|_| random_unit(&mut rng, dim)).collect();
            match tying {
                Tying::Identical => {
                    let f = factors[0].clone();
                    factors.iter_mut().for_each(|x| *x = f.clone());
                }
                Tying::Alternating => {
                    let (a, b) = (factors[0].clone(), factors[1].clone());
                    factors.iter_mut().enumerate().for_each(|(k, x)| *x = if k % 2 == 0 { a.clone() } else { b.clone() });
                }
                Tying::Free => {}
            }
            optimize_once(&psi, norm_sq, dim, nb, tying, factors, opts.tol, opts.max_iter)
        })
        .collect();
    let best = runs
        .iter()
        .filter(|run| run.converged)
        .fold(None::<&Run>, |acc, run| match acc {
            Some(b) if b.overlap_sq >= run.overlap_sq => Some(b),
            _ => Some(run),
        })
        .ok_or(Error::NoConvergence(opts.max_iter))?;
    let overlap_sq = best.overlap_sq.min(1.0);
    let total = -overlap_sq.ln();
    Ok(EntanglementReport {
        block_size: block,
        dmax_sq: overlap_sq,
        log_dmax_sq: overlap_sq.ln(),
        per_block: total / nb as f64,
        total: Some(total),
        overlap_sq: Some(overlap_sq),
        maximizer: Maximizer::ProductFactors(best.factors.clone()),
        odd_block: block % 2 == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{catalog_mps, ModelPoint};
    use crate::mps::{state_vector, ChainLength};
    use crate::transfer::transfer_operator;
    use std::f64::consts::LN_2;

    fn e_of(p: ModelPoint) -> TransferOperator {
        transfer_operator(&catalog_mps(&p).unwrap())
    }

    #[test]
    fn dmax_examples() {
        let opts = MaximizeOptions::default();
        assert!((dmax_sq(&e_of(ModelPoint::aklt()), 2, &opts).unwrap().value - 5.0).abs() < 1e-9);
        let ghz = e_of(ModelPoint::ghz()).scaled(0.5);
        let best = dmax_sq(&ghz, 3, &opts).unwrap();
        assert!((best.value - 8.0).abs() < 1e-9);
        assert!(best.r.iter().filter(|z| z.norm() > 1e-6).count() == 1);
        assert!((dmax_sq(&e_of(ModelPoint::cluster()), 4, &opts).unwrap().value - 8.0).abs() < 1e-9);
    }

    #[test]
    fn per_block_examples() {
        let aklt = entanglement_per_block(&e_of(ModelPoint::aklt()), 2).unwrap();
        assert!((aklt.per_block - (9.0f64 / 5.0).ln()).abs() < 1e-10);
        for l in 1..5 {
            assert!(entanglement_per_block(&e_of(ModelPoint::ghz()), l).unwrap().per_block.abs() < 1e-12);
        }
        let m1 = entanglement_per_block(&e_of(ModelPoint::model1(1.0)), 8).unwrap();
        assert!(m1.per_block.abs() < 1e-10);
        assert!(!m1.odd_block);
    }

    #[test]
    fn total_examples() {
        let ghz = total_block_entanglement(&e_of(ModelPoint::ghz()), 2, 5).unwrap();
        assert!((ghz.total.unwrap() - LN_2).abs() < 1e-10);
        let cl = total_block_entanglement(&e_of(ModelPoint::cluster()), 2, 3).unwrap();
        assert!((cl.total.unwrap() - 3.0 * LN_2).abs() < 1e-10);
        assert!((cl.per_block - LN_2).abs() < 1e-10);
        let aklt = total_block_entanglement(&e_of(ModelPoint::aklt()), 2, 64).unwrap();
        assert!((aklt.total.unwrap() / 64.0 - (9.0f64 / 5.0).ln()).abs() < 1e-6);
    }

    #[test]
    fn brute_force_examples() {
        let opts = BruteForceOptions::default();
        let ghz = state_vector(&catalog_mps(&ModelPoint::ghz()).unwrap(), ChainLength::new(4).unwrap()).unwrap();
        let rep = brute_force_geometric(&ghz.amplitudes, 2, AnsatzKind::Arbitrary, &opts).unwrap();
        assert!((rep.total.unwrap() - LN_2).abs() < 1e-6);
        let cl = state_vector(&catalog_mps(&ModelPoint::cluster()).unwrap(), ChainLength::new(6).unwrap()).unwrap();
        let rep = brute_force_geometric(&cl.amplitudes, 2, AnsatzKind::Arbitrary, &opts).unwrap();
        assert!((rep.total.unwrap() - 3.0 * LN_2).abs() < 1e-6);
        let para = state_vector(&catalog_mps(&ModelPoint::model1(1.0)).unwrap(), ChainLength::new(8).unwrap()).unwrap();
        for kind in [AnsatzKind::Identical, AnsatzKind::Alternating, AnsatzKind::Arbitrary, AnsatzKind::BlockIdentical(2)] {
            let rep = brute_force_geometric(&para.amplitudes, 2, kind, &opts).unwrap();
            assert!(rep.total.unwrap().abs() < 1e-8, "{kind:?}");
        }
    }

    #[test]
    fn block_mismatch_is_rejected() {
        let v = CVector::from_element(8, r(1.0));
        let err = brute_force_geometric(&v, 2, AnsatzKind::BlockArbitrary(2), &BruteForceOptions::default());
        assert_eq!(err.unwrap_err(), Error::BlockMismatch { block: 2, sites: 3 });
    }
}
