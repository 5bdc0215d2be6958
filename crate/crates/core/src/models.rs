//! Catalog of example states, their parent Hamiltonians, and closed-form
//! reference curves.

use crate::criticality::Side;
use crate::error::{Error, Result};
use crate::linalg::{c, r, real_matrix, CMatrix, CVector};
use crate::mps::{ChainLength, UniformMps};
use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

/// Largest Hilbert-space dimension for which a dense Hamiltonian is built.
pub const HAMILTONIAN_BUDGET: u128 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Aklt,
    Ghz,
    AntiferroGhz,
    Cluster,
    Model1,
    Model2,
}

impl Model {
    pub fn has_coupling(self) -> bool {
        matches!(self, Model::Model1 | Model::Model2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Aklt => "aklt",
            Model::Ghz => "ghz",
            Model::AntiferroGhz => "antiferro-ghz",
            Model::Cluster => "cluster",
            Model::Model1 => "model1",
            Model::Model2 => "model2",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aklt" => Ok(Model::Aklt),
            "ghz" => Ok(Model::Ghz),
            "antiferro-ghz" | "afghz" => Ok(Model::AntiferroGhz),
            "cluster" => Ok(Model::Cluster),
            "model1" => Ok(Model::Model1),
            "model2" => Ok(Model::Model2),
            other => Err(Error::UnsupportedModel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPoint {
    pub model: Model,
    pub g: Option<f64>,
}

impl ModelPoint {
    /// Coupled models need a finite `g`; the others take none.
    pub fn new(model: Model, g: Option<f64>) -> Result<Self> {
        match (model.has_coupling(), g) {
            (true, Some(v)) if v.is_finite() => Ok(Self { model, g }),
            (true, Some(v)) => Err(Error::UnsupportedParameter(format!("{model} needs finite g, got {v}"))),
            (true, None) => Err(Error::UnsupportedParameter(format!("{model} needs a coupling g"))),
            (false, None) => Ok(Self { model, g }),
            (false, Some(_)) => Err(Error::UnsupportedParameter(format!("{model} takes no coupling"))),
        }
    }

    /// Attaches `g` when the model uses it and ignores it otherwise.
    pub fn with_coupling(model: Model, g: f64) -> Result<Self> {
        Self::new(model, model.has_coupling().then_some(g))
    }

    pub fn aklt() -> Self {
        Self { model: Model::Aklt, g: None }
    }

    pub fn ghz() -> Self {
        Self { model: Model::Ghz, g: None }
    }

    pub fn antiferro_ghz() -> Self {
        Self {
            model: Model::AntiferroGhz,
            g: None,
        }
    }

    pub fn cluster() -> Self {
        Self {
            model: Model::Cluster,
            g: None,
        }
    }

    pub fn model1(g: f64) -> Self {
        Self {
            model: Model::Model1,
            g: Some(g),
        }
    }

    pub fn model2(g: f64) -> Self {
        Self {
            model: Model::Model2,
            g: Some(g),
        }
    }

    fn coupling(&self) -> Result<f64> {
        Self::new(self.model, self.g)?;
        Ok(self.g.unwrap_or(0.0))
    }
}

fn sigma_z() -> CMatrix {
    real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

fn sigma_plus() -> CMatrix {
    real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0])
}

fn sigma_minus() -> CMatrix {
    real_matrix(2, 2, &[0.0, 0.0, 1.0, 0.0])
}

pub fn catalog_mps(point: &ModelPoint) -> Result<UniformMps> {
    let g = point.coupling()?;
    let s2 = std::f64::consts::SQRT_2;
    let mats = match point.model {
        Model::Aklt => vec![sigma_z(), sigma_plus() * r(s2), sigma_minus() * r(-s2)],
        Model::Ghz => vec![real_matrix(2, 2, &[2.0, 0.0, 0.0, 0.0]), real_matrix(2, 2, &[0.0, 0.0, 0.0, 2.0])],
        Model::Cluster => vec![
            real_matrix(2, 2, &[0.0, 0.0, 1.0, 1.0]),
            real_matrix(2, 2, &[1.0, -1.0, 0.0, 0.0]),
        ],
        Model::Model1 => vec![
            real_matrix(2, 2, &[0.0, 0.0, 1.0, 1.0]),
            real_matrix(2, 2, &[1.0, g, 0.0, 0.0]),
        ],
        // labels 0, 1, 2 carry S^z = 0, +1, -1
        Model::Model2 => vec![sigma_z() * r(-1.0), sigma_plus(), sigma_minus() * r(g)],
        Model::AntiferroGhz => {
            return Err(Error::UnsupportedModel(
                "the antiferromagnetic GHZ state has period two; use antiferro_ghz_state".into(),
            ))
        }
    };
    UniformMps::new(mats)
}

/// Per-block entanglement of model 1 from the three-branch closed form.
pub fn model1_per_block(g: f64, l: usize) -> f64 {
    if g < 0.0 {
        let a = -g;
        let t = (1.0 - a).abs();
        let li = l as i32;
        // (1 + sqrt(1 + a/(1-a)^2)) |1-a|^L rewritten to stay finite at a = 1
        let term = 0.5 * (t.powi(li) + t.powi(li - 1) * (t * t + a).sqrt()) / (1.0 + a).powi(li);
        LN_2 - term.ln_1p()
    } else {
        model1_nonnegative(g, l)
    }
}

/// Same as [`model1_per_block`] except on `g < 0`, where the square root
/// reads `sqrt(1 + 4|g|/(1-|g|)^2) = (1+|g|)/|1-|g||`. This branch agrees with
/// the transfer-operator maximization.
pub fn model1_per_block_rederived(g: f64, l: usize) -> f64 {
    if g < 0.0 {
        let a = -g;
        let t = (1.0 - a).abs();
        let li = l as i32;
        let term = 0.5 * (t.powi(li) + (1.0 + a) * t.powi(li - 1)) / (1.0 + a).powi(li);
        LN_2 - term.ln_1p()
    } else {
        model1_nonnegative(g, l)
    }
}

fn model1_nonnegative(g: f64, l: usize) -> f64 {
    if g == 0.0 {
        return 0.0;
    }
    let lf = l as f64;
    let gap = (1.0 - g).abs();
    // branch test (1+g)^L |1-g|^{-L} sqrt(g) > 1+g, in logs
    let lhs = lf * ((1.0 + g).ln() - gap.ln()) + 0.5 * g.ln();
    let rhs = (1.0 + g).ln();
    if lhs > rhs + 1e-12 || gap == 0.0 {
        LN_2 + (1.0 + g).ln() - 2.0 * (1.0 + g.sqrt()).ln()
    } else {
        let x = ((1.0 - g) / (1.0 + g)).powi(l as i32);
        let y = (g.ln() + (lf - 2.0) * (1.0 + g).ln() - lf * gap.ln()).exp();
        LN_2 - (x + y).ln_1p()
    }
}

pub fn model1_fixed_point(g: f64) -> f64 {
    if g > 0.0 {
        LN_2 + (1.0 + g).ln() - 2.0 * (1.0 + g.sqrt()).ln()
    } else if g == 0.0 {
        0.0
    } else {
        LN_2
    }
}

/// Per-block entanglement of model 2, symmetric in `g`.
pub fn model2_per_block(g: f64, l: usize) -> f64 {
    let a = g.abs();
    let li = l as i32;
    if a < 2.0 {
        LN_2 - (1.0 + a).powi(-li).ln_1p()
    } else {
        LN_2 - ((a - 1.0) / (1.0 + a)).powi(li).ln_1p()
    }
}

pub fn model2_fixed_point(g: f64) -> f64 {
    if g == 0.0 {
        0.0
    } else {
        LN_2
    }
}

pub fn aklt_per_block(l: usize) -> f64 {
    LN_2 - (-1.0f64 / 3.0).powi(l as i32).ln_1p()
}

/// Log fidelity per site shared by both coupled models.
pub fn fidelity_closed_form(g1: f64, g2: f64) -> f64 {
    let denom = (1.0 + g1.abs()) * (1.0 + g2.abs());
    let p = g1 * g2;
    if p >= 0.0 {
        ((1.0 + p.sqrt()).powi(2) / denom).ln()
    } else {
        ((1.0 + p.abs()) / denom).ln()
    }
}

/// Closed-form per-block entanglement where one is known.
pub fn per_block_closed_form(point: &ModelPoint, l: usize) -> Option<f64> {
    let g = point.g.unwrap_or(0.0);
    match point.model {
        Model::Aklt => Some(aklt_per_block(l)),
        Model::Ghz => Some(0.0),
        Model::Cluster if l >= 2 => Some(LN_2),
        Model::Model1 => Some(model1_per_block(g, l)),
        Model::Model2 if l.is_multiple_of(2) => Some(model2_per_block(g, l)),
        _ => None,
    }
}

/// Closed-form fixed-point entanglement where one is known.
pub fn fixed_point_closed_form(point: &ModelPoint) -> Option<f64> {
    let g = point.g.unwrap_or(0.0);
    match point.model {
        Model::Aklt | Model::Cluster => Some(LN_2),
        Model::Ghz => Some(0.0),
        Model::Model1 => Some(model1_fixed_point(g)),
        Model::Model2 => Some(model2_fixed_point(g)),
        Model::AntiferroGhz => None,
    }
}

/// Closed-form reference curves as functions of `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormCurve {
    PerBlock { model: Model, block_size: usize },
    PerBlockInfinity { model: Model },
    /// `f(g, reference)`.
    Fidelity { reference: f64 },
    /// One-sided slope of the per-block curve at `g = 0`.
    DerivativeOneSided { model: Model, block_size: usize, side: Side },
}

impl ClosedFormCurve {
    pub fn eval(&self, g: f64) -> Result<f64> {
        let unsupported = |m: Model| Error::UnsupportedModel(format!("no closed form for {m}"));
        match *self {
            ClosedFormCurve::PerBlock { model, block_size } => {
                per_block_closed_form(&ModelPoint::with_coupling(model, g)?, block_size).ok_or(unsupported(model))
            }
            ClosedFormCurve::PerBlockInfinity { model } => {
                fixed_point_closed_form(&ModelPoint::with_coupling(model, g)?).ok_or(unsupported(model))
            }
            ClosedFormCurve::Fidelity { reference } => Ok(fidelity_closed_form(g, reference)),
            ClosedFormCurve::DerivativeOneSided { model, block_size, side } => {
                let l = block_size as f64;
                match (model, side) {
                    (Model::Model1, Side::Right) => Ok(l - 0.5),
                    (Model::Model1, Side::Left) => Ok(-(l - 0.125)),
                    (Model::Model2, Side::Right) => Ok(l / 2.0),
                    (Model::Model2, Side::Left) => Ok(-l / 2.0),
                    _ => Err(unsupported(model)),
                }
            }
        }
    }
}

/// Spin-1 operators `(S^z, S^+, S^-)` in label order `m = 0, +1, -1`.
pub fn spin_one_operators() -> (CMatrix, CMatrix, CMatrix) {
    let s2 = std::f64::consts::SQRT_2;
    let sz = real_matrix(3, 3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0]);
    // S^+ |-1> = sqrt2 |0>, S^+ |0> = sqrt2 |+1>
    let sp = real_matrix(3, 3, &[0.0, 0.0, s2, s2, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let sm = sp.adjoint();
    (sz, sp, sm)
}

fn pauli() -> (CMatrix, CMatrix, CMatrix) {
    let x = real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let y = CMatrix::from_row_slice(2, 2, &[r(0.0), c(0.0, -1.0), c(0.0, 1.0), r(0.0)]);
    (x, y, sigma_z())
}

fn kron_all(ops: &[&CMatrix]) -> CMatrix {
    ops.iter()
        .skip(1)
        .fold(ops[0].clone(), |acc, op| acc.kronecker(*op))
}

/// Adds `op`, acting on sites `i, i+1, ..., i+k-1` (cyclically), for every `i`.
fn add_translated(h: &mut CMatrix, op: &CMatrix, d: usize, m: usize) {
    let dim = h.nrows();
    let mut k = 0;
    let mut size = 1;
    while size < op.nrows() {
        size *= d;
        k += 1;
    }
    let nonzero: Vec<(usize, usize, num_complex::Complex64)> = (0..op.nrows())
        .flat_map(|o| (0..op.ncols()).map(move |i| (o, i)))
        .filter_map(|(o, i)| (op[(o, i)].norm() != 0.0).then_some((o, i, op[(o, i)])))
        .collect();
    let mut digits = vec![0usize; m];
    for start in 0..m {
        let sites: Vec<usize> = (0..k).map(|j| (start + j) % m).collect();
        for col in 0..dim {
            let mut rest = col;
            for slot in digits.iter_mut().rev() {
                *slot = rest % d;
                rest /= d;
            }
            let local_in = sites.iter().fold(0, |acc, &s| acc * d + digits[s]);
            for &(o, i, v) in &nonzero {
                if i != local_in {
                    continue;
                }
                let mut out = digits.clone();
                let mut rem = o;
                for &s in sites.iter().rev() {
                    out[s] = rem % d;
                    rem /= d;
                }
                let row = out.iter().fold(0, |acc, &p| acc * d + p);
                h[(row, col)] += v;
            }
        }
    }
}

/// Dense periodic Hamiltonian whose ground state is the catalog state.
pub fn hamiltonian(point: &ModelPoint, m: ChainLength) -> Result<CMatrix> {
    let g = point.coupling()?;
    let m = m.get();
    let d = match point.model {
        Model::Model1 => 2,
        Model::Model2 => 3,
        other => return Err(Error::UnsupportedModel(format!("no Hamiltonian for {other}"))),
    };
    let entries = (d as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if entries > HAMILTONIAN_BUDGET {
        return Err(Error::BudgetExceeded {
            entries,
            budget: HAMILTONIAN_BUDGET,
        });
    }
    let dim = entries as usize;
    let mut h = CMatrix::zeros(dim, dim);
    match point.model {
        Model::Model1 => {
            let (x, _, z) = pauli();
            add_translated(&mut h, &(z.kronecker(&z) * r(2.0 * (g * g - 1.0))), d, m);
            add_translated(&mut h, &(&x * r(-(1.0 + g).powi(2))), d, m);
            add_translated(&mut h, &(kron_all(&[&z, &x, &z]) * r((g - 1.0).powi(2))), d, m);
        }
        _ => {
            let (sz, sp, sm) = spin_one_operators();
            let szsz = sz.kronecker(&sz);
            let dot = &szsz + (sp.kronecker(&sm) + sm.kronecker(&sp)) * r(0.5);
            let dot_sq = &dot * &dot;
            let szsz_sq = &szsz * &szsz;
            let anti = &szsz * &dot + &dot * &szsz;
            let two_site = &dot * r(2.0 + g * g) + dot_sq * r(2.0) - szsz_sq * r((g + 2.0).powi(2))
                + anti * r(g * (g + 2.0));
            add_translated(&mut h, &two_site, d, m);
            add_translated(&mut h, &(&sz * &sz * r(2.0 * (4.0 - g * g))), d, m);
        }
    }
    Ok(h)
}

/// Lowest eigenvalue of a Hermitian matrix; real symmetric input takes the
/// real solver.
pub fn ground_energy(h: &CMatrix) -> f64 {
    if h.iter().all(|z| z.im == 0.0) {
        let re = h.map(|z| z.re);
        let eig = nalgebra::SymmetricEigen::new(re);
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        let (vals, _) = crate::linalg::hermitian_eigh(h);
        *vals.last().expect("non-empty matrix")
    }
}

/// `<psi|H|psi> / <psi|psi>`.
pub fn energy_expectation(h: &CMatrix, psi: &CVector) -> f64 {
    let hv = h * psi;
    psi.dotc(&hv).re / psi.norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_validation() {
        assert!(ModelPoint::new(Model::Model1, None).is_err());
        assert!(ModelPoint::new(Model::Model1, Some(f64::NAN)).is_err());
        assert!(ModelPoint::new(Model::Aklt, Some(1.0)).is_err());
        assert!(ModelPoint::new(Model::Model2, Some(0.3)).is_ok());
        assert!(catalog_mps(&ModelPoint::model1(f64::INFINITY)).is_err());
        assert!(matches!(
            catalog_mps(&ModelPoint::antiferro_ghz()),
            Err(Error::UnsupportedModel(_))
        ));
        assert_eq!("Model2".parse::<Model>().unwrap(), Model::Model2);
    }

    #[test]
    fn model1_closed_form_examples() {
        assert!(model1_per_block(1.0, 4).abs() < 1e-15);
        assert!((model1_per_block(-1.0, 2) - LN_2).abs() < 1e-15);
        assert!((model1_per_block(4.0, 200) - model1_fixed_point(4.0)).abs() < 1e-12);
        assert!((model1_fixed_point(4.0) - (10.0f64 / 9.0).ln()).abs() < 1e-15);
        assert_eq!(model1_fixed_point(0.0), 0.0);
        assert_eq!(model1_fixed_point(-0.7), LN_2);
    }

    #[test]
    fn model1_branches_meet() {
        // on the switching point both g > 0 expressions agree
        for l in [2usize, 4, 8] {
            let lf = l as f64;
            let f = |g: f64| lf * ((1.0 + g).ln() - (1.0 - g).abs().ln()) + 0.5 * g.ln() - (1.0 + g).ln();
            let (mut lo, mut hi) = (1e-6, 0.999);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            assert!((model1_per_block(lo, l) - model1_per_block(hi, l)).abs() < 1e-9);
        }
    }

    #[test]
    fn model2_closed_form_examples() {
        assert!(model2_per_block(0.0, 2).abs() < 1e-15);
        assert!((model2_per_block(1.0, 2) - (8.0f64 / 5.0).ln()).abs() < 1e-14);
        assert!((model2_per_block(2.0, 2) - (9.0f64 / 5.0).ln()).abs() < 1e-14);
        assert!((model2_per_block(3.0, 2) - (8.0f64 / 5.0).ln()).abs() < 1e-14);
        assert!((model2_per_block(-3.0, 2) - model2_per_block(3.0, 2)).abs() < 1e-15);
        assert_eq!(model2_fixed_point(0.01), LN_2);
        assert_eq!(model2_fixed_point(0.0), 0.0);
        assert_eq!(model2_fixed_point(5.0), LN_2);
    }

    #[test]
    fn fidelity_closed_form_examples() {
        assert!(fidelity_closed_form(0.7, 0.7).abs() < 1e-15);
        assert!((fidelity_closed_form(1.0, 0.0) - 0.5f64.ln()).abs() < 1e-15);
        assert!((fidelity_closed_form(1.0, -1.0) - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        for p in [ModelPoint::model1(0.3), ModelPoint::model2(-1.2)] {
            let h = hamiltonian(&p, ChainLength::new(4).unwrap()).unwrap();
            assert!(crate::linalg::max_abs_diff(&h, &h.adjoint()) < 1e-12);
        }
        assert!(matches!(
            hamiltonian(&ModelPoint::model2(1.0), ChainLength::new(9).unwrap()),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(hamiltonian(&ModelPoint::aklt(), ChainLength::new(4).unwrap()).is_err());
    }
}
