//! Command implementations behind the `mpsrg` binary. Each command returns
//! its full output as text so nothing touches the disk until every grid point
//! has been computed.

use crate::error::{Error, Result};
use crate::geometric::{brute_force_geometric, entanglement_per_block_with, AnsatzKind, BruteForceOptions, MaximizeOptions};
use crate::models::{
    catalog_mps, energy_expectation, fidelity_closed_form, fixed_point_closed_form, ground_energy, hamiltonian,
    per_block_closed_form, Model, ModelPoint,
};
use crate::mps::{state_vector, ChainLength};
use crate::observables::fidelity_per_site;
use crate::transfer::{fixed_point_entanglement, fixed_point_spectrum, transfer_operator, DEGENERACY_TOL};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

/// Relative energy gap below which `verify` passes.
pub const VERIFY_TOL: f64 = 1e-8;
/// Block size standing in for the infinite block when the dominant
/// eigenvalue is degenerate and the fixed-point spectrum is undefined.
pub const INFINITE_BLOCK_PROXY: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockSize {
    Finite(usize),
    Infinite,
}

impl FromStr for BlockSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(BlockSize::Infinite);
        }
        match s.parse::<usize>() {
            Ok(l) if l > 0 => Ok(BlockSize::Finite(l)),
            _ => Err(Error::InvalidArgument(format!("block size `{s}` is neither a positive integer nor `inf`"))),
        }
    }
}

impl std::fmt::Display for BlockSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BlockSize::Finite(l) => write!(f, "{l}"),
            BlockSize::Infinite => f.write_str("inf"),
        }
    }
}

/// Parses a comma-separated list such as `2,4,8,inf`.
pub fn parse_block_sizes(s: &str) -> Result<Vec<BlockSize>> {
    let sizes = s.split(',').map(BlockSize::from_str).collect::<Result<Vec<_>>>()?;
    if sizes.is_empty() {
        return Err(Error::InvalidArgument("no block sizes given".into()));
    }
    Ok(sizes)
}

/// Evenly spaced couplings, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub g_min: f64,
    pub g_max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(g_min: f64, g_max: f64, steps: usize) -> Result<Self> {
        if !(g_min.is_finite() && g_max.is_finite() && g_min < g_max) {
            return Err(Error::InvalidArgument(format!("need g-min < g-max, got {g_min} and {g_max}")));
        }
        if steps < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 steps, got {steps}")));
        }
        Ok(Self { g_min, g_max, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        let span = self.g_max - self.g_min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.g_max } else { self.g_min + span * i as f64 / last })
            .collect()
    }
}

/// Display base for logarithms; values are computed in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBase(f64);

impl LogBase {
    pub fn natural() -> Self {
        LogBase(std::f64::consts::E)
    }

    pub fn convert(self, nats: f64) -> f64 {
        if self.0 == std::f64::consts::E {
            nats
        } else {
            nats / self.0.ln()
        }
    }
}

impl Default for LogBase {
    fn default() -> Self {
        Self::natural()
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "e" {
            return Ok(Self::natural());
        }
        match s.parse::<f64>() {
            Ok(b) if b.is_finite() && b > 0.0 && b != 1.0 => Ok(LogBase(b)),
            _ => Err(Error::InvalidArgument(format!("log base `{s}` must be `e` or a positive number other than 1"))),
        }
    }
}

/// C-style `%.12g`.
pub fn format_g(x: f64) -> String {
    format_sig(x, 12)
}

fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_field(x: Option<f64>) -> String {
    x.map(format_g).unwrap_or_default()
}

/// Writes `text` next to `path` and renames it into place, so a failed write
/// leaves no partial file behind.
pub fn write_output(path: &Path, text: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = std::path::PathBuf::from(tmp);
    let res = std::fs::write(&tmp, text).and_then(|_| std::fs::rename(&tmp, path));
    if res.is_err() {
        let _ = std::fs::remove_file(&tmp);
        let _ = std::fs::remove_file(path);
    }
    res
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub model: Model,
    pub grid: Grid,
    pub block_sizes: Vec<BlockSize>,
    pub seed: u64,
    pub restarts: usize,
    pub tol: f64,
    pub log_base: LogBase,
}

impl SweepConfig {
    pub fn new(model: Model, grid: Grid, block_sizes: Vec<BlockSize>) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::InvalidArgument("no block sizes given".into()));
        }
        let defaults = MaximizeOptions::default();
        Ok(Self {
            model,
            grid,
            block_sizes,
            seed: defaults.seed,
            restarts: defaults.restarts,
            tol: defaults.tol,
            log_base: LogBase::natural(),
        })
    }

    fn options(&self) -> MaximizeOptions {
        MaximizeOptions {
            restarts: self.restarts,
            tol: self.tol,
            seed: self.seed,
            ..MaximizeOptions::default()
        }
    }
}

/// Per-block entanglement of the infinite block: the fixed-point spectrum,
/// or a very long block when the dominant eigenvalue is degenerate.
pub fn infinite_block_entanglement(point: &ModelPoint, opts: &MaximizeOptions) -> Result<f64> {
    let e = transfer_operator(&catalog_mps(point)?);
    match fixed_point_spectrum(&e, DEGENERACY_TOL) {
        Ok(spec) => Ok(fixed_point_entanglement(&spec)),
        Err(Error::DegenerateDominantEigenvalue { .. }) => {
            Ok(entanglement_per_block_with(&e, INFINITE_BLOCK_PROXY, opts)?.per_block)
        }
        Err(err) => Err(err),
    }
}

/// Rows `g,L,per_block,closed_form,abs_diff`, ordered by grid index and then
/// by the order of the block sizes.
pub fn cmd_sweep(cfg: &SweepConfig) -> Result<String> {
    if cfg.model == Model::AntiferroGhz {
        return Err(Error::UnsupportedModel(format!("{} has no uniform representation", cfg.model)));
    }
    let opts = cfg.options();
    let jobs: Vec<(f64, BlockSize)> = cfg
        .grid
        .points()
        .into_iter()
        .flat_map(|g| cfg.block_sizes.iter().map(move |&l| (g, l)))
        .collect();
    let rows: Vec<(f64, BlockSize, f64, Option<f64>)> = jobs
        .par_iter()
        .map(|&(g, l)| {
            let point = ModelPoint::with_coupling(cfg.model, g)?;
            match l {
                BlockSize::Finite(l) => {
                    let e = transfer_operator(&catalog_mps(&point)?);
                    let value = entanglement_per_block_with(&e, l, &opts)?.per_block;
                    Ok((g, BlockSize::Finite(l), value, per_block_closed_form(&point, l)))
                }
                BlockSize::Infinite => {
                    let value = infinite_block_entanglement(&point, &opts)?;
                    Ok((g, l, value, fixed_point_closed_form(&point)))
                }
            }
        })
        .collect::<Result<_>>()?;
    let base = cfg.log_base;
    let mut out = String::from("g,L,per_block,closed_form,abs_diff\n");
    for (g, l, value, closed) in rows {
        let diff = closed.map(|c| (base.convert(value) - base.convert(c)).abs());
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            format_g(g),
            l,
            format_g(base.convert(value)),
            opt_field(closed.map(|c| base.convert(c))),
            opt_field(diff)
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityConfig {
    pub model: Model,
    pub grid: Grid,
    pub log_base: LogBase,
}

/// Rows `g1,g2,f_numeric,f_closed_form,abs_diff` over the square grid, `g1`
/// varying slowest.
pub fn cmd_fidelity(cfg: &FidelityConfig) -> Result<String> {
    if !matches!(cfg.model, Model::Model1 | Model::Model2) {
        return Err(Error::UnsupportedModel(format!("fidelity needs model1 or model2, got {}", cfg.model)));
    }
    let points = cfg.grid.points();
    let states = points
        .par_iter()
        .map(|&g| catalog_mps(&ModelPoint::with_coupling(cfg.model, g)?))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..points.len()).flat_map(|i| (0..points.len()).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| fidelity_per_site(&states[i], &states[j]))
        .collect::<Result<Vec<_>>>()?;
    let base = cfg.log_base;
    let mut out = String::from("g1,g2,f_numeric,f_closed_form,abs_diff\n");
    for (&(i, j), &f) in pairs.iter().zip(&values) {
        let (g1, g2) = (points[i], points[j]);
        let closed = fidelity_closed_form(g1, g2);
        let (f, closed) = (base.convert(f), base.convert(closed));
        let diff = if f == closed { 0.0 } else { (f - closed).abs() };
        let _ = writeln!(out, "{},{},{},{},{}", format_g(g1), format_g(g2), format_g(f), format_g(closed), format_g(diff));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzConfig {
    pub model: Model,
    pub grid: Grid,
    pub n_sites: usize,
    pub block_size: usize,
    pub seed: u64,
    pub restarts: usize,
    pub tol: f64,
    pub log_base: LogBase,
}

/// Entanglement densities (per site) of one state under the three product
/// families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzRow {
    pub g: f64,
    pub identical: f64,
    pub alternating: f64,
    pub arbitrary: f64,
}

pub fn ansatz_rows(cfg: &AnsatzConfig) -> Result<Vec<AnsatzRow>> {
    let m = ChainLength::new(cfg.n_sites)?;
    if cfg.block_size == 0 {
        return Err(Error::InvalidArgument("block size must be positive".into()));
    }
    let opts = BruteForceOptions {
        restarts: cfg.restarts,
        tol: cfg.tol,
        seed: cfg.seed,
        ..BruteForceOptions::default()
    };
    let kinds = [AnsatzKind::Identical, AnsatzKind::Alternating, AnsatzKind::Arbitrary].map(|k| k.with_block(cfg.block_size));
    cfg.grid
        .points()
        .par_iter()
        .map(|&g| {
            let point = ModelPoint::with_coupling(cfg.model, g)?;
            let mps = catalog_mps(&point)?;
            let sv = state_vector(&mps, m)?;
            let density = |kind| -> Result<f64> {
                let rep = brute_force_geometric(&sv.amplitudes, mps.phys_dim(), kind, &opts)?;
                Ok(rep.total.unwrap_or(0.0) / cfg.n_sites as f64)
            };
            Ok(AnsatzRow {
                g,
                identical: density(kinds[0])?,
                alternating: density(kinds[1])?,
                arbitrary: density(kinds[2])?,
            })
        })
        .collect()
}

/// Rows `g,E_identical,E_alternating,E_arbitrary`.
pub fn cmd_ansatz_compare(cfg: &AnsatzConfig) -> Result<String> {
    let rows = ansatz_rows(cfg)?;
    let base = cfg.log_base;
    let mut out = String::from("g,E_identical,E_alternating,E_arbitrary\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            format_g(row.g),
            format_g(base.convert(row.identical)),
            format_g(base.convert(row.alternating)),
            format_g(base.convert(row.arbitrary))
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub model: Model,
    pub g: Option<f64>,
    pub n_sites: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyReport {
    pub mps_energy: f64,
    pub ground_energy: f64,
    /// `|E_mps - E_0| / max(|E_0|, 1)`.
    pub gap: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.gap < VERIFY_TOL
    }
}

pub fn verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let point = ModelPoint::new(cfg.model, cfg.g)?;
    let m = ChainLength::new(cfg.n_sites)?;
    let h = hamiltonian(&point, m)?;
    let sv = state_vector(&catalog_mps(&point)?, m)?;
    let mps_energy = energy_expectation(&h, &sv.normalized());
    let e0 = ground_energy(&h);
    Ok(VerifyReport {
        mps_energy,
        ground_energy: e0,
        gap: (mps_energy - e0).abs() / e0.abs().max(1.0),
    })
}

/// Human-readable report ending in `RESULT: PASS|FAIL gap=<value>`.
pub fn cmd_verify(cfg: &VerifyConfig) -> Result<(String, bool)> {
    let rep = verify(cfg)?;
    let mut out = String::new();
    let _ = writeln!(out, "model: {}", cfg.model);
    if let Some(g) = cfg.g {
        let _ = writeln!(out, "g: {}", format_g(g));
    }
    let _ = writeln!(out, "sites: {}", cfg.n_sites);
    let _ = writeln!(out, "mps energy: {}", format_g(rep.mps_energy));
    let _ = writeln!(out, "ground energy: {}", format_g(rep.ground_energy));
    let _ = writeln!(out, "relative gap: {:e}", rep.gap);
    let verdict = if rep.passed() { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "RESULT: {verdict} gap={:e}", rep.gap);
    Ok((out, rep.passed()))
}
