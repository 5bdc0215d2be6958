//! One-sided derivatives with Richardson extrapolation, derivative jumps,
//! the discrete flow function beta(g, L), and exponent fits.

use crate::error::{Error, Result};
use crate::geometric::entanglement_per_block;
use crate::models::{catalog_mps, ModelPoint};
use crate::transfer::transfer_operator;
use std::f64::consts::LN_2;

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_LEVELS: usize = 4;
/// Per-halving growth of the raw differences that counts toward divergence.
/// A `h^{-1/2}` divergence grows by `sqrt 2` per halving, so the threshold
/// sits below that.
pub const DIVERGENCE_GROWTH: f64 = 1.189_207_115_002_721; // 2^{1/4}
/// Consecutive growing halvings needed to flag a divergence.
pub const DIVERGENCE_RUN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Central,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Central => "central",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeEstimate {
    pub value: f64,
    /// Difference between the two highest Richardson levels.
    pub error: f64,
    pub side: Side,
    pub step_sequence: Vec<f64>,
    pub richardson_order: usize,
    pub diverged: bool,
    /// Log-log slope of the raw differences against the step, when diverged.
    pub divergence_exponent: Option<f64>,
}

fn eval<F: Fn(f64) -> Result<f64>>(curve: &F, g: f64) -> Result<f64> {
    match curve(g) {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::EvaluationFailed(g)),
    }
}

/// Difference quotient on one side that never evaluates the curve at `g0`
/// itself; the error is a power series in `h`.
fn raw_difference<F: Fn(f64) -> Result<f64>>(curve: &F, g0: f64, side: Side, h: f64) -> Result<f64> {
    match side {
        Side::Right => Ok((eval(curve, g0 + 2.0 * h)? - eval(curve, g0 + h)?) / h),
        Side::Left => Ok((eval(curve, g0 - h)? - eval(curve, g0 - 2.0 * h)?) / h),
        Side::Central => Ok((eval(curve, g0 + h)? - eval(curve, g0 - h)?) / (2.0 * h)),
    }
}

pub fn one_sided_derivative<F: Fn(f64) -> Result<f64>>(
    curve: F,
    g0: f64,
    side: Side,
    h0: f64,
    levels: usize,
) -> Result<DerivativeEstimate> {
    if !(h0 > 0.0 && h0.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h0}")));
    }
    let steps: Vec<f64> = (0..=levels).map(|k| h0 / f64::powi(2.0, k as i32)).collect();
    let raw = steps
        .iter()
        .map(|&h| raw_difference(&curve, g0, side, h))
        .collect::<Result<Vec<f64>>>()?;

    // central differences carry only even powers of h
    let power = if side == Side::Central { 2 } else { 1 };
    let mut table = raw.clone();
    let mut tops = vec![raw[levels]];
    for level in 1..=levels {
        let factor = f64::powi(2.0, (power * level) as i32);
        table = table
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        tops.push(table[table.len() - 1]);
    }
    let value = tops[levels];
    let error = if levels > 0 { (value - tops[levels - 1]).abs() } else { 0.0 };

    let (diverged, exponent) = detect_divergence(&raw);
    Ok(DerivativeEstimate {
        value: if diverged { *raw.last().unwrap_or(&value) } else { value },
        error,
        side,
        step_sequence: steps,
        richardson_order: levels,
        diverged,
        divergence_exponent: exponent,
    })
}

/// Flags growth by more than [`DIVERGENCE_GROWTH`] over [`DIVERGENCE_RUN`]
/// consecutive halvings whose successive differences also grow, and returns
/// the fitted exponent `e` of `D(h) ~ h^e`.
fn detect_divergence(raw: &[f64]) -> (bool, Option<f64>) {
    let mut run = 0;
    let mut best = 0;
    for k in 1..raw.len() {
        let grows = raw[k - 1] != 0.0 && (raw[k] / raw[k - 1]).abs() > DIVERGENCE_GROWTH && raw[k].signum() == raw[k - 1].signum();
        run = if grows { run + 1 } else { 0 };
        best = best.max(run);
    }
    let deltas: Vec<f64> = raw.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let widening = deltas.len() >= 2 && {
        let n = deltas.len();
        deltas[n - 2] > 0.0 && -(deltas[n - 1] / deltas[n - 2]).log2() < 0.0
    };
    if best >= DIVERGENCE_RUN && widening {
        let n = raw.len();
        let slopes: Vec<f64> = (n - DIVERGENCE_RUN..n).map(|k| -(raw[k] / raw[k - 1]).abs().log2()).collect();
        let e = slopes.iter().sum::<f64>() / slopes.len() as f64;
        (true, Some(e))
    } else {
        (false, None)
    }
}

/// Right minus left derivative at `g0` with default steps.
pub fn derivative_jump<F: Fn(f64) -> Result<f64>>(curve: F, g0: f64) -> Result<f64> {
    let right = one_sided_derivative(&curve, g0, Side::Right, DEFAULT_STEP, DEFAULT_LEVELS)?;
    if right.diverged {
        return Err(Error::DivergedSide("right"));
    }
    let left = one_sided_derivative(&curve, g0, Side::Left, DEFAULT_STEP, DEFAULT_LEVELS)?;
    if left.diverged {
        return Err(Error::DivergedSide("left"));
    }
    Ok(right.value - left.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaValue {
    pub g: f64,
    pub block_size: usize,
    pub value: f64,
}

/// `(E_{2L}(g) - E_L(g)) / log 2` from the numeric per-block entanglement.
pub fn beta_function(point: &ModelPoint, l: usize) -> Result<BetaValue> {
    let e = transfer_operator(&catalog_mps(point)?);
    let small = entanglement_per_block(&e, l)?.per_block;
    let large = entanglement_per_block(&e, 2 * l)?.per_block;
    Ok(BetaValue {
        g: point.g.unwrap_or(0.0),
        block_size: l,
        value: (large - small) / LN_2,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub nu: f64,
    /// Fitted slope, equal to `d nu - 1`.
    pub exponent_raw: f64,
    /// Distances `|g - g_c|`, decreasing toward the critical point.
    pub grid: Vec<f64>,
    /// RMS of the log-log residuals.
    pub residual: f64,
    pub dimension: usize,
}

/// Least-squares fit of `log|dE/dg|` against `log|g - g_c|`; `nu = slope + 1`.
pub fn extract_nu(slopes: &[(f64, f64)]) -> Result<ScalingFit> {
    if slopes.len() < 4 {
        return Err(Error::DegenerateFit(format!("need at least 4 points, got {}", slopes.len())));
    }
    if slopes.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::DegenerateFit("all points must be positive and finite".into()));
    }
    let mut pts = slopes.to_vec();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return Err(Error::DegenerateFit("abscissae have zero variance".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(ScalingFit {
        nu: slope + 1.0,
        exponent_raw: slope,
        grid: pts.iter().map(|p| p.0).collect(),
        residual,
        dimension: 1,
    })
}
