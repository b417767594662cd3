use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width at which golden-section and bisection searches stop.
pub const SEARCH_TOLERANCE: f64 = 1e-6;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Outcome of a maximisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakResult {
    pub location: f64,
    pub value: f64,
    /// Final bracket, narrower than [`SEARCH_TOLERANCE`].
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Golden-section maximisation of `f` on `bracket`.
///
/// The midpoint of the bracket must beat both endpoints.
pub fn golden_section_max<F>(f: F, bracket: (f64, f64), tolerance: f64) -> Result<PeakResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = ordered(bracket)?;
    let (fa, fb, fm) = (f(a)?, f(b)?, f(0.5 * (a + b))?);
    if !(fm > fa && fm > fb) {
        return Err(Error::Bracket(format!(
            "objective at the midpoint ({fm:.6e}) does not exceed both endpoints ({fa:.6e}, {fb:.6e}) of [{a}, {b}]; \
             pre-scan with a sweep and pass a bracket around the peak"
        )));
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    let mut iterations = 0;
    while b - a >= tolerance {
        iterations += 1;
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    let (location, value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    Ok(PeakResult { location, value, bracket: (a, b), iterations })
}

/// Which way the indicator flips as the variable increases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransitionKind {
    SuddenDeath,
    SuddenBirth,
}

/// Boundary of the set where `indicator` holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub location: f64,
    pub kind: TransitionKind,
    /// Closest evaluated point where the indicator holds.
    pub live_side: f64,
    /// Closest evaluated point where it does not.
    pub dead_side: f64,
}

/// Bisection on a boolean indicator that differs at the two ends of `bracket`.
pub fn bisect_indicator<F>(indicator: F, bracket: (f64, f64), tolerance: f64) -> Result<Boundary>
where
    F: Fn(f64) -> Result<bool>,
{
    let (lo, hi) = ordered(bracket)?;
    let (at_lo, at_hi) = (indicator(lo)?, indicator(hi)?);
    if at_lo == at_hi {
        return Err(Error::Bracket(format!(
            "indicator is {} at both ends of [{lo}, {hi}]",
            if at_lo { "positive" } else { "zero" }
        )));
    }
    let (mut live, mut dead) = if at_lo { (lo, hi) } else { (hi, lo) };
    while (dead - live).abs() >= tolerance {
        let mid = 0.5 * (live + dead);
        if indicator(mid)? {
            live = mid;
        } else {
            dead = mid;
        }
    }
    let kind = if at_lo { TransitionKind::SuddenDeath } else { TransitionKind::SuddenBirth };
    Ok(Boundary { location: 0.5 * (live + dead), kind, live_side: live, dead_side: dead })
}

fn ordered(bracket: (f64, f64)) -> Result<(f64, f64)> {
    let (a, b) = bracket;
    if a.is_finite() && b.is_finite() && a < b {
        Ok((a, b))
    } else {
        Err(Error::Bracket(format!("need finite a < b, got ({a}, {b})")))
    }
}
