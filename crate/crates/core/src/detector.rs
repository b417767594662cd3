//! Closed-form joint state of two static detectors near a reflecting plane.
//!
//! Every boundary term is written through the Faddeeva function at
//! `ζ = (i a - l)/2` with `a >= 0`, which stays in the upper half plane and
//! never overflows. The helper
//!
//! ```text
//! h(l, a) = -Im w((i a - l)/2) / l
//! ```
//!
//! carries the removable `1/l` singularity; below [`SERIES_THRESHOLD`] it is
//! replaced by its Taylor polynomial around `l = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{erfcx_nonneg, faddeeva_upper, FRAC_1_SQRT_PI};
use crate::xstate::{self, sqrt_clamped, SteeringResult, XState};

/// Arguments below this switch to the series branches.
pub const SERIES_THRESHOLD: f64 = 1e-3;

/// `p_a + p_b` must stay below this for a result to be flagged as trusted.
pub const TRUSTED_PROBABILITY_SUM: f64 = 0.5;

const SQRT_PI: f64 = 1.772_453_850_905_516;
const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Energy gaps (in units of `1/σ`) and coupling of the detector pair.
///
/// Detector B never has the smaller gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorPair {
    omega_a: f64,
    omega_b: f64,
    coupling: f64,
}

impl DetectorPair {
    pub fn new(omega_a: f64, omega_b: f64, coupling: f64) -> Result<Self> {
        check_gap("omega_a", omega_a)?;
        check_gap("omega_b", omega_b)?;
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(Error::invalid("coupling", format!("must be finite and positive, got {coupling}")));
        }
        if omega_b < omega_a {
            return Err(Error::invalid(
                "omega_b",
                format!("must not be smaller than omega_a ({omega_b} < {omega_a}); use DetectorPair::relabeled"),
            ));
        }
        Ok(Self { omega_a, omega_b, coupling })
    }

    pub fn identical(omega: f64, coupling: f64) -> Result<Self> {
        Self::new(omega, omega, coupling)
    }

    /// Accepts the gaps in either order. The flag is true when the labels
    /// were swapped so that B carries the larger gap.
    pub fn relabeled(first: f64, second: f64, coupling: f64) -> Result<(Self, bool)> {
        if second < first {
            Ok((Self::new(second, first, coupling)?, true))
        } else {
            Ok((Self::new(first, second, coupling)?, false))
        }
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }

    pub fn omega_b(&self) -> f64 {
        self.omega_b
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn gap_sum(&self) -> f64 {
        self.omega_a + self.omega_b
    }

    pub fn gap_difference(&self) -> f64 {
        self.omega_b - self.omega_a
    }

    pub fn with_omega_b(&self, omega_b: f64) -> Result<Self> {
        Self::new(self.omega_a, omega_b, self.coupling)
    }
}

fn check_gap(name: &'static str, omega: f64) -> Result<()> {
    if omega.is_finite() && omega >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and non-negative, got {omega}")))
    }
}

/// Orientation of the detector axis relative to the mirror plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alignment {
    /// Both detectors at the same distance from the mirror.
    Parallel,
    /// Detector A nearer the mirror, B directly behind it.
    Orthogonal,
}

impl Alignment {
    pub fn name(&self) -> &'static str {
        match self {
            Alignment::Parallel => "parallel",
            Alignment::Orthogonal => "orthogonal",
        }
    }
}

impl std::fmt::Display for Alignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Alignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parallel" => Ok(Alignment::Parallel),
            "orthogonal" => Ok(Alignment::Orthogonal),
            other => Err(Error::invalid("alignment", format!("expected parallel or orthogonal, got {other:?}"))),
        }
    }
}

/// Placement of the pair: separation `L` and distance `Δz` of the detector
/// nearest the mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryGeometry {
    alignment: Alignment,
    separation: f64,
    boundary_distance: f64,
}

impl BoundaryGeometry {
    pub fn new(alignment: Alignment, separation: f64, boundary_distance: f64) -> Result<Self> {
        check_length("separation", separation)?;
        check_length("boundary_distance", boundary_distance)?;
        Ok(Self { alignment, separation, boundary_distance })
    }

    pub fn parallel(separation: f64, boundary_distance: f64) -> Result<Self> {
        Self::new(Alignment::Parallel, separation, boundary_distance)
    }

    pub fn orthogonal(separation: f64, boundary_distance: f64) -> Result<Self> {
        Self::new(Alignment::Orthogonal, separation, boundary_distance)
    }

    pub fn alignment(&self) -> Alignment {
        self.alignment
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn boundary_distance(&self) -> f64 {
        self.boundary_distance
    }

    pub fn with_alignment(&self, alignment: Alignment) -> Self {
        Self { alignment, ..*self }
    }

    pub fn with_separation(&self, separation: f64) -> Result<Self> {
        Self::new(self.alignment, separation, self.boundary_distance)
    }

    pub fn with_boundary_distance(&self, boundary_distance: f64) -> Result<Self> {
        Self::new(self.alignment, self.separation, boundary_distance)
    }

    /// Distance between detector B and the mirror.
    pub fn boundary_distance_b(&self) -> f64 {
        match self.alignment {
            Alignment::Parallel => self.boundary_distance,
            Alignment::Orthogonal => self.boundary_distance + self.separation,
        }
    }

    /// Distance between detector A and the mirror image of detector B.
    pub fn image_distance(&self) -> f64 {
        let (l, dz) = (self.separation, self.boundary_distance);
        match self.alignment {
            Alignment::Parallel => l.hypot(2.0 * dz),
            Alignment::Orthogonal => l + 2.0 * dz,
        }
    }
}

fn check_length(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and positive, got {value}")))
    }
}

/// The four independent entries of the leading-order joint state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationBlock {
    pub p_a: f64,
    pub p_b: f64,
    /// Coefficient of `|01><10|`.
    pub c: Complex64,
    /// Coefficient of `|00><11|`.
    pub x: Complex64,
}

impl CorrelationBlock {
    /// Joint detector state. Fails when `p_a + p_b >= 1`.
    pub fn to_state(&self) -> Result<XState> {
        let sum = self.p_a + self.p_b;
        if sum >= 1.0 || sum.is_nan() {
            return Err(Error::Perturbative { sum });
        }
        XState::new([1.0 - sum, self.p_b, self.p_a, 0.0], self.x, self.c)
    }

    /// Steering and concurrence of the state built from this block.
    pub fn steering(&self) -> Result<SteeringResult> {
        let rho = self.to_state()?;
        let product = self.p_a * self.p_b;
        let (x, c) = (self.x.norm(), self.c.norm());
        let s_ba = one_way_steering(x, c, self.p_a, product);
        let s_ab = one_way_steering(x, c, self.p_b, product);
        Ok(SteeringResult::new(s_ab, s_ba, xstate::concurrence(&rho)))
    }

    pub fn is_trusted(&self) -> bool {
        self.p_a + self.p_b < TRUSTED_PROBABILITY_SUM
    }
}

/// Steering towards the detector whose own excitation probability is `p_steered`.
fn one_way_steering(x: f64, c: f64, p_steered: f64, product: f64) -> f64 {
    let own = 0.5 * p_steered - 0.5 * p_steered * p_steered;
    let outer = x - sqrt_clamped(0.5 * (1.0 + SQRT_3) * product + own);
    let inner = c - sqrt_clamped(0.5 * (1.0 - SQRT_3) * product + own);
    outer.max(inner).max(0.0)
}

/// Correlations, steering and the perturbative trust flag at one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub block: CorrelationBlock,
    pub steering: SteeringResult,
    pub trusted: bool,
}

/// `h(l, a)` for `l >= 0`, `a >= 0`.
fn boundary_kernel(l: f64, a: f64) -> f64 {
    if l < SERIES_THRESHOLD {
        let [d1, d3, d5] = odd_derivatives(a);
        let l2 = l * l;
        0.5 * d1 + l2 / 48.0 * d3 + l2 * l2 / 3840.0 * d5
    } else {
        -faddeeva_upper(Complex64::new(-0.5 * l, 0.5 * a)).im / l
    }
}

/// `Im w'`, `Im w'''` and `Im w⁽⁵⁾` at `i a/2`; even derivatives are real there.
fn odd_derivatives(a: f64) -> [f64; 3] {
    let zeta = Complex64::new(0.0, 0.5 * a);
    let mut prev = Complex64::new(erfcx_nonneg(0.5 * a), 0.0);
    let mut cur = -2.0 * zeta * prev + Complex64::new(0.0, 2.0 * FRAC_1_SQRT_PI);
    let mut out = [cur.im, 0.0, 0.0];
    for n in 1..5 {
        let next = -2.0 * zeta * cur - 2.0 * n as f64 * prev;
        prev = cur;
        cur = next;
        if n % 2 == 0 {
            out[n / 2] = cur.im;
        }
    }
    out
}

/// `h(l, a) - h(0, a)`, kept separate so that the small-distance probability
/// does not lose digits to cancellation.
fn boundary_kernel_excess(l: f64, a: f64) -> f64 {
    let [_, d3, d5] = odd_derivatives(a);
    let l2 = l * l;
    l2 / 48.0 * d3 + l2 * l2 / 3840.0 * d5
}

fn check_positive(op: &'static str, name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("{name} must be finite and positive, got {value}")))
    }
}

fn check_coupling(coupling: f64) -> Result<()> {
    if coupling.is_finite() && coupling > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("coupling", format!("must be finite and positive, got {coupling}")))
    }
}

/// Excitation probability of a single detector in free space.
pub fn free_space_probability(omega: f64, coupling: f64) -> Result<f64> {
    check_gap("omega", omega)?;
    check_coupling(coupling)?;
    let bracket = 1.0 - SQRT_PI * omega * erfcx_nonneg(omega);
    Ok(coupling * coupling / (4.0 * PI) * (-omega * omega).exp() * bracket)
}

/// Excitation probability of a detector at distance `dz` from the mirror.
pub fn transition_probability(omega: f64, dz: f64, coupling: f64) -> Result<f64> {
    check_positive("transition_probability", "dz", dz)?;
    let free = free_space_probability(omega, coupling)?;
    let prefactor = coupling * coupling / (4.0 * SQRT_PI) * (-omega * omega).exp();
    let l = 2.0 * dz;
    let p = if l < SERIES_THRESHOLD {
        -prefactor * boundary_kernel_excess(l, 2.0 * omega)
    } else {
        free - prefactor * boundary_kernel(l, 2.0 * omega)
    };
    Ok(p.max(0.0))
}

/// Auxiliary function entering the `C` correlation, built on the gap sum.
pub fn aux_f(l: f64, pair: &DetectorPair) -> Result<f64> {
    check_positive("aux_f", "l", l)?;
    let s = pair.gap_sum();
    Ok((-0.25 * s * s).exp() * boundary_kernel(l, s))
}

/// Auxiliary function entering the `X` correlation, built on the gap difference.
///
/// The imaginary part diverges like `1/l` as `l → 0`.
pub fn aux_g(l: f64, pair: &DetectorPair) -> Result<Complex64> {
    check_positive("aux_g", "l", l)?;
    let d = pair.gap_difference();
    let envelope = (-0.25 * l * l).exp();
    let (sin, cos) = (0.5 * d * l).sin_cos();
    let re = envelope * sin / l + (-0.25 * d * d).exp() * boundary_kernel(l, d);
    Ok(Complex64::new(re, envelope * cos / l))
}

fn correlation_prefactor(pair: &DetectorPair) -> f64 {
    pair.coupling * pair.coupling / (4.0 * SQRT_PI)
}

/// Probabilities and correlations next to the mirror.
pub fn correlations(pair: &DetectorPair, geom: &BoundaryGeometry) -> Result<CorrelationBlock> {
    let (l, image) = (geom.separation, geom.image_distance());
    let p_a = transition_probability(pair.omega_a, geom.boundary_distance, pair.coupling)?;
    let p_b = transition_probability(pair.omega_b, geom.boundary_distance_b(), pair.coupling)?;
    let k = correlation_prefactor(pair);
    let (s, d) = (pair.gap_sum(), pair.gap_difference());
    let c = k * (-0.25 * d * d).exp() * (aux_f(l, pair)? - aux_f(image, pair)?);
    let x = -k * (-0.25 * s * s).exp() * (aux_g(l, pair)? - aux_g(image, pair)?);
    Ok(CorrelationBlock { p_a, p_b, c: Complex64::new(c, 0.0), x })
}

/// The same quantities with the mirror removed.
pub fn boundary_free_correlations(pair: &DetectorPair, separation: f64) -> Result<CorrelationBlock> {
    let p_a = free_space_probability(pair.omega_a, pair.coupling)?;
    let p_b = free_space_probability(pair.omega_b, pair.coupling)?;
    let k = correlation_prefactor(pair);
    let (s, d) = (pair.gap_sum(), pair.gap_difference());
    let c = k * (-0.25 * d * d).exp() * aux_f(separation, pair)?;
    let x = -k * (-0.25 * s * s).exp() * aux_g(separation, pair)?;
    Ok(CorrelationBlock { p_a, p_b, c: Complex64::new(c, 0.0), x })
}

pub fn joint_state(pair: &DetectorPair, geom: &BoundaryGeometry) -> Result<XState> {
    correlations(pair, geom)?.to_state()
}

pub fn harvested_steering(pair: &DetectorPair, geom: &BoundaryGeometry) -> Result<SteeringResult> {
    correlations(pair, geom)?.steering()
}

pub fn evaluate(pair: &DetectorPair, geom: &BoundaryGeometry) -> Result<Evaluation> {
    let block = correlations(pair, geom)?;
    Ok(Evaluation { block, steering: block.steering()?, trusted: block.is_trusted() })
}

pub fn boundary_free_steering(pair: &DetectorPair, separation: f64) -> Result<SteeringResult> {
    boundary_free_correlations(pair, separation)?.steering()
}

/// Orthogonal minus parallel steering at equal `(L, Δz)`, returned as
/// `(ΔS_AB, ΔS_BA)`.
pub fn config_difference(pair: &DetectorPair, l: f64, dz: f64) -> Result<(f64, f64)> {
    let parallel = harvested_steering(pair, &BoundaryGeometry::parallel(l, dz)?)?;
    let orthogonal = harvested_steering(pair, &BoundaryGeometry::orthogonal(l, dz)?)?;
    Ok((orthogonal.s_ab - parallel.s_ab, orthogonal.s_ba - parallel.s_ba))
}
