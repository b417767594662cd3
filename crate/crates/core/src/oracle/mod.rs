//! Brute-force evaluation of the excitation probability and the two
//! correlation terms straight from their defining double integrals over
//! proper time, with the mirror entering only through the image-method
//! Wightman function.
//!
//! The integrals are taken in rotated coordinates `s = (τ + τ')/2`,
//! `u = τ - τ'` (unit Jacobian), where the Gaussian switching factorises as
//! `e^{-s²} e^{-u²/4}` and the Wightman function depends on `u` alone. The
//! `u` axis carries every near-singularity of the regulated correlator, so it
//! gets composite Gauss-Legendre panels graded towards `u = 0, ±r, ±r_img`;
//! the time-ordering step function becomes the sign of `u` and is exact.

mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::detector::{BoundaryGeometry, DetectorPair};
use crate::error::{Error, Result};

pub use quadrature::gauss_legendre;
use quadrature::{composite, graded_panels, pairwise_sum};

/// Longest panel on the `u` axis.
const MAX_PANEL_WIDTH: f64 = 1.0;

/// Magnitude below which extrapolation errors are judged in absolute terms.
pub const ABSOLUTE_FLOOR: f64 = 1e-12;

/// Imaginary residue allowed in a probability, relative to its magnitude.
pub const HERMITICITY_TOLERANCE: f64 = 1e-8;

/// Grid and regulator settings for the oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Half-width `T` of the proper-time box `[-T, T]²`.
    pub truncation: f64,
    /// Gauss-Legendre nodes on the `s` axis; the `u` panels use `nodes / 25`.
    pub nodes: usize,
    /// Regulator values, strictly decreasing.
    pub epsilons: Vec<f64>,
    /// Relative accuracy requested from the ε extrapolation.
    pub tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { truncation: 8.0, nodes: 400, epsilons: vec![0.02, 0.01, 0.005], tolerance: 1e-3 }
    }
}

impl QuadratureSpec {
    pub fn new(truncation: f64, nodes: usize, epsilons: Vec<f64>, tolerance: f64) -> Result<Self> {
        let spec = Self { truncation, nodes, epsilons, tolerance };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.truncation.is_finite() && self.truncation >= 6.0) {
            return Err(Error::invalid("truncation", format!("must be at least 6, got {}", self.truncation)));
        }
        if self.nodes < 200 {
            return Err(Error::invalid("nodes", format!("must be at least 200, got {}", self.nodes)));
        }
        if self.epsilons.len() < 3 {
            return Err(Error::invalid("epsilons", "at least three regulator values are needed"));
        }
        if self.epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0 && *e <= 0.05)) {
            return Err(Error::invalid("epsilons", "each value must lie in (0, 0.05]"));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("epsilons", "values must be strictly decreasing"));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance", format!("must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }

    fn panel_order(&self) -> usize {
        (self.nodes / 25).max(8)
    }
}

/// Arguments of the regulated Wightman function next to the mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WightmanArgs {
    pub dt: f64,
    pub spatial: f64,
    pub image: f64,
    pub epsilon: f64,
}

impl WightmanArgs {
    pub fn new(dt: f64, spatial: f64, image: f64, epsilon: f64) -> Result<Self> {
        if !(dt.is_finite() && spatial.is_finite() && image.is_finite()) {
            return Err(Error::invalid("dt", "arguments must be finite"));
        }
        if spatial < 0.0 || image < spatial {
            return Err(Error::invalid("image", format!("need 0 <= spatial <= image, got {spatial}, {image}")));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
        }
        Ok(Self { dt, spatial, image, epsilon })
    }
}

/// Free correlator minus its mirror image.
pub fn wightman(args: &WightmanArgs) -> Complex64 {
    let t = Complex64::new(args.dt, -args.epsilon);
    let t2 = t * t;
    let free = 1.0 / (t2 - args.spatial * args.spatial);
    let image = 1.0 / (t2 - args.image * args.image);
    -(free - image) / (4.0 * PI * PI)
}

/// How the Gaussian `s` integral is done.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    /// Gauss-Legendre on both axes of the box.
    Tensor,
    /// Closed-form `s` integral, quadrature in `u` only.
    Reduced,
}

/// One of the three defining integrals, stripped to what the quadrature needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleIntegral {
    prefactor: f64,
    s_frequency: f64,
    u_frequency: f64,
    spatial: f64,
    image: f64,
    time_ordered: bool,
}

impl DoubleIntegral {
    /// Excitation probability of one detector at distance `dz` from the mirror.
    pub fn probability(omega: f64, dz: f64, coupling: f64) -> Result<Self> {
        if !(dz.is_finite() && dz > 0.0) {
            return Err(Error::domain("numeric_probability", format!("dz must be positive, got {dz}")));
        }
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(Error::invalid("omega", format!("must be non-negative, got {omega}")));
        }
        Ok(Self {
            prefactor: coupling * coupling,
            s_frequency: 0.0,
            u_frequency: omega,
            spatial: 0.0,
            image: 2.0 * dz,
            time_ordered: false,
        })
    }

    /// The `|01><10|` correlation.
    pub fn correlation_c(pair: &DetectorPair, geom: &BoundaryGeometry) -> Self {
        Self {
            prefactor: pair.coupling() * pair.coupling(),
            s_frequency: pair.omega_a() - pair.omega_b(),
            u_frequency: 0.5 * pair.gap_sum(),
            spatial: geom.separation(),
            image: geom.image_distance(),
            time_ordered: false,
        }
    }

    /// The time-ordered `|00><11|` correlation.
    pub fn correlation_x(pair: &DetectorPair, geom: &BoundaryGeometry) -> Self {
        Self {
            prefactor: -pair.coupling() * pair.coupling(),
            s_frequency: pair.gap_sum(),
            u_frequency: -0.5 * pair.gap_difference(),
            spatial: geom.separation(),
            image: geom.image_distance(),
            time_ordered: true,
        }
    }

    /// Value of the integral at a fixed regulator.
    pub fn regulated(&self, epsilon: f64, spec: &QuadratureSpec, path: Path) -> Complex64 {
        let half_width = 2.0 * spec.truncation;
        let mut singular = vec![0.0];
        for r in [self.spatial, self.image] {
            if r > 0.0 {
                singular.extend([-r, r]);
            }
        }
        let panels = graded_panels(&singular, half_width, 0.25 * epsilon, MAX_PANEL_WIDTH);
        let u_nodes = composite(&panels, &gauss_legendre(spec.panel_order()));
        let u_terms: Vec<Complex64> = u_nodes
            .iter()
            .map(|&(u, w)| {
                let dt = if self.time_ordered { -u.abs() } else { u };
                let kernel = wightman(&WightmanArgs { dt, spatial: self.spatial, image: self.image, epsilon });
                w * (-0.25 * u * u).exp() * Complex64::from_polar(1.0, -self.u_frequency * u) * kernel
            })
            .collect();

        let total = match path {
            Path::Reduced => {
                let k = self.s_frequency;
                PI.sqrt() * (-0.25 * k * k).exp() * pairwise_sum(&u_terms)
            }
            Path::Tensor => {
                let t = spec.truncation;
                let rows: Vec<Complex64> = gauss_legendre(spec.nodes)
                    .iter()
                    .map(|&(x, w)| {
                        let s = t * x;
                        let weight = t * w * (-s * s).exp() * Complex64::from_polar(1.0, -self.s_frequency * s);
                        let row: Vec<Complex64> = u_terms.iter().map(|&g| weight * g).collect();
                        pairwise_sum(&row)
                    })
                    .collect();
                pairwise_sum(&rows)
            }
        };
        self.prefactor * total
    }

    /// Regulated values at every ε of `spec`, extrapolated to ε → 0.
    pub fn evaluate(&self, spec: &QuadratureSpec, path: Path) -> Result<Estimate<Complex64>> {
        spec.validate()?;
        let values: Vec<(f64, Complex64)> =
            spec.epsilons.iter().map(|&e| (e, self.regulated(e, spec, path))).collect();
        let estimate = extrapolate_epsilon(&values)?;
        let scale = estimate.value.norm().max(ABSOLUTE_FLOOR);
        if estimate.error > 10.0 * spec.tolerance * scale {
            return Err(Error::Convergence {
                op: "extrapolate_epsilon",
                detail: format!(
                    "successive extrapolants differ by {:.3e}, more than ten times the tolerance {:e} relative to {:.3e}",
                    estimate.error, spec.tolerance, scale
                ),
            });
        }
        Ok(estimate)
    }
}

/// A limit estimate together with an estimate of its error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// Richardson extrapolation to ε → 0 assuming a leading error linear in ε.
///
/// The limit comes from the two smallest regulators; the error estimate is
/// its distance from the limit obtained from the preceding pair.
pub fn extrapolate_epsilon(values: &[(f64, Complex64)]) -> Result<Estimate<Complex64>> {
    if values.len() < 3 {
        return Err(Error::invalid("epsilons", format!("need at least three regulator values, got {}", values.len())));
    }
    if values.iter().any(|v| !v.0.is_finite() || v.0 <= 0.0) || values.windows(2).any(|w| w[1].0 >= w[0].0) {
        return Err(Error::invalid("epsilons", "regulators must be positive and strictly decreasing"));
    }
    let line = |(e1, v1): (f64, Complex64), (e2, v2): (f64, Complex64)| (v2 * e1 - v1 * e2) / (e1 - e2);
    let n = values.len();
    let last = line(values[n - 2], values[n - 1]);
    let previous = line(values[n - 3], values[n - 2]);
    Ok(Estimate { value: last, error: (last - previous).norm() })
}

/// Excitation probability from the double integral.
pub fn numeric_probability(omega: f64, dz: f64, coupling: f64, spec: &QuadratureSpec) -> Result<Estimate<f64>> {
    let estimate = DoubleIntegral::probability(omega, dz, coupling)?.evaluate(spec, Path::Tensor)?;
    let value = estimate.value;
    if value.im.abs() > HERMITICITY_TOLERANCE * value.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::Convergence {
            op: "numeric_probability",
            detail: format!("imaginary residue {:.3e} in a probability of {:.3e}", value.im, value.re),
        });
    }
    Ok(Estimate { value: value.re, error: estimate.error })
}

/// Excitation probability of detector B, which in the orthogonal
/// arrangement sits at `Δz + L`.
pub fn numeric_probability_b(pair: &DetectorPair, geom: &BoundaryGeometry, spec: &QuadratureSpec) -> Result<Estimate<f64>> {
    numeric_probability(pair.omega_b(), geom.boundary_distance_b(), pair.coupling(), spec)
}

pub fn numeric_c(pair: &DetectorPair, geom: &BoundaryGeometry, spec: &QuadratureSpec) -> Result<Estimate<Complex64>> {
    DoubleIntegral::correlation_c(pair, geom).evaluate(spec, Path::Tensor)
}

pub fn numeric_x(pair: &DetectorPair, geom: &BoundaryGeometry, spec: &QuadratureSpec) -> Result<Estimate<Complex64>> {
    DoubleIntegral::correlation_x(pair, geom).evaluate(spec, Path::Tensor)
}
