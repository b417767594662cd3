//! Parameter sweeps over one geometric or spectral variable, peak and
//! transition search, and the preset plot datasets.

mod figures;
mod search;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{self, BoundaryGeometry, DetectorPair, Evaluation};
use crate::error::{Error, Result};
use crate::xstate::SteeringResult;

pub use figures::{figure_dataset, DifferenceRow, DifferenceTable, FigureId, FigureOptions, FigureTable};
pub use search::{bisect_indicator, golden_section_max, Boundary, PeakResult, TransitionKind, SEARCH_TOLERANCE};

/// The quantity a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Separation,
    BoundaryDistance,
    OmegaB,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::Separation => "separation",
            SweepVariable::BoundaryDistance => "boundary_distance",
            SweepVariable::OmegaB => "omega_b",
        }
    }

    /// Copies of `pair` and `geom` with this variable set to `value`.
    pub fn apply(&self, pair: &DetectorPair, geom: &BoundaryGeometry, value: f64) -> Result<(DetectorPair, BoundaryGeometry)> {
        match self {
            SweepVariable::Separation => Ok((*pair, geom.with_separation(value)?)),
            SweepVariable::BoundaryDistance => Ok((*pair, geom.with_boundary_distance(value)?)),
            SweepVariable::OmegaB => Ok((pair.with_omega_b(value)?, *geom)),
        }
    }
}

impl std::str::FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separation" | "l" => Ok(SweepVariable::Separation),
            "boundary_distance" | "dz" => Ok(SweepVariable::BoundaryDistance),
            "omega_b" | "omega-b" => Ok(SweepVariable::OmegaB),
            other => Err(Error::invalid("axis", format!("unknown sweep variable {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

/// Grid of values for one variable, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepAxis {
    pub fn new(variable: SweepVariable, start: f64, stop: f64, points: usize, scale: Scale) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(Error::invalid("start", format!("need finite start < stop, got {start}, {stop}")));
        }
        if points < 2 {
            return Err(Error::invalid("points", format!("need at least 2, got {points}")));
        }
        if scale == Scale::Log && start <= 0.0 {
            return Err(Error::invalid("start", format!("log axes need a positive start, got {start}")));
        }
        Ok(Self { variable, start, stop, points, scale })
    }

    pub fn linear(variable: SweepVariable, start: f64, stop: f64, points: usize) -> Result<Self> {
        Self::new(variable, start, stop, points, Scale::Linear)
    }

    pub fn log(variable: SweepVariable, start: f64, stop: f64, points: usize) -> Result<Self> {
        Self::new(variable, start, stop, points, Scale::Log)
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i + 1 == self.points {
                    return self.stop;
                }
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.start + t * (self.stop - self.start),
                    Scale::Log => (self.start.ln() + t * (self.stop / self.start).ln()).exp(),
                }
            })
            .collect()
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub abs_c: f64,
    pub abs_x: f64,
    pub s_ab: f64,
    pub s_ba: f64,
    pub asymmetry: f64,
    pub concurrence: f64,
    pub trusted: bool,
}

impl SweepRow {
    pub fn new(axis: f64, evaluation: &Evaluation) -> Self {
        let (b, s) = (&evaluation.block, &evaluation.steering);
        Self {
            axis,
            p_a: b.p_a,
            p_b: b.p_b,
            abs_c: b.c.norm(),
            abs_x: b.x.norm(),
            s_ab: s.s_ab,
            s_ba: s.s_ba,
            asymmetry: s.asymmetry,
            concurrence: s.concurrence,
            trusted: evaluation.trusted,
        }
    }
}

/// Output of [`sweep`]. `pair` and `geometry` hold the fixed parameters; the
/// swept variable in them is meaningless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub label: String,
    pub variable: SweepVariable,
    pub pair: DetectorPair,
    pub geometry: BoundaryGeometry,
    pub rows: Vec<SweepRow>,
    /// Steering with the mirror removed, when it does not depend on the axis.
    pub reference: Option<SteeringResult>,
}

impl SweepTable {
    pub fn column(&self, pick: impl Fn(&SweepRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(pick).collect()
    }
}

/// Evaluates the model at every point of `axis`, in parallel, keeping the
/// axis order.
pub fn sweep(pair: &DetectorPair, geom: &BoundaryGeometry, axis: &SweepAxis) -> Result<SweepTable> {
    let rows = axis
        .values()
        .into_par_iter()
        .map(|value| {
            evaluate_at(pair, geom, axis.variable, value).map(|e| SweepRow::new(value, &e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        label: format!("{}_sweep", axis.variable.name()),
        variable: axis.variable,
        pair: *pair,
        geometry: *geom,
        rows,
        reference: None,
    })
}

fn evaluate_at(pair: &DetectorPair, geom: &BoundaryGeometry, variable: SweepVariable, value: f64) -> Result<Evaluation> {
    variable
        .apply(pair, geom, value)
        .and_then(|(p, g)| detector::evaluate(&p, &g))
        .map_err(|e| Error::GridPoint { variable: variable.name(), value, source: Box::new(e) })
}

/// The steering quantity to maximise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Sab,
    Sba,
    Asymmetry,
}

impl Objective {
    pub fn pick(&self, s: &SteeringResult) -> f64 {
        match self {
            Objective::Sab => s.s_ab,
            Objective::Sba => s.s_ba,
            Objective::Asymmetry => s.asymmetry,
        }
    }
}

/// Direction of steering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    AtoB,
    BtoA,
}

impl Direction {
    pub fn pick(&self, s: &SteeringResult) -> f64 {
        match self {
            Direction::AtoB => s.s_ab,
            Direction::BtoA => s.s_ba,
        }
    }
}

/// Point where steering in one direction switches between zero and positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionResult {
    pub location: f64,
    pub kind: TransitionKind,
    pub direction: Direction,
    pub live_side: f64,
    pub dead_side: f64,
}

fn steering_at(pair: &DetectorPair, geom: &BoundaryGeometry, variable: SweepVariable, value: f64) -> Result<SteeringResult> {
    evaluate_at(pair, geom, variable, value).map(|e| e.steering)
}

/// Golden-section search for the maximum of `objective` along `variable`.
pub fn find_peak(
    pair: &DetectorPair,
    geom: &BoundaryGeometry,
    variable: SweepVariable,
    bracket: (f64, f64),
    objective: Objective,
) -> Result<PeakResult> {
    golden_section_max(
        |x| steering_at(pair, geom, variable, x).map(|s| objective.pick(&s)),
        bracket,
        SEARCH_TOLERANCE,
    )
}

/// Bisection for the point where steering in `direction` dies or is born.
pub fn find_transition(
    pair: &DetectorPair,
    geom: &BoundaryGeometry,
    variable: SweepVariable,
    bracket: (f64, f64),
    direction: Direction,
) -> Result<TransitionResult> {
    let b = bisect_indicator(
        |x| steering_at(pair, geom, variable, x).map(|s| direction.pick(&s) > 0.0),
        bracket,
        SEARCH_TOLERANCE,
    )?;
    Ok(TransitionResult { location: b.location, kind: b.kind, direction, live_side: b.live_side, dead_side: b.dead_side })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::Alignment;

    fn pair(a: f64, b: f64) -> DetectorPair {
        DetectorPair::new(a, b, 1.0).unwrap()
    }

    #[test]
    fn axis_values() {
        let axis = SweepAxis::linear(SweepVariable::Separation, 0.5, 2.5, 5).unwrap();
        assert_eq!(axis.values(), vec![0.5, 1.0, 1.5, 2.0, 2.5]);
        let axis = SweepAxis::log(SweepVariable::BoundaryDistance, 1e-4, 1.0, 5).unwrap();
        let v = axis.values();
        assert_eq!(v[0], 1e-4);
        assert_eq!(v[4], 1.0);
        assert!((v[2] - 1e-2).abs() < 1e-15);
        assert!(SweepAxis::log(SweepVariable::OmegaB, 0.0, 1.0, 5).is_err());
        assert!(SweepAxis::linear(SweepVariable::OmegaB, 1.0, 1.0, 5).is_err());
        assert!(SweepAxis::linear(SweepVariable::OmegaB, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn identical_parallel_sweep_has_no_asymmetry() {
        let geom = BoundaryGeometry::parallel(1.0, 1.0).unwrap();
        let axis = SweepAxis::linear(SweepVariable::Separation, 0.05, 4.0, 60).unwrap();
        let table = sweep(&pair(0.1, 0.1), &geom, &axis).unwrap();
        assert_eq!(table.rows.len(), 60);
        assert!(table.rows.iter().all(|r| r.asymmetry == 0.0 && r.s_ab >= 0.0));
    }

    #[test]
    fn sweeps_are_deterministic() {
        let geom = BoundaryGeometry::orthogonal(0.5, 1.0).unwrap();
        let axis = SweepAxis::linear(SweepVariable::OmegaB, 0.1, 4.0, 97).unwrap();
        let a = sweep(&pair(0.1, 0.1), &geom, &axis).unwrap();
        let b = sweep(&pair(0.1, 0.1), &geom, &axis).unwrap();
        assert_eq!(a, b);
        let serial: Vec<SweepRow> = axis
            .values()
            .iter()
            .map(|&x| SweepRow::new(x, &evaluate_at(&pair(0.1, 0.1), &geom, axis.variable, x).unwrap()))
            .collect();
        assert_eq!(a.rows, serial);
    }

    #[test]
    fn grid_errors_name_the_point() {
        let geom = BoundaryGeometry::parallel(1.0, 1.0).unwrap();
        let axis = SweepAxis::linear(SweepVariable::OmegaB, 0.0, 1.0, 3).unwrap();
        let err = sweep(&pair(0.5, 0.5), &geom, &axis).unwrap_err();
        match err {
            Error::GridPoint { variable, value, .. } => {
                assert_eq!(variable, "omega_b");
                assert_eq!(value, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn transition_and_peak_postconditions() {
        let geom = BoundaryGeometry::new(Alignment::Parallel, 1.0, 1.0).unwrap();
        let t = find_transition(&pair(0.1, 0.1), &geom, SweepVariable::Separation, (0.05, 4.0), Direction::BtoA).unwrap();
        assert_eq!(t.kind, TransitionKind::SuddenDeath);
        let live = steering_at(&pair(0.1, 0.1), &geom, SweepVariable::Separation, t.live_side).unwrap();
        let dead = steering_at(&pair(0.1, 0.1), &geom, SweepVariable::Separation, t.dead_side).unwrap();
        assert!(live.s_ba > 0.0 && dead.s_ba == 0.0);
        assert!((t.dead_side - t.live_side).abs() < SEARCH_TOLERANCE);

        let geom = BoundaryGeometry::parallel(0.05, 1.0).unwrap();
        let peak = find_peak(&pair(0.1, 0.1), &geom, SweepVariable::BoundaryDistance, (0.1, 4.0), Objective::Sba).unwrap();
        let (a, b) = peak.bracket;
        assert!(a <= peak.location && peak.location <= b);
        for end in [a, b] {
            let s = steering_at(&pair(0.1, 0.1), &geom, SweepVariable::BoundaryDistance, end).unwrap();
            assert!(peak.value >= s.s_ba);
        }
    }
}
