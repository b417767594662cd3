use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sweep, SweepAxis, SweepTable, SweepVariable};
use crate::detector::{self, Alignment, BoundaryGeometry, DetectorPair};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    /// Steering against separation, parallel pair.
    Fig2,
    /// Steering against separation, orthogonal pair.
    Fig4,
    /// Steering against boundary distance at small separation.
    Fig5,
    /// Steering against the gap of detector B.
    Fig6,
    /// Orthogonal minus parallel steering against separation.
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [FigureId::Fig2, FigureId::Fig4, FigureId::Fig5, FigureId::Fig6, FigureId::Fig7];

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
        }
    }
}

impl std::str::FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::invalid("figure", format!("expected one of fig2, fig4, fig5, fig6, fig7, got {s:?}")))
    }
}

/// Parameters shared by all figure datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    pub omega_a: f64,
    pub coupling: f64,
    /// Boundary distance for the separation and gap sweeps.
    pub boundary_distance: f64,
    /// Separation for the boundary-distance sweeps.
    pub small_separation: f64,
    /// Separations of the gap sweeps.
    pub gap_sweep_separations: Vec<f64>,
    /// Gaps of detector B, one curve each; `None` picks per-figure defaults.
    pub omega_b: Option<Vec<f64>>,
    pub points: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            omega_a: 0.1,
            coupling: 1.0,
            boundary_distance: 1.0,
            small_separation: 0.05,
            gap_sweep_separations: vec![0.05, 2.0],
            omega_b: None,
            points: 200,
        }
    }
}

impl FigureOptions {
    fn omega_b_or(&self, default: &[f64]) -> Vec<f64> {
        self.omega_b.clone().unwrap_or_else(|| default.to_vec())
    }

    fn pair(&self, omega_b: f64) -> Result<DetectorPair> {
        DetectorPair::new(self.omega_a, omega_b, self.coupling)
    }
}

/// Orthogonal minus parallel steering at one separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferenceRow {
    pub axis: f64,
    pub delta_s_ab: f64,
    pub delta_s_ba: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceTable {
    pub label: String,
    pub pair: DetectorPair,
    pub boundary_distance: f64,
    pub rows: Vec<DifferenceRow>,
}

/// One curve of a figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FigureTable {
    Steering(SweepTable),
    Difference(DifferenceTable),
}

impl FigureTable {
    pub fn label(&self) -> &str {
        match self {
            FigureTable::Steering(t) => &t.label,
            FigureTable::Difference(t) => &t.label,
        }
    }
}

fn labelled(mut table: SweepTable, label: String) -> FigureTable {
    table.label = label;
    FigureTable::Steering(table)
}

/// All curves of one figure.
pub fn figure_dataset(figure: FigureId, options: &FigureOptions) -> Result<Vec<FigureTable>> {
    let n = options.points;
    let dz = options.boundary_distance;
    match figure {
        FigureId::Fig2 | FigureId::Fig4 => {
            let (alignment, defaults) = if figure == FigureId::Fig2 {
                (Alignment::Parallel, &[0.1, 0.3, 0.5, 1.0][..])
            } else {
                (Alignment::Orthogonal, &[0.1, 0.3, 1.0][..])
            };
            let axis = SweepAxis::linear(SweepVariable::Separation, 0.05, 4.0, n)?;
            options
                .omega_b_or(defaults)
                .into_iter()
                .map(|wb| {
                    let geom = BoundaryGeometry::new(alignment, 1.0, dz)?;
                    let table = sweep(&options.pair(wb)?, &geom, &axis)?;
                    Ok(labelled(table, format!("{}_omega_b_{wb}", figure.name())))
                })
                .collect()
        }
        FigureId::Fig5 => {
            let l = options.small_separation;
            let axis = SweepAxis::log(SweepVariable::BoundaryDistance, 1e-4, 8.0, n)?;
            let mut out = Vec::new();
            for wb in options.omega_b_or(&[0.1, 1.0]) {
                let pair = options.pair(wb)?;
                let reference = detector::boundary_free_steering(&pair, l)?;
                for alignment in [Alignment::Parallel, Alignment::Orthogonal] {
                    let mut table = sweep(&pair, &BoundaryGeometry::new(alignment, l, 1.0)?, &axis)?;
                    table.reference = Some(reference);
                    out.push(labelled(table, format!("fig5_{alignment}_omega_b_{wb}")));
                }
            }
            Ok(out)
        }
        FigureId::Fig6 => {
            let axis = SweepAxis::linear(SweepVariable::OmegaB, options.omega_a.max(0.1), 4.0, n)?;
            let pair = options.pair(options.omega_a)?;
            let mut out = Vec::new();
            for alignment in [Alignment::Parallel, Alignment::Orthogonal] {
                for &l in &options.gap_sweep_separations {
                    let table = sweep(&pair, &BoundaryGeometry::new(alignment, l, dz)?, &axis)?;
                    out.push(labelled(table, format!("fig6_{alignment}_l_{l}")));
                }
            }
            Ok(out)
        }
        FigureId::Fig7 => {
            let axis = SweepAxis::linear(SweepVariable::Separation, 0.05, 4.0, n)?;
            options
                .omega_b_or(&[0.1, 0.5, 1.0])
                .into_iter()
                .map(|wb| {
                    let pair = options.pair(wb)?;
                    let rows = axis
                        .values()
                        .into_par_iter()
                        .map(|l| {
                            detector::config_difference(&pair, l, dz)
                                .map(|(delta_s_ab, delta_s_ba)| DifferenceRow { axis: l, delta_s_ab, delta_s_ba })
                                .map_err(|e| Error::GridPoint { variable: "separation", value: l, source: Box::new(e) })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(FigureTable::Difference(DifferenceTable {
                        label: format!("fig7_omega_b_{wb}"),
                        pair,
                        boundary_distance: dz,
                        rows,
                    }))
                })
                .collect()
        }
    }
}
