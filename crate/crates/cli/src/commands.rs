use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use boundary_steering::detector::{self, Alignment, BoundaryGeometry, DetectorPair};
use boundary_steering::oracle::{numeric_c, numeric_probability, numeric_x, QuadratureSpec};
use boundary_steering::sweep::{
    self, figure_dataset, find_peak, find_transition, Direction, FigureOptions, FigureTable, Scale, SweepAxis,
    SweepVariable,
};
use boundary_steering::Complex64;

use crate::output::{self, emit, number, Provenance};
use crate::{ComputeOpts, DirectionArg, ObjectiveArg, FigureOpts, Format, GridArg, OptimizeOpts, PhysicsOpts, SweepOpts, VerifyOpts};

const DEFAULT_COUPLING: f64 = 1.0;

/// Bad flags or input files.
#[derive(Debug)]
pub struct Validation(pub String);

impl std::fmt::Display for Validation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Validation {}

/// `verify` found deviations above tolerance.
#[derive(Debug)]
pub struct VerifyFailed(pub String);

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerifyFailed {}

/// 2 for invalid input, 3 for numerical non-convergence, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<boundary_steering::Error>() {
            return if e.is_convergence() { 3 } else { 2 };
        }
        if cause.is::<Validation>() || cause.is::<serde_json::Error>() {
            return 2;
        }
        if cause.is::<VerifyFailed>() || cause.is::<std::io::Error>() {
            return 1;
        }
    }
    1
}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Validation(msg.into()))
}

/// Fully resolved single-point configuration; also the input schema of
/// `compute --from`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointConfig {
    pub alignment: Alignment,
    pub omega_a: f64,
    pub omega_b: f64,
    pub lambda: f64,
    pub l: f64,
    pub dz: f64,
}

impl PointConfig {
    fn model(&self) -> Result<(DetectorPair, BoundaryGeometry)> {
        Ok((
            DetectorPair::new(self.omega_a, self.omega_b, self.lambda)?,
            BoundaryGeometry::new(self.alignment, self.l, self.dz)?,
        ))
    }

    fn parameters(&self, swept: Option<SweepVariable>) -> Vec<(String, String)> {
        let show = |v: SweepVariable, x: f64| if swept == Some(v) { "swept".to_string() } else { x.to_string() };
        vec![
            ("alignment".into(), self.alignment.to_string()),
            ("omega_a".into(), self.omega_a.to_string()),
            ("omega_b".into(), show(SweepVariable::OmegaB, self.omega_b)),
            ("lambda".into(), self.lambda.to_string()),
            ("l".into(), show(SweepVariable::Separation, self.l)),
            ("dz".into(), show(SweepVariable::BoundaryDistance, self.dz)),
        ]
    }
}

struct Resolved {
    config: PointConfig,
    swapped: bool,
    defaults: Vec<String>,
}

/// Checks the physics flags. The flag of `swept` may be absent and is then
/// replaced by `placeholder`.
fn resolve(p: &PhysicsOpts, swept: Option<(SweepVariable, f64)>) -> Result<Resolved> {
    let is_swept = |v: SweepVariable| swept.is_some_and(|(s, _)| s == v);
    let placeholder = swept.map(|(_, x)| x).unwrap_or(f64::NAN);
    let need = |value: Option<f64>, flag: &str, v: Option<SweepVariable>| -> Result<f64> {
        match (value, v.is_some_and(is_swept)) {
            (_, true) => Ok(placeholder),
            (Some(x), false) => Ok(x),
            (None, false) => Err(invalid(format!("missing required flag {flag}"))),
        }
    };
    let alignment = p.alignment.ok_or_else(|| invalid("missing required flag --alignment"))?.into();
    let omega_a = need(p.omega_a, "--omega-a", None)?;
    let mut omega_b = need(p.omega_b, "--omega-b", Some(SweepVariable::OmegaB))?;
    let l = need(p.l, "--l", Some(SweepVariable::Separation))?;
    let dz = need(p.dz, "--dz", Some(SweepVariable::BoundaryDistance))?;
    let mut defaults = Vec::new();
    let lambda = p.lambda.unwrap_or_else(|| {
        defaults.push(format!("lambda = {DEFAULT_COUPLING}"));
        DEFAULT_COUPLING
    });
    let mut omega_a = omega_a;
    let mut swapped = false;
    if omega_b < omega_a && !is_swept(SweepVariable::OmegaB) {
        if !p.relabel {
            return Err(invalid(format!(
                "--omega-b ({omega_b}) is smaller than --omega-a ({omega_a}); pass --relabel to swap the detectors"
            )));
        }
        std::mem::swap(&mut omega_a, &mut omega_b);
        swapped = true;
    }
    let config = PointConfig { alignment, omega_a, omega_b, lambda, l, dz };
    config.model()?;
    Ok(Resolved { config, swapped, defaults })
}

#[derive(Serialize, Deserialize)]
struct ComputeRecord {
    #[serde(flatten)]
    config: PointConfig,
    p_a: f64,
    p_b: f64,
    c_re: f64,
    c_im: f64,
    x_re: f64,
    x_im: f64,
    abs_c: f64,
    abs_x: f64,
    s_ab: f64,
    s_ba: f64,
    asymmetry: f64,
    concurrence: f64,
    trusted: bool,
    swapped: bool,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    #[serde(flatten)]
    body: &'a T,
    provenance: &'a Provenance,
}

fn json<T: Serialize>(body: &T, provenance: &Provenance) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Document { body, provenance })?;
    s.push('\n');
    Ok(s)
}

fn read_config(path: &Path) -> Result<PointConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let config: PointConfig =
        serde_json::from_str(&text).with_context(|| format!("{} is not a compute record", path.display()))?;
    config.model()?;
    Ok(config)
}

pub fn compute(opts: ComputeOpts) -> Result<()> {
    let resolved = match &opts.from {
        Some(path) => Resolved { config: read_config(path)?, swapped: false, defaults: Vec::new() },
        None => resolve(&opts.physics, None)?,
    };
    let (pair, geom) = resolved.config.model()?;
    let e = detector::evaluate(&pair, &geom)?;
    let record = ComputeRecord {
        config: resolved.config,
        p_a: e.block.p_a,
        p_b: e.block.p_b,
        c_re: e.block.c.re,
        c_im: e.block.c.im,
        x_re: e.block.x.re,
        x_im: e.block.x.im,
        abs_c: e.block.c.norm(),
        abs_x: e.block.x.norm(),
        s_ab: e.steering.s_ab,
        s_ba: e.steering.s_ba,
        asymmetry: e.steering.asymmetry,
        concurrence: e.steering.concurrence,
        trusted: e.trusted,
        swapped: resolved.swapped,
    };
    let provenance = Provenance::new("compute", &resolved.config, resolved.defaults)?;
    let text = match opts.output.format {
        Format::Json => json(&record, &provenance)?,
        Format::Csv => {
            let mut out = output::comment_block(&provenance, &resolved.config.parameters(None));
            let _ = writeln!(out, "# axis: l");
            let _ = writeln!(out, "{}", output::STEERING_HEADER);
            let row = sweep::SweepRow::new(resolved.config.l, &e);
            let values = [row.axis, row.p_a, row.p_b, row.abs_c, row.abs_x, row.s_ab, row.s_ba, row.asymmetry, row.concurrence];
            let _ = writeln!(out, "{}", values.iter().map(|&v| number(v)).collect::<Vec<_>>().join(","));
            out
        }
    };
    emit(opts.output.out.as_deref(), &text)
}

#[derive(Serialize)]
struct SweepConfig {
    point: PointConfig,
    axis: SweepAxis,
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    parameters: &'a PointConfig,
    axis: &'a SweepAxis,
    swapped: bool,
    records: &'a [sweep::SweepRow],
}

pub fn sweep(opts: SweepOpts) -> Result<()> {
    let variable: SweepVariable = opts.axis.axis.into();
    let scale = if opts.log { Scale::Log } else { Scale::Linear };
    let axis = SweepAxis::new(variable, opts.start, opts.stop, opts.points, scale)?;
    let resolved = resolve(&opts.physics, Some((variable, axis.start)))?;
    let (pair, geom) = resolved.config.model()?;
    let table = sweep::sweep(&pair, &geom, &axis)?;
    let provenance = Provenance::new("sweep", &SweepConfig { point: resolved.config, axis }, resolved.defaults)?;
    let text = match opts.format {
        Format::Csv => {
            let mut parameters = resolved.config.parameters(Some(variable));
            parameters.push(("axis".into(), format!("{} ({:?})", variable.name(), scale).to_lowercase()));
            output::steering_csv(&table, &provenance, &parameters)
        }
        Format::Json => json(
            &SweepDocument { parameters: &resolved.config, axis: &axis, swapped: resolved.swapped, records: &table.rows },
            &provenance,
        )?,
    };
    emit(opts.out.as_deref(), &text)
}

#[derive(Serialize)]
struct OptimizeConfig {
    point: PointConfig,
    variable: SweepVariable,
    bracket: (f64, f64),
    search: String,
}

#[derive(Serialize)]
#[serde(untagged)]
enum SearchOutcome {
    Peak(sweep::PeakResult),
    Transition(sweep::TransitionResult),
}

pub fn optimize(opts: OptimizeOpts) -> Result<()> {
    let variable: SweepVariable = opts.axis.axis.into();
    let bracket = match opts.bracket.as_slice() {
        &[a, b] => (a, b),
        _ => return Err(invalid("--bracket takes exactly two values a,b")),
    };
    let resolved = resolve(&opts.physics, Some((variable, bracket.0)))?;
    let (pair, geom) = resolved.config.model()?;
    let (outcome, search) = match (opts.objective, opts.transition) {
        (_, Some(d)) => {
            let direction = match d {
                DirectionArg::Ab => Direction::AtoB,
                DirectionArg::Ba => Direction::BtoA,
            };
            let t = find_transition(&pair, &geom, variable, bracket, direction)?;
            (SearchOutcome::Transition(t), format!("transition {}", if direction == Direction::AtoB { "a_to_b" } else { "b_to_a" }))
        }
        (Some(o), None) => {
            let p = find_peak(&pair, &geom, variable, bracket, o.into())?;
            let name = match o {
                ObjectiveArg::Sab => "s_ab",
                ObjectiveArg::Sba => "s_ba",
                ObjectiveArg::Asym => "asymmetry",
            };
            (SearchOutcome::Peak(p), format!("peak {name}"))
        }
        (None, None) => return Err(invalid("either --objective or --transition is required")),
    };
    let config = OptimizeConfig { point: resolved.config, variable, bracket, search };
    let provenance = Provenance::new("optimize", &config, resolved.defaults)?;
    let text = match opts.output.format {
        Format::Json => json(&serde_json::json!({ "parameters": config, "result": outcome }), &provenance)?,
        Format::Csv => {
            let mut parameters = resolved.config.parameters(Some(variable));
            parameters.push(("search".into(), config.search.clone()));
            parameters.push(("bracket".into(), format!("{},{}", bracket.0, bracket.1)));
            let mut out = output::comment_block(&provenance, &parameters);
            match outcome {
                SearchOutcome::Peak(p) => {
                    let _ = writeln!(out, "location,value,bracket_lo,bracket_hi,iterations");
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        number(p.location),
                        number(p.value),
                        number(p.bracket.0),
                        number(p.bracket.1),
                        p.iterations
                    );
                }
                SearchOutcome::Transition(t) => {
                    let _ = writeln!(out, "location,kind,live_side,dead_side");
                    let _ = writeln!(
                        out,
                        "{},{:?},{},{}",
                        number(t.location),
                        t.kind,
                        number(t.live_side),
                        number(t.dead_side)
                    );
                }
            }
            out
        }
    };
    emit(opts.output.out.as_deref(), &text)
}

/// Grid shared with the acceptance suite.
pub fn verify_grid(grid: GridArg) -> Vec<PointConfig> {
    let base: &[(f64, f64, f64, f64)] = match grid {
        GridArg::Default => &[
            (0.0, 0.0, 0.5, 0.5),
            (0.0, 0.0, 1.0, 1.0),
            (0.0, 0.0, 2.0, 2.0),
            (0.1, 0.1, 0.5, 1.0),
            (0.1, 0.1, 1.0, 2.0),
            (0.1, 0.1, 2.0, 0.5),
            (1.0, 1.0, 0.5, 2.0),
            (1.0, 1.0, 1.0, 0.5),
            (1.0, 1.0, 2.0, 1.0),
            (0.1, 1.0, 1.0, 1.0),
        ],
        GridArg::Small => &[(0.1, 0.1, 1.0, 1.0), (0.1, 1.0, 0.5, 2.0)],
    };
    [Alignment::Parallel, Alignment::Orthogonal]
        .into_iter()
        .flat_map(|alignment| {
            base.iter()
                .map(move |&(omega_a, omega_b, l, dz)| PointConfig { alignment, omega_a, omega_b, lambda: 1.0, l, dz })
        })
        .collect()
}

#[derive(Serialize)]
struct Deviation {
    #[serde(flatten)]
    point: PointConfig,
    p_a: f64,
    p_b: f64,
    c: f64,
    x: f64,
}

impl Deviation {
    fn worst(&self) -> f64 {
        self.p_a.max(self.p_b).max(self.c).max(self.x)
    }
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn deviation(point: PointConfig, spec: &QuadratureSpec) -> Result<Deviation> {
    let (pair, geom) = point.model()?;
    let closed = detector::correlations(&pair, &geom)?;
    let pa = numeric_probability(pair.omega_a(), geom.boundary_distance(), pair.coupling(), spec)?.value;
    let pb = numeric_probability(pair.omega_b(), geom.boundary_distance_b(), pair.coupling(), spec)?.value;
    let c = numeric_c(&pair, &geom, spec)?.value;
    let x = numeric_x(&pair, &geom, spec)?.value;
    Ok(Deviation {
        point,
        p_a: ((pa - closed.p_a) / closed.p_a).abs(),
        p_b: ((pb - closed.p_b) / closed.p_b).abs(),
        c: relative(c, closed.c),
        x: relative(x, closed.x),
    })
}

pub fn verify(opts: VerifyOpts) -> Result<()> {
    let spec = QuadratureSpec::new(opts.truncation, opts.nodes, opts.epsilons.clone(), opts.tolerance)?;
    let points = verify_grid(opts.grid);
    let deviations = points
        .par_iter()
        .map(|&p| deviation(p, &spec))
        .collect::<Result<Vec<_>>>()?;

    println!(
        "{:<11} {:>7} {:>7} {:>5} {:>5} {:>10} {:>10} {:>10} {:>10}",
        "alignment", "omega_a", "omega_b", "l", "dz", "p_a", "p_b", "c", "x"
    );
    for d in &deviations {
        let p = &d.point;
        println!(
            "{:<11} {:>7} {:>7} {:>5} {:>5} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e}",
            p.alignment.to_string(),
            p.omega_a,
            p.omega_b,
            p.l,
            p.dz,
            d.p_a,
            d.p_b,
            d.c,
            d.x
        );
    }
    let worst = deviations.iter().map(Deviation::worst).fold(0.0, f64::max);
    let pass = worst <= opts.tolerance;
    println!(
        "max relative deviation {worst:.3e} over {} points (tolerance {:e}): {}",
        deviations.len(),
        opts.tolerance,
        if pass { "PASS" } else { "FAIL" }
    );

    if let Some(path) = &opts.out {
        let mut provenance = Provenance::new("verify", &(&spec, &points), Vec::new())?;
        provenance.quadrature = Some(spec.clone());
        let body = serde_json::json!({ "max_deviation": worst, "pass": pass, "records": deviations });
        output::write_atomic(path, &json(&body, &provenance)?)?;
    }
    if pass {
        Ok(())
    } else {
        bail!(VerifyFailed(format!("max relative deviation {worst:.3e} exceeds {:e}", opts.tolerance)))
    }
}

pub fn figure(opts: FigureOpts) -> Result<()> {
    let figure = opts.figure.into();
    let options = FigureOptions {
        omega_a: opts.omega_a,
        coupling: opts.lambda,
        boundary_distance: opts.dz,
        small_separation: opts.small_l,
        gap_sweep_separations: opts.gap_sweep_l.clone(),
        omega_b: opts.omega_b.clone(),
        points: opts.points,
    };
    let tables = figure_dataset(figure, &options)?;
    std::fs::create_dir_all(&opts.out).with_context(|| format!("cannot create {}", opts.out.display()))?;

    let mut defaults = vec![format!("lambda = {}", options.coupling)];
    if opts.omega_b.is_none() {
        defaults.push("omega_b = figure preset".into());
    }
    let provenance = Provenance::new("figure", &(figure, &options), defaults)?;
    for table in &tables {
        let ext = if opts.format == Format::Csv { "csv" } else { "json" };
        let path = opts.out.join(format!("{}.{ext}", table.label()));
        let mut parameters = vec![("figure".to_string(), figure.name().to_string()), ("curve".into(), table.label().into())];
        let text = match (table, opts.format) {
            (FigureTable::Steering(t), Format::Csv) => {
                parameters.extend(table_parameters(t));
                if let Some(r) = t.reference {
                    parameters.push(("reference".into(), "boundary-free steering in ref_s_ab, ref_s_ba".into()));
                    parameters.push(("ref_s_ab".into(), number(r.s_ab)));
                    parameters.push(("ref_s_ba".into(), number(r.s_ba)));
                }
                output::steering_csv(t, &provenance, &parameters)
            }
            (FigureTable::Difference(d), Format::Csv) => {
                parameters.push(("omega_a".into(), d.pair.omega_a().to_string()));
                parameters.push(("omega_b".into(), d.pair.omega_b().to_string()));
                parameters.push(("lambda".into(), d.pair.coupling().to_string()));
                parameters.push(("dz".into(), d.boundary_distance.to_string()));
                parameters.push(("axis".into(), "l (linear)".into()));
                parameters.push(("columns".into(), "orthogonal minus parallel steering".into()));
                output::difference_csv(d, &provenance, &parameters)
            }
            (table, Format::Json) => json(table, &provenance)?,
        };
        output::write_atomic(&path, &text)?;
    }
    eprintln!("wrote {} files to {}", tables.len(), opts.out.display());
    Ok(())
}

fn table_parameters(t: &sweep::SweepTable) -> Vec<(String, String)> {
    let v = t.variable;
    let show = |w: SweepVariable, x: f64| if w == v { "swept".to_string() } else { x.to_string() };
    vec![
        ("alignment".into(), t.geometry.alignment().to_string()),
        ("omega_a".into(), t.pair.omega_a().to_string()),
        ("omega_b".into(), show(SweepVariable::OmegaB, t.pair.omega_b())),
        ("lambda".into(), t.pair.coupling().to_string()),
        ("l".into(), show(SweepVariable::Separation, t.geometry.separation())),
        ("dz".into(), show(SweepVariable::BoundaryDistance, t.geometry.boundary_distance())),
        ("axis".into(), v.name().into()),
    ]
}
