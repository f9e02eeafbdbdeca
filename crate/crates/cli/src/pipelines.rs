//! The four pipelines. Each writes its own outputs before reporting a failure.

use ahcenter::charges::{self, ChargeError, ChargeSettings, Integrability, KidLabel, Status};
use ahcenter::cmc::{center_limit, CmcError, CmcSolver};
use ahcenter::evolution::{verify_evolution, EvolutionError, EvolutionReport};
use ahcenter::linalg::Vector;
use ahcenter::minkowski::LorentzTransform;
use ahcenter::models::{ChartData, DecaySample, ModelError};
use ahcenter::sphere::SphericalGrid;
use log::{info, warn};
use serde::Serialize;

use crate::config::Config;
use crate::error::CliError;
use crate::report::{header, Cell, Output, PointRecord, SCHEMA_VERSION};

pub struct Context {
    pub config: Config,
    pub data: ChartData,
    pub base: ChartData,
    pub boost: Option<LorentzTransform>,
    pub out: Output,
}

impl Context {
    pub fn new(config: Config, out: Output) -> Result<Self, CliError> {
        let (data, base) = config.build_model()?;
        let boost = config.boost()?;
        Ok(Self { config, data, base, boost, out })
    }
}

fn charge_error(e: ChargeError) -> CliError {
    match e {
        ChargeError::InvalidKid(_) | ChargeError::InvalidLadder(_) => CliError::Config(e.to_string()),
        e => CliError::numeric(e),
    }
}

fn cmc_error(e: CmcError) -> CliError {
    match e {
        CmcError::Dimension(_) | CmcError::Schedule(_) | CmcError::Settings(_) => CliError::Config(e.to_string()),
        e => CliError::numeric(e),
    }
}

fn evolution_error(e: EvolutionError) -> CliError {
    match e {
        EvolutionError::Settings(_) => CliError::Config(e.to_string()),
        e => CliError::numeric(e),
    }
}

fn model_error(e: ModelError) -> CliError {
    match e {
        ModelError::InvalidParameter(_) => CliError::Config(e.to_string()),
        e => CliError::numeric(e),
    }
}

fn vec(v: &Vector<f64>) -> Vec<f64> {
    v.as_slice().to_vec()
}

fn is_future_timelike(p: &Vector<f64>) -> bool {
    let space: f64 = (1..p.dim()).map(|i| p[i] * p[i]).sum();
    p[0] > 0.0 && p[0] * p[0] > space
}

#[derive(Serialize)]
struct DecayRecord {
    radius: f64,
    gamma: f64,
    kappa: f64,
}

impl From<&DecaySample> for DecayRecord {
    fn from(s: &DecaySample) -> Self {
        Self { radius: s.radius, gamma: s.gamma, kappa: s.kappa }
    }
}

#[derive(Serialize)]
struct LabelledValue {
    label: String,
    value: Option<f64>,
}

#[derive(Serialize)]
struct ChargesReport<'a> {
    schema_version: &'static str,
    pipeline: &'static str,
    model: String,
    settings: &'a ChargeSettings,
    strict_decay: bool,
    decay: Vec<DecayRecord>,
    mass_vector: Vec<f64>,
    moments: Option<Vec<f64>>,
    mass: Option<f64>,
    center: Option<PointRecord>,
    linear_momentum: Vec<LabelledValue>,
    angular_momentum: Vec<LabelledValue>,
    integrability: &'a Integrability,
    charges: &'a [charges::Charge],
}

pub fn run_charges(ctx: &Context) -> Result<(), CliError> {
    let settings = ctx.config.charge_settings()?;
    let data = &ctx.data;
    let n = data.dim();
    let grid = SphericalGrid::new(n - 1, settings.bandlimit).map_err(CliError::numeric)?;
    let decay = data.check_decay(&grid, &settings.ladder, ctx.config.strict_decay).map_err(model_error)?;
    let md = charges::momenta(data, &settings).map_err(charge_error)?;
    info!("charges: mass vector {:?}", md.mass_vector.as_slice());

    let report = ChargesReport {
        schema_version: SCHEMA_VERSION,
        pipeline: "charges",
        model: data.describe(),
        settings: &settings,
        strict_decay: ctx.config.strict_decay,
        decay: decay.iter().map(DecayRecord::from).collect(),
        mass_vector: vec(&md.mass_vector),
        moments: md.moments.as_ref().map(vec),
        mass: md.mass,
        center: md.center.as_ref().map(PointRecord::from),
        linear_momentum: md
            .linear_momentum
            .iter()
            .enumerate()
            .map(|(i, &value)| LabelledValue { label: KidLabel::Center(i).to_string(), value })
            .collect(),
        angular_momentum: md
            .angular_momentum
            .iter()
            .map(|&((i, j), value)| LabelledValue { label: KidLabel::Rotation(i, j).to_string(), value })
            .collect(),
        integrability: &md.integrability,
        charges: &md.charges,
    };
    ctx.out.json("charges", &report)?;

    let rows: Vec<Vec<Cell>> = md
        .charges
        .iter()
        .flat_map(|c| {
            c.radii.iter().zip(&c.values).map(move |(&r, &q)| {
                vec![
                    Cell::text(&c.label),
                    Cell::Num(r),
                    Cell::Num(q),
                    Cell::opt(c.limit),
                    Cell::opt(c.exponent),
                    Cell::text(c.status),
                ]
            })
        })
        .collect();
    ctx.out.csv("charges", &header(&["label", "R", "Q", "Q_limit", "exponent", "status"]), &rows)
}

#[derive(Serialize)]
struct BoostCheck {
    base_mass_vector: Vec<f64>,
    base_center: PointRecord,
    expected: PointRecord,
    distance: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct CenterReport {
    schema_version: &'static str,
    pipeline: &'static str,
    model: String,
    mass_vector: Vec<f64>,
    moments: Option<Vec<f64>>,
    charges: Option<Vec<f64>>,
    discrepancy: Option<f64>,
    mass: Option<f64>,
    center: Option<PointRecord>,
    boost_check: Option<BoostCheck>,
}

pub fn run_center(ctx: &Context) -> Result<(), CliError> {
    let settings = ctx.config.charge_settings()?;
    let mv = charges::mass_vector(&ctx.data, &settings).map_err(charge_error)?;
    let p = mv.preferred().map_err(charge_error)?;
    let center = if is_future_timelike(&p) {
        Some(charges::center_of_mass(&p).map_err(charge_error)?)
    } else {
        warn!("{}: mass vector is not future timelike, no center of mass", ctx.data.describe());
        None
    };
    let mass = center.as_ref().map(|_| {
        let space: f64 = (1..p.dim()).map(|i| p[i] * p[i]).sum();
        (p[0] * p[0] - space).sqrt()
    });

    let boost_check = match (&ctx.boost, &center) {
        (Some(a), Some(z)) => {
            let base = charges::mass_vector(&ctx.base, &settings).and_then(|m| m.preferred()).map_err(charge_error)?;
            let base_center = charges::center_of_mass(&base).map_err(charge_error)?;
            let expected = a.inverse().apply_point(&base_center);
            let distance = z.distance(&expected);
            let tolerance = ctx.config.center.tolerance;
            Some(BoostCheck {
                base_mass_vector: vec(&base),
                base_center: PointRecord::from(&base_center),
                expected: PointRecord::from(&expected),
                distance,
                tolerance,
                pass: distance <= tolerance,
            })
        }
        _ => None,
    };

    let report = CenterReport {
        schema_version: SCHEMA_VERSION,
        pipeline: "center",
        model: ctx.data.describe(),
        mass_vector: vec(&p),
        moments: mv.moments.as_ref().map(vec),
        charges: mv.charges.as_ref().map(vec),
        discrepancy: mv.discrepancy(),
        mass,
        center: center.as_ref().map(PointRecord::from),
        boost_check,
    };
    ctx.out.json("center", &report)?;

    let n = p.dim() - 1;
    let mut names: Vec<String> = (0..=n).map(|i| format!("P{i}")).collect();
    names.push("mass".into());
    names.push("z_r".into());
    names.extend((1..=n).map(|i| format!("z_x{i}")));
    names.extend(["boost_distance", "boost_pass"].map(String::from));
    let mut row: Vec<Cell> = p.as_slice().iter().map(|&x| Cell::Num(x)).collect();
    row.push(Cell::opt(mass));
    match &center {
        Some(z) => {
            row.push(Cell::Num(z.r));
            row.extend(z.dir.as_slice().iter().map(|&x| Cell::Num(x)));
        }
        None => row.extend((0..=n).map(|_| Cell::Empty)),
    }
    match &report.boost_check {
        Some(b) => row.extend([Cell::Num(b.distance), Cell::text(b.pass)]),
        None => row.extend([Cell::Empty, Cell::Empty]),
    }
    ctx.out.csv("center", &names, &[row])?;

    match &report.boost_check {
        Some(b) if !b.pass => Err(CliError::Numeric(format!(
            "center misses the boost image of the base center by {:.3e} (tolerance {:.1e})",
            b.distance, b.tolerance
        ))),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct LeafRecord {
    r_hat: f64,
    mean_curvature: f64,
    residual: f64,
    iterations: usize,
    sup_f: f64,
    roundness_radial: f64,
    roundness_traceless: f64,
    radius_gap: f64,
    inner_radius: f64,
    outer_radius: f64,
    area: f64,
    stability: f64,
    c: Vec<f64>,
    z: PointRecord,
    c_b: Vec<f64>,
    z_b: PointRecord,
}

#[derive(Serialize)]
struct LimitRecord {
    point: PointRecord,
    error: f64,
    cauchy: bool,
}

#[derive(Serialize)]
struct LeavesReport<'a> {
    schema_version: &'static str,
    pipeline: &'static str,
    model: String,
    settings: &'a ahcenter::cmc::CmcSettings,
    schedule: &'a [f64],
    leaves: Vec<LeafRecord>,
    center_limit: Option<LimitRecord>,
    error: Option<String>,
}

pub fn run_cmc(ctx: &Context) -> Result<(), CliError> {
    let settings = ctx.config.cmc_settings();
    let schedule = &ctx.config.cmc.schedule;
    let solver = CmcSolver::new(ctx.data.clone(), settings.clone()).map_err(cmc_error)?;
    let foliation = solver.foliate(schedule, &[]).map_err(cmc_error)?;
    let mut leaves = Vec::with_capacity(foliation.leaves.len());
    for leaf in &foliation.leaves {
        info!("cmc: leaf r̂ = {} residual {:.2e} sup f {:.3e}", leaf.r_hat, leaf.residual, leaf.sup_f);
        leaves.push(LeafRecord {
            r_hat: leaf.r_hat,
            mean_curvature: leaf.mean_curvature,
            residual: leaf.residual,
            iterations: leaf.iterations,
            sup_f: leaf.sup_f,
            roundness_radial: leaf.roundness_radial,
            roundness_traceless: leaf.roundness_traceless,
            radius_gap: leaf.radius_gap(),
            inner_radius: leaf.inner_radius,
            outer_radius: leaf.outer_radius,
            area: leaf.area,
            stability: solver.stability(leaf).map_err(cmc_error)?,
            c: vec(&leaf.center.c),
            z: PointRecord::from(&leaf.center.z),
            c_b: vec(&leaf.center.c_b),
            z_b: PointRecord::from(&leaf.center.z_b),
        });
    }
    let limit = if foliation.leaves.len() >= 3 {
        let l = center_limit(&foliation.leaves, ctx.config.cmc.center_tolerance).map_err(cmc_error)?;
        Some(LimitRecord { point: PointRecord::from(&l.point), error: l.error, cauchy: l.cauchy })
    } else {
        warn!("cmc: fewer than 3 leaves, no center limit");
        None
    };
    let report = LeavesReport {
        schema_version: SCHEMA_VERSION,
        pipeline: "cmc",
        model: ctx.data.describe(),
        settings: &settings,
        schedule,
        leaves,
        center_limit: limit,
        error: foliation.error.as_ref().map(|e| e.to_string()),
    };
    ctx.out.json("leaves", &report)?;

    let rows: Vec<Vec<Cell>> = report
        .leaves
        .iter()
        .map(|l| {
            let mut row = vec![
                Cell::Num(l.r_hat),
                Cell::Num(l.mean_curvature),
                Cell::Num(l.residual),
                Cell::Int(l.iterations),
                Cell::Num(l.sup_f),
                Cell::Num(l.roundness_radial),
                Cell::Num(l.roundness_traceless),
                Cell::Num(l.radius_gap),
                Cell::Num(l.inner_radius),
                Cell::Num(l.outer_radius),
                Cell::Num(l.area),
                Cell::Num(l.stability),
            ];
            row.extend(l.c.iter().map(|&x| Cell::Num(x)));
            row.extend(polar_cells(&l.z));
            row.extend(l.c_b.iter().map(|&x| Cell::Num(x)));
            row.extend(polar_cells(&l.z_b));
            row
        })
        .collect();
    let names = header(&[
        "r_hat",
        "mean_curvature",
        "residual",
        "iterations",
        "sup_f",
        "roundness_radial",
        "roundness_traceless",
        "radius_gap",
        "inner_radius",
        "outer_radius",
        "area",
        "stability",
        "c0",
        "c1",
        "c2",
        "c3",
        "z_r",
        "z_x1",
        "z_x2",
        "z_x3",
        "c_b0",
        "c_b1",
        "c_b2",
        "c_b3",
        "z_b_r",
        "z_b_x1",
        "z_b_x2",
        "z_b_x3",
    ]);
    ctx.out.csv("leaves", &names, &rows)?;

    match foliation.error {
        Some(e) => Err(cmc_error(e)),
        None => Ok(()),
    }
}

fn polar_cells(p: &PointRecord) -> Vec<Cell> {
    std::iter::once(p.r).chain(p.dir.iter().copied()).map(Cell::Num).collect()
}

#[derive(Serialize)]
struct EvolutionOutput<'a> {
    schema_version: &'static str,
    pipeline: &'static str,
    report: &'a EvolutionReport,
}

pub fn run_evolve(ctx: &Context) -> Result<(), CliError> {
    let settings = ctx.config.evolution_settings()?;
    let report = verify_evolution(&ctx.data, &settings).map_err(evolution_error)?;
    for w in &report.warnings {
        warn!("evolve: {w}");
    }
    ctx.out.json("evolution", &EvolutionOutput { schema_version: SCHEMA_VERSION, pipeline: "evolve", report: &report })?;

    let hypotheses = if report.warnings.is_empty() { "ok" } else { "violated" };
    let fd_rate = |label: &str| {
        std::iter::once(&report.time_rate)
            .chain(&report.boost_rates)
            .find(|r| r.rate.label == label)
            .and_then(|r| r.fd_limit)
    };
    let mut rows = vec![vec![
        Cell::text(&report.time_rate.rate.label),
        Cell::opt(report.time_rate.limit()),
        Cell::opt(report.time_rate.fd_limit),
        Cell::Num(0.0),
        Cell::opt(report.time_rate.limit().map(f64::abs)),
        Cell::Empty,
        Cell::Num(report.time_rate.fd_deviation),
        Cell::text(report.time_rate.rate.status),
        Cell::text(hypotheses),
    ]];
    rows.extend(report.rows.iter().map(|r| {
        vec![
            Cell::text(&r.label),
            Cell::opt(r.rate),
            Cell::opt(fd_rate(&r.label)),
            Cell::opt(r.target),
            Cell::opt(r.deviation),
            Cell::opt(r.relative),
            Cell::Num(r.fd_deviation),
            Cell::text(r.status),
            Cell::text(hypotheses),
        ]
    }));
    let names =
        header(&["label", "rate", "fd_rate", "target", "deviation", "relative", "fd_deviation", "status", "hypotheses"]);
    ctx.out.csv("evolution", &names, &rows)?;

    if report.rows.iter().any(|r| r.status != Status::Converged) {
        warn!("evolve: some rates did not converge on the ladder");
    }
    Ok(())
}
