//! Named benchmark cases: configuration, the stage pipeline of each case and
//! its artifacts.

mod checks;
mod config;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::autodiff::Jet2;
use crate::error::{Error, Result};
use crate::geometry::{
    flow_bc_reaction_tank, flow_bc_vertical_patch, species_bc_reaction_tank, square_with_hole, unit_square_grid,
    BcKind, BcSpec, CollocationSet, Segment,
};
use crate::network::{checkpoint, NetworkParams};
use crate::oracle::{analytic_patch, solve_diffusion_fd, solve_flow_fd, DiffusionProblem, FieldGrid};
use crate::physics::{
    dispersion_tensor, explicit_velocity, patch_permeability, rotated_anisotropy, AnisotropyTensorSpec,
    DispersionParams, MediumModel, PatchTest, SymTensor2, TensorSample, PRESSURE, VX, VY,
};
use crate::reaction::{reconstruct_fields, ReactionSystem, Stoichiometry};
use crate::scalar::Point2;
use crate::training::{
    diffusion_constraints, flow_constraints, train, ConstraintSet, EarlyStop, LossWeights, TrainConfig, TrainRecord,
};

pub use checks::{acceptance_checks, Check};
pub use config::{parse_config, GridConfig, NetworkConfig, PhysicsConfig, RunConfig, TrainingConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseName {
    PatchVertical,
    PatchHorizontal,
    PatchInclined,
    TransportHole,
    ReactionUniform,
    ReactionExplicit,
    /// Homogeneous flow with the patch boundary conditions; small defaults.
    Custom,
}

impl CaseName {
    pub const ALL: [CaseName; 7] = [
        CaseName::PatchVertical,
        CaseName::PatchHorizontal,
        CaseName::PatchInclined,
        CaseName::TransportHole,
        CaseName::ReactionUniform,
        CaseName::ReactionExplicit,
        CaseName::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseName::PatchVertical => "patch_vertical",
            CaseName::PatchHorizontal => "patch_horizontal",
            CaseName::PatchInclined => "patch_inclined",
            CaseName::TransportHole => "transport_hole",
            CaseName::ReactionUniform => "reaction_uniform",
            CaseName::ReactionExplicit => "reaction_explicit",
            CaseName::Custom => "custom",
        }
    }

    fn patch(self) -> Option<PatchTest> {
        match self {
            CaseName::PatchVertical => Some(PatchTest::Vertical),
            CaseName::PatchHorizontal => Some(PatchTest::Horizontal),
            CaseName::PatchInclined => Some(PatchTest::Inclined),
            _ => None,
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseName::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let known: Vec<&str> = CaseName::ALL.iter().map(|c| c.name()).collect();
            Error::parse("case", format!("unknown case `{s}`, expected one of {}", known.join(", ")))
        })
    }
}

/// Outcome of [`run_case`].
#[derive(Clone, Debug)]
pub struct RunReport {
    pub case: CaseName,
    pub metrics: BTreeMap<String, f64>,
    /// Training history per network (`flow`, `psi_a`, `psi_b`, `c`).
    pub records: BTreeMap<String, TrainRecord<f64>>,
    /// Best parameters per network.
    pub networks: BTreeMap<String, NetworkParams<f64>>,
    /// Every file written, in write order.
    pub artifacts: Vec<PathBuf>,
}

#[derive(Serialize)]
struct MetricsFile<'a> {
    case: &'a str,
    seed: u64,
    metrics: &'a BTreeMap<String, f64>,
}

/// File name of the metrics summary inside the output directory.
pub const METRICS_FILE: &str = "metrics.toml";

struct Run<'a> {
    cfg: &'a RunConfig,
    out: PathBuf,
    report: RunReport,
}

impl Run<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.out.join(name);
        self.report.artifacts.push(p.clone());
        p
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.report.metrics.insert(name.to_string(), value);
    }

    fn field(&mut self, name: &str, points: &[Point2<f64>], values: &[f64]) -> Result<()> {
        let p = self.path(&format!("{name}.csv"));
        crate::io::export_field(points, values, p)
    }

    fn range_metrics(&mut self, name: &str, values: &[f64]) {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.metric(&format!("{name}_min"), min);
        self.metric(&format!("{name}_max"), max);
    }

    fn train_config(&self, epochs: usize) -> TrainConfig<f64> {
        let t = &self.cfg.training;
        let mut tc = TrainConfig::new(epochs);
        tc.adam.lr = t.learning_rate;
        tc.decay = t.decay;
        tc.decay_every = t.decay_every;
        tc.weights = LossWeights::new(t.weight_pde, t.weight_bc);
        tc.early_stop = (t.early_stop_tol > 0.0).then_some(EarlyStop {
            tol: t.early_stop_tol,
            patience: t.early_stop_patience,
        });
        tc.divergence_factor = t.divergence_factor;
        tc.log_every = t.log_every;
        tc
    }

    /// Trains one network and stores its record, checkpoint and loss history.
    /// A failed run still writes the history up to the failure.
    fn train(
        &mut self,
        name: &str,
        constraints: &ConstraintSet<f64>,
        hidden: &[usize],
        seed: u64,
        epochs: usize,
    ) -> Result<NetworkParams<f64>> {
        let mut sizes = vec![2];
        sizes.extend_from_slice(hidden);
        sizes.push(constraints.outputs());
        let init = NetworkParams::init(&sizes, seed)?;
        let tc = self.train_config(epochs);
        let history = self.path(&format!("train_{name}.csv"));
        let record = match train(constraints, init, &tc) {
            Ok(r) => r,
            Err(abort) => {
                abort.record.write_csv(&history)?;
                return Err(abort.error);
            }
        };
        record.write_csv(&history)?;
        checkpoint::save(&record.best_params, self.path(&format!("{name}.net")))?;
        self.metric(&format!("{name}_best_loss"), record.best_loss);
        self.metric(&format!("{name}_best_epoch"), record.best_epoch as f64);
        self.metric(&format!("{name}_epochs_run"), (record.epochs.len() - 1) as f64);
        let params = record.best_params.clone();
        self.report.records.insert(name.to_string(), record);
        self.report.networks.insert(name.to_string(), params.clone());
        Ok(params)
    }

    fn write_metrics(&mut self) -> Result<()> {
        let text = toml::to_string(&MetricsFile {
            case: self.report.case.name(),
            seed: self.cfg.seed,
            metrics: &self.report.metrics,
        })
        .map_err(|e| Error::parse("metrics", e.to_string()))?;
        let p = self.path(METRICS_FILE);
        std::fs::write(p, text)?;
        Ok(())
    }
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(name))
}

/// Runs `cfg` and writes its artifacts into `out`. Artifacts written before
/// a failing stage are kept.
pub fn run_case(cfg: &RunConfig, out: impl AsRef<Path>) -> Result<RunReport> {
    stage("config", cfg.validate())?;
    let case = cfg.case_name()?;
    let out = out.as_ref().to_path_buf();
    std::fs::create_dir_all(&out)?;
    let mut run = Run {
        cfg,
        out,
        report: RunReport {
            case,
            metrics: BTreeMap::new(),
            records: BTreeMap::new(),
            networks: BTreeMap::new(),
            artifacts: Vec::new(),
        },
    };
    let rendered = cfg.render()?;
    std::fs::write(run.path("config.toml"), rendered)?;
    match case {
        CaseName::PatchVertical | CaseName::PatchHorizontal | CaseName::PatchInclined | CaseName::Custom => {
            patch_case(&mut run, case)?
        }
        CaseName::TransportHole => transport_hole(&mut run)?,
        CaseName::ReactionUniform | CaseName::ReactionExplicit => reaction_case(&mut run, case)?,
    }
    run.write_metrics()?;
    Ok(run.report)
}

fn patch_medium(cfg: &RunConfig, case: CaseName) -> MediumModel<f64> {
    let (k1, k2) = (cfg.physics.k1, cfg.physics.k2);
    let mut medium = match case.patch() {
        Some(test) => MediumModel::new(move |x| patch_permeability(test, k1, k2, x)),
        None => MediumModel::homogeneous(k1),
    };
    medium.viscosity = cfg.physics.viscosity;
    medium
}

/// Collocation lattice of a patch test, moved off its interface.
pub fn patch_collocation(case: CaseName, n: usize) -> Result<CollocationSet<f64>> {
    let mut set = unit_square_grid(n)?;
    if let Some(test) = case.patch() {
        let normal = match test {
            PatchTest::Vertical => [1.0, 0.0],
            PatchTest::Horizontal => [0.0, 1.0],
            PatchTest::Inclined => [std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2],
        };
        set.offset_from_interface(|x| (test.interface_coordinate(x), normal));
    }
    Ok(set)
}

fn rel_l2(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (num, den) = pairs.fold((0.0, 0.0), |(n, d), (a, b)| (n + (a - b) * (a - b), d + b * b));
    (num / den).sqrt()
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Writes the flow fields of `net` at the collocation points.
fn export_flow(run: &mut Run, set: &CollocationSet<f64>, net: &NetworkParams<f64>) -> Result<Vec<Vec<f64>>> {
    let pts = set.all_points();
    let outs: Vec<Vec<f64>> = pts.iter().map(|&x| net.eval(x)).collect();
    for (name, k) in [("vx", VX), ("vy", VY), ("p", PRESSURE)] {
        let vals: Vec<f64> = outs.iter().map(|o| o[k]).collect();
        run.field(name, &pts, &vals)?;
        run.range_metrics(name, &vals);
    }
    Ok(outs)
}

fn patch_case(run: &mut Run, case: CaseName) -> Result<()> {
    let cfg = run.cfg;
    let medium = patch_medium(cfg, case);
    let bc = flow_bc_vertical_patch();
    let set = stage("geometry", patch_collocation(case, cfg.grid.flow_n))?;
    set.write_csv(run.path("collocation.csv"))?;
    let constraints = stage("assemble", flow_constraints(&set, &medium, &bc))?;
    let net = stage(
        "train_flow",
        run.train("flow", &constraints, &cfg.network.flow_hidden, cfg.seed, cfg.training.flow_epochs),
    )?;
    let pts = set.all_points();
    let outs = stage("export", export_flow(run, &set, &net))?;

    // mid-line y = 1/2 at the lattice abscissae
    let n = cfg.grid.flow_n;
    let midline: Vec<Point2<f64>> = (0..n).map(|i| [i as f64 / (n - 1) as f64, 0.5]).collect();
    let p_mid: Vec<f64> = midline.iter().map(|&x| net.eval(x)[PRESSURE]).collect();
    stage("export", run.field("p_midline", &midline, &p_mid))?;

    let (k1, k2) = (cfg.physics.k1, cfg.physics.k2);
    match case.patch() {
        Some(test @ (PatchTest::Vertical | PatchTest::Horizontal)) => {
            let exact = |x| analytic_patch(test, k1, k2, x);
            let p_ref = midline.iter().map(|&x| exact(x).map(|e| e.0)).collect::<Result<Vec<_>>>()?;
            stage("export", run.field("p_midline_ref", &midline, &p_ref))?;
            run.metric("p_midline_rel_l2", rel_l2(p_mid.iter().copied().zip(p_ref.iter().copied())));
            let mut linf: f64 = 0.0;
            for (x, o) in pts.iter().zip(&outs) {
                linf = linf.max((o[PRESSURE] - exact(*x)?.0).abs());
            }
            run.metric("p_linf", linf);
            if test == PatchTest::Vertical {
                let v_ref = exact([0.25, 0.5])?.1[0];
                let p_c = exact([0.5, 0.5])?.0;
                run.metric("p_center_abs_err", (net.eval([0.5, 0.5])[PRESSURE] - p_c).abs());
                let vx_mean = mean(outs.iter().map(|o| o[VX]));
                run.metric("vx_mean", vx_mean);
                run.metric("vx_mean_rel_err", (vx_mean - v_ref).abs() / v_ref);
            } else {
                // interface points belong to the upper layer
                let layer = |upper: bool| {
                    mean(pts.iter().zip(&outs).filter(|(x, _)| (x[1] >= 0.5) == upper).map(|(_, o)| o[VX]))
                };
                let (lo, hi) = (layer(false), layer(true));
                run.metric("vx_mean_lower", lo);
                run.metric("vx_mean_upper", hi);
                run.metric("vx_mean_lower_rel_err", (lo - k1).abs() / k1);
                run.metric("vx_mean_upper_rel_err", (hi - k2).abs() / k2);
            }
        }
        Some(PatchTest::Inclined) => {
            let fd = stage("oracle", solve_flow_fd(&medium, &bc, cfg.grid.oracle_flow_n))?;
            // the odd oracle grid has a row of cell centres on y = 1/2
            let row = fd.p.row(fd.p.ny / 2);
            let p_net: Vec<f64> = row.iter().map(|(x, _)| net.eval(*x)[PRESSURE]).collect();
            let xs: Vec<Point2<f64>> = row.iter().map(|r| r.0).collect();
            let p_fd: Vec<f64> = row.iter().map(|r| r.1).collect();
            stage("export", run.field("p_midline_oracle", &xs, &p_fd))?;
            stage("export", run.field("p_midline_oracle_net", &xs, &p_net))?;
            run.metric("p_midline_rel_l2_fd", rel_l2(p_net.into_iter().zip(p_fd)));
        }
        None => {
            // homogeneous medium: p = 1 − x, v = (k/μ, 0)
            let v_ref = k1 / cfg.physics.viscosity;
            let p_err = pts.iter().zip(&outs).map(|(x, o)| (o[PRESSURE] - (1.0 - x[0])).abs());
            run.metric("p_linf", p_err.fold(0.0, f64::max));
            run.metric("vx_mean_rel_err", (mean(outs.iter().map(|o| o[VX])) - v_ref).abs() / v_ref);
        }
    }
    Ok(())
}

/// Anisotropic tensor of the hole case, optionally scaled to unit largest
/// eigenvalue.
pub fn hole_tensor(physics: &PhysicsConfig) -> Result<SymTensor2<f64>> {
    let d = rotated_anisotropy(&AnisotropyTensorSpec {
        theta: physics.theta,
        lambda1: physics.lambda1,
        lambda2: physics.lambda2,
    })?;
    Ok(if physics.normalize_tensor {
        d.scaled(1.0 / physics.lambda1.max(physics.lambda2))
    } else {
        d
    })
}

/// `c = 1` on the hole perimeter, `c = 0` on the outer boundary.
fn hole_bc() -> BcSpec<f64> {
    BcSpec::new()
        .constant(Segment::Inner, BcKind::Concentration, 1.0)
        .constant(Segment::Outer, BcKind::Concentration, 0.0)
}

fn transport_hole(run: &mut Run) -> Result<()> {
    let cfg = run.cfg;
    let d = stage("tensor", hole_tensor(&cfg.physics))?;
    let set = stage("geometry", square_with_hole(cfg.grid.species_n, cfg.physics.hole_side))?;
    set.write_csv(run.path("collocation.csv"))?;
    let sample = TensorSample::constant(d);
    let constraints = stage(
        "assemble",
        diffusion_constraints(&set, |_| Ok(sample), |_| 0.0, &hole_bc()),
    )?;
    let net = stage(
        "train_c",
        run.train("c", &constraints, &cfg.network.species_hidden, cfg.seed, cfg.training.species_epochs),
    )?;
    let pts = set.all_points();
    let c: Vec<f64> = pts.iter().map(|&x| net.eval(x)[0]).collect();
    stage("export", run.field("c", &pts, &c))?;
    run.range_metrics("c", &c);
    run.metric("collocation_points", pts.len() as f64);

    let problem = DiffusionProblem::hole(d, cfg.grid.oracle_diffusion_n, cfg.physics.hole_side, 1.0, 0.0);
    let fd = stage("oracle", solve_diffusion_fd(&problem))?;
    run.metric("fd_c_min", fd.min());
    run.metric("fd_c_max", fd.max());
    Ok(())
}

fn reaction_system(p: &PhysicsConfig) -> Result<ReactionSystem<f64>> {
    Ok(ReactionSystem::tank(Stoichiometry::new(p.n_a, p.n_b, p.n_c)?))
}

/// Dispersion tensor and its divergence from a velocity given as jets.
fn dispersion_sample(v: [Jet2<f64>; 2], params: &DispersionParams<f64>) -> TensorSample<f64> {
    TensorSample::from_jets(&dispersion_tensor(v, params))
}

fn reaction_case(run: &mut Run, case: CaseName) -> Result<()> {
    let cfg = run.cfg;
    let p = &cfg.physics;
    let params = stage("dispersion", DispersionParams::new(p.alpha_l, p.alpha_t, p.d_m))?;
    let sys = stage("reaction", reaction_system(p))?;

    // velocity as jets in x, from the frozen flow network or the explicit
    // field
    let velocity: Box<dyn Fn(Point2<f64>) -> [Jet2<f64>; 2]> = if case == CaseName::ReactionUniform {
        let mut medium = MediumModel::homogeneous(p.k1);
        medium.viscosity = p.viscosity;
        let set = stage("geometry", unit_square_grid(cfg.grid.flow_n))?;
        let constraints = stage("assemble", flow_constraints(&set, &medium, &flow_bc_reaction_tank()))?;
        let flow = stage(
            "train_flow",
            run.train("flow", &constraints, &cfg.network.flow_hidden, cfg.seed, cfg.training.flow_epochs),
        )?;
        stage("export", export_flow(run, &set, &flow))?;
        Box::new(move |x| {
            let o = flow.eval_jets(x);
            [o[VX], o[VY]]
        })
    } else {
        Box::new(|x| explicit_velocity(Jet2::seed(x), [1.0, 1.0]))
    };

    let set = stage("geometry", unit_square_grid(cfg.grid.species_n))?;
    set.write_csv(run.path("collocation.csv"))?;
    let d_field = |x: Point2<f64>| -> Result<TensorSample<f64>> {
        let s = dispersion_sample(velocity(x), &params);
        if !s.tensor.is_finite() || !s.divergence.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                what: "dispersion tensor",
                x: x[0],
                y: x[1],
            });
        }
        Ok(s)
    };
    let [bc_a, bc_b] = species_bc_reaction_tank(&sys);
    let mut nets = Vec::new();
    for (k, (name, bc)) in [("psi_a", bc_a), ("psi_b", bc_b)].into_iter().enumerate() {
        let constraints = stage("assemble", diffusion_constraints(&set, d_field, |_| 0.0, &bc))?;
        let net = stage(
            &format!("train_{name}"),
            run.train(
                name,
                &constraints,
                &cfg.network.species_hidden,
                cfg.seed + 1 + k as u64,
                cfg.training.species_epochs,
            ),
        )?;
        nets.push(net);
    }

    // species on the full lattice, row by row
    let n = cfg.grid.species_n;
    let h = 1.0 / (n - 1) as f64;
    let lattice = FieldGrid::new(n, n, [0.0, 0.0], [h, h], vec![0.0; n * n])?;
    let pts = lattice.points();
    let fields = stage("closure", reconstruct_fields(&sys, &nets[0], &nets[1], &pts))?;
    let psi_a: Vec<f64> = pts.iter().map(|&x| nets[0].eval(x)[0]).collect();
    let psi_b: Vec<f64> = pts.iter().map(|&x| nets[1].eval(x)[0]).collect();
    for (name, vals) in [
        ("psi_a", &psi_a),
        ("psi_b", &psi_b),
        ("c_a", &fields.c_a),
        ("c_b", &fields.c_b),
        ("c_c", &fields.c_c),
    ] {
        stage("export", run.field(name, &pts, vals))?;
        run.range_metrics(name, vals);
    }
    if case == CaseName::ReactionExplicit {
        let v: Vec<[f64; 2]> = pts.iter().map(|&x| explicit_velocity(x, [1.0, 1.0])).collect();
        stage("export", run.field("vx", &pts, &v.iter().map(|v| v[0]).collect::<Vec<_>>()))?;
        stage("export", run.field("vy", &pts, &v.iter().map(|v| v[1]).collect::<Vec<_>>()))?;
    }

    let at = |vals: &[f64], i: usize, j: usize| vals[j * n + i];
    let corners = [(0, 0), (n - 1, 0), (0, n - 1), (n - 1, n - 1)];
    run.metric(
        "c_c_corner_max",
        corners.iter().map(|&(i, j)| at(&fields.c_c, i, j)).fold(f64::NEG_INFINITY, f64::max),
    );
    // height of the c_C maximum on each vertical slice x >= 0.2
    let mut peak_lo = f64::INFINITY;
    let mut peak_hi = f64::NEG_INFINITY;
    for i in (0..n).filter(|&i| i as f64 * h >= 0.2 - 1e-12) {
        let j_max = (0..n)
            .max_by(|&a, &b| at(&fields.c_c, i, a).total_cmp(&at(&fields.c_c, i, b)))
            .unwrap_or(0);
        peak_lo = peak_lo.min(j_max as f64 * h);
        peak_hi = peak_hi.max(j_max as f64 * h);
    }
    run.metric("c_c_peak_y_min", peak_lo);
    run.metric("c_c_peak_y_max", peak_hi);
    // half-domain sums; a row on y = 1/2 counts for neither half
    let half_sum = |vals: &[f64], upper: bool| -> f64 {
        pts.iter()
            .zip(vals)
            .filter(|(x, _)| if upper { x[1] > 0.5 } else { x[1] < 0.5 })
            .map(|(_, v)| *v)
            .sum()
    };
    run.metric(
        "c_a_upper_lower_ratio",
        half_sum(&fields.c_a, true) / half_sum(&fields.c_a, false),
    );
    run.metric(
        "c_b_lower_upper_ratio",
        half_sum(&fields.c_b, false) / half_sum(&fields.c_b, true),
    );
    Ok(())
}

/// Reference fields of a case without any training: analytic and
/// finite-difference patch solutions, the diffusion oracle for the hole, the
/// flow oracle of the tank and the explicit velocity.
pub fn run_oracle(cfg: &RunConfig, out: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    stage("config", cfg.validate())?;
    let case = cfg.case_name()?;
    let out = out.as_ref();
    std::fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let mut grid = |name: &str, g: &FieldGrid<f64>| -> Result<()> {
        let p = out.join(format!("{name}.csv"));
        g.write_csv(&p)?;
        written.push(p);
        Ok(())
    };
    match case {
        CaseName::PatchVertical | CaseName::PatchHorizontal | CaseName::PatchInclined | CaseName::Custom => {
            let medium = patch_medium(cfg, case);
            let fd = stage("oracle", solve_flow_fd(&medium, &flow_bc_vertical_patch(), cfg.grid.oracle_flow_n))?;
            grid("fd_p", &fd.p)?;
            grid("fd_vx", &fd.vx)?;
            grid("fd_vy", &fd.vy)?;
            if let Some(test @ (PatchTest::Vertical | PatchTest::Horizontal)) = case.patch() {
                let set = patch_collocation(case, cfg.grid.flow_n)?;
                let pts = set.all_points();
                let exact = pts
                    .iter()
                    .map(|&x| analytic_patch(test, cfg.physics.k1, cfg.physics.k2, x))
                    .collect::<Result<Vec<_>>>()?;
                for (name, f) in [
                    ("analytic_p", Box::new(|e: &(f64, [f64; 2])| e.0) as Box<dyn Fn(&(f64, [f64; 2])) -> f64>),
                    ("analytic_vx", Box::new(|e: &(f64, [f64; 2])| e.1[0])),
                    ("analytic_vy", Box::new(|e: &(f64, [f64; 2])| e.1[1])),
                ] {
                    let p = out.join(format!("{name}.csv"));
                    crate::io::export_field(&pts, &exact.iter().map(&f).collect::<Vec<_>>(), &p)?;
                    written.push(p);
                }
            }
        }
        CaseName::TransportHole => {
            let d = hole_tensor(&cfg.physics)?;
            let problem = DiffusionProblem::hole(d, cfg.grid.oracle_diffusion_n, cfg.physics.hole_side, 1.0, 0.0);
            grid("fd_c", &stage("oracle", solve_diffusion_fd(&problem))?)?;
        }
        CaseName::ReactionUniform => {
            let mut medium = MediumModel::homogeneous(cfg.physics.k1);
            medium.viscosity = cfg.physics.viscosity;
            let fd = stage("oracle", solve_flow_fd(&medium, &flow_bc_reaction_tank(), cfg.grid.oracle_flow_n))?;
            grid("fd_p", &fd.p)?;
            grid("fd_vx", &fd.vx)?;
            grid("fd_vy", &fd.vy)?;
        }
        CaseName::ReactionExplicit => {
            let n = cfg.grid.species_n;
            let h = 1.0 / (n - 1) as f64;
            let base = FieldGrid::new(n, n, [0.0, 0.0], [h, h], vec![0.0; n * n])?;
            let v: Vec<[f64; 2]> = base.points().iter().map(|&x| explicit_velocity(x, [1.0, 1.0])).collect();
            for (name, k) in [("explicit_vx", 0), ("explicit_vy", 1)] {
                let g = FieldGrid::new(n, n, [0.0, 0.0], [h, h], v.iter().map(|v| v[k]).collect())?;
                grid(name, &g)?;
            }
        }
    }
    Ok(written)
}
