//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test --test acceptance -- 5 6` runs a subset; artifacts of the
//! training runs land in `$CARGO_TARGET_TMPDIR/acceptance/<case>`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reactive_pinn::autodiff::{eval_param_gradient, Jet2, ParamLoss};
use reactive_pinn::cases::{acceptance_checks, run_case, CaseName, RunConfig, RunReport, METRICS_FILE};
use reactive_pinn::network::NetworkParams;
use reactive_pinn::physics::{dispersion_tensor, explicit_velocity, DispersionParams};
use reactive_pinn::reaction::{invariants, species_from_invariants, InvariantPair, Stoichiometry};
use reactive_pinn::scalar::Scalar;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn out_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(name)
}

/// Runs a case with its defaults and evaluates its thresholds.
fn case_outcome(case: CaseName, dir: &str) -> (Outcome, Option<RunReport>) {
    let cfg = RunConfig::defaults(case);
    match run_case(&cfg, out_dir(dir)) {
        Ok(report) => {
            let checks = acceptance_checks(case, &report.metrics);
            let passed = checks.iter().all(|c| c.passed());
            let failing: Vec<String> = checks.iter().filter(|c| !c.passed()).map(|c| c.to_string()).collect();
            let detail = if failing.is_empty() {
                checks
                    .iter()
                    .map(|c| format!("{}={:.3e}", c.metric, c.value))
                    .collect::<Vec<_>>()
                    .join(" ")
            } else {
                failing.join("; ")
            };
            (outcome(passed, detail), Some(report))
        }
        Err(e) => (outcome(false, format!("run failed: {e}")), None),
    }
}

fn closure_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for i in 0..10_000 {
        let s = if i % 2 == 0 {
            Stoichiometry::new(1.0f64, 2.0, 1.0).unwrap()
        } else {
            Stoichiometry::new(rng.random_range(0.5..4.0), rng.random_range(0.5..4.0), rng.random_range(0.5..4.0))
                .unwrap()
        };
        let inv = InvariantPair {
            psi_a: rng.random_range(0.0f64..1.0),
            psi_b: rng.random_range(0.0..1.0),
        };
        let c = species_from_invariants(&s, inv);
        if c.c_a * c.c_b != 0.0 {
            return outcome(false, format!("c_A c_B = {} at {inv:?}", c.c_a * c.c_b));
        }
        if !(c.c_a >= 0.0 && c.c_b >= 0.0 && c.c_c >= 0.0) {
            return outcome(false, format!("negative concentration {c:?} at {inv:?}"));
        }
        // the limiting reactant is used up
        let c_c = (inv.psi_a * s.n_c / s.n_a).min(inv.psi_b * s.n_c / s.n_b);
        let back = invariants(&s, c);
        let err = [
            (back.psi_a - inv.psi_a).abs(),
            (back.psi_b - inv.psi_b).abs(),
            (c.c_c - c_c).abs(),
        ];
        worst = err.into_iter().fold(worst, f64::max);
    }
    outcome(worst <= 1e-12, format!("10000 pairs, max reconstruction error {worst:.2e}"))
}

fn dispersion_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut eig_err, mut vec_err, mut angle_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..1000 {
        let params = if i % 2 == 0 {
            DispersionParams::new(1.0, 1e-5, 1e-6).unwrap()
        } else {
            let alpha_t = rng.random_range(0.0..0.5);
            DispersionParams::new(alpha_t + rng.random_range(0.0..2.0), alpha_t, rng.random_range(0.0..1e-3)).unwrap()
        };
        let v: [f64; 2] = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let s = v[0].hypot(v[1]);
        let d = dispersion_tensor(v, &params);
        let (l_long, l_trans) = (params.d_m + params.alpha_l * s, params.d_m + params.alpha_t * s);
        let eig = d.eigenvalues();
        eig_err = eig_err.max((eig[0] - l_long).abs()).max((eig[1] - l_trans).abs());
        // D v = λ_L v and D v⊥ = λ_T v⊥ without any eigen solver
        let (u, w) = ([v[0] / s, v[1] / s], [-v[1] / s, v[0] / s]);
        let (du, dw) = (d.apply(u), d.apply(w));
        for k in 0..2 {
            vec_err = vec_err.max((du[k] - l_long * u[k]).abs()).max((dw[k] - l_trans * w[k]).abs());
        }
        if params.alpha_l > params.alpha_t {
            let a = d.principal_axis();
            let sin = (a[0] * u[1] - a[1] * u[0]).abs();
            angle_err = angle_err.max(sin.asin());
        }
    }
    outcome(
        eig_err <= 1e-10 && vec_err <= 1e-10 && angle_err <= 1e-8,
        format!("1000 velocities, eigenvalue error {eig_err:.2e}, eigenpair residual {vec_err:.2e}, axis angle {angle_err:.2e} rad"),
    )
}

fn solenoidal_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = 1e-5;
    let (mut div_max, mut fd_gap): (f64, f64) = (0.0, 0.0);
    for _ in 0..1000 {
        let x: [f64; 2] = [rng.random(), rng.random()];
        let v = explicit_velocity(Jet2::seed(x), [1.0, 1.0]);
        div_max = div_max.max((v[0].grad[0] + v[1].grad[1]).abs());
        // the jet derivatives themselves against central differences
        let f = |dx: f64, dy: f64| explicit_velocity([x[0] + dx, x[1] + dy], [1.0, 1.0]);
        let dvx_dx = (f(h, 0.0)[0] - f(-h, 0.0)[0]) / (2.0 * h);
        let dvy_dy = (f(0.0, h)[1] - f(0.0, -h)[1]) / (2.0 * h);
        fd_gap = fd_gap.max((dvx_dx - v[0].grad[0]).abs()).max((dvy_dy - v[1].grad[1]).abs());
    }
    outcome(
        div_max <= 1e-10 && fd_gap <= 1e-5,
        format!("1000 points, max |div v| {div_max:.2e}, jet vs difference gap {fd_gap:.2e}"),
    )
}

/// Sum of squared outputs and squared output Laplacians over a few points.
struct SquaredOutputs(Vec<[f64; 2]>);

impl ParamLoss<f64> for SquaredOutputs {
    fn eval<S: Scalar<Real = f64>>(&self, p: &NetworkParams<S>) -> S {
        let mut total = S::zero();
        for &x in &self.0 {
            for o in p.forward_jets_over(x) {
                total = total + o.value * o.value + o.laplacian() * o.laplacian();
            }
        }
        total
    }
}

fn autodiff_suite() -> Outcome {
    let h = 1e-4;
    let rel = |num: f64, scale: f64| num / scale.max(1e-3);
    let (mut grad_err, mut hess_err): (f64, f64) = (0.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for seed in 0..20 {
        let net = NetworkParams::<f64>::init(&[2, 16, 16, 16, 3], seed).unwrap();
        for _ in 0..10 {
            let x: [f64; 2] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let jets = net.eval_jets(x);
            let f = |dx: f64, dy: f64| net.eval([x[0] + dx, x[1] + dy]);
            let e = [[h, 0.0], [0.0, h]];
            for (k, jet) in jets.iter().enumerate() {
                for i in 0..2 {
                    let g = (f(e[i][0], e[i][1])[k] - f(-e[i][0], -e[i][1])[k]) / (2.0 * h);
                    grad_err = grad_err.max(rel((g - jet.grad[i]).abs(), g.abs()));
                    for j in 0..2 {
                        let s = |a: f64, b: f64| f(a * e[i][0] + b * e[j][0], a * e[i][1] + b * e[j][1])[k];
                        let hd = (s(1.0, 1.0) - s(1.0, -1.0) - s(-1.0, 1.0) + s(-1.0, -1.0)) / (4.0 * h * h);
                        hess_err = hess_err.max(rel((hd - jet.hess[i][j]).abs(), hd.abs()));
                    }
                }
            }
        }
    }
    // reverse-mode parameter gradient of a loss that includes Laplacians
    let net = NetworkParams::<f64>::init(&[2, 8, 8, 2], 11).unwrap();
    let loss = SquaredOutputs(vec![[0.1, 0.7], [-0.4, 0.2], [0.9, -0.5]]);
    let grad = eval_param_gradient(&loss, &net).unwrap();
    let mut param_err: f64 = 0.0;
    let analytic: Vec<f64> = grad.iter().copied().collect();
    for (idx, &g) in analytic.iter().enumerate() {
        let shifted = |d: f64| {
            let mut p = net.clone();
            *p.iter_mut().nth(idx).unwrap() += d;
            loss.eval(&p)
        };
        let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
        param_err = param_err.max(rel((fd - g).abs(), fd.abs()));
    }
    outcome(
        grad_err <= 1e-6 && param_err <= 1e-6 && hess_err <= 1e-4,
        format!(
            "spatial gradient {grad_err:.2e}, parameter gradient {param_err:.2e}, Hessian {hess_err:.2e} (max relative error)"
        ),
    )
}

fn determinism(first: Option<&RunReport>) -> Outcome {
    let cfg = RunConfig::defaults(CaseName::PatchVertical);
    let first_dir = out_dir("patch_vertical");
    if first.is_none() {
        if let Err(e) = run_case(&cfg, &first_dir) {
            return outcome(false, format!("first run failed: {e}"));
        }
    }
    let second_dir = out_dir("patch_vertical_repeat");
    if let Err(e) = run_case(&cfg, &second_dir) {
        return outcome(false, format!("second run failed: {e}"));
    }
    let read = |d: &PathBuf| std::fs::read(d.join(METRICS_FILE)).unwrap_or_default();
    let (a, b) = (read(&first_dir), read(&second_dir));
    outcome(
        !a.is_empty() && a == b,
        format!("seed {} metrics summaries of {} bytes identical: {}", cfg.seed, a.len(), a == b),
    )
}

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let want = |n: usize| selected.is_empty() || selected.contains(&n);
    let mut results: BTreeMap<usize, (&str, Outcome, f64)> = BTreeMap::new();
    let mut record = |n: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        if want(n) {
            let start = Instant::now();
            let o = f();
            let secs = start.elapsed().as_secs_f64();
            println!("{} {n:>2} {name} ({secs:.1}s): {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
            results.insert(n, (name, o, secs));
        }
    };

    record(5, "closure", &mut closure_suite);
    record(6, "dispersion tensor", &mut dispersion_suite);
    record(7, "solenoidal velocity", &mut solenoidal_suite);
    record(9, "autodiff", &mut autodiff_suite);
    let mut vertical = None;
    record(1, "vertical patch", &mut || {
        let (o, r) = case_outcome(CaseName::PatchVertical, "patch_vertical");
        vertical = r;
        o
    });
    record(2, "horizontal patch", &mut || case_outcome(CaseName::PatchHorizontal, "patch_horizontal").0);
    record(3, "inclined patch", &mut || case_outcome(CaseName::PatchInclined, "patch_inclined").0);
    record(4, "maximum principle", &mut || case_outcome(CaseName::TransportHole, "transport_hole").0);
    record(8, "reaction cases", &mut || {
        let (a, _) = case_outcome(CaseName::ReactionUniform, "reaction_uniform");
        let (b, _) = case_outcome(CaseName::ReactionExplicit, "reaction_explicit");
        outcome(
            a.passed && b.passed,
            format!("reaction_uniform: {} | reaction_explicit: {}", a.detail, b.detail),
        )
    });
    record(10, "determinism", &mut || determinism(vertical.as_ref()));

    let failed = results.values().filter(|r| !r.1.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
