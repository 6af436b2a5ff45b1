//! Acceptance suite: one PASS/FAIL line per criterion on stderr.

use std::f64::consts::{LN_2, PI};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use chslab_core::holder::{holder_exponent, make_family, run_holder, sweep, FamilySpec, Verdict};
use chslab_core::inequality::{
    epsilon_ladder, eta_grid, kernel_bound_scan, kernel_integral, probe_algebra, probe_calderon,
    probe_interpolation, probe_kato_ponce, probe_mollifier_commutator, probe_product_low, probe_product_negative,
    probe_product_negative_sweep, random_field, sweep_modes, ProbeConfig, ProbeReport,
};
use chslab_core::solver::{
    diff_solve, fit_min_cs, profile, scale_to_norm, solve, t0_lower_bound, DtPolicy, ExistenceProbe, ProfileKind,
    SeamPolicy, SolveOptions, State, SystemParams,
};
use chslab_core::spectral::{dx, lambda_dx, lambda_pow, sobolev_norm, sup_norm};
use chslab_core::{Error, Field, Grid};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, budget: Duration, detail: String) -> Outcome {
    check(elapsed <= budget, format!("{detail}; {:.2?} (budget {:?})", elapsed, budget))
}

fn default_grid() -> Grid {
    Grid::new(64.0, 256).unwrap()
}

fn smooth_state(grid: &Grid, kind: ProfileKind, amplitude: f64, width: f64) -> State {
    let u = profile(grid, kind, amplitude, width, 0).unwrap();
    let rho = profile(grid, kind, 0.5 * amplitude, width, 1).unwrap();
    State::new(u, rho, 0.0).unwrap()
}

fn spectral_exactness() -> Outcome {
    let start = Instant::now();
    let grid = Grid::new(2.0 * PI, 64).unwrap();
    let sin = Field::from_fn(&grid, f64::sin);
    let cos = Field::from_fn(&grid, f64::cos);
    let e1 = sup_norm(&(&dx(&sin, 1) - &cos));
    let e2 = sup_norm(&(&lambda_dx(&cos, -4.0) - &sin.scale(-0.25)));
    let e3 = [-2.0, 0.0, 1.5, 4.0]
        .iter()
        .map(|&s| (sobolev_norm(&sin, s) - PI.sqrt() * 2f64.powf(0.5 * s)).abs() / 2f64.powf(0.5 * s))
        .fold(0.0, f64::max);
    let worst = e1.max(e2).max(e3);
    let detail = format!("derivative {e1:.1e}, ∂ₓΛ⁻⁴ {e2:.1e}, H^s norm {e3:.1e}");
    check(worst <= 1e-12, detail.clone())?;
    within(start.elapsed(), Duration::from_secs(1), detail)
}

fn operator_algebra() -> Outcome {
    let grid = Grid::new(12.0, 64).unwrap();
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let f = random_field(&grid, 6.0, 0.6, 1.0, 1000 + i).unwrap();
        let a = -6.0 + 12.0 * ((i * 7) % 25) as f64 / 24.0;
        let b = -6.0 + 12.0 * ((i * 11 + 3) % 25) as f64 / 24.0;
        let lhs = lambda_pow(&lambda_pow(&f, a), b);
        let rhs = lambda_pow(&f, a + b);
        worst = worst.max(sobolev_norm(&(&lhs - &rhs), a + b) / sobolev_norm(&rhs, a + b));
        let id = lambda_pow(&lambda_pow(&f, -4.0), 4.0);
        worst = worst.max(sup_norm(&(&id - &f)) / sup_norm(&f));
    }
    check(worst <= 1e-10, format!("worst relative error {worst:.1e} over 100 fields"))
}

fn interpolation() -> Outcome {
    let cfg = ProbeConfig::new(default_grid(), 1000, 7);
    let rep = probe_interpolation(&cfg, -1.0, 3.0, &[0.0, 0.25, 0.5, 0.75, 1.0]).map_err(|e| e.to_string())?;
    check(
        rep.violations == 0,
        format!("{} violations over 1000 fields × 5 θ", rep.violations),
    )
}

fn solver_order() -> Outcome {
    let start = Instant::now();
    let grid = default_grid();
    let initial = smooth_state(&grid, ProfileKind::Gaussian, 1.0, 4.0);
    let run = |dt: f64| {
        let traj = solve(&initial, &SystemParams::default(), 4.0, 0.5, &SolveOptions::with_dt(DtPolicy::Fixed(dt))).unwrap();
        traj.last().u.clone()
    };
    let (a, b, c) = (run(0.05), run(0.025), run(0.0125));
    let order = (sup_norm(&(&a - &b)) / sup_norm(&(&b - &c))).log2();
    let detail = format!("Richardson order {order:.4}");
    check((order - 4.0).abs() <= 0.3, detail.clone())?;
    within(start.elapsed(), Duration::from_secs(60), detail)
}

fn linearization() -> Outcome {
    let grid = Grid::new(64.0, 128).unwrap();
    let xi = 2.0 * PI / 64.0;
    let delta = 1e-6;
    let params = SystemParams::new(2.0, 1.0, 1.0, 1.0).unwrap();
    let u = Field::from_fn(&grid, |x| delta * (xi * x).cos());
    let initial = State::new(u, Field::zeros(&grid), 0.0).unwrap();
    let opts = SolveOptions {
        seam: SeamPolicy::Ignore,
        ..SolveOptions::default()
    };
    let traj = solve(&initial, &params, 4.0, 1.0, &opts).unwrap();
    // u_t = -α ∂ₓΛ⁻⁴u on a single mode gives ω = -αξ/(1+ξ²)².
    let omega = -xi / (1.0 + xi * xi).powi(2);
    let exact = Field::from_fn(&grid, |x| delta * (xi * x - omega).cos());
    let err = sup_norm(&(&traj.last().u - &exact)) / delta;
    check(err <= 1e-4, format!("relative error {err:.2e} at t = 1"))
}

fn difference_consistency() -> Outcome {
    let grid = default_grid();
    let params = SystemParams::default();
    let pair = |amp: f64| {
        let u = profile(&grid, ProfileKind::Gaussian, amp, 4.0, 0).unwrap();
        let rho = profile(&grid, ProfileKind::Gaussian, 0.2, 4.0, 0).unwrap();
        solve(&State::new(u, rho, 0.0).unwrap(), &params, 4.0, 1.0, &SolveOptions::default()).unwrap()
    };
    let (a, b) = (pair(0.4), pair(0.41));
    let run = diff_solve(&a, &b, &params, 2.0).map_err(|e| e.to_string())?;
    let same = diff_solve(&a, &a, &params, 2.0).map_err(|e| e.to_string())?;
    let rel = run.defect / run.max_difference;
    check(
        rel <= 1e-6 && same.defect <= 1e-13,
        format!("defect/max‖w‖ = {rel:.2e}, identity defect {:.1e}", same.defect),
    )
}

fn existence_time() -> Outcome {
    let params = SystemParams::default();
    let grid = default_grid();
    let unit = scale_to_norm(&smooth_state(&grid, ProfileKind::Gaussian, 1.0, 4.0), 4.0, 1.0).unwrap();
    let t0 = t0_lower_bound(&unit, 4.0, &params).map_err(|e| e.to_string())?;
    let t0_ok = t0 == 0.5 * LN_2;

    let fit = |n: usize| {
        let g = Grid::new(64.0, n).unwrap();
        let traj = solve(&smooth_state(&g, ProfileKind::Gaussian, 1.0, 4.0), &params, 4.0, 2.0, &SolveOptions::default()).unwrap();
        fit_min_cs(&traj).unwrap()
    };
    let (coarse, fine) = (fit(256), fit(512));
    let drift = (coarse - fine).abs() / fine;

    let runs = [
        (ProfileKind::Gaussian, 0.6, 4.0),
        (ProfileKind::Gaussian, 1.0, 4.0),
        (ProfileKind::Gaussian, 1.5, 4.0),
        (ProfileKind::Sech2, 0.5, 2.0),
        (ProfileKind::RandomDecay, 0.5, 4.0),
    ];
    let mut passed = 0;
    let mut worst = 0.0f64;
    for (kind, amp, width) in runs {
        let probe = ExistenceProbe::run(&smooth_state(&grid, kind, amp, width), &params, 4.0, 16.0, &SolveOptions::default())
            .map_err(|e| e.to_string())?;
        if let Some(b) = probe.size_bound.filter(|b| b.passed && b.c_s == probe.c_fit) {
            passed += 1;
            worst = worst.max(b.max_ratio);
        }
    }
    check(
        t0_ok && drift <= 0.2 && passed == runs.len(),
        format!(
            "T0 = {t0} (exact: {t0_ok}); c_fit {coarse:.5} vs {fine:.5} ({:.1}%); size bound {passed}/5, max ratio {worst:.3}",
            100.0 * drift
        ),
    )
}

fn lemma_probes() -> Outcome {
    let start = Instant::now();
    type Probe = Box<dyn Fn(&ProbeConfig) -> chslab_core::Result<ProbeReport>>;
    let probes: Vec<(&str, Probe)> = vec![
        ("algebra", Box::new(|c| probe_algebra(c, 2.0))),
        ("kato-ponce", Box::new(|c| probe_kato_ponce(c, 2.0))),
        ("calderon", Box::new(|c| probe_calderon(c, 4.0, 0.5))),
        ("product-low", Box::new(|c| probe_product_low(c, 2.0))),
        ("product-negative", Box::new(|c| probe_product_negative(c, 2.0, 1.0, 2.0))),
        ("product-negative-boundary", Box::new(|c| probe_product_negative(c, 0.5, 1.5, 2.0))),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, probe) in &probes {
        let small = probe(&ProbeConfig::new(default_grid(), 200, 0)).map_err(|e| e.to_string())?;
        let large = probe(&ProbeConfig::new(default_grid(), 400, 0)).map_err(|e| e.to_string())?;
        let drift = (small.constant - large.constant).abs() / large.constant;
        ok &= small.constant.is_finite() && large.constant.is_finite() && drift <= 0.1;
        notes.push(format!("{name} {:.4}/{:.4}", small.constant, large.constant));
    }

    let mgrid = Grid::new(4.0 * PI, 1024).unwrap();
    let ladder = epsilon_ladder(6);
    let msmall = probe_mollifier_commutator(&ProbeConfig::new(mgrid.clone(), 200, 0), &ladder).map_err(|e| e.to_string())?;
    let mlarge = probe_mollifier_commutator(&ProbeConfig::new(mgrid, 400, 0), &ladder).map_err(|e| e.to_string())?;
    let mdrift = (msmall.constant - mlarge.constant).abs() / mlarge.constant;
    let spread = mlarge.details["ladder_spread"].as_f64().unwrap_or(f64::INFINITY);
    ok &= mdrift <= 0.1 && spread <= 2.0;
    notes.push(format!("mollifier {:.4}/{:.4} spread {spread:.3}", msmall.constant, mlarge.constant));

    let cfg = ProbeConfig::new(default_grid(), 200, 0);
    let sweep = probe_product_negative_sweep(&cfg, 2.0, 1.0, 2.0, &sweep_modes(256, 8)).map_err(|e| e.to_string())?;
    let slope = sweep.details["slope"].as_f64().unwrap_or(f64::INFINITY);
    ok &= slope <= 0.05;
    notes.push(format!("sweep slope {slope:.4}"));

    let detail = notes.join(", ");
    check(ok, detail.clone())?;
    within(start.elapsed(), Duration::from_secs(300), detail)
}

fn kernel() -> Outcome {
    let eta = eta_grid(10);
    let mut lorentz = 0.0f64;
    for &(r, k) in &[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)] {
        for &e in &eta {
            lorentz = lorentz.max((kernel_integral(r, 1.0, k, e).map_err(|e| e.to_string())? - PI).abs());
        }
    }
    let mut closed = 0.0f64;
    for &e in &eta {
        let exact = 2.0 * PI / (4.0 + e * e);
        closed = closed.max((kernel_integral(0.0, 1.0, 1.0, e).map_err(|e| e.to_string())? - exact).abs());
    }
    let matrix = [(0.0, 1.0, 1.0), (1.0, 1.0, 1.0), (0.5, 1.5, 2.0), (1.0, 2.0, 3.0)];
    let mut growth = 0.0f64;
    let mut plateaus = 0;
    for &(r, j, k) in &matrix {
        let scan = kernel_bound_scan(r, j, k, &eta).map_err(|e| e.to_string())?;
        growth = growth.max(scan.last_decade_growth);
        plateaus += usize::from(scan.plateau);
    }
    let excluded = kernel_bound_scan(0.5, 1.0, 2.0, &eta).is_err();
    let divergent = matches!(kernel_integral(1.0, 0.4, 1.0, 0.0), Err(Error::Divergent(_)));
    check(
        lorentz <= 1e-9 && closed <= 1e-8 && plateaus == matrix.len() && excluded && divergent,
        format!(
            "|I−π| {lorentz:.1e}, closed form {closed:.1e}, plateaus {plateaus}/{} (max growth {growth:.1e}), (0.5,1,2) rejected {excluded}, j = 0.4 divergent {divergent}",
            matrix.len()
        ),
    )
}

fn holder() -> Outcome {
    let start = Instant::now();
    let beta = |s: f64, r: f64| holder_exponent(s, r, false).unwrap().beta;
    let exps_ok = beta(4.0, 1.0) == 1.0 && (beta(3.75, 1.0) - 10.0 / 11.0).abs() <= 1e-15 && beta(4.0, 3.5) == 0.5;
    let mut boundary = 0.0f64;
    for s in [3.6, 3.75, 3.9] {
        let r = 5.0 - s;
        boundary = boundary.max((beta(s, r) - beta(s, r + 1e-12)).abs()).max((beta(s, r) - beta(s, r - 1e-12)).abs());
    }

    let cases = [(4.0, 1.0), (4.0, 2.0), (4.0, 3.5), (3.75, 1.0)];
    let spec = FamilySpec::new(default_grid(), 4.0);
    let rows = sweep(&cases, &spec, &SystemParams::default(), None);
    let mut slopes = Vec::new();
    for row in &rows {
        let rep = row.as_ref().map_err(|e| e.to_string())?;
        slopes.push(rep.slope().unwrap_or(f64::NAN));
        if rep.verdict != Verdict::Pass {
            return Err(format!("case ({}, {}) verdict {}", rep.case.s, rep.case.r, rep.verdict.as_str()));
        }
    }
    let slopes_ok = (0.9..=1.1).contains(&slopes[1]) && slopes[2] >= 0.4 && slopes[3] >= 10.0 / 11.0 - 0.1;

    // A fixed-horizon rerun of the linear case must give the same slope.
    let fam = make_family(&spec).map_err(|e| e.to_string())?;
    let again = run_holder(&fam, &SystemParams::default(), 2.0, Some(1.0)).map_err(|e| e.to_string())?;
    let again_ok = again.slope().is_some_and(|s| (0.9..=1.1).contains(&s));

    let detail = format!(
        "β exact {exps_ok}, boundary gap {boundary:.1e}, slopes {}",
        slopes.iter().map(|s| format!("{s:.4}")).collect::<Vec<_>>().join("/")
    );
    check(exps_ok && boundary <= 1e-9 && slopes_ok && again_ok, detail.clone())?;
    within(start.elapsed(), Duration::from_secs(600), detail)
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file() && p.file_name().unwrap() != "manifest.txt")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn chslab(args: &[&str], threads: &str) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_chslab"))
        .args(args)
        .env("CHSLAB_THREADS", threads)
        .status()
        .unwrap()
        .code()
        .unwrap_or(-1)
}

fn cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let mut notes = Vec::new();
    for (cmd, extra) in [
        ("ineq", vec!["--ensemble", "50", "--N", "64", "--mollifier_N", "256", "--samples_csv", "true", "--seed", "11"]),
        ("holder", vec!["--N", "128", "--cases", "4:2, 3.75:1"]),
        ("solve", vec!["--N", "128", "--t_end", "0.5", "--snapshot", "true"]),
        ("t0probe", vec!["--N", "128", "--norm", "1"]),
    ] {
        let mut runs = Vec::new();
        for (i, threads) in ["1", "4"].iter().enumerate() {
            let out = root.join(format!("{cmd}{i}"));
            let mut args = vec![cmd, "--out", out.to_str().unwrap(), "--threads", "4"];
            args.extend(&extra);
            let code = chslab(&args, threads);
            if !(0..=1).contains(&code) {
                return Err(format!("{cmd} exited with {code}"));
            }
            runs.push(artifacts(&out));
        }
        if runs[0] != runs[1] || runs[0].is_empty() {
            return Err(format!("{cmd} artifacts differ between runs"));
        }
        notes.push(format!("{cmd} {} files", runs[0].len()));
    }

    let configs: Vec<_> = ["[indices]\nr = 1\n", "[indices]\nr = 2\n", "[grid]\nN = 64\n", "[indices]\nr = 3\n"]
        .iter()
        .enumerate()
        .map(|(i, text)| {
            let p = root.join(format!("case{i}.conf"));
            std::fs::write(&p, text).unwrap();
            p
        })
        .collect();
    let mut sweeps = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        let out = root.join(format!("sweep{i}"));
        let mut args = vec!["kernel", "--out", out.to_str().unwrap(), "--threads", "4", "--k", "3", "--j", "2"];
        for c in &configs {
            args.extend(["--config", c.to_str().unwrap()]);
        }
        let code = chslab(&args, threads);
        if code != 0 {
            return Err(format!("kernel sweep exited with {code}"));
        }
        sweeps.push(std::fs::read(out.join("sweep.csv")).unwrap());
    }
    check(
        sweeps[0] == sweeps[1],
        format!("{}; sweep.csv identical at 1 and 4 workers", notes.join(", ")),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("spectral exactness", spectral_exactness),
        ("operator algebra", operator_algebra),
        ("interpolation inequality", interpolation),
        ("solver order", solver_order),
        ("linearization oracle", linearization),
        ("difference-system consistency", difference_consistency),
        ("existence-time probes", existence_time),
        ("lemma probes", lemma_probes),
        ("kernel integral", kernel),
        ("Hölder exponents", holder),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = Vec::new();
    let stderr = std::io::stderr();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        let _ = writeln!(
            stderr.lock(),
            "{tag} criterion {:>2} ({name}): {detail} [{:.2?}]",
            i + 1,
            start.elapsed()
        );
        if result.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
