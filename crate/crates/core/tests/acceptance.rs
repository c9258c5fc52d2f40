//! Acceptance suite: one line per criterion with verdict, timing, and the
//! measured quantities. Exits non-zero if any criterion fails.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use common::rel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stefan_core::export::{travelling_wave_csv, travelling_wave_summary};
use stefan_core::fd_oracle::{validate_self_similar, validate_travelling_wave, FdGrid};
use stefan_core::material::MaterialSpec;
use stefan_core::self_similar::{solve_fixed_surface, solve_self_similar, SelfSimilarOptions};
use stefan_core::symmetry::rod::{classify_rod_bvp, combination, named_family};
use stefan_core::symmetry::*;
use stefan_core::travelling_wave::{profile_physical, solve_travelling_wave};
use stefan_core::{build_transformed_bvp, kirchhoff_forward, kirchhoff_inverse, Phase, TimeLaw, TransformedBvp};

// Pinned tolerances.
const WAVE_REL_TOL: f64 = 0.15;
const BOUNDARY_TOL: f64 = 1e-9;
const INTERIOR_TOL: f64 = 1e-6;
const CLOSED_FORM_TOL: f64 = 1e-9;
const CLOSED_FORM_POINTS: usize = 50;
const FD_VELOCITY_TOL: f64 = 0.02;
const FD_GRIDS: [usize; 3] = [10, 20, 40];
const GENERATOR_TOL: f64 = 1e-6;
const NEUMANN_TOL: f64 = 1e-6;
const FD_OMEGA_TOL: f64 = 0.03;
const GROUP_LAW_TOL: f64 = 1e-12;
const KIRCHHOFF_TOL: f64 = 1e-10;
const KIRCHHOFF_SAMPLES: usize = 1000;
const PROLONGATION_TOL: f64 = 1e-7;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn wave(q0: f64) -> Result<(MaterialSpec<f64>, TransformedBvp, stefan_core::TravellingWaveSolution), String> {
    let spec = MaterialSpec::aluminium(q0);
    let bvp = build_transformed_bvp(&spec, TimeLaw::Steady).map_err(e)?;
    let sol = solve_travelling_wave(&bvp).map_err(e)?;
    Ok((spec, bvp, sol))
}

fn wave_targets(q0: f64, mu: f64, delta: f64) -> Outcome {
    let (_, _, sol) = wave(q0)?;
    let (dm, dd) = (rel(sol.mu, mu), rel(sol.delta, delta));
    let msg = format!(
        "mu = {:.4e} m/s (target {mu:.2e}, dev {:.1}%), delta = {:.4e} m (target {delta:.2e}, dev {:.1}%)",
        sol.mu,
        100.0 * (sol.mu / mu - 1.0),
        sol.delta,
        100.0 * (sol.delta / delta - 1.0)
    );
    ensure(dm <= WAVE_REL_TOL && dd <= WAVE_REL_TOL, || msg.clone())?;
    Ok(msg)
}

fn ac1() -> Outcome {
    wave_targets(1e10, 0.10, 9.60e-4)
}

fn ac2() -> Outcome {
    wave_targets(5e10, 0.54, 2.23e-4)
}

fn ac3() -> Outcome {
    let mut worst_b = 0.0f64;
    let mut worst_i = 0.0f64;
    let mut worst_c = 0.0f64;
    for q0 in [1e10, 5e10] {
        let (spec, bvp, sol) = wave(q0)?;
        let q = (bvp.q_of_u)(sol.u_s);
        let (_, f0) = sol.profile_slope(0.0).map_err(e)?;
        let (_, fl) = sol.profile_slope(sol.delta_star * (1.0 - 1e-15)).map_err(e)?;
        let (_, fs) = sol.profile_slope(sol.delta_star * (1.0 + 1e-15)).map_err(e)?;
        let u_front = sol.enthalpy_at(sol.delta).map_err(e)?.1;
        let v_front = sol.enthalpy_at(sol.delta * (1.0 + 1e-15)).map_err(e)?.1;
        let far = sol.enthalpy_at(sol.delta + 60.0 * (bvp.d2)(bvp.v_inf) / sol.mu).map_err(e)?.1;
        let vm = (bvp.v_m - bvp.v_inf).abs();
        for r in [
            rel(sol.mu, (bvp.h_of_u)(sol.u_s)),
            (f0 - (bvp.h1 * sol.mu - q)).abs() / q.abs().max((bvp.h1 * sol.mu).abs()),
            rel(u_front, bvp.u_m),
            rel(v_front, bvp.v_m),
            (fs - fl - bvp.h2 * sol.mu).abs() / fs.abs().max(fl.abs()),
            (far - bvp.v_inf).abs() / vm,
        ] {
            worst_b = worst_b.max(r);
        }
        let w = |x: f64| sol.enthalpy_at(x).map(|p| p.1).unwrap_or(f64::NAN);
        for (lo, hi, d) in [
            (0.0, sol.delta, bvp.d1.clone()),
            (sol.delta, sol.delta + 5.0 * (bvp.d2)(bvp.v_inf) / sol.mu, bvp.d2.clone()),
        ] {
            let h = (hi - lo) * 1e-4;
            for i in 1..20 {
                let x = lo + (hi - lo) * i as f64 / 20.0;
                let flux = |y: f64| {
                    let (a, b) = (w(y - h / 2.0), w(y + h / 2.0));
                    d(0.5 * (a + b)) * (b - a) / h
                };
                let div = (flux(x + h / 2.0) - flux(x - h / 2.0)) / h;
                let adv = sol.mu * (w(x + h) - w(x - h)) / (2.0 * h);
                worst_i = worst_i.max((div + adv).abs() / adv.abs());
            }
        }
        let ts = kirchhoff_inverse(&spec, Phase::Liquid, sol.u_s).map_err(e)?;
        for i in 0..CLOSED_FORM_POINTS {
            let xi = 3.0 * sol.delta * i as f64 / (CLOSED_FORM_POINTS - 1) as f64;
            let (_, t) = profile_physical(&sol, &spec, xi).map_err(e)?;
            worst_c = worst_c.max(rel(t, common::wave_temperature(&spec, &sol, ts, xi)));
        }
    }
    let msg = format!("boundary {worst_b:.2e}, interior {worst_i:.2e}, closed forms {worst_c:.2e}");
    ensure(
        worst_b <= BOUNDARY_TOL && worst_i <= INTERIOR_TOL && worst_c <= CLOSED_FORM_TOL,
        || msg.clone(),
    )?;
    Ok(msg)
}

fn ac4() -> Outcome {
    let (_, bvp, sol) = wave(1e10)?;
    let t_end = 10.0 * sol.delta / sol.mu;
    let mut errs = Vec::new();
    for n in FD_GRIDS {
        let v = validate_travelling_wave(&bvp, &sol, t_end, &FdGrid::new(n)).map_err(e)?;
        errs.push(v.velocity_error);
    }
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let msg = format!(
        "velocity rel. error on N = {FD_GRIDS:?}: {:.2e}, {:.2e}, {:.2e} (monotone: {monotone})",
        errs[0], errs[1], errs[2]
    );
    ensure(errs[2] <= FD_VELOCITY_TOL && monotone, || msg.clone())?;
    Ok(msg)
}

fn ac5() -> Outcome {
    let mut checked = 0;
    for k in [1.0, -2.0, -4.0 / 3.0] {
        for gamma in [0.0, 1.0] {
            for q0 in [0.0, 1.0] {
                let c = classify_rod_bvp(k, gamma, q0).map_err(e)?;
                ensure(c.row == common::rod_row(k, gamma, q0), || {
                    format!("k={k} gamma={gamma} q0={q0}: row {:?}", c.row)
                })?;
                let mut fams = vec!["T1", "T2", "T3", "T4", "T_r"];
                if (k + 4.0 / 3.0).abs() < 1e-12 {
                    fams.push("T5");
                }
                for id in fams {
                    let want = common::rod_expectation(k, gamma, q0, id);
                    ensure(c.passes(id) == want, || {
                        format!("{id} at k={k} gamma={gamma} q0={q0}: got {}, want {want}", c.passes(id))
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("12 configurations, {checked} family verdicts and all rows match"))
}

fn ac6() -> Outcome {
    type Law = SurfaceLaw<f64>;
    let l = |f: fn(f64, f64) -> f64| -> Law { Arc::new(f) };
    let cases: Vec<(&str, Law, Law, u8)> = vec![
        ("q(t,u), h(t,u)", l(|t, u| (1.0 + u * u) * (2.0 + t.sin())), l(|t, u| (0.5 + 0.2 * u) * (1.0 + 0.1 * t)), 1),
        ("q(u), h(u)", l(|_, u| 1.0 + u * u), l(|_, u| 0.5 + 0.2 * u), 2),
        ("q(u)/sqrt(t), h(u)/sqrt(t)", l(|t, u| (1.0 + u * u) / t.sqrt()), l(|t, u| (0.5 + 0.2 * u) / t.sqrt()), 3),
        ("q(u) t, h(u)", l(|t, u| (1.0 + u * u) * t), l(|_, u| 0.5 + 0.2 * u), 1),
        ("q(u)/sqrt(t), h(u)", l(|t, u| (1.0 + u * u) / t.sqrt()), l(|_, u| 0.5 + 0.2 * u), 1),
    ];
    let mut rows = Vec::new();
    for (name, q, h, want) in cases {
        let c = classify_stefan_bvp(q, h).map_err(e)?;
        ensure(c.row == want, || format!("{name}: row {} (want {want}), passing {:?}", c.row, c.passing))?;
        rows.push(c.row.to_string());
    }
    Ok(format!("rows {} for 3 canonical + 2 counterexample forms", rows.join(",")))
}

fn ac7() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for case in 1..=8 {
        let r = verify_table2_generators(case).map_err(e)?;
        for (label, rep) in &r.results {
            let m = rep.max_residual();
            ensure(m <= GENERATOR_TOL, || format!("case {case} `{label}`: residual {m:.2e}"))?;
            worst = worst.max(m);
            count += 1;
        }
    }
    Ok(format!("{count} generators over cases 1-8, max normalized residual {worst:.2e}"))
}

fn ac8() -> Outcome {
    let mut worst = 0.0f64;
    for (k1, k2, u_s) in [(1.0, 2.0, 2.0), (0.5, 0.5, 1.5), (2.0, 0.7, 4.0)] {
        let bvp = TransformedBvp {
            d1: Arc::new(move |_| k1),
            d2: Arc::new(move |_| k2),
            q_of_u: Arc::new(|_| 1.0),
            h_of_u: Arc::new(|u| u),
            time_law: TimeLaw::InverseSqrt,
            h1: 0.0,
            h2: 0.5,
            u_m: 1.0,
            v_m: 0.6,
            v_inf: 0.1,
            u_cap: 10.0,
        };
        let sol = solve_fixed_surface(&bvp, u_s, &SelfSimilarOptions::default()).map_err(e)?;
        let exact = common::neumann_omega(k1, k2, u_s, bvp.u_m, bvp.v_m, bvp.v_inf, bvp.h2);
        worst = worst.max(rel(sol.omega2, exact));
    }
    let spec = MaterialSpec::aluminium(1e10);
    let bvp = build_transformed_bvp(&spec, TimeLaw::InverseSqrt).map_err(e)?;
    let sol = solve_self_similar(&bvp).map_err(e)?;
    let v = validate_self_similar(&bvp, &sol, 1.0, 1.5, &FdGrid::new(10)).map_err(e)?;
    let msg = format!(
        "Neumann root rel. error {worst:.2e}; oracle omega2 {:.6e} vs shooting {:.6e} (rel. {:.2e}), exponent {:.4}",
        v.omega2_fit, sol.omega2, v.omega2_error, v.exponent2
    );
    ensure(worst <= NEUMANN_TOL && v.omega2_error <= FD_OMEGA_TOL, || msg.clone())?;
    Ok(msg)
}

fn families() -> Vec<GroupAction<f64>> {
    vec![
        GroupAction::time_translation(1),
        GroupAction::space_translation(1),
        GroupAction::parabolic_dilation(1),
        named_family(1.5, "T4").unwrap(),
        named_family(-4.0 / 3.0, "T5").unwrap(),
        named_family(0.7, "T_r+x").unwrap(),
        combination(-0.5, 1.0, -2.0, 1.0),
        GroupAction::new(
            "alpha d_w",
            FamilyKind::LinearSuperposition,
            AxisFlow::identity(),
            AxisFlow::identity(),
            vec![FieldFlow::Superposition(HeatSolution::Kernel { k: 0.8 })],
        ),
    ]
}

fn ac9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xac9);
    let fams = families();

    // Group law and identity.
    let mut worst_g = 0.0f64;
    for _ in 0..500 {
        let g = &fams[rng.gen_range(0..fams.len())];
        let (a, b) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let p = Point { t: rng.gen_range(0.5..2.0), x: rng.gen_range(0.1..1.0), w: vec![rng.gen_range(0.5..2.0)], surfaces: vec![] };
        let id = g.apply(0.0, &p).map_err(e)?;
        let two = g.apply(a, &g.apply(b, &p).map_err(e)?).map_err(e)?;
        let one = g.apply(a + b, &p).map_err(e)?;
        for (x, y) in [(id.t, p.t), (id.x, p.x), (id.w[0], p.w[0]), (two.t, one.t), (two.x, one.x), (two.w[0], one.w[0])] {
            worst_g = worst_g.max((x - y).abs() / y.abs().max(1.0));
        }
    }

    // Kirchhoff round trips.
    let spec = MaterialSpec::aluminium(1e10);
    let mut worst_k = 0.0f64;
    for i in 0..KIRCHHOFF_SAMPLES {
        let (phase, t) = if i % 2 == 0 {
            (Phase::Liquid, rng.gen_range(spec.t_melting..spec.t_cap()))
        } else {
            (Phase::Solid, rng.gen_range(spec.t_far..spec.t_melting))
        };
        let w = kirchhoff_forward(&spec, phase, t).map_err(e)?;
        worst_k = worst_k.max(rel(kirchhoff_inverse(&spec, phase, w).map_err(e)?, t));
    }

    // Prolongation against finite differences of the transformed graph.
    let f = |t: f64, x: f64| (1.3 * x + 0.4).sin() * (-0.3 * t).exp() + 0.2 * x * x * t + 1.5;
    let mut worst_p = 0.0f64;
    for _ in 0..200 {
        let g = &fams[rng.gen_range(0..fams.len())];
        let (eps, t, x): (f64, f64, f64) = (rng.gen_range(-0.5..0.5), rng.gen_range(0.6..1.8), rng.gen_range(0.2..0.9));
        let ex = (-0.3 * t).exp();
        let jet = Jet {
            t,
            x,
            w: vec![f(t, x)],
            w_t: vec![-0.3 * (1.3 * x + 0.4).sin() * ex + 0.2 * x * x],
            w_x: vec![1.3 * (1.3 * x + 0.4).cos() * ex + 0.4 * x * t],
            w_xx: Some(vec![-1.69 * (1.3 * x + 0.4).sin() * ex + 0.4 * t]),
            surfaces: vec![],
        };
        let star = g.prolong(eps, &jet).map_err(e)?;
        let image = |ts: f64, xs: f64| -> f64 {
            let back = g.apply(-eps, &Point { t: ts, x: xs, w: vec![0.0], surfaces: vec![] }).unwrap();
            g.apply(eps, &Point { t: back.t, x: back.x, w: vec![f(back.t, back.x)], surfaces: vec![] }).unwrap().w[0]
        };
        let (ts, xs) = (star.t, star.x);
        let rich = |d: &dyn Fn(f64) -> f64, h: f64| (4.0 * d(h / 2.0) - d(h)) / 3.0;
        let d_t = rich(&|h| (image(ts + h, xs) - image(ts - h, xs)) / (2.0 * h), 1e-3);
        let d_x = rich(&|h| (image(ts, xs + h) - image(ts, xs - h)) / (2.0 * h), 1e-3);
        let d_xx = rich(&|h| (image(ts, xs + h) - 2.0 * image(ts, xs) + image(ts, xs - h)) / (h * h), 2e-3);
        let w_xx = star.w_xx.as_ref().map(|v| v[0]).unwrap_or(f64::NAN);
        for (a, b) in [(d_t, star.w_t[0]), (d_x, star.w_x[0]), (d_xx, w_xx)] {
            worst_p = worst_p.max((a - b).abs() / b.abs().max(1.0));
        }
    }

    // Evaporation velocity strictly increasing in enthalpy.
    let mut monotone = true;
    for q0 in [1e9, 1e10, 5e10] {
        let bvp = build_transformed_bvp(&MaterialSpec::aluminium(q0), TimeLaw::Steady).map_err(e)?;
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=2000 {
            let h = (bvp.h_of_u)(bvp.u_m + (bvp.u_cap - bvp.u_m) * i as f64 / 2000.0);
            monotone &= h > prev;
            prev = h;
        }
    }

    // Byte-identical artifacts on rerun.
    let artifact = || -> Result<String, String> {
        let (spec, _, sol) = wave(1e10)?;
        let xs: Vec<f64> = (0..100).map(|i| 3.0 * sol.delta * i as f64 / 99.0).collect();
        Ok(travelling_wave_csv(&sol, &spec, &xs, "run").map_err(e)? + &travelling_wave_summary(&sol, "").map_err(e)?)
    };
    let identical = artifact()? == artifact()?;

    let msg = format!(
        "group law {worst_g:.1e}, Kirchhoff {worst_k:.1e}, prolongation {worst_p:.1e}, h monotone {monotone}, deterministic {identical}"
    );
    ensure(
        worst_g <= GROUP_LAW_TOL && worst_k <= KIRCHHOFF_TOL && worst_p <= PROLONGATION_TOL && monotone && identical,
        || msg.clone(),
    )?;
    Ok(msg)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("AC1", ac1, Duration::from_secs(1)),
        ("AC2", ac2, Duration::from_secs(1)),
        ("AC3", ac3, Duration::from_secs(1)),
        ("AC4", ac4, Duration::from_secs(60)),
        ("AC5", ac5, Duration::from_secs(10)),
        ("AC6", ac6, Duration::from_secs(10)),
        ("AC7", ac7, Duration::from_secs(10)),
        ("AC8", ac8, Duration::from_secs(60)),
        ("AC9", ac9, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (verdict, detail) = match outcome {
            Ok(d) if took <= budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; exceeded time budget")),
            Err(d) => ("FAIL", d),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("{name} {verdict} [{:.3} s / {} s] {detail}", took.as_secs_f64(), budget.as_secs());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
