use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use sha2::{Digest, Sha256};
use stefan_core::export::{
    residual_csv, sci, self_similar_csv, self_similar_summary, snapshots_csv, travelling_wave_csv,
    travelling_wave_summary,
};
use stefan_core::fd_oracle::{validate_self_similar, validate_travelling_wave, FdGrid};
use stefan_core::self_similar::{solve_self_similar_with, SelfSimilarOptions};
use stefan_core::symmetry::{classify_rod_bvp, classify_stefan_bvp, verify_table2_generators, InvarianceReport, SurfaceLaw};
use stefan_core::travelling_wave::solve_travelling_wave;
use stefan_core::{build_transformed_bvp, Error, MaterialSpec, TimeLaw};

use crate::{Cli, Command, Law, Mode, Scenario};

/// Published (q0, mu, delta) for aluminium.
const PUBLISHED: [(f64, f64, f64); 2] = [(1e10, 0.10, 9.60e-4), (5e10, 0.54, 2.23e-4)];

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Core(#[from] Error),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Tolerance(String),
}

impl Failure {
    /// 2 for configuration problems, 1 for everything that failed while solving.
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(
                Error::Config(_)
                | Error::InvalidMaterial(_)
                | Error::Precondition(_)
                | Error::ConstitutiveLaw(_)
                | Error::Construction { .. },
            ) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

struct Output {
    dir: PathBuf,
    header: String,
}

impl Output {
    fn new(dir: &Path, spec: &MaterialSpec, command: &Command) -> Result<Self> {
        let mut hasher = Sha256::new();
        hasher.update(spec.to_config_string()?.as_bytes());
        hasher.update(format!("{command:?}").as_bytes());
        let header = format!(
            "stefan {} config_sha256={}",
            env!("CARGO_PKG_VERSION"),
            hex::encode(hasher.finalize())
        );
        fs::create_dir_all(dir).map_err(|source| Failure::Io { path: dir.to_path_buf(), source })?;
        Ok(Self { dir: dir.to_path_buf(), header })
    }

    fn write(&self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|source| Failure::Io { path: path.clone(), source })?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    /// Plain-text artifact with the header as a `#` comment.
    fn write_text(&self, name: &str, body: &str) -> Result<()> {
        self.write(name, &format!("# {}\n{body}", self.header))
    }
}

fn load(cli: &Cli, q0: Option<f64>) -> Result<MaterialSpec> {
    let mut spec = MaterialSpec::from_config_file(&cli.material)?;
    for (k, v) in &cli.overrides {
        spec.set(k, *v)?;
    }
    if let Some(q0) = q0 {
        spec.q0 = q0;
    }
    spec.validate()?;
    Ok(spec)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn run(cli: &Cli) -> Result<()> {
    let q0 = match &cli.command {
        Command::SolveTw { flux, .. } | Command::SolveSs { flux, .. } | Command::VerifyFd { flux, .. } => flux.q0,
        _ => None,
    };
    // Everything that can be a config error is checked before the output
    // directory is touched.
    let spec = load(cli, q0)?;
    match &cli.command {
        Command::SolveTw { points, span, .. } => {
            let bvp = build_transformed_bvp(&spec, TimeLaw::Steady)?;
            let sol = solve_travelling_wave(&bvp)?;
            let out = Output::new(&cli.out_dir, &spec, &cli.command)?;
            let xs = linspace(0.0, span * sol.delta, *points);
            out.write("tw_profile.csv", &travelling_wave_csv(&sol, &spec, &xs, &out.header)?)?;
            let summary = travelling_wave_summary(&sol, &out.header)?;
            out.write("tw_summary.csv", &summary)?;
            print!("{}", summary.lines().skip(1).collect::<Vec<_>>().join("\n") + "\n");
        }
        Command::SolveSs { points, span, tol, .. } => {
            let bvp = build_transformed_bvp(&spec, TimeLaw::InverseSqrt)?;
            if !(*tol > 0.0) {
                return Err(Error::Config(format!("--tol must be positive, got {tol}")).into());
            }
            let opts = SelfSimilarOptions { tol: *tol, ..Default::default() };
            let sol = solve_self_similar_with(&bvp, &opts)?;
            let out = Output::new(&cli.out_dir, &spec, &cli.command)?;
            let om = linspace(sol.omega1, span * sol.omega2, *points);
            out.write("ss_profile.csv", &self_similar_csv(&sol, &spec, &om, &out.header)?)?;
            let summary = self_similar_summary(&sol, &out.header)?;
            out.write("ss_summary.csv", &summary)?;
            print!("{}", summary.lines().skip(1).collect::<Vec<_>>().join("\n") + "\n");
        }
        Command::Check { scenario, k, gamma, q0, law } => {
            check(cli, &spec, *scenario, (*k, *gamma, *q0), *law)?;
        }
        Command::VerifyFd { mode, n, n_solid, dt_fraction, periods, t0, t_end, snapshot_every, tol, .. } => {
            if *n < 2 || !(*dt_fraction > 0.0 && *dt_fraction <= 1.0) || *snapshot_every == 0 {
                return Err(Error::Config("need --n >= 2, 0 < --dt-fraction <= 1, --snapshot-every >= 1".into()).into());
            }
            let grid = FdGrid {
                n_sol: *n_solid,
                dt_fraction: *dt_fraction,
                snapshot_every: Some(*snapshot_every),
                ..FdGrid::new(*n)
            };
            let (report, run, error, what) = match mode {
                Mode::Tw => {
                    let bvp = build_transformed_bvp(&spec, TimeLaw::Steady)?;
                    let sol = solve_travelling_wave(&bvp)?;
                    let v = validate_travelling_wave(&bvp, &sol, periods * sol.delta / sol.mu, &grid)?;
                    (v.to_key_value(), v.run, v.velocity_error, "front velocity")
                }
                Mode::Ss => {
                    if !(*t0 > 0.0 && t_end > t0) {
                        return Err(Error::Config(format!("need 0 < --t0 < --t-end, got {t0}, {t_end}")).into());
                    }
                    let bvp = build_transformed_bvp(&spec, TimeLaw::InverseSqrt)?;
                    let sol = solve_self_similar_with(&bvp, &SelfSimilarOptions::default())?;
                    let v = validate_self_similar(&bvp, &sol, *t0, *t_end, &grid)?;
                    (v.to_key_value(), v.run, v.omega2_error, "omega2")
                }
            };
            let out = Output::new(&cli.out_dir, &spec, &cli.command)?;
            out.write_text("fd_report.txt", &report)?;
            let mut fronts = format!("# {}\nt,s1,s2\n", out.header);
            for (t, s1, s2) in &run.fronts {
                let _ = writeln!(fronts, "{},{},{}", sci(*t), sci(*s1), sci(*s2));
            }
            out.write("fd_fronts.csv", &fronts)?;
            out.write("fd_snapshots.csv", &snapshots_csv(&run.snapshots, &spec, &out.header)?)?;
            print!("{report}");
            if !(error <= *tol) {
                return Err(Failure::Tolerance(format!(
                    "{what} relative error {error:.3e} exceeds --tol {tol:.3e}"
                )));
            }
        }
        Command::ReproducePaper { points } => {
            let mut cases = Vec::new();
            for (q0, mu_pub, delta_pub) in PUBLISHED {
                let mut s = spec.clone();
                s.q0 = q0;
                let bvp = build_transformed_bvp(&s, TimeLaw::Steady)?;
                cases.push((s, solve_travelling_wave(&bvp)?, mu_pub, delta_pub));
            }
            let out = Output::new(&cli.out_dir, &spec, &cli.command)?;
            let mut summary = format!(
                "# {}\nq0_W_m2,mu_published_m_s,mu_m_s,delta_published_m,delta_m,u_s_J_m3,T_s_K\n",
                out.header
            );
            let mut table = format!(
                "{:>10}  {:>8}  {:>10}  {:>10}  {:>12}\n",
                "q0 W/m^2", "mu pub", "mu", "delta pub", "delta"
            );
            // Both temperature profiles on a common axis: three thicknesses
            // of the deeper melt layer.
            let extent = 3.0 * cases.iter().map(|c| c.1.delta).fold(0.0, f64::max);
            let xs = linspace(0.0, extent, *points);
            for (s, sol, mu_pub, delta_pub) in &cases {
                let ts = sol.temperature_at(s, 0.0)?.1;
                let _ = writeln!(
                    summary,
                    "{},{},{},{},{},{},{}",
                    sci(s.q0),
                    sci(*mu_pub),
                    sci(sol.mu),
                    sci(*delta_pub),
                    sci(sol.delta),
                    sci(sol.u_s),
                    sci(ts)
                );
                let _ = writeln!(
                    table,
                    "{:>10.1e}  {:>8.2}  {:>10.4}  {:>10.2e}  {:>12.4e}",
                    s.q0, mu_pub, sol.mu, delta_pub, sol.delta
                );
                out.write(&format!("profile_q0_{:e}.csv", s.q0), &travelling_wave_csv(sol, s, &xs, &out.header)?)?;
            }
            out.write("reproduce_summary.csv", &summary)?;
            print!("{table}");
        }
    }
    Ok(())
}

fn law_pair(law: Law) -> (SurfaceLaw<f64>, SurfaceLaw<f64>, &'static str) {
    match law {
        Law::General => (
            Arc::new(|t: f64, u: f64| (1.0 + u * u) * (2.0 + t.sin())),
            Arc::new(|t: f64, u: f64| (0.5 + 0.2 * u) * (1.0 + 0.1 * t)),
            "q = (1 + u^2)(2 + sin t), h = (0.5 + 0.2 u)(1 + 0.1 t)",
        ),
        Law::Autonomous => (
            Arc::new(|_, u: f64| 1.0 + u * u),
            Arc::new(|_, u: f64| 0.5 + 0.2 * u),
            "q = 1 + u^2, h = 0.5 + 0.2 u",
        ),
        Law::InverseSqrt => (
            Arc::new(|t: f64, u: f64| (1.0 + u * u) / t.sqrt()),
            Arc::new(|t: f64, u: f64| (0.5 + 0.2 * u) / t.sqrt()),
            "q = (1 + u^2)/sqrt(t), h = (0.5 + 0.2 u)/sqrt(t)",
        ),
    }
}

fn report_table(title: &str, reports: &[&InvarianceReport]) -> String {
    let mut s = format!("{title}\n{:<28} {:<6} {:>12}  constraints\n", "family", "verdict", "max resid");
    for r in reports {
        let _ = writeln!(
            s,
            "{:<28} {:<6} {:>12.3e}  {}",
            r.family,
            if r.pass { "pass" } else { "fail" },
            r.max_residual(),
            r.constraints.join("; ")
        );
        for v in r.verdicts.iter().filter(|v| !v.pass) {
            let _ = writeln!(
                s,
                "    {:?} {}: {:.3e} > {:.1e}{}",
                v.item,
                v.condition,
                v.max_residual,
                v.tolerance,
                v.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
            );
        }
    }
    s
}

fn check(cli: &Cli, spec: &MaterialSpec, scenario: Scenario, rod: (f64, f64, f64), law: Law) -> Result<()> {
    let (text, reports): (String, Vec<InvarianceReport>) = match scenario {
        Scenario::Rod => {
            let (k, gamma, q0) = rod;
            let c = classify_rod_bvp(k, gamma, q0)?;
            // Named families in full; the lambda-combination scan only as a count.
            let (scan, named): (Vec<&InvarianceReport>, Vec<&InvarianceReport>) =
                c.reports.iter().partition(|r| r.family.starts_with("T_a("));
            let mut text = report_table(
                &format!("rod problem u_t = (u^k u_x)_x, u^k u_x = q0 cos(gamma t): k = {k}, gamma = {gamma}, q0 = {q0}"),
                &named,
            );
            let _ = writeln!(
                text,
                "lambda-combination scan: {} of {} pass (all residuals in the CSV)",
                scan.iter().filter(|r| r.pass).count(),
                scan.len()
            );
            let _ = writeln!(text, "passing: {}", c.passing.join(", "));
            match c.row {
                Some(r) => {
                    let _ = writeln!(text, "classification: row {r} (catalog-complete over the candidate families)");
                }
                None => {
                    let _ = writeln!(text, "classification: no row (catalog-complete over the candidate families)");
                }
            }
            (text, c.reports)
        }
        Scenario::Stefan => {
            let (q, h, label) = law_pair(law);
            let c = classify_stefan_bvp(q, h)?;
            let mut text = report_table(&format!("two-phase Stefan problem, {label}"), &c.reports.iter().collect::<Vec<_>>());
            let _ = writeln!(text, "passing: {}", c.passing.join(", "));
            let _ = writeln!(text, "classification: row {}", c.row);
            (text, c.reports)
        }
        Scenario::GeneratorCase(n) => {
            let r = verify_table2_generators(n)?;
            let refs: Vec<&InvarianceReport> = r.results.iter().map(|(_, rep)| rep).collect();
            let mut text = report_table(&format!("generator case {n}"), &refs);
            let _ = writeln!(text, "all generators leave the system invariant: {}", r.pass);
            (text, r.results.into_iter().map(|(_, rep)| rep).collect())
        }
    };
    let out = Output::new(&cli.out_dir, spec, &cli.command)?;
    out.write_text(&format!("check_{scenario}.txt"), &text)?;
    out.write(&format!("check_{scenario}_residuals.csv"), &residual_csv(&reports, &out.header)?)?;
    print!("{text}");
    Ok(())
}
