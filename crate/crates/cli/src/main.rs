//! Command-line runner: constants tables, heteroclinic diagnostics, the
//! first-return map, reduced-energy critical points, matched radial
//! towers, multi-bubble synthesis, and parameter sweeps.
//!
//! Outputs are deterministic: identical configs produce byte-identical
//! files. Wall time goes to stderr only.

mod config;
mod report;

use bubbletower as bt;
use bubbletower::{ConstantKind, DomainGeometry};
use clap::{Parser, Subcommand, ValueEnum};
use report::{Json, RunReport};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "bubbletower",
    version,
    about = "Supercritical bubble-tower numerics"
)]
struct Cli {
    /// Flat `key = value` file with defaults; command-line flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Primary output path (stdout when absent)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Primary output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Optional path for the sampled-curve CSV of curve-producing commands
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimensional constants C1..C8 and the per-bubble energy
    Constants {
        #[arg(long)]
        dimension: Option<u32>,
    },
    /// Shoot the heteroclinic and report the bump sequences
    Heteroclinic {
        #[arg(long)]
        dimension: Option<u32>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Number of minima to locate
        #[arg(long)]
        bumps: Option<usize>,
    },
    /// First-return map of the orbit through (eta, 0)
    ReturnMap {
        #[arg(long)]
        dimension: Option<u32>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Starting amplitude (default c_p / 2)
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Critical points of the reduced energy
    Reduce {
        #[arg(long)]
        geometry: Option<String>,
        #[arg(long)]
        dimension: Option<u32>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        ell: Option<u32>,
    },
    /// Matched radial tower on the unit ball
    Radial {
        #[arg(long)]
        dimension: Option<u32>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long)]
        xi: Option<f64>,
        /// Cross-validate against the amplitude-shooting oracle
        #[arg(long)]
        oracle: bool,
    },
    /// Synthesize a multi-bubble profile from a reduce report
    Tower {
        #[arg(long, value_name = "JSON")]
        from_critical: Option<PathBuf>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Which critical point of the report to use
        #[arg(long)]
        index: Option<usize>,
        /// Samples per decade of the radial grids
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Heteroclinic diagnostics over an epsilon grid
    Sweep {
        #[arg(long)]
        dimension: Option<u32>,
        /// Comma-separated epsilon grid, evaluated in input order
        #[arg(long)]
        epsilons: Option<String>,
        #[arg(long)]
        bumps: Option<usize>,
    },
}

fn main() {
    std::process::exit(run());
}

const EXIT_OK: i32 = 0;
const EXIT_COMPUTE: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_IO: i32 = 3;

fn run() -> i32 {
    let started = Instant::now();
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(path) => match config::load(path) {
            Ok(f) => f,
            Err(e) => return usage_error(&e),
        },
        None => config::FileConfig::empty(),
    };
    let outcome = dispatch(&cli, &file);
    let code = match outcome {
        Ok((report, curve)) => {
            let primary = match cli.format {
                Format::Json => report.to_json().to_string_pretty(),
                Format::Csv => match &curve {
                    Some(text) => text.clone(),
                    None => report.to_csv(),
                },
            };
            if let Err(e) = write_primary(cli.output.as_deref(), &primary) {
                eprintln!("bubbletower: io error: {e}");
                return EXIT_IO;
            }
            if cli.format == Format::Json {
                if let (Some(path), Some(text)) = (&cli.csv, &curve) {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("bubbletower: io error: {e}");
                        return EXIT_IO;
                    }
                }
            }
            EXIT_OK
        }
        Err(Failure::Usage(msg)) => return usage_error(&msg),
        Err(Failure::Io(msg)) => {
            eprintln!("bubbletower: io error: {msg}");
            EXIT_IO
        }
        Err(Failure::Compute { command, message }) => {
            let mut report = RunReport::new(&command);
            report.status = "error";
            report.message = message;
            let primary = match cli.format {
                Format::Json => report.to_json().to_string_pretty(),
                Format::Csv => report.to_csv(),
            };
            if let Err(e) = write_primary(cli.output.as_deref(), &primary) {
                eprintln!("bubbletower: io error: {e}");
                return EXIT_IO;
            }
            EXIT_COMPUTE
        }
    };
    eprintln!("wall_time_s={:.3}", started.elapsed().as_secs_f64());
    code
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("bubbletower: usage error: {msg}");
    EXIT_USAGE
}

fn write_primary(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

enum Failure {
    Usage(String),
    Compute { command: String, message: String },
    Io(String),
}

fn compute_err(command: &str) -> impl Fn(bt::Error) -> Failure + '_ {
    move |e| Failure::Compute {
        command: command.into(),
        message: e.to_string(),
    }
}

/// Schema gate shared by every command that takes a dimension.
fn check_dimension(n: u32) -> Result<u32, Failure> {
    if n < 5 {
        return Err(Failure::Usage(format!(
            "--dimension must be at least 5, got {n}"
        )));
    }
    Ok(n)
}

type Outcome = Result<(RunReport, Option<String>), Failure>;

fn dispatch(cli: &Cli, file: &config::FileConfig) -> Outcome {
    match &cli.command {
        Cmd::Constants { dimension } => cmd_constants(*dimension, file),
        Cmd::Heteroclinic {
            dimension,
            epsilon,
            bumps,
        } => cmd_heteroclinic(*dimension, *epsilon, *bumps, file),
        Cmd::ReturnMap {
            dimension,
            epsilon,
            eta,
        } => cmd_return_map(*dimension, *epsilon, *eta, file),
        Cmd::Reduce {
            geometry,
            dimension,
            m,
            mu,
            ell,
        } => cmd_reduce(geometry.clone(), *dimension, *m, *mu, *ell, file),
        Cmd::Radial {
            dimension,
            epsilon,
            mu,
            ell,
            xi,
            oracle,
        } => cmd_radial(*dimension, *epsilon, *mu, *ell, *xi, *oracle, file),
        Cmd::Tower {
            from_critical,
            epsilon,
            index,
            resolution,
        } => cmd_tower(from_critical.clone(), *epsilon, *index, *resolution, file),
        Cmd::Sweep {
            dimension,
            epsilons,
            bumps,
        } => cmd_sweep(*dimension, epsilons.clone(), *bumps, file),
    }
}

fn cmd_constants(dimension: Option<u32>, file: &config::FileConfig) -> Outcome {
    file.check_keys(&["dimension"]).map_err(Failure::Usage)?;
    let n = config::pick(
        dimension,
        file.get_u32("dimension").map_err(Failure::Usage)?,
        None,
        "dimension",
    )
    .map_err(Failure::Usage)?;
    check_dimension(n)?;
    let err = compute_err("constants");
    let mut report = RunReport::new("constants");
    report
        .config
        .push(("dimension".into(), Json::Int(n as i64)));
    for kind in ConstantKind::ALL {
        report.value(kind.label(), bt::constant(kind, n).map_err(&err)?);
    }
    report.value("bubble_energy", bt::bubble_energy(n).map_err(&err)?);
    report.diagnostic(
        "note",
        "C3 is the U^p moment of the blow-up statement; bubble_energy is the Dirichlet mass per bubble",
    );
    Ok((report, None))
}

fn cmd_heteroclinic(
    dimension: Option<u32>,
    epsilon: Option<f64>,
    bumps: Option<usize>,
    file: &config::FileConfig,
) -> Outcome {
    file.check_keys(&["dimension", "epsilon", "bumps"])
        .map_err(Failure::Usage)?;
    let n = config::pick(
        dimension,
        file.get_u32("dimension").map_err(Failure::Usage)?,
        None,
        "dimension",
    )
    .map_err(Failure::Usage)?;
    let eps = config::pick(
        epsilon,
        file.get_f64("epsilon").map_err(Failure::Usage)?,
        None,
        "epsilon",
    )
    .map_err(Failure::Usage)?;
    let bumps = config::pick(
        bumps,
        file.get_usize("bumps").map_err(Failure::Usage)?,
        Some(3),
        "bumps",
    )
    .map_err(Failure::Usage)?;
    check_dimension(n)?;
    let err = compute_err("heteroclinic");
    let params = bt::derive_params(n, eps).map_err(&err)?;
    let profile = bt::shoot_heteroclinic(&params, bumps).map_err(&err)?;
    let seq = bt::extract_critical_sequence(&profile, bumps).map_err(&err)?;
    let mut report = RunReport::new("heteroclinic");
    report
        .config
        .push(("dimension".into(), Json::Int(n as i64)));
    report.config.push(("epsilon".into(), Json::Num(eps)));
    report
        .config
        .push(("bumps".into(), Json::Int(bumps as i64)));
    report.value("normalization_residual", profile.normalization_residual);
    report.values_indexed("t_min", &seq.t_min);
    report.values_indexed("t_max", &seq.t_max);
    report.values_indexed("epsv", &seq.epsv);
    report.values_indexed("eta", &seq.eta);
    report.value("beta_1", bt::beta_ell(&profile, 1).map_err(&err)?);
    let mut csv = Vec::new();
    profile
        .trajectory
        .write_csv(&mut csv)
        .map_err(|e| Failure::Io(e.to_string()))?;
    Ok((report, Some(String::from_utf8(csv).expect("ascii csv"))))
}

fn cmd_return_map(
    dimension: Option<u32>,
    epsilon: Option<f64>,
    eta: Option<f64>,
    file: &config::FileConfig,
) -> Outcome {
    file.check_keys(&["dimension", "epsilon", "eta"])
        .map_err(Failure::Usage)?;
    let n = config::pick(
        dimension,
        file.get_u32("dimension").map_err(Failure::Usage)?,
        None,
        "dimension",
    )
    .map_err(Failure::Usage)?;
    let eps = config::pick(
        epsilon,
        file.get_f64("epsilon").map_err(Failure::Usage)?,
        None,
        "epsilon",
    )
    .map_err(Failure::Usage)?;
    check_dimension(n)?;
    let err = compute_err("return-map");
    let params = bt::derive_params(n, eps).map_err(&err)?;
    let eta = config::pick(
        eta,
        file.get_f64("eta").map_err(Failure::Usage)?,
        Some(0.5 * params.c_p),
        "eta",
    )
    .map_err(Failure::Usage)?;
    let r = bt::first_return(&params, eta).map_err(&err)?;
    let mut report = RunReport::new("return-map");
    report
        .config
        .push(("dimension".into(), Json::Int(n as i64)));
    report.config.push(("epsilon".into(), Json::Num(eps)));
    report.config.push(("eta".into(), Json::Num(eta)));
    report.value("t_bar", r.t_bar);
    report.value("t_under", r.t_under);
    report.value("v_return", r.v_return);
    report.value("gap", r.gap);
    report.value("gap_over_eps", r.gap / eps);
    report.value("en", r.en);
    Ok((report, None))
}

fn critical_point_json(cp: &bt::CriticalPoint) -> Json {
    let cfg = &cp.config;
    Json::Obj(vec![
        (
            "geometry".into(),
            Json::Str(
                match cfg.geometry {
                    DomainGeometry::UnitBall => "ball",
                    DomainGeometry::ExteriorUnitBall => "exterior",
                }
                .into(),
            ),
        ),
        ("dimension".into(), Json::Int(cfg.n as i64)),
        ("mu".into(), Json::Num(cfg.mu)),
        (
            "lambda".into(),
            Json::Arr(cfg.lambda.iter().map(|v| Json::Num(*v)).collect()),
        ),
        (
            "ells".into(),
            Json::Arr(cfg.ells.iter().map(|v| Json::Int(*v as i64)).collect()),
        ),
        (
            "points".into(),
            Json::Arr(
                cfg.points
                    .iter()
                    .map(|p| Json::Arr(p.iter().map(|v| Json::Num(*v)).collect()))
                    .collect(),
            ),
        ),
        ("value".into(), Json::Num(cp.value)),
        ("grad_norm".into(), Json::Num(cp.grad_norm)),
        (
            "hessian_spectrum".into(),
            Json::Arr(cp.hessian_spectrum.iter().map(|v| Json::Num(*v)).collect()),
        ),
        ("min_abs_eig".into(), Json::Num(cp.min_abs_eig)),
        ("nondegenerate".into(), Json::Bool(cp.nondegenerate)),
        ("symmetry_reduced".into(), Json::Bool(cp.symmetry_reduced)),
    ])
}

fn cmd_reduce(
    geometry: Option<String>,
    dimension: Option<u32>,
    m: Option<usize>,
    mu: Option<f64>,
    ell: Option<u32>,
    file: &config::FileConfig,
) -> Outcome {
    file.check_keys(&["geometry", "dimension", "m", "mu", "ell"])
        .map_err(Failure::Usage)?;
    let geometry = config::pick(geometry, file.get_string("geometry"), None, "geometry")
        .map_err(Failure::Usage)?;
    let n = config::pick(
        dimension,
        file.get_u32("dimension").map_err(Failure::Usage)?,
        Some(6),
        "dimension",
    )
    .map_err(Failure::Usage)?;
    let mu = config::pick(
        mu,
        file.get_f64("mu").map_err(Failure::Usage)?,
        Some(0.0),
        "mu",
    )
    .map_err(Failure::Usage)?;
    let ell = config::pick(
        ell,
        file.get_u32("ell").map_err(Failure::Usage)?,
        Some(1),
        "ell",
    )
    .map_err(Failure::Usage)?;
    let m = config::pick(
        m,
        file.get_usize("m").map_err(Failure::Usage)?,
        Some(0),
        "m",
    )
    .map_err(Failure::Usage)?;
    check_dimension(n)?;
    let err = compute_err("reduce");
    let mut report = RunReport::new("reduce");
    report
        .config
        .push(("geometry".into(), Json::Str(geometry.clone())));
    report
        .config
        .push(("dimension".into(), Json::Int(n as i64)));
    report.config.push(("mu".into(), Json::Num(mu)));
    report.config.push(("ell".into(), Json::Int(ell as i64)));
    let points: Vec<bt::CriticalPoint> = match geometry.as_str() {
        "ball" => {
            if m > 1 {
                return Err(Failure::Usage("ball scenario has m = 1".into()));
            }
            bt::scenario_ball(n, ell, mu).map_err(&err)?
        }
        "exterior" => {
            if m != 0 && m != 2 {
                return Err(Failure::Usage("exterior scenario has m = 2".into()));
            }
            if mu != 0.0 {
                return Err(Failure::Usage(
                    "exterior scenario is defined at mu = 0".into(),
                ));
            }
            vec![bt::scenario_exterior_pair(n, ell).map_err(&err)?]
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown geometry {other:?} (expected ball or exterior)"
            )))
        }
    };
    report.value("count", points.len() as f64);
    for (k, cp) in points.iter().enumerate() {
        let tag = format!("cp{:02}", k + 1);
        report.value(&format!("{tag}_value"), cp.value);
        report.value(&format!("{tag}_grad_norm"), cp.grad_norm);
        report.value(&format!("{tag}_min_abs_eig"), cp.min_abs_eig);
        report.value(
            &format!("{tag}_nondegenerate"),
            if cp.nondegenerate { 1.0 } else { 0.0 },
        );
        report.values_indexed(&format!("{tag}_lambda"), &cp.config.lambda);
        report.values_indexed(&format!("{tag}_hessian_eig"), &cp.hessian_spectrum);
    }
    report.extra.push((
        "critical_points".into(),
        Json::Arr(points.iter().map(critical_point_json).collect()),
    ));
    Ok((report, None))
}

fn radial_csv(prof: &bt::RadialProfile, cfg: &bt::MatchConfig) -> String {
    let mut s = format!(
        "# N={} eps={:e} mu={:e} ell={} xi={:e}\n",
        cfg.n, cfg.eps, cfg.mu, cfg.ell, cfg.xi
    );
    s.push_str("r,u\n");
    for (r, u) in prof.r_samples.iter().zip(&prof.u) {
        s.push_str(&format!("{:.14e},{:.14e}\n", r, u));
    }
    s
}

fn cmd_radial(
    dimension: Option<u32>,
    epsilon: Option<f64>,
    mu: Option<f64>,
    ell: Option<usize>,
    xi: Option<f64>,
    oracle_flag: bool,
    file: &config::FileConfig,
) -> Outcome {
    file.check_keys(&["dimension", "epsilon", "mu", "ell", "xi", "oracle"])
        .map_err(Failure::Usage)?;
    let n = config::pick(
        dimension,
        file.get_u32("dimension").map_err(Failure::Usage)?,
        None,
        "dimension",
    )
    .map_err(Failure::Usage)?;
    let eps = config::pick(
        epsilon,
        file.get_f64("epsilon").map_err(Failure::Usage)?,
        None,
        "epsilon",
    )
    .map_err(Failure::Usage)?;
    let mu = config::pick(
        mu,
        file.get_f64("mu").map_err(Failure::Usage)?,
        Some(0.0),
        "mu",
    )
    .map_err(Failure::Usage)?;
    let ell = config::pick(
        ell,
        file.get_usize("ell").map_err(Failure::Usage)?,
        Some(1),
        "ell",
    )
    .map_err(Failure::Usage)?;
    let xi = config::pick(
        xi,
        file.get_f64("xi").map_err(Failure::Usage)?,
        Some(0.0),
        "xi",
    )
    .map_err(Failure::Usage)?;
    let oracle = oracle_flag
        || file
            .get_bool("oracle")
            .map_err(Failure::Usage)?
            .unwrap_or(false);
    check_dimension(n)?;
    let err = compute_err("radial");
    let cfg = bt::MatchConfig {
        n,
        eps,
        mu,
        ell,
        xi,
    };
    let sol = bt::match_all(&cfg).map_err(&err)?;
    let lo = (-(sol.horizon() - 2.0)).exp().max(1e-12);
    let grid: Vec<f64> = (0..4096)
        .map(|k| lo * (1.0 / lo).powf(k as f64 / 4095.0))
        .collect();
    let prof = bt::assemble_u(&sol, &grid).map_err(&err)?;
    let mut report = RunReport::new("radial");
    report
        .config
        .push(("dimension".into(), Json::Int(n as i64)));
    report.config.push(("epsilon".into(), Json::Num(eps)));
    report.config.push(("mu".into(), Json::Num(mu)));
    report.config.push(("ell".into(), Json::Int(ell as i64)));
    report.config.push(("xi".into(), Json::Num(xi)));
    report.value("lambda", sol.lambda);
    report.value("mismatch", sol.mismatch);
    report.value("boundary_u", *prof.u.last().unwrap());
    report.values_indexed("alpha", &sol.alphas);
    report.values_indexed("shift", &sol.shifts);
    // consistent translation parameter for this weight normalization
    report.value(
        "xi_consistent",
        bt::xi_from_lambda_i(
            n,
            ((ell as f64) * bt::constant(ConstantKind::C4, n).map_err(&err)?).sqrt() / 2.0,
            ell as u32,
        )
        .map_err(&err)?,
    );
    match bt::expansion_check(&prof, &cfg) {
        Ok(fit) => {
            report.value("c0", fit.c0);
            report.value("c1", fit.c1);
            report.value("fit_residual", fit.residual);
        }
        Err(e) => report.diagnostic("expansion", e.to_string()),
    }
    if sol.lambda_warning {
        report.status = "warning";
        report.message = "linear term is not a perturbation at this epsilon/mu".into();
    }
    if oracle {
        let oprof = bt::shooting_oracle(n, sol.params.p, sol.lambda, ell).map_err(&err)?;
        let nf = f64::from(n);
        let r_eps = eps.powf(2.0 / (nf * nf - 4.0));
        let mut sup: f64 = 0.0;
        for (r, u) in prof.r_samples.iter().zip(&prof.u) {
            if *r >= r_eps && *r <= 1.0 {
                // log-linear interpolation of the oracle profile
                let mut lo = 0;
                let mut hi = oprof.r_samples.len() - 1;
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if oprof.r_samples[mid] <= *r {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let t = (r.ln() - oprof.r_samples[lo].ln())
                    / (oprof.r_samples[hi].ln() - oprof.r_samples[lo].ln());
                let uo = oprof.u[lo] * (1.0 - t) + oprof.u[hi] * t;
                sup = sup.max((u - uo).abs() / uo.abs().max(1e-300));
            }
        }
        report.value("oracle_sup_rel", sup);
    }
    Ok((report, Some(radial_csv(&prof, &cfg))))
}

fn parse_critical(path: &Path, index: usize) -> Result<bt::ReducedConfiguration, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    let v: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{} is not valid JSON: {e}", path.display())))?;
    let cps = v
        .get("critical_points")
        .and_then(|c| c.as_array())
        .ok_or_else(|| Failure::Usage("report carries no critical_points array".into()))?;
    let cp = cps
        .get(index)
        .ok_or_else(|| Failure::Usage(format!("critical point index {index} out of range")))?;
    let geometry = match cp.get("geometry").and_then(|g| g.as_str()) {
        Some("ball") => DomainGeometry::UnitBall,
        Some("exterior") => DomainGeometry::ExteriorUnitBall,
        other => return Err(Failure::Usage(format!("unknown geometry {other:?}"))),
    };
    let n = cp
        .get("dimension")
        .and_then(|x| x.as_u64())
        .ok_or_else(|| Failure::Usage("missing dimension".into()))? as u32;
    let mu = cp.get("mu").and_then(|x| x.as_f64()).unwrap_or(0.0);
    let arr_f64 = |key: &str| -> Result<Vec<f64>, Failure> {
        cp.get(key)
            .and_then(|x| x.as_array())
            .map(|a| a.iter().filter_map(|v| v.as_f64()).collect())
            .ok_or_else(|| Failure::Usage(format!("missing array {key}")))
    };
    let lambda = arr_f64("lambda")?;
    let ells: Vec<u32> = cp
        .get("ells")
        .and_then(|x| x.as_array())
        .map(|a| {
            a.iter()
                .filter_map(|v| v.as_u64())
                .map(|v| v as u32)
                .collect()
        })
        .ok_or_else(|| Failure::Usage("missing array ells".into()))?;
    let points: Vec<Vec<f64>> = cp
        .get("points")
        .and_then(|x| x.as_array())
        .and_then(|a| {
            a.iter()
                .map(|p| {
                    p.as_array()
                        .map(|q| q.iter().filter_map(|v| v.as_f64()).collect())
                })
                .collect::<Option<Vec<Vec<f64>>>>()
        })
        .ok_or_else(|| Failure::Usage("missing array points".into()))?;
    Ok(bt::ReducedConfiguration {
        geometry,
        n,
        lambda,
        points,
        mu,
        ells,
    })
}

fn cmd_tower(
    from_critical: Option<PathBuf>,
    epsilon: Option<f64>,
    index: Option<usize>,
    resolution: Option<usize>,
    file: &config::FileConfig,
) -> Outcome {
    file.check_keys(&["from-critical", "epsilon", "index", "resolution"])
        .map_err(Failure::Usage)?;
    let path = config::pick(
        from_critical,
        file.get_string("from-critical").map(PathBuf::from),
        None,
        "from-critical",
    )
    .map_err(Failure::Usage)?;
    let eps = config::pick(
        epsilon,
        file.get_f64("epsilon").map_err(Failure::Usage)?,
        None,
        "epsilon",
    )
    .map_err(Failure::Usage)?;
    let index = config::pick(
        index,
        file.get_usize("index").map_err(Failure::Usage)?,
        Some(0),
        "index",
    )
    .map_err(Failure::Usage)?;
    let resolution = config::pick(
        resolution,
        file.get_usize("resolution").map_err(Failure::Usage)?,
        Some(128),
        "resolution",
    )
    .map_err(Failure::Usage)?;
    let err = compute_err("tower");
    let cfg = parse_critical(&path, index)?;
    let spec = bt::tower_spec_from_config(&cfg, eps).map_err(&err)?;
    let tower = bt::synthesize(&spec, resolution).map_err(&err)?;
    let p = bt::derive_params(cfg.n, eps).map_err(&err)?.p;
    let rep = bt::residual_and_energy(&tower, p).map_err(&err)?;
    let mut report = RunReport::new("tower");
    report.config.push(("epsilon".into(), Json::Num(eps)));
    report
        .config
        .push(("index".into(), Json::Int(index as i64)));
    report
        .config
        .push(("resolution".into(), Json::Int(resolution as i64)));
    report.config.push((
        "from-critical".into(),
        Json::Str(path.display().to_string()),
    ));
    report.value("residual_norm", rep.residual_norm);
    report.value("r0", rep.r0);
    report.values_indexed("mass", &rep.masses);
    report.values_indexed("stitch_mismatch", &tower.stitch_mismatch);
    for (i, d) in spec.d.iter().enumerate() {
        report.values_indexed(&format!("d_{:02}", i + 1), d);
        report.values_indexed(&format!("scale_{:02}", i + 1), &spec.scales(i));
    }
    report.values_indexed("xi", &spec.xi);
    let mut csv = String::from("point,r,u\n");
    for (i, (grid, vals)) in tower.r_grids.iter().zip(&tower.u_near).enumerate() {
        for (r, u) in grid.iter().zip(vals) {
            csv.push_str(&format!("{},{:.14e},{:.14e}\n", i + 1, r, u));
        }
    }
    Ok((report, Some(csv)))
}

fn cmd_sweep(
    dimension: Option<u32>,
    epsilons: Option<String>,
    bumps: Option<usize>,
    file: &config::FileConfig,
) -> Outcome {
    file.check_keys(&["dimension", "epsilons", "bumps"])
        .map_err(Failure::Usage)?;
    let n = config::pick(
        dimension,
        file.get_u32("dimension").map_err(Failure::Usage)?,
        None,
        "dimension",
    )
    .map_err(Failure::Usage)?;
    let list = config::pick(
        epsilons,
        file.get_string("epsilons"),
        Some("1e-2,1e-3,1e-4".into()),
        "epsilons",
    )
    .map_err(Failure::Usage)?;
    let bumps = config::pick(
        bumps,
        file.get_usize("bumps").map_err(Failure::Usage)?,
        Some(3),
        "bumps",
    )
    .map_err(Failure::Usage)?;
    check_dimension(n)?;
    let grid: Result<Vec<f64>, _> = list.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let grid = grid.map_err(|_| Failure::Usage(format!("cannot parse epsilon grid {list:?}")))?;
    let err = compute_err("sweep");
    let c4 = bt::constant(ConstantKind::C4, n).map_err(&err)?;
    let c8 = bt::constant(ConstantKind::C8, n).map_err(&err)?;
    let nf = f64::from(n);
    // one report per grid point, in input order
    let mut reports = Vec::new();
    for &eps in &grid {
        let params = bt::derive_params(n, eps).map_err(&err)?;
        let profile = bt::shoot_heteroclinic(&params, bumps).map_err(&err)?;
        let seq = bt::extract_critical_sequence(&profile, bumps).map_err(&err)?;
        let mut r = RunReport::new("sweep");
        r.config.push(("dimension".into(), Json::Int(n as i64)));
        r.config.push(("epsilon".into(), Json::Num(eps)));
        for i in 0..bumps {
            r.value(
                &format!("ratio_{:02}", i + 1),
                seq.epsv[i] * seq.epsv[i] / ((i as f64 + 1.0) * eps),
            );
            r.value(
                &format!("offset_{:02}", i + 1),
                seq.t_min[i] - (2.0 * (i as f64 + 1.0) - 1.0) / (nf - 2.0) * eps.ln(),
            );
        }
        r.value("c4", c4);
        let b1 = bt::beta_ell(&profile, 1).map_err(&err)?;
        r.value("beta_1_ratio", b1 / eps.powf(2.0 / (nf - 2.0)));
        r.value("c8", c8);
        reports.push(r);
    }
    // wrap into one array document, preserving input order
    let mut combined = RunReport::new("sweep");
    combined
        .config
        .push(("dimension".into(), Json::Int(n as i64)));
    combined.config.push((
        "epsilons".into(),
        Json::Arr(grid.iter().map(|e| Json::Num(*e)).collect()),
    ));
    combined.extra.push((
        "reports".into(),
        Json::Arr(reports.iter().map(|r| r.to_json()).collect()),
    ));
    // flattened values keep the per-point order stable in csv form
    for (k, r) in reports.iter().enumerate() {
        for (key, v) in &r.values {
            combined.values.push((format!("e{:02}_{key}", k + 1), *v));
        }
    }
    Ok((combined, None))
}
