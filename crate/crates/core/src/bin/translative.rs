use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use translative::config::SimulationConfig;
use translative::functionals::montecarlo::{translative_lhs_mc, z_score};
use translative::functionals::{index_vectors, mixed_measure, Family};
use translative::geom::{io as geom_io, AaBox, Polytope, Region};
use translative::gp_union::{
    check_mutual_general_position, classify_boundary_features, gp_extension_degrees, gp_phi_degree,
    reduce_representation, GpUnion,
};
use translative::report::run_simulation;
use translative::Error;

#[derive(Parser)]
#[command(
    name = "translative",
    version,
    about = "Local functionals of polytopes and Boolean models"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print φ^(j) for every degree, the total, and optionally Φ(P, A).
    Eval {
        /// Polytope or union file.
        file: PathBuf,
        /// `skeleton`, `intrinsic`, or e.g. `const:1,angle:1;cd=1`.
        #[arg(long, default_value = "skeleton")]
        family: String,
        /// Box `A` as `lo_1,..,lo_d,hi_1,..,hi_d`.
        #[arg(long = "box", value_name = "LO..,HI..")]
        region: Option<String>,
    },
    /// Compare both sides of the translative formula for two polytopes.
    CheckTranslative {
        p: PathBuf,
        q: PathBuf,
        #[arg(long)]
        j: usize,
        #[arg(long, default_value = "skeleton")]
        family: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Box restricting `P`; the whole space when omitted.
        #[arg(long)]
        box_a: Option<String>,
        /// Box restricting `Q`; the whole space when omitted.
        #[arg(long)]
        box_b: Option<String>,
        #[arg(long, default_value_t = 3.0)]
        tolerance_sigma: f64,
    },
    /// Simulate a Boolean model and compare with the analytic densities.
    Simulate {
        config: PathBuf,
        /// Overrides the seed of the config file; one of the two is required.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `replications`.
        #[arg(long)]
        reps: Option<usize>,
        /// CSV report; the JSON summary is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 3.0)]
        tolerance_sigma: f64,
    },
    /// Certify a union, reduce it and classify its boundary features.
    CheckGp {
        file: PathBuf,
        #[arg(long, default_value = "skeleton")]
        family: String,
        /// CSV of boundary features.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    /// Statistical or certification failure.
    Check(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn read_parts(path: &Path) -> Result<Vec<Polytope>, Failure> {
    geom_io::read_parts(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_box(s: &str, d: usize) -> Result<Region, Failure> {
    let xs: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Input(format!("bad box `{s}`: {e}")))?;
    if xs.len() != 2 * d {
        return Err(Failure::Input(format!("box `{s}` needs {} numbers", 2 * d)));
    }
    Ok(AaBox::new(&xs[..d], &xs[d..]).to_region())
}

/// Rounds to 12 significant digits so that e.g. `0.9999999999999999` prints as `1`.
fn tidy(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|&x| tidy(x).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_eval(file: &Path, family: &str, region: Option<&str>) -> CliResult {
    let parts = read_parts(file)?;
    let d = parts[0].dim();
    let f = Family::parse(d, family)?;
    let (u, cert) = GpUnion::new(parts)?;
    if !cert.passed {
        return Err(Failure::Check(format!(
            "parts are not in general position: {:?}",
            cert.violation
        )));
    }
    let phi: Vec<f64> = (0..=d)
        .map(|j| gp_phi_degree(&f, j, &u))
        .collect::<Result<_, _>>()?;
    let mut out = io::stdout().lock();
    writeln!(out, "{}", join(&phi))?;
    writeln!(out, "total {}", tidy(phi.iter().sum::<f64>()))?;
    if let Some(b) = region {
        let a = parse_box(b, d)?;
        writeln!(out, "box {}", join(&gp_extension_degrees(&f, &u, &a)?))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_check_translative(
    p: &Path,
    q: &Path,
    j: usize,
    family: &str,
    samples: usize,
    seed: u64,
    box_a: Option<&str>,
    box_b: Option<&str>,
    sigma: f64,
) -> CliResult {
    let p = geom_io::read_polytope(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
    let q = geom_io::read_polytope(q).map_err(|e| Failure::Input(format!("{}: {e}", q.display())))?;
    let d = p.dim();
    if q.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: q.dim(),
        }
        .into());
    }
    if j > d {
        return Err(Error::FaceDimension { j, max: d }.into());
    }
    let f = Family::parse(d, family)?;
    // Regions act in each operand's own coordinates, so covering boxes
    // stand in for the whole space.
    let a = match box_a {
        Some(s) => parse_box(s, d)?,
        None => Region::covering(&[&p]),
    };
    let b = match box_b {
        Some(s) => parse_box(s, d)?,
        None => Region::covering(&[&q]),
    };
    let mut out = io::stdout().lock();
    writeln!(out, "m\tmixed")?;
    let mut rhs = 0.0;
    for m in index_vectors(2, d, j) {
        let v = mixed_measure(&f, j, &[&p, &q], &m, &[&a, &b])?;
        rhs += v;
        let label: Vec<String> = m.iter().map(usize::to_string).collect();
        writeln!(out, "{}\t{v}", label.join(","))?;
    }
    eprintln!("sampling {samples} translations");
    let lhs = translative_lhs_mc(&f, j, &p, &q, &a, &b, samples, seed)?;
    let z = z_score(lhs.mean, lhs.stderr, rhs);
    writeln!(out, "rhs\t{rhs}")?;
    writeln!(out, "lhs\t{}\t{}", lhs.mean, lhs.stderr)?;
    writeln!(out, "z\t{z}")?;
    writeln!(out, "seed\t{seed}")?;
    if z.abs() < sigma {
        Ok(())
    } else {
        Err(Failure::Check(format!("|z| = {} exceeds {sigma}", z.abs())))
    }
}

fn cmd_simulate(
    config: &Path,
    seed: Option<u64>,
    reps: Option<usize>,
    out: Option<&Path>,
    sigma: f64,
) -> CliResult {
    let cfg =
        SimulationConfig::load(config).map_err(|e| Failure::Input(format!("{}: {e}", config.display())))?;
    let seed = seed
        .or(cfg.seed)
        .ok_or_else(|| Failure::Input("a seed is required (--seed or `seed` in the config)".into()))?;
    let reps = reps.unwrap_or(cfg.replications);
    if reps < 2 {
        return Err(Failure::Input("at least two replications are required".into()));
    }
    let base = config.parent().unwrap_or(Path::new("."));
    let report = run_simulation(&cfg, base, seed, reps, sigma)?;
    match out {
        Some(path) => {
            report.write_csv(BufWriter::new(File::create(path)?))?;
            let mut js = report.to_json();
            js.push('\n');
            std::fs::write(path.with_extension("json"), js)?;
            eprintln!(
                "wrote {} and {}",
                path.display(),
                path.with_extension("json").display()
            );
        }
        None => report.write_csv(io::stdout().lock())?,
    }
    for r in report.rows.iter().filter(|r| r.gated && !r.within(sigma)) {
        eprintln!("{}: z = {}", r.quantity, r.z_score);
    }
    if report.all_within {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "some densities are off by more than {sigma} standard errors"
        )))
    }
}

fn cmd_check_gp(file: &Path, family: &str, out: Option<&Path>) -> CliResult {
    let parts = read_parts(file)?;
    let d = parts[0].dim();
    let f = Family::parse(d, family)?;
    let cert = check_mutual_general_position(&parts)?;
    let mut so = io::stdout().lock();
    writeln!(so, "parts {}", parts.len())?;
    writeln!(so, "pairs_checked {}", cert.pairs_checked)?;
    if let Some(v) = &cert.violation {
        writeln!(so, "certified false")?;
        writeln!(
            so,
            "violation part {} group {:?} face_dim {} at {} ({})",
            v.part,
            v.group,
            v.face_dim,
            join(&v.point[..d]),
            v.reason
        )?;
        return Err(Failure::Check(format!(
            "part {} and parts {:?} are not in general position",
            v.part, v.group
        )));
    }
    writeln!(so, "certified true")?;
    let (u, _) = GpUnion::new(parts)?;
    let r = reduce_representation(&u)?;
    writeln!(so, "reduced_parts {}", r.parts.len())?;
    let phi: Vec<f64> = (0..=d)
        .map(|j| gp_phi_degree(&f, j, &r))
        .collect::<Result<_, _>>()?;
    writeln!(so, "phi {}", join(&phi))?;
    let feat = classify_boundary_features(&r)?;
    writeln!(so, "signed_vertices {}", feat.signed_vertices())?;
    writeln!(so, "signed_edge_length {}", feat.signed_edge_length())?;
    match out {
        Some(path) => feat.write_csv(BufWriter::new(File::create(path)?))?,
        None => feat.write_csv(&mut so)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Eval { file, family, region } => cmd_eval(file, family, region.as_deref()),
        Cmd::CheckTranslative {
            p,
            q,
            j,
            family,
            samples,
            seed,
            box_a,
            box_b,
            tolerance_sigma,
        } => cmd_check_translative(
            p,
            q,
            *j,
            family,
            *samples,
            *seed,
            box_a.as_deref(),
            box_b.as_deref(),
            *tolerance_sigma,
        ),
        Cmd::Simulate {
            config,
            seed,
            reps,
            out,
            tolerance_sigma,
        } => cmd_simulate(config, *seed, *reps, out.as_deref(), *tolerance_sigma),
        Cmd::CheckGp { file, family, out } => cmd_check_gp(file, family, out.as_deref()),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
