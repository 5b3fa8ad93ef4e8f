//! Command-line front end. Every subcommand delegates to a library
//! operation and prints a JSON report with a fixed field order.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cones::{weighted_cone_sum_with, Cone, Exponent, Lattice, Norm, SumOptions, Subspace, VerdictBasis};
use crate::error::{Error, Result};
use crate::integrability::{
    enumerate_factorizations, is_interior_dual_simple, lambda_v, lp_threshold, property_i_check, ExponentProfile,
    FactorizationRecord, Spectral, WeightList,
};
use crate::linalg::{self, QVec};
use crate::numerics::{
    comparison_constant, growth_scan, limit_subalgebra, realization, realization_names, schwartz_seminorms,
    subalgebra_limit_scan, BallSpec, MatrixRealization, Profile,
};
use crate::spherical::{
    catalog, catalog_names, compression_cone, is_wavefront, parse_descriptor, projected_chamber, rank_and_edge,
    rho_u, validate, Flags, Ideal, SphericalDescriptor,
};

#[derive(Parser, Debug)]
#[command(name = "spherical", version, about = "Integrability and convergence tools for real spherical spaces")]
struct Cli {
    /// Seed for Monte Carlo commands.
    #[arg(long, global = true, env = "SPHERICAL_SEED", default_value_t = 0)]
    seed: u64,
    /// Write the scan table of the command as CSV.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SpaceArgs {
    /// Catalog entry.
    #[arg(long, conflicts_with = "file")]
    space: Option<String>,
    /// Descriptor file (TOML).
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List catalog entries.
    Catalog,
    /// Structure data of a descriptor.
    Describe(SpaceArgs),
    /// Compression cone, edge and real rank.
    Cone(SpaceArgs),
    /// Wavefront verdict.
    Wavefront(SpaceArgs),
    /// Half sum of the roots in Σ_u.
    RhoU(SpaceArgs),
    /// Exponent covector of a finite weight list.
    LambdaV {
        #[command(flatten)]
        space: SpaceArgs,
        /// Weights separated by `;`, entries by `,`.
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
    },
    /// Critical exponent of the lifted exponent.
    LpThreshold {
        #[command(flatten)]
        space: SpaceArgs,
        /// `rho`, `2rho` or a covector such as `1/2, -1`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 0)]
        d: u32,
    },
    /// Decision trace for property (I).
    PropertyI {
        #[command(flatten)]
        space: SpaceArgs,
        /// Spectral input (TOML with `nontrivial`, `lambda`, `d`).
        #[arg(long)]
        spectral: PathBuf,
    },
    /// Factorizations through unions of ideals.
    Factorizations(SpaceArgs),
    /// Doubling partial sums of a weighted lattice sum over a cone.
    Sum {
        /// Cone generators separated by `;`. Default: the positive orthant.
        #[arg(long, allow_hyphen_values = true)]
        rays: Option<String>,
        /// Dimension of the positive orthant when `--rays` is absent.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Linear exponent; pieces of a piecewise exponent separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Polynomial degree `m` in `(1 + ||x||)^m`.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        m: f64,
        #[arg(long, default_value_t = 256.0)]
        r_max: f64,
        /// Use the sup norm instead of the Euclidean norm.
        #[arg(long)]
        sup_norm: bool,
        /// Skip the analytic verdict.
        #[arg(long)]
        empirical: bool,
    },
    /// Monte Carlo ball volumes along a ray.
    VolumeScan {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "-1")]
        direction: String,
        #[arg(long, default_value = "0.5,1,1.5,2,2.5,3")]
        ts: String,
        #[arg(long, default_value_t = 2.0)]
        radius: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Grassmann distance of Ad(exp tX)h to the limiting subalgebra.
    LimitScan {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "-1")]
        direction: String,
        #[arg(long, default_value = "0,1,2,5,10,15,20")]
        ts: String,
    },
    /// Weighted L² and sup seminorms of a radial profile.
    Seminorms {
        #[command(flatten)]
        space: SpaceArgs,
        /// `gaussian[:sigma]`, `power:k` or `exp:a:c`.
        #[arg(long, default_value = "gaussian")]
        profile: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        n: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 2.0)]
        m: f64,
    },
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    command: &'a str,
    input_hash: String,
    seed: u64,
    results: T,
    verdict_basis: Vec<&'static str>,
    version: &'static str,
    timestamp: u64,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::NotWavefront | Error::InfeasibleLift(_) | Error::InvalidDatum(_) => EXIT_VALIDATION,
        Error::NonConvergence(_) | Error::Singular | Error::NotClosed(_) => EXIT_NONCONVERGENCE,
        _ => EXIT_USAGE,
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli, &argv) {
        Ok(stdout) => Outcome { code: EXIT_OK, stdout, stderr: String::new() },
        Err(e) => Outcome { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn input_hash(argv: &[OsString], files: &[&Path]) -> Result<String> {
    let mut h = Sha256::new();
    for a in argv.iter().skip(1) {
        h.update(a.to_string_lossy().as_bytes());
        h.update([0u8]);
    }
    for f in files {
        h.update(std::fs::read(f)?);
        h.update([0u8]);
    }
    Ok(hex::encode(h.finalize()))
}

fn load(space: &SpaceArgs) -> Result<SphericalDescriptor> {
    match (&space.space, &space.file) {
        (Some(name), _) => catalog(name),
        (None, Some(path)) => parse_descriptor(path),
        (None, None) => Err(Error::InvalidArgument("pass --space NAME or --file PATH".into())),
    }
}

/// Realization for numeric commands: the descriptor's realization, or a
/// realization named directly.
fn load_realization(space: &SpaceArgs) -> Result<MatrixRealization> {
    if let Some(name) = &space.space {
        if realization_names().contains(&name.as_str()) {
            return realization(name);
        }
    }
    let desc = load(space)?;
    match &desc.realization {
        Some(r) => realization(r),
        None => Err(Error::Unsupported(format!("{} has no matrix realization", desc.name))),
    }
}

fn parse_list(s: &str) -> Result<Vec<QVec>> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(linalg::parse_qvec).collect()
}

fn parse_f64s(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad number `{t}`: {e}"))))
        .collect()
}

/// `rho`, `k*rho` or an explicit covector.
pub fn parse_lambda(s: &str, desc: &SphericalDescriptor) -> Result<QVec> {
    let t = s.trim();
    if let Some(k) = t.strip_suffix("rho") {
        let k = k.trim().trim_end_matches('*').trim();
        let factor = if k.is_empty() { linalg::q(1) } else { linalg::parse_q(k)? };
        return Ok(linalg::scale(&factor, &desc.datum.rho()));
    }
    let v = linalg::parse_qvec(t)?;
    if v.len() != desc.datum.ambient_dim() {
        return Err(Error::Dimension(format!("lambda has {} entries, expected {}", v.len(), desc.datum.ambient_dim())));
    }
    Ok(v)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralFile {
    nontrivial: Vec<bool>,
    lambda: String,
    #[serde(default)]
    d: u32,
}

pub fn parse_spectral(text: &str, desc: &SphericalDescriptor) -> Result<Spectral> {
    let f: SpectralFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string().trim_end().to_string()))?;
    Ok(Spectral {
        nontrivial: f.nontrivial,
        profile: ExponentProfile { lambda_v: parse_lambda(&f.lambda, desc)?, d_v: f.d },
    })
}

#[derive(Serialize)]
struct CatalogRow {
    name: String,
    description: String,
    real_rank: usize,
    wavefront: bool,
    realization: Option<String>,
}

#[derive(Serialize)]
struct Description<'a> {
    name: &'a str,
    description: &'a str,
    ambient_dim: usize,
    semisimple_rank: usize,
    real_rank: usize,
    dim_g: usize,
    dim_h: usize,
    simple_roots: Vec<String>,
    sigma_u: Vec<String>,
    monoid_generators: Vec<String>,
    a_h: &'a Subspace,
    ideals: &'a [Ideal],
    flags: Flags,
    realization: &'a Option<String>,
    diagnostics: Vec<String>,
}

#[derive(Serialize)]
struct WavefrontResult {
    wavefront: bool,
    compression_cone: Cone,
    projected_chamber: Cone,
}

#[derive(Serialize)]
struct LambdaResult {
    lambda_v: String,
    interior_dual: bool,
}

#[derive(Serialize)]
struct FactorizationResult {
    proper: usize,
    records: Vec<FactorizationRecord>,
}

#[derive(Serialize)]
struct SeminormResult {
    #[serde(flatten)]
    values: crate::numerics::Seminorms,
    comparison_constant: f64,
}

#[derive(Serialize)]
struct LimitResult {
    limit_dim: usize,
    rows: Vec<crate::numerics::LimitRow>,
}

fn show(v: &[linalg::Q]) -> String {
    linalg::Show(v).to_string()
}

fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

fn emit<T: Serialize>(cli: &Cli, name: &str, hash: String, results: T, basis: Vec<&'static str>) -> Result<String> {
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let report = Report {
        command: name,
        input_hash: hash,
        seed: cli.seed,
        results,
        verdict_basis: basis,
        version: env!("CARGO_PKG_VERSION"),
        timestamp,
    };
    let mut s = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    s.push('\n');
    Ok(s)
}

fn space_files(space: &SpaceArgs) -> Vec<&Path> {
    space.file.as_deref().into_iter().collect()
}

fn execute(cli: &Cli, argv: &[OsString]) -> Result<String> {
    let exact = vec!["exact"];
    match &cli.command {
        Command::Catalog => {
            let mut rows = Vec::new();
            for name in catalog_names() {
                let d = catalog(name)?;
                rows.push(CatalogRow {
                    name: name.to_string(),
                    description: d.description.clone(),
                    real_rank: d.real_rank(),
                    wavefront: is_wavefront(&d),
                    realization: d.realization.clone(),
                });
            }
            emit(cli, "catalog", input_hash(argv, &[])?, rows, exact)
        }
        Command::Describe(space) => {
            let d = load(space)?;
            let res = Description {
                name: &d.name,
                description: &d.description,
                ambient_dim: d.datum.ambient_dim(),
                semisimple_rank: d.datum.rank(),
                real_rank: d.real_rank(),
                dim_g: d.dim_g(),
                dim_h: d.dim_h(),
                simple_roots: d.datum.simple_roots().iter().map(|r| show(r)).collect(),
                sigma_u: d.sigma_u.iter().map(|&i| show(&d.datum.positive_roots()[i].covector)).collect(),
                monoid_generators: d.monoid_generators.iter().map(|g| show(g)).collect(),
                a_h: &d.a_h,
                ideals: &d.ideals,
                flags: d.flags,
                realization: &d.realization,
                diagnostics: validate(&d),
            };
            emit(cli, "describe", input_hash(argv, &space_files(space))?, res, exact)
        }
        Command::Cone(space) => {
            let d = load(space)?;
            emit(cli, "cone", input_hash(argv, &space_files(space))?, rank_and_edge(&d)?, exact)
        }
        Command::Wavefront(space) => {
            let d = load(space)?;
            let res = WavefrontResult {
                wavefront: is_wavefront(&d),
                compression_cone: compression_cone(&d),
                projected_chamber: projected_chamber(&d),
            };
            emit(cli, "wavefront", input_hash(argv, &space_files(space))?, res, exact)
        }
        Command::RhoU(space) => {
            let d = load(space)?;
            emit(cli, "rho-u", input_hash(argv, &space_files(space))?, show(&rho_u(&d)?), exact)
        }
        Command::LambdaV { space, weights } => {
            let d = load(space)?;
            let wl = WeightList::new(parse_list(weights)?)?;
            let lv = lambda_v(&wl, &d.datum)?;
            let res = LambdaResult { interior_dual: is_interior_dual_simple(&lv, &d.datum)?, lambda_v: show(&lv) };
            emit(cli, "lambda-v", input_hash(argv, &space_files(space))?, res, exact)
        }
        Command::LpThreshold { space, lambda, d } => {
            let desc = load(space)?;
            let profile = ExponentProfile { lambda_v: parse_lambda(lambda, &desc)?, d_v: *d };
            let res = lp_threshold(&desc, &profile)?;
            emit(cli, "lp-threshold", input_hash(argv, &space_files(space))?, res, exact)
        }
        Command::PropertyI { space, spectral } => {
            let desc = load(space)?;
            let sp = parse_spectral(&std::fs::read_to_string(spectral)?, &desc)?;
            let trace = property_i_check(&desc, &sp)?;
            let mut files = space_files(space);
            files.push(spectral);
            emit(cli, "property-i", input_hash(argv, &files)?, trace, exact)
        }
        Command::Factorizations(space) => {
            let d = load(space)?;
            let records = enumerate_factorizations(&d);
            let res = FactorizationResult { proper: records.iter().filter(|r| r.is_proper()).count(), records };
            emit(cli, "factorizations", input_hash(argv, &space_files(space))?, res, exact)
        }
        Command::Sum { rays, dim, lambda, m, r_max, sup_norm, empirical } => {
            let cone = match rays {
                Some(r) => {
                    let gens = parse_list(r)?;
                    let n = gens.first().map_or(0, |g| g.len());
                    Cone::from_generators(n, &gens, &[])
                }
                None => {
                    let gens: Vec<QVec> = (0..*dim).map(|i| linalg::unit(*dim, i)).collect();
                    Cone::from_generators(*dim, &gens, &[])
                }
            };
            let pieces = lambda.split(';').map(parse_f64s).collect::<Result<Vec<_>>>()?;
            let exponent = Exponent { pieces };
            let opts = SumOptions { norm: if *sup_norm { Norm::Sup } else { Norm::Euclidean }, force_empirical: *empirical };
            let lat = Lattice::standard(cone.ambient_dim());
            let report = weighted_cone_sum_with(&lat, &cone, &exponent, *m, *r_max, &opts)?;
            if let Some(out) = &cli.out {
                #[derive(Serialize)]
                struct Row {
                    radius: f64,
                    partial_sum: f64,
                }
                let rows: Vec<Row> =
                    report.partial_sums.iter().map(|&(radius, partial_sum)| Row { radius, partial_sum }).collect();
                write_csv(out, &rows)?;
            }
            let basis = match report.verdict_basis {
                VerdictBasis::Analytic => vec!["analytic"],
                VerdictBasis::Empirical => vec!["empirical"],
            };
            emit(cli, "sum", input_hash(argv, &[])?, report, basis)
        }
        Command::VolumeScan { space, direction, ts, radius, samples } => {
            let real = load_realization(space)?;
            let scan = growth_scan(&real, &parse_f64s(direction)?, &parse_f64s(ts)?, &BallSpec::new(*radius)?, *samples, cli.seed)?;
            if let Some(out) = &cli.out {
                write_csv(out, &scan.rows)?;
            }
            emit(cli, "volume-scan", input_hash(argv, &space_files(space))?, scan, vec!["monte-carlo"])
        }
        Command::LimitScan { space, direction, ts } => {
            let real = load_realization(space)?;
            let rows = subalgebra_limit_scan(&real, &parse_f64s(direction)?, &parse_f64s(ts)?)?;
            if let Some(out) = &cli.out {
                write_csv(out, &rows)?;
            }
            let res = LimitResult { limit_dim: limit_subalgebra(&real)?.len(), rows };
            emit(cli, "limit-scan", input_hash(argv, &space_files(space))?, res, vec!["numerical"])
        }
        Command::Seminorms { space, profile, n, m } => {
            let real = load_realization(space)?;
            let prof = Profile::parse(profile)?;
            let res = SeminormResult {
                values: schwartz_seminorms(&prof, *n, *m, &real)?,
                comparison_constant: comparison_constant(*n, *m, &real)?,
            };
            emit(cli, "seminorms", input_hash(argv, &space_files(space))?, res, vec!["quadrature"])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn json(o: &Outcome) -> serde_json::Value {
        assert_eq!(o.code, 0, "{}", o.stderr);
        serde_json::from_str(&o.stdout).unwrap()
    }

    #[test]
    fn field_order_is_stable() {
        let o = run(["spherical", "rho-u", "--space", "sl2_gk"]);
        let keys: Vec<&str> = ["\"command\"", "\"input_hash\"", "\"seed\"", "\"results\"", "\"verdict_basis\"", "\"version\"", "\"timestamp\""]
            .to_vec();
        let pos: Vec<usize> = keys.iter().map(|k| o.stdout.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(json(&o)["results"], "(1)");
    }

    #[test]
    fn threshold_command() {
        let o = run(["spherical", "lp-threshold", "--space", "sl2_gk", "--lambda", "rho", "--d", "0"]);
        assert_eq!(json(&o)["results"]["p_star"], "2");
        let o = run(["spherical", "lp-threshold", "--space", "sl2_gk", "--lambda", "2*rho"]);
        assert_eq!(json(&o)["results"]["p_star"], "1");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["spherical", "bogus"]).code, EXIT_USAGE);
        assert_eq!(run(["spherical", "describe", "--space", "nope"]).code, EXIT_USAGE);
        assert_eq!(run(["spherical", "lp-threshold", "--space", "so8c_g2", "--lambda", "rho"]).code, EXIT_VALIDATION);
        assert_eq!(run(["spherical", "--help"]).code, EXIT_OK);
    }

    #[test]
    fn lambda_parsing() {
        let d = catalog("sl3_gk").unwrap();
        assert_eq!(parse_lambda("2rho", &d).unwrap(), linalg::scale(&linalg::q(2), &d.datum.rho()));
        assert_eq!(parse_lambda("1/2, -1", &d).unwrap(), vec![linalg::qf(1, 2), linalg::q(-1)]);
        assert!(parse_lambda("1", &d).is_err());
    }
}
