//! Command-line front end: thin argument handling and rendering around
//! the library, plus the disk-backed order-table cache.
//!
//! Exit codes are part of the interface: 0 on success, 1 when the tool
//! itself fails (i/o, corrupt state, a verification suite finding a
//! counterexample), 2 on bad input or an unmet precondition.

pub mod cache;
pub mod config;
pub mod manifest;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use curve_census::arith::{rat, PrimeSieve, Rational};
use curve_census::census::{
    m_e, moment_census, poisson_aggregate, run_census, run_census_window_cached, FamilySpec,
};
use curve_census::classnum::{deuring_suite, kronecker_h};
use curve_census::constants::{
    c_constant, d_coeff, k_constant, relation_matrix, relation_matrix_inverse,
    solve_relation_system, stirling2,
};
use curve_census::curves::{curve_order, weighted_counts_by_order};
use curve_census::expsum::random_suite;

use cache::DiskCache;
use config::{Config, ConfigOverrides, OutputFormat};
use manifest::ManifestBuilder;
use report::ScanOutput;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input or unmet precondition; exit code 2.
    #[error("{0}")]
    User(String),
    /// The tool itself failed; exit code 1.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<curve_census::Error> for CliError {
    fn from(e: curve_census::Error) -> Self {
        match e {
            curve_census::Error::Io(_) | curve_census::Error::BadTable(_) => {
                CliError::Internal(e.to_string())
            }
            _ => CliError::User(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "curve-census",
    version,
    about = "Censuses, class numbers, and Euler-product constants for elliptic-curve group orders"
)]
pub struct Cli {
    #[command(flatten)]
    pub overrides: ConfigOverrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Point count of y^2 = x^3 + sx + t over F_p.
    Order {
        #[arg(long)]
        p: u64,
        /// Coefficient of x, reduced mod p.
        #[arg(long)]
        s: u64,
        /// Constant coefficient, reduced mod p.
        #[arg(long)]
        t: u64,
    },
    /// Weighted class number H(D), exact fraction and decimal.
    Classnum {
        #[arg(long = "D", allow_hyphen_values = true)]
        d: i64,
    },
    /// Euler-product density constant K(N), truncated at --prime-bound.
    Kconst {
        #[arg(long)]
        n: u64,
    },
    /// Moment constant C(m), truncated at --prime-bound.
    Cconst {
        #[arg(long)]
        m: u32,
    },
    /// Threshold-moment coefficient d_{ell,r}(m), exact.
    Dcoeff {
        #[arg(long)]
        ell: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        m: u32,
    },
    /// Census of curve orders over the box |a| <= A, |b| <= B.
    Scan {
        #[arg(long = "A")]
        a: i64,
        #[arg(long = "B")]
        b: i64,
        /// Target order: a single value ("9") or an inclusive window
        /// ("100..200").
        #[arg(long = "N")]
        n: String,
        /// Append Poisson comparison rows averaged over the window.
        #[arg(long)]
        aggregate: bool,
        /// Largest ell in the Poisson comparison.
        #[arg(long, default_value_t = 3)]
        ell_max: u32,
        /// Write the report here (plus a run manifest) instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also emit (x, y) series files next to --out.
        #[arg(long)]
        plot_data: bool,
    },
    /// Threshold-restricted moment census against the predicted
    /// expansion sum_m C(m) d_{ell,r}(m) Li_m(x).
    Moments {
        #[arg(long = "A")]
        a: i64,
        #[arg(long = "B")]
        b: i64,
        /// Count orders N <= x.
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 1)]
        ell: u32,
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// Number of expansion terms beyond the first.
        #[arg(long, default_value_t = 2)]
        gamma1: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        plot_data: bool,
    },
    /// Self-contained verification suites; a found counterexample is
    /// exit code 1.
    #[command(subcommand)]
    Verify(VerifySuite),
    /// Order-table cache maintenance.
    #[command(subcommand)]
    Cache(CacheOp),
}

#[derive(Debug, Subcommand)]
pub enum VerifySuite {
    /// Class number H(D_N(p)) vs the weighted census of classes with N
    /// points, every (p, N) with 5 <= p <= pmax.
    Deuring {
        #[arg(long, default_value_t = 199)]
        pmax: u64,
    },
    /// Mass formula: sum of 1/#Aut over classes equals p.
    Mass {
        #[arg(long, default_value_t = 199)]
        pmax: u64,
    },
    /// Exact identities: d coefficients vs the linear system, the
    /// relation matrix times its closed-form inverse, Stirling sums.
    Combinatorics {
        /// Matrix sizes and the Stirling range scale with this.
        #[arg(long, default_value_t = 12)]
        max: u32,
    },
    /// Square-root cancellation on seeded random exponential sums.
    Weil {
        #[arg(long, default_value_t = 1000)]
        cases: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 211)]
        pmax: u64,
    },
    /// C(1) = 1 and stability of K(N) under doubling the prime bound.
    Constants {
        #[arg(long, default_value_t = 100_000)]
        bound: u64,
    },
    /// Census histogram vs the one-curve-at-a-time loop.
    OracleCensus {
        /// Box half-width (A = B = bound).
        #[arg(long, default_value_t = 25)]
        bound: i64,
        #[arg(long = "N", default_value_t = 9)]
        n: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum CacheOp {
    /// Build tables for every prime 3 < p <= pmax.
    Warm {
        #[arg(long)]
        pmax: u64,
    },
    /// List cached tables.
    Ls,
    /// Remove oldest tables until at most --max-bytes remain.
    Gc {
        #[arg(long, default_value_t = 0)]
        max_bytes: u64,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = Config::resolve(&cli.overrides, |key| std::env::var(key).ok())?;
    match cli.command {
        Command::Order { p, s, t } => {
            println!("{}", curve_order(p, s, t)?);
        }
        Command::Classnum { d } => {
            let value = kronecker_h(d)?.value;
            println!("{value} ({:.6})", rational_f64(&value));
        }
        Command::Kconst { n } => {
            let k = k_constant(n, config.prime_bound)?;
            println!(
                "K({n}) = {} (primes <= {}, |tail| <= {:.3e})",
                k.value, k.prime_bound, k.tail_estimate
            );
        }
        Command::Cconst { m } => {
            let c = c_constant(m, config.prime_bound)?;
            println!(
                "C({m}) = {} (primes <= {}, |tail| <= {:.3e})",
                c.value, c.prime_bound, c.tail_estimate
            );
        }
        Command::Dcoeff { ell, r, m } => {
            let value = d_coeff(ell, r, m)?;
            println!("{value} ({:.6})", rational_f64(&value));
        }
        Command::Scan { a, b, n, aggregate, ell_max, out, plot_data } => {
            cmd_scan(&config, a, b, &n, aggregate, ell_max, out.as_deref(), plot_data)?;
        }
        Command::Moments { a, b, x, ell, r, gamma1, out, plot_data } => {
            cmd_moments(&config, a, b, x, ell, r, gamma1, out.as_deref(), plot_data)?;
        }
        Command::Verify(suite) => {
            let summary = match suite {
                VerifySuite::Deuring { pmax } => verify_deuring(pmax)?,
                VerifySuite::Mass { pmax } => verify_mass(pmax)?,
                VerifySuite::Combinatorics { max } => verify_combinatorics(max)?,
                VerifySuite::Weil { cases, seed, pmax } => verify_weil(cases, seed, pmax)?,
                VerifySuite::Constants { bound } => verify_constants(bound)?,
                VerifySuite::OracleCensus { bound, n } => {
                    verify_oracle_census(bound, n, config.workers)?
                }
            };
            println!("{summary}");
        }
        Command::Cache(op) => {
            let cache = DiskCache::open(&config.cache_dir, config.table_memory_budget)?;
            match op {
                CacheOp::Warm { pmax } => {
                    let primes = cache.warm(pmax)?;
                    println!(
                        "warmed {} order tables (3 < p <= {pmax}) in {}",
                        primes.len(),
                        config.cache_dir.display()
                    );
                }
                CacheOp::Ls => {
                    let mut count = 0u64;
                    let mut total = 0u64;
                    for entry in cache.entries()? {
                        let Some(p) = entry.p else { continue };
                        println!("p = {p:<8} {:>12} bytes  {}", entry.bytes, entry.path.display());
                        count += 1;
                        total += entry.bytes;
                    }
                    println!("{count} tables, {total} bytes");
                }
                CacheOp::Gc { max_bytes } => {
                    let (files, bytes) = cache.gc(max_bytes)?;
                    println!("removed {files} files, freed {bytes} bytes");
                }
            }
        }
    }
    Ok(())
}

fn rational_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// "9" -> (9, 9); "100..200" -> (100, 200), both ends included.
fn parse_n_range(spec: &str) -> Result<(u64, u64), CliError> {
    let bad =
        || CliError::User(format!("bad order window {spec:?}: expected \"9\" or \"100..200\""));
    let parse = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    let (lo, hi) = match spec.split_once("..") {
        Some((lo, hi)) => (parse(lo)?, parse(hi)?),
        None => {
            let n = parse(spec)?;
            (n, n)
        }
    };
    if lo < 1 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::User(format!("cannot write {}: {e}", path.display())))
}

/// `report.json` + `_lambda.dat` -> `report_lambda.dat`.
fn plot_path(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.file_stem().unwrap_or(out.as_os_str()).to_os_string();
    name.push(suffix);
    out.with_file_name(name)
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    config: &Config,
    a: i64,
    b: i64,
    n_spec: &str,
    aggregate: bool,
    ell_max: u32,
    out: Option<&Path>,
    plot_data: bool,
) -> Result<(), CliError> {
    let (n_lo, n_hi) = parse_n_range(n_spec)?;
    let family = FamilySpec::new(a, b)?;
    if plot_data && out.is_none() {
        return Err(CliError::User("--plot-data needs --out to anchor the series files".into()));
    }
    let mut builder = ManifestBuilder::new("scan", config);
    builder
        .param("A", a)
        .param("B", b)
        .param("N", n_spec)
        .param("aggregate", aggregate)
        .param("ell_max", ell_max);

    let cache = DiskCache::open(&config.cache_dir, config.table_memory_budget)?;
    let reports =
        run_census_window_cached(family, n_lo, n_hi, config.workers, |p| cache.get_or_build(p))?;
    let poisson_rows = aggregate.then(|| poisson_aggregate(&reports, ell_max));
    let output = ScanOutput { reports, poisson_rows };

    let rendered = match config.output_format {
        OutputFormat::Json => report::to_json(&output)?,
        OutputFormat::Csv => report::scan_csv(&output),
    };
    let Some(out) = out else {
        print!("{rendered}");
        return Ok(());
    };
    write_file(out, &rendered)?;
    let mut outputs = vec![out.to_path_buf()];
    if plot_data {
        let lambda = plot_path(out, "_lambda.dat");
        write_file(&lambda, &report::lambda_series(&output.reports))?;
        outputs.push(lambda);
        if let [single] = output.reports.as_slice() {
            let hist = plot_path(out, "_hist.dat");
            write_file(&hist, &report::histogram_series(single))?;
            outputs.push(hist);
        }
        if let Some(rows) = &output.poisson_rows {
            let (empirical, reference) = report::poisson_series(rows);
            let emp_path = plot_path(out, "_poisson_empirical.dat");
            let ref_path = plot_path(out, "_poisson_reference.dat");
            write_file(&emp_path, &empirical)?;
            write_file(&ref_path, &reference)?;
            outputs.push(emp_path);
            outputs.push(ref_path);
        }
    }
    let manifest = builder.write(out, &outputs)?;
    log::info!("wrote {} ({} more files) and {}", out.display(), outputs.len() - 1, manifest.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_moments(
    config: &Config,
    a: i64,
    b: i64,
    x: u64,
    ell: u32,
    r: u32,
    gamma1: u32,
    out: Option<&Path>,
    plot_data: bool,
) -> Result<(), CliError> {
    let family = FamilySpec::new(a, b)?;
    if plot_data && out.is_none() {
        return Err(CliError::User("--plot-data needs --out to anchor the series files".into()));
    }
    let mut builder = ManifestBuilder::new("moments", config);
    builder
        .param("A", a)
        .param("B", b)
        .param("x", x)
        .param("ell", ell)
        .param("r", r)
        .param("gamma1", gamma1);

    let moment = moment_census(family, x, ell, r, gamma1, config.workers)?;
    let rendered = match config.output_format {
        OutputFormat::Json => report::to_json(&moment)?,
        OutputFormat::Csv => report::moment_csv(&moment),
    };
    let Some(out) = out else {
        print!("{rendered}");
        return Ok(());
    };
    write_file(out, &rendered)?;
    let mut outputs = vec![out.to_path_buf()];
    if plot_data {
        let terms = plot_path(out, "_terms.dat");
        write_file(&terms, &report::moment_terms_series(&moment))?;
        outputs.push(terms);
    }
    let manifest = builder.write(out, &outputs)?;
    log::info!("wrote {} and {}", out.display(), manifest.display());
    Ok(())
}

fn suite_result(
    suite: &str,
    failures: &[String],
    pass_summary: String,
) -> Result<String, CliError> {
    for f in failures {
        println!("FAIL {f}");
    }
    if failures.is_empty() {
        Ok(pass_summary)
    } else {
        Err(CliError::Internal(format!("verify {suite}: {} failures", failures.len())))
    }
}

fn verify_deuring(pmax: u64) -> Result<String, CliError> {
    if pmax < 5 {
        return Err(CliError::User("verify deuring needs --pmax >= 5".into()));
    }
    let sieve = PrimeSieve::new(pmax)?;
    let mut ordinary = 0u64;
    let mut ss_total = 0u64;
    let mut ss_equal = 0u64;
    let mut failures = Vec::new();
    for &p in sieve.primes().iter().filter(|&&p| p > 3) {
        for row in deuring_suite(p)? {
            if row.supersingular {
                ss_total += 1;
                ss_equal += row.equal as u64;
                continue;
            }
            ordinary += 1;
            if !row.equal {
                failures.push(format!(
                    "p = {} N = {}: H({}) = {}, weighted census = {}",
                    row.p, row.n, row.disc, row.class_number, row.weighted
                ));
            }
        }
    }
    suite_result(
        "deuring",
        &failures,
        format!(
            "PASS deuring: {ordinary} ordinary (p, N) pairs, 0 failures; \
             trace-zero column {ss_equal}/{ss_total} equal (reported, not gated)"
        ),
    )
}

fn verify_mass(pmax: u64) -> Result<String, CliError> {
    if pmax < 5 {
        return Err(CliError::User("verify mass needs --pmax >= 5".into()));
    }
    let sieve = PrimeSieve::new(pmax)?;
    let mut checked = 0u64;
    let mut failures = Vec::new();
    for &p in sieve.primes().iter().filter(|&&p| p > 3) {
        let total: Rational = weighted_counts_by_order(p)?.values().cloned().sum();
        checked += 1;
        if total != rat(p as i64, 1) {
            failures.push(format!("p = {p}: sum of 1/#Aut = {total}, expected {p}"));
        }
    }
    suite_result(
        "mass",
        &failures,
        format!(
            "PASS mass: sum of 1/#Aut = p exactly for {checked} primes (5 <= p <= {pmax}), 0 failures"
        ),
    )
}

fn verify_combinatorics(max: u32) -> Result<String, CliError> {
    if max < 1 {
        return Err(CliError::User("verify combinatorics needs --max >= 1".into()));
    }
    let mut comparisons = 0u64;
    let mut failures = Vec::new();

    for ell in 1..=6u32 {
        for r in 0..=ell {
            for (m, z) in solve_relation_system(ell, r, 7)? {
                comparisons += 1;
                if z != d_coeff(ell, r, m)? {
                    failures.push(format!(
                        "d_({ell},{r})({m}): alternating sum and system solution disagree"
                    ));
                }
            }
        }
    }

    for size in 1..=max as usize {
        let a = relation_matrix(size);
        let b = relation_matrix_inverse(size);
        for i in 0..size {
            for j in 0..size {
                comparisons += 1;
                let entry: Rational = (0..size).map(|k| &a[i][k] * &b[k][j]).sum();
                if entry != rat((i == j) as i64, 1) {
                    failures.push(format!("(A B)[{i}][{j}] = {entry} at size {size}"));
                }
            }
        }
    }

    for r in 1..=8u32 {
        for j in 1..=max {
            comparisons += 1;
            let mut lhs = BigUint::zero();
            for m in 1..=r.min(j) {
                let falling: BigUint = ((j - m + 1) as u64..=j as u64).product::<u64>().into();
                lhs += stirling2(r, m) * falling;
            }
            if lhs != BigUint::from(j as u64).pow(r) {
                failures.push(format!("Stirling identity fails at r = {r}, j = {j}"));
            }
        }
    }

    comparisons += 10;
    if d_coeff(1, 1, 1)? != rat(1, 1) {
        failures.push("d_(1,1)(1) != 1".into());
    }
    for m in 2..=10u32 {
        if d_coeff(1, 1, m)? != rat(0, 1) {
            failures.push(format!("d_(1,1)({m}) != 0"));
        }
    }

    suite_result(
        "combinatorics",
        &failures,
        format!("PASS combinatorics: {comparisons} exact comparisons, 0 failures"),
    )
}

fn verify_weil(cases: u32, seed: u64, pmax: u64) -> Result<String, CliError> {
    let results = random_suite(pmax, cases, seed)?;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for r in &results {
        worst = worst.max(r.magnitude / r.bound);
        if !r.pass {
            failures.push(format!(
                "p = {}, coefficients {:?}: |S| = {} exceeds {}",
                r.p, r.coefficients, r.magnitude, r.bound
            ));
        }
    }
    suite_result(
        "weil",
        &failures,
        format!(
            "PASS weil: {} cases (p <= {pmax}, seed {seed}), max |S| / bound = {worst:.4}, 0 failures",
            results.len()
        ),
    )
}

fn verify_constants(bound: u64) -> Result<String, CliError> {
    let mut failures = Vec::new();
    let c1 = c_constant(1, bound)?;
    let c_tol = 5e-3 + c1.tail_estimate;
    let c_diff = (c1.value - 1.0).abs();
    if c_diff > c_tol {
        failures.push(format!("|C(1) - 1| = {c_diff:.3e} exceeds {c_tol:.3e}"));
    }
    let samples = [1u64, 2, 9, 10, 100, 5040];
    for &n in &samples {
        let coarse = k_constant(n, bound)?;
        let fine = k_constant(n, 2 * bound)?;
        let moved = (coarse.value - fine.value).abs();
        if moved > coarse.tail_estimate {
            failures.push(format!(
                "K({n}) moved {moved:.3e} when doubling the bound, tail estimate {:.3e}",
                coarse.tail_estimate
            ));
        }
    }
    suite_result(
        "constants",
        &failures,
        format!(
            "PASS constants: |C(1) - 1| = {c_diff:.2e} at bound {bound}; \
             K(N) stable under bound doubling for {} sample orders",
            samples.len()
        ),
    )
}

fn verify_oracle_census(bound: i64, n: u64, workers: usize) -> Result<String, CliError> {
    let family = FamilySpec::new(bound, bound)?;
    let census = run_census(family, n, workers)?;
    let mut direct: Vec<u64> = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            match m_e(a, b, n) {
                Ok(count) => {
                    let idx = count as usize;
                    if idx >= direct.len() {
                        direct.resize(idx + 1, 0);
                    }
                    direct[idx] += 1;
                }
                Err(curve_census::Error::SingularModel { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    let trim = |mut h: Vec<u64>| {
        while h.len() > 1 && *h.last().unwrap() == 0 {
            h.pop();
        }
        h
    };
    let census_hist = trim(census.histogram.clone());
    let direct = trim(direct);
    let mut failures = Vec::new();
    if census_hist != direct {
        failures.push(format!("census histogram {census_hist:?} vs direct loop {direct:?}"));
    }
    suite_result(
        "oracle-census",
        &failures,
        format!(
            "PASS oracle-census: histogram over {} curves matches the direct loop (N = {n}, A = B = {bound})",
            family.size()
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_parse_with_the_documented_casing() {
        let cli = Cli::try_parse_from([
            "curve-census", "order", "--p", "5", "--s", "1", "--t", "1",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::Order { p: 5, s: 1, t: 1 }));

        let cli = Cli::try_parse_from(["curve-census", "classnum", "--D", "-11"]).unwrap();
        assert!(matches!(cli.command, Command::Classnum { d: -11 }));

        let cli = Cli::try_parse_from([
            "curve-census", "scan", "--A", "50", "--B", "50", "--N", "100..200", "--aggregate",
        ])
        .unwrap();
        match cli.command {
            Command::Scan { a: 50, b: 50, ref n, aggregate: true, ell_max: 3, .. } => {
                assert_eq!(n, "100..200");
            }
            other => panic!("parsed {other:?}"),
        }

        let cli =
            Cli::try_parse_from(["curve-census", "verify", "oracle-census", "--N", "12"]).unwrap();
        assert!(matches!(
            cli.command,
            Command::Verify(VerifySuite::OracleCensus { bound: 25, n: 12 })
        ));
    }

    #[test]
    fn order_windows_parse_and_reject() {
        assert_eq!(parse_n_range("9").unwrap(), (9, 9));
        assert_eq!(parse_n_range("100..200").unwrap(), (100, 200));
        assert_eq!(parse_n_range(" 7 .. 9 ").unwrap(), (7, 9));
        for bad in ["", "0", "abc", "9..", "..9", "200..100", "1..2..3"] {
            assert!(parse_n_range(bad).is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn plot_paths_share_the_output_stem() {
        assert_eq!(
            plot_path(Path::new("/tmp/run/report.json"), "_lambda.dat"),
            PathBuf::from("/tmp/run/report_lambda.dat")
        );
        assert_eq!(
            plot_path(Path::new("report"), "_hist.dat"),
            PathBuf::from("report_hist.dat")
        );
    }

    #[test]
    fn verify_suites_pass_at_smoke_scale() {
        assert!(verify_deuring(30).unwrap().contains("0 failures"));
        assert!(verify_mass(30).unwrap().contains("0 failures"));
        assert!(verify_combinatorics(4).unwrap().contains("0 failures"));
        assert!(verify_weil(25, 7, 101).unwrap().contains("0 failures"));
        assert!(verify_constants(1_000).unwrap().contains("PASS"));
        assert!(verify_oracle_census(6, 9, 1).unwrap().contains("PASS"));
    }

    #[test]
    fn error_kinds_carry_their_exit_codes() {
        assert_eq!(CliError::User("x".into()).exit_code(), 2);
        assert_eq!(CliError::Internal("x".into()).exit_code(), 1);
        let from_core: CliError = curve_census::Error::NotPrime(4).into();
        assert_eq!(from_core.exit_code(), 2);
        let from_core: CliError = curve_census::Error::BadTable("short".into()).into();
        assert_eq!(from_core.exit_code(), 1);
    }
}
