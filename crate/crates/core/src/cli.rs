//! The `qstat` command-line front end: identity suites, distribution
//! tabulation, Heine-process verification, and the full acceptance run,
//! with JSON/CSV reports.
//!
//! Exit status: 0 when every asserted check passes, 1 on any failure,
//! 2 on usage or I/O errors. Runs are deterministic for a fixed seed; with
//! `--reproducible` the emitted JSON is byte-identical across reruns.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{QError, Result};
use crate::heine::{
    conditional_config_probability, conditional_density_value, conditional_mc_check,
    configuration_box_measure, heine_pmf, pmf_oracle_dp, required_depth, simulate, HeineParams,
};
use crate::param::{QGrid, QParam, DEFAULT_EPS, DEFAULT_MAX_TERMS};
use crate::qidentity::{
    check_multinomial_inversion_oracle, check_multinomial_partition_sum, check_qbinom_product,
    check_subset_weight_sum, check_vandermonde_identity, count_ordered_set_partitions,
    PartitionWeighting, VandermondeVariant,
};
use crate::qorderstat::{unif_ord_cdf, unif_ord_pdf, OrderStatSpec, OrderStatistic, QUniform};
use crate::report::{IdentityCheck, ReportMeta, Tolerance, VerificationReport};
use crate::suite::{self, SuiteConfig};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name of the environment variable overriding the truncation-depth cap.
pub const MAX_TERMS_ENV: &str = "QSTAT_MAX_TERMS";

#[derive(Parser, Debug)]
#[command(
    name = "qstat",
    version,
    about = "q-calculus and q-order-statistics toolkit: evaluate, simulate, verify"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Report output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Law {
    Uniform,
    Max,
    Min,
    Kth,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
    /// Omit wall-time metadata so identical runs are byte-identical
    #[arg(long)]
    reproducible: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the q-series identity suite at one deformation parameter
    Identities {
        /// Deformation parameter, strictly between 0 and 1
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        /// Relative tolerance for the asserted identities
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tabulate a distribution/density pair on a grid
    Dist {
        /// Which law to tabulate
        #[arg(long, value_enum)]
        law: Law,
        /// Deformation parameter, strictly between 0 and 1
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        /// Sample size for the order-statistic laws
        #[arg(long, default_value_t = 1)]
        nu: u32,
        /// Rank for --law kth
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Scale of the order-statistic supports
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Support scale for --law uniform
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Number of grid rows (at least 2)
        #[arg(long, default_value_t = 50)]
        grid: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulate the Heine process and verify its pmf and conditional law
    Heine {
        /// Deformation parameter, strictly between 0 and 1
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        /// Arrival intensity
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Horizon
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Conditioning arrival count for the waiting-time checks
        #[arg(long, default_value_t = 2)]
        nu: u32,
        /// Number of geometric intervals to simulate
        #[arg(long, default_value_t = 80)]
        depth: u32,
        /// Monte Carlo trials
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Seed for the random source (required: no silent nondeterminism)
        #[arg(long)]
        seed: u64,
        /// Absolute tolerance for the pmf-vs-oracle comparison
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the entire verification suite
    Verify {
        /// Recorded in the metadata; the suite's q-lattices are pinned
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        /// Recorded in the metadata; the suite's tolerances are pinned
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        /// Monte Carlo trials per stochastic check
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Seed for the random sources (required: no silent nondeterminism)
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// Parse the process arguments and run; returns the exit status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses 0 for --help/--version and 2 for usage errors
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(all_passed) => {
            if all_passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("qstat: {e}");
            2
        }
    }
}

/// A QParam honoring the `QSTAT_MAX_TERMS` override.
fn qparam(q: f64) -> Result<QParam> {
    let max_terms = match std::env::var(MAX_TERMS_ENV) {
        Ok(s) => s.parse::<usize>().map_err(|_| {
            QError::Domain(format!(
                "{MAX_TERMS_ENV} must be a positive integer, got {s:?}"
            ))
        })?,
        Err(_) => DEFAULT_MAX_TERMS,
    };
    QParam::new(q, DEFAULT_EPS, max_terms)
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Identities { q, tolerance, out } => {
            if tolerance <= 0.0 || !tolerance.is_finite() {
                return Err(QError::Domain(format!(
                    "tolerance must be positive, got {tolerance}"
                )));
            }
            let qp = qparam(q)?;
            let tol = Tolerance::new(tolerance, tolerance * 1e-3);
            let start = std::time::Instant::now();
            let checks = identity_checks(&qp, tol)?;
            let report = make_report(
                "identities",
                format!("q={q} tolerance={tolerance}"),
                None,
                checks,
                out.reproducible,
                start,
            );
            emit_report(&report, out.format, out.output.as_deref())?;
            summarize(&report);
            Ok(report.all_passed())
        }
        Command::Dist {
            law,
            q,
            nu,
            k,
            t,
            beta,
            grid,
            out,
        } => {
            let qp = qparam(q)?;
            if grid < 2 {
                return Err(QError::Domain(format!(
                    "grid must be at least 2, got {grid}"
                )));
            }
            let rows = tabulate(law, &qp, nu, k, t, beta, grid)?;
            let meta = ReportMeta {
                version: env!("CARGO_PKG_VERSION").to_string(),
                command: "dist".to_string(),
                parameters: format!(
                    "law={law:?} q={q} nu={nu} k={k} t={t} beta={beta} grid={grid}"
                ),
                seed: None,
                wall_time_ms: None,
            };
            emit_table(&meta, &rows, out.format, out.output.as_deref())?;
            Ok(true)
        }
        Command::Heine {
            q,
            lambda,
            t,
            nu,
            depth,
            trials,
            seed,
            tolerance,
            out,
        } => {
            if tolerance <= 0.0 || !tolerance.is_finite() {
                return Err(QError::Domain(format!(
                    "tolerance must be positive, got {tolerance}"
                )));
            }
            let qp = qparam(q)?;
            let start = std::time::Instant::now();
            let checks = heine_checks(&qp, lambda, t, nu, depth, trials, seed, tolerance)?;
            let report = make_report(
                "heine",
                format!("q={q} lambda={lambda} t={t} nu={nu} depth={depth} trials={trials} tolerance={tolerance}"),
                Some(seed),
                checks,
                out.reproducible,
                start,
            );
            emit_report(&report, out.format, out.output.as_deref())?;
            summarize(&report);
            Ok(report.all_passed())
        }
        Command::Verify {
            q,
            tolerance,
            trials,
            seed,
            out,
        } => {
            // validated even though the suite pins its own lattices
            let _ = qparam(q)?;
            if tolerance <= 0.0 || !tolerance.is_finite() {
                return Err(QError::Domain(format!(
                    "tolerance must be positive, got {tolerance}"
                )));
            }
            if trials < 1 {
                return Err(QError::Domain("trials must be at least 1".into()));
            }
            let config = SuiteConfig { seed, trials };
            let report = suite::run(
                &config,
                "verify",
                format!("q={q} tolerance={tolerance} trials={trials}"),
                out.reproducible,
            )?;
            emit_report(&report, out.format, out.output.as_deref())?;
            for (label, passed, total) in suite::criterion_rollup(&report.checks) {
                let verdict = if passed == total { "PASS" } else { "FAIL" };
                eprintln!("{verdict} {label}: {passed}/{total} checks");
            }
            summarize(&report);
            Ok(report.all_passed())
        }
    }
}

fn make_report(
    command: &str,
    parameters: String,
    seed: Option<u64>,
    checks: Vec<IdentityCheck>,
    reproducible: bool,
    start: std::time::Instant,
) -> VerificationReport {
    let meta = ReportMeta {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        parameters,
        seed,
        wall_time_ms: if reproducible {
            None
        } else {
            Some(start.elapsed().as_millis() as u64)
        },
    };
    VerificationReport::new(meta, checks)
}

fn summarize(report: &VerificationReport) {
    eprintln!(
        "{}: {} checks, {} passed, {} failed, {} informational",
        report.meta.command,
        report.summary.total,
        report.summary.passed,
        report.summary.failed,
        report.summary.informational
    );
}

/// The full qidentity sweep at one q.
fn identity_checks(qp: &QParam, tol: Tolerance) -> Result<Vec<IdentityCheck>> {
    let mut checks = Vec::new();
    for n in 0..=8u32 {
        for k in 0..=n {
            checks.push(check_subset_weight_sum(n, k, qp, tol)?);
        }
        for y in 1..=5u32 {
            for variant in [VandermondeVariant::Q, VandermondeVariant::QInv] {
                checks.push(check_vandermonde_identity(n, y, qp, variant, tol)?);
            }
        }
        for &t in &[-1.0, -0.3, 0.0, 0.7, 1.0] {
            checks.push(check_qbinom_product(n, t, qp, tol)?);
        }
    }
    for n in 1..=7u32 {
        for parts in compositions(n, 4) {
            checks.push(check_multinomial_partition_sum(
                n,
                &parts,
                qp,
                PartitionWeighting::Nested,
                tol,
            )?);
            checks.push(check_multinomial_inversion_oracle(n, &parts, qp, tol)?);
        }
    }
    for (n, parts) in [(3u32, vec![1u32, 1]), (4, vec![2, 1])] {
        checks.push(check_multinomial_partition_sum(
            n,
            &parts,
            qp,
            PartitionWeighting::Literal,
            tol,
        )?);
    }
    let fubini = [1u64, 1, 3, 13, 75, 541];
    for (n, &expect) in fubini.iter().enumerate() {
        let got = count_ordered_set_partitions(n as u32)?;
        checks.push(IdentityCheck::with_verdict(
            "fubini_count",
            got as f64,
            expect as f64,
            got == expect,
            format!("n={n}"),
        ));
    }
    Ok(checks)
}

/// Simulation, pmf comparison, and the conditional checks for one
/// parameter point.
#[allow(clippy::too_many_arguments)]
fn heine_checks(
    qp: &QParam,
    lambda: f64,
    t: f64,
    nu: u32,
    depth: u32,
    trials: u64,
    seed: u64,
    tolerance: f64,
) -> Result<Vec<IdentityCheck>> {
    let mut checks = Vec::new();
    let q = qp.q();
    let oracle_depth = required_depth(lambda, t, q, 1e-13).max(depth);
    let hp_oracle = HeineParams::new(lambda, t, *qp, oracle_depth)?;
    let dp = pmf_oracle_dp(&hp_oracle, 20);
    for k in 0..=20u32 {
        let closed = heine_pmf(k, &hp_oracle)?;
        checks.push(IdentityCheck::with_verdict(
            "pmf_vs_dp",
            closed.value,
            dp.prob(k),
            (closed.value - dp.prob(k)).abs() <= tolerance,
            format!("k={k} depth={oracle_depth} dp_tail={:.1e}", dp.tail_mass()),
        ));
    }
    let mut sum = 0.0;
    for k in 0..400u32 {
        let term = heine_pmf(k, &hp_oracle)?.value;
        sum += term;
        if term < 1e-16 && k > 5 {
            break;
        }
    }
    checks.push(IdentityCheck::compare(
        "pmf_sum",
        sum,
        1.0,
        Tolerance {
            rel: 1e-10,
            abs: 1e-10,
        },
        format!("lambda={lambda} t={t} q={q}"),
    ));

    let hp = HeineParams::new(lambda, t, *qp, depth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; depth as usize + 1];
    for _ in 0..trials {
        let rec = simulate(&hp, &mut rng);
        counts[rec.count() as usize] += 1;
    }
    for k in 0..=6u32.min(depth) {
        let prob = heine_pmf(k, &hp)?.value;
        let emp = counts[k as usize] as f64 / trials as f64;
        let se = (prob * (1.0 - prob) / trials as f64).sqrt();
        checks.push(IdentityCheck::with_verdict(
            "pmf_mc",
            emp,
            prob,
            (emp - prob).abs() <= 4.0 * se,
            format!(
                "k={k} trials={trials} se={se:.3e} sim_tail={:.1e}",
                hp.tail_mass_below(depth)
            ),
        ));
    }

    let exact = conditional_config_probability(nu, &hp_oracle)?;
    let expect = crate::qcore::q_factorial(nu, qp) * (1.0 - q).powi(nu as i32);
    checks.push(IdentityCheck::with_verdict(
        "conditional_exact",
        exact,
        expect,
        (exact - expect).abs() <= 1e-8,
        format!("nu={nu}"),
    ));
    let boxed =
        conditional_density_value(nu, &hp_oracle) * configuration_box_measure(nu, &hp_oracle);
    checks.push(IdentityCheck::with_verdict(
        "conditional_density_box",
        boxed,
        exact,
        (boxed - exact).abs() <= 1e-10,
        format!("nu={nu}"),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    checks.push(conditional_mc_check(nu, &hp, trials, &mut rng)?);
    Ok(checks)
}

#[derive(Debug, Serialize)]
struct DistRow {
    y: f64,
    cdf: f64,
    pdf: f64,
}

/// Tabulate on the Fermat grid `base * q^j`, descending from the support
/// end. The q-distributions live on these atoms; between them the closed
/// forms are formal polynomials, not probabilities.
fn tabulate(
    law: Law,
    qp: &QParam,
    nu: u32,
    k: u32,
    t: f64,
    beta: f64,
    grid: u32,
) -> Result<Vec<DistRow>> {
    let mut rows = Vec::with_capacity(grid as usize);
    match law {
        Law::Uniform => {
            let d = QUniform::new(beta, *qp)?;
            let points = QGrid::new(beta, grid as usize - 1, qp)?;
            for &y in points.points() {
                rows.push(DistRow {
                    y,
                    cdf: d.cdf(y),
                    pdf: d.pdf(y),
                });
            }
        }
        Law::Max | Law::Min | Law::Kth => {
            let spec = match law {
                Law::Kth => OrderStatSpec::new(nu, k, t)?,
                _ => OrderStatSpec::new(nu, 1, t)?,
            };
            let which = match law {
                Law::Max => OrderStatistic::Max,
                Law::Min => OrderStatistic::Min,
                _ => OrderStatistic::Kth(k),
            };
            let points = QGrid::new(t, grid as usize - 1, qp)?;
            for &y in points.points() {
                rows.push(DistRow {
                    y,
                    cdf: unif_ord_cdf(&spec, qp, which, y)?,
                    pdf: unif_ord_pdf(&spec, qp, which, y)?,
                });
            }
        }
    }
    Ok(rows)
}

/// serde_json formatter printing every float with 17 significant digits
/// (scientific), which round-trips binary64 exactly.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| QError::Numeric(format!("JSON serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(buf)
}

fn csv_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serialize a report to the requested format and write it to the sink.
///
/// JSON is a single `{meta, checks[], summary}` object; CSV is the header
/// `name,lhs,rhs,abs_err,rel_err,passed` plus one row per check. All output
/// is UTF-8 with LF line endings.
pub fn emit_report(
    report: &VerificationReport,
    format: Format,
    output: Option<&std::path::Path>,
) -> Result<()> {
    let bytes = match format {
        Format::Json => to_json_bytes(report)?,
        Format::Csv => {
            let mut s = String::from("name,lhs,rhs,abs_err,rel_err,passed\n");
            for c in &report.checks {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.name,
                    csv_number(c.lhs),
                    csv_number(c.rhs),
                    csv_number(c.abs_err),
                    csv_number(c.rel_err),
                    c.passed
                ));
            }
            s.into_bytes()
        }
    };
    write_sink(&bytes, output)
}

#[derive(Serialize)]
struct Table<'a> {
    meta: &'a ReportMeta,
    rows: &'a [DistRow],
}

fn emit_table(
    meta: &ReportMeta,
    rows: &[DistRow],
    format: Format,
    output: Option<&std::path::Path>,
) -> Result<()> {
    let bytes = match format {
        Format::Json => to_json_bytes(&Table { meta, rows })?,
        Format::Csv => {
            let mut s = String::from("y,cdf,pdf\n");
            for r in rows {
                s.push_str(&format!(
                    "{},{},{}\n",
                    csv_number(r.y),
                    csv_number(r.cdf),
                    csv_number(r.pdf)
                ));
            }
            s.into_bytes()
        }
    };
    write_sink(&bytes, output)
}

fn write_sink(bytes: &[u8], output: Option<&std::path::Path>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| QError::Numeric(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|()| stdout.flush())
                .map_err(|e| QError::Numeric(format!("cannot write to stdout: {e}")))
        }
    }
}

fn compositions(n: u32, max_parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(rest: u32, max_parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        if prefix.len() == max_parts {
            return;
        }
        for k in 1..=rest {
            prefix.push(k);
            rec(rest - k, max_parts, prefix, out);
            prefix.pop();
        }
    }
    rec(n, max_parts, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Summary;

    fn sample_report() -> VerificationReport {
        let meta = ReportMeta {
            version: "0.1.0".into(),
            command: "test".into(),
            parameters: "q=0.5".into(),
            seed: Some(42),
            wall_time_ms: None,
        };
        let checks = vec![
            IdentityCheck::compare("a", 1.0, 1.0, Tolerance::relative(1e-9), "n=1"),
            IdentityCheck::compare(
                "b",
                0.4194224417951077,
                0.41942244179510773,
                Tolerance::relative(1e-9),
                "",
            ),
        ];
        VerificationReport::new(meta, checks)
    }

    #[test]
    fn json_round_trips_bit_for_bit() {
        let report = sample_report();
        let bytes = to_json_bytes(&report).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        let parsed: VerificationReport = serde_json::from_str(&text).unwrap();
        for (orig, back) in report.checks.iter().zip(parsed.checks.iter()) {
            assert_eq!(orig.lhs.to_bits(), back.lhs.to_bits());
            assert_eq!(orig.rhs.to_bits(), back.rhs.to_bits());
            assert_eq!(orig.abs_err.to_bits(), back.abs_err.to_bits());
            assert_eq!(orig.rel_err.to_bits(), back.rel_err.to_bits());
        }
        assert_eq!(
            parsed.summary,
            Summary {
                total: 2,
                passed: 2,
                failed: 0,
                informational: 0
            }
        );
        // byte-identical reserialization
        assert_eq!(bytes, to_json_bytes(&parsed).unwrap());
    }

    #[test]
    fn json_floats_have_17_significant_digits() {
        let report = sample_report();
        let text = String::from_utf8(to_json_bytes(&report).unwrap()).unwrap();
        assert!(text.contains("4.1942244179510768e-1"), "{text}");
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn csv_has_header_plus_one_row_per_check() {
        let report = sample_report();
        let mut s = String::from("name,lhs,rhs,abs_err,rel_err,passed\n");
        for c in &report.checks {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.name,
                csv_number(c.lhs),
                csv_number(c.rhs),
                csv_number(c.abs_err),
                csv_number(c.rel_err),
                c.passed
            ));
        }
        assert_eq!(s.lines().count(), 1 + report.checks.len());
        assert!(s.starts_with("name,lhs,rhs,abs_err,rel_err,passed\n"));
    }

    #[test]
    fn identity_checks_pass_at_default_q() {
        let qp = QParam::with_default_policy(0.5).unwrap();
        let checks = identity_checks(&qp, Tolerance::new(1e-8, 1e-11)).unwrap();
        assert!(checks.iter().filter(|c| c.asserted).all(|c| c.passed));
        assert!(checks.iter().any(|c| !c.asserted));
    }

    #[test]
    fn tabulate_produces_requested_grid() {
        let qp = QParam::with_default_policy(0.5).unwrap();
        let rows = tabulate(Law::Kth, &qp, 4, 2, 1.0, 1.0, 50).unwrap();
        assert_eq!(rows.len(), 50);
        assert_eq!(rows[0].y, 1.0);
        assert_eq!(rows[0].cdf, 1.0);
        // rows descend the geometric grid; the CDF descends with them and
        // stays within [0, 1]
        assert!(rows
            .windows(2)
            .all(|w| w[1].y < w[0].y && w[1].cdf <= w[0].cdf + 1e-12));
        assert!(rows.iter().all(|r| (-1e-12..=1.0 + 1e-12).contains(&r.cdf)));
        let rows = tabulate(Law::Uniform, &qp, 1, 1, 1.0, 2.0, 10).unwrap();
        assert_eq!(rows.len(), 10);
        assert!((rows[0].pdf - 0.5).abs() < 1e-15);
        assert_eq!(rows[0].y, 2.0);
    }
}
