//! Command-line front end for the column-number toolkit.
//!
//! Every data file the tool writes is byte-identical across reruns with the
//! same arguments; the run manifest printed after a write carries the only
//! volatile field (wall-clock time). Rationals appear as "p/q" strings in
//! data files; decimals show up only in human-facing lines marked approximate.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use colnum::bounds;
use colnum::casecheck::{self, Relax};
use colnum::error::{Error, Result};
use colnum::interval::{parse_rational, rational_to_decimal};
use colnum::lp;
use colnum::model::{family, ColumnSet, FamilyKind};
use colnum::numtheory::ArithCache;
use colnum::oracle::{best_typed_matrix, SearchConfig};
use colnum::reduction::reduce;

use colnum_cli::acceptance;

#[derive(Parser)]
#[command(name = "colnum", version, about = "Exact verification toolkit for column counts of generic two-row integer matrices")]
struct Cli {
    /// Thread budget for partitioned sweeps and search roots.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Sieve-table limit for the arithmetic cache.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    cache_limit: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Arithmetic-function estimates and their certified error checks.
    Numtheory {
        #[command(subcommand)]
        command: NumtheoryCommand,
    },
    /// Emit a member of one of the closed-form families.
    Family {
        /// Family name: F1, F2, or F3.
        #[arg(long)]
        kind: String,
        /// Determinant budget of the family member.
        #[arg(long)]
        delta: u64,
        /// What to emit: "columns" (JSON list of [x, y]) or "summary".
        #[arg(long)]
        emit: String,
        /// Write to this file instead of stdout (adds a run manifest).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a generic column set to endpoint form within a budget.
    Reduce {
        /// JSON file holding a list of [x, y] columns.
        #[arg(long)]
        input: PathBuf,
        /// Determinant budget the set must respect.
        #[arg(long)]
        delta: u64,
        /// Where to write the endpoint-form JSON.
        #[arg(long)]
        output: PathBuf,
    },
    /// Optimal value of the packing program, exact or via the restricted
    /// dual support with an audited certificate.
    Zm {
        /// Number of rows of the program.
        #[arg(long)]
        m: u32,
        /// "exact" for the full program, "approx" for the restricted one.
        #[arg(long)]
        mode: String,
        /// Numerator of the support cutoff eps = eps-num / m (approx mode).
        #[arg(long, default_value = "1.85")]
        eps_num: String,
        /// Write the audited dual certificate to this file (approx mode).
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Certify an upper bound on the packing optimum over a range of row counts.
    Sweep {
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
        /// Bound to certify, e.g. 0.999.
        #[arg(long, default_value = "0.999")]
        w: String,
        /// CSV output path.
        #[arg(long)]
        out: PathBuf,
        /// Record wall-clock solve times in the CSV (makes it volatile).
        #[arg(long, default_value_t = false)]
        timings: bool,
    },
    /// Feasibility of the three-rectangle dual certificate at scale c/m^2.
    Analytic {
        #[arg(long)]
        m: u32,
        /// Certificate constant times m^2, e.g. 4.96.
        #[arg(long)]
        c: String,
        /// Write the certificate JSON to this file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Decide whether the counting bound clears w * delta at this budget.
    Threshold {
        #[arg(long)]
        delta: u64,
        #[arg(long, default_value = "0.999")]
        w: String,
    },
    /// Run one of the finite residue case checks.
    Claims {
        /// Which system: "type2" or "type3".
        #[arg(long)]
        which: String,
        /// Row-count parameter of the three-row system (3 or 4).
        #[arg(long)]
        d: Option<u32>,
        /// Drop one constraint family: "b2-odd" or "delta-residues".
        #[arg(long)]
        relax: Option<String>,
        /// Write the JSON report to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search for the best endpoint-form count at a budget.
    Oracle {
        #[arg(long)]
        delta: u64,
        /// Cap on the number of rows (defaults to the budget's cap).
        #[arg(long)]
        m_max: Option<u32>,
        /// Endpoint window half-width (defaults to the budget).
        #[arg(long)]
        window: Option<i64>,
        /// Write the witness JSON to this file instead of stdout.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Run the whole verification suite and emit one JSON verdict.
    VerifyAll,
}

#[derive(Subcommand)]
enum NumtheoryCommand {
    /// Certified relative-error check of the totient summatories on a
    /// range, one CSV row per x.
    #[command(name = "check-lemma21")]
    CheckLemma21 {
        /// Relative-error tolerance, e.g. 0.001.
        #[arg(long, default_value = "0.001")]
        eps: String,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        /// Write the CSV here instead of stdout (adds a run manifest).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct Artifact {
    path: String,
    sha256: String,
}

/// What a run did: the command, its parameters, checksums of every file it
/// wrote, and how long it took. Printed as one JSON line after any write.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    parameters: BTreeMap<String, String>,
    artifacts: Vec<Artifact>,
    wall_ms: u128,
}

/// Collects parameters and written files, then prints the manifest (only
/// when something was written, so pure print commands stay quiet).
struct Emitter {
    started: Instant,
    command: String,
    parameters: BTreeMap<String, String>,
    artifacts: Vec<Artifact>,
}

impl Emitter {
    fn new(command: &str) -> Self {
        Emitter {
            started: Instant::now(),
            command: command.to_string(),
            parameters: BTreeMap::new(),
            artifacts: Vec::new(),
        }
    }

    fn param(&mut self, key: &str, value: impl Display) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        std::fs::write(path, bytes)?;
        let mut hasher = <sha2::Sha256 as sha2::Digest>::new();
        sha2::Digest::update(&mut hasher, bytes);
        self.artifacts.push(Artifact {
            path: path.display().to_string(),
            sha256: format!("{:x}", sha2::Digest::finalize(hasher)),
        });
        Ok(())
    }

    fn finish(self) -> Result<()> {
        if self.artifacts.is_empty() {
            return Ok(());
        }
        let manifest = RunManifest {
            command: self.command,
            parameters: self.parameters,
            artifacts: self.artifacts,
            wall_ms: self.started.elapsed().as_millis(),
        };
        println!(
            "{}",
            serde_json::to_string(&manifest)
                .map_err(|e| Error::Internal(format!("manifest serialization: {e}")))?
        );
        Ok(())
    }
}

fn json_line<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(|e| Error::Internal(format!("serialization: {e}")))
}

/// Emit text either to stdout or to a file tracked by the manifest.
fn emit_text(emitter: &mut Emitter, out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => emitter.write(path, text.as_bytes()),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Numtheory { command } => match command {
            NumtheoryCommand::CheckLemma21 { eps, from, to, out } => {
                cmd_check_lemma21(cli.cache_limit, &eps, from, to, out.as_deref())
            }
        },
        Command::Family { kind, delta, emit, out } => {
            cmd_family(cli.cache_limit, &kind, delta, &emit, out.as_deref())
        }
        Command::Reduce { input, delta, output } => {
            cmd_reduce(cli.cache_limit, &input, delta, &output)
        }
        Command::Zm { m, mode, eps_num, emit } => {
            cmd_zm(cli.cache_limit, m, &mode, &eps_num, emit.as_deref())
        }
        Command::Sweep { from, to, w, out, timings } => {
            cmd_sweep(cli.cache_limit, cli.jobs, from, to, &w, &out, timings)
        }
        Command::Analytic { m, c, emit } => cmd_analytic(cli.cache_limit, m, &c, emit.as_deref()),
        Command::Threshold { delta, w } => cmd_threshold(delta, &w),
        Command::Claims { which, d, relax, out } => {
            cmd_claims(&which, d, relax.as_deref(), out.as_deref())
        }
        Command::Oracle { delta, m_max, window, emit } => {
            cmd_oracle(cli.cache_limit, cli.jobs, delta, m_max, window, emit.as_deref())
        }
        Command::VerifyAll => cmd_verify_all(cli.jobs),
    }
}

fn cache_for(limit: u32, needed: u64) -> ArithCache {
    let limit = u64::from(limit).max(needed).min(u64::from(u32::MAX)) as u32;
    ArithCache::new(limit)
}

fn cmd_check_lemma21(
    cache_limit: u32,
    eps: &str,
    from: u64,
    to: u64,
    out: Option<&Path>,
) -> Result<u8> {
    let mut emitter = Emitter::new("numtheory check-lemma21");
    emitter.param("eps", eps);
    emitter.param("from", from);
    emitter.param("to", to);
    let eps = parse_rational(eps)?;
    let cache = cache_for(cache_limit, to);
    let rows = cache.asymptotic_check_range(from, to, &eps)?;
    let mut csv = String::from("x,lhs1,rhs1,lhs2,rhs2,pass\n");
    let mut all_pass = true;
    for row in &rows {
        all_pass &= row.pass;
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.x, row.err_phi_sum, row.eps, row.err_phi_ratio_sum, row.eps, row.pass
        ));
    }
    emit_text(&mut emitter, out, &csv)?;
    emitter.finish()?;
    Ok(if all_pass { 0 } else { 1 })
}

fn cmd_family(
    cache_limit: u32,
    kind: &str,
    delta: u64,
    emit: &str,
    out: Option<&Path>,
) -> Result<u8> {
    let mut emitter = Emitter::new("family");
    emitter.param("kind", kind);
    emitter.param("delta", delta);
    emitter.param("emit", emit);
    let kind: FamilyKind = kind.parse()?;
    let cache = cache_for(cache_limit, delta + 8);
    let matrix = family(kind, delta)?;
    match emit {
        "columns" => {
            let columns = matrix.enumerate_columns();
            let text = format!("{}\n", json_line(&columns)?);
            emit_text(&mut emitter, out, &text)?;
        }
        "summary" => {
            let columns = matrix.enumerate_columns();
            let text = format!(
                "family: {kind:?}\ndelta budget: {delta}\nrows: {}\ncolumns: {}\n\
                 delta endpoints: {}\ngeneric: {}\n",
                matrix.m(),
                matrix.column_count(&cache),
                matrix.delta_endpoints(&cache)?,
                columns.is_generic(),
            );
            emit_text(&mut emitter, out, &text)?;
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "--emit must be \"columns\" or \"summary\", got \"{other}\""
            )));
        }
    }
    emitter.finish()?;
    Ok(0)
}

fn cmd_reduce(cache_limit: u32, input: &Path, delta: u64, output: &Path) -> Result<u8> {
    let mut emitter = Emitter::new("reduce");
    emitter.param("input", input.display());
    emitter.param("delta", delta);
    emitter.param("output", output.display());
    let text = std::fs::read_to_string(input)?;
    let columns: Vec<(i64, i64)> = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("bad column JSON in {}: {e}", input.display())))?;
    let set = ColumnSet::new(columns);
    let cache = cache_for(cache_limit, delta + 8);
    let matrix = reduce(&set, delta, &cache)?;
    emitter.write(output, format!("{}\n", matrix.to_json()).as_bytes())?;
    emitter.finish()?;
    Ok(0)
}

fn cmd_zm(cache_limit: u32, m: u32, mode: &str, eps_num: &str, emit: Option<&Path>) -> Result<u8> {
    let mut emitter = Emitter::new("zm");
    emitter.param("m", m);
    emitter.param("mode", mode);
    let cache = cache_for(cache_limit, u64::from(m) + 8);
    match mode {
        "exact" => {
            if emit.is_some() {
                return Err(Error::InvalidArgument(
                    "--emit only applies to approx mode (exact mode has no certificate)".into(),
                ));
            }
            let solution = lp::build_primal(m, &cache)?.solve()?;
            println!("{}", solution.value);
            println!("~{} (approx)", rational_to_decimal(&solution.value, 6));
        }
        "approx" => {
            emitter.param("eps-num", eps_num);
            let eps = parse_rational(eps_num)? / BigRational::from(BigInt::from(m));
            let solve = lp::solve_restricted(m, &eps, &cache)?;
            println!("{}", solve.value);
            println!("~{} (approx)", rational_to_decimal(&solve.value, 6));
            if let Some(path) = emit {
                emitter.write(path, format!("{}\n", solve.certificate.to_json()).as_bytes())?;
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "--mode must be \"exact\" or \"approx\", got \"{other}\""
            )));
        }
    }
    emitter.finish()?;
    Ok(0)
}

fn cmd_sweep(
    cache_limit: u32,
    jobs: usize,
    from: u32,
    to: u32,
    w: &str,
    out: &Path,
    timings: bool,
) -> Result<u8> {
    let mut emitter = Emitter::new("sweep");
    emitter.param("from", from);
    emitter.param("to", to);
    emitter.param("w", w);
    emitter.param("jobs", jobs);
    emitter.param("timings", timings);
    let w = parse_rational(w)?;
    let cache = cache_for(cache_limit, u64::from(to) + 8);
    let report = bounds::sweep(from, to, &w, &cache, jobs)?;
    let mut csv = String::from("m,bound_num,bound_den,solved,eps_num,eps_den,wall_ms\n");
    for r in &report.records {
        let (eps_num, eps_den) = match &r.eps {
            Some(eps) => (eps.numer().to_string(), eps.denom().to_string()),
            None => (String::new(), String::new()),
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.m,
            r.bound.numer(),
            r.bound.denom(),
            r.solved,
            eps_num,
            eps_den,
            if timings { r.wall_ms } else { 0 },
        ));
    }
    emitter.write(out, csv.as_bytes())?;
    emitter.finish()?;
    Ok(0)
}

fn cmd_analytic(cache_limit: u32, m: u32, c: &str, emit: Option<&Path>) -> Result<u8> {
    let mut emitter = Emitter::new("analytic");
    emitter.param("m", m);
    emitter.param("c", c);
    let m_sq = BigRational::from(BigInt::from(m) * BigInt::from(m));
    let scale = parse_rational(c)? / m_sq;
    let cache = cache_for(cache_limit, u64::from(m) + 8);
    let cert = bounds::analytic_certificate(m, &scale, &cache)?;
    let feasible = lp::check_dual_feasible(&cert, &cache)?;
    println!("feasible: {feasible}");
    println!("objective: {}", cert.objective);
    println!("~{} (approx)", rational_to_decimal(&cert.objective, 6));
    if let Some(path) = emit {
        emitter.write(path, format!("{}\n", cert.to_json()).as_bytes())?;
    }
    emitter.finish()?;
    Ok(if feasible { 0 } else { 1 })
}

fn cmd_threshold(delta: u64, w: &str) -> Result<u8> {
    let w = parse_rational(w)?;
    let holds = bounds::verify_threshold(delta, &w);
    println!("{holds}");
    Ok(if holds { 0 } else { 1 })
}

fn cmd_claims(which: &str, d: Option<u32>, relax: Option<&str>, out: Option<&Path>) -> Result<u8> {
    let mut emitter = Emitter::new("claims");
    emitter.param("which", which);
    if let Some(d) = d {
        emitter.param("d", d);
    }
    if let Some(relax) = relax {
        emitter.param("relax", relax);
    }
    let relax = relax.map(str::parse::<Relax>).transpose()?;
    let strict = relax.is_none();
    let (text, solutions) = match which {
        "type2" => {
            if d.is_some() {
                return Err(Error::InvalidArgument(
                    "--d only applies to the three-row system (--which type3)".into(),
                ));
            }
            let report = casecheck::check_type2(relax)?;
            (format!("{}\n", json_line(&report)?), report.solutions_found)
        }
        "type3" => {
            let d = d.ok_or_else(|| {
                Error::InvalidArgument("the three-row system needs --d 3 or --d 4".into())
            })?;
            let report = casecheck::check_type3(d, relax)?;
            (format!("{}\n", json_line(&report)?), report.solutions_found)
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "--which must be \"type2\" or \"type3\", got \"{other}\""
            )));
        }
    };
    emit_text(&mut emitter, out, &text)?;
    emitter.finish()?;
    Ok(if strict && solutions > 0 { 1 } else { 0 })
}

fn cmd_oracle(
    cache_limit: u32,
    jobs: usize,
    delta: u64,
    m_max: Option<u32>,
    window: Option<i64>,
    emit: Option<&Path>,
) -> Result<u8> {
    let mut emitter = Emitter::new("oracle");
    emitter.param("delta", delta);
    emitter.param("jobs", jobs);
    let mut cfg = SearchConfig::new(delta)?;
    if let Some(m_max) = m_max {
        emitter.param("m-max", m_max);
        cfg = cfg.with_m_max(m_max)?;
    }
    if let Some(window) = window {
        emitter.param("window", window);
        cfg = cfg.with_window(window)?;
    }
    let cache = cache_for(cache_limit, delta + 8);
    let outcome = best_typed_matrix(&cfg, &cache, jobs)?;
    let witness: serde_json::Value = serde_json::to_value(&outcome.matrix)
        .map_err(|e| Error::Internal(format!("witness serialization: {e}")))?;
    let report = serde_json::json!({
        "delta": delta,
        "count": outcome.count,
        "nodes_explored": outcome.nodes_explored,
        "witness": witness,
    });
    let text = format!("{}\n", json_line(&report)?);
    emit_text(&mut emitter, emit, &text)?;
    emitter.finish()?;
    Ok(0)
}

fn cmd_verify_all(jobs: usize) -> Result<u8> {
    let checks = acceptance::run_all(jobs);
    for check in &checks {
        eprintln!("{}", check.line());
    }
    let pass = checks.iter().all(|c| c.pass);
    let verdict = serde_json::json!({ "checks": checks, "pass": pass });
    println!("{}", json_line(&verdict)?);
    Ok(if pass { 0 } else { 1 })
}
