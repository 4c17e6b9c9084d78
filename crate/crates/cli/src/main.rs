//! `jsmac`: joint-secrecy rate regions from the command line.
//!
//! Exit codes: 0 success, 1 verification or property failure, 2 usage or
//! parse error, 3 spec invariant violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jsmac::fourier_motzkin::{
    build_system, closed_form_system, eliminate_all_randomization_traced, evaluate_system,
    prune_with_certificates, randomization_var, rate_part, InequalitySystem,
};
use jsmac::infotheory::{bound_table, BoundTable};
use jsmac::region::closed_form_region;
use jsmac::spec_file::{xor_and_example, SpecError, SpecFile};
use jsmac::subsets::{compact_form_direct, SetFamily, SubsetMask};
use jsmac::sweeps::{
    exhaustive_compact_sweep, props_random, random_bounds, verify_bounds, verify_random,
    EQUIVALENCE_TOL, RESIDUAL_FLOOR,
};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_SPEC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "jsmac",
    version,
    about = "Joint-secrecy rate regions of the K-transmitter MAC with an eavesdropper"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound table and rate-region inequalities for a spec file.
    Region {
        spec: PathBuf,
        /// Write the region vertices as CSV.
        #[arg(long)]
        vertices: Option<PathBuf>,
        /// Write the region vertices as a JSON array of arrays.
        #[arg(long)]
        vertices_json: Option<PathBuf>,
    },
    /// Symbolic elimination of the randomization rates.
    Fm {
        #[arg(required_unless_present = "symbolic", conflicts_with = "symbolic")]
        spec: Option<PathBuf>,
        /// Run on the purely symbolic system for this many transmitters.
        #[arg(long, value_name = "K")]
        symbolic: Option<usize>,
        /// Re-check every pruned row numerically under sampled bound tables.
        #[arg(long)]
        paranoid: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cross-check the closed-form region against brute-force elimination.
    Verify {
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        spec: Option<PathBuf>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Property sweeps: sub/supermodularity, dominance, compact-form invariants.
    Props {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Random families checked per distribution.
        #[arg(long, default_value_t = 5)]
        families: usize,
    },
    /// Presence vector and compact form of a family, e.g. `--k 3 1 1,2 2,3`.
    Compact {
        #[arg(long)]
        k: usize,
        /// Members as comma-separated 1-based elements; `{}` for the empty set.
        #[arg(required = true, allow_hyphen_values = true)]
        sets: Vec<String>,
    },
    /// Print the bundled two-transmitter example spec.
    Example,
}

#[derive(Args)]
struct SweepArgs {
    /// Number of seeded random channels.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Region {
            spec,
            vertices,
            vertices_json,
        } => cmd_region(&spec, vertices.as_deref(), vertices_json.as_deref()),
        Command::Fm {
            spec,
            symbolic,
            paranoid,
            seed,
        } => cmd_fm(spec.as_deref(), symbolic, paranoid, seed),
        Command::Verify { spec, sweep } => cmd_verify(spec.as_deref(), &sweep),
        Command::Props { sweep, families } => cmd_props(&sweep, families),
        Command::Compact { k, sets } => cmd_compact(k, &sets),
        Command::Example => {
            println!("{}", xor_and_example().to_json());
            Ok(0)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        let code = match e {
            SpecError::Parse(_) => EXIT_USAGE,
            SpecError::Invariant(_) => EXIT_SPEC,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<jsmac::Error> for Failure {
    fn from(e: jsmac::Error) -> Self {
        Self::usage(e)
    }
}

type CmdResult = Result<u8, Failure>;

fn load_bounds(path: &Path) -> Result<BoundTable, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let spec = SpecFile::from_json(&text)?;
    let joint = spec.joint()?;
    Ok(bound_table(&joint)?)
}

fn print_bounds(bounds: &BoundTable) {
    println!("bound table (bits)");
    println!("  {:<14} {:>10} {:>10} {:>10}", "J", "b+", "b-", "b+ - b-");
    for s in SubsetMask::all_nonempty(bounds.k()).expect("valid k") {
        println!(
            "  {:<14} {:>10.6} {:>10.6} {:>10.6}",
            s.to_string(),
            bounds.plus(s),
            bounds.minus(s),
            bounds.gap(s)
        );
    }
}

fn rate_lhs(a: &[f64]) -> String {
    let terms: Vec<String> = a
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(i, &c)| {
            if c == 1.0 {
                format!("R{}", i + 1)
            } else {
                format!("{c}*R{}", i + 1)
            }
        })
        .collect();
    terms.join(" + ")
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn cmd_region(spec: &Path, csv: Option<&Path>, json: Option<&Path>) -> CmdResult {
    let bounds = load_bounds(spec)?;
    print_bounds(&bounds);
    let region = closed_form_region(&bounds);
    println!("region (R_i >= 0 for all i)");
    for (a, c) in region.rows() {
        println!("  {} <= {c:.6}", rate_lhs(a));
    }
    let empty = region.is_empty();
    println!("empty: {empty}");
    let vertices = region.vertices();
    println!("vertices: {}", vertices.len());
    for p in vertices.points() {
        let cols: Vec<String> = p.iter().map(|x| format!("{x:.6}")).collect();
        println!("  ({})", cols.join(", "));
    }
    if let Some(path) = csv {
        write_file(path, &vertices.to_csv())?;
    }
    if let Some(path) = json {
        write_file(path, &vertices.to_json())?;
    }
    Ok(0)
}

fn cmd_fm(spec: Option<&Path>, symbolic: Option<usize>, paranoid: bool, seed: u64) -> CmdResult {
    let bounds = match spec {
        Some(path) => Some(load_bounds(path)?),
        None => None,
    };
    let k = match (&bounds, symbolic) {
        (Some(b), _) => b.k(),
        (None, Some(k)) => k,
        (None, None) => return Err(Failure::usage("give a spec file or --symbolic K")),
    };
    let start = build_system(k)?;
    println!("starting system ({} rows)", start.len());
    print!("{}", indent(&start.to_text()));
    let (result, trace) = eliminate_all_randomization_traced(&start)?;
    println!("elimination trace");
    for step in &trace {
        println!(
            "  eliminate Rr{}: {} rows -> {} rows after pruning",
            step.transmitter, step.rows_in, step.rows_out
        );
    }
    println!("final system ({} rows)", result.len());
    print!("{}", indent(&result.to_text()));
    let matches = result == closed_form_system(k)?;
    println!("matches closed form: {matches}");

    if paranoid {
        let failures = paranoid_check(&start, k, seed)?;
        if failures > 0 {
            eprintln!("{failures} pruning certificates failed numerically");
            return Ok(EXIT_FAIL);
        }
        println!("paranoid: every pruning certificate holds under 20 sampled bound tables");
    }

    if let Some(bounds) = bounds {
        let numeric = evaluate_system(&result, &bounds)?;
        println!("numeric system");
        for (a, c) in rate_part(&numeric, k)? {
            println!("  {} <= {c:.6}", rate_lhs(&a));
        }
    }
    Ok(if matches { 0 } else { EXIT_FAIL })
}

/// Replays the elimination and checks each removed row against sampled
/// bound tables from random channels.
fn paranoid_check(start: &InequalitySystem, k: usize, seed: u64) -> Result<usize, Failure> {
    let mut rng = jsmac::random::seeded(seed);
    let tables = (0..20)
        .map(|_| random_bounds(&mut rng, k))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cur = start.clone();
    let mut failures = 0;
    for i in (1..=k).rev() {
        let combined = jsmac::fourier_motzkin::eliminate(&cur, randomization_var(k, i))?;
        let (pruned, certificates) = prune_with_certificates(&combined)?;
        for cert in &certificates {
            for t in &tables {
                if !cert.verify(t, 1e-10)? {
                    failures += 1;
                    eprintln!("certificate failed for {}", cert.removed);
                    break;
                }
            }
        }
        cur = pruned;
    }
    Ok(failures)
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}

fn cmd_verify(spec: Option<&Path>, sweep: &SweepArgs) -> CmdResult {
    if let Some(path) = spec {
        let bounds = load_bounds(path)?;
        let ok = verify_bounds(&bounds)?;
        println!("{}: {}", path.display(), verdict(ok));
        if !ok {
            print_bounds(&bounds);
            return Ok(EXIT_FAIL);
        }
        return Ok(0);
    }
    let n = sweep.random.unwrap_or(0);
    let trials = verify_random(n, sweep.k, sweep.seed)?;
    let mut failed = 0;
    for t in &trials {
        println!("trial {:>3}: {}", t.index, verdict(t.passed));
        if !t.passed {
            failed += 1;
            print_bounds(&t.bounds);
        }
    }
    println!(
        "{}/{} pass (k = {}, seed = {}, tol = {EQUIVALENCE_TOL:e})",
        trials.len() - failed,
        trials.len(),
        sweep.k,
        sweep.seed
    );
    Ok(if failed == 0 { 0 } else { EXIT_FAIL })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn cmd_props(sweep: &SweepArgs, families: usize) -> CmdResult {
    let n = sweep.random.unwrap_or(0);
    let report = props_random(n, sweep.k, sweep.seed, families)?;
    let compact = exhaustive_compact_sweep(4, 4)?;
    let show = |x: f64| {
        if x.is_finite() {
            format!("{x:.3e}")
        } else {
            "n/a".into()
        }
    };
    println!(
        "random distributions: {} (k = {}, seed = {})",
        report.distributions, sweep.k, sweep.seed
    );
    println!(
        "  submodularity of b+   min residual {} over {} pairs",
        show(report.min_submodular),
        report.modularity_checks
    );
    println!(
        "  supermodularity of b- min residual {}",
        show(report.min_supermodular)
    );
    println!(
        "  dominance (b+)        min residual {} over {} families",
        show(report.min_dominance_plus),
        report.dominance_checks
    );
    println!(
        "  dominance (b-)        min residual {}",
        show(report.min_dominance_minus)
    );
    println!("  floor {RESIDUAL_FLOOR:e}: {}", verdict(report.passed()));
    println!(
        "exhaustive compact forms (k <= 4, t <= 4): {} families, recursion {}, presence {}",
        compact.families,
        verdict(compact.recursion_mismatch.is_none()),
        verdict(compact.presence_mismatch.is_none())
    );
    if let Some(v) = &report.violation {
        eprintln!("violation: {v}");
    }
    if let Some(f) = &compact.recursion_mismatch {
        eprintln!("recursion mismatch: {f}");
    }
    if let Some(f) = &compact.presence_mismatch {
        eprintln!("presence mismatch: {f}");
    }
    Ok(if report.passed() && compact.passed() {
        0
    } else {
        EXIT_FAIL
    })
}

fn cmd_compact(k: usize, sets: &[String]) -> CmdResult {
    let members = sets
        .iter()
        .map(|s| SubsetMask::parse(s, k))
        .collect::<Result<Vec<_>, _>>()?;
    let family = SetFamily::new(k, members)?;
    let presence = family.presence_vector();
    println!("family: {family}");
    println!("presence vector: {presence}");
    println!("t_max: {}", presence.t_max());
    println!("compact form: {}", compact_form_direct(&family)?);
    Ok(0)
}
