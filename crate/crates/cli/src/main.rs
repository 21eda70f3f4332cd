//! `qutrit-mes`: command-line front end.
//!
//! Exit status is 0 on success, 2 when the answer is mathematically negative (infeasible,
//! inequivalent, not generic, protocol rejected) and 1 on input errors.

mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use qutrit_mes::audit::symmetry_audit;
use qutrit_mes::classify::{classify, ClassifyOptions};
use qutrit_mes::generate::{generate_state, generate_state_with_seed, StateKind};
use qutrit_mes::io::{Metadata, ProtocolFile, SeedJson, StateFile};
use qutrit_mes::oracle::{brute_force_sep, numeric_symmetry_search, OracleBudget, SymmetryBudget};
use qutrit_mes::protocol::{
    locc_convert_step, locc_protocol_reach, sep_map_for_target, sep_map_from_witness, simulate, validate_povm, Epsilon, Protocol,
};
use qutrit_mes::scalar::C;
use qutrit_mes::seed::{check_generic, DEFAULT_GENERICITY_MARGIN};
use qutrit_mes::state::{lu_equivalent, standard_form};
use qutrit_mes::{set_tolerance, Error, GenericState, SeedParams, SepInstance};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "qutrit-mes", version, about = "SEP and LOCC transformations of generic three-qutrit states")]
struct Cli {
    /// Relative zero tolerance for support detection and rank decisions.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Seed for random generation and oracle sampling.
    #[arg(long, global = true, default_value_t = 0)]
    rng_seed: u64,
    /// Cross-check with the brute-force oracles where available.
    #[arg(long, global = true)]
    oracle: bool,
    /// Only consider cyclic party relabelings.
    #[arg(long, global = true)]
    cyclic_perms_only: bool,
    /// Print reports as JSON instead of `key: value` lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Random state of a structural class, verified by the classifier.
    Generate {
        #[arg(long, value_parser = parse_kind)]
        kind: StateKind,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Reuse the seed of this seed or state file instead of drawing one.
        #[arg(long)]
        seed_from: Option<PathBuf>,
        /// Output file (single state) or directory (several).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluates the genericity conditions of a seed or state file.
    CheckGeneric {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GENERICITY_MARGIN)]
        delta: f64,
    },
    StandardForm {
        file: PathBuf,
    },
    LuEquiv {
        a: PathBuf,
        b: PathBuf,
    },
    /// Decides whether a SEP map takes `--from` to `--to`.
    SepDecide {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
    },
    Classify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Builds a SEP map or LOCC protocol reaching `--target`, or a conversion step from
    /// `--source` with `--convert`.
    SynthProtocol {
        #[arg(long, required_unless_present = "convert")]
        target: Option<PathBuf>,
        #[arg(long)]
        source: Option<PathBuf>,
        #[arg(long, requires = "source", conflicts_with = "target")]
        convert: bool,
        /// Conversion parameter; `auto` halves from 1/2 until the target is positive.
        #[arg(long, default_value = "auto")]
        epsilon: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks POVM completeness and simulates every branch of a protocol file.
    VerifyProtocol {
        file: PathBuf,
    },
    /// Candidate enumeration over a seed (or the seed of a state file).
    SymmetryAudit {
        file: PathBuf,
    },
}

fn parse_kind(s: &str) -> Result<StateKind, String> {
    StateKind::from_name(s).ok_or_else(|| {
        format!("unknown kind {s:?}; expected one of {}", StateKind::ALL.map(|k| k.name()).join(", "))
    })
}

enum Status {
    Ok,
    Negative,
}

struct Ctx {
    opts: ClassifyOptions,
    rng_seed: u64,
    oracle: bool,
    json: bool,
}

impl Ctx {
    fn emit(&self, v: &Value) {
        if self.json {
            print_line(&serde_json::to_string_pretty(v).expect("reports serialize"));
        } else {
            print_line(&report::text(v));
        }
    }
}

/// Writes to stdout, ignoring a closed pipe (`| head`).
fn print_line(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_state(path: &Path) -> anyhow::Result<GenericState<f64>> {
    let (_, s) = StateFile::parse(&read(path)?).with_context(|| format!("{}", path.display()))?;
    Ok(s)
}

/// Seed parameters from either a bare `{a, b, c}` object or a state file.
fn load_seed(path: &Path) -> anyhow::Result<SeedParams<f64>> {
    let text = read(path)?;
    let seed = match serde_json::from_str::<StateFile>(&text) {
        Ok(f) => f.seed,
        Err(state_err) => serde_json::from_str::<SeedJson>(&text)
            .map_err(|_| anyhow!("{}: not a seed or state file: {state_err}", path.display()))?,
    };
    let z = |v: [f64; 2]| C::new(v[0], v[1]);
    let p = SeedParams::new(z(seed.a), z(seed.b), z(seed.c));
    if !p.as_array().iter().all(|x| x.re.is_finite() && x.im.is_finite()) {
        bail!("{}: non-finite seed parameter", path.display());
    }
    Ok(p)
}

fn write_or_print(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            print_line(text);
            Ok(())
        }
    }
}

/// Structural failures of a synthesis are answers, not input errors.
fn negative(e: &Error) -> bool {
    matches!(e, Error::Structure(_) | Error::NoEpsilon { .. } | Error::NotPositive { .. })
}

fn cmd_generate(ctx: &Ctx, kind: StateKind, count: usize, seed_from: Option<&Path>, out: Option<&Path>) -> anyhow::Result<Status> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.rng_seed);
    let fixed = seed_from.map(load_seed).transpose()?;
    if count > 1 {
        let dir = out.ok_or_else(|| anyhow!("--out DIR is required with --count > 1"))?;
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    for i in 0..count {
        let s = match fixed {
            Some(seed) => generate_state_with_seed(kind, seed, &mut rng)?,
            None => generate_state(kind, &mut rng)?,
        };
        let meta = Metadata { label: Some(kind.name().into()), provenance: Some(format!("generate --rng-seed {} #{i}", ctx.rng_seed)) };
        let text = StateFile::from_state(&s, Some(meta)).to_json();
        if count > 1 {
            let dir = out.expect("checked above");
            write_or_print(Some(&dir.join(format!("{}-{i:04}.json", kind.name()))), &text)?;
        } else {
            write_or_print(out, &text)?;
        }
    }
    Ok(Status::Ok)
}

fn cmd_check_generic(ctx: &Ctx, file: &Path, delta: f64) -> anyhow::Result<Status> {
    let r = check_generic(&load_seed(file)?, delta);
    ctx.emit(&report::genericity(&r));
    Ok(if r.generic { Status::Ok } else { Status::Negative })
}

fn cmd_standard_form(ctx: &Ctx, file: &Path) -> anyhow::Result<Status> {
    let s = load_state(file)?;
    let sf = standard_form(&s)?;
    let mut v = report::standard_form(&sf);
    v["state"] = serde_json::to_value(StateFile::from_state(&sf.to_state()?, None))?;
    ctx.emit(&v);
    Ok(Status::Ok)
}

fn cmd_lu_equiv(ctx: &Ctx, a: &Path, b: &Path) -> anyhow::Result<Status> {
    let (sa, sb) = (load_state(a)?, load_state(b)?);
    let eq = lu_equivalent(&sa, &sb)?;
    let dist = standard_form(&sa)?.dist(&standard_form(&sb)?);
    ctx.emit(&json!({"equivalent": eq, "standard_form_distance": dist}));
    Ok(if eq { Status::Ok } else { Status::Negative })
}

fn cmd_sep_decide(ctx: &Ctx, from: &Path, to: &Path) -> anyhow::Result<Status> {
    let (g, h) = (load_state(from)?, load_state(to)?);
    let f = qutrit_mes::sep_feasible(&SepInstance::from_states(&g, &h)?)?;
    let mut v = report::sep(&f);
    if ctx.oracle {
        let budget = OracleBudget { rng_seed: ctx.rng_seed, ..OracleBudget::default() };
        let o = brute_force_sep(&g.gram(), &h.gram(), &budget);
        v["oracle"] = report::oracle(&o);
        v["oracle_agrees"] = json!(o.verdict == qutrit_mes::oracle::Verdict::Inconclusive || o.feasible == f.feasible);
    }
    ctx.emit(&v);
    Ok(if f.feasible { Status::Ok } else { Status::Negative })
}

fn cmd_classify(ctx: &Ctx, files: &[PathBuf]) -> anyhow::Result<Status> {
    let results: Vec<anyhow::Result<Value>> = files
        .par_iter()
        .map(|f| {
            let s = load_state(f)?;
            let mut v = report::classification(&classify(&s.gram(), &ctx.opts));
            v["file"] = json!(f.display().to_string());
            Ok(v)
        })
        .collect();
    let reports = results.into_iter().collect::<anyhow::Result<Vec<_>>>()?;
    if reports.len() == 1 {
        ctx.emit(&reports[0]);
    } else {
        ctx.emit(&Value::Array(reports));
    }
    Ok(Status::Ok)
}

fn synthesize(ctx: &Ctx, target: Option<&Path>, source: Option<&Path>, convert: bool, epsilon: &str) -> anyhow::Result<qutrit_mes::Result<Protocol<f64>>> {
    if convert {
        let g = load_state(source.expect("clap requires --source"))?;
        let eps = match epsilon {
            "auto" => Epsilon::Auto,
            x => Epsilon::Fixed(x.parse().map_err(|_| anyhow!("--epsilon: expected `auto` or a number, found {x:?}"))?),
        };
        return Ok(locc_convert_step(&g, None, eps, &ctx.opts).map(|(p, _)| p));
    }
    let h = load_state(target.expect("clap requires --target"))?;
    let reach = || {
        if classify(&h.gram(), &ctx.opts).locc_reachable {
            locc_protocol_reach(&h, &ctx.opts)
        } else {
            sep_map_for_target(&h, &ctx.opts)
        }
    };
    let Some(source) = source else { return Ok(reach()) };
    let g = load_state(source)?;
    if let Ok(p) = reach() {
        if lu_equivalent(&p.initial, &g)? {
            return Ok(Ok(p));
        }
    }
    let f = qutrit_mes::sep_feasible(&SepInstance::from_states(&g, &h)?)?;
    Ok(match f.witness {
        Some(p) => sep_map_from_witness(&g, &h, &p),
        None => Err(Error::Structure(format!("no SEP map takes the source to the target (residual {:e})", f.residual))),
    })
}

fn cmd_synth(ctx: &Ctx, target: Option<&Path>, source: Option<&Path>, convert: bool, epsilon: &str, out: Option<&Path>) -> anyhow::Result<Status> {
    match synthesize(ctx, target, source, convert, epsilon)? {
        Ok(p) => {
            write_or_print(out, &ProtocolFile::from_protocol(&p).to_json())?;
            Ok(Status::Ok)
        }
        Err(e) if negative(&e) => {
            ctx.emit(&json!({"synthesized": false, "reason": e.to_string()}));
            Ok(Status::Negative)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_verify(ctx: &Ctx, file: &Path) -> anyhow::Result<Status> {
    let (_, p) = ProtocolFile::parse(&read(file)?).with_context(|| format!("{}", file.display()))?;
    let povm = validate_povm(&p.stages);
    let rep = simulate(&p);
    let mut v = report::branches(&povm, &rep);
    v["construction"] = json!(p.construction.name());
    let passed = povm.passed && rep.deterministic();
    ctx.emit(&v);
    Ok(if passed { Status::Ok } else { Status::Negative })
}

fn cmd_audit(ctx: &Ctx, file: &Path) -> anyhow::Result<Status> {
    let seed = load_seed(file)?;
    let r = symmetry_audit(&seed)?;
    let mut v = report::audit(&r);
    let mut passed = r.passed;
    if ctx.oracle {
        let s = numeric_symmetry_search(&seed, &SymmetryBudget { rng_seed: ctx.rng_seed, ..SymmetryBudget::default() });
        passed &= s.matches_pauli_group;
        v["numeric_search"] = report::symmetry_search(&s);
    }
    ctx.emit(&v);
    Ok(if passed { Status::Ok } else { Status::Negative })
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    if let Some(t) = cli.tolerance {
        if !(t.is_finite() && t > 0.0) {
            bail!("--tolerance must be a positive number, found {t}");
        }
        set_tolerance(t);
    }
    let ctx = Ctx {
        opts: ClassifyOptions { tolerance: cli.tolerance, cyclic_only: cli.cyclic_perms_only },
        rng_seed: cli.rng_seed,
        oracle: cli.oracle,
        json: cli.json,
    };
    match &cli.command {
        Command::Generate { kind, count, seed_from, out } => cmd_generate(&ctx, *kind, *count, seed_from.as_deref(), out.as_deref()),
        Command::CheckGeneric { file, delta } => cmd_check_generic(&ctx, file, *delta),
        Command::StandardForm { file } => cmd_standard_form(&ctx, file),
        Command::LuEquiv { a, b } => cmd_lu_equiv(&ctx, a, b),
        Command::SepDecide { from, to } => cmd_sep_decide(&ctx, from, to),
        Command::Classify { files } => cmd_classify(&ctx, files),
        Command::SynthProtocol { target, source, convert, epsilon, out } => {
            cmd_synth(&ctx, target.as_deref(), source.as_deref(), *convert, epsilon, out.as_deref())
        }
        Command::VerifyProtocol { file } => cmd_verify(&ctx, file),
        Command::SymmetryAudit { file } => cmd_audit(&ctx, file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors; 2 is reserved for negative answers
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
