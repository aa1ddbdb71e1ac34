use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use ptl_core::atoms::{
    entropy, rewrite_dep_to_entropy, rewrite_dep_to_indep, rewrite_indep_to_entropy,
};
use ptl_core::fopt::eval_fopt;
use ptl_core::instance::{instance_to_json, parse_instance, Instance};
use ptl_core::realc::{compile, emit_smtlib2, Mode, RealSystem};
use ptl_core::solver::{solve, SolveConfig, SolveResult, Status};
use ptl_core::syntax::{
    dialect_of, free_vars, needs_search, parse, star_translate, Dialect, Formula,
};
use ptl_core::teameval::{
    check_witness, eval_bounded_with, eval_exact, BoundedConfig, Witness, DEFAULT_BUDGET,
};
use ptl_core::translate::{translate_so, translate_so_over};
use ptl_core::{gen, Error};

const TRUE: u8 = 0;
const FALSE: u8 = 1;
const ERROR: u8 = 2;
const UNKNOWN: u8 = 3;

const ROUTE_HINT: &str =
    "this formula needs a witness search (split disjunction or existential quantifier); \
     rerun with --oracle D, --witness FILE or --via-compile";

#[derive(Parser)]
#[command(name = "ptl", version, about = "Probabilistic team logic workbench")]
struct Cli {
    /// Write a JSON run report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "PTL_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether the instance's team satisfies the formula.
    Check {
        instance: PathBuf,
        formula: PathBuf,
        /// Search grid witnesses with denominator D.
        #[arg(long, value_name = "D")]
        oracle: Option<u64>,
        /// Check a witness file instead of searching.
        #[arg(long, value_name = "FILE")]
        witness: Option<PathBuf>,
        /// Compile in check mode and run the numeric solver.
        #[arg(long)]
        via_compile: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Bounded witness search with grid denominator D.
    Oracle {
        instance: PathBuf,
        formula: PathBuf,
        #[arg(long, value_name = "D")]
        denom: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Write the witness found to this file.
        #[arg(long, value_name = "FILE")]
        witness_out: Option<PathBuf>,
    },
    /// Compile to a real-arithmetic system.
    Compile {
        instance: PathBuf,
        formula: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Sat)]
        mode: ModeArg,
        /// Write an SMT-LIB2 script here; the stats sidecar goes next to it.
        #[arg(long, value_name = "FILE")]
        smt2: Option<PathBuf>,
        /// Sidecar path (default: the script path with `.json` appended).
        #[arg(long, value_name = "FILE")]
        sidecar: Option<PathBuf>,
    },
    /// Compile and search for a verified numeric witness.
    Solve {
        instance: PathBuf,
        formula: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Sat)]
        mode: ModeArg,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_name = "FILE")]
        witness_out: Option<PathBuf>,
    },
    /// Translate into second-order logic over distributions.
    Translate {
        formula: PathBuf,
        /// Argument order of the team function (default: sorted free variables).
        #[arg(long)]
        vars: Option<String>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Apply an atom rewrite.
    Rewrite {
        formula: PathBuf,
        #[arg(long, value_enum)]
        rule: Rule,
    },
    /// Shannon entropy (bits) of a tuple of team variables.
    Entropy {
        instance: PathBuf,
        #[arg(long)]
        vars: String,
    },
    /// Random instances and formulas.
    Gen {
        #[arg(long, value_enum, default_value_t = Kind::Team)]
        kind: Kind,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Domain size (default: random in 1..=4).
        #[arg(long)]
        domain: Option<usize>,
        /// Number of free variables and team columns.
        #[arg(long, default_value_t = 2)]
        vars: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 12)]
        max_den: u64,
        /// Write `instance_N.json` and `formula_N.txt` here instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 300)]
    max_iters: u64,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
}

impl SolverArgs {
    fn config(&self, seed: u64) -> SolveConfig {
        SolveConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
            seed,
            ..SolveConfig::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sat,
    Check,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Dep2indep,
    Dep2entropy,
    Indep2entropy,
    Star,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Fo,
    Fopt,
    Team,
    TeamNeg,
}

struct Outcome {
    code: u8,
    report: Value,
}

fn outcome(code: u8, report: Value) -> anyhow::Result<Outcome> {
    Ok(Outcome { code, report })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    let started = Instant::now();
    let argv: Vec<String> = std::env::args().collect();
    let (code, mut report) = match run(&cli) {
        Ok(o) => (o.code, o.report),
        Err(e) => {
            eprintln!("error: {e:#}");
            (
                ERROR,
                json!({ "status": "ERROR", "error": format!("{e:#}") }),
            )
        }
    };
    if let Some(path) = &cli.report {
        report["command"] = json!(argv);
        report["seed"] = json!(cli.seed);
        report["exit_code"] = json!(code);
        report["elapsed_ms"] = json!(started.elapsed().as_millis() as u64);
        let text = serde_json::to_string_pretty(&report).expect("serializable");
        if let Err(e) = fs::write(path, text + "\n") {
            eprintln!("error: cannot write report {}: {e}", path.display());
            return ExitCode::from(ERROR);
        }
    }
    ExitCode::from(code)
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_formula(path: &Path) -> anyhow::Result<Formula> {
    parse(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    parse_instance(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn verdict(value: bool, mut report: Value) -> anyhow::Result<Outcome> {
    let word = if value { "TRUE" } else { "FALSE" };
    println!("{word}");
    report["status"] = json!(word);
    outcome(if value { TRUE } else { FALSE }, report)
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.cmd {
        Cmd::Check {
            instance,
            formula,
            oracle,
            witness,
            via_compile,
            solver,
        } => {
            let inst = load_instance(instance)?;
            let f = load_formula(formula)?;
            cmd_check(
                cli,
                &inst,
                &f,
                *oracle,
                witness.as_deref(),
                *via_compile,
                solver,
            )
        }
        Cmd::Oracle {
            instance,
            formula,
            denom,
            budget,
            witness_out,
        } => {
            let inst = load_instance(instance)?;
            let f = load_formula(formula)?;
            cmd_oracle(&inst, &f, *denom, *budget, witness_out.as_deref())
        }
        Cmd::Compile {
            instance,
            formula,
            mode,
            smt2,
            sidecar,
        } => {
            let inst = load_instance(instance)?;
            let f = load_formula(formula)?;
            cmd_compile(&inst, &f, *mode, smt2.as_deref(), sidecar.as_deref())
        }
        Cmd::Solve {
            instance,
            formula,
            mode,
            solver,
            witness_out,
        } => {
            let inst = load_instance(instance)?;
            let f = load_formula(formula)?;
            let sys = compile_for(&inst, &f, *mode)?;
            cmd_solve(&sys, &solver.config(cli.seed), witness_out.as_deref())
        }
        Cmd::Translate { formula, vars, out } => {
            let f = load_formula(formula)?;
            let t = match vars {
                Some(vs) => translate_so_over(&f, &split_vars(vs))?,
                None => translate_so(&f)?,
            };
            let text = t.formula.to_string();
            match out {
                Some(path) => write(path, &(text.clone() + "\n"))?,
                None => println!("{text}"),
            }
            outcome(
                TRUE,
                json!({ "status": "OK", "vars": t.vars, "formula": text }),
            )
        }
        Cmd::Rewrite { formula, rule } => {
            let f = load_formula(formula)?;
            let g = match rule {
                Rule::Dep2indep => rewrite_dep_to_indep(&f),
                Rule::Dep2entropy => rewrite_dep_to_entropy(&f),
                Rule::Indep2entropy => rewrite_indep_to_entropy(&f)?,
                Rule::Star => star_translate(&f)?,
            };
            println!("{g}");
            outcome(TRUE, json!({ "status": "OK", "formula": g.to_string() }))
        }
        Cmd::Entropy { instance, vars } => {
            let inst = load_instance(instance)?;
            let xs = split_vars(vars);
            let h = entropy(&inst.team, &xs)?;
            println!("{h}");
            outcome(
                TRUE,
                json!({ "status": "OK", "vars": xs, "entropy_bits": h }),
            )
        }
        Cmd::Gen {
            kind,
            count,
            domain,
            vars,
            depth,
            max_den,
            out_dir,
        } => cmd_gen(
            cli.seed,
            *kind,
            *count,
            *domain,
            *vars,
            *depth,
            *max_den,
            out_dir.as_deref(),
        ),
    }
}

fn split_vars(text: &str) -> Vec<String> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

fn cmd_check(
    cli: &Cli,
    inst: &Instance,
    f: &Formula,
    oracle: Option<u64>,
    witness: Option<&Path>,
    via_compile: bool,
    solver: &SolverArgs,
) -> anyhow::Result<Outcome> {
    let dialect = dialect_of(f)?;
    let report = json!({ "dialect": dialect.to_string() });
    if dialect == Dialect::Fopt {
        let mut report = report;
        report["route"] = json!("fopt");
        return verdict(eval_fopt(&inst.structure, &inst.team, f)?.value, report);
    }
    if !needs_search(f) {
        let mut report = report;
        report["route"] = json!("exact");
        return verdict(eval_exact(&inst.structure, &inst.team, f)?, report);
    }
    if let Some(d) = oracle {
        return cmd_oracle(inst, f, d, DEFAULT_BUDGET, None);
    }
    if let Some(path) = witness {
        let value: Value =
            serde_json::from_str(&read(path)?).with_context(|| format!("in {}", path.display()))?;
        let w = Witness::from_json(&inst.structure, &value)?;
        let mut report = report;
        report["route"] = json!("witness");
        if check_witness(&inst.structure, &inst.team, f, &w)? {
            return verdict(true, report);
        }
        println!("UNKNOWN");
        report["status"] = json!("UNKNOWN");
        report["note"] = json!("the witness does not certify the formula");
        return outcome(UNKNOWN, report);
    }
    if via_compile {
        let fv: Vec<String> = inst
            .team
            .vars()
            .iter()
            .filter(|v| free_vars(f).contains(*v))
            .cloned()
            .collect();
        let team = inst.team.restrict(&fv)?;
        let sys = compile(&inst.structure, f, Mode::Check, Some(&team))?;
        if !sys.fragment.is_existential() {
            bail!("the compiled system is in the {} fragment; export it with `ptl compile --mode check --smt2 FILE`", sys.fragment);
        }
        let res = solve(&sys, &solver.config(cli.seed))?;
        let mut report = report;
        report["route"] = json!("compile");
        report["solver"] = res.to_json();
        if res.status == Status::Sat {
            return verdict(true, report);
        }
        println!("UNKNOWN");
        report["status"] = json!("UNKNOWN");
        return outcome(UNKNOWN, report);
    }
    Err(anyhow!(ROUTE_HINT))
}

fn cmd_oracle(
    inst: &Instance,
    f: &Formula,
    denom: u64,
    budget: u64,
    witness_out: Option<&Path>,
) -> anyhow::Result<Outcome> {
    let cfg = BoundedConfig {
        budget,
        ..BoundedConfig::new(denom)
    };
    let out = eval_bounded_with(&inst.structure, &inst.team, f, &cfg)?;
    let mut report =
        json!({ "route": "oracle", "denom": denom, "nodes": out.nodes, "bounded": true });
    if let Some(w) = &out.witness {
        let value = w.to_json(&inst.structure);
        if let Some(path) = witness_out {
            write(path, &(serde_json::to_string_pretty(&value)? + "\n"))?;
            report["witness_file"] = json!(path.display().to_string());
        }
        report["witness"] = value;
    }
    verdict(out.value, report)
}

fn compile_for(inst: &Instance, f: &Formula, mode: ModeArg) -> anyhow::Result<RealSystem> {
    Ok(match mode {
        ModeArg::Sat => compile(&inst.structure, f, Mode::Sat, None)?,
        ModeArg::Check => compile(&inst.structure, f, Mode::Check, Some(&inst.team))?,
    })
}

fn cmd_compile(
    inst: &Instance,
    f: &Formula,
    mode: ModeArg,
    smt2: Option<&Path>,
    sidecar: Option<&Path>,
) -> anyhow::Result<Outcome> {
    let sys = compile_for(inst, f, mode)?;
    let side = sys.sidecar(&inst.structure);
    let mut report = json!({ "status": "OK", "fragment": sys.fragment.to_string(), "stats": side["stats"].clone() });
    match smt2 {
        Some(path) => {
            let script = emit_smtlib2(&sys)?;
            write(path, &script)?;
            let side_path = sidecar.map(Path::to_path_buf).unwrap_or_else(|| {
                let mut p = path.as_os_str().to_owned();
                p.push(".json");
                PathBuf::from(p)
            });
            write(&side_path, &(serde_json::to_string_pretty(&side)? + "\n"))?;
            report["outputs"] =
                json!([path.display().to_string(), side_path.display().to_string()]);
            println!("{}", serde_json::to_string(&side["stats"])?);
        }
        None => {
            let text = serde_json::to_string_pretty(&side)?;
            match sidecar {
                Some(path) => {
                    write(path, &(text + "\n"))?;
                    report["outputs"] = json!([path.display().to_string()]);
                    println!("{}", serde_json::to_string(&side["stats"])?);
                }
                None => println!("{text}"),
            }
        }
    }
    outcome(TRUE, report)
}

fn cmd_solve(
    sys: &RealSystem,
    cfg: &SolveConfig,
    witness_out: Option<&Path>,
) -> anyhow::Result<Outcome> {
    if !sys.fragment.is_existential() {
        bail!(
            "the compiled system is in the {} fragment, which the numeric solver does not handle; \
             export it with `ptl compile --smt2 FILE`",
            sys.fragment
        );
    }
    let res: SolveResult = solve(sys, cfg)?;
    let mut report = json!({ "fragment": sys.fragment.to_string(), "solver": res.to_json() });
    match res.status {
        Status::Sat => {
            if let Some(path) = witness_out {
                write(
                    path,
                    &(serde_json::to_string_pretty(&res.to_json())? + "\n"),
                )?;
                report["outputs"] = json!([path.display().to_string()]);
            }
            println!("SAT");
            println!("{}", serde_json::to_string(&res.to_json()["witness"])?);
            report["status"] = json!("SAT");
            outcome(TRUE, report)
        }
        Status::Unknown => {
            println!("UNKNOWN");
            report["status"] = json!("UNKNOWN");
            outcome(UNKNOWN, report)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    seed: u64,
    kind: Kind,
    count: usize,
    domain: Option<usize>,
    vars: usize,
    depth: usize,
    max_den: u64,
    out_dir: Option<&Path>,
) -> anyhow::Result<Outcome> {
    if vars > gen::VAR_POOL.len() {
        bail!("at most {} variables are supported", gen::VAR_POOL.len());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let scope = gen::scope_vars(vars);
    let mut items = Vec::new();
    for i in 0..count {
        let n = domain.unwrap_or_else(|| rng.gen_range(1..=4));
        if n == 0 {
            return Err(Error::EmptyDomain.into());
        }
        let st = gen::structure(&mut rng, n);
        let team = gen::team(&mut rng, &st, &scope, 30, max_den);
        let f = match kind {
            Kind::Fo => gen::fo_formula(&mut rng, &scope, depth),
            Kind::Fopt => gen::fopt_formula(&mut rng, &scope, depth),
            Kind::Team => gen::team_formula(&mut rng, &scope, depth, &gen::TeamShape::default()),
            Kind::TeamNeg => gen::team_formula(
                &mut rng,
                &scope,
                depth,
                &gen::TeamShape {
                    bool_neg: true,
                    ..Default::default()
                },
            ),
        };
        let inst = instance_to_json(&st, Some(&team));
        match out_dir {
            Some(dir) => {
                let ip = dir.join(format!("instance_{i}.json"));
                let fp = dir.join(format!("formula_{i}.txt"));
                write(&ip, &(serde_json::to_string_pretty(&inst)? + "\n"))?;
                write(&fp, &format!("{f}\n"))?;
                items.push(json!({ "instance": ip.display().to_string(), "formula": fp.display().to_string() }));
            }
            None => {
                let item = json!({ "instance": inst, "formula": f.to_string() });
                println!("{}", serde_json::to_string(&item)?);
                items.push(item);
            }
        }
    }
    outcome(TRUE, json!({ "status": "OK", "items": items }))
}
