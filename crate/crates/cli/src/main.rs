use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use posetnet::algebra_net::{
    build_corona, example_scenario, verify_algebra_morphism, verify_corona, verify_corona_morphism,
    verify_isotony, NetMorphism,
};
use posetnet::graded::{norm_estimate, GradedElement};
use posetnet::homotopy::{abelianization, loop_group_presentation};
use posetnet::json;
use posetnet::net::{
    verify_chi_laws, verify_cycle_laws, verify_domains, verify_representation, verify_sequence_laws,
    TruncatedNet,
};
use posetnet::paths::{check_confluence, PathSemigroup, PathSeq};
use posetnet::suite::{run_suite, SuiteOptions};
use posetnet::{InputError, Poset, Report};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "posetnet", version, about = "Path semigroups, loop groups and nets of local algebras over finite posets")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Emit the run report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Print nothing; the exit code still reports the outcome.
    #[arg(long, global = true, conflicts_with = "json")]
    quiet: bool,
    /// Tolerance for floating point norm comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Node budget for bounded equivalence searches.
    #[arg(long, global = true, default_value_t = 20_000)]
    budget: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a poset: order, connectivity, directed blocks.
    Poset {
        #[arg(long)]
        poset: String,
    },
    /// Path rewriting and equivalence.
    Paths {
        #[command(subcommand)]
        op: PathsOp,
    },
    /// Loop group presentations and abelian invariants.
    Pi1 {
        #[command(subcommand)]
        op: Pi1Op,
    },
    /// Truncated nets of Hilbert spaces.
    Net {
        #[command(subcommand)]
        op: NetOp,
    },
    /// Graded local algebra elements.
    Algebra {
        #[command(subcommand)]
        op: AlgebraOp,
    },
    /// The corona over maximal directed blocks.
    Corona {
        #[command(subcommand)]
        op: CoronaOp,
    },
    /// Morphisms of nets.
    Morphism {
        #[command(subcommand)]
        op: MorphismOp,
    },
    /// The crown-into-cone example.
    Example {
        #[command(subcommand)]
        op: ExampleOp,
    },
    /// The full verification battery over the bundled fixtures.
    Suite,
}

#[derive(Subcommand)]
enum PathsOp {
    /// Canonical representative of a path.
    Reduce {
        #[arg(long)]
        poset: String,
        #[arg(long)]
        path: String,
    },
    /// Decide whether two paths are equivalent.
    Equiv {
        #[arg(long)]
        poset: String,
        /// Two paths: `--path P --path Q` or `--path P Q`.
        #[arg(long, num_args = 1..=2, required = true)]
        path: Vec<String>,
    },
    /// Critical-pair analysis of the rewrite rules.
    Confluence {
        #[arg(long)]
        poset: String,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
}

#[derive(Subcommand)]
enum Pi1Op {
    Present {
        #[arg(long)]
        poset: String,
        #[arg(long)]
        base: Option<String>,
    },
    Abelianize {
        #[arg(long)]
        poset: String,
        #[arg(long)]
        base: Option<String>,
    },
}

#[derive(Subcommand)]
enum NetOp {
    /// Path operator, cycle and isotony laws.
    Verify {
        #[arg(long)]
        net: String,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
}

#[derive(Subcommand)]
enum AlgebraOp {
    Mul {
        #[arg(long)]
        net: String,
        /// Two elements: `--element X --element Y` or `--element X Y`.
        #[arg(long, num_args = 1..=2, required = true)]
        element: Vec<String>,
    },
    Adj {
        #[arg(long)]
        net: String,
        #[arg(long)]
        element: String,
    },
    Expect {
        #[arg(long)]
        net: String,
        #[arg(long)]
        element: String,
    },
}

#[derive(Subcommand)]
enum CoronaOp {
    Build {
        #[arg(long)]
        net: String,
    },
}

#[derive(Subcommand)]
enum MorphismOp {
    Verify {
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
        #[arg(long)]
        map: String,
    },
}

#[derive(Subcommand)]
enum ExampleOp {
    Run,
}

#[derive(Serialize)]
struct InputDigest {
    name: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    inputs: Vec<InputDigest>,
    result: Value,
    assertions: Report,
    elapsed_ms: u128,
}

/// Collects inputs with their digests while a command runs.
#[derive(Default)]
struct Inputs(Vec<InputDigest>);

impl Inputs {
    fn text(&mut self, name: &str) -> Result<String, InputError> {
        let text = json::resolve(name, None)?;
        self.0.push(InputDigest {
            name: name.to_string(),
            sha256: hex::encode(Sha256::digest(text.as_bytes())),
        });
        Ok(text)
    }

    fn poset(&mut self, name: &str) -> Result<Poset, InputError> {
        json::parse_poset(&self.text(name)?)
    }

    fn net(&mut self, name: &str) -> Result<TruncatedNet, InputError> {
        let text = self.text(name)?;
        json::parse_net(&text, Path::new(name).parent().filter(|p| p.is_dir()))
    }

    fn element(&mut self, name: &str, net: &TruncatedNet) -> Result<GradedElement, InputError> {
        json::parse_element(&self.text(name)?, net)
    }

    fn morphism(&mut self, name: &str, src: &TruncatedNet, dst: &TruncatedNet) -> Result<NetMorphism, InputError> {
        json::parse_morphism(&self.text(name)?, src, dst)
    }
}

/// Failures that are about the inputs rather than the mathematics.
struct InputFailure(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for InputFailure {
    fn from(e: E) -> Self {
        InputFailure(e.into())
    }
}

type Outcome = Result<(Value, Report), InputFailure>;

fn base_of(p: &Poset, base: &Option<String>) -> Result<posetnet::Elem, InputFailure> {
    Ok(match base {
        Some(b) => p.elem(b)?,
        None => p.elements().next().context("empty poset")?,
    })
}

fn element_json(net: &TruncatedNet, x: &GradedElement, tol: f64) -> Value {
    let parts: serde_json::Map<String, Value> = x
        .parts
        .iter()
        .map(|(p, m)| (p.display(net.poset()), json!(m.to_string())))
        .collect();
    json!({
        "base": net.poset().label(x.base),
        "parts": parts,
        "norm": norm_estimate(net, x, tol).ok(),
        "text": x.display(net),
    })
}

fn run(cmd: &Command, common: Common, inputs: &mut Inputs) -> Outcome {
    let mut report = Report::new();
    let result = match cmd {
        Command::Poset { poset } => {
            let p = inputs.poset(poset)?;
            let d = p.maximal_directed_subsets();
            json!({
                "elements": p.labels(),
                "relations": p.to_spec().leq,
                "path_connected": p.is_path_connected(),
                "upward_directed": p.is_directed(),
                "maximal_elements": p.maximal_elements().iter().map(|&e| p.label(e)).collect::<Vec<_>>(),
                "directed_blocks": d.labelled(&p),
            })
        }
        Command::Paths { op } => match op {
            PathsOp::Reduce { poset, path } => {
                let p = inputs.poset(poset)?;
                let sg = PathSemigroup::new(p.clone());
                let q = PathSeq::parse(&p, path)?;
                let c = sg.canonical(&q);
                json!({
                    "input": q.display(&p),
                    "canonical": c.display(&p),
                    "certified": sg.is_certified(),
                    "decided": sg.decides_classes(),
                })
            }
            PathsOp::Equiv { poset, path } => {
                let p = inputs.poset(poset)?;
                let sg = PathSemigroup::new(p.clone());
                let x = PathSeq::parse(&p, &path[0])?;
                let y = PathSeq::parse(&p, &path[1])?;
                let eq = sg.equivalent(&x, &y, common.budget);
                json!({ "answer": format!("{eq:?}").to_lowercase() })
            }
            PathsOp::Confluence { poset, max_len } => {
                let p = inputs.poset(poset)?;
                let c = check_confluence(&p, *max_len);
                let unjoinable: Vec<Value> = c
                    .critical_pairs
                    .iter()
                    .filter(|cp| !cp.joinable)
                    .map(|cp| {
                        json!({
                            "peak": cp.peak.display(&p),
                            "left": cp.left.display(&p),
                            "right": cp.right.display(&p),
                        })
                    })
                    .collect();
                json!({
                    "terminating": c.terminating,
                    "certified": c.certified,
                    "critical_pairs": c.critical_pairs.len(),
                    "unjoinable": unjoinable,
                })
            }
        },
        Command::Pi1 { op } => match op {
            Pi1Op::Present { poset, base } => {
                let p = inputs.poset(poset)?;
                let g = loop_group_presentation(&p, base_of(&p, base)?)?;
                serde_json::to_value(g.view(&p))?
            }
            Pi1Op::Abelianize { poset, base } => {
                let p = inputs.poset(poset)?;
                let g = loop_group_presentation(&p, base_of(&p, base)?)?;
                serde_json::to_value(abelianization(&g))?
            }
        },
        Command::Net { op } => match op {
            NetOp::Verify { net, max_len } => {
                let n = inputs.net(net)?;
                report.extend("", verify_chi_laws(&n));
                report.extend("representation: ", verify_representation(&n, *max_len));
                report.extend("sequences: ", verify_sequence_laws(&n, *max_len));
                report.extend("domains: ", verify_domains(&n, *max_len));
                report.extend("cycles: ", verify_cycle_laws(&n, (*max_len).max(2), 2, common.budget));
                match verify_isotony(&n, 2) {
                    Ok(r) => report.extend("isotony: ", r),
                    Err(e) => report.fail("isotony", e.to_string()),
                }
                json!({
                    "classes": n.classes().len(),
                    "basis_vectors": n.vectors().len(),
                    "budget": n.budget(),
                })
            }
        },
        Command::Algebra { op } => match op {
            AlgebraOp::Mul { net, element } => {
                let n = inputs.net(net)?;
                let x = inputs.element(&element[0], &n)?;
                let y = inputs.element(&element[1], &n)?;
                element_json(&n, &x.mul(&n, &y)?, common.tol)
            }
            AlgebraOp::Adj { net, element } => {
                let n = inputs.net(net)?;
                let x = inputs.element(element, &n)?;
                element_json(&n, &x.adjoint(&n), common.tol)
            }
            AlgebraOp::Expect { net, element } => {
                let n = inputs.net(net)?;
                let x = inputs.element(element, &n)?;
                let phi = x.expectation();
                let (nx, nphi) = (norm_estimate(&n, &x, common.tol)?, norm_estimate(&n, &phi, common.tol)?);
                report.check("expectation does not increase the norm", nphi <= nx + common.tol, || {
                    format!("{nphi} > {nx}")
                });
                report.check("expectation is idempotent", phi.expectation() == phi, || phi.display(&n));
                element_json(&n, &phi, common.tol)
            }
        },
        Command::Corona { op } => match op {
            CoronaOp::Build { net } => {
                let n = inputs.net(net)?;
                let c = build_corona(&n);
                report.extend("", verify_corona(&n, &c, 1)?);
                serde_json::to_value(c.view(n.poset()))?
            }
        },
        Command::Morphism { op } => match op {
            MorphismOp::Verify { src, dst, map } => {
                let k = inputs.net(src)?;
                let l = inputs.net(dst)?;
                let m = inputs.morphism(map, &k, &l)?;
                let valid = posetnet::algebra_net::validate_hilbert_morphism(&k, &l, &m);
                let ok = valid.all_passed();
                report.extend("", valid);
                let mut out = json!({});
                if ok {
                    let (r, info) = verify_algebra_morphism(&k, &l, &m, 2, common.budget)?;
                    report.extend("algebra: ", r);
                    let (cr, cm) = verify_corona_morphism(&k, &l, &m, 1)?;
                    report.extend("corona: ", cr);
                    out = json!({ "algebra": info, "corona": cm });
                }
                out
            }
        },
        Command::Example { op: ExampleOp::Run } => {
            let (r, s) = example_scenario();
            report.extend("", r);
            serde_json::to_value(s)?
        }
        Command::Suite => {
            let opts = SuiteOptions {
                tol: common.tol,
                budget: common.budget,
                ..SuiteOptions::default()
            };
            let results = run_suite(&opts);
            let mut summary = Vec::new();
            for c in results {
                summary.push(json!({ "criterion": c.criterion, "passed": c.passed }));
                report.extend(&format!("{}: ", c.criterion), c.report);
            }
            Value::Array(summary)
        }
    };
    Ok((result, report))
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Poset { .. } => "poset",
        Command::Paths { op: PathsOp::Reduce { .. } } => "paths reduce",
        Command::Paths { op: PathsOp::Equiv { .. } } => "paths equiv",
        Command::Paths { op: PathsOp::Confluence { .. } } => "paths confluence",
        Command::Pi1 { op: Pi1Op::Present { .. } } => "pi1 present",
        Command::Pi1 { op: Pi1Op::Abelianize { .. } } => "pi1 abelianize",
        Command::Net { .. } => "net verify",
        Command::Algebra { op: AlgebraOp::Mul { .. } } => "algebra mul",
        Command::Algebra { op: AlgebraOp::Adj { .. } } => "algebra adj",
        Command::Algebra { op: AlgebraOp::Expect { .. } } => "algebra expect",
        Command::Corona { .. } => "corona build",
        Command::Morphism { .. } => "morphism verify",
        Command::Example { .. } => "example run",
        Command::Suite => "suite",
    }
}

fn print_human(run: &RunReport) {
    println!("{}", run.command);
    match &run.result {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::String(s) => println!("  {k}: {s}"),
                    other => println!("  {k}: {other}"),
                }
            }
        }
        Value::Null => {}
        other => println!("  {other}"),
    }
    if !run.assertions.checks.is_empty() {
        print!("{}", run.assertions);
        let failed = run.assertions.failures().count();
        println!(
            "{} checks, {} failed, {} skipped",
            run.assertions.checks.len(),
            failed,
            run.assertions.count(posetnet::Status::Skipped)
        );
    }
}

/// Arity checks clap cannot express for repeated two-valued flags.
fn check_usage(cmd: &Command) -> Result<(), String> {
    match cmd {
        Command::Paths { op: PathsOp::Equiv { path, .. } } if path.len() != 2 => {
            Err(format!("expected two paths, got {}", path.len()))
        }
        Command::Algebra { op: AlgebraOp::Mul { element, .. } } if element.len() != 2 => {
            Err(format!("expected two elements, got {}", element.len()))
        }
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = check_usage(&cli.command) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let (result, assertions) = match run(&cli.command, cli.common, &mut inputs) {
        Ok(x) => x,
        Err(InputFailure(e)) => {
            if !cli.common.quiet {
                eprintln!("error: {e}");
            }
            return ExitCode::from(3);
        }
    };
    let failed = !assertions.all_passed();
    let run = RunReport {
        command: command_name(&cli.command).to_string(),
        inputs: inputs.0,
        result,
        assertions,
        elapsed_ms: start.elapsed().as_millis(),
    };
    if cli.common.json {
        println!("{}", serde_json::to_string_pretty(&run).expect("serializable report"));
    } else if !cli.common.quiet {
        print_human(&run);
    }
    if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
