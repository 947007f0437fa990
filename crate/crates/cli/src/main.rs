use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use crucible_core::bench::time_translation;
use crucible_core::eval::run::RunError;
use crucible_core::fixtures::{self, Builder};
use crucible_core::oracle::check_text;
use crucible_core::{
    aunit_file, generate_command_string, run_test, Project, ProjectStore, RunOptions, RunResult, Scope,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "crucible", version, about = "Graphical unit tests for Alloy models, run headless")]
struct Cli {
    /// Directory holding one JSON document per project.
    #[arg(long, global = true, env = "CRUCIBLE_STORE_DIR", default_value = "crucible-store")]
    store_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Create a project from a model file and print its schema.
    Import {
        file: PathBuf,
        #[arg(long)]
        name: String,
    },
    /// Print a project's schema.
    Schema { project: String },
    /// Run tests; exits 0 only if every selected test passes.
    Run {
        project: String,
        #[arg(long)]
        test: Option<String>,
        #[arg(long)]
        allow_structural_failure: bool,
    },
    /// Print a test's command string.
    Translate {
        project: String,
        test: String,
        /// Print a `val` block and `@Test` command instead.
        #[arg(long)]
        aunit_file: bool,
    },
    /// Time command-string generation.
    BenchTranslate {
        project: String,
        test: String,
        #[arg(long, default_value_t = 10)]
        iterations: usize,
    },
    /// Compare the evaluator's verdict with the brute-force oracle.
    OracleCheck {
        project: String,
        test: String,
        #[arg(long, default_value_t = 3)]
        scope: usize,
    },
    /// Generate a canvas of a given size through allowed edits and save it.
    GenCanvas {
        project: String,
        test: String,
        #[arg(long)]
        atoms: usize,
        #[arg(long)]
        connections: usize,
    },
    /// Save one of the built-in case-study canvases into a project.
    Fixture {
        project: String,
        #[arg(value_parser = ["list-two-node", "lts-nondeterministic", "lts-maximal", "cv-first", "cv-maximal"])]
        canvas: String,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long, env = "CRUCIBLE_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: std::net::IpAddr,
        /// Static UI assets served under /ui/.
        #[arg(long, env = "CRUCIBLE_UI_DIR")]
        ui_dir: Option<PathBuf>,
    },
}

enum Outcome {
    Ok,
    TestsFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output;
    match execute(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::TestsFailed) => ExitCode::from(1),
        Err(e) => {
            if output == Output::Json {
                eprintln!("{}", json!({ "error": { "code": "engineError", "message": format!("{e:#}") } }));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(3)
        }
    }
}

fn print_json(value: &serde_json::Value) {
    // a closed pipe (e.g. `| head`) is not an error worth a panic
    let _ = writeln!(std::io::stdout(), "{value:#}");
}

fn print_schema(project: &Project, output: Output) {
    if output == Output::Json {
        print_json(&json!({ "id": project.id, "name": project.name, "schema": project.schema }));
        return;
    }
    println!("project {} ({})", project.name, project.id);
    for sig in &project.schema.sigs {
        let fields: Vec<String> = project
            .schema
            .fields
            .iter()
            .filter(|f| f.owner == sig.name)
            .map(|f| format!("{}/{}", f.name, f.arity()))
            .collect();
        println!("  sig {} [{}]", sig.name, fields.join(", "));
    }
    for pred in &project.schema.preds {
        let params: Vec<String> = pred.params.iter().map(|p| format!("{}: {}", p.name, p.sig)).collect();
        println!("  pred {}[{}]", pred.name, params.join(", "));
    }
}

fn print_result(result: &RunResult) {
    let verdict = if result.passed() { "PASS" } else { "FAIL" };
    println!("{verdict} {} ({:.3} ms)", result.test, result.elapsed_ms);
    for d in result.failures() {
        println!("  {}: {}", d.subject, d.detail);
    }
}

fn fixture(name: &str) -> Builder {
    match name {
        "list-two-node" => fixtures::list_two_node,
        "lts-nondeterministic" => fixtures::lts_nondeterministic,
        "lts-maximal" => fixtures::lts_maximal,
        "cv-first" => fixtures::cv_first,
        _ => fixtures::cv_maximal,
    }
}

fn execute(cli: Cli) -> anyhow::Result<Outcome> {
    let output = cli.output;
    if let Command::Serve { port, bind, ui_dir } = cli.command {
        tracing_subscriber::fmt()
            .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
            .init();
        let config = crucible_server::Config {
            bind: (bind, port).into(),
            store_dir: cli.store_dir,
            ui_dir,
        };
        let rt = tokio::runtime::Runtime::new()?;
        rt.block_on(crucible_server::serve(config)).map_err(|e| anyhow!(e))?;
        return Ok(Outcome::Ok);
    }
    let store = ProjectStore::open(&cli.store_dir).with_context(|| format!("store {}", cli.store_dir.display()))?;
    match cli.command {
        Command::Import { file, name } => {
            let source = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let project = store.create_project(&name, &source)?;
            print_schema(&project, output);
        }
        Command::Schema { project } => print_schema(&store.load_project(&project)?, output),
        Command::Run {
            project,
            test,
            allow_structural_failure,
        } => {
            let project = store.load_project(&project)?;
            let names: Vec<&String> = match &test {
                Some(t) => vec![project.tests.get_key_value(t).ok_or_else(|| anyhow!("no test `{t}`"))?.0],
                None => project.tests.keys().collect(),
            };
            let options = RunOptions { allow_structural_failure };
            let mut all_pass = true;
            let mut reports = Vec::new();
            for name in names {
                match run_test(&project.schema, &project.tests[name], options) {
                    Ok(result) => {
                        all_pass &= result.passed();
                        if output == Output::Text {
                            print_result(&result);
                        }
                        reports.push(json!(result));
                    }
                    Err(RunError::StructuralBlock { test, report }) => {
                        all_pass = false;
                        if output == Output::Text {
                            println!("BLOCKED {test}");
                            for v in &report.violations {
                                println!("  {} {}: {}", v.kind.as_str(), v.subject, v.detail);
                            }
                        }
                        reports.push(json!({ "test": test, "status": "blocked", "preRun": report }));
                    }
                }
            }
            if output == Output::Json {
                print_json(&json!(reports));
            }
            if !all_pass {
                return Ok(Outcome::TestsFailed);
            }
        }
        Command::Translate {
            project,
            test,
            aunit_file: wrap,
        } => {
            let project = store.load_project(&project)?;
            let t = project.test(&test)?;
            let cmd = generate_command_string(t, &project.schema);
            match (output, wrap) {
                (Output::Json, false) => print_json(&json!(cmd)),
                (Output::Json, true) => print_json(&json!({ "aunitFile": aunit_file(t, &project.schema) })),
                (Output::Text, false) => println!("{}", cmd.text),
                (Output::Text, true) => print!("{}", aunit_file(t, &project.schema)),
            }
        }
        Command::BenchTranslate {
            project,
            test,
            iterations,
        } => {
            if iterations == 0 {
                bail!("--iterations must be at least 1");
            }
            let project = store.load_project(&project)?;
            let timing = time_translation(project.test(&test)?, &project.schema, iterations);
            if output == Output::Json {
                print_json(&json!(timing));
            } else {
                println!(
                    "{} atoms, {} connections: mean {:.3} ms over {} runs (max {:.3} ms)",
                    timing.atoms, timing.connections, timing.mean_ms, timing.iterations, timing.max_ms
                );
            }
        }
        Command::OracleCheck { project, test, scope } => {
            let project = store.load_project(&project)?;
            let t = project.test(&test)?;
            let options = RunOptions {
                allow_structural_failure: true,
            };
            let passed = run_test(&project.schema, t, options)?.passed();
            let text = generate_command_string(t, &project.schema).text;
            let outcome = check_text(&project.schema, &text, &Scope::uniform(scope)).map_err(|e| anyhow!(e))?;
            let agree = passed == outcome.sat;
            if output == Output::Json {
                print_json(&json!({ "evaluatorPassed": passed, "oracleSat": outcome.sat, "agree": agree }));
            } else {
                println!("evaluator: {}", if passed { "pass" } else { "fail" });
                println!("oracle:    {}", if outcome.sat { "sat" } else { "unsat" });
                println!("{}", if agree { "agree" } else { "DISAGREE" });
            }
            if !agree {
                return Ok(Outcome::TestsFailed);
            }
        }
        Command::GenCanvas {
            project,
            test,
            atoms,
            connections,
        } => {
            let ((), p) = store.update(&project, |p| {
                let mut t = fixtures::generate_canvas(&p.schema, &test, atoms, connections)
                    .map_err(|e| crucible_core::StoreError::CorruptProject { version: None, detail: e })?;
                t.name = test.clone();
                p.tests.insert(test.clone(), t);
                Ok(())
            })?;
            let t = p.test(&test)?;
            println!("saved `{test}`: {} atoms, {} connections", t.atoms.len(), t.connections.len());
        }
        Command::Fixture { project, canvas } => {
            let build = fixture(&canvas);
            let ((), p) = store.update(&project, |p| {
                let t = build(&p.schema);
                p.tests.insert(t.name.clone(), t);
                Ok(())
            })?;
            let name = build(&p.schema).name;
            println!("saved `{name}`");
        }
        Command::Serve { .. } => unreachable!(),
    }
    Ok(Outcome::Ok)
}
