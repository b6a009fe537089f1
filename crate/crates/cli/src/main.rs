use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufReader};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use paw_core::constrain::{constrain, horizontal_check, static_alphabet, Interface};
use paw_core::equiv::{self, Relation};
use paw_core::kernel::{
    ActPattern, ActionSet, Bounds, CommTable, FlatSpec, Lts, ProcessDef, ProcessExpr, Semantics,
};
use paw_core::levels;
use paw_core::refine::{apply_mapping, emit_module, vertical_check, Mapping};
use paw_core::scriptgen::{script_for, ToolTable};
use paw_core::sim::{serve_stdio, serve_websocket, Simulator};
use paw_core::syntax::{flatten_roots, parse_spec, print_process_module, root_modules, ModuleSet};

#[derive(Parser)]
#[command(
    name = "paw",
    version,
    about = "Process-algebra workbench: specifications, LTSs, refinement, constraining, scripts"
)]
struct Cli {
    /// Extra specification files loaded with every command.
    #[arg(short = 'I', long = "include", global = true, value_name = "FILE")]
    include: Vec<PathBuf>,
    /// Root module to flatten (default: the modules nothing imports).
    #[arg(long, global = true)]
    root: Option<String>,
    /// State budget for LTS construction.
    #[arg(long, global = true, env = "PAW_MAX_STATES", default_value_t = 100_000)]
    max_states: usize,
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Log progress to standard error.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse, flatten and validate a specification.
    Check {
        files: Vec<PathBuf>,
        /// Also check that these components only use their level's primitives.
        #[arg(long)]
        level: Option<String>,
        #[arg(long, value_delimiter = ',')]
        components: Vec<String>,
    },
    /// Build and print the transition system of a process.
    Lts {
        files: Vec<PathBuf>,
        #[arg(long)]
        entry: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate the environment of a level around some components.
    GenEnv {
        files: Vec<PathBuf>,
        /// `arch`, `toolbus`, or a `.lvl` file.
        #[arg(long)]
        level: String,
        #[arg(long, value_delimiter = ',', required = true)]
        components: Vec<String>,
        #[arg(long, default_value = "Application")]
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply a mapping to components and print the refined module.
    Refine {
        files: Vec<PathBuf>,
        #[arg(long)]
        map: PathBuf,
        /// Processes to refine (default: those the mapping renames).
        #[arg(long, value_delimiter = ',')]
        process: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check that a concrete process vertically implements an abstract one.
    VerifyVertical {
        /// Abstract process, as `NAME`, `FILE` or `FILE:NAME`.
        abs: String,
        /// Concrete process, same forms.
        conc: String,
        #[arg(long)]
        map: PathBuf,
    },
    /// Superimpose a constraint on a process and print the result.
    Constrain {
        files: Vec<PathBuf>,
        /// File with the constraint process and its communications.
        #[arg(long = "with")]
        with: Option<PathBuf>,
        #[arg(long)]
        process: String,
        #[arg(long)]
        constraint: String,
        /// Name of the constrained process (default `<process>Constrained`).
        #[arg(long)]
        name: Option<String>,
        /// Name of the emitted module (default `<name>Module`).
        #[arg(long)]
        module: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check that an implementation horizontally implements a specification.
    VerifyHorizontal {
        spec: String,
        implementation: String,
        /// Actions hidden in the implementation.
        #[arg(long, value_delimiter = ',')]
        hide: Vec<String>,
        /// The constraint used to build the implementation; its local
        /// actions are hidden.
        #[arg(long)]
        constraint: Option<String>,
        #[arg(long, default_value = "trace")]
        relation: String,
    },
    /// Generate a ToolBus script.
    GenScript {
        files: Vec<PathBuf>,
        #[arg(long)]
        tools: PathBuf,
        /// Processes in `toolbus(...)` order (default: exported processes of the root modules).
        #[arg(long, value_delimiter = ',')]
        process: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate a specification.
    Sim {
        files: Vec<PathBuf>,
        #[arg(long)]
        entry: Option<String>,
        /// Serve the animation protocol over WebSocket.
        #[arg(long, conflicts_with = "auto")]
        serve: bool,
        #[arg(long, default_value_t = 8765)]
        port: u16,
        /// Stop serving after this many sessions.
        #[arg(long)]
        sessions: Option<usize>,
        /// Take this many random steps and print the trace.
        #[arg(long)]
        auto: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare two transition systems (LTS files, or specifications).
    Equiv {
        l1: PathBuf,
        l2: PathBuf,
        #[arg(long, default_value = "rooted-weak")]
        relation: String,
    },
}

/// A failed command: exit code 1 for validation failures and negative
/// verdicts, 2 for usage and I/O errors.
struct Failure {
    code: u8,
    message: String,
}

fn invalid(e: impl ToString) -> Failure {
    Failure {
        code: 1,
        message: e.to_string(),
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_out(output: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Ctx {
    include: Vec<PathBuf>,
    root: Option<String>,
    bounds: Bounds,
    json: bool,
}

impl Ctx {
    fn modules(&self, files: &[PathBuf]) -> Result<ModuleSet, Failure> {
        let mut ms = ModuleSet::default();
        let mut seen: Vec<PathBuf> = Vec::new();
        for f in self.include.iter().chain(files) {
            let canon = f.canonicalize().unwrap_or_else(|_| f.clone());
            if seen.contains(&canon) {
                continue;
            }
            seen.push(canon);
            let text = read(f)?;
            ms.extend(parse_spec(&text).map_err(|e| invalid(format!("{}:{e}", f.display())))?);
        }
        if ms.modules.is_empty() {
            return Err(usage("no specification files given"));
        }
        Ok(ms)
    }

    fn spec(&self, files: &[PathBuf]) -> Result<(ModuleSet, FlatSpec), Failure> {
        let ms = self.modules(files)?;
        let fs = flatten_roots(&ms, self.root.as_deref()).map_err(invalid)?;
        Ok((ms, fs))
    }

    fn report<T: serde::Serialize>(&self, value: &T, text: &str) {
        if self.json {
            println!(
                "{}",
                serde_json::to_string_pretty(value).expect("reports serialize")
            );
        } else {
            print!("{text}");
        }
    }
}

/// `NAME`, `FILE` or `FILE:NAME`.
fn split_target(s: &str) -> (Option<PathBuf>, Option<String>) {
    if let Some((f, n)) = s.rsplit_once(':') {
        if Path::new(f).exists() {
            return (Some(PathBuf::from(f)), Some(n.to_string()));
        }
    }
    if Path::new(s).is_file() {
        (Some(PathBuf::from(s)), None)
    } else {
        (None, Some(s.to_string()))
    }
}

fn entry_of(fs: &FlatSpec, name: Option<String>, what: &str) -> Result<ProcessExpr, Failure> {
    let name = name
        .or_else(|| fs.entry.clone())
        .ok_or_else(|| usage(format!("no {what} process given and no entry found")))?;
    if fs.def(&name).is_none() {
        return Err(invalid(format!("unknown process {name}")));
    }
    Ok(ProcessExpr::call(name))
}

fn relation(s: &str) -> Result<Relation, Failure> {
    Relation::parse(s).ok_or_else(|| {
        usage(format!(
            "unknown relation `{s}` (strong, weak, rooted-weak, trace)"
        ))
    })
}

fn load_lts(ctx: &Ctx, path: &Path) -> Result<Lts, Failure> {
    let text = read(path)?;
    if text.trim_start().starts_with("states") {
        return Lts::parse(&text).map_err(invalid);
    }
    let ms = parse_spec(&text).map_err(|e| invalid(format!("{}:{e}", path.display())))?;
    let fs = flatten_roots(&ms, ctx.root.as_deref()).map_err(invalid)?;
    let e = entry_of(&fs, None, "entry")?;
    Semantics::new(&fs, ctx.bounds)
        .build_lts(&e)
        .map_err(invalid)
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx {
        include: cli.include,
        root: cli.root,
        bounds: Bounds {
            max_states: cli.max_states,
            ..Bounds::default()
        },
        json: cli.json,
    };
    match cli.cmd {
        Cmd::Check {
            files,
            level,
            components,
        } => {
            let (ms, fs) = ctx.spec(&files)?;
            if let Some(l) = level {
                let def = load_level(&l)?;
                levels::gen_env(&def, &ms, &components, "Check").map_err(invalid)?;
            }
            println!(
                "ok: {} module(s), {} process(es), {} action(s){}",
                ms.modules.len(),
                fs.process_defs.len(),
                fs.atoms.len(),
                fs.entry
                    .as_ref()
                    .map(|e| format!(", entry {e}"))
                    .unwrap_or_default()
            );
            Ok(true)
        }
        Cmd::Lts {
            files,
            entry,
            output,
        } => {
            let (_, fs) = ctx.spec(&files)?;
            let e = entry_of(&fs, entry, "entry")?;
            let started = Instant::now();
            let lts = Semantics::new(&fs, ctx.bounds)
                .build_lts(&e)
                .map_err(invalid)?;
            log::info!(
                "{} states, {} transitions in {:?}",
                lts.num_states(),
                lts.transitions.len(),
                started.elapsed()
            );
            write_out(&output, &lts.serialize())?;
            Ok(true)
        }
        Cmd::GenEnv {
            files,
            level,
            components,
            name,
            output,
        } => {
            let ms = ctx.modules(&files)?;
            let def = load_level(&level)?;
            let env = levels::gen_env(&def, &ms, &components, &name).map_err(invalid)?;
            write_out(&output, &env.source)?;
            Ok(true)
        }
        Cmd::Refine {
            files,
            map,
            process,
            output,
        } => {
            let (_, fs) = ctx.spec(&files)?;
            let m = Mapping::parse(&read(&map)?)
                .map_err(|e| invalid(format!("{}: {e}", map.display())))?;
            let names: Vec<String> = if process.is_empty() {
                m.process_renames.keys().cloned().collect()
            } else {
                process
            };
            if names.is_empty() {
                return Err(usage("nothing to refine: name processes with --process or in the mapping's process section"));
            }
            let defs = names
                .iter()
                .map(|n| {
                    fs.def(n)
                        .cloned()
                        .ok_or_else(|| invalid(format!("unknown process {n}")))
                })
                .collect::<Result<Vec<ProcessDef>, _>>()?;
            let started = Instant::now();
            let applied = apply_mapping(&defs, &m).map_err(invalid)?;
            for w in &applied.warnings {
                log::warn!("{w}");
                eprintln!("warning: {w}");
            }
            log::info!(
                "refined {} process(es) in {:?}",
                defs.len(),
                started.elapsed()
            );
            write_out(&output, &emit_module(&applied, &m))?;
            Ok(true)
        }
        Cmd::VerifyVertical { abs, conc, map } => {
            let (af, an) = split_target(&abs);
            let (cf, cn) = split_target(&conc);
            let files: Vec<PathBuf> = af.into_iter().chain(cf).collect();
            let (_, fs) = ctx.spec(&files)?;
            let a = entry_of(&fs, an, "abstract")?;
            let c = entry_of(&fs, cn, "concrete")?;
            let m = Mapping::parse(&read(&map)?)
                .map_err(|e| invalid(format!("{}: {e}", map.display())))?;
            let r = vertical_check(&fs, &a, &c, &m, ctx.bounds).map_err(invalid)?;
            let mut text = r.to_string();
            if !ctx.json {
                text.push_str("abstract view:\n");
                text.push_str(&indent(&r.abstract_view.serialize()));
                text.push_str("concrete view:\n");
                text.push_str(&indent(&r.concrete_view.serialize()));
            }
            let value = serde_json::json!({
                "related": r.related,
                "hidden": r.hidden,
                "ordering": r.ordering,
                "abstractTau": r.abstract_view.tau_count(),
                "concreteTau": r.concrete_view.tau_count(),
                "warnings": r.warnings,
            });
            ctx.report(&value, &text);
            Ok(r.related)
        }
        Cmd::Constrain {
            files,
            with,
            process,
            constraint,
            name,
            module,
            output,
        } => {
            let mut all = files.clone();
            all.extend(with.clone());
            let (ms, fs) = ctx.spec(&all)?;
            let p = entry_of(&fs, Some(process.clone()), "process")?;
            let c = entry_of(&fs, Some(constraint), "constraint")?;
            let k = constrain(&fs, &p, &c, &CommTable::default()).map_err(invalid)?;
            for w in &k.warnings {
                eprintln!("warning: {w}");
            }
            let name = name.unwrap_or_else(|| format!("{process}Constrained"));
            let module = module.unwrap_or_else(|| format!("{name}Module"));
            let text = print_process_module(
                &module,
                &root_modules(&ms),
                &[ProcessDef::new(name, k.expr)],
            );
            write_out(&output, &text)?;
            Ok(true)
        }
        Cmd::VerifyHorizontal {
            spec,
            implementation,
            hide,
            constraint,
            relation: rel,
        } => {
            let (sf, sn) = split_target(&spec);
            let (imf, imn) = split_target(&implementation);
            let files: Vec<PathBuf> = sf.into_iter().chain(imf).collect();
            let (_, fs) = ctx.spec(&files)?;
            let s = entry_of(&fs, sn, "specification")?;
            let i = entry_of(&fs, imn, "implementation")?;
            let spec_names = static_alphabet(&fs, &s).map_err(invalid)?;
            let interface = match constraint {
                Some(cn) => {
                    let c = entry_of(&fs, Some(cn), "constraint")?;
                    let k = constrain(&fs, &s, &c, &CommTable::default()).map_err(invalid)?;
                    let cnames = static_alphabet(&fs, &c).map_err(invalid)?;
                    Interface::for_constrained(&k, &spec_names, &cnames)
                }
                None => Interface::derive(&fs.comms.entries, &spec_names),
            };
            let hidden = ActionSet::new(hide.iter().map(|h| ActPattern::any(h.trim())));
            let r = horizontal_check(
                &fs,
                &s,
                &i,
                &interface,
                &hidden,
                relation(&rel)?,
                ctx.bounds,
            )
            .map_err(invalid)?;
            let value = serde_json::json!({ "verdict": r.verdict, "warnings": r.warnings });
            ctx.report(&value, &r.to_string());
            Ok(r.related())
        }
        Cmd::GenScript {
            files,
            tools,
            process,
            output,
        } => {
            let (ms, fs) = ctx.spec(&files)?;
            let table = ToolTable::parse(&read(&tools)?)
                .map_err(|e| invalid(format!("{}: {e}", tools.display())))?;
            let names = if process.is_empty() {
                exported_processes(&ms, &fs)
            } else {
                process
            };
            let script = script_for(&fs, &names, &table).map_err(invalid)?;
            write_out(&output, &script)?;
            Ok(true)
        }
        Cmd::Sim {
            files,
            entry,
            serve,
            port,
            sessions,
            auto,
            seed,
        } => {
            let (_, fs) = ctx.spec(&files)?;
            let bounds = ctx.bounds;
            let make = move || Simulator::new(fs.clone(), entry.as_deref(), bounds);
            let mut sim = make().map_err(invalid)?;
            if let Some(n) = auto {
                let events = sim.run_random(n, seed).map_err(invalid)?;
                for ev in &events {
                    println!(
                        "{:>4}  {}  [{}]",
                        ev.step,
                        ev.label,
                        ev.participants.join(", ")
                    );
                }
                if sim.is_terminated() {
                    println!("terminated");
                } else if sim.is_deadlocked() {
                    println!("deadlock");
                }
                return Ok(true);
            }
            if serve {
                let listener = TcpListener::bind(("127.0.0.1", port))
                    .map_err(|e| usage(format!("port {port}: {e}")))?;
                eprintln!("serving on ws://127.0.0.1:{port}");
                serve_websocket(listener, make, sessions).map_err(usage)?;
                return Ok(true);
            }
            let stdin = io::stdin();
            serve_stdio(sim, BufReader::new(stdin.lock()), io::stdout().lock()).map_err(usage)?;
            Ok(true)
        }
        Cmd::Equiv {
            l1,
            l2,
            relation: rel,
        } => {
            let a = load_lts(&ctx, &l1)?;
            let b = load_lts(&ctx, &l2)?;
            let r = equiv::check(relation(&rel)?, &a, &b);
            ctx.report(&r, &r.to_string());
            Ok(r.related)
        }
    }
}

fn load_level(l: &str) -> Result<levels::LevelDef, Failure> {
    if levels::builtin(l).is_some() {
        return levels::resolve(l).map_err(invalid);
    }
    let text = read(Path::new(l))?;
    levels::parse_level(&text).map_err(invalid)
}

fn exported_processes(ms: &ModuleSet, fs: &FlatSpec) -> Vec<String> {
    let roots: BTreeSet<String> = root_modules(ms).into_iter().collect();
    let mut out = Vec::new();
    for m in ms.modules.iter().filter(|m| roots.contains(&m.name)) {
        for e in &m.exports {
            if fs.def(e).is_some() && !out.contains(e) {
                out.push(e.clone());
            }
        }
    }
    out
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
