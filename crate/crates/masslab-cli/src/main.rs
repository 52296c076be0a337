use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use masslab::checks::{self, SuiteConfig, DEFAULT_SEED};
use masslab::disjunction::tie;
use masslab::dsl::{self, Class, Expr};
use masslab::export;
use masslab::fixtures::{fixture_machine, Registry};
use masslab::kernel::{default_budget, library, Nat};
use masslab::learners::{
    echo_tape, simulate, verify_class, Alternating, Constant, Horizon, Kind, SharedLearner, Witness,
};
use masslab::trees::{frontier, homogeneous, Alphabet, ClosedClass};
use masslab::witnesses::{
    dnr_square_machine, dnr_square_reduction, force_mind_changes, homog_collapse_learner, homog_fixture_machine,
    hyper_fixture_psi, hyperconcat_learner, noncup_extract, priority_hat, timekeeper_build, ForceSpec, HyperConfig,
    Transcript,
};
use masslab::word::{Sym, Word};
use masslab::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "masslab", version, about = "Build classes, run learners and check constructions")]
struct Cli {
    /// Seed for every sampled choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Extra fixture classes (JSON).
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
    /// Kernel step budget; defaults to MASSLAB_BUDGET or 10000.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Table,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and elaborate an expression.
    Build {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Members and leaves at a depth, checked against brute-force enumeration.
    Frontier {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        depth: usize,
    },
    /// Run a learner along a stream.
    Simulate {
        #[arg(long)]
        learner: String,
        #[arg(long)]
        stream: String,
        #[arg(long)]
        target: String,
    },
    /// Check a learner or program against a reduction kind on every source member at a depth.
    Verify {
        #[arg(long)]
        learner: String,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value_t = KindArg::Limit)]
        kind: KindArg,
        /// Mind-change or index bound.
        #[arg(long, default_value_t = 1)]
        b: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Play the mind-change forcing game on a tie.
    Force {
        #[arg(long)]
        learner: String,
        #[arg(long)]
        tie: String,
        #[arg(long)]
        m: usize,
        /// Copies of the learner in the team.
        #[arg(long, default_value_t = 1)]
        team: usize,
    },
    /// Run a named construction and print its transcript.
    Witness {
        #[arg(value_enum)]
        name: WitnessName,
        #[arg(long)]
        stream: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        /// Program count for homog-collapse.
        #[arg(long, default_value_t = 2)]
        b: usize,
        /// Use the interleaved-and fixture for noncup.
        #[arg(long)]
        and: bool,
    },
    /// Run acceptance suites.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Write a frontier artifact.
    Export {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        depth: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Medvedev,
    MindChanges,
    Indices,
    Limit,
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessName {
    DnrSquare,
    HomogCollapse,
    Noncup,
    HyperLearner,
    Timekeeper,
    Priority,
}

enum Failure {
    Lib(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Out = Result<String, Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Resource(_) => 3,
        Error::Hypothesis(_) => 4,
        _ => 2,
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn parse_word(text: &str) -> Result<Word, Error> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Sym>().map_err(|_| Error::Shape(format!("bad stream symbol {s:?}"))))
        .collect()
}

/// `echo`, `looping`, `const:N`, `index:N`, `alt:A,B` (two constants) or a corpus name.
fn parse_learner(spec: &str, alphabet: Alphabet) -> Result<SharedLearner, Error> {
    let bad = || Error::Shape(format!("unknown learner {spec:?}"));
    let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
    let (head, arg) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match (head, alphabet) {
        ("echo", Alphabet::Tapes(k)) => Arc::new(echo_tape(k)),
        ("looping", _) => Arc::new(Constant(library::looping().encode())),
        ("const", _) => Arc::new(Constant(library::constant(num(arg)?).encode())),
        ("index", _) => Arc::new(Constant(Nat::from(num(arg)?))),
        ("alt", _) => {
            let (a, b) = arg.split_once(',').ok_or_else(bad)?;
            Arc::new(Alternating(library::constant(num(a)?).encode(), library::constant(num(b)?).encode()))
        }
        _ => {
            let p = library::corpus().into_iter().find(|(n, _)| *n == spec).ok_or_else(bad)?.1;
            Arc::new(Constant(p.encode()))
        }
    })
}

fn closed(text: &str, reg: &Registry) -> Result<ClosedClass, Error> {
    Ok(dsl::build(text, reg)?.flat())
}

fn transcript(t: &Transcript) -> String {
    t.json_lines()
}

fn run(cli: &Cli) -> Out {
    let mut reg = Registry::standard();
    if let Some(path) = &cli.fixtures {
        reg.load_file(path)?;
    }
    let budget = cli.budget.unwrap_or_else(default_budget);
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    match &cli.cmd {
        Cmd::Build { expr, depth } => {
            let class = dsl::build(expr, &reg)?;
            #[derive(Serialize)]
            struct Built {
                expr: String,
                kind: &'static str,
                alphabet: Alphabet,
                layers: usize,
                depth: usize,
                members: usize,
            }
            let (kind, layers) = match &class {
                Class::Closed(_) => ("closed", 1),
                Class::Layered(l) => ("layered", l.layers().len()),
            };
            let flat = class.flat();
            let members = frontier(&flat, *depth)?.members.len();
            Ok(json(&Built { expr: class.label().into(), kind, alphabet: flat.alphabet(), layers, depth: *depth, members }))
        }
        Cmd::Frontier { expr, depth } | Cmd::Export { expr, depth } => {
            let class = closed(expr, &reg)?;
            let doc = export::frontier_doc(&class, *depth)?;
            if !doc.validated {
                return Err(Failure::Check(format!("frontier of {} disagrees with brute force", doc.expr)));
            }
            Ok(match cli.format {
                Format::Json => json(&doc),
                Format::Dot => export::dot(&class, *depth)?,
                Format::Table => export::table(&doc),
            })
        }
        Cmd::Simulate { learner, stream, target } => {
            let target = closed(target, &reg)?;
            let l = parse_learner(learner, target.alphabet())?;
            let g = parse_word(stream)?;
            let trace = simulate(&reg.machine(), l.as_ref(), &g, &target, budget);
            Ok(match cli.format {
                Format::Json => json(&trace),
                _ => trace.json_lines(),
            })
        }
        Cmd::Verify { learner, source, target, kind, b, depth } => {
            let (s, t) = (closed(source, &reg)?, closed(target, &reg)?);
            let kind = match kind {
                KindArg::Medvedev => Kind::Medvedev,
                KindArg::MindChanges => Kind::MindChanges(*b),
                KindArg::Indices => Kind::Indices(*b),
                KindArg::Limit => Kind::Limit,
            };
            let l = parse_learner(learner, t.alphabet())?;
            let witness = match kind {
                Kind::Medvedev => Witness::Program(l.guess(&[])),
                _ => Witness::Learner(l),
            };
            let sample = frontier(&s, *depth)?.members;
            let report = verify_class(&reg.machine(), kind, &witness, &sample, &s, &t, Horizon { budget, k: 1 })?;
            let text = json(&report);
            if report.pass() {
                Ok(text)
            } else {
                print!("{text}");
                Err(Failure::Check(format!("{} failures", report.failures.len())))
            }
        }
        Cmd::Force { learner, tie: text, m, team } => {
            let Expr::Tie(mode, operands) = dsl::parse(text)? else {
                return Err(Error::Elaborate(format!("`{text}` is not a tie")).into());
            };
            let ps = operands.iter().map(|e| Ok(dsl::elaborate(e, &reg)?.flat())).collect::<Result<Vec<_>, Error>>()?;
            let tree = tie(mode, &ps)?;
            let l = parse_learner(learner, tree.alphabet())?;
            let members = vec![l; (*team).max(1)];
            let spec = ForceSpec { budget, ..ForceSpec::new(*m) };
            let out = force_mind_changes(&reg.machine(), &members, &ps, &spec)?;
            #[derive(Serialize)]
            struct Forced<'a> {
                tie: String,
                requested: usize,
                count: usize,
                mind_changes: &'a [usize],
                achieved: bool,
                in_tie: bool,
                stall: &'a Option<masslab::witnesses::Stall>,
                coded: &'a Word,
                tapes: &'a [usize],
                commits: &'a [usize],
            }
            Ok(json(&Forced {
                tie: tree.label().into(),
                requested: *m,
                count: out.mind_changes.iter().copied().min().unwrap_or(0),
                mind_changes: &out.mind_changes,
                achieved: out.achieved,
                in_tie: tree.contains(&out.coded),
                stall: &out.stall,
                coded: &out.coded,
                tapes: &out.tapes,
                commits: &out.commits,
            }))
        }
        Cmd::Witness { name, stream, depth, b, and } => {
            let stream = stream.as_deref().map(parse_word).transpose()?;
            witness(*name, stream, *depth, *b, *and, cli.budget, &mut rng)
        }
        Cmd::Check { suite } => {
            let cfg = SuiteConfig { seed: cli.seed, budget: cli.budget.unwrap_or(SuiteConfig::default().budget) };
            let mut results = Vec::new();
            for id in checks::resolve(suite)? {
                let r = checks::run(id, &cfg)?;
                eprintln!("suite {} took {:.2}s (limit {}s)", r.name, r.elapsed.as_secs_f64(), r.limit_secs);
                results.push(r);
            }
            let text = match cli.format {
                Format::Json => json(&results),
                _ => results.iter().map(|r| r.line() + "\n").collect(),
            };
            let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
            if failed.is_empty() {
                Ok(text)
            } else {
                print!("{text}");
                Err(Failure::Check(format!("failed suites: {}", failed.join(", "))))
            }
        }
    }
}

fn witness(
    name: WitnessName,
    stream: Option<Word>,
    depth: Option<usize>,
    b: usize,
    and: bool,
    budget: Option<u64>,
    rng: &mut ChaCha8Rng,
) -> Out {
    let pick = |rng: &mut ChaCha8Rng, ws: &[Word]| -> Result<Word, Error> {
        if ws.is_empty() {
            return Err(Error::Resource("no stream to sample".into()));
        }
        Ok(ws[rng.gen_range(0..ws.len())].clone())
    };
    let fixture = |n: &str| Registry::standard().get(n);
    match name {
        WitnessName::DnrSquare => {
            let d = depth.unwrap_or(6);
            let sq = dnr_square_reduction(dnr_square_machine(2), 2, budget.unwrap_or(64), d);
            let source = sq.source();
            if let Some(g) = stream {
                if !source.contains(&g) {
                    return Err(Error::Hypothesis(format!("{g:?} is not in {}", source.label())).into());
                }
                return Ok(transcript(&sq.transcript(&g)));
            }
            let members = frontier(&source, d)?.members;
            let mut pieces: BTreeMap<usize, usize> = BTreeMap::new();
            let mut failures = Vec::new();
            let target = sq.target();
            for g in &members {
                let out = sq.apply(g);
                *pieces.entry(out.piece).or_default() += 1;
                let outside = !target.contains(&out.delta_prefix) || !target.contains(&out.gamma_output);
                if !out.dichotomy_failures.is_empty() || outside {
                    failures.push(g.clone());
                }
            }
            #[derive(Serialize)]
            struct Summary {
                depth: usize,
                members: usize,
                pieces: BTreeMap<usize, usize>,
                failures: Vec<Word>,
            }
            let text = json(&Summary { depth: d, members: members.len(), pieces, failures: failures.clone() });
            if failures.is_empty() {
                Ok(text)
            } else {
                print!("{text}");
                Err(Failure::Check(format!("{} members fail", failures.len())))
            }
        }
        WitnessName::HomogCollapse => {
            let b = b.clamp(1, 8);
            let l = homog_collapse_learner(homog_fixture_machine(b), b, homogeneous(&[[0, 1].into()]));
            let g = match stream {
                Some(g) => g,
                None => {
                    let good = rng.gen_range(0..b);
                    (0..8 * b + 24).map(|p| if p % b == good { rng.gen_range(0..2) } else { rng.gen_range(0..3) }).collect()
                }
            };
            let run = l.replay(&g);
            if let Some(v) = run.violation {
                print!("{}", transcript(&l.transcript(&g)));
                return Err(Error::Hypothesis(v).into());
            }
            Ok(transcript(&l.transcript(&g)))
        }
        WitnessName::Noncup => {
            let (phi, vp, vq, default) = if and {
                (library::interleaved_and().encode(), fixture("fixtureA")?, fixture("fixtureB")?, vec![1, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0])
            } else {
                (library::odd_half().encode(), fixture("fixtureC")?, fixture("fixtureB")?, vec![0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 0])
            };
            let g = stream.unwrap_or(default);
            let ex = noncup_extract(&fixture_machine(), &phi, &vp, &vq, &g, 3, depth.unwrap_or(8))?;
            Ok(transcript(&ex.transcript))
        }
        WitnessName::HyperLearner => {
            let (p, q, r) = (fixture("fixtureC")?, fixture("fixtureB")?, fixture("fixtureA")?);
            let h = hyperconcat_learner(&fixture_machine(), hyper_fixture_psi(), &p, &q, HyperConfig::default());
            let g = match stream {
                Some(g) => g,
                None => pick(rng, &frontier(&r, depth.unwrap_or(12))?.members)?,
            };
            Ok(transcript(&h.transcript(&g)))
        }
        WitnessName::Timekeeper => {
            let opponents = [library::echo().encode(), library::constant(0).encode(), library::identity().encode()];
            let run = timekeeper_build(
                &fixture_machine(),
                &fixture("fixtureB")?,
                &fixture("fixtureA")?,
                &opponents,
                4,
                depth.unwrap_or(6),
            )?;
            Ok(transcript(&run.transcript))
        }
        WitnessName::Priority => {
            let pool = [library::echo(), library::constant(0), library::identity(), library::constant(1)];
            let mut team = |size: usize| -> Vec<SharedLearner> {
                (0..size)
                    .map(|_| {
                        let a = pool[rng.gen_range(0..pool.len())].encode();
                        let b = pool[rng.gen_range(0..pool.len())].encode();
                        let cut = rng.gen_range(1..5usize);
                        Arc::new(masslab::learners::FnLearner::new("switch", move |w| {
                            if w.len() < cut { a.clone() } else { b.clone() }
                        })) as SharedLearner
                    })
                    .collect()
            };
            let teams = vec![team(2), team(1)];
            let run = priority_hat(&fixture_machine(), &fixture("fixtureA")?, &fixture("fixtureC")?, &teams, depth.unwrap_or(5))?;
            let text = transcript(&run.transcript);
            if run.violations.is_empty() {
                Ok(text)
            } else {
                print!("{text}");
                Err(Failure::Check(run.violations.join("; ")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => match &cli.out {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    ExitCode::from(2)
                }
            },
            None => {
                print!("{text}");
                ExitCode::SUCCESS
            }
        },
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(5)
        }
    }
}
