//! Command-line surface over the torsionlab library.
//!
//! Every subcommand is deterministic: identical inputs and flags give
//! byte-identical output. Semi-decision commands take their budgets as
//! mandatory flags — there are no silent defaults to drift under your feet.
//!
//! Exit codes: `wp` exits 0 proved / 1 refuted / 2 unknown; `tc` and `kb`
//! exit 0 on success and 2 when the budget ran out; parse errors exit 64.

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use torsionlab::presentations::text::{self, GensDecl, PresentationFile};
use torsionlab::presentations::{Provenance, RelatorStream, TaggedRelator};
use torsionlab::wordproblem::{KbOutcome, RewriteCertificate, TcOutcome};
use torsionlab::{
    build_pn, build_qn_complement, build_qphi, cantor_pair, cantor_unpair, crush, kb_complete,
    prove_trivial, refute_trivial_finite_quotient, todd_coxeter, torord_bounded,
    torsion_free_quotient, universal_tf_assembly, we_enumerate, Certificate, GeneratorNames,
    Presentation, Program, ReSet, Sigma2Predicate, Status, Verdict, Word,
};

const EX_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "torsionlab",
    version,
    about = "Group presentations, torsion quotients, and certified word-problem engines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide or semi-decide triviality of a word in a presented group.
    Wp(WpArgs),
    /// Emit a prefix of the torsion-free universal quotient presentation.
    Tf(TfArgs),
    /// Certified torsion orders up to a bound.
    Torord(TorordArgs),
    /// Todd-Coxeter coset enumeration.
    Tc(TcArgs),
    /// Knuth-Bendix completion.
    Kb(KbArgs),
    /// Build one of the named constructions.
    Construct(ConstructArgs),
    /// Cantor pairing utility.
    Pair(PairArgs),
    /// Enumerate an r.e. set given by a program.
    We(WeArgs),
    /// Enumerate the crush of an r.e. set.
    Crush(WeArgs),
    /// Abelianization invariants of a finite presentation.
    Abel(AbelArgs),
}

#[derive(Args)]
struct WpArgs {
    /// Presentation file.
    file: PathBuf,
    /// The word, in the words syntax (quote it).
    word: String,
    /// Engine: closure, tc, kb, or quotient.
    #[arg(long)]
    engine: String,
    /// Step budget for closure and kb.
    #[arg(long)]
    fuel: Option<u64>,
    /// Coset limit for tc.
    #[arg(long)]
    max_cosets: Option<usize>,
    /// Degree limit for quotient.
    #[arg(long)]
    degree: Option<usize>,
    /// Relator prefix checked by quotient on stream-backed presentations.
    #[arg(long)]
    relator_budget: Option<usize>,
}

#[derive(Args)]
struct TfArgs {
    file: PathBuf,
    /// How many relators of the quotient presentation to materialize.
    #[arg(long)]
    emit: usize,
    /// Output presentation file; provenance goes to `<out>.prov`. Without
    /// it the presentation text goes to standard output.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TorordArgs {
    file: PathBuf,
    #[arg(long)]
    bound: u64,
    #[arg(long)]
    fuel: u64,
}

#[derive(Args)]
struct TcArgs {
    file: PathBuf,
    /// Subgroup generator words (repeatable).
    #[arg(long)]
    subgroup: Vec<String>,
    #[arg(long)]
    max_cosets: usize,
}

#[derive(Args)]
struct KbArgs {
    file: PathBuf,
    #[arg(long)]
    fuel: u64,
}

#[derive(Args)]
struct ConstructArgs {
    /// qphi, pn, qcomp, or universal.
    kind: String,
    /// Program file (pn, qcomp, qphi).
    #[arg(long)]
    program: Option<PathBuf>,
    /// Prime modulus for pn.
    #[arg(long)]
    prime: Option<u64>,
    /// Per-evaluation step budget for qphi.
    #[arg(long)]
    step_budget: Option<u64>,
    /// Part limit for universal.
    #[arg(long)]
    limit: Option<u64>,
    /// How many relators the provenance sidecar records.
    #[arg(long)]
    emit: usize,
    /// Output presentation file; `<out>.prov` gets the provenance log.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PairArgs {
    x: u64,
    y: Option<u64>,
    /// Treat the single argument as a code and print the pair.
    #[arg(long)]
    invert: bool,
}

#[derive(Args)]
struct WeArgs {
    program: PathBuf,
    #[arg(long)]
    items: usize,
}

#[derive(Args)]
struct AbelArgs {
    file: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EX_USAGE)
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode, String> {
    match cmd {
        Command::Wp(a) => cmd_wp(a),
        Command::Tf(a) => cmd_tf(a),
        Command::Torord(a) => cmd_torord(a),
        Command::Tc(a) => cmd_tc(a),
        Command::Kb(a) => cmd_kb(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Pair(a) => cmd_pair(a),
        Command::We(a) => cmd_we(a, false),
        Command::Crush(a) => cmd_we(a, true),
        Command::Abel(a) => cmd_abel(a),
    }
}

fn read_to_string(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Loads a presentation file, resolving `stream:` lines through the
/// construction registry.
fn load_presentation(path: &Path) -> Result<(Presentation, GeneratorNames), String> {
    let textual = read_to_string(path)?;
    let file = text::parse_file(&textual).map_err(|e| e.to_string())?;
    match (&file.gens, &file.stream) {
        (_, None) => {
            let p = text::file_to_finite(&file).map_err(|e| e.to_string())?;
            let names = p.names().clone();
            Ok((Presentation::Finite(p), names))
        }
        (GensDecl::Omega, Some((name, args))) => {
            let p = resolve_stream(name, args)?;
            Ok((p, GeneratorNames::Default))
        }
        (GensDecl::Count(_), Some(_)) => Err("stream-backed files use `gens: omega`".to_string()),
    }
}

/// The `stream:` constructor registry. Program arguments use the inline
/// `;`-separated instruction form and may contain spaces, so everything
/// after the fixed arguments is rejoined before parsing.
fn resolve_stream(name: &str, args: &[String]) -> Result<Presentation, String> {
    let rest = |from: usize| args[from..].join(" ");
    match name {
        "pn" => {
            if args.len() < 2 {
                return Err("stream: pn <prime> <program>".into());
            }
            let p: u64 = args[0].parse().map_err(|_| "bad prime".to_string())?;
            let program = Program::parse_inline(&rest(1)).map_err(|e| e.to_string())?;
            let q = build_pn(p, &ReSet::domain_of(program)).map_err(|e| e.to_string())?;
            Ok(Presentation::Countable(q))
        }
        "qcomp" => {
            if args.is_empty() {
                return Err("stream: qcomp <program>".into());
            }
            let program = Program::parse_inline(&rest(0)).map_err(|e| e.to_string())?;
            Ok(Presentation::Countable(build_qn_complement(
                &ReSet::domain_of(program),
            )))
        }
        "qphi" => {
            if args.len() < 2 {
                return Err("stream: qphi <step-budget> <program>".into());
            }
            let budget: u64 = args[0].parse().map_err(|_| "bad budget".to_string())?;
            let program = Program::parse_inline(&rest(1)).map_err(|e| e.to_string())?;
            Ok(Presentation::Countable(build_qphi(&Sigma2Predicate::new(
                program, budget,
            ))))
        }
        "universal" => {
            let limit = match args.first().map(String::as_str) {
                None | Some("all") => None,
                Some(v) => Some(v.parse().map_err(|_| "bad limit".to_string())?),
            };
            Ok(Presentation::Countable(universal_tf_assembly(limit)))
        }
        other => Err(format!("unknown stream constructor `{other}`")),
    }
}

fn parse_query_word(text_: &str, names: &GeneratorNames) -> Result<Word, String> {
    torsionlab::parse_word(text_, names).map_err(|e| e.to_string())
}

fn print_verdict(v: &Verdict, names: &GeneratorNames) -> ExitCode {
    println!("verdict: {}", v.status);
    println!("fuel: {}", v.fuel_spent);
    if v.provisional {
        println!("provisional: true");
    }
    if let Some(cert) = &v.certificate {
        print!("{}", torsionlab::write_certificate(cert, names));
    }
    match v.status {
        Status::Proved => ExitCode::from(0),
        Status::Refuted => ExitCode::from(1),
        Status::Unknown => ExitCode::from(2),
    }
}

fn cmd_wp(a: WpArgs) -> Result<ExitCode, String> {
    let (p, names) = load_presentation(&a.file)?;
    let w = parse_query_word(&a.word, &names)?;
    match a.engine.as_str() {
        "closure" => {
            let fuel = a.fuel.ok_or("closure engine needs --fuel")?;
            let v = prove_trivial(&p, &w, fuel).map_err(|e| e.to_string())?;
            Ok(print_verdict(&v, &names))
        }
        "quotient" => {
            let degree = a.degree.ok_or("quotient engine needs --degree")?;
            let budget = a
                .relator_budget
                .ok_or("quotient engine needs --relator-budget")?;
            let v = refute_trivial_finite_quotient(&p, &w, degree, budget);
            Ok(print_verdict(&v, &names))
        }
        "tc" => {
            let max = a.max_cosets.ok_or("tc engine needs --max-cosets")?;
            let fp = p
                .as_finite()
                .ok_or("tc engine needs a finite presentation")?;
            match todd_coxeter(fp, &[], max) {
                TcOutcome::Complete(table) => {
                    let perm = table.permutation_of(&w).map_err(|e| e.to_string())?;
                    let trivial = perm.is_identity();
                    let v = Verdict {
                        status: if trivial {
                            Status::Proved
                        } else {
                            Status::Refuted
                        },
                        fuel_spent: table.coset_count() as u64,
                        certificate: Some(Certificate::CosetTable(table)),
                        provisional: false,
                    };
                    Ok(print_verdict(&v, &names))
                }
                TcOutcome::OutOfCosets { defined } => {
                    Ok(print_verdict(&Verdict::unknown(defined as u64), &names))
                }
            }
        }
        "kb" => {
            let fuel = a.fuel.ok_or("kb engine needs --fuel")?;
            let fp = p
                .as_finite()
                .ok_or("kb engine needs a finite presentation")?;
            match kb_complete(fp, fuel) {
                KbOutcome::Confluent(sys) => {
                    let (nf, derivation) = sys.normal_form_with_derivation(&w);
                    let v = if nf.is_identity() {
                        Verdict::proved(fuel, Certificate::TrivialityDerivation(derivation))
                    } else {
                        Verdict::refuted(
                            fuel,
                            Certificate::ConfluentRewriting(RewriteCertificate {
                                system: sys,
                                normal_form: nf,
                            }),
                            false,
                        )
                    };
                    Ok(print_verdict(&v, &names))
                }
                KbOutcome::OutOfFuel { fuel_spent } => {
                    Ok(print_verdict(&Verdict::unknown(fuel_spent), &names))
                }
            }
        }
        other => Err(format!("unknown engine `{other}`")),
    }
}

fn provenance_log(prefix: &[TaggedRelator], names: &GeneratorNames) -> String {
    let mut out = String::new();
    for (k, rel) in prefix.iter().enumerate() {
        out.push_str(&format!(
            "rel {k}: {} cause {}\n",
            torsionlab::format_word(&rel.word, names),
            rel.provenance
        ));
    }
    out
}

fn write_or_print(
    out: &Option<PathBuf>,
    presentation_text: &str,
    prov: Option<&str>,
) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(path, presentation_text).map_err(|e| e.to_string())?;
            if let Some(prov) = prov {
                let mut prov_path = path.clone().into_os_string();
                prov_path.push(".prov");
                std::fs::write(PathBuf::from(prov_path), prov).map_err(|e| e.to_string())?;
            }
            Ok(())
        }
        None => {
            print!("{presentation_text}");
            Ok(())
        }
    }
}

fn cmd_tf(a: TfArgs) -> Result<ExitCode, String> {
    let (p, names) = load_presentation(&a.file)?;
    let q = torsion_free_quotient(&p);
    let prefix = q.relator_stream().prefix(a.emit);
    let gens = match q.alphabet() {
        torsionlab::Alphabet::Finite(n) => GensDecl::Count(n),
        torsionlab::Alphabet::Omega => GensDecl::Omega,
    };
    let file = PresentationFile {
        gens,
        names: match &names {
            GeneratorNames::Named(ns) => Some(ns.clone()),
            GeneratorNames::Default => None,
        },
        relators: prefix.iter().map(|r| r.word.clone()).collect(),
        stream: None,
    };
    let prov = provenance_log(&prefix, &names);
    write_or_print(&a.out, &text::render_file(&file), Some(&prov))?;
    Ok(ExitCode::from(0))
}

fn cmd_torord(a: TorordArgs) -> Result<ExitCode, String> {
    let (p, names) = load_presentation(&a.file)?;
    let report = torord_bounded(&p, a.bound, a.fuel);
    for (order, cert) in &report.certified {
        let refuted = if cert.provisional {
            "provisional".to_string()
        } else {
            cert.refuted_divisors
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        println!(
            "order {order} word {} stage {} refuted {refuted}",
            torsionlab::format_word(&cert.word, &names),
            cert.witness.stage
        );
    }
    Ok(ExitCode::from(0))
}

fn cmd_tc(a: TcArgs) -> Result<ExitCode, String> {
    let (p, names) = load_presentation(&a.file)?;
    let fp = p.as_finite().ok_or("tc needs a finite presentation")?;
    let subgroup = a
        .subgroup
        .iter()
        .map(|s| parse_query_word(s, &names))
        .collect::<Result<Vec<_>, _>>()?;
    match todd_coxeter(fp, &subgroup, a.max_cosets) {
        TcOutcome::Complete(t) => {
            println!("cosets: {}", t.coset_count());
            print!("{}", t.render_rows());
            Ok(ExitCode::from(0))
        }
        TcOutcome::OutOfCosets { defined } => {
            println!(
                "unknown: exceeded {} cosets (defined {defined})",
                a.max_cosets
            );
            Ok(ExitCode::from(2))
        }
    }
}

fn cmd_kb(a: KbArgs) -> Result<ExitCode, String> {
    let (p, names) = load_presentation(&a.file)?;
    let fp = p.as_finite().ok_or("kb needs a finite presentation")?;
    match kb_complete(fp, a.fuel) {
        KbOutcome::Confluent(sys) => {
            for rule in sys.rules() {
                println!(
                    "rule {} -> {}",
                    format_letter_string(&rule.lhs, &names),
                    format_letter_string(&rule.rhs, &names)
                );
            }
            Ok(ExitCode::from(0))
        }
        KbOutcome::OutOfFuel { fuel_spent } => {
            println!("unknown: out of fuel after {fuel_spent}");
            Ok(ExitCode::from(2))
        }
    }
}

fn format_letter_string(s: &[torsionlab::Letter], names: &GeneratorNames) -> String {
    if s.is_empty() {
        return "1".to_string();
    }
    s.iter()
        .map(|l| match l.sign {
            torsionlab::Sign::Pos => names.name(l.gen.0),
            torsionlab::Sign::Neg => format!("{}^-1", names.name(l.gen.0)),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_construct(a: ConstructArgs) -> Result<ExitCode, String> {
    let names = GeneratorNames::Default;
    let (stream_line, relators): ((String, Vec<String>), RelatorStream) = match a.kind.as_str() {
        "pn" => {
            let prime = a.prime.ok_or("pn needs --prime")?;
            let program = load_program(&a.program)?;
            let q =
                build_pn(prime, &ReSet::domain_of(program.clone())).map_err(|e| e.to_string())?;
            (
                (
                    "pn".to_string(),
                    vec![prime.to_string(), program.to_inline()],
                ),
                q.relators().clone(),
            )
        }
        "qcomp" => {
            let program = load_program(&a.program)?;
            let q = build_qn_complement(&ReSet::domain_of(program.clone()));
            (
                ("qcomp".to_string(), vec![program.to_inline()]),
                q.relators().clone(),
            )
        }
        "qphi" => {
            let budget = a.step_budget.ok_or("qphi needs --step-budget")?;
            let program = load_program(&a.program)?;
            let q = build_qphi(&Sigma2Predicate::new(program.clone(), budget));
            (
                (
                    "qphi".to_string(),
                    vec![budget.to_string(), program.to_inline()],
                ),
                q.relators().clone(),
            )
        }
        "universal" => {
            let q = universal_tf_assembly(a.limit);
            let limit_arg = match a.limit {
                Some(l) => l.to_string(),
                None => "all".to_string(),
            };
            (
                ("universal".to_string(), vec![limit_arg]),
                q.relators().clone(),
            )
        }
        other => return Err(format!("unknown construction `{other}`")),
    };
    let prefix = relators.prefix(a.emit);
    let file = PresentationFile {
        gens: GensDecl::Omega,
        names: None,
        relators: Vec::new(),
        stream: Some(stream_line),
    };
    let prov = provenance_log(&prefix, &names);
    write_or_print(&a.out, &text::render_file(&file), Some(&prov))?;
    if prefix
        .iter()
        .any(|r| matches!(r.provenance, Provenance::BudgetExhausted { .. }))
    {
        eprintln!("warning: predicate step budget exhausted; stream is truncated");
    }
    Ok(ExitCode::from(0))
}

fn load_program(path: &Option<PathBuf>) -> Result<Program, String> {
    let path = path.as_ref().ok_or("missing --program")?;
    Program::parse(&read_to_string(path)?).map_err(|e| e.to_string())
}

fn cmd_pair(a: PairArgs) -> Result<ExitCode, String> {
    if a.invert {
        if a.y.is_some() {
            return Err("--invert takes a single code".into());
        }
        let (x, y) = cantor_unpair(a.x);
        println!("{x} {y}");
    } else {
        let y = a.y.ok_or("pair needs two numbers")?;
        println!("{}", cantor_pair(a.x, y));
    }
    Ok(ExitCode::from(0))
}

fn cmd_we(a: WeArgs, crushed: bool) -> Result<ExitCode, String> {
    let program = Program::parse(&read_to_string(&a.program)?).map_err(|e| e.to_string())?;
    let set = ReSet::domain_of(program);
    let set = if crushed { crush(&set) } else { set };
    let items = we_enumerate(&set, a.items);
    println!(
        "{}",
        items
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    Ok(ExitCode::from(0))
}

fn cmd_abel(a: AbelArgs) -> Result<ExitCode, String> {
    let (p, _) = load_presentation(&a.file)?;
    let fp = p.as_finite().ok_or("abel needs a finite presentation")?;
    let divisors = torsionlab::abelianization_invariants(fp);
    println!(
        "{}",
        divisors
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    Ok(ExitCode::from(0))
}
