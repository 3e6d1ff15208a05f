use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use flagcoh::coherence::{is_clique, parse_spaces};
use flagcoh::proofnet::{
    catalog_interpretations, conclusion_space, dicograph_of, experiments, is_correct_with_cap,
    parse_formula, parse_structure, semantic_correctness_check, AtomInterpretation, ProofStructure,
    Verdict,
};
use flagcoh::suites::{run_suite, Suite, SuiteConfig};

#[derive(Parser, Debug)]
#[command(
    name = "flagcoh",
    version,
    about = "Coherence spaces, the flag modality and pomset proof nets"
)]
struct Cli {
    /// Deepest generic trees enumerated by the property suites.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=5), global = true)]
    depth: u32,
    /// Largest base web: bounds the property suites and the spaces of an
    /// atoms file.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=6), global = true)]
    web_cap: u32,
    /// Largest number of atom occurrences searched for circuits.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..), global = true)]
    circuit_cap: u32,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Dot,
    /// One `name<TAB>verdict<TAB>detail` line per result.
    Lines,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Before,
    Flag,
    Functor,
    Nomonad,
    Hyper,
    Nets,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Before => Suite::Before,
            SuiteArg::Flag => Suite::Flag,
            SuiteArg::Functor => Suite::Functor,
            SuiteArg::Nomonad => Suite::Nomonad,
            SuiteArg::Hyper => Suite::Hyper,
            SuiteArg::Nets => Suite::Nets,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the correctness criterion on a proof structure file.
    Check { file: PathBuf },
    /// Compute the interpretation of a proof structure.
    Interpret {
        file: PathBuf,
        /// Spaces for the variables, as `space NAME { ... }` blocks.
        #[arg(long, conflicts_with = "catalog", required_unless_present = "catalog")]
        atoms: Option<PathBuf>,
        /// Try every combination of the built-in atom spaces.
        #[arg(long)]
        catalog: bool,
    },
    /// Run property suites; all of them when none is named.
    Props {
        #[arg(long, value_enum)]
        suite: Vec<SuiteArg>,
    },
    /// Print the dicograph of a formula.
    Dicograph {
        formula: String,
        /// Same as `--format dot`.
        #[arg(long)]
        dot: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((output, code)) => {
            print!("{output}");
            ExitCode::from(code)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_structure(path: &Path) -> Result<ProofStructure, String> {
    parse_structure(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cli: &Cli) -> Result<(String, u8), String> {
    let circuit_cap = cli.circuit_cap as usize;
    match &cli.command {
        Command::Check { file } => {
            let s = load_structure(file)?;
            let verdict = is_correct_with_cap(&s, circuit_cap).map_err(|e| e.to_string())?;
            let code = if verdict.is_pass() { 0 } else { 1 };
            let detail = match &verdict {
                Verdict::Pass => String::new(),
                Verdict::Fail(c) => c.describe(&s),
            };
            let out = match cli.format {
                Format::Dot => s.to_dot(),
                Format::Lines => format!("{}\t{}\t{detail}\n", s.formula(), verdict_word(&verdict)),
                Format::Text if verdict.is_pass() => "PASS\n".to_string(),
                Format::Text => format!("FAIL\nchordless circuit: {detail}\n"),
            };
            Ok((out, code))
        }
        Command::Interpret {
            file,
            atoms,
            catalog,
        } => {
            let s = load_structure(file)?;
            if *catalog {
                interpret_catalog(&s, cli.format)
            } else {
                let path = atoms
                    .as_ref()
                    .expect("clap requires --atoms without --catalog");
                let spaces =
                    parse_spaces(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
                if let Some((name, space)) = spaces
                    .iter()
                    .find(|(_, sp)| sp.web_size() > cli.web_cap as usize)
                {
                    return Err(format!(
                        "space {name} has {} tokens, above the web cap of {}",
                        space.web_size(),
                        cli.web_cap
                    ));
                }
                interpret_one(&s, &AtomInterpretation::from_spaces(spaces), cli.format)
            }
        }
        Command::Props { suite } => {
            let config = SuiteConfig {
                max_depth: cli.depth as usize,
                max_web: cli.web_cap as usize,
                circuit_cap,
            };
            let suites: Vec<Suite> = if suite.is_empty() {
                Suite::ALL.to_vec()
            } else {
                suite.iter().map(|&s| s.into()).collect()
            };
            let mut out = String::new();
            let mut all_passed = true;
            for suite in suites {
                for outcome in run_suite(suite, &config) {
                    all_passed &= outcome.passed;
                    let verdict = if outcome.passed { "PASS" } else { "FAIL" };
                    let name = format!("{suite}/{}", outcome.name);
                    let _ = match cli.format {
                        Format::Lines => writeln!(out, "{name}\t{verdict}\t{}", outcome.witness),
                        _ => writeln!(out, "{verdict} {name}: {}", outcome.witness),
                    };
                }
            }
            Ok((out, if all_passed { 0 } else { 1 }))
        }
        Command::Dicograph { formula, dot } => {
            let f = parse_formula(formula).map_err(|e| e.to_string())?;
            let g = dicograph_of(&f);
            if *dot || cli.format == Format::Dot {
                return Ok((g.to_dot(&[]), 0));
            }
            let names = g.display_names();
            let mut out = String::new();
            let vertices: Vec<String> =
                g.vertices().map(|v| format!("{v}:{}", names[&v])).collect();
            let _ = writeln!(out, "vertices: {}", vertices.join(" "));
            for &(u, v) in g.arcs() {
                let _ = writeln!(out, "arc {} -> {}", names[&u], names[&v]);
            }
            for &(u, v) in g.edges() {
                let _ = writeln!(out, "edge {} -- {}", names[&u], names[&v]);
            }
            Ok((out, 0))
        }
    }
}

fn verdict_word(v: &Verdict) -> &'static str {
    if v.is_pass() {
        "PASS"
    } else {
        "FAIL"
    }
}

fn interpret_one(
    s: &ProofStructure,
    interp: &AtomInterpretation,
    format: Format,
) -> Result<(String, u8), String> {
    let space = conclusion_space(s.formula(), interp).map_err(|e| e.to_string())?;
    let results = experiments(s, interp).map_err(|e| e.to_string())?;
    let clique = is_clique(&space, results.iter());
    let mut out = String::new();
    match format {
        Format::Lines => {
            let tokens: Vec<String> = results.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "{interp}\t{clique}\t{}", tokens.join(" "));
        }
        _ => {
            for t in &results {
                let _ = writeln!(out, "{t}");
            }
            let _ = writeln!(out, "clique: {clique}");
        }
    }
    Ok((out, 0))
}

fn interpret_catalog(s: &ProofStructure, format: Format) -> Result<(String, u8), String> {
    let catalog = catalog_interpretations(&s.formula().variables());
    let report = semantic_correctness_check(s, &catalog).map_err(|e| e.to_string())?;
    let mut out = String::new();
    for o in &report.outcomes {
        let _ = match format {
            Format::Lines => writeln!(
                out,
                "{}\t{}\t{}",
                o.interpretation,
                o.clique,
                o.results.len()
            ),
            _ => writeln!(
                out,
                "{}: {} results, clique: {}",
                o.interpretation,
                o.results.len(),
                o.clique
            ),
        };
    }
    if format != Format::Lines {
        match report.separating() {
            Some(o) => {
                let _ = writeln!(out, "separating interpretation: {}", o.interpretation);
                for t in &o.results {
                    let _ = writeln!(out, "{t}");
                }
                let _ = writeln!(out, "clique: false");
            }
            None => {
                let _ = writeln!(out, "clique: true");
            }
        }
        let _ = writeln!(out, "criterion: {}", verdict_word(&report.verdict));
        if let Some(agree) = report.agreement(s.is_cut_free()) {
            let _ = writeln!(out, "agreement: {agree}");
        }
    }
    Ok((out, 0))
}
