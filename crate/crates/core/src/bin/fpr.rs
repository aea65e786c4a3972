use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use forbidden_patterns::analysis::{
    check_ground_correspondence, compare_relations, enumerate_ground_all, leftmost_innermost,
    normalize, Budget,
};
use forbidden_patterns::patterns::{
    self, encode_context_sensitive, encode_innermost, encode_outermost, forbidden, is_canonical,
    is_simple, mu_replacing, ReplacementMap,
};
use forbidden_patterns::rewriting;
use forbidden_patterns::syntax::{export_tpdb, print_system};
use forbidden_patterns::transform::transform;
use forbidden_patterns::{parse_system, parse_term, Error, PatternSystem, Signature, Term};

#[derive(Parser)]
#[command(name = "fpr", version, about = "Rewriting with forbidden patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and sort-check a system file.
    Validate { file: PathBuf },
    /// List the redexes of a term, allowed and forbidden.
    Step {
        file: PathBuf,
        #[arg(short, long)]
        term: String,
    },
    /// Rewrite with leftmost-innermost allowed redexes until none is left.
    Reduce {
        file: PathBuf,
        #[arg(short, long)]
        term: String,
        #[arg(long, default_value_t = 100)]
        max_steps: usize,
    },
    /// Normalize through restricted normal forms of the term and its subterms.
    Normalize {
        file: PathBuf,
        #[arg(short, long)]
        term: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// Print every step.
        #[arg(long)]
        trace: bool,
    },
    /// Check whether the patterns are simple and/or canonical.
    Check {
        file: PathBuf,
        #[arg(long)]
        simple: bool,
        #[arg(long)]
        canonical: bool,
        #[arg(long)]
        json: bool,
    },
    /// Transform into an ordinary rewrite system.
    Transform {
        file: PathBuf,
        /// Plain termination-problem format.
        #[arg(long, conflicts_with = "native")]
        tpdb: bool,
        /// The system file format (default).
        #[arg(long)]
        native: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare a pattern encoding of a strategy with a direct implementation
    /// on all ground terms up to a depth.
    Oracle {
        file: PathBuf,
        #[arg(long, value_enum)]
        encoding: Encoding,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Replacement map for `csr`, e.g. "cons:1;f:1,2". Unlisted symbols
        /// may be reduced everywhere.
        #[arg(long)]
        mu: Option<String>,
    },
    /// Compare restricted derivations with those of the transformed system.
    GroundCheck {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Encoding {
    Innermost,
    Outermost,
    Csr,
}

/// Failures that map to exit code 2.
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

fn load(path: &PathBuf) -> Result<PatternSystem, Usage> {
    let text = fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    parse_system(&text).map_err(|e| Usage(format!("{}:{e}", path.display())))
}

fn term(sys: &PatternSystem, text: &str) -> Result<Term, Usage> {
    parse_term(sys, text).map_err(|e| Usage(format!("term: {e}")))
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn parse_mu(spec: &str, sig: &Signature) -> Result<ReplacementMap, Usage> {
    let mut mu = BTreeMap::new();
    for entry in spec.split(';').map(str::trim).filter(|e| !e.is_empty()) {
        let (name, args) = entry
            .split_once(':')
            .ok_or_else(|| Usage(format!("replacement map entry `{entry}` lacks `:`")))?;
        let f = sig
            .symbol(name.trim())
            .ok_or_else(|| Usage(format!("unknown symbol `{}` in replacement map", name.trim())))?;
        let allowed: BTreeSet<usize> = args
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(|a| a.parse().map_err(|_| Usage(format!("bad argument index `{a}`"))))
            .collect::<Result<_, _>>()?;
        mu.insert(f.clone(), allowed);
    }
    Ok(mu)
}

fn run(cli: Cli) -> Result<ExitCode, Usage> {
    match cli.command {
        Command::Validate { file } => {
            let sys = load(&file)?;
            println!(
                "ok: {} sorts, {} symbols, {} rules, {} patterns",
                sys.trs().signature().sorts().len(),
                sys.trs().signature().symbols().len(),
                sys.trs().rules().len(),
                sys.patterns().len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Step { file, term: t } => {
            let sys = load(&file)?;
            let t = term(&sys, &t)?;
            let all = rewriting::redexes(sys.trs(), &t);
            if all.is_empty() {
                println!("no redexes");
            }
            for rdx in &all {
                let rule = &sys.trs().rules()[rdx.rule_index];
                match forbidden(&sys, &t, &rdx.position)? {
                    None => {
                        let next = rewriting::step(sys.trs(), &t, rdx)?;
                        println!("allowed   {}  rule {} ({rule})  ->  {next}", rdx.position, rdx.rule_index);
                    }
                    Some(w) => println!(
                        "forbidden {}  rule {} ({rule})  by pattern {} {} matched at {}",
                        rdx.position,
                        rdx.rule_index,
                        w.pattern_index,
                        sys.patterns()[w.pattern_index],
                        w.match_position
                    ),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce {
            file,
            term: t,
            max_steps,
        } => {
            let sys = load(&file)?;
            let mut cur = term(&sys, &t)?;
            println!("{cur}");
            for _ in 0..max_steps {
                let allowed = patterns::pi_redexes(&sys, &cur);
                let Some(rdx) = leftmost_innermost(&allowed) else {
                    println!("normal form reached");
                    return Ok(ExitCode::SUCCESS);
                };
                cur = rewriting::step(sys.trs(), &cur, rdx)?;
                println!("  -> {cur}    [rule {} at {}]", rdx.rule_index, rdx.position);
            }
            if patterns::is_pi_normal_form(&sys, &cur) {
                println!("normal form reached");
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("step budget of {max_steps} exhausted");
                Ok(ExitCode::from(1))
            }
        }
        Command::Normalize {
            file,
            term: t,
            max_steps,
            trace,
        } => {
            let sys = load(&file)?;
            let t = term(&sys, &t)?;
            let budget = Budget {
                steps: max_steps,
                ..Budget::default()
            };
            match normalize(&sys, &t, budget) {
                Ok(n) => {
                    for w in &n.warnings {
                        eprintln!("warning: {w}");
                    }
                    if trace {
                        println!("{}", n.trace);
                    }
                    println!("{}", n.term);
                    Ok(ExitCode::SUCCESS)
                }
                Err(Error::BudgetExhausted { steps, partial }) => {
                    eprintln!("step budget exhausted after {steps} steps; partial result:");
                    println!("{partial}");
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Check {
            file,
            simple,
            canonical,
            json,
        } => {
            let sys = load(&file)?;
            let (want_simple, want_canonical) = if simple || canonical {
                (simple, canonical)
            } else {
                (true, true)
            };
            let simple_report = is_simple(sys.patterns());
            let canonical_report = want_canonical.then(|| is_canonical(&sys));
            let mut ok = true;
            let mut violations = Vec::new();
            if want_simple {
                ok &= simple_report.is_simple();
                for (i, v) in &simple_report.violations {
                    violations.push(format!("pattern {i} {}: {v}", sys.patterns()[*i]));
                }
            }
            if let Some(r) = &canonical_report {
                ok &= r.is_canonical();
                if !want_simple {
                    for (i, v) in &r.simple.violations {
                        violations.push(format!("pattern {i} {}: {v}", sys.patterns()[*i]));
                    }
                }
                for v in &r.violations {
                    violations.push(v.to_string());
                }
            }
            if json {
                let mut out = json!({
                    "verdict": ok,
                    "violations": violations,
                });
                if want_simple {
                    out["simple"] = json!(simple_report.is_simple());
                }
                if let Some(r) = &canonical_report {
                    out["canonical"] = json!(r.is_canonical());
                    out["notes"] = json!(r.notes);
                }
                println!("{out}");
            } else {
                if want_simple {
                    println!("simple: {}", yes_no(simple_report.is_simple()));
                }
                if let Some(r) = &canonical_report {
                    println!("canonical: {}", yes_no(r.is_canonical()));
                    for n in &r.notes {
                        println!("note: {n}");
                    }
                }
                for v in &violations {
                    println!("violation: {v}");
                }
            }
            Ok(verdict(ok))
        }
        Command::Transform {
            file,
            tpdb,
            native: _,
            output,
        } => {
            let sys = load(&file)?;
            let res = transform(&sys)?;
            let text = if tpdb {
                export_tpdb(&res.trs)?
            } else {
                print_system(&res.system())
            };
            match output {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| Usage(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle {
            file,
            encoding,
            depth,
            mu,
        } => {
            let sys = load(&file)?;
            let sig = sys.trs().signature();
            let terms = enumerate_ground_all(sig, depth);
            let trs = sys.trs();
            let report = match encoding {
                Encoding::Innermost => {
                    let enc = sys.with_patterns(encode_innermost(trs))?;
                    compare_relations(
                        |t| patterns::pi_redexes(&enc, t),
                        |t| rewriting::innermost_redexes(trs, t),
                        &terms,
                    )
                }
                Encoding::Outermost => {
                    let enc = sys.with_patterns(encode_outermost(trs))?;
                    compare_relations(
                        |t| patterns::pi_redexes(&enc, t),
                        |t| rewriting::outermost_redexes(trs, t),
                        &terms,
                    )
                }
                Encoding::Csr => {
                    let spec = mu.ok_or_else(|| Usage("--encoding csr needs --mu".to_string()))?;
                    let mu = parse_mu(&spec, sig)?;
                    let enc = sys.with_patterns(encode_context_sensitive(&mu, sig)?)?;
                    compare_relations(
                        |t| patterns::pi_redexes(&enc, t),
                        |t| {
                            rewriting::redexes(trs, t)
                                .into_iter()
                                .filter(|r| mu_replacing(&mu, t, &r.position))
                                .collect()
                        },
                        &terms,
                    )
                }
            };
            println!(
                "terms compared: {}, discrepancies: {}",
                report.terms_compared,
                report.discrepancies.len()
            );
            for d in report.discrepancies.iter().take(20) {
                println!(
                    "  {}: only encoded {:?}, only direct {:?}",
                    d.term, d.only_first, d.only_second
                );
            }
            Ok(verdict(report.equal()))
        }
        Command::GroundCheck {
            file,
            depth,
            steps,
            json,
        } => {
            let sys = load(&file)?;
            let res = transform(&sys)?;
            let report = check_ground_correspondence(&sys, &res, depth, steps);
            if json {
                let cex: Vec<_> = report
                    .counterexamples
                    .iter()
                    .map(|c| {
                        json!({
                            "kind": c.kind.to_string(),
                            "source": c.source.to_string(),
                            "target": c.target.to_string(),
                        })
                    })
                    .collect();
                let out = json!({
                    "verdict": report.holds(),
                    "counterexamples": cex,
                    "terms_checked": report.terms_checked,
                    "pairs_checked": report.pairs_checked,
                    "steps_checked": report.steps_checked,
                    "truncated": report.truncated,
                });
                println!("{out}");
            } else {
                println!(
                    "checked {} ground terms, {} pairs, {} single steps",
                    report.terms_checked, report.pairs_checked, report.steps_checked
                );
                if report.truncated {
                    println!("warning: exploration truncated by the term limit");
                }
                println!("correspondence: {}", if report.holds() { "holds" } else { "fails" });
                for c in &report.counterexamples {
                    println!("counterexample: {c}");
                }
            }
            Ok(verdict(report.holds()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
