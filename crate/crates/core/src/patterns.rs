//! Rewriting restricted by forbidden patterns, the simple and canonical
//! pattern classes, and pattern encodings of common strategies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::rewriting::{self, check_symbols, Redex, Step, Trs};
use crate::term::{
    rename_apart_all, FreshNames, FunSym, PosOrder, Position, Substitution, Term, Variable,
};
use crate::unify::{match_term, unify};

/// Where a pattern forbids reduction relative to its distinguished position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Exactly at the position.
    Here,
    /// Strictly below the position.
    Below,
    /// Strictly above the position.
    Above,
}

impl Mode {
    pub fn letter(self) -> char {
        match self {
            Mode::Here => 'h',
            Mode::Below => 'b',
            Mode::Above => 'a',
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "h" => Ok(Mode::Here),
            "b" => Ok(Mode::Below),
            "a" => Ok(Mode::Above),
            other => Err(format!("unknown pattern mode `{other}` (expected h, b or a)")),
        }
    }
}

/// A triple `<term, pos, mode>`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ForbiddenPattern {
    term: Term,
    pos: Position,
    mode: Mode,
}

impl ForbiddenPattern {
    pub fn new(term: Term, pos: Position, mode: Mode) -> Result<Self, Error> {
        if !term.has_position(&pos) {
            return Err(Error::PositionOutOfRange {
                position: pos,
                term: term.to_string(),
            });
        }
        Ok(ForbiddenPattern { term, pos, mode })
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn pos(&self) -> &Position {
        &self.pos
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Whether a match of this pattern at `q'` forbids reduction at `p`.
    fn forbids(&self, match_at: &Position, p: &Position) -> bool {
        let target = match_at.concat(&self.pos);
        matches!(
            (self.mode, p.compare(&target)),
            (Mode::Here, PosOrder::Equal)
                | (Mode::Below, PosOrder::StrictlyBelow)
                | (Mode::Above, PosOrder::StrictlyAbove)
        )
    }
}

impl fmt::Display for ForbiddenPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}, {}>", self.term, self.pos, self.mode.letter())
    }
}

impl fmt::Debug for ForbiddenPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A rewrite system with a finite set of forbidden patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSystem {
    trs: Trs,
    patterns: Vec<ForbiddenPattern>,
    vars: Vec<Variable>,
}

impl PatternSystem {
    pub fn new(trs: Trs, patterns: Vec<ForbiddenPattern>) -> Result<Self, Error> {
        for p in &patterns {
            check_symbols(trs.signature(), p.term())?;
        }
        let mut vars = BTreeSet::new();
        for r in trs.rules() {
            vars.extend(r.lhs().var_set());
        }
        for p in &patterns {
            vars.extend(p.term().var_set());
        }
        Ok(PatternSystem {
            trs,
            patterns,
            vars: vars.into_iter().collect(),
        })
    }

    /// Adds declared variables that need not occur in any rule or pattern.
    pub fn with_declared_vars(mut self, declared: impl IntoIterator<Item = Variable>) -> Self {
        let mut all: BTreeSet<Variable> = self.vars.into_iter().collect();
        all.extend(declared);
        self.vars = all.into_iter().collect();
        self
    }

    pub fn trs(&self) -> &Trs {
        &self.trs
    }

    pub fn patterns(&self) -> &[ForbiddenPattern] {
        &self.patterns
    }

    /// Declared variables, sorted.
    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, name: &str) -> Option<&Variable> {
        self.vars.iter().find(|v| v.name() == name)
    }

    pub fn with_patterns(&self, patterns: Vec<ForbiddenPattern>) -> Result<Self, Error> {
        PatternSystem::new(self.trs.clone(), patterns)
            .map(|s| s.with_declared_vars(self.vars.iter().cloned()))
    }
}

/// Evidence that a position is forbidden: pattern `pattern_index` matches
/// the subject at `match_position` with `matcher`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbidWitness {
    pub pattern_index: usize,
    pub match_position: Position,
    pub matcher: Substitution,
}

/// The first witness (by pattern index, then match position) forbidding
/// reduction at `p`, if any.
pub fn forbidden(sys: &PatternSystem, t: &Term, p: &Position) -> Result<Option<ForbidWitness>, Error> {
    forbidden_by(sys.patterns(), t, p)
}

/// Like [`forbidden`] for a bare pattern list.
pub fn forbidden_by(
    patterns: &[ForbiddenPattern],
    t: &Term,
    p: &Position,
) -> Result<Option<ForbidWitness>, Error> {
    if !t.has_position(p) {
        return Err(Error::PositionOutOfRange {
            position: p.clone(),
            term: t.to_string(),
        });
    }
    let positions = t.positions();
    for (i, pat) in patterns.iter().enumerate() {
        for q in &positions {
            if !pat.forbids(q, p) {
                continue;
            }
            let sub = t.subterm_at(q).expect("own position");
            if let Some(matcher) = match_term(pat.term(), sub) {
                return Ok(Some(ForbidWitness {
                    pattern_index: i,
                    match_position: q.clone(),
                    matcher,
                }));
            }
        }
    }
    Ok(None)
}

/// Redexes of `t` that no pattern forbids.
pub fn pi_redexes(sys: &PatternSystem, t: &Term) -> Vec<Redex> {
    let mut verdicts: BTreeMap<Position, bool> = BTreeMap::new();
    rewriting::redexes(sys.trs(), t)
        .into_iter()
        .filter(|r| {
            *verdicts.entry(r.position.clone()).or_insert_with(|| {
                forbidden(sys, t, &r.position)
                    .expect("redex position exists")
                    .is_none()
            })
        })
        .collect()
}

/// A restricted step. Forbidden redexes are rejected with their witness.
pub fn pi_step(sys: &PatternSystem, t: &Term, rdx: &Redex) -> Result<Term, Error> {
    let result = rewriting::step(sys.trs(), t, rdx)?;
    if let Some(witness) = forbidden(sys, t, &rdx.position)? {
        return Err(Error::ForbiddenRedex {
            position: rdx.position.clone(),
            witness,
        });
    }
    Ok(result)
}

/// One-step restricted successors of `t`.
pub fn pi_successors(sys: &PatternSystem, t: &Term) -> Vec<Step> {
    pi_redexes(sys, t)
        .into_iter()
        .map(|rdx| Step {
            result: rewriting::step(sys.trs(), t, &rdx).expect("allowed redex"),
            position: rdx.position,
            rule_index: rdx.rule_index,
        })
        .collect()
}

pub fn is_pi_normal_form(sys: &PatternSystem, t: &Term) -> bool {
    pi_redexes(sys, t).is_empty()
}

/// Why a pattern is not simple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimpleViolation {
    /// Shape `<_, ε, h>`.
    HereAtRoot,
    /// Shape `<_, _, a>`.
    AbovePattern,
    NonLinear,
    /// The subterm at the distinguished position is neither a variable nor a
    /// symbol applied to distinct variables.
    NotFlatAtPosition,
    /// A position parallel to the distinguished one holds a non-variable.
    ParallelNonVariable { position: Position },
}

impl fmt::Display for SimpleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleViolation::HereAtRoot => f.write_str("here-pattern at the root position"),
            SimpleViolation::AbovePattern => f.write_str("above-pattern"),
            SimpleViolation::NonLinear => f.write_str("pattern term is not linear"),
            SimpleViolation::NotFlatAtPosition => {
                f.write_str("subterm at the pattern position is neither a variable nor flat")
            }
            SimpleViolation::ParallelNonVariable { position } => write!(
                f,
                "position {position} is parallel to the pattern position and holds a non-variable"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleReport {
    pub violations: Vec<(usize, SimpleViolation)>,
}

impl SimpleReport {
    pub fn is_simple(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every pattern against the simple-pattern restrictions.
pub fn is_simple(patterns: &[ForbiddenPattern]) -> SimpleReport {
    let mut violations = Vec::new();
    for (i, pat) in patterns.iter().enumerate() {
        match pat.mode() {
            Mode::Here if pat.pos().is_root() => violations.push((i, SimpleViolation::HereAtRoot)),
            Mode::Above => violations.push((i, SimpleViolation::AbovePattern)),
            _ => {}
        }
        let t = pat.term();
        if !t.is_linear() {
            violations.push((i, SimpleViolation::NonLinear));
        }
        let at_p = t.subterm_at(pat.pos()).expect("validated position");
        let flat = match at_p {
            Term::Var(_) => true,
            Term::App(_, args) => {
                args.iter().all(Term::is_var) && {
                    let distinct: BTreeSet<_> = args.iter().collect();
                    distinct.len() == args.len()
                }
            }
        };
        if !flat {
            violations.push((i, SimpleViolation::NotFlatAtPosition));
        }
        for q in t.positions() {
            if q.compare(pat.pos()) == PosOrder::Parallel && !t.subterm_at(&q).unwrap().is_var() {
                violations.push((i, SimpleViolation::ParallelNonVariable { position: q }));
            }
        }
    }
    SimpleReport { violations }
}

/// Which of the two overlap conditions of canonicity failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalViolation {
    pub pattern_index: usize,
    pub rule_index: usize,
    /// 1: a proper subterm of the pattern overlaps the left-hand side;
    /// 2: the pattern overlaps a subterm of the left-hand side.
    pub condition: u8,
    pub q: Position,
    pub q_prime: Position,
}

impl fmt::Display for CanonicalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pattern {} overlaps rule {} (condition {}, q = {}, q' = {})",
            self.pattern_index, self.rule_index, self.condition, self.q, self.q_prime
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CanonicalReport {
    pub simple: SimpleReport,
    pub violations: Vec<CanonicalViolation>,
    /// Condition-1 overlaps where `q.q'` lies outside the pattern term.
    pub notes: Vec<String>,
}

impl CanonicalReport {
    pub fn is_canonical(&self) -> bool {
        self.simple.is_simple() && self.violations.is_empty()
    }
}

/// Checks that no pattern blocks a step that is needed to create a redex.
///
/// Non-simple pattern sets are reported as not canonical without running the
/// overlap analysis.
pub fn is_canonical(sys: &PatternSystem) -> CanonicalReport {
    let simple = is_simple(sys.patterns());
    if !simple.is_simple() {
        return CanonicalReport {
            simple,
            ..Default::default()
        };
    }
    let mut report = CanonicalReport {
        simple,
        ..Default::default()
    };
    for (ri, rule) in sys.trs().rules().iter().enumerate() {
        let l = rule.lhs();
        for (pi, pat) in sys.patterns().iter().enumerate() {
            let (t, p, mode) = (pat.term(), pat.pos(), pat.mode());
            let (renamed, _) = rename_apart_all(&[t], &l.var_set());
            let t = &renamed[0];
            let mut names = FreshNames::avoiding(
                l.vars().iter().chain(t.vars().iter()).map(Variable::name),
            );
            let hole_sort = t.subterm_at(p).unwrap().sort().clone();
            let hole = Term::Var(names.fresh_var("x", &hole_sort));
            let t_prime = t.replace_at(p, hole).expect("same sort");
            let below_or_at = |pos: &Position| match mode {
                Mode::Here => pos == p,
                _ => p.compare(pos) == PosOrder::StrictlyAbove,
            };

            // (1) a proper non-variable subterm of t' unifies with l and some
            // non-variable position of l lands on (or below) p
            for q in t_prime.nonvar_positions().into_iter().filter(|q| !q.is_root()) {
                let sub = t_prime.subterm_at(&q).unwrap();
                if unify(sub, l).is_none() {
                    continue;
                }
                for q2 in l.nonvar_positions() {
                    let joined = q.concat(&q2);
                    if below_or_at(&joined) {
                        if !t.has_position(&joined) {
                            report.notes.push(format!(
                                "pattern {pi}, rule {ri}: q.q' = {joined} is not a position of {t}"
                            ));
                        }
                        report.violations.push(CanonicalViolation {
                            pattern_index: pi,
                            rule_index: ri,
                            condition: 1,
                            q: q.clone(),
                            q_prime: q2,
                        });
                        break;
                    }
                }
            }

            // (2) t' unifies with a subterm of l that has structure at (or
            // below) p
            for q in l.nonvar_positions() {
                let sub = l.subterm_at(&q).unwrap();
                if unify(&t_prime, sub).is_none() {
                    continue;
                }
                let hit = sub
                    .nonvar_positions()
                    .into_iter()
                    .find(|q2| below_or_at(q2));
                if let Some(q2) = hit {
                    report.violations.push(CanonicalViolation {
                        pattern_index: pi,
                        rule_index: ri,
                        condition: 2,
                        q,
                        q_prime: q2,
                    });
                }
            }
        }
    }
    report
}

/// A replacement map: the argument indices of each symbol that may be reduced.
pub type ReplacementMap = BTreeMap<FunSym, BTreeSet<usize>>;

fn flat_term(f: &FunSym) -> Term {
    let args = f
        .arg_sorts()
        .iter()
        .enumerate()
        .map(|(k, s)| Term::Var(Variable::new(&format!("x{}", k + 1), s.clone())))
        .collect();
    Term::app(f.clone(), args).expect("flat term is well-sorted")
}

/// Patterns making restricted rewriting coincide with context-sensitive
/// rewriting under `mu`. Symbols missing from `mu` are fully replacing.
pub fn encode_context_sensitive(
    mu: &ReplacementMap,
    sig: &crate::term::Signature,
) -> Result<Vec<ForbiddenPattern>, Error> {
    for (f, allowed) in mu {
        if !sig.contains_symbol(f) {
            return Err(Error::InvalidReplacementMap(format!("unknown symbol {}", f.name())));
        }
        if let Some(bad) = allowed.iter().find(|&&i| i == 0 || i > f.arity()) {
            return Err(Error::InvalidReplacementMap(format!(
                "{} has no argument {bad}",
                f.name()
            )));
        }
    }
    let mut out = Vec::new();
    for f in sig.symbols() {
        let Some(allowed) = mu.get(f) else { continue };
        let flat = flat_term(f);
        for j in (1..=f.arity()).filter(|j| !allowed.contains(j)) {
            for mode in [Mode::Here, Mode::Below] {
                out.push(ForbiddenPattern::new(flat.clone(), Position::new(vec![j]), mode)?);
            }
        }
    }
    Ok(out)
}

/// `<l, ε, a>` for every left-hand side: restricted steps are innermost steps.
pub fn encode_innermost(trs: &Trs) -> Vec<ForbiddenPattern> {
    encode_lhs(trs, Mode::Above)
}

/// `<l, ε, b>` for every left-hand side: restricted steps are outermost steps.
pub fn encode_outermost(trs: &Trs) -> Vec<ForbiddenPattern> {
    encode_lhs(trs, Mode::Below)
}

fn encode_lhs(trs: &Trs, mode: Mode) -> Vec<ForbiddenPattern> {
    trs.rules()
        .iter()
        .map(|r| ForbiddenPattern {
            term: r.lhs().clone(),
            pos: Position::root(),
            mode,
        })
        .collect()
}

/// Positions reachable from the root through arguments allowed by `mu`.
pub fn mu_replacing(mu: &ReplacementMap, t: &Term, p: &Position) -> bool {
    let mut cur = t;
    for &i in p.path() {
        let f = cur.root_symbol().expect("position inside term");
        if let Some(allowed) = mu.get(f) {
            if !allowed.contains(&i) {
                return false;
            }
        }
        cur = &cur.args()[i - 1];
    }
    true
}

/// Every non-variable term obtained from `l` by replacing some proper
/// subterms with fresh variables. Always includes `l` itself.
pub fn prunings(l: &Term) -> Vec<Term> {
    if l.is_var() {
        return Vec::new();
    }
    let mut names = FreshNames::avoiding(l.vars().iter().map(Variable::name));
    pruned_below(l, &mut names)
}

fn pruned_below(t: &Term, names: &mut FreshNames) -> Vec<Term> {
    let Term::App(f, args) = t else {
        return vec![t.clone()];
    };
    let mut combos: Vec<Vec<Term>> = vec![Vec::new()];
    for arg in args {
        let options = if arg.is_var() {
            vec![arg.clone()]
        } else {
            let mut o = vec![Term::Var(names.fresh_var("w", arg.sort()))];
            o.extend(pruned_below(arg, names));
            o
        };
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect();
    }
    combos
        .into_iter()
        .map(|args| Term::App(f.clone(), args))
        .collect()
}
