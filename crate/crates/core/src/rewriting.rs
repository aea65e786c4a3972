//! Unrestricted rewriting and the reference strategies used as oracles.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::Error;
use crate::term::{FunSym, Position, Signature, Substitution, Term};
use crate::unify::match_term;

/// A rewrite rule `lhs -> rhs`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    lhs: Term,
    rhs: Term,
}

impl Rule {
    /// Checks that both sides share a sort, the left-hand side is not a
    /// variable and the right-hand side introduces no new variables.
    pub fn new(lhs: Term, rhs: Term) -> Result<Rule, Error> {
        let reject = |reason| Error::InvalidRule {
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            reason,
        };
        if lhs.sort() != rhs.sort() {
            return Err(reject("sides have different sorts"));
        }
        if lhs.is_var() {
            return Err(reject("left-hand side is a variable"));
        }
        let lvars = lhs.var_set();
        if !rhs.var_set().is_subset(&lvars) {
            return Err(reject("right-hand side has extra variables"));
        }
        Ok(Rule { lhs, rhs })
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn is_left_linear(&self) -> bool {
        self.lhs.is_linear()
    }

    /// Variant of this rule with variables renamed to `_0, _1, ...`.
    pub fn canonical(&self) -> Rule {
        let mut v = crate::term::canonical_variant(&[&self.lhs, &self.rhs]);
        let rhs = v.pop().unwrap();
        let lhs = v.pop().unwrap();
        Rule { lhs, rhs }
    }

    /// True iff `self` is `other σ` for some `σ`.
    pub fn is_instance_of(&self, other: &Rule) -> bool {
        let mut sigma = Substitution::new();
        crate::unify::match_into(&other.lhs, &self.lhs, &mut sigma)
            && crate::unify::match_into(&other.rhs, &self.rhs, &mut sigma)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A term rewriting system over a many-sorted signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trs {
    signature: Signature,
    rules: Vec<Rule>,
}

impl Trs {
    pub fn new(signature: Signature, rules: Vec<Rule>) -> Result<Trs, Error> {
        for rule in &rules {
            for side in [rule.lhs(), rule.rhs()] {
                check_symbols(&signature, side)?;
            }
        }
        Ok(Trs { signature, rules })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Root symbols of left-hand sides.
    pub fn defined_symbols(&self) -> BTreeSet<FunSym> {
        self.rules
            .iter()
            .filter_map(|r| r.lhs().root_symbol().cloned())
            .collect()
    }

    pub fn constructors(&self) -> Vec<FunSym> {
        let defined = self.defined_symbols();
        self.signature
            .symbols()
            .iter()
            .filter(|f| !defined.contains(*f))
            .cloned()
            .collect()
    }

    pub fn is_left_linear(&self) -> bool {
        self.rules.iter().all(Rule::is_left_linear)
    }
}

pub(crate) fn check_symbols(sig: &Signature, t: &Term) -> Result<(), Error> {
    match t {
        Term::Var(v) => {
            if sig.sorts().contains(v.sort()) {
                Ok(())
            } else {
                Err(Error::UnknownSort(v.sort().name().to_string()))
            }
        }
        Term::App(f, args) => {
            if !sig.contains_symbol(f) {
                return Err(Error::ForeignSymbol(f.name().to_string()));
            }
            args.iter().try_for_each(|a| check_symbols(sig, a))
        }
    }
}

/// A rule instance occurring in a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub position: Position,
    pub rule_index: usize,
    pub matcher: Substitution,
}

/// All redexes of `t`, ordered by position (pre-order) and then rule index.
pub fn redexes(trs: &Trs, t: &Term) -> Vec<Redex> {
    let mut out = Vec::new();
    t.walk(&mut Vec::new(), &mut |path, sub| {
        if sub.is_var() {
            return;
        }
        for (i, rule) in trs.rules().iter().enumerate() {
            if let Some(matcher) = match_term(rule.lhs(), sub) {
                out.push(Redex {
                    position: Position::new(path.to_vec()),
                    rule_index: i,
                    matcher,
                });
            }
        }
    });
    out
}

/// Contracts `rdx` in `t`.
pub fn step(trs: &Trs, t: &Term, rdx: &Redex) -> Result<Term, Error> {
    let invalid = || Error::InvalidRedex {
        position: rdx.position.clone(),
        rule_index: rdx.rule_index,
    };
    let rule = trs.rules().get(rdx.rule_index).ok_or_else(invalid)?;
    let sub = t.subterm_at(&rdx.position).ok_or_else(invalid)?;
    if sub.is_var() || &rdx.matcher.apply(rule.lhs()) != sub {
        return Err(invalid());
    }
    t.replace_at(&rdx.position, rdx.matcher.apply(rule.rhs()))
}

/// Redexes with no other redex strictly below them.
pub fn innermost_redexes(trs: &Trs, t: &Term) -> Vec<Redex> {
    let all = redexes(trs, t);
    let positions: BTreeSet<&Position> = all.iter().map(|r| &r.position).collect();
    all.iter()
        .filter(|r| {
            !positions
                .iter()
                .any(|q| r.position.is_prefix_of(q) && r.position != **q)
        })
        .cloned()
        .collect()
}

/// Redexes with no other redex strictly above them.
pub fn outermost_redexes(trs: &Trs, t: &Term) -> Vec<Redex> {
    let all = redexes(trs, t);
    let positions: BTreeSet<&Position> = all.iter().map(|r| &r.position).collect();
    all.iter()
        .filter(|r| {
            !positions
                .iter()
                .any(|q| q.is_prefix_of(&r.position) && r.position != **q)
        })
        .cloned()
        .collect()
}

/// One parallel-outermost step: every outermost redex is contracted at once,
/// using the first matching rule at each position. `None` on normal forms.
pub fn parallel_outermost_step(trs: &Trs, t: &Term) -> Option<Term> {
    let mut seen = BTreeSet::new();
    let chosen: Vec<Redex> = outermost_redexes(trs, t)
        .into_iter()
        .filter(|r| seen.insert(r.position.clone()))
        .collect();
    if chosen.is_empty() {
        return None;
    }
    let mut out = t.clone();
    for rdx in &chosen {
        // outermost redexes are pairwise parallel, so order does not matter
        out = step(trs, &out, rdx).expect("outermost redexes are disjoint");
    }
    Some(out)
}

/// One rewrite step together with how it was made.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub position: Position,
    pub rule_index: usize,
    pub result: Term,
}

/// Every one-step successor of `t`.
pub fn successors(trs: &Trs, t: &Term) -> Vec<Step> {
    redexes(trs, t)
        .into_iter()
        .map(|rdx| Step {
            result: step(trs, t, &rdx).expect("redex was just computed"),
            position: rdx.position,
            rule_index: rdx.rule_index,
        })
        .collect()
}

/// A derivation `start -> steps[0].result -> steps[1].result -> ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTrace {
    pub start: Term,
    pub steps: Vec<Step>,
}

impl DerivationTrace {
    pub fn new(start: Term) -> Self {
        DerivationTrace {
            start,
            steps: Vec::new(),
        }
    }

    pub fn last(&self) -> &Term {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl fmt::Display for DerivationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for s in &self.steps {
            write!(f, "\n  -> {}    [rule {} at {}]", s.result, s.rule_index, s.position)?;
        }
        Ok(())
    }
}

/// The step `(from, position, rule)` that first reached a term.
pub type Predecessor = (Term, Position, usize);

/// Breadth-first exploration of a reduction graph.
#[derive(Clone, Debug)]
pub struct Exploration {
    pub start: Term,
    /// Each reached term with its distance and the step that first reached it.
    pub reached: HashMap<Term, (usize, Option<Predecessor>)>,
    /// Whether `max_terms` cut the search short.
    pub truncated: bool,
}

impl Exploration {
    pub fn terms(&self) -> BTreeSet<Term> {
        self.reached.keys().cloned().collect()
    }

    pub fn distance(&self, t: &Term) -> Option<usize> {
        self.reached.get(t).map(|(d, _)| *d)
    }

    /// The derivation from the start term to `t`, if `t` was reached.
    pub fn path_to(&self, t: &Term) -> Option<DerivationTrace> {
        self.reached.get(t)?;
        let mut steps = Vec::new();
        let mut cur = t.clone();
        while let Some((d, Some((prev, pos, rule)))) = self.reached.get(&cur) {
            steps.push(Step {
                position: pos.clone(),
                rule_index: *rule,
                result: cur.clone(),
            });
            if *d <= 1 {
                break;
            }
            cur = prev.clone();
        }
        steps.reverse();
        Some(DerivationTrace {
            start: self.start.clone(),
            steps,
        })
    }
}

/// Explores everything reachable from `start` in at most `max_steps` steps.
///
/// With `strict` set, the start term only counts as reached when some
/// non-empty derivation leads back to it.
pub fn explore(
    start: &Term,
    max_steps: usize,
    max_terms: usize,
    strict: bool,
    mut succ: impl FnMut(&Term) -> Vec<Step>,
) -> Exploration {
    let mut reached = HashMap::new();
    let mut queue = VecDeque::new();
    let mut truncated = false;
    if strict {
        for s in succ(start) {
            if reached.len() >= max_terms {
                truncated = true;
                break;
            }
            if !reached.contains_key(&s.result) && max_steps >= 1 {
                reached.insert(
                    s.result.clone(),
                    (1, Some((start.clone(), s.position, s.rule_index))),
                );
                queue.push_back((s.result, 1));
            }
        }
    } else {
        reached.insert(start.clone(), (0, None));
        queue.push_back((start.clone(), 0));
    }
    while let Some((t, d)) = queue.pop_front() {
        if d >= max_steps {
            continue;
        }
        for s in succ(&t) {
            if reached.contains_key(&s.result) {
                continue;
            }
            if reached.len() >= max_terms {
                truncated = true;
                break;
            }
            reached.insert(
                s.result.clone(),
                (d + 1, Some((t.clone(), s.position, s.rule_index))),
            );
            queue.push_back((s.result, d + 1));
        }
    }
    Exploration {
        start: start.clone(),
        reached,
        truncated,
    }
}

/// Terms reachable from `t` in at most `max_steps` steps.
#[derive(Clone, Debug)]
pub struct Reachable {
    pub terms: BTreeSet<Term>,
    pub truncated: bool,
}

pub fn reachable(trs: &Trs, t: &Term, max_steps: usize, max_terms: usize) -> Reachable {
    let ex = explore(t, max_steps, max_terms, false, |u| successors(trs, u));
    Reachable {
        terms: ex.terms(),
        truncated: ex.truncated,
    }
}

/// Outcome of the bounded head-normal form test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeadNormality {
    /// A root step is possible at the end of the given derivation.
    RootStepFound(DerivationTrace),
    NoRootStepWithinBound { truncated: bool },
}

pub const DEFAULT_MAX_TERMS: usize = 100_000;

/// Searches derivations of length at most `max_steps` for a term that is
/// reducible at the root.
pub fn is_head_normal_bounded(trs: &Trs, t: &Term, max_steps: usize) -> HeadNormality {
    let ex = explore(t, max_steps, DEFAULT_MAX_TERMS, false, |u| successors(trs, u));
    let root_reducible = |u: &Term| {
        trs.rules()
            .iter()
            .any(|r| match_term(r.lhs(), u).is_some())
    };
    let mut hits: Vec<(&Term, usize)> = ex
        .reached
        .iter()
        .filter(|(u, _)| root_reducible(u))
        .map(|(u, (d, _))| (u, *d))
        .collect();
    hits.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)));
    match hits.first() {
        Some((u, _)) => HeadNormality::RootStepFound(ex.path_to(u).expect("reached")),
        None => HeadNormality::NoRootStepWithinBound {
            truncated: ex.truncated,
        },
    }
}
