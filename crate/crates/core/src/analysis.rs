//! Bounded checking: ground term enumeration, loop search, normalization
//! via restricted normal forms, and comparisons between relations.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::Error;
use crate::patterns::{self, is_canonical, pi_redexes, PatternSystem};
use crate::rewriting::{self, explore, DerivationTrace, Redex, Step, DEFAULT_MAX_TERMS};
use crate::term::{Position, Signature, Sort, Term};
use crate::transform::TransformResult;

/// All ground terms of one sort up to a depth (constants have depth 1).
#[derive(Clone, Debug)]
pub struct GroundEnumeration {
    pub sort: Sort,
    pub max_depth: usize,
    /// Ordered by depth, then by construction order.
    pub terms: Vec<Term>,
}

/// Enumerates ground terms of `sort` with depth at most `max_depth`.
pub fn enumerate_ground(sig: &Signature, sort: &Sort, max_depth: usize) -> GroundEnumeration {
    let levels = ground_levels(sig, max_depth);
    let terms = levels
        .iter()
        .flat_map(|level| level.get(sort).into_iter().flatten().cloned())
        .collect();
    GroundEnumeration {
        sort: sort.clone(),
        max_depth,
        terms,
    }
}

/// Ground terms of every sort up to the depth, sorts in declaration order.
pub fn enumerate_ground_all(sig: &Signature, max_depth: usize) -> Vec<Term> {
    sig.sorts()
        .iter()
        .flat_map(|s| enumerate_ground(sig, s, max_depth).terms)
        .collect()
}

/// `levels[d]` holds, per sort, the terms of depth exactly `d + 1`.
fn ground_levels(sig: &Signature, max_depth: usize) -> Vec<BTreeMap<Sort, Vec<Term>>> {
    let mut levels: Vec<BTreeMap<Sort, Vec<Term>>> = Vec::new();
    // all terms of depth <= current, per sort
    let mut upto: BTreeMap<Sort, Vec<Term>> = BTreeMap::new();
    for depth in 1..=max_depth {
        let mut exact: BTreeMap<Sort, Vec<Term>> = BTreeMap::new();
        for f in sig.symbols() {
            let mut combos: Vec<(Vec<Term>, bool)> = vec![(Vec::new(), false)];
            for s in f.arg_sorts() {
                let options = upto.get(s).map(Vec::as_slice).unwrap_or(&[]);
                combos = combos
                    .into_iter()
                    .flat_map(|(prefix, deep)| {
                        options.iter().map(move |o| {
                            let mut v = prefix.clone();
                            v.push(o.clone());
                            (v, deep || o.depth() == depth - 1)
                        })
                    })
                    .collect();
            }
            // exactly one level deeper: at least one argument of maximal depth
            let terms = combos
                .into_iter()
                .filter(|(args, deep)| *deep || (args.is_empty() && depth == 1))
                .map(|(args, _)| Term::App(f.clone(), args));
            exact.entry(f.result_sort().clone()).or_default().extend(terms);
        }
        for (s, ts) in &exact {
            upto.entry(s.clone()).or_default().extend(ts.iter().cloned());
        }
        levels.push(exact);
    }
    levels
}

/// Result of a bounded loop search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSearch {
    /// A derivation whose last term already occurs earlier in it.
    pub found: Option<DerivationTrace>,
    /// Whether some derivation was cut off by the step or term budget, so
    /// that `found == None` is not conclusive.
    pub budget_exhausted: bool,
}

/// Searches the reduction graph of `t` up to `max_steps` steps for a cycle.
pub fn find_loop(step_fn: impl FnMut(&Term) -> Vec<Step>, t: &Term, max_steps: usize) -> LoopSearch {
    find_loop_limited(step_fn, t, max_steps, DEFAULT_MAX_TERMS)
}

pub fn find_loop_limited(
    mut step_fn: impl FnMut(&Term) -> Vec<Step>,
    t: &Term,
    max_steps: usize,
    max_terms: usize,
) -> LoopSearch {
    // explicit graph of everything within the bound
    let mut index: HashMap<Term, usize> = HashMap::new();
    let mut nodes: Vec<Term> = vec![t.clone()];
    let mut edges: Vec<Vec<(usize, Position, usize)>> = vec![Vec::new()];
    let mut dist = vec![0usize];
    let mut exhausted = false;
    index.insert(t.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        let succ = step_fn(&nodes[n]);
        if dist[n] >= max_steps {
            if !succ.is_empty() {
                exhausted = true;
            }
            continue;
        }
        for s in succ {
            let m = match index.get(&s.result) {
                Some(&m) => m,
                None => {
                    if nodes.len() >= max_terms {
                        exhausted = true;
                        continue;
                    }
                    let m = nodes.len();
                    index.insert(s.result.clone(), m);
                    nodes.push(s.result.clone());
                    edges.push(Vec::new());
                    dist.push(dist[n] + 1);
                    queue.push_back(m);
                    m
                }
            };
            edges[n].push((m, s.position, s.rule_index));
        }
    }

    // depth-first search for a back edge
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Grey,
        Black,
    }
    let mut color = vec![Color::White; nodes.len()];
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    color[0] = Color::Grey;
    while let Some(&mut (n, ref mut next)) = stack.last_mut() {
        if *next >= edges[n].len() {
            color[n] = Color::Black;
            stack.pop();
            continue;
        }
        let (m, _, _) = edges[n][*next];
        *next += 1;
        match color[m] {
            Color::White => {
                color[m] = Color::Grey;
                stack.push((m, 0));
            }
            Color::Grey => {
                let mut trace = DerivationTrace::new(t.clone());
                for &(a, taken) in &stack {
                    let (b, pos, rule) = &edges[a][taken - 1];
                    trace.steps.push(Step {
                        position: pos.clone(),
                        rule_index: *rule,
                        result: nodes[*b].clone(),
                    });
                }
                return LoopSearch {
                    found: Some(trace),
                    budget_exhausted: exhausted,
                };
            }
            Color::Black => {}
        }
    }
    LoopSearch {
        found: None,
        budget_exhausted: exhausted,
    }
}

/// Restricted one-step successors, for use with [`find_loop`].
pub fn pi_step_fn(sys: &PatternSystem) -> impl FnMut(&Term) -> Vec<Step> + '_ {
    move |t| patterns::pi_successors(sys, t)
}

/// Outcome of [`normalize`].
#[derive(Clone, Debug)]
pub struct Normalized {
    pub term: Term,
    /// Every step, with positions relative to the whole term.
    pub trace: DerivationTrace,
    /// Preconditions that do not hold (left-linearity, canonicity). The
    /// result is still computed but may not be a normal form.
    pub warnings: Vec<String>,
}

/// Budgets for [`normalize`].
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub steps: usize,
    pub depth: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            steps: 10_000,
            depth: 1_000,
        }
    }
}

/// The allowed redex with no allowed redex strictly below it that comes
/// first in pre-order.
pub fn leftmost_innermost(allowed: &[Redex]) -> Option<&Redex> {
    allowed.iter().find(|r| {
        !allowed
            .iter()
            .any(|o| r.position.is_prefix_of(&o.position) && r.position != o.position)
    })
}

/// Computes a restricted normal form of `t` and repeats on its immediate
/// subterms, each treated as a term of its own.
///
/// For a left-linear, confluent system with canonical patterns under which
/// restricted rewriting terminates, the result is the normal form of `t`.
pub fn normalize(sys: &PatternSystem, t: &Term, budget: Budget) -> Result<Normalized, Error> {
    let mut warnings = Vec::new();
    if !sys.trs().is_left_linear() {
        warnings.push("the system is not left-linear".to_string());
    }
    let report = is_canonical(sys);
    if !report.is_canonical() {
        warnings.push("the patterns are not canonical".to_string());
    }
    let mut state = NormState {
        sys,
        term: t.clone(),
        trace: DerivationTrace::new(t.clone()),
        budget,
    };
    match state.run(&Position::root(), 0) {
        Ok(()) => Ok(Normalized {
            term: state.term,
            trace: state.trace,
            warnings,
        }),
        Err(()) => Err(Error::BudgetExhausted {
            steps: state.trace.len(),
            partial: Box::new(state.term),
        }),
    }
}

struct NormState<'a> {
    sys: &'a PatternSystem,
    term: Term,
    trace: DerivationTrace,
    budget: Budget,
}

impl NormState<'_> {
    fn run(&mut self, at: &Position, depth: usize) -> Result<(), ()> {
        if depth > self.budget.depth {
            return Err(());
        }
        loop {
            let sub = self.term.subterm_at(at).expect("position kept valid").clone();
            let allowed = pi_redexes(self.sys, &sub);
            let Some(rdx) = leftmost_innermost(&allowed) else { break };
            if self.trace.len() >= self.budget.steps {
                return Err(());
            }
            let reduced = rewriting::step(self.sys.trs(), &sub, rdx).expect("allowed redex");
            self.term = self.term.replace_at(at, reduced).expect("sorts agree");
            self.trace.steps.push(Step {
                position: at.concat(&rdx.position),
                rule_index: rdx.rule_index,
                result: self.term.clone(),
            });
        }
        let arity = self.term.subterm_at(at).expect("position kept valid").args().len();
        for i in 1..=arity {
            self.run(&at.child(i), depth + 1)?;
        }
        Ok(())
    }
}

/// Kinds of disagreement between the restricted relation and the
/// transformed system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CounterexampleKind {
    /// `s ->+ t` under the patterns, but `top(t)` is not reached from `top(s)`.
    Forward,
    /// `top(s) ->+ top(t)` in the transformed system, but `t` is not reached
    /// from `s` under the patterns.
    Converse,
    /// A restricted step `s -> t` without a transformed step `top(s) -> top(t)`.
    OneStep,
    /// A transformed step not mirrored by a restricted step with the
    /// originating rule.
    Compatibility,
    /// A transformed derivation from `top(s)` left the `top(_)` shape.
    TopLost,
}

impl fmt::Display for CounterexampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CounterexampleKind::Forward => "forward",
            CounterexampleKind::Converse => "converse",
            CounterexampleKind::OneStep => "one-step",
            CounterexampleKind::Compatibility => "compatibility",
            CounterexampleKind::TopLost => "top-lost",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub kind: CounterexampleKind,
    pub source: Term,
    pub target: Term,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} => {}", self.kind, self.source, self.target)
    }
}

#[derive(Clone, Debug, Default)]
pub struct CorrespondenceReport {
    pub terms_checked: usize,
    /// Number of `(s, t)` pairs compared in either direction.
    pub pairs_checked: usize,
    /// Number of single restricted steps checked for a transformed step.
    pub steps_checked: usize,
    pub counterexamples: Vec<Counterexample>,
    /// Some exploration hit the term limit.
    pub truncated: bool,
}

impl CorrespondenceReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Compares `s ->+ t` under the patterns with `top(s) ->+ top(t)` in the
/// transformed system for every ground `s` up to `depth`.
///
/// Restricted derivations of at most `k` steps must be matched by
/// transformed ones of at most `2k` steps, and transformed derivations of at
/// most `k` steps by restricted ones of at most `k` steps. Every single
/// restricted step and every single transformed step is also checked
/// against its counterpart.
pub fn check_ground_correspondence(
    sys: &PatternSystem,
    transformed: &TransformResult,
    depth: usize,
    k: usize,
) -> CorrespondenceReport {
    let ext = &transformed.ext;
    let t_trs = &transformed.trs;
    let mut report = CorrespondenceReport::default();
    for s in enumerate_ground_all(sys.trs().signature(), depth) {
        report.terms_checked += 1;
        let top_s = ext.wrap(&s);
        let pi = explore(&s, k, DEFAULT_MAX_TERMS, true, |u| patterns::pi_successors(sys, u));
        let tt = explore(&top_s, 2 * k, DEFAULT_MAX_TERMS, true, |u| rewriting::successors(t_trs, u));
        report.truncated |= pi.truncated || tt.truncated;
        let mut push = |kind, target: &Term| {
            report.counterexamples.push(Counterexample {
                kind,
                source: s.clone(),
                target: target.clone(),
            })
        };

        for t in pi.reached.keys() {
            report.pairs_checked += 1;
            if !tt.reached.contains_key(&ext.wrap(t)) {
                push(CounterexampleKind::Forward, t);
            }
        }
        for (u, (d, _)) in &tt.reached {
            let inner = match u.root_symbol() {
                Some(f) if ext.is_top(f) => &u.args()[0],
                _ => {
                    push(CounterexampleKind::TopLost, u);
                    continue;
                }
            };
            if *d > k {
                continue;
            }
            report.pairs_checked += 1;
            if !pi.reached.contains_key(inner) {
                push(CounterexampleKind::Converse, inner);
            }
        }

        let pi_steps = patterns::pi_successors(sys, &s);
        let t_steps = rewriting::successors(t_trs, &top_s);
        for st in &pi_steps {
            report.steps_checked += 1;
            if !t_steps.iter().any(|ts| ts.result == ext.wrap(&st.result)) {
                push(CounterexampleKind::OneStep, &st.result);
            }
        }
        for ts in &t_steps {
            let origin = transformed.origins[ts.rule_index];
            let ok = ts.result.root_symbol().is_some_and(|f| ext.is_top(f))
                && pi_steps
                    .iter()
                    .any(|st| st.rule_index == origin && ext.wrap(&st.result) == ts.result);
            if !ok {
                push(CounterexampleKind::Compatibility, &ts.result);
            }
        }
    }
    report
}

/// Per-term difference between two redex sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub term: Term,
    pub only_first: Vec<(Position, usize)>,
    pub only_second: Vec<(Position, usize)>,
}

#[derive(Clone, Debug, Default)]
pub struct RelationReport {
    pub terms_compared: usize,
    pub discrepancies: Vec<Discrepancy>,
}

impl RelationReport {
    pub fn equal(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Compares the redexes (position and rule) chosen by two functions on each
/// term.
pub fn compare_relations<'t>(
    mut first: impl FnMut(&Term) -> Vec<Redex>,
    mut second: impl FnMut(&Term) -> Vec<Redex>,
    terms: impl IntoIterator<Item = &'t Term>,
) -> RelationReport {
    let key = |rs: Vec<Redex>| -> BTreeSet<(Position, usize)> {
        rs.into_iter().map(|r| (r.position, r.rule_index)).collect()
    };
    let mut report = RelationReport::default();
    for t in terms {
        report.terms_compared += 1;
        let a = key(first(t));
        let b = key(second(t));
        if a != b {
            report.discrepancies.push(Discrepancy {
                term: t.clone(),
                only_first: a.difference(&b).cloned().collect(),
                only_second: b.difference(&a).cloned().collect(),
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_system, parse_term};
    use crate::transform::transform;

    const EX2ND: &str = include_str!("../systems/ex2nd.trs");
    const APP: &str = include_str!("../systems/app.trs");

    /// Number of ground terms of depth at most `d`, by the usual recurrence.
    fn count(sig: &Signature, sort: &Sort, d: usize) -> usize {
        if d == 0 {
            return 0;
        }
        sig.symbols_of_sort(sort)
            .map(|f| f.arg_sorts().iter().map(|s| count(sig, s, d - 1)).product::<usize>())
            .sum()
    }

    #[test]
    fn enumeration_is_exhaustive_and_duplicate_free() {
        for text in [EX2ND, APP, include_str!("../systems/faa.trs")] {
            let sys = parse_system(text).unwrap();
            let sig = sys.trs().signature();
            for sort in sig.sorts() {
                for d in 0..=3 {
                    let e = enumerate_ground(sig, sort, d);
                    assert_eq!(e.terms.len(), count(sig, sort, d), "{sort} depth {d}");
                    let distinct: BTreeSet<_> = e.terms.iter().collect();
                    assert_eq!(distinct.len(), e.terms.len());
                    assert!(e.terms.iter().all(|t| t.is_ground() && t.depth() <= d && t.sort() == sort));
                }
            }
        }
    }

    #[test]
    fn small_enumerations() {
        let sys = parse_system(APP).unwrap();
        let sig = sys.trs().signature();
        let nat = sig.sort("Nat").unwrap();
        let shown: Vec<String> = enumerate_ground(sig, nat, 2).terms.iter().map(|t| t.to_string()).collect();
        // take also produces a Nat
        assert_eq!(shown, ["0", "s(0)", "take(0, nil)"]);
        assert_eq!(enumerate_ground(sig, nat, 1).terms.len(), 1);
        assert!(enumerate_ground(sig, nat, 0).terms.is_empty());

        let empty = parse_system("sorts A ; fun f : A -> A ;").unwrap();
        let a = empty.trs().signature().sort("A").unwrap();
        assert!(enumerate_ground(empty.trs().signature(), a, 5).terms.is_empty());
    }

    #[test]
    fn loops() {
        let sys = parse_system(include_str!("../systems/top.trs")).unwrap();
        let a = parse_term(&sys, "a").unwrap();
        let trace = find_loop(pi_step_fn(&sys), &a, 10).found.expect("a -> f(a) -> a");
        assert_eq!(trace.len(), 2);
        assert_eq!(trace.last(), &a);

        let sys = parse_system(EX2ND).unwrap();
        let t = parse_term(&sys, "inf(0)").unwrap();
        let search = find_loop(pi_step_fn(&sys), &t, 50);
        assert_eq!(search.found, None);
        assert!(!search.budget_exhausted);

        // plain rewriting from inf(0) never stops: the budget runs out
        let search = find_loop(|u| rewriting::successors(sys.trs(), u), &t, 5);
        assert_eq!(search.found, None);
        assert!(search.budget_exhausted);

        let nf = parse_term(&sys, "s(0)").unwrap();
        assert_eq!(find_loop(pi_step_fn(&sys), &nf, 10).found, None);
    }

    #[test]
    fn normalization() {
        let sys = parse_system(EX2ND).unwrap();
        let t = parse_term(&sys, "2nd(inf(0))").unwrap();
        let n = normalize(&sys, &t, Budget::default()).unwrap();
        assert_eq!(n.term, parse_term(&sys, "s(0)").unwrap());
        assert_eq!(n.trace.len(), 3);
        assert!(n.warnings.is_empty());

        let sys = parse_system(APP).unwrap();
        let t = parse_term(&sys, "cons(0, app(nil, nil))").unwrap();
        let n = normalize(&sys, &t, Budget::default()).unwrap();
        assert_eq!(n.term, parse_term(&sys, "cons(0, nil)").unwrap());

        let sys = parse_system(include_str!("../systems/parout.trs")).unwrap();
        for src in ["g(a, b)", "f(a, c)"] {
            let n = normalize(&sys, &parse_term(&sys, src).unwrap(), Budget::default()).unwrap();
            assert_eq!(n.term, parse_term(&sys, "d").unwrap());
            assert!(!n.warnings.is_empty());
        }
    }

    #[test]
    fn normalization_budget() {
        let sys = parse_system(include_str!("../systems/top.trs")).unwrap();
        let a = parse_term(&sys, "a").unwrap();
        let tight = Budget { steps: 7, depth: 10 };
        match normalize(&sys, &a, tight) {
            Err(Error::BudgetExhausted { steps, .. }) => assert_eq!(steps, 7),
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn correspondence_on_small_systems() {
        for text in [EX2ND, include_str!("../systems/top.trs"), include_str!("../systems/inst.trs")] {
            let sys = parse_system(text).unwrap();
            let res = transform(&sys).unwrap();
            let report = check_ground_correspondence(&sys, &res, 3, 4);
            assert!(report.holds(), "{:?}", report.counterexamples);
            assert!(report.terms_checked > 0);
        }
    }

    #[test]
    fn no_patterns_means_plain_rewriting_under_top() {
        let sys = parse_system("fun f/1 ; fun g/1 ; fun a/0 ; var x ; rule f(x) -> g(x) ; rule a -> g(a) ;").unwrap();
        let res = transform(&sys).unwrap();
        assert_eq!(res.trs.rules(), sys.trs().rules());
        let report = check_ground_correspondence(&sys, &res, 3, 3);
        assert!(report.holds());
        let terms = enumerate_ground_all(sys.trs().signature(), 3);
        let same = compare_relations(
            |t| pi_redexes(&sys, t),
            |t| rewriting::redexes(sys.trs(), t),
            &terms,
        );
        assert!(same.equal());
        assert_eq!(same.terms_compared, terms.len());
    }

    #[test]
    fn discrepancies_are_reported() {
        let sys = parse_system(EX2ND).unwrap();
        let terms = [parse_term(&sys, "cons(0, cons(0, inf(0)))").unwrap()];
        let report = compare_relations(
            |t| pi_redexes(&sys, t),
            |t| rewriting::redexes(sys.trs(), t),
            &terms,
        );
        assert_eq!(report.discrepancies.len(), 1);
        assert_eq!(report.discrepancies[0].only_second, [("2.2".parse().unwrap(), 0)]);
    }
}
