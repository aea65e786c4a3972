//! Transformation of a rewrite system with linear here-patterns into an
//! ordinary rewrite system with the same ground derivations (under a fresh
//! `top` symbol per sort).
//!
//! Rules are instantiated and embedded into minimal contexts until every
//! rule either can fire in no forbidden configuration (stable) or always
//! fires in one (obsolete).

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::Error;
use crate::patterns::{forbidden_by, ForbiddenPattern, Mode, PatternSystem};
use crate::rewriting::{Rule, Trs};
use crate::term::{
    rename_apart, FreshNames, FunSym, Position, Signature, Sort, Substitution, Term, Variable,
};
use crate::unify::{match_term, unify};

/// Upper bound on the number of distinct rules the transformation may
/// generate before giving up.
pub const MAX_GENERATED_RULES: usize = 200_000;

/// A rule together with the position of the original rule inside it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TaggedRule {
    pub rule: Rule,
    pub tag: Position,
    /// Index of the original rule this one was derived from.
    pub origin: usize,
}

impl TaggedRule {
    fn key(&self) -> (Rule, Position) {
        (self.rule.canonical(), self.tag.clone())
    }
}

impl fmt::Display for TaggedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.rule, self.tag)
    }
}

impl fmt::Debug for TaggedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A signature extended with one unary `top` symbol per sort.
#[derive(Clone, Debug)]
pub struct ExtendedSignature {
    base: Signature,
    full: Signature,
    tops: BTreeMap<Sort, FunSym>,
}

impl ExtendedSignature {
    /// Top symbols are named `top_<sort>`, with underscores appended until
    /// the name is free.
    pub fn new(base: &Signature) -> Self {
        let mut full = base.clone();
        let mut tops = BTreeMap::new();
        for s in base.sorts() {
            let mut name = format!("top_{s}");
            while full.symbol(&name).is_some() {
                name.push('_');
            }
            let top = full
                .add_symbol(&name, vec![s.clone()], s.clone())
                .expect("name is free and sort is known");
            tops.insert(s.clone(), top);
        }
        ExtendedSignature { base: base.clone(), full, tops }
    }

    pub fn base(&self) -> &Signature {
        &self.base
    }

    /// The base signature plus every top symbol.
    pub fn signature(&self) -> &Signature {
        &self.full
    }

    pub fn top(&self, sort: &Sort) -> &FunSym {
        &self.tops[sort]
    }

    pub fn is_top(&self, f: &FunSym) -> bool {
        self.tops.get(f.result_sort()) == Some(f)
    }

    /// `top(t)` for the sort of `t`.
    pub fn wrap(&self, t: &Term) -> Term {
        Term::App(self.top(t.sort()).clone(), vec![t.clone()])
    }

    fn is_top_rooted(&self, t: &Term) -> bool {
        t.root_symbol().is_some_and(|f| self.is_top(f))
    }
}

/// Everything the transformation produced.
#[derive(Clone, Debug)]
pub struct TransformResult {
    /// The transformed system: accepted rules minus subsumed ones, over the
    /// base signature plus the top symbols that occur in them.
    pub trs: Trs,
    /// For each rule of `trs`, the index of the original rule it came from.
    pub origins: Vec<usize>,
    /// All stable rules, in the order they were accepted.
    pub accepted: Vec<TaggedRule>,
    /// Accepted rules left out of `trs` because they are instances of
    /// another accepted rule.
    pub subsumed: Vec<TaggedRule>,
    pub obsolete: Vec<TaggedRule>,
    /// Rules with no successors that are neither stable nor obsolete. Always
    /// empty when the theory holds.
    pub stuck: Vec<TaggedRule>,
    pub iterations: usize,
    pub ext: ExtendedSignature,
}

impl TransformResult {
    /// The transformed system as a pattern system without patterns, ready
    /// for printing.
    pub fn system(&self) -> PatternSystem {
        PatternSystem::new(self.trs.clone(), Vec::new()).expect("rules are over the signature")
    }
}

fn check_patterns(patterns: &[ForbiddenPattern]) -> Result<(), Error> {
    for (i, p) in patterns.iter().enumerate() {
        if p.mode() != Mode::Here {
            return Err(Error::UnsupportedPatternMode(i));
        }
        if !p.term().is_linear() {
            return Err(Error::NonLinearPattern(i));
        }
    }
    Ok(())
}

/// Whether `a` and `b` unify after renaming `b` apart from `a`.
fn unifiable_apart(a: &Term, b: &Term) -> bool {
    let b = rename_apart(b, &a.var_set());
    unify(a, &b).is_some()
}

/// Variables of `l` whose instantiation may complete a pattern match that
/// would forbid the position `p`.
pub fn relevant_vars(patterns: &[ForbiddenPattern], l: &Term, p: &Position) -> BTreeSet<Variable> {
    let mut out = BTreeSet::new();
    for pat in patterns {
        let Some(q) = pat.pos().strip_suffix(p) else { continue };
        let Some(u_q) = pat.term().subterm_at(&q) else { continue };
        let u_q = rename_apart(u_q, &l.var_set());
        if let Some(theta) = unify(&u_q, l) {
            for x in l.var_set() {
                if !theta.apply(&Term::Var(x.clone())).is_var() {
                    out.insert(x);
                }
            }
        }
    }
    out
}

/// One-step instantiations: each relevant variable replaced by each symbol
/// of its sort applied to fresh variables.
pub fn instantiations(
    ext: &ExtendedSignature,
    patterns: &[ForbiddenPattern],
    tr: &TaggedRule,
) -> Vec<TaggedRule> {
    let l = tr.rule.lhs();
    let mut out = Vec::new();
    for x in relevant_vars(patterns, l, &tr.tag) {
        for f in ext.base().symbols_of_sort(x.sort()) {
            let mut names = FreshNames::avoiding(l.vars().iter().map(Variable::name));
            let args = f
                .arg_sorts()
                .iter()
                .map(|s| Term::Var(names.fresh_var(x.name(), s)))
                .collect();
            let sigma: Substitution = [(x.clone(), Term::App(f.clone(), args))].into_iter().collect();
            let rule = Rule::new(sigma.apply(l), sigma.apply(tr.rule.rhs()))
                .expect("instances of a rule are rules");
            out.push(TaggedRule {
                rule,
                tag: tr.tag.clone(),
                origin: tr.origin,
            });
        }
    }
    out
}

/// One-step embeddings into every flat context (including `top`) that can
/// hold the rule, provided some proper pattern subterm overlaps the
/// left-hand side at the tagged position.
pub fn embeddings(
    ext: &ExtendedSignature,
    patterns: &[ForbiddenPattern],
    tr: &TaggedRule,
) -> Vec<TaggedRule> {
    let l = tr.rule.lhs();
    if ext.is_top_rooted(l) {
        return Vec::new();
    }
    let needed = patterns.iter().any(|pat| {
        pat.pos().strip_suffix(&tr.tag).is_some_and(|q| {
            !q.is_root() && unifiable_apart(l, pat.term().subterm_at(&q).expect("prefix of o"))
        })
    });
    if !needed {
        return Vec::new();
    }
    let sort = l.sort();
    let mut out = Vec::new();
    let holders = ext
        .base()
        .symbols()
        .iter()
        .chain(std::iter::once(ext.top(sort)));
    for g in holders {
        for (k, s) in g.arg_sorts().iter().enumerate() {
            if s != sort {
                continue;
            }
            let mut names = FreshNames::avoiding(l.vars().iter().map(Variable::name));
            let ctx_args: Vec<Term> = g
                .arg_sorts()
                .iter()
                .map(|s| Term::Var(names.fresh_var("w", s)))
                .collect();
            let mut largs = ctx_args.clone();
            largs[k] = l.clone();
            let mut rargs = ctx_args;
            rargs[k] = tr.rule.rhs().clone();
            let rule = Rule::new(Term::App(g.clone(), largs), Term::App(g.clone(), rargs))
                .expect("embedding preserves rules");
            out.push(TaggedRule {
                rule,
                tag: Position::new(vec![k + 1]).concat(&tr.tag),
                origin: tr.origin,
            });
        }
    }
    out
}

/// All one-step successors: instantiations followed by embeddings.
pub fn successors(
    ext: &ExtendedSignature,
    patterns: &[ForbiddenPattern],
    tr: &TaggedRule,
) -> Vec<TaggedRule> {
    let mut out = instantiations(ext, patterns, tr);
    out.extend(embeddings(ext, patterns, tr));
    out
}

/// Some pattern already matches inside the left-hand side so that it
/// forbids the tagged position.
pub fn is_obsolete(patterns: &[ForbiddenPattern], tr: &TaggedRule) -> bool {
    let l = tr.rule.lhs();
    patterns.iter().any(|pat| {
        tr.tag.strip_suffix(pat.pos()).is_some_and(|q| {
            l.subterm_at(&q)
                .is_some_and(|sub| match_term(pat.term(), sub).is_some())
        })
    })
}

/// No context and no instance of the rule puts a pattern match over the
/// tagged position.
///
/// A match either starts inside the instantiated left-hand side, at a prefix
/// of the tag, or starts in the context above it. The first case needs the
/// pattern to unify with a subterm of the left-hand side; the second needs a
/// subterm of the pattern to unify with the whole left-hand side, and is
/// impossible when the left-hand side is rooted by `top`.
pub fn is_stable(ext: &ExtendedSignature, patterns: &[ForbiddenPattern], tr: &TaggedRule) -> bool {
    let l = tr.rule.lhs();
    let p = &tr.tag;
    for pat in patterns {
        let u = pat.term();
        // match inside: p = r.o
        if let Some(r) = p.strip_suffix(pat.pos()) {
            if let Some(l_r) = l.subterm_at(&r) {
                if unifiable_apart(l_r, u) {
                    return false;
                }
            }
        }
        // match in the context: o = r.p with r non-empty
        if !ext.is_top_rooted(l) {
            if let Some(r) = pat.pos().strip_suffix(p) {
                if !r.is_root() && unifiable_apart(l, u.subterm_at(&r).expect("prefix of o")) {
                    return false;
                }
            }
        }
    }
    true
}

/// Brute-force stability check over contexts built from at most
/// `context_depth` nested flat embeddings and substitutions into linear
/// terms of depth at most `subst_depth`. Only meant for small examples.
pub fn is_stable_bounded(
    ext: &ExtendedSignature,
    patterns: &[ForbiddenPattern],
    tr: &TaggedRule,
    context_depth: usize,
    subst_depth: usize,
) -> bool {
    let l = tr.rule.lhs();
    let mut names = FreshNames::avoiding(l.vars().iter().map(Variable::name));
    let lvars = l.vars();
    let choices: Vec<Vec<Term>> = lvars
        .iter()
        .map(|x| {
            let mut v = vec![Term::Var(x.clone())];
            v.extend(linear_terms(ext.base(), x.sort(), subst_depth, &mut names));
            v
        })
        .collect();
    let mut instances = vec![Substitution::new()];
    for (x, options) in lvars.iter().zip(&choices) {
        instances = instances
            .into_iter()
            .flat_map(|s| {
                options.iter().map(move |t| {
                    let mut s = s.clone();
                    s.insert_unchecked(x.clone(), t.clone());
                    s
                })
            })
            .collect();
    }
    for sigma in instances {
        let mut frontier = vec![(sigma.apply(l), Position::root())];
        for level in 0..=context_depth {
            for (t, q) in &frontier {
                let target = q.concat(&tr.tag);
                if forbidden_by(patterns, t, &target)
                    .expect("tag is a position")
                    .is_some()
                {
                    return false;
                }
            }
            if level == context_depth || ext.is_top_rooted(l) {
                break;
            }
            let mut next = Vec::new();
            for (t, q) in &frontier {
                for g in ext.base().symbols() {
                    for (k, s) in g.arg_sorts().iter().enumerate() {
                        if s != t.sort() {
                            continue;
                        }
                        let mut args: Vec<Term> = g
                            .arg_sorts()
                            .iter()
                            .map(|s| Term::Var(names.fresh_var("c", s)))
                            .collect();
                        args[k] = t.clone();
                        next.push((Term::App(g.clone(), args), Position::new(vec![k + 1]).concat(q)));
                    }
                }
            }
            frontier = next;
        }
    }
    true
}

/// Linear non-variable terms of the sort up to the depth, with fresh
/// variables at the leaves.
fn linear_terms(sig: &Signature, sort: &Sort, depth: usize, names: &mut FreshNames) -> Vec<Term> {
    if depth == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for f in sig.symbols_of_sort(sort) {
        let mut combos: Vec<Vec<Term>> = vec![Vec::new()];
        for s in f.arg_sorts() {
            let mut options = vec![Term::Var(names.fresh_var("v", s))];
            options.extend(linear_terms(sig, s, depth - 1, names));
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
        out.extend(combos.into_iter().map(|args| Term::App(f.clone(), args)));
    }
    out
}

/// Runs the transformation to its fixpoint.
///
/// Every pattern must be a linear here-pattern.
pub fn transform(sys: &PatternSystem) -> Result<TransformResult, Error> {
    let patterns = sys.patterns();
    check_patterns(patterns)?;
    let ext = ExtendedSignature::new(sys.trs().signature());

    let mut pending: Vec<TaggedRule> = sys
        .trs()
        .rules()
        .iter()
        .enumerate()
        .map(|(i, r)| TaggedRule {
            rule: r.clone(),
            tag: Position::root(),
            origin: i,
        })
        .collect();
    let mut seen: HashSet<(Rule, Position)> = pending.iter().map(TaggedRule::key).collect();
    let mut accepted = Vec::new();
    let mut obsolete = Vec::new();
    let mut stuck = Vec::new();
    let mut iterations = 0;

    while !pending.is_empty() {
        iterations += 1;
        let mut next = Vec::new();
        for tr in pending {
            if is_stable(&ext, patterns, &tr) {
                accepted.push(tr);
            } else if is_obsolete(patterns, &tr) {
                obsolete.push(tr);
            } else {
                let succ = successors(&ext, patterns, &tr);
                if succ.is_empty() {
                    stuck.push(tr);
                }
                for s in succ {
                    if seen.insert(s.key()) {
                        next.push(s);
                    }
                }
                if seen.len() > MAX_GENERATED_RULES {
                    return Err(Error::TransformBudget(MAX_GENERATED_RULES));
                }
            }
        }
        pending = next;
    }

    let mut kept: Vec<&TaggedRule> = Vec::new();
    let mut subsumed = Vec::new();
    let mut kept_keys = HashSet::new();
    for (i, a) in accepted.iter().enumerate() {
        let strictly_general = accepted.iter().enumerate().any(|(j, b)| {
            i != j && a.rule.is_instance_of(&b.rule) && !b.rule.is_instance_of(&a.rule)
        });
        if strictly_general || !kept_keys.insert(a.rule.canonical()) {
            subsumed.push(a.clone());
        } else {
            kept.push(a);
        }
    }

    let rules = harmonize_variable_names(
        kept.iter().map(|tr| tr.rule.clone()).collect(),
        ext.signature(),
    );
    let used_tops: BTreeSet<FunSym> = rules
        .iter()
        .filter_map(|r| r.lhs().root_symbol())
        .filter(|f| ext.is_top(f))
        .cloned()
        .collect();
    let mut out_sig = ext.base().clone();
    for f in ext.signature().symbols() {
        if used_tops.contains(f) {
            out_sig
                .add_symbol(f.name(), f.arg_sorts().to_vec(), f.result_sort().clone())
                .expect("top names are free");
        }
    }
    let trs = Trs::new(out_sig, rules)?;
    Ok(TransformResult {
        trs,
        origins: kept.iter().map(|tr| tr.origin).collect(),
        accepted,
        subsumed,
        obsolete,
        stuck,
        iterations,
        ext,
    })
}

/// Renames variables so that each name is used with a single sort across
/// all rules and never coincides with a symbol name.
fn harmonize_variable_names(rules: Vec<Rule>, sig: &Signature) -> Vec<Rule> {
    let mut sort_of: BTreeMap<String, Sort> = BTreeMap::new();
    let symbol_names: BTreeSet<&str> = sig.symbols().iter().map(FunSym::name).collect();
    rules
        .into_iter()
        .map(|rule| {
            let vars = rule.lhs().vars();
            let mut names = FreshNames::avoiding(
                sort_of
                    .keys()
                    .map(String::as_str)
                    .chain(symbol_names.iter().copied())
                    .chain(vars.iter().map(Variable::name)),
            );
            let mut renaming = Substitution::new();
            for v in &vars {
                let clash = symbol_names.contains(v.name())
                    || sort_of.get(v.name()).is_some_and(|s| s != v.sort());
                let name = if clash {
                    names.fresh(v.name())
                } else {
                    v.name().to_string()
                };
                sort_of.insert(name.clone(), v.sort().clone());
                if clash {
                    renaming.insert_unchecked(v.clone(), Term::Var(Variable::new(&name, v.sort().clone())));
                }
            }
            Rule::new(renaming.apply(rule.lhs()), renaming.apply(rule.rhs()))
                .expect("renaming preserves rules")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_rule, parse_system};

    const INST: &str = include_str!("../systems/inst.trs");
    const EX2ND: &str = include_str!("../systems/ex2nd.trs");

    /// A system over the extended signature in which expected rules can be
    /// written down.
    fn env(sys: &PatternSystem, ext: &ExtendedSignature, extra: &[(&str, &str)]) -> PatternSystem {
        let trs = Trs::new(ext.signature().clone(), Vec::new()).unwrap();
        let extra = extra
            .iter()
            .map(|(n, s)| Variable::new(n, ext.signature().sort(s).unwrap().clone()));
        PatternSystem::new(trs, Vec::new())
            .unwrap()
            .with_declared_vars(sys.vars().iter().cloned().chain(extra))
    }

    fn tagged(env: &PatternSystem, rule: &str, tag: &str) -> TaggedRule {
        TaggedRule {
            rule: parse_rule(env, rule).unwrap(),
            tag: tag.parse().unwrap(),
            origin: 0,
        }
    }

    fn keys(rules: &[TaggedRule]) -> BTreeSet<(Rule, Position)> {
        rules.iter().map(TaggedRule::key).collect()
    }

    #[test]
    fn one_step_successors_of_the_instantiation_example() {
        let sys = parse_system(INST).unwrap();
        let ext = ExtendedSignature::new(sys.trs().signature());
        let env = env(&sys, &ext, &[]);
        let start = tagged(&env, "f(x) -> g(x)", "e");
        let got = keys(&successors(&ext, sys.patterns(), &start));
        let want = keys(&[
            tagged(&env, "f(f(x)) -> g(f(x))", "e"),
            tagged(&env, "f(g(x)) -> g(g(x))", "e"),
            tagged(&env, "f(a) -> g(a)", "e"),
            tagged(&env, "f(f(x)) -> f(g(x))", "1"),
            tagged(&env, "g(f(x)) -> g(g(x))", "1"),
            tagged(&env, "top_S(f(x)) -> top_S(g(x))", "1"),
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn relevant_variables() {
        let sys = parse_system(INST).unwrap();
        let ext = ExtendedSignature::new(sys.trs().signature());
        let env = env(&sys, &ext, &[]);
        let x = sys.var("x").unwrap().clone();
        let fx = parse_rule(&env, "f(x) -> g(x)").unwrap();
        assert_eq!(
            relevant_vars(sys.patterns(), fx.lhs(), &Position::root()),
            [x].into_iter().collect()
        );
        let ffx = parse_rule(&env, "f(f(x)) -> f(g(x))").unwrap();
        assert!(relevant_vars(sys.patterns(), ffx.lhs(), &"1".parse().unwrap()).is_empty());
    }

    #[test]
    fn stability_verdicts_of_the_instantiation_example() {
        let sys = parse_system(INST).unwrap();
        let ext = ExtendedSignature::new(sys.trs().signature());
        let env = env(&sys, &ext, &[]);
        let cases = [
            ("f(f(x)) -> g(f(x))", "e", true),
            ("f(g(x)) -> g(g(x))", "e", true),
            ("f(a) -> g(a)", "e", false),
            ("f(f(x)) -> f(g(x))", "1", true),
            ("g(f(x)) -> g(g(x))", "1", false),
            ("top_S(f(x)) -> top_S(g(x))", "1", true),
        ];
        for (rule, tag, stable) in cases {
            let tr = tagged(&env, rule, tag);
            assert_eq!(is_stable(&ext, sys.patterns(), &tr), stable, "{tr}");
            assert_eq!(is_stable_bounded(&ext, sys.patterns(), &tr, 3, 3), stable, "{tr} (bounded)");
        }
        let obsolete = tagged(&env, "g(g(f(a))) -> g(g(g(a)))", "1.1");
        assert!(is_obsolete(sys.patterns(), &obsolete));
        assert!(!is_obsolete(sys.patterns(), &tagged(&env, "f(a) -> g(a)", "e")));
    }

    #[test]
    fn exact_and_bounded_stability_agree_on_generated_rules() {
        for text in [INST, EX2ND, include_str!("../systems/top.trs")] {
            let sys = parse_system(text).unwrap();
            let res = transform(&sys).unwrap();
            let mut all: Vec<TaggedRule> = res.accepted.clone();
            all.extend(res.obsolete.iter().cloned());
            for tr in all.iter().filter(|tr| tr.rule.lhs().var_set().len() <= 2) {
                assert_eq!(
                    is_stable(&res.ext, sys.patterns(), tr),
                    is_stable_bounded(&res.ext, sys.patterns(), tr, 2, 2),
                    "{tr}"
                );
            }
        }
    }

    #[test]
    fn transform_of_the_2nd_example() {
        let sys = parse_system(EX2ND).unwrap();
        let res = transform(&sys).unwrap();
        assert!(res.stuck.is_empty());
        let env = env(&sys, &res.ext, &[("x'", "Nat")]);
        let want: BTreeSet<Rule> = [
            "2nd(cons(x, cons(y, zs))) -> y",
            "2nd(inf(x)) -> 2nd(cons(x, inf(s(x))))",
            "top_NatList(inf(x)) -> top_NatList(cons(x, inf(s(x))))",
            "2nd(cons(x', inf(x))) -> 2nd(cons(x', cons(x, inf(s(x)))))",
            "top_NatList(cons(x', inf(x))) -> top_NatList(cons(x', cons(x, inf(s(x)))))",
        ]
        .iter()
        .map(|r| parse_rule(&env, r).unwrap().canonical())
        .collect();
        let got: BTreeSet<Rule> = res.trs.rules().iter().map(Rule::canonical).collect();
        assert_eq!(got, want);
        // only the list sort needs a top symbol
        assert!(res.trs.signature().symbol("top_NatList").is_some());
        assert!(res.trs.signature().symbol("top_Nat").is_none());
    }

    #[test]
    fn only_here_patterns_are_supported() {
        let sys = parse_system("fun f/1 ; fun a/0 ; var x ; rule a -> a ; pattern < f(x), 1, b > ;").unwrap();
        assert!(matches!(transform(&sys), Err(Error::UnsupportedPatternMode(0))));
        let sys = parse_system("fun f/2 ; fun a/0 ; var x ; rule a -> a ; pattern < f(x, x), 1, h > ;").unwrap();
        assert!(matches!(transform(&sys), Err(Error::NonLinearPattern(0))));
    }

    #[test]
    fn top_names_avoid_clashes() {
        let sys = parse_system("fun top_S/1 ; fun a/0 ; rule a -> a ;").unwrap();
        let ext = ExtendedSignature::new(sys.trs().signature());
        let s = ext.base().sorts()[0].clone();
        assert_eq!(ext.top(&s).name(), "top_S_");
        assert!(!ext.is_top(ext.base().symbol("top_S").unwrap()));
    }

    #[test]
    fn transformed_system_reparses() {
        let sys = parse_system(include_str!("../systems/app.trs")).unwrap();
        let res = transform(&sys).unwrap();
        let printed = crate::syntax::print_system(&res.system());
        let back = parse_system(&printed).unwrap();
        assert_eq!(back.trs().rules(), res.trs.rules());
    }
}
