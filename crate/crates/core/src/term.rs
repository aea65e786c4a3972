//! Many-sorted terms, positions and substitutions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::Error;

/// A sort name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort(Arc<str>);

impl Sort {
    pub fn new(name: &str) -> Self {
        Sort(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(PartialEq, Eq, Hash, PartialOrd, Ord)]
struct SymbolData {
    name: Arc<str>,
    arg_sorts: Vec<Sort>,
    result_sort: Sort,
}

/// A typed function symbol `f : s1 ... sn -> s`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunSym(Arc<SymbolData>);

impl FunSym {
    pub fn new(name: &str, arg_sorts: Vec<Sort>, result_sort: Sort) -> Self {
        FunSym(Arc::new(SymbolData {
            name: Arc::from(name),
            arg_sorts,
            result_sort,
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn arity(&self) -> usize {
        self.0.arg_sorts.len()
    }

    pub fn arg_sorts(&self) -> &[Sort] {
        &self.0.arg_sorts
    }

    pub fn result_sort(&self) -> &Sort {
        &self.0.result_sort
    }
}

impl fmt::Debug for FunSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A sorted variable. Two variables are the same only if name and sort agree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    name: Arc<str>,
    sort: Sort,
}

impl Variable {
    pub fn new(name: &str, sort: Sort) -> Self {
        Variable {
            name: Arc::from(name),
            sort,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sort(&self) -> &Sort {
        &self.sort
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.sort)
    }
}

/// Sorts plus typed function symbols, kept in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    sorts: Vec<Sort>,
    symbols: Vec<FunSym>,
    by_name: BTreeMap<Arc<str>, usize>,
    implicit_sort: bool,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// A signature with one sort that files never mention explicitly.
    pub fn single_sorted(sort_name: &str) -> Self {
        let mut sig = Signature::new();
        sig.sorts.push(Sort::new(sort_name));
        sig.implicit_sort = true;
        sig
    }

    pub fn is_implicitly_sorted(&self) -> bool {
        self.implicit_sort
    }

    pub fn add_sort(&mut self, name: &str) -> Result<Sort, Error> {
        if self.sort(name).is_some() {
            return Err(Error::DuplicateDeclaration(name.to_string()));
        }
        let sort = Sort::new(name);
        self.sorts.push(sort.clone());
        Ok(sort)
    }

    pub fn add_symbol(
        &mut self,
        name: &str,
        arg_sorts: Vec<Sort>,
        result_sort: Sort,
    ) -> Result<FunSym, Error> {
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateDeclaration(name.to_string()));
        }
        for s in arg_sorts.iter().chain(std::iter::once(&result_sort)) {
            if !self.sorts.contains(s) {
                return Err(Error::UnknownSort(s.name().to_string()));
            }
        }
        let sym = FunSym::new(name, arg_sorts, result_sort);
        self.by_name.insert(Arc::from(name), self.symbols.len());
        self.symbols.push(sym.clone());
        Ok(sym)
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn sort(&self, name: &str) -> Option<&Sort> {
        self.sorts.iter().find(|s| s.name() == name)
    }

    pub fn symbols(&self) -> &[FunSym] {
        &self.symbols
    }

    pub fn symbol(&self, name: &str) -> Option<&FunSym> {
        self.by_name.get(name).map(|&i| &self.symbols[i])
    }

    pub fn contains_symbol(&self, f: &FunSym) -> bool {
        self.symbol(f.name()) == Some(f)
    }

    /// Symbols whose result sort is `sort`, in declaration order.
    pub fn symbols_of_sort<'a>(&'a self, sort: &'a Sort) -> impl Iterator<Item = &'a FunSym> {
        self.symbols.iter().filter(move |f| f.result_sort() == sort)
    }
}

/// A position: a path of 1-based argument indices. The empty path is the root.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<usize>);

/// How two positions relate in the prefix order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PosOrder {
    Equal,
    StrictlyAbove,
    StrictlyBelow,
    Parallel,
}

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn new(path: Vec<usize>) -> Self {
        debug_assert!(path.iter().all(|&i| i >= 1));
        Position(path)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut path = self.0.clone();
        path.push(i);
        Position(path)
    }

    pub fn concat(&self, other: &Position) -> Position {
        let mut path = self.0.clone();
        path.extend_from_slice(&other.0);
        Position(path)
    }

    /// `self ≤ other` in the prefix order.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    /// The `r` with `prefix.r = self`.
    pub fn strip_prefix(&self, prefix: &Position) -> Option<Position> {
        self.0
            .strip_prefix(prefix.0.as_slice())
            .map(|rest| Position(rest.to_vec()))
    }

    /// The `r` with `r.suffix = self`.
    pub fn strip_suffix(&self, suffix: &Position) -> Option<Position> {
        self.0
            .strip_suffix(suffix.0.as_slice())
            .map(|rest| Position(rest.to_vec()))
    }

    pub fn compare(&self, other: &Position) -> PosOrder {
        if self == other {
            PosOrder::Equal
        } else if self.is_prefix_of(other) {
            PosOrder::StrictlyAbove
        } else if other.is_prefix_of(self) {
            PosOrder::StrictlyBelow
        } else {
            PosOrder::Parallel
        }
    }

    /// Every prefix of this position, root first, including the position itself.
    pub fn prefixes(&self) -> impl Iterator<Item = Position> + '_ {
        (0..=self.0.len()).map(move |k| Position(self.0[..k].to_vec()))
    }
}

impl From<&[usize]> for Position {
    fn from(path: &[usize]) -> Self {
        Position::new(path.to_vec())
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Position {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "e" || s == "ε" {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|part| match part.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i),
                _ => Err(Error::InvalidPosition(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

/// A well-sorted first-order term.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Variable),
    App(FunSym, Vec<Term>),
}

impl Term {
    pub fn var(v: Variable) -> Term {
        Term::Var(v)
    }

    /// Builds `f(args)`, checking arity and argument sorts.
    pub fn app(f: FunSym, args: Vec<Term>) -> Result<Term, Error> {
        if args.len() != f.arity() {
            return Err(Error::ArityMismatch {
                symbol: f.name().to_string(),
                expected: f.arity(),
                found: args.len(),
            });
        }
        for (arg, sort) in args.iter().zip(f.arg_sorts()) {
            if arg.sort() != sort {
                return Err(Error::SortMismatch {
                    expected: sort.clone(),
                    found: arg.sort().clone(),
                });
            }
        }
        Ok(Term::App(f, args))
    }

    pub fn constant(f: FunSym) -> Result<Term, Error> {
        Term::app(f, Vec::new())
    }

    pub fn sort(&self) -> &Sort {
        match self {
            Term::Var(v) => v.sort(),
            Term::App(f, _) => f.result_sort(),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn root_symbol(&self) -> Option<&FunSym> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    /// Depth with constants and variables at depth 1.
    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Variables in order of first occurrence (left to right, depth first).
    pub fn vars(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Variable>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn var_set(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    fn visit_vars(&self, f: &mut impl FnMut(&Variable)) {
        match self {
            Term::Var(v) => f(v),
            Term::App(_, args) => args.iter().for_each(|a| a.visit_vars(f)),
        }
    }

    /// True iff no variable occurs twice.
    pub fn is_linear(&self) -> bool {
        let mut seen = BTreeSet::new();
        let mut linear = true;
        self.visit_vars(&mut |v| {
            if !seen.insert(v.clone()) {
                linear = false;
            }
        });
        linear
    }

    /// All positions in pre-order (which is also the lexicographic order).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.walk(&mut Vec::new(), &mut |p, _| out.push(Position(p.to_vec())));
        out
    }

    /// Positions of non-variable subterms, in pre-order.
    pub fn nonvar_positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.walk(&mut Vec::new(), &mut |p, t| {
            if !t.is_var() {
                out.push(Position(p.to_vec()))
            }
        });
        out
    }

    /// `positions` or `nonvar_positions` depending on the flag.
    pub fn positions_filtered(&self, nonvar_only: bool) -> Vec<Position> {
        if nonvar_only {
            self.nonvar_positions()
        } else {
            self.positions()
        }
    }

    /// Pre-order traversal handing each subterm together with its path.
    pub fn walk<'a>(&'a self, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a Term)) {
        f(path, self);
        for (i, arg) in self.args().iter().enumerate() {
            path.push(i + 1);
            arg.walk(path, f);
            path.pop();
        }
    }

    pub fn subterm_at(&self, p: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in p.path() {
            t = t.args().get(i.checked_sub(1)?)?;
        }
        Some(t)
    }

    pub fn has_position(&self, p: &Position) -> bool {
        self.subterm_at(p).is_some()
    }

    /// `self[s]_p`. Fails if `p` is not a position of `self` or the sorts differ.
    pub fn replace_at(&self, p: &Position, s: Term) -> Result<Term, Error> {
        let old = self
            .subterm_at(p)
            .ok_or_else(|| Error::PositionOutOfRange {
                position: p.clone(),
                term: self.to_string(),
            })?;
        if old.sort() != s.sort() {
            return Err(Error::SortMismatch {
                expected: old.sort().clone(),
                found: s.sort().clone(),
            });
        }
        Ok(self.replace_unchecked(p.path(), s))
    }

    fn replace_unchecked(&self, path: &[usize], s: Term) -> Term {
        match path.split_first() {
            None => s,
            Some((&i, rest)) => match self {
                Term::App(f, args) => {
                    let mut args = args.clone();
                    args[i - 1] = args[i - 1].replace_unchecked(rest, s);
                    Term::App(f.clone(), args)
                }
                Term::Var(_) => unreachable!("position checked by caller"),
            },
        }
    }

    /// Whether any symbol of the term satisfies the predicate.
    pub fn any_symbol(&self, pred: &impl Fn(&FunSym) -> bool) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(f, args) => pred(f) || args.iter().any(|a| a.any_symbol(pred)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v.name()),
            Term::App(sym, args) => {
                f.write_str(sym.name())?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (k, a) in args.iter().enumerate() {
                        if k > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite, sort-preserving map from variables to terms.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<Variable, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &Variable) -> Option<&Term> {
        self.0.get(v)
    }

    /// Adds a binding. Fails if the sorts differ.
    pub fn bind(&mut self, v: Variable, t: Term) -> Result<(), Error> {
        if v.sort() != t.sort() {
            return Err(Error::SortMismatch {
                expected: v.sort().clone(),
                found: t.sort().clone(),
            });
        }
        self.0.insert(v, t);
        Ok(())
    }

    pub(crate) fn insert_unchecked(&mut self, v: Variable, t: Term) {
        debug_assert_eq!(v.sort(), t.sort());
        self.0.insert(v, t);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Variable> {
        self.0.keys()
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    /// The substitution `x ↦ other(self(x))`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut out: BTreeMap<Variable, Term> = self
            .0
            .iter()
            .map(|(v, t)| (v.clone(), other.apply(t)))
            .collect();
        for (v, t) in &other.0 {
            out.entry(v.clone()).or_insert_with(|| t.clone());
        }
        out.retain(|v, t| !matches!(t, Term::Var(w) if w == v));
        Substitution(out)
    }
}

impl FromIterator<(Variable, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Variable, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (v, t) in iter {
            s.insert_unchecked(v, t);
        }
        s
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (v, t)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} ↦ {}", v.name(), t)?;
        }
        f.write_str("}")
    }
}

/// Source of variable names that avoid a given set.
#[derive(Clone, Debug, Default)]
pub struct FreshNames {
    taken: BTreeSet<String>,
}

impl FreshNames {
    pub fn avoiding<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        FreshNames {
            taken: names.into_iter().map(str::to_string).collect(),
        }
    }

    pub fn reserve(&mut self, name: &str) {
        self.taken.insert(name.to_string());
    }

    /// A name derived from `base` that was not handed out or reserved before.
    pub fn fresh(&mut self, base: &str) -> String {
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
        let stem = if stem.is_empty() { "x" } else { stem };
        if !self.taken.contains(stem) {
            self.taken.insert(stem.to_string());
            return stem.to_string();
        }
        let name = (1..)
            .map(|k| format!("{stem}{k}"))
            .find(|n| !self.taken.contains(n))
            .expect("unbounded");
        self.taken.insert(name.clone());
        name
    }

    pub fn fresh_var(&mut self, base: &str, sort: &Sort) -> Variable {
        Variable::new(&self.fresh(base), sort.clone())
    }
}

/// Renames the variables of `terms` (consistently) so that none clashes by
/// name with `avoid`. Returns the renamed terms and the renaming used.
pub fn rename_apart_all(terms: &[&Term], avoid: &BTreeSet<Variable>) -> (Vec<Term>, Substitution) {
    let mut names = FreshNames::avoiding(avoid.iter().map(Variable::name));
    for t in terms {
        for v in t.vars() {
            if !avoid.iter().any(|a| a.name() == v.name()) {
                names.reserve(v.name());
            }
        }
    }
    let mut renaming = Substitution::new();
    for t in terms {
        for v in t.vars() {
            if renaming.get(&v).is_some() {
                continue;
            }
            if avoid.iter().any(|a| a.name() == v.name()) {
                let fresh = names.fresh_var(v.name(), v.sort());
                renaming.insert_unchecked(v, Term::Var(fresh));
            }
        }
    }
    let renamed = terms.iter().map(|t| renaming.apply(t)).collect();
    (renamed, renaming)
}

/// A variant of `t` whose variables are disjoint (by name) from `avoid`.
pub fn rename_apart(t: &Term, avoid: &BTreeSet<Variable>) -> Term {
    rename_apart_all(&[t], avoid).0.remove(0)
}

/// Renames variables to `_0, _1, ...` in order of first occurrence across
/// `terms`, so that variants map to identical results.
pub fn canonical_variant(terms: &[&Term]) -> Vec<Term> {
    let mut renaming = Substitution::new();
    let mut next = 0usize;
    for t in terms {
        for v in t.vars() {
            if renaming.get(&v).is_none() {
                let fresh = Variable::new(&format!("_{next}"), v.sort().clone());
                next += 1;
                renaming.insert_unchecked(v, Term::Var(fresh));
            }
        }
    }
    terms.iter().map(|t| renaming.apply(t)).collect()
}

/// Orders terms by size first, then structurally.
pub fn size_then_structure(a: &Term, b: &Term) -> Ordering {
    a.size().cmp(&b.size()).then_with(|| a.cmp(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> (Signature, FunSym, FunSym, FunSym, FunSym) {
        let mut sig = Signature::single_sorted("S");
        let s = sig.sorts()[0].clone();
        let a = sig.add_symbol("a", vec![], s.clone()).unwrap();
        let b = sig.add_symbol("b", vec![], s.clone()).unwrap();
        let f = sig.add_symbol("f", vec![s.clone(), s.clone()], s.clone()).unwrap();
        let g = sig.add_symbol("g", vec![s.clone()], s.clone()).unwrap();
        let _ = b;
        (sig, a, f, g, FunSym::new("b", vec![], s))
    }

    #[test]
    fn positions_of_small_terms() {
        let (sig, a, f, g, _) = sig();
        let s = sig.sorts()[0].clone();
        let x = Term::Var(Variable::new("x", s));
        assert!(x.nonvar_positions().is_empty());
        assert_eq!(x.positions(), vec![Position::root()]);

        let ca = Term::constant(a).unwrap();
        let faa = Term::app(f, vec![ca.clone(), ca.clone()]).unwrap();
        assert_eq!(faa.positions(), vec![Position::root(), Position::new(vec![1]), Position::new(vec![2])]);

        // g(g(f(a, a))): hand-enumerated
        let t = Term::app(g.clone(), vec![Term::app(g, vec![faa]).unwrap()]).unwrap();
        let got: Vec<String> = t.nonvar_positions().iter().map(|p| p.to_string()).collect();
        assert_eq!(got, ["e", "1", "1.1", "1.1.1", "1.1.2"]);
    }

    #[test]
    fn position_order() {
        let p = |s: &str| s.parse::<Position>().unwrap();
        assert_eq!(p("e").compare(&p("1.2")), PosOrder::StrictlyAbove);
        assert_eq!(p("2.2").compare(&p("2.2")), PosOrder::Equal);
        assert_eq!(p("1.2").compare(&p("2.1")), PosOrder::Parallel);
        assert_eq!(p("2.1.3").compare(&p("2")), PosOrder::StrictlyBelow);
        assert!("0".parse::<Position>().is_err());
        assert!("1..2".parse::<Position>().is_err());
        assert_eq!(p("2.2").strip_suffix(&p("2")), Some(p("2")));
        assert_eq!(p("1.2.3").strip_prefix(&p("1")), Some(p("2.3")));
    }

    #[test]
    fn replace_and_select() {
        let (sig, a, f, _, b) = sig();
        let s = sig.sorts()[0].clone();
        let ca = Term::constant(a).unwrap();
        let cb = Term::constant(b).unwrap();
        let faa = Term::app(f.clone(), vec![ca.clone(), ca.clone()]).unwrap();
        let fab = Term::app(f, vec![ca.clone(), cb.clone()]).unwrap();
        assert_eq!(faa.replace_at(&"2".parse().unwrap(), cb.clone()).unwrap(), fab);
        assert_eq!(faa.replace_at(&Position::root(), cb.clone()).unwrap(), cb);
        assert!(matches!(
            faa.replace_at(&"3".parse().unwrap(), cb.clone()),
            Err(Error::PositionOutOfRange { .. })
        ));
        let other = Sort::new("T");
        let y = Term::Var(Variable::new("y", other));
        assert!(matches!(
            faa.replace_at(&"1".parse().unwrap(), y),
            Err(Error::SortMismatch { .. })
        ));
        let _ = s;
    }

    #[test]
    fn linearity() {
        let (sig, a, f, _, _) = sig();
        let s = sig.sorts()[0].clone();
        let x = Term::Var(Variable::new("x", s.clone()));
        let gxx = Term::app(f.clone(), vec![x.clone(), x.clone()]).unwrap();
        assert!(!gxx.is_linear());
        assert!(Term::constant(a).unwrap().is_linear());
        let y = Term::Var(Variable::new("y", s));
        assert!(Term::app(f, vec![x, y]).unwrap().is_linear());
    }

    #[test]
    fn rename_apart_avoids_names() {
        let (sig, _, _, g, _) = sig();
        let s = sig.sorts()[0].clone();
        let x = Variable::new("x", s);
        let t = Term::app(g, vec![Term::Var(x.clone())]).unwrap();
        let avoid: BTreeSet<_> = [x.clone()].into_iter().collect();
        let r = rename_apart(&t, &avoid);
        let vs = r.vars();
        assert_eq!(vs.len(), 1);
        assert_ne!(vs[0].name(), "x");
        assert_eq!(r.positions(), t.positions());
    }

    #[test]
    fn fresh_names_skip_taken() {
        let mut names = FreshNames::avoiding(["x", "x1"]);
        assert_eq!(names.fresh("x"), "x2");
        assert_eq!(names.fresh("x"), "x3");
        assert_eq!(names.fresh("y"), "y");
        assert_eq!(names.fresh("y7"), "y1");
    }

    #[test]
    fn signature_rejects_duplicates_and_unknown_sorts() {
        let mut sig = Signature::new();
        let nat = sig.add_sort("Nat").unwrap();
        assert!(sig.add_sort("Nat").is_err());
        sig.add_symbol("0", vec![], nat.clone()).unwrap();
        assert!(sig.add_symbol("0", vec![], nat.clone()).is_err());
        assert!(matches!(
            sig.add_symbol("h", vec![Sort::new("List")], nat),
            Err(Error::UnknownSort(_))
        ));
    }
}
