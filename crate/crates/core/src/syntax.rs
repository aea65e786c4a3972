//! The system file format, its printer, and export to the plain
//! termination-problem format.
//!
//! ```text
//! sorts Nat NatList ;
//! fun 0 : -> Nat ;
//! fun cons : Nat NatList -> NatList ;
//! var x : Nat ;
//! rule inf(x) -> cons(x, inf(s(x))) ;
//! pattern < cons(x, cons(y, inf(z))), 2.2, h > ;
//! ```
//!
//! Without a `sorts` statement a single implicit sort is used and
//! declarations take the short forms `fun f/2 ;` and `var x ;`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::Error;
use crate::patterns::{ForbiddenPattern, Mode, PatternSystem};
use crate::rewriting::{Rule, Trs};
use crate::term::{Position, Signature, Sort, Term, Variable};

/// Name of the sort used when a file declares no sorts.
pub const IMPLICIT_SORT: &str = "S";

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Arrow,
    Punct(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<Token>, Error> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = (li + 1, i + 1);
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                i += 1;
            } else if is_ident_char(c) {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line,
                    col,
                });
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                out.push(Token { tok: Tok::Arrow, line, col });
                i += 2;
            } else if "(),;:<>/.".contains(c) {
                out.push(Token { tok: Tok::Punct(c), line, col });
                i += 1;
            } else {
                return Err(Error::Syntax {
                    line,
                    col,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    Ok(out)
}

/// A term as written, before names are resolved.
#[derive(Clone, Debug)]
struct RawTerm {
    name: String,
    args: Vec<RawTerm>,
    line: usize,
    col: usize,
}

#[derive(Debug)]
enum Stmt {
    Sorts(Vec<String>),
    Fun {
        name: String,
        args: Vec<String>,
        result: String,
    },
    ShortFun {
        name: String,
        arity: usize,
    },
    Var {
        names: Vec<String>,
        sort: Option<String>,
    },
    Rule(RawTerm, RawTerm),
    Pattern {
        term: RawTerm,
        pos: Position,
        mode: Mode,
    },
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    end: (usize, usize),
}

impl Parser {
    fn new(toks: Vec<Token>, text: &str) -> Self {
        let lines = text.lines().count().max(1);
        let last_len = text.lines().last().map_or(0, |l| l.chars().count());
        Parser {
            toks,
            i: 0,
            end: (lines, last_len + 1),
        }
    }

    fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    fn loc(&self) -> (usize, usize) {
        self.toks.get(self.i).map_or(self.end, |t| (t.line, t.col))
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, Error> {
        let (line, col) = self.loc();
        Err(Error::Syntax {
            line,
            col,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), Error> {
        if self.eat(&Tok::Punct(c)) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, Error> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn term(&mut self) -> Result<RawTerm, Error> {
        let (line, col) = self.loc();
        let name = self.ident("a term")?;
        let mut args = Vec::new();
        if self.eat(&Tok::Punct('(')) {
            loop {
                args.push(self.term()?);
                if self.eat(&Tok::Punct(')')) {
                    break;
                }
                self.expect(',')?;
            }
        }
        Ok(RawTerm { name, args, line, col })
    }

    fn position(&mut self) -> Result<Position, Error> {
        let mut text = self.ident("a position")?;
        while self.eat(&Tok::Punct('.')) {
            text.push('.');
            text.push_str(&self.ident("a position component")?);
        }
        match text.parse() {
            Ok(p) => Ok(p),
            Err(_) => {
                self.i -= 1;
                self.err(format!("invalid position `{text}`"))
            }
        }
    }

    fn statement(&mut self) -> Result<(Stmt, (usize, usize)), Error> {
        let loc = self.loc();
        let kw = self.ident("a statement keyword")?;
        let stmt = match kw.as_str() {
            "sorts" => {
                let mut names = Vec::new();
                while let Some(Tok::Ident(_)) = self.peek() {
                    names.push(self.ident("a sort name")?);
                }
                if names.is_empty() {
                    return self.err("expected at least one sort name");
                }
                Stmt::Sorts(names)
            }
            "fun" => {
                let name = self.ident("a symbol name")?;
                if self.eat(&Tok::Punct('/')) {
                    let n = self.ident("an arity")?;
                    match n.parse() {
                        Ok(arity) => Stmt::ShortFun { name, arity },
                        Err(_) => {
                            self.i -= 1;
                            return self.err(format!("invalid arity `{n}`"));
                        }
                    }
                } else {
                    self.expect(':')?;
                    let mut args = Vec::new();
                    while let Some(Tok::Ident(_)) = self.peek() {
                        args.push(self.ident("a sort name")?);
                    }
                    if !self.eat(&Tok::Arrow) {
                        return self.err("expected `->`");
                    }
                    let result = self.ident("a result sort")?;
                    Stmt::Fun { name, args, result }
                }
            }
            "var" => {
                let mut names = Vec::new();
                while let Some(Tok::Ident(_)) = self.peek() {
                    names.push(self.ident("a variable name")?);
                }
                if names.is_empty() {
                    return self.err("expected a variable name");
                }
                let sort = if self.eat(&Tok::Punct(':')) {
                    Some(self.ident("a sort name")?)
                } else {
                    None
                };
                Stmt::Var { names, sort }
            }
            "rule" => {
                let lhs = self.term()?;
                if !self.eat(&Tok::Arrow) {
                    return self.err("expected `->`");
                }
                let rhs = self.term()?;
                Stmt::Rule(lhs, rhs)
            }
            "pattern" => {
                self.expect('<')?;
                let term = self.term()?;
                self.expect(',')?;
                let pos = self.position()?;
                self.expect(',')?;
                let m = self.ident("a mode (h, b or a)")?;
                let mode = match m.parse() {
                    Ok(mode) => mode,
                    Err(msg) => {
                        self.i -= 1;
                        return self.err(msg);
                    }
                };
                self.expect('>')?;
                Stmt::Pattern { term, pos, mode }
            }
            other => {
                self.i -= 1;
                return self.err(format!("unknown statement `{other}`"));
            }
        };
        self.expect(';')?;
        Ok((stmt, loc))
    }
}

/// Names in scope while resolving terms.
struct Scope<'a> {
    sig: &'a Signature,
    vars: &'a BTreeMap<String, Variable>,
}

impl Scope<'_> {
    fn resolve(&self, raw: &RawTerm) -> Result<Term, Error> {
        let semantic = |message: String| Error::Semantic {
            line: raw.line,
            col: raw.col,
            message,
        };
        if let Some(v) = self.vars.get(&raw.name) {
            if !raw.args.is_empty() {
                return Err(semantic(format!("variable `{}` applied to arguments", raw.name)));
            }
            return Ok(Term::Var(v.clone()));
        }
        let Some(f) = self.sig.symbol(&raw.name) else {
            return Err(Error::UnknownSymbol {
                line: raw.line,
                col: raw.col,
                name: raw.name.clone(),
            });
        };
        let args = raw
            .args
            .iter()
            .map(|a| self.resolve(a))
            .collect::<Result<Vec<_>, _>>()?;
        Term::app(f.clone(), args).map_err(|e| semantic(e.to_string()))
    }
}

/// Parses and sort-checks a system file.
pub fn parse_system(text: &str) -> Result<PatternSystem, Error> {
    let mut p = Parser::new(lex(text)?, text);
    let mut stmts = Vec::new();
    while !p.at_end() {
        stmts.push(p.statement()?);
    }

    let explicit = stmts.iter().any(|(s, _)| matches!(s, Stmt::Sorts(_)));
    let mut sig = if explicit {
        Signature::new()
    } else {
        Signature::single_sorted(IMPLICIT_SORT)
    };
    let semantic = |(line, col): (usize, usize), message: String| Error::Semantic { line, col, message };
    let lookup_sort = |sig: &Signature, name: &str, loc| -> Result<Sort, Error> {
        sig.sort(name)
            .cloned()
            .ok_or_else(|| semantic(loc, format!("unknown sort `{name}`")))
    };

    let mut vars: BTreeMap<String, Variable> = BTreeMap::new();
    for (stmt, loc) in &stmts {
        match stmt {
            Stmt::Sorts(names) => {
                for n in names {
                    sig.add_sort(n).map_err(|e| semantic(*loc, e.to_string()))?;
                }
            }
            Stmt::Fun { name, args, result } => {
                if !explicit {
                    return Err(semantic(
                        *loc,
                        "sorted declaration without a `sorts` statement".to_string(),
                    ));
                }
                let args = args
                    .iter()
                    .map(|a| lookup_sort(&sig, a, *loc))
                    .collect::<Result<Vec<_>, _>>()?;
                let result = lookup_sort(&sig, result, *loc)?;
                sig.add_symbol(name, args, result)
                    .map_err(|e| semantic(*loc, e.to_string()))?;
            }
            Stmt::ShortFun { name, arity } => {
                if explicit {
                    return Err(semantic(*loc, format!("`{name}` needs a sorted declaration")));
                }
                let s = sig.sorts()[0].clone();
                sig.add_symbol(name, vec![s.clone(); *arity], s)
                    .map_err(|e| semantic(*loc, e.to_string()))?;
            }
            Stmt::Var { names, sort } => {
                let sort = match (sort, explicit) {
                    (Some(s), true) => lookup_sort(&sig, s, *loc)?,
                    (None, false) => sig.sorts()[0].clone(),
                    (None, true) => {
                        return Err(semantic(*loc, "variable declaration needs a sort".to_string()))
                    }
                    (Some(_), false) => {
                        return Err(semantic(
                            *loc,
                            "sorted declaration without a `sorts` statement".to_string(),
                        ))
                    }
                };
                for n in names {
                    if vars.contains_key(n) {
                        return Err(semantic(*loc, format!("variable `{n}` is declared twice")));
                    }
                    vars.insert(n.clone(), Variable::new(n, sort.clone()));
                }
            }
            Stmt::Rule(..) | Stmt::Pattern { .. } => {}
        }
    }
    if let Some(v) = vars.keys().find(|v| sig.symbol(v).is_some()) {
        return Err(Error::Semantic {
            line: 1,
            col: 1,
            message: format!("`{v}` is declared both as a symbol and as a variable"),
        });
    }

    let scope = Scope { sig: &sig, vars: &vars };
    let mut rules = Vec::new();
    let mut patterns = Vec::new();
    for (stmt, loc) in &stmts {
        match stmt {
            Stmt::Rule(l, r) => {
                let lhs = scope.resolve(l)?;
                let rhs = scope.resolve(r)?;
                rules.push(Rule::new(lhs, rhs).map_err(|e| semantic(*loc, e.to_string()))?);
            }
            Stmt::Pattern { term, pos, mode } => {
                let t = scope.resolve(term)?;
                if !t.has_position(pos) {
                    return Err(Error::PatternPositionInvalid {
                        line: loc.0,
                        col: loc.1,
                        position: pos.clone(),
                        term: t.to_string(),
                    });
                }
                patterns.push(ForbiddenPattern::new(t, pos.clone(), *mode)?);
            }
            _ => {}
        }
    }
    let trs = Trs::new(sig, rules)?;
    Ok(PatternSystem::new(trs, patterns)?.with_declared_vars(vars.into_values()))
}

/// Parses a term over the symbols and declared variables of `sys`.
pub fn parse_term(sys: &PatternSystem, text: &str) -> Result<Term, Error> {
    let mut p = Parser::new(lex(text)?, text);
    let raw = p.term()?;
    if !p.at_end() {
        return p.err("unexpected input after the term");
    }
    let vars: BTreeMap<String, Variable> = sys
        .vars()
        .iter()
        .map(|v| (v.name().to_string(), v.clone()))
        .collect();
    Scope {
        sig: sys.trs().signature(),
        vars: &vars,
    }
    .resolve(&raw)
}

/// Parses `lhs -> rhs` over the symbols and declared variables of `sys`.
pub fn parse_rule(sys: &PatternSystem, text: &str) -> Result<Rule, Error> {
    let (l, r) = text.split_once("->").ok_or_else(|| Error::Syntax {
        line: 1,
        col: 1,
        message: "expected `->`".to_string(),
    })?;
    Rule::new(parse_term(sys, l)?, parse_term(sys, r)?)
}

/// Prints a system in the file format. Variables whose names are reused
/// with different sorts cannot be printed faithfully and are renamed.
pub fn print_system(sys: &PatternSystem) -> String {
    let sig = sys.trs().signature();
    let implicit = sig.is_implicitly_sorted();
    let mut out = String::new();
    if !implicit {
        out.push_str("sorts");
        for s in sig.sorts() {
            write!(out, " {s}").unwrap();
        }
        out.push_str(" ;\n");
    }
    for f in sig.symbols() {
        if implicit {
            writeln!(out, "fun {}/{} ;", f.name(), f.arity()).unwrap();
        } else {
            out.push_str("fun ");
            out.push_str(f.name());
            out.push_str(" :");
            for s in f.arg_sorts() {
                write!(out, " {s}").unwrap();
            }
            writeln!(out, " -> {} ;", f.result_sort()).unwrap();
        }
    }
    let mut seen = BTreeSet::new();
    for v in sys.vars() {
        if !seen.insert(v.name()) {
            continue;
        }
        if implicit {
            writeln!(out, "var {} ;", v.name()).unwrap();
        } else {
            writeln!(out, "var {} : {} ;", v.name(), v.sort()).unwrap();
        }
    }
    for r in sys.trs().rules() {
        writeln!(out, "rule {} -> {} ;", r.lhs(), r.rhs()).unwrap();
    }
    for p in sys.patterns() {
        writeln!(out, "pattern {p} ;").unwrap();
    }
    out
}

fn tpdb_name(name: &str) -> Result<String, Error> {
    let name = if name == ":" { "cons" } else { name };
    let ok = !name.is_empty()
        && name
            .chars()
            .all(|c| !c.is_whitespace() && !"(),\"|\\;".contains(c))
        && name != "->"
        && name != "=="
        && name != "CONTEXTSENSITIVE";
    if ok {
        Ok(name.to_string())
    } else {
        Err(Error::UnencodableSymbolName(name.to_string()))
    }
}

fn tpdb_term(t: &Term, out: &mut String) -> Result<(), Error> {
    match t {
        Term::Var(v) => out.push_str(&tpdb_name(v.name())?),
        Term::App(f, args) => {
            out.push_str(&tpdb_name(f.name())?);
            if !args.is_empty() {
                out.push('(');
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    tpdb_term(a, out)?;
                }
                out.push(')');
            }
        }
    }
    Ok(())
}

/// Renders the rules in the plain termination-problem format. Sorts are
/// dropped, so two variables sharing a name must share a sort.
pub fn export_tpdb(trs: &Trs) -> Result<String, Error> {
    let mut vars: BTreeMap<String, Sort> = BTreeMap::new();
    for r in trs.rules() {
        for v in r.lhs().vars() {
            match vars.get(v.name()) {
                Some(s) if s != v.sort() => {
                    return Err(Error::UnencodableSymbolName(v.name().to_string()))
                }
                _ => {
                    vars.insert(v.name().to_string(), v.sort().clone());
                }
            }
        }
    }
    let symbols: BTreeSet<&str> = trs.signature().symbols().iter().map(|f| f.name()).collect();
    if let Some(v) = vars.keys().find(|v| symbols.contains(v.as_str())) {
        return Err(Error::UnencodableSymbolName(v.clone()));
    }
    let mut out = String::from("(VAR");
    for v in vars.keys() {
        out.push(' ');
        out.push_str(&tpdb_name(v)?);
    }
    if vars.is_empty() {
        out.push(' ');
    }
    out.push_str(")\n(RULES");
    if trs.rules().is_empty() {
        out.push(' ');
    }
    for r in trs.rules() {
        out.push_str("\n  ");
        tpdb_term(r.lhs(), &mut out)?;
        out.push_str(" -> ");
        tpdb_term(r.rhs(), &mut out)?;
    }
    if !trs.rules().is_empty() {
        out.push('\n');
    }
    out.push_str(")\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX2ND: &str = include_str!("../systems/ex2nd.trs");

    #[test]
    fn parses_the_2nd_example() {
        let sys = parse_system(EX2ND).unwrap();
        assert_eq!(sys.trs().rules().len(), 2);
        assert_eq!(sys.patterns().len(), 1);
        assert_eq!(sys.patterns()[0].to_string(), "<cons(x, cons(y, inf(z))), 2.2, h>");
        assert_eq!(sys.trs().signature().sorts().len(), 2);
    }

    #[test]
    fn round_trip() {
        let sys = parse_system(EX2ND).unwrap();
        let printed = print_system(&sys);
        assert_eq!(parse_system(&printed).unwrap(), sys);

        let single = "fun f/1 ; fun a/0 ; var x ; rule f(x) -> a ; pattern < f(x), 1, b > ;";
        let sys = parse_system(single).unwrap();
        assert!(sys.trs().signature().is_implicitly_sorted());
        let printed = print_system(&sys);
        assert!(printed.contains("fun f/1 ;"));
        assert_eq!(parse_system(&printed).unwrap(), sys);
    }

    #[test]
    fn reports_errors_with_locations() {
        let bad_pos = "fun f/1 ; var x ; pattern < f(x), 3, h > ;";
        assert!(matches!(
            parse_system(bad_pos),
            Err(Error::PatternPositionInvalid { line: 1, .. })
        ));
        assert!(matches!(
            parse_system("fun f/1 ;\nrule f(y) -> y ;"),
            Err(Error::UnknownSymbol { line: 2, col: 8, .. })
        ));
        assert!(matches!(
            parse_system("fun f/1 ;\nrule f(x) -> x"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_system("sorts A B ; fun a : -> A ; fun f : B -> B ; rule f(a) -> a ;"),
            Err(Error::Semantic { .. })
        ));
        assert!(matches!(parse_system("fun f/1 ; $"), Err(Error::Syntax { line: 1, col: 11, .. })));
    }

    #[test]
    fn empty_rule_set() {
        let sys = parse_system("sorts S ; fun a : -> S ;").unwrap();
        assert!(sys.trs().rules().is_empty());
        assert_eq!(export_tpdb(sys.trs()).unwrap(), "(VAR )\n(RULES )\n");
    }

    #[test]
    fn tpdb_export() {
        let sys = parse_system(EX2ND).unwrap();
        let text = export_tpdb(sys.trs()).unwrap();
        assert_eq!(
            text,
            "(VAR x y zs)\n(RULES\n  inf(x) -> cons(x,inf(s(x)))\n  2nd(cons(x,cons(y,zs))) -> y\n)\n"
        );
    }

    #[test]
    fn tpdb_rejects_clashing_variable_sorts() {
        let text = "sorts A B ; fun f : A -> A ; fun g : B -> B ; var x : A ; var y : B ;
                    rule f(x) -> x ; rule g(y) -> y ;";
        let sys = parse_system(text).unwrap();
        assert!(export_tpdb(sys.trs()).is_ok());
        // same name, different sorts: only constructible through the API
        let a = sys.trs().signature().sort("A").unwrap().clone();
        let b = sys.trs().signature().sort("B").unwrap().clone();
        let f = sys.trs().signature().symbol("f").unwrap().clone();
        let g = sys.trs().signature().symbol("g").unwrap().clone();
        let xa = Term::Var(Variable::new("x", a));
        let xb = Term::Var(Variable::new("x", b));
        let rules = vec![
            Rule::new(Term::app(f, vec![xa.clone()]).unwrap(), xa).unwrap(),
            Rule::new(Term::app(g, vec![xb.clone()]).unwrap(), xb).unwrap(),
        ];
        let trs = Trs::new(sys.trs().signature().clone(), rules).unwrap();
        assert!(matches!(export_tpdb(&trs), Err(Error::UnencodableSymbolName(_))));
    }
}
