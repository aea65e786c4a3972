//! Syntactic matching and unification.

use crate::term::{Substitution, Term, Variable};

/// One-way matching: a `σ` with `pattern σ = subject`.
///
/// Variables of `subject` are treated as constants, so the two terms may share
/// variable names.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    match_into(pattern, subject, &mut sigma).then_some(sigma)
}

/// Extends `sigma` so that `pattern sigma = subject`, if possible.
pub fn match_into(pattern: &Term, subject: &Term, sigma: &mut Substitution) -> bool {
    match (pattern, subject) {
        (Term::Var(v), _) => {
            if v.sort() != subject.sort() {
                return false;
            }
            match sigma.get(v) {
                Some(bound) => bound == subject,
                None => {
                    sigma.insert_unchecked(v.clone(), subject.clone());
                    true
                }
            }
        }
        (Term::App(f, ps), Term::App(g, ss)) => {
            f == g && ps.iter().zip(ss).all(|(p, s)| match_into(p, s, sigma))
        }
        (Term::App(..), Term::Var(_)) => false,
    }
}

/// Most general unifier with occurs check. The result is idempotent.
///
/// Callers that need the two terms to be variable-disjoint must rename apart
/// first; shared variables are treated as the same variable.
pub fn unify(s: &Term, t: &Term) -> Option<Substitution> {
    if s.sort() != t.sort() {
        return None;
    }
    let mut sigma = Substitution::new();
    let mut stack = vec![(s.clone(), t.clone())];
    while let Some((a, b)) = stack.pop() {
        let a = sigma.apply(&a);
        let b = sigma.apply(&b);
        if a == b {
            continue;
        }
        match (a, b) {
            (Term::Var(v), other) | (other, Term::Var(v)) => {
                if v.sort() != other.sort() || occurs(&v, &other) {
                    return None;
                }
                let single: Substitution = [(v.clone(), other.clone())].into_iter().collect();
                sigma = sigma.then(&single);
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g {
                    return None;
                }
                stack.extend(xs.into_iter().zip(ys));
            }
        }
    }
    Some(sigma)
}

fn occurs(v: &Variable, t: &Term) -> bool {
    match t {
        Term::Var(w) => v == w,
        Term::App(_, args) => args.iter().any(|a| occurs(v, a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{FunSym, Signature, Sort};

    struct Fx {
        a: Term,
        b: Term,
        f: FunSym,
        g: FunSym,
        s: Sort,
    }

    fn fx() -> Fx {
        let mut sig = Signature::single_sorted("S");
        let s = sig.sorts()[0].clone();
        let a = sig.add_symbol("a", vec![], s.clone()).unwrap();
        let b = sig.add_symbol("b", vec![], s.clone()).unwrap();
        let f = sig.add_symbol("f", vec![s.clone()], s.clone()).unwrap();
        let g = sig.add_symbol("g", vec![s.clone(), s.clone()], s.clone()).unwrap();
        Fx {
            a: Term::constant(a).unwrap(),
            b: Term::constant(b).unwrap(),
            f,
            g,
            s,
        }
    }

    fn var(fx: &Fx, n: &str) -> Term {
        Term::Var(Variable::new(n, fx.s.clone()))
    }

    #[test]
    fn matching() {
        let fx = fx();
        let x = var(&fx, "x");
        let fx_ = Term::app(fx.f.clone(), vec![x.clone()]).unwrap();
        let fa = Term::app(fx.f.clone(), vec![fx.a.clone()]).unwrap();
        let sigma = match_term(&fx_, &fa).unwrap();
        assert_eq!(sigma.apply(&fx_), fa);
        assert_eq!(sigma.get(x.vars().first().unwrap()), Some(&fx.a));

        let gaa = Term::app(fx.g.clone(), vec![fx.a.clone(), fx.a.clone()]).unwrap();
        let gbb = Term::app(fx.g.clone(), vec![fx.b.clone(), fx.b.clone()]).unwrap();
        assert!(match_term(&gaa, &gbb).is_none());

        // non-linear pattern
        let gxx = Term::app(fx.g.clone(), vec![x.clone(), x.clone()]).unwrap();
        let gab = Term::app(fx.g.clone(), vec![fx.a.clone(), fx.b.clone()]).unwrap();
        assert!(match_term(&gxx, &gaa).is_some());
        assert!(match_term(&gxx, &gab).is_none());
    }

    #[test]
    fn unification() {
        let fx = fx();
        let x = var(&fx, "x");
        let y = var(&fx, "y");
        let fa = Term::app(fx.f.clone(), vec![fx.a.clone()]).unwrap();
        let fxx = Term::app(fx.f.clone(), vec![x.clone()]).unwrap();
        let theta = unify(&fa, &fxx).unwrap();
        assert_eq!(theta.len(), 1);
        assert_eq!(theta.apply(&x), fx.a);

        assert!(unify(&x, &x).unwrap().is_empty());
        assert!(unify(&x, &fxx).is_none(), "occurs check");

        // g(x, f(y)) =? g(f(y), x)  -> x ↦ f(y)
        let fy = Term::app(fx.f.clone(), vec![y.clone()]).unwrap();
        let l = Term::app(fx.g.clone(), vec![x.clone(), fy.clone()]).unwrap();
        let r = Term::app(fx.g.clone(), vec![fy.clone(), x.clone()]).unwrap();
        let theta = unify(&l, &r).unwrap();
        assert_eq!(theta.apply(&l), theta.apply(&r));
        assert_eq!(theta.apply(&x), fy);

        // chained bindings stay idempotent
        let gxy = Term::app(fx.g.clone(), vec![x.clone(), y.clone()]).unwrap();
        let gya = Term::app(fx.g.clone(), vec![y.clone(), fx.a.clone()]).unwrap();
        let theta = unify(&gxy, &gya).unwrap();
        assert_eq!(theta.apply(&x), fx.a);
        assert_eq!(theta.apply(&y), fx.a);
        for (_, t) in theta.iter() {
            assert_eq!(&theta.apply(t), t);
        }
    }

    #[test]
    fn unification_respects_sorts() {
        let fx = fx();
        let other = Sort::new("T");
        let z = Term::Var(Variable::new("z", other));
        assert!(unify(&z, &fx.a).is_none());
    }
}
