//! Types, terms and contexts of the computational lambda-calculus.
//!
//! Terms are immutable trees with shared subterms (`Arc`), so enumeration can
//! build large families of terms cheaply and hand them across worker threads.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Name = Arc<str>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Type {
    Unit,
    Bool,
    Base(Name),
    Arrow(Arc<Type>, Arc<Type>),
    Prod(Arc<Type>, Arc<Type>),
    /// The monadic type former `T t`.
    Comp(Arc<Type>),
}

impl Type {
    pub fn base(name: &str) -> Type {
        Type::Base(name.into())
    }

    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Arc::new(dom), Arc::new(cod))
    }

    pub fn prod(l: Type, r: Type) -> Type {
        Type::Prod(Arc::new(l), Arc::new(r))
    }

    pub fn comp(inner: Type) -> Type {
        Type::Comp(Arc::new(inner))
    }

    /// Parse a type from its concrete syntax.
    pub fn parse(text: &str) -> Result<Type> {
        let mut p = crate::parse::Parser::new(text)?;
        let t = p.ty()?;
        p.expect_end()?;
        Ok(t)
    }

    /// All syntactic subtypes, including `self`.
    pub fn subtypes(&self, out: &mut BTreeSet<Type>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Type::Unit | Type::Bool | Type::Base(_) => {}
            Type::Arrow(a, b) | Type::Prod(a, b) => {
                a.subtypes(out);
                b.subtypes(out);
            }
            Type::Comp(a) => a.subtypes(out),
        }
    }

    pub fn base_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Type::Unit | Type::Bool => {}
            Type::Base(b) => {
                out.insert(b.clone());
            }
            Type::Arrow(a, b) | Type::Prod(a, b) => {
                a.base_names(out);
                b.base_names(out);
            }
            Type::Comp(a) => a.base_names(out),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: arrow level, 1: product operand, 2: argument of T / right of *.
        match self {
            Type::Unit => write!(f, "unit"),
            Type::Bool => write!(f, "bool"),
            Type::Base(b) => write!(f, "{b}"),
            Type::Arrow(a, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 0)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Type::Prod(a, b) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " * ")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Type::Comp(a) => {
                write!(f, "T ")?;
                a.fmt_prec(f, 2)
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(Name),
    Lam(Name, Type, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    Pair(Arc<Term>, Arc<Term>),
    Fst(Arc<Term>),
    Snd(Arc<Term>),
    UnitVal,
    BoolLit(bool),
    /// An element of a designated base type, written `b#i`.
    Lit(Name, u32),
    If(Arc<Term>, Arc<Term>, Arc<Term>),
    Val(Arc<Term>),
    LetC(Name, Arc<Term>, Arc<Term>),
    Const(Name, Vec<Type>),
    Hole,
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.into())
    }

    pub fn lam(x: &str, ty: Type, body: Term) -> Term {
        Term::Lam(x.into(), ty, Arc::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn pair(l: Term, r: Term) -> Term {
        Term::Pair(Arc::new(l), Arc::new(r))
    }

    pub fn fst(t: Term) -> Term {
        Term::Fst(Arc::new(t))
    }

    pub fn snd(t: Term) -> Term {
        Term::Snd(Arc::new(t))
    }

    pub fn ite(c: Term, t: Term, e: Term) -> Term {
        Term::If(Arc::new(c), Arc::new(t), Arc::new(e))
    }

    pub fn val(t: Term) -> Term {
        Term::Val(Arc::new(t))
    }

    pub fn letc(x: &str, m: Term, n: Term) -> Term {
        Term::LetC(x.into(), Arc::new(m), Arc::new(n))
    }

    pub fn constant(name: &str, args: Vec<Type>) -> Term {
        Term::Const(name.into(), args)
    }

    /// AST node count. Type annotations and type arguments are not counted.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_)
            | Term::UnitVal
            | Term::BoolLit(_)
            | Term::Lit(..)
            | Term::Const(..)
            | Term::Hole => 1,
            Term::Lam(_, _, b) | Term::Fst(b) | Term::Snd(b) | Term::Val(b) => 1 + b.size(),
            Term::App(a, b) | Term::Pair(a, b) | Term::LetC(_, a, b) => 1 + a.size() + b.size(),
            Term::If(c, t, e) => 1 + c.size() + t.size() + e.size(),
        }
    }

    pub fn hole_count(&self) -> usize {
        match self {
            Term::Hole => 1,
            Term::Var(_) | Term::UnitVal | Term::BoolLit(_) | Term::Lit(..) | Term::Const(..) => 0,
            Term::Lam(_, _, b) | Term::Fst(b) | Term::Snd(b) | Term::Val(b) => b.hole_count(),
            Term::App(a, b) | Term::Pair(a, b) | Term::LetC(_, a, b) => {
                a.hole_count() + b.hole_count()
            }
            Term::If(c, t, e) => c.hole_count() + t.hole_count() + e.hole_count(),
        }
    }

    pub fn has_hole(&self) -> bool {
        self.hole_count() > 0
    }

    /// Number of free occurrences of `x`.
    pub fn occurrences(&self, x: &str) -> usize {
        match self {
            Term::Var(y) => usize::from(&**y == x),
            Term::UnitVal | Term::BoolLit(_) | Term::Lit(..) | Term::Const(..) | Term::Hole => 0,
            Term::Lam(y, _, b) => {
                if &**y == x {
                    0
                } else {
                    b.occurrences(x)
                }
            }
            Term::Fst(b) | Term::Snd(b) | Term::Val(b) => b.occurrences(x),
            Term::App(a, b) | Term::Pair(a, b) => a.occurrences(x) + b.occurrences(x),
            Term::LetC(y, a, b) => {
                a.occurrences(x) + if &**y == x { 0 } else { b.occurrences(x) }
            }
            Term::If(c, t, e) => c.occurrences(x) + t.occurrences(x) + e.occurrences(x),
        }
    }

    /// Substitute the closed term `s` for the free variable `x`.
    ///
    /// `s` must be closed, so no capture can occur.
    pub fn subst_closed(&self, x: &str, s: &Arc<Term>) -> Arc<Term> {
        fn go(t: &Arc<Term>, x: &str, s: &Arc<Term>) -> Arc<Term> {
            if t.occurrences(x) == 0 {
                return t.clone();
            }
            Arc::new(match &**t {
                Term::Var(_) => return s.clone(),
                Term::Lam(y, ty, b) => Term::Lam(y.clone(), ty.clone(), go(b, x, s)),
                Term::App(a, b) => Term::App(go(a, x, s), go(b, x, s)),
                Term::Pair(a, b) => Term::Pair(go(a, x, s), go(b, x, s)),
                Term::Fst(b) => Term::Fst(go(b, x, s)),
                Term::Snd(b) => Term::Snd(go(b, x, s)),
                Term::Val(b) => Term::Val(go(b, x, s)),
                Term::If(c, a, b) => Term::If(go(c, x, s), go(a, x, s), go(b, x, s)),
                Term::LetC(y, a, b) => {
                    let b = if &**y == x { b.clone() } else { go(b, x, s) };
                    Term::LetC(y.clone(), go(a, x, s), b)
                }
                Term::UnitVal | Term::BoolLit(_) | Term::Lit(..) | Term::Const(..) | Term::Hole => {
                    unreachable!("no free occurrence")
                }
            })
        }
        go(&Arc::new(self.clone()), x, s)
    }

    /// Replace the hole by `m`.
    fn fill(t: &Arc<Term>, m: &Arc<Term>) -> Arc<Term> {
        if !t.has_hole() {
            return t.clone();
        }
        Arc::new(match &**t {
            Term::Hole => return m.clone(),
            Term::Lam(y, ty, b) => Term::Lam(y.clone(), ty.clone(), Self::fill(b, m)),
            Term::App(a, b) => Term::App(Self::fill(a, m), Self::fill(b, m)),
            Term::Pair(a, b) => Term::Pair(Self::fill(a, m), Self::fill(b, m)),
            Term::Fst(b) => Term::Fst(Self::fill(b, m)),
            Term::Snd(b) => Term::Snd(Self::fill(b, m)),
            Term::Val(b) => Term::Val(Self::fill(b, m)),
            Term::If(c, a, b) => Term::If(Self::fill(c, m), Self::fill(a, m), Self::fill(b, m)),
            Term::LetC(y, a, b) => Term::LetC(y.clone(), Self::fill(a, m), Self::fill(b, m)),
            Term::Var(_) | Term::UnitVal | Term::BoolLit(_) | Term::Lit(..) | Term::Const(..) => {
                unreachable!("leaf without hole")
            }
        })
    }

    /// Free variables, Lam and LetC binding their binder in the body.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        fn go(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
            match t {
                Term::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Term::UnitVal | Term::BoolLit(_) | Term::Lit(..) | Term::Const(..) | Term::Hole => {}
                Term::Lam(x, _, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Term::Fst(b) | Term::Snd(b) | Term::Val(b) => go(b, bound, out),
                Term::App(a, b) | Term::Pair(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Term::LetC(x, a, b) => {
                    go(a, bound, out);
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Term::If(c, a, b) => {
                    go(c, bound, out);
                    go(a, bound, out);
                    go(b, bound, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Nameless form: bound variables become de Bruijn indices, free
    /// variables keep their names.
    pub fn to_nameless(&self) -> Nameless {
        fn go(t: &Term, scope: &mut Vec<Name>) -> Nameless {
            match t {
                Term::Var(x) => match scope.iter().rev().position(|y| y == x) {
                    Some(i) => Nameless::Bound(i),
                    None => Nameless::Free(x.clone()),
                },
                Term::Lam(x, ty, b) => {
                    scope.push(x.clone());
                    let b = go(b, scope);
                    scope.pop();
                    Nameless::Lam(ty.clone(), Box::new(b))
                }
                Term::LetC(x, a, b) => {
                    let a = go(a, scope);
                    scope.push(x.clone());
                    let b = go(b, scope);
                    scope.pop();
                    Nameless::LetC(Box::new(a), Box::new(b))
                }
                Term::App(a, b) => Nameless::Node("app", vec![go(a, scope), go(b, scope)]),
                Term::Pair(a, b) => Nameless::Node("pair", vec![go(a, scope), go(b, scope)]),
                Term::Fst(a) => Nameless::Node("fst", vec![go(a, scope)]),
                Term::Snd(a) => Nameless::Node("snd", vec![go(a, scope)]),
                Term::Val(a) => Nameless::Node("val", vec![go(a, scope)]),
                Term::If(c, a, b) => {
                    Nameless::Node("if", vec![go(c, scope), go(a, scope), go(b, scope)])
                }
                Term::UnitVal => Nameless::Node("unit", vec![]),
                Term::BoolLit(b) => Nameless::Node(if *b { "true" } else { "false" }, vec![]),
                Term::Lit(b, i) => Nameless::Lit(b.clone(), *i),
                Term::Const(c, args) => Nameless::Const(c.clone(), args.clone()),
                Term::Hole => Nameless::Node("hole", vec![]),
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.to_nameless() == other.to_nameless()
    }
}

/// De Bruijn form used for alpha-equivalence.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Nameless {
    Bound(usize),
    Free(Name),
    Lam(Type, Box<Nameless>),
    LetC(Box<Nameless>, Box<Nameless>),
    Node(&'static str, Vec<Nameless>),
    Lit(Name, u32),
    Const(Name, Vec<Type>),
}

fn fmt_type_args(f: &mut fmt::Formatter<'_>, args: &[Type]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    write!(f, "[")?;
    for (i, t) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{t}")?;
    }
    write!(f, "]")
}

/// Fully parenthesized canonical rendering.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Lam(x, ty, b) => write!(f, "(\\{x}:{ty}. {b})"),
            Term::App(a, b) => write!(f, "({a} {b})"),
            Term::Pair(a, b) => write!(f, "({a}, {b})"),
            Term::Fst(a) => write!(f, "(fst {a})"),
            Term::Snd(a) => write!(f, "(snd {a})"),
            Term::UnitVal => write!(f, "()"),
            Term::BoolLit(b) => write!(f, "{b}"),
            Term::Lit(b, i) => write!(f, "{b}#{i}"),
            Term::If(c, a, b) => write!(f, "(if {c} then {a} else {b})"),
            Term::Val(a) => write!(f, "(val {a})"),
            Term::LetC(x, a, b) => write!(f, "(let {x} <= {a} in {b})"),
            Term::Const(c, args) => {
                write!(f, "{c}")?;
                fmt_type_args(f, args)
            }
            Term::Hole => write!(f, "_"),
        }
    }
}

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

/// A term with exactly one hole, together with the hole's type and the
/// type of the whole program.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Context {
    pub body: Arc<Term>,
    pub hole_type: Type,
    pub result_type: Type,
}

impl Context {
    pub fn new(body: Term, hole_type: Type, result_type: Type) -> Result<Context> {
        let holes = body.hole_count();
        if holes != 1 {
            return Err(Error::HoleCount(holes));
        }
        Ok(Context {
            body: Arc::new(body),
            hole_type,
            result_type,
        })
    }

    pub fn size(&self) -> usize {
        self.body.size()
    }

    /// Replace the hole by the closed term `m`. Capture is vacuous because
    /// `m` is closed.
    pub fn plug(&self, m: &Term) -> Result<Term> {
        plug(&self.body, m)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.body)
    }
}

pub fn plug(body: &Term, m: &Term) -> Result<Term> {
    let holes = body.hole_count();
    if holes != 1 {
        return Err(Error::HoleCount(holes));
    }
    let filled = Term::fill(&Arc::new(body.clone()), &Arc::new(m.clone()));
    Ok(Arc::try_unwrap(filled).unwrap_or_else(|a| (*a).clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing() {
        assert_eq!(Term::lam("x", Type::Bool, Term::var("x")).to_string(), "(\\x:bool. x)");
        assert_eq!(Term::val(Term::UnitVal).to_string(), "(val ())");
        assert_eq!(
            Term::pair(Term::BoolLit(true), Term::BoolLit(false)).to_string(),
            "(true, false)"
        );
    }

    #[test]
    fn type_printing_precedence() {
        let t = Type::arrow(Type::arrow(Type::Bool, Type::Bool), Type::comp(Type::Bool));
        assert_eq!(t.to_string(), "(bool -> bool) -> T bool");
        let p = Type::comp(Type::prod(Type::Bool, Type::arrow(Type::Unit, Type::Bool)));
        assert_eq!(p.to_string(), "T (bool * (unit -> bool))");
    }

    #[test]
    fn free_vars_cases() {
        assert_eq!(Term::var("x").free_vars().len(), 1);
        assert!(Term::lam("x", Type::Bool, Term::var("x")).free_vars().is_empty());
        let t = Term::letc("x", Term::var("y"), Term::var("x"));
        let fv: Vec<_> = t.free_vars().into_iter().map(|n| n.to_string()).collect();
        assert_eq!(fv, vec!["y"]);
    }

    #[test]
    fn plug_cases() {
        let ctx = Term::letc("x", Term::Hole, Term::val(Term::var("x")));
        let m = Term::val(Term::BoolLit(true));
        assert_eq!(
            plug(&ctx, &m).unwrap(),
            Term::letc("x", m.clone(), Term::val(Term::var("x")))
        );
        assert_eq!(plug(&Term::Hole, &m).unwrap(), m);
        let two = Term::pair(Term::Hole, Term::Hole);
        assert_eq!(plug(&two, &m), Err(Error::HoleCount(2)));
        assert_eq!(plug(&Term::UnitVal, &m), Err(Error::HoleCount(0)));
    }

    #[test]
    fn alpha_equivalence() {
        let a = Term::lam("x", Type::Bool, Term::var("x"));
        let b = Term::lam("y", Type::Bool, Term::var("y"));
        let c = Term::lam("y", Type::Bool, Term::var("x"));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
    }
}
