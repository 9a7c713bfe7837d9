//! Type inference for the computational lambda-calculus and elaboration
//! into the evaluator's core form.

use crate::error::{Error, Result, TypeError};
use crate::monads::{ConstKind, MonadOptions};
use crate::signature::Signature;
use crate::syntax::{Context, Name, Term, Type};

/// Ordered typing context; identifiers are unique.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct TypeCtx {
    bindings: Vec<(Name, Type)>,
}

impl TypeCtx {
    pub fn new() -> TypeCtx {
        TypeCtx::default()
    }

    pub fn insert(&mut self, x: &str, t: Type) -> Result<()> {
        if self.get(x).is_some() {
            return Err(Error::Config(format!("duplicate identifier `{x}` in typing context")));
        }
        self.bindings.push((x.into(), t));
        Ok(())
    }

    pub fn with(mut self, x: &str, t: Type) -> Result<TypeCtx> {
        self.insert(x, t)?;
        Ok(self)
    }

    pub fn get(&self, x: &str) -> Option<&Type> {
        self.bindings.iter().find(|(y, _)| &**y == x).map(|(_, t)| t)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.bindings.iter().map(|(x, t)| (x, t))
    }
}

/// Evaluator core: variables are de Bruijn levels and the types needed by
/// the semantics are explicit.
#[derive(Clone, Debug)]
pub(crate) enum Core {
    Var(usize),
    Lam(Type, Box<Core>),
    /// Function, argument, argument type.
    App(Box<Core>, Box<Core>, Type),
    Pair(Box<Core>, Box<Core>),
    Fst(Box<Core>),
    Snd(Box<Core>),
    Unit,
    Bool(bool),
    Lit(Name, u32),
    If(Box<Core>, Box<Core>, Box<Core>),
    /// Value and its type.
    Val(Box<Core>, Type),
    /// Bound computation, body, bound value type, result value type.
    LetC(Box<Core>, Box<Core>, Type, Type),
    /// Constant, its type arguments and its instantiated type.
    Const(ConstKind, Vec<Type>, Type),
    ConstApp(ConstKind, Vec<Type>, Box<Core>),
    Hole,
}

struct Elab<'a> {
    sig: &'a Signature,
    allow_ccall: bool,
    hole: Option<&'a Type>,
    scope: Vec<(Name, Type)>,
}

impl Elab<'_> {
    fn constant(&self, name: &str, args: &[Type]) -> Result<(ConstKind, Type)> {
        let k = ConstKind::from_name(name)
            .filter(|k| k.available_in(self.sig))
            .filter(|k| *k != ConstKind::Ccall || self.allow_ccall)
            .ok_or_else(|| TypeError::UnknownConst(name.to_string()))?;
        for a in args {
            self.sig.check_type(a)?;
        }
        Ok((k, k.type_of(args, self.sig)?))
    }

    fn go(&mut self, t: &Term) -> Result<(Core, Type)> {
        let b = Box::new;
        Ok(match t {
            Term::Var(x) => {
                let i = self
                    .scope
                    .iter()
                    .rposition(|(y, _)| y == x)
                    .ok_or_else(|| TypeError::Unbound(x.to_string()))?;
                (Core::Var(i), self.scope[i].1.clone())
            }
            Term::Lam(x, ty, body) => {
                self.sig.check_type(ty)?;
                self.scope.push((x.clone(), ty.clone()));
                let r = self.go(body);
                self.scope.pop();
                let (body, cod) = r?;
                (Core::Lam(ty.clone(), b(body)), Type::arrow(ty.clone(), cod))
            }
            Term::App(f, a) => {
                let (fc, ft) = self.go(f)?;
                let (ac, at) = self.go(a)?;
                let Type::Arrow(dom, cod) = &ft else {
                    return Err(TypeError::NotArrow(ft).into());
                };
                if **dom != at {
                    return Err(TypeError::ArgMismatch {
                        expected: (**dom).clone(),
                        found: at,
                    }
                    .into());
                }
                let core = match fc {
                    Core::Const(k, args, _) if k.is_unary() => Core::ConstApp(k, args, b(ac)),
                    fc => Core::App(b(fc), b(ac), at),
                };
                (core, (**cod).clone())
            }
            Term::Pair(l, r) => {
                let (lc, lt) = self.go(l)?;
                let (rc, rt) = self.go(r)?;
                (Core::Pair(b(lc), b(rc)), Type::prod(lt, rt))
            }
            Term::Fst(p) | Term::Snd(p) => {
                let (pc, pt) = self.go(p)?;
                let Type::Prod(l, r) = &pt else {
                    return Err(TypeError::NotProd(pt).into());
                };
                if matches!(t, Term::Fst(_)) {
                    (Core::Fst(b(pc)), (**l).clone())
                } else {
                    (Core::Snd(b(pc)), (**r).clone())
                }
            }
            Term::UnitVal => (Core::Unit, Type::Unit),
            Term::BoolLit(v) => (Core::Bool(*v), Type::Bool),
            Term::Lit(base, i) => {
                let ok = self.sig.is_designated(base)
                    && self.sig.base_size(base).is_some_and(|n| *i < n);
                if !ok {
                    return Err(TypeError::BadLiteral {
                        base: base.to_string(),
                        index: *i,
                    }
                    .into());
                }
                (Core::Lit(base.clone(), *i), Type::Base(base.clone()))
            }
            Term::If(c, x, y) => {
                let (cc, ct) = self.go(c)?;
                if ct != Type::Bool {
                    return Err(TypeError::CondNotBool(ct).into());
                }
                let (xc, xt) = self.go(x)?;
                let (yc, yt) = self.go(y)?;
                if xt != yt {
                    return Err(TypeError::BranchMismatch(xt, yt).into());
                }
                (Core::If(b(cc), b(xc), b(yc)), xt)
            }
            Term::Val(m) => {
                let (mc, mt) = self.go(m)?;
                (Core::Val(b(mc), mt.clone()), Type::comp(mt))
            }
            Term::LetC(x, m, n) => {
                let (mc, mt) = self.go(m)?;
                let Type::Comp(inner) = &mt else {
                    return Err(TypeError::NotComp(mt).into());
                };
                let inner = (**inner).clone();
                self.scope.push((x.clone(), inner.clone()));
                let r = self.go(n);
                self.scope.pop();
                let (nc, nt) = r?;
                let Type::Comp(out) = &nt else {
                    return Err(TypeError::LetBodyNotComp(nt).into());
                };
                let out = (**out).clone();
                (Core::LetC(b(mc), b(nc), inner, out), nt)
            }
            Term::Const(name, args) => {
                let (k, ty) = self.constant(name, args)?;
                (Core::Const(k, args.clone(), ty.clone()), ty)
            }
            Term::Hole => match self.hole {
                Some(t) => (Core::Hole, t.clone()),
                None => return Err(TypeError::StrayHole.into()),
            },
        })
    }
}

pub(crate) fn elaborate(
    ctx: &TypeCtx,
    t: &Term,
    sig: &Signature,
    options: MonadOptions,
    hole: Option<&Type>,
) -> Result<(Core, Type)> {
    let mut e = Elab {
        sig,
        allow_ccall: options.ccall,
        hole,
        scope: ctx.bindings.clone(),
    };
    e.go(t)
}

/// The type of `t` under `ctx`. All constants of the signature's monad are
/// in scope, `ccall` included.
pub fn infer(ctx: &TypeCtx, t: &Term, sig: &Signature) -> Result<Type> {
    let options = MonadOptions { ccall: true, ..Default::default() };
    Ok(elaborate(ctx, t, sig, options, None)?.1)
}

/// Type a context by treating its hole as a constant of the hole type, and
/// confirm the declared result type. Returns `(hole type, result type)`.
pub fn check_context(c: &Context, sig: &Signature) -> Result<(Type, Type)> {
    let holes = c.body.hole_count();
    if holes != 1 {
        return Err(Error::HoleCount(holes));
    }
    let options = MonadOptions { ccall: true, ..Default::default() };
    let (_, ty) = elaborate(&TypeCtx::new(), &c.body, sig, options, Some(&c.hole_type))?;
    if ty != c.result_type {
        return Err(TypeError::ResultMismatch {
            expected: c.result_type.clone(),
            found: ty,
        }
        .into());
    }
    Ok((c.hole_type.clone(), ty))
}

/// Order of a type; `T` is transparent.
pub fn order(t: &Type) -> usize {
    match t {
        Type::Unit | Type::Bool | Type::Base(_) => 0,
        Type::Prod(a, b) => order(a).max(order(b)),
        Type::Arrow(a, b) => (order(a) + 1).max(order(b)),
        Type::Comp(a) => order(a),
    }
}

pub fn is_first_order(t: &Type) -> bool {
    order(t) <= 1
}
