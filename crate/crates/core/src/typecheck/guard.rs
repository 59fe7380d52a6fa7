//! The syntactic structural guard on fixpoints.
//!
//! A recursive call is accepted when its decreasing argument is a variable
//! bound by a branch of a `case` on the decreasing argument (or on one of
//! its already-accepted subterms), possibly applied to further arguments.

use crate::env::GlobalEnv;
use crate::error::{Error, Result};
use crate::term::{Fix, Name, Term};

#[derive(Clone)]
struct Scope {
    /// The decreasing argument, unless shadowed.
    rec_var: Option<Name>,
    /// Variables known to be strict subterms of it.
    subterms: Vec<Name>,
}

impl Scope {
    fn bind(&self, x: &Name) -> Scope {
        let mut s = self.clone();
        if s.rec_var.as_ref() == Some(x) {
            s.rec_var = None;
        }
        s.subterms.retain(|y| y != x);
        s
    }

    fn is_subterm(&self, t: &Term) -> bool {
        matches!(t.head(), Term::Var(x) if self.subterms.contains(x))
    }

    fn is_decreasing_source(&self, t: &Term) -> bool {
        match t {
            Term::Var(x) if self.rec_var.as_ref() == Some(x) => true,
            _ => self.is_subterm(t),
        }
    }
}

struct Guard<'a> {
    env: &'a GlobalEnv,
    fix: &'a Fix,
}

impl Guard<'_> {
    fn violation(&self, reason: impl Into<String>) -> Error {
        Error::GuardViolation { name: self.fix.name.clone(), reason: reason.into() }
    }

    fn walk(&self, t: &Term, scope: &Scope) -> Result<()> {
        let f = &self.fix.name;
        match t {
            Term::Var(x) if x == f => Err(self.violation(format!("`{f}` is used without its decreasing argument"))),
            Term::Var(_) | Term::Sort(_) | Term::Ind(_) | Term::Constr(_) | Term::Const(_) => Ok(()),
            Term::App(..) => {
                let (head, args) = t.spine();
                if matches!(head, Term::Var(x) if x == f) {
                    let rec = self.fix.rec_arg;
                    let Some(arg) = args.get(rec) else {
                        return Err(self.violation(format!("recursive call with fewer than {} arguments", rec + 1)));
                    };
                    if !scope.is_subterm(arg) {
                        return Err(self.violation(format!("recursive call on {arg}, which is not a structural subterm")));
                    }
                } else if let Term::Lam(..) = head {
                    args.iter().try_for_each(|a| self.walk(a, scope))?;
                    return self.walk_redex(head, &args, scope);
                } else {
                    self.walk(head, scope)?;
                }
                args.iter().try_for_each(|a| self.walk(a, scope))
            }
            Term::Prod(x, a, b) | Term::Lam(x, a, b) => {
                self.walk(a, scope)?;
                self.walk_under(x, b, scope)
            }
            Term::Case(c) => {
                self.walk(&c.scrutinee, scope)?;
                c.params.iter().try_for_each(|p| self.walk(p, scope))?;
                self.walk(&c.motive, scope)?;
                let decreasing = scope.is_decreasing_source(&c.scrutinee);
                let decl = self.env.inductive(&c.ind).ok_or_else(|| Error::UnknownGlobal(c.ind.clone()))?;
                for (branch, ctor) in c.branches.iter().zip(&decl.constructors) {
                    if decreasing {
                        self.walk_branch(branch, ctor.arg_count, scope)?;
                    } else {
                        self.walk(branch, scope)?;
                    }
                }
                Ok(())
            }
            Term::Fix(inner) => {
                self.walk(&inner.annot, scope)?;
                self.walk_under(&inner.name, &inner.body, scope)
            }
        }
    }

    fn walk_under(&self, x: &Name, body: &Term, scope: &Scope) -> Result<()> {
        if x == &self.fix.name {
            // The fixpoint is shadowed: nothing below can call it.
            return Ok(());
        }
        self.walk(body, &scope.bind(x))
    }

    /// `(λx̄. b) ā`: a binder applied to a subterm is itself a subterm.
    fn walk_redex(&self, t: &Term, args: &[&Term], scope: &Scope) -> Result<()> {
        match (t, args.split_first()) {
            (Term::Lam(x, a, b), Some((arg, rest))) => {
                self.walk(a, scope)?;
                if x == &self.fix.name {
                    return Ok(());
                }
                let mut inner = scope.bind(x);
                if scope.is_subterm(arg) {
                    inner.subterms.push(x.clone());
                }
                self.walk_redex(b, rest, &inner)
            }
            _ => self.walk(t, scope),
        }
    }

    /// Binders of the first `n` leading lambdas of a branch on the
    /// decreasing argument are subterms of it.
    fn walk_branch(&self, t: &Term, n: usize, scope: &Scope) -> Result<()> {
        match t {
            Term::Lam(x, a, b) if n > 0 => {
                self.walk(a, scope)?;
                if x == &self.fix.name {
                    return Ok(());
                }
                let mut inner = scope.bind(x);
                inner.subterms.push(x.clone());
                self.walk_branch(b, n - 1, &inner)
            }
            _ => self.walk(t, scope),
        }
    }
}

/// Checks that every recursive call of `fix` is on a strict structural
/// subterm of its decreasing argument.
pub fn check_guard(env: &GlobalEnv, fix: &Fix) -> Result<()> {
    let guard = Guard { env, fix };
    let mut scope = Scope { rec_var: None, subterms: Vec::new() };
    let mut body = &fix.body;
    for i in 0..=fix.rec_arg {
        let Term::Lam(x, a, b) = body else {
            return Err(guard.violation(format!("body does not abstract argument {}", i + 1)));
        };
        guard.walk(a, &scope)?;
        if x == &fix.name {
            return Ok(());
        }
        scope = scope.bind(x);
        if i == fix.rec_arg {
            scope.rec_var = Some(x.clone());
        }
        body = b;
    }
    guard.walk(body, &scope)
}
