//! Name resolution: surface expressions to kernel terms.
//!
//! Elaboration is purely syntactic. Identifiers resolve to the innermost
//! local binder, then to a global; the domains of pattern and `in`
//! binders are read off the declaration with [`instantiate_telescope`].

use super::lexer::Span;
use super::syntax::{BinderGroup, BinderName, Expr, FixExpr, Motive, StructArg};
use crate::env::{instantiate_telescope, GlobalEnv};
use crate::term::{fresh_name, Case, Fix, Name, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElabError {
    pub span: Span,
    pub code: &'static str,
    pub message: String,
}

type EResult<T> = Result<T, ElabError>;

fn err<T>(span: Span, code: &'static str, message: impl Into<String>) -> EResult<T> {
    Err(ElabError { span, code, message: message.into() })
}

pub struct Elaborator<'e> {
    env: &'e GlobalEnv,
    locals: Vec<Name>,
    /// An inductive being declared, resolved as `Ind` before it exists.
    pending: Option<Name>,
}

impl<'e> Elaborator<'e> {
    pub fn new(env: &'e GlobalEnv) -> Self {
        Elaborator { env, locals: Vec::new(), pending: None }
    }

    pub fn with_pending(env: &'e GlobalEnv, ind: Name) -> Self {
        Elaborator { env, locals: Vec::new(), pending: Some(ind) }
    }

    fn binder(&self, b: &BinderName) -> Name {
        match &b.1 {
            Some(x) => Name::new(x),
            None => Name::anon(),
        }
    }

    /// A name for an unnamed binder that other binders may refer to.
    fn fresh_local(&self, base: &str) -> Name {
        fresh_name(base, |c| {
            self.locals.iter().any(|l| l.as_str() == c) || self.env.is_declared(c) || self.pending.as_deref() == Some(c)
        })
    }

    pub fn expr(&mut self, e: &Expr) -> EResult<Term> {
        match e {
            Expr::Ident(span, x) => self.ident(*span, x),
            Expr::Hole(span) => err(*span, "ParseError", "`_` is only allowed as a binder or index name"),
            Expr::Sort(_, s) => Ok(Term::Sort(*s)),
            Expr::Arrow(_, a, b) => {
                let a = self.expr(a)?;
                let b = self.expr(b)?;
                Ok(Term::arrow(a, b))
            }
            Expr::App(_, f, args) => {
                let f = self.expr(f)?;
                let args = args.iter().map(|a| self.expr(a)).collect::<EResult<Vec<_>>>()?;
                Ok(Term::apps(f, args))
            }
            Expr::Forall(_, groups, body) => self.binders(groups, body, Term::prod),
            Expr::Fun(_, groups, body) => self.binders(groups, body, Term::lam),
            Expr::Match(span, m) => self.match_expr(*span, m),
            Expr::Fix(_, f) => Ok(Term::fix(self.fix(f)?)),
        }
    }

    fn ident(&self, span: Span, x: &str) -> EResult<Term> {
        if self.locals.iter().rev().any(|l| l.as_str() == x) {
            return Ok(Term::Var(Name::new(x)));
        }
        if self.pending.as_deref() == Some(x) || self.env.inductive(x).is_some() {
            return Ok(Term::Ind(Name::new(x)));
        }
        if self.env.constructor(x).is_some() {
            return Ok(Term::Constr(Name::new(x)));
        }
        if self.env.definition(x).is_some() || self.env.axiom(x).is_some() {
            return Ok(Term::Const(Name::new(x)));
        }
        err(span, "UnboundVariable", format!("unbound identifier `{x}`"))
    }

    /// Elaborates binder types one name at a time, so each type sees the
    /// names bound before it.
    pub fn telescope(&mut self, groups: &[BinderGroup]) -> EResult<Vec<(Name, Term)>> {
        let mut out = Vec::new();
        for g in groups {
            for n in &g.names {
                let ty = self.expr(&g.ty)?;
                let x = self.binder(n);
                self.locals.push(x.clone());
                out.push((x, ty));
            }
        }
        Ok(out)
    }

    fn pop(&mut self, n: usize) {
        self.locals.truncate(self.locals.len() - n);
    }

    fn binders(&mut self, groups: &[BinderGroup], body: &Expr, mk: fn(Name, Term, Term) -> Term) -> EResult<Term> {
        let tel = self.telescope(groups)?;
        let body = self.expr(body);
        self.pop(tel.len());
        Ok(close(tel, body?, mk))
    }

    /// Elaborates `body` with `tel` (already elaborated) in scope.
    pub fn under(&mut self, tel: &[(Name, Term)], body: &Expr) -> EResult<Term> {
        self.locals.extend(tel.iter().map(|(x, _)| x.clone()));
        let t = self.expr(body);
        self.pop(tel.len());
        t
    }

    pub fn fix(&mut self, f: &FixExpr) -> EResult<Fix> {
        let tel = self.telescope(&f.binders)?;
        let ty = self.expr(&f.ty);
        let ty = match ty {
            Ok(t) => t,
            Err(e) => {
                self.pop(tel.len());
                return Err(e);
            }
        };
        let name = Name::new(&f.name.1);
        self.locals.push(name.clone());
        let body = self.expr(&f.body);
        self.pop(tel.len() + 1);
        let body = body?;
        let rec_arg = match &f.struct_arg {
            StructArg::Name(span, x) => match tel.iter().rposition(|(y, _)| y.as_str() == x) {
                Some(i) => i,
                None => return err(*span, "ParseError", format!("`{x}` is not an argument of `{}`", f.name.1)),
            },
            StructArg::Position(span, 0) => return err(*span, "ParseError", "argument positions start at 1"),
            StructArg::Position(_, n) => *n as usize - 1,
        };
        // The annotation scopes over none of the body's names.
        let annot = close(tel.clone(), ty, Term::prod);
        let body = close(tel, body, Term::lam);
        Ok(Fix { name, annot, body, rec_arg })
    }

    fn match_expr(&mut self, span: Span, m: &super::syntax::Match) -> EResult<Term> {
        let ind = match &m.ind {
            Some((_, i)) => Name::new(i),
            None => {
                let first = m.branches.iter().find_map(|b| b.ctor.as_ref());
                match first.and_then(|(_, c)| self.env.constructor(c)) {
                    Some((d, _)) => d.name.clone(),
                    None => return err(span, "MalformedCase", "cannot tell which inductive is matched; add `in I`"),
                }
            }
        };
        let Some(decl) = self.env.inductive(&ind).cloned() else {
            let at = m.ind.as_ref().map_or(span, |(s, _)| *s);
            return err(at, "UnknownGlobal", format!("`{ind}` is not an inductive type"));
        };
        let (p, n) = (decl.param_count, decl.index_count);
        let scrutinee = self.expr(&m.scrutinee)?;
        let index_args = match &m.motive {
            Motive::Return(_) => n,
            Motive::Using(_) => 0,
        };
        if m.in_args.len() != p + index_args || (m.ind.is_none() && p + index_args > 0) {
            return err(
                span,
                "MalformedCase",
                format!("`in {ind}` expects {p} parameter(s) and {index_args} index name(s)"),
            );
        }
        let params = m.in_args[..p].iter().map(|a| self.expr(a)).collect::<EResult<Vec<_>>>()?;
        let motive = match &m.motive {
            Motive::Using(t) => self.expr(t)?,
            Motive::Return(body) => {
                let mut ys = Vec::new();
                for a in &m.in_args[p..] {
                    let y = match a {
                        Expr::Ident(_, y) => Name::new(y),
                        Expr::Hole(_) => self.fresh_local("y"),
                        other => return err(other.span(), "ParseError", "expected an index name"),
                    };
                    ys.push(y);
                }
                let Some((doms, _)) = instantiate_telescope(&decl.arity, &params, &ys) else {
                    return err(span, "MalformedCase", format!("arity of `{ind}` has too few products"));
                };
                let a = m.as_name.as_ref().map_or_else(Name::anon, |b| self.binder(b));
                let scrut_ty =
                    Term::apps(Term::Ind(ind.clone()), params.iter().cloned().chain(ys.iter().cloned().map(Term::Var)));
                let mut tel: Vec<(Name, Term)> = ys.into_iter().zip(doms).collect();
                tel.push((a, scrut_ty));
                let body = self.under(&tel, body)?;
                close(tel, body, Term::lam)
            }
        };
        if m.branches.len() != decl.constructors.len() {
            return err(
                span,
                "MalformedCase",
                format!("`{ind}` has {} constructor(s) but the match has {} branch(es)", decl.constructors.len(), m.branches.len()),
            );
        }
        let mut branches = Vec::new();
        for (b, k) in m.branches.iter().zip(&decl.constructors) {
            if let Some((s, c)) = &b.ctor {
                if c.as_str() != k.name.as_str() {
                    return err(*s, "MalformedCase", format!("expected a branch for `{}`, found `{c}`", k.name));
                }
            }
            if b.vars.is_empty() {
                branches.push(self.expr(&b.rhs)?);
                continue;
            }
            if b.vars.len() != k.arg_count {
                return err(b.span, "MalformedCase", format!("`{}` takes {} argument(s)", k.name, k.arg_count));
            }
            let zs: Vec<Name> =
                b.vars.iter().map(|v| if v.1.is_some() { self.binder(v) } else { self.fresh_local("z") }).collect();
            let Some((doms, _)) = instantiate_telescope(&k.ty, &params, &zs) else {
                return err(b.span, "MalformedCase", format!("type of `{}` has too few products", k.name));
            };
            let tel: Vec<(Name, Term)> = zs.into_iter().zip(doms).collect();
            let rhs = self.under(&tel, &b.rhs)?;
            branches.push(close(tel, rhs, Term::lam));
        }
        Ok(Term::case(Case { ind, scrutinee, params, motive, branches }))
    }
}

fn close(tel: Vec<(Name, Term)>, body: Term, mk: fn(Name, Term, Term) -> Term) -> Term {
    tel.into_iter().rev().fold(body, |acc, (x, a)| mk(x, a, acc))
}

/// `Π tel. body` over an elaborated telescope.
pub fn pi(tel: &[(Name, Term)], body: Term) -> Term {
    close(tel.to_vec(), body, Term::prod)
}

/// `λ tel. body` over an elaborated telescope.
pub fn lambda(tel: &[(Name, Term)], body: Term) -> Term {
    close(tel.to_vec(), body, Term::lam)
}
