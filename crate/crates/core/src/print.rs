//! Pretty-printing terms in the surface syntax.
//!
//! Output re-parses to an α-equal term. With an environment at hand the
//! printer uses pattern syntax for `match` branches and `in I .. y` motive
//! binders; without one it falls back to the function forms (`using T`,
//! `| c => F`).

use std::collections::HashSet;
use std::fmt;

use crate::env::{instantiate_telescope, GlobalEnv, InductiveDecl};
use crate::term::{fresh_name, Case, Fix, Name, Term};

/// Binding strength of the position a term is printed in.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    /// Binders, arrows, anything.
    Top,
    /// Left of an arrow: applications but no binders.
    App,
    /// Argument of an application: atoms only.
    Atom,
}

pub struct Printer<'e> {
    env: Option<&'e GlobalEnv>,
}

impl<'e> Printer<'e> {
    pub fn new(env: Option<&'e GlobalEnv>) -> Self {
        Printer { env }
    }

    pub fn term(&self, t: &Term) -> String {
        let mut out = String::new();
        self.print(t, Prec::Top, &mut out);
        out
    }

    fn print(&self, t: &Term, prec: Prec, out: &mut String) {
        match t {
            Term::Var(x) | Term::Ind(x) | Term::Constr(x) | Term::Const(x) => out.push_str(x.as_str()),
            Term::Sort(s) => out.push_str(&s.to_string()),
            Term::App(..) => {
                let (head, args) = t.spine();
                paren(prec > Prec::App, out, |out| {
                    self.print(head, Prec::Atom, out);
                    for a in args {
                        out.push(' ');
                        self.print(a, Prec::Atom, out);
                    }
                });
            }
            Term::Prod(x, a, b) if x.is_anon() || !b.has_free(x) => {
                paren(prec > Prec::Top, out, |out| {
                    self.print(a, Prec::App, out);
                    out.push_str(" -> ");
                    self.print(b, Prec::Top, out);
                });
            }
            Term::Prod(..) => paren(prec > Prec::Top, out, |out| self.binders("forall", ",", t, out)),
            Term::Lam(..) => paren(prec > Prec::Top, out, |out| self.binders("fun", " =>", t, out)),
            Term::Case(c) => self.case(c, out),
            Term::Fix(f) => paren(prec > Prec::Top, out, |out| self.fix(f, out)),
        }
    }

    /// `forall (x y : A) (z : B), C` grouping consecutive binders of the
    /// same kind.
    fn binders(&self, kw: &str, sep: &str, t: &Term, out: &mut String) {
        let is_prod = matches!(t, Term::Prod(..));
        let mut groups: Vec<(Vec<Name>, Term)> = Vec::new();
        let mut cur = t.clone();
        loop {
            let (x, a, b) = match &cur {
                Term::Prod(x, a, b) if is_prod && !x.is_anon() && b.has_free(x) => (x, a, b),
                Term::Lam(x, a, b) if !is_prod => (x, a, b),
                _ => break,
            };
            let (x, b) = self.binder_name(x, b);
            match groups.last_mut() {
                Some((names, dom)) if dom.alpha_eq(a) && !names.iter().any(|n| a.has_free(n)) => {
                    names.push(x)
                }
                _ => groups.push((vec![x], (**a).clone())),
            }
            cur = b;
        }
        out.push_str(kw);
        for (names, dom) in &groups {
            out.push_str(" (");
            for n in names {
                out.push_str(n.as_str());
                out.push(' ');
            }
            out.push_str(": ");
            self.print(dom, Prec::Top, out);
            out.push(')');
        }
        out.push_str(sep);
        out.push(' ');
        self.print(&cur, Prec::Top, out);
    }

    /// Renames a binder whose name would be read back as a global it scopes
    /// over.
    fn binder_name(&self, x: &Name, body: &Term) -> (Name, Term) {
        if x.is_anon() {
            return (x.clone(), body.clone());
        }
        let globals = body.globals();
        if !globals.contains(x) {
            return (x.clone(), body.clone());
        }
        let fv = body.free_vars();
        let y = fresh_name(x.as_str(), |c| globals.contains(c) || fv.contains(c));
        let body = body.subst(x, &Term::Var(y.clone()));
        (y, body)
    }

    fn case(&self, c: &Case, out: &mut String) {
        out.push_str("match ");
        self.print(&c.scrutinee, Prec::Top, out);
        let decl = self.env.and_then(|env| env.inductive(&c.ind));
        let sugar = decl.and_then(|d| self.motive_sugar(c, d.arity.clone(), d.index_count));
        if let Some((a, ys, body)) = &sugar {
            if !a.is_anon() {
                out.push_str(" as ");
                out.push_str(a.as_str());
            }
            out.push_str(" in ");
            out.push_str(c.ind.as_str());
            for q in &c.params {
                out.push(' ');
                self.print(q, Prec::Atom, out);
            }
            for y in ys {
                out.push(' ');
                out.push_str(y.as_str());
            }
            out.push_str(" return ");
            self.print(body, Prec::Top, out);
        } else {
            out.push_str(" in ");
            out.push_str(c.ind.as_str());
            for q in &c.params {
                out.push(' ');
                self.print(q, Prec::Atom, out);
            }
            out.push_str(" using ");
            self.print(&c.motive, Prec::Top, out);
        }
        out.push_str(" with");
        for (j, branch) in c.branches.iter().enumerate() {
            out.push_str(" | ");
            let ctor = decl.map(|d| &d.constructors[j]);
            match ctor {
                Some(k) => {
                    out.push_str(k.name.as_str());
                    match self.pattern_sugar(c, k, branch) {
                        Some((zs, rhs)) => {
                            for z in &zs {
                                out.push(' ');
                                out.push_str(z.as_str());
                            }
                            out.push_str(" => ");
                            self.print(&rhs, Prec::Top, out);
                        }
                        None => {
                            out.push_str(" => ");
                            self.print(branch, Prec::Top, out);
                        }
                    }
                }
                None => {
                    // Without declarations we cannot name the constructor.
                    out.push_str("_ => ");
                    self.print(branch, Prec::Top, out);
                }
            }
        }
        out.push_str(" end");
    }

    /// `(a, [y..], body)` when the motive is `fun (y : B[Q/x]).. (a : I Q y..) => body`
    /// with exactly the domains the parser would rebuild.
    fn motive_sugar(&self, c: &Case, arity: Term, n: usize) -> Option<(Name, Vec<Name>, Term)> {
        let mut names = Vec::new();
        let mut doms = Vec::new();
        let mut cur = c.motive.clone();
        for i in 0..=n {
            let Term::Lam(x, a, b) = cur else { return None };
            let (x, b) = self.binder_name(&x, &b);
            // Only the scrutinee binder may stay anonymous.
            if (x.is_anon() && i < n) || (!x.is_anon() && names.contains(&x)) {
                return None;
            }
            names.push(x);
            doms.push((*a).clone());
            cur = b;
        }
        let a = names.pop()?;
        let (expected, _) = instantiate_telescope(&arity, &c.params, &names)?;
        let scrut_ty = Term::apps(
            Term::Ind(c.ind.clone()),
            c.params.iter().cloned().chain(names.iter().map(|y| Term::Var(y.clone()))),
        );
        let binders_ok = expected.iter().chain([&scrut_ty]).zip(&doms).all(|(e, d)| e.alpha_eq(d));
        if !binders_ok || self.captures(c, names.iter().chain([&a])) {
            return None;
        }
        Some((a, names, cur))
    }

    /// Pattern variables and right-hand side of a branch that is a
    /// λ-abstraction over exactly the constructor arguments.
    fn pattern_sugar(&self, c: &Case, k: &crate::env::Constructor, branch: &Term) -> Option<(Vec<Name>, Term)> {
        let mut names = Vec::new();
        let mut doms = Vec::new();
        let mut cur = branch.clone();
        for _ in 0..k.arg_count {
            let Term::Lam(x, a, b) = cur else { return None };
            let (x, b) = if x.is_anon() {
                let fv = b.free_vars();
                let avoid: HashSet<&Name> = names.iter().collect();
                (fresh_name("x", |s| fv.contains(s) || avoid.iter().any(|n| n.as_str() == s)), (*b).clone())
            } else {
                self.binder_name(&x, &b)
            };
            if names.contains(&x) {
                return None;
            }
            names.push(x);
            doms.push((*a).clone());
            cur = b;
        }
        if k.arg_count == 0 {
            return Some((names, cur));
        }
        let (expected, _) = instantiate_telescope(&k.ty, &c.params, &names)?;
        let ok = expected.iter().zip(&doms).all(|(e, d)| e.alpha_eq(d));
        (ok && !self.captures(c, names.iter())).then_some((names, cur))
    }

    /// Whether a pattern name would capture a free variable of the
    /// parameters.
    fn captures<'n>(&self, c: &Case, mut names: impl Iterator<Item = &'n Name>) -> bool {
        names.any(|n| c.params.iter().any(|q| q.has_free(n)))
    }

    fn fix(&self, f: &Fix, out: &mut String) {
        // Peel binders shared between the annotation and the body.
        let mut binders: Vec<(Name, Term)> = Vec::new();
        let mut annot = f.annot.clone();
        let mut body = f.body.clone();
        while binders.len() <= f.rec_arg {
            let (Term::Prod(px, pa, pb), Term::Lam(lx, la, lb)) = (&annot, &body) else { break };
            if !pa.alpha_eq(la) || lx.is_anon() || lx == &f.name || binders.iter().any(|(n, _)| n == lx) {
                break;
            }
            if px != lx && !px.is_anon() && pb.has_free(lx) {
                break;
            }
            let (lx, lb) = self.binder_name(lx, lb);
            let pb = if px.is_anon() { (**pb).clone() } else { pb.subst(px, &Term::Var(lx.clone())) };
            binders.push((lx, (**la).clone()));
            annot = pb;
            body = lb;
        }
        out.push_str("fix ");
        out.push_str(f.name.as_str());
        for (x, a) in &binders {
            out.push_str(" (");
            out.push_str(x.as_str());
            out.push_str(" : ");
            self.print(a, Prec::Top, out);
            out.push(')');
        }
        match binders.get(f.rec_arg) {
            Some((x, _)) => out.push_str(&format!(" {{struct {x}}}")),
            None => out.push_str(&format!(" {{struct {}}}", f.rec_arg + 1)),
        }
        out.push_str(" : ");
        self.print(&annot, Prec::Top, out);
        out.push_str(" := ");
        self.print(&body, Prec::Top, out);
    }
}

fn paren(wrap: bool, out: &mut String, inner: impl FnOnce(&mut String)) {
    if wrap {
        out.push('(');
    }
    inner(out);
    if wrap {
        out.push(')');
    }
}

/// Prints an inductive declaration as an `Inductive` command, with the
/// parameters as named binders.
pub fn print_inductive(decl: &InductiveDecl, env: &GlobalEnv) -> String {
    let printer = Printer::new(Some(env));
    let mut params: Vec<(Name, Term)> = Vec::new();
    let mut arity = decl.arity.clone();
    for _ in 0..decl.param_count {
        let Term::Prod(x, a, b) = &arity else { break };
        let used: HashSet<Name> = params.iter().map(|(n, _)| n.clone()).collect();
        let globals = b.globals();
        let y = if x.is_anon() || used.contains(x) || globals.contains(x) {
            fresh_name(if x.is_anon() { "A" } else { x.as_str() }, |c| {
                used.contains(c) || globals.contains(c) || b.free_vars().contains(c) || env.is_declared(c)
            })
        } else {
            x.clone()
        };
        let b = if x.is_anon() { (**b).clone() } else { b.subst(x, &Term::Var(y.clone())) };
        params.push((y, (**a).clone()));
        arity = b;
    }
    let vars: Vec<Term> = params.iter().map(|(x, _)| Term::Var(x.clone())).collect();
    let mut out = format!("Inductive {}", decl.name);
    for (x, a) in &params {
        out.push_str(&format!(" ({x} : {})", printer.term(a)));
    }
    out.push_str(&format!(" : {} :=", printer.term(&arity)));
    for k in &decl.constructors {
        let ty = instantiate_telescope(&k.ty, &vars, &[]).map_or_else(|| k.ty.clone(), |(_, t)| t);
        out.push_str(&format!("\n  | {} : {}", k.name, printer.term(&ty)));
    }
    out.push('.');
    out
}

/// Prints `t` using declarations from `env` for pattern syntax.
pub fn print_term(t: &Term, env: &GlobalEnv) -> String {
    Printer::new(Some(env)).term(t)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Printer::new(None).term(self))
    }
}
