//! The forgetful embedding into plain CIC: every `Set@i` becomes `Type@i`,
//! checked per declaration by re-running the kernel in CIC mode.

use crate::env::{DeclKind, GlobalEnv, InductiveSpec, KernelConfig, Mode};
use crate::error::{Error, Result};
use crate::term::{Case, Context, Fix, Name, Sort, Term};
use crate::typecheck::{declare_inductive, register_axiom, register_definition, TypeChecker};

pub fn embed_sort(s: Sort) -> Sort {
    match s {
        Sort::Set(i) => Sort::Type(i),
        s => s,
    }
}

/// `|t|`: replaces every `Set@i` by `Type@i`.
pub fn embed(t: &Term) -> Term {
    let e = |t: &Term| embed(t);
    match t {
        Term::Sort(s) => Term::Sort(embed_sort(*s)),
        Term::Var(_) | Term::Ind(_) | Term::Constr(_) | Term::Const(_) => t.clone(),
        Term::Prod(x, a, b) => Term::prod(x.clone(), e(a), e(b)),
        Term::Lam(x, a, b) => Term::lam(x.clone(), e(a), e(b)),
        Term::App(f, a) => Term::app(e(f), e(a)),
        Term::Case(c) => Term::case(Case {
            ind: c.ind.clone(),
            scrutinee: e(&c.scrutinee),
            params: c.params.iter().map(e).collect(),
            motive: e(&c.motive),
            branches: c.branches.iter().map(e).collect(),
        }),
        Term::Fix(f) => Term::fix(Fix { name: f.name.clone(), annot: e(&f.annot), body: e(&f.body), rec_arg: f.rec_arg }),
    }
}

pub fn embed_context(ctx: &Context) -> Context {
    ctx.entries().iter().map(|(x, t)| (x.clone(), embed(t))).collect()
}

fn failed(name: &Name, e: Error) -> Error {
    Error::EmbeddingFailed { name: name.clone(), source: Box::new(e) }
}

/// Re-declares `name` (and, first, everything declared before it) in a
/// CIC-mode environment. Fails with [`Error::EmbeddingFailed`] on the first
/// declaration the CIC kernel rejects.
pub fn embed_env(env: &GlobalEnv, prop_cumulative: bool, upto: Option<&Name>) -> Result<GlobalEnv> {
    let config = KernelConfig { mode: Mode::Cic { prop_cumulative }, fuel: env.config().fuel };
    let mut out = GlobalEnv::new(config);
    for (kind, name) in env.declarations() {
        embed_declaration(env, &mut out, kind, name).map_err(|e| failed(name, e))?;
        if upto == Some(name) {
            break;
        }
    }
    Ok(out)
}

fn embed_declaration(env: &GlobalEnv, out: &mut GlobalEnv, kind: &DeclKind, name: &Name) -> Result<()> {
    let missing = || Error::UnknownGlobal(name.clone());
    match kind {
        DeclKind::Inductive => {
            let d = env.inductive(name).ok_or_else(missing)?;
            declare_inductive(
                out,
                InductiveSpec {
                    name: d.name.clone(),
                    param_count: d.param_count,
                    arity: embed(&d.arity),
                    constructors: d.constructors.iter().map(|k| (k.name.clone(), embed(&k.ty))).collect(),
                },
            )
        }
        DeclKind::Definition => {
            let d = env.definition(name).ok_or_else(missing)?;
            register_definition(out, name.clone(), Some(embed(&d.ty)), embed(&d.body)).map(|_| ())
        }
        DeclKind::Axiom => register_axiom(out, name.clone(), embed(env.axiom(name).ok_or_else(missing)?)),
        DeclKind::Witness => {
            let w = embed(env.witness(name).ok_or_else(missing)?);
            let ty = embed(env.witness_type(name).ok_or_else(missing)?);
            TypeChecker::new(out).expect(&Context::new(), &w, &ty)
        }
    }
}

/// Checks that `|A| : |B|` in CIC for the named global and everything it
/// was declared after.
pub fn check_embedding(env: &GlobalEnv, name: &Name, prop_cumulative: bool) -> Result<bool> {
    if !env.declarations().iter().any(|(_, n)| n == name) {
        return Err(Error::UnknownGlobal(name.clone()));
    }
    embed_env(env, prop_cumulative, Some(name)).map(|_| true)
}

/// Checks `|t| : |ty|` in the CIC-mode environment `cic`.
pub fn check_embedded_term(cic: &GlobalEnv, ctx: &Context, t: &Term, ty: &Term) -> Result<bool> {
    TypeChecker::new(cic).check(&embed_context(ctx), &embed(t), &embed(ty))
}
