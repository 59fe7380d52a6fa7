//! β-, ι- and δ-reduction, weak-head and full normalization, and the
//! conversion check.
//!
//! Every entry point draws from a [`Fuel`] budget so the checker stays total
//! even on terms whose normalization it cannot see.

use crate::env::GlobalEnv;
use crate::error::{Error, Result};
use crate::term::{alpha_eq, fresh_name, Case, Fix, Name, Term};

/// A reduction-step budget.
#[derive(Clone, Copy, Debug)]
pub struct Fuel {
    remaining: u64,
    limit: u64,
}

impl Fuel {
    pub fn new(limit: u64) -> Self {
        Fuel { remaining: limit, limit }
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    fn tick(&mut self) -> Result<()> {
        if self.remaining == 0 {
            return Err(Error::FuelExhausted(self.limit));
        }
        self.remaining -= 1;
        Ok(())
    }
}

/// Which reductions to perform; β is always on.
#[derive(Clone, Copy, Debug)]
struct Flags {
    iota: bool,
    delta: bool,
}

const ALL: Flags = Flags { iota: true, delta: true };
const BETA: Flags = Flags { iota: false, delta: false };

/// One head β-contraction `(λx:A.B) N ... ▷ B[N/x] ...`, if the head is a
/// redex.
pub fn beta_step(t: &Term) -> Option<Term> {
    let (head, args) = t.spine();
    match head {
        Term::Lam(x, _, body) if !args.is_empty() => {
            Some(Term::apps(body.subst(x, args[0]), args[1..].iter().map(|a| (*a).clone())))
        }
        _ => None,
    }
}

/// The constructor heading `t`, its owning inductive's parameter count, its
/// index among the inductive's constructors and its arguments.
fn constructor_app<'t>(t: &'t Term, env: &GlobalEnv) -> Option<(Name, usize, Vec<&'t Term>)> {
    let (head, args) = t.spine();
    match head {
        Term::Constr(c) => {
            let (decl, j) = env.constructor(c)?;
            Some((decl.name.clone(), j, args))
        }
        _ => None,
    }
}

fn select_branch(case: &Case, ind: &Name, j: usize, cargs: &[&Term], env: &GlobalEnv) -> Result<Option<Term>> {
    if ind != &case.ind {
        return Ok(None);
    }
    let decl = env.inductive(ind).ok_or_else(|| Error::UnknownGlobal(ind.clone()))?;
    if case.branches.len() != decl.constructors.len() {
        return Err(Error::MalformedCase {
            ind: ind.clone(),
            reason: format!(
                "{} branches for {} constructors",
                case.branches.len(),
                decl.constructors.len()
            ),
        });
    }
    if cargs.len() < decl.param_count {
        return Ok(None);
    }
    let rest = cargs[decl.param_count..].iter().map(|a| (*a).clone());
    Ok(Some(Term::apps(case.branches[j].clone(), rest)))
}

fn unfold_fix(fx: &Fix, args: &[&Term], rec: Term) -> Term {
    let unfolded = fx.body.subst(&fx.name, &Term::Fix(std::sync::Arc::new(fx.clone())));
    let args = args
        .iter()
        .enumerate()
        .map(|(i, a)| if i == fx.rec_arg { rec.clone() } else { (*a).clone() });
    Term::apps(unfolded, args)
}

/// One head ι-contraction, without reducing the scrutinee first:
/// `case_I(c_j Q M, Q, T, F) ▷ F_j M` and
/// `(fix f. M) .. (c_j Q M) .. ▷ M[fix f. M / f] .. (c_j Q M) ..`.
pub fn iota_step(t: &Term, env: &GlobalEnv) -> Result<Option<Term>> {
    let (head, args) = t.spine();
    match head {
        Term::Case(case) => {
            let Some((ind, j, cargs)) = constructor_app(&case.scrutinee, env) else {
                return Ok(None);
            };
            Ok(select_branch(case, &ind, j, &cargs, env)?
                .map(|b| Term::apps(b, args.iter().map(|a| (*a).clone()))))
        }
        Term::Fix(fx) if args.len() > fx.rec_arg => {
            let rec = args[fx.rec_arg];
            if constructor_app(rec, env).is_none() {
                return Ok(None);
            }
            Ok(Some(unfold_fix(fx, &args, rec.clone())))
        }
        _ => Ok(None),
    }
}

fn head_step(t: &Term, env: &GlobalEnv, fuel: &mut Fuel, flags: Flags) -> Result<Option<Term>> {
    let (head, args) = t.spine();
    let rest = |from: usize| args[from..].iter().map(|a| (*a).clone()).collect::<Vec<_>>();
    match head {
        Term::Lam(x, _, body) if !args.is_empty() => Ok(Some(Term::apps(body.subst(x, args[0]), rest(1)))),
        Term::Const(c) if flags.delta => {
            Ok(env.definition(c).map(|d| Term::apps(d.body.clone(), rest(0))))
        }
        Term::Case(case) if flags.iota => {
            let scrut = whnf_with(&case.scrutinee, env, fuel, flags)?;
            let Some((ind, j, cargs)) = constructor_app(&scrut, env) else {
                return Ok(None);
            };
            Ok(select_branch(case, &ind, j, &cargs, env)?.map(|b| Term::apps(b, rest(0))))
        }
        Term::Fix(fx) if flags.iota && args.len() > fx.rec_arg => {
            let rec = whnf_with(args[fx.rec_arg], env, fuel, flags)?;
            if constructor_app(&rec, env).is_none() {
                return Ok(None);
            }
            Ok(Some(unfold_fix(fx, &args, rec)))
        }
        _ => Ok(None),
    }
}

fn whnf_with(t: &Term, env: &GlobalEnv, fuel: &mut Fuel, flags: Flags) -> Result<Term> {
    let mut cur = t.clone();
    while let Some(next) = head_step(&cur, env, fuel, flags)? {
        fuel.tick()?;
        cur = next;
    }
    Ok(cur)
}

/// Weak-head normal form under β, ι and δ (definitions unfold only in head
/// position).
pub fn whnf(t: &Term, env: &GlobalEnv, fuel: &mut Fuel) -> Result<Term> {
    whnf_with(t, env, fuel, ALL)
}

fn normalize_with(t: &Term, env: &GlobalEnv, fuel: &mut Fuel, flags: Flags) -> Result<Term> {
    let w = whnf_with(t, env, fuel, flags)?;
    let nf = |t: &Term, fuel: &mut Fuel| normalize_with(t, env, fuel, flags);
    Ok(match &w {
        Term::Prod(x, a, b) => Term::prod(x.clone(), nf(a, fuel)?, nf(b, fuel)?),
        Term::Lam(x, a, b) => Term::lam(x.clone(), nf(a, fuel)?, nf(b, fuel)?),
        Term::App(..) => {
            let (head, args) = w.spine();
            let head = match head {
                Term::Case(_) | Term::Fix(_) => nf(head, fuel)?,
                _ => head.clone(),
            };
            let mut out = head;
            for a in args {
                out = Term::app(out, nf(a, fuel)?);
            }
            out
        }
        Term::Case(c) => Term::case(Case {
            ind: c.ind.clone(),
            scrutinee: nf(&c.scrutinee, fuel)?,
            params: c.params.iter().map(|p| nf(p, fuel)).collect::<Result<_>>()?,
            motive: nf(&c.motive, fuel)?,
            branches: c.branches.iter().map(|b| nf(b, fuel)).collect::<Result<_>>()?,
        }),
        Term::Fix(fx) => Term::fix(Fix {
            name: fx.name.clone(),
            annot: nf(&fx.annot, fuel)?,
            body: nf(&fx.body, fuel)?,
            rec_arg: fx.rec_arg,
        }),
        _ => w,
    })
}

/// Full βιδ normal form.
pub fn normalize(t: &Term, env: &GlobalEnv, fuel: &mut Fuel) -> Result<Term> {
    normalize_with(t, env, fuel, ALL)
}

/// β normal form; definitions stay folded and cases stay unreduced.
pub fn beta_normalize(t: &Term, fuel: &mut Fuel) -> Result<Term> {
    normalize_with(t, &GlobalEnv::default(), fuel, BETA)
}

/// βιδ-conversion.
pub fn conv(a: &Term, b: &Term, env: &GlobalEnv, fuel: &mut Fuel) -> Result<bool> {
    if alpha_eq(a, b) {
        return Ok(true);
    }
    let a = whnf(a, env, fuel)?;
    let b = whnf(b, env, fuel)?;
    conv_whnf(&a, &b, env, fuel)
}

/// Compares two binder bodies after bringing them under a common name.
pub(crate) fn conv_under(
    x: &Name,
    b1: &Term,
    y: &Name,
    b2: &Term,
    env: &GlobalEnv,
    fuel: &mut Fuel,
) -> Result<bool> {
    if x == y {
        return conv(b1, b2, env, fuel);
    }
    if !b2.has_free(x) {
        return conv(b1, &b2.subst(y, &Term::Var(x.clone())), env, fuel);
    }
    let (f1, f2) = (b1.free_vars(), b2.free_vars());
    let z = fresh_name(x.as_str(), |c| f1.contains(c) || f2.contains(c));
    let z = Term::Var(z);
    conv(&b1.subst(x, &z), &b2.subst(y, &z), env, fuel)
}

fn conv_whnf(a: &Term, b: &Term, env: &GlobalEnv, fuel: &mut Fuel) -> Result<bool> {
    if alpha_eq(a, b) {
        return Ok(true);
    }
    match (a, b) {
        (Term::Sort(s), Term::Sort(t)) => Ok(s == t),
        (Term::Prod(x, a1, b1), Term::Prod(y, a2, b2)) | (Term::Lam(x, a1, b1), Term::Lam(y, a2, b2)) => {
            Ok(conv(a1, a2, env, fuel)? && conv_under(x, b1, y, b2, env, fuel)?)
        }
        _ => {
            let (h1, args1) = a.spine();
            let (h2, args2) = b.spine();
            if args1.len() != args2.len() || !conv_head(h1, h2, env, fuel)? {
                return Ok(false);
            }
            for (x, y) in args1.iter().zip(&args2) {
                if !conv(x, y, env, fuel)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

fn conv_head(a: &Term, b: &Term, env: &GlobalEnv, fuel: &mut Fuel) -> Result<bool> {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => Ok(x == y),
        (Term::Ind(x), Term::Ind(y)) | (Term::Constr(x), Term::Constr(y)) | (Term::Const(x), Term::Const(y)) => {
            Ok(x == y)
        }
        (Term::Sort(s), Term::Sort(t)) => Ok(s == t),
        (Term::Case(c1), Term::Case(c2)) => {
            if c1.ind != c2.ind || c1.params.len() != c2.params.len() || c1.branches.len() != c2.branches.len() {
                return Ok(false);
            }
            if !conv(&c1.scrutinee, &c2.scrutinee, env, fuel)? || !conv(&c1.motive, &c2.motive, env, fuel)? {
                return Ok(false);
            }
            for (p, q) in c1.params.iter().zip(&c2.params).chain(c1.branches.iter().zip(&c2.branches)) {
                if !conv(p, q, env, fuel)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        (Term::Fix(f1), Term::Fix(f2)) => Ok(f1.rec_arg == f2.rec_arg
            && conv(&f1.annot, &f2.annot, env, fuel)?
            && conv_under(&f1.name, &f1.body, &f2.name, &f2.body, env, fuel)?),
        _ => conv_whnf_nonapp(a, b, env, fuel),
    }
}

fn conv_whnf_nonapp(a: &Term, b: &Term, env: &GlobalEnv, fuel: &mut Fuel) -> Result<bool> {
    match (a, b) {
        (Term::Prod(..), Term::Prod(..)) | (Term::Lam(..), Term::Lam(..)) => conv_whnf(a, b, env, fuel),
        _ => Ok(false),
    }
}
