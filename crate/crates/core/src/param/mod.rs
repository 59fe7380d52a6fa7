//! The parametricity translation `⟦·⟧` and per-instance checks of the
//! abstraction theorem.
//!
//! Every source variable `x` in scope is mapped to three output variables:
//! its copy `x`, its primed copy `x'` and the relation witness `x_R`. A
//! term's original and primed copies are the term with free variables
//! renamed along the first or second component.

mod case;
mod inductive;

use std::collections::{HashMap, HashSet};

use crate::env::GlobalEnv;
use crate::error::{Error, Result};
use crate::names::NameSupply;
use crate::reduce::{beta_normalize, Fuel};
use crate::term::{Case, Context, Fix, Name, Sort, Term};
use crate::typecheck::{register_definition, TypeChecker};

pub use inductive::translate_inductive;

/// The sort map used for relations: informative and propositional types
/// get relations into `Prop`, universes keep their level.
pub fn hat(s: Sort) -> Sort {
    match s {
        Sort::Prop | Sort::Set(_) => Sort::Prop,
        Sort::Type(i) => Sort::Type(i),
    }
}

/// The output of translating a term `A : B`.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslationResult {
    pub original: Term,
    pub primed: Term,
    /// `⟦A⟧`.
    pub relation_witness: Term,
    /// `⟦B⟧ A A'`.
    pub expected_type: Term,
    /// Whether the kernel accepted `⟦A⟧ : ⟦B⟧ A A'` in the translated
    /// context.
    pub verified: bool,
}

/// Output names standing for one source variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub orig: Name,
    pub prime: Name,
    pub rel: Name,
}

/// Translation state: the source context being translated under and the
/// output names assigned to it.
pub struct Translator<'e> {
    env: &'e mut GlobalEnv,
    src: Context,
    triples: Vec<Triple>,
    marks: Vec<usize>,
    supply: NameSupply,
}

impl<'e> Translator<'e> {
    pub fn new(env: &'e mut GlobalEnv) -> Self {
        Translator { env, src: Context::new(), triples: Vec::new(), marks: Vec::new(), supply: NameSupply::new() }
    }

    /// A translator scoped under `ctx`, whose entries get triples in order.
    pub fn with_context(env: &'e mut GlobalEnv, ctx: &Context) -> Self {
        let mut tr = Translator::new(env);
        for (x, ty) in ctx.entries() {
            tr.push(x, ty);
        }
        tr
    }

    pub fn env(&self) -> &GlobalEnv {
        self.env
    }

    pub fn source_context(&self) -> &Context {
        &self.src
    }

    /// `⟦Γ⟧`: each entry `x : A` becomes `x : A, x' : A', x_R : ⟦A⟧ x x'`
    /// (the last β-reduced).
    pub fn translated_context(&mut self) -> Result<Context> {
        let entries: Vec<(Name, Term)> = self.src.entries().to_vec();
        let triples = self.triples.clone();
        let mut out = Context::new();
        let mut inner = Translator::new(self.env);
        for ((x, ty), t) in entries.iter().zip(&triples) {
            let rel = inner.translate(ty)?;
            let rel = Term::apps(rel, [Term::Var(t.orig.clone()), Term::Var(t.prime.clone())]);
            out.push(t.orig.clone(), inner.orig(ty));
            out.push(t.prime.clone(), inner.prime(ty));
            out.push(t.rel.clone(), beta(&rel)?);
            inner.push_named(x, ty, t.clone());
        }
        Ok(out)
    }

    /// Enters source binder `x : ty`. Returns the name the binder got in the
    /// source context (renamed if it would shadow) and its triple.
    fn push(&mut self, x: &Name, ty: &Term) -> (Name, Triple) {
        let mark = self.supply.mark();
        let x = if x.is_anon() || self.src.contains(x.as_str()) {
            self.src.fresh(if x.is_anon() { "x" } else { x.as_str() }, &HashSet::new())
        } else {
            x.clone()
        };
        let (orig, prime, rel) = self.supply.triple(&x);
        let t = Triple { orig, prime, rel };
        self.src.push(x.clone(), ty.clone());
        self.triples.push(t.clone());
        self.marks.push(mark);
        (x, t)
    }

    fn push_named(&mut self, x: &Name, ty: &Term, t: Triple) {
        self.marks.push(self.supply.mark());
        self.supply.reserve(t.orig.clone());
        self.supply.reserve(t.prime.clone());
        self.supply.reserve(t.rel.clone());
        self.src.push(x.clone(), ty.clone());
        self.triples.push(t);
    }

    /// Enters a binder and returns `body` renamed to the source name used.
    fn enter(&mut self, x: &Name, ty: &Term, body: &Term) -> (Term, Triple) {
        // Avoid capturing free variables of the body when renaming.
        let (y, t) = if !x.is_anon() && self.src.contains(x.as_str()) {
            let mut avoid = body.free_vars();
            avoid.insert(x.clone());
            let y = self.src.fresh(x.as_str(), &avoid);
            self.push(&y, ty)
        } else {
            self.push(x, ty)
        };
        let body = if x.is_anon() || &y == x { body.clone() } else { body.subst(x, &Term::Var(y)) };
        (body, t)
    }

    fn pop(&mut self) {
        self.src.pop();
        self.triples.pop();
        if let Some(m) = self.marks.pop() {
            self.supply.release(m);
        }
    }

    fn triple(&self, x: &Name) -> Option<&Triple> {
        let i = self.src.entries().iter().rposition(|(y, _)| y == x)?;
        Some(&self.triples[i])
    }

    fn renaming(&self, t: &Term, pick: impl Fn(&Triple) -> &Name) -> HashMap<Name, Name> {
        t.free_vars()
            .into_iter()
            .filter_map(|x| self.triple(&x).map(|tr| (x.clone(), pick(tr).clone())))
            .collect()
    }

    /// The copy of a source term in the output scope.
    pub fn orig(&self, t: &Term) -> Term {
        t.rename(&self.renaming(t, |tr| &tr.orig))
    }

    /// The primed copy `A'` of a source term.
    pub fn prime(&self, t: &Term) -> Term {
        t.rename(&self.renaming(t, |tr| &tr.prime))
    }

    /// `⟦t⟧`.
    pub fn translate(&mut self, t: &Term) -> Result<Term> {
        match t {
            Term::Sort(s) => {
                let (x, x1) = (Name::new("x"), Name::new("x'"));
                let body = Term::arrow(
                    Term::Var(x.clone()),
                    Term::arrow(Term::Var(x1.clone()), Term::Sort(hat(*s))),
                );
                Ok(Term::lam(x, Term::Sort(*s), Term::lam(x1, Term::Sort(*s), body)))
            }
            Term::Var(x) => {
                self.triple(x).map(|tr| Term::Var(tr.rel.clone())).ok_or_else(|| Error::UnboundVariable(x.clone()))
            }
            Term::Prod(x, a, b) => {
                let mark = self.supply.mark();
                let f = self.supply.fresh("f");
                let f1 = self.supply.primed(&f);
                let (f_ty, f1_ty) = (self.orig(t), self.prime(t));
                let dom = self.binder_domains(a)?;
                let (body, tr) = self.enter(x, a, b);
                let cod = self.translate(&body);
                self.pop();
                self.supply.release(mark);
                let cod = Term::apps(
                    cod?,
                    [
                        Term::app(Term::Var(f.clone()), Term::Var(tr.orig.clone())),
                        Term::app(Term::Var(f1.clone()), Term::Var(tr.prime.clone())),
                    ],
                );
                let out = wrap_triple(Term::prod, &tr, dom, cod);
                Ok(Term::lam(f, f_ty, Term::lam(f1, f1_ty, out)))
            }
            Term::Lam(x, a, b) => {
                let dom = self.binder_domains(a)?;
                let (body, tr) = self.enter(x, a, b);
                let body = self.translate(&body);
                self.pop();
                Ok(wrap_triple(Term::lam, &tr, dom, body?))
            }
            Term::App(a, b) => {
                let a = self.translate(a)?;
                let rel = self.translate(b)?;
                Ok(Term::apps(a, [self.orig(b), self.prime(b), rel]))
            }
            Term::Ind(i) => Ok(Term::Ind(inductive::translate_inductive(self.env, i)?)),
            Term::Constr(c) => {
                let (decl, _) = self.env.constructor(c).ok_or_else(|| Error::UnknownGlobal(c.clone()))?;
                let ind = decl.name.clone();
                inductive::translate_inductive(self.env, &ind)?;
                let name = self.env.translation(c).cloned().ok_or_else(|| Error::UnknownGlobal(c.clone()))?;
                Ok(Term::Constr(name))
            }
            Term::Const(c) => {
                if self.env.definition(c).is_some() {
                    return Ok(Term::Const(ensure_definition(self.env, c)?));
                }
                if self.env.axiom(c).is_some() {
                    let w = self.env.witness(c).cloned().ok_or_else(|| Error::MissingWitness(c.clone()))?;
                    return Ok(Term::app(w, t.clone()));
                }
                Err(Error::UnknownGlobal(c.clone()))
            }
            Term::Case(c) => case::translate_case(self, c, None),
            Term::Fix(fx) => self.translate_fix(t, fx),
        }
    }

    /// `(A₀, A₁, ⟦A⟧)` for a binder domain, all in the current scope.
    fn binder_domains(&mut self, a: &Term) -> Result<(Term, Term, Term)> {
        Ok((self.orig(a), self.prime(a), self.translate(a)?))
    }

    /// `(fix f_R : ⟦A⟧ f f'. ⟦B⟧)[fix f : A. B / f][fix f' : A'. B' / f']`,
    /// decreasing on the relation argument of the source's decreasing
    /// argument.
    fn translate_fix(&mut self, t: &Term, fx: &Fix) -> Result<Term> {
        let (orig, prime) = (self.orig(t), self.prime(t));
        let rel_ty = self.translate(&fx.annot)?;
        let (body, tr) = self.enter(&fx.name, &fx.annot, &fx.body);
        let f = self.src.entries().last().map(|(f, _)| f.clone()).expect("just entered");
        let body = self.translate_fix_body(&f, fx.rec_arg, &body);
        self.pop();
        let annot = Term::apps(rel_ty, [Term::Var(tr.orig.clone()), Term::Var(tr.prime.clone())]);
        let body = body?;
        // Small eliminations recurse on the relation argument; large ones
        // destruct the original arguments and recurse on those.
        let candidates = [3 * fx.rec_arg + 2, 3 * fx.rec_arg];
        let rec_arg = candidates
            .iter()
            .copied()
            .find(|&r| {
                let fix = Fix { name: tr.rel.clone(), annot: annot.clone(), body: body.clone(), rec_arg: r };
                crate::typecheck::check_guard(self.env, &fix).is_ok()
            })
            .unwrap_or(candidates[0]);
        let fix = Term::fix(Fix { name: tr.rel.clone(), annot, body, rec_arg });
        let mut copies = HashMap::new();
        copies.insert(tr.orig, orig);
        copies.insert(tr.prime, prime);
        Ok(fix.subst_many(&copies))
    }

    /// `⟦λx̄. B⟧` for the body of fixpoint `f`. When `B` is a case on the
    /// decreasing argument, its motive is stated in terms of `f x̄`.
    fn translate_fix_body(&mut self, f: &Name, rec_arg: usize, body: &Term) -> Result<Term> {
        let mut entered = Vec::new();
        let mut names = Vec::new();
        let mut cur = body.clone();
        let result = (|| {
            while let Term::Lam(x, a, b) = &cur {
                let doms = self.binder_domains(a)?;
                let (b, t) = self.enter(x, a, b);
                names.push(self.src.entries().last().map(|(y, _)| y.clone()).expect("just entered"));
                entered.push((t, doms));
                cur = b;
            }
            match &cur {
                Term::Case(c) => {
                    let rec = self.recursor(f, rec_arg, &names, c);
                    case::translate_case(self, c, rec.as_ref())
                }
                _ => self.translate(&cur),
            }
        })();
        for _ in 0..entered.len() {
            self.pop();
        }
        let mut out = result?;
        for (t, doms) in entered.into_iter().rev() {
            out = wrap_triple(Term::lam, &t, doms, out);
        }
        Ok(out)
    }

    fn recursor(&self, f: &Name, rec_arg: usize, names: &[Name], c: &Case) -> Option<case::Recursor> {
        let hole = names.get(rec_arg)?;
        if c.scrutinee != Term::Var(hole.clone()) || self.env.inductive(&c.ind)?.index_count > 0 {
            return None;
        }
        let mentioned = c.params.iter().chain([&c.motive]).chain(&c.branches).any(|t| t.has_free(hole));
        let later = self.src.entries().iter().rev().take(names.len() - rec_arg - 1).any(|(_, ty)| ty.has_free(hole));
        if mentioned || later {
            return None;
        }
        let head = Term::apps(Term::Var(f.clone()), names.iter().map(|x| Term::Var(x.clone())));
        Some(case::Recursor { hole: hole.clone(), head })
    }

    /// `⟦A⟧`, `A'` and `⟦B⟧ A A'` for `A : B` in the current scope, with
    /// the kernel's verdict on the translated judgment.
    pub fn abstraction(&mut self, a: &Term) -> Result<TranslationResult> {
        let ty = TypeChecker::new(self.env).infer(&self.src, a)?;
        let relation_witness = self.translate(a)?;
        let rel_ty = self.translate(&ty)?;
        let (original, primed) = (self.orig(a), self.prime(a));
        let expected_type = Term::apps(rel_ty, [original.clone(), primed.clone()]);
        let ctx = self.translated_context()?;
        let verified = TypeChecker::new(self.env).check(&ctx, &relation_witness, &expected_type)?;
        Ok(TranslationResult { original, primed, relation_witness, expected_type, verified })
    }
}

fn wrap_triple(
    mk: fn(Name, Term, Term) -> Term,
    tr: &Triple,
    (a0, a1, rel): (Term, Term, Term),
    body: Term,
) -> Term {
    let rel_ty = Term::apps(rel, [Term::Var(tr.orig.clone()), Term::Var(tr.prime.clone())]);
    mk(tr.orig.clone(), a0, mk(tr.prime.clone(), a1, mk(tr.rel.clone(), rel_ty, body)))
}

pub(crate) fn beta(t: &Term) -> Result<Term> {
    beta_normalize(t, &mut Fuel::new(crate::env::DEFAULT_FUEL))
}

/// `⟦t⟧` for a closed term.
pub fn translate_term(env: &mut GlobalEnv, t: &Term) -> Result<Term> {
    Translator::new(env).translate(t)
}

/// `⟦t⟧` for a term in context `ctx`; free variables map to their `_R`
/// names as assigned to the entries of `ctx` in order.
pub fn translate_in(env: &mut GlobalEnv, ctx: &Context, t: &Term) -> Result<Term> {
    Translator::with_context(env, ctx).translate(t)
}

/// `⟦Γ⟧`.
pub fn translate_context(env: &mut GlobalEnv, ctx: &Context) -> Result<Context> {
    Translator::with_context(env, ctx).translated_context()
}

/// `A'`: every free variable `x` of `t` renamed to a fresh `x'`.
pub fn prime(t: &Term, supply: &mut NameSupply) -> Term {
    let mut fv: Vec<Name> = t.free_vars().into_iter().collect();
    fv.sort();
    for x in &fv {
        supply.reserve(x.clone());
    }
    let map: HashMap<Name, Name> = fv.iter().map(|x| (x.clone(), supply.primed(x))).collect();
    t.rename(&map)
}

/// Runs the abstraction check for `a` in context `ctx`.
pub fn check_abstraction(env: &mut GlobalEnv, ctx: &Context, a: &Term) -> Result<TranslationResult> {
    Translator::with_context(env, ctx).abstraction(a)
}

/// The registered translation `c_R` of a definition, created on first use.
/// Registration runs the kernel on `c_R : ⟦B⟧ c c`.
pub fn ensure_definition(env: &mut GlobalEnv, c: &Name) -> Result<Name> {
    if let Some(n) = env.translation(c) {
        return Ok(n.clone());
    }
    let def = env.definition(c).cloned().ok_or_else(|| Error::UnknownGlobal(c.clone()))?;
    let mut tr = Translator::new(env);
    let body = tr.translate(&def.body)?;
    let rel_ty = tr.translate(&def.ty)?;
    let ty = beta(&Term::apps(rel_ty, [Term::Const(c.clone()), Term::Const(c.clone())]))?;
    let name = env.fresh_global(&format!("{c}_R"));
    register_definition(env, name.clone(), Some(ty), beta(&body)?)?;
    env.record_translation(c.clone(), name.clone());
    Ok(name)
}

/// Translates and registers the named global: `name_R` for definitions,
/// `I_R` (and its constructors) for inductives. The result describes the
/// global itself.
pub fn parametricity(env: &mut GlobalEnv, name: &Name) -> Result<TranslationResult> {
    let (original, relation_witness, rel_ty, body) = if env.inductive(name).is_some() {
        let r = inductive::translate_inductive(env, name)?;
        let arity = env.inductive(name).map(|d| d.arity.clone()).unwrap_or(Term::prop());
        (Term::Ind(name.clone()), Term::Ind(r), translate_term(env, &arity)?, None)
    } else if let Some(def) = env.definition(name).cloned() {
        let r = ensure_definition(env, name)?;
        let body = env.definition(&r).map(|d| d.body.clone());
        (Term::Const(name.clone()), Term::Const(r), translate_term(env, &def.ty)?, body)
    } else {
        return Err(Error::UnknownGlobal(name.clone()));
    };
    let expected_type = beta(&Term::apps(rel_ty, [original.clone(), original.clone()]))?;
    let verified = TypeChecker::new(env).check(&Context::new(), &relation_witness, &expected_type)?;
    let relation_witness = match body {
        Some(b) => b,
        None => relation_witness,
    };
    Ok(TranslationResult { primed: original.clone(), original, relation_witness, expected_type, verified })
}

/// Registers `witness : ∀h : P. ⟦P⟧ h h` for axiom `P`.
pub fn register_witness(env: &mut GlobalEnv, axiom: &Name, witness: Term) -> Result<()> {
    let p = env.axiom(axiom).cloned().ok_or_else(|| Error::UnknownGlobal(axiom.clone()))?;
    let rel = translate_term(env, &p)?;
    let h = crate::term::fresh_name("h", |c| witness.free_vars().contains(c));
    let expected = Term::prod(
        h.clone(),
        p.clone(),
        beta(&Term::apps(rel, [Term::Var(h.clone()), Term::Var(h)]))?,
    );
    let tc = TypeChecker::new(env);
    let mismatch = |reason: String| Error::WitnessTypeMismatch { axiom: axiom.clone(), reason };
    let ty = tc.infer(&Context::new(), &witness).map_err(|e| mismatch(e.to_string()))?;
    if !tc.subtype(&ty, &expected)? {
        return Err(mismatch(format!("expected {expected}, found {ty}")));
    }
    env.insert_witness(axiom.clone(), witness, expected);
    Ok(())
}
