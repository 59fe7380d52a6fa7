//! Translation of `case`: the ordinary scheme over `I_R` with motive `Θ`,
//! and large eliminations rewritten as two nested cases on the original
//! scrutinees.

use std::collections::HashSet;

use super::{beta, inductive::translate_inductive, Translator, Triple};
use crate::env::{instantiate_telescope, GlobalEnv, InductiveDecl};
use crate::error::{Error, Result};
use crate::term::{fresh_name, Case, Name, Sort, Term};
use crate::typecheck::{register_definition, TypeChecker};

/// A case that is the whole body of a fixpoint and scrutinizes its
/// decreasing argument `hole`. `head` is the fixpoint applied to its
/// arguments, which ι-reduces to the case once `hole` is a constructor.
///
/// The relational motive mentions `head` instead of the case itself, so
/// that the translated body has the type the fixpoint annotation asks for.
pub(super) struct Recursor {
    pub hole: Name,
    pub head: Term,
}

pub(super) fn translate_case(tr: &mut Translator<'_>, c: &Case, rec: Option<&Recursor>) -> Result<Term> {
    let decl = (**tr.env.inductive(&c.ind).ok_or_else(|| Error::UnknownGlobal(c.ind.clone()))?).clone();
    if let (Sort::Set(_), Sort::Type(level)) = (decl.sort, motive_sort(tr, c, &decl)?) {
        return translate_large_elim(tr, c, &decl, level, rec);
    }
    let ind = translate_inductive(tr.env, &c.ind)?;
    let scrutinee = tr.translate(&c.scrutinee)?;
    let params = param_triples(tr, &c.params)?;
    let motive = theta(tr, c, &decl, rec)?;
    let branches = c.branches.iter().map(|b| tr.translate(b)).collect::<Result<_>>()?;
    Ok(Term::case(Case { ind, scrutinee, params, motive, branches }))
}

/// `Q₀, Q₁, ⟦Q⟧` for each parameter, interleaved.
fn param_triples(tr: &mut Translator<'_>, params: &[Term]) -> Result<Vec<Term>> {
    let mut out = Vec::with_capacity(3 * params.len());
    for q in params {
        out.push(tr.orig(q));
        out.push(tr.prime(q));
        out.push(tr.translate(q)?);
    }
    Ok(out)
}

fn names_of_case(c: &Case) -> HashSet<Name> {
    let mut avoid = c.scrutinee.free_vars();
    avoid.extend(c.motive.free_vars());
    for t in c.params.iter().chain(&c.branches) {
        avoid.extend(t.free_vars());
    }
    avoid
}

/// The sort the motive eliminates into.
fn motive_sort(tr: &Translator<'_>, c: &Case, decl: &InductiveDecl) -> Result<Sort> {
    let tc = TypeChecker::new(tr.env);
    let ty = tc.infer(&tr.src, &c.motive)?;
    let mut avoid: HashSet<Name> = tr.src.names().cloned().collect();
    let tel = tc.telescope(&ty, Some(decl.index_count + 1), &mut avoid)?;
    match tc.whnf(&tel.body)? {
        Term::Sort(s) => Ok(s),
        other => Err(Error::MotiveMismatch { ind: c.ind.clone(), reason: format!("motive returns {other}") }),
    }
}

/// The source index telescope `(y : B[Q/x])^n`, with names fresh for the
/// current scope and the case.
fn index_telescope(tr: &Translator<'_>, c: &Case, decl: &InductiveDecl) -> Result<Vec<(Name, Term)>> {
    let tc = TypeChecker::new(tr.env);
    let mut arity = decl.arity.clone();
    for q in &c.params {
        let Term::Prod(x, _, rest) = tc.whnf(&arity)? else {
            return Err(Error::MalformedCase { ind: c.ind.clone(), reason: "arity too short".into() });
        };
        arity = rest.subst(&x, q);
    }
    let mut avoid: HashSet<Name> = tr.src.names().cloned().collect();
    avoid.extend(names_of_case(c));
    Ok(tc.telescope(&arity, Some(decl.index_count), &mut avoid)?.binders)
}

/// `Θ = λ(y y' y_R)^n (a a' a_R). ⟦T y a⟧ case_I(a, Q, T, F) case_I(a', Q', T', F')`.
fn theta(tr: &mut Translator<'_>, c: &Case, decl: &InductiveDecl, rec: Option<&Recursor>) -> Result<Term> {
    let indices = index_telescope(tr, c, decl)?;
    let mut taken: HashSet<Name> = tr.src.names().cloned().collect();
    taken.extend(names_of_case(c));
    taken.extend(indices.iter().map(|(y, _)| y.clone()));
    let a = fresh_name(scrutinee_hint(&c.motive, decl.index_count), |s| taken.contains(s));

    let mut binders: Vec<(Triple, (Term, Term, Term))> = Vec::new();
    let scrut_ty = Term::apps(
        Term::Ind(c.ind.clone()),
        c.params.iter().cloned().chain(indices.iter().map(|(y, _)| Term::Var(y.clone()))),
    );
    let result = (|| {
        for (y, b) in indices.iter().chain([&(a.clone(), scrut_ty)]) {
            let doms = tr.binder_domains(b)?;
            let (_, t) = tr.push(y, b);
            binders.push((t, doms));
        }
        let case_a = match rec {
            Some(r) => r.head.subst(&r.hole, &Term::Var(a.clone())),
            None => Term::case(Case {
                ind: c.ind.clone(),
                scrutinee: Term::Var(a.clone()),
                params: c.params.clone(),
                motive: c.motive.clone(),
                branches: c.branches.clone(),
            }),
        };
        let applied = Term::apps(
            c.motive.clone(),
            indices.iter().map(|(y, _)| Term::Var(y.clone())).chain([Term::Var(a.clone())]),
        );
        let rel = tr.translate(&applied)?;
        Ok(Term::apps(rel, [tr.orig(&case_a), tr.prime(&case_a)]))
    })();
    for _ in 0..binders.len() {
        tr.pop();
    }
    let mut out = result?;
    for (t, doms) in binders.into_iter().rev() {
        out = super::wrap_triple(Term::lam, &t, doms, out);
    }
    Ok(out)
}

/// A readable name for the scrutinee binder: the motive's own, if any.
fn scrutinee_hint(motive: &Term, n: usize) -> &str {
    let mut cur = motive;
    for i in 0..=n {
        match cur {
            Term::Lam(x, _, b) if i == n && !x.is_anon() => return x.as_str(),
            Term::Lam(_, _, b) => cur = b,
            _ => break,
        }
    }
    "a"
}

/// Constructor argument types `E_j` instantiated with `params`, named by
/// `base` names fresh w.r.t. `avoid`. `None` if an argument type depends
/// on an earlier argument or the type is not syntactically a telescope.
fn constructor_args(decl: &InductiveDecl, j: usize, params: &[Term], avoid: &HashSet<Name>) -> Option<Vec<(Name, Term)>> {
    let k = &decl.constructors[j];
    let mut names = Vec::new();
    let mut cur = &k.ty;
    for _ in 0..decl.param_count {
        let Term::Prod(_, _, b) = cur else { return None };
        cur = b;
    }
    for _ in 0..k.arg_count {
        let Term::Prod(x, _, b) = cur else { return None };
        let base = if x.is_anon() { "z" } else { x.as_str() };
        names.push(fresh_name(base, |s| avoid.contains(s) || names.iter().any(|n: &Name| n.as_str() == s)));
        cur = b;
    }
    let (doms, _) = instantiate_telescope(&k.ty, params, &names)?;
    let independent = doms.iter().all(|d| names.iter().all(|z| !d.has_free(z)));
    independent.then(|| names.into_iter().zip(doms).collect())
}

fn not_supported(ind: &Name, what: &str) -> Error {
    Error::NotSupported(format!("large elimination of `{ind}`: {what}"))
}

/// `⟦case_I(M, Q, T, F)⟧` for a `Set` inductive eliminated into `Type_i`:
/// destruct `M` and `M'` in turn, giving `k²` branches. Diagonal branches
/// apply `⟦F_j⟧` to relations recovered from `M_R` by the inversion helpers;
/// off-diagonal branches are absurd.
pub(super) fn translate_large_elim(
    tr: &mut Translator<'_>,
    c: &Case,
    decl: &InductiveDecl,
    level: u32,
    rec: Option<&Recursor>,
) -> Result<Term> {
    let ind = &c.ind;
    if !decl.is_small {
        return Err(Error::NotSmallInductive(ind.clone()));
    }
    if decl.index_count > 0 {
        return Err(not_supported(ind, "indexed inductives are not handled"));
    }
    let mut avoid: HashSet<Name> = tr.src.names().cloned().collect();
    avoid.extend(names_of_case(c));
    let args: Vec<Vec<(Name, Term)>> = (0..decl.constructors.len())
        .map(|j| constructor_args(decl, j, &c.params, &avoid))
        .collect::<Option<_>>()
        .ok_or_else(|| not_supported(ind, "constructor arguments must not depend on each other"))?;

    // ⟦T⟧ must ignore the relation between the two scrutinees.
    let rel_t = tr.translate(&c.motive)?;
    match beta(&rel_t)? {
        Term::Lam(_, _, b) => match &*b {
            Term::Lam(_, _, b) => match &**b {
                Term::Lam(r, _, body) if !body.has_free(r) => {}
                _ => return Err(not_supported(ind, "the motive's relation depends on the scrutinees' relation")),
            },
            _ => return Err(not_supported(ind, "the motive is not an abstraction")),
        },
        _ => return Err(not_supported(ind, "the motive is not an abstraction")),
    }

    let ind_r = translate_inductive(tr.env, ind)?;
    let absurd = ensure_absurd(tr.env, level)?;
    let q0: Vec<Term> = c.params.iter().map(|q| tr.orig(q)).collect();
    let q1: Vec<Term> = c.params.iter().map(|q| tr.prime(q)).collect();
    let qs = param_triples(tr, &c.params)?;
    let (t0, t1) = (tr.orig(&c.motive), tr.prime(&c.motive));
    let f0: Vec<Term> = c.branches.iter().map(|f| tr.orig(f)).collect();
    let f1: Vec<Term> = c.branches.iter().map(|f| tr.prime(f)).collect();
    let f_rel: Vec<Term> = c.branches.iter().map(|f| tr.translate(f)).collect::<Result<_>>()?;
    let (m0, m1, m_rel) = (tr.orig(&c.scrutinee), tr.prime(&c.scrutinee), tr.translate(&c.scrutinee)?);

    let ind_q0 = Term::apps(Term::Ind(ind.clone()), q0.clone());
    let ind_q1 = Term::apps(Term::Ind(ind.clone()), q1.clone());
    let rel_of = |a0: Term, a1: Term| Term::apps(Term::Ind(ind_r.clone()), qs.iter().cloned().chain([a0, a1]));
    let case_with = |scrutinee: Term, params: &[Term], motive: &Term, branches: &[Term]| {
        Term::case(Case {
            ind: ind.clone(),
            scrutinee,
            params: params.to_vec(),
            motive: motive.clone(),
            branches: branches.to_vec(),
        })
    };
    let heads = rec.and_then(|r| {
        let t = tr.triple(&r.hole)?;
        Some((tr.orig(&r.head), t.orig.clone(), tr.prime(&r.head), t.prime.clone()))
    });
    let case0 = |x: Term| match &heads {
        Some((h0, hole0, _, _)) => h0.subst(hole0, &x),
        None => case_with(x, &q0, &t0, &f0),
    };
    let case1 = |x: Term| match &heads {
        Some((_, _, h1, hole1)) => h1.subst(hole1, &x),
        None => case_with(x, &q1, &t1, &f1),
    };
    let goal = |x0: Term, x1: Term, r: Term| {
        Term::apps(rel_t.clone(), [x0.clone(), x1.clone(), r, case0(x0), case1(x1)])
    };
    let ctor = |j: usize, params: &[Term], zs: &[Name]| {
        Term::apps(
            Term::Constr(decl.constructors[j].name.clone()),
            params.iter().cloned().chain(zs.iter().map(|z| Term::Var(z.clone()))),
        )
    };
    let src_args: Vec<Vec<(Term, Term)>> =
        args.iter().map(|zs| zs.iter().map(|(_, e)| (tr.orig(e), tr.prime(e))).collect()).collect();

    let mark = tr.supply.mark();
    let (a0, a1, a_r) = tr.supply.triple(&Name::new("a"));
    let b = Name::new("b");
    let (b1, b_r) = (tr.supply.primed(&b), tr.supply.relation(&b));
    let motive_out = Term::lam(
        a0.clone(),
        ind_q0.clone(),
        Term::prod(
            a1.clone(),
            ind_q1.clone(),
            Term::prod(
                a_r.clone(),
                rel_of(Term::Var(a0.clone()), Term::Var(a1.clone())),
                goal(Term::Var(a0.clone()), Term::Var(a1.clone()), Term::Var(a_r.clone())),
            ),
        ),
    );

    let k = decl.constructors.len();
    let mut outer = Vec::with_capacity(k);
    for j in 0..k {
        let jm = tr.supply.mark();
        let z0: Vec<Name> = args[j].iter().map(|(z, _)| tr.supply.fresh(z.as_str())).collect();
        let cj0 = ctor(j, &q0, &z0);
        let motive_in = Term::lam(
            b1.clone(),
            ind_q1.clone(),
            Term::prod(
                b_r.clone(),
                rel_of(cj0.clone(), Term::Var(b1.clone())),
                goal(cj0.clone(), Term::Var(b1.clone()), Term::Var(b_r.clone())),
            ),
        );
        let mut inner = Vec::with_capacity(k);
        for l in 0..k {
            let lm = tr.supply.mark();
            let w1: Vec<Name> = args[l].iter().map(|(z, _)| tr.supply.primed(z)).collect();
            let cl1 = ctor(l, &q1, &w1);
            let helper_args = || {
                qs.iter()
                    .cloned()
                    .chain(z0.iter().chain(&w1).map(|z| Term::Var(z.clone())))
                    .chain([Term::Var(b_r.clone())])
                    .collect::<Vec<_>>()
            };
            let body = if j == l {
                let mut applied = f_rel[j].clone();
                for m in 0..z0.len() {
                    let inv = ensure_inversion(tr.env, decl, &ind_r, j, m)?;
                    applied = Term::apps(
                        applied,
                        [Term::Var(z0[m].clone()), Term::Var(w1[m].clone()), Term::apps(Term::Const(inv), helper_args())],
                    );
                }
                applied
            } else {
                let abs = ensure_discrimination(tr.env, decl, &ind_r, j, l)?;
                let g = goal(cj0.clone(), cl1.clone(), Term::Var(b_r.clone()));
                Term::apps(Term::Const(absurd.clone()), [g, Term::apps(Term::Const(abs), helper_args())])
            };
            let mut branch = Term::lam(b_r.clone(), rel_of(cj0.clone(), cl1), body);
            for (w, (_, e1)) in w1.iter().zip(&src_args[l]).rev() {
                branch = Term::lam(w.clone(), e1.clone(), branch);
            }
            inner.push(branch);
            tr.supply.release(lm);
        }
        let inner_case = Term::case(Case {
            ind: ind.clone(),
            scrutinee: Term::Var(a1.clone()),
            params: q1.clone(),
            motive: motive_in,
            branches: inner,
        });
        let mut branch = Term::lam(
            a1.clone(),
            ind_q1.clone(),
            Term::lam(a_r.clone(), rel_of(cj0.clone(), Term::Var(a1.clone())), Term::app(inner_case, Term::Var(a_r.clone()))),
        );
        for (z, (e0, _)) in z0.iter().zip(&src_args[j]).rev() {
            branch = Term::lam(z.clone(), e0.clone(), branch);
        }
        outer.push(branch);
        tr.supply.release(jm);
    }
    tr.supply.release(mark);
    let outer_case = Term::case(Case { ind: ind.clone(), scrutinee: m0, params: q0, motive: motive_out, branches: outer });
    Ok(Term::apps(outer_case, [m1, m_rel]))
}

fn find_inductive<'a>(env: &'a GlobalEnv, name: &str, ctors: usize) -> Result<&'a InductiveDecl> {
    env.inductive(name)
        .map(|d| &**d)
        .filter(|d| {
            d.sort == Sort::Prop
                && d.param_count == 0
                && d.index_count == 0
                && d.constructors.len() == ctors
                && d.constructors.iter().all(|k| k.arg_count == 0)
        })
        .ok_or_else(|| {
            Error::NotSupported(format!(
                "translating a large elimination needs `{name}` declared as a Prop inductive with {ctors} constant constructor(s)"
            ))
        })
}

/// `absurd_i := fun (A : Type@i) (h : False) => match h .. end : forall A : Type@i, False -> A`.
fn ensure_absurd(env: &mut GlobalEnv, level: u32) -> Result<Name> {
    let key = format!("absurd/{level}");
    if let Some(n) = env.helpers.get(&key) {
        return Ok(n.clone());
    }
    let fls = find_inductive(env, "False", 0)?.name.clone();
    let (alpha, h) = (Name::new("A"), Name::new("h"));
    let ty = Term::prod(
        alpha.clone(),
        Term::Sort(Sort::Type(level)),
        Term::arrow(Term::Ind(fls.clone()), Term::Var(alpha.clone())),
    );
    let body = Term::lam(
        alpha.clone(),
        Term::Sort(Sort::Type(level)),
        Term::lam(
            h.clone(),
            Term::Ind(fls.clone()),
            Term::case(Case {
                ind: fls.clone(),
                scrutinee: Term::Var(h),
                params: vec![],
                motive: Term::lam(Name::anon(), Term::Ind(fls), Term::Var(alpha)),
                branches: vec![],
            }),
        ),
    );
    let name = env.fresh_global(&format!("absurd_{level}"));
    register_definition(env, name.clone(), Some(ty), body)?;
    env.helpers.insert(key, name.clone());
    Ok(name)
}

/// The shared scaffolding of the inversion and discrimination helpers: the
/// parameters of `I` in scope as triples, and constructor argument types
/// over them.
struct HelperScope<'e> {
    tr: Translator<'e>,
    triples: Vec<Term>,
    x0: Vec<Term>,
    x1: Vec<Term>,
    /// Per constructor: argument names and source types over the parameters.
    args: Vec<Vec<(Name, Term)>>,
    binders: Vec<(Name, Term)>,
}

impl<'e> HelperScope<'e> {
    fn new(env: &'e mut GlobalEnv, decl: &InductiveDecl) -> Result<Self> {
        let tc = TypeChecker::new(env);
        let params = tc.telescope(&decl.arity, Some(decl.param_count), &mut HashSet::new())?.binders;
        let mut tr = Translator::new(env);
        let mut binders = Vec::new();
        let (mut triples, mut x0, mut x1) = (Vec::new(), Vec::new(), Vec::new());
        for (x, p) in &params {
            let (d0, d1, dr) = tr.binder_domains(p)?;
            let (_, t) = tr.push(x, p);
            let dr = beta(&Term::apps(dr, [Term::Var(t.orig.clone()), Term::Var(t.prime.clone())]))?;
            binders.push((t.orig.clone(), d0));
            binders.push((t.prime.clone(), d1));
            binders.push((t.rel.clone(), dr));
            x0.push(Term::Var(t.orig.clone()));
            x1.push(Term::Var(t.prime.clone()));
            triples.extend([Term::Var(t.orig), Term::Var(t.prime), Term::Var(t.rel)]);
        }
        let param_vars: Vec<Term> = params.iter().map(|(x, _)| Term::Var(x.clone())).collect();
        let avoid: HashSet<Name> = params.iter().map(|(x, _)| x.clone()).collect();
        let args = (0..decl.constructors.len())
            .map(|j| constructor_args(decl, j, &param_vars, &avoid))
            .collect::<Option<_>>()
            .ok_or_else(|| not_supported(&decl.name, "constructor arguments must not depend on each other"))?;
        Ok(HelperScope { tr, triples, x0, x1, args, binders })
    }

    /// Fresh output names for constructor `j`'s arguments, original or
    /// primed.
    fn arg_names(&mut self, j: usize, primed: bool) -> Vec<Name> {
        let args = self.args[j].clone();
        args.iter()
            .map(|(z, _)| if primed { self.tr.supply.primed(z) } else { self.tr.supply.fresh(z.as_str()) })
            .collect()
    }

    fn arg_types(&self, j: usize, primed: bool) -> Vec<Term> {
        self.args[j].iter().map(|(_, e)| if primed { self.tr.prime(e) } else { self.tr.orig(e) }).collect()
    }

    fn ctor(&self, decl: &InductiveDecl, j: usize, primed: bool, zs: &[Name]) -> Term {
        let params = if primed { &self.x1 } else { &self.x0 };
        Term::apps(
            Term::Constr(decl.constructors[j].name.clone()),
            params.iter().cloned().chain(zs.iter().map(|z| Term::Var(z.clone()))),
        )
    }

    /// `case_I(a, x, λ_. Prop, ..)` returning `pick(l, us)` in branch `l`.
    fn prop_case(
        &mut self,
        decl: &InductiveDecl,
        scrutinee: Term,
        primed: bool,
        pick: &mut dyn FnMut(&mut Self, usize, &[Name]) -> Result<Term>,
    ) -> Result<Term> {
        let params = if primed { self.x1.clone() } else { self.x0.clone() };
        let mut branches = Vec::new();
        for l in 0..decl.constructors.len() {
            let mark = self.tr.supply.mark();
            let us = self.arg_names(l, primed);
            let tys = self.arg_types(l, primed);
            let mut b = pick(self, l, &us)?;
            for (u, t) in us.iter().zip(tys).rev() {
                b = Term::lam(u.clone(), t, b);
            }
            branches.push(b);
            self.tr.supply.release(mark);
        }
        let motive = Term::lam(Name::anon(), Term::apps(Term::Ind(decl.name.clone()), params.clone()), Term::prop());
        Ok(Term::case(Case { ind: decl.name.clone(), scrutinee, params, motive, branches }))
    }

    /// `case_{I_R}(h, xs, λ a a' h. P a a', ..)` whose branch for `c_l_R`
    /// is `leaf(l, u_R)`.
    fn relation_case(
        &mut self,
        decl: &InductiveDecl,
        ind_r: &Name,
        h: &Name,
        predicate: &dyn Fn(Term, Term) -> Term,
        leaf: &dyn Fn(usize, &[Name]) -> Term,
    ) -> Result<Term> {
        let mark = self.tr.supply.mark();
        let (a0, a1, hh) = self.tr.supply.triple(&Name::new("a"));
        let motive = Term::lam(
            a0.clone(),
            Term::apps(Term::Ind(decl.name.clone()), self.x0.clone()),
            Term::lam(
                a1.clone(),
                Term::apps(Term::Ind(decl.name.clone()), self.x1.clone()),
                Term::lam(
                    hh,
                    Term::apps(Term::Ind(ind_r.clone()), self.triples.iter().cloned().chain([Term::Var(a0.clone()), Term::Var(a1.clone())])),
                    predicate(Term::Var(a0), Term::Var(a1)),
                ),
            ),
        );
        let mut branches = Vec::new();
        for l in 0..decl.constructors.len() {
            let lm = self.tr.supply.mark();
            let mut binders = Vec::new();
            let mut rels = Vec::new();
            for (z, e) in self.args[l].clone() {
                let (u0, u1, ur) = self.tr.supply.triple(&z);
                let rel = self.tr.translate(&e)?;
                let rel = beta(&Term::apps(rel, [Term::Var(u0.clone()), Term::Var(u1.clone())]))?;
                binders.push((u0, self.tr.orig(&e)));
                binders.push((u1, self.tr.prime(&e)));
                binders.push((ur.clone(), rel));
                rels.push(ur);
            }
            let mut b = leaf(l, &rels);
            for (u, t) in binders.into_iter().rev() {
                b = Term::lam(u, t, b);
            }
            branches.push(b);
            self.tr.supply.release(lm);
        }
        self.tr.supply.release(mark);
        Ok(Term::case(Case {
            ind: ind_r.clone(),
            scrutinee: Term::Var(h.clone()),
            params: self.triples.clone(),
            motive,
            branches,
        }))
    }

    /// Closes `body : ty` over the parameter triples, `z`, `w'` and `h`.
    fn close(&self, inner: Vec<(Name, Term)>, ty: Term, body: Term) -> (Term, Term) {
        let (mut ty, mut body) = (ty, body);
        for (x, t) in self.binders.iter().chain(&inner).rev() {
            ty = Term::prod(x.clone(), t.clone(), ty);
            body = Term::lam(x.clone(), t.clone(), body);
        }
        (ty, body)
    }
}

/// `I_inv_j_m : ∀ xs (z : E_j) (w' : E_j') (h : I_R xs (c_j x z) (c_j x' w')). ⟦E_j,m⟧ z_m w'_m`,
/// projecting the `m`-th argument relation out of a proof relating two
/// `c_j`-values.
fn ensure_inversion(env: &mut GlobalEnv, decl: &InductiveDecl, ind_r: &Name, j: usize, m: usize) -> Result<Name> {
    let key = format!("inv/{}/{j}/{m}", decl.name);
    if let Some(n) = env.helpers.get(&key) {
        return Ok(n.clone());
    }
    let true_decl = find_inductive(env, "True", 1)?;
    let (true_ty, true_intro) = (Term::Ind(true_decl.name.clone()), Term::Constr(true_decl.constructors[0].name.clone()));
    let (ty, body) = {
        let mut s = HelperScope::new(env, decl)?;
        let z0 = s.arg_names(j, false);
        let w1 = s.arg_names(j, true);
        let h = s.tr.supply.fresh("h");
        let e_m = s.args[j][m].1.clone();
        let rel_m = s.tr.translate(&e_m)?;
        let target = beta(&Term::apps(rel_m.clone(), [Term::Var(z0[m].clone()), Term::Var(w1[m].clone())]))?;

        // P a a' := the m-th relation when both are c_j-values, True otherwise.
        let cases = |s: &mut HelperScope<'_>, a0: Term, a1: Term| -> Result<Term> {
            let (tt, rel_m) = (true_ty.clone(), rel_m.clone());
            s.prop_case(decl, a0, false, &mut |s, l, us| {
                if l != j {
                    return Ok(tt.clone());
                }
                let (u0m, tt, rel_m) = (us[m].clone(), tt.clone(), rel_m.clone());
                s.prop_case(decl, a1.clone(), true, &mut |_, l2, vs| {
                    Ok(if l2 == j {
                        Term::apps(rel_m.clone(), [Term::Var(u0m.clone()), Term::Var(vs[m].clone())])
                    } else {
                        tt.clone()
                    })
                })
            })
        };
        // The predicate is rebuilt per binder pair; construct it eagerly on
        // placeholder names and substitute.
        let (p0, p1) = (Name::new("#a0"), Name::new("#a1"));
        let pred = cases(&mut s, Term::Var(p0.clone()), Term::Var(p1.clone()))?;
        let predicate = |a0: Term, a1: Term| {
            let mut map = std::collections::HashMap::new();
            map.insert(p0.clone(), a0);
            map.insert(p1.clone(), a1);
            pred.subst_many(&map)
        };
        let leaf = |l: usize, rels: &[Name]| if l == j { Term::Var(rels[m].clone()) } else { true_intro.clone() };
        let body = s.relation_case(decl, ind_r, &h, &predicate, &leaf)?;
        let mut inner = Vec::new();
        for (z, t) in z0.iter().zip(s.arg_types(j, false)) {
            inner.push((z.clone(), t));
        }
        for (w, t) in w1.iter().zip(s.arg_types(j, true)) {
            inner.push((w.clone(), t));
        }
        let hyp = Term::apps(
            Term::Ind(ind_r.clone()),
            s.triples.iter().cloned().chain([s.ctor(decl, j, false, &z0), s.ctor(decl, j, true, &w1)]),
        );
        inner.push((h, hyp));
        s.close(inner, target, body)
    };
    let name = env.fresh_global(&format!("{}_inv_{}_{}", decl.name, j + 1, m + 1));
    register_definition(env, name.clone(), Some(ty), body)?;
    env.helpers.insert(key, name.clone());
    Ok(name)
}

/// `I_abs_j_l : ∀ xs (z : E_j) (w' : E_l') (h : I_R xs (c_j x z) (c_l x' w')). False`
/// for `j ≠ l`: distinct constructors are never related.
fn ensure_discrimination(env: &mut GlobalEnv, decl: &InductiveDecl, ind_r: &Name, j: usize, l: usize) -> Result<Name> {
    let key = format!("abs/{}/{j}/{l}", decl.name);
    if let Some(n) = env.helpers.get(&key) {
        return Ok(n.clone());
    }
    let true_decl = find_inductive(env, "True", 1)?;
    let (true_ty, true_intro) = (Term::Ind(true_decl.name.clone()), Term::Constr(true_decl.constructors[0].name.clone()));
    let false_ty = Term::Ind(find_inductive(env, "False", 0)?.name.clone());
    let (ty, body) = {
        let mut s = HelperScope::new(env, decl)?;
        let z0 = s.arg_names(j, false);
        let w1 = s.arg_names(l, true);
        let h = s.tr.supply.fresh("h");
        let (p0, p1) = (Name::new("#a0"), Name::new("#a1"));
        let (tt, ff) = (true_ty.clone(), false_ty.clone());
        let pred = s.prop_case(decl, Term::Var(p0.clone()), false, &mut |s, r, _| {
            if r != j {
                return Ok(tt.clone());
            }
            let (tt, ff) = (tt.clone(), ff.clone());
            s.prop_case(decl, Term::Var(p1.clone()), true, &mut |_, r2, _| Ok(if r2 == l { ff.clone() } else { tt.clone() }))
        })?;
        let predicate = |a0: Term, a1: Term| {
            let mut map = std::collections::HashMap::new();
            map.insert(p0.clone(), a0);
            map.insert(p1.clone(), a1);
            pred.subst_many(&map)
        };
        let leaf = |_: usize, _: &[Name]| true_intro.clone();
        let body = s.relation_case(decl, ind_r, &h, &predicate, &leaf)?;
        let mut inner = Vec::new();
        for (z, t) in z0.iter().zip(s.arg_types(j, false)) {
            inner.push((z.clone(), t));
        }
        for (w, t) in w1.iter().zip(s.arg_types(l, true)) {
            inner.push((w.clone(), t));
        }
        let hyp = Term::apps(
            Term::Ind(ind_r.clone()),
            s.triples.iter().cloned().chain([s.ctor(decl, j, false, &z0), s.ctor(decl, l, true, &w1)]),
        );
        inner.push((h, hyp));
        s.close(inner, false_ty.clone(), body)
    };
    let name = env.fresh_global(&format!("{}_abs_{}_{}", decl.name, j + 1, l + 1));
    register_definition(env, name.clone(), Some(ty), body)?;
    env.helpers.insert(key, name.clone());
    Ok(name)
}
