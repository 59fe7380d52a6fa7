//! The trusted kernel: sort rules, subtyping, type inference and checking,
//! `case` and `fix` rules, and global registration.

mod guard;
mod inductive;

use std::collections::HashSet;

use crate::env::{Definition, GlobalEnv, Mode};
use crate::error::{EliminationRestriction, Error, Result};
use crate::reduce::{self, Fuel};
use crate::term::{fresh_name, Case, Context, Fix, Name, Sort, Term};

pub use guard::check_guard;
pub use inductive::declare_inductive;

/// Type checker over a fixed global environment.
pub struct TypeChecker<'e> {
    env: &'e GlobalEnv,
}

/// A binder telescope opened with fresh names, and what it concludes in.
pub(crate) struct Telescope {
    pub binders: Vec<(Name, Term)>,
    pub body: Term,
}

impl<'e> TypeChecker<'e> {
    pub fn new(env: &'e GlobalEnv) -> Self {
        TypeChecker { env }
    }

    pub fn env(&self) -> &'e GlobalEnv {
        self.env
    }

    fn fuel(&self) -> Fuel {
        Fuel::new(self.env.config().fuel)
    }

    pub fn whnf(&self, t: &Term) -> Result<Term> {
        reduce::whnf(t, self.env, &mut self.fuel())
    }

    pub fn conv(&self, a: &Term, b: &Term) -> Result<bool> {
        reduce::conv(a, b, self.env, &mut self.fuel())
    }

    pub fn normalize(&self, t: &Term) -> Result<Term> {
        reduce::normalize(t, self.env, &mut self.fuel())
    }

    /// The type of a sort.
    pub fn sort_of_sort(&self, s: Sort) -> Result<Sort> {
        match (self.env.mode(), s) {
            (_, Sort::Prop) => Ok(Sort::Type(1)),
            (Mode::Refined, Sort::Set(i)) => Ok(Sort::Type(i + 1)),
            (Mode::Refined, Sort::Type(0)) => {
                Err(Error::UniverseError("Type@0 does not exist: Type levels start at 1".into()))
            }
            (_, Sort::Type(i)) => Ok(Sort::Type(i + 1)),
            (Mode::Cic { .. }, Sort::Set(i)) => {
                Err(Error::UniverseError(format!("Set@{i} is not a sort in CIC mode")))
            }
        }
    }

    /// The sort of `forall x : A, B` given the sorts of `A` and `B`: `Prop`
    /// is impredicative, otherwise the result is the join of both levels in
    /// the codomain's hierarchy.
    pub fn product_sort(&self, dom: Sort, cod: Sort) -> Result<Sort> {
        let lvl = |s: Sort| s.level().unwrap_or(0);
        match (self.env.mode(), cod) {
            (_, Sort::Prop) => Ok(Sort::Prop),
            (Mode::Refined, Sort::Set(j)) => Ok(Sort::Set(j.max(lvl(dom)))),
            (_, Sort::Type(j)) => Ok(Sort::Type(j.max(lvl(dom)))),
            (Mode::Cic { .. }, Sort::Set(i)) => {
                Err(Error::UniverseError(format!("Set@{i} is not a sort in CIC mode")))
            }
        }
    }

    /// Cumulativity on sorts. `Prop` is below nothing else unless the CIC
    /// mode switch says otherwise.
    pub fn sort_leq(&self, a: Sort, b: Sort) -> bool {
        match (a, b) {
            (Sort::Prop, Sort::Prop) => true,
            (Sort::Set(i), Sort::Set(j)) | (Sort::Type(i), Sort::Type(j)) => i <= j,
            (Sort::Prop, Sort::Type(_)) => {
                matches!(self.env.mode(), Mode::Cic { prop_cumulative: true })
            }
            _ => false,
        }
    }

    /// `a <: b`: conversion, sort cumulativity, and covariance in product
    /// codomains under convertible domains.
    pub fn subtype(&self, a: &Term, b: &Term) -> Result<bool> {
        if a.alpha_eq(b) {
            return Ok(true);
        }
        let a = self.whnf(a)?;
        let b = self.whnf(b)?;
        match (&a, &b) {
            (Term::Sort(s), Term::Sort(t)) => Ok(self.sort_leq(*s, *t)),
            (Term::Prod(x, a1, b1), Term::Prod(y, a2, b2)) => {
                if !self.conv(a1, a2)? {
                    return Ok(false);
                }
                let (b1, b2) = common_binder(x, b1, y, b2);
                self.subtype(&b1, &b2)
            }
            _ => self.conv(&a, &b),
        }
    }

    pub fn infer(&self, ctx: &Context, t: &Term) -> Result<Term> {
        let mut ctx = ctx.clone();
        self.infer_in(&mut ctx, t)
    }

    /// Whether `t` has type `expected` (up to conversion and cumulativity).
    pub fn check(&self, ctx: &Context, t: &Term, expected: &Term) -> Result<bool> {
        let ty = self.infer(ctx, t)?;
        self.subtype(&ty, expected)
    }

    /// Like [`TypeChecker::check`] but reports a mismatch as an error.
    pub fn expect(&self, ctx: &Context, t: &Term, expected: &Term) -> Result<()> {
        let mut ctx = ctx.clone();
        self.expect_in(&mut ctx, t, expected)
    }

    pub fn infer_sort(&self, ctx: &Context, t: &Term) -> Result<Sort> {
        let mut ctx = ctx.clone();
        self.infer_sort_in(&mut ctx, t)
    }

    fn expect_in(&self, ctx: &mut Context, t: &Term, expected: &Term) -> Result<()> {
        let ty = self.infer_in(ctx, t)?;
        if self.subtype(&ty, expected)? {
            Ok(())
        } else {
            Err(Error::IllTyped(format!("{t} has type {ty} but is expected to have type {expected}")))
        }
    }

    fn infer_sort_in(&self, ctx: &mut Context, t: &Term) -> Result<Sort> {
        let ty = self.infer_in(ctx, t)?;
        match self.whnf(&ty)? {
            Term::Sort(s) => Ok(s),
            other => Err(Error::SortMismatch(format!("{t} is not a type: its type is {other}"))),
        }
    }

    /// Pushes binder `x : ty` under a name not yet bound in `ctx`, returning
    /// the body renamed accordingly.
    fn open_binder(&self, ctx: &mut Context, x: &Name, ty: &Term, body: &Term) -> (Name, Term) {
        if !x.is_anon() && !ctx.contains(x.as_str()) {
            ctx.push(x.clone(), ty.clone());
            return (x.clone(), body.clone());
        }
        let fv = body.free_vars();
        let fresh = ctx.fresh(if x.is_anon() { "x" } else { x.as_str() }, &fv);
        let body = if x.is_anon() { body.clone() } else { body.subst(x, &Term::Var(fresh.clone())) };
        ctx.push(fresh.clone(), ty.clone());
        (fresh, body)
    }

    pub(crate) fn infer_in(&self, ctx: &mut Context, t: &Term) -> Result<Term> {
        match t {
            Term::Var(x) => ctx.lookup(x).cloned().ok_or_else(|| Error::UnboundVariable(x.clone())),
            Term::Sort(s) => Ok(Term::Sort(self.sort_of_sort(*s)?)),
            Term::Prod(x, a, b) => {
                let sa = self.infer_sort_in(ctx, a)?;
                let (_, b) = self.open_binder(ctx, x, a, b);
                let sb = self.infer_sort_in(ctx, &b);
                ctx.pop();
                Ok(Term::Sort(self.product_sort(sa, sb?)?))
            }
            Term::Lam(x, a, b) => {
                self.infer_sort_in(ctx, a)?;
                let (x, b) = self.open_binder(ctx, x, a, b);
                let tb = self.infer_in(ctx, &b);
                ctx.pop();
                Ok(Term::prod(x, (**a).clone(), tb?))
            }
            Term::App(f, a) => {
                let tf = self.infer_in(ctx, f)?;
                match self.whnf(&tf)? {
                    Term::Prod(x, dom, cod) => {
                        let ta = self.infer_in(ctx, a)?;
                        if !self.subtype(&ta, &dom)? {
                            return Err(Error::IllTyped(format!(
                                "argument {a} has type {ta} but {f} expects {dom}"
                            )));
                        }
                        Ok(cod.subst(&x, a))
                    }
                    other => Err(Error::NotAFunction(format!("{f} has type {other}"))),
                }
            }
            Term::Ind(n) | Term::Constr(n) | Term::Const(n) => {
                self.env.global_type(t).ok_or_else(|| Error::UnknownGlobal(n.clone()))
            }
            Term::Case(c) => self.check_case_in(ctx, c),
            Term::Fix(f) => self.check_fix_in(ctx, f),
        }
    }

    /// Opens up to `limit` leading products of `ty` (reducing to expose
    /// them), renaming binders away from `avoid`. Chosen names are added to
    /// `avoid`.
    pub(crate) fn telescope(&self, ty: &Term, limit: Option<usize>, avoid: &mut HashSet<Name>) -> Result<Telescope> {
        let mut binders = Vec::new();
        let mut cur = ty.clone();
        while limit.map_or(true, |n| binders.len() < n) {
            let w = self.whnf(&cur)?;
            let Term::Prod(x, a, b) = w else {
                cur = w;
                break;
            };
            let fv = b.free_vars();
            let base = if x.is_anon() { "x" } else { x.as_str() };
            let name = fresh_name(base, |c| avoid.contains(c) || (c != x.as_str() && fv.contains(c)));
            let body = if x.is_anon() || name == x { (*b).clone() } else { b.subst(&x, &Term::Var(name.clone())) };
            avoid.insert(name.clone());
            binders.push((name, (*a).clone()));
            cur = body;
        }
        Ok(Telescope { binders, body: cur })
    }

    /// Checks a `case` node and returns its type `T G M`.
    pub fn check_case(&self, ctx: &Context, case: &Case) -> Result<Term> {
        let mut ctx = ctx.clone();
        self.check_case_in(&mut ctx, case)
    }

    fn check_case_in(&self, ctx: &mut Context, case: &Case) -> Result<Term> {
        let ind = &case.ind;
        let decl = self.env.inductive(ind).ok_or_else(|| Error::UnknownGlobal(ind.clone()))?.clone();
        let malformed = |reason: String| Error::MalformedCase { ind: ind.clone(), reason };
        if case.params.len() != decl.param_count {
            return Err(malformed(format!(
                "{} parameters given, {} expected",
                case.params.len(),
                decl.param_count
            )));
        }
        if case.branches.len() != decl.constructors.len() {
            return Err(malformed(format!(
                "{} branches given, {} constructors declared",
                case.branches.len(),
                decl.constructors.len()
            )));
        }

        // Parameters against the arity; what remains is the index telescope.
        let mut arity = decl.arity.clone();
        for q in &case.params {
            let Term::Prod(x, p, rest) = self.whnf(&arity)? else {
                return Err(malformed("arity has fewer binders than parameters".into()));
            };
            self.expect_in(ctx, q, &p)?;
            arity = rest.subst(&x, q);
        }

        // Scrutinee: I Q G.
        let tm = self.infer_in(ctx, &case.scrutinee)?;
        let tm = self.whnf(&tm)?;
        let (head, args) = tm.spine();
        if !matches!(head, Term::Ind(i) if i == ind) || args.len() != decl.param_count + decl.index_count {
            return Err(Error::IllTyped(format!(
                "scrutinee {} has type {tm}, not an instance of {ind}",
                case.scrutinee
            )));
        }
        for (q, a) in case.params.iter().zip(&args) {
            if !self.conv(q, a)? {
                return Err(Error::IllTyped(format!(
                    "scrutinee {} has parameter {a}, case expects {q}",
                    case.scrutinee
                )));
            }
        }
        let indices: Vec<Term> = args[decl.param_count..].iter().map(|a| (*a).clone()).collect();

        // Motive: forall (y : B[Q/x]), I Q y -> r'.
        let motive_err = |reason: String| Error::MotiveMismatch { ind: ind.clone(), reason };
        let tt = self.infer_in(ctx, &case.motive)?;
        let mut avoid: HashSet<Name> = ctx.names().cloned().collect();
        avoid.extend(case.motive.free_vars());
        for q in &case.params {
            avoid.extend(q.free_vars());
        }
        let mut motive_ty = tt;
        let mut index_tel = arity;
        let mut ys = Vec::new();
        for _ in 0..decl.index_count {
            let (Term::Prod(y1, b1, r1), Term::Prod(y2, b2, r2)) = (self.whnf(&motive_ty)?, self.whnf(&index_tel)?)
            else {
                return Err(motive_err("motive does not abstract over the indices".into()));
            };
            if !self.conv(&b1, &b2)? {
                return Err(motive_err(format!("index binder has type {b1}, expected {b2}")));
            }
            let fv1 = r1.free_vars();
            let fv2 = r2.free_vars();
            let y = fresh_name(y1.as_str(), |c| avoid.contains(c) || fv1.contains(c) || fv2.contains(c));
            avoid.insert(y.clone());
            motive_ty = r1.subst(&y1, &Term::Var(y.clone()));
            index_tel = r2.subst(&y2, &Term::Var(y.clone()));
            ys.push(Term::Var(y));
        }
        let Term::Prod(_, dom, cod) = self.whnf(&motive_ty)? else {
            return Err(motive_err("motive does not abstract over the scrutinee".into()));
        };
        let expected_dom = Term::apps(Term::Ind(ind.clone()), case.params.iter().cloned().chain(ys));
        if !self.conv(&dom, &expected_dom)? {
            return Err(motive_err(format!("scrutinee binder has type {dom}, expected {expected_dom}")));
        }
        let Term::Sort(target) = self.whnf(&cod)? else {
            return Err(motive_err(format!("motive does not return a type: {cod}")));
        };

        self.check_elimination(&decl, target)?;

        // Branches.
        for (j, (ctor, branch)) in decl.constructors.iter().zip(&case.branches).enumerate() {
            let expected = self.branch_type(ctor, &decl, &case.params, &case.motive, &avoid)?;
            if let Err(e) = self.expect_in(ctx, branch, &expected) {
                return Err(Error::BranchMismatch { ind: ind.clone(), index: j, reason: e.to_string() });
            }
        }

        let mut result = Term::apps(case.motive.clone(), indices.into_iter().chain([case.scrutinee.clone()]));
        while let Some(r) = reduce::beta_step(&result) {
            result = r;
        }
        Ok(result)
    }

    /// `forall (z : E_j[Q/x]), T D_j[Q/x] (c_j Q z)`.
    pub(crate) fn branch_type(
        &self,
        ctor: &crate::env::Constructor,
        decl: &crate::env::InductiveDecl,
        params: &[Term],
        motive: &Term,
        avoid: &HashSet<Name>,
    ) -> Result<Term> {
        let mut ty = ctor.ty.clone();
        for q in params {
            let Term::Prod(x, _, rest) = self.whnf(&ty)? else {
                return Err(Error::MalformedCase { ind: decl.name.clone(), reason: "constructor type too short".into() });
            };
            ty = rest.subst(&x, q);
        }
        let mut avoid = avoid.clone();
        let tel = self.telescope(&ty, Some(ctor.arg_count), &mut avoid)?;
        let concl = self.whnf(&tel.body)?;
        let (_, cargs) = concl.spine();
        let indices = cargs.iter().skip(decl.param_count).map(|a| (*a).clone());
        let value = Term::apps(
            Term::Constr(ctor.name.clone()),
            params.iter().cloned().chain(tel.binders.iter().map(|(z, _)| Term::Var(z.clone()))),
        );
        let mut out = Term::apps(motive.clone(), indices.chain([value]));
        for (z, e) in tel.binders.into_iter().rev() {
            out = Term::prod(z, e, out);
        }
        Ok(out)
    }

    /// Elimination restrictions: a `Prop` inductive into `Set`/`Type` only
    /// when it has no constructor or a single one whose arguments are all
    /// proofs; a `Set` inductive into `Type` only when it is small.
    pub fn check_elimination(&self, decl: &crate::env::InductiveDecl, target: Sort) -> Result<()> {
        let illegal = |restriction| Error::IllegalElimination { ind: decl.name.clone(), restriction };
        match (decl.sort, target) {
            (Sort::Prop, Sort::Prop) => Ok(()),
            (Sort::Prop, _) if decl.subsingleton => Ok(()),
            (Sort::Prop, _) => Err(illegal(EliminationRestriction::PropIntoInformative)),
            (Sort::Set(_), Sort::Type(_)) if !decl.is_small && self.env.mode() == Mode::Refined => {
                Err(illegal(EliminationRestriction::LargeOverNonSmall))
            }
            _ => Ok(()),
        }
    }

    pub fn check_fix(&self, ctx: &Context, fix: &Fix) -> Result<Term> {
        let mut ctx = ctx.clone();
        self.check_fix_in(&mut ctx, fix)
    }

    fn check_fix_in(&self, ctx: &mut Context, fix: &Fix) -> Result<Term> {
        let ta = self.infer_in(ctx, &fix.annot).map_err(|e| Error::AnnotationNotAType(e.to_string()))?;
        if !matches!(self.whnf(&ta)?, Term::Sort(_)) {
            return Err(Error::AnnotationNotAType(format!("{} has type {ta}", fix.annot)));
        }
        // The decreasing argument must have an inductive type.
        let mut avoid: HashSet<Name> = ctx.names().cloned().collect();
        let tel = self.telescope(&fix.annot, Some(fix.rec_arg + 1), &mut avoid)?;
        let guard_err = |reason: String| Error::GuardViolation { name: fix.name.clone(), reason };
        let Some((_, rec_ty)) = tel.binders.get(fix.rec_arg) else {
            return Err(guard_err(format!("type has no argument number {}", fix.rec_arg + 1)));
        };
        if !matches!(self.whnf(rec_ty)?.head(), Term::Ind(_)) {
            return Err(guard_err(format!("decreasing argument has non-inductive type {rec_ty}")));
        }
        let (_, body) = self.open_binder(ctx, &fix.name, &fix.annot, &fix.body);
        let r = self.expect_in(ctx, &body, &fix.annot);
        ctx.pop();
        r?;
        check_guard(self.env, fix)?;
        Ok(fix.annot.clone())
    }
}

/// Brings two binder bodies under one shared name.
pub(crate) fn common_binder(x: &Name, b1: &Term, y: &Name, b2: &Term) -> (Term, Term) {
    if x == y {
        return (b1.clone(), b2.clone());
    }
    if !b2.has_free(x) {
        return (b1.clone(), b2.subst(y, &Term::Var(x.clone())));
    }
    let (f1, f2) = (b1.free_vars(), b2.free_vars());
    let z = Term::Var(fresh_name(x.as_str(), |c| f1.contains(c) || f2.contains(c)));
    (b1.subst(x, &z), b2.subst(y, &z))
}

/// Registers `name := body`, inferring the type when none is given.
pub fn register_definition(env: &mut GlobalEnv, name: Name, ty: Option<Term>, body: Term) -> Result<Term> {
    if env.is_declared(name.as_str()) {
        return Err(Error::NameClash(name));
    }
    let tc = TypeChecker::new(env);
    let ctx = Context::new();
    let ty = match ty {
        Some(ty) => {
            tc.infer_sort(&ctx, &ty)?;
            tc.expect(&ctx, &body, &ty)?;
            ty
        }
        None => tc.infer(&ctx, &body)?,
    };
    env.insert_definition(Definition { name, ty: ty.clone(), body });
    Ok(ty)
}

pub fn register_axiom(env: &mut GlobalEnv, name: Name, ty: Term) -> Result<()> {
    if env.is_declared(name.as_str()) {
        return Err(Error::NameClash(name));
    }
    TypeChecker::new(env).infer_sort(&Context::new(), &ty)?;
    env.insert_axiom(name, ty);
    Ok(())
}
