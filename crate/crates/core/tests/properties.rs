mod common;

use std::collections::HashSet;

use cicr::embed::embed;
use cicr::frontend::Session;
use cicr::names::NameSupply;
use cicr::param::check_abstraction;
use cicr::print::print_term;
use cicr::reduce::{normalize, Fuel};
use cicr::term::{Context, Name, Sort, Term};
use cicr::typecheck::TypeChecker;
use cicr::GlobalEnv;
use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const NAMES: [&str; 4] = ["x", "y", "z", "w"];

fn sort() -> impl Strategy<Value = Sort> {
    prop_oneof![Just(Sort::Prop), Just(Sort::Set(0)), Just(Sort::Set(1)), Just(Sort::Type(1))]
}

fn name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(&NAMES[..])
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![sort().prop_map(Term::Sort), name().prop_map(Term::var)];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (name(), inner.clone(), inner.clone()).prop_map(|(x, a, b)| Term::prod(x, a, b)),
            (name(), inner.clone(), inner).prop_map(|(x, a, b)| Term::lam(x, a, b)),
        ]
    })
}

/// Type-directed generation of well-typed terms. Binders reuse the names
/// in `NAMES`, so shadowing is common.
struct Gen {
    rng: StdRng,
}

impl Gen {
    /// A binder name, freshened if `ctx` already binds it.
    fn binder(&mut self, ctx: &Context) -> Name {
        let x = NAMES[self.rng.gen_range(0..NAMES.len())];
        ctx.fresh(x, &HashSet::new())
    }

    /// Variables of `ctx` visible under shadowing, with their types.
    fn visible(ctx: &Context) -> Vec<(Name, Term)> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (x, t) in ctx.entries().iter().rev() {
            if seen.insert(x.clone()) {
                out.push((x.clone(), t.clone()));
            }
        }
        out
    }

    /// A type of sort `s` (`Set@0` or `Prop`).
    fn ty(&mut self, env: &GlobalEnv, ctx: &mut Context, s: Sort, depth: u32) -> Term {
        let tc = TypeChecker::new(env);
        let atoms: Vec<Term> = Self::visible(ctx)
            .into_iter()
            .filter(|(_, t)| tc.conv(t, &Term::Sort(s)).unwrap_or(false))
            .map(|(x, _)| Term::Var(x))
            .collect();
        let choice = self.rng.gen_range(0..4);
        if depth == 0 || (choice == 0 && !atoms.is_empty()) {
            if atoms.is_empty() {
                let x = self.binder(ctx);
                return Term::prod(x.clone(), Term::Sort(s), Term::Var(x));
            }
            return atoms[self.rng.gen_range(0..atoms.len())].clone();
        }
        let x = self.binder(ctx);
        let dom = if choice == 3 && s == Sort::Prop { Term::prop() } else { self.ty(env, ctx, s, depth - 1) };
        ctx.push(x.clone(), dom.clone());
        let cod = self.ty(env, ctx, s, depth - 1);
        ctx.pop();
        Term::prod(x, dom, cod)
    }

    /// A term of type `ty`, or `None` if generation gets stuck.
    fn term(&mut self, env: &GlobalEnv, ctx: &mut Context, ty: &Term, depth: u32) -> Option<Term> {
        let tc = TypeChecker::new(env);
        let ty = tc.whnf(ty).ok()?;
        if let Term::Sort(s @ (Sort::Prop | Sort::Set(0))) = ty {
            return Some(self.ty(env, ctx, s, depth));
        }
        if let Term::Prod(x, a, b) = &ty {
            if self.rng.gen_bool(0.7) || depth == 0 {
                let y = ctx.fresh(if x.is_anon() { "x" } else { x.as_str() }, &b.free_vars());
                let b = b.subst(x, &Term::Var(y.clone()));
                ctx.push(y.clone(), (**a).clone());
                let body = self.term(env, ctx, &b, depth.saturating_sub(1));
                ctx.pop();
                return Some(Term::lam(y, (**a).clone(), body?));
            }
        }
        if depth > 0 && self.rng.gen_bool(0.2) {
            // A β-redex `(λz:A. t) u`.
            let a = self.ty(env, ctx, Sort::Set(0), 1);
            let u = self.term(env, ctx, &a, depth - 1)?;
            let z = ctx.fresh(NAMES[self.rng.gen_range(0..NAMES.len())], &ty.free_vars());
            ctx.push(z.clone(), a.clone());
            let t = self.term(env, ctx, &ty, depth - 1);
            ctx.pop();
            return Some(Term::app(Term::lam(z, a, t?), u));
        }
        // A variable applied to enough arguments.
        let mut heads = Vec::new();
        for (x, xt) in Self::visible(ctx) {
            let mut cur = xt;
            let mut args_ty = Vec::new();
            let max_args = if depth == 0 { 0 } else { 3 };
            for i in 0..=max_args {
                if tc.conv(&cur, &ty).unwrap_or(false) {
                    heads.push((x.clone(), args_ty.clone()));
                    break;
                }
                match tc.whnf(&cur).ok()? {
                    Term::Prod(y, a, b) if i < max_args => {
                        args_ty.push((y, (*a).clone()));
                        cur = (*b).clone();
                    }
                    _ => break,
                }
            }
        }
        if heads.is_empty() {
            return None;
        }
        let (f, params) = heads.swap_remove(self.rng.gen_range(0..heads.len()));
        // Dependent arguments are instantiated as they are produced.
        let mut t = Term::Var(f);
        let mut pending = params;
        while !pending.is_empty() {
            let (y, a) = pending.remove(0);
            let arg = self.term(env, ctx, &a, depth - 1)?;
            pending = pending.into_iter().map(|(z, b)| (z, b.subst(&y, &arg))).collect();
            t = Term::app(t, arg);
        }
        tc.check(ctx, &t, &ty).ok()?.then_some(t)
    }
}

/// Well-typed terms in `y : Set@0, x : Set@0`.
fn typed_term() -> impl Strategy<Value = Term> {
    any::<u64>().prop_filter_map("generation got stuck", |seed| {
        let env = GlobalEnv::default();
        let (mut ctx, c) = set_context();
        ctx.push(Name::new("x"), c);
        let mut g = Gen { rng: StdRng::seed_from_u64(seed) };
        let depth = g.rng.gen_range(1..4);
        let ty = if g.rng.gen_bool(0.3) { Term::Sort(Sort::Set(0)) } else { g.ty(&env, &mut ctx, Sort::Set(0), depth) };
        let t = g.term(&env, &mut ctx, &ty, depth + 1)?;
        TypeChecker::new(&env).check(&ctx, &t, &ty).ok()?.then_some(t)
    })
}

fn has_set(t: &Term) -> bool {
    let mut found = false;
    t.visit(&mut |s| found |= matches!(s, Term::Sort(Sort::Set(_))));
    found
}

/// `Δ = y : Set@0` and `x : Set@0`, the substituted variable.
fn set_context() -> (Context, Term) {
    let mut delta = Context::new();
    delta.push(Name::new("y"), Term::Sort(Sort::Set(0)));
    (delta, Term::Sort(Sort::Set(0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn subst_composes(a in term(), b in term(), c in term(), x in name(), y in name()) {
        prop_assume!(x != y && !c.has_free(&Name::new(x)));
        let (x, y) = (Name::new(x), Name::new(y));
        let lhs = a.subst(&x, &b).subst(&y, &c);
        let rhs = a.subst(&y, &c).subst(&x, &b.subst(&y, &c));
        prop_assert!(lhs.alpha_eq(&rhs), "{lhs} vs {rhs}");
    }

    #[test]
    fn subst_of_absent_variable_is_identity(a in term(), b in term(), x in name()) {
        let x = Name::new(x);
        prop_assume!(!a.has_free(&x));
        prop_assert!(a.subst(&x, &b).alpha_eq(&a));
    }

    #[test]
    fn subst_free_variables(a in term(), b in term(), x in name()) {
        let x = Name::new(x);
        let mut allowed = a.free_vars();
        allowed.remove(&x);
        if a.has_free(&x) {
            allowed.extend(b.free_vars());
        }
        prop_assert_eq!(a.subst(&x, &b).free_vars(), allowed);
    }

    #[test]
    fn renaming_a_binder_is_alpha_equal(x in name(), dom in term(), body in term()) {
        let x = Name::new(x);
        let fresh = Name::new("v");
        let renamed = Term::lam(fresh.clone(), dom.clone(), body.subst(&x, &Term::Var(fresh)));
        let original = Term::lam(x, dom, body);
        prop_assert!(original.alpha_eq(&renamed));
        prop_assert!(renamed.alpha_eq(&original));
        prop_assert_eq!(original.free_vars(), renamed.free_vars());
    }

    #[test]
    fn alpha_equal_terms_have_equal_free_variables(a in term(), b in term()) {
        prop_assert!(a.alpha_eq(&a));
        if a.alpha_eq(&b) {
            prop_assert!(b.alpha_eq(&a));
            prop_assert_eq!(a.free_vars(), b.free_vars());
        }
    }

    #[test]
    fn name_supply_never_reuses_a_name(bases in prop::collection::vec(name(), 1..20), reserved in prop::collection::vec(name(), 0..4)) {
        let reserved: Vec<Name> = reserved.into_iter().map(Name::new).collect();
        let mut supply = NameSupply::avoiding(&reserved);
        let mut seen: HashSet<Name> = reserved.iter().cloned().collect();
        for b in bases {
            let (o, p, r) = supply.triple(&Name::new(b));
            for n in [o, p, r] {
                prop_assert!(seen.insert(n.clone()), "{n} handed out twice");
            }
        }
    }

    #[test]
    fn embedding_commutes_with_substitution(a in term(), b in term(), x in name()) {
        let x = Name::new(x);
        let lhs = embed(&a.subst(&x, &b));
        let rhs = embed(&a).subst(&x, &embed(&b));
        prop_assert!(lhs.alpha_eq(&rhs), "{lhs} vs {rhs}");
        prop_assert!(!has_set(&lhs));
        prop_assert_eq!(embed(&lhs), lhs.clone());
        if !has_set(&a) {
            prop_assert_eq!(embed(&a), a);
        }
    }

    #[test]
    fn printing_round_trips(t in term()) {
        // Close the term so that every identifier resolves.
        let closed = NAMES.iter().rev().fold(t, |acc, x| Term::lam(*x, Term::prop(), acc));
        let s = Session::new();
        let printed = print_term(&closed, s.env());
        let parsed = s.parse_term(&printed).map_err(|d| TestCaseError::fail(format!("{printed}: {d}")))?;
        prop_assert!(parsed.alpha_eq(&closed), "{printed} parsed as {parsed}");
    }

    #[test]
    fn substitution_lemmas_on_typed_terms(a in typed_term()) {
        let mut env = GlobalEnv::default();
        let (delta, c) = set_context();
        let bs = [Term::var("y"), Term::prod("z", Term::var("y"), Term::var("y"))];
        let fixture = SubstFixture::new(&mut env, &delta, "x", &c, &bs).map_err(TestCaseError::fail)?;
        fixture.check(&mut env, &a).map_err(TestCaseError::fail)?;
        let nf = normalize(&a, &env, &mut Fuel::new(10_000)).map_err(|e| TestCaseError::fail(e.to_string()))?;
        lemma_conv(&mut env, &fixture.gamma, &a, &nf).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn abstraction_holds_for_typed_terms(a in typed_term()) {
        let mut env = GlobalEnv::default();
        let (mut ctx, c) = set_context();
        ctx.push(Name::new("x"), c);
        let r = check_abstraction(&mut env, &ctx, &a).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(r.verified, "⟦{a}⟧ = {} is not a proof of {}", r.relation_witness, r.expected_type);
    }

    #[test]
    fn typed_generator_covers_nontrivial_terms(seeds in prop::collection::vec(typed_term(), 64)) {
        let big = seeds.iter().filter(|t| t.size() >= 7).count();
        prop_assert!(big >= 8, "only {big} of 64 generated terms have 7 or more nodes");
    }
}

