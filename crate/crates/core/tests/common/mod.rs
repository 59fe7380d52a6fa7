//! Shared by the integration tests: corpus loading, small-term
//! enumeration and the substitution-lemma checks.
#![allow(dead_code)]

use std::path::PathBuf;

use cicr::frontend::Session;
use cicr::param::{translate_in, Translator};
use cicr::reduce::{conv, Fuel};
use cicr::term::{Context, Name, Sort, Term};
use cicr::typecheck::TypeChecker;
use cicr::GlobalEnv;
use std::collections::HashMap;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// The positive corpus files, sorted by name.
pub fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cicr"))
        .collect();
    files.sort();
    files
}

pub fn negative_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir().join("negative"))
        .expect("negative corpus directory")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    files.sort();
    files
}

/// Runs a corpus file, panicking with the diagnostic if it fails.
pub fn load(file: &str) -> Session {
    let mut s = Session::new();
    if let Err(d) = s.run_file(&corpus_dir().join(file)) {
        panic!("{file} failed: {d}");
    }
    s
}

pub const SORTS: [Sort; 3] = [Sort::Prop, Sort::Set(0), Sort::Type(1)];
pub const VARS: [&str; 2] = ["x", "y"];

/// Every term of exactly `size` nodes over the three sorts and two
/// variable names, which are also the only binder names.
pub fn terms_of_size(size: usize, memo: &mut HashMap<usize, Vec<Term>>) -> Vec<Term> {
    if let Some(ts) = memo.get(&size) {
        return ts.clone();
    }
    let mut out = Vec::new();
    if size == 1 {
        out.extend(SORTS.iter().map(|s| Term::Sort(*s)));
        out.extend(VARS.iter().map(|v| Term::var(*v)));
    } else if size >= 3 {
        for left in 1..size - 1 {
            let right = size - 1 - left;
            let ls = terms_of_size(left, memo);
            let rs = terms_of_size(right, memo);
            for l in &ls {
                for r in &rs {
                    out.push(Term::app(l.clone(), r.clone()));
                    for v in VARS {
                        out.push(Term::prod(v, l.clone(), r.clone()));
                        out.push(Term::lam(v, l.clone(), r.clone()));
                    }
                }
            }
        }
    }
    memo.insert(size, out.clone());
    out
}

pub fn terms_up_to(max: usize) -> Vec<Term> {
    let mut memo = HashMap::new();
    (1..=max).flat_map(|n| terms_of_size(n, &mut memo)).collect()
}

/// The output names `(x, x', x_R)` the translator assigns to the last
/// entry of `ctx`.
pub fn last_triple(env: &mut GlobalEnv, ctx: &Context) -> (Name, Name, Name) {
    let out = Translator::with_context(env, ctx).translated_context().expect("translated context");
    let e = out.entries();
    let n = e.len();
    (e[n - 3].0.clone(), e[n - 2].0.clone(), e[n - 1].0.clone())
}

/// `ctx` extended with `x : c`.
pub fn extend(delta: &Context, x: &str, c: &Term) -> Context {
    let mut g = delta.clone();
    g.push(Name::new(x), c.clone());
    g
}

/// A substitution instance `Δ, x : C ⊢ A` with arguments `Δ ⊢ B : C`,
/// with everything that does not depend on `A` computed once.
pub struct SubstFixture {
    pub delta: Context,
    pub gamma: Context,
    pub x: Name,
    triple: (Name, Name, Name),
    /// `B`, `B'` and the substitution `x, x', x_R := B, B', ⟦B⟧`.
    args: Vec<(Term, Term, HashMap<Name, Term>)>,
}

impl SubstFixture {
    pub fn new(env: &mut GlobalEnv, delta: &Context, x: &str, c: &Term, bs: &[Term]) -> Result<Self, String> {
        let gamma = extend(delta, x, c);
        let triple = last_triple(env, &gamma);
        let mut args = Vec::new();
        for b in bs {
            let mut tr = Translator::with_context(env, delta);
            let (b0, b1) = (tr.orig(b), tr.prime(b));
            let br = tr.translate(b).map_err(|e| format!("⟦{b}⟧: {e}"))?;
            let map = [(triple.0.clone(), b0), (triple.1.clone(), b1.clone()), (triple.2.clone(), br)]
                .into_iter()
                .collect();
            args.push((b.clone(), b1, map));
        }
        Ok(SubstFixture { delta: delta.clone(), gamma, x: Name::new(x), triple, args })
    }

    pub fn arg_count(&self) -> usize {
        self.args.len()
    }

    /// Both substitution lemmas for `A` against every argument.
    pub fn check(&self, env: &mut GlobalEnv, a: &Term) -> Result<usize, String> {
        let a1 = Translator::with_context(env, &self.gamma).prime(a);
        let ta = translate_in(env, &self.gamma, a).map_err(|e| format!("⟦{a}⟧: {e}"))?;
        for (b, b1, map) in &self.args {
            let sub = a.subst(&self.x, b);
            let mut tr = Translator::with_context(env, &self.delta);
            let lhs = tr.prime(&sub);
            let rhs = a1.subst(&self.triple.1, b1);
            if !lhs.alpha_eq(&rhs) {
                return Err(format!("prime: A = {a}, B = {b}: {lhs} vs {rhs}"));
            }
            let lhs = tr.translate(&sub).map_err(|e| format!("⟦A[B/x]⟧: {e}"))?;
            let rhs = ta.subst_many(map);
            if !lhs.alpha_eq(&rhs) {
                return Err(format!("translate: A = {a}, B = {b}: {lhs} vs {rhs}"));
            }
        }
        Ok(2 * self.args.len())
    }
}

/// Primed copies commute with substitution: `(A[B/x])' = A'[B'/x']`.
pub fn lemma_prime(env: &mut GlobalEnv, delta: &Context, x: &str, c: &Term, a: &Term, b: &Term) -> Result<(), String> {
    let gamma = extend(delta, x, c);
    let (_, x1, _) = last_triple(env, &gamma);
    let lhs = Translator::with_context(env, delta).prime(&a.subst(&Name::new(x), b));
    let b1 = Translator::with_context(env, delta).prime(b);
    let rhs = Translator::with_context(env, &gamma).prime(a).subst(&x1, &b1);
    if lhs.alpha_eq(&rhs) {
        Ok(())
    } else {
        Err(format!("prime: A = {a}, B = {b}: {lhs} vs {rhs}"))
    }
}

/// `⟦A[B/x]⟧ = ⟦A⟧[B/x][B'/x'][⟦B⟧/x_R]`.
pub fn lemma_translate(
    env: &mut GlobalEnv,
    delta: &Context,
    x: &str,
    c: &Term,
    a: &Term,
    b: &Term,
) -> Result<(), String> {
    let gamma = extend(delta, x, c);
    let (x0, x1, xr) = last_triple(env, &gamma);
    let lhs = translate_in(env, delta, &a.subst(&Name::new(x), b)).map_err(|e| format!("⟦A[B/x]⟧: {e}"))?;
    let ta = translate_in(env, &gamma, a).map_err(|e| format!("⟦A⟧: {e}"))?;
    let mut tr = Translator::with_context(env, delta);
    let map: HashMap<Name, Term> = [
        (x0, tr.orig(b)),
        (x1, tr.prime(b)),
        (xr, tr.translate(b).map_err(|e| format!("⟦B⟧: {e}"))?),
    ]
    .into_iter()
    .collect();
    let rhs = ta.subst_many(&map);
    if lhs.alpha_eq(&rhs) {
        Ok(())
    } else {
        Err(format!("translate: A = {a}, B = {b}: {lhs} vs {rhs}"))
    }
}

/// `A₁ ≡ A₂` implies `⟦A₁⟧ ≡ ⟦A₂⟧`.
pub fn lemma_conv(env: &mut GlobalEnv, ctx: &Context, a1: &Term, a2: &Term) -> Result<(), String> {
    let t1 = translate_in(env, ctx, a1).map_err(|e| format!("⟦A₁⟧: {e}"))?;
    let t2 = translate_in(env, ctx, a2).map_err(|e| format!("⟦A₂⟧: {e}"))?;
    let fuel = env.config().fuel;
    match conv(&t1, &t2, env, &mut Fuel::new(fuel)) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("conv: {a1} ≡ {a2} but {t1} ≢ {t2}")),
        Err(e) => Err(format!("conv: {a1} ≡ {a2}: {e}")),
    }
}

pub fn well_typed(env: &GlobalEnv, ctx: &Context, t: &Term) -> Option<Term> {
    TypeChecker::new(env).infer(ctx, t).ok()
}
