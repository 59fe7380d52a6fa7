//! Well-formedness of inductive declarations: fresh names, arity shape,
//! constructor shape with strict positivity, and constructor sorts.

use std::collections::{HashMap, HashSet};

use super::TypeChecker;
use crate::env::{Constructor, GlobalEnv, InductiveDecl, InductiveSpec, Mode};
use crate::error::{Error, Result};
use crate::term::{Context, Name, Sort, Term};

/// Checks `spec` and registers the inductive and its constructors.
pub fn declare_inductive(env: &mut GlobalEnv, spec: InductiveSpec) -> Result<()> {
    let decl = check_inductive(env, &spec)?;
    env.insert_inductive(decl);
    Ok(())
}

/// Checks `spec` against `env` without registering it.
pub fn check_inductive(env: &GlobalEnv, spec: &InductiveSpec) -> Result<InductiveDecl> {
    let ind = &spec.name;
    let mut seen = HashSet::new();
    for n in std::iter::once(ind).chain(spec.constructors.iter().map(|(c, _)| c)) {
        if env.is_declared(n.as_str()) || !seen.insert(n.clone()) {
            return Err(Error::NameClash(n.clone()));
        }
    }

    let not_arity = |reason: String| Error::NotAnArity(ind.clone(), reason);
    let tc = TypeChecker::new(env);
    tc.infer_sort(&Context::new(), &spec.arity).map_err(|e| not_arity(e.to_string()))?;
    let tel = tc.telescope(&spec.arity, None, &mut HashSet::new())?;
    let sort = match (env.mode(), tc.whnf(&tel.body)?) {
        (_, Term::Sort(Sort::Prop)) => Sort::Prop,
        (Mode::Refined, Term::Sort(s @ Sort::Set(_))) => s,
        (Mode::Cic { .. }, Term::Sort(s @ Sort::Type(_))) => s,
        (_, other) => return Err(not_arity(format!("it concludes in {other}"))),
    };
    let p = spec.param_count;
    if tel.binders.len() < p {
        return Err(not_arity(format!("it has fewer than {p} parameter binders")));
    }
    let index_count = tel.binders.len() - p;
    let params: Vec<(Name, Term)> = tel.binders[..p].to_vec();

    // Constructors are checked with I provisionally declared.
    let mut scratch = env.clone();
    scratch.insert_inductive(InductiveDecl {
        name: ind.clone(),
        param_count: p,
        index_count,
        arity: spec.arity.clone(),
        constructors: Vec::new(),
        sort,
        is_small: true,
        subsingleton: true,
    });
    let tc = TypeChecker::new(&scratch);

    let mut constructors = Vec::new();
    let mut is_small = true;
    let mut all_args_prop = true;
    for (c, ty) in &spec.constructors {
        let info = check_constructor(&tc, ind, c, ty, &params, index_count, sort)?;
        is_small &= info.small;
        all_args_prop &= info.all_prop;
        constructors.push(Constructor { name: c.clone(), ty: ty.clone(), arg_count: info.arg_count });
    }
    let subsingleton = constructors.is_empty() || (constructors.len() == 1 && all_args_prop);
    Ok(InductiveDecl {
        name: ind.clone(),
        param_count: p,
        index_count,
        arity: spec.arity.clone(),
        constructors,
        sort,
        is_small,
        subsingleton,
    })
}

struct ConstructorInfo {
    arg_count: usize,
    small: bool,
    all_prop: bool,
}

fn check_constructor(
    tc: &TypeChecker<'_>,
    ind: &Name,
    c: &Name,
    ty: &Term,
    params: &[(Name, Term)],
    index_count: usize,
    sort: Sort,
) -> Result<ConstructorInfo> {
    let ill = |reason: String| Error::ConstructorIllTyped { constructor: c.clone(), reason };
    let positivity = || Error::PositivityViolation { ind: ind.clone(), constructor: c.clone() };
    let p = params.len();

    tc.infer_sort(&Context::new(), ty).map_err(|e| ill(e.to_string()))?;
    let tel = tc.telescope(ty, None, &mut HashSet::new())?;
    if tel.binders.len() < p {
        return Err(ill(format!("it does not quantify over the {p} parameters")));
    }

    // Parameters: same types as in the arity, up to renaming.
    let mut renaming = HashMap::new();
    for ((x, a), (y, b)) in tel.binders[..p].iter().zip(params) {
        let b = b.subst_many(&renaming);
        if !tc.conv(a, &b)? {
            return Err(ill(format!("parameter {x} has type {a}, the arity says {b}")));
        }
        if mentions(a, ind) {
            return Err(positivity());
        }
        renaming.insert(y.clone(), Term::Var(x.clone()));
    }

    // Conclusion: I x^p D^n with uniform parameters and I absent from D.
    let concl = tc.whnf(&tel.body)?;
    let (head, args) = concl.spine();
    if !matches!(head, Term::Ind(i) if i == ind) || args.len() != p + index_count {
        return Err(ill(format!("it concludes in {concl}, not in an instance of {ind}")));
    }
    for (a, (x, _)) in args.iter().zip(&tel.binders[..p]) {
        if !matches!(a, Term::Var(y) if y == x) {
            return Err(ill(format!("parameter {x} is not used uniformly (found {a})")));
        }
    }
    if args[p..].iter().any(|d| mentions(d, ind)) {
        return Err(positivity());
    }

    // Arguments: strict positivity and their sorts.
    let mut ctx = Context::new();
    for (x, a) in &tel.binders {
        ctx.push(x.clone(), a.clone());
    }
    ctx.truncate(p);
    let mut small = true;
    let mut all_prop = true;
    for (z, e) in &tel.binders[p..] {
        if !strictly_positive(tc, ind, e, &tel.binders[..p])? {
            return Err(positivity());
        }
        let s = tc.infer_sort(&ctx, e).map_err(|err| ill(err.to_string()))?;
        small &= matches!(s, Sort::Prop | Sort::Set(_));
        all_prop &= s == Sort::Prop;
        ctx.push(z.clone(), e.clone());
    }

    // The constructor type without parameters lives in the inductive's sort.
    ctx.truncate(p);
    let mut rest = tel.body.clone();
    for (z, e) in tel.binders[p..].iter().rev() {
        rest = Term::prod(z.clone(), e.clone(), rest);
    }
    let s = tc.infer_sort(&ctx, &rest).map_err(|e| ill(e.to_string()))?;
    if !tc.sort_leq(s, sort) {
        return Err(ill(format!("its type lives in {s}, which does not fit in {sort}")));
    }
    Ok(ConstructorInfo { arg_count: tel.binders.len() - p, small, all_prop })
}

fn mentions(t: &Term, ind: &Name) -> bool {
    let mut found = false;
    t.visit(&mut |s| found |= matches!(s, Term::Ind(i) if i == ind));
    found
}

/// `I` occurs in `e` at most as the conclusion of `e`'s telescope, applied
/// to the parameters.
fn strictly_positive(tc: &TypeChecker<'_>, ind: &Name, e: &Term, params: &[(Name, Term)]) -> Result<bool> {
    if !mentions(e, ind) {
        return Ok(true);
    }
    let mut avoid: HashSet<Name> = params.iter().map(|(x, _)| x.clone()).collect();
    avoid.extend(e.free_vars());
    let tel = tc.telescope(e, None, &mut avoid)?;
    if tel.binders.iter().any(|(_, w)| mentions(w, ind)) {
        return Ok(false);
    }
    let concl = tc.whnf(&tel.body)?;
    let (head, args) = concl.spine();
    if !matches!(head, Term::Ind(i) if i == ind) || args.len() < params.len() {
        return Ok(false);
    }
    let uniform = args.iter().zip(params).all(|(a, (x, _))| matches!(a, Term::Var(y) if y == x));
    Ok(uniform && !args[params.len()..].iter().any(|d| mentions(d, ind)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::Session;

    fn session(src: &str) -> Session {
        let mut s = Session::new();
        s.run_str("test", src).unwrap();
        s
    }

    const NAT: &str = "Inductive nat : Set@0 := O : nat | S : nat -> nat.";

    fn spec(arity: Term, ctors: Vec<(&str, Term)>) -> InductiveSpec {
        InductiveSpec {
            name: "I".into(),
            param_count: 0,
            arity,
            constructors: ctors.into_iter().map(|(c, t)| (Name::new(c), t)).collect(),
        }
    }

    #[test]
    fn smallness_and_subsingletons() {
        let s = session(&format!(
            "{NAT}\nInductive box : Set@1 := close : Set@0 -> box.\n\
             Inductive True : Prop := I : True.\n\
             Inductive and (A B : Prop) : Prop := conj : A -> B -> and A B.\n\
             Inductive or (A B : Prop) : Prop := inl : A -> or A B | inr : B -> or A B.\n\
             Inductive ex (A : Set@0) (P : A -> Prop) : Prop := intro : forall x : A, P x -> ex A P."
        ));
        let env = s.env();
        assert!(env.inductive("nat").unwrap().is_small);
        assert!(!env.inductive("box").unwrap().is_small);
        assert!(env.inductive("True").unwrap().subsingleton);
        assert!(env.inductive("and").unwrap().subsingleton);
        assert!(!env.inductive("or").unwrap().subsingleton);
        assert!(!env.inductive("ex").unwrap().subsingleton);
    }

    #[test]
    fn positivity() {
        let s = session(NAT);
        let i = Term::ind("I");
        let nat = Term::ind("nat");
        let set0 = Term::sort(Sort::Set(0));
        let ok = spec(set0.clone(), vec![("lim", Term::arrow(Term::arrow(nat.clone(), i.clone()), i.clone()))]);
        assert!(check_inductive(s.env(), &ok).is_ok());
        let neg = spec(set0.clone(), vec![("bad", Term::arrow(Term::arrow(i.clone(), nat.clone()), i.clone()))]);
        assert!(matches!(check_inductive(s.env(), &neg), Err(Error::PositivityViolation { .. })));
        let nested = spec(
            set0,
            vec![("bad", Term::arrow(Term::arrow(Term::arrow(i.clone(), nat), i.clone()), i))],
        );
        assert!(matches!(check_inductive(s.env(), &nested), Err(Error::PositivityViolation { .. })));
    }

    #[test]
    fn malformed_declarations() {
        let s = session(NAT);
        let i = Term::ind("I");
        // The arity must conclude in Prop or Set.
        let bad_arity = spec(Term::sort(Sort::Type(1)), vec![]);
        assert!(matches!(check_inductive(s.env(), &bad_arity), Err(Error::NotAnArity(..))));
        // A constructor must conclude in the inductive.
        let bad_concl = spec(Term::sort(Sort::Set(0)), vec![("c", Term::ind("nat"))]);
        assert!(matches!(check_inductive(s.env(), &bad_concl), Err(Error::ConstructorIllTyped { .. })));
        // A Set@0 inductive cannot store a Set@0.
        let too_big = spec(Term::sort(Sort::Set(0)), vec![("c", Term::arrow(Term::sort(Sort::Set(0)), i))]);
        assert!(matches!(check_inductive(s.env(), &too_big), Err(Error::ConstructorIllTyped { .. })));
        let clash = spec(Term::sort(Sort::Set(0)), vec![("O", Term::ind("I"))]);
        assert!(matches!(check_inductive(s.env(), &clash), Err(Error::NameClash(_))));
    }
}
