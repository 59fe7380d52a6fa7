//! Translation of inductive declarations: `I` with `p` parameters becomes
//! `I_R` with `3p` parameters, arity `⟦A⟧ I I` and constructors
//! `c_R : ⟦C⟧ c c`.

use super::{beta, Translator};
use crate::env::{GlobalEnv, InductiveSpec};
use crate::error::{Error, Result};
use crate::term::{Name, Term};
use crate::typecheck::declare_inductive;

/// The translated declaration of `ind`, not yet registered. The caller
/// records `ind -> name` first so constructor types can refer to it.
fn translated_spec(env: &mut GlobalEnv, ind: &Name, name: &Name, ctor_names: &[Name]) -> Result<InductiveSpec> {
    let decl = env.inductive(ind).cloned().ok_or_else(|| Error::UnknownGlobal(ind.clone()))?;
    let mut tr = Translator::new(env);
    let arity = tr.translate(&decl.arity)?;
    let arity = beta(&Term::apps(arity, [Term::Ind(ind.clone()), Term::Ind(ind.clone())]))?;
    let mut constructors = Vec::new();
    for (k, r) in decl.constructors.iter().zip(ctor_names) {
        let c = Term::Constr(k.name.clone());
        let ty = tr.translate(&k.ty)?;
        constructors.push((r.clone(), beta(&Term::apps(ty, [c.clone(), c]))?));
    }
    Ok(InductiveSpec { name: name.clone(), param_count: 3 * decl.param_count, arity, constructors })
}

/// The name of `I_R`, translating and declaring it on first use. The
/// declaration goes through the ordinary inductive checks.
pub fn translate_inductive(env: &mut GlobalEnv, ind: &Name) -> Result<Name> {
    if let Some(n) = env.translation(ind) {
        return Ok(n.clone());
    }
    let decl = env.inductive(ind).cloned().ok_or_else(|| Error::UnknownGlobal(ind.clone()))?;
    let name = env.fresh_global(&format!("{ind}_R"));
    let mut taken = vec![name.clone()];
    let ctor_names: Vec<Name> = decl
        .constructors
        .iter()
        .map(|k| {
            let n = crate::term::fresh_name(&format!("{}_R", k.name), |c| {
                env.is_declared(c) || taken.iter().any(|t| t.as_str() == c)
            });
            taken.push(n.clone());
            n
        })
        .collect();
    // Constructor types mention `I`, whose translation is the new name.
    env.record_translation(ind.clone(), name.clone());
    let spec = translated_spec(env, ind, &name, &ctor_names).and_then(|spec| declare_inductive(env, spec));
    if let Err(e) = spec {
        env.translations.remove(ind);
        return Err(e);
    }
    for (k, r) in decl.constructors.iter().zip(ctor_names) {
        env.record_translation(k.name.clone(), r);
    }
    Ok(name)
}
