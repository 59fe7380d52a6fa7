//! Deterministic fresh names for the parametricity translation.

use crate::term::{fresh_name, Name};

/// Hands out the three output names `x`, `x'` and `x_R` for a source
/// variable `x`, never reusing a name that is currently in scope.
///
/// Scoping is stack-like: [`NameSupply::mark`] and [`NameSupply::release`]
/// bracket the names introduced under a binder, so sibling subterms may
/// reuse the same readable names.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    in_scope: Vec<Name>,
}

impl NameSupply {
    pub fn new() -> Self {
        NameSupply::default()
    }

    /// A supply that will never produce any of `names`.
    pub fn avoiding<'a>(names: impl IntoIterator<Item = &'a Name>) -> Self {
        NameSupply { in_scope: names.into_iter().cloned().collect() }
    }

    pub fn is_taken(&self, x: &str) -> bool {
        self.in_scope.iter().any(|y| y.as_str() == x)
    }

    /// Reserves a name without renaming it.
    pub fn reserve(&mut self, x: Name) {
        self.in_scope.push(x);
    }

    /// A fresh name derived from `base`, now reserved.
    pub fn fresh(&mut self, base: &str) -> Name {
        let n = fresh_name(base, |c| self.is_taken(c));
        self.in_scope.push(n.clone());
        n
    }

    /// The primed name `x'` (or a fresh variant).
    pub fn primed(&mut self, x: &Name) -> Name {
        self.fresh(&format!("{}'", base_of(x)))
    }

    /// The relation name `x_R` (or a fresh variant).
    pub fn relation(&mut self, x: &Name) -> Name {
        self.fresh(&format!("{}_R", base_of(x)))
    }

    /// `(x, x', x_R)`, each fresh.
    pub fn triple(&mut self, x: &Name) -> (Name, Name, Name) {
        let base = base_of(x);
        let orig = self.fresh(base);
        let primed = self.primed(&Name::new(base));
        let rel = self.relation(&Name::new(base));
        (orig, primed, rel)
    }

    pub fn mark(&self) -> usize {
        self.in_scope.len()
    }

    pub fn release(&mut self, mark: usize) {
        self.in_scope.truncate(mark);
    }
}

fn base_of(x: &Name) -> &str {
    if x.is_anon() {
        "x"
    } else {
        x.as_str()
    }
}
