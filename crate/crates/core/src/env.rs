//! The global environment: inductive blocks, definitions, axioms and
//! parametricity witnesses, in declaration order.

use std::collections::HashMap;
use std::sync::Arc;

use crate::term::{Name, Sort, Term};

/// Default reduction budget per conversion query.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Which sort discipline the kernel enforces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `Prop`, `Set@i`, `Type@(i+1)`.
    Refined,
    /// Plain CIC: `Prop` and `Type@i` from level 0; `Set` is rejected.
    Cic { prop_cumulative: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelConfig {
    pub mode: Mode,
    pub fuel: u64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { mode: Mode::Refined, fuel: DEFAULT_FUEL }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constructor {
    pub name: Name,
    pub ty: Term,
    /// Number of non-parameter arguments.
    pub arg_count: usize,
}

/// A checked inductive block `Ind^p(I : A, c_1 : C_1, ..., c_k : C_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InductiveDecl {
    pub name: Name,
    pub param_count: usize,
    pub index_count: usize,
    pub arity: Term,
    pub constructors: Vec<Constructor>,
    /// The conclusion sort of the arity: `Prop` or `Set@i`.
    pub sort: Sort,
    /// Every non-parameter constructor argument lives in `Prop` or `Set`.
    pub is_small: bool,
    /// Zero constructors, or one whose non-parameter arguments are all
    /// proofs. Such `Prop` inductives may be eliminated into any sort.
    pub subsingleton: bool,
}

impl InductiveDecl {
    pub fn constructor_index(&self, c: &Name) -> Option<usize> {
        self.constructors.iter().position(|k| &k.name == c)
    }
}

/// An unchecked inductive declaration as written by the user. The arity and
/// the constructor types quantify over the parameters explicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct InductiveSpec {
    pub name: Name,
    pub param_count: usize,
    pub arity: Term,
    pub constructors: Vec<(Name, Term)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Definition {
    pub name: Name,
    pub ty: Term,
    pub body: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Inductive,
    Definition,
    Axiom,
    Witness,
}

#[derive(Clone, Debug)]
pub struct GlobalEnv {
    config: KernelConfig,
    pub(crate) inductives: HashMap<Name, Arc<InductiveDecl>>,
    pub(crate) constructors: HashMap<Name, (Name, usize)>,
    pub(crate) definitions: HashMap<Name, Arc<Definition>>,
    pub(crate) axioms: HashMap<Name, Term>,
    /// Axiom -> (witness, the type it was checked against).
    pub(crate) witnesses: HashMap<Name, (Term, Term)>,
    pub(crate) order: Vec<(DeclKind, Name)>,
    /// Source global -> name of its registered translation.
    pub(crate) translations: HashMap<Name, Name>,
    /// Synthesized helper definitions, keyed by what they were built for.
    pub(crate) helpers: HashMap<String, Name>,
}

impl Default for GlobalEnv {
    fn default() -> Self {
        GlobalEnv::new(KernelConfig::default())
    }
}

impl GlobalEnv {
    pub fn new(config: KernelConfig) -> Self {
        GlobalEnv {
            config,
            inductives: HashMap::new(),
            constructors: HashMap::new(),
            definitions: HashMap::new(),
            axioms: HashMap::new(),
            witnesses: HashMap::new(),
            order: Vec::new(),
            translations: HashMap::new(),
            helpers: HashMap::new(),
        }
    }

    pub fn config(&self) -> KernelConfig {
        self.config
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    pub fn set_fuel(&mut self, fuel: u64) {
        self.config.fuel = fuel;
    }

    pub fn is_declared(&self, x: &str) -> bool {
        self.inductives.contains_key(x)
            || self.constructors.contains_key(x)
            || self.definitions.contains_key(x)
            || self.axioms.contains_key(x)
    }

    pub fn inductive(&self, x: &str) -> Option<&Arc<InductiveDecl>> {
        self.inductives.get(x)
    }

    /// The inductive owning constructor `c`, with `c`'s position in it.
    pub fn constructor(&self, c: &str) -> Option<(&Arc<InductiveDecl>, usize)> {
        let (ind, j) = self.constructors.get(c)?;
        Some((self.inductives.get(ind)?, *j))
    }

    pub fn definition(&self, x: &str) -> Option<&Arc<Definition>> {
        self.definitions.get(x)
    }

    pub fn axiom(&self, x: &str) -> Option<&Term> {
        self.axioms.get(x)
    }

    pub fn witness(&self, axiom: &str) -> Option<&Term> {
        self.witnesses.get(axiom).map(|(w, _)| w)
    }

    /// The type a registered witness was checked against.
    pub fn witness_type(&self, axiom: &str) -> Option<&Term> {
        self.witnesses.get(axiom).map(|(_, t)| t)
    }

    /// The registered translation of a global, if any.
    pub fn translation(&self, x: &str) -> Option<&Name> {
        self.translations.get(x)
    }

    /// The type of a global constant, inductive or constructor.
    pub fn global_type(&self, t: &Term) -> Option<Term> {
        match t {
            Term::Ind(i) => self.inductives.get(i).map(|d| d.arity.clone()),
            Term::Constr(c) => {
                let (d, j) = self.constructor(c)?;
                Some(d.constructors[j].ty.clone())
            }
            Term::Const(c) => self
                .definitions
                .get(c)
                .map(|d| d.ty.clone())
                .or_else(|| self.axioms.get(c).cloned()),
            _ => None,
        }
    }

    /// Declarations in the order they were registered.
    pub fn declarations(&self) -> &[(DeclKind, Name)] {
        &self.order
    }

    /// A name derived from `base` that no global uses yet.
    pub fn fresh_global(&self, base: &str) -> Name {
        crate::term::fresh_name(base, |c| self.is_declared(c))
    }

    pub(crate) fn insert_inductive(&mut self, decl: InductiveDecl) {
        for (j, c) in decl.constructors.iter().enumerate() {
            self.constructors.insert(c.name.clone(), (decl.name.clone(), j));
        }
        self.order.push((DeclKind::Inductive, decl.name.clone()));
        self.inductives.insert(decl.name.clone(), Arc::new(decl));
    }

    pub(crate) fn insert_definition(&mut self, def: Definition) {
        self.order.push((DeclKind::Definition, def.name.clone()));
        self.definitions.insert(def.name.clone(), Arc::new(def));
    }

    pub(crate) fn insert_axiom(&mut self, name: Name, ty: Term) {
        self.order.push((DeclKind::Axiom, name.clone()));
        self.axioms.insert(name, ty);
    }

    pub(crate) fn insert_witness(&mut self, axiom: Name, witness: Term, ty: Term) {
        self.order.push((DeclKind::Witness, axiom.clone()));
        self.witnesses.insert(axiom, (witness, ty));
    }

    pub(crate) fn record_translation(&mut self, source: Name, target: Name) {
        self.translations.insert(source, target);
    }
}

/// Walks the leading products of `ty` syntactically: the first `args.len()`
/// binders are instantiated with `args`, the next `names.len()` are renamed
/// to `names`. Returns the domains of the renamed binders and what remains.
/// `None` if `ty` has too few syntactic products.
pub fn instantiate_telescope(ty: &Term, args: &[Term], names: &[Name]) -> Option<(Vec<Term>, Term)> {
    let mut cur = ty.clone();
    for a in args {
        let Term::Prod(x, _, b) = cur else { return None };
        cur = b.subst(&x, a);
    }
    let mut domains = Vec::new();
    for z in names {
        let Term::Prod(x, d, b) = cur else { return None };
        domains.push((*d).clone());
        cur = if &x == z || x.is_anon() { (*b).clone() } else { b.subst(&x, &Term::Var(z.clone())) };
    }
    Some((domains, cur))
}
