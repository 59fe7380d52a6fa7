//! Terms, sorts and contexts, with capture-avoiding substitution and
//! α-equivalence.
//!
//! Variables are named. Binders are renamed on the fly whenever a
//! substitution would otherwise capture a free variable of the replacement,
//! so every operation here is total on arbitrary (even ill-scoped) terms.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

/// An identifier: a local variable or a global name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The anonymous binder `_`.
    pub fn anon() -> Self {
        Name::new("_")
    }

    pub fn is_anon(&self) -> bool {
        &*self.0 == "_"
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(Arc::from(s))
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl std::ops::Deref for Name {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// A universe. `Type` levels start at 1 in the refined calculus; level 0 is
/// only admitted by the kernel when running in CIC mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Prop,
    Set(u32),
    Type(u32),
}

impl Sort {
    pub fn level(self) -> Option<u32> {
        match self {
            Sort::Prop => None,
            Sort::Set(i) | Sort::Type(i) => Some(i),
        }
    }

    pub fn is_type(self) -> bool {
        matches!(self, Sort::Type(_))
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Prop => f.write_str("Prop"),
            Sort::Set(i) => write!(f, "Set@{i}"),
            Sort::Type(i) => write!(f, "Type@{i}"),
        }
    }
}

/// `case_I(scrutinee, params, motive, branches)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub ind: Name,
    pub scrutinee: Term,
    pub params: Vec<Term>,
    pub motive: Term,
    pub branches: Vec<Term>,
}

/// `fix(name : annot). body`, structurally decreasing on argument `rec_arg`
/// (0-based) of the function.
#[derive(Clone, Debug, PartialEq)]
pub struct Fix {
    pub name: Name,
    pub annot: Term,
    pub body: Term,
    pub rec_arg: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Var(Name),
    Sort(Sort),
    Prod(Name, Arc<Term>, Arc<Term>),
    Lam(Name, Arc<Term>, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    Ind(Name),
    Constr(Name),
    /// A global definition or axiom.
    Const(Name),
    Case(Arc<Case>),
    Fix(Arc<Fix>),
}

impl Term {
    pub fn var(x: impl Into<Name>) -> Term {
        Term::Var(x.into())
    }

    pub fn sort(s: Sort) -> Term {
        Term::Sort(s)
    }

    pub fn prop() -> Term {
        Term::Sort(Sort::Prop)
    }

    pub fn prod(x: impl Into<Name>, a: Term, b: Term) -> Term {
        Term::Prod(x.into(), Arc::new(a), Arc::new(b))
    }

    pub fn lam(x: impl Into<Name>, a: Term, b: Term) -> Term {
        Term::Lam(x.into(), Arc::new(a), Arc::new(b))
    }

    /// Non-dependent product `a -> b`.
    pub fn arrow(a: Term, b: Term) -> Term {
        Term::prod(Name::anon(), a, b)
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn ind(x: impl Into<Name>) -> Term {
        Term::Ind(x.into())
    }

    pub fn constr(x: impl Into<Name>) -> Term {
        Term::Constr(x.into())
    }

    pub fn constant(x: impl Into<Name>) -> Term {
        Term::Const(x.into())
    }

    pub fn case(c: Case) -> Term {
        Term::Case(Arc::new(c))
    }

    pub fn fix(f: Fix) -> Term {
        Term::Fix(Arc::new(f))
    }

    /// Splits `f a1 ... an` into `(f, [a1, ..., an])`.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Term::App(f, a) = head {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    pub fn head(&self) -> &Term {
        let mut head = self;
        while let Term::App(f, _) = head {
            head = f;
        }
        head
    }

    pub fn as_sort(&self) -> Option<Sort> {
        match self {
            Term::Sort(s) => Some(*s),
            _ => None,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Pre-order traversal of every subterm, including `self`.
    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a Term)) {
        f(self);
        match self {
            Term::Var(_) | Term::Sort(_) | Term::Ind(_) | Term::Constr(_) | Term::Const(_) => {}
            Term::Prod(_, a, b) | Term::Lam(_, a, b) | Term::App(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::Case(c) => {
                c.scrutinee.visit(f);
                c.params.iter().for_each(|p| p.visit(f));
                c.motive.visit(f);
                c.branches.iter().for_each(|b| b.visit(f));
            }
            Term::Fix(fx) => {
                fx.annot.visit(f);
                fx.body.visit(f);
            }
        }
    }

    /// Names of the global constants, inductives and constructors mentioned.
    pub fn globals(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        self.visit(&mut |t| match t {
            Term::Ind(n) | Term::Constr(n) | Term::Const(n) => {
                out.insert(n.clone());
            }
            _ => {}
        });
        out
    }

    pub fn free_vars(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn has_free(&self, x: &Name) -> bool {
        occurs_free(self, x)
    }

    /// Capture-avoiding `self[replacement/x]`.
    pub fn subst(&self, x: &Name, replacement: &Term) -> Term {
        let mut map = HashMap::new();
        map.insert(x.clone(), replacement.clone());
        self.subst_many(&map)
    }

    /// Capture-avoiding simultaneous substitution.
    pub fn subst_many(&self, map: &HashMap<Name, Term>) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        let mut range_fv = HashSet::new();
        for t in map.values() {
            range_fv.extend(t.free_vars());
        }
        subst_rec(self, map, &range_fv)
    }

    /// Renames free variables; shorthand for [`Term::subst_many`] with
    /// variables on the right.
    pub fn rename(&self, map: &HashMap<Name, Name>) -> Term {
        if map.iter().all(|(k, v)| k == v) {
            return self.clone();
        }
        let map: HashMap<Name, Term> =
            map.iter().filter(|(k, v)| k != v).map(|(k, v)| (k.clone(), Term::Var(v.clone()))).collect();
        self.subst_many(&map)
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha_eq(self, other)
    }
}

fn collect_free(t: &Term, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Sort(_) | Term::Ind(_) | Term::Constr(_) | Term::Const(_) => {}
        Term::Prod(x, a, b) | Term::Lam(x, a, b) => {
            collect_free(a, bound, out);
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
        Term::App(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Term::Case(c) => {
            collect_free(&c.scrutinee, bound, out);
            for p in &c.params {
                collect_free(p, bound, out);
            }
            collect_free(&c.motive, bound, out);
            for b in &c.branches {
                collect_free(b, bound, out);
            }
        }
        Term::Fix(f) => {
            collect_free(&f.annot, bound, out);
            bound.push(f.name.clone());
            collect_free(&f.body, bound, out);
            bound.pop();
        }
    }
}

fn occurs_free(t: &Term, x: &Name) -> bool {
    match t {
        Term::Var(y) => y == x,
        Term::Sort(_) | Term::Ind(_) | Term::Constr(_) | Term::Const(_) => false,
        Term::Prod(y, a, b) | Term::Lam(y, a, b) => occurs_free(a, x) || (y != x && occurs_free(b, x)),
        Term::App(a, b) => occurs_free(a, x) || occurs_free(b, x),
        Term::Case(c) => {
            occurs_free(&c.scrutinee, x)
                || c.params.iter().any(|p| occurs_free(p, x))
                || occurs_free(&c.motive, x)
                || c.branches.iter().any(|b| occurs_free(b, x))
        }
        Term::Fix(f) => occurs_free(&f.annot, x) || (&f.name != x && occurs_free(&f.body, x)),
    }
}

/// Picks `base`, or `base` followed by a counter, avoiding every name for
/// which `taken` holds.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    let base = if base.is_empty() || base == "_" { "x" } else { base };
    if !taken(base) {
        return Name::new(base);
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "x" } else { stem };
    (0..)
        .map(|i| format!("{stem}{i}"))
        .find(|cand| !taken(cand))
        .map(Name::from)
        .expect("unbounded counter")
}

fn subst_binder(
    x: &Name,
    body: &Term,
    map: &HashMap<Name, Term>,
    range_fv: &HashSet<Name>,
) -> (Name, Term) {
    let shadowed = map.contains_key(x);
    let needs_rename = range_fv.contains(x);
    if !shadowed && !needs_rename {
        return (x.clone(), subst_rec(body, map, range_fv));
    }
    let mut inner: HashMap<Name, Term> = map.clone();
    inner.remove(x);
    if inner.is_empty() {
        return (x.clone(), body.clone());
    }
    if !needs_rename {
        return (x.clone(), subst_rec(body, &inner, range_fv));
    }
    // Only rename when the binder actually guards a substituted occurrence.
    if !inner.keys().any(|k| occurs_free(body, k)) {
        return (x.clone(), body.clone());
    }
    let body_fv = body.free_vars();
    let fresh = fresh_name(x.as_str(), |c| {
        range_fv.contains(c) || body_fv.contains(c) || inner.contains_key(c)
    });
    inner.insert(x.clone(), Term::Var(fresh.clone()));
    let mut range = range_fv.clone();
    range.insert(fresh.clone());
    (fresh, subst_rec(body, &inner, &range))
}

fn subst_rec(t: &Term, map: &HashMap<Name, Term>, range_fv: &HashSet<Name>) -> Term {
    match t {
        Term::Var(x) => map.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::Sort(_) | Term::Ind(_) | Term::Constr(_) | Term::Const(_) => t.clone(),
        Term::Prod(x, a, b) => {
            let a = subst_rec(a, map, range_fv);
            let (x, b) = subst_binder(x, b, map, range_fv);
            Term::prod(x, a, b)
        }
        Term::Lam(x, a, b) => {
            let a = subst_rec(a, map, range_fv);
            let (x, b) = subst_binder(x, b, map, range_fv);
            Term::lam(x, a, b)
        }
        Term::App(a, b) => Term::app(subst_rec(a, map, range_fv), subst_rec(b, map, range_fv)),
        Term::Case(c) => Term::case(Case {
            ind: c.ind.clone(),
            scrutinee: subst_rec(&c.scrutinee, map, range_fv),
            params: c.params.iter().map(|p| subst_rec(p, map, range_fv)).collect(),
            motive: subst_rec(&c.motive, map, range_fv),
            branches: c.branches.iter().map(|b| subst_rec(b, map, range_fv)).collect(),
        }),
        Term::Fix(f) => {
            let annot = subst_rec(&f.annot, map, range_fv);
            let (name, body) = subst_binder(&f.name, &f.body, map, range_fv);
            Term::fix(Fix { name, annot, body, rec_arg: f.rec_arg })
        }
    }
}

/// α-equivalence: equality up to the names of bound variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    let mut left = Vec::new();
    let mut right = Vec::new();
    alpha_rec(a, b, &mut left, &mut right)
}

fn lookup(stack: &[Name], x: &Name) -> Option<usize> {
    stack.iter().rposition(|y| y == x)
}

fn alpha_binder(
    x: &Name,
    b1: &Term,
    y: &Name,
    b2: &Term,
    left: &mut Vec<Name>,
    right: &mut Vec<Name>,
) -> bool {
    left.push(x.clone());
    right.push(y.clone());
    let r = alpha_rec(b1, b2, left, right);
    left.pop();
    right.pop();
    r
}

fn alpha_rec(a: &Term, b: &Term, left: &mut Vec<Name>, right: &mut Vec<Name>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => match (lookup(left, x), lookup(right, y)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        },
        (Term::Sort(s), Term::Sort(t)) => s == t,
        (Term::Ind(x), Term::Ind(y)) | (Term::Constr(x), Term::Constr(y)) | (Term::Const(x), Term::Const(y)) => {
            x == y
        }
        (Term::Prod(x, a1, b1), Term::Prod(y, a2, b2)) | (Term::Lam(x, a1, b1), Term::Lam(y, a2, b2)) => {
            alpha_rec(a1, a2, left, right) && alpha_binder(x, b1, y, b2, left, right)
        }
        (Term::App(f1, a1), Term::App(f2, a2)) => {
            alpha_rec(f1, f2, left, right) && alpha_rec(a1, a2, left, right)
        }
        (Term::Case(c1), Term::Case(c2)) => {
            c1.ind == c2.ind
                && c1.params.len() == c2.params.len()
                && c1.branches.len() == c2.branches.len()
                && alpha_rec(&c1.scrutinee, &c2.scrutinee, left, right)
                && c1.params.iter().zip(&c2.params).all(|(p, q)| alpha_rec(p, q, left, right))
                && alpha_rec(&c1.motive, &c2.motive, left, right)
                && c1.branches.iter().zip(&c2.branches).all(|(p, q)| alpha_rec(p, q, left, right))
        }
        (Term::Fix(f1), Term::Fix(f2)) => {
            f1.rec_arg == f2.rec_arg
                && alpha_rec(&f1.annot, &f2.annot, left, right)
                && alpha_binder(&f1.name, &f1.body, &f2.name, &f2.body, left, right)
        }
        _ => false,
    }
}

/// A typing context: an ordered list of distinct names with their types.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Context {
    entries: Vec<(Name, Term)>,
}

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, x: &str) -> bool {
        self.entries.iter().any(|(y, _)| y.as_str() == x)
    }

    pub fn lookup(&self, x: &Name) -> Option<&Term> {
        self.entries.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    /// Appends an entry. Panics if `x` is already bound: callers are expected
    /// to freshen binder names first (see [`Context::fresh`]).
    pub fn push(&mut self, x: Name, ty: Term) {
        assert!(!self.contains(x.as_str()), "context already binds {x}");
        self.entries.push((x, ty));
    }

    pub fn pop(&mut self) -> Option<(Name, Term)> {
        self.entries.pop()
    }

    pub fn truncate(&mut self, len: usize) {
        self.entries.truncate(len);
    }

    pub fn entries(&self) -> &[(Name, Term)] {
        &self.entries
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.entries.iter().map(|(x, _)| x)
    }

    /// A name based on `base` that is not bound here and not in `avoid`.
    pub fn fresh(&self, base: &str, avoid: &HashSet<Name>) -> Name {
        fresh_name(base, |c| self.contains(c) || avoid.contains(c))
    }
}

impl FromIterator<(Name, Term)> for Context {
    fn from_iter<T: IntoIterator<Item = (Name, Term)>>(iter: T) -> Self {
        let mut ctx = Context::new();
        for (x, t) in iter {
            ctx.push(x, t);
        }
        ctx
    }
}
