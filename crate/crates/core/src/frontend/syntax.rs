//! Surface syntax trees, as parsed and before name resolution.

use super::lexer::Span;
use crate::term::Sort;

/// A binder name; `None` for `_`.
pub type BinderName = (Span, Option<String>);

#[derive(Clone, Debug, PartialEq)]
pub struct BinderGroup {
    pub names: Vec<BinderName>,
    pub ty: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Ident(Span, String),
    Hole(Span),
    Sort(Span, Sort),
    Forall(Span, Vec<BinderGroup>, Box<Expr>),
    Fun(Span, Vec<BinderGroup>, Box<Expr>),
    Arrow(Span, Box<Expr>, Box<Expr>),
    App(Span, Box<Expr>, Vec<Expr>),
    Match(Span, Box<Match>),
    Fix(Span, Box<FixExpr>),
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Ident(s, _)
            | Expr::Hole(s)
            | Expr::Sort(s, _)
            | Expr::Forall(s, ..)
            | Expr::Fun(s, ..)
            | Expr::Arrow(s, ..)
            | Expr::App(s, ..)
            | Expr::Match(s, _)
            | Expr::Fix(s, _) => *s,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Motive {
    /// `return T`, with `as`/`in` binders in scope.
    Return(Expr),
    /// `using T`: the motive as a function.
    Using(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Match {
    pub scrutinee: Expr,
    pub as_name: Option<BinderName>,
    /// `in I args..`: parameters followed by index binder names.
    pub ind: Option<(Span, String)>,
    pub in_args: Vec<Expr>,
    pub motive: Motive,
    pub branches: Vec<Branch>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub span: Span,
    /// `None` for a positional `_` pattern.
    pub ctor: Option<(Span, String)>,
    pub vars: Vec<BinderName>,
    pub rhs: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StructArg {
    Name(Span, String),
    /// 1-based position among all arguments.
    Position(Span, u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixExpr {
    pub name: (Span, String),
    pub binders: Vec<BinderGroup>,
    pub struct_arg: StructArg,
    pub ty: Expr,
    pub body: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constructor {
    pub span: Span,
    pub name: String,
    pub ty: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Inductive { name: (Span, String), params: Vec<BinderGroup>, arity: Expr, constructors: Vec<Constructor> },
    Definition { name: (Span, String), binders: Vec<BinderGroup>, ty: Option<Expr>, body: Expr },
    Fixpoint { name: (Span, String), fix: FixExpr },
    Axiom { name: (Span, String), ty: Expr },
    Realize { axiom: (Span, String), witness: Expr },
    Parametricity { name: (Span, String) },
    Check { term: Expr, ty: Option<Expr> },
    Eval { term: Expr },
    Embed { name: (Span, String) },
    Import { path: String },
    /// Succeeds iff the inner command fails (with the given error code, if
    /// any).
    Fail { code: Option<String>, inner: Box<Command> },
}

impl Command {
    /// A short description for reports.
    pub fn label(&self) -> String {
        match self {
            Command::Inductive { name, .. } => format!("Inductive {}", name.1),
            Command::Definition { name, .. } => format!("Definition {}", name.1),
            Command::Fixpoint { name, .. } => format!("Fixpoint {}", name.1),
            Command::Axiom { name, .. } => format!("Axiom {}", name.1),
            Command::Realize { axiom, .. } => format!("Realize {}", axiom.1),
            Command::Parametricity { name } => format!("Parametricity {}", name.1),
            Command::Check { .. } => "Check".into(),
            Command::Eval { .. } => "Eval".into(),
            Command::Embed { name } => format!("Embed {}", name.1),
            Command::Import { path } => format!("Import \"{path}\""),
            Command::Fail { code, inner } => match code {
                Some(c) => format!("Fail {c} {}", inner.label()),
                None => format!("Fail {}", inner.label()),
            },
        }
    }
}

/// A command with the span of its first token.
#[derive(Clone, Debug, PartialEq)]
pub struct Located {
    pub span: Span,
    pub command: Command,
}
