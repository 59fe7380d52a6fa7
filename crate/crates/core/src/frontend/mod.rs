//! Surface syntax and the vernacular command processor.
//!
//! A [`Session`] owns one global environment and runs `.cicr` sources
//! against it, command by command, recording a PASS/FAIL [`Report`] per
//! command and a [`Diagnostic`] per failure.

pub mod elab;
pub mod lexer;
pub mod parser;
pub mod syntax;

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::embed::{check_embedding, embed_env};
use crate::env::{GlobalEnv, KernelConfig};
use crate::error::Error;
use crate::param::{parametricity, register_witness};
use crate::print::{print_inductive, print_term};
use crate::term::{Context, Name, Term};
use crate::typecheck::{declare_inductive, register_axiom, register_definition, TypeChecker};
use elab::{lambda, pi, ElabError, Elaborator};
use lexer::{line_col, Span};
use syntax::{Command, Located};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    /// Reduction budget per conversion or normalization query.
    pub fuel: u64,
    /// Keep going after a failed command.
    pub continue_on_error: bool,
    /// Admit `Prop ≤ Type` when checking embeddings into CIC.
    pub cic_prop_cumulative: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { fuel: KernelConfig::default().fuel, continue_on_error: false, cic_prop_cumulative: false }
    }
}

/// A rejected command.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{file}:{line}:{column}: {code}: {message}")]
pub struct Diagnostic {
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub code: String,
    pub message: String,
    /// The judgment that failed, pretty-printed, when there is one.
    pub judgment: Option<String>,
}

/// The outcome of one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub file: String,
    pub line: usize,
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}:{}: {}: {}", self.file, self.line, self.label, self.detail)
    }
}

/// Why a command failed, before it is located in a file.
enum Failure {
    At { span: Option<Span>, code: String, message: String, judgment: Option<String> },
    /// Already reported from an imported file.
    Nested(Diagnostic),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::At { span: None, code: e.code().into(), message: e.to_string(), judgment: None }
    }
}

impl From<ElabError> for Failure {
    fn from(e: ElabError) -> Self {
        Failure::At { span: Some(e.span), code: e.code.into(), message: e.message, judgment: None }
    }
}

fn with_judgment(judgment: String) -> impl FnOnce(Error) -> Failure {
    move |e| Failure::At { span: None, code: e.code().into(), message: e.to_string(), judgment: Some(judgment) }
}

pub struct Session {
    env: GlobalEnv,
    options: Options,
    reports: Vec<Report>,
    diagnostics: Vec<Diagnostic>,
    imported: HashSet<PathBuf>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new()
    }
}

impl Session {
    pub fn new() -> Self {
        Session::with_options(Options::default())
    }

    pub fn with_options(options: Options) -> Self {
        let mut env = GlobalEnv::default();
        env.set_fuel(options.fuel);
        Session { env, options, reports: Vec::new(), diagnostics: Vec::new(), imported: HashSet::new() }
    }

    pub fn env(&self) -> &GlobalEnv {
        &self.env
    }

    pub fn env_mut(&mut self) -> &mut GlobalEnv {
        &mut self.env
    }

    pub fn options(&self) -> Options {
        self.options
    }

    pub fn reports(&self) -> &[Report] {
        &self.reports
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    /// Runs a source file. Imports resolve relative to its directory.
    pub fn run_file(&mut self, path: &Path) -> Result<(), Diagnostic> {
        let display = path.display().to_string();
        if let Ok(canon) = path.canonicalize() {
            self.imported.insert(canon);
        }
        let src = std::fs::read_to_string(path).map_err(|e| {
            let d = Diagnostic {
                file: display.clone(),
                line: 1,
                column: 1,
                code: "IoError".into(),
                message: e.to_string(),
                judgment: None,
            };
            self.diagnostics.push(d.clone());
            d
        })?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        self.run_source(&display, &dir, &src)
    }

    /// Runs source text; `file` names it in reports. Imports resolve
    /// relative to the working directory.
    pub fn run_str(&mut self, file: &str, src: &str) -> Result<(), Diagnostic> {
        self.run_source(file, Path::new("."), src)
    }

    fn run_source(&mut self, file: &str, dir: &Path, src: &str) -> Result<(), Diagnostic> {
        let locate = |span: Span, code: String, message: String, judgment: Option<String>| {
            let (line, column) = line_col(src, span.start);
            Diagnostic { file: file.to_string(), line, column, code, message, judgment }
        };
        let commands = match parser::parse(src) {
            Ok(c) => c,
            Err(e) => {
                let d = locate(e.span, "ParseError".into(), e.message, None);
                self.diagnostics.push(d.clone());
                return Err(d);
            }
        };
        let mut first_error = None;
        for Located { span, command } in &commands {
            let (line, _) = line_col(src, span.start);
            let label = command.label();
            let outcome = self.exec(dir, command);
            let diag = match outcome {
                Ok(detail) => {
                    self.reports.push(Report { file: file.to_string(), line, label, passed: true, detail });
                    continue;
                }
                Err(Failure::At { span: at, code, message, judgment }) => {
                    let d = locate(at.unwrap_or(*span), code, message, judgment);
                    self.diagnostics.push(d.clone());
                    d
                }
                Err(Failure::Nested(d)) => d,
            };
            let detail = format!("{}: {}", diag.code, diag.message);
            self.reports.push(Report { file: file.to_string(), line, label, passed: false, detail });
            first_error.get_or_insert(diag);
            if !self.options.continue_on_error {
                break;
            }
        }
        match first_error {
            Some(d) => Err(d),
            None => Ok(()),
        }
    }

    fn exec(&mut self, dir: &Path, command: &Command) -> Result<String, Failure> {
        match command {
            Command::Inductive { name, params, arity, constructors } => {
                let ind = Name::new(&name.1);
                let mut el = Elaborator::with_pending(&self.env, ind.clone());
                let tel = el.telescope(params)?;
                let arity = pi(&tel, el.under(&[], arity)?);
                let mut ctors = Vec::new();
                for k in constructors {
                    // Parameters are already in scope from the telescope.
                    let ty = el.under(&[], &k.ty).map_err(|mut e| {
                        if e.span == Span::default() {
                            e.span = k.span;
                        }
                        e
                    })?;
                    ctors.push((Name::new(&k.name), pi(&tel, ty)));
                }
                let spec = crate::env::InductiveSpec { name: ind.clone(), param_count: tel.len(), arity, constructors: ctors };
                declare_inductive(&mut self.env, spec)?;
                let decl = &self.env.inductive(&ind).expect("just declared");
                Ok(format!("{ind} : {} declared", print_term(&decl.arity, &self.env)))
            }
            Command::Definition { name, binders, ty, body } => {
                let mut el = Elaborator::new(&self.env);
                let tel = el.telescope(binders)?;
                let ty = match ty {
                    Some(t) => Some(pi(&tel, el.under(&[], t)?)),
                    None => None,
                };
                let body = lambda(&tel, el.under(&[], body)?);
                self.define(Name::new(&name.1), ty, body)
            }
            Command::Fixpoint { name, fix } => {
                let fix = Elaborator::new(&self.env).fix(fix)?;
                let ty = fix.annot.clone();
                self.define(Name::new(&name.1), Some(ty), Term::fix(fix))
            }
            Command::Axiom { name, ty } => {
                let ty = Elaborator::new(&self.env).expr(ty)?;
                let n = Name::new(&name.1);
                register_axiom(&mut self.env, n.clone(), ty.clone())?;
                Ok(format!("{n} : {} assumed", print_term(&ty, &self.env)))
            }
            Command::Realize { axiom, witness } => {
                let w = Elaborator::new(&self.env).expr(witness)?;
                let ax = Name::new(&axiom.1);
                register_witness(&mut self.env, &ax, w)?;
                let ty = self.env.witness_type(&ax).expect("just registered");
                Ok(format!("witness for {ax} registered : {}", print_term(ty, &self.env)))
            }
            Command::Parametricity { name } => {
                let n = Name::new(&name.1);
                let judgment = format!("parametricity of {n}");
                let res = parametricity(&mut self.env, &n).map_err(with_judgment(judgment.clone()))?;
                if !res.verified {
                    return Err(Failure::At {
                        span: None,
                        code: "IllTyped".into(),
                        message: "the translation does not have the expected type".into(),
                        judgment: Some(judgment),
                    });
                }
                let r = self.env.translation(&n).cloned().unwrap_or_else(|| n.clone());
                Ok(format!("{r} registered : {}", print_term(&res.expected_type, &self.env)))
            }
            Command::Check { term, ty } => {
                let mut el = Elaborator::new(&self.env);
                let t = el.expr(term)?;
                let expected = ty.as_ref().map(|e| el.expr(e)).transpose()?;
                let tc = TypeChecker::new(&self.env);
                let ctx = Context::new();
                let shown = print_term(&t, &self.env);
                let inferred = match &expected {
                    Some(e) => {
                        let judgment = format!("{shown} : {}", print_term(e, &self.env));
                        tc.infer_sort(&ctx, e).map_err(with_judgment(judgment.clone()))?;
                        tc.expect(&ctx, &t, e).map_err(with_judgment(judgment))?;
                        e.clone()
                    }
                    None => tc.infer(&ctx, &t).map_err(with_judgment(shown.clone()))?,
                };
                Ok(format!("{shown} : {}", print_term(&inferred, &self.env)))
            }
            Command::Eval { term } => {
                let t = Elaborator::new(&self.env).expr(term)?;
                let nf = self.eval_term(&t)?;
                Ok(print_term(&nf, &self.env))
            }
            Command::Embed { name } => {
                let n = Name::new(&name.1);
                if check_embedding(&self.env, &n, self.options.cic_prop_cumulative)? {
                    Ok(format!("{n} embeds into CIC"))
                } else {
                    Err(Failure::At {
                        span: None,
                        code: "EmbeddingFailed".into(),
                        message: format!("the embedding of `{n}` does not typecheck in CIC"),
                        judgment: None,
                    })
                }
            }
            Command::Import { path } => {
                let full = dir.join(path);
                let canon = full.canonicalize().map_err(|e| Failure::At {
                    span: None,
                    code: "IoError".into(),
                    message: format!("cannot import `{path}`: {e}"),
                    judgment: None,
                })?;
                if self.imported.contains(&canon) {
                    return Ok(format!("{path} already imported"));
                }
                self.run_file(&full).map_err(Failure::Nested)?;
                Ok(format!("{path} imported"))
            }
            Command::Fail { code, inner } => {
                let saved = self.env.clone();
                let saved_reports = self.reports.len();
                let saved_diags = self.diagnostics.len();
                let outcome = self.exec(dir, inner);
                self.env = saved;
                self.reports.truncate(saved_reports);
                self.diagnostics.truncate(saved_diags);
                let (got, message) = match outcome {
                    Ok(detail) => {
                        return Err(Failure::At {
                            span: None,
                            code: "UnexpectedSuccess".into(),
                            message: format!("the command succeeded: {detail}"),
                            judgment: None,
                        })
                    }
                    Err(Failure::At { code, message, .. }) => (code, message),
                    Err(Failure::Nested(d)) => (d.code, d.message),
                };
                match code {
                    Some(c) if *c != got => Err(Failure::At {
                        span: None,
                        code: "WrongError".into(),
                        message: format!("expected {c}, got {got}: {message}"),
                        judgment: None,
                    }),
                    _ => Ok(format!("failed as expected with {got}: {message}")),
                }
            }
        }
    }

    fn define(&mut self, name: Name, ty: Option<Term>, body: Term) -> Result<String, Failure> {
        let judgment = match &ty {
            Some(t) => format!("{} : {}", print_term(&body, &self.env), print_term(t, &self.env)),
            None => print_term(&body, &self.env),
        };
        let ty = register_definition(&mut self.env, name.clone(), ty, body).map_err(with_judgment(judgment))?;
        Ok(format!("{name} : {} defined", print_term(&ty, &self.env)))
    }

    fn eval_term(&self, t: &Term) -> Result<Term, Error> {
        let tc = TypeChecker::new(&self.env);
        tc.infer(&Context::new(), t)?;
        tc.normalize(t)
    }

    /// Parses and elaborates a closed term against the environment.
    pub fn parse_term(&self, src: &str) -> Result<Term, Diagnostic> {
        let expr = parser::parse_expr(src).map_err(|e| self.term_diagnostic(src, e.span, "ParseError", e.message))?;
        Elaborator::new(&self.env).expr(&expr).map_err(|e| self.term_diagnostic(src, e.span, e.code, e.message))
    }

    fn term_diagnostic(&self, src: &str, span: Span, code: &str, message: String) -> Diagnostic {
        let (line, column) = line_col(src, span.start);
        Diagnostic { file: "<term>".into(), line, column, code: code.into(), message, judgment: None }
    }

    /// Typechecks and normalizes a closed term, printed back.
    pub fn eval_str(&self, src: &str) -> Result<String, Diagnostic> {
        let t = self.parse_term(src)?;
        let nf = self.eval_term(&t).map_err(|e| self.term_diagnostic(src, Span::default(), e.code(), e.to_string()))?;
        Ok(print_term(&nf, &self.env))
    }

    /// Translates `name` and prints the registered relation's declaration.
    pub fn show_parametricity(&mut self, name: &str) -> Result<String, Error> {
        let n = Name::new(name);
        let res = parametricity(&mut self.env, &n)?;
        if !res.verified {
            return Err(Error::IllTyped(format!("the translation of `{n}` does not have its expected type")));
        }
        let r = self.env.translation(&n).cloned().ok_or_else(|| Error::UnknownGlobal(n.clone()))?;
        Ok(print_declaration(&self.env, &r).unwrap_or_default())
    }

    /// Embeds the environment up to `name` into CIC and prints the
    /// embedded declaration.
    pub fn show_embedding(&self, name: &str) -> Result<String, Error> {
        let n = Name::new(name);
        if !self.env.is_declared(&n) {
            return Err(Error::UnknownGlobal(n));
        }
        let cic = embed_env(&self.env, self.options.cic_prop_cumulative, Some(&n))?;
        Ok(print_declaration(&cic, &n).unwrap_or_default())
    }
}

/// A global's declaration as a vernacular command.
pub fn print_declaration(env: &GlobalEnv, name: &str) -> Option<String> {
    if let Some(d) = env.inductive(name) {
        return Some(print_inductive(d, env));
    }
    if let Some(d) = env.definition(name) {
        return Some(format!(
            "Definition {name} : {} :=\n  {}.",
            print_term(&d.ty, env),
            print_term(&d.body, env)
        ));
    }
    env.axiom(name).map(|t| format!("Axiom {name} : {}.", print_term(t, env)))
}
