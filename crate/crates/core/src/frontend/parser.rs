//! Recursive-descent parser for terms and vernacular commands.

use super::lexer::{lex, Span, Tok};
use super::syntax::*;
use crate::term::Sort;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

type PResult<T> = Result<T, ParseError>;

const KEYWORDS: &[&str] = &[
    "forall", "fun", "match", "as", "in", "return", "using", "with", "end", "fix", "struct", "Prop", "Set", "Type",
];

const COMMANDS: &[&str] = &[
    "Inductive",
    "Definition",
    "Fixpoint",
    "Axiom",
    "Realize",
    "Parametricity",
    "Check",
    "Eval",
    "Embed",
    "Import",
    "Fail",
];

pub struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str) -> PResult<Self> {
        let toks = lex(src).map_err(|e| ParseError { span: e.span, message: e.message })?;
        Ok(Parser { toks, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError { span: self.span(), message: message.into() })
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            self.error(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.is_kw(kw) {
            Ok(self.bump().1)
        } else {
            self.error(format!("expected `{kw}`, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> PResult<(Span, String)> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Ok((self.bump().1, s)),
            t => self.error(format!("expected an identifier, found {t}")),
        }
    }

    fn binder_name(&mut self) -> PResult<BinderName> {
        if *self.peek() == Tok::Underscore {
            return Ok((self.bump().1, None));
        }
        let (s, n) = self.ident()?;
        Ok((s, Some(n)))
    }

    fn at_binder_name(&self) -> bool {
        matches!(self.peek(), Tok::Underscore)
            || matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    // ---- terms ----

    pub fn expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        if self.is_kw("forall") {
            self.bump();
            let groups = self.binders(&Tok::Comma)?;
            self.expect(Tok::Comma)?;
            let body = self.expr()?;
            return Ok(Expr::Forall(start.to(body.span()), groups, Box::new(body)));
        }
        if self.is_kw("fun") {
            self.bump();
            let groups = self.binders(&Tok::FatArrow)?;
            self.expect(Tok::FatArrow)?;
            let body = self.expr()?;
            return Ok(Expr::Fun(start.to(body.span()), groups, Box::new(body)));
        }
        if self.is_kw("fix") {
            self.bump();
            let fix = self.fix_tail()?;
            let span = start.to(fix.body.span());
            return Ok(Expr::Fix(span, Box::new(fix)));
        }
        let lhs = self.app()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.expr()?;
            return Ok(Expr::Arrow(start.to(rhs.span()), Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    /// `(x y : A) (z : B)` or `x y : A` up to `stop`.
    fn binders(&mut self, stop: &Tok) -> PResult<Vec<BinderGroup>> {
        if *self.peek() != Tok::LParen {
            let mut names = Vec::new();
            while self.at_binder_name() {
                names.push(self.binder_name()?);
            }
            if names.is_empty() {
                return self.error("expected a binder");
            }
            self.expect(Tok::Colon)?;
            let ty = self.expr()?;
            if self.peek() != stop {
                return self.error(format!("expected {stop}, found {}", self.peek()));
            }
            return Ok(vec![BinderGroup { names, ty }]);
        }
        let groups = self.paren_binders()?;
        if groups.is_empty() {
            return self.error("expected a binder");
        }
        Ok(groups)
    }

    fn paren_binders(&mut self) -> PResult<Vec<BinderGroup>> {
        let mut groups = Vec::new();
        while *self.peek() == Tok::LParen {
            self.bump();
            let mut names = Vec::new();
            while self.at_binder_name() {
                names.push(self.binder_name()?);
            }
            if names.is_empty() {
                return self.error("expected a binder name");
            }
            self.expect(Tok::Colon)?;
            let ty = self.expr()?;
            self.expect(Tok::RParen)?;
            groups.push(BinderGroup { names, ty });
        }
        Ok(groups)
    }

    fn app(&mut self) -> PResult<Expr> {
        let head = self.atom()?;
        let mut args = Vec::new();
        while self.at_atom() {
            args.push(self.atom()?);
        }
        if args.is_empty() {
            return Ok(head);
        }
        let span = head.span().to(args.last().map(Expr::span).unwrap_or(head.span()));
        Ok(Expr::App(span, Box::new(head), args))
    }

    fn at_atom(&self) -> bool {
        match self.peek() {
            Tok::LParen | Tok::Underscore => true,
            Tok::Ident(s) => {
                matches!(s.as_str(), "match" | "Prop" | "Set" | "Type") || !KEYWORDS.contains(&s.as_str())
            }
            _ => false,
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Underscore => Ok(Expr::Hole(self.bump().1)),
            Tok::Ident(s) => match s.as_str() {
                "Prop" => Ok(Expr::Sort(self.bump().1, Sort::Prop)),
                "Set" => {
                    self.bump();
                    if *self.peek() == Tok::At {
                        self.bump();
                        let n = self.level()?;
                        Ok(Expr::Sort(start.to(self.prev_span()), Sort::Set(n)))
                    } else {
                        Ok(Expr::Sort(start, Sort::Set(0)))
                    }
                }
                "Type" => {
                    self.bump();
                    if *self.peek() != Tok::At {
                        return Err(ParseError {
                            span: start,
                            message: "`Type` needs an explicit level, as in `Type@1`".into(),
                        });
                    }
                    self.bump();
                    let n = self.level()?;
                    Ok(Expr::Sort(start.to(self.prev_span()), Sort::Type(n)))
                }
                "match" => self.match_expr(),
                _ => {
                    let (span, name) = self.ident()?;
                    Ok(Expr::Ident(span, name))
                }
            },
            t => self.error(format!("expected a term, found {t}")),
        }
    }

    fn level(&mut self) -> PResult<u32> {
        match self.peek() {
            Tok::Num(n) => {
                let n = *n;
                self.bump();
                Ok(n)
            }
            t => self.error(format!("expected a universe level, found {t}")),
        }
    }

    fn match_expr(&mut self) -> PResult<Expr> {
        let start = self.expect_kw("match")?;
        let scrutinee = self.expr()?;
        let as_name = if self.is_kw("as") {
            self.bump();
            Some(self.binder_name()?)
        } else {
            None
        };
        let (ind, in_args) = if self.is_kw("in") {
            self.bump();
            let ind = self.ident()?;
            let mut args = Vec::new();
            while self.at_atom() {
                args.push(self.atom()?);
            }
            (Some(ind), args)
        } else {
            (None, Vec::new())
        };
        let motive = if self.is_kw("return") {
            self.bump();
            Motive::Return(self.expr()?)
        } else if self.is_kw("using") {
            self.bump();
            Motive::Using(self.expr()?)
        } else {
            return self.error("expected `return` or `using`: the motive of a match is mandatory");
        };
        self.expect_kw("with")?;
        let mut branches = Vec::new();
        if *self.peek() == Tok::Bar {
            self.bump();
        }
        if !self.is_kw("end") {
            loop {
                branches.push(self.branch()?);
                if *self.peek() == Tok::Bar {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        let end = self.expect_kw("end")?;
        let m = Match { scrutinee, as_name, ind, in_args, motive, branches };
        Ok(Expr::Match(start.to(end), Box::new(m)))
    }

    fn branch(&mut self) -> PResult<Branch> {
        let start = self.span();
        let ctor = if *self.peek() == Tok::Underscore {
            self.bump();
            None
        } else {
            Some(self.ident()?)
        };
        let mut vars = Vec::new();
        while *self.peek() != Tok::FatArrow {
            vars.push(self.binder_name()?);
        }
        self.expect(Tok::FatArrow)?;
        let rhs = self.expr()?;
        Ok(Branch { span: start.to(rhs.span()), ctor, vars, rhs })
    }

    /// After `fix` / `Fixpoint`: `f (x : A).. {struct x} : B := body`.
    fn fix_tail(&mut self) -> PResult<FixExpr> {
        let name = self.ident()?;
        let binders = self.paren_binders()?;
        self.expect(Tok::LBrace)?;
        self.expect_kw("struct")?;
        let struct_arg = match self.peek().clone() {
            Tok::Num(n) => StructArg::Position(self.bump().1, n),
            _ => {
                let (s, n) = self.ident()?;
                StructArg::Name(s, n)
            }
        };
        self.expect(Tok::RBrace)?;
        self.expect(Tok::Colon)?;
        let ty = self.expr()?;
        self.expect(Tok::ColonEq)?;
        let body = self.expr()?;
        Ok(FixExpr { name, binders, struct_arg, ty, body })
    }

    // ---- commands ----

    pub fn command(&mut self) -> PResult<Located> {
        let span = self.span();
        let kw = match self.peek() {
            Tok::Ident(s) if COMMANDS.contains(&s.as_str()) => s.clone(),
            t => return self.error(format!("expected a command, found {t}")),
        };
        self.bump();
        let command = match kw.as_str() {
            "Fail" => {
                let code = match self.peek_at(0) {
                    Tok::Ident(s) if !COMMANDS.contains(&s.as_str()) => {
                        let s = s.clone();
                        self.bump();
                        Some(s)
                    }
                    _ => None,
                };
                let inner = self.command()?;
                return Ok(Located { span, command: Command::Fail { code, inner: Box::new(inner.command) } });
            }
            "Inductive" => self.inductive()?,
            "Definition" => {
                let name = self.ident()?;
                let binders = self.paren_binders()?;
                let ty = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect(Tok::ColonEq)?;
                let body = self.expr()?;
                Command::Definition { name, binders, ty, body }
            }
            "Fixpoint" => {
                let fix = self.fix_tail()?;
                Command::Fixpoint { name: fix.name.clone(), fix }
            }
            "Axiom" => {
                let name = self.ident()?;
                self.expect(Tok::Colon)?;
                Command::Axiom { name, ty: self.expr()? }
            }
            "Realize" => {
                let axiom = self.ident()?;
                if *self.peek() == Tok::ColonEq {
                    self.bump();
                }
                Command::Realize { axiom, witness: self.expr()? }
            }
            "Parametricity" => Command::Parametricity { name: self.ident()? },
            "Check" => {
                let term = self.expr()?;
                let ty = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.expr()?)
                } else {
                    None
                };
                Command::Check { term, ty }
            }
            "Eval" => Command::Eval { term: self.expr()? },
            "Embed" => Command::Embed { name: self.ident()? },
            "Import" => match self.peek().clone() {
                Tok::Str(path) => {
                    self.bump();
                    Command::Import { path }
                }
                t => return self.error(format!("expected a quoted file name, found {t}")),
            },
            _ => unreachable!("listed in COMMANDS"),
        };
        self.expect(Tok::Dot)?;
        Ok(Located { span, command })
    }

    fn inductive(&mut self) -> PResult<Command> {
        let name = self.ident()?;
        let params = self.paren_binders()?;
        self.expect(Tok::Colon)?;
        let arity = self.expr()?;
        self.expect(Tok::ColonEq)?;
        let mut constructors = Vec::new();
        if *self.peek() == Tok::Bar {
            self.bump();
        }
        if *self.peek() != Tok::Dot {
            loop {
                let (span, c) = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.expr()?;
                constructors.push(Constructor { span, name: c, ty });
                if *self.peek() == Tok::Bar {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        Ok(Command::Inductive { name, params, arity, constructors })
    }
}

/// Parses a whole file.
pub fn parse(src: &str) -> PResult<Vec<Located>> {
    let mut p = Parser::new(src)?;
    let mut out = Vec::new();
    while !p.at_eof() {
        out.push(p.command()?);
    }
    Ok(out)
}

/// Parses a single term, requiring the input to end after it.
pub fn parse_expr(src: &str) -> PResult<Expr> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if !p.at_eof() {
        return p.error(format!("unexpected {} after the term", p.peek()));
    }
    Ok(e)
}
