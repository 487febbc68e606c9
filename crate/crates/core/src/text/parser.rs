use crate::model::*;
use crate::span::SourceSpan;

use super::diagnostic::Diagnostic;
use super::lexer::{tokenize, Lexeme, Tok};

pub(crate) const KEYWORDS: &[&str] = &[
    "model",
    "machine",
    "stages",
    "thing",
    "var",
    "flow",
    "trigger",
    "when",
    "event",
    "over",
    "chronology",
    "par",
    "then",
    "loop",
    "action",
    "token",
    "create",
    "process",
    "release",
    "transfer",
    "receive",
];

pub(crate) fn is_reserved(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

type PResult<T> = Result<T, Diagnostic>;

pub(crate) fn parse_decl(src: &str) -> PResult<ModelDecl> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let decl = p.model()?;
    p.expect(Tok::Eof)?;
    Ok(decl)
}

struct Parser {
    toks: Vec<Lexeme>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn advance(&mut self) -> Lexeme {
        let l = self.toks[self.pos].clone();
        if l.tok != Tok::Eof {
            self.pos += 1;
        }
        l
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        Diagnostic::error(
            "SyntaxError",
            format!("expected {expected}, found {}", self.peek().describe()),
            self.span(),
        )
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if *self.peek() == tok {
            Ok(self.advance().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<SourceSpan> {
        if self.at_keyword(kw) {
            Ok(self.advance().span)
        } else {
            Err(self.unexpected(&format!("'{kw}'")))
        }
    }

    fn ident(&mut self) -> PResult<(String, SourceSpan)> {
        match self.peek() {
            Tok::Word(w) if !is_reserved(w) => {
                let l = self.advance();
                let Tok::Word(w) = l.tok else { unreachable!() };
                Ok((w, l.span))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.eat(&Tok::Minus);
        match *self.peek() {
            Tok::Int(v) => {
                self.advance();
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.unexpected("integer")),
        }
    }

    fn model(&mut self) -> PResult<ModelDecl> {
        let span = self.keyword("model")?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut decl = ModelDecl {
            name,
            span,
            ..Default::default()
        };
        while !self.eat(&Tok::RBrace) {
            self.item(&mut decl)?;
        }
        Ok(decl)
    }

    fn item(&mut self, decl: &mut ModelDecl) -> PResult<()> {
        let Tok::Word(w) = self.peek().clone() else {
            return Err(self.unexpected("a declaration or '}'"));
        };
        match w.as_str() {
            "thing" => {
                self.advance();
                let (name, span) = self.ident()?;
                self.expect(Tok::Semi)?;
                decl.things.push(ThingDecl { name, span });
            }
            "var" => {
                self.advance();
                let (name, span) = self.ident()?;
                let initial = if self.eat(&Tok::Assign) {
                    Some(self.int()?)
                } else {
                    None
                };
                self.expect(Tok::Semi)?;
                decl.vars.push(VarDecl {
                    name,
                    initial,
                    span,
                });
            }
            "machine" => {
                let m = self.machine()?;
                decl.machines.push(m);
            }
            "flow" => {
                self.advance();
                let (thing, thing_span) = self.ident()?;
                self.expect(Tok::Colon)?;
                let mut prev = self.path()?;
                self.expect(Tok::Arrow)?;
                loop {
                    let next = self.path()?;
                    decl.flows.push(FlowDecl {
                        thing: thing.clone(),
                        thing_span,
                        from: prev,
                        to: next.clone(),
                    });
                    prev = next;
                    if !self.eat(&Tok::Arrow) {
                        break;
                    }
                }
                self.expect(Tok::Semi)?;
            }
            "trigger" => {
                self.advance();
                let from = self.path()?;
                self.expect(Tok::Arrow)?;
                let to = self.path()?;
                let guard = if self.at_keyword("when") {
                    self.advance();
                    Some(self.guard()?)
                } else {
                    None
                };
                self.expect(Tok::Semi)?;
                decl.triggers.push(TriggerDecl { from, to, guard });
            }
            "action" => {
                self.advance();
                let stage = self.path()?;
                self.expect(Tok::LBrace)?;
                let mut effects = Vec::new();
                while !self.eat(&Tok::RBrace) {
                    effects.push(self.assignment()?);
                }
                decl.actions.push(ActionDecl { stage, effects });
            }
            "event" => {
                self.advance();
                let (name, span) = self.ident()?;
                let description = match self.peek().clone() {
                    Tok::Str(s) => {
                        self.advance();
                        s
                    }
                    _ => return Err(self.unexpected("event description string")),
                };
                self.keyword("over")?;
                self.expect(Tok::LBrace)?;
                let mut region = Vec::new();
                if !self.eat(&Tok::RBrace) {
                    loop {
                        let a = self.path()?;
                        if self.eat(&Tok::Arrow) {
                            region.push(RegionDecl::Arc(a, self.path()?));
                        } else {
                            region.push(RegionDecl::Stage(a));
                        }
                        if self.eat(&Tok::RBrace) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                self.expect(Tok::Semi)?;
                decl.events.push(EventDecl {
                    name,
                    description,
                    span,
                    region,
                });
            }
            "chronology" => {
                self.advance();
                self.expect(Tok::LBrace)?;
                while !self.eat(&Tok::RBrace) {
                    self.chrono_stmt(&mut decl.chronology)?;
                }
            }
            _ => return Err(self.unexpected("a declaration or '}'")),
        }
        Ok(())
    }

    fn machine(&mut self) -> PResult<MachineDecl> {
        self.keyword("machine")?;
        let (name, span) = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut m = MachineDecl {
            name,
            span,
            ..Default::default()
        };
        if self.at_keyword("stages") {
            self.advance();
            loop {
                let span = self.span();
                let kind = match self.peek() {
                    Tok::Word(w) => w.parse::<StageKind>().ok(),
                    _ => None,
                }
                .ok_or_else(|| self.unexpected("stage kind"))?;
                self.advance();
                m.stages.push((kind, span));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::Semi)?;
        }
        while !self.eat(&Tok::RBrace) {
            if !self.at_keyword("machine") {
                return Err(self.unexpected("'machine' or '}'"));
            }
            m.submachines.push(self.machine()?);
        }
        Ok(m)
    }

    /// `Machine(.Sub)*.kind`
    fn path(&mut self) -> PResult<PathRef> {
        let (first, start) = self.ident()?;
        let mut path = first;
        loop {
            self.expect(Tok::Dot)?;
            let span = self.span();
            match self.peek().clone() {
                Tok::Word(w) if w.parse::<StageKind>().is_ok() => {
                    self.advance();
                    path.push('.');
                    path.push_str(&w);
                    let length = if span.line == start.line {
                        span.column + span.length - start.column
                    } else {
                        start.length
                    };
                    return Ok(PathRef {
                        path,
                        span: SourceSpan::new(start.line, start.column, length),
                    });
                }
                Tok::Word(w) if !is_reserved(&w) => {
                    self.advance();
                    path.push('.');
                    path.push_str(&w);
                }
                _ => return Err(self.unexpected("machine name or stage kind")),
            }
        }
    }

    fn guard(&mut self) -> PResult<Guard> {
        let (var, _) = self.ident()?;
        let op = match self.peek() {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::EqEq => CmpOp::Eq,
            Tok::Ge => CmpOp::Ge,
            Tok::Gt => CmpOp::Gt,
            _ => return Err(self.unexpected("comparison operator")),
        };
        self.advance();
        let rhs = match self.peek() {
            Tok::Word(_) => GuardOperand::Var(self.ident()?.0),
            _ => GuardOperand::Int(self.int()?),
        };
        Ok(Guard { var, op, rhs })
    }

    fn operand(&mut self) -> PResult<Operand> {
        if self.at_keyword("token") {
            self.advance();
            self.expect(Tok::Dot)?;
            return Ok(Operand::Field(self.ident()?.0));
        }
        match self.peek() {
            Tok::Word(_) => Ok(Operand::Var(self.ident()?.0)),
            _ => Ok(Operand::Int(self.int()?)),
        }
    }

    fn assignment(&mut self) -> PResult<Assignment> {
        let target = match self.operand()? {
            Operand::Var(v) => Target::Var(v),
            Operand::Field(f) => Target::Field(f),
            Operand::Int(_) => return Err(self.unexpected("assignment target")),
        };
        self.expect(Tok::Assign)?;
        let a = self.operand()?;
        let value = if self.eat(&Tok::Plus) {
            Expr::Add(a, self.operand()?)
        } else if self.eat(&Tok::Minus) {
            Expr::Sub(a, self.operand()?)
        } else {
            Expr::Value(a)
        };
        self.expect(Tok::Semi)?;
        Ok(Assignment { target, value })
    }

    fn chrono_stmt(&mut self, chrono: &mut ChronologyDecl) -> PResult<()> {
        if self.at_keyword("par") {
            let span = self.advance().span;
            self.expect(Tok::LBrace)?;
            let mut members = vec![self.ident()?.0];
            while self.eat(&Tok::Comma) {
                members.push(self.ident()?.0);
            }
            self.expect(Tok::RBrace)?;
            let then_loop = if self.at_keyword("then") {
                self.advance();
                self.keyword("loop")?;
                true
            } else {
                false
            };
            self.expect(Tok::Semi)?;
            chrono.groups.push(GroupDecl {
                members,
                then_loop,
                span,
            });
            return Ok(());
        }
        let (mut prev, mut span) = self.ident()?;
        self.expect(Tok::Arrow)?;
        loop {
            let (next, next_span) = self.ident()?;
            chrono.edges.push(EdgeDecl {
                before: prev,
                after: next.clone(),
                span,
            });
            prev = next;
            span = next_span;
            if !self.eat(&Tok::Arrow) {
                break;
            }
        }
        self.expect(Tok::Semi)?;
        Ok(())
    }
}
