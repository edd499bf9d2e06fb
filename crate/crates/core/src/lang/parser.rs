//! Recursive-descent parser for `.gap` sources.
//!
//! ```text
//! program := "types" ID ID decl* ["init" expr] item*
//! decl    := ("bool"|"xvar"|"yvar"|"array") ID+ [":" typeref]
//!          | "enum" ID+ ":" "{" (INT ".." INT | ID ("," ID)*) "}"
//! item    := "label" ID | "trans" expr "->" branch ("|~|" branch)*
//! branch  := "if" expr "then" branch ["else" branch]
//!          | assigns (":" expr "->" assigns)*
//! assigns := "skip" | assign ("," assign)*
//! assign  := "goto" ID | ID "[" ID "]" ":=" ID
//!          | ID ":=" ("?" | ID "[" ID "]" | expr)
//! ```

use std::collections::{HashMap, HashSet};

use super::lexer::{tokenize, Pos, Tok, Token};
use super::surface::*;
use super::ParseError;

const KEYWORDS: &[&str] = &[
    "types", "bool", "xvar", "yvar", "array", "enum", "init", "trans", "label", "goto", "if",
    "then", "else", "true", "false", "skip",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.to_string()))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::new(self.pos(), format!("expected {wanted}, found {}", self.peek()))
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                let pos = self.pos();
                self.bump();
                Ok((s, pos))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn at_ident(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if !is_keyword(s))
    }

    fn program(&mut self) -> PResult<SurfaceProgram> {
        self.expect_kw("types")?;
        let (x, _) = self.ident()?;
        let (y, _) = self.ident()?;
        if x == y {
            return Err(ParseError::new(self.pos(), "the two type symbols must differ"));
        }
        let mut decls = Vec::new();
        loop {
            let pos = self.pos();
            let kind = if self.eat_kw("bool") {
                DeclKind::Bool
            } else if self.eat_kw("xvar") {
                DeclKind::XVar
            } else if self.eat_kw("yvar") {
                DeclKind::YVar
            } else if self.eat_kw("array") {
                DeclKind::Array
            } else if self.eat_kw("enum") {
                DeclKind::Enum(Vec::new())
            } else {
                break;
            };
            let mut names = vec![self.ident()?.0];
            while self.at_ident() {
                names.push(self.ident()?.0);
            }
            let kind = self.typeref(kind, &x, &y)?;
            decls.push(Decl { kind, names, pos });
        }
        let init = if self.eat_kw("init") {
            Some(self.expr()?)
        } else {
            None
        };
        let mut items = Vec::new();
        loop {
            let pos = self.pos();
            if self.eat_kw("label") {
                let (name, _) = self.ident()?;
                items.push(Item::Label { name, pos });
            } else if self.eat_kw("trans") {
                let guard = self.expr()?;
                self.expect(&Tok::Arrow)?;
                let mut alternatives = vec![self.branch()?];
                while self.eat(&Tok::Choice) {
                    alternatives.push(self.branch()?);
                }
                items.push(Item::Trans(Trans {
                    guard,
                    alternatives,
                    pos,
                }));
            } else if *self.peek() == Tok::Eof {
                break;
            } else {
                return Err(self.unexpected("`label`, `trans` or end of input"));
            }
        }
        Ok(SurfaceProgram {
            type_names: (x, y),
            decls,
            init,
            items,
        })
    }

    fn typeref(&mut self, kind: DeclKind, x: &str, y: &str) -> PResult<DeclKind> {
        let pos = self.pos();
        match kind {
            DeclKind::Enum(_) => {
                self.expect(&Tok::Colon)?;
                self.expect(&Tok::LBrace)?;
                let mut lits = Vec::new();
                if let Tok::Int(lo) = *self.peek() {
                    self.bump();
                    self.expect(&Tok::DotDot)?;
                    let hi = match *self.peek() {
                        Tok::Int(hi) => hi,
                        _ => return Err(self.unexpected("integer")),
                    };
                    self.bump();
                    lits.extend((lo..=hi).map(|n| n.to_string()));
                } else if *self.peek() != Tok::RBrace {
                    lits.push(self.ident()?.0);
                    while self.eat(&Tok::Comma) {
                        lits.push(self.ident()?.0);
                    }
                }
                self.expect(&Tok::RBrace)?;
                Ok(DeclKind::Enum(lits))
            }
            kind => {
                if !self.eat(&Tok::Colon) {
                    return Ok(kind);
                }
                let (t, _) = self.ident()?;
                let ok = match kind {
                    DeclKind::Bool => t == "BOOL",
                    DeclKind::XVar => t == x,
                    DeclKind::YVar => t == y,
                    DeclKind::Array => {
                        self.expect(&Tok::LBracket)?;
                        let (ix, _) = self.ident()?;
                        self.expect(&Tok::RBracket)?;
                        t == y && ix == x
                    }
                    DeclKind::Enum(_) => unreachable!(),
                };
                if !ok {
                    let want = match kind {
                        DeclKind::Bool => "BOOL".to_string(),
                        DeclKind::XVar => x.to_string(),
                        DeclKind::YVar => y.to_string(),
                        _ => format!("{y}[{x}]"),
                    };
                    return Err(ParseError::new(pos, format!("type mismatch: expected {want}")));
                }
                Ok(kind)
            }
        }
    }

    fn branch(&mut self) -> PResult<Branch> {
        let pos = self.pos();
        if self.eat_kw("if") {
            let cond = self.expr()?;
            self.expect_kw("then")?;
            let then_branch = Box::new(self.branch()?);
            let else_branch = if self.eat_kw("else") {
                Some(Box::new(self.branch()?))
            } else {
                None
            };
            return Ok(Branch::If {
                cond,
                then_branch,
                else_branch,
                pos,
            });
        }
        let head = self.assigns()?;
        let mut appended = Vec::new();
        while self.eat(&Tok::Colon) {
            let g = self.expr()?;
            self.expect(&Tok::Arrow)?;
            appended.push((g, self.assigns()?));
        }
        Ok(Branch::Chain { head, appended })
    }

    fn assigns(&mut self) -> PResult<Vec<SAssign>> {
        if self.eat_kw("skip") {
            return Ok(Vec::new());
        }
        let mut out = vec![self.assign()?];
        while self.eat(&Tok::Comma) {
            out.push(self.assign()?);
        }
        Ok(out)
    }

    fn assign(&mut self) -> PResult<SAssign> {
        let pos = self.pos();
        if self.eat_kw("goto") {
            let (label, _) = self.ident()?;
            return Ok(SAssign::Goto { label, pos });
        }
        let (target, _) = self.ident()?;
        if self.eat(&Tok::LBracket) {
            let (index, _) = self.ident()?;
            self.expect(&Tok::RBracket)?;
            self.expect(&Tok::Assign)?;
            let (value, _) = self.ident()?;
            return Ok(SAssign::Write {
                array: target,
                index,
                value,
                pos,
            });
        }
        self.expect(&Tok::Assign)?;
        let rhs = if self.eat(&Tok::Question) {
            Rhs::Choose
        } else if self.at_ident() && *self.peek_at(1) == Tok::LBracket {
            let (array, _) = self.ident()?;
            self.bump();
            let (index, _) = self.ident()?;
            self.expect(&Tok::RBracket)?;
            Rhs::Read { array, index }
        } else {
            Rhs::Expr(self.expr()?)
        };
        Ok(SAssign::Set { target, rhs, pos })
    }

    pub(super) fn expr(&mut self) -> PResult<SExpr> {
        let lhs = self.or_expr()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.expr()?;
            return Ok(SExpr::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> PResult<SExpr> {
        let mut e = self.and_expr()?;
        while self.eat(&Tok::Or) {
            e = SExpr::Or(Box::new(e), Box::new(self.and_expr()?));
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> PResult<SExpr> {
        let mut e = self.unary()?;
        while self.eat(&Tok::And) {
            e = SExpr::And(Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> PResult<SExpr> {
        if self.eat(&Tok::Not) {
            return Ok(SExpr::Not(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<SExpr> {
        let pos = self.pos();
        if self.eat(&Tok::LParen) {
            let e = self.expr()?;
            self.expect(&Tok::RParen)?;
            return Ok(e);
        }
        if self.eat_kw("true") {
            return Ok(SExpr::True);
        }
        if self.eat_kw("false") {
            return Ok(SExpr::False);
        }
        if let Tok::Int(n) = *self.peek() {
            self.bump();
            return Ok(SExpr::Int(n, pos));
        }
        let (name, _) = self.ident()?;
        let negated = match self.peek() {
            Tok::Eq => false,
            Tok::Neq => true,
            _ => return Ok(SExpr::Ident(name, pos)),
        };
        self.bump();
        let rhs = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Operand::Int(n)
            }
            _ => Operand::Name(self.ident()?.0),
        };
        Ok(SExpr::Eq {
            lhs: name,
            rhs,
            negated,
            pos,
        })
    }
}

/// Parses `.gap` source into a surface program, rejecting duplicate
/// declarations and references to undeclared names.
pub fn parse_program(src: &str) -> Result<SurfaceProgram, ParseError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        at: 0,
    };
    let sp = p.program()?;
    resolve(&sp)?;
    Ok(sp)
}

/// Parses a standalone boolean expression (used for `--init`).
pub fn parse_expr(src: &str) -> Result<SExpr, ParseError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        at: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(super) enum SymKind {
    Bool,
    X,
    Y,
    Array,
    Enum,
}

pub(super) fn symbols(sp: &SurfaceProgram) -> Result<HashMap<String, SymKind>, ParseError> {
    let mut syms = HashMap::new();
    for d in &sp.decls {
        let k = match d.kind {
            DeclKind::Bool => SymKind::Bool,
            DeclKind::XVar => SymKind::X,
            DeclKind::YVar => SymKind::Y,
            DeclKind::Array => SymKind::Array,
            DeclKind::Enum(_) => SymKind::Enum,
        };
        for n in &d.names {
            if syms.insert(n.clone(), k).is_some() {
                return Err(ParseError::new(d.pos, format!("duplicate declaration of `{n}`")));
            }
        }
    }
    Ok(syms)
}

fn resolve(sp: &SurfaceProgram) -> Result<(), ParseError> {
    let syms = symbols(sp)?;
    let mut labels = HashSet::new();
    for it in &sp.items {
        if let Item::Label { name, pos } = it {
            if !labels.insert(name.clone()) {
                return Err(ParseError::new(*pos, format!("duplicate label `{name}`")));
            }
        }
    }
    if let Some(e) = &sp.init {
        check_expr(e, &syms)?;
    }
    for it in &sp.items {
        if let Item::Trans(t) = it {
            check_expr(&t.guard, &syms)?;
            for b in &t.alternatives {
                check_branch(b, &syms, &labels, t.pos)?;
            }
        }
    }
    Ok(())
}

/// Rejects names that are not declared at all; kind errors are left to
/// lowering and validation.
pub(super) fn check_expr(e: &SExpr, syms: &HashMap<String, SymKind>) -> Result<(), ParseError> {
    match e {
        SExpr::True | SExpr::False | SExpr::Int(..) => Ok(()),
        SExpr::Ident(n, pos) => known(n, *pos, syms),
        SExpr::Eq { lhs, rhs, pos, .. } => {
            known(lhs, *pos, syms)?;
            match rhs {
                Operand::Name(r) if syms.get(lhs) != Some(&SymKind::Enum) => known(r, *pos, syms),
                _ => Ok(()),
            }
        }
        SExpr::Not(a) => check_expr(a, syms),
        SExpr::Or(a, b) | SExpr::And(a, b) | SExpr::Implies(a, b) => {
            check_expr(a, syms)?;
            check_expr(b, syms)
        }
    }
}

fn known(n: &str, pos: Pos, syms: &HashMap<String, SymKind>) -> Result<(), ParseError> {
    if syms.contains_key(n) {
        Ok(())
    } else {
        Err(ParseError::new(pos, format!("unknown identifier `{n}`")))
    }
}

fn check_branch(
    b: &Branch,
    syms: &HashMap<String, SymKind>,
    labels: &HashSet<String>,
    pos: Pos,
) -> Result<(), ParseError> {
    match b {
        Branch::If {
            cond,
            then_branch,
            else_branch,
            pos,
        } => {
            check_expr(cond, syms)?;
            check_branch(then_branch, syms, labels, *pos)?;
            if let Some(e) = else_branch {
                check_branch(e, syms, labels, *pos)?;
            }
            Ok(())
        }
        Branch::Chain { head, appended } => {
            check_assigns(head, syms, labels)?;
            for (g, a) in appended {
                check_expr(g, syms)?;
                check_assigns(a, syms, labels)?;
            }
            let _ = pos;
            Ok(())
        }
    }
}

fn check_assigns(
    assigns: &[SAssign],
    syms: &HashMap<String, SymKind>,
    labels: &HashSet<String>,
) -> Result<(), ParseError> {
    for a in assigns {
        match a {
            SAssign::Goto { label, pos } => {
                if !labels.contains(label) {
                    return Err(ParseError::new(*pos, format!("unknown label `{label}`")));
                }
            }
            SAssign::Write {
                array,
                index,
                value,
                pos,
            } => {
                for n in [array, index, value] {
                    known(n, *pos, syms)?;
                }
            }
            SAssign::Set { target, rhs, pos } => {
                known(target, *pos, syms)?;
                match rhs {
                    Rhs::Choose => {}
                    Rhs::Read { array, index } => {
                        known(array, *pos, syms)?;
                        known(index, *pos, syms)?;
                    }
                    // Enum literals on the right are resolved during lowering.
                    Rhs::Expr(SExpr::Ident(_, _)) if syms.get(target) == Some(&SymKind::Enum) => {}
                    Rhs::Expr(e) => check_expr(e, syms)?,
                }
            }
        }
    }
    Ok(())
}
