//! Index-based form of a validated program. Variables are numbered in
//! declaration order within their kind; every semantics (concrete, partial,
//! quotient) interprets this form against its own state representation.

use std::collections::HashMap;

use super::ast::*;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(bool),
    Bool(usize),
    EqX(usize, usize),
    EqY(usize, usize),
    Not(Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

/// Read access to a state for expression evaluation. Data values are
/// opaque ids compared only for equality.
pub trait Env {
    fn b(&self, i: usize) -> bool;
    fn x(&self, i: usize) -> u32;
    fn y(&self, i: usize) -> u32;
}

/// A partially assigned state: `None` for components not yet fixed.
pub trait PartialEnv {
    fn b(&self, i: usize) -> Option<bool>;
    fn x(&self, i: usize) -> Option<u32>;
    fn y(&self, i: usize) -> Option<u32>;
}

impl Expr {
    pub fn eval(&self, s: &impl Env) -> bool {
        match self {
            Expr::Const(c) => *c,
            Expr::Bool(i) => s.b(*i),
            Expr::EqX(a, b) => s.x(*a) == s.x(*b),
            Expr::EqY(a, b) => s.y(*a) == s.y(*b),
            Expr::Not(e) => !e.eval(s),
            Expr::Or(a, b) => a.eval(s) || b.eval(s),
        }
    }

    /// Kleene three-valued evaluation; `None` when the value depends on
    /// unassigned components.
    pub fn eval3(&self, s: &impl PartialEnv) -> Option<bool> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Bool(i) => s.b(*i),
            Expr::EqX(a, b) => Some(s.x(*a)? == s.x(*b)?),
            Expr::EqY(a, b) => Some(s.y(*a)? == s.y(*b)?),
            Expr::Not(e) => e.eval3(s).map(|v| !v),
            Expr::Or(a, b) => match (a.eval3(s), b.eval3(s)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XRhs {
    Copy(usize),
    Choose,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YRhs {
    Copy(usize),
    Choose,
    Read { array: usize, index: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Write {
    pub array: usize,
    pub index: usize,
    pub value: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CCommand {
    pub bools: Vec<(usize, Expr)>,
    pub xs: Vec<(usize, XRhs)>,
    pub ys: Vec<(usize, YRhs)>,
    pub writes: Vec<Write>,
}

impl CCommand {
    pub fn x_dice(&self) -> usize {
        self.xs.iter().filter(|(_, r)| *r == XRhs::Choose).count()
    }

    pub fn y_dice(&self) -> usize {
        self.ys.iter().filter(|(_, r)| *r == YRhs::Choose).count()
    }
}

/// A guarded command as a guard plus segments. The first segment is the
/// body and always carries the guard `true`; later ones are appendages,
/// skipped when their guard fails in the intermediate state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CGuarded {
    pub guard: Expr,
    pub segments: Vec<(Expr, CCommand)>,
}

#[derive(Clone, Debug)]
pub struct Compiled {
    pub nb: usize,
    pub nx: usize,
    pub ny: usize,
    pub na: usize,
    pub init: Expr,
    pub commands: Vec<CGuarded>,
}

struct Names<'a> {
    index: HashMap<&'a str, (VarKind, usize)>,
}

impl<'a> Names<'a> {
    fn new(p: &'a Program) -> Self {
        let mut index = HashMap::new();
        for (kind, list) in [
            (VarKind::Bool, &p.booleans),
            (VarKind::X, &p.xvars),
            (VarKind::Y, &p.yvars),
            (VarKind::Array, &p.arrays),
        ] {
            for (i, n) in list.iter().enumerate() {
                index.insert(n.as_str(), (kind, i));
            }
        }
        Names { index }
    }

    fn get(&self, name: &str, want: VarKind) -> Result<usize, Error> {
        match self.index.get(name) {
            Some((k, i)) if *k == want => Ok(*i),
            Some((k, _)) => Err(Error::Name(format!("`{name}` is {k}, expected {want}"))),
            None => Err(Error::Name(format!("unknown name `{name}`"))),
        }
    }

    fn data(&self, name: &str) -> Result<(VarKind, usize), Error> {
        match self.index.get(name) {
            Some(&(k @ (VarKind::X | VarKind::Y), i)) => Ok((k, i)),
            _ => Err(Error::Name(format!("`{name}` is not a data variable"))),
        }
    }

    fn expr(&self, e: &BoolExpr) -> Result<Expr, Error> {
        Ok(match e {
            BoolExpr::True => Expr::Const(true),
            BoolExpr::False => Expr::Const(false),
            BoolExpr::Var(v) => Expr::Bool(self.get(v, VarKind::Bool)?),
            BoolExpr::Eq(a, b) => match (self.data(a)?, self.data(b)?) {
                ((VarKind::X, i), (VarKind::X, j)) => Expr::EqX(i, j),
                ((VarKind::Y, i), (VarKind::Y, j)) => Expr::EqY(i, j),
                _ => return Err(Error::Name(format!("type mismatch in `{a} = {b}`"))),
            },
            BoolExpr::Not(a) => Expr::Not(Box::new(self.expr(a)?)),
            BoolExpr::Or(a, b) => Expr::Or(Box::new(self.expr(a)?), Box::new(self.expr(b)?)),
        })
    }

    fn command(&self, c: &Command) -> Result<CCommand, Error> {
        let mut out = CCommand::default();
        for (b, e) in &c.bool_assigns {
            out.bools.push((self.get(b, VarKind::Bool)?, self.expr(e)?));
        }
        for (z, rhs) in &c.data_assigns {
            match self.data(z)? {
                (VarKind::X, i) => out.xs.push((
                    i,
                    match rhs {
                        DataAssign::Copy(src) => XRhs::Copy(self.get(src, VarKind::X)?),
                        DataAssign::Choose => XRhs::Choose,
                        DataAssign::Read { .. } => {
                            return Err(Error::Name(format!("array read into X-typed `{z}`")))
                        }
                    },
                )),
                (_, i) => out.ys.push((
                    i,
                    match rhs {
                        DataAssign::Copy(src) => YRhs::Copy(self.get(src, VarKind::Y)?),
                        DataAssign::Choose => YRhs::Choose,
                        DataAssign::Read { array, index } => YRhs::Read {
                            array: self.get(array, VarKind::Array)?,
                            index: self.get(index, VarKind::X)?,
                        },
                    },
                )),
            }
        }
        for w in &c.array_writes {
            out.writes.push(Write {
                array: self.get(&w.array, VarKind::Array)?,
                index: self.get(&w.index, VarKind::X)?,
                value: self.get(&w.value, VarKind::Y)?,
            });
        }
        Ok(out)
    }
}

/// Compiles a well-formed program. Name or typing errors are reported,
/// though [`super::validate`] catches them with better locations.
pub fn compile(p: &Program) -> Result<Compiled, Error> {
    let names = Names::new(p);
    let mut commands = Vec::with_capacity(p.commands.len());
    for gc in &p.commands {
        let mut segments = vec![(Expr::Const(true), names.command(&gc.body)?)];
        for (g, c) in &gc.appended {
            segments.push((names.expr(g)?, names.command(c)?));
        }
        commands.push(CGuarded {
            guard: names.expr(&gc.guard)?,
            segments,
        });
    }
    Ok(Compiled {
        nb: p.booleans.len(),
        nx: p.xvars.len(),
        ny: p.yvars.len(),
        na: p.arrays.len(),
        init: names.expr(&p.init)?,
        commands,
    })
}

/// Compiles a standalone expression against `p`'s declarations.
pub fn compile_expr(p: &Program, e: &BoolExpr) -> Result<Expr, Error> {
    Names::new(p).expr(e)
}
