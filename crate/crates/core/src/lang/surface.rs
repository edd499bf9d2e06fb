//! Surface syntax tree: the core language plus enums, labels with `goto`,
//! `if`/`then`/`else` and `|~|` choice. Every node that can be blamed in a
//! diagnostic carries its source position.

use super::lexer::Pos;

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceProgram {
    pub type_names: (String, String),
    pub decls: Vec<Decl>,
    pub init: Option<SExpr>,
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeclKind {
    Bool,
    XVar,
    YVar,
    Array,
    /// Finite enumeration, lowered to one boolean per literal.
    Enum(Vec<String>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decl {
    pub kind: DeclKind,
    pub names: Vec<String>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Label { name: String, pos: Pos },
    Trans(Trans),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trans {
    pub guard: SExpr,
    /// `|~|`-separated alternatives.
    pub alternatives: Vec<Branch>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Branch {
    If {
        cond: SExpr,
        then_branch: Box<Branch>,
        else_branch: Option<Box<Branch>>,
        pos: Pos,
    },
    Chain {
        head: Vec<SAssign>,
        appended: Vec<(SExpr, Vec<SAssign>)>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum SAssign {
    Set { target: String, rhs: Rhs, pos: Pos },
    Write { array: String, index: String, value: String, pos: Pos },
    Goto { label: String, pos: Pos },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rhs {
    Choose,
    Read { array: String, index: String },
    Expr(SExpr),
}

/// Right operand of `=`/`!=`: a variable or an enum literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    Name(String),
    Int(u32),
}

impl std::fmt::Display for Operand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Operand::Name(n) => f.write_str(n),
            Operand::Int(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SExpr {
    True,
    False,
    Ident(String, Pos),
    /// Bare integer; only meaningful as an enum literal on the right of `:=`.
    Int(u32, Pos),
    Eq {
        lhs: String,
        rhs: Operand,
        negated: bool,
        pos: Pos,
    },
    Not(Box<SExpr>),
    Or(Box<SExpr>, Box<SExpr>),
    And(Box<SExpr>, Box<SExpr>),
    Implies(Box<SExpr>, Box<SExpr>),
}
