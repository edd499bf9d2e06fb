//! Core abstract syntax: two type symbols, booleans, X/Y data variables and
//! `Y[X]` arrays, guarded multiple assignments with optional append chains.

use std::fmt;

/// Boolean expressions of the core language. Conjunction and implication
/// are sugar: [`BoolExpr::and`] and [`BoolExpr::implies`] build them from
/// negation and disjunction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    True,
    False,
    Var(String),
    /// Equality of two data variables of the same type.
    Eq(String, String),
    Not(Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn var(name: impl Into<String>) -> Self {
        BoolExpr::Var(name.into())
    }

    pub fn eq(a: impl Into<String>, b: impl Into<String>) -> Self {
        BoolExpr::Eq(a.into(), b.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(a), Box::new(b))
    }

    /// `a ∧ b` encoded as `¬(¬a ∨ ¬b)`.
    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::not(BoolExpr::or(BoolExpr::not(a), BoolExpr::not(b)))
    }

    /// `a ⇒ b` encoded as `¬a ∨ b`.
    pub fn implies(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::or(BoolExpr::not(a), b)
    }

    /// Left-nested conjunction; literal `true` for an empty list.
    pub fn conj(items: impl IntoIterator<Item = BoolExpr>) -> Self {
        items
            .into_iter()
            .filter(|e| *e != BoolExpr::True)
            .reduce(BoolExpr::and)
            .unwrap_or(BoolExpr::True)
    }

    /// Left-nested disjunction; literal `false` for an empty list.
    pub fn disj(items: impl IntoIterator<Item = BoolExpr>) -> Self {
        items
            .into_iter()
            .filter(|e| *e != BoolExpr::False)
            .reduce(BoolExpr::or)
            .unwrap_or(BoolExpr::False)
    }

    /// If this is an encoded conjunction `¬(¬a ∨ ¬b)`, its two operands.
    pub fn as_and(&self) -> Option<(&BoolExpr, &BoolExpr)> {
        if let BoolExpr::Not(inner) = self {
            if let BoolExpr::Or(l, r) = inner.as_ref() {
                if let (BoolExpr::Not(a), BoolExpr::Not(b)) = (l.as_ref(), r.as_ref()) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Calls `f` on every name mentioned in the expression, tagged with
    /// whether it occurs as an equality operand.
    pub fn visit_names<'a>(&'a self, f: &mut impl FnMut(&'a str, bool)) {
        match self {
            BoolExpr::True | BoolExpr::False => {}
            BoolExpr::Var(v) => f(v, false),
            BoolExpr::Eq(a, b) => {
                f(a, true);
                f(b, true);
            }
            BoolExpr::Not(e) => e.visit_names(f),
            BoolExpr::Or(a, b) => {
                a.visit_names(f);
                b.visit_names(f);
            }
        }
    }

    /// Simultaneous renaming of variable names.
    pub fn rename(&self, map: &impl Fn(&str) -> String) -> BoolExpr {
        match self {
            BoolExpr::True => BoolExpr::True,
            BoolExpr::False => BoolExpr::False,
            BoolExpr::Var(v) => BoolExpr::Var(map(v)),
            BoolExpr::Eq(a, b) => BoolExpr::Eq(map(a), map(b)),
            BoolExpr::Not(e) => BoolExpr::not(e.rename(map)),
            BoolExpr::Or(a, b) => BoolExpr::or(a.rename(map), b.rename(map)),
        }
    }
}

/// Right-hand side of an assignment to a data variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DataAssign {
    /// `z := z'`
    Copy(String),
    /// `z := ?`
    Choose,
    /// `y := a[x]`
    Read { array: String, index: String },
}

/// `a[x] := y`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArrayWrite {
    pub array: String,
    pub index: String,
    pub value: String,
}

/// A simultaneous multiple assignment. Multiplicity rules (one assignment
/// per target) are checked by [`crate::lang::validate`], not by the type.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Command {
    pub bool_assigns: Vec<(String, BoolExpr)>,
    pub data_assigns: Vec<(String, DataAssign)>,
    pub array_writes: Vec<ArrayWrite>,
}

impl Command {
    pub fn is_empty(&self) -> bool {
        self.bool_assigns.is_empty() && self.data_assigns.is_empty() && self.array_writes.is_empty()
    }

    /// Same command with every assignment list sorted by target name.
    pub fn canonical(&self) -> Command {
        let mut c = self.clone();
        c.bool_assigns.sort_by(|a, b| a.0.cmp(&b.0));
        c.data_assigns.sort_by(|a, b| a.0.cmp(&b.0));
        c.array_writes.sort_by(|a, b| a.array.cmp(&b.array));
        c
    }

    /// Number of `?` assignments.
    pub fn dice(&self) -> usize {
        self.data_assigns
            .iter()
            .filter(|(_, rhs)| matches!(rhs, DataAssign::Choose))
            .count()
    }
}

/// `guard -> body : e1 -> I1 : e2 -> I2 ...`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GuardedCommand {
    pub guard: BoolExpr,
    pub body: Command,
    pub appended: Vec<(BoolExpr, Command)>,
}

impl GuardedCommand {
    pub fn plain(guard: BoolExpr, body: Command) -> Self {
        GuardedCommand {
            guard,
            body,
            appended: Vec::new(),
        }
    }

    pub fn is_plain(&self) -> bool {
        self.appended.is_empty()
    }

    /// Number of separately counted segments: the body plus each appendage.
    pub fn segments(&self) -> usize {
        1 + self.appended.len()
    }

    pub fn canonical(&self) -> GuardedCommand {
        GuardedCommand {
            guard: self.guard.clone(),
            body: self.body.canonical(),
            appended: self
                .appended
                .iter()
                .map(|(g, c)| (g.clone(), c.canonical()))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Bool,
    X,
    Y,
    Array,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarKind::Bool => "boolean",
            VarKind::X => "X-typed",
            VarKind::Y => "Y-typed",
            VarKind::Array => "array",
        })
    }
}

/// A core program. Variable lists are in declaration order, which is the
/// canonical enumeration used by translation and canonicalization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Program {
    /// Names of the index type X and the value type Y.
    pub type_names: (String, String),
    pub booleans: Vec<String>,
    pub xvars: Vec<String>,
    pub yvars: Vec<String>,
    pub arrays: Vec<String>,
    pub init: BoolExpr,
    pub commands: Vec<GuardedCommand>,
}

impl Default for Program {
    fn default() -> Self {
        Program {
            type_names: ("X".into(), "Y".into()),
            booleans: Vec::new(),
            xvars: Vec::new(),
            yvars: Vec::new(),
            arrays: Vec::new(),
            init: BoolExpr::True,
            commands: Vec::new(),
        }
    }
}

/// `(n_b, n_x, n_y, n_a, n_i)`
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Profile {
    pub booleans: usize,
    pub xvars: usize,
    pub yvars: usize,
    pub arrays: usize,
    pub commands: usize,
}

impl Program {
    pub fn kind_of(&self, name: &str) -> Option<VarKind> {
        if self.booleans.iter().any(|n| n == name) {
            Some(VarKind::Bool)
        } else if self.xvars.iter().any(|n| n == name) {
            Some(VarKind::X)
        } else if self.yvars.iter().any(|n| n == name) {
            Some(VarKind::Y)
        } else if self.arrays.iter().any(|n| n == name) {
            Some(VarKind::Array)
        } else {
            None
        }
    }

    pub fn count_profile(&self) -> Profile {
        Profile {
            booleans: self.booleans.len(),
            xvars: self.xvars.len(),
            yvars: self.yvars.len(),
            arrays: self.arrays.len(),
            commands: self.commands.len(),
        }
    }

    /// Total number of segments over all guarded commands.
    pub fn segment_count(&self) -> usize {
        self.commands.iter().map(GuardedCommand::segments).sum()
    }

    /// Program with every command in canonical assignment order, for
    /// structural comparison.
    pub fn canonical(&self) -> Program {
        Program {
            commands: self.commands.iter().map(GuardedCommand::canonical).collect(),
            ..self.clone()
        }
    }
}
