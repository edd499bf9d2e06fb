//! Well-formedness of core programs: naming, kinds, equality typing and the
//! per-target multiplicity rules of multiple assignment.

use std::collections::HashSet;
use std::fmt;

use super::ast::*;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Diagnostic {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

struct Checker<'a> {
    p: &'a Program,
    out: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn report(&mut self, location: &str, message: String) {
        let d = Diagnostic {
            location: location.to_string(),
            message,
        };
        if !self.out.contains(&d) {
            self.out.push(d);
        }
    }

    fn expr(&mut self, loc: &str, e: &BoolExpr) {
        match e {
            BoolExpr::True | BoolExpr::False => {}
            BoolExpr::Var(v) => match self.p.kind_of(v) {
                Some(VarKind::Bool) => {}
                Some(k) => self.report(loc, format!("`{v}` is {k}, expected a boolean")),
                None => self.report(loc, format!("unknown name `{v}`")),
            },
            BoolExpr::Eq(a, b) => match (self.p.kind_of(a), self.p.kind_of(b)) {
                (None, _) => self.report(loc, format!("unknown name `{a}`")),
                (_, None) => self.report(loc, format!("unknown name `{b}`")),
                (Some(ka), Some(kb)) => {
                    if !matches!(ka, VarKind::X | VarKind::Y) {
                        self.report(loc, format!("`{a}` is {ka}; equality needs data variables"));
                    } else if !matches!(kb, VarKind::X | VarKind::Y) {
                        self.report(loc, format!("`{b}` is {kb}; equality needs data variables"));
                    } else if ka != kb {
                        self.report(
                            loc,
                            format!("type mismatch in `{a} = {b}`: {ka} vs {kb}"),
                        );
                    }
                }
            },
            BoolExpr::Not(a) => self.expr(loc, a),
            BoolExpr::Or(a, b) => {
                self.expr(loc, a);
                self.expr(loc, b);
            }
        }
    }

    fn expect(&mut self, loc: &str, name: &str, want: VarKind, role: &str) -> bool {
        match self.p.kind_of(name) {
            Some(k) if k == want => true,
            Some(k) => {
                self.report(loc, format!("{role} `{name}` is {k}, expected {want}"));
                false
            }
            None => {
                self.report(loc, format!("unknown name `{name}`"));
                false
            }
        }
    }

    fn command(&mut self, loc: &str, c: &Command) {
        let mut targets = HashSet::new();
        for (b, e) in &c.bool_assigns {
            self.expect(loc, b, VarKind::Bool, "assignment target");
            if !targets.insert(b.as_str()) {
                self.report(loc, format!("duplicate assignment to `{b}`"));
            }
            self.expr(loc, e);
        }
        for (z, rhs) in &c.data_assigns {
            if !targets.insert(z.as_str()) {
                self.report(loc, format!("duplicate assignment to `{z}`"));
            }
            let kind = match self.p.kind_of(z) {
                Some(k @ (VarKind::X | VarKind::Y)) => k,
                Some(k) => {
                    self.report(loc, format!("assignment target `{z}` is {k}, expected a data variable"));
                    continue;
                }
                None => {
                    self.report(loc, format!("unknown name `{z}`"));
                    continue;
                }
            };
            match rhs {
                DataAssign::Choose => {}
                DataAssign::Copy(src) => {
                    self.expect(loc, src, kind, "copy source");
                }
                DataAssign::Read { array, index } => {
                    if kind != VarKind::Y {
                        self.report(loc, format!("array read into `{z}`, which is {kind}"));
                    }
                    self.expect(loc, array, VarKind::Array, "read source");
                    self.expect(loc, index, VarKind::X, "array index");
                }
            }
        }
        let mut arrays = HashSet::new();
        for w in &c.array_writes {
            if !arrays.insert(w.array.as_str()) {
                self.report(loc, format!("duplicate array write to `{}`", w.array));
            }
            self.expect(loc, &w.array, VarKind::Array, "write target");
            self.expect(loc, &w.index, VarKind::X, "array index");
            self.expect(loc, &w.value, VarKind::Y, "written value");
        }
    }
}

/// Every violated invariant of `p`, each reported once with its location.
/// An empty list means the program is well formed.
pub fn validate(p: &Program) -> Vec<Diagnostic> {
    let mut c = Checker { p, out: Vec::new() };
    if p.type_names.0 == p.type_names.1 {
        c.report(
            "types",
            format!("the two type symbols must differ, both are `{}`", p.type_names.0),
        );
    }
    let mut seen = HashSet::new();
    for name in p
        .booleans
        .iter()
        .chain(&p.xvars)
        .chain(&p.yvars)
        .chain(&p.arrays)
    {
        if !seen.insert(name.as_str()) {
            c.report("declarations", format!("`{name}` declared more than once"));
        }
        if !p.arrays.is_empty() && name.contains('.') {
            c.report(
                "declarations",
                format!("`{name}`: dotted names are reserved for array elimination"),
            );
        }
    }
    c.expr("init", &p.init);
    for (i, gc) in p.commands.iter().enumerate() {
        let n = i + 1;
        c.expr(&format!("command {n} guard"), &gc.guard);
        c.command(&format!("command {n}"), &gc.body);
        for (j, (g, cmd)) in gc.appended.iter().enumerate() {
            let loc = format!("command {n} appendage {}", j + 1);
            c.expr(&loc, g);
            c.command(&loc, cmd);
        }
    }
    c.out
}

pub(super) fn check_standalone(p: &Program, e: &BoolExpr) -> Vec<Diagnostic> {
    let mut c = Checker { p, out: Vec::new() };
    c.expr("expression", e);
    c.out
}
