//! Core programs back to `.gap` source. Encoded conjunctions and
//! implications are re-sugared so that parsing the output reproduces the
//! exact tree.

use std::fmt::Write;

use super::ast::*;

const IMPLIES: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const UNARY: u8 = 3;

fn as_implies(e: &BoolExpr) -> Option<(&BoolExpr, &BoolExpr)> {
    if e.as_and().is_some() {
        return None;
    }
    match e {
        BoolExpr::Or(l, r) => match l.as_ref() {
            BoolExpr::Not(a) => Some((a, r)),
            _ => None,
        },
        _ => None,
    }
}

fn prec(e: &BoolExpr) -> u8 {
    if e.as_and().is_some() {
        AND
    } else if as_implies(e).is_some() {
        IMPLIES
    } else {
        match e {
            BoolExpr::Or(..) => OR,
            _ => UNARY,
        }
    }
}

fn write_expr(out: &mut String, e: &BoolExpr, ctx: u8) {
    let p = prec(e);
    let paren = p < ctx;
    if paren {
        out.push('(');
    }
    if let Some((a, b)) = e.as_and() {
        write_expr(out, a, AND);
        out.push_str(" & ");
        write_expr(out, b, UNARY);
    } else if let Some((a, b)) = as_implies(e) {
        write_expr(out, a, OR);
        out.push_str(" => ");
        // A compound consequent is bracketed for legibility.
        let ctx = if prec(b) == IMPLIES || prec(b) == UNARY {
            IMPLIES
        } else {
            UNARY
        };
        write_expr(out, b, ctx);
    } else {
        match e {
            BoolExpr::True => out.push_str("true"),
            BoolExpr::False => out.push_str("false"),
            BoolExpr::Var(v) => out.push_str(v),
            BoolExpr::Eq(a, b) => {
                let _ = write!(out, "{a} = {b}");
            }
            BoolExpr::Not(a) => match a.as_ref() {
                BoolExpr::Eq(x, y) => {
                    let _ = write!(out, "{x} != {y}");
                }
                inner => {
                    out.push('~');
                    write_expr(out, inner, UNARY);
                }
            },
            BoolExpr::Or(a, b) => {
                write_expr(out, a, OR);
                out.push_str(" | ");
                write_expr(out, b, AND);
            }
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn print_expr(e: &BoolExpr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, IMPLIES);
    s
}

fn print_command(c: &Command) -> String {
    if c.is_empty() {
        return "skip".into();
    }
    let mut parts = Vec::new();
    for (b, e) in &c.bool_assigns {
        parts.push(format!("{b} := {}", print_expr(e)));
    }
    for (z, rhs) in &c.data_assigns {
        parts.push(match rhs {
            DataAssign::Copy(src) => format!("{z} := {src}"),
            DataAssign::Choose => format!("{z} := ?"),
            DataAssign::Read { array, index } => format!("{z} := {array}[{index}]"),
        });
    }
    for w in &c.array_writes {
        parts.push(format!("{}[{}] := {}", w.array, w.index, w.value));
    }
    parts.join(", ")
}

/// `.gap` source for a core program. Appendages go on continuation lines.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "types {} {}", p.type_names.0, p.type_names.1);
    for (kw, names) in [
        ("bool", &p.booleans),
        ("xvar", &p.xvars),
        ("yvar", &p.yvars),
        ("array", &p.arrays),
    ] {
        if !names.is_empty() {
            let _ = writeln!(out, "{kw} {}", names.join(" "));
        }
    }
    if p.init != BoolExpr::True {
        let _ = writeln!(out, "init {}", print_expr(&p.init));
    }
    for gc in &p.commands {
        let _ = write!(out, "trans {} -> {}", print_expr(&gc.guard), print_command(&gc.body));
        for (g, c) in &gc.appended {
            let _ = write!(out, "\n    : {} -> {}", print_expr(g), print_command(c));
        }
        out.push('\n');
    }
    out
}
