//! Sugar lowering: enums become one-hot booleans, labels become a `loc`
//! enum plus an `at_start` flag, `if` and `|~|` become sibling guarded
//! commands.
//!
//! For a labelled program the first label is the entry point. Its commands
//! require `at_start` and clear it; every other command requires
//! `~at_start & loc_L` for its label `L`. One-hot validity of every enum,
//! and `at_start => loc_<entry>`, are conjoined onto `init`.

use std::collections::HashMap;

use super::ast::*;
use super::lexer::Pos;
use super::parser::{symbols, SymKind};
use super::surface::*;
use super::ParseError;

pub const LOC: &str = "loc";
pub const AT_START: &str = "at_start";

pub fn enum_literal(var: &str, lit: &str) -> String {
    format!("{var}_{lit}")
}

struct Lowering {
    syms: HashMap<String, SymKind>,
    enums: HashMap<String, Vec<String>>,
    labels: Vec<String>,
}

pub fn lower_sugar(sp: &SurfaceProgram) -> Result<Program, ParseError> {
    let mut syms = symbols(sp)?;
    let mut enums: HashMap<String, Vec<String>> = HashMap::new();
    let mut enum_order = Vec::new();
    let mut prog = Program {
        type_names: sp.type_names.clone(),
        ..Program::default()
    };
    for d in &sp.decls {
        match &d.kind {
            DeclKind::Bool => prog.booleans.extend(d.names.iter().cloned()),
            DeclKind::XVar => prog.xvars.extend(d.names.iter().cloned()),
            DeclKind::YVar => prog.yvars.extend(d.names.iter().cloned()),
            DeclKind::Array => prog.arrays.extend(d.names.iter().cloned()),
            DeclKind::Enum(lits) => {
                if lits.is_empty() {
                    return Err(ParseError::new(d.pos, "enum with zero literals"));
                }
                for n in &d.names {
                    prog.booleans.extend(lits.iter().map(|l| enum_literal(n, l)));
                    enums.insert(n.clone(), lits.clone());
                    enum_order.push(n.clone());
                }
            }
        }
    }

    let labels: Vec<String> = sp
        .items
        .iter()
        .filter_map(|it| match it {
            Item::Label { name, .. } => Some(name.clone()),
            _ => None,
        })
        .collect();
    if !labels.is_empty() {
        let pos = sp
            .items
            .iter()
            .find_map(|it| match it {
                Item::Label { pos, .. } => Some(*pos),
                _ => None,
            })
            .unwrap_or_default();
        for reserved in [LOC, AT_START] {
            if syms.contains_key(reserved) {
                return Err(ParseError::new(
                    pos,
                    format!("`{reserved}` is reserved in programs that use labels"),
                ));
            }
        }
        syms.insert(LOC.into(), SymKind::Enum);
        syms.insert(AT_START.into(), SymKind::Bool);
        prog.booleans.extend(labels.iter().map(|l| enum_literal(LOC, l)));
        prog.booleans.push(AT_START.into());
        enums.insert(LOC.into(), labels.clone());
        enum_order.push(LOC.into());
    }
    for (i, b) in prog.booleans.iter().enumerate() {
        if prog.booleans[..i].contains(b) || syms.get(b).is_some_and(|k| *k != SymKind::Bool) {
            return Err(ParseError::new(
                Pos::default(),
                format!("lowered boolean `{b}` clashes with another declaration"),
            ));
        }
    }

    let lw = Lowering {
        syms,
        enums,
        labels,
    };

    let mut init_parts = Vec::new();
    if let Some(e) = &sp.init {
        init_parts.push(lw.expr(e)?);
    }
    for name in &enum_order {
        init_parts.push(one_hot(
            lw.enums[name].iter().map(|l| enum_literal(name, l)).collect(),
        ));
    }
    if let Some(entry) = lw.labels.first() {
        init_parts.push(BoolExpr::implies(
            BoolExpr::var(AT_START),
            BoolExpr::var(enum_literal(LOC, entry)),
        ));
    }
    prog.init = BoolExpr::conj(init_parts);

    let entry = lw.labels.first().cloned();
    let mut current: Option<String> = None;
    for it in &sp.items {
        match it {
            Item::Label { name, .. } => current = Some(name.clone()),
            Item::Trans(t) => {
                let mut base = Vec::new();
                let is_entry = current.is_some() && current == entry;
                if is_entry {
                    base.push(BoolExpr::var(AT_START));
                } else if let Some(l) = &current {
                    base.push(BoolExpr::not(BoolExpr::var(AT_START)));
                    base.push(BoolExpr::var(enum_literal(LOC, l)));
                }
                base.push(lw.expr(&t.guard)?);
                for alt in &t.alternatives {
                    let mut leaves = Vec::new();
                    lw.leaves(alt, Vec::new(), &mut leaves)?;
                    for (conds, head, appended) in leaves {
                        let mut body = lw.assigns(head)?;
                        if is_entry {
                            body.bool_assigns.push((AT_START.into(), BoolExpr::False));
                        }
                        let appended = appended
                            .iter()
                            .map(|(g, a)| Ok((lw.expr(g)?, lw.assigns(a)?)))
                            .collect::<Result<Vec<_>, ParseError>>()?;
                        let guard = BoolExpr::conj(base.iter().cloned().chain(conds));
                        prog.commands.push(GuardedCommand {
                            guard,
                            body,
                            appended,
                        });
                    }
                }
            }
        }
    }
    Ok(prog)
}

/// Exactly one of `lits` holds.
fn one_hot(lits: Vec<String>) -> BoolExpr {
    let some = BoolExpr::disj(lits.iter().map(BoolExpr::var));
    let mut parts = vec![some];
    for i in 0..lits.len() {
        for j in i + 1..lits.len() {
            parts.push(BoolExpr::or(
                BoolExpr::not(BoolExpr::var(&lits[i])),
                BoolExpr::not(BoolExpr::var(&lits[j])),
            ));
        }
    }
    BoolExpr::conj(parts)
}

type Leaf<'a> = (Vec<BoolExpr>, &'a [SAssign], &'a [(SExpr, Vec<SAssign>)]);

const EMPTY_ASSIGNS: &[SAssign] = &[];
const EMPTY_CHAIN: &[(SExpr, Vec<SAssign>)] = &[];

impl Lowering {
    fn leaves<'a>(
        &self,
        b: &'a Branch,
        conds: Vec<BoolExpr>,
        out: &mut Vec<Leaf<'a>>,
    ) -> Result<(), ParseError> {
        match b {
            Branch::Chain { head, appended } => {
                out.push((conds, head, appended));
                Ok(())
            }
            Branch::If {
                cond,
                then_branch,
                else_branch,
                ..
            } => {
                let c = self.expr(cond)?;
                let mut t = conds.clone();
                t.push(c.clone());
                self.leaves(then_branch, t, out)?;
                let mut e = conds;
                e.push(BoolExpr::not(c));
                match else_branch {
                    Some(eb) => self.leaves(eb, e, out),
                    None => {
                        out.push((e, EMPTY_ASSIGNS, EMPTY_CHAIN));
                        Ok(())
                    }
                }
            }
        }
    }

    fn set_enum(&self, cmd: &mut Command, var: &str, lit: &str, pos: Pos) -> Result<(), ParseError> {
        let lits = &self.enums[var];
        if !lits.iter().any(|l| l == lit) {
            return Err(ParseError::new(
                pos,
                format!("`{lit}` is not a literal of enum `{var}`"),
            ));
        }
        for l in lits {
            let v = if l == lit { BoolExpr::True } else { BoolExpr::False };
            cmd.bool_assigns.push((enum_literal(var, l), v));
        }
        Ok(())
    }

    fn assigns(&self, items: &[SAssign]) -> Result<Command, ParseError> {
        let mut cmd = Command::default();
        for a in items {
            match a {
                SAssign::Goto { label, pos } => self.set_enum(&mut cmd, LOC, label, *pos)?,
                SAssign::Write {
                    array,
                    index,
                    value,
                    ..
                } => cmd.array_writes.push(ArrayWrite {
                    array: array.clone(),
                    index: index.clone(),
                    value: value.clone(),
                }),
                SAssign::Set { target, rhs, pos } => match (self.syms.get(target), rhs) {
                    (Some(SymKind::Enum), Rhs::Expr(SExpr::Ident(lit, _))) => {
                        self.set_enum(&mut cmd, target, lit, *pos)?
                    }
                    (Some(SymKind::Enum), Rhs::Expr(SExpr::Int(n, _))) => {
                        self.set_enum(&mut cmd, target, &n.to_string(), *pos)?
                    }
                    (Some(SymKind::Enum), _) => {
                        return Err(ParseError::new(
                            *pos,
                            format!("enum `{target}` can only be assigned a literal"),
                        ))
                    }
                    (Some(SymKind::Bool), Rhs::Expr(e)) => {
                        cmd.bool_assigns.push((target.clone(), self.expr(e)?))
                    }
                    (Some(SymKind::X | SymKind::Y), rhs) => {
                        let d = match rhs {
                            Rhs::Choose => DataAssign::Choose,
                            Rhs::Read { array, index } => DataAssign::Read {
                                array: array.clone(),
                                index: index.clone(),
                            },
                            Rhs::Expr(SExpr::Ident(src, _)) => DataAssign::Copy(src.clone()),
                            Rhs::Expr(_) => {
                                return Err(ParseError::new(
                                    *pos,
                                    format!("data variable `{target}` can only be copied, read or chosen"),
                                ))
                            }
                        };
                        cmd.data_assigns.push((target.clone(), d));
                    }
                    _ => {
                        return Err(ParseError::new(
                            *pos,
                            format!("invalid assignment to `{target}`"),
                        ))
                    }
                },
            }
        }
        Ok(cmd)
    }

    fn expr(&self, e: &SExpr) -> Result<BoolExpr, ParseError> {
        Ok(match e {
            SExpr::True => BoolExpr::True,
            SExpr::False => BoolExpr::False,
            SExpr::Ident(n, pos) => {
                if self.syms.get(n) == Some(&SymKind::Enum) {
                    return Err(ParseError::new(
                        *pos,
                        format!("enum `{n}` used as a boolean; compare it with a literal"),
                    ));
                }
                BoolExpr::var(n)
            }
            SExpr::Int(n, pos) => {
                return Err(ParseError::new(*pos, format!("unexpected integer `{n}`")))
            }
            SExpr::Eq {
                lhs,
                rhs,
                negated,
                pos,
            } => {
                let base = if self.syms.get(lhs) == Some(&SymKind::Enum) {
                    let lit = rhs.to_string();
                    if !self.enums[lhs].contains(&lit) {
                        return Err(ParseError::new(
                            *pos,
                            format!("`{lit}` is not a literal of enum `{lhs}`"),
                        ));
                    }
                    BoolExpr::var(enum_literal(lhs, &lit))
                } else {
                    match rhs {
                        Operand::Name(r) => BoolExpr::eq(lhs, r),
                        Operand::Int(n) => {
                            return Err(ParseError::new(
                                *pos,
                                format!("`{lhs}` is not an enum; cannot compare with `{n}`"),
                            ))
                        }
                    }
                };
                if *negated {
                    BoolExpr::not(base)
                } else {
                    base
                }
            }
            SExpr::Not(a) => BoolExpr::not(self.expr(a)?),
            SExpr::Or(a, b) => BoolExpr::or(self.expr(a)?, self.expr(b)?),
            SExpr::And(a, b) => BoolExpr::and(self.expr(a)?, self.expr(b)?),
            SExpr::Implies(a, b) => BoolExpr::implies(self.expr(a)?, self.expr(b)?),
        })
    }
}

/// Lowers a standalone expression against a program's declarations. Enum
/// comparisons are resolved by matching `<var>_<lit>` booleans.
pub fn lower_expr(e: &SExpr, p: &Program) -> Result<BoolExpr, ParseError> {
    let mut syms = HashMap::new();
    for b in &p.booleans {
        syms.insert(b.clone(), SymKind::Bool);
    }
    for x in &p.xvars {
        syms.insert(x.clone(), SymKind::X);
    }
    for y in &p.yvars {
        syms.insert(y.clone(), SymKind::Y);
    }
    for a in &p.arrays {
        syms.insert(a.clone(), SymKind::Array);
    }
    // Recover enums from `<var>_<lit>` booleans when the comparison needs them.
    let mut enums: HashMap<String, Vec<String>> = HashMap::new();
    collect_enum_uses(e, &mut |var, lit| {
        let b = enum_literal(var, lit);
        if p.booleans.contains(&b) && !syms.contains_key(var) {
            enums.entry(var.to_string()).or_default().push(lit.to_string());
        }
    });
    for k in enums.keys() {
        syms.insert(k.clone(), SymKind::Enum);
    }
    super::parser::check_expr(e, &syms)?;
    Lowering {
        syms,
        enums,
        labels: Vec::new(),
    }
    .expr(e)
}

fn collect_enum_uses(e: &SExpr, f: &mut impl FnMut(&str, &str)) {
    match e {
        SExpr::Eq { lhs, rhs, .. } => f(lhs, &rhs.to_string()),
        SExpr::Not(a) => collect_enum_uses(a, f),
        SExpr::Or(a, b) | SExpr::And(a, b) | SExpr::Implies(a, b) => {
            collect_enum_uses(a, f);
            collect_enum_uses(b, f);
        }
        _ => {}
    }
}
