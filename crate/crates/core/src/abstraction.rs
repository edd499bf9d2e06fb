//! Array elimination. Each array `a` is replaced by one `Y` variable
//! `a.x` per X variable `x`, standing for `a[x]`; appendages keep those
//! copies consistent when X variables alias.

use crate::lang::{ArrayWrite, BoolExpr, Command, DataAssign, GuardedCommand, Program};
use crate::Error;

/// Name of the variable standing for `array[xvar]`. The dot cannot occur
/// in user identifiers of programs with arrays, so no capture is possible.
pub fn ax_name(array: &str, xvar: &str) -> String {
    format!("{array}.{xvar}")
}

/// A command split into its X-typed assignments and everything else.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplitCommand {
    pub ix: Command,
    pub iy: Command,
}

pub fn split_command(p: &Program, c: &Command) -> SplitCommand {
    let mut out = SplitCommand::default();
    out.iy.bool_assigns = c.bool_assigns.clone();
    out.iy.array_writes = c.array_writes.clone();
    for (z, rhs) in &c.data_assigns {
        if p.xvars.contains(z) {
            out.ix.data_assigns.push((z.clone(), rhs.clone()));
        } else {
            out.iy.data_assigns.push((z.clone(), rhs.clone()));
        }
    }
    out
}

/// Translates one plain guarded command:
/// `I♯_Y : write appendages : true → I♯_X : first family : second family`.
pub fn translate_command(p: &Program, gc: &GuardedCommand) -> GuardedCommand {
    if p.arrays.is_empty() {
        return gc.clone();
    }
    let split = split_command(p, &gc.body);

    // I♯_Y: reads become copies, writes become assignments to `a.x`.
    let mut body = Command {
        bool_assigns: split.iy.bool_assigns.clone(),
        ..Command::default()
    };
    for (z, rhs) in &split.iy.data_assigns {
        let rhs = match rhs {
            DataAssign::Read { array, index } => DataAssign::Copy(ax_name(array, index)),
            other => other.clone(),
        };
        body.data_assigns.push((z.clone(), rhs));
    }
    let mut appended = Vec::new();
    let mut writes: Vec<&ArrayWrite> = split.iy.array_writes.iter().collect();
    writes.sort_by_key(|w| p.arrays.iter().position(|a| *a == w.array));
    for w in &writes {
        body.data_assigns
            .push((ax_name(&w.array, &w.index), DataAssign::Copy(w.value.clone())));
    }
    for w in &writes {
        for x2 in p.xvars.iter().filter(|x2| **x2 != w.index) {
            appended.push((
                BoolExpr::eq(&w.index, x2),
                Command {
                    data_assigns: vec![(
                        ax_name(&w.array, x2),
                        DataAssign::Copy(ax_name(&w.array, &w.index)),
                    )],
                    ..Command::default()
                },
            ));
        }
    }

    if !split.ix.is_empty() {
        // I♯_X: X assignments drag their array copies along.
        let mut ix = Command::default();
        for (x, rhs) in &split.ix.data_assigns {
            ix.data_assigns.push((x.clone(), rhs.clone()));
            for a in &p.arrays {
                let r = match rhs {
                    DataAssign::Copy(src) => DataAssign::Copy(ax_name(a, src)),
                    _ => DataAssign::Choose,
                };
                ix.data_assigns.push((ax_name(a, x), r));
            }
        }
        appended.push((BoolExpr::True, ix));

        let dice: Vec<&String> = p
            .xvars
            .iter()
            .filter(|x| {
                split
                    .ix
                    .data_assigns
                    .iter()
                    .any(|(z, r)| z == *x && *r == DataAssign::Choose)
            })
            .collect();
        let copy_all = |to: &str, from: &str| Command {
            data_assigns: p
                .arrays
                .iter()
                .map(|a| (ax_name(a, to), DataAssign::Copy(ax_name(a, from))))
                .collect(),
            ..Command::default()
        };
        // A fresh input that equals a non-input variable sees its entries.
        for x in &dice {
            for x2 in p.xvars.iter().filter(|x2| !dice.contains(x2)) {
                appended.push((BoolExpr::eq(*x, x2), copy_all(x, x2)));
            }
        }
        // Inputs that coincide see the same entries.
        for i in 0..dice.len() {
            for j in 0..i {
                appended.push((BoolExpr::eq(dice[i], dice[j]), copy_all(dice[i], dice[j])));
            }
        }
    }
    GuardedCommand {
        guard: gc.guard.clone(),
        body,
        appended,
    }
}

/// The array-free abstraction `P♯`. New variables follow the original Y
/// variables, ordered by array then X variable.
pub fn translate_program(p: &Program) -> Result<Program, Error> {
    if let Some(i) = p.commands.iter().position(|gc| !gc.is_plain()) {
        return Err(Error::NotPlain(i + 1));
    }
    if p.arrays.is_empty() {
        return Ok(p.clone());
    }
    let mut yvars = p.yvars.clone();
    for a in &p.arrays {
        for x in &p.xvars {
            yvars.push(ax_name(a, x));
        }
    }
    Ok(Program {
        type_names: p.type_names.clone(),
        booleans: p.booleans.clone(),
        xvars: p.xvars.clone(),
        yvars,
        arrays: Vec::new(),
        init: p.init.clone(),
        commands: p.commands.iter().map(|gc| translate_command(p, gc)).collect(),
    })
}

/// Array consistency: `x = x' ⇒ ⋀_a a.x = a.x'` over unordered pairs of X
/// variables. Literal `true` when there is at most one X variable or no
/// array.
pub fn sigma(p: &Program) -> BoolExpr {
    let mut parts = Vec::new();
    if !p.arrays.is_empty() {
        for (i, x) in p.xvars.iter().enumerate() {
            for x2 in &p.xvars[i + 1..] {
                let same = BoolExpr::conj(
                    p.arrays
                        .iter()
                        .map(|a| BoolExpr::eq(ax_name(a, x), ax_name(a, x2))),
                );
                parts.push(BoolExpr::implies(BoolExpr::eq(x, x2), same));
            }
        }
    }
    BoolExpr::conj(parts)
}

/// `n_i · (3·n_a·n_x²/4 + 2)`, the segment bound for a translated program.
pub fn segment_bound(p: &Program) -> f64 {
    let pr = p.count_profile();
    pr.commands as f64 * (3.0 * pr.arrays as f64 * (pr.xvars * pr.xvars) as f64 / 4.0 + 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{load_program, print_expr};

    #[test]
    fn split_examples() {
        let p = load_program("types X Y bool b xvar x yvar y array a").unwrap();
        let c = Command {
            bool_assigns: vec![("b".into(), BoolExpr::True)],
            data_assigns: vec![("x".into(), DataAssign::Choose)],
            ..Command::default()
        };
        let s = split_command(&p, &c);
        assert_eq!(s.ix.data_assigns, vec![("x".to_string(), DataAssign::Choose)]);
        assert_eq!(s.iy.bool_assigns.len(), 1);
        assert!(s.iy.data_assigns.is_empty());
    }

    #[test]
    fn write_appendage() {
        let p = load_program("types X Y xvar x x2 yvar y array a trans true -> a[x] := y").unwrap();
        let t = translate_command(&p, &p.commands[0]);
        assert_eq!(
            t.body.data_assigns,
            vec![("a.x".to_string(), DataAssign::Copy("y".into()))]
        );
        assert_eq!(t.appended.len(), 1);
        assert_eq!(t.appended[0].0, BoolExpr::eq("x", "x2"));
        assert_eq!(
            t.appended[0].1.data_assigns,
            vec![("a.x2".to_string(), DataAssign::Copy("a.x".into()))]
        );
    }

    #[test]
    fn read_becomes_copy() {
        let p = load_program("types X Y xvar x x2 yvar y array a trans true -> y := a[x]").unwrap();
        let t = translate_command(&p, &p.commands[0]);
        assert_eq!(
            t.body.data_assigns,
            vec![("y".to_string(), DataAssign::Copy("a.x".into()))]
        );
        assert!(t.appended.is_empty());
    }

    #[test]
    fn array_free_is_identity() {
        let p = load_program("types X Y bool b xvar x trans b -> x := ?").unwrap();
        assert_eq!(translate_program(&p).unwrap(), p);
        assert_eq!(sigma(&p), BoolExpr::True);
    }

    #[test]
    fn two_dice_segments() {
        let p = load_program("types X Y xvar x1 x2 array a trans true -> x1 := ?, x2 := ?").unwrap();
        let t = translate_program(&p).unwrap();
        // Body, the X segment, and one second-family appendage.
        assert_eq!(t.segment_count(), 3);
        assert!(t.segment_count() as f64 <= segment_bound(&p));
    }

    #[test]
    fn sigma_shapes() {
        let one = load_program("types X Y xvar x array a").unwrap();
        assert_eq!(sigma(&one), BoolExpr::True);
        let two = load_program("types X Y xvar x x2 array a b").unwrap();
        assert_eq!(
            print_expr(&sigma(&two)),
            "x = x2 => (a.x = a.x2 & b.x = b.x2)"
        );
    }

    #[test]
    fn appended_input_rejected() {
        let p = load_program("types X Y bool b trans true -> b := true : b -> b := false").unwrap();
        assert!(matches!(translate_program(&p), Err(Error::NotPlain(1))));
    }
}
