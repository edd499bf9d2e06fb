//! Finite-instance semantics: `X` and `Y` are instantiated to `0..|A|` and
//! `0..|B|`, arrays are total functions.

use std::collections::HashSet;
use std::fmt;

use crate::lang::compile::{compile, compile_expr, CCommand, Compiled, Env, XRhs, YRhs};
use crate::lang::Program;
use crate::ts::{explore, ExploreOptions, Explored, Scope};
use crate::valuation::{enumerate, Domain};
use crate::Error;

/// Instance sizes `(|A|, |B|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Sizes {
    pub a: usize,
    pub b: usize,
}

impl Sizes {
    pub fn new(a: usize, b: usize) -> Self {
        Sizes { a, b }
    }
}

impl fmt::Display for Sizes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// Total valuation packed as bytes: booleans, X values, Y values, then each
/// array's `|A|` cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConcreteState(Box<[u8]>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Layout {
    nb: usize,
    nx: usize,
    ny: usize,
    na: usize,
    a: usize,
}

impl Layout {
    fn xo(&self) -> usize {
        self.nb
    }
    fn yo(&self) -> usize {
        self.nb + self.nx
    }
    fn ao(&self) -> usize {
        self.nb + self.nx + self.ny
    }
    fn len(&self) -> usize {
        self.ao() + self.na * self.a
    }
}

struct View<'a> {
    s: &'a [u8],
    l: Layout,
}

impl Env for View<'_> {
    fn b(&self, i: usize) -> bool {
        self.s[i] != 0
    }
    fn x(&self, i: usize) -> u32 {
        self.s[self.l.xo() + i] as u32
    }
    fn y(&self, i: usize) -> u32 {
        self.s[self.l.yo() + i] as u32
    }
}

/// Compiled program bound to instance sizes.
#[derive(Clone, Debug)]
pub struct Concrete {
    pub program: Program,
    compiled: Compiled,
    pub sizes: Sizes,
    layout: Layout,
}

impl Concrete {
    pub fn new(p: &Program, sizes: Sizes) -> Result<Self, Error> {
        if sizes.a == 0 || sizes.b == 0 {
            return Err(Error::Name("instance sizes must be at least 1".into()));
        }
        if sizes.a > 256 || sizes.b > 256 {
            return Err(Error::Name("instance sizes above 256 are not supported".into()));
        }
        let compiled = compile(p)?;
        let layout = Layout {
            nb: compiled.nb,
            nx: compiled.nx,
            ny: compiled.ny,
            na: compiled.na,
            a: sizes.a,
        };
        Ok(Concrete {
            program: p.clone(),
            compiled,
            sizes,
            layout,
        })
    }

    /// Packs a state from its components; `arrays[k][v]` is cell `v` of
    /// array `k`.
    pub fn state(&self, bools: &[bool], xs: &[u32], ys: &[u32], arrays: &[Vec<u32>]) -> ConcreteState {
        let l = self.layout;
        assert_eq!(
            (bools.len(), xs.len(), ys.len(), arrays.len()),
            (l.nb, l.nx, l.ny, l.na),
            "state shape does not match the program"
        );
        let mut v = Vec::with_capacity(l.len());
        v.extend(bools.iter().map(|&b| b as u8));
        for &x in xs {
            assert!((x as usize) < self.sizes.a, "X value out of range");
            v.push(x as u8);
        }
        for &y in ys.iter().chain(arrays.iter().flatten()) {
            assert!((y as usize) < self.sizes.b, "Y value out of range");
            v.push(y as u8);
        }
        assert!(arrays.iter().all(|a| a.len() == self.sizes.a), "array is not total");
        ConcreteState(v.into_boxed_slice())
    }

    pub fn bool(&self, s: &ConcreteState, i: usize) -> bool {
        s.0[i] != 0
    }
    pub fn x(&self, s: &ConcreteState, i: usize) -> u32 {
        s.0[self.layout.xo() + i] as u32
    }
    pub fn y(&self, s: &ConcreteState, i: usize) -> u32 {
        s.0[self.layout.yo() + i] as u32
    }
    pub fn cell(&self, s: &ConcreteState, array: usize, index: u32) -> u32 {
        s.0[self.layout.ao() + array * self.layout.a + index as usize] as u32
    }

    fn view<'a>(&self, s: &'a [u8]) -> View<'a> {
        View { s, l: self.layout }
    }

    pub fn eval_bool(&self, s: &ConcreteState, e: &crate::lang::BoolExpr) -> Result<bool, Error> {
        Ok(compile_expr(&self.program, e)?.eval(&self.view(&s.0)))
    }

    pub fn guard_holds(&self, s: &ConcreteState, cmd: usize) -> bool {
        self.compiled.commands[cmd].guard.eval(&self.view(&s.0))
    }

    /// `Δ_I` for one segment, appending every successor to `out`.
    fn apply(&self, s: &[u8], cmd: &CCommand, out: &mut Vec<Box<[u8]>>) {
        let l = self.layout;
        let env = self.view(s);
        let mut base = s.to_vec();
        let mut dice: Vec<(usize, u8)> = Vec::new();
        for (b, e) in &cmd.bools {
            base[*b] = e.eval(&env) as u8;
        }
        for &(x, rhs) in &cmd.xs {
            match rhs {
                XRhs::Copy(src) => base[l.xo() + x] = s[l.xo() + src],
                XRhs::Choose => dice.push((l.xo() + x, l.a as u8)),
            }
        }
        for &(y, rhs) in &cmd.ys {
            match rhs {
                YRhs::Copy(src) => base[l.yo() + y] = s[l.yo() + src],
                YRhs::Choose => dice.push((l.yo() + y, self.sizes.b as u8)),
                YRhs::Read { array, index } => {
                    base[l.yo() + y] = s[l.ao() + array * l.a + s[l.xo() + index] as usize]
                }
            }
        }
        for w in &cmd.writes {
            base[l.ao() + w.array * l.a + s[l.xo() + w.index] as usize] = s[l.yo() + w.value];
        }
        // Odometer over the dice.
        let mut digits = vec![0u8; dice.len()];
        loop {
            let mut t = base.clone();
            for (k, &(pos, _)) in dice.iter().enumerate() {
                t[pos] = digits[k];
            }
            out.push(t.into_boxed_slice());
            let mut k = 0;
            loop {
                if k == dice.len() {
                    return;
                }
                digits[k] += 1;
                if digits[k] < dice[k].1 {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
        }
    }

    fn run_chain(&self, s: &[u8], cmd: usize) -> Vec<ConcreteState> {
        let segments = &self.compiled.commands[cmd].segments;
        let mut cur: Vec<Box<[u8]>> = Vec::new();
        self.apply(s, &segments[0].1, &mut cur);
        for (g, c) in &segments[1..] {
            let mut next = Vec::new();
            for t in cur {
                if g.eval(&self.view(&t)) {
                    self.apply(&t, c, &mut next);
                } else {
                    next.push(t);
                }
            }
            cur = next;
        }
        let mut seen = HashSet::new();
        cur.into_iter()
            .filter(|t| seen.insert(t.clone()))
            .map(ConcreteState)
            .collect()
    }

    /// Successors of `s` through command `cmd` and its append chain.
    pub fn step_command(&self, s: &ConcreteState, cmd: usize) -> Result<Vec<ConcreteState>, Error> {
        if !self.guard_holds(s, cmd) {
            return Err(Error::GuardFalse(cmd));
        }
        Ok(self.run_chain(&s.0, cmd))
    }

    /// Union of the successors through every enabled command.
    pub fn successors(&self, s: &ConcreteState) -> Vec<ConcreteState> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for i in 0..self.compiled.commands.len() {
            if self.guard_holds(s, i) {
                for t in self.run_chain(&s.0, i) {
                    if seen.insert(t.clone()) {
                        out.push(t);
                    }
                }
            }
        }
        out
    }

    /// All states satisfying `constraint`.
    pub fn states_satisfying(&self, constraint: &crate::lang::BoolExpr) -> Result<Vec<ConcreteState>, Error> {
        let c = compile_expr(&self.program, constraint)?;
        let l = self.layout;
        let cells = l.na * l.a;
        let mut out = Vec::new();
        enumerate(
            (l.nb, l.nx, l.ny),
            Domain::Range(self.sizes.a as u32),
            Domain::Range(self.sizes.b as u32),
            &c,
            |b, x, y| {
                let mut head: Vec<u8> = b.iter().map(|&v| v as u8).collect();
                head.extend(x.iter().chain(y).map(|&v| v as u8));
                let mut digits = vec![0u8; cells];
                loop {
                    let mut t = head.clone();
                    t.extend_from_slice(&digits);
                    out.push(ConcreteState(t.into_boxed_slice()));
                    let mut k = 0;
                    loop {
                        if k == cells {
                            return;
                        }
                        digits[k] += 1;
                        if (digits[k] as usize) < self.sizes.b {
                            break;
                        }
                        digits[k] = 0;
                        k += 1;
                    }
                }
            },
        );
        Ok(out)
    }

    pub fn describe(&self, s: &ConcreteState) -> String {
        let p = &self.program;
        let mut parts: Vec<String> = p
            .booleans
            .iter()
            .enumerate()
            .filter(|(i, _)| self.bool(s, *i))
            .map(|(_, n)| n.clone())
            .collect();
        for (i, n) in p.xvars.iter().enumerate() {
            parts.push(format!("{n}={}", self.x(s, i)));
        }
        for (i, n) in p.yvars.iter().enumerate() {
            parts.push(format!("{n}={}", self.y(s, i)));
        }
        for (k, n) in p.arrays.iter().enumerate() {
            let cells: Vec<String> = (0..self.sizes.a as u32)
                .map(|v| self.cell(s, k, v).to_string())
                .collect();
            parts.push(format!("{n}=[{}]", cells.join(",")));
        }
        parts.join(" ")
    }
}

/// `⟦P⟧(A,B)` over `scope`; observables are the program's booleans.
pub fn build_ts(
    p: &Program,
    sizes: Sizes,
    scope: &Scope,
    opts: ExploreOptions,
) -> Result<(Concrete, Explored<ConcreteState>), Error> {
    let sem = Concrete::new(p, sizes)?;
    let roots = sem.states_satisfying(&scope.constraint())?;
    if roots.len() > opts.max_states {
        return Err(Error::StateCap {
            cap: opts.max_states,
            what: "concrete transition system",
        });
    }
    let explored = explore(
        roots,
        |s| sem.successors(s),
        p.booleans.clone(),
        |s, i| s.0[i] != 0,
        opts,
        "concrete transition system",
    )?;
    Ok((sem, explored))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{load_program, BoolExpr};

    fn prog(src: &str) -> Program {
        load_program(src).unwrap()
    }

    #[test]
    fn write_updates_one_cell() {
        let p = prog("types X Y xvar x yvar y array a trans true -> a[x] := y");
        let c = Concrete::new(&p, Sizes::new(2, 2)).unwrap();
        let s = c.state(&[], &[0], &[1], &[vec![0, 0]]);
        let t = c.step_command(&s, 0).unwrap();
        assert_eq!(t, vec![c.state(&[], &[0], &[1], &[vec![1, 0]])]);
    }

    #[test]
    fn dice_fan_out() {
        let p = prog("types X Y xvar x trans true -> x := ?");
        let c = Concrete::new(&p, Sizes::new(2, 1)).unwrap();
        let s = c.state(&[], &[0], &[], &[]);
        let t = c.step_command(&s, 0).unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn skipped_appendage() {
        // The appendage guard is false after the body, so only the body runs.
        let p = prog("types X Y bool b c trans true -> b := false : b -> c := true");
        let c = Concrete::new(&p, Sizes::new(1, 1)).unwrap();
        let s = c.state(&[true, false], &[], &[], &[]);
        assert_eq!(
            c.step_command(&s, 0).unwrap(),
            vec![c.state(&[false, false], &[], &[], &[])]
        );
        let p = prog("types X Y bool b c trans true -> b := true : b -> c := true");
        let c = Concrete::new(&p, Sizes::new(1, 1)).unwrap();
        assert_eq!(
            c.step_command(&s, 0).unwrap(),
            vec![c.state(&[true, true], &[], &[], &[])]
        );
    }

    #[test]
    fn guard_false_is_an_error() {
        let p = prog("types X Y bool b trans b -> b := false");
        let c = Concrete::new(&p, Sizes::new(1, 1)).unwrap();
        let s = c.state(&[false], &[], &[], &[]);
        assert!(matches!(c.step_command(&s, 0), Err(Error::GuardFalse(0))));
        assert!(c.successors(&s).is_empty());
    }

    #[test]
    fn eval_bool_examples() {
        let p = prog("types X Y bool b xvar x x2 yvar data1 data2");
        let c = Concrete::new(&p, Sizes::new(2, 2)).unwrap();
        let s = c.state(&[true], &[1, 1], &[0, 1], &[]);
        assert!(c.eval_bool(&s, &BoolExpr::eq("x", "x2")).unwrap());
        assert!(c
            .eval_bool(&s, &BoolExpr::not(BoolExpr::eq("data1", "data2")))
            .unwrap());
        assert!(c
            .eval_bool(&s, &BoolExpr::or(BoolExpr::False, BoolExpr::var("b")))
            .unwrap());
    }

    #[test]
    fn state_counts() {
        let p = prog("types X Y bool b");
        let (_, e) = build_ts(&p, Sizes::new(3, 3), &Scope::All, ExploreOptions::default()).unwrap();
        assert_eq!(e.ts.len(), 2);
        let p = prog("types X Y bool b xvar x array a");
        let (_, e) = build_ts(&p, Sizes::new(2, 2), &Scope::All, ExploreOptions::default()).unwrap();
        assert_eq!(e.ts.len(), 16);
    }

    #[test]
    fn toggle_is_deterministic() {
        let p = prog("types X Y bool b trans true -> b := ~b");
        let (_, e) = build_ts(&p, Sizes::new(1, 1), &Scope::All, ExploreOptions::default()).unwrap();
        for s in 0..e.ts.len() {
            assert_eq!(e.ts.successors(s).len(), 1);
        }
    }
}
