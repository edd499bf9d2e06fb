//! Equality-pattern quotient of an array-free program over infinite `X` and
//! `Y`. A state is a boolean valuation plus the partition of the X variables
//! and of the Y variables into equal-value blocks; since only equalities are
//! observable, this is a finite system bisimilar to the infinite one.

use std::collections::HashSet;
use std::fmt;

use crate::lang::compile::{compile, compile_expr, CCommand, Compiled, Env, XRhs, YRhs};
use crate::lang::{BoolExpr, Program};
use crate::ts::{explore, ExploreOptions, Explored};
use crate::valuation::{bell, enumerate, rgs, Domain};
use crate::Error;

/// A partition of a variable list, as a restricted-growth string: entry `i`
/// is the block of variable `i`, blocks numbered by least member.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EqualityPattern(pub Vec<u32>);

impl EqualityPattern {
    /// Pattern of arbitrary values.
    pub fn of(values: &[u32]) -> Self {
        EqualityPattern(rgs(values))
    }

    pub fn block_count(&self) -> usize {
        self.0.iter().map(|b| *b as usize + 1).max().unwrap_or(0)
    }

    /// Blocks as lists of names, in canonical order.
    pub fn blocks<'a>(&self, names: &'a [String]) -> Vec<Vec<&'a str>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (n, &b) in names.iter().zip(&self.0) {
            out[b as usize].push(n.as_str());
        }
        out
    }

    pub fn render(&self, names: &[String]) -> String {
        self.blocks(names)
            .iter()
            .map(|b| b.join(" "))
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Booleans, X pattern and Y pattern packed as bytes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalState(Box<[u8]>);

#[derive(Clone, Debug)]
struct Work {
    b: Vec<bool>,
    x: Vec<u32>,
    y: Vec<u32>,
}

impl Env for Work {
    fn b(&self, i: usize) -> bool {
        self.b[i]
    }
    fn x(&self, i: usize) -> u32 {
        self.x[i]
    }
    fn y(&self, i: usize) -> u32 {
        self.y[i]
    }
}

impl Work {
    fn canonical(mut self) -> Work {
        self.x = rgs(&self.x);
        self.y = rgs(&self.y);
        self
    }
}

/// Joint dice outcomes: each die joins a block among `blocks` existing
/// ones, joins a block opened by an earlier die, or opens a new one.
fn dice_outcomes(n: usize, blocks: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for cur in out {
            let top = cur.iter().copied().filter(|&v| v >= blocks).max().map_or(blocks, |m| m + 1);
            for v in 0..=top {
                let mut c = cur.clone();
                c.push(v);
                next.push(c);
            }
        }
        out = next;
    }
    out
}

/// Compiled array-free program under the equality-pattern semantics.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub program: Program,
    compiled: Compiled,
}

impl Quotient {
    pub fn new(p: &Program) -> Result<Self, Error> {
        if !p.arrays.is_empty() {
            return Err(Error::Name(
                "the quotient needs an array-free program; translate it first".into(),
            ));
        }
        let compiled = compile(p)?;
        if compiled.nx > 255 || compiled.ny > 255 {
            return Err(Error::Name("too many data variables for the quotient".into()));
        }
        Ok(Quotient {
            program: p.clone(),
            compiled,
        })
    }

    fn pack(&self, w: &Work) -> CanonicalState {
        let mut v: Vec<u8> = w.b.iter().map(|&b| b as u8).collect();
        v.extend(w.x.iter().chain(&w.y).map(|&x| x as u8));
        CanonicalState(v.into_boxed_slice())
    }

    fn unpack(&self, s: &CanonicalState) -> Work {
        let c = &self.compiled;
        let d = &s.0;
        Work {
            b: d[..c.nb].iter().map(|&v| v != 0).collect(),
            x: d[c.nb..c.nb + c.nx].iter().map(|&v| v as u32).collect(),
            y: d[c.nb + c.nx..].iter().map(|&v| v as u32).collect(),
        }
    }

    /// Packs arbitrary values into their pattern state.
    pub fn state(&self, bools: &[bool], xs: &[u32], ys: &[u32]) -> CanonicalState {
        self.pack(
            &Work {
                b: bools.to_vec(),
                x: xs.to_vec(),
                y: ys.to_vec(),
            }
            .canonical(),
        )
    }

    pub fn bools(&self, s: &CanonicalState) -> Vec<bool> {
        self.unpack(s).b
    }

    pub fn x_pattern(&self, s: &CanonicalState) -> EqualityPattern {
        EqualityPattern(self.unpack(s).x)
    }

    pub fn y_pattern(&self, s: &CanonicalState) -> EqualityPattern {
        EqualityPattern(self.unpack(s).y)
    }

    pub fn guard_holds(&self, s: &CanonicalState, cmd: usize) -> bool {
        self.compiled.commands[cmd].guard.eval(&self.unpack(s))
    }

    pub fn eval(&self, s: &CanonicalState, e: &BoolExpr) -> Result<bool, Error> {
        Ok(compile_expr(&self.program, e)?.eval(&self.unpack(s)))
    }

    fn apply(&self, s: &Work, cmd: &CCommand) -> Vec<Work> {
        let mut base = s.clone();
        for (b, e) in &cmd.bools {
            base.b[*b] = e.eval(s);
        }
        let mut xd = Vec::new();
        let mut yd = Vec::new();
        for &(x, rhs) in &cmd.xs {
            match rhs {
                XRhs::Copy(src) => base.x[x] = s.x[src],
                XRhs::Choose => xd.push(x),
            }
        }
        for &(y, rhs) in &cmd.ys {
            match rhs {
                YRhs::Copy(src) => base.y[y] = s.y[src],
                YRhs::Choose => yd.push(y),
                YRhs::Read { .. } => unreachable!("array-free program"),
            }
        }
        let xblocks = s.x.iter().map(|v| v + 1).max().unwrap_or(0);
        let yblocks = s.y.iter().map(|v| v + 1).max().unwrap_or(0);
        let mut out = Vec::new();
        for xc in dice_outcomes(xd.len(), xblocks) {
            for yc in dice_outcomes(yd.len(), yblocks) {
                let mut t = base.clone();
                for (&x, &v) in xd.iter().zip(&xc) {
                    t.x[x] = v;
                }
                for (&y, &v) in yd.iter().zip(&yc) {
                    t.y[y] = v;
                }
                out.push(t.canonical());
            }
        }
        out
    }

    fn chain(&self, s: &Work, cmd: usize) -> Vec<CanonicalState> {
        let segments = &self.compiled.commands[cmd].segments;
        let mut cur = self.apply(s, &segments[0].1);
        for (g, c) in &segments[1..] {
            let mut next = Vec::new();
            for t in cur {
                if g.eval(&t) {
                    next.extend(self.apply(&t, c));
                } else {
                    next.push(t);
                }
            }
            cur = next;
        }
        let mut seen = HashSet::new();
        cur.iter()
            .map(|w| self.pack(w))
            .filter(|t| seen.insert(t.clone()))
            .collect()
    }

    pub fn step_command(&self, s: &CanonicalState, cmd: usize) -> Result<Vec<CanonicalState>, Error> {
        if !self.guard_holds(s, cmd) {
            return Err(Error::GuardFalse(cmd));
        }
        Ok(self.chain(&self.unpack(s), cmd))
    }

    pub fn successors(&self, s: &CanonicalState) -> Vec<CanonicalState> {
        let w = self.unpack(s);
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (i, gc) in self.compiled.commands.iter().enumerate() {
            if gc.guard.eval(&w) {
                for t in self.chain(&w, i) {
                    if seen.insert(t.clone()) {
                        out.push(t);
                    }
                }
            }
        }
        out
    }

    /// Every pattern state satisfying `constraint`.
    pub fn enumerate_states(&self, constraint: &BoolExpr) -> Result<Vec<CanonicalState>, Error> {
        let e = compile_expr(&self.program, constraint)?;
        let c = &self.compiled;
        let mut out = Vec::new();
        enumerate((c.nb, c.nx, c.ny), Domain::Rgs, Domain::Rgs, &e, |b, x, y| {
            out.push(self.pack(&Work {
                b: b.to_vec(),
                x: x.to_vec(),
                y: y.to_vec(),
            }))
        });
        Ok(out)
    }

    /// `2^n_b · Bell(n_x) · Bell(n_y)`, the size of the whole pattern space.
    pub fn state_bound(&self) -> u128 {
        let c = &self.compiled;
        (1u128 << c.nb.min(127)) * bell(c.nx) * bell(c.ny)
    }

    pub fn describe(&self, s: &CanonicalState) -> String {
        let w = self.unpack(s);
        let p = &self.program;
        let bools: Vec<&str> = p
            .booleans
            .iter()
            .zip(&w.b)
            .filter(|(_, &v)| v)
            .map(|(n, _)| n.as_str())
            .collect();
        format!(
            "{}  ;  {}  ;  {}",
            bools.join(" "),
            EqualityPattern(w.x).render(&p.xvars),
            EqualityPattern(w.y).render(&p.yvars)
        )
    }
}

impl fmt::Display for EqualityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        f.write_str(&s.join(""))
    }
}

/// The quotient `M` of array-free `p` from every state satisfying
/// `constraint`, closed under successors.
pub fn build_quotient_ts(
    p: &Program,
    constraint: &BoolExpr,
    opts: ExploreOptions,
) -> Result<(Quotient, Explored<CanonicalState>), Error> {
    let q = Quotient::new(p)?;
    let roots = q.enumerate_states(constraint)?;
    if roots.len() > opts.max_states {
        return Err(Error::StateCap {
            cap: opts.max_states,
            what: "quotient transition system",
        });
    }
    let explored = explore(
        roots,
        |s| q.successors(s),
        p.booleans.clone(),
        |s, i| s.0[i] != 0,
        opts,
        "quotient transition system",
    )?;
    Ok((q, explored))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::load_program;

    #[test]
    fn dice_outcome_counts() {
        assert_eq!(dice_outcomes(0, 3), vec![Vec::<u32>::new()]);
        assert_eq!(dice_outcomes(1, 2).len(), 3);
        // Two dice with no existing blocks: equal or different.
        assert_eq!(dice_outcomes(2, 0).len(), 2);
        // Two dice, one existing block: 0/0, 0/1, 1/0, 1/1, 1/2.
        assert_eq!(dice_outcomes(2, 1).len(), 5);
    }

    #[test]
    fn enumerate_counts() {
        let p = load_program("types X Y bool b xvar x x2").unwrap();
        let q = Quotient::new(&p).unwrap();
        assert_eq!(q.enumerate_states(&BoolExpr::True).unwrap().len(), 4);
        let contradiction = BoolExpr::and(BoolExpr::var("b"), BoolExpr::not(BoolExpr::var("b")));
        assert!(q.enumerate_states(&contradiction).unwrap().is_empty());
    }

    #[test]
    fn copy_joins_block() {
        let p = load_program("types X Y xvar x x2 trans true -> x := x2").unwrap();
        let q = Quotient::new(&p).unwrap();
        let s = q.state(&[], &[0, 1], &[]);
        assert_eq!(q.step_command(&s, 0).unwrap(), vec![q.state(&[], &[0, 0], &[])]);
    }

    #[test]
    fn choose_joins_or_opens() {
        let p = load_program("types X Y xvar x x2 trans true -> x := ?").unwrap();
        let q = Quotient::new(&p).unwrap();
        let s = q.state(&[], &[0, 1], &[]);
        let mut t = q.step_command(&s, 0).unwrap();
        t.sort();
        let mut want = vec![q.state(&[], &[0, 0], &[]), q.state(&[], &[0, 1], &[])];
        want.sort();
        assert_eq!(t, want);
    }

    #[test]
    fn render_pattern() {
        let names: Vec<String> = ["x", "x'", "z"].iter().map(|s| s.to_string()).collect();
        assert_eq!(EqualityPattern::of(&[4, 9, 4]).render(&names), "x z|x'");
    }

    #[test]
    fn rejects_arrays() {
        let p = load_program("types X Y xvar x array a").unwrap();
        assert!(Quotient::new(&p).is_err());
    }
}
