//! Partial-functions semantics over infinite `X` and `Y`. Arrays are finite
//! maps; an entry at an index that enters the state through `x := ?` is
//! unspecified and fans out over every known `Y` value plus a fresh one.
//!
//! States are kept pruned (array entries only at held `X` values) and
//! canonical (ids renumbered by first occurrence), which makes the reachable
//! system finite.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::lang::compile::{compile, compile_expr, CCommand, Compiled, Env, XRhs, YRhs};
use crate::lang::{BoolExpr, Program};
use crate::ts::{explore, ExploreOptions, Explored, Scope};
use crate::valuation::{enumerate, Domain};
use crate::Error;

/// An unpruned partial state with arbitrary value ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RawPartial {
    pub bools: Vec<bool>,
    pub xvals: Vec<u32>,
    pub yvals: Vec<u32>,
    pub arrays: Vec<BTreeMap<u32, u32>>,
}

impl Env for RawPartial {
    fn b(&self, i: usize) -> bool {
        self.bools[i]
    }
    fn x(&self, i: usize) -> u32 {
        self.xvals[i]
    }
    fn y(&self, i: usize) -> u32 {
        self.yvals[i]
    }
}

impl RawPartial {
    /// X ids appearing anywhere in the state.
    pub fn x_ids(&self) -> BTreeSet<u32> {
        let mut s: BTreeSet<u32> = self.xvals.iter().copied().collect();
        for a in &self.arrays {
            s.extend(a.keys().copied());
        }
        s
    }

    /// Y ids appearing anywhere in the state.
    pub fn y_ids(&self) -> BTreeSet<u32> {
        let mut s: BTreeSet<u32> = self.yvals.iter().copied().collect();
        for a in &self.arrays {
            s.extend(a.values().copied());
        }
        s
    }

    /// Drops array entries at indices no X variable holds, then renumbers
    /// X ids by first occurrence over the X variables and Y ids by first
    /// occurrence over the Y variables followed by each array's entries in
    /// ascending X id order.
    pub fn canonicalize(&self) -> Result<RawPartial, Error> {
        let mut xmap: Vec<(u32, u32)> = Vec::new();
        for &v in &self.xvals {
            if !xmap.iter().any(|(k, _)| *k == v) {
                xmap.push((v, xmap.len() as u32));
            }
        }
        let mut ymap: BTreeMap<u32, u32> = BTreeMap::new();
        let mut rename_y = |v: u32| {
            let n = ymap.len() as u32;
            *ymap.entry(v).or_insert(n)
        };
        let yvals: Vec<u32> = self.yvals.iter().map(|&v| rename_y(v)).collect();
        let mut arrays = Vec::with_capacity(self.arrays.len());
        for (k, a) in self.arrays.iter().enumerate() {
            let mut m = BTreeMap::new();
            for &(old, new) in &xmap {
                let val = a.get(&old).ok_or_else(|| {
                    Error::Replay(format!("array {k} undefined at a held X value"))
                })?;
                m.insert(new, *val);
            }
            arrays.push(m);
        }
        for m in &mut arrays {
            for v in m.values_mut() {
                *v = rename_y(*v);
            }
        }
        Ok(RawPartial {
            bools: self.bools.clone(),
            xvals: self
                .xvals
                .iter()
                .map(|v| xmap.iter().find(|(k, _)| k == v).unwrap().1)
                .collect(),
            yvals,
            arrays,
        })
    }
}

/// A pruned canonical partial state, packed: booleans, X ids, Y ids, then
/// each array's entries at X ids `0..k` where `k` is the number of held X
/// values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialState(Box<[u8]>);

/// Compiled program under the partial-functions semantics.
#[derive(Clone, Debug)]
pub struct Partial {
    pub program: Program,
    compiled: Compiled,
}

/// Fresh-value policy for one step: the ids a die may reuse, and the first
/// id beyond every id in use.
struct Universe {
    xs: Vec<u32>,
    ys: Vec<u32>,
    next_x: u32,
    next_y: u32,
}

impl Universe {
    fn of(s: &RawPartial) -> Universe {
        let xs: Vec<u32> = s.x_ids().into_iter().collect();
        let ys: Vec<u32> = s.y_ids().into_iter().collect();
        Universe {
            next_x: xs.last().map_or(0, |v| v + 1),
            next_y: ys.last().map_or(0, |v| v + 1),
            xs,
            ys,
        }
    }
}

/// Every way of choosing `n` values, each either from `known`, a fresh id
/// already chosen earlier, or the next fresh id.
fn joint_choices(n: usize, known: &[u32], first_fresh: u32) -> Vec<Vec<u32>> {
    fn go(n: usize, known: &[u32], next: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for &v in known {
            cur.push(v);
            go(n, known, next, cur, out);
            cur.pop();
        }
        // Fresh ids are those at or beyond `next`; a die may repeat one or
        // open the next.
        let upto = cur.iter().filter(|v| **v >= next).max().map_or(next, |t| t + 1);
        for v in next..=upto {
            cur.push(v);
            go(n, known, next, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, known, first_fresh, &mut Vec::with_capacity(n), &mut out);
    out
}

impl Partial {
    pub fn new(p: &Program) -> Result<Self, Error> {
        let compiled = compile(p)?;
        if compiled.nx > 255 || compiled.ny + compiled.na * compiled.nx > 255 {
            return Err(Error::Name("too many data variables for the partial semantics".into()));
        }
        Ok(Partial {
            program: p.clone(),
            compiled,
        })
    }

    pub fn command_count(&self) -> usize {
        self.compiled.commands.len()
    }

    pub fn pack(&self, s: &RawPartial) -> Result<PartialState, Error> {
        let c = s.canonicalize()?;
        let mut v: Vec<u8> = c.bools.iter().map(|&b| b as u8).collect();
        v.extend(c.xvals.iter().chain(&c.yvals).map(|&x| x as u8));
        for a in &c.arrays {
            v.extend(a.values().map(|&y| y as u8));
        }
        Ok(PartialState(v.into_boxed_slice()))
    }

    pub fn unpack(&self, s: &PartialState) -> RawPartial {
        let c = &self.compiled;
        let d = &s.0;
        let bools = d[..c.nb].iter().map(|&b| b != 0).collect();
        let xvals: Vec<u32> = d[c.nb..c.nb + c.nx].iter().map(|&x| x as u32).collect();
        let yo = c.nb + c.nx;
        let yvals = d[yo..yo + c.ny].iter().map(|&y| y as u32).collect();
        let k = xvals.iter().map(|v| v + 1).max().unwrap_or(0) as usize;
        let mut at = yo + c.ny;
        let arrays = (0..c.na)
            .map(|_| {
                let m = (0..k).map(|i| (i as u32, d[at + i] as u32)).collect();
                at += k;
                m
            })
            .collect();
        RawPartial {
            bools,
            xvals,
            yvals,
            arrays,
        }
    }

    pub fn bool(&self, s: &PartialState, i: usize) -> bool {
        s.0[i] != 0
    }

    pub fn guard_holds(&self, s: &RawPartial, cmd: usize) -> bool {
        self.compiled.commands[cmd].guard.eval(s)
    }

    /// `Δ*_I` for one segment over raw states. Dice and unspecified entries
    /// pick from `u` or fresh ids beyond it.
    fn apply(&self, s: &RawPartial, cmd: &CCommand, u: &Universe) -> Vec<RawPartial> {
        let x_dice: Vec<usize> = cmd
            .xs
            .iter()
            .filter(|(_, r)| *r == XRhs::Choose)
            .map(|(x, _)| *x)
            .collect();
        let y_dice: Vec<usize> = cmd
            .ys
            .iter()
            .filter(|(_, r)| *r == YRhs::Choose)
            .map(|(y, _)| *y)
            .collect();
        let mut base = s.clone();
        for (b, e) in &cmd.bools {
            base.bools[*b] = e.eval(s);
        }
        for &(x, rhs) in &cmd.xs {
            if let XRhs::Copy(src) = rhs {
                base.xvals[x] = s.xvals[src];
            }
        }
        for &(y, rhs) in &cmd.ys {
            match rhs {
                YRhs::Copy(src) => base.yvals[y] = s.yvals[src],
                YRhs::Read { array, index } => {
                    base.yvals[y] = s.arrays[array][&s.xvals[index]];
                }
                YRhs::Choose => {}
            }
        }
        for w in &cmd.writes {
            base.arrays[w.array].insert(s.xvals[w.index], s.yvals[w.value]);
        }
        let mut out = Vec::new();
        for xc in joint_choices(x_dice.len(), &u.xs, u.next_x) {
            let mut t = base.clone();
            for (&x, &v) in x_dice.iter().zip(&xc) {
                t.xvals[x] = v;
            }
            // Entries at indices that just entered the state are unspecified.
            let mut holes: Vec<(usize, u32)> = Vec::new();
            for (k, a) in t.arrays.iter().enumerate() {
                let held: BTreeSet<u32> = t.xvals.iter().copied().collect();
                for v in held {
                    if !a.contains_key(&v) {
                        holes.push((k, v));
                    }
                }
            }
            for yc in joint_choices(y_dice.len() + holes.len(), &u.ys, u.next_y) {
                let mut r = t.clone();
                for (&y, &v) in y_dice.iter().zip(&yc) {
                    r.yvals[y] = v;
                }
                for (&(k, idx), &v) in holes.iter().zip(&yc[y_dice.len()..]) {
                    r.arrays[k].insert(idx, v);
                }
                out.push(r);
            }
        }
        out
    }

    /// Raw `Δ*` successors through command `cmd`'s chain without pruning
    /// or renaming; fresh values get ids beyond those in `s`.
    pub fn step_raw(&self, s: &RawPartial, cmd: usize) -> Result<Vec<RawPartial>, Error> {
        if !self.guard_holds(s, cmd) {
            return Err(Error::GuardFalse(cmd));
        }
        let segments = &self.compiled.commands[cmd].segments;
        let mut cur = self.apply(s, &segments[0].1, &Universe::of(s));
        for (g, c) in &segments[1..] {
            let mut next = Vec::new();
            for t in cur {
                if g.eval(&t) {
                    next.extend(self.apply(&t, c, &Universe::of(&t)));
                } else {
                    next.push(t);
                }
            }
            cur = next;
        }
        let mut seen = HashSet::new();
        cur.retain(|t| seen.insert(t.clone()));
        Ok(cur)
    }

    /// Raw successors where dice may pick any id below `(ux, uy)` or fresh
    /// ids from `(ux, uy)` upward. Used to lift canonical executions to
    /// executions over one global set of values.
    pub fn step_in_universe(
        &self,
        s: &RawPartial,
        cmd: usize,
        ux: u32,
        uy: u32,
    ) -> Result<Vec<RawPartial>, Error> {
        if !self.guard_holds(s, cmd) {
            return Err(Error::GuardFalse(cmd));
        }
        let universe = |t: &RawPartial| {
            let tu = Universe::of(t);
            Universe {
                xs: (0..ux.max(tu.next_x)).collect(),
                ys: (0..uy.max(tu.next_y)).collect(),
                next_x: ux.max(tu.next_x),
                next_y: uy.max(tu.next_y),
            }
        };
        let segments = &self.compiled.commands[cmd].segments;
        let mut cur = self.apply(s, &segments[0].1, &universe(s));
        for (g, c) in &segments[1..] {
            let mut next = Vec::new();
            for t in cur {
                if g.eval(&t) {
                    next.extend(self.apply(&t, c, &universe(&t)));
                } else {
                    next.push(t);
                }
            }
            cur = next;
        }
        let mut seen = HashSet::new();
        cur.retain(|t| seen.insert(t.clone()));
        Ok(cur)
    }

    /// Pruned canonical successors through one command.
    pub fn step_command(&self, s: &PartialState, cmd: usize) -> Result<Vec<PartialState>, Error> {
        let raw = self.unpack(s);
        if !self.guard_holds(&raw, cmd) {
            return Err(Error::GuardFalse(cmd));
        }
        Ok(self.chain(&raw, cmd))
    }

    fn chain(&self, raw: &RawPartial, cmd: usize) -> Vec<PartialState> {
        let segments = &self.compiled.commands[cmd].segments;
        let canon = |t: &RawPartial| t.canonicalize().expect("steps preserve definedness");
        let mut cur: Vec<RawPartial> = self
            .apply(raw, &segments[0].1, &Universe::of(raw))
            .iter()
            .map(canon)
            .collect();
        for (g, c) in &segments[1..] {
            let mut next = Vec::new();
            let mut seen = HashSet::new();
            for t in cur {
                let outs = if g.eval(&t) {
                    self.apply(&t, c, &Universe::of(&t)).iter().map(canon).collect()
                } else {
                    vec![t]
                };
                for o in outs {
                    if seen.insert(o.clone()) {
                        next.push(o);
                    }
                }
            }
            cur = next;
        }
        let mut seen = HashSet::new();
        cur.iter()
            .map(|t| self.pack(t).expect("canonical"))
            .filter(|t| seen.insert(t.clone()))
            .collect()
    }

    pub fn successors(&self, s: &PartialState) -> Vec<PartialState> {
        let raw = self.unpack(s);
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for i in 0..self.compiled.commands.len() {
            if self.guard_holds(&raw, i) {
                for t in self.chain(&raw, i) {
                    if seen.insert(t.clone()) {
                        out.push(t);
                    }
                }
            }
        }
        out
    }

    /// Every canonical state satisfying `constraint`.
    pub fn states_satisfying(&self, constraint: &BoolExpr) -> Result<Vec<PartialState>, Error> {
        let e = compile_expr(&self.program, constraint)?;
        let c = &self.compiled;
        let mut out = Vec::new();
        enumerate((c.nb, c.nx, c.ny), Domain::Rgs, Domain::Rgs, &e, |b, x, y| {
            let k = x.iter().map(|v| v + 1).max().unwrap_or(0) as usize;
            let mut cells = Vec::new();
            extend_rgs(y, c.na * k, &mut cells, &mut |cells| {
                let mut v: Vec<u8> = b.iter().map(|&v| v as u8).collect();
                v.extend(x.iter().chain(y).chain(cells.iter()).map(|&v| v as u8));
                out.push(PartialState(v.into_boxed_slice()));
            });
        });
        Ok(out)
    }

    pub fn describe(&self, s: &PartialState) -> String {
        describe_raw(&self.program, &self.unpack(s))
    }
}

/// Every continuation of the restricted-growth string `prefix` by `n` more
/// values.
fn extend_rgs(prefix: &[u32], n: usize, cur: &mut Vec<u32>, emit: &mut impl FnMut(&[u32])) {
    if cur.len() == n {
        emit(cur);
        return;
    }
    let top = prefix
        .iter()
        .chain(cur.iter())
        .map(|v| v + 1)
        .max()
        .unwrap_or(0);
    for v in 0..=top {
        cur.push(v);
        extend_rgs(prefix, n, cur, emit);
        cur.pop();
    }
}

pub fn describe_raw(p: &Program, s: &RawPartial) -> String {
    let mut parts: Vec<String> = p
        .booleans
        .iter()
        .zip(&s.bools)
        .filter(|(_, &v)| v)
        .map(|(n, _)| n.clone())
        .collect();
    for (n, v) in p.xvars.iter().zip(&s.xvals) {
        parts.push(format!("{n}=x{v}"));
    }
    for (n, v) in p.yvars.iter().zip(&s.yvals) {
        parts.push(format!("{n}=y{v}"));
    }
    for (n, a) in p.arrays.iter().zip(&s.arrays) {
        let cells: Vec<String> = a.iter().map(|(k, v)| format!("x{k}:y{v}")).collect();
        parts.push(format!("{n}={{{}}}", cells.join(",")));
    }
    parts.join(" ")
}

/// `⟦P⟧*` over pruned canonical states within `scope`.
pub fn build_partial_ts(
    p: &Program,
    scope: &Scope,
    opts: ExploreOptions,
) -> Result<(Partial, Explored<PartialState>), Error> {
    let sem = Partial::new(p)?;
    let roots = sem.states_satisfying(&scope.constraint())?;
    if roots.len() > opts.max_states {
        return Err(Error::StateCap {
            cap: opts.max_states,
            what: "partial-functions transition system",
        });
    }
    let explored = explore(
        roots,
        |s| sem.successors(s),
        p.booleans.clone(),
        |s, i| s.0[i] != 0,
        opts,
        "partial-functions transition system",
    )?;
    Ok((sem, explored))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::load_program;

    fn raw(x: &[u32], y: &[u32], arrays: &[&[(u32, u32)]]) -> RawPartial {
        RawPartial {
            bools: vec![],
            xvals: x.to_vec(),
            yvals: y.to_vec(),
            arrays: arrays.iter().map(|a| a.iter().copied().collect()).collect(),
        }
    }

    #[test]
    fn canonicalize_prunes_and_renames() {
        let s = raw(&[7], &[9], &[&[(7, 9), (3, 1)]]);
        let c = s.canonicalize().unwrap();
        assert_eq!(c, raw(&[0], &[0], &[&[(0, 0)]]));
        assert_eq!(c.canonicalize().unwrap(), c);
    }

    #[test]
    fn canonicalize_rejects_undefined_entries() {
        let s = raw(&[1], &[], &[&[(0, 0)]]);
        assert!(s.canonicalize().is_err());
    }

    #[test]
    fn joint_choice_patterns() {
        // Two dice over one known value: each reuses it or goes fresh,
        // and two fresh picks may coincide or differ.
        let c = joint_choices(2, &[0], 1);
        assert_eq!(c.len(), 5);
        assert_eq!(joint_choices(0, &[0, 1], 2), vec![Vec::<u32>::new()]);
        assert_eq!(joint_choices(3, &[], 0).len(), 5);
    }

    #[test]
    fn read_takes_entry_at_index() {
        let p = load_program("types X Y xvar x yvar y z array a trans true -> y := a[x]").unwrap();
        let sem = Partial::new(&p).unwrap();
        let s = raw(&[0], &[0, 1], &[&[(0, 1)]]);
        let t = sem.step_raw(&s, 0).unwrap();
        assert_eq!(t, vec![raw(&[0], &[1, 1], &[&[(0, 1)]])]);
    }

    #[test]
    fn write_updates_entry() {
        let p = load_program("types X Y xvar x yvar y array a trans true -> a[x] := y").unwrap();
        let sem = Partial::new(&p).unwrap();
        let s = raw(&[0], &[1], &[&[(0, 0)]]);
        assert_eq!(sem.step_raw(&s, 0).unwrap(), vec![raw(&[0], &[1], &[&[(0, 1)]])]);
    }

    #[test]
    fn fresh_index_fans_out() {
        let p = load_program("types X Y xvar x array a trans true -> x := ?").unwrap();
        let sem = Partial::new(&p).unwrap();
        let s = raw(&[0], &[], &[&[(0, 0)]]);
        let raw_succ = sem.step_raw(&s, 0).unwrap();
        // Same index, or a fresh index whose entry is the old value or fresh.
        assert_eq!(raw_succ.len(), 3);
        // Pruning forgets the old index, so all three coincide.
        let packed = sem.pack(&s).unwrap();
        assert_eq!(sem.step_command(&packed, 0).unwrap(), vec![packed]);
    }

    #[test]
    fn roots_follow_canonical_order() {
        let p = load_program("types X Y xvar x x2 yvar y array a").unwrap();
        let sem = Partial::new(&p).unwrap();
        let roots = sem.states_satisfying(&BoolExpr::True).unwrap();
        // x = x2: one index, y and one entry: Bell(2) = 2.
        // x != x2: two entries and y: Bell(3) = 5.
        assert_eq!(roots.len(), 7);
        for r in &roots {
            let u = sem.unpack(r);
            assert_eq!(sem.pack(&u).unwrap(), *r);
        }
    }
}
