//! Modal μ-calculus over transition systems: syntax, fragments, duality,
//! Knaster–Tarski evaluation and witness paths for existential formulas.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::ts::TransitionSystem;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MuFormula {
    Prop(String),
    /// Negated observable `p̄`.
    NegProp(String),
    Var(String),
    Or(Box<MuFormula>, Box<MuFormula>),
    And(Box<MuFormula>, Box<MuFormula>),
    /// `∃◦φ`
    Ex(Box<MuFormula>),
    /// `∀◦φ`
    Ax(Box<MuFormula>),
    Mu(String, Box<MuFormula>),
    Nu(String, Box<MuFormula>),
}

use MuFormula as F;

impl MuFormula {
    pub fn prop(p: &str) -> Self {
        F::Prop(p.into())
    }
    pub fn neg(p: &str) -> Self {
        F::NegProp(p.into())
    }
    pub fn var(h: &str) -> Self {
        F::Var(h.into())
    }
    pub fn or(a: F, b: F) -> Self {
        F::Or(Box::new(a), Box::new(b))
    }
    pub fn and(a: F, b: F) -> Self {
        F::And(Box::new(a), Box::new(b))
    }
    pub fn ex(a: F) -> Self {
        F::Ex(Box::new(a))
    }
    pub fn ax(a: F) -> Self {
        F::Ax(Box::new(a))
    }
    pub fn mu(h: &str, a: F) -> Self {
        F::Mu(h.into(), Box::new(a))
    }
    pub fn nu(h: &str, a: F) -> Self {
        F::Nu(h.into(), Box::new(a))
    }

    /// Swaps `p`/`p̄`, `∨`/`∧`, `∃◦`/`∀◦` and `μ`/`ν`.
    pub fn dualize(&self) -> MuFormula {
        match self {
            F::Prop(p) => F::NegProp(p.clone()),
            F::NegProp(p) => F::Prop(p.clone()),
            F::Var(h) => F::Var(h.clone()),
            F::Or(a, b) => F::and(a.dualize(), b.dualize()),
            F::And(a, b) => F::or(a.dualize(), b.dualize()),
            F::Ex(a) => F::ax(a.dualize()),
            F::Ax(a) => F::ex(a.dualize()),
            F::Mu(h, a) => F::nu(h, a.dualize()),
            F::Nu(h, a) => F::mu(h, a.dualize()),
        }
    }

    fn any(&self, pred: &impl Fn(&MuFormula) -> bool) -> bool {
        pred(self)
            || match self {
                F::Prop(_) | F::NegProp(_) | F::Var(_) => false,
                F::Or(a, b) | F::And(a, b) => a.any(pred) || b.any(pred),
                F::Ex(a) | F::Ax(a) | F::Mu(_, a) | F::Nu(_, a) => a.any(pred),
            }
    }

    /// Existential fragment: no `p̄`, no `∀◦`.
    pub fn in_l2(&self) -> bool {
        !self.any(&|f| matches!(f, F::NegProp(_) | F::Ax(_)))
    }

    /// Existential conjunction-free fragment: additionally no `∧`, no `ν`.
    pub fn in_l4(&self) -> bool {
        !self.any(&|f| matches!(f, F::NegProp(_) | F::Ax(_) | F::And(..) | F::Nu(..)))
    }

    pub fn depth(&self) -> usize {
        match self {
            F::Prop(_) | F::NegProp(_) | F::Var(_) => 0,
            F::Or(a, b) | F::And(a, b) => 1 + a.depth().max(b.depth()),
            F::Ex(a) | F::Ax(a) | F::Mu(_, a) | F::Nu(_, a) => 1 + a.depth(),
        }
    }

    /// Observables mentioned, positively or negated.
    pub fn observables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let F::Prop(p) | F::NegProp(p) = f {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        });
        out
    }

    fn walk(&self, f: &mut impl FnMut(&MuFormula)) {
        f(self);
        match self {
            F::Prop(_) | F::NegProp(_) | F::Var(_) => {}
            F::Or(a, b) | F::And(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            F::Ex(a) | F::Ax(a) | F::Mu(_, a) | F::Nu(_, a) => a.walk(f),
        }
    }

    /// First unbound fixpoint variable, if any.
    pub fn free_variable(&self) -> Option<String> {
        fn go(f: &MuFormula, bound: &mut Vec<String>) -> Option<String> {
            match f {
                F::Var(h) => (!bound.contains(h)).then(|| h.clone()),
                F::Prop(_) | F::NegProp(_) => None,
                F::Or(a, b) | F::And(a, b) => go(a, bound).or_else(|| go(b, bound)),
                F::Ex(a) | F::Ax(a) => go(a, bound),
                F::Mu(h, a) | F::Nu(h, a) => {
                    bound.push(h.clone());
                    let r = go(a, bound);
                    bound.pop();
                    r
                }
            }
        }
        go(self, &mut Vec::new())
    }
}

fn prec(f: &MuFormula) -> u8 {
    match f {
        F::Mu(..) | F::Nu(..) => 0,
        F::Or(..) => 1,
        F::And(..) => 2,
        _ => 3,
    }
}

fn write_formula(f: &MuFormula, ctx: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let paren = prec(f) < ctx;
    if paren {
        out.write_str("(")?;
    }
    match f {
        F::Prop(p) | F::Var(p) => out.write_str(p)?,
        F::NegProp(p) => write!(out, "~{p}")?,
        F::Or(a, b) => {
            write_formula(a, 1, out)?;
            out.write_str(" | ")?;
            write_formula(b, 2, out)?;
        }
        F::And(a, b) => {
            write_formula(a, 2, out)?;
            out.write_str(" & ")?;
            write_formula(b, 3, out)?;
        }
        F::Ex(a) => {
            out.write_str("EX ")?;
            write_formula(a, 3, out)?;
        }
        F::Ax(a) => {
            out.write_str("AX ")?;
            write_formula(a, 3, out)?;
        }
        F::Mu(h, a) => {
            write!(out, "mu {h}. ")?;
            write_formula(a, 0, out)?;
        }
        F::Nu(h, a) => {
            write!(out, "nu {h}. ")?;
            write_formula(a, 0, out)?;
        }
    }
    if paren {
        out.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for MuFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, 0, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Fragment {
    /// Full logic; neither the formula nor its dual is existential.
    L1,
    L2,
    L4,
    #[serde(rename = "dualL2")]
    DualL2,
    #[serde(rename = "dualL4")]
    DualL4,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::L1 => "L1",
            Fragment::L2 => "L2",
            Fragment::L4 => "L4",
            Fragment::DualL2 => "dualL2",
            Fragment::DualL4 => "dualL4",
        })
    }
}

/// Most specific fragment, preferring the dual (universal) tags.
pub fn classify(f: &MuFormula) -> Fragment {
    let d = f.dualize();
    if d.in_l4() {
        Fragment::DualL4
    } else if d.in_l2() {
        Fragment::DualL2
    } else if f.in_l4() {
        Fragment::L4
    } else if f.in_l2() {
        Fragment::L2
    } else {
        Fragment::L1
    }
}

// ---------------------------------------------------------------- parsing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    Or,
    And,
    Dot,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, Error> {
    let err = |offset, message: &str| Error::FormulaSyntax {
        offset,
        message: message.into(),
    };
    let cs: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let (off, c) = cs[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '~' | '!' => Tok::Not,
            '|' => Tok::Or,
            '&' => Tok::And,
            '.' => Tok::Dot,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < cs.len() && (cs[i].1.is_ascii_alphanumeric() || cs[i].1 == '_' || cs[i].1 == '\'') {
                    i += 1;
                }
                let s: String = cs[start..i].iter().map(|(_, c)| c).collect();
                out.push((Tok::Ident(s), off));
                continue;
            }
            _ => return Err(err(off, &format!("unexpected character `{c}`"))),
        };
        out.push((tok, off));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    /// Binders in scope: surface name to renamed name.
    scope: Vec<(String, String)>,
    used: HashSet<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(_, o)| *o)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, Error> {
        Err(Error::FormulaSyntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, Error> {
        match self.peek() {
            Some(Tok::Ident(s)) if !is_reserved(s) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => self.fail("expected an identifier"),
        }
    }

    fn formula(&mut self) -> Result<MuFormula, Error> {
        let mut f = self.conj()?;
        while self.eat(&Tok::Or) {
            f = F::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<MuFormula, Error> {
        let mut f = self.unary()?;
        while self.eat(&Tok::And) {
            f = F::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<MuFormula, Error> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.at += 1;
                let name = self.ident()?;
                if self.scope.iter().any(|(s, _)| *s == name) {
                    return self.fail(format!("`~` applied to fixpoint variable `{name}`"));
                }
                Ok(F::NegProp(name))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let f = self.formula()?;
                if !self.eat(&Tok::RParen) {
                    return self.fail("expected `)`");
                }
                Ok(f)
            }
            Some(Tok::Ident(kw)) if kw == "EX" || kw == "AX" => {
                self.at += 1;
                let a = self.unary()?;
                Ok(if kw == "EX" { F::ex(a) } else { F::ax(a) })
            }
            Some(Tok::Ident(kw)) if kw == "mu" || kw == "nu" => {
                self.at += 1;
                let h = self.ident()?;
                if !self.eat(&Tok::Dot) {
                    return self.fail("expected `.` after the fixpoint variable");
                }
                let mut name = h.clone();
                while self.used.contains(&name) {
                    name.push('\'');
                }
                self.used.insert(name.clone());
                self.scope.push((h, name.clone()));
                let body = self.formula()?;
                self.scope.pop();
                Ok(if kw == "mu" {
                    F::Mu(name, Box::new(body))
                } else {
                    F::Nu(name, Box::new(body))
                })
            }
            Some(Tok::Ident(_)) => {
                let name = self.ident()?;
                match self.scope.iter().rev().find(|(s, _)| *s == name) {
                    Some((_, renamed)) => Ok(F::Var(renamed.clone())),
                    None => Ok(F::Prop(name)),
                }
            }
            _ => self.fail("expected a formula"),
        }
    }
}

fn is_reserved(s: &str) -> bool {
    matches!(s, "EX" | "AX" | "mu" | "nu")
}

/// Parses surface syntax: `p`, `~p`, `φ | φ`, `φ & φ`, `EX φ`, `AX φ`,
/// `mu h. φ`, `nu h. φ`. Binders reaching as far right as possible;
/// `&` binds tighter than `|`. Shadowing binders are renamed with primes.
pub fn parse_formula(src: &str) -> Result<MuFormula, Error> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
        end: src.len(),
        scope: Vec::new(),
        used: HashSet::new(),
    };
    let f = p.formula()?;
    if p.at != p.toks.len() {
        return p.fail("unexpected input after the formula");
    }
    Ok(f)
}

// ------------------------------------------------------------- evaluation

/// Iteration counts observed while evaluating.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EvalStats {
    /// Largest number of strict growth (μ) or shrink (ν) steps taken by
    /// any single fixpoint computation before it stabilised.
    pub max_fixpoint_iterations: usize,
    pub fixpoints_computed: usize,
}

struct Evaluator<'a> {
    ts: &'a TransitionSystem,
    stats: EvalStats,
}

impl Evaluator<'_> {
    fn ex(&self, x: &FixedBitSet) -> FixedBitSet {
        let n = self.ts.len();
        let mut out = FixedBitSet::with_capacity(n);
        for s in 0..n {
            if self.ts.successors(s).iter().any(|&t| x.contains(t as usize)) {
                out.insert(s);
            }
        }
        out
    }

    fn ax(&self, x: &FixedBitSet) -> FixedBitSet {
        let n = self.ts.len();
        let mut out = FixedBitSet::with_capacity(n);
        for s in 0..n {
            if self.ts.successors(s).iter().all(|&t| x.contains(t as usize)) {
                out.insert(s);
            }
        }
        out
    }

    fn eval(&mut self, f: &MuFormula, env: &mut Vec<(String, FixedBitSet)>) -> Result<FixedBitSet, Error> {
        let n = self.ts.len();
        Ok(match f {
            F::Prop(p) => self.ts.extent_of(p)?.clone(),
            F::NegProp(p) => {
                let mut s = self.ts.extent_of(p)?.clone();
                s.toggle_range(..);
                s
            }
            F::Var(h) => env
                .iter()
                .rev()
                .find(|(k, _)| k == h)
                .map(|(_, s)| s.clone())
                .ok_or_else(|| Error::OpenFormula(h.clone()))?,
            F::Or(a, b) => {
                let mut s = self.eval(a, env)?;
                s.union_with(&self.eval(b, env)?);
                s
            }
            F::And(a, b) => {
                let mut s = self.eval(a, env)?;
                s.intersect_with(&self.eval(b, env)?);
                s
            }
            F::Ex(a) => {
                let s = self.eval(a, env)?;
                self.ex(&s)
            }
            F::Ax(a) => {
                let s = self.eval(a, env)?;
                self.ax(&s)
            }
            F::Mu(h, a) | F::Nu(h, a) => {
                let mut cur = FixedBitSet::with_capacity(n);
                if matches!(f, F::Nu(..)) {
                    cur.insert_range(..);
                }
                let mut steps = 0;
                loop {
                    env.push((h.clone(), cur));
                    let next = self.eval(a, env);
                    cur = env.pop().unwrap().1;
                    let next = next?;
                    if next == cur {
                        break;
                    }
                    steps += 1;
                    cur = next;
                }
                self.stats.fixpoints_computed += 1;
                self.stats.max_fixpoint_iterations = self.stats.max_fixpoint_iterations.max(steps);
                cur
            }
        })
    }
}

/// `⟦f⟧` under `env`, by iteration from `∅` (μ) or `Q` (ν).
pub fn eval(ts: &TransitionSystem, f: &MuFormula, env: &[(String, FixedBitSet)]) -> Result<FixedBitSet, Error> {
    eval_with_stats(ts, f, env).map(|(s, _)| s)
}

pub fn eval_with_stats(
    ts: &TransitionSystem,
    f: &MuFormula,
    env: &[(String, FixedBitSet)],
) -> Result<(FixedBitSet, EvalStats), Error> {
    let mut ev = Evaluator {
        ts,
        stats: EvalStats::default(),
    };
    let mut env = env.to_vec();
    let s = ev.eval(f, &mut env)?;
    Ok((s, ev.stats))
}

/// Outcome of checking a closed formula on a set of start states.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub holds: bool,
    pub fragment: Fragment,
    /// Start states violating the formula.
    pub failing: Vec<usize>,
    /// For a failing universal (dual L4) formula: a path from a failing
    /// start state whose observables witness the violation.
    pub counterexample: Option<Vec<usize>>,
    pub stats: EvalStats,
}

/// Whether every state in `⟦b0⟧ ∩ init` satisfies `f`. `b0 = None` means
/// no observable restriction; `init = None` means all states.
pub fn check(
    ts: &TransitionSystem,
    b0: Option<&str>,
    init: Option<&FixedBitSet>,
    f: &MuFormula,
) -> Result<CheckOutcome, Error> {
    if let Some(h) = f.free_variable() {
        return Err(Error::OpenFormula(h));
    }
    for p in f.observables() {
        ts.extent_of(&p)?;
    }
    let mut start = FixedBitSet::with_capacity(ts.len());
    start.insert_range(..);
    if let Some(b) = b0 {
        start.intersect_with(ts.extent_of(b)?);
    }
    if let Some(i) = init {
        start.intersect_with(i);
    }
    let (sat, stats) = eval_with_stats(ts, f, &[])?;
    let failing: Vec<usize> = start.ones().filter(|&s| !sat.contains(s)).collect();
    let fragment = classify(f);
    let counterexample = match (failing.first(), fragment) {
        (Some(_), Fragment::DualL4) => {
            let g = f.dualize();
            failing.iter().find_map(|&s| witness_path(ts, &g, s))
        }
        _ => None,
    };
    Ok(CheckOutcome {
        holds: failing.is_empty(),
        fragment,
        failing,
        counterexample,
        stats,
    })
}

/// For `g` in L4 and `start ∈ ⟦g⟧`, a shortest path of states from `start`
/// along which `g` is satisfied: least fixpoints without conjunction unfold
/// into a single `∃◦`-chain ending at a true observable.
pub fn witness_path(ts: &TransitionSystem, g: &MuFormula, start: usize) -> Option<Vec<usize>> {
    if !g.in_l4() {
        return None;
    }
    // Number the syntax tree; variables jump back to their binder.
    enum Node {
        Prop(usize),
        Or(usize, usize),
        Ex(usize),
        Goto(usize),
        Never,
    }
    fn build(
        f: &MuFormula,
        ts: &TransitionSystem,
        nodes: &mut Vec<Node>,
        binders: &mut Vec<(String, usize)>,
    ) -> usize {
        let id = nodes.len();
        nodes.push(Node::Never);
        let node = match f {
            F::Prop(p) => match ts.observable_index(p) {
                Some(i) => Node::Prop(i),
                None => Node::Never,
            },
            F::Var(h) => match binders.iter().rev().find(|(k, _)| k == h) {
                Some(&(_, b)) => Node::Goto(b),
                None => Node::Never,
            },
            F::Or(a, b) => {
                let l = build(a, ts, nodes, binders);
                let r = build(b, ts, nodes, binders);
                Node::Or(l, r)
            }
            F::Ex(a) => Node::Ex(build(a, ts, nodes, binders)),
            F::Mu(h, a) => {
                binders.push((h.clone(), id));
                let body = build(a, ts, nodes, binders);
                binders.pop();
                Node::Goto(body)
            }
            _ => Node::Never,
        };
        nodes[id] = node;
        id
    }
    let mut nodes = Vec::new();
    build(g, ts, &mut nodes, &mut Vec::new());

    let mut parent: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::new();
    let root = (start, 0usize);
    parent.insert(root, root);
    queue.push_back(root);
    while let Some((s, n)) = queue.pop_front() {
        let next: Vec<(usize, usize)> = match &nodes[n] {
            Node::Prop(p) => {
                if ts.holds(s, *p) {
                    // Reconstruct the sequence of states along the chain.
                    let mut states = vec![s];
                    let mut cur = (s, n);
                    while cur != root {
                        let prev = parent[&cur];
                        if prev.0 != cur.0 {
                            states.push(prev.0);
                        }
                        cur = prev;
                    }
                    states.reverse();
                    return Some(states);
                }
                vec![]
            }
            Node::Or(a, b) => vec![(s, *a), (s, *b)],
            Node::Goto(b) => vec![(s, *b)],
            Node::Ex(a) => ts.successors(s).iter().map(|&t| (t as usize, *a)).collect(),
            Node::Never => vec![],
        };
        for nx in next {
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(nx) {
                e.insert((s, n));
                queue.push_back(nx);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> TransitionSystem {
        // s0 -> s1, p only at s1
        TransitionSystem::new(vec!["p".into()], vec![vec![1], vec![]], |s, _| s == 1, vec![0])
    }

    fn all(n: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        s.insert_range(..);
        s
    }

    #[test]
    fn parse_examples() {
        let f = parse_formula("nu h. AX(~err & h)").unwrap();
        assert_eq!(
            f,
            F::nu("h", F::ax(F::and(F::neg("err"), F::var("h"))))
        );
        assert_eq!(parse_formula("mu h. h").unwrap(), F::mu("h", F::var("h")));
        let f = parse_formula("EX p | EX EX p").unwrap();
        assert_eq!(f, F::or(F::ex(F::prop("p")), F::ex(F::ex(F::prop("p")))));
        assert_eq!(classify(&f), Fragment::L4);
    }

    #[test]
    fn parse_renames_shadowing_binders() {
        let f = parse_formula("mu h. EX h | nu h. AX h").unwrap();
        assert_eq!(
            f,
            F::mu("h", F::or(F::ex(F::var("h")), F::nu("h'", F::ax(F::var("h'")))))
        );
        assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_formula("mu h. ~h").is_err());
        assert!(parse_formula("~(p | q)").is_err());
        assert!(parse_formula("EX").is_err());
        assert!(parse_formula("p q").is_err());
        assert!(matches!(
            parse_formula("p $"),
            Err(Error::FormulaSyntax { offset: 2, .. })
        ));
    }

    #[test]
    fn fixpoints_of_identity() {
        let ts = chain();
        assert_eq!(eval(&ts, &F::mu("h", F::var("h")), &[]).unwrap().count_ones(..), 0);
        assert_eq!(eval(&ts, &F::nu("h", F::var("h")), &[]).unwrap(), all(2));
    }

    #[test]
    fn reachability() {
        let ts = chain();
        let f = F::mu("h", F::or(F::prop("p"), F::ex(F::var("h"))));
        let (s, stats) = eval_with_stats(&ts, &f, &[]).unwrap();
        assert_eq!(s, all(2));
        assert!(stats.max_fixpoint_iterations <= ts.len());
    }

    #[test]
    fn ax_vacuous_at_deadlock() {
        let ts = chain();
        let s = eval(&ts, &F::ax(F::neg("p")), &[]).unwrap();
        assert!(!s.contains(0) && s.contains(1));
    }

    #[test]
    fn dualize_and_classify() {
        let f = F::nu("h", F::ax(F::and(F::neg("p"), F::var("h"))));
        assert_eq!(f.dualize(), F::mu("h", F::ex(F::or(F::prop("p"), F::var("h")))));
        assert_eq!(f.dualize().dualize(), f);
        assert_eq!(classify(&f), Fragment::DualL4);
        let g = F::mu("h", F::or(F::prop("p"), F::ex(F::var("h"))));
        assert_eq!(classify(&g), Fragment::L4);
        let h = F::and(F::ex(F::prop("p")), F::ex(F::prop("q")));
        assert_eq!(classify(&h), Fragment::L2);
        assert_eq!(classify(&h.dualize()), Fragment::DualL2);
        assert_eq!(classify(&F::and(F::prop("p"), F::neg("q"))), Fragment::L1);
    }

    #[test]
    fn check_and_counterexample() {
        let ts = chain();
        let safe = F::nu("h", F::ax(F::and(F::neg("p"), F::var("h"))));
        let out = check(&ts, None, Some(&ts.roots_set()), &safe).unwrap();
        assert!(!out.holds);
        assert_eq!(out.failing, vec![0]);
        assert_eq!(out.counterexample, Some(vec![0, 1]));
        let taut = F::nu("h", F::var("h"));
        assert!(check(&ts, None, None, &taut).unwrap().holds);
        assert!(matches!(
            check(&ts, None, None, &F::var("h")),
            Err(Error::OpenFormula(_))
        ));
        assert!(matches!(
            check(&ts, None, None, &F::prop("zzz")),
            Err(Error::UnknownObservable(_))
        ));
    }
}
