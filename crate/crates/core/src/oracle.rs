//! Brute-force ground truth: finite-instance checking with evaluators that
//! share no code with [`crate::mu`], greatest simulations, coarsest
//! bisimulations and trace membership.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::concrete::{build_ts, Sizes};
use crate::lang::{BoolExpr, Program};
use crate::mu::MuFormula;
use crate::ts::{ExploreOptions, Scope, TransitionSystem};
use crate::Error;

type Env = HashMap<String, Vec<bool>>;

fn observable(ts: &TransitionSystem, p: &str) -> Result<usize, Error> {
    ts.observable_index(p)
        .ok_or_else(|| Error::UnknownObservable(p.to_string()))
}

fn naive(ts: &TransitionSystem, f: &MuFormula, env: &mut Env) -> Result<Vec<bool>, Error> {
    let n = ts.len();
    Ok(match f {
        MuFormula::Prop(p) => {
            let i = observable(ts, p)?;
            (0..n).map(|s| ts.holds(s, i)).collect()
        }
        MuFormula::NegProp(p) => {
            let i = observable(ts, p)?;
            (0..n).map(|s| !ts.holds(s, i)).collect()
        }
        MuFormula::Var(h) => env
            .get(h)
            .cloned()
            .ok_or_else(|| Error::OpenFormula(h.clone()))?,
        MuFormula::Or(a, b) => {
            let (x, y) = (naive(ts, a, env)?, naive(ts, b, env)?);
            x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
        }
        MuFormula::And(a, b) => {
            let (x, y) = (naive(ts, a, env)?, naive(ts, b, env)?);
            x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
        }
        MuFormula::Ex(a) => {
            let x = naive(ts, a, env)?;
            (0..n)
                .map(|s| ts.successors(s).iter().any(|&t| x[t as usize]))
                .collect()
        }
        MuFormula::Ax(a) => {
            let x = naive(ts, a, env)?;
            (0..n)
                .map(|s| ts.successors(s).iter().all(|&t| x[t as usize]))
                .collect()
        }
        MuFormula::Mu(h, a) | MuFormula::Nu(h, a) => {
            let mut cur = vec![matches!(f, MuFormula::Nu(..)); n];
            let saved = env.remove(h);
            loop {
                env.insert(h.clone(), cur.clone());
                let next = naive(ts, a, env)?;
                if next == cur {
                    break;
                }
                cur = next;
            }
            env.remove(h);
            if let Some(v) = saved {
                env.insert(h.clone(), v);
            }
            cur
        }
    })
}

/// `⟦f⟧` as a boolean vector, by plain iteration.
pub fn naive_eval(ts: &TransitionSystem, f: &MuFormula) -> Result<Vec<bool>, Error> {
    naive(ts, f, &mut Env::new())
}

fn lattice(ts: &TransitionSystem, f: &MuFormula, env: &mut HashMap<String, u64>) -> Result<u64, Error> {
    let n = ts.len();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let pre = |x: u64, all: bool| {
        let mut out = 0u64;
        for s in 0..n {
            let succ = ts.successors(s);
            let hit = |t: &u32| x >> *t & 1 == 1;
            if (all && succ.iter().all(hit)) || (!all && succ.iter().any(hit)) {
                out |= 1 << s;
            }
        }
        out
    };
    Ok(match f {
        MuFormula::Prop(p) | MuFormula::NegProp(p) => {
            let i = observable(ts, p)?;
            let pos = (0..n).filter(|&s| ts.holds(s, i)).fold(0u64, |m, s| m | 1 << s);
            if matches!(f, MuFormula::Prop(_)) {
                pos
            } else {
                full & !pos
            }
        }
        MuFormula::Var(h) => *env.get(h).ok_or_else(|| Error::OpenFormula(h.clone()))?,
        MuFormula::Or(a, b) => lattice(ts, a, env)? | lattice(ts, b, env)?,
        MuFormula::And(a, b) => lattice(ts, a, env)? & lattice(ts, b, env)?,
        MuFormula::Ex(a) => pre(lattice(ts, a, env)?, false),
        MuFormula::Ax(a) => pre(lattice(ts, a, env)?, true),
        MuFormula::Mu(h, a) | MuFormula::Nu(h, a) => {
            // Knaster–Tarski: meet of pre-fixpoints, join of post-fixpoints.
            let least = matches!(f, MuFormula::Mu(..));
            let saved = env.remove(h);
            let mut acc = if least { full } else { 0 };
            for s in 0..=full {
                env.insert(h.clone(), s);
                let fs = lattice(ts, a, env)?;
                if least && fs & !s == 0 {
                    acc &= s;
                } else if !least && s & !fs == 0 {
                    acc |= s;
                }
            }
            env.remove(h);
            if let Some(v) = saved {
                env.insert(h.clone(), v);
            }
            acc
        }
    })
}

/// `⟦f⟧` by enumerating the whole subset lattice at every fixpoint, as a
/// bitmask. Only for systems of at most 16 states.
pub fn lattice_eval(ts: &TransitionSystem, f: &MuFormula) -> Result<u64, Error> {
    assert!(ts.len() <= 16, "lattice enumeration needs at most 16 states");
    lattice(ts, f, &mut HashMap::new())
}

/// Whether every state of the `sizes` instance satisfying `init ∧ b0`
/// satisfies `f`.
pub fn brute_check(
    p: &Program,
    sizes: Sizes,
    b0: &str,
    f: &MuFormula,
    opts: ExploreOptions,
) -> Result<bool, Error> {
    if !p.booleans.iter().any(|b| b == b0) {
        return Err(Error::UnknownObservable(b0.to_string()));
    }
    let scope = Scope::Reachable(BoolExpr::and(p.init.clone(), BoolExpr::var(b0)));
    let (_, explored) = build_ts(p, sizes, &scope, opts)?;
    let sat = naive_eval(&explored.ts, f)?;
    Ok(explored.ts.roots.iter().all(|&r| sat[r as usize]))
}

/// Why two systems are not related.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mismatch {
    /// The systems do not have the same observables.
    Observables,
    /// States with no partner on the other side.
    Unmatched { left: Vec<usize>, right: Vec<usize> },
}

fn valuation_bits(ts: &TransitionSystem, s: usize) -> Vec<bool> {
    (0..ts.observables.len()).map(|p| ts.holds(s, p)).collect()
}

/// The greatest simulation of `ts1` by `ts2`: `rows[s]` holds every `t`
/// simulating `s`.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub rows: Vec<FixedBitSet>,
}

impl Simulation {
    pub fn contains(&self, s: usize, t: usize) -> bool {
        self.rows[s].contains(t)
    }
}

/// Greatest simulation, refined from observable equality. Succeeds iff
/// every state of `ts1` is simulated by some state of `ts2`.
pub fn check_simulation(ts1: &TransitionSystem, ts2: &TransitionSystem) -> Result<Simulation, Mismatch> {
    if ts1.observables != ts2.observables {
        return Err(Mismatch::Observables);
    }
    let mut by_val: HashMap<Vec<bool>, FixedBitSet> = HashMap::new();
    for t in 0..ts2.len() {
        by_val
            .entry(valuation_bits(ts2, t))
            .or_insert_with(|| FixedBitSet::with_capacity(ts2.len()))
            .insert(t);
    }
    let empty = FixedBitSet::with_capacity(ts2.len());
    let mut rows: Vec<FixedBitSet> = (0..ts1.len())
        .map(|s| by_val.get(&valuation_bits(ts1, s)).unwrap_or(&empty).clone())
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..ts1.len() {
            let candidates: Vec<usize> = rows[s].ones().collect();
            for t in candidates {
                let ok = ts1.successors(s).iter().all(|&s2| {
                    ts2.successors(t)
                        .iter()
                        .any(|&t2| rows[s2 as usize].contains(t2 as usize))
                });
                if !ok {
                    rows[s].set(t, false);
                    changed = true;
                }
            }
        }
    }
    let left: Vec<usize> = (0..ts1.len()).filter(|&s| rows[s].is_clear()).collect();
    if left.is_empty() {
        Ok(Simulation { rows })
    } else {
        Err(Mismatch::Unmatched {
            left,
            right: Vec::new(),
        })
    }
}

/// The coarsest bisimulation on the disjoint union of two systems, as a
/// block number per state.
#[derive(Clone, Debug)]
pub struct Bisimulation {
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    pub blocks: usize,
}

/// Coarsest bisimulation by signature refinement over `ts1 ⊎ ts2`.
/// Succeeds iff every block contains states of both systems.
pub fn check_bisimulation(ts1: &TransitionSystem, ts2: &TransitionSystem) -> Result<Bisimulation, Mismatch> {
    if ts1.observables != ts2.observables {
        return Err(Mismatch::Observables);
    }
    let n1 = ts1.len();
    let n = n1 + ts2.len();
    let side = |u: usize| if u < n1 { (ts1, u) } else { (ts2, u - n1) };
    let succ = |u: usize| -> Vec<usize> {
        let (ts, s) = side(u);
        let off = if u < n1 { 0 } else { n1 };
        ts.successors(s).iter().map(|&t| t as usize + off).collect()
    };

    let mut ids: HashMap<Vec<bool>, u32> = HashMap::new();
    let mut block: Vec<u32> = (0..n)
        .map(|u| {
            let (ts, s) = side(u);
            let k = ids.len() as u32;
            *ids.entry(valuation_bits(ts, s)).or_insert(k)
        })
        .collect();
    let mut count = ids.len();
    loop {
        let mut sigs: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
        let next: Vec<u32> = (0..n)
            .map(|u| {
                let mut out: Vec<u32> = succ(u).into_iter().map(|v| block[v]).collect();
                out.sort_unstable();
                out.dedup();
                let k = sigs.len() as u32;
                *sigs.entry((block[u], out)).or_insert(k)
            })
            .collect();
        let stable = sigs.len() == count;
        block = next;
        count = sigs.len();
        if stable {
            break;
        }
    }
    let mut on_left = vec![false; count];
    let mut on_right = vec![false; count];
    for (u, &b) in block.iter().enumerate() {
        if u < n1 {
            on_left[b as usize] = true;
        } else {
            on_right[b as usize] = true;
        }
    }
    let left: Vec<usize> = (0..n1).filter(|&u| !on_right[block[u] as usize]).collect();
    let right: Vec<usize> = (n1..n)
        .filter(|&u| !on_left[block[u] as usize])
        .map(|u| u - n1)
        .collect();
    if left.is_empty() && right.is_empty() {
        Ok(Bisimulation {
            right: block.split_off(n1),
            left: block,
            blocks: count,
        })
    } else {
        Err(Mismatch::Unmatched { left, right })
    }
}

/// One position of an observable trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceStep {
    /// The state satisfies this observable.
    Holds(String),
    /// The state's true observables are exactly these.
    Exactly(Vec<String>),
}

fn step_sets(ts: &TransitionSystem, trace: &[TraceStep]) -> Result<Vec<FixedBitSet>, Error> {
    trace
        .iter()
        .map(|step| {
            let mut set = FixedBitSet::with_capacity(ts.len());
            match step {
                TraceStep::Holds(p) => set.union_with(ts.extent(observable(ts, p)?)),
                TraceStep::Exactly(ps) => {
                    let mut want = vec![false; ts.observables.len()];
                    for p in ps {
                        want[observable(ts, p)?] = true;
                    }
                    for s in 0..ts.len() {
                        if valuation_bits(ts, s) == want {
                            set.insert(s);
                        }
                    }
                }
            }
            Ok(set)
        })
        .collect()
}

/// Whether some path of `ts` starting in `start` realizes `trace`.
pub fn trace_member_from(
    ts: &TransitionSystem,
    start: &FixedBitSet,
    trace: &[TraceStep],
) -> Result<bool, Error> {
    let sets = step_sets(ts, trace)?;
    let Some(first) = sets.first() else {
        return Ok(true);
    };
    let mut cur = start.clone();
    cur.intersect_with(first);
    for set in &sets[1..] {
        let mut next = FixedBitSet::with_capacity(ts.len());
        for s in cur.ones() {
            for &t in ts.successors(s) {
                next.insert(t as usize);
            }
        }
        next.intersect_with(set);
        cur = next;
    }
    Ok(!cur.is_clear())
}

/// Whether some path of `ts` realizes `trace`.
pub fn trace_member(ts: &TransitionSystem, trace: &[TraceStep]) -> Result<bool, Error> {
    let mut all = FixedBitSet::with_capacity(ts.len());
    all.insert_range(..);
    trace_member_from(ts, &all, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mu::parse_formula;

    fn ts(n: usize, edges: &[(u32, u32)], obs: &[&str], val: &[&[usize]]) -> TransitionSystem {
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in edges {
            succ[a as usize].push(b);
        }
        TransitionSystem::new(
            obs.iter().map(|s| s.to_string()).collect(),
            succ,
            |s, p| val[s].contains(&p),
            (0..n as u32).collect(),
        )
    }

    #[test]
    fn evaluators_on_a_chain() {
        let t = ts(2, &[(0, 1)], &["p"], &[&[], &[0]]);
        let f = parse_formula("mu h. p | EX h").unwrap();
        assert_eq!(naive_eval(&t, &f).unwrap(), vec![true, true]);
        assert_eq!(lattice_eval(&t, &f).unwrap(), 0b11);
        let g = parse_formula("nu h. h").unwrap();
        assert_eq!(lattice_eval(&t, &g).unwrap(), 0b11);
        assert_eq!(lattice_eval(&t, &parse_formula("mu h. h").unwrap()).unwrap(), 0);
    }

    #[test]
    fn simulation_examples() {
        let a = ts(2, &[(0, 1)], &["p"], &[&[], &[0]]);
        let sim = check_simulation(&a, &a).unwrap();
        assert!(sim.contains(0, 0) && sim.contains(1, 1));
        // An extra p-state on the left has no partner on the right.
        let b = ts(1, &[], &["p"], &[&[]]);
        assert_eq!(
            check_simulation(&a, &b).unwrap_err(),
            Mismatch::Unmatched {
                left: vec![0, 1],
                right: vec![]
            }
        );
        // 0 -> 1 simulated by a self-loop? Only if valuations agree.
        let c = ts(1, &[(0, 0)], &["p"], &[&[]]);
        let d = ts(2, &[(0, 1)], &["p"], &[&[], &[]]);
        assert!(check_simulation(&d, &c).is_ok());
        assert!(check_simulation(&c, &d).is_err());
    }

    #[test]
    fn bisimulation_examples() {
        let a = ts(2, &[(0, 1), (1, 0)], &["p"], &[&[0], &[0]]);
        let b = ts(1, &[(0, 0)], &["p"], &[&[0]]);
        let bis = check_bisimulation(&a, &b).unwrap();
        assert_eq!(bis.blocks, 1);
        // p-then-q chain versus a single p state.
        let c = ts(2, &[(0, 1)], &["p", "q"], &[&[0], &[1]]);
        let d = ts(1, &[], &["p", "q"], &[&[0]]);
        assert!(check_bisimulation(&c, &d).is_err());
        assert_eq!(
            check_bisimulation(&a, &ts(1, &[], &["q"], &[&[]])).unwrap_err(),
            Mismatch::Observables
        );
    }

    #[test]
    fn trace_examples() {
        let t = ts(2, &[(0, 1)], &["p", "q"], &[&[0], &[1]]);
        assert!(trace_member(&t, &[]).unwrap());
        assert!(trace_member(&t, &[TraceStep::Holds("q".into())]).unwrap());
        let pq = [TraceStep::Holds("p".into()), TraceStep::Holds("q".into())];
        assert!(trace_member(&t, &pq).unwrap());
        let qp = [TraceStep::Holds("q".into()), TraceStep::Holds("p".into())];
        assert!(!trace_member(&t, &qp).unwrap());
        assert!(trace_member(&t, &[TraceStep::Exactly(vec!["p".into()])]).unwrap());
        assert!(!trace_member(&t, &[TraceStep::Exactly(vec![])]).unwrap());
        assert!(trace_member(&t, &[TraceStep::Holds("r".into())]).is_err());
    }
}
