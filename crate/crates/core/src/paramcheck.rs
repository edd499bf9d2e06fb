//! End-to-end drivers: checking over infinite types through the array-free
//! abstraction and its quotient, transfer of the answer to every finite
//! instance for universal formulas, and concretization of witnesses.

use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

use serde::{Serialize, Serializer};

use crate::abstraction::{sigma, translate_program};
use crate::concrete::{build_ts, Concrete, ConcreteState, Sizes};
use crate::lang::{BoolExpr, Program};
use crate::mu::{check, classify, CheckOutcome, Fragment, MuFormula};
use crate::partial::{Partial, PartialState, RawPartial};
use crate::quotient::build_quotient_ts;
use crate::ts::{ExploreOptions, Scope, TransitionSystem};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Infinite,
    Parameterised,
    Finite(Sizes),
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Infinite => f.write_str("infinite"),
            Mode::Parameterised => f.write_str("parameterised"),
            Mode::Finite(s) => write!(f, "finite({},{})", s.a, s.b),
        }
    }
}

impl Serialize for Mode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Answer {
    Holds,
    Fails,
    HoldsForAllFinite,
    UnknownPossibleFalseNegative,
}

impl Answer {
    /// Process exit status: 0 holds, 1 fails, 2 unknown.
    pub fn exit_code(self) -> u8 {
        match self {
            Answer::Holds | Answer::HoldsForAllFinite => 0,
            Answer::Fails => 1,
            Answer::UnknownPossibleFalseNegative => 2,
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Holds => "holds",
            Answer::Fails => "fails",
            Answer::HoldsForAllFinite => "holds-for-all-finite",
            Answer::UnknownPossibleFalseNegative => "unknown-possible-false-negative",
        })
    }
}

/// The observables true at one position of a trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct TraceEntry {
    #[serde(rename = "observables-true")]
    pub observables_true: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub states: usize,
    pub edges: usize,
    pub fixpoint_iterations: usize,
    pub wall_time_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub mode: Mode,
    pub answer: Answer,
    pub fragment: Fragment,
    pub formula: String,
    pub counterexample: Option<Vec<TraceEntry>>,
    pub witness_sizes: Option<(usize, usize)>,
    pub stats: Stats,
    /// The concrete run behind a finite witness, one line per state.
    #[serde(skip)]
    pub witness_run: Option<Vec<String>>,
}

fn trace_of(ts: &TransitionSystem, path: &[usize]) -> Vec<TraceEntry> {
    path.iter()
        .map(|&s| TraceEntry {
            observables_true: ts.valuation(s),
        })
        .collect()
}

fn require_observable(p: &Program, b0: &str) -> Result<(), Error> {
    if p.booleans.iter().any(|b| b == b0) {
        Ok(())
    } else {
        Err(Error::UnknownObservable(b0.to_string()))
    }
}

fn stats(ts: &TransitionSystem, out: &CheckOutcome, started: Instant) -> Stats {
    Stats {
        states: ts.len(),
        edges: ts.edge_count(),
        fixpoint_iterations: out.stats.max_fixpoint_iterations,
        wall_time_ms: started.elapsed().as_millis(),
    }
}

/// The infinite-semantics system `M` that checking runs on, with its
/// starting states as roots.
pub fn infinite_system(p: &Program, b0: &str, opts: ExploreOptions) -> Result<TransitionSystem, Error> {
    require_observable(p, b0)?;
    let sharp = translate_program(p)?;
    let constraint = BoolExpr::conj([sigma(p), p.init.clone(), BoolExpr::var(b0)]);
    let (_, explored) = build_quotient_ts(&sharp, &constraint, opts)?;
    Ok(explored.ts)
}

/// Decides `f` from every state satisfying `init ∧ b0` over infinite `X`
/// and `Y`: translate, constrain by the array-consistency formula, build
/// the quotient and evaluate.
pub fn check_infinite(p: &Program, b0: &str, f: &MuFormula, opts: ExploreOptions) -> Result<Verdict, Error> {
    let started = Instant::now();
    let ts = infinite_system(p, b0, opts)?;
    let out = check(&ts, Some(b0), Some(&ts.roots_set()), f)?;
    Ok(Verdict {
        mode: Mode::Infinite,
        answer: if out.holds { Answer::Holds } else { Answer::Fails },
        fragment: out.fragment,
        formula: f.to_string(),
        counterexample: out.counterexample.as_deref().map(|path| trace_of(&ts, path)),
        witness_sizes: None,
        stats: stats(&ts, &out, started),
        witness_run: None,
    })
}

/// Checks `f` on the `sizes` instance by the engine in [`crate::mu`].
pub fn check_finite(
    p: &Program,
    sizes: Sizes,
    b0: &str,
    f: &MuFormula,
    opts: ExploreOptions,
) -> Result<Verdict, Error> {
    let started = Instant::now();
    require_observable(p, b0)?;
    let scope = Scope::Reachable(BoolExpr::and(p.init.clone(), BoolExpr::var(b0)));
    let (sem, explored) = build_ts(p, sizes, &scope, opts)?;
    let ts = &explored.ts;
    let out = check(ts, Some(b0), Some(&ts.roots_set()), f)?;
    Ok(Verdict {
        mode: Mode::Finite(sizes),
        answer: if out.holds { Answer::Holds } else { Answer::Fails },
        fragment: out.fragment,
        formula: f.to_string(),
        counterexample: out.counterexample.as_deref().map(|path| trace_of(ts, path)),
        witness_sizes: None,
        stats: stats(ts, &out, started),
        witness_run: out.counterexample.as_deref().map(|path| {
            path.iter()
                .map(|&s| sem.describe(&explored.states[s]))
                .collect()
        }),
    })
}

/// First subformula keeping `f` out of the universal fragments: a positive
/// observable or an `EX`.
fn non_universal_part(f: &MuFormula) -> Option<String> {
    match f {
        MuFormula::Prop(p) => Some(format!("positive observable `{p}`")),
        MuFormula::Ex(_) => Some("`EX`".into()),
        MuFormula::NegProp(_) | MuFormula::Var(_) => None,
        MuFormula::Or(a, b) | MuFormula::And(a, b) => non_universal_part(a).or_else(|| non_universal_part(b)),
        MuFormula::Ax(a) | MuFormula::Mu(_, a) | MuFormula::Nu(_, a) => non_universal_part(a),
    }
}

/// Transfers the infinite answer to all finite instances. Universal
/// conjunction-free formulas get an exact answer, with a concrete finite
/// witness on failure; other universal formulas only transfer `holds`.
pub fn check_parameterised(
    p: &Program,
    b0: &str,
    f: &MuFormula,
    opts: ExploreOptions,
) -> Result<Verdict, Error> {
    let fragment = classify(f);
    if !matches!(fragment, Fragment::DualL2 | Fragment::DualL4) {
        let part = non_universal_part(f).unwrap_or_else(|| "a non-universal constructor".into());
        return Err(Error::Fragment(format!(
            "formula contains {part}; parameterised checking needs the dualL2 fragment \
             (no positive observables, no `EX`), the formula is in {fragment}"
        )));
    }
    let started = Instant::now();
    let mut v = check_infinite(p, b0, f, opts)?;
    v.mode = Mode::Parameterised;
    match (v.answer, fragment) {
        (Answer::Holds, _) => v.answer = Answer::HoldsForAllFinite,
        (_, Fragment::DualL2) => {
            v.answer = Answer::UnknownPossibleFalseNegative;
            v.counterexample = None;
        }
        _ => {
            let trace = v
                .counterexample
                .clone()
                .ok_or_else(|| Error::Replay("no counterexample path for a failing formula".into()))?;
            let start = BoolExpr::and(p.init.clone(), BoolExpr::var(b0));
            let exec = partial_execution(p, &start, &trace, opts)?;
            let w = witness_instance(p, &exec)?;
            v.witness_sizes = Some((w.sizes.a, w.sizes.b));
            let sem = Concrete::new(p, w.sizes)?;
            v.witness_run = Some(w.states.iter().map(|s| sem.describe(s)).collect());
        }
    }
    v.stats.wall_time_ms = started.elapsed().as_millis();
    Ok(v)
}

fn id_counts(raw: &RawPartial) -> (usize, usize) {
    (raw.x_ids().len(), raw.y_ids().len())
}

/// A partial-semantics execution from a state satisfying `start` whose
/// observables are exactly `trace`, preferring states that hold few
/// distinct values.
pub fn partial_execution(
    p: &Program,
    start: &BoolExpr,
    trace: &[TraceEntry],
    opts: ExploreOptions,
) -> Result<Vec<PartialState>, Error> {
    let sem = Partial::new(p)?;
    let want: Vec<Vec<bool>> = trace
        .iter()
        .map(|t| {
            for o in &t.observables_true {
                require_observable(p, o)?;
            }
            Ok(p.booleans
                .iter()
                .map(|b| t.observables_true.contains(b))
                .collect())
        })
        .collect::<Result<_, Error>>()?;
    let Some(first) = want.first() else {
        return Ok(Vec::new());
    };
    let matches = |s: &PartialState, w: &[bool]| (0..w.len()).all(|i| sem.bool(s, i) == w[i]);
    let by_size = |v: &mut Vec<PartialState>| v.sort_by_key(|s| id_counts(&sem.unpack(s)));

    let mut level: Vec<PartialState> = sem
        .states_satisfying(start)?
        .into_iter()
        .filter(|s| matches(s, first))
        .collect();
    by_size(&mut level);
    let mut parents: Vec<HashMap<PartialState, usize>> = Vec::new();
    let mut levels = vec![level];
    for w in &want[1..] {
        let cur = levels.last().unwrap();
        let mut next: Vec<PartialState> = Vec::new();
        let mut parent: HashMap<PartialState, usize> = HashMap::new();
        for (i, s) in cur.iter().enumerate() {
            let mut succ: Vec<PartialState> = sem.successors(s).into_iter().filter(|t| matches(t, w)).collect();
            by_size(&mut succ);
            for t in succ {
                if !parent.contains_key(&t) {
                    parent.insert(t.clone(), i);
                    next.push(t);
                }
            }
        }
        if next.len() > opts.max_states {
            return Err(Error::StateCap {
                cap: opts.max_states,
                what: "partial trace search",
            });
        }
        parents.push(parent);
        levels.push(next);
    }
    let last = levels.last().unwrap();
    let Some(end) = last.iter().min_by_key(|s| id_counts(&sem.unpack(s))) else {
        return Err(Error::Replay("trace is not realized by the partial-functions semantics".into()));
    };
    let mut exec = vec![end.clone()];
    for k in (0..parents.len()).rev() {
        let i = parents[k][exec.last().unwrap()];
        exec.push(levels[k][i].clone());
    }
    exec.reverse();
    Ok(exec)
}

/// A finite instance and a run in it.
#[derive(Clone, Debug)]
pub struct Witness {
    pub sizes: Sizes,
    pub states: Vec<ConcreteState>,
}

/// Lifts a canonical execution onto one global set of values, completes
/// arrays backwards from the last state (cells never defined read 0) and
/// replays the result in the concrete semantics.
pub fn witness_instance(p: &Program, exec: &[PartialState]) -> Result<Witness, Error> {
    let sem = Partial::new(p)?;
    let Some(first) = exec.first() else {
        return Err(Error::Replay("empty execution".into()));
    };
    let mut raws = vec![sem.unpack(first)];
    let bound = |r: &RawPartial| {
        (
            r.x_ids().last().map_or(0, |v| v + 1),
            r.y_ids().last().map_or(0, |v| v + 1),
        )
    };
    let (mut ux, mut uy) = bound(&raws[0]);
    for (i, next) in exec[1..].iter().enumerate() {
        let cur = raws.last().unwrap();
        let mut best: Option<RawPartial> = None;
        for cmd in 0..sem.command_count() {
            if !sem.guard_holds(cur, cmd) {
                continue;
            }
            for cand in sem.step_in_universe(cur, cmd, ux, uy)? {
                if sem.pack(&cand)? != *next {
                    continue;
                }
                let cost = bound(&cand);
                if best.as_ref().is_none_or(|b| cost < bound(b)) {
                    best = Some(cand);
                }
            }
        }
        let chosen = best.ok_or_else(|| Error::Replay(format!("step {} is not a partial-semantics step", i + 1)))?;
        let (bx, by) = bound(&chosen);
        ux = ux.max(bx);
        uy = uy.max(by);
        raws.push(chosen);
    }

    let sizes = Sizes::new(ux.max(1) as usize, uy.max(1) as usize);
    let conc = Concrete::new(p, sizes)?;
    let na = p.arrays.len();
    let mut cells: Vec<Vec<u32>> = vec![vec![0; sizes.a]; na];
    let mut states = Vec::with_capacity(raws.len());
    for raw in raws.iter().rev() {
        for (k, a) in raw.arrays.iter().enumerate() {
            for (&idx, &val) in a {
                cells[k][idx as usize] = val;
            }
        }
        states.push(conc.state(&raw.bools, &raw.xvals, &raw.yvals, &cells));
    }
    states.reverse();
    replay(&conc, &states)?;
    Ok(Witness { sizes, states })
}

/// Checks that consecutive states are related by some enabled command.
pub fn replay(sem: &Concrete, states: &[ConcreteState]) -> Result<(), Error> {
    for (i, w) in states.windows(2).enumerate() {
        let ok = (0..sem.program.commands.len())
            .any(|c| sem.guard_holds(&w[0], c) && sem.step_command(&w[0], c).is_ok_and(|t| t.contains(&w[1])));
        if !ok {
            return Err(Error::Replay(format!("no command leads from state {i} to state {}", i + 1)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::load_program;
    use crate::mu::parse_formula;

    const TOGGLE: &str = "types X Y bool b e xvar x x2 yvar y y2
        init ~e & x = x2
        trans ~e & x != x2 -> e := true
        trans true -> x := ?";

    #[test]
    fn vacuous_formula_holds() {
        let p = load_program(TOGGLE).unwrap();
        let f = parse_formula("nu h. h").unwrap();
        let v = check_infinite(&p, "b", &f, ExploreOptions::default()).unwrap();
        assert_eq!(v.answer, Answer::Holds);
    }

    #[test]
    fn fresh_index_witness_needs_two_values() {
        let p = load_program(TOGGLE).unwrap();
        let f = parse_formula("nu h. AX(~e & h)").unwrap();
        let v = check_parameterised(&p, "b", &f, ExploreOptions::default()).unwrap();
        assert_eq!(v.answer, Answer::Fails);
        assert_eq!(v.witness_sizes, Some((2, 1)));
        let trace = v.counterexample.unwrap();
        assert_eq!(trace.len(), 3);
        assert!(trace[2].observables_true.contains(&"e".to_string()));
    }

    #[test]
    fn dual_l2_failure_is_unknown() {
        let p = load_program(
            "types X Y bool p q
             trans true -> p := true, q := false
             trans true -> p := false, q := true",
        )
        .unwrap();
        let f = parse_formula("AX ~p | AX ~q").unwrap();
        let inf = check_infinite(&p, "p", &f, ExploreOptions::default()).unwrap();
        assert_eq!(inf.answer, Answer::Fails);
        let v = check_parameterised(&p, "p", &f, ExploreOptions::default()).unwrap();
        assert_eq!(v.answer, Answer::UnknownPossibleFalseNegative);
        assert!(v.counterexample.is_none());
    }

    #[test]
    fn non_universal_formula_rejected() {
        let p = load_program("types X Y bool p").unwrap();
        let f = parse_formula("mu h. p | EX h").unwrap();
        let err = check_parameterised(&p, "p", &f, ExploreOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("positive observable `p`") && msg.contains("dualL2"), "{msg}");
    }

    #[test]
    fn single_state_witness() {
        let p = load_program("types X Y bool b xvar x yvar y array a").unwrap();
        let sem = Partial::new(&p).unwrap();
        let s = sem
            .states_satisfying(&BoolExpr::var("b"))
            .unwrap()
            .into_iter()
            .next()
            .unwrap();
        let w = witness_instance(&p, &[s]).unwrap();
        assert_eq!(w.sizes, Sizes::new(1, 1));
    }

    #[test]
    fn verdict_json_shape() {
        let p = load_program(TOGGLE).unwrap();
        let f = parse_formula("nu h. AX(~e & h)").unwrap();
        let v = check_parameterised(&p, "b", &f, ExploreOptions::default()).unwrap();
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["mode"], "parameterised");
        assert_eq!(j["answer"], "fails");
        assert_eq!(j["fragment"], "dualL4");
        assert_eq!(j["witness_sizes"], serde_json::json!([2, 1]));
        assert!(j["counterexample"][0]["observables-true"].is_array());
        assert!(j["stats"]["states"].as_u64().unwrap() > 0);
    }
}
