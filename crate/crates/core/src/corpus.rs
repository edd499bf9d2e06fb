//! Bundled example programs and seeded generators of small random programs
//! and formulas, used by the test suites and the benchmark.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::{
    load_program, ArrayWrite, BoolExpr, Command, DataAssign, GuardedCommand, Program,
};
use crate::mu::MuFormula;
use crate::ts::TransitionSystem;

/// Fault-tolerant memory with its monitor.
pub const FTMEM: &str = include_str!("../fixtures/ftmem.gap");
/// The same program with the fault counter never incremented.
pub const FTMEM_MUTANT: &str = include_str!("../fixtures/ftmem_mutant.gap");
/// Expected array-free translation of [`FTMEM`].
pub const FTMEM_SHARP: &str = include_str!("../fixtures/ftmem_sharp.gap");
/// Expected array-consistency constraint of [`FTMEM`].
pub const FTMEM_SIGMA: &str = include_str!("../fixtures/ftmem_sigma.txt");

/// "The ERROR location is never reached."
pub const FTMEM_SAFETY: &str = "nu h. AX(~loc_ERROR & h)";

pub fn ftmem() -> Program {
    load_program(FTMEM).expect("bundled program is valid")
}

pub fn ftmem_mutant() -> Program {
    load_program(FTMEM_MUTANT).expect("bundled program is valid")
}

/// Shape limits for [`random_program`].
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub booleans: usize,
    pub xvars: usize,
    pub yvars: usize,
    pub arrays: usize,
    pub commands: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            booleans: 2,
            xvars: 2,
            yvars: 2,
            arrays: 2,
            commands: 4,
        }
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn random_guard(rng: &mut ChaCha8Rng, p: &Program, depth: usize) -> BoolExpr {
    let mut atoms: Vec<BoolExpr> = p.booleans.iter().map(BoolExpr::var).collect();
    for vars in [&p.xvars, &p.yvars] {
        for i in 0..vars.len() {
            for j in i + 1..vars.len() {
                atoms.push(BoolExpr::eq(&vars[i], &vars[j]));
            }
        }
    }
    if atoms.is_empty() || rng.gen_bool(0.3) {
        return BoolExpr::True;
    }
    let atom = |rng: &mut ChaCha8Rng| {
        let a = atoms.choose(rng).unwrap().clone();
        if rng.gen_bool(0.4) {
            BoolExpr::not(a)
        } else {
            a
        }
    };
    let mut e = atom(rng);
    for _ in 0..depth {
        if rng.gen_bool(0.5) {
            break;
        }
        let other = atom(rng);
        e = if rng.gen_bool(0.5) {
            BoolExpr::and(e, other)
        } else {
            BoolExpr::or(e, other)
        };
    }
    e
}

fn random_command(rng: &mut ChaCha8Rng, p: &Program) -> Command {
    let mut c = Command::default();
    for b in &p.booleans {
        if rng.gen_bool(0.5) {
            let e = random_guard(rng, p, 1);
            c.bool_assigns.push((b.clone(), e));
        }
    }
    for x in &p.xvars {
        if rng.gen_bool(0.5) {
            let rhs = match p.xvars.choose(rng) {
                Some(src) if rng.gen_bool(0.4) => DataAssign::Copy(src.clone()),
                _ => DataAssign::Choose,
            };
            c.data_assigns.push((x.clone(), rhs));
        }
    }
    for y in &p.yvars {
        if rng.gen_bool(0.5) {
            let rhs = match rng.gen_range(0..3) {
                0 => DataAssign::Choose,
                1 if !p.arrays.is_empty() && !p.xvars.is_empty() => DataAssign::Read {
                    array: p.arrays.choose(rng).unwrap().clone(),
                    index: p.xvars.choose(rng).unwrap().clone(),
                },
                _ => DataAssign::Copy(p.yvars.choose(rng).unwrap().clone()),
            };
            c.data_assigns.push((y.clone(), rhs));
        }
    }
    if !p.xvars.is_empty() && !p.yvars.is_empty() {
        for a in &p.arrays {
            if rng.gen_bool(0.4) {
                c.array_writes.push(ArrayWrite {
                    array: a.clone(),
                    index: p.xvars.choose(rng).unwrap().clone(),
                    value: p.yvars.choose(rng).unwrap().clone(),
                });
            }
        }
    }
    c
}

/// A valid program within `limits`, with plain commands only. Identical
/// seeds give identical programs.
pub fn random_program(seed: u64, limits: Limits) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = Program {
        booleans: names("b", rng.gen_range(1..=limits.booleans.max(1))),
        xvars: names("x", rng.gen_range(0..=limits.xvars)),
        yvars: names("y", rng.gen_range(0..=limits.yvars)),
        ..Program::default()
    };
    if !p.xvars.is_empty() {
        p.arrays = names("a", rng.gen_range(0..=limits.arrays));
    }
    if rng.gen_bool(0.5) {
        p.init = random_guard(&mut rng, &p, 1);
    }
    let n = rng.gen_range(1..=limits.commands.max(1));
    for _ in 0..n {
        let guard = random_guard(&mut rng, &p, 2);
        let body = random_command(&mut rng, &p);
        p.commands.push(GuardedCommand::plain(guard, body));
    }
    debug_assert!(crate::lang::validate(&p).is_empty());
    p
}

/// Which family [`random_formula`] draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulaFamily {
    /// Full logic.
    Any,
    /// Duals of the existential fragment: no `p`, no `∃◦`.
    DualL2,
    /// Duals of the conjunction-free existential fragment: additionally no
    /// `∨`, no `μ`.
    DualL4,
}

/// A closed formula of depth at most `depth` over `observables`.
pub fn random_formula(
    seed: u64,
    observables: &[String],
    depth: usize,
    family: FormulaFamily,
) -> MuFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = gen_formula(&mut rng, observables, depth, family, &mut Vec::new(), &mut 0);
    if family == FormulaFamily::Any {
        f
    } else {
        // The existential generators produce L2/L4 shapes; dualize them.
        f.dualize()
    }
}

/// For the dual families this generates the existential original.
fn gen_formula(
    rng: &mut ChaCha8Rng,
    obs: &[String],
    depth: usize,
    family: FormulaFamily,
    bound: &mut Vec<String>,
    binders: &mut usize,
) -> MuFormula {
    let leaf = |rng: &mut ChaCha8Rng, bound: &[String]| {
        if !bound.is_empty() && rng.gen_bool(0.4) {
            return MuFormula::var(bound.choose(rng).unwrap());
        }
        let p = obs.choose(rng).expect("at least one observable");
        if family == FormulaFamily::Any && rng.gen_bool(0.5) {
            MuFormula::neg(p)
        } else {
            MuFormula::prop(p)
        }
    };
    if depth == 0 || rng.gen_bool(0.2) {
        return leaf(rng, bound);
    }
    let d = depth - 1;
    // Kinds: 0 or, 1 and, 2 ex, 3 ax, 4 mu, 5 nu.
    let kinds: &[u8] = match family {
        FormulaFamily::Any => &[0, 1, 2, 3, 4, 5],
        FormulaFamily::DualL2 => &[0, 1, 2, 4, 5],
        FormulaFamily::DualL4 => &[0, 2, 4],
    };
    let sub = |rng: &mut ChaCha8Rng, bound: &mut Vec<String>, binders: &mut usize| {
        gen_formula(rng, obs, d, family, bound, binders)
    };
    match *kinds.choose(rng).unwrap() {
        0 => {
            let a = sub(rng, bound, binders);
            MuFormula::or(a, sub(rng, bound, binders))
        }
        1 => {
            let a = sub(rng, bound, binders);
            MuFormula::and(a, sub(rng, bound, binders))
        }
        2 => MuFormula::ex(sub(rng, bound, binders)),
        3 => MuFormula::ax(sub(rng, bound, binders)),
        k => {
            // Every binder gets its own name, as after parsing.
            let h = format!("h{binders}");
            *binders += 1;
            bound.push(h.clone());
            let body = sub(rng, bound, binders);
            bound.pop();
            if k == 4 {
                MuFormula::mu(&h, body)
            } else {
                MuFormula::nu(&h, body)
            }
        }
    }
}

/// A transition system with `1..=max_states` states, random edges (dead
/// ends allowed) and random valuations of `observables`. Every state is a
/// root.
pub fn random_ts(seed: u64, max_states: usize, observables: &[String]) -> TransitionSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_states.max(1));
    let density = rng.gen_range(0.05..0.5);
    let succ: Vec<Vec<u32>> = (0..n)
        .map(|_| (0..n as u32).filter(|_| rng.gen_bool(density)).collect())
        .collect();
    let val: Vec<Vec<bool>> = (0..n)
        .map(|_| observables.iter().map(|_| rng.gen_bool(0.5)).collect())
        .collect();
    TransitionSystem::new(
        observables.to_vec(),
        succ,
        |s, p| val[s][p],
        (0..n as u32).collect(),
    )
}
