use proptest::prelude::*;

use dimca::abstraction::{sigma, translate_program};
use dimca::concrete::{build_ts, Sizes};
use dimca::corpus::{random_formula, random_program, random_ts, FormulaFamily, Limits};
use dimca::lang::{load_program, print_program, BoolExpr, Program};
use dimca::mu::{check, eval, eval_with_stats, parse_formula};
use dimca::oracle::{
    brute_check, check_bisimulation, check_simulation, lattice_eval, naive_eval, trace_member_from, TraceStep,
};
use dimca::paramcheck::{check_finite, partial_execution, witness_instance, Answer, TraceEntry};
use dimca::partial::build_partial_ts;
use dimca::quotient::build_quotient_ts;
use dimca::ts::{ExploreOptions, Scope};

fn obs() -> Vec<String> {
    vec!["p".into(), "q".into(), "r".into()]
}

fn family() -> impl Strategy<Value = FormulaFamily> {
    prop_oneof![
        Just(FormulaFamily::Any),
        Just(FormulaFamily::DualL2),
        Just(FormulaFamily::DualL4)
    ]
}

fn opts() -> ExploreOptions {
    ExploreOptions::with_cap(200_000)
}

fn reachable(p: &Program, b0: &str) -> Scope {
    Scope::Reachable(BoolExpr::and(p.init.clone(), BoolExpr::var(b0)))
}

fn array_free() -> Limits {
    Limits {
        arrays: 0,
        ..Limits::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formula_print_parse_roundtrip(seed: u64, depth in 0usize..5, fam in family()) {
        let f = random_formula(seed, &obs(), depth, fam);
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn program_print_load_roundtrip(seed: u64) {
        let p = random_program(seed, Limits::default());
        let text = print_program(&p);
        let q = load_program(&text).unwrap();
        prop_assert_eq!(q.canonical(), p.canonical());
        prop_assert_eq!(print_program(&q), text);
    }

    #[test]
    fn dual_is_complement(seed: u64, depth in 0usize..5) {
        let ts = random_ts(seed, 20, &obs());
        let f = random_formula(seed, &obs(), depth, FormulaFamily::Any);
        prop_assert_eq!(f.dualize().dualize(), f.clone());
        let mut pos = eval(&ts, &f, &[]).unwrap();
        pos.toggle_range(..);
        prop_assert_eq!(pos, eval(&ts, &f.dualize(), &[]).unwrap());
    }

    #[test]
    fn evaluators_agree(seed: u64, depth in 0usize..4) {
        let ts = random_ts(seed, 6, &obs());
        let f = random_formula(seed ^ 0x5eed, &obs(), depth, FormulaFamily::Any);
        let (sat, stats) = eval_with_stats(&ts, &f, &[]).unwrap();
        let naive = naive_eval(&ts, &f).unwrap();
        let lattice = lattice_eval(&ts, &f).unwrap();
        for (s, &n) in naive.iter().enumerate() {
            prop_assert_eq!(sat.contains(s), n);
            prop_assert_eq!(n, lattice >> s & 1 == 1);
        }
        prop_assert!(stats.max_fixpoint_iterations <= ts.len());
    }

    #[test]
    fn bisimulation_is_reflexive(seed: u64) {
        let ts = random_ts(seed, 20, &obs());
        let b = check_bisimulation(&ts, &ts).unwrap();
        prop_assert_eq!(b.left, b.right);
    }

    #[test]
    fn bisimilar_systems_agree_on_formulas(seed: u64, depth in 0usize..4) {
        let p = random_program(seed, array_free());
        let (_, part) = build_partial_ts(&p, &Scope::All, opts()).unwrap();
        let (_, quot) = build_quotient_ts(&p, &BoolExpr::True, opts()).unwrap();
        let b = check_bisimulation(&part.ts, &quot.ts).unwrap();
        let f = random_formula(seed, &p.booleans, depth, FormulaFamily::Any);
        let l = eval(&part.ts, &f, &[]).unwrap();
        let r = eval(&quot.ts, &f, &[]).unwrap();
        for s in 0..part.ts.len() {
            for t in 0..quot.ts.len() {
                if b.left[s] == b.right[t] {
                    prop_assert_eq!(l.contains(s), r.contains(t));
                }
            }
        }
    }

    #[test]
    fn quotient_simulates_small_instances(seed: u64, a in 1usize..4, b in 1usize..4) {
        let p = random_program(seed, array_free());
        let (_, conc) = build_ts(&p, Sizes::new(a, b), &Scope::All, opts()).unwrap();
        let (_, quot) = build_quotient_ts(&p, &BoolExpr::True, opts()).unwrap();
        prop_assert!(check_simulation(&conc.ts, &quot.ts).is_ok());
    }

    #[test]
    fn translation_is_bisimilar(seed: u64) {
        let p = random_program(seed, Limits::default());
        let sharp = translate_program(&p).unwrap();
        let (_, part) = build_partial_ts(&p, &Scope::All, opts()).unwrap();
        let (_, quot) = build_quotient_ts(&sharp, &sigma(&p), opts()).unwrap();
        prop_assert!(check_bisimulation(&part.ts, &quot.ts).is_ok());
    }

    #[test]
    fn engine_agrees_with_brute_force(seed: u64, a in 1usize..3, b in 1usize..3, fam in family()) {
        let p = random_program(seed, Limits::default());
        let f = random_formula(seed, &p.booleans, 3, fam);
        let sizes = Sizes::new(a, b);
        let brute = brute_check(&p, sizes, "b0", &f, opts()).unwrap();
        let v = check_finite(&p, sizes, "b0", &f, opts()).unwrap();
        prop_assert_eq!(v.answer == Answer::Holds, brute);
    }

    #[test]
    fn engine_counterexamples_are_runs(seed: u64) {
        let p = random_program(seed, Limits::default());
        let f = random_formula(seed, &p.booleans, 3, FormulaFamily::DualL4);
        let (_, ex) = build_ts(&p, Sizes::new(2, 2), &reachable(&p, "b0"), opts()).unwrap();
        let out = check(&ex.ts, Some("b0"), Some(&ex.ts.roots_set()), &f).unwrap();
        prop_assert_eq!(out.holds, out.counterexample.is_none());
        if let Some(path) = out.counterexample {
            prop_assert!(ex.ts.roots.contains(&(path[0] as u32)));
            for w in path.windows(2) {
                prop_assert!(ex.ts.successors(w[0]).contains(&(w[1] as u32)));
            }
        }
    }

    #[test]
    fn partial_runs_have_finite_witnesses(seed: u64, len in 1usize..8, walk: u64) {
        let p = random_program(seed, Limits::default());
        let (_, part) = build_partial_ts(&p, &reachable(&p, "b0"), opts()).unwrap();
        let ts = &part.ts;
        prop_assume!(!ts.roots.is_empty());
        let mut rng = walk;
        let mut next = |n: usize| {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng >> 33) as usize % n
        };
        let mut s = ts.roots[next(ts.roots.len())] as usize;
        let mut trace = vec![TraceEntry { observables_true: ts.valuation(s) }];
        for _ in 1..len {
            let succ = ts.successors(s);
            if succ.is_empty() {
                break;
            }
            s = succ[next(succ.len())] as usize;
            trace.push(TraceEntry { observables_true: ts.valuation(s) });
        }
        let start = BoolExpr::and(p.init.clone(), BoolExpr::var("b0"));
        let exec = partial_execution(&p, &start, &trace, opts()).unwrap();
        prop_assert_eq!(exec.len(), trace.len());
        let w = witness_instance(&p, &exec).unwrap();
        let (_, conc) = build_ts(&p, w.sizes, &reachable(&p, "b0"), opts()).unwrap();
        let steps: Vec<TraceStep> = trace.iter().map(|t| TraceStep::Exactly(t.observables_true.clone())).collect();
        prop_assert!(trace_member_from(&conc.ts, &conc.ts.roots_set(), &steps).unwrap());
    }

    #[test]
    fn partial_states_are_canonical(seed: u64) {
        let p = random_program(seed, Limits::default());
        let (sem, part) = build_partial_ts(&p, &Scope::All, opts()).unwrap();
        for s in part.states.iter().take(200) {
            let raw = sem.unpack(s);
            prop_assert_eq!(raw.canonicalize().unwrap(), raw);
        }
    }
}
