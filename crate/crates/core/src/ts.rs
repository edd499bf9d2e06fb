//! Explicit finite transition systems and the layered state-space explorer
//! shared by every semantics.

use std::hash::Hash;

use fixedbitset::FixedBitSet;
use indexmap::IndexSet;
use serde::Serialize;

use crate::lang::BoolExpr;
use crate::Error;

/// `(Q, δ, ⟦·⟧, P)` with states numbered `0..len()`. Successor lists are
/// stored in compressed rows and are sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    pub observables: Vec<String>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    extents: Vec<FixedBitSet>,
    /// States the system was generated from (its scope).
    pub roots: Vec<u32>,
}

impl TransitionSystem {
    /// Builds a system from per-state successor lists and a per-state
    /// observable valuation.
    pub fn new(
        observables: Vec<String>,
        succ: Vec<Vec<u32>>,
        holds: impl Fn(usize, usize) -> bool,
        roots: Vec<u32>,
    ) -> Self {
        let n = succ.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut row in succ {
            row.sort_unstable();
            row.dedup();
            targets.extend(row);
            offsets.push(targets.len());
        }
        Self::from_csr(observables, offsets, targets, holds, roots)
    }

    fn from_csr(
        observables: Vec<String>,
        offsets: Vec<usize>,
        targets: Vec<u32>,
        holds: impl Fn(usize, usize) -> bool,
        roots: Vec<u32>,
    ) -> Self {
        let n = offsets.len() - 1;
        let extents = (0..observables.len())
            .map(|p| {
                let mut set = FixedBitSet::with_capacity(n);
                for s in 0..n {
                    if holds(s, p) {
                        set.insert(s);
                    }
                }
                set
            })
            .collect();
        TransitionSystem {
            observables,
            offsets,
            targets,
            extents,
            roots,
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn successors(&self, s: usize) -> &[u32] {
        &self.targets[self.offsets[s]..self.offsets[s + 1]]
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn observable_index(&self, name: &str) -> Option<usize> {
        self.observables.iter().position(|o| o == name)
    }

    pub fn extent(&self, p: usize) -> &FixedBitSet {
        &self.extents[p]
    }

    pub fn extent_of(&self, name: &str) -> Result<&FixedBitSet, Error> {
        self.observable_index(name)
            .map(|p| &self.extents[p])
            .ok_or_else(|| Error::UnknownObservable(name.to_string()))
    }

    pub fn holds(&self, s: usize, p: usize) -> bool {
        self.extents[p].contains(s)
    }

    /// Names of the observables true at `s`.
    pub fn valuation(&self, s: usize) -> Vec<String> {
        (0..self.observables.len())
            .filter(|&p| self.holds(s, p))
            .map(|p| self.observables[p].clone())
            .collect()
    }

    /// Predecessor lists in compressed rows, for backward traversals.
    pub fn predecessors(&self) -> (Vec<usize>, Vec<u32>) {
        let n = self.len();
        let mut counts = vec![0usize; n + 1];
        for &t in &self.targets {
            counts[t as usize + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut preds = vec![0u32; self.targets.len()];
        for s in 0..n {
            for &t in self.successors(s) {
                preds[fill[t as usize]] = s as u32;
                fill[t as usize] += 1;
            }
        }
        (counts, preds)
    }

    pub fn roots_set(&self) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.len());
        for &r in &self.roots {
            set.insert(r as usize);
        }
        set
    }

    /// JSON export; `label` names each state.
    pub fn to_json(&self, label: impl Fn(usize) -> String) -> serde_json::Value {
        #[derive(Serialize)]
        struct State {
            id: usize,
            label: String,
            #[serde(rename = "observables-true")]
            observables_true: Vec<String>,
            successors: Vec<u32>,
        }
        let states: Vec<State> = (0..self.len())
            .map(|s| State {
                id: s,
                label: label(s),
                observables_true: self.valuation(s),
                successors: self.successors(s).to_vec(),
            })
            .collect();
        serde_json::json!({
            "observables": self.observables,
            "roots": self.roots,
            "states": states,
        })
    }
}

/// Which states a system is built over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Every state of the semantics.
    All,
    /// States satisfying the constraint, closed under successors.
    Reachable(BoolExpr),
}

impl Scope {
    pub fn constraint(&self) -> BoolExpr {
        match self {
            Scope::All => BoolExpr::True,
            Scope::Reachable(e) => e.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExploreMode {
    Sequential,
    /// Successors of each frontier chunk are computed on the rayon pool.
    /// Falls back to sequential without the `parallel` feature.
    #[default]
    Parallel,
}

#[derive(Clone, Copy, Debug)]
pub struct ExploreOptions {
    pub max_states: usize,
    pub mode: ExploreMode,
}

pub const DEFAULT_MAX_STATES: usize = 10_000_000;
pub const ORACLE_MAX_STATES: usize = 1_000_000;

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            max_states: DEFAULT_MAX_STATES,
            mode: ExploreMode::default(),
        }
    }
}

impl ExploreOptions {
    pub fn with_cap(max_states: usize) -> Self {
        ExploreOptions {
            max_states,
            ..Self::default()
        }
    }
}

/// States discovered by [`explore`] together with their system.
#[derive(Clone, Debug)]
pub struct Explored<S> {
    pub states: IndexSet<S>,
    pub ts: TransitionSystem,
}

const CHUNK: usize = 4096;

fn successors_of<S, F>(chunk: &[S], succ: &F, mode: ExploreMode) -> Vec<Vec<S>>
where
    S: Send + Sync,
    F: Fn(&S) -> Vec<S> + Sync,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExploreMode::Parallel => {
            use rayon::prelude::*;
            chunk.par_iter().map(succ).collect()
        }
        _ => chunk.iter().map(succ).collect(),
    }
}

/// Breadth-first closure of `roots` under `succ`. Successors are computed a
/// chunk at a time, possibly in parallel, and inserted sequentially, so
/// state numbering is identical in both modes.
pub fn explore<S, F>(
    roots: impl IntoIterator<Item = S>,
    succ: F,
    observables: Vec<String>,
    holds: impl Fn(&S, usize) -> bool,
    opts: ExploreOptions,
    what: &'static str,
) -> Result<Explored<S>, Error>
where
    S: Hash + Eq + Clone + Send + Sync,
    F: Fn(&S) -> Vec<S> + Sync,
{
    let cap = opts.max_states;
    let overflow = || Error::StateCap { cap, what };
    let mut states: IndexSet<S> = IndexSet::new();
    let mut root_ids = Vec::new();
    for r in roots {
        let (id, _) = states.insert_full(r);
        root_ids.push(id as u32);
        if states.len() > cap {
            return Err(overflow());
        }
    }
    root_ids.sort_unstable();
    root_ids.dedup();

    let mut offsets = vec![0usize];
    let mut targets: Vec<u32> = Vec::new();
    let mut next = 0;
    let mut row: Vec<u32> = Vec::new();
    while next < states.len() {
        let end = (next + CHUNK).min(states.len());
        let chunk: Vec<S> = (next..end).map(|i| states[i].clone()).collect();
        for succs in successors_of(&chunk, &succ, opts.mode) {
            row.clear();
            for t in succs {
                let (id, _) = states.insert_full(t);
                row.push(id as u32);
            }
            if states.len() > cap {
                return Err(overflow());
            }
            row.sort_unstable();
            row.dedup();
            targets.extend_from_slice(&row);
            offsets.push(targets.len());
        }
        next = end;
    }
    let ts = TransitionSystem::from_csr(
        observables,
        offsets,
        targets,
        |s, p| holds(&states[s], p),
        root_ids,
    );
    Ok(Explored { states, ts })
}
