//! Backtracking enumeration of boolean/data valuations under a constraint,
//! used to generate the root states of every semantics.

use crate::lang::compile::{Expr, PartialEnv};

/// Value domain of one data kind.
#[derive(Clone, Copy, Debug)]
pub enum Domain {
    /// Values `0..n` (concrete instances).
    Range(u32),
    /// Restricted-growth strings: each value is at most one more than the
    /// largest earlier value, so every equality pattern appears once.
    Rgs,
}

impl Domain {
    /// Largest value allowed after the prefix `prev`.
    pub fn bound(self, prev: &[u32]) -> Option<u32> {
        match self {
            Domain::Range(0) => None,
            Domain::Range(n) => Some(n - 1),
            Domain::Rgs => Some(prev.iter().map(|v| v + 1).max().unwrap_or(0)),
        }
    }
}

struct Partial<'a> {
    b: &'a [bool],
    x: &'a [u32],
    y: &'a [u32],
}

impl PartialEnv for Partial<'_> {
    fn b(&self, i: usize) -> Option<bool> {
        self.b.get(i).copied()
    }
    fn x(&self, i: usize) -> Option<u32> {
        self.x.get(i).copied()
    }
    fn y(&self, i: usize) -> Option<u32> {
        self.y.get(i).copied()
    }
}

struct Search<'a, F> {
    n: (usize, usize, usize),
    doms: (Domain, Domain),
    constraint: &'a Expr,
    b: Vec<bool>,
    x: Vec<u32>,
    y: Vec<u32>,
    emit: F,
}

impl<F: FnMut(&[bool], &[u32], &[u32])> Search<'_, F> {
    fn alive(&self) -> bool {
        let env = Partial {
            b: &self.b,
            x: &self.x,
            y: &self.y,
        };
        self.constraint.eval3(&env) != Some(false)
    }

    fn go(&mut self) {
        if !self.alive() {
            return;
        }
        let (nb, nx, ny) = self.n;
        if self.b.len() < nb {
            for v in [false, true] {
                self.b.push(v);
                self.go();
                self.b.pop();
            }
        } else if self.x.len() < nx {
            if let Some(hi) = self.doms.0.bound(&self.x) {
                for v in 0..=hi {
                    self.x.push(v);
                    self.go();
                    self.x.pop();
                }
            }
        } else if self.y.len() < ny {
            if let Some(hi) = self.doms.1.bound(&self.y) {
                for v in 0..=hi {
                    self.y.push(v);
                    self.go();
                    self.y.pop();
                }
            }
        } else {
            (self.emit)(&self.b, &self.x, &self.y);
        }
    }
}

/// Calls `emit` on every full valuation of `nb` booleans, `nx` X values and
/// `ny` Y values (in that order) satisfying `constraint`, in lexicographic
/// order with `false < true`.
pub fn enumerate(
    (nb, nx, ny): (usize, usize, usize),
    x_dom: Domain,
    y_dom: Domain,
    constraint: &Expr,
    emit: impl FnMut(&[bool], &[u32], &[u32]),
) {
    let mut s = Search {
        n: (nb, nx, ny),
        doms: (x_dom, y_dom),
        constraint,
        b: Vec::with_capacity(nb),
        x: Vec::with_capacity(nx),
        y: Vec::with_capacity(ny),
        emit,
    };
    s.go();
}

/// Renames values to first-occurrence order; the result is a
/// restricted-growth string.
pub fn rgs(values: &[u32]) -> Vec<u32> {
    let mut map: Vec<(u32, u32)> = Vec::new();
    values
        .iter()
        .map(|v| match map.iter().find(|(k, _)| k == v) {
            Some(&(_, id)) => id,
            None => {
                let id = map.len() as u32;
                map.push((*v, id));
                id
            }
        })
        .collect()
}

/// Bell numbers `B(n)`, the number of set partitions of `n` elements.
pub fn bell(n: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(n: (usize, usize, usize), x: Domain, y: Domain, c: &Expr) -> usize {
        let mut k = 0;
        enumerate(n, x, y, c, |_, _, _| k += 1);
        k
    }

    #[test]
    fn bell_numbers() {
        let b: Vec<u128> = (0..8).map(bell).collect();
        assert_eq!(b, vec![1, 1, 2, 5, 15, 52, 203, 877]);
        assert_eq!(bell(11), 678_570);
    }

    #[test]
    fn rgs_counts_are_bell() {
        let t = Expr::Const(true);
        for n in 0..6 {
            assert_eq!(count((0, n, 0), Domain::Rgs, Domain::Rgs, &t) as u128, bell(n));
        }
        assert_eq!(count((1, 2, 0), Domain::Rgs, Domain::Rgs, &t), 4);
    }

    #[test]
    fn ranges_and_pruning() {
        let t = Expr::Const(true);
        assert_eq!(count((1, 2, 1), Domain::Range(3), Domain::Range(2), &t), 2 * 9 * 2);
        let contradiction = Expr::Not(Box::new(Expr::Or(
            Box::new(Expr::Not(Box::new(Expr::Bool(0)))),
            Box::new(Expr::Bool(0)),
        )));
        assert_eq!(count((1, 1, 1), Domain::Rgs, Domain::Rgs, &contradiction), 0);
        assert_eq!(count((0, 1, 0), Domain::Range(0), Domain::Rgs, &t), 0);
    }

    #[test]
    fn first_occurrence_renaming() {
        assert_eq!(rgs(&[7, 3, 7, 9]), vec![0, 1, 0, 2]);
        assert_eq!(rgs(&[]), Vec::<u32>::new());
    }
}
