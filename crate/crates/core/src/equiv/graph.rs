//! Integer-labelled graphs over the disjoint union of two LTSs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::kernel::Lts;

pub const TAU: usize = 0;
/// Successful termination, as an edge into a shared sink state.
pub const TICK: usize = 1;

#[derive(Debug, Clone)]
pub struct Graph {
    /// `labels[i]` is the printed form of label id `i`.
    pub labels: Vec<String>,
    /// Outgoing `(label, target)` per state, sorted.
    pub succ: Vec<Vec<(usize, usize)>>,
    /// First state of the right-hand LTS.
    pub offset: usize,
    pub init: (usize, usize),
    pub sink: usize,
}

impl Graph {
    /// States `0..l1.n` are `l1`, then `l2`, then the termination sink.
    pub fn union(l1: &Lts, l2: &Lts) -> Graph {
        let mut ids: BTreeMap<String, usize> = BTreeMap::new();
        let mut labels = vec!["tau".to_string(), "<terminated>".to_string()];
        let offset = l1.num_states();
        let n = offset + l2.num_states() + 1;
        let sink = n - 1;
        let mut succ = vec![Vec::new(); n];
        for (lts, base) in [(l1, 0), (l2, offset)] {
            for t in &lts.transitions {
                let id = if t.label.is_tau() {
                    TAU
                } else {
                    let text = t.label.to_string();
                    *ids.entry(text.clone()).or_insert_with(|| {
                        labels.push(text);
                        labels.len() - 1
                    })
                };
                succ[base + t.from].push((id, base + t.to));
            }
            for &s in &lts.terminating {
                succ[base + s].push((TICK, sink));
            }
        }
        for s in &mut succ {
            s.sort();
            s.dedup();
        }
        Graph {
            labels,
            succ,
            offset,
            init: (l1.initial, offset + l2.initial),
            sink,
        }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    /// States reachable by zero or more τ steps.
    pub fn tau_closure(&self, s: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &(l, y) in &self.succ[x] {
                if l == TAU && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// The weak transition relation as a graph: `p =a=> q` for visible `a`
    /// (τ* a τ*), and `p =τ=> q` for τ* (so every state has a τ self-loop).
    pub fn saturate(&self) -> Graph {
        let closures: Vec<BTreeSet<usize>> = (0..self.len()).map(|s| self.tau_closure(s)).collect();
        let mut succ = vec![Vec::new(); self.len()];
        for p in 0..self.len() {
            let mut out: BTreeSet<(usize, usize)> = closures[p].iter().map(|&q| (TAU, q)).collect();
            for &m in &closures[p] {
                for &(l, y) in &self.succ[m] {
                    if l != TAU {
                        out.extend(closures[y].iter().map(|&q| (l, q)));
                    }
                }
            }
            succ[p] = out.into_iter().collect();
        }
        Graph {
            succ,
            ..self.clone()
        }
    }

    /// States reachable by one or more τ steps.
    pub fn tau_plus(&self, s: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &(l, y) in &self.succ[s] {
            if l == TAU {
                out.extend(self.tau_closure(y));
            }
        }
        out
    }
}
