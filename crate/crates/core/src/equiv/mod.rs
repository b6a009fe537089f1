//! Strong bisimulation, rooted weak bisimulation and weak trace inclusion.

mod graph;
mod partition;

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::kernel::Lts;
use graph::{Graph, TAU, TICK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Strong,
    Weak,
    RootedWeak,
    Trace,
}

impl Relation {
    pub fn parse(s: &str) -> Option<Relation> {
        match s {
            "strong" => Some(Relation::Strong),
            "weak" => Some(Relation::Weak),
            "rooted-weak" | "rw" => Some(Relation::RootedWeak),
            "trace" => Some(Relation::Trace),
            _ => None,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Strong => "strong",
            Relation::Weak => "weak",
            Relation::RootedWeak => "rooted weak",
            Relation::Trace => "weak trace inclusion",
        })
    }
}

/// Block ids of the final partition, per state of each side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub left_state: usize,
    pub right_state: usize,
    /// Actions leading to the distinguishing pair, then the action only one
    /// side can do. τ steps print as `tau`.
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictReport {
    pub relation: Relation,
    pub related: bool,
    pub witness: Option<Witness>,
    pub counterexample: Option<Counterexample>,
    pub warnings: Vec<String>,
}

impl VerdictReport {
    fn related(relation: Relation, witness: Witness) -> Self {
        VerdictReport {
            relation,
            related: true,
            witness: Some(witness),
            counterexample: None,
            warnings: Vec::new(),
        }
    }

    fn unrelated(relation: Relation, cx: Counterexample) -> Self {
        VerdictReport {
            relation,
            related: false,
            witness: None,
            counterexample: Some(cx),
            warnings: Vec::new(),
        }
    }

    /// One line for logs and CI.
    pub fn summary(&self) -> String {
        match (&self.counterexample, self.related) {
            (_, true) => format!("related ({})", self.relation),
            (Some(cx), false) => format!(
                "not related ({}): counterexample <{}>",
                self.relation,
                cx.trace.join(", ")
            ),
            (None, false) => format!("not related ({})", self.relation),
        }
    }
}

impl fmt::Display for VerdictReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.summary())?;
        if let Some(cx) = &self.counterexample {
            writeln!(
                f,
                "  distinguishing states: left {} / right {}",
                cx.left_state, cx.right_state
            )?;
        }
        if let Some(w) = &self.witness {
            let blocks: BTreeSet<usize> = w.left.iter().chain(&w.right).copied().collect();
            writeln!(f, "  {} equivalence class(es)", blocks.len())?;
        }
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}

fn witness(g: &Graph, blocks: &[usize]) -> Witness {
    Witness {
        left: blocks[..g.offset].to_vec(),
        right: blocks[g.offset..g.sink].to_vec(),
    }
}

fn local(g: &Graph, s: usize) -> usize {
    if s >= g.offset {
        s - g.offset
    } else {
        s
    }
}

/// Shortest path over unrelated pairs to a pair where one side has a move
/// whose label the other side lacks. `moves` is the relation used for both
/// sides (the raw graph for strong, the saturated one for weak).
fn distinguish(
    moves: &Graph,
    blocks: &[usize],
    start: (usize, usize),
    prefix: Vec<String>,
) -> Counterexample {
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([(start, prefix)]);
    let mut fallback = None;
    while let Some(((p, q), trace)) = queue.pop_front() {
        let lp: BTreeSet<usize> = moves.succ[p].iter().map(|&(l, _)| l).collect();
        let lq: BTreeSet<usize> = moves.succ[q].iter().map(|&(l, _)| l).collect();
        if let Some(&l) = lp.symmetric_difference(&lq).next() {
            let mut t = trace;
            t.push(moves.labels[l].clone());
            return Counterexample {
                left_state: local(moves, p),
                right_state: local(moves, q),
                trace: t,
            };
        }
        if fallback.is_none() {
            fallback = Some(Counterexample {
                left_state: local(moves, p),
                right_state: local(moves, q),
                trace: trace.clone(),
            });
        }
        for &(l, p2) in &moves.succ[p] {
            for &(l2, q2) in &moves.succ[q] {
                if l == l2 && blocks[p2] != blocks[q2] && seen.insert((p2, q2)) {
                    let mut t = trace.clone();
                    t.push(moves.labels[l].clone());
                    queue.push_back(((p2, q2), t));
                }
            }
        }
    }
    fallback.expect("start pair is unrelated")
}

pub fn strong_bisim(l1: &Lts, l2: &Lts) -> VerdictReport {
    let g = Graph::union(l1, l2);
    let blocks = partition::coarsest_partition(&g);
    if blocks[g.init.0] == blocks[g.init.1] {
        VerdictReport::related(Relation::Strong, witness(&g, &blocks))
    } else {
        VerdictReport::unrelated(
            Relation::Strong,
            distinguish(&g, &blocks, g.init, Vec::new()),
        )
    }
}

/// Weak bisimilarity (no root condition).
pub fn weak_bisim(l1: &Lts, l2: &Lts) -> VerdictReport {
    let g = Graph::union(l1, l2).saturate();
    let blocks = partition::coarsest_partition(&g);
    if blocks[g.init.0] == blocks[g.init.1] {
        VerdictReport::related(Relation::Weak, witness(&g, &blocks))
    } else {
        VerdictReport::unrelated(Relation::Weak, distinguish(&g, &blocks, g.init, Vec::new()))
    }
}

pub fn rooted_weak_bisim(l1: &Lts, l2: &Lts) -> VerdictReport {
    let raw = Graph::union(l1, l2);
    let sat = raw.saturate();
    let blocks = partition::coarsest_partition(&sat);
    let (p0, q0) = raw.init;

    // every initial move must be answered by a weak move of the same label,
    // with τ answered by at least one τ
    let answers = |q: usize, l: usize| -> BTreeSet<usize> {
        if l == TAU {
            raw.tau_plus(q)
        } else {
            sat.succ[q]
                .iter()
                .filter(|&&(m, _)| m == l)
                .map(|&(_, t)| t)
                .collect()
        }
    };
    for (p, q, flip) in [(p0, q0, false), (q0, p0, true)] {
        for &(l, p1) in &raw.succ[p] {
            let targets = answers(q, l);
            if targets.iter().any(|&t| blocks[t] == blocks[p1]) {
                continue;
            }
            let label = raw.labels[l].clone();
            let (ls, rs) = if flip {
                (local(&raw, q), local(&raw, p))
            } else {
                (local(&raw, p), local(&raw, q))
            };
            let cx = match targets.iter().next() {
                None => Counterexample {
                    left_state: ls,
                    right_state: rs,
                    trace: vec![label],
                },
                Some(&t) if l == TICK => Counterexample {
                    left_state: ls,
                    right_state: local(&raw, t),
                    trace: vec![label],
                },
                Some(&t) => {
                    let start = if flip { (t, p1) } else { (p1, t) };
                    distinguish(&sat, &blocks, start, vec![label])
                }
            };
            return VerdictReport::unrelated(Relation::RootedWeak, cx);
        }
    }
    VerdictReport::related(Relation::RootedWeak, witness(&sat, &blocks))
}

/// Every observable trace of `l1` (up to `bound` visible actions, if
/// given) is a trace of `l2`.
pub fn weak_trace_included(l1: &Lts, l2: &Lts, bound: Option<usize>) -> VerdictReport {
    let g = Graph::union(l1, l2);
    let start_set: Vec<usize> = g.tau_closure(g.init.1).into_iter().collect();
    let mut seen: HashSet<(usize, Vec<usize>)> = HashSet::new();
    let mut queue: VecDeque<(usize, Vec<usize>, Vec<String>)> = VecDeque::new();
    seen.insert((g.init.0, start_set.clone()));
    queue.push_back((g.init.0, start_set, Vec::new()));
    let mut classes: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    while let Some((p, set, trace)) = queue.pop_front() {
        let next = classes.len();
        classes.entry(set.clone()).or_insert(next);
        for &(l, p2) in &g.succ[p] {
            if l == TICK {
                continue;
            }
            if l == TAU {
                if seen.insert((p2, set.clone())) {
                    queue.push_front((p2, set.clone(), trace.clone()));
                }
                continue;
            }
            if bound.is_some_and(|b| trace.len() >= b) {
                continue;
            }
            let mut set2 = BTreeSet::new();
            for &q in &set {
                for &(m, q2) in &g.succ[q] {
                    if m == l {
                        set2.extend(g.tau_closure(q2));
                    }
                }
            }
            let mut t = trace.clone();
            t.push(g.labels[l].clone());
            if set2.is_empty() {
                let right = set.first().map(|&q| local(&g, q)).unwrap_or(0);
                return VerdictReport::unrelated(
                    Relation::Trace,
                    Counterexample {
                        left_state: local(&g, p),
                        right_state: right,
                        trace: t,
                    },
                );
            }
            let set2: Vec<usize> = set2.into_iter().collect();
            if seen.insert((p2, set2.clone())) {
                queue.push_back((p2, set2, t));
            }
        }
    }
    let mut left = vec![0; g.offset];
    let mut right_blocks = vec![0; g.sink - g.offset];
    for (p, set) in &seen {
        left[*p] = classes.get(set).copied().unwrap_or(0);
        for &q in set {
            right_blocks[q - g.offset] = classes.get(set).copied().unwrap_or(0);
        }
    }
    let mut r = VerdictReport::related(
        Relation::Trace,
        Witness {
            left,
            right: right_blocks,
        },
    );
    if let Some(b) = bound {
        r.warnings
            .push(format!("traces explored up to {b} visible action(s)"));
    }
    r
}

pub fn check(relation: Relation, l1: &Lts, l2: &Lts) -> VerdictReport {
    match relation {
        Relation::Strong => strong_bisim(l1, l2),
        Relation::Weak => weak_bisim(l1, l2),
        Relation::RootedWeak => rooted_weak_bisim(l1, l2),
        Relation::Trace => weak_trace_included(l1, l2, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ActionLabel;

    fn l(n: &str) -> ActionLabel {
        if n == "tau" {
            ActionLabel::tau()
        } else {
            ActionLabel::new(n, vec![])
        }
    }

    fn lts(n: usize, edges: &[(usize, &str, usize)], term: &[usize]) -> Lts {
        Lts::from_edges(
            n,
            0,
            edges.iter().map(|&(a, b, c)| (a, l(b), c)).collect(),
            term.iter().copied(),
        )
    }

    #[test]
    fn branching_time_distinguishes_choice_placement() {
        let p = lts(4, &[(0, "a", 1), (1, "b", 2), (1, "c", 3)], &[2, 3]);
        let q = lts(
            5,
            &[(0, "a", 1), (0, "a", 2), (1, "b", 3), (2, "c", 4)],
            &[3, 4],
        );
        let r = strong_bisim(&p, &q);
        assert!(!r.related);
        assert_eq!(r.counterexample.unwrap().trace[0], "a");
        assert!(weak_trace_included(&p, &q, None).related);
        assert!(weak_trace_included(&q, &p, None).related);
    }

    #[test]
    fn tau_chains_are_rooted_weak_equal() {
        let p = lts(3, &[(0, "tau", 1), (1, "e", 2)], &[2]);
        let q = lts(4, &[(0, "tau", 1), (1, "tau", 2), (2, "e", 3)], &[3]);
        assert!(rooted_weak_bisim(&p, &q).related);
        assert!(!strong_bisim(&p, &q).related);
    }

    #[test]
    fn root_condition_rejects_leading_tau() {
        let p = lts(2, &[(0, "a", 1)], &[1]);
        let q = lts(3, &[(0, "tau", 1), (1, "a", 2)], &[2]);
        assert!(weak_bisim(&p, &q).related);
        let r = rooted_weak_bisim(&p, &q);
        assert!(!r.related);
        assert_eq!(r.counterexample.unwrap().trace, vec!["tau"]);
    }

    #[test]
    fn termination_is_observable() {
        let p = lts(2, &[(0, "a", 1)], &[1]);
        let q = lts(2, &[(0, "a", 1)], &[]);
        assert!(!strong_bisim(&p, &q).related);
        assert!(!rooted_weak_bisim(&p, &q).related);
    }

    #[test]
    fn trace_counterexample_is_shortest() {
        let p = lts(3, &[(0, "a", 1), (1, "c", 2)], &[]);
        let q = lts(3, &[(0, "a", 1), (1, "b", 2)], &[]);
        let r = weak_trace_included(&p, &q, None);
        assert!(!r.related);
        assert_eq!(r.counterexample.unwrap().trace, vec!["a", "c"]);
        assert!(weak_trace_included(&p, &q, Some(1)).related);
    }

    #[test]
    fn trace_inclusion_sees_through_tau() {
        let p = lts(3, &[(0, "tau", 1), (1, "a", 2)], &[]);
        let q = lts(4, &[(0, "a", 1), (1, "tau", 2), (2, "b", 3)], &[]);
        assert!(weak_trace_included(&p, &q, None).related);
        assert!(!weak_trace_included(&q, &p, None).related);
    }
}
