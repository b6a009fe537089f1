//! Slow, obviously-correct reference implementations of the equivalence
//! checks, working directly on the transition relation.

use std::collections::{BTreeSet, VecDeque};

use paw_core::kernel::Lts;

type Label = Option<String>;

struct Plain {
    succ: Vec<Vec<(Label, usize)>>,
    term: Vec<bool>,
    init: usize,
}

fn plain(l: &Lts) -> Plain {
    let mut succ = vec![Vec::new(); l.num_states()];
    for t in &l.transitions {
        let label = if t.label.is_tau() {
            None
        } else {
            Some(t.label.to_string())
        };
        succ[t.from].push((label, t.to));
    }
    let term = (0..l.num_states())
        .map(|s| l.terminating.contains(&s))
        .collect();
    Plain {
        succ,
        term,
        init: l.initial,
    }
}

fn tau_star(p: &Plain, s: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([s]);
    let mut stack = vec![s];
    while let Some(x) = stack.pop() {
        for (l, y) in &p.succ[x] {
            if l.is_none() && seen.insert(*y) {
                stack.push(*y);
            }
        }
    }
    seen
}

/// Targets of `s =a=> t` found by searching τ* a τ* paths; for `a = None`
/// this is τ* (zero steps allowed).
fn weak_targets(p: &Plain, s: usize, a: &Label) -> BTreeSet<usize> {
    let before = tau_star(p, s);
    if a.is_none() {
        return before;
    }
    let mut out = BTreeSet::new();
    for u in before {
        for (l, v) in &p.succ[u] {
            if l == a {
                out.extend(tau_star(p, *v));
            }
        }
    }
    out
}

/// τ+ targets.
fn tau_plus(p: &Plain, s: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for (l, v) in &p.succ[s] {
        if l.is_none() {
            out.extend(tau_star(p, *v));
        }
    }
    out
}

fn converges(p: &Plain, s: usize) -> bool {
    tau_star(p, s).iter().any(|&u| p.term[u])
}

/// Greatest fixed point by repeated deletion of pairs violating `ok`.
fn gfp(n: usize, m: usize, ok: impl Fn(&Vec<Vec<bool>>, usize, usize) -> bool) -> Vec<Vec<bool>> {
    let mut r = vec![vec![true; m]; n];
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..m {
                if r[i][j] && !ok(&r, i, j) {
                    r[i][j] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return r;
        }
    }
}

fn strong_relation(a: &Plain, b: &Plain) -> Vec<Vec<bool>> {
    gfp(a.succ.len(), b.succ.len(), |r, i, j| {
        a.term[i] == b.term[j]
            && a.succ[i]
                .iter()
                .all(|(l, x)| b.succ[j].iter().any(|(m, y)| l == m && r[*x][*y]))
            && b.succ[j]
                .iter()
                .all(|(m, y)| a.succ[i].iter().any(|(l, x)| l == m && r[*x][*y]))
    })
}

fn weak_relation(a: &Plain, b: &Plain) -> Vec<Vec<bool>> {
    gfp(a.succ.len(), b.succ.len(), |r, i, j| {
        (!a.term[i] || converges(b, j))
            && (!b.term[j] || converges(a, i))
            && a.succ[i]
                .iter()
                .all(|(l, x)| weak_targets(b, j, l).iter().any(|y| r[*x][*y]))
            && b.succ[j]
                .iter()
                .all(|(m, y)| weak_targets(a, i, m).iter().any(|x| r[*x][*y]))
    })
}

pub fn strong(l1: &Lts, l2: &Lts) -> bool {
    let (a, b) = (plain(l1), plain(l2));
    strong_relation(&a, &b)[a.init][b.init]
}

pub fn weak(l1: &Lts, l2: &Lts) -> bool {
    let (a, b) = (plain(l1), plain(l2));
    weak_relation(&a, &b)[a.init][b.init]
}

pub fn rooted_weak(l1: &Lts, l2: &Lts) -> bool {
    let (a, b) = (plain(l1), plain(l2));
    let r = weak_relation(&a, &b);
    let answer = |p: &Plain, s: usize, l: &Label| {
        if l.is_none() {
            tau_plus(p, s)
        } else {
            weak_targets(p, s, l)
        }
    };
    let (i, j) = (a.init, b.init);
    (!a.term[i] || converges(&b, j))
        && (!b.term[j] || converges(&a, i))
        && a.succ[i]
            .iter()
            .all(|(l, x)| answer(&b, j, l).iter().any(|y| r[*x][*y]))
        && b.succ[j]
            .iter()
            .all(|(m, y)| answer(&a, i, m).iter().any(|x| r[*x][*y]))
}

/// All visible traces with at most `k` actions, by exhaustive search over
/// (state, trace) pairs.
pub fn traces(l: &Lts, k: usize) -> BTreeSet<Vec<String>> {
    let p = plain(l);
    let mut seen: BTreeSet<(usize, Vec<String>)> = BTreeSet::new();
    let mut queue = VecDeque::from([(p.init, Vec::new())]);
    seen.insert((p.init, Vec::new()));
    while let Some((s, t)) = queue.pop_front() {
        for (l, v) in &p.succ[s] {
            let mut t2 = t.clone();
            if let Some(a) = l {
                if t.len() == k {
                    continue;
                }
                t2.push(a.clone());
            }
            if seen.insert((*v, t2.clone())) {
                queue.push_back((*v, t2));
            }
        }
    }
    seen.into_iter().map(|(_, t)| t).collect()
}

pub fn trace_included(l1: &Lts, l2: &Lts, k: usize) -> bool {
    traces(l1, k).is_subset(&traces(l2, k))
}

/// Whether `trace` can be performed from the initial state.
pub fn has_trace(l: &Lts, trace: &[String]) -> bool {
    let p = plain(l);
    let mut cur = tau_star(&p, p.init);
    for a in trace {
        let label = Some(a.clone());
        cur = cur
            .iter()
            .flat_map(|&s| weak_targets(&p, s, &label))
            .collect();
    }
    !cur.is_empty()
}
