//! Random specifications, mappings and transition systems, plus the checks
//! shared by the property suites and the acceptance run.

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

use paw_core::constrain::{constrain, horizontal_check, static_alphabet, Interface};
use paw_core::equiv::{self, Relation};
use paw_core::kernel::{
    ActPattern, ActionLabel, ActionSet, Bounds, CommEntry, CommTable, FlatSpec, Lts, ProcessExpr,
    RenameMap, RenameRule, Semantics, Term,
};
use paw_core::refine::{apply_mapping, vertical_check, Mapping};
use paw_core::syntax::load;

use super::oracle;

/// Draws `n` values from `s` with a fixed seed.
pub fn sample<S: Strategy>(s: S, n: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..n)
        .map(|_| s.new_tree(&mut runner).expect("strategy").current())
        .collect()
}

// ---- syntax ----

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop::sample::select(vec!["c1", "c2", "message", "ack"]).prop_map(Term::constant);
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::connect(a, b)),
            inner.prop_map(|t| Term::app("tbterm", vec![t])),
        ]
    })
}

fn action() -> impl Strategy<Value = (String, Vec<Term>)> {
    (
        prop::sample::select(vec!["a", "b", "snd", "rec-msg", "P"]),
        prop::collection::vec(term(), 0..3),
    )
        .prop_map(|(n, args)| (n.to_string(), args))
}

fn pattern() -> impl Strategy<Value = ActPattern> {
    prop::sample::select(vec!["a", "b", "c", "snd"]).prop_map(ActPattern::any)
}

fn flat(
    items: Vec<ProcessExpr>,
    unwrap: fn(ProcessExpr) -> Result<Vec<ProcessExpr>, ProcessExpr>,
) -> Vec<ProcessExpr> {
    let mut out = Vec::new();
    for x in items {
        match unwrap(x) {
            Ok(inner) => out.extend(inner),
            Err(x) => out.push(x),
        }
    }
    out
}

/// Process terms in the shape the parser produces: n-ary operators never
/// directly nest, calls and atoms are both `Atom`.
pub fn syntax_expr() -> impl Strategy<Value = ProcessExpr> {
    let leaf = prop_oneof![
        6 => action().prop_map(|(n, a)| ProcessExpr::Atom(n, a)),
        1 => Just(ProcessExpr::Skip),
        1 => Just(ProcessExpr::Delta),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let items = prop::collection::vec(inner.clone(), 2..4);
        prop_oneof![
            items
                .clone()
                .prop_map(|xs| ProcessExpr::Seq(flat(xs, |x| match x {
                    ProcessExpr::Seq(v) => Ok(v),
                    o => Err(o),
                }))),
            items
                .clone()
                .prop_map(|xs| ProcessExpr::Alt(flat(xs, |x| match x {
                    ProcessExpr::Alt(v) => Ok(v),
                    o => Err(o),
                }))),
            items.prop_map(|xs| ProcessExpr::Par(flat(xs, |x| match x {
                ProcessExpr::Par(v) => Ok(v),
                o => Err(o),
            }))),
            (prop::collection::vec(pattern(), 1..3), inner.clone())
                .prop_map(|(h, b)| ProcessExpr::Encaps(ActionSet::new(h), Box::new(b))),
            (prop::collection::vec(pattern(), 1..3), inner.clone())
                .prop_map(|(h, b)| ProcessExpr::Hide(ActionSet::new(h), Box::new(b))),
            (pattern(), pattern(), inner.clone()).prop_map(|(f, t, b)| ProcessExpr::Rename(
                RenameMap(vec![RenameRule { from: f, to: t }]),
                Box::new(b)
            )),
            inner.prop_map(|b| ProcessExpr::Sum("d".into(), "DATA".into(), Box::new(b))),
        ]
    })
}

// ---- finite terms ----

/// Finite terms over the first `k` of `a, b, c`, depth at most `depth`.
pub fn finite_term(depth: u32, k: usize) -> impl Strategy<Value = ProcessExpr> {
    let names: Vec<&'static str> = ["a", "b", "c"][..k].to_vec();
    let leaf = prop_oneof![
        6 => prop::sample::select(names).prop_map(ProcessExpr::atom),
        1 => Just(ProcessExpr::Skip),
        1 => Just(ProcessExpr::Delta),
    ];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        let pair = (inner.clone(), inner);
        prop_oneof![
            pair.clone().prop_map(|(x, y)| ProcessExpr::Seq(vec![x, y])),
            pair.clone().prop_map(|(x, y)| ProcessExpr::Alt(vec![x, y])),
            pair.prop_map(|(x, y)| ProcessExpr::Par(vec![x, y])),
        ]
    })
}

fn abc_spec() -> FlatSpec {
    load(
        "process module M begin atoms a b c processes Z definitions Z = a end M",
        "M",
    )
    .expect("fixed source")
}

pub fn lts_of(spec: &FlatSpec, e: &ProcessExpr) -> Lts {
    Semantics::new(spec, Bounds::default())
        .build_lts(e)
        .expect("finite term")
}

/// `x . tau` and `x` are rooted weakly bisimilar, by the checker and the
/// oracle alike.
pub fn law_holds(x: &ProcessExpr) -> Result<(), String> {
    let spec = abc_spec();
    let l = lts_of(&spec, &ProcessExpr::Seq(vec![x.clone(), ProcessExpr::Skip]));
    let r = lts_of(&spec, x);
    let fast = equiv::rooted_weak_bisim(&l, &r).related;
    let slow = oracle::rooted_weak(&l, &r);
    if fast && slow {
        Ok(())
    } else {
        Err(format!("{x}: checker {fast}, oracle {slow}"))
    }
}

// ---- guarded recursive processes ----

/// A guarded body over `names` whose tails may call `me`.
fn guarded(names: Vec<&'static str>, me: &'static str) -> impl Strategy<Value = ProcessExpr> {
    let atom = prop::sample::select(names).prop_map(ProcessExpr::atom);
    let tail = prop_oneof![
        3 => Just(Some(ProcessExpr::call(me))),
        1 => Just(None),
    ];
    let simple = (prop::collection::vec(atom.clone(), 1..4), tail)
        .prop_map(|(mut xs, t)| {
            xs.extend(t);
            ProcessExpr::seq(xs)
        })
        .boxed();
    simple.prop_recursive(2, 12, 3, move |inner| {
        let atom = atom.clone();
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(ProcessExpr::Alt),
            (atom, inner).prop_map(|(a, rest)| ProcessExpr::Seq(vec![a, rest])),
        ]
    })
}

#[derive(Debug, Clone, Copy)]
pub enum Fate {
    Refine(usize),
    Rename,
    Keep,
}

#[derive(Debug, Clone)]
pub struct RefineCase {
    pub body: ProcessExpr,
    pub fates: [Fate; 3],
}

impl RefineCase {
    pub fn mapping_text(&self) -> String {
        let mut refine = String::new();
        let mut rename = String::new();
        for (n, f) in ["a", "b", "c"].iter().zip(self.fates) {
            match f {
                Fate::Refine(len) => {
                    let body: Vec<String> = (1..=len).map(|i| format!("{n}{i}")).collect();
                    refine.push_str(&format!("  {n} -> {}\n", body.join(" . ")));
                }
                Fate::Rename => rename.push_str(&format!("  {n} -> {n}r\n")),
                Fate::Keep => {}
            }
        }
        let mut out = String::new();
        if !refine.is_empty() {
            out.push_str("refine\n");
            out.push_str(&refine);
        }
        if !rename.is_empty() {
            out.push_str("rename\n");
            out.push_str(&rename);
        }
        out.push_str("process\n  P -> R\n");
        out
    }
}

pub fn refine_case() -> impl Strategy<Value = RefineCase> {
    let fate = prop_oneof![2 => (1usize..4).prop_map(Fate::Refine), 1 => Just(Fate::Rename), 1 => Just(Fate::Keep)];
    (
        guarded(vec!["a", "b", "c"], "P"),
        [fate.clone(), fate.clone(), fate],
    )
        .prop_map(|(body, fates)| RefineCase { body, fates })
}

/// Refining `P` with the case's mapping yields a vertical implementation.
pub fn refinement_sound(c: &RefineCase) -> Result<(), String> {
    let src = format!(
        "process module M begin atoms a b c a1 a2 a3 b1 b2 b3 c1 c2 c3 ar br cr \
         processes P definitions P = {} end M",
        c.body
    );
    let mut spec = load(&src, "M").map_err(|e| format!("{src}: {e}"))?;
    let m = Mapping::parse(&c.mapping_text()).map_err(|e| e.to_string())?;
    let applied =
        apply_mapping(&[spec.def("P").unwrap().clone()], &m).map_err(|e| e.to_string())?;
    for d in applied.defs {
        spec.add_def(d);
    }
    let r = vertical_check(
        &spec,
        &ProcessExpr::call("P"),
        &ProcessExpr::call("R"),
        &m,
        Bounds::default(),
    )
    .map_err(|e| e.to_string())?;
    if r.related {
        Ok(())
    } else {
        Err(format!("P = {}\nmapping:\n{}{r}", c.body, c.mapping_text()))
    }
}

#[derive(Debug, Clone)]
pub struct ConstrainCase {
    pub process: ProcessExpr,
    pub constraint: ProcessExpr,
}

pub fn constrain_case() -> impl Strategy<Value = ConstrainCase> {
    (
        guarded(vec!["a", "b", "c"], "P"),
        guarded(vec!["x", "y", "ap", "bp", "cp"], "Q"),
    )
        .prop_map(|(process, constraint)| ConstrainCase {
            process,
            constraint,
        })
}

/// The constrained process, seen through its interface, only does what
/// the original could.
pub fn constraining_sound(c: &ConstrainCase) -> Result<(), String> {
    let src = format!(
        "process module M begin atoms a b c x y ap bp cp ca cb cc \
         processes P Q definitions P = {}  Q = {} end M",
        c.process, c.constraint
    );
    let spec = load(&src, "M").map_err(|e| format!("{src}: {e}"))?;
    let (pa, qa) = (c.process.atom_names(), c.constraint.atom_names());
    let comms = CommTable::new(
        [("a", "ap", "ca"), ("b", "bp", "cb"), ("c", "cp", "cc")]
            .into_iter()
            .filter(|(x, y, _)| pa.contains(*x) && qa.contains(*y))
            .map(|(x, y, r)| CommEntry::simple(x, y, r))
            .collect(),
    );
    let (p, q) = (ProcessExpr::call("P"), ProcessExpr::call("Q"));
    let k = constrain(&spec, &p, &q, &comms).map_err(|e| e.to_string())?;
    let sa = static_alphabet(&k.spec, &p).map_err(|e| e.to_string())?;
    let ca = static_alphabet(&k.spec, &q).map_err(|e| e.to_string())?;
    let i = Interface::for_constrained(&k, &sa, &ca);
    let r = horizontal_check(
        &k.spec,
        &p,
        &k.expr,
        &i,
        &ActionSet::default(),
        Relation::Trace,
        Bounds::default(),
    )
    .map_err(|e| e.to_string())?;
    if r.related() {
        Ok(())
    } else {
        Err(format!("P = {}\nQ = {}\n{r}", c.process, c.constraint))
    }
}

// ---- transition systems ----

fn label(i: usize) -> ActionLabel {
    match i {
        0 => ActionLabel::tau(),
        i => ActionLabel::new(["a", "b", "c"][i - 1], Vec::new()),
    }
}

/// A random LTS with at most `max` states over `tau, a, b, c`.
pub fn lts(max: usize) -> impl Strategy<Value = Lts> {
    (1..=max)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((0..n, 0usize..4, 0..n), 0..=2 * n),
                prop::collection::vec(0..n, 0..=n / 3 + 1),
            )
        })
        .prop_map(|(n, edges, term)| {
            Lts::from_edges(
                n,
                0,
                edges
                    .into_iter()
                    .map(|(a, l, b)| (a, label(l), b))
                    .collect(),
                term,
            )
        })
}

/// Renumbers states and duplicates some of them: a strongly bisimilar copy.
fn shuffle(l: &Lts, perm_seed: u64, dup: usize) -> Lts {
    let n = l.num_states();
    let mut order: Vec<usize> = (0..n).collect();
    let mut x = perm_seed | 1;
    for i in (1..n).rev() {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        order.swap(i, (x % (i as u64 + 1)) as usize);
    }
    let dup = dup.min(n);
    // the copy of state s is n + s for s < dup
    let id = |s: usize| order[s];
    let mut edges = Vec::new();
    for t in &l.transitions {
        edges.push((id(t.from), t.label.clone(), id(t.to)));
        if t.to < dup {
            edges.push((id(t.from), t.label.clone(), n + t.to));
        }
        if t.from < dup {
            edges.push((n + t.from, t.label.clone(), id(t.to)));
        }
    }
    let term: Vec<usize> = l
        .terminating
        .iter()
        .flat_map(|&s| {
            if s < dup {
                vec![id(s), n + s]
            } else {
                vec![id(s)]
            }
        })
        .collect();
    Lts::from_edges(n + dup, id(l.initial), edges, term)
}

/// Inserts a τ before some visible transitions: weakly but usually not
/// strongly bisimilar.
fn stretch(l: &Lts, every: usize) -> Lts {
    let mut n = l.num_states();
    let mut edges = Vec::new();
    for (i, t) in l.transitions.iter().enumerate() {
        if !t.label.is_tau() && i % every == 0 {
            edges.push((t.from, ActionLabel::tau(), n));
            edges.push((n, t.label.clone(), t.to));
            n += 1;
        } else {
            edges.push((t.from, t.label.clone(), t.to));
        }
    }
    Lts::from_edges(n, l.initial, edges, l.terminating.iter().copied())
}

/// Flips one transition's label or target.
fn perturb(l: &Lts, which: usize) -> Lts {
    let mut edges: Vec<(usize, ActionLabel, usize)> = l
        .transitions
        .iter()
        .map(|t| (t.from, t.label.clone(), t.to))
        .collect();
    if edges.is_empty() {
        edges.push((l.initial, label(1), l.initial));
    } else {
        let i = which % edges.len();
        edges[i].1 = label((which / edges.len()) % 4);
        if which.is_multiple_of(3) {
            edges[i].2 = (edges[i].2 + 1) % l.num_states();
        }
    }
    Lts::from_edges(
        l.num_states(),
        l.initial,
        edges,
        l.terminating.iter().copied(),
    )
}

/// Pairs with a good share of related instances under each relation, at
/// most 30 states per side.
pub fn lts_pair() -> impl Strategy<Value = (Lts, Lts)> {
    let max = 15;
    prop_oneof![
        (lts(30), lts(30)),
        (lts(max), any::<u64>(), 0usize..5).prop_map(|(l, s, d)| {
            let r = shuffle(&l, s, d);
            (l, r)
        }),
        (lts(10), 1usize..4).prop_map(|(l, k)| {
            let r = stretch(&l, k);
            (l, r)
        }),
        (lts(max), any::<u64>(), 0usize..64).prop_map(|(l, s, w)| {
            let r = perturb(&shuffle(&l, s, 2), w);
            (l, r)
        }),
    ]
}

/// Every checker agrees with its oracle on this pair.
pub fn agrees_with_oracle(l1: &Lts, l2: &Lts) -> Result<(), String> {
    let mut bad = Vec::new();
    let pairs = [
        (
            "strong",
            equiv::strong_bisim(l1, l2).related,
            oracle::strong(l1, l2),
        ),
        (
            "weak",
            equiv::weak_bisim(l1, l2).related,
            oracle::weak(l1, l2),
        ),
        (
            "rooted-weak",
            equiv::rooted_weak_bisim(l1, l2).related,
            oracle::rooted_weak(l1, l2),
        ),
        (
            "trace<=5",
            equiv::weak_trace_included(l1, l2, Some(5)).related,
            oracle::trace_included(l1, l2, 5),
        ),
    ];
    for (name, fast, slow) in pairs {
        if fast != slow {
            bad.push(format!("{name}: checker {fast}, oracle {slow}"));
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(format!(
            "{}\n--- left\n{}--- right\n{}",
            bad.join("; "),
            l1.serialize(),
            l2.serialize()
        ))
    }
}
