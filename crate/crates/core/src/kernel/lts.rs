//! Finite labelled transition systems: construction and text format.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use super::config::Config;
use super::expr::ProcessExpr;
use super::label::ActionLabel;
use super::sos::Semantics;
use super::KernelError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: usize,
    pub label: ActionLabel,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    /// Canonical text of each state; ids are indices.
    pub states: Vec<String>,
    pub initial: usize,
    /// Sorted and duplicate-free.
    pub transitions: Vec<Transition>,
    pub terminating: BTreeSet<usize>,
}

impl Lts {
    /// An LTS over anonymous states `0..n`.
    pub fn from_edges(
        n: usize,
        initial: usize,
        edges: Vec<(usize, ActionLabel, usize)>,
        terminating: impl IntoIterator<Item = usize>,
    ) -> Lts {
        let mut transitions: Vec<Transition> = edges
            .into_iter()
            .map(|(from, label, to)| Transition { from, label, to })
            .collect();
        transitions.sort();
        transitions.dedup();
        Lts {
            states: (0..n).map(|i| format!("s{i}")).collect(),
            initial,
            transitions,
            terminating: terminating.into_iter().collect(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Outgoing transitions per state.
    pub fn successors(&self) -> Vec<Vec<&Transition>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for t in &self.transitions {
            out[t.from].push(t);
        }
        out
    }

    pub fn outgoing(&self, state: usize) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.from == state)
    }

    /// Visible labels, by printed form.
    pub fn alphabet(&self) -> BTreeSet<String> {
        self.transitions
            .iter()
            .filter(|t| !t.label.is_tau())
            .map(|t| t.label.to_string())
            .collect()
    }

    pub fn tau_count(&self) -> usize {
        self.transitions.iter().filter(|t| t.label.is_tau()).count()
    }

    /// Relabels every transition, e.g. to hide or rename after the fact.
    pub fn map_labels(&self, f: impl Fn(&ActionLabel) -> ActionLabel) -> Lts {
        let edges = self
            .transitions
            .iter()
            .map(|t| (t.from, f(&t.label), t.to))
            .collect();
        let mut l = Lts::from_edges(
            self.states.len(),
            self.initial,
            edges,
            self.terminating.iter().copied(),
        );
        l.states = self.states.clone();
        l
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "states {}", self.states.len());
        let _ = writeln!(out, "transitions {}", self.transitions.len());
        let _ = writeln!(out, "initial {}", self.initial);
        let term: Vec<String> = self.terminating.iter().map(|t| t.to_string()).collect();
        if term.is_empty() {
            out.push_str("terminating\n");
        } else {
            let _ = writeln!(out, "terminating {}", term.join(" "));
        }
        for (i, s) in self.states.iter().enumerate() {
            let _ = writeln!(out, "s {i} {s}");
        }
        for t in &self.transitions {
            let bang = if t.label.shutdown { "!" } else { "" };
            let _ = writeln!(out, "t {} {} {bang}{}", t.from, t.to, t.label);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Lts, KernelError> {
        let bad = |line: usize, msg: &str| KernelError::LtsFormat {
            line,
            message: msg.to_string(),
        };
        let mut n_states = None;
        let mut n_trans = None;
        let mut initial = None;
        let mut terminating = BTreeSet::new();
        let mut states: Vec<String> = Vec::new();
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            let num = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| bad(line_no, "expected a number"))
            };
            match key {
                "states" => n_states = Some(num(rest)?),
                "transitions" => n_trans = Some(num(rest)?),
                "initial" => initial = Some(num(rest)?),
                "terminating" => {
                    for t in rest.split_whitespace() {
                        terminating.insert(num(t)?);
                    }
                }
                "s" => {
                    let (id, text) = rest.split_once(' ').unwrap_or((rest, ""));
                    if num(id)? != states.len() {
                        return Err(bad(line_no, "state ids must be consecutive"));
                    }
                    states.push(text.to_string());
                }
                "t" => {
                    let mut parts = rest.splitn(3, ' ');
                    let from = num(parts.next().unwrap_or(""))?;
                    let to = num(parts.next().unwrap_or(""))?;
                    let mut label_text = parts
                        .next()
                        .ok_or_else(|| bad(line_no, "missing label"))?
                        .trim();
                    let shutdown = label_text.starts_with('!');
                    if shutdown {
                        label_text = &label_text[1..];
                    }
                    let mut label = if label_text == "tau" {
                        ActionLabel::tau()
                    } else {
                        let (name, args) = crate::syntax::parse_action(label_text)
                            .map_err(|e| bad(line_no, &format!("bad label: {e}")))?;
                        ActionLabel::new(name, args)
                    };
                    label.shutdown = shutdown;
                    edges.push((from, label, to));
                }
                _ => return Err(bad(line_no, "unknown line kind")),
            }
        }
        let n = n_states.ok_or_else(|| bad(0, "missing states header"))?;
        if states.is_empty() {
            states = (0..n).map(|i| format!("s{i}")).collect();
        }
        if states.len() != n {
            return Err(bad(0, "state count does not match header"));
        }
        if let Some(m) = n_trans {
            if m != edges.len() {
                return Err(bad(0, "transition count does not match header"));
            }
        }
        let initial = initial.ok_or_else(|| bad(0, "missing initial state"))?;
        if initial >= n
            || edges.iter().any(|(f, _, t)| *f >= n || *t >= n)
            || terminating.iter().any(|t| *t >= n)
        {
            return Err(bad(0, "state id out of range"));
        }
        let mut l = Lts::from_edges(n, initial, edges, terminating);
        l.states = states;
        Ok(l)
    }
}

impl Semantics<'_> {
    /// Breadth-first exploration from `start`.
    pub fn explore(&self, start: Config) -> Result<Lts, KernelError> {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut configs: Vec<Config> = Vec::new();
        let mut texts: Vec<String> = Vec::new();
        let mut queue = VecDeque::new();
        let mut edges = Vec::new();
        let first = start.to_string();
        index.insert(first.clone(), 0);
        texts.push(first);
        configs.push(start);
        queue.push_back(0usize);
        while let Some(s) = queue.pop_front() {
            let cfg = configs[s].clone();
            for step in self.steps(&cfg)? {
                let key = step.target.to_string();
                let to = match index.get(&key) {
                    Some(&t) => t,
                    None => {
                        let t = texts.len();
                        if t >= self.bounds.max_states {
                            return Err(KernelError::StateBudget {
                                limit: self.bounds.max_states,
                                frontier: queue.len() + 1,
                            });
                        }
                        index.insert(key.clone(), t);
                        texts.push(key);
                        configs.push(step.target);
                        queue.push_back(t);
                        t
                    }
                };
                edges.push((s, step.label, to));
            }
        }
        let terminating: Vec<usize> = configs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_done())
            .map(|(i, _)| i)
            .collect();
        let mut l = Lts::from_edges(texts.len(), 0, edges, terminating);
        l.states = texts;
        Ok(l)
    }

    pub fn build_lts(&self, e: &ProcessExpr) -> Result<Lts, KernelError> {
        self.explore(self.initial(e)?)
    }

    pub fn build_entry(&self, entry: &str) -> Result<Lts, KernelError> {
        self.explore(self.initial_for(entry)?)
    }
}
