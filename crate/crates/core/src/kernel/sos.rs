//! Structural operational semantics over configurations.

use super::config::{Config, ROOT_ID};
use super::expr::ProcessExpr;
use super::label::ActionLabel;
use super::normalize::normalize;
use super::rewrite::Rewriter;
use super::spec::FlatSpec;
use super::term::{Subst, Term};
use super::{Bounds, KernelError};

/// One enabled transition of a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub label: ActionLabel,
    pub target: Config,
    /// Ids of the components that take part (two for a communication).
    pub participants: Vec<String>,
}

enum Next {
    To(Config),
    Halt,
}

struct RawStep {
    label: ActionLabel,
    next: Next,
    parts: Vec<String>,
}

/// What remains of a sequential term after one step.
enum Cont {
    Done,
    Expr(ProcessExpr),
    Config(Config),
    Halt,
}

type Result<T> = std::result::Result<T, KernelError>;

pub struct Semantics<'a> {
    pub spec: &'a FlatSpec,
    pub bounds: Bounds,
}

impl<'a> Semantics<'a> {
    pub fn new(spec: &'a FlatSpec, bounds: Bounds) -> Self {
        Semantics { spec, bounds }
    }

    pub fn rewrite(&self, t: &Term) -> Result<Term> {
        Rewriter::new(&self.spec.equations, self.bounds.max_rewrite_steps).normalize(t)
    }

    fn rewrite_all(&self, ts: &[Term]) -> Result<Vec<Term>> {
        ts.iter().map(|t| self.rewrite(t)).collect()
    }

    /// The initial configuration of a process term.
    pub fn initial(&self, e: &ProcessExpr) -> Result<Config> {
        if let Some(p) = self.spec.unguarded_process() {
            return Err(KernelError::Unguarded(p));
        }
        self.config_of(e, None, None, 0)
    }

    pub fn initial_for(&self, entry: &str) -> Result<Config> {
        if self.spec.def(entry).is_none() {
            return Err(KernelError::UnknownProcess(entry.to_string()));
        }
        self.initial(&ProcessExpr::call(entry))
    }

    fn unfold(&self, name: &str, args: &[Term]) -> Result<ProcessExpr> {
        let def = self
            .spec
            .def(name)
            .ok_or_else(|| KernelError::UnknownProcess(name.to_string()))?;
        if def.params.len() != args.len() {
            return Err(KernelError::Arity {
                name: name.to_string(),
                expected: def.params.len(),
                found: args.len(),
            });
        }
        let args = self.rewrite_all(args)?;
        let s: Subst = def
            .params
            .iter()
            .map(|(v, _)| v.clone())
            .zip(args)
            .collect();
        Ok(def.body.subst(&s))
    }

    fn check_depth(&self, depth: usize, name: &str) -> Result<()> {
        if depth > self.bounds.max_unfold_depth {
            return Err(KernelError::UnfoldDepth {
                process: name.to_string(),
                limit: self.bounds.max_unfold_depth,
            });
        }
        Ok(())
    }

    fn is_structured(&self, e: &ProcessExpr, depth: usize) -> Result<bool> {
        Ok(match e {
            ProcessExpr::Par(_)
            | ProcessExpr::Encaps(..)
            | ProcessExpr::Hide(..)
            | ProcessExpr::Rename(..) => true,
            ProcessExpr::Seq(xs) => match xs.first() {
                Some(x) => self.is_structured(x, depth)?,
                None => false,
            },
            ProcessExpr::Call(n, args) => {
                self.check_depth(depth + 1, n)?;
                self.is_structured(&self.unfold(n, args)?, depth + 1)?
            }
            _ => false,
        })
    }

    fn config_of(
        &self,
        e: &ProcessExpr,
        origin: Option<String>,
        intro: Option<String>,
        depth: usize,
    ) -> Result<Config> {
        let e = normalize(e);
        Ok(match &e {
            ProcessExpr::Par(xs) => Config::par(
                xs.iter()
                    .map(|x| self.config_of(x, origin.clone(), None, depth))
                    .collect::<Result<Vec<_>>>()?,
            ),
            ProcessExpr::Encaps(set, b) => {
                let name = intro.or_else(|| match b.as_ref() {
                    ProcessExpr::Call(n, _) => Some(n.clone()),
                    _ => None,
                });
                let body = self.config_of(b, origin, None, depth)?;
                if body.is_done() {
                    Config::Done
                } else {
                    Config::Encaps {
                        set: set.clone(),
                        name,
                        body: Box::new(body),
                    }
                }
            }
            ProcessExpr::Hide(set, b) => match self.config_of(b, origin, None, depth)? {
                Config::Done => Config::Done,
                body => Config::Hide(set.clone(), Box::new(body)),
            },
            ProcessExpr::Rename(map, b) => match self.config_of(b, origin, None, depth)? {
                Config::Done => Config::Done,
                body => Config::Rename(map.clone(), Box::new(body)),
            },
            ProcessExpr::Seq(xs) if !xs.is_empty() && self.is_structured(&xs[0], depth)? => {
                let head = self.config_of(&xs[0], origin.clone(), None, depth)?;
                let rest = ProcessExpr::seq(xs[1..].to_vec());
                match head {
                    Config::Done => self.config_of(&rest, origin, None, depth)?,
                    h => Config::Seq(Box::new(h), rest),
                }
            }
            ProcessExpr::Call(n, args) => {
                self.check_depth(depth + 1, n)?;
                let body = self.unfold(n, args)?;
                if self.is_structured(&body, depth + 1)? {
                    self.config_of(&body, Some(n.clone()), Some(n.clone()), depth + 1)?
                } else {
                    Config::Thread {
                        origin: Some(n.clone()),
                        expr: ProcessExpr::Call(n.clone(), self.rewrite_all(args)?),
                    }
                }
            }
            _ => Config::Thread {
                origin,
                expr: e.clone(),
            },
        })
    }

    fn action(&self, name: &str, args: &[Term]) -> Result<(ActionLabel, bool)> {
        Ok((
            ActionLabel::new(name, self.rewrite_all(args)?),
            self.spec.is_disrupt(name),
        ))
    }

    fn seq_steps(
        &self,
        e: &ProcessExpr,
        origin: &Option<String>,
        id: &str,
        depth: usize,
    ) -> Result<Vec<(ActionLabel, Cont, Vec<String>)>> {
        let here = || vec![id.to_string()];
        Ok(match e {
            ProcessExpr::Atom(n, args) => {
                let (label, halt) = self.action(n, args)?;
                vec![(label, if halt { Cont::Halt } else { Cont::Done }, here())]
            }
            ProcessExpr::Skip => vec![(ActionLabel::tau(), Cont::Done, here())],
            ProcessExpr::Delta => Vec::new(),
            ProcessExpr::Seq(xs) if xs.is_empty() => vec![(ActionLabel::tau(), Cont::Done, here())],
            ProcessExpr::Seq(xs) => {
                let rest = &xs[1..];
                let mut out = Vec::new();
                for (l, c, p) in self.seq_steps(&xs[0], origin, id, depth)? {
                    let c = match c {
                        Cont::Done if rest.is_empty() => Cont::Done,
                        Cont::Done => Cont::Expr(ProcessExpr::seq(rest.to_vec())),
                        Cont::Expr(h) => {
                            let mut items = vec![h];
                            items.extend(rest.iter().cloned());
                            Cont::Expr(ProcessExpr::Seq(items))
                        }
                        Cont::Config(cfg) if rest.is_empty() => Cont::Config(cfg),
                        Cont::Config(cfg) => Cont::Config(Config::Seq(
                            Box::new(cfg),
                            ProcessExpr::seq(rest.to_vec()),
                        )),
                        Cont::Halt => Cont::Halt,
                    };
                    out.push((l, c, p));
                }
                out
            }
            ProcessExpr::Alt(xs) => {
                let mut out = Vec::new();
                for x in xs {
                    out.extend(self.seq_steps(x, origin, id, depth)?);
                }
                out
            }
            ProcessExpr::Call(n, args) => {
                self.check_depth(depth + 1, n)?;
                let body = self.unfold(n, args)?;
                if self.is_structured(&body, depth + 1)? {
                    let cfg = self.config_of(&body, Some(n.clone()), Some(n.clone()), depth + 1)?;
                    self.nested(&cfg, id)?
                } else {
                    self.seq_steps(&body, origin, id, depth + 1)?
                }
            }
            ProcessExpr::Sum(v, sort, b) => {
                let mut out = Vec::new();
                for t in self.spec.enumerate_sort(sort)? {
                    let mut s = Subst::new();
                    s.insert(v.clone(), self.rewrite(&t)?);
                    out.extend(self.seq_steps(&b.subst(&s), origin, id, depth)?);
                }
                out
            }
            ProcessExpr::Par(_)
            | ProcessExpr::Encaps(..)
            | ProcessExpr::Hide(..)
            | ProcessExpr::Rename(..) => {
                let cfg = self.config_of(e, origin.clone(), None, depth)?;
                self.nested(&cfg, id)?
            }
        })
    }

    fn nested(&self, cfg: &Config, id: &str) -> Result<Vec<(ActionLabel, Cont, Vec<String>)>> {
        Ok(self
            .config_steps(cfg, id)?
            .into_iter()
            .map(|s| {
                let c = match s.next {
                    Next::Halt => Cont::Halt,
                    Next::To(Config::Done) => Cont::Done,
                    Next::To(c) => Cont::Config(c),
                };
                (s.label, c, s.parts)
            })
            .collect())
    }

    fn config_steps(&self, cfg: &Config, id: &str) -> Result<Vec<RawStep>> {
        Ok(match cfg {
            Config::Done => Vec::new(),
            Config::Thread { origin, expr } => {
                let mut out = Vec::new();
                for (label, c, parts) in self.seq_steps(expr, origin, id, 0)? {
                    let next = match c {
                        Cont::Done => Next::To(Config::Done),
                        Cont::Expr(e) => Next::To(self.config_of(&e, origin.clone(), None, 0)?),
                        Cont::Config(c) => Next::To(c),
                        Cont::Halt => Next::Halt,
                    };
                    out.push(RawStep { label, next, parts });
                }
                out
            }
            Config::Par(cs) => self.par_steps(cs, id)?,
            Config::Encaps { set, name, body } => self
                .config_steps(body, id)?
                .into_iter()
                .filter(|s| s.label.is_tau() || !set.contains(&s.label.name, &s.label.args))
                .map(|s| {
                    let next = wrap(s.next, |b| Config::Encaps {
                        set: set.clone(),
                        name: name.clone(),
                        body: Box::new(b),
                    });
                    RawStep { next, ..s }
                })
                .collect(),
            Config::Hide(set, body) => self
                .config_steps(body, id)?
                .into_iter()
                .map(|s| {
                    let mut label = s.label;
                    if !label.is_tau() && set.contains(&label.name, &label.args) {
                        let shutdown = label.shutdown;
                        label = ActionLabel::tau();
                        label.shutdown = shutdown;
                    }
                    let next = wrap(s.next, |b| Config::Hide(set.clone(), Box::new(b)));
                    RawStep {
                        label,
                        next,
                        parts: s.parts,
                    }
                })
                .collect(),
            Config::Rename(map, body) => self
                .config_steps(body, id)?
                .into_iter()
                .map(|s| {
                    let mut label = s.label;
                    if !label.is_tau() {
                        if let Some((n, args)) = map.apply(&label.name, &label.args) {
                            label.name = n;
                            label.args = args;
                        }
                    }
                    let next = wrap(s.next, |b| Config::Rename(map.clone(), Box::new(b)));
                    RawStep {
                        label,
                        next,
                        parts: s.parts,
                    }
                })
                .collect(),
            Config::Seq(head, rest) => {
                let mut out = Vec::new();
                for s in self.config_steps(head, id)? {
                    let next = match s.next {
                        Next::Halt => Next::Halt,
                        Next::To(Config::Done) => Next::To(self.config_of(rest, None, None, 0)?),
                        Next::To(c) => Next::To(Config::Seq(Box::new(c), rest.clone())),
                    };
                    out.push(RawStep { next, ..s });
                }
                out
            }
        })
    }

    fn par_steps(&self, cs: &[Config], id: &str) -> Result<Vec<RawStep>> {
        let per_child: Vec<Vec<RawStep>> = cs
            .iter()
            .enumerate()
            .map(|(i, c)| self.config_steps(c, &format!("{id}.{i}")))
            .collect::<Result<_>>()?;
        let replace = |i: usize, c: Config| {
            let mut children = cs.to_vec();
            children[i] = c;
            Config::par(children)
        };
        let mut out = Vec::new();
        for (i, steps) in per_child.iter().enumerate() {
            for s in steps {
                let next = match &s.next {
                    Next::Halt => Next::Halt,
                    Next::To(c) => Next::To(replace(i, c.clone())),
                };
                out.push(RawStep {
                    label: s.label.clone(),
                    next,
                    parts: s.parts.clone(),
                });
            }
        }
        if self.spec.comms.is_empty() {
            return Ok(out);
        }
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                for s1 in per_child[i].iter().filter(|s| !s.label.is_tau()) {
                    for s2 in per_child[j].iter().filter(|s| !s.label.is_tau()) {
                        let results = self.spec.comms.communicate(
                            (&s1.label.name, &s1.label.args),
                            (&s2.label.name, &s2.label.args),
                        );
                        for (name, args) in results {
                            let (label, halt) = self.action(&name, &args)?;
                            let next = match (&s1.next, &s2.next) {
                                (Next::To(a), Next::To(b)) if !halt => {
                                    let mut children = cs.to_vec();
                                    children[i] = a.clone();
                                    children[j] = b.clone();
                                    Next::To(Config::par(children))
                                }
                                _ => Next::Halt,
                            };
                            let mut parts = s1.parts.clone();
                            parts.extend(s2.parts.iter().cloned());
                            out.push(RawStep { label, next, parts });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// All enabled transitions, in a fixed order (label, participants, target).
    pub fn steps(&self, cfg: &Config) -> Result<Vec<Step>> {
        let mut out: Vec<(Step, String)> = Vec::new();
        for s in self.config_steps(cfg, ROOT_ID)? {
            let mut label = s.label;
            let target = match s.next {
                Next::To(c) => c,
                Next::Halt => {
                    label.shutdown = true;
                    Config::Done
                }
            };
            let mut participants = s.parts;
            participants.sort();
            participants.dedup();
            let key = target.to_string();
            out.push((
                Step {
                    label,
                    target,
                    participants,
                },
                key,
            ));
        }
        out.sort_by(|(a, ka), (b, kb)| {
            a.label
                .cmp(&b.label)
                .then_with(|| a.participants.cmp(&b.participants))
                .then_with(|| ka.cmp(kb))
        });
        out.dedup_by(|(a, ka), (b, kb)| {
            a.label == b.label && a.participants == b.participants && ka == kb
        });
        Ok(out.into_iter().map(|(s, _)| s).collect())
    }

    /// Actions each component could perform on its own, before
    /// communication and encapsulation are applied.
    pub fn ready_actions(&self, cfg: &Config) -> Result<Vec<(String, Vec<ActionLabel>)>> {
        let mut out = Vec::new();
        for (id, t) in cfg.threads() {
            let mut labels: Vec<ActionLabel> = self
                .config_steps(t, &id)?
                .into_iter()
                .map(|s| s.label)
                .collect();
            labels.sort();
            labels.dedup();
            out.push((id, labels));
        }
        Ok(out)
    }
}

fn wrap(next: Next, f: impl FnOnce(Config) -> Config) -> Next {
    match next {
        Next::Halt => Next::Halt,
        Next::To(Config::Done) => Next::To(Config::Done),
        Next::To(c) => Next::To(f(c)),
    }
}
