//! Step-by-step simulation of a specification, the animation model, and the
//! protocol that feeds an animation front end.

mod model;
mod protocol;

pub use model::{anim_model, AnimModel, BoxInfo, Edge, Node};
pub use protocol::{serve_stdio, serve_websocket, ClientMsg, EnabledInfo, ServerMsg, Session};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::kernel::{
    ActionLabel, Bounds, Config, FlatSpec, KernelError, ProcessExpr, Semantics, Step,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("choice {choice} out of range: {enabled} action(s) enabled")]
    OutOfRange { choice: usize, enabled: usize },
    #[error("deadlock: no action is enabled")]
    Deadlock,
    #[error("the system has terminated")]
    Terminated,
    #[error("no entry process; name one explicitly")]
    NoEntry,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// A fired action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub step: usize,
    pub choice: usize,
    pub label: ActionLabel,
    pub participants: Vec<String>,
}

/// Simulation state. Replaying `trace` from the initial configuration
/// reproduces `current`.
#[derive(Debug, Clone)]
pub struct Simulator {
    spec: FlatSpec,
    bounds: Bounds,
    initial: Config,
    current: Config,
    enabled: Vec<Step>,
    trace: Vec<Event>,
}

impl Simulator {
    pub fn new(spec: FlatSpec, entry: Option<&str>, bounds: Bounds) -> Result<Simulator, SimError> {
        let entry = entry
            .map(str::to_string)
            .or_else(|| spec.entry.clone())
            .ok_or(SimError::NoEntry)?;
        if spec.def(&entry).is_none() {
            return Err(KernelError::UnknownProcess(entry).into());
        }
        Simulator::for_expr(spec, &ProcessExpr::call(entry), bounds)
    }

    pub fn for_expr(
        spec: FlatSpec,
        e: &ProcessExpr,
        bounds: Bounds,
    ) -> Result<Simulator, SimError> {
        let initial = Semantics::new(&spec, bounds).initial(e)?;
        let mut s = Simulator {
            spec,
            bounds,
            current: initial.clone(),
            initial,
            enabled: Vec::new(),
            trace: Vec::new(),
        };
        s.refresh()?;
        Ok(s)
    }

    fn refresh(&mut self) -> Result<(), SimError> {
        self.enabled = Semantics::new(&self.spec, self.bounds).steps(&self.current)?;
        Ok(())
    }

    pub fn spec(&self) -> &FlatSpec {
        &self.spec
    }

    pub fn initial(&self) -> &Config {
        &self.initial
    }

    pub fn current(&self) -> &Config {
        &self.current
    }

    /// Enabled transitions in their fixed order; indices are choices.
    pub fn enabled(&self) -> &[Step] {
        &self.enabled
    }

    pub fn trace(&self) -> &[Event] {
        &self.trace
    }

    pub fn step_no(&self) -> usize {
        self.trace.len()
    }

    pub fn is_terminated(&self) -> bool {
        self.current.is_done()
    }

    pub fn is_deadlocked(&self) -> bool {
        !self.is_terminated() && self.enabled.is_empty()
    }

    pub fn step(&mut self, choice: usize) -> Result<Event, SimError> {
        if self.is_terminated() {
            return Err(SimError::Terminated);
        }
        if self.enabled.is_empty() {
            return Err(SimError::Deadlock);
        }
        let s = self
            .enabled
            .get(choice)
            .cloned()
            .ok_or(SimError::OutOfRange {
                choice,
                enabled: self.enabled.len(),
            })?;
        let ev = Event {
            step: self.trace.len(),
            choice,
            label: s.label,
            participants: s.participants,
        };
        self.current = s.target;
        self.refresh()?;
        self.trace.push(ev.clone());
        Ok(ev)
    }

    pub fn reset(&mut self) -> Result<(), SimError> {
        self.current = self.initial.clone();
        self.trace.clear();
        self.refresh()
    }

    /// Up to `n` uniformly random steps, stopping early at deadlock or
    /// termination. The same seed gives the same run.
    pub fn run_random(&mut self, n: usize, seed: u64) -> Result<Vec<Event>, SimError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for _ in 0..n {
            if self.enabled.is_empty() {
                break;
            }
            let choice = rng.gen_range(0..self.enabled.len());
            out.push(self.step(choice)?);
        }
        Ok(out)
    }

    /// Resets and fires the given choices in order.
    pub fn replay(&mut self, choices: &[usize]) -> Result<(), SimError> {
        self.reset()?;
        for &c in choices {
            self.step(c)?;
        }
        Ok(())
    }

    /// Per component id, the actions it is ready to take part in.
    pub fn ready(&self) -> Result<Vec<(String, Vec<ActionLabel>)>, SimError> {
        Ok(Semantics::new(&self.spec, self.bounds).ready_actions(&self.current)?)
    }

    pub fn choices(&self) -> Vec<usize> {
        self.trace.iter().map(|e| e.choice).collect()
    }
}
