//! Discrete-tick simulation of one scenario.
//!
//! Each tick runs in a fixed order: starts, terminating ends caused by those
//! starts, negations, then closing terminating events that nothing can
//! follow any more.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::analyze::check_bundle;
use crate::bundle::{EventKind, ModelBundle, Scenario};
use crate::diag::{has_errors, Code, Diagnostic};
use crate::sim::behavior::{derive_behavior, BehaviorGraph, EdgeSupport};
use crate::sim::trace::{EventTrace, Negation, Span, Trace};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("bundle has errors")]
    Invalid(Vec<Diagnostic>),
    #[error("scenario names undeclared event `{0}`")]
    UnknownEvent(String),
    #[error("`{a}` and `{b}` are exclusive but both would be actual{}", at_tick(*.tick))]
    Exclusivity { a: String, b: String, tick: Option<u32> },
    #[error("`{event}` is enabled at tick {tick} but the scenario chooses neither it nor `{other}`")]
    UnresolvedChoice {
        event: String,
        other: String,
        tick: u32,
    },
}

fn at_tick(tick: Option<u32>) -> String {
    tick.map(|t| format!(" at tick {t}")).unwrap_or_default()
}

impl SimError {
    pub fn to_diagnostics(&self) -> Vec<Diagnostic> {
        let code = match self {
            SimError::Invalid(diags) => return diags.clone(),
            SimError::UnknownEvent(_) => Code::UnknownEvent,
            SimError::Exclusivity { .. } => Code::Exclusivity,
            SimError::UnresolvedChoice { .. } => Code::UnresolvedChoice,
        };
        vec![Diagnostic::new(code, self.to_string())]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimOutcome {
    pub trace: Trace,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Default)]
struct EventState {
    start: Option<u32>,
    /// End of the currently open span, once known.
    end: Option<u32>,
    /// Normal completion: end for terminating, start for extended.
    completed: Option<u32>,
    negated: Option<u32>,
    blocked: bool,
}

struct NegativeState {
    name: String,
    /// Events whose region holds the source action of an arc aimed at the
    /// target.
    triggers: Vec<usize>,
    fired: bool,
}

/// Step-wise simulator. Most callers want [`simulate`].
pub struct Simulator<'a> {
    bundle: &'a ModelBundle,
    graph: BehaviorGraph,
    injected: BTreeMap<usize, u32>,
    has_injections: bool,
    /// For each event, the pair partner whose choice is still open.
    unresolved: Vec<Vec<usize>>,
    negatives: Vec<NegativeState>,
    state: Vec<EventState>,
    negations: Vec<Negation>,
    warnings: Vec<Diagnostic>,
    tick: u32,
}

impl<'a> Simulator<'a> {
    pub fn new(
        bundle: &'a ModelBundle,
        graph: BehaviorGraph,
        scenario: &Scenario,
    ) -> Result<Self, SimError> {
        let index = |name: &str| {
            bundle
                .event_index(name)
                .ok_or_else(|| SimError::UnknownEvent(name.to_string()))
        };
        let n = bundle.events.len();
        let mut state = vec![EventState::default(); n];
        let mut chosen = vec![false; n];
        for name in &scenario.choices {
            chosen[index(name)?] = true;
        }
        let mut unresolved = vec![Vec::new(); n];
        for pair in &bundle.exclusive {
            let (a, b) = (index(&pair.a)?, index(&pair.b)?);
            match (chosen[a], chosen[b]) {
                (true, true) => {
                    return Err(SimError::Exclusivity {
                        a: pair.a.clone(),
                        b: pair.b.clone(),
                        tick: None,
                    })
                }
                (true, false) => state[b].blocked = true,
                (false, true) => state[a].blocked = true,
                (false, false) => {
                    unresolved[a].push(b);
                    unresolved[b].push(a);
                }
            }
        }
        let mut injected = BTreeMap::new();
        for (tick, name) in &scenario.starts {
            let i = index(name)?;
            if state[i].blocked {
                let other = bundle
                    .exclusive
                    .iter()
                    .find_map(|p| {
                        if p.a == *name {
                            Some(p.b.clone())
                        } else if p.b == *name {
                            Some(p.a.clone())
                        } else {
                            None
                        }
                    })
                    .unwrap_or_default();
                return Err(SimError::Exclusivity {
                    a: name.clone(),
                    b: other,
                    tick: Some(*tick),
                });
            }
            let entry = injected.entry(i).or_insert(*tick);
            *entry = (*entry).min(*tick);
        }
        let negatives = bundle
            .negatives
            .iter()
            .filter_map(|neg| {
                bundle.event_index(&neg.negates)?;
                let sources: Vec<_> = bundle
                    .static_model
                    .negative_arcs()
                    .filter(|a| a.target == neg.negates)
                    .map(|a| a.src)
                    .collect();
                let triggers = (0..n)
                    .filter(|&i| sources.iter().any(|&s| bundle.events[i].region.contains(s)))
                    .collect();
                Some(NegativeState {
                    name: neg.name.clone(),
                    triggers,
                    fired: false,
                })
            })
            .collect();
        Ok(Simulator {
            bundle,
            graph,
            has_injections: !injected.is_empty(),
            injected,
            unresolved,
            negatives,
            state,
            negations: Vec::new(),
            warnings: Vec::new(),
            tick: 0,
        })
    }

    /// The next tick [`step`](Self::step) will process.
    pub fn tick(&self) -> u32 {
        self.tick
    }

    pub fn is_actual(&self, name: &str) -> bool {
        self.bundle
            .event_index(name)
            .is_some_and(|i| self.open(i))
    }

    fn open(&self, i: usize) -> bool {
        let s = &self.state[i];
        s.start.is_some() && s.end.is_none() && s.negated.is_none()
    }

    fn kind(&self, i: usize) -> EventKind {
        self.bundle.events[i].kind
    }

    fn enabled(&self, i: usize, t: u32) -> bool {
        let s = &self.state[i];
        if s.start.is_some() || s.blocked || s.negated.is_some() {
            return false;
        }
        if let Some(&at) = self.injected.get(&i) {
            return at == t;
        }
        if self.graph.is_root(i) {
            return !self.has_injections && t == 0;
        }
        if let Some(join) = self.graph.join_into(i) {
            return join
                .required
                .iter()
                .all(|&r| self.state[r].completed.is_some_and(|c| c < t));
        }
        self.graph.preds(i).all(|e| {
            let p = &self.state[e.pred];
            p.start.is_some_and(|s| s < t) && p.negated.is_none()
        })
    }

    /// Whether an event that has not started can still start after `t`.
    fn viable(&self, i: usize, t: u32, memo: &mut Vec<Option<bool>>) -> bool {
        if let Some(v) = memo[i] {
            return v;
        }
        let s = &self.state[i];
        let v = if s.blocked || s.negated.is_some() {
            false
        } else if s.start.is_some() {
            true
        } else if let Some(&at) = self.injected.get(&i) {
            at > t
        } else if self.graph.is_root(i) {
            false
        } else if let Some(join) = self.graph.join_into(i) {
            join.required.iter().all(|&r| {
                let rs = &self.state[r];
                rs.completed.is_some() || self.viable(r, t, memo)
            })
        } else {
            self.graph.preds(i).all(|e| self.viable(e.pred, t, memo))
        };
        memo[i] = Some(v);
        v
    }

    fn pending_start(&self, i: usize, t: u32, memo: &mut Vec<Option<bool>>) -> bool {
        self.state[i].start.is_none() && self.viable(i, t, memo)
    }

    /// Closes the target's open span at the current tick. A target that is
    /// not actual is left alone and a warning is logged.
    pub fn apply_negative(&mut self, name: &str) {
        let t = self.tick;
        let Some(neg) = self.bundle.negative(name) else {
            return;
        };
        let Some(target) = self.bundle.event_index(&neg.negates) else {
            return;
        };
        if !self.open(target) {
            self.warnings.push(Diagnostic::new(
                Code::NegNoop,
                format!("`{name}` fired at tick {t} but `{}` was not actual", neg.negates),
            ));
            return;
        }
        let s = &mut self.state[target];
        s.negated = Some(t);
        s.end = Some(t);
        self.negations.push(Negation {
            tick: t,
            name: name.to_string(),
            target: neg.negates.clone(),
        });
    }

    /// Processes the current tick and advances.
    pub fn step(&mut self) -> Result<(), SimError> {
        let t = self.tick;
        let n = self.state.len();

        let starting: Vec<usize> = (0..n).filter(|&i| self.enabled(i, t)).collect();
        for &i in &starting {
            if let Some(&other) = self.unresolved[i].first() {
                return Err(SimError::UnresolvedChoice {
                    event: self.bundle.events[i].name.clone(),
                    other: self.bundle.events[other].name.clone(),
                    tick: t,
                });
            }
        }
        for &i in &starting {
            let s = &mut self.state[i];
            s.start = Some(t);
            if self.bundle.events[i].kind == EventKind::Extended {
                s.completed = Some(t);
            }
        }

        for p in 0..n {
            if !self.open(p) || self.kind(p) != EventKind::Terminating {
                continue;
            }
            let followed = self.graph.succs(p).any(|e| {
                e.support == EdgeSupport::FlowBacked && self.state[e.succ].start == Some(t)
            });
            if followed {
                self.state[p].end = Some(t);
                self.state[p].completed = Some(t);
            }
        }

        for k in 0..self.negatives.len() {
            let neg = &self.negatives[k];
            if neg.fired {
                continue;
            }
            let due = neg
                .triggers
                .iter()
                .any(|&e| self.state[e].completed.is_some_and(|c| c <= t));
            if due {
                self.negatives[k].fired = true;
                let name = self.negatives[k].name.clone();
                self.apply_negative(&name);
            }
        }

        let mut memo = vec![None; n];
        for p in 0..n {
            if !self.open(p) || self.kind(p) != EventKind::Terminating {
                continue;
            }
            let successors: Vec<usize> = self
                .graph
                .succs(p)
                .filter(|e| e.support == EdgeSupport::FlowBacked)
                .map(|e| e.succ)
                .collect();
            if !successors.iter().any(|&s| self.pending_start(s, t, &mut memo)) {
                self.state[p].end = Some(t + 1);
                self.state[p].completed = Some(t + 1);
            }
        }

        self.tick += 1;
        Ok(())
    }

    /// Nothing left to start, end or negate.
    pub fn is_quiescent(&self) -> bool {
        let n = self.state.len();
        if self.tick == 0 {
            return n == 0;
        }
        let t = self.tick - 1;
        let mut memo = vec![None; n];
        let open_terminating = (0..n).any(|i| self.open(i) && self.kind(i) == EventKind::Terminating);
        let pending = (0..n).any(|i| self.pending_start(i, t, &mut memo));
        let negation_due = self.negatives.iter().any(|neg| {
            !neg.fired && neg.triggers.iter().any(|&e| self.state[e].completed.is_some())
        });
        !(open_terminating || pending || negation_due)
    }

    /// Builds the trace. Open spans close at `horizon`; without one the
    /// horizon is one past the last start, end or negation.
    pub fn finish(mut self, horizon: Option<u32>) -> SimOutcome {
        let last = self
            .state
            .iter()
            .flat_map(|s| [s.start, s.end])
            .flatten()
            .chain(self.negations.iter().map(|n| n.tick))
            .max();
        let horizon = horizon.unwrap_or_else(|| last.map_or(0, |t| t + 1));
        let events = self
            .bundle
            .events
            .iter()
            .zip(&self.state)
            .map(|(def, s)| {
                let spans = match s.start {
                    Some(start) if start < horizon => {
                        let end = s.end.unwrap_or(horizon).min(horizon);
                        let span = Span(start, end);
                        if span.is_empty() {
                            vec![]
                        } else {
                            vec![span]
                        }
                    }
                    _ => vec![],
                };
                EventTrace {
                    name: def.name.clone(),
                    kind: def.kind,
                    spans,
                }
            })
            .collect();
        self.negations.retain(|n| n.tick < horizon);
        SimOutcome {
            trace: Trace {
                horizon,
                events,
                negations: self.negations,
            },
            warnings: self.warnings,
        }
    }

    /// Steps until quiescent, or through `horizon - 1` when a horizon is
    /// given.
    pub fn run(mut self, horizon: Option<u32>) -> Result<SimOutcome, SimError> {
        let cap = match horizon {
            Some(h) => h,
            None => {
                let latest = self.injected.values().copied().max().unwrap_or(0);
                latest + 4 * (self.state.len() as u32 + 2)
            }
        };
        while self.tick < cap {
            self.step()?;
            if horizon.is_none() && self.is_quiescent() {
                break;
            }
        }
        let stalled = !self.is_quiescent();
        let mut outcome = self.finish(horizon);
        if stalled {
            outcome.warnings.push(Diagnostic::new(
                Code::Horizon,
                format!("behavior has not settled by tick {}", outcome.trace.horizon),
            ));
        }
        Ok(outcome)
    }
}

/// Validates the bundle, derives its behavior and runs one scenario.
pub fn simulate(bundle: &ModelBundle, scenario: &Scenario) -> Result<SimOutcome, SimError> {
    let diags = check_bundle(bundle);
    if has_errors(&diags) {
        return Err(SimError::Invalid(diags.into_iter().filter(Diagnostic::is_error).collect()));
    }
    let graph = derive_behavior(bundle).map_err(SimError::Invalid)?;
    Simulator::new(bundle, graph, scenario)?.run(scenario.horizon)
}
