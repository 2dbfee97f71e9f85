//! Root-steps, redex discovery under full and balanced contexts, single
//! steps, normalization, exhaustive sequence enumeration and the syntactic
//! classification of balanced normal forms.
//!
//! The three root-steps are
//!
//! ```text
//! (\x.t) v        beta_v   t{v/x}              (v a value)
//! (\x.t) u s      sigma_1  (\x.t s) u          (x not free in s)
//! v ((\x.s) u)    sigma_3  (\x.v s) u          (x not free in v)
//! ```
//!
//! A context is *balanced* when it enters an abstraction body only if that
//! abstraction is applied; on paths this means every `Body` step is
//! immediately preceded by a `FunSide` step.

use crate::term::{fresh_name, Term, Value};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RedexKind {
    BetaV,
    Sigma1,
    Sigma3,
}

impl RedexKind {
    pub const ALL: [RedexKind; 3] = [RedexKind::BetaV, RedexKind::Sigma1, RedexKind::Sigma3];
    pub const SIGMA: [RedexKind; 2] = [RedexKind::Sigma1, RedexKind::Sigma3];
    pub const BETA_ONLY: [RedexKind; 1] = [RedexKind::BetaV];

    pub fn label(self) -> &'static str {
        match self {
            RedexKind::BetaV => "beta_v",
            RedexKind::Sigma1 => "sigma_1",
            RedexKind::Sigma3 => "sigma_3",
        }
    }
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PathStep {
    FunSide,
    ArgSide,
    Body,
}

impl PathStep {
    pub fn label(self) -> &'static str {
        match self {
            PathStep::FunSide => "fun",
            PathStep::ArgSide => "arg",
            PathStep::Body => "body",
        }
    }
}

/// A path from the root of a term to a subterm.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Position(pub Vec<PathStep>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    /// Balanced iff every `Body` step immediately follows a `FunSide` step,
    /// i.e. the enclosing context is generated by
    /// `B ::= <> | (\x.B)t | Bt | tB`.
    pub fn is_balanced(&self) -> bool {
        self.0.iter().enumerate().all(|(i, s)| {
            *s != PathStep::Body || (i > 0 && self.0[i - 1] == PathStep::FunSide)
        })
    }

    /// The subterm reached by this path, if the path is valid for `t`.
    pub fn subterm_in<'a>(&self, t: &'a Term) -> Option<&'a Term> {
        let mut cur = t;
        for step in &self.0 {
            cur = match (step, cur) {
                (PathStep::FunSide, Term::App(f, _)) => f,
                (PathStep::ArgSide, Term::App(_, a)) => a,
                (PathStep::Body, Term::Abs(_, b)) => b,
                _ => return None,
            };
        }
        Some(cur)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(s.label())?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Balanced,
    Full,
}

/// A redex occurrence: where, which root-step, and under which contexts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReductionStep {
    pub position: Position,
    pub kind: RedexKind,
    pub mode: Mode,
}

/// A recorded reduction: the start term and each step with its result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionSequence {
    pub start: Term,
    pub steps: Vec<(ReductionStep, Term)>,
    /// true when the final term has no redex for the sequence's mode
    pub complete: bool,
}

impl ReductionSequence {
    pub fn empty(start: Term, complete: bool) -> ReductionSequence {
        ReductionSequence { start, steps: Vec::new(), complete }
    }

    /// The number of beta_v steps; sigma steps are not counted.
    pub fn leng_betav(&self) -> usize {
        self.steps.iter().filter(|(s, _)| s.kind == RedexKind::BetaV).count()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_term(&self) -> &Term {
        self.steps.last().map(|(_, t)| t).unwrap_or(&self.start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("invalid position: no {kind} redex at {position} admissible in {mode:?} mode")]
    InvalidPosition { position: Position, kind: RedexKind, mode: Mode },
    #[error("budget exceeded: more than {max_sequences} reduction sequences")]
    BudgetExceeded { max_sequences: usize },
}

/// How a term sits in the syntactic taxonomy of balanced normal forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// variable or abstraction
    Value,
    /// neutral applicative term with a free head variable
    AppNeutral,
    /// balanced-normal but neither value nor neutral: a stuck redex `(\x.n)a`
    Normal,
    Reducible,
}

/// Membership in the neutral grammar `a ::= x v | x a | a n`.
pub fn is_neutral(t: &Term) -> bool {
    match t {
        Term::App(f, a) => match f.as_ref() {
            Term::Var(_) => a.is_value() || is_neutral(a),
            Term::App(..) => is_neutral(f) && is_balanced_normal(a),
            Term::Abs(..) => false,
        },
        _ => false,
    }
}

/// Membership in the normal-form grammar `n ::= v | a | (\x.n)a`.
pub fn is_balanced_normal(t: &Term) -> bool {
    t.is_value()
        || is_neutral(t)
        || match t {
            Term::App(f, a) => match f.as_ref() {
                Term::Abs(_, body) => is_balanced_normal(body) && is_neutral(a),
                _ => false,
            },
            _ => false,
        }
}

/// Classifies directly from the mutual grammars, without reducing.
pub fn classify(t: &Term) -> Classification {
    if t.is_value() {
        Classification::Value
    } else if is_neutral(t) {
        Classification::AppNeutral
    } else if is_balanced_normal(t) {
        Classification::Normal
    } else {
        Classification::Reducible
    }
}

/// The root-step matching the whole of `t`, if any. At most one kind
/// matches at a given position; overlaps only happen between nested
/// positions.
pub fn root_redex_kind(t: &Term) -> Option<RedexKind> {
    match t {
        Term::App(f, a) => match f.as_ref() {
            Term::Abs(..) if a.is_value() => Some(RedexKind::BetaV),
            Term::App(g, _) if matches!(g.as_ref(), Term::Abs(..)) => Some(RedexKind::Sigma1),
            _ if f.is_value() && matches!(a.as_ref(), Term::App(g, _) if matches!(g.as_ref(), Term::Abs(..))) => {
                Some(RedexKind::Sigma3)
            }
            _ => None,
        },
        _ => None,
    }
}

/// All redexes admissible in `mode`, leftmost-outermost. Sigma side
/// conditions never discard a redex: they are discharged by renaming the
/// binder when the step fires.
pub fn find_redexes(t: &Term, mode: Mode) -> Vec<ReductionStep> {
    find_redexes_filtered(t, mode, &RedexKind::ALL)
}

/// Same as [`find_redexes`] restricted to the given root-step kinds; the
/// `BetaV`-only filter yields Plotkin's reduction, the sigma-only filter
/// the commutation sub-calculus.
pub fn find_redexes_filtered(t: &Term, mode: Mode, kinds: &[RedexKind]) -> Vec<ReductionStep> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    walk(t, mode, kinds, &mut path, &mut out);
    out
}

fn walk(
    t: &Term,
    mode: Mode,
    kinds: &[RedexKind],
    path: &mut Vec<PathStep>,
    out: &mut Vec<ReductionStep>,
) {
    if let Some(kind) = root_redex_kind(t) {
        if kinds.contains(&kind) {
            out.push(ReductionStep { position: Position(path.clone()), kind, mode });
        }
    }
    match t {
        Term::Var(_) => {}
        Term::Abs(_, body) => {
            let enter = mode == Mode::Full || path.last() == Some(&PathStep::FunSide);
            if enter {
                path.push(PathStep::Body);
                walk(body, mode, kinds, path, out);
                path.pop();
            }
        }
        Term::App(f, a) => {
            path.push(PathStep::FunSide);
            walk(f, mode, kinds, path, out);
            path.pop();
            path.push(PathStep::ArgSide);
            walk(a, mode, kinds, path, out);
            path.pop();
        }
    }
}

/// Contracts the redex named by `step`. Errors if the position does not
/// hold a redex of the right kind admissible in the step's mode.
pub fn apply_step(t: &Term, step: &ReductionStep) -> Result<Term, ReductionError> {
    let err = || ReductionError::InvalidPosition {
        position: step.position.clone(),
        kind: step.kind,
        mode: step.mode,
    };
    if step.mode == Mode::Balanced && !step.position.is_balanced() {
        return Err(err());
    }
    rewrite_at(t, &step.position.0, step.kind).ok_or_else(err)
}

fn rewrite_at(t: &Term, path: &[PathStep], kind: RedexKind) -> Option<Term> {
    match path.split_first() {
        None => contract_root(t, kind),
        Some((step, rest)) => match (step, t) {
            (PathStep::FunSide, Term::App(f, a)) => {
                Some(Term::app(rewrite_at(f, rest, kind)?, a.as_ref().clone()))
            }
            (PathStep::ArgSide, Term::App(f, a)) => {
                Some(Term::app(f.as_ref().clone(), rewrite_at(a, rest, kind)?))
            }
            (PathStep::Body, Term::Abs(x, b)) => {
                Some(Term::abs(x.clone(), rewrite_at(b, rest, kind)?))
            }
            _ => None,
        },
    }
}

fn contract_root(t: &Term, kind: RedexKind) -> Option<Term> {
    if root_redex_kind(t) != Some(kind) {
        return None;
    }
    match (kind, t) {
        (RedexKind::BetaV, Term::App(f, a)) => {
            let Term::Abs(x, body) = f.as_ref() else { return None };
            let v = Value::new(a.as_ref().clone())?;
            Some(body.subst(x, &v))
        }
        (RedexKind::Sigma1, Term::App(f, s)) => {
            // (\x.b) u s  ->  (\x'.b' s) u
            let Term::App(lam, u) = f.as_ref() else { return None };
            let Term::Abs(x, b) = lam.as_ref() else { return None };
            let mut avoid = b.free_vars();
            avoid.extend(s.free_vars());
            avoid.insert(x.clone());
            let x2 = fresh_name(x, &avoid);
            let b2 = b.subst_term(x, &Term::var(x2.clone()));
            Some(Term::app(
                Term::abs(x2, Term::app(b2, s.as_ref().clone())),
                u.as_ref().clone(),
            ))
        }
        (RedexKind::Sigma3, Term::App(v, a)) => {
            // v ((\x.b) u)  ->  (\x'.v b') u
            let Term::App(lam, u) = a.as_ref() else { return None };
            let Term::Abs(x, b) = lam.as_ref() else { return None };
            let mut avoid = b.free_vars();
            avoid.extend(v.free_vars());
            avoid.insert(x.clone());
            let x2 = fresh_name(x, &avoid);
            let b2 = b.subst_term(x, &Term::var(x2.clone()));
            Some(Term::app(
                Term::abs(x2, Term::app(v.as_ref().clone(), b2)),
                u.as_ref().clone(),
            ))
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalizeOutcome {
    NormalForm(Term, ReductionSequence),
    FuelExhausted(ReductionSequence),
}

impl NormalizeOutcome {
    pub fn sequence(&self) -> &ReductionSequence {
        match self {
            NormalizeOutcome::NormalForm(_, d) | NormalizeOutcome::FuelExhausted(d) => d,
        }
    }

    pub fn normal_form(&self) -> Option<&Term> {
        match self {
            NormalizeOutcome::NormalForm(t, _) => Some(t),
            NormalizeOutcome::FuelExhausted(_) => None,
        }
    }
}

pub const DEFAULT_FUEL: usize = 10_000;
pub const DEFAULT_ENUM_FUEL: usize = 25;
pub const DEFAULT_MAX_SEQUENCES: usize = 100_000;

/// Leftmost-outermost normalization: repeatedly contracts the first redex
/// of [`find_redexes`]. Divergence shows up as `FuelExhausted`; for
/// balanced mode that is an honest answer because normalization and strong
/// normalization coincide there.
pub fn normalize(t: &Term, mode: Mode, fuel: usize) -> NormalizeOutcome {
    normalize_filtered(t, mode, &RedexKind::ALL, fuel)
}

pub fn normalize_filtered(
    t: &Term,
    mode: Mode,
    kinds: &[RedexKind],
    fuel: usize,
) -> NormalizeOutcome {
    let mut seq = ReductionSequence::empty(t.clone(), false);
    let mut cur = t.clone();
    for _ in 0..fuel {
        let redexes = find_redexes_filtered(&cur, mode, kinds);
        match redexes.into_iter().next() {
            None => {
                seq.complete = true;
                return NormalizeOutcome::NormalForm(cur, seq);
            }
            Some(step) => {
                let next = apply_step(&cur, &step).expect("redex from find_redexes applies");
                seq.steps.push((step, next.clone()));
                cur = next;
            }
        }
    }
    if find_redexes_filtered(&cur, mode, kinds).is_empty() {
        seq.complete = true;
        return NormalizeOutcome::NormalForm(cur, seq);
    }
    NormalizeOutcome::FuelExhausted(seq)
}

/// Depth-first enumeration of all maximal reduction sequences up to `fuel`
/// steps each. Sequences ending in a normal form are flagged complete.
pub fn enumerate_sequences(
    t: &Term,
    mode: Mode,
    fuel: usize,
    max_sequences: usize,
) -> Result<Vec<ReductionSequence>, ReductionError> {
    enumerate_sequences_filtered(t, mode, &RedexKind::ALL, fuel, max_sequences)
}

pub fn enumerate_sequences_filtered(
    t: &Term,
    mode: Mode,
    kinds: &[RedexKind],
    fuel: usize,
    max_sequences: usize,
) -> Result<Vec<ReductionSequence>, ReductionError> {
    fn rec(
        cur: &Term,
        start: &Term,
        trail: &mut Vec<(ReductionStep, Term)>,
        mode: Mode,
        kinds: &[RedexKind],
        fuel: usize,
        max_sequences: usize,
        out: &mut Vec<ReductionSequence>,
    ) -> Result<(), ReductionError> {
        let redexes = find_redexes_filtered(cur, mode, kinds);
        let done = redexes.is_empty();
        if done || trail.len() >= fuel {
            if out.len() >= max_sequences {
                return Err(ReductionError::BudgetExceeded { max_sequences });
            }
            out.push(ReductionSequence {
                start: start.clone(),
                steps: trail.clone(),
                complete: done,
            });
            return Ok(());
        }
        for step in redexes {
            let next = apply_step(cur, &step).expect("redex from find_redexes applies");
            trail.push((step, next.clone()));
            rec(&next, start, trail, mode, kinds, fuel, max_sequences, out)?;
            trail.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    rec(t, t, &mut Vec::new(), mode, kinds, fuel, max_sequences, &mut out)?;
    Ok(out)
}

/// `|v|_0 = 0`; `|t u|_0 = |s|_0 + |u|_0 + 1` when `t = \x.s`, otherwise
/// `|t|_0 + |u|_0 + 1`: the number of applications under a balanced
/// context.
pub fn balanced_size(t: &Term) -> usize {
    match t {
        Term::Var(_) | Term::Abs(..) => 0,
        Term::App(f, a) => {
            let f_part = match f.as_ref() {
                Term::Abs(_, body) => balanced_size(body),
                other => balanced_size(other),
            };
            f_part + balanced_size(a) + 1
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    Distinct,
    Unknown,
}

/// Semi-decision for shuffling equivalence via balanced normal forms:
/// sound but incomplete, since equivalent divergent terms (which a joint
/// reduction could witness) come back `Unknown`.
pub fn shuf_equiv_semi(t: &Term, u: &Term, fuel: usize) -> Equivalence {
    let nt = normalize(t, Mode::Balanced, fuel);
    let nu = normalize(u, Mode::Balanced, fuel);
    match (nt.normal_form(), nu.normal_form()) {
        (Some(a), Some(b)) => {
            if a == b {
                Equivalence::Equivalent
            } else {
                Equivalence::Distinct
            }
        }
        _ => Equivalence::Unknown,
    }
}

/// The reduction graph explored breadth-first over alpha-classes.
#[derive(Clone, Debug)]
pub struct ReductionGraph {
    pub nodes: Vec<Term>,
    pub edges: Vec<(usize, RedexKind, usize)>,
    /// false when exploration stopped at `max_nodes`
    pub complete: bool,
}

impl ReductionGraph {
    pub fn explore(t: &Term, mode: Mode, max_nodes: usize) -> ReductionGraph {
        let mut nodes = Vec::new();
        let mut index: HashMap<Term, usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        let mut complete = true;
        nodes.push(t.clone());
        index.insert(t.clone(), 0);
        queue.push_back(0usize);
        while let Some(i) = queue.pop_front() {
            let cur = nodes[i].clone();
            for step in find_redexes(&cur, mode) {
                let next = apply_step(&cur, &step).expect("redex applies");
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        if nodes.len() >= max_nodes {
                            complete = false;
                            continue;
                        }
                        let j = nodes.len();
                        nodes.push(next.clone());
                        index.insert(next, j);
                        queue.push_back(j);
                        j
                    }
                };
                edges.push((i, step.kind, j));
            }
        }
        ReductionGraph { nodes, edges, complete }
    }

    /// Indices of nodes with no outgoing edge.
    pub fn normal_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|i| !self.edges.iter().any(|(s, _, _)| s == i))
            .collect()
    }

    pub fn has_cycle(&self) -> bool {
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for (s, _, d) in &self.edges {
            adj[*s].push(*d);
        }
        // 0 unvisited, 1 on stack, 2 done
        let mut state = vec![0u8; n];
        fn dfs(v: usize, adj: &[Vec<usize>], state: &mut [u8]) -> bool {
            state[v] = 1;
            for &w in &adj[v] {
                if state[w] == 1 || (state[w] == 0 && dfs(w, adj, state)) {
                    return true;
                }
            }
            state[v] = 2;
            false
        }
        (0..n).any(|v| state[v] == 0 && dfs(v, &adj, &mut state))
    }
}

/// Wire format for `--json` traces; terms are printed in the term grammar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    pub start: String,
    pub steps: Vec<TraceStepJson>,
    pub leng_betav: usize,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStepJson {
    pub kind: String,
    pub path: Vec<String>,
    pub term: String,
}

impl TraceJson {
    pub fn from_sequence(seq: &ReductionSequence, unicode: bool) -> TraceJson {
        TraceJson {
            start: crate::term::print_term(&seq.start, unicode),
            steps: seq
                .steps
                .iter()
                .map(|(s, t)| TraceStepJson {
                    kind: s.kind.label().to_string(),
                    path: s.position.0.iter().map(|p| p.label().to_string()).collect(),
                    term: crate::term::print_term(t, unicode),
                })
                .collect(),
            leng_betav: seq.leng_betav(),
            complete: seq.complete,
        }
    }
}
