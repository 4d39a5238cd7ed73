//! Interval propagation + lexicographic backtracking search.

use super::*;
use std::collections::BTreeSet;

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Total propagation/assignment steps before giving up.
    pub step_budget: u64,
    /// Candidate values tried per symbol per search node.
    pub value_tries: u64,
    /// Domain products up to this size are finished exhaustively instead of
    /// returning UNKNOWN.
    pub exhaustive_limit: u128,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step_budget: 500_000,
            value_tries: 4_096,
            exhaustive_limit: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(Assignment),
    Unsat,
    /// Budget exhausted before a verdict; carries the spent step count.
    Unknown(u64),
}

#[derive(Clone)]
struct State {
    /// Current interval per symbol, in domain-key order.
    lo: Vec<i128>,
    hi: Vec<i128>,
    /// Values excluded by ≠ atoms, applied lazily at interval endpoints.
    excluded: Vec<BTreeSet<i128>>,
}

struct Engine<'a> {
    cs: &'a ConstraintSet,
    syms: Vec<&'a Sym>,
    index: BTreeMap<&'a Sym, usize>,
    steps: u64,
    budget_hit: bool,
    config: &'a SolverConfig,
}

/// Decide a constraint set. SAT witnesses are lexicographically smallest in
/// symbol order and always re-checked through [`check`] before they escape.
pub fn solve(cs: &ConstraintSet, config: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    // every atom symbol must carry a domain
    for clause in &cs.clauses {
        for atom in &clause.any_of {
            for (s, _) in &atom.terms {
                if !cs.domains.contains_key(s) {
                    return Err(SolveError::MissingDomain(s.to_string()));
                }
            }
        }
    }

    let syms: Vec<&Sym> = cs.domains.keys().collect();
    let index: BTreeMap<&Sym, usize> = syms.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut engine = Engine {
        cs,
        syms: syms.clone(),
        index,
        steps: 0,
        budget_hit: false,
        config,
    };
    let mut state = State {
        lo: cs.domains.values().map(|d| d.bounds().0).collect(),
        hi: cs.domains.values().map(|d| d.bounds().1).collect(),
        excluded: vec![BTreeSet::new(); syms.len()],
    };

    let outcome = match engine.search(&mut state, 0) {
        Some(codes) => {
            let assignment: Assignment = syms
                .iter()
                .zip(&codes)
                .map(|(s, v)| ((*s).clone(), cs.domains[*s].decode(*v)))
                .collect();
            // soundness: a SAT answer must satisfy the original set
            assert!(
                check(&assignment, cs)? ,
                "solver produced a witness that fails check(): {assignment:?}"
            );
            SolveOutcome::Sat(assignment)
        }
        None if engine.budget_hit => SolveOutcome::Unknown(engine.steps),
        None => SolveOutcome::Unsat,
    };

    // desk-scale completeness: finish small products exhaustively
    if matches!(outcome, SolveOutcome::Unknown(_)) {
        if let Some(product) = cs.domain_product() {
            if product <= config.exhaustive_limit {
                return Ok(match exhaustive(cs) {
                    Some(a) => SolveOutcome::Sat(a),
                    None => SolveOutcome::Unsat,
                });
            }
        }
    }
    Ok(outcome)
}

/// Lexicographic odometer over the whole domain product.
fn exhaustive(cs: &ConstraintSet) -> Option<Assignment> {
    let syms: Vec<&Sym> = cs.domains.keys().collect();
    let bounds: Vec<(i128, i128)> = cs.domains.values().map(|d| d.bounds()).collect();
    let mut current: Vec<i128> = bounds.iter().map(|(lo, _)| *lo).collect();
    let mut codes: BTreeMap<Sym, i128> = BTreeMap::new();
    loop {
        codes.clear();
        for (s, v) in syms.iter().zip(&current) {
            codes.insert((*s).clone(), *v);
        }
        let ok = cs
            .clauses
            .iter()
            .all(|c| c.any_of.iter().any(|a| a.eval(&codes).unwrap_or(false)));
        if ok {
            return Some(
                syms.iter()
                    .zip(&current)
                    .map(|(s, v)| ((*s).clone(), cs.domains[*s].decode(*v)))
                    .collect(),
            );
        }
        let mut i = current.len();
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if current[i] < bounds[i].1 {
                current[i] += 1;
                for j in i + 1..current.len() {
                    current[j] = bounds[j].0;
                }
                break;
            }
        }
    }
}

/// Atom status against current intervals.
#[derive(PartialEq)]
enum Status {
    True,
    False,
    Open,
}

impl<'a> Engine<'a> {
    fn spend(&mut self) -> bool {
        self.steps += 1;
        if self.steps > self.config.step_budget {
            self.budget_hit = true;
            return false;
        }
        true
    }

    /// Interval of `Σ terms + constant` under the state, checked arithmetic.
    fn atom_range(&self, atom: &Atom, state: &State) -> Option<(i128, i128)> {
        let mut min = atom.constant;
        let mut max = atom.constant;
        for (s, c) in &atom.terms {
            let i = self.index[s];
            let (a, b) = (
                c.checked_mul(state.lo[i])?,
                c.checked_mul(state.hi[i])?,
            );
            let (tmin, tmax) = if a <= b { (a, b) } else { (b, a) };
            min = min.checked_add(tmin)?;
            max = max.checked_add(tmax)?;
        }
        Some((min, max))
    }

    fn status(&self, atom: &Atom, state: &State) -> Status {
        let Some((min, max)) = self.atom_range(atom, state) else {
            return Status::Open; // overflow: stay conservative
        };
        match atom.op {
            AtomOp::Le => {
                if max <= 0 {
                    Status::True
                } else if min > 0 {
                    Status::False
                } else {
                    Status::Open
                }
            }
            AtomOp::Ge => {
                if min >= 0 {
                    Status::True
                } else if max < 0 {
                    Status::False
                } else {
                    Status::Open
                }
            }
            AtomOp::Eq => {
                if min == 0 && max == 0 {
                    Status::True
                } else if min > 0 || max < 0 {
                    Status::False
                } else {
                    Status::Open
                }
            }
            AtomOp::Ne => {
                if min > 0 || max < 0 {
                    Status::True
                } else if min == 0 && max == 0 {
                    Status::False
                } else {
                    Status::Open
                }
            }
        }
    }

    /// Tighten intervals so `atom` can hold. Returns false on conflict.
    fn assert_atom(&mut self, atom: &Atom, state: &mut State) -> bool {
        match atom.op {
            AtomOp::Le => self.tighten_le(atom, state, false),
            AtomOp::Ge => self.tighten_le(atom, state, true),
            AtomOp::Eq => {
                self.tighten_le(atom, state, false) && self.tighten_le(atom, state, true)
            }
            AtomOp::Ne => self.assert_ne(atom, state),
        }
    }

    /// `Σ terms + k ≤ 0` (or `≥ 0` when `flip`): bound each variable by the
    /// extremes of the remaining terms.
    fn tighten_le(&mut self, atom: &Atom, state: &mut State, flip: bool) -> bool {
        for (s, c) in &atom.terms {
            let i = self.index[s];
            // extreme of the rest: min for ≤, max for ≥
            let mut rest = atom.constant;
            let mut valid = true;
            for (s2, c2) in &atom.terms {
                if s2 == s {
                    continue;
                }
                let j = self.index[s2];
                let (a, b) = match (
                    c2.checked_mul(state.lo[j]),
                    c2.checked_mul(state.hi[j]),
                ) {
                    (Some(a), Some(b)) => (a.min(b), a.max(b)),
                    _ => {
                        valid = false;
                        break;
                    }
                };
                let pick = if flip { b } else { a };
                match rest.checked_add(pick) {
                    Some(r) => rest = r,
                    None => {
                        valid = false;
                        break;
                    }
                }
            }
            if !valid {
                continue; // overflow: skip tightening this variable
            }
            // c*x + rest ≤ 0  =>  c*x ≤ -rest ; flipped: c*x ≥ -rest
            let bound = -rest;
            let c = *c;
            if (!flip && c > 0) || (flip && c < 0) {
                // x ≤ floor(bound / c)
                let b = div_floor(bound, c);
                if b < state.hi[i] {
                    state.hi[i] = b;
                }
            } else {
                // x ≥ ceil(bound / c)
                let b = div_ceil(bound, c);
                if b > state.lo[i] {
                    state.lo[i] = b;
                }
            }
            if !normalize(state, i) {
                return false;
            }
        }
        true
    }

    /// `Σ terms + k ≠ 0`: once a single variable remains free, exclude the
    /// value that would zero the sum.
    fn assert_ne(&mut self, atom: &Atom, state: &mut State) -> bool {
        let mut free = Vec::new();
        let mut fixed_sum = atom.constant;
        for (s, c) in &atom.terms {
            let i = self.index[s];
            if state.lo[i] == state.hi[i] {
                match c.checked_mul(state.lo[i]).and_then(|t| fixed_sum.checked_add(t)) {
                    Some(v) => fixed_sum = v,
                    None => return true,
                }
            } else {
                free.push((i, *c));
            }
        }
        match free.len() {
            0 => fixed_sum != 0,
            1 => {
                let (i, c) = free[0];
                if fixed_sum % c == 0 {
                    let forbidden = -fixed_sum / c;
                    state.excluded[i].insert(forbidden);
                    normalize(state, i)
                } else {
                    true
                }
            }
            _ => true,
        }
    }

    /// Propagate to a fixpoint. Returns false on conflict.
    fn propagate(&mut self, state: &mut State) -> bool {
        loop {
            if !self.spend() {
                return false;
            }
            let mut changed = false;
            for ci in 0..self.cs.clauses.len() {
                let clause = &self.cs.clauses[ci];
                let mut open = Vec::new();
                let mut satisfied = false;
                for atom in &clause.any_of {
                    match self.status(atom, state) {
                        Status::True => {
                            satisfied = true;
                            break;
                        }
                        Status::Open => open.push(atom.clone()),
                        Status::False => {}
                    }
                }
                if satisfied {
                    continue;
                }
                if open.is_empty() {
                    return false; // every disjunct refuted
                }
                if open.len() == 1 {
                    let before = (state.lo.clone(), state.hi.clone());
                    if !self.assert_atom(&open[0], state) {
                        return false;
                    }
                    if before != (state.lo.clone(), state.hi.clone()) {
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Assign symbols in order, smallest candidate first, with propagation
    /// at every node. The first full assignment found is therefore the
    /// lexicographically smallest solution.
    fn search(&mut self, state: &mut State, depth: usize) -> Option<Vec<i128>> {
        if !self.propagate(state) {
            return None;
        }
        if depth == self.syms.len() {
            // all clauses are satisfied for every remaining value; intervals
            // are normalized, so the lows form a witness
            return Some(state.lo.clone());
        }
        let mut tries = 0u64;
        let mut v = state.lo[depth];
        while v <= state.hi[depth] {
            if state.excluded[depth].contains(&v) {
                v += 1;
                continue;
            }
            tries += 1;
            if tries > self.config.value_tries || !self.spend() {
                self.budget_hit = true;
                return None;
            }
            let mut child = state.clone();
            child.lo[depth] = v;
            child.hi[depth] = v;
            if let Some(hit) = self.search(&mut child, depth + 1) {
                return Some(hit);
            }
            if self.budget_hit {
                return None;
            }
            v += 1;
        }
        None
    }
}

/// Shift interval endpoints past excluded values; false when it empties.
fn normalize(state: &mut State, i: usize) -> bool {
    loop {
        if state.lo[i] > state.hi[i] {
            return false;
        }
        if state.excluded[i].contains(&state.lo[i]) {
            state.lo[i] += 1;
            continue;
        }
        if state.excluded[i].contains(&state.hi[i]) {
            state.hi[i] -= 1;
            continue;
        }
        return true;
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}
