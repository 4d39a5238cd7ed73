//! Bounded constraint solver over PIC-derived domains.
//!
//! Everything is an integer underneath. Numeric symbols are scaled integers
//! bounded by their picture; alphanumeric symbols are base-95 codes over the
//! printable range, so byte-wise string ordering becomes integer ordering
//! and space padding becomes multiplication by a power of 95. A constraint
//! set is a conjunction of clauses, each clause a disjunction of linear
//! atoms `Σ cᵢ·xᵢ + k ⋈ 0`.
//!
//! `solve` runs interval propagation plus lexicographic backtracking search
//! and always returns the smallest witness in symbol order. Sets whose
//! domain product is small are finished off exhaustively, so `UNKNOWN` can
//! only arise past that limit when the step budget runs out.

pub mod engine;
pub mod smtlib;

use crate::value::{self, PicType, Value};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub use engine::{solve, SolveOutcome, SolverConfig};
pub use smtlib::export_smtlib;

/// A constraint symbol: a program input, or one occurrence of a resource
/// input at an external call. Ordering is the canonical witness tie-break
/// order (program inputs by name, then resource inputs by call/occurrence).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    Prog(String),
    Res {
        call_id: usize,
        occurrence: usize,
        var: String,
    },
}

impl Sym {
    pub fn prog(name: &str) -> Sym {
        Sym::Prog(name.to_string())
    }

    pub fn res(call_id: usize, occurrence: usize, var: &str) -> Sym {
        Sym::Res {
            call_id,
            occurrence,
            var: var.to_string(),
        }
    }

    pub fn var_name(&self) -> &str {
        match self {
            Sym::Prog(v) => v,
            Sym::Res { var, .. } => var,
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Prog(name) => write!(f, "{name}"),
            Sym::Res {
                call_id,
                occurrence,
                var,
            } => write!(f, "{var}@c{call_id}.o{occurrence}"),
        }
    }
}

impl FromStr for Sym {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once("@c") {
            None => Ok(Sym::Prog(s.to_string())),
            Some((var, rest)) => {
                let (call, occ) = rest
                    .split_once(".o")
                    .ok_or_else(|| format!("bad symbol `{s}`"))?;
                Ok(Sym::Res {
                    call_id: call.parse().map_err(|_| format!("bad symbol `{s}`"))?,
                    occurrence: occ.parse().map_err(|_| format!("bad symbol `{s}`"))?,
                    var: var.to_string(),
                })
            }
        }
    }
}

impl Serialize for Sym {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Sym {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Sym::from_str(&s).map_err(de::Error::custom)
    }
}

/// A symbol's value domain. Externally tagged on the wire
/// (`{"num": {...}}` / `{"str": {...}}`): serde's internal tagging cannot
/// buffer i128 fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Domain {
    #[serde(rename_all = "camelCase")]
    Num { lo: i128, hi: i128, scale: u32 },
    #[serde(rename_all = "camelCase")]
    Str { len: u32 },
}

/// Longest string a solver symbol may have; the base-95 code of an 18-char
/// string still fits i128 with room for padding coefficients.
pub const MAX_SOLVER_STR_LEN: u32 = 18;

impl Domain {
    pub fn of_pic(pic: &PicType) -> Result<Domain, SolveError> {
        match pic {
            PicType::Numeric { frac_digits, .. } => Ok(Domain::Num {
                lo: pic.min_scaled(),
                hi: pic.max_scaled(),
                scale: *frac_digits,
            }),
            PicType::Alphanumeric { length } => {
                if *length > MAX_SOLVER_STR_LEN {
                    return Err(SolveError::UnsupportedAtom(format!(
                        "alphanumeric symbol longer than {MAX_SOLVER_STR_LEN} chars (X({length}))"
                    )));
                }
                Ok(Domain::Str { len: *length })
            }
        }
    }

    pub fn bounds(&self) -> (i128, i128) {
        match self {
            Domain::Num { lo, hi, .. } => (*lo, *hi),
            Domain::Str { len } => (0, value::str_code_max(*len)),
        }
    }

    pub fn size(&self) -> Option<u128> {
        let (lo, hi) = self.bounds();
        Some((hi - lo) as u128 + 1)
    }

    pub fn decode(&self, code: i128) -> Value {
        match self {
            Domain::Num { .. } => Value::Num(code),
            Domain::Str { len } => Value::Str(value::code_to_str(code, *len)),
        }
    }

    pub fn encode(&self, v: &Value) -> Option<i128> {
        match (self, v) {
            (Domain::Num { .. }, Value::Num(raw)) => Some(*raw),
            (Domain::Str { .. }, Value::Str(s)) => Some(value::str_to_code(s)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomOp {
    Le,
    Ge,
    Eq,
    Ne,
}

/// Linear atom `Σ terms + constant  op  0`. Terms are sorted by symbol and
/// coefficient-merged at construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub terms: Vec<(Sym, i128)>,
    pub constant: i128,
    pub op: AtomOp,
}

impl Atom {
    pub fn new(terms: Vec<(Sym, i128)>, constant: i128, op: AtomOp) -> Atom {
        let mut merged: BTreeMap<Sym, i128> = BTreeMap::new();
        for (s, c) in terms {
            *merged.entry(s).or_insert(0) += c;
        }
        merged.retain(|_, c| *c != 0);
        Atom {
            terms: merged.into_iter().collect(),
            constant,
            op,
        }
    }

    /// Evaluate under a complete integer assignment.
    pub fn eval(&self, values: &BTreeMap<Sym, i128>) -> Result<bool, SolveError> {
        let mut sum = self.constant;
        for (s, c) in &self.terms {
            let v = values
                .get(s)
                .ok_or_else(|| SolveError::MissingSymbol(s.to_string()))?;
            sum = c
                .checked_mul(*v)
                .and_then(|t| sum.checked_add(t))
                .ok_or_else(|| SolveError::UnsupportedAtom("overflow".into()))?;
        }
        Ok(match self.op {
            AtomOp::Le => sum <= 0,
            AtomOp::Ge => sum >= 0,
            AtomOp::Eq => sum == 0,
            AtomOp::Ne => sum != 0,
        })
    }
}

/// A disjunction of atoms. Most clauses are unit; disjunctive branch
/// conditions (a OR b) produce wider ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Clause {
    pub any_of: Vec<Atom>,
}

impl Clause {
    pub fn unit(atom: Atom) -> Clause {
        Clause {
            any_of: vec![atom],
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstraintSet {
    pub domains: BTreeMap<Sym, Domain>,
    pub clauses: Vec<Clause>,
}

impl ConstraintSet {
    pub fn symbols(&self) -> impl Iterator<Item = &Sym> {
        self.domains.keys()
    }

    /// Product of all domain sizes, `None` when it exceeds `u128`.
    pub fn domain_product(&self) -> Option<u128> {
        let mut product: u128 = 1;
        for d in self.domains.values() {
            product = product.checked_mul(d.size()?)?;
        }
        Some(product)
    }
}

/// A witness assignment, decoded to domain values.
pub type Assignment = BTreeMap<Sym, Value>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("unsupported atom: {0}")]
    UnsupportedAtom(String),
    #[error("symbol {0} has no domain")]
    MissingDomain(String),
    #[error("assignment is missing symbol {0}")]
    MissingSymbol(String),
}

/// Evaluate every clause of `cs` under `a`.
pub fn check(a: &Assignment, cs: &ConstraintSet) -> Result<bool, SolveError> {
    let mut codes: BTreeMap<Sym, i128> = BTreeMap::new();
    for (sym, domain) in &cs.domains {
        let v = a
            .get(sym)
            .ok_or_else(|| SolveError::MissingSymbol(sym.to_string()))?;
        let code = domain
            .encode(v)
            .ok_or_else(|| SolveError::UnsupportedAtom(format!("category mismatch for {sym}")))?;
        codes.insert(sym.clone(), code);
    }
    for clause in &cs.clauses {
        let mut ok = false;
        for atom in &clause.any_of {
            if atom.eval(&codes)? {
                ok = true;
                break;
            }
        }
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;

    /// Brute-force oracle: lexicographic enumeration of the full domain
    /// product, independent of the engine.
    pub fn exhaustive_oracle(cs: &ConstraintSet) -> Option<Assignment> {
        let syms: Vec<&Sym> = cs.domains.keys().collect();
        let bounds: Vec<(i128, i128)> = cs.domains.values().map(|d| d.bounds()).collect();
        let mut current: Vec<i128> = bounds.iter().map(|(lo, _)| *lo).collect();
        loop {
            let assignment: Assignment = syms
                .iter()
                .zip(&current)
                .map(|(s, v)| ((*s).clone(), cs.domains[*s].decode(*v)))
                .collect();
            if check(&assignment, cs) == Ok(true) {
                return Some(assignment);
            }
            // odometer increment
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
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_round_trips_through_text() {
        let s = Sym::res(3, 2, "SQLCODE");
        assert_eq!(s.to_string(), "SQLCODE@c3.o2");
        assert_eq!("SQLCODE@c3.o2".parse::<Sym>().unwrap(), s);
        assert_eq!("WS-CNT".parse::<Sym>().unwrap(), Sym::prog("WS-CNT"));
    }

    #[test]
    fn atom_merges_terms() {
        let x = Sym::prog("X");
        let a = Atom::new(
            vec![(x.clone(), 2), (x.clone(), 3)],
            -1,
            AtomOp::Le,
        );
        assert_eq!(a.terms, vec![(x, 5)]);
    }

    #[test]
    fn check_reports_missing_symbols() {
        let x = Sym::prog("X");
        let mut cs = ConstraintSet::default();
        cs.domains.insert(
            x.clone(),
            Domain::Num {
                lo: 0,
                hi: 9,
                scale: 0,
            },
        );
        cs.clauses
            .push(Clause::unit(Atom::new(vec![(x, 1)], -6, AtomOp::Ge)));
        let err = check(&Assignment::new(), &cs).unwrap_err();
        assert!(matches!(err, SolveError::MissingSymbol(_)));
    }
}
