//! Non-idempotent intersection types.
//!
//! A positive type is a finite multiset of negative types; a negative type
//! is an arrow `P > Q` between two positive types. The empty multiset `0`
//! is the only atom. Multisets are kept canonically sorted, so structural
//! equality is multiset equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// An arrow `P > Q` between positive types.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NegType {
    pub domain: PosType,
    pub codomain: PosType,
}

impl NegType {
    pub fn new(domain: PosType, codomain: PosType) -> NegType {
        NegType { domain, codomain }
    }

    /// Number of arrow constructors in this type.
    pub fn size(&self) -> usize {
        1 + self.domain.size() + self.codomain.size()
    }

    fn depth(&self) -> usize {
        1 + self.domain.depth().max(self.codomain.depth())
    }
}

/// A finite multiset of negative types, canonically sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PosType {
    elems: Vec<NegType>,
}

impl PosType {
    /// The empty multiset, the only atomic type.
    pub fn empty() -> PosType {
        PosType { elems: Vec::new() }
    }

    pub fn new(mut elems: Vec<NegType>) -> PosType {
        elems.sort();
        PosType { elems }
    }

    pub fn singleton(n: NegType) -> PosType {
        PosType { elems: vec![n] }
    }

    /// Shorthand for the singleton arrow `[P > Q]`.
    pub fn arrow(domain: PosType, codomain: PosType) -> PosType {
        PosType::singleton(NegType::new(domain, codomain))
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[NegType] {
        &self.elems
    }

    pub fn arity(&self) -> usize {
        self.elems.len()
    }

    /// If this is a singleton multiset, the arrow inside.
    pub fn as_singleton_arrow(&self) -> Option<&NegType> {
        match self.elems.as_slice() {
            [n] => Some(n),
            _ => None,
        }
    }

    /// Multiset sum: commutative, associative, unit `0`. Duplicates are
    /// kept; that is the whole point of non-idempotence.
    pub fn mset_sum(&self, other: &PosType) -> PosType {
        let mut elems = Vec::with_capacity(self.elems.len() + other.elems.len());
        elems.extend_from_slice(&self.elems);
        elems.extend_from_slice(&other.elems);
        PosType::new(elems)
    }

    pub fn sum_all<'a>(parts: impl IntoIterator<Item = &'a PosType>) -> PosType {
        let mut elems = Vec::new();
        for p in parts {
            elems.extend_from_slice(&p.elems);
        }
        PosType::new(elems)
    }

    /// `|P| = k + sum_i (|P_i| + |Q_i|)`: the number of arrow constructors.
    pub fn size(&self) -> usize {
        self.elems.iter().map(NegType::size).sum()
    }

    /// Nesting depth; `0` has depth 0 and every type of depth `<= k` lives
    /// in the universe layer `M_fin(U_k)`.
    pub fn depth(&self) -> usize {
        self.elems.iter().map(NegType::depth).max().unwrap_or(0)
    }

    /// Checks whether every element of this multiset lies in `U_k`, where
    /// `U_0 = {}` and `U_{k+1} = M_fin(U_k) x M_fin(U_k)`.
    pub fn in_universe(&self, k: usize) -> bool {
        self.elems.iter().all(|n| {
            k >= 1 && n.domain.in_universe(k - 1) && n.codomain.in_universe(k - 1)
        })
    }

    /// Multiset difference, if `other` is contained in `self`.
    pub fn mset_sub(&self, other: &PosType) -> Option<PosType> {
        let mut rest = self.elems.clone();
        for n in &other.elems {
            let i = rest.iter().position(|m| m == n)?;
            rest.remove(i);
        }
        Some(PosType { elems: rest })
    }
}

// Size-first order keeps enumeration by size cheap; ties resolved
// lexicographically on the canonical element lists.
impl Ord for PosType {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.elems.cmp(&other.elems))
    }
}

impl PartialOrd for PosType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NegType {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.domain.cmp(&other.domain))
            .then_with(|| self.codomain.cmp(&other.codomain))
    }
}

impl PartialOrd for NegType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PosType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elems.is_empty() {
            return write!(f, "0");
        }
        write!(f, "[")?;
        for (i, n) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for NegType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>{}", self.domain, self.codomain)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type parse error at byte {at}: {msg}")]
pub struct TypeParseError {
    pub at: usize,
    pub msg: String,
}

/// Parses the type grammar `pos := "0" | "[" neg {"," neg} "]"`,
/// `neg := pos ">" pos`. Whitespace is insignificant.
pub fn parse_pos_type(src: &str) -> Result<PosType, TypeParseError> {
    let bytes: Vec<char> = src.chars().collect();
    let mut pos = 0usize;
    let ty = parse_pos(&bytes, &mut pos)?;
    skip_ws(&bytes, &mut pos);
    if pos != bytes.len() {
        return Err(TypeParseError { at: pos, msg: "trailing input".into() });
    }
    Ok(ty)
}

fn skip_ws(s: &[char], pos: &mut usize) {
    while *pos < s.len() && s[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn parse_pos(s: &[char], pos: &mut usize) -> Result<PosType, TypeParseError> {
    skip_ws(s, pos);
    match s.get(*pos) {
        Some('0') => {
            *pos += 1;
            Ok(PosType::empty())
        }
        Some('[') => {
            *pos += 1;
            let mut elems = vec![parse_neg(s, pos)?];
            loop {
                skip_ws(s, pos);
                match s.get(*pos) {
                    Some(',') => {
                        *pos += 1;
                        elems.push(parse_neg(s, pos)?);
                    }
                    Some(']') => {
                        *pos += 1;
                        return Ok(PosType::new(elems));
                    }
                    _ => {
                        return Err(TypeParseError {
                            at: *pos,
                            msg: "expected ',' or ']'".into(),
                        })
                    }
                }
            }
        }
        other => Err(TypeParseError {
            at: *pos,
            msg: format!("expected '0' or '[', found {other:?}"),
        }),
    }
}

fn parse_neg(s: &[char], pos: &mut usize) -> Result<NegType, TypeParseError> {
    let domain = parse_pos(s, pos)?;
    skip_ws(s, pos);
    match s.get(*pos) {
        Some('>') => {
            *pos += 1;
        }
        _ => return Err(TypeParseError { at: *pos, msg: "expected '>'".into() }),
    }
    let codomain = parse_pos(s, pos)?;
    Ok(NegType::new(domain, codomain))
}

/// Finite-support map from variables to positive types. Bindings to `0`
/// are never stored: `G` and `G, x:0` are the same environment.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Environment {
    bindings: BTreeMap<String, PosType>,
}

impl Environment {
    pub fn empty() -> Environment {
        Environment::default()
    }

    pub fn single(var: impl Into<String>, ty: PosType) -> Environment {
        let mut env = Environment::empty();
        env.bind(var, ty);
        env
    }

    pub fn bind(&mut self, var: impl Into<String>, ty: PosType) {
        if !ty.is_empty() {
            let var = var.into();
            let sum = match self.bindings.remove(&var) {
                Some(old) => old.mset_sum(&ty),
                None => ty,
            };
            self.bindings.insert(var, sum);
        }
    }

    /// Total on variables: absent means `0`.
    pub fn lookup(&self, var: &str) -> PosType {
        self.bindings.get(var).cloned().unwrap_or_else(PosType::empty)
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.bindings.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &PosType)> {
        self.bindings.iter()
    }

    /// Pointwise multiset sum.
    pub fn env_sum(&self, other: &Environment) -> Environment {
        let mut out = self.clone();
        for (x, p) in &other.bindings {
            out.bind(x.clone(), p.clone());
        }
        out
    }

    pub fn sum_all<'a>(parts: impl IntoIterator<Item = &'a Environment>) -> Environment {
        let mut out = Environment::empty();
        for e in parts {
            out = out.env_sum(e);
        }
        out
    }

    /// Splits off the binding for `var`, returning the rest and its type.
    pub fn split(&self, var: &str) -> (Environment, PosType) {
        let mut rest = self.clone();
        let ty = rest.bindings.remove(var).unwrap_or_else(PosType::empty);
        (rest, ty)
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, p)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}:{p}")?;
        }
        Ok(())
    }
}

/// One element of a relational interpretation: inputs for the suitable
/// variable list and an output type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemPoint {
    pub inputs: Vec<PosType>,
    pub output: PosType,
}

impl SemPoint {
    pub fn new(inputs: Vec<PosType>, output: PosType) -> SemPoint {
        SemPoint { inputs, output }
    }

    /// `|((P_1,...,P_k),Q)| = |Q| + sum_i |P_i|`.
    pub fn size(&self) -> usize {
        self.output.size() + self.inputs.iter().map(PosType::size).sum::<usize>()
    }
}

impl fmt::Display for SemPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.inputs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ") |- {}", self.output)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero() -> PosType {
        PosType::empty()
    }

    fn arrow00() -> NegType {
        NegType::new(zero(), zero())
    }

    #[test]
    fn mset_sum_unit() {
        assert_eq!(zero().mset_sum(&zero()), zero());
    }

    #[test]
    fn mset_sum_keeps_duplicates() {
        let p = PosType::singleton(arrow00());
        let sum = p.mset_sum(&p);
        assert_eq!(sum.arity(), 2);
        assert_eq!(sum, PosType::new(vec![arrow00(), arrow00()]));
    }

    #[test]
    fn mset_sum_canonicalizes() {
        let n1 = NegType::new(PosType::singleton(arrow00()), zero()); // size 2
        let n2 = arrow00(); // size 1, smaller in the order
        let sum = PosType::singleton(n1.clone()).mset_sum(&PosType::singleton(n2.clone()));
        assert_eq!(sum.elems(), &[n2, n1]);
    }

    #[test]
    fn env_sum_examples() {
        let empty = Environment::empty();
        assert_eq!(empty.env_sum(&empty), empty);

        let n = arrow00();
        let e1 = Environment::single("x", PosType::singleton(n.clone()));
        let sum = e1.env_sum(&e1);
        assert_eq!(sum.lookup("x"), PosType::new(vec![n.clone(), n.clone()]));

        let e2 = Environment::single("y", PosType::singleton(n.clone()));
        let disj = e1.env_sum(&e2);
        assert_eq!(disj.lookup("x"), PosType::singleton(n.clone()));
        assert_eq!(disj.lookup("y"), PosType::singleton(n));
    }

    #[test]
    fn zero_bindings_are_dropped() {
        let env = Environment::single("x", zero());
        assert!(env.is_empty());
        assert_eq!(env, Environment::empty());
    }

    #[test]
    fn type_size_examples() {
        assert_eq!(zero().size(), 0);
        assert_eq!(PosType::singleton(arrow00()).size(), 1);
        let nested = PosType::singleton(NegType::new(PosType::singleton(arrow00()), zero()));
        assert_eq!(nested.size(), 2);
    }

    #[test]
    fn point_size_examples() {
        let p = SemPoint::new(vec![PosType::singleton(arrow00())], zero());
        assert_eq!(p.size(), 1);
        assert_eq!(SemPoint::new(vec![], zero()).size(), 0);
        let q = SemPoint::new(vec![zero(), zero()], PosType::singleton(arrow00()));
        assert_eq!(q.size(), 1);
    }

    #[test]
    fn display_round_trip() {
        for src in ["0", "[0>0]", "[0>0,0>0]", "[[0>0]>0]", "[0>[0>0],0>0]"] {
            let ty = parse_pos_type(src).unwrap();
            assert_eq!(parse_pos_type(&ty.to_string()).unwrap(), ty);
        }
        assert_eq!(parse_pos_type(" [ 0 > 0 ] ").unwrap(), PosType::singleton(arrow00()));
        assert!(parse_pos_type("[]").is_err());
        assert!(parse_pos_type("0>0").is_err());
    }

    #[test]
    fn universe_stratification() {
        let t0 = zero();
        assert!(t0.in_universe(0));
        let t1 = PosType::singleton(arrow00());
        assert!(!t1.in_universe(0));
        assert!(t1.in_universe(1));
        let t2 = PosType::singleton(NegType::new(t1.clone(), zero()));
        assert!(!t2.in_universe(1));
        assert!(t2.in_universe(2));
        assert_eq!(t2.depth(), 2);
    }

    #[test]
    fn mset_sub_inverts_sum() {
        let n1 = arrow00();
        let n2 = NegType::new(PosType::singleton(arrow00()), zero());
        let a = PosType::new(vec![n1.clone(), n2.clone()]);
        let b = PosType::singleton(n1);
        let diff = a.mset_sub(&b).unwrap();
        assert_eq!(diff, PosType::singleton(n2));
        assert_eq!(diff.mset_sum(&b), a);
        assert!(b.mset_sub(&a).is_none());
    }
}
