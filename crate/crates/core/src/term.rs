//! Lambda terms, values, free variables, alpha-equivalence and
//! capture-avoiding substitution of values.
//!
//! Terms are immutable trees; `PartialEq`, `Eq` and `Hash` are all up to
//! alpha-conversion, so a `HashSet<Term>` collects alpha-classes.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

/// A lambda term: variable, abstraction or application.
#[derive(Clone, Debug)]
pub enum Term {
    Var(String),
    Abs(String, Box<Term>),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn abs(binder: impl Into<String>, body: Term) -> Term {
        Term::Abs(binder.into(), Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// The identity `\x.x`.
    pub fn identity() -> Term {
        Term::abs("x", Term::var("x"))
    }

    /// The duplicator `\x.x x`.
    pub fn delta() -> Term {
        Term::abs("x", Term::app(Term::var("x"), Term::var("x")))
    }

    /// Values are variables and abstractions.
    pub fn is_value(&self) -> bool {
        !matches!(self, Term::App(..))
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut acc);
        acc
    }

    fn collect_free(&self, bound: &mut Vec<String>, acc: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    acc.insert(x.clone());
                }
            }
            Term::Abs(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, acc);
                bound.pop();
            }
            Term::App(fun, arg) => {
                fun.collect_free(bound, acc);
                arg.collect_free(bound, acc);
            }
        }
    }

    /// Number of syntax nodes; used to bound generators and fuel heuristics.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, body) => 1 + body.size(),
            Term::App(fun, arg) => 1 + fun.size() + arg.size(),
        }
    }

    /// Capture-avoiding substitution `self{v/x}` of a value for a variable.
    ///
    /// Clashing binders are renamed with [`fresh_name`], so the result is
    /// deterministic in the inputs.
    pub fn subst(&self, x: &str, v: &Value) -> Term {
        self.subst_term(x, v.term())
    }

    pub(crate) fn subst_term(&self, x: &str, v: &Term) -> Term {
        match self {
            Term::Var(y) => {
                if y == x {
                    v.clone()
                } else {
                    self.clone()
                }
            }
            Term::Abs(y, body) => {
                if y == x {
                    self.clone()
                } else if v.free_vars().contains(y) && body.free_vars().contains(x) {
                    // rename the binder out of the way of fv(v)
                    let mut avoid: BTreeSet<String> = v.free_vars();
                    avoid.extend(body.free_vars());
                    avoid.insert(x.to_string());
                    let y2 = fresh_name(y, &avoid);
                    let body2 = body.subst_term(y, &Term::var(y2.clone()));
                    Term::abs(y2, body2.subst_term(x, v))
                } else {
                    Term::abs(y.clone(), body.subst_term(x, v))
                }
            }
            Term::App(fun, arg) => Term::app(fun.subst_term(x, v), arg.subst_term(x, v)),
        }
    }

    /// Alpha-equivalence via simultaneous locally-nameless traversal.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        fn go(a: &Term, b: &Term, ba: &mut Vec<String>, bb: &mut Vec<String>) -> bool {
            match (a, b) {
                (Term::Var(x), Term::Var(y)) => {
                    let ia = ba.iter().rposition(|n| n == x);
                    let ib = bb.iter().rposition(|n| n == y);
                    match (ia, ib) {
                        (Some(i), Some(j)) => i == j,
                        (None, None) => x == y,
                        _ => false,
                    }
                }
                (Term::Abs(x, s), Term::Abs(y, t)) => {
                    ba.push(x.clone());
                    bb.push(y.clone());
                    let r = go(s, t, ba, bb);
                    ba.pop();
                    bb.pop();
                    r
                }
                (Term::App(f, a1), Term::App(g, a2)) => {
                    go(f, g, ba, bb) && go(a1, a2, ba, bb)
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new(), &mut Vec::new())
    }

    /// Total order up to alpha (bound names ignored); used to canonicalize
    /// collections of terms, not exposed as `Ord` since it would shadow the
    /// structural derive.
    pub fn cmp_alpha(&self, other: &Term) -> Ordering {
        fn go(a: &Term, b: &Term, ba: &mut Vec<String>, bb: &mut Vec<String>) -> Ordering {
            fn rank(t: &Term) -> u8 {
                match t {
                    Term::Var(_) => 0,
                    Term::Abs(..) => 1,
                    Term::App(..) => 2,
                }
            }
            match (a, b) {
                (Term::Var(x), Term::Var(y)) => {
                    let ia = ba.iter().rposition(|n| n == x);
                    let ib = bb.iter().rposition(|n| n == y);
                    match (ia, ib) {
                        (Some(i), Some(j)) => i.cmp(&j),
                        (None, None) => x.cmp(y),
                        (Some(_), None) => Ordering::Less,
                        (None, Some(_)) => Ordering::Greater,
                    }
                }
                (Term::Abs(x, s), Term::Abs(y, t)) => {
                    ba.push(x.clone());
                    bb.push(y.clone());
                    let r = go(s, t, ba, bb);
                    ba.pop();
                    bb.pop();
                    r
                }
                (Term::App(f, a1), Term::App(g, a2)) => {
                    go(f, g, ba, bb).then_with(|| go(a1, a2, ba, bb))
                }
                _ => rank(a).cmp(&rank(b)),
            }
        }
        go(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

/// Structural equality of terms *is* alpha-equivalence.
impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        self.alpha_eq(other)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        fn go<H: Hasher>(t: &Term, bound: &mut Vec<String>, state: &mut H) {
            match t {
                Term::Var(x) => match bound.iter().rposition(|n| n == x) {
                    Some(i) => {
                        0u8.hash(state);
                        i.hash(state);
                    }
                    None => {
                        1u8.hash(state);
                        x.hash(state);
                    }
                },
                Term::Abs(x, body) => {
                    2u8.hash(state);
                    bound.push(x.clone());
                    go(body, bound, state);
                    bound.pop();
                }
                Term::App(fun, arg) => {
                    3u8.hash(state);
                    go(fun, bound, state);
                    go(arg, bound, state);
                }
            }
        }
        go(self, &mut Vec::new(), state)
    }
}

/// Picks a name based on `base` that avoids everything in `avoid`: tries
/// `base`, then `base1`, `base2`, ...
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    // strip a previous numeric suffix so x1 freshens to x2, not x11
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { base } else { stem };
    for i in 1.. {
        let cand = format!("{stem}{i}");
        if !avoid.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

/// Witness that a term is a value (variable or abstraction).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Value(Term);

impl Value {
    pub fn new(t: Term) -> Option<Value> {
        if t.is_value() {
            Some(Value(t))
        } else {
            None
        }
    }

    pub fn term(&self) -> &Term {
        &self.0
    }

    pub fn into_term(self) -> Term {
        self.0
    }

    /// Values are closed under substitution of values.
    pub fn subst(&self, x: &str, v: &Value) -> Value {
        Value(self.0.subst(x, v))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<Term> for Value {
    type Error = Term;

    fn try_from(t: Term) -> Result<Value, Term> {
        if t.is_value() {
            Ok(Value(t))
        } else {
            Err(t)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_term(self, f.alternate()))
    }
}

/// Minimal-parentheses printer. `unicode` switches `\` to `λ`.
/// `format!("{t}")` is ASCII, `format!("{t:#}")` is unicode.
pub fn print_term(t: &Term, unicode: bool) -> String {
    let lam = if unicode { "λ" } else { "\\" };
    fn outer(t: &Term, lam: &str, out: &mut String) {
        match t {
            Term::Abs(x, body) => {
                out.push_str(lam);
                out.push_str(x);
                out.push('.');
                outer(body, lam, out);
            }
            _ => spine(t, lam, out),
        }
    }
    // application spine: fun needs parens when it is an abstraction,
    // arguments whenever they are not plain identifiers
    fn spine(t: &Term, lam: &str, out: &mut String) {
        match t {
            Term::App(fun, arg) => {
                match fun.as_ref() {
                    Term::Abs(..) => atom(fun, lam, out),
                    _ => spine(fun, lam, out),
                }
                out.push(' ');
                atom(arg, lam, out);
            }
            _ => atom(t, lam, out),
        }
    }
    fn atom(t: &Term, lam: &str, out: &mut String) {
        match t {
            Term::Var(x) => out.push_str(x),
            _ => {
                out.push('(');
                outer(t, lam, out);
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    outer(t, lam, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn p(src: &str) -> Term {
        parse(src).unwrap()
    }

    /// `t` of the premature-normal-form pair: `(\y.D)(z I) D`.
    pub(crate) fn premature_t() -> Term {
        Term::app(
            Term::app(Term::abs("y", Term::delta()), Term::app(Term::var("z"), Term::identity())),
            Term::delta(),
        )
    }

    #[test]
    fn free_vars_of_identity_is_empty() {
        assert!(Term::identity().free_vars().is_empty());
    }

    #[test]
    fn free_vars_of_premature_term_is_z() {
        let fv = premature_t().free_vars();
        assert_eq!(fv.into_iter().collect::<Vec<_>>(), vec!["z".to_string()]);
    }

    #[test]
    fn binder_shadows_only_inside_body() {
        let t = Term::app(Term::var("x"), Term::abs("x", Term::var("x")));
        assert_eq!(t.free_vars().into_iter().collect::<Vec<_>>(), vec!["x".to_string()]);
    }

    #[test]
    fn subst_at_variable() {
        let i = Value::new(Term::identity()).unwrap();
        assert_eq!(Term::var("x").subst("x", &i), Term::identity());
    }

    #[test]
    fn subst_avoids_capture() {
        // (\y.x y){y/x} = \y'.y y'
        let t = Term::abs("y", Term::app(Term::var("x"), Term::var("y")));
        let v = Value::new(Term::var("y")).unwrap();
        let got = t.subst("x", &v);
        let want = Term::abs("w", Term::app(Term::var("y"), Term::var("w")));
        assert_eq!(got, want);
    }

    #[test]
    fn subst_leaves_bound_occurrences() {
        let t = Term::identity();
        let d = Value::new(Term::delta()).unwrap();
        assert_eq!(t.subst("x", &d), Term::identity());
    }

    #[test]
    fn subst_is_identity_when_not_free() {
        let t = p("x (\\y.y z)");
        let v = Value::new(Term::delta()).unwrap();
        assert_eq!(t.subst("w", &v), t);
    }

    #[test]
    fn subst_free_vars_equation() {
        let t = p("x (\\y.x w)");
        let v = Value::new(p("\\a.z a")).unwrap();
        let got = t.subst("x", &v).free_vars();
        let mut want = t.free_vars();
        want.remove("x");
        want.extend(v.term().free_vars());
        assert_eq!(got, want);
    }

    #[test]
    fn values_closed_under_subst() {
        let v = Value::new(p("\\y.x y")).unwrap();
        let w = Value::new(Term::delta()).unwrap();
        assert!(v.subst("x", &w).term().is_value());
    }

    #[test]
    fn alpha_eq_renamed_binders() {
        assert_eq!(p("\\x.x"), p("\\y.y"));
        assert_ne!(p("\\x.x"), p("\\x.x x"));
        // renaming the bound y of the premature term to w
        let renamed = Term::app(
            Term::app(Term::abs("w", Term::delta()), p("z (\\x.x)")),
            Term::delta(),
        );
        assert_eq!(premature_t(), renamed);
    }

    #[test]
    fn alpha_eq_distinguishes_free_names() {
        assert_ne!(p("x"), p("y"));
        assert_ne!(p("\\x.x y"), p("\\x.x z"));
    }

    #[test]
    fn hash_agrees_with_alpha_eq() {
        use std::collections::HashSet;
        let mut set = HashSet::new();
        set.insert(p("\\x.x y"));
        assert!(set.contains(&p("\\w.w y")));
        assert!(!set.contains(&p("\\w.w z")));
    }

    #[test]
    fn fresh_name_skips_avoided() {
        let avoid: BTreeSet<String> =
            ["y".to_string(), "y1".to_string()].into_iter().collect();
        assert_eq!(fresh_name("y", &avoid), "y2");
        assert_eq!(fresh_name("z", &avoid), "z");
        assert_eq!(fresh_name("y1", &avoid), "y2");
    }

    #[test]
    fn printer_minimal_parens() {
        assert_eq!(p("x y z").to_string(), "x y z");
        assert_eq!(p("x (y z)").to_string(), "x (y z)");
        assert_eq!(p("(\\x.x) y").to_string(), "(\\x.x) y");
        assert_eq!(p("\\x.x y").to_string(), "\\x.x y");
        assert_eq!(format!("{:#}", p("\\x.x")), "λx.x");
    }
}
