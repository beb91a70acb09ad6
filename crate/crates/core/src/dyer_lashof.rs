//! Words in the lower-indexed operations `Q_i`, their degree bookkeeping,
//! admissibility, and rewriting to admissible form by Adem relations.
//!
//! A word `(i_1, ..., i_k)` denotes `Q_{i_1} ... Q_{i_k}`: `Q_{i_k}` is applied
//! first. For `p = 2`, `Q_i = theta_i`; for odd `p`, `Q_i = theta_{2i(p-1)}` and
//! the remaining `theta`s vanish.
//!
//! Relations are data ([`RelationTable`]). The built-in table for `p = 2` is
//! the classical family rewritten in lower indices, for `r > s`:
//!
//! ```text
//! Q_r Q_s = sum_{s < t < r} C(t - s - 1, 2t - r - s) Q_{r + 2s - 2t} Q_t
//! ```
//!
//! whose coefficients depend only on `(r, s)`, not on the degree acted upon.
//! Terms with a negative index vanish.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::fp::{binom_signed, Prime};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperationWord {
    p: Prime,
    indices: Vec<u32>,
}

impl OperationWord {
    pub fn new(p: Prime, indices: impl Into<Vec<u32>>) -> Self {
        OperationWord {
            p,
            indices: indices.into(),
        }
    }

    pub fn empty(p: Prime) -> Self {
        Self::new(p, Vec::new())
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `self` followed by `inner`, i.e. the composite `self o inner`.
    pub fn compose(&self, inner: &OperationWord) -> OperationWord {
        let mut indices = self.indices.clone();
        indices.extend_from_slice(&inner.indices);
        OperationWord::new(self.p, indices)
    }

    /// Parses a comma-separated list such as `"7,1"`. The empty string is the
    /// empty word.
    pub fn parse(p: Prime, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty(p));
        }
        let indices = s
            .split(',')
            .map(|t| {
                t.trim().parse::<u32>().map_err(|_| {
                    Error::Malformed(format!("bad operation index {:?} in word {s:?}", t.trim()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(p, indices))
    }
}

impl fmt::Display for OperationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.indices.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.indices.iter().map(|i| format!("Q_{i}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// A formal `F_p`-combination of operation words, with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperationSum {
    p: Prime,
    terms: BTreeMap<Vec<u32>, u32>,
}

impl OperationSum {
    pub fn zero(p: Prime) -> Self {
        OperationSum {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(word: &OperationWord) -> Self {
        let mut s = Self::zero(word.p);
        s.add_term(word.indices.clone(), 1);
        s
    }

    pub fn from_terms(p: Prime, terms: impl IntoIterator<Item = (i64, Vec<u32>)>) -> Self {
        let mut s = Self::zero(p);
        for (c, w) in terms {
            s.add_term(w, p.reduce(c));
        }
        s
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (OperationWord, u32)> + '_ {
        self.terms
            .iter()
            .map(|(w, &c)| (OperationWord::new(self.p, w.clone()), c))
    }

    pub fn coefficient(&self, word: &[u32]) -> u32 {
        self.terms.get(word).copied().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, word: Vec<u32>, coeff: u32) {
        if coeff == 0 {
            return;
        }
        let p = self.p;
        let slot = self.terms.entry(word.clone()).or_insert(0);
        *slot = p.add(*slot, coeff);
        if *slot == 0 {
            self.terms.remove(&word);
        }
    }

    fn pop_first(&mut self) -> Option<(Vec<u32>, u32)> {
        self.terms.pop_first()
    }
}

impl fmt::Display for OperationSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (w, c)) in self.terms().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            if c != 1 {
                write!(f, "{c} ")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

/// The raw operation `theta_i` at the prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaIndex {
    pub i: u32,
    pub p: Prime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaImage {
    Q(u32),
    /// Dropped as vanishing (odd `p`, `i` not a multiple of `2(p - 1)`).
    Vanishes,
}

pub fn theta_to_q(t: ThetaIndex) -> ThetaImage {
    if !t.p.is_odd() {
        return ThetaImage::Q(t.i);
    }
    let step = 2 * (t.p.get() - 1);
    if t.i.is_multiple_of(step) {
        ThetaImage::Q(t.i / step)
    } else {
        ThetaImage::Vanishes
    }
}

/// Degree of `Q_index(y)` for `y` of degree `input_degree`:
/// `p * deg y + (p - 1)(dim G + 1) + (raw theta index)`.
pub fn single_op_degree(p: Prime, index: u32, input_degree: i64, dim_g: u32) -> i64 {
    let q = p.get() as i64;
    let theta = if p.is_odd() {
        2 * index as i64 * (q - 1)
    } else {
        index as i64
    };
    q * input_degree + (q - 1) * (dim_g as i64 + 1) + theta
}

/// Degree after applying the whole word, rightmost index first.
pub fn op_degree(w: &OperationWord, input_degree: i64, dim_g: u32) -> i64 {
    w.indices
        .iter()
        .rev()
        .fold(input_degree, |d, &i| single_op_degree(w.p, i, d, dim_g))
}

/// Adjacent pairs `(a, b)` with `a <= slope * b` are admissible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Admissibility {
    pub slope: u32,
}

impl Default for Admissibility {
    fn default() -> Self {
        Admissibility { slope: 1 }
    }
}

impl Admissibility {
    pub fn pair(self, a: u32, b: u32) -> bool {
        a as u64 <= self.slope as u64 * b as u64
    }

    pub fn word(self, indices: &[u32]) -> bool {
        indices.windows(2).all(|w| self.pair(w[0], w[1]))
    }
}

/// Admissibility under the default convention (`i_t <= i_{t+1}`).
pub fn is_admissible(w: &OperationWord) -> bool {
    Admissibility::default().word(&w.indices)
}

/// An affine expression `c + r_coef*r + s_coef*s + t_coef*t` in the pair
/// `(r, s)` being rewritten and a summation variable `t`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AffineExpr {
    pub constant: i64,
    pub r: i64,
    pub s: i64,
    pub t: i64,
}

impl AffineExpr {
    pub fn constant(c: i64) -> Self {
        AffineExpr {
            constant: c,
            ..Default::default()
        }
    }

    pub fn eval(&self, r: i64, s: i64, t: i64) -> i64 {
        self.constant + self.r * r + self.s * s + self.t * t
    }

    pub fn mentions_t(&self) -> bool {
        self.t != 0
    }
}

impl FromStr for AffineExpr {
    type Err = Error;

    /// Grammar: `term (('+'|'-') term)*` with `term := [int ['*']] var | int`
    /// and `var` one of `r`, `s`, `t`. Whitespace is ignored.
    fn from_str(src: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Expression {
            expr: src.to_string(),
            reason: reason.to_string(),
        };
        let text: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(bad("empty expression"));
        }
        let mut out = AffineExpr::default();
        let mut rest = text.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let mut sign = 1i64;
            if let Some(r) = rest.strip_prefix('+') {
                rest = r;
            } else if let Some(r) = rest.strip_prefix('-') {
                sign = -1;
                rest = r;
            } else if !first {
                return Err(bad("expected '+' or '-'"));
            }
            first = false;
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let (term, tail) = rest.split_at(end);
            rest = tail;
            let digits = term.chars().take_while(char::is_ascii_digit).count();
            let (num, var) = term.split_at(digits);
            let var = var.strip_prefix('*').unwrap_or(var);
            let coef = if num.is_empty() {
                1
            } else {
                num.parse::<i64>().map_err(|_| bad("integer overflow"))?
            } * sign;
            match var {
                "" if !num.is_empty() => out.constant += coef,
                "r" => out.r += coef,
                "s" => out.s += coef,
                "t" => out.t += coef,
                _ => return Err(bad("unknown term")),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for AffineExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (coef, var) in [
            (self.r, "r"),
            (self.s, "s"),
            (self.t, "t"),
            (self.constant, ""),
        ] {
            if coef == 0 {
                continue;
            }
            let mag = coef.unsigned_abs();
            if out.is_empty() {
                if coef < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if coef < 0 { " - " } else { " + " });
            }
            if mag != 1 || var.is_empty() {
                out.push_str(&mag.to_string());
            }
            out.push_str(var);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coefficient {
    Const(i64),
    /// `C(n, k) mod p`, zero outside `0 <= k <= n`.
    Binom(AffineExpr, AffineExpr),
}

impl Coefficient {
    fn eval(&self, p: Prime, r: i64, s: i64, t: i64) -> u32 {
        match self {
            Coefficient::Const(c) => p.reduce(*c),
            Coefficient::Binom(n, k) => binom_signed(n.eval(r, s, t), k.eval(r, s, t), p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationTerm {
    pub coefficient: Coefficient,
    pub first: AffineExpr,
    pub second: AffineExpr,
}

/// The right-hand side of `Q_r Q_s = ...`, optionally summed over `t` in an
/// inclusive range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationTemplate {
    pub sum: Option<(AffineExpr, AffineExpr)>,
    pub terms: Vec<RelationTerm>,
}

impl RelationTemplate {
    fn expand(&self, p: Prime, r: u32, s: u32) -> Result<OperationSum> {
        let (r, s) = (r as i64, s as i64);
        let range = match &self.sum {
            Some((lo, hi)) => lo.eval(r, s, 0)..=hi.eval(r, s, 0),
            None => 0..=0,
        };
        let mut out = OperationSum::zero(p);
        for t in range {
            for term in &self.terms {
                let c = term.coefficient.eval(p, r, s, t);
                let (a, b) = (term.first.eval(r, s, t), term.second.eval(r, s, t));
                if c == 0 || a < 0 || b < 0 {
                    continue;
                }
                let q = p.get() as i64;
                if a + q * b != r + q * s {
                    return Err(Error::Malformed(format!(
                        "relation term Q_{a} Q_{b} for Q_{r} Q_{s} changes the degree shift"
                    )));
                }
                out.add_term(vec![a as u32, b as u32], c);
            }
        }
        Ok(out)
    }
}

/// Order in which non-admissible pairs are reduced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReductionOrder {
    #[default]
    Leftmost,
    Rightmost,
}

pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

/// Adem relations as data, plus the admissibility convention they target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationTable {
    pub p: Prime,
    pub admissibility: Admissibility,
    /// Applies to every non-admissible pair without an explicit entry.
    pub generic: Option<RelationTemplate>,
    pub explicit: BTreeMap<(u32, u32), RelationTemplate>,
}

impl RelationTable {
    pub fn empty(p: Prime) -> Self {
        RelationTable {
            p,
            admissibility: Admissibility::default(),
            generic: None,
            explicit: BTreeMap::new(),
        }
    }

    /// The classical `p = 2` family in lower indices (see module docs).
    pub fn classical_mod2() -> Self {
        let e = |s: &str| s.parse::<AffineExpr>().expect("literal expression");
        let generic = RelationTemplate {
            sum: Some((e("s+1"), e("r-1"))),
            terms: vec![RelationTerm {
                coefficient: Coefficient::Binom(e("t-s-1"), e("2t-r-s")),
                first: e("r+2s-2t"),
                second: e("t"),
            }],
        };
        RelationTable {
            generic: Some(generic),
            ..Self::empty(Prime::TWO)
        }
    }

    /// The shipped table for `p`; only `p = 2` has one.
    pub fn builtin(p: Prime) -> Result<Self> {
        if p.is_odd() {
            Err(Error::NoBuiltinRelations(p.get()))
        } else {
            Ok(Self::classical_mod2())
        }
    }

    pub fn is_admissible(&self, w: &OperationWord) -> bool {
        self.admissibility.word(&w.indices)
    }

    /// Right-hand side for the non-admissible pair `Q_r Q_s`.
    pub fn relation(&self, r: u32, s: u32) -> Result<OperationSum> {
        let template =
            self.explicit
                .get(&(r, s))
                .or(self.generic.as_ref())
                .ok_or(Error::MissingRelation {
                    r,
                    s,
                    p: self.p.get(),
                })?;
        template.expand(self.p, r, s)
    }

    pub fn rewrite(&self, w: &OperationWord) -> Result<OperationSum> {
        self.rewrite_with(w, ReductionOrder::default(), DEFAULT_STEP_BUDGET)
    }

    pub fn rewrite_with(
        &self,
        w: &OperationWord,
        strategy: ReductionOrder,
        budget: usize,
    ) -> Result<OperationSum> {
        let mut sum = OperationSum::single(w);
        self.rewrite_sum(&mut sum, strategy, budget)?;
        Ok(sum)
    }

    /// Rewrites every word of `sum` into admissible form, in place.
    pub fn rewrite_sum(
        &self,
        sum: &mut OperationSum,
        strategy: ReductionOrder,
        budget: usize,
    ) -> Result<()> {
        if sum.p != self.p {
            return Err(Error::ModulusMismatch {
                left: self.p.get(),
                right: sum.p.get(),
            });
        }
        let mut done = OperationSum::zero(self.p);
        let mut steps = 0usize;
        while let Some((word, coeff)) = sum.pop_first() {
            let bad = word
                .windows(2)
                .enumerate()
                .filter(|(_, w)| !self.admissibility.pair(w[0], w[1]));
            let pos = match strategy {
                ReductionOrder::Leftmost => bad.map(|(i, _)| i).next(),
                ReductionOrder::Rightmost => bad.map(|(i, _)| i).next_back(),
            };
            let Some(pos) = pos else {
                done.add_term(word, coeff);
                continue;
            };
            steps += 1;
            if steps > budget {
                return Err(Error::RewriteBudget(budget));
            }
            let rhs = self.relation(word[pos], word[pos + 1])?;
            for (pair, c) in rhs.terms() {
                let mut next = word[..pos].to_vec();
                next.extend_from_slice(pair.indices());
                next.extend_from_slice(&word[pos + 2..]);
                sum.add_term(next, self.p.mul(c, coeff));
            }
        }
        *sum = done;
        Ok(())
    }
}

/// Rewrites `w` with the built-in relation table for its prime.
pub fn adem_rewrite(w: &OperationWord) -> Result<OperationSum> {
    if w.len() < 2 || is_admissible(w) {
        return Ok(OperationSum::single(w));
    }
    RelationTable::builtin(w.p)?.rewrite(w)
}
