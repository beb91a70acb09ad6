//! Graded `F_p`-linear combinations and the join product.
//!
//! Degrees follow the join-product convention: an `n`-fold product raises the
//! total degree by `(n - 1)(dim G + 1)`, and `a * b = (-1)^s b * a` with
//! `s = deg a * deg b + dim G + 1`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::fp::{binom_residue, Fp, Prime};
use crate::{Error, Result};

/// Affine degree rule `index -> slope * index + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DegreeRule {
    pub slope: u32,
    pub offset: u32,
}

impl DegreeRule {
    pub fn degree(self, index: u64) -> i64 {
        self.slope as i64 * index as i64 + self.offset as i64
    }
}

/// An indexed family of generators `x_0, x_1, ...`, one per index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorFamily {
    pub name: String,
    pub degree_rule: DegreeRule,
    /// Inclusive upper bound on indices, if the family is finite.
    pub max_index: Option<u64>,
}

impl GeneratorFamily {
    pub fn new(name: impl Into<String>, slope: u32, offset: u32) -> Self {
        GeneratorFamily {
            name: name.into(),
            degree_rule: DegreeRule { slope, offset },
            max_index: None,
        }
    }

    /// The generators `x_i` of `H_{2i}(CP^inf)`.
    pub fn cp_infinity() -> Self {
        GeneratorFamily::new("x", 2, 0)
    }

    pub fn with_max_index(mut self, max: u64) -> Self {
        self.max_index = Some(max);
        self
    }

    pub fn degree(&self, index: u64) -> i64 {
        self.degree_rule.degree(index)
    }

    pub fn contains(&self, index: u64) -> bool {
        self.max_index.is_none_or(|m| index <= m)
    }

    /// The unique generator of the given degree, if the degree rule is
    /// injective and hits it.
    pub fn index_of_degree(&self, degree: i64) -> Option<u64> {
        let DegreeRule { slope, offset } = self.degree_rule;
        if slope == 0 {
            return None;
        }
        let shifted = degree - offset as i64;
        if shifted < 0 || shifted % slope as i64 != 0 {
            return None;
        }
        let index = (shifted / slope as i64) as u64;
        self.contains(index).then_some(index)
    }

    fn check(&self, index: u64) -> Result<()> {
        if self.contains(index) {
            Ok(())
        } else {
            Err(Error::IndexOutOfFamily {
                family: self.name.clone(),
                index,
            })
        }
    }
}

/// A finite `F_p`-linear combination of generators, kept in canonical sparse
/// form (no zero coefficients).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedElement {
    family: Arc<GeneratorFamily>,
    p: Prime,
    terms: BTreeMap<u64, u32>,
}

impl GradedElement {
    pub fn zero(family: Arc<GeneratorFamily>, p: Prime) -> Self {
        GradedElement {
            family,
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn generator(family: Arc<GeneratorFamily>, p: Prime, index: u64) -> Result<Self> {
        Self::from_terms(family, p, [(1, index)])
    }

    /// Builds `sum coeff * x_index`, merging repeated indices.
    pub fn from_terms(
        family: Arc<GeneratorFamily>,
        p: Prime,
        terms: impl IntoIterator<Item = (i64, u64)>,
    ) -> Result<Self> {
        let mut out = Self::zero(family, p);
        for (coeff, index) in terms {
            out.family.check(index)?;
            out.add_term(p.reduce(coeff), index);
        }
        Ok(out)
    }

    pub fn family(&self) -> &Arc<GeneratorFamily> {
        &self.family
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero terms as `(index, coefficient)` in increasing index order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.terms.iter().map(|(&i, &c)| (i, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, index: u64) -> Fp {
        Fp::new(self.terms.get(&index).copied().unwrap_or(0) as i64, self.p)
    }

    /// `Some(d)` if every term has degree `d`; `None` for zero or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut degrees = self.terms.keys().map(|&i| self.family.degree(i));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub(crate) fn add_term(&mut self, coeff: u32, index: u64) {
        if coeff == 0 {
            return;
        }
        match self.terms.entry(index) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let sum = self.p.add(*o.get(), coeff);
                if sum == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub(crate) fn add_scaled(&mut self, other: &GradedElement, scale: u32) {
        for (i, c) in other.terms() {
            self.add_term(self.p.mul(c, scale), i);
        }
    }

    fn check_compatible(&self, other: &GradedElement) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch {
                left: self.p.get(),
                right: other.p.get(),
            });
        }
        if self.family != other.family {
            return Err(Error::FamilyMismatch {
                left: self.family.name.clone(),
                right: other.family.name.clone(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &GradedElement) -> Result<GradedElement> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.add_scaled(other, 1);
        Ok(out)
    }

    pub fn scale(&self, c: Fp) -> Result<GradedElement> {
        if c.modulus() != self.p {
            return Err(Error::ModulusMismatch {
                left: self.p.get(),
                right: c.modulus().get(),
            });
        }
        let mut out = Self::zero(self.family.clone(), self.p);
        out.add_scaled(self, c.value());
        Ok(out)
    }
}

pub fn element_add(x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
    x.try_add(y)
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (i, c)) in self.terms().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            if c != 1 {
                write!(f, "{c} ")?;
            }
            write!(f, "{}_{}", self.family.name, i)?;
        }
        Ok(())
    }
}

/// Degree of an `n`-fold join product of classes of the given degrees.
pub fn n_fold_degree(n: usize, degrees: &[i64], dim_g: u32) -> Result<i64> {
    if n != degrees.len() || n == 0 {
        return Err(Error::LengthMismatch {
            n,
            len: degrees.len(),
        });
    }
    Ok(degrees.iter().sum::<i64>() + (n as i64 - 1) * (dim_g as i64 + 1))
}

/// Parity of `s = deg_a * deg_b + dim_g + 1`.
fn sign_exponent_is_odd(deg_a: i64, deg_b: i64, dim_g: u32) -> bool {
    let product_odd = deg_a.rem_euclid(2) == 1 && deg_b.rem_euclid(2) == 1;
    product_odd ^ dim_g.is_multiple_of(2)
}

/// `(-1)^s` in `F_p`, the factor relating `a * b` to `b * a`.
pub fn commutativity_sign(deg_a: i64, deg_b: i64, dim_g: u32, p: Prime) -> Fp {
    if sign_exponent_is_odd(deg_a, deg_b, dim_g) {
        -Fp::one(p)
    } else {
        Fp::one(p)
    }
}

/// Structure constants of the join product, keyed by canonical pairs `a <= b`.
pub type ProductTable = BTreeMap<(u64, u64), Vec<(u32, u64)>>;

/// Parameters of a join algebra: the prime, `dim G`, the generator family and
/// a (finite, possibly partial) product table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinAlgebraSpec {
    p: Prime,
    dim_g: u32,
    family: Arc<GeneratorFamily>,
    table: ProductTable,
}

impl JoinAlgebraSpec {
    /// A spec with no product table at all.
    pub fn without_table(p: Prime, dim_g: u32, family: GeneratorFamily) -> Self {
        JoinAlgebraSpec {
            p,
            dim_g,
            family: Arc::new(family),
            table: BTreeMap::new(),
        }
    }

    /// Validates canonical ordering, family membership and the degree law of
    /// every entry. The sign law is *not* enforced here; see
    /// [`crate::verify::verify_sign_laws`].
    pub fn new(
        p: Prime,
        dim_g: u32,
        family: GeneratorFamily,
        entries: impl IntoIterator<Item = ((u64, u64), Vec<(i64, u64)>)>,
    ) -> Result<Self> {
        let mut spec = Self::without_table(p, dim_g, family);
        for ((a, b), terms) in entries {
            spec.insert(a, b, terms)?;
        }
        Ok(spec)
    }

    /// `H_*(BS^1; F_2)` with `dim G = 1`.
    pub fn s1_p2() -> Self {
        Self::without_table(Prime::TWO, 1, GeneratorFamily::cp_infinity())
    }

    fn insert(&mut self, a: u64, b: u64, terms: Vec<(i64, u64)>) -> Result<()> {
        if a > b {
            return Err(Error::NonCanonicalEntry { a, b });
        }
        self.family.check(a)?;
        self.family.check(b)?;
        let expected = self.product_degree(a, b);
        let mut merged = GradedElement::zero(self.family.clone(), self.p);
        for (c, r) in terms {
            self.family.check(r)?;
            let actual = self.family.degree(r);
            if actual != expected {
                return Err(Error::DegreeLaw {
                    a,
                    b,
                    expected,
                    actual,
                });
            }
            merged.add_term(self.p.reduce(c), r);
        }
        let stored = merged.terms().map(|(i, c)| (c, i)).collect();
        match self.table.entry((a, b)) {
            Entry::Occupied(_) => Err(Error::DuplicateEntry { a, b }),
            Entry::Vacant(v) => {
                v.insert(stored);
                Ok(())
            }
        }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dim_g(&self) -> u32 {
        self.dim_g
    }

    pub fn family(&self) -> &Arc<GeneratorFamily> {
        &self.family
    }

    pub fn table(&self) -> &ProductTable {
        &self.table
    }

    pub fn has_table(&self) -> bool {
        !self.table.is_empty()
    }

    pub fn degree(&self, index: u64) -> i64 {
        self.family.degree(index)
    }

    /// Degree of `x_a * x_b` under the degree law.
    pub fn product_degree(&self, a: u64, b: u64) -> i64 {
        self.degree(a) + self.degree(b) + self.dim_g as i64 + 1
    }

    pub fn sign(&self, a: u64, b: u64) -> Fp {
        commutativity_sign(self.degree(a), self.degree(b), self.dim_g, self.p)
    }

    pub fn zero(&self) -> GradedElement {
        GradedElement::zero(self.family.clone(), self.p)
    }

    pub fn generator(&self, index: u64) -> Result<GradedElement> {
        GradedElement::generator(self.family.clone(), self.p, index)
    }

    /// `x_a * x_b`, resolving `a > b` through the stored `(b, a)` entry and
    /// the commutativity sign.
    pub fn generator_product(&self, a: u64, b: u64) -> Result<GradedElement> {
        let (key, sign) = if a <= b {
            ((a, b), 1)
        } else {
            ((b, a), self.sign(a, b).value())
        };
        let terms = self
            .table
            .get(&key)
            .ok_or(Error::ProductUndefined { a, b })?;
        let mut out = self.zero();
        for &(c, r) in terms {
            out.add_term(self.p.mul(c, sign), r);
        }
        Ok(out)
    }

    pub fn join_product(&self, x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
        for e in [x, y] {
            if e.prime() != self.p {
                return Err(Error::ModulusMismatch {
                    left: self.p.get(),
                    right: e.prime().get(),
                });
            }
            if **e.family() != *self.family {
                return Err(Error::FamilyMismatch {
                    left: self.family.name.clone(),
                    right: e.family().name.clone(),
                });
            }
        }
        let mut out = self.zero();
        for (a, ca) in x.terms() {
            for (b, cb) in y.terms() {
                let prod = self.generator_product(a, b)?;
                out.add_scaled(&prod, self.p.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// Pairs whose diagonal entry the sign law forces to vanish: `a * a` with
    /// odd `s` over an odd prime (`c = -c` implies `c = 0`).
    pub fn diagonal_forced_zero(&self, a: u64) -> bool {
        self.p.is_odd() && sign_exponent_is_odd(self.degree(a), self.degree(a), self.dim_g)
    }

    /// Copy with every sign-forced diagonal entry set to zero.
    pub fn sign_canonical(&self) -> Self {
        let mut out = self.clone();
        for (&(a, b), terms) in out.table.iter_mut() {
            if a == b && self.diagonal_forced_zero(a) {
                terms.clear();
            }
        }
        out
    }

    /// Copy with the product table replaced.
    pub fn with_entries(
        &self,
        entries: impl IntoIterator<Item = ((u64, u64), Vec<(i64, u64)>)>,
    ) -> Result<Self> {
        Self::new(self.p, self.dim_g, (*self.family).clone(), entries)
    }
}

/// Named candidate product tables for `H_*(BS^1; F_2)`. None is known to be
/// the true join product; they exist to be checked against the Cartan formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum S1Candidate {
    /// `x_a * x_b = x_{a+b+1}`
    Shift,
    /// `x_a * x_b = C(a+b+1, a) x_{a+b+1}`
    Binomial,
    /// every product vanishes
    Zero,
}

impl S1Candidate {
    pub const ALL: [S1Candidate; 3] =
        [S1Candidate::Shift, S1Candidate::Binomial, S1Candidate::Zero];

    pub fn name(self) -> &'static str {
        match self {
            S1Candidate::Shift => "shift",
            S1Candidate::Binomial => "binomial",
            S1Candidate::Zero => "zero",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn coefficient(self, a: u64, b: u64) -> u32 {
        match self {
            S1Candidate::Shift => 1,
            S1Candidate::Binomial => binom_residue(a + b + 1, a, Prime::TWO),
            S1Candidate::Zero => 0,
        }
    }

    /// The table restricted to pairs `a <= b <= max_index`.
    pub fn spec(self, max_index: u64) -> JoinAlgebraSpec {
        let entries = (0..=max_index).flat_map(move |a| {
            (a..=max_index).map(move |b| ((a, b), vec![(self.coefficient(a, b) as i64, a + b + 1)]))
        });
        JoinAlgebraSpec::s1_p2()
            .with_entries(entries)
            .expect("candidate tables satisfy the degree law")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    fn fam() -> Arc<GeneratorFamily> {
        Arc::new(GeneratorFamily::cp_infinity())
    }

    fn x(i: u64, q: u32) -> GradedElement {
        GradedElement::generator(fam(), p(q), i).unwrap()
    }

    #[test]
    fn addition_examples() {
        assert!(element_add(&x(1, 2), &x(1, 2)).unwrap().is_zero());
        let zero = GradedElement::zero(fam(), p(2));
        assert_eq!(element_add(&x(1, 2), &zero).unwrap(), x(1, 2));
        let two_x3 = GradedElement::from_terms(fam(), p(3), [(2, 3)]).unwrap();
        assert_eq!(element_add(&two_x3, &two_x3).unwrap(), x(3, 3));
    }

    #[test]
    fn addition_checks_context() {
        assert!(matches!(
            element_add(&x(1, 2), &x(1, 3)),
            Err(Error::ModulusMismatch { .. })
        ));
        let other = Arc::new(GeneratorFamily::new("y", 1, 0));
        let y = GradedElement::generator(other, p(2), 1).unwrap();
        assert!(matches!(
            element_add(&x(1, 2), &y),
            Err(Error::FamilyMismatch { .. })
        ));
    }

    #[test]
    fn display() {
        assert_eq!(GradedElement::zero(fam(), p(3)).to_string(), "0");
        let e = GradedElement::from_terms(fam(), p(3), [(1, 1), (2, 4), (3, 7)]).unwrap();
        assert_eq!(e.to_string(), "x_1 + 2 x_4");
    }

    #[test]
    fn join_product_examples() {
        let spec = JoinAlgebraSpec::s1_p2()
            .with_entries([((0, 0), vec![(1, 1)])])
            .unwrap();
        assert_eq!(spec.join_product(&x(0, 2), &x(0, 2)).unwrap(), x(1, 2));
        assert!(spec.join_product(&x(0, 2), &spec.zero()).unwrap().is_zero());
        assert_eq!(
            spec.join_product(&x(0, 2), &x(1, 2)),
            Err(Error::ProductUndefined { a: 0, b: 1 })
        );
    }

    #[test]
    fn transposed_lookup_applies_sign() {
        // p = 3, dim G = 0, family with deg x_i = i: s = a*b + 1
        let fam = GeneratorFamily::new("y", 1, 0);
        let spec = JoinAlgebraSpec::new(p(3), 0, fam, [((1, 2), vec![(1, 4)])]).unwrap();
        let y = |i| spec.generator(i).unwrap();
        // s = 2 + 1 odd
        let ab = spec.join_product(&y(1), &y(2)).unwrap();
        let ba = spec.join_product(&y(2), &y(1)).unwrap();
        assert_eq!(ab.coefficient(4).value(), 1);
        assert_eq!(ba.coefficient(4).value(), 2);
    }

    #[test]
    fn point_squared_vanishes_for_odd_p_even_dim() {
        let fam = GeneratorFamily::new("y", 1, 0);
        let spec = JoinAlgebraSpec::new(p(5), 2, fam, [((0, 0), vec![(3, 3)])]).unwrap();
        assert!(spec.diagonal_forced_zero(0));
        let canonical = spec.sign_canonical();
        let pt = canonical.generator(0).unwrap();
        assert!(canonical.join_product(&pt, &pt).unwrap().is_zero());
        // dim G odd: s = 0 + 1 + 1 even, nothing forced
        let fam = GeneratorFamily::new("y", 1, 0);
        let spec = JoinAlgebraSpec::new(p(5), 1, fam, [((0, 0), vec![(3, 2)])]).unwrap();
        assert!(!spec.diagonal_forced_zero(0));
    }

    #[test]
    fn table_validation() {
        let s = JoinAlgebraSpec::s1_p2();
        assert_eq!(
            s.with_entries([((2, 1), vec![])]),
            Err(Error::NonCanonicalEntry { a: 2, b: 1 })
        );
        assert_eq!(
            s.with_entries([((0, 1), vec![(1, 3)])]),
            Err(Error::DegreeLaw {
                a: 0,
                b: 1,
                expected: 4,
                actual: 6
            })
        );
        assert_eq!(
            s.with_entries([((0, 1), vec![]), ((0, 1), vec![])]),
            Err(Error::DuplicateEntry { a: 0, b: 1 })
        );
    }

    #[test]
    fn n_fold_degrees() {
        assert_eq!(n_fold_degree(2, &[3, 4], 1).unwrap(), 9);
        assert_eq!(n_fold_degree(1, &[7], 5).unwrap(), 7);
        assert_eq!(n_fold_degree(4, &[0, 0, 0, 0], 1).unwrap(), 6);
        assert_eq!(
            n_fold_degree(3, &[1, 2], 1),
            Err(Error::LengthMismatch { n: 3, len: 2 })
        );
    }

    #[test]
    fn signs() {
        for (a, b, g) in [(0, 0, 0), (3, 5, 2), (1, 1, 1)] {
            assert_eq!(commutativity_sign(a, b, g, Prime::TWO).value(), 1);
        }
        assert_eq!(commutativity_sign(0, 0, 0, p(3)).value(), 2);
        assert_eq!(commutativity_sign(1, 1, 1, p(5)).value(), 4);
        assert_eq!(commutativity_sign(2, 1, 1, p(5)).value(), 1);
    }

    #[test]
    fn candidates_respect_degree_law() {
        for c in S1Candidate::ALL {
            let spec = c.spec(6);
            assert_eq!(spec.table().len(), 28);
            for (&(a, b), terms) in spec.table() {
                for &(_, r) in terms {
                    assert_eq!(spec.degree(r), spec.product_degree(a, b));
                }
            }
        }
        assert_eq!(S1Candidate::Binomial.coefficient(1, 1), 1); // C(3,1)
        assert_eq!(S1Candidate::Binomial.coefficient(1, 2), 0); // C(4,1)
    }

    fn element(q: u32) -> impl Strategy<Value = GradedElement> {
        proptest::collection::vec((0..q as i64, 0u64..12), 0..8)
            .prop_map(move |t| GradedElement::from_terms(fam(), p(q), t).unwrap())
    }

    proptest! {
        #[test]
        fn addition_is_a_group_law(x in element(3), y in element(3), z in element(3)) {
            let zero = GradedElement::zero(fam(), p(3));
            prop_assert_eq!(element_add(&x, &zero).unwrap(), x.clone());
            prop_assert_eq!(element_add(&x, &y).unwrap(), element_add(&y, &x).unwrap());
            let l = element_add(&element_add(&x, &y).unwrap(), &z).unwrap();
            let r = element_add(&x, &element_add(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
            prop_assert!(x.terms().all(|(_, c)| c != 0));
        }

        #[test]
        fn products_are_sign_commutative(a in 0u64..10, b in 0u64..10) {
            for c in S1Candidate::ALL {
                let spec = c.spec(10);
                let xa = spec.generator(a).unwrap();
                let xb = spec.generator(b).unwrap();
                let ab = spec.join_product(&xa, &xb).unwrap();
                let ba = spec.join_product(&xb, &xa).unwrap();
                let sign = spec.sign(a, b);
                prop_assert_eq!(ab.clone(), ba.scale(sign).unwrap());
                if let Some(d) = ab.homogeneous_degree() {
                    prop_assert_eq!(d, spec.product_degree(a, b));
                }
            }
        }
    }
}
