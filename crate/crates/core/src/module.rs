//! Module structures for the operations `Q_i` over a join algebra.
//!
//! The headline rule is the `S^1`, `p = 2` action
//! `Q_{2j}(x_i) = C(i + j, j) x_{2i + j + 1}`, with `Q_odd = 0` since
//! `H_*(CP^inf)` is concentrated in even degrees.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{GeneratorFamily, GradedElement, JoinAlgebraSpec};
use crate::dyer_lashof::{single_op_degree, OperationSum, OperationWord};
use crate::fp::{binom_residue, Prime};
use crate::{Error, Result};

/// Coefficient and target of `Q_op(x_gen)` in the `S^1` module.
pub fn s1_coefficient(op: u32, gen: u64) -> (u32, u64) {
    if op % 2 == 1 {
        return (0, 0);
    }
    let j = (op / 2) as u64;
    (binom_residue(gen + j, j, Prime::TWO), 2 * gen + j + 1)
}

/// `Q_op(x_gen)` in `H_*(BS^1; F_2)`.
pub fn s1_action(op: u32, gen: u64) -> GradedElement {
    s1_element(Arc::new(GeneratorFamily::cp_infinity()), op, gen)
}

fn s1_element(family: Arc<GeneratorFamily>, op: u32, gen: u64) -> GradedElement {
    let mut out = GradedElement::zero(family, Prime::TWO);
    let (c, target) = s1_coefficient(op, gen);
    out.add_term(c, target);
    out
}

/// A finite action table, total over `op <= max_op`, `gen <= max_gen`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionTable {
    pub max_op: u32,
    pub max_gen: u64,
    pub entries: BTreeMap<(u32, u64), Vec<(u32, u64)>>,
}

impl ActionTable {
    /// Tabulates an existing module over the rectangle.
    pub fn from_module(m: &ModuleSpec, max_op: u32, max_gen: u64) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for op in 0..=max_op {
            for gen in 0..=max_gen {
                let terms = m.act(op, gen)?.terms().map(|(i, c)| (c, i)).collect();
                entries.insert((op, gen), terms);
            }
        }
        Ok(ActionTable {
            max_op,
            max_gen,
            entries,
        })
    }

    /// Adds one to the coefficient of the degree-forced target of
    /// `Q_op(x_gen)`; over `F_2` this flips it.
    pub fn perturb(&mut self, algebra: &JoinAlgebraSpec, op: u32, gen: u64) -> Result<()> {
        let degree = single_op_degree(algebra.prime(), op, algebra.degree(gen), algebra.dim_g());
        let target = algebra.family().index_of_degree(degree).ok_or_else(|| {
            Error::Malformed(format!(
                "Q_{op}(gen {gen}) has no generator in degree {degree} to perturb"
            ))
        })?;
        let terms = self
            .entries
            .get_mut(&(op, gen))
            .ok_or(Error::ActionOutOfRange { op, gen })?;
        let p = algebra.prime();
        let mut e = GradedElement::zero(algebra.family().clone(), p);
        for &(c, i) in terms.iter() {
            e.add_term(c, i);
        }
        e.add_term(1, target);
        *terms = e.terms().map(|(i, c)| (c, i)).collect();
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActionRule {
    /// The closed-form `S^1`, `p = 2` action.
    S1P2,
    Table(ActionTable),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleSpec {
    algebra: JoinAlgebraSpec,
    action: ActionRule,
}

impl ModuleSpec {
    pub fn new(algebra: JoinAlgebraSpec, action: ActionRule) -> Result<Self> {
        match &action {
            ActionRule::S1P2 => {
                let fam = algebra.family();
                if algebra.prime() != Prime::TWO {
                    return Err(Error::BuiltinMismatch {
                        name: "s1_p2",
                        requirement: "p = 2",
                    });
                }
                if algebra.dim_g() != 1 {
                    return Err(Error::BuiltinMismatch {
                        name: "s1_p2",
                        requirement: "dim_g = 1",
                    });
                }
                if fam.degree_rule.slope != 2
                    || fam.degree_rule.offset != 0
                    || fam.max_index.is_some()
                {
                    return Err(Error::BuiltinMismatch {
                        name: "s1_p2",
                        requirement: "an unbounded family with degree 2i",
                    });
                }
            }
            ActionRule::Table(t) => validate_table(&algebra, t)?,
        }
        Ok(ModuleSpec { algebra, action })
    }

    /// `H_*(BS^1; F_2)` with the closed-form action and no product table.
    pub fn s1_p2() -> Self {
        ModuleSpec {
            algebra: JoinAlgebraSpec::s1_p2(),
            action: ActionRule::S1P2,
        }
    }

    pub fn algebra(&self) -> &JoinAlgebraSpec {
        &self.algebra
    }

    pub fn action(&self) -> &ActionRule {
        &self.action
    }

    pub fn prime(&self) -> Prime {
        self.algebra.prime()
    }

    /// Same action over a different product table.
    pub fn with_algebra(&self, algebra: JoinAlgebraSpec) -> Result<Self> {
        ModuleSpec::new(algebra, self.action.clone())
    }

    pub fn generator(&self, index: u64) -> Result<GradedElement> {
        self.algebra.generator(index)
    }

    /// `Q_op(x_gen)`.
    pub fn act(&self, op: u32, gen: u64) -> Result<GradedElement> {
        match &self.action {
            ActionRule::S1P2 => Ok(s1_element(self.algebra.family().clone(), op, gen)),
            ActionRule::Table(t) => {
                let terms = t
                    .entries
                    .get(&(op, gen))
                    .ok_or(Error::ActionOutOfRange { op, gen })?;
                let mut out = self.algebra.zero();
                for &(c, i) in terms {
                    out.add_term(c, i);
                }
                Ok(out)
            }
        }
    }

    fn check_element(&self, x: &GradedElement) -> Result<()> {
        if x.prime() != self.prime() {
            return Err(Error::ModulusMismatch {
                left: self.prime().get(),
                right: x.prime().get(),
            });
        }
        if **x.family() != **self.algebra.family() {
            return Err(Error::FamilyMismatch {
                left: self.algebra.family().name.clone(),
                right: x.family().name.clone(),
            });
        }
        Ok(())
    }

    /// `Q_op` extended linearly.
    pub fn apply_op(&self, op: u32, x: &GradedElement) -> Result<GradedElement> {
        self.check_element(x)?;
        let mut out = self.algebra.zero();
        for (gen, c) in x.terms() {
            out.add_scaled(&self.act(op, gen)?, c);
        }
        Ok(out)
    }

    pub fn apply_word(&self, w: &OperationWord, x: &GradedElement) -> Result<GradedElement> {
        if w.prime() != self.prime() {
            return Err(Error::ModulusMismatch {
                left: self.prime().get(),
                right: w.prime().get(),
            });
        }
        self.check_element(x)?;
        w.indices()
            .iter()
            .rev()
            .try_fold(x.clone(), |acc, &op| self.apply_op(op, &acc))
    }

    pub fn apply_sum(&self, s: &OperationSum, x: &GradedElement) -> Result<GradedElement> {
        if s.prime() != self.prime() {
            return Err(Error::ModulusMismatch {
                left: self.prime().get(),
                right: s.prime().get(),
            });
        }
        self.check_element(x)?;
        let mut out = self.algebra.zero();
        for (w, c) in s.terms() {
            out.add_scaled(&self.apply_word(&w, x)?, c);
        }
        Ok(out)
    }

    /// `sum_{i + j = n} Q_i(a) * Q_j(b)`.
    pub fn cartan_expand(
        &self,
        n: u32,
        a: &GradedElement,
        b: &GradedElement,
    ) -> Result<GradedElement> {
        let mut out = self.algebra.zero();
        for i in 0..=n {
            let qa = self.apply_op(i, a)?;
            if qa.is_zero() {
                continue;
            }
            let qb = self.apply_op(n - i, b)?;
            out.add_scaled(&self.algebra.join_product(&qa, &qb)?, 1);
        }
        Ok(out)
    }
}

/// One cell of the coefficient table: the coefficient of the generator in
/// degree `op_degree(Q_op, deg x_gen)` within `Q_op(x_gen)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableCell {
    pub op: u32,
    pub gen: u64,
    pub coeff: u32,
    /// `None` when no generator lives in the target degree.
    pub target: Option<u64>,
}

/// Cells in row-major order: `gen` outer, `op` inner.
pub fn coefficient_table(m: &ModuleSpec, max_op: u32, max_gen: u64) -> Result<Vec<TableCell>> {
    let alg = m.algebra();
    let mut cells = Vec::new();
    for gen in 0..=max_gen {
        for op in 0..=max_op {
            let image = m.act(op, gen)?;
            let degree = single_op_degree(alg.prime(), op, alg.degree(gen), alg.dim_g());
            let target = alg.family().index_of_degree(degree);
            let coeff = target.map_or(0, |t| image.coefficient(t).value());
            cells.push(TableCell {
                op,
                gen,
                coeff,
                target,
            });
        }
    }
    Ok(cells)
}

fn validate_table(algebra: &JoinAlgebraSpec, t: &ActionTable) -> Result<()> {
    for op in 0..=t.max_op {
        for gen in 0..=t.max_gen {
            if !t.entries.contains_key(&(op, gen)) {
                return Err(Error::ActionIncomplete { op, gen });
            }
        }
    }
    let fam = algebra.family();
    for (&(op, gen), terms) in &t.entries {
        if op > t.max_op || gen > t.max_gen {
            return Err(Error::Malformed(format!(
                "action entry Q_{op}(gen {gen}) lies outside the declared rectangle"
            )));
        }
        if !fam.contains(gen) {
            return Err(Error::IndexOutOfFamily {
                family: fam.name.clone(),
                index: gen,
            });
        }
        let expected = single_op_degree(algebra.prime(), op, algebra.degree(gen), algebra.dim_g());
        for &(c, target) in terms {
            if !fam.contains(target) {
                return Err(Error::IndexOutOfFamily {
                    family: fam.name.clone(),
                    index: target,
                });
            }
            let actual = algebra.degree(target);
            if c % algebra.prime().get() != 0 && actual != expected {
                return Err(Error::ActionDegree {
                    op,
                    gen,
                    target,
                    expected,
                    actual,
                });
            }
        }
    }
    Ok(())
}
