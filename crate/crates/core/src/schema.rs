//! JSON file formats.
//!
//! Join algebra:
//!
//! ```json
//! {"p": 2, "dim_g": 1,
//!  "generator": {"name": "x", "degree_a": 2, "degree_b": 0},
//!  "product_table": [{"a": 0, "b": 0, "terms": [[1, 1]]}]}
//! ```
//!
//! `degree_a * index + degree_b` is the degree of a generator; entries need
//! `a <= b` and each term is `[coeff, result_index]`.
//!
//! Module: `{"algebra": <algebra>, "action": "s1_p2"}` or
//! `{"algebra": <algebra>, "action_table": {"max_op": 4, "max_gen": 4,
//! "entries": [{"op": 0, "gen": 0, "terms": [[1, 1]]}, ...]}}`.
//!
//! Relations: `{"p": 2, "admissible_slope": 1, "generic": <rel>, "relations":
//! [{"r": 3, "s": 1, ...<rel>}]}` where `<rel>` is
//! `{"sum": {"from": e, "to": e}, "terms": [[coeff, e, e], ...]}`, `coeff` is an
//! integer or `["binom", e, e]`, and each `e` is an integer or an affine
//! expression string in `r`, `s` and the summation variable `t` (`"r+2s-2t"`).
//! Word order is leftmost applied last.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{GeneratorFamily, GradedElement, JoinAlgebraSpec};
use crate::dyer_lashof::{
    Admissibility, AffineExpr, Coefficient, RelationTable, RelationTemplate, RelationTerm,
};
use crate::fp::Prime;
use crate::module::{ActionRule, ActionTable, ModuleSpec, TableCell};
use crate::solver::{SolutionSpace, SolveOutcome};
use crate::verify::{Failure, VerificationReport};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub name: String,
    pub degree_a: u32,
    pub degree_b: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_index: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntryDoc {
    pub a: u64,
    pub b: u64,
    pub terms: Vec<(i64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub p: u32,
    pub dim_g: u32,
    pub generator: GeneratorDoc,
    #[serde(default)]
    pub product_table: Vec<ProductEntryDoc>,
}

impl AlgebraDoc {
    pub fn from_spec(spec: &JoinAlgebraSpec) -> Self {
        let fam = spec.family();
        AlgebraDoc {
            p: spec.prime().get(),
            dim_g: spec.dim_g(),
            generator: GeneratorDoc {
                name: fam.name.clone(),
                degree_a: fam.degree_rule.slope,
                degree_b: fam.degree_rule.offset,
                max_index: fam.max_index,
            },
            product_table: spec
                .table()
                .iter()
                .map(|(&(a, b), terms)| ProductEntryDoc {
                    a,
                    b,
                    terms: terms.iter().map(|&(c, r)| (c as i64, r)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_spec(&self) -> Result<JoinAlgebraSpec> {
        let p = Prime::new(self.p)?;
        let g = &self.generator;
        let mut fam = GeneratorFamily::new(g.name.clone(), g.degree_a, g.degree_b);
        fam.max_index = g.max_index;
        JoinAlgebraSpec::new(
            p,
            self.dim_g,
            fam,
            self.product_table
                .iter()
                .map(|e| ((e.a, e.b), e.terms.clone())),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEntryDoc {
    pub op: u32,
    pub gen: u64,
    pub terms: Vec<(i64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionTableDoc {
    pub max_op: u32,
    pub max_gen: u64,
    pub entries: Vec<ActionEntryDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    pub algebra: AlgebraDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_table: Option<ActionTableDoc>,
}

impl ModuleDoc {
    pub fn from_module(m: &ModuleSpec) -> Self {
        let algebra = AlgebraDoc::from_spec(m.algebra());
        match m.action() {
            ActionRule::S1P2 => ModuleDoc {
                algebra,
                action: Some("s1_p2".into()),
                action_table: None,
            },
            ActionRule::Table(t) => ModuleDoc {
                algebra,
                action: None,
                action_table: Some(ActionTableDoc {
                    max_op: t.max_op,
                    max_gen: t.max_gen,
                    entries: t
                        .entries
                        .iter()
                        .map(|(&(op, gen), terms)| ActionEntryDoc {
                            op,
                            gen,
                            terms: terms.iter().map(|&(c, i)| (c as i64, i)).collect(),
                        })
                        .collect(),
                }),
            },
        }
    }

    pub fn to_module(&self) -> Result<ModuleSpec> {
        let algebra = self.algebra.to_spec()?;
        let action = match (&self.action, &self.action_table) {
            (Some(name), None) if name == "s1_p2" => ActionRule::S1P2,
            (Some(name), None) => {
                return Err(Error::Malformed(format!(
                    "unknown built-in action {name:?}"
                )))
            }
            (None, Some(t)) => {
                let p = algebra.prime();
                let mut entries = BTreeMap::new();
                for e in &t.entries {
                    let mut el = algebra.zero();
                    for &(c, i) in &e.terms {
                        el.add_term(p.reduce(c), i);
                    }
                    let terms = el.terms().map(|(i, c)| (c, i)).collect();
                    if entries.insert((e.op, e.gen), terms).is_some() {
                        return Err(Error::Malformed(format!(
                            "duplicate action entry Q_{}(gen {})",
                            e.op, e.gen
                        )));
                    }
                }
                ActionRule::Table(ActionTable {
                    max_op: t.max_op,
                    max_gen: t.max_gen,
                    entries,
                })
            }
            _ => {
                return Err(Error::Malformed(
                    "a module needs exactly one of \"action\" or \"action_table\"".into(),
                ))
            }
        };
        ModuleSpec::new(algebra, action)
    }
}

/// An integer or an affine expression string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExprDoc {
    Int(i64),
    Text(String),
}

impl ExprDoc {
    fn parse(&self) -> Result<AffineExpr> {
        match self {
            ExprDoc::Int(c) => Ok(AffineExpr::constant(*c)),
            ExprDoc::Text(s) => s.parse(),
        }
    }

    fn from_expr(e: &AffineExpr) -> Self {
        if (e.r, e.s, e.t) == (0, 0, 0) {
            ExprDoc::Int(e.constant)
        } else {
            ExprDoc::Text(e.to_string())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffDoc {
    Int(i64),
    /// `["binom", n, k]`
    Tagged(String, ExprDoc, ExprDoc),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumDoc {
    pub from: ExprDoc,
    pub to: ExprDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum: Option<SumDoc>,
    pub terms: Vec<(CoeffDoc, ExprDoc, ExprDoc)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDoc {
    pub r: u32,
    pub s: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum: Option<SumDoc>,
    pub terms: Vec<(CoeffDoc, ExprDoc, ExprDoc)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationFileDoc {
    pub p: u32,
    #[serde(default = "default_slope")]
    pub admissible_slope: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generic: Option<TemplateDoc>,
    #[serde(default)]
    pub relations: Vec<RelationDoc>,
}

fn default_slope() -> u32 {
    1
}

impl TemplateDoc {
    fn to_template(&self) -> Result<RelationTemplate> {
        let sum = match &self.sum {
            Some(s) => {
                let (from, to) = (s.from.parse()?, s.to.parse()?);
                if from.mentions_t() || to.mentions_t() {
                    return Err(Error::Malformed(
                        "summation bounds may not mention t".into(),
                    ));
                }
                Some((from, to))
            }
            None => None,
        };
        let terms = self
            .terms
            .iter()
            .map(|(c, first, second)| {
                let coefficient = match c {
                    CoeffDoc::Int(v) => Coefficient::Const(*v),
                    CoeffDoc::Tagged(tag, n, k) if tag == "binom" => {
                        Coefficient::Binom(n.parse()?, k.parse()?)
                    }
                    CoeffDoc::Tagged(tag, ..) => {
                        return Err(Error::Malformed(format!(
                            "unknown coefficient form {tag:?}"
                        )))
                    }
                };
                Ok(RelationTerm {
                    coefficient,
                    first: first.parse()?,
                    second: second.parse()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(RelationTemplate { sum, terms })
    }

    fn from_template(t: &RelationTemplate) -> Self {
        TemplateDoc {
            sum: t.sum.as_ref().map(|(a, b)| SumDoc {
                from: ExprDoc::from_expr(a),
                to: ExprDoc::from_expr(b),
            }),
            terms: t
                .terms
                .iter()
                .map(|term| {
                    let c = match &term.coefficient {
                        Coefficient::Const(v) => CoeffDoc::Int(*v),
                        Coefficient::Binom(n, k) => CoeffDoc::Tagged(
                            "binom".into(),
                            ExprDoc::from_expr(n),
                            ExprDoc::from_expr(k),
                        ),
                    };
                    (
                        c,
                        ExprDoc::from_expr(&term.first),
                        ExprDoc::from_expr(&term.second),
                    )
                })
                .collect(),
        }
    }
}

impl RelationFileDoc {
    pub fn to_table(&self) -> Result<RelationTable> {
        let p = Prime::new(self.p)?;
        if self.admissible_slope == 0 {
            return Err(Error::Malformed("admissible_slope must be positive".into()));
        }
        let mut explicit = BTreeMap::new();
        for rel in &self.relations {
            let template = TemplateDoc {
                sum: rel.sum.clone(),
                terms: rel.terms.clone(),
            };
            if explicit
                .insert((rel.r, rel.s), template.to_template()?)
                .is_some()
            {
                return Err(Error::Malformed(format!(
                    "duplicate relation for Q_{} Q_{}",
                    rel.r, rel.s
                )));
            }
        }
        Ok(RelationTable {
            p,
            admissibility: Admissibility {
                slope: self.admissible_slope,
            },
            generic: self
                .generic
                .as_ref()
                .map(TemplateDoc::to_template)
                .transpose()?,
            explicit,
        })
    }

    pub fn from_table(t: &RelationTable) -> Self {
        RelationFileDoc {
            p: t.p.get(),
            admissible_slope: t.admissibility.slope,
            generic: t.generic.as_ref().map(TemplateDoc::from_template),
            relations: t
                .explicit
                .iter()
                .map(|(&(r, s), tpl)| {
                    let TemplateDoc { sum, terms } = TemplateDoc::from_template(tpl);
                    RelationDoc { r, s, sum, terms }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub index: u64,
    pub coeff: u32,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDoc {
    pub p: u32,
    pub family: String,
    pub terms: Vec<TermDoc>,
}

impl ElementDoc {
    pub fn from_element(e: &GradedElement) -> Self {
        ElementDoc {
            p: e.prime().get(),
            family: e.family().name.clone(),
            terms: e
                .terms()
                .map(|(index, coeff)| TermDoc {
                    index,
                    coeff,
                    degree: e.family().degree(index),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub checked: usize,
    pub failures: Vec<Failure>,
    pub elapsed_ms: u64,
}

impl ReportDoc {
    pub fn from_report(r: &VerificationReport) -> Self {
        ReportDoc {
            checked: r.checked,
            failures: r.failures.clone(),
            elapsed_ms: r.elapsed.as_millis() as u64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotDoc {
    pub a: u64,
    pub b: u64,
    pub result: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SolveDoc {
    NoConstraints {
        unknowns: usize,
        deferred: usize,
    },
    Solved {
        p: u32,
        max_degree: i64,
        unknowns: Vec<SlotDoc>,
        equations: usize,
        deferred: usize,
        rank: usize,
        free: Vec<SlotDoc>,
        basis: Vec<Vec<u32>>,
    },
}

impl SolveDoc {
    pub fn from_outcome(o: &SolveOutcome) -> Self {
        match o {
            SolveOutcome::NoConstraints { unknowns, deferred } => SolveDoc::NoConstraints {
                unknowns: *unknowns,
                deferred: *deferred,
            },
            SolveOutcome::Solved(s) => Self::from_space(s),
        }
    }

    fn from_space(s: &SolutionSpace) -> Self {
        let slot = |x: &crate::solver::Slot| SlotDoc {
            a: x.a,
            b: x.b,
            result: x.result,
        };
        SolveDoc::Solved {
            p: s.system.p.get(),
            max_degree: s.system.max_degree,
            unknowns: s.system.unknowns.iter().map(slot).collect(),
            equations: s.system.matrix.num_rows(),
            deferred: s.system.deferred,
            rank: s.rank,
            free: s.free.iter().map(slot).collect(),
            basis: s.basis.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDoc {
    pub op: u32,
    pub gen: u64,
    pub coeff: u32,
    pub target: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDoc {
    pub p: u32,
    pub max_op: u32,
    pub max_gen: u64,
    pub cells: Vec<CellDoc>,
}

impl TableDoc {
    pub fn new(p: Prime, max_op: u32, max_gen: u64, cells: &[TableCell]) -> Self {
        TableDoc {
            p: p.get(),
            max_op,
            max_gen,
            cells: cells
                .iter()
                .map(|c| CellDoc {
                    op: c.op,
                    gen: c.gen,
                    coeff: c.coeff,
                    target: c.target,
                })
                .collect(),
        }
    }
}

pub fn algebra_from_json(text: &str) -> Result<JoinAlgebraSpec> {
    parse::<AlgebraDoc>(text)?.to_spec()
}

pub fn module_from_json(text: &str) -> Result<ModuleSpec> {
    parse::<ModuleDoc>(text)?.to_module()
}

pub fn relations_from_json(text: &str) -> Result<RelationTable> {
    parse::<RelationFileDoc>(text)?.to_table()
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::S1Candidate;
    use crate::dyer_lashof::OperationWord;
    use proptest::prelude::*;

    #[test]
    fn algebra_example_parses() {
        let spec = algebra_from_json(
            r#"{"p": 2, "dim_g": 1, "generator": {"name": "x", "degree_a": 2, "degree_b": 0},
                "product_table": [{"a": 0, "b": 0, "terms": [[1, 1]]}]}"#,
        )
        .unwrap();
        let x0 = spec.generator(0).unwrap();
        assert_eq!(spec.join_product(&x0, &x0).unwrap().to_string(), "x_1");
    }

    #[test]
    fn algebra_errors() {
        assert!(matches!(algebra_from_json("{"), Err(Error::Malformed(_))));
        let bad_prime =
            r#"{"p": 4, "dim_g": 0, "generator": {"name": "y", "degree_a": 1, "degree_b": 0}}"#;
        assert_eq!(algebra_from_json(bad_prime), Err(Error::NotPrime(4)));
        let reversed = r#"{"p": 3, "dim_g": 0, "generator": {"name": "y", "degree_a": 1, "degree_b": 0},
            "product_table": [{"a": 1, "b": 0, "terms": []}]}"#;
        assert_eq!(
            algebra_from_json(reversed),
            Err(Error::NonCanonicalEntry { a: 1, b: 0 })
        );
    }

    #[test]
    fn module_round_trip() {
        let m = ModuleSpec::s1_p2()
            .with_algebra(S1Candidate::Shift.spec(3))
            .unwrap();
        let text = serde_json::to_string(&ModuleDoc::from_module(&m)).unwrap();
        assert_eq!(module_from_json(&text).unwrap(), m);

        let t = ActionTable::from_module(&m, 3, 3).unwrap();
        let tm = ModuleSpec::new(m.algebra().clone(), ActionRule::Table(t)).unwrap();
        let text = serde_json::to_string(&ModuleDoc::from_module(&tm)).unwrap();
        assert_eq!(module_from_json(&text).unwrap(), tm);
    }

    #[test]
    fn module_needs_one_action() {
        let alg = serde_json::to_value(AlgebraDoc::from_spec(&JoinAlgebraSpec::s1_p2())).unwrap();
        let none = serde_json::json!({ "algebra": alg });
        assert!(matches!(
            module_from_json(&none.to_string()),
            Err(Error::Malformed(_))
        ));
        let unknown = serde_json::json!({ "algebra": alg, "action": "s2_p3" });
        assert!(matches!(
            module_from_json(&unknown.to_string()),
            Err(Error::Malformed(_))
        ));
    }

    #[test]
    fn builtin_relations_round_trip() {
        let t = RelationTable::classical_mod2();
        let doc = RelationFileDoc::from_table(&t);
        let text = serde_json::to_string(&doc).unwrap();
        assert!(
            text.contains(r#"["binom","-s + t - 1","-r - s + 2t"]"#),
            "{text}"
        );
        assert_eq!(relations_from_json(&text).unwrap(), t);
    }

    #[test]
    fn explicit_relation_file() {
        let text = r#"{"p": 2, "relations": [
            {"r": 2, "s": 0, "terms": [[1, 0, 1]]},
            {"r": 3, "s": 1, "sum": {"from": 2, "to": 2}, "terms": [[["binom", "t-2", 0], "r+2s-2t", "t"]]}
        ]}"#;
        let t = relations_from_json(text).unwrap();
        let w = OperationWord::new(Prime::TWO, vec![3, 1]);
        assert_eq!(t.rewrite(&w).unwrap().to_string(), "Q_1 Q_2");
        let w = OperationWord::new(Prime::TWO, vec![5, 1]);
        assert!(matches!(
            t.rewrite(&w),
            Err(Error::MissingRelation { r: 5, s: 1, p: 2 })
        ));
    }

    #[test]
    fn relation_file_errors() {
        let bad_tag =
            r#"{"p": 2, "relations": [{"r": 2, "s": 0, "terms": [[["choose", 1, 1], 0, 1]]}]}"#;
        assert!(matches!(
            relations_from_json(bad_tag),
            Err(Error::Malformed(_))
        ));
        let bad_expr = r#"{"p": 2, "relations": [{"r": 2, "s": 0, "terms": [[1, "2q", 1]]}]}"#;
        assert!(matches!(
            relations_from_json(bad_expr),
            Err(Error::Expression { .. })
        ));
        let t_in_bounds = r#"{"p": 2, "generic": {"sum": {"from": "t", "to": 3}, "terms": []}}"#;
        assert!(matches!(
            relations_from_json(t_in_bounds),
            Err(Error::Malformed(_))
        ));
    }

    proptest! {
        #[test]
        fn report_json_rerenders_identically(
            checked in 0usize..1000,
            inputs in proptest::collection::vec(0u64..100, 0..4),
            ms in 0u64..100_000,
        ) {
            let doc = ReportDoc {
                checked,
                failures: vec![Failure { description: "d".into(), inputs, lhs: "x_1".into(), rhs: "0".into() }],
                elapsed_ms: ms,
            };
            let text = serde_json::to_string_pretty(&doc).unwrap();
            let back: ReportDoc = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
        }
    }
}
