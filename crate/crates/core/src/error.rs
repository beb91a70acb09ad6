use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("incompatible field contexts: F_{left} vs F_{right}")]
    ModulusMismatch { left: u32, right: u32 },

    #[error("elements live over different generator families ({left} vs {right})")]
    FamilyMismatch { left: String, right: String },

    #[error("generator index {index} is outside the family {family}")]
    IndexOutOfFamily { family: String, index: u64 },

    #[error("product undefined for pair ({a}, {b})")]
    ProductUndefined { a: u64, b: u64 },

    #[error("product table entry ({a}, {b}) violates the degree law: expected degree {expected}, got {actual}")]
    DegreeLaw {
        a: u64,
        b: u64,
        expected: i64,
        actual: i64,
    },

    #[error("product table entry ({a}, {b}) is not stored canonically (need a <= b)")]
    NonCanonicalEntry { a: u64, b: u64 },

    #[error("duplicate product table entry ({a}, {b})")]
    DuplicateEntry { a: u64, b: u64 },

    #[error("length mismatch: n = {n} but {len} degrees given")]
    LengthMismatch { n: usize, len: usize },

    #[error("action table queried outside its rectangle at Q_{op}(gen {gen})")]
    ActionOutOfRange { op: u32, gen: u64 },

    #[error("action table is missing entry Q_{op}(gen {gen}) inside its declared rectangle")]
    ActionIncomplete { op: u32, gen: u64 },

    #[error(
        "action entry Q_{op}(gen {gen}) -> gen {target} has degree {actual}, expected {expected}"
    )]
    ActionDegree {
        op: u32,
        gen: u64,
        target: u64,
        expected: i64,
        actual: i64,
    },

    #[error("built-in action {name} requires {requirement}")]
    BuiltinMismatch {
        name: &'static str,
        requirement: &'static str,
    },

    #[error("no Adem relation known for Q_{r} Q_{s} over F_{p}")]
    MissingRelation { r: u32, s: u32, p: u32 },

    #[error("no built-in relation table for p = {0}; supply one with a relation file")]
    NoBuiltinRelations(u32),

    #[error("rewriting exceeded its step budget of {0}")]
    RewriteBudget(usize),

    #[error("invalid expression {expr:?}: {reason}")]
    Expression { expr: String, reason: String },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
