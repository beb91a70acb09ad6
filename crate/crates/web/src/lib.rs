//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export takes plain numbers or strings and returns a JSON string, so
//! the page needs no generated TypeScript types. The same functions are
//! callable natively through [`api`], which is what the tests exercise.

use wasm_bindgen::prelude::*;

pub mod api {
    use dl_core::dyer_lashof::{OperationWord, RelationTable};
    use dl_core::fp::Prime;
    use dl_core::module::{coefficient_table, ModuleSpec};
    use dl_core::schema::{SolveDoc, TableDoc};
    use dl_core::solver::solve_product_table;
    use serde_json::json;

    // keeps a mistyped bound from freezing the tab
    pub const MAX_TABLE_SIDE: u32 = 256;
    pub const MAX_SOLVE_DEGREE: i64 = 64;

    fn to_json<T: serde::Serialize>(v: &T) -> String {
        serde_json::to_string(v).expect("documents serialise")
    }

    /// Coefficient table of `Q_op(x_gen)` on the circle module.
    pub fn action_table(max_op: u32, max_gen: u32) -> Result<String, String> {
        if max_op > MAX_TABLE_SIDE || max_gen > MAX_TABLE_SIDE {
            return Err(format!("table sides are limited to {MAX_TABLE_SIDE}"));
        }
        let m = ModuleSpec::s1_p2();
        let cells = coefficient_table(&m, max_op, max_gen as u64).map_err(|e| e.to_string())?;
        Ok(to_json(&TableDoc::new(
            m.prime(),
            max_op,
            max_gen as u64,
            &cells,
        )))
    }

    /// Admissible form of a word such as `"3,5"`, together with its value on
    /// `x_gen`.
    pub fn rewrite(word: &str, gen: u32) -> Result<String, String> {
        let w = OperationWord::parse(Prime::TWO, word).map_err(|e| e.to_string())?;
        let sum = RelationTable::classical_mod2()
            .rewrite(&w)
            .map_err(|e| e.to_string())?;
        let m = ModuleSpec::s1_p2();
        let x = m.generator(gen as u64).map_err(|e| e.to_string())?;
        let value = m.apply_word(&w, &x).map_err(|e| e.to_string())?;
        Ok(to_json(&json!({
            "word": w.to_string(),
            "admissible": sum.to_string(),
            "terms": sum.terms().map(|(w, _)| w.indices().to_vec()).collect::<Vec<_>>(),
            "value": value.to_string(),
        })))
    }

    /// Product tables on the circle compatible with the Cartan formula.
    pub fn solve(max_degree: i32) -> Result<String, String> {
        let max_degree = i64::from(max_degree);
        if !(0..=MAX_SOLVE_DEGREE).contains(&max_degree) {
            return Err(format!("max degree must lie in 0..={MAX_SOLVE_DEGREE}"));
        }
        let outcome =
            solve_product_table(&ModuleSpec::s1_p2(), max_degree).map_err(|e| e.to_string())?;
        Ok(to_json(&SolveDoc::from_outcome(&outcome)))
    }
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = actionTable)]
pub fn action_table(max_op: u32, max_gen: u32) -> Result<String, JsError> {
    js(api::action_table(max_op, max_gen))
}

#[wasm_bindgen]
pub fn rewrite(word: &str, gen: u32) -> Result<String, JsError> {
    js(api::rewrite(word, gen))
}

#[wasm_bindgen]
pub fn solve(max_degree: i32) -> Result<String, JsError> {
    js(api::solve(max_degree))
}
