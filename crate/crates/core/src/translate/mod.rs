//! Translation into second-order logic over distributions, and exact
//! evaluation of function-quantifier-free second-order formulas.

pub mod ast;
pub mod eval;
pub mod parse;
pub mod to_so;

pub use ast::{NumTerm, SoFormula};
pub use eval::{eval_so, team_to_table, FunctionTable, Tables};
pub use parse::parse_so;
pub use to_so::{
    normalize_indep, translate_so, translate_so_over, IndepShape, Translation, TEAM_FUNCTION,
};
