//! Scalar field expressions over model coordinates.
//!
//! ```
//! use cr_mobius::expr::FieldExpr;
//! let e: FieldExpr = "-log(abs2(z1*(2+1i) + 1))/2".parse().unwrap();
//! assert_eq!(e.to_string().parse::<FieldExpr>().unwrap(), e);
//! ```

mod ast;
mod eval;
mod parser;
mod printer;

pub use ast::{Coord, FieldExpr, Func, HolomorphicExpr};
pub use eval::{eval_field, EvalError};
pub use parser::{parse_field_expr, ParseError};
