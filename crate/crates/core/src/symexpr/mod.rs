//! Symbolic expressions over the jet coordinates `(t, x^i, y_1^i)`.

mod coord;
mod diff;
mod expr;
mod num;
mod parse;
mod print;
mod simplify;
mod tape;

pub use coord::{Coord, Point, MAX_INDEX};
pub use diff::clear_diff_cache;
pub use expr::{Expr, Func, Node};
pub use num::Num;
pub use parse::{parse_expr, ParseError};
pub use tape::{EvalError, Tape};
