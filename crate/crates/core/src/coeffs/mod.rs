//! Coefficients, accumulated profiles W and R, and endpoint classification.

pub mod endpoint;
pub mod expr;
pub mod invert;
pub mod parse;
pub mod problem;
pub mod profile;

pub use endpoint::{classify_endpoint, EndpointClass, LimitType, Regularity};
pub use expr::{CoefficientExpr, PowerLogTerm, Pt, Tabulated};
pub use invert::{invert_monotone, InvertConfig};
pub use parse::{parse_expr, parse_problem};
pub use problem::{HalfProblem, ProblemSpec, Side};
pub use profile::{ProfileConfig, SideProfile};
