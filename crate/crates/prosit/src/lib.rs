//! PROSIT: a logic-programming language over situations.
//!
//! Programs assert infons — items of information — into named situations
//! arranged in an ownership tree, relate situations by subtype,
//! subsituation, and subchunk links, and query them with a backtracking
//! solver that answers `yes`, `no`, `yes-and-no`, or `unknown`.

pub mod builtins;
pub mod corpus;
pub mod engine;
pub mod expr;
pub mod reader;
pub mod store;
pub mod terms;

pub use engine::{on_deep_stack, EngineError, Interp, Verdict};
pub use expr::{Expr, Num};
pub use reader::{read_forms, read_one, Form, Mode, ReadError};
pub use store::{Constraint, Direction, SituationId, Store};
pub use terms::{p_unify, v_unify, BindingEnv, EqualityStore};
