//! Parser, model-file format and command runner behind the `superstar` binary.

pub mod app;
pub mod expr;
pub mod model_file;

pub use app::run;
pub use expr::{parse_expression, ExprError, ExprParser};
pub use model_file::{parse_model_file, parse_model_str, serialize_model, ModelFileError};
