//! Finitely generated groups, their normal forms and word-metric balls.

mod ball;
mod element;
mod family;
mod model;

pub use ball::{enumerate_ball, enumerate_ball_with_budget, growth_function, BallIndex, DEFAULT_BUDGET};
pub use element::{Element, Letter};
pub use family::Family;
pub use model::{Cursor, GroupModel, ModelId, MAX_GENERATORS};

pub(crate) use element::Word;
pub(crate) use model::TopLevel;
