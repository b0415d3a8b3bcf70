//! Modularity, Louvain community detection and category aggregation.

mod categories;
mod louvain;
mod modularity;

pub use categories::{category_strengths, first_level_strengths, CategoryStrength};
pub use louvain::{louvain, louvain_best, Partition, DEFAULT_SEED};
pub use modularity::eval_modularity;
