//! Structure pools, context enumeration and parse-tree generators.

mod contexts;
mod pool;
mod system;
mod trees;

pub use contexts::{enum_contexts, enum_contexts_capped, ContextSet, DEFAULT_CONTEXT_CAP};
pub use pool::{build_pool, class_pool, enum_graphs, PoolKind, StructurePool};
pub use system::{BaseStructure, InductiveSystem};
pub use trees::{
    count_parse_trees, exhaustive_parse_trees, feasible_tree_size, gen_parse_tree, gen_parse_tree_with,
    trees_of_size,
};
