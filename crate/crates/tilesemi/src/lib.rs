pub mod arith;
pub mod geometry;
pub mod limit;
pub mod paths;
pub mod selfsim;
pub mod semigroup;
pub mod substitution;
