//! Ordinal arithmetic below `w^w`, quotient colorings of pairs, Ramsey
//! witness graphs, and the lower- and upper-bound machinery for closed
//! ordinal Ramsey numbers `R^cl(w+n, 3)`.

pub mod bounds;
pub mod coloring;
pub mod lower;
pub mod ordinal;
pub mod ramsey;
pub mod upper;
