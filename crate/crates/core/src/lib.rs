//! Buildings as edge-colored chamber graphs, together with the machinery
//! around them: Coxeter systems and word reduction, building constructions
//! (Cayley, graph-product, flag), Tits and Davis realizations with simplicial
//! homology, piecewise-euclidean intrinsic metrics, and group actions with
//! transitivity and properness checks.

pub mod actions;
pub mod building;
pub mod cli;
pub mod constructions;
pub mod coxeter;
pub mod metric;
pub mod realizations;


pub use building::{Building, Gallery};
pub use coxeter::{CoxeterMatrix, CoxeterSystem, Word};
pub use realizations::SimplicialComplex;
