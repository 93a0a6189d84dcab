//! Exact integer linear algebra: sparse matrices, Smith normal form,
//! homology of graded complexes, Laurent polynomials.

mod complex;
mod laurent;
mod matrix;
mod rank;
mod reduce;
mod snf;

pub use complex::{d_squared_violation, graded_homology, BigradedComplex, HomologyGroup, HomologyTable};
pub use laurent::LaurentPoly;
pub use matrix::SparseIntMatrix;
pub use rank::rank_q;
pub use reduce::{Coeff, Reducer};
pub use snf::{smith_normal_form, Snf};
