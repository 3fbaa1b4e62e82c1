//! Exact integral simplicial homology.

mod complex;
mod io;
mod modular;
mod morse;
mod pi1;
mod reduce;
mod smith;
mod sparse;

pub use complex::{faces, flag_complex, ChainComplex, Simplex, SparseMatrix};
pub use io::{betti_csv, dump_matrix, BettiRow};
pub use pi1::{pi1_report, Pi1Report};
pub use reduce::{
    homology, homology_with_report, is_k_acyclic, max_degree, reduced_homology, Acyclicity,
    DegreeHomology, HomologyResult, ReductionReport,
};
pub use smith::{mat_mul, smith_certified, smith_normal_form, smith_normal_form_big, CertifiedSmith, SmithForm};
pub use sparse::{invariant_factors, sparse_invariant_factors, SPARSE_THRESHOLD};
