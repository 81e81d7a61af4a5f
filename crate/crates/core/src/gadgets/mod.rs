//! Reduction gadgets: graphs to quadratic, trilinear and tensor systems, the
//! clique tensors, and a numeric feasibility oracle.

mod clique;
mod feasibility;
mod graph;
mod quadratic;
mod tqf;
mod trilinear;

pub use clique::{
    clique_number, clique_tensor, clique_tensor_norm, clique_tensor_spectral_norm,
    clique_warm_start, edge_form_value, max_clique, motzkin_straus_ascent, motzkin_straus_value,
    omega_from_singular_values, project_to_simplex, MAX_EXACT_VERTICES,
};
pub use feasibility::{feasibility_search, Feasibility, SystemRef, Witness};
pub use graph::{Graph, MAX_VERTICES};
pub use quadratic::{
    color_encode, complexify_system, cube_root_of_unity, lift_coloring, pad_system,
    pipeline_witness, threecolor_qf_pipeline, ComplexVector, EdgeForm, QuadraticSystem,
};
pub use tqf::{
    complex_null_vector, complexify_triple, contract_complex, decomplexify_triple,
    tensor_complexify, tqf_residual, tqf_residual_complex, tqf_tensor, tqf_witness, ComplexTriple,
};
pub use trilinear::{
    build_3qf, build_3qf_primed, definite_quadratic_system, numeric_3qf_oracle,
    planted_quadratic_system, qf_via_3qf, QfVerdict, TrilinearSystem,
};
