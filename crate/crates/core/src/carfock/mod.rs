//! Truncated CAR algebra: Fourier-mode cutoffs, loop-algebra cocycles,
//! Fock spaces, vacua and Bogoliubov implementers.

pub mod fock;
pub mod modes;

pub use fock::{
    annihilator_kernel_dim, composition_phase, implement, intertwiner_nullity,
    intertwining_residual, vacuum, vacuum_kernel_dim, vacuum_residual, FockSpace, FockState,
    Implementer, Polarization, SectorOperator,
};
pub use modes::{
    cocycle_loop, cocycle_loop_closed_form, cocycle_loop_elements, cocycle_trace_loops,
    hs_criterion, jacobi_check, random_loop, rough_loop, smooth_test_loop, HsReport, LoopElement,
    TruncatedOneParticle,
};
