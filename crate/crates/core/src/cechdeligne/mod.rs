//! Čech cochains on finite covers, the Bockstein integer and Deligne data.

pub mod cochain;
pub mod cover;
pub mod deligne;
pub mod levels;

pub use cochain::{
    bockstein, check_cocycle, defect, exterior_derivative, log_derivative, multi_indices,
    BocksteinValue, CechCochain, CochainValue, CoefficientKind, FormValue,
};
pub use cover::{Cover, TupleSample};
pub use deligne::{
    demo_cover, demo_gerbe, monopole_demo, verify_deligne, zero_gerbe, DeligneData,
    DeligneResiduals, MonopoleDemo, MonopoleReport,
};
pub use levels::level_gerbe;
