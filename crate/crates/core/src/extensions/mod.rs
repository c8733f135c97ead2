//! Central extensions built from explicit integrals: the disk-group
//! 2-cocycle and its group law, the Wess–Zumino term of a sphere map, and
//! the Mickelsson–Faddeev cocycle of the gauge algebra on `S³`.

pub mod disk;
pub mod mf;
pub mod wzw;

pub use disk::{
    associativity_defect, gamma, multiply, random_disk_map, AssociativityDefect, DiskMap,
    ExtensionElement,
};
pub use mf::{
    bracket_chart, gauge_direction, mf_cocycle, mf_identity, random_gauge_data, GaugeData3,
    MfIdentity,
};
pub use wzw::{random_sphere_map, wzw, BallExtension, Profile, SphereMap, BOUNDARY_TOL};

/// Distance from `x` to the nearest integer.
pub fn distance_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}
