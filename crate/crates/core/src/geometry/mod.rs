//! Charts, numerical derivatives, trace-word forms and tensor quadrature.

pub mod chart;
pub mod charts;
pub mod forms;
pub mod quadrature;

pub use chart::{Chart, JacobianMode, OneFormField, DEFAULT_STEP};
pub use forms::{
    eval_form, form_density, integrate_form, integrate_form_value, FieldKind, FieldRef,
    FormIntegral, FormWord,
};
pub use quadrature::{QuadratureRule, QuadratureSpec, TensorGrid};
