//! Floating-point kernel for q-arithmetic, q-special functions, the
//! q-difference operator, and Jackson/Fermat q-integration.

pub mod arith;
pub mod calculus;

pub use arith::{
    q_binomial, q_exponential, q_factorial, q_multinomial, q_number, q_shifted_factorial,
    PochhammerOrder, QBase,
};
pub use calculus::{q_derivative, q_integrate, q_integrate_nested, Limit, NestedRegion};
