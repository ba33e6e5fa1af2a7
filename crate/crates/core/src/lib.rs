//! Coverage, harvested energy and power-split optimisation for SWIPT
//! receivers that apply successive interference cancellation (SIC) in a
//! bipolar Poisson ad hoc network.

pub mod analytic;
pub mod cli;
pub mod model;
pub mod optimizer;
pub mod simulator;
pub mod specfun;
