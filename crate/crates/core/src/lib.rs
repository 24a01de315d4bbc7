//! Numerical toolkit for the complex fractional Ginzburg-Landau (CFGL)
//! equation obtained from long-range coupled Hindmarsh-Rose neurons.

pub mod fractional;
pub mod model;
pub mod hr_network;
pub mod solver;
pub mod runner;
