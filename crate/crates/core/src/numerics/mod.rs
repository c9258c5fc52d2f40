//! Small numerical toolbox: bracketed roots, embedded Runge-Kutta,
//! quadrature, and monotone interpolation.

pub mod interp;
pub mod ode;
pub mod quadrature;
pub mod roots;
