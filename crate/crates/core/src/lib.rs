pub mod bases;
pub mod cli;
pub mod error;
pub mod func;
pub mod hardy;
pub mod quadrature;
pub mod kernels;
pub mod specfun;
pub mod stats;
pub mod sum;
