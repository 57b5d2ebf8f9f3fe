//! Spectral analysis, stability certificates, simulation and feedback design
//! for polynomial dynamical systems on uniform and non-uniform hypergraphs.
//!
//! A `k`-uniform hypergraph system is `x' = A x^{k-1}` with `A` an order-`k`
//! cubical tensor. When `A` is Metzler and irreducible, the sign of its
//! Perron-H-eigenvalue decides between global convergence to the origin and
//! finite-time blowup.
//!
//! ```
//! use hypermetzler::tensor::uniform_tensor;
//! use hypermetzler::spectral::{perron_metzler, PowerConfig};
//!
//! let a = uniform_tensor(4, 4, 1.0, -64.0).unwrap();
//! let pair = perron_metzler(&a, &PowerConfig::default()).unwrap();
//! assert!((pair.value + 1.0).abs() < 1e-8);
//! ```

pub mod control;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod solve;
pub mod spectral;
pub mod stability;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::CubicalTensor;
