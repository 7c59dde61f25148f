#![cfg_attr(not(feature = "std"), no_std)]
extern crate alloc;

pub mod angle;
pub mod centers;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod goldberg;
pub mod kneading;
pub mod measure;
pub mod misiurewicz;
pub mod modp;
pub mod param;
pub mod per;
pub mod poly;
pub mod portrait;
pub mod rays;
pub mod rng;
pub mod unicritical;

pub use error::{Error, Result};
pub use num_complex::Complex64;
