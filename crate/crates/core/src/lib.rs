//! Successive-cancellation decoding of polar codes with an online decoding
//! schedule driven by the sharing factor.
//!
//! ```
//! use polar_sched::schedule::generate_online;
//!
//! let s = generate_online(3).unwrap();
//! let text: Vec<String> = s.entries().map(|e| e.to_string()).collect();
//! assert_eq!(text[..5], ["f1", "f2", "f4", "f8", "g8"]);
//! ```

pub mod channel;
pub mod cli;
pub mod codec;
pub mod dependency;
pub mod error;
pub mod kernels;
pub mod schedule;
pub mod sim;

pub use error::{Error, Result};
