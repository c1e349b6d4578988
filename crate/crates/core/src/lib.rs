//! Link-level simulation of a two-way relay channel in which a two-antenna
//! relay serves two single-antenna terminals.
//!
//! Terminals A and C transmit QPSK simultaneously to relay B (stage one);
//! B forwards according to a [`relay::RelayStrategy`] (stage two) and each
//! terminal recovers its partner's bits. The [`simulator`] sweeps SNR and
//! reports bit error rates; [`cli`] wraps it in a command-line tool writing
//! CSV and a gnuplot script.

pub mod channel;
pub mod cli;
pub mod error;
pub mod modem;
pub mod numerics;
pub mod relay;
pub mod simulator;

pub use error::{Error, Result};
