//! Bit frames, Gray-mapped QPSK and the XOR combining used by network coding.
//!
//! Mapping: bit pair `(b0, b1)` goes to `((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`.
//! Demodulation is a hard sign decision per quadrature; a sample exactly on
//! an axis decides bit 0.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::numerics::{Cplx, RngStream};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitFrame {
    bits: Vec<u8>,
}

impl BitFrame {
    /// Builds a frame from 0/1 values. The length must be even.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if !bits.len().is_multiple_of(2) {
            return Err(Error::arg(format!("bit frame length {} is odd", bits.len())));
        }
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::arg(format!("bit value {b} is not 0 or 1")));
        }
        Ok(BitFrame { bits })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        BitFrame::new(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Bits of symbol slot `k`.
    pub fn pair(&self, k: usize) -> (u8, u8) {
        (self.bits[2 * k], self.bits[2 * k + 1])
    }

    /// Number of positions where the frames differ.
    pub fn hamming(&self, other: &BitFrame) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl Index<usize> for BitFrame {
    type Output = u8;
    fn index(&self, i: usize) -> &u8 {
        &self.bits[i]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymbolFrame {
    pub symbols: Vec<Cplx>,
}

impl SymbolFrame {
    pub fn new(symbols: Vec<Cplx>) -> Self {
        SymbolFrame { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn mean_energy(&self) -> f64 {
        if self.symbols.is_empty() {
            return 0.0;
        }
        self.symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.symbols.len() as f64
    }
}

impl From<Vec<Cplx>> for SymbolFrame {
    fn from(symbols: Vec<Cplx>) -> Self {
        SymbolFrame { symbols }
    }
}

pub fn random_bits(rng: &mut RngStream, len: usize) -> Result<BitFrame> {
    if len == 0 || !len.is_multiple_of(2) {
        return Err(Error::arg(format!("frame length must be even and positive, got {len}")));
    }
    let mut bits = Vec::with_capacity(len);
    while bits.len() < len {
        let word = rng.next_u64();
        let take = (len - bits.len()).min(64);
        bits.extend((0..take).map(|i| ((word >> i) & 1) as u8));
    }
    Ok(BitFrame { bits })
}

#[inline]
pub fn qpsk_symbol(b0: u8, b1: u8) -> Cplx {
    Cplx::new(
        (1.0 - 2.0 * f64::from(b0)) * FRAC_1_SQRT_2,
        (1.0 - 2.0 * f64::from(b1)) * FRAC_1_SQRT_2,
    )
}

#[inline]
pub fn qpsk_decide(y: Cplx) -> (u8, u8) {
    (u8::from(y.re < 0.0), u8::from(y.im < 0.0))
}

/// Nearest constellation point, the decode-and-re-encode step of the DF relay.
#[inline]
pub fn qpsk_slice(y: Cplx) -> Cplx {
    let (b0, b1) = qpsk_decide(y);
    qpsk_symbol(b0, b1)
}

pub fn qpsk_mod(bits: &BitFrame) -> SymbolFrame {
    bits.bits
        .chunks_exact(2)
        .map(|p| qpsk_symbol(p[0], p[1]))
        .collect::<Vec<_>>()
        .into()
}

pub fn qpsk_demod(symbols: &SymbolFrame) -> BitFrame {
    qpsk_demod_slice(&symbols.symbols)
}

pub fn qpsk_demod_slice(symbols: &[Cplx]) -> BitFrame {
    let mut bits = Vec::with_capacity(2 * symbols.len());
    for &s in symbols {
        let (b0, b1) = qpsk_decide(s);
        bits.push(b0);
        bits.push(b1);
    }
    BitFrame { bits }
}

pub fn xor_bits(a: &BitFrame, b: &BitFrame) -> Result<BitFrame> {
    if a.len() != b.len() {
        return Err(Error::arg(format!(
            "xor of frames with different lengths ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    Ok(BitFrame {
        bits: a.bits.iter().zip(&b.bits).map(|(x, y)| x ^ y).collect(),
    })
}
