//! Two-antenna Alamouti code over pairs of network-coded symbols.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::error::{Error, Result};
use crate::modem::{BitFrame, SymbolFrame};
use crate::numerics::{CVec2, Cplx, ZERO};

use super::df::equalize_xor;
use super::{Estimate, RelayTransmission, SideData, UNRELIABLE_GAIN};

/// Slot `t` sends `(s1, s2) / sqrt(2)`, slot `t+1` sends `(-s2*, s1*) / sqrt(2)`.
pub fn alamouti_encode(pair: (Cplx, Cplx)) -> RelayTransmission {
    RelayTransmission::new(codeword(pair).to_vec(), SideData::None)
}

fn codeword((s1, s2): (Cplx, Cplx)) -> [CVec2; 2] {
    [
        CVec2::new(s1, s2).scale_real(FRAC_1_SQRT_2),
        CVec2::new(-s2.conj(), s1.conj()).scale_real(FRAC_1_SQRT_2),
    ]
}

/// Encodes consecutive symbol pairs; the frame must hold an even number of symbols.
pub fn alamouti_encode_frame(symbols: &SymbolFrame) -> Result<RelayTransmission> {
    if !symbols.len().is_multiple_of(2) {
        return Err(Error::arg(format!(
            "Alamouti needs an even symbol count, got {}",
            symbols.len()
        )));
    }
    let slots = symbols
        .symbols
        .chunks_exact(2)
        .flat_map(|p| codeword((p[0], p[1])))
        .collect();
    Ok(RelayTransmission::new(slots, SideData::None))
}

/// Linear combining for a single receive antenna with the `1/sqrt(2)`
/// transmit scaling undone.
pub fn alamouti_decode(y_pair: (Cplx, Cplx), h_row: &CVec2) -> (Estimate, Estimate) {
    let (y1, y2) = y_pair;
    let (h1, h2) = (h_row.e1, h_row.e2);
    let energy = h_row.norm_sqr();
    let reliable = energy > UNRELIABLE_GAIN * UNRELIABLE_GAIN;
    let finish = |z: Cplx| {
        let v = z * SQRT_2 / energy;
        Estimate {
            value: if v.is_finite() { v } else { ZERO },
            reliable,
        }
    };
    (
        finish(h1.conj() * y1 + h2 * y2.conj()),
        finish(h2.conj() * y1 - h1 * y2.conj()),
    )
}

/// Combines each received pair, demodulates `x_B` and XORs out `own_bits`.
pub fn dfnc_alamouti_decode(y: &[Cplx], h_row: &CVec2, own_bits: &BitFrame) -> Result<BitFrame> {
    if !y.len().is_multiple_of(2) {
        return Err(Error::arg("Alamouti decoding needs an even number of samples"));
    }
    let combined: Vec<Cplx> = y
        .chunks_exact(2)
        .flat_map(|p| {
            let (a, b) = alamouti_decode((p[0], p[1]), h_row);
            [a.value, b.value]
        })
        .collect();
    // combined samples are already unit gain
    equalize_xor(&combined, Cplx::new(1.0, 0.0), own_bits)
}
