//! Decode-and-forward: MMSE detection at the relay, then spatial
//! multiplexing or XOR network coding of the detected streams.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::channel::{ChannelRealization, Terminal};
use crate::error::{Error, Result};
use crate::modem::{qpsk_demod_slice, qpsk_mod, qpsk_slice, xor_bits, BitFrame, SymbolFrame};
use crate::numerics::{mat2_mmse_solve, CVec2, Cplx};

use super::{cancel_and_equalize, equalize, Estimate, RelayTransmission, SideData};

/// MMSE estimate of `(x_A, x_C)` with regularizer `sigma^2`, sliced to the
/// nearest QPSK points.
pub fn df_detect(y_b: &CVec2, ch: &ChannelRealization, noise_var: f64) -> Result<(Cplx, Cplx)> {
    let est = mat2_mmse_solve(&ch.uplink_matrix(), y_b, noise_var)?;
    Ok((qpsk_slice(est.e1), qpsk_slice(est.e2)))
}

pub fn df_detect_frame(
    y_b: &[CVec2],
    ch: &ChannelRealization,
    noise_var: f64,
) -> Result<(Vec<Cplx>, Vec<Cplx>)> {
    let mut xa = Vec::with_capacity(y_b.len());
    let mut xc = Vec::with_capacity(y_b.len());
    for y in y_b {
        let (a, c) = df_detect(y, ch, noise_var)?;
        xa.push(a);
        xc.push(c);
    }
    Ok((xa, xc))
}

/// Antenna 1 carries the re-encoded A stream, antenna 2 the C stream, each
/// at half power.
pub fn dfsm_relay(x_a: &[Cplx], x_c: &[Cplx]) -> RelayTransmission {
    let slots = x_a
        .iter()
        .zip(x_c)
        .map(|(&a, &c)| CVec2::new(a, c).scale_real(FRAC_1_SQRT_2))
        .collect();
    RelayTransmission::new(slots, SideData::None)
}

/// Cancels the terminal's own symbol with its true value; if the relay
/// mis-detected it, the residual stays in the equalized sample.
pub fn dfsm_decode(y: Cplx, ch: &ChannelRealization, own_x: Cplx, side: Terminal) -> Estimate {
    let row = ch.downlink(side);
    // x_A rides antenna 1, x_C antenna 2
    let (own_gain, partner_gain) = match side {
        Terminal::A => (row.e1, row.e2),
        Terminal::C => (row.e2, row.e1),
    };
    cancel_and_equalize(y, own_gain * FRAC_1_SQRT_2, own_x, partner_gain * FRAC_1_SQRT_2)
}

/// `x_B = mod(b_A xor b_C)`.
pub fn dfnc_network_symbols(b_a: &BitFrame, b_c: &BitFrame) -> Result<SymbolFrame> {
    Ok(qpsk_mod(&xor_bits(b_a, b_c)?))
}

/// The network-coded symbol on both antennas, `(x_B, x_B) / sqrt(2)`.
pub fn dfnc_relay(b_a: &BitFrame, b_c: &BitFrame) -> Result<RelayTransmission> {
    let xb = dfnc_network_symbols(b_a, b_c)?;
    let slots = xb
        .symbols
        .iter()
        .map(|&x| CVec2::new(x, x).scale_real(FRAC_1_SQRT_2))
        .collect();
    Ok(RelayTransmission::new(slots, SideData::None))
}

/// Equalizes by `(h_1 + h_2) / sqrt(2)`, demodulates `x_B` and XORs out the
/// terminal's own bits.
pub fn dfnc_decode(y: &[Cplx], ch: &ChannelRealization, own_bits: &BitFrame, side: Terminal) -> Result<BitFrame> {
    let row = ch.downlink(side);
    let gain = (row.e1 + row.e2) * FRAC_1_SQRT_2;
    equalize_xor(y, gain, own_bits)
}

pub(crate) fn equalize_xor(y: &[Cplx], gain: Cplx, own_bits: &BitFrame) -> Result<BitFrame> {
    if 2 * y.len() != own_bits.len() {
        return Err(Error::arg(format!(
            "{} received symbols for a {}-bit frame",
            y.len(),
            own_bits.len()
        )));
    }
    let xb: Vec<Cplx> = y.iter().map(|&s| equalize(s, gain).value).collect();
    xor_bits(&qpsk_demod_slice(&xb), own_bits)
}
