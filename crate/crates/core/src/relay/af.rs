//! Amplify-and-forward (analog network coding).

use crate::channel::{ChannelRealization, Terminal};
use crate::error::{Error, Result};
use crate::numerics::CVec2;
use crate::numerics::Cplx;

use super::{cancel_and_equalize, Estimate, RelayTransmission, SideData};

/// `alpha_B = 1 / sqrt(||h_AB||^2 + ||h_CB||^2 + 2 sigma^2)`; the `2 sigma^2`
/// counts the noise of both relay antennas.
pub fn af_gain(ch: &ChannelRealization, noise_var: f64) -> Result<f64> {
    normalize(ch.h_ab.norm_sqr() + ch.h_cb.norm_sqr() + 2.0 * noise_var)
}

/// Single-antenna relay: only the first coefficient of each link is used.
pub fn af1_gain(ch: &ChannelRealization, noise_var: f64) -> Result<f64> {
    normalize(ch.h_ab.e1.norm_sqr() + ch.h_cb.e1.norm_sqr() + noise_var)
}

fn normalize(expected_power: f64) -> Result<f64> {
    if expected_power > 0.0 && expected_power.is_finite() {
        Ok(expected_power.sqrt().recip())
    } else {
        Err(Error::DegenerateChannel("AF normalization has zero expected receive power"))
    }
}

/// `s_B = alpha_B y_B` for every slot.
pub fn af_relay(y_b: &[CVec2], ch: &ChannelRealization, noise_var: f64) -> Result<RelayTransmission> {
    let alpha = af_gain(ch, noise_var)?;
    let slots = y_b.iter().map(|y| y.scale_real(alpha)).collect();
    Ok(RelayTransmission::new(slots, SideData::AfGain(alpha)))
}

/// Amplifies what the first antenna heard and transmits it from that antenna.
pub fn af1_relay(y_b: &[CVec2], ch: &ChannelRealization, noise_var: f64) -> Result<RelayTransmission> {
    let alpha = af1_gain(ch, noise_var)?;
    let slots = y_b
        .iter()
        .map(|y| CVec2::new(y.e1 * alpha, Cplx::new(0.0, 0.0)))
        .collect();
    Ok(RelayTransmission::new(slots, SideData::AfGain(alpha)))
}

/// Terminal `side` strips its own back-propagated signal and equalizes the
/// partner's composite gain, e.g. at A:
/// `(y_A / alpha - (h_BA h_AB) x_A) / (h_BA h_CB)`.
pub fn af_decode(y: Cplx, ch: &ChannelRealization, own_x: Cplx, alpha: f64, side: Terminal) -> Estimate {
    let row = ch.downlink(side);
    let own_gain = row.dot(&ch.uplink(side));
    let partner_gain = row.dot(&ch.uplink(side.partner()));
    cancel_and_equalize(y / alpha, own_gain, own_x, partner_gain)
}

pub fn af1_decode(y: Cplx, ch: &ChannelRealization, own_x: Cplx, alpha: f64, side: Terminal) -> Estimate {
    let h_own = ch.uplink(side).e1;
    let h_partner = ch.uplink(side.partner()).e1;
    cancel_and_equalize(y / alpha, h_own * h_own, own_x, h_own * h_partner)
}
