//! Relay-side forwarding and terminal-side decoding for every scheme.
//!
//! All terminals are given exact channel knowledge. Each scheme is a pair:
//! a forwarding function that turns what the relay heard in stage one into
//! per-slot transmit vectors `s_B`, and a decoder that turns what a terminal
//! hears in stage two back into its partner's bits. [`forward`] and
//! [`decode`] dispatch on [`RelayStrategy`].

mod af;
mod alamouti;
mod antenna;
mod df;

use std::fmt;
use std::str::FromStr;

use crate::channel::{ChannelRealization, Terminal};
use crate::error::{Error, Result};
use crate::modem::{qpsk_demod_slice, qpsk_mod, BitFrame};
use crate::numerics::{CVec2, Cplx, ZERO};

pub use af::{af1_decode, af1_gain, af1_relay, af_decode, af_gain, af_relay};
pub use alamouti::{alamouti_decode, alamouti_encode, alamouti_encode_frame, dfnc_alamouti_decode};
pub use antenna::{
    antenna_case, dfant_decode, dfant_relay, dfncant_decode, dfncant_relay, dfncant_weights, AntennaCase,
    Placement, Table1Mode,
};
pub use df::{df_detect, df_detect_frame, dfnc_decode, dfnc_network_symbols, dfnc_relay, dfsm_decode, dfsm_relay};

/// Divisors at or below this magnitude mark a decoded symbol unreliable.
pub const UNRELIABLE_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelayStrategy {
    /// Amplify-and-forward through a single relay antenna (baseline).
    Af1Ant,
    /// Amplify-and-forward of the full two-antenna observation.
    Af,
    /// Detect both symbols, re-encode, one stream per antenna.
    DfSm,
    /// Detect, XOR the bit streams, repeat the coded symbol on both antennas.
    DfNc,
    /// As `DfNc` but the coded stream is Alamouti encoded.
    DfNcAlamouti,
    /// Detect and steer each symbol to the antenna strongest towards its destination.
    DfAnt,
    /// XOR-coded stream sent on whichever antenna(s) the downlink favours.
    DfNcAnt,
}

impl RelayStrategy {
    pub const ALL: [RelayStrategy; 7] = [
        RelayStrategy::Af1Ant,
        RelayStrategy::Af,
        RelayStrategy::DfSm,
        RelayStrategy::DfNc,
        RelayStrategy::DfNcAlamouti,
        RelayStrategy::DfAnt,
        RelayStrategy::DfNcAnt,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn tag(self) -> &'static str {
        match self {
            RelayStrategy::Af1Ant => "af1",
            RelayStrategy::Af => "af",
            RelayStrategy::DfSm => "df-sm",
            RelayStrategy::DfNc => "df-nc",
            RelayStrategy::DfNcAlamouti => "df-nc-alamouti",
            RelayStrategy::DfAnt => "df-ant",
            RelayStrategy::DfNcAnt => "df-nc-ant",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RelayStrategy::Af1Ant => "AF (1 antenna)",
            RelayStrategy::Af => "AF",
            RelayStrategy::DfSm => "DF-SM",
            RelayStrategy::DfNc => "DF-NC",
            RelayStrategy::DfNcAlamouti => "DF-NC-Alamouti",
            RelayStrategy::DfAnt => "DF-ANT",
            RelayStrategy::DfNcAnt => "DF-NC-ANT",
        }
    }

    /// Whether the relay needs to know its downlink channels.
    pub fn uses_downlink_csi(self) -> bool {
        matches!(self, RelayStrategy::DfAnt | RelayStrategy::DfNcAnt)
    }
}

impl fmt::Display for RelayStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for RelayStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelayStrategy::ALL
            .into_iter()
            .find(|r| r.tag() == s)
            .ok_or_else(|| Error::arg(format!("unknown scheme '{s}'")))
    }
}

/// Side data a genie decoder reads off the relay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SideData {
    None,
    /// AF power normalization `alpha_B`.
    AfGain(f64),
    /// Antenna-selection case chosen by the relay.
    Case(AntennaCase),
}

/// Stage-two transmit vectors, one per channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayTransmission {
    pub slots: Vec<CVec2>,
    pub side: SideData,
}

impl RelayTransmission {
    pub fn new(slots: Vec<CVec2>, side: SideData) -> Self {
        RelayTransmission { slots, side }
    }

    /// Total transmit energy summed over slots.
    pub fn energy(&self) -> f64 {
        self.slots.iter().map(CVec2::norm_sqr).sum()
    }

    /// Mean `||s_B||^2` per channel use.
    pub fn mean_energy(&self) -> f64 {
        if self.slots.is_empty() {
            0.0
        } else {
            self.energy() / self.slots.len() as f64
        }
    }
}

/// A decoded soft symbol and whether its equalizer gain was usable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Cplx,
    pub reliable: bool,
}

/// `numerator / gain`, flagged when `|gain|` is too small to trust.
///
/// The value stays finite: an exactly zero (or overflowing) division
/// yields 0, which the demodulator turns into bits like any other sample.
pub(crate) fn equalize(numerator: Cplx, gain: Cplx) -> Estimate {
    let reliable = gain.norm() > UNRELIABLE_GAIN;
    let q = numerator / gain;
    Estimate {
        value: if q.is_finite() { q } else { ZERO },
        reliable,
    }
}

/// Removes the terminal's own known contribution and equalizes the partner's.
pub(crate) fn cancel_and_equalize(y: Cplx, own_gain: Cplx, own: Cplx, partner_gain: Cplx) -> Estimate {
    equalize(y - own_gain * own, partner_gain)
}

/// Runs the relay side of `strategy` over a frame of stage-one observations.
///
/// `y_b` holds one relay observation per symbol slot. Antenna-selection
/// schemes read the downlink rows of `ch`; the others only use the uplink.
pub fn forward(
    strategy: RelayStrategy,
    ch: &ChannelRealization,
    y_b: &[CVec2],
    noise_var: f64,
    mode: Table1Mode,
) -> Result<RelayTransmission> {
    match strategy {
        RelayStrategy::Af1Ant => af1_relay(y_b, ch, noise_var),
        RelayStrategy::Af => af_relay(y_b, ch, noise_var),
        RelayStrategy::DfSm => {
            let (xa, xc) = df_detect_frame(y_b, ch, noise_var)?;
            Ok(dfsm_relay(&xa, &xc))
        }
        RelayStrategy::DfNc => {
            let (ba, bc) = detected_bits(y_b, ch, noise_var)?;
            dfnc_relay(&ba, &bc)
        }
        RelayStrategy::DfNcAlamouti => {
            let (ba, bc) = detected_bits(y_b, ch, noise_var)?;
            alamouti_encode_frame(&dfnc_network_symbols(&ba, &bc)?)
        }
        RelayStrategy::DfAnt => {
            let (xa, xc) = df_detect_frame(y_b, ch, noise_var)?;
            Ok(dfant_relay(&xa, &xc, antenna_case(ch), mode))
        }
        RelayStrategy::DfNcAnt => {
            let (ba, bc) = detected_bits(y_b, ch, noise_var)?;
            let xb = dfnc_network_symbols(&ba, &bc)?;
            Ok(dfncant_relay(&xb.symbols, antenna_case(ch)))
        }
    }
}

fn detected_bits(y_b: &[CVec2], ch: &ChannelRealization, noise_var: f64) -> Result<(BitFrame, BitFrame)> {
    let (xa, xc) = df_detect_frame(y_b, ch, noise_var)?;
    Ok((qpsk_demod_slice(&xa), qpsk_demod_slice(&xc)))
}

/// Terminal side: recovers the partner's bits from the stage-two samples
/// `y` heard at `terminal`, given the terminal's own transmitted bits.
pub fn decode(
    strategy: RelayStrategy,
    terminal: Terminal,
    ch: &ChannelRealization,
    side: SideData,
    y: &[Cplx],
    own_bits: &BitFrame,
    mode: Table1Mode,
) -> Result<BitFrame> {
    let symbolwise = |f: &dyn Fn(Cplx, Cplx) -> Estimate| -> BitFrame {
        let own = qpsk_mod(own_bits);
        let est: Vec<Cplx> = y
            .iter()
            .zip(&own.symbols)
            .map(|(&yk, &ok)| f(yk, ok).value)
            .collect();
        qpsk_demod_slice(&est)
    };
    let gain = |side: SideData| match side {
        SideData::AfGain(a) => Ok(a),
        other => Err(Error::arg(format!("AF decoding needs the relay gain, got {other:?}"))),
    };
    match strategy {
        RelayStrategy::Af1Ant => {
            let alpha = gain(side)?;
            Ok(symbolwise(&|yk, ok| af1_decode(yk, ch, ok, alpha, terminal)))
        }
        RelayStrategy::Af => {
            let alpha = gain(side)?;
            Ok(symbolwise(&|yk, ok| af_decode(yk, ch, ok, alpha, terminal)))
        }
        RelayStrategy::DfSm => Ok(symbolwise(&|yk, ok| dfsm_decode(yk, ch, ok, terminal))),
        RelayStrategy::DfNc => dfnc_decode(y, ch, own_bits, terminal),
        RelayStrategy::DfNcAlamouti => dfnc_alamouti_decode(y, &ch.downlink(terminal), own_bits),
        RelayStrategy::DfAnt => {
            let case = antenna_case(ch);
            Ok(symbolwise(&|yk, ok| dfant_decode(yk, ch, ok, case, mode, terminal)))
        }
        RelayStrategy::DfNcAnt => dfncant_decode(y, ch, own_bits, antenna_case(ch), terminal),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_channel, uplink_receive};
    use crate::modem::random_bits;
    use crate::numerics::RngStream;

    #[test]
    fn tags_round_trip() {
        for s in RelayStrategy::ALL {
            assert_eq!(s.tag().parse::<RelayStrategy>().unwrap(), s);
        }
        assert!("df_nc".parse::<RelayStrategy>().is_err());
    }

    #[test]
    fn only_selection_schemes_need_downlink_csi() {
        let csi: Vec<_> = RelayStrategy::ALL.into_iter().filter(|s| s.uses_downlink_csi()).collect();
        assert_eq!(csi, vec![RelayStrategy::DfAnt, RelayStrategy::DfNcAnt]);
    }

    #[test]
    fn equalize_flags_vanishing_gain() {
        let e = equalize(Cplx::new(1.0, 0.0), ZERO);
        assert!(!e.reliable);
        assert_eq!(e.value, ZERO);
        let e = equalize(Cplx::new(1.0, 0.0), Cplx::new(1e-13, 0.0));
        assert!(!e.reliable && e.value.is_finite());
        assert!(equalize(Cplx::new(1.0, 0.0), Cplx::new(0.5, 0.0)).reliable);
    }

    // Every strategy, both text and literal placement, noiseless on both hops.
    #[test]
    fn dispatch_is_total_and_noiseless_chain_is_exact() {
        let mut rng = RngStream::new(99, 0);
        for mode in [Table1Mode::TextRule, Table1Mode::Literal] {
            for strategy in RelayStrategy::ALL {
                for _ in 0..50 {
                    let ch = draw_channel(&mut rng);
                    let ba = random_bits(&mut rng, 16).unwrap();
                    let bc = random_bits(&mut rng, 16).unwrap();
                    let (xa, xc) = (qpsk_mod(&ba), qpsk_mod(&bc));
                    let y_b: Vec<CVec2> = xa
                        .symbols
                        .iter()
                        .zip(&xc.symbols)
                        .map(|(&a, &c)| uplink_receive(&ch, a, c, 0.0, &mut rng).unwrap())
                        .collect();
                    let tx = forward(strategy, &ch, &y_b, 0.0, mode).unwrap();
                    assert_eq!(tx.slots.len(), 8);
                    let y_a: Vec<Cplx> = tx.slots.iter().map(|s| ch.h_ba().dot(s)).collect();
                    let y_c: Vec<Cplx> = tx.slots.iter().map(|s| ch.h_bc().dot(s)).collect();
                    let at_a = decode(strategy, Terminal::A, &ch, tx.side, &y_a, &ba, mode).unwrap();
                    let at_c = decode(strategy, Terminal::C, &ch, tx.side, &y_c, &bc, mode).unwrap();
                    assert_eq!(at_a, bc, "{strategy} at A");
                    assert_eq!(at_c, ba, "{strategy} at C");
                }
            }
        }
    }

    #[test]
    fn af_decode_requires_gain() {
        let ch = draw_channel(&mut RngStream::new(1, 1));
        let bits = BitFrame::zeros(2).unwrap();
        let r = decode(RelayStrategy::Af, Terminal::A, &ch, SideData::None, &[ZERO], &bits, Table1Mode::TextRule);
        assert!(r.is_err());
    }
}
