//! Antenna selection at the relay when it knows which of its antennas is
//! stronger towards each terminal.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::channel::{ChannelRealization, Terminal};
use crate::error::Result;
use crate::modem::BitFrame;
use crate::numerics::{CVec2, Cplx, ONE, ZERO};

use super::df::equalize_xor;
use super::{cancel_and_equalize, Estimate, RelayTransmission, SideData};

/// Which relay antenna each terminal prefers.
///
/// Case numbers follow the row order of the selection tables: 1 both
/// prefer antenna 1, 2 both prefer antenna 2, 3 A prefers 1 and C prefers
/// 2, 4 A prefers 2 and C prefers 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AntennaCase {
    BothFirst,
    BothSecond,
    AFirstCSecond,
    ASecondCFirst,
}

impl AntennaCase {
    pub const ALL: [AntennaCase; 4] = [
        AntennaCase::BothFirst,
        AntennaCase::BothSecond,
        AntennaCase::AFirstCSecond,
        AntennaCase::ASecondCFirst,
    ];

    /// 1-based table row.
    pub fn index(self) -> u8 {
        match self {
            AntennaCase::BothFirst => 1,
            AntennaCase::BothSecond => 2,
            AntennaCase::AFirstCSecond => 3,
            AntennaCase::ASecondCFirst => 4,
        }
    }

    /// Zero-based antenna preferred by `t`.
    pub fn preferred(self, t: Terminal) -> usize {
        match (self, t) {
            (AntennaCase::BothFirst, _) => 0,
            (AntennaCase::BothSecond, _) => 1,
            (AntennaCase::AFirstCSecond, Terminal::A) | (AntennaCase::ASecondCFirst, Terminal::C) => 0,
            (AntennaCase::AFirstCSecond, Terminal::C) | (AntennaCase::ASecondCFirst, Terminal::A) => 1,
        }
    }

    pub fn is_shared(self) -> bool {
        matches!(self, AntennaCase::BothFirst | AntennaCase::BothSecond)
    }
}

/// How DF-ANT places the two symbols when the terminals prefer different
/// antennas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Table1Mode {
    /// `x_C` goes out on the antenna strongest towards A and `x_A` on the one
    /// strongest towards C.
    #[default]
    TextRule,
    /// The opposite assignment in the split cases, as printed in the
    /// selection table.
    Literal,
}

/// Zero-based antennas carrying the detected `x_A` and `x_C` symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub x_a_antenna: usize,
    pub x_c_antenna: usize,
}

impl Placement {
    pub fn for_case(case: AntennaCase, mode: Table1Mode) -> Self {
        // x_A is destined for C, so it follows C's preference
        let text = Placement {
            x_a_antenna: case.preferred(Terminal::C),
            x_c_antenna: case.preferred(Terminal::A),
        };
        match mode {
            Table1Mode::TextRule => text,
            Table1Mode::Literal if case.is_shared() => text,
            Table1Mode::Literal => Placement {
                x_a_antenna: text.x_c_antenna,
                x_c_antenna: text.x_a_antenna,
            },
        }
    }

    fn antenna_of(&self, t: Terminal) -> usize {
        match t {
            Terminal::A => self.x_a_antenna,
            Terminal::C => self.x_c_antenna,
        }
    }
}

/// Compares `|h_BA(i)|` and `|h_BC(i)|`; ties go to antenna 1.
pub fn antenna_case(ch: &ChannelRealization) -> AntennaCase {
    let prefers_first = |row: CVec2| row.e1.norm() >= row.e2.norm();
    match (prefers_first(ch.h_ba()), prefers_first(ch.h_bc())) {
        (true, true) => AntennaCase::BothFirst,
        (false, false) => AntennaCase::BothSecond,
        (true, false) => AntennaCase::AFirstCSecond,
        (false, true) => AntennaCase::ASecondCFirst,
    }
}

fn unit(antenna: usize) -> CVec2 {
    if antenna == 0 {
        CVec2::new(ONE, ZERO)
    } else {
        CVec2::new(ZERO, ONE)
    }
}

/// Each detected symbol at amplitude `1/sqrt(2)` on its placed antenna. In
/// the shared cases both land on one antenna and superpose.
pub fn dfant_relay(x_a: &[Cplx], x_c: &[Cplx], case: AntennaCase, mode: Table1Mode) -> RelayTransmission {
    let p = Placement::for_case(case, mode);
    let (ua, uc) = (unit(p.x_a_antenna), unit(p.x_c_antenna));
    let slots = x_a
        .iter()
        .zip(x_c)
        .map(|(&a, &c)| (ua.scale(a) + uc.scale(c)).scale_real(FRAC_1_SQRT_2))
        .collect();
    RelayTransmission::new(slots, SideData::Case(case))
}

/// Cancels the known own-symbol term on its antenna, then divides by the
/// coefficient of the antenna carrying the partner's symbol.
pub fn dfant_decode(
    y: Cplx,
    ch: &ChannelRealization,
    own_x: Cplx,
    case: AntennaCase,
    mode: Table1Mode,
    side: Terminal,
) -> Estimate {
    let p = Placement::for_case(case, mode);
    let row = ch.downlink(side);
    let own_gain = row.get(p.antenna_of(side)) * FRAC_1_SQRT_2;
    let partner_gain = row.get(p.antenna_of(side.partner())) * FRAC_1_SQRT_2;
    cancel_and_equalize(y, own_gain, own_x, partner_gain)
}

/// Beamforming weights for the network-coded symbol.
pub fn dfncant_weights(case: AntennaCase) -> CVec2 {
    match case {
        AntennaCase::BothFirst => unit(0),
        AntennaCase::BothSecond => unit(1),
        AntennaCase::AFirstCSecond | AntennaCase::ASecondCFirst => CVec2::new(ONE, ONE).scale_real(FRAC_1_SQRT_2),
    }
}

pub fn dfncant_relay(x_b: &[Cplx], case: AntennaCase) -> RelayTransmission {
    let w = dfncant_weights(case);
    let slots = x_b.iter().map(|&x| w.scale(x)).collect();
    RelayTransmission::new(slots, SideData::Case(case))
}

pub fn dfncant_decode(
    y: &[Cplx],
    ch: &ChannelRealization,
    own_bits: &BitFrame,
    case: AntennaCase,
    side: Terminal,
) -> Result<BitFrame> {
    let gain = ch.downlink(side).dot(&dfncant_weights(case));
    equalize_xor(y, gain, own_bits)
}
