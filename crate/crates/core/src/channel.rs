//! Rayleigh block fading between the terminals and the two relay antennas.

use crate::error::{Error, Result};
use crate::numerics::{CMat2, CVec2, Cplx, RngStream};

/// The two single-antenna end nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Terminal {
    A,
    C,
}

impl Terminal {
    pub fn partner(self) -> Terminal {
        match self {
            Terminal::A => Terminal::C,
            Terminal::C => Terminal::A,
        }
    }
}

/// One fading draw, constant over both stages of a trial.
///
/// Only the uplink columns are stored. Downlink rows are the same
/// coefficients read as rows, so reciprocity holds exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    pub h_ab: CVec2,
    pub h_cb: CVec2,
}

impl ChannelRealization {
    pub fn new(h_ab: CVec2, h_cb: CVec2) -> Self {
        ChannelRealization { h_ab, h_cb }
    }

    /// Downlink row relay -> A.
    pub fn h_ba(&self) -> CVec2 {
        self.h_ab
    }

    /// Downlink row relay -> C.
    pub fn h_bc(&self) -> CVec2 {
        self.h_cb
    }

    /// Uplink column of `t`.
    pub fn uplink(&self, t: Terminal) -> CVec2 {
        match t {
            Terminal::A => self.h_ab,
            Terminal::C => self.h_cb,
        }
    }

    /// Downlink row towards `t`.
    pub fn downlink(&self, t: Terminal) -> CVec2 {
        match t {
            Terminal::A => self.h_ba(),
            Terminal::C => self.h_bc(),
        }
    }

    /// `H = [h_AB h_CB]`.
    pub fn uplink_matrix(&self) -> CMat2 {
        CMat2::from_columns(self.h_ab, self.h_cb)
    }
}

/// Common SNR of every receive antenna, `SNR = 1 / sigma^2` with unit
/// transmit energy per node and channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPoint {
    snr_db: f64,
}

impl SnrPoint {
    pub fn from_db(snr_db: f64) -> Result<Self> {
        if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
            return Err(Error::arg(format!("invalid SNR {snr_db} dB")));
        }
        Ok(SnrPoint { snr_db })
    }

    /// Sigma^2 = 0 on every hop.
    pub fn noiseless() -> Self {
        SnrPoint {
            snr_db: f64::INFINITY,
        }
    }

    pub fn from_noise_variance(variance: f64) -> Result<Self> {
        if !variance.is_finite() || variance <= 0.0 {
            return Err(Error::arg(format!("noise variance must be positive, got {variance}")));
        }
        Ok(SnrPoint {
            snr_db: -10.0 * variance.log10(),
        })
    }

    pub fn db(&self) -> f64 {
        self.snr_db
    }

    pub fn noise_variance(&self) -> f64 {
        if self.snr_db == f64::INFINITY {
            0.0
        } else {
            10f64.powf(-self.snr_db / 10.0)
        }
    }
}

/// Four i.i.d. CN(0, 1) coefficients.
pub fn draw_channel(rng: &mut RngStream) -> ChannelRealization {
    let mut g = || rng.cgauss(1.0).expect("unit variance is valid");
    let h_ab = CVec2::new(g(), g());
    let h_cb = CVec2::new(g(), g());
    ChannelRealization { h_ab, h_cb }
}

/// Stage one: `y_B = h_AB x_A + h_CB x_C + n_B`.
pub fn uplink_receive(
    ch: &ChannelRealization,
    x_a: Cplx,
    x_c: Cplx,
    noise_var: f64,
    rng: &mut RngStream,
) -> Result<CVec2> {
    let noise = rng.cgauss_vec(noise_var)?;
    Ok(ch.h_ab.scale(x_a) + ch.h_cb.scale(x_c) + noise)
}

/// Stage two at one terminal: `y = h_row s_B + n`.
pub fn downlink_receive(
    h_row: &CVec2,
    s_b: &CVec2,
    noise_var: f64,
    rng: &mut RngStream,
) -> Result<Cplx> {
    Ok(h_row.dot(s_b) + rng.cgauss(noise_var)?)
}
