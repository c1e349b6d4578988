//! Monte Carlo engine: SNR sweeps, per-trial two-stage exchange, error
//! accounting and early stopping.
//!
//! Every trial owns an [`RngStream`] whose id packs (strategy, SNR index,
//! trial index), so a trial's result never depends on which worker ran it.
//! Trials are evaluated in fixed-size parallel batches and then folded in
//! trial order, which makes the stopping point, and therefore every output
//! byte, independent of the thread count.

use rayon::prelude::*;

use crate::channel::{downlink_receive, draw_channel, uplink_receive, ChannelRealization, SnrPoint, Terminal};
use crate::error::{Error, Result};
use crate::modem::{qpsk_decide, qpsk_mod, random_bits};
use crate::numerics::{CVec2, Cplx, RngStream};
use crate::relay::{decode, forward, RelayStrategy, Table1Mode};

/// Trials evaluated per parallel batch before the stopping rule is checked.
const BATCH: u64 = 512;
/// Redraws allowed for a degenerate channel before a trial is abandoned.
const MAX_REDRAWS: u32 = 64;

const TRIAL_BITS: u32 = 40;
const SNR_BITS: u32 = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub strategies: Vec<RelayStrategy>,
    pub snr_grid_db: Vec<f64>,
    /// Payload bits per terminal per trial.
    pub frame_bits: usize,
    pub max_trials: u64,
    /// A cell stops once this many bit errors (both terminals) are seen.
    pub target_errors: u64,
    pub seed: u64,
    pub table1_literal: bool,
    /// Worker threads; 0 uses rayon's global pool.
    pub threads: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            strategies: RelayStrategy::ALL.to_vec(),
            snr_grid_db: (0..=6).map(|k| 5.0 * k as f64).collect(),
            frame_bits: 400,
            max_trials: 200_000,
            target_errors: 100,
            seed: 1,
            table1_literal: false,
            threads: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frame_bits == 0 || !self.frame_bits.is_multiple_of(4) {
            return Err(Error::arg(format!(
                "frame bits must be a positive multiple of 4, got {}",
                self.frame_bits
            )));
        }
        if self.strategies.is_empty() {
            return Err(Error::arg("no schemes selected"));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::arg("SNR grid is empty"));
        }
        if self.snr_grid_db.iter().any(|s| s.is_nan()) {
            return Err(Error::arg("SNR grid contains NaN"));
        }
        if self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::arg("SNR grid must be strictly increasing"));
        }
        if self.snr_grid_db.len() as u64 > 1 << SNR_BITS {
            return Err(Error::arg("SNR grid has too many points"));
        }
        if self.max_trials == 0 || self.max_trials > 1 << TRIAL_BITS {
            return Err(Error::arg(format!("max trials must be in 1..=2^40, got {}", self.max_trials)));
        }
        Ok(())
    }

    pub fn table1_mode(&self) -> Table1Mode {
        if self.table1_literal {
            Table1Mode::Literal
        } else {
            Table1Mode::TextRule
        }
    }
}

/// Errors and relay energy of one channel draw and one frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrialOutcome {
    /// Wrong bits in A's estimate of C's frame.
    pub errors_at_a: u64,
    /// Wrong bits in C's estimate of A's frame.
    pub errors_at_c: u64,
    pub bits_per_terminal: u64,
    /// Sum of `||s_B||^2` over the relay's slots.
    pub relay_energy: f64,
    pub relay_slots: u64,
}

impl TrialOutcome {
    pub fn errors(&self) -> u64 {
        self.errors_at_a + self.errors_at_c
    }
}

/// Accumulated result of one (strategy, SNR) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub strategy: RelayStrategy,
    pub snr_db: f64,
    /// Payload bits checked, both terminals together.
    pub total_bits: u64,
    pub total_errors: u64,
    pub errors_a: u64,
    pub errors_c: u64,
    pub trials_run: u64,
    /// Channel draws that had to be redrawn.
    pub degenerate_draws: u64,
    pub relay_energy: f64,
    pub relay_slots: u64,
}

impl BerRecord {
    fn empty(strategy: RelayStrategy, snr_db: f64) -> Self {
        BerRecord {
            strategy,
            snr_db,
            total_bits: 0,
            total_errors: 0,
            errors_a: 0,
            errors_c: 0,
            trials_run: 0,
            degenerate_draws: 0,
            relay_energy: 0.0,
            relay_slots: 0,
        }
    }

    fn absorb(&mut self, t: &TrialOutcome) {
        self.total_bits += 2 * t.bits_per_terminal;
        self.total_errors += t.errors();
        self.errors_a += t.errors_at_a;
        self.errors_c += t.errors_at_c;
        self.trials_run += 1;
        self.relay_energy += t.relay_energy;
        self.relay_slots += t.relay_slots;
    }

    fn ratio(errors: u64, bits: u64) -> f64 {
        if bits == 0 {
            0.0
        } else {
            errors as f64 / bits as f64
        }
    }

    pub fn ber(&self) -> f64 {
        Self::ratio(self.total_errors, self.total_bits)
    }

    /// BER of the bits decoded at A.
    pub fn ber_a(&self) -> f64 {
        Self::ratio(self.errors_a, self.total_bits / 2)
    }

    pub fn ber_c(&self) -> f64 {
        Self::ratio(self.errors_c, self.total_bits / 2)
    }

    /// Binomial standard error `sqrt(p (1 - p) / n)`.
    pub fn std_error(&self) -> f64 {
        if self.total_bits == 0 {
            return 0.0;
        }
        let p = self.ber();
        (p * (1.0 - p) / self.total_bits as f64).sqrt()
    }

    /// Mean `||s_B||^2` per relay channel use.
    pub fn mean_relay_energy(&self) -> f64 {
        if self.relay_slots == 0 {
            0.0
        } else {
            self.relay_energy / self.relay_slots as f64
        }
    }
}

pub fn stream_id(strategy: RelayStrategy, snr_index: usize, trial: u64) -> u64 {
    debug_assert!(trial < 1 << TRIAL_BITS && (snr_index as u64) < 1 << SNR_BITS);
    ((strategy.index() as u64) << (TRIAL_BITS + SNR_BITS)) | ((snr_index as u64) << TRIAL_BITS) | trial
}

/// One two-stage exchange over a fixed channel.
///
/// Draw order on `rng`: A's bits, C's bits, relay noise per slot, then
/// A and C receiver noise per relay slot.
pub fn run_trial(
    strategy: RelayStrategy,
    ch: &ChannelRealization,
    snr: SnrPoint,
    rng: &mut RngStream,
    cfg: &SimConfig,
) -> Result<TrialOutcome> {
    let noise_var = snr.noise_variance();
    let mode = cfg.table1_mode();
    let bits_a = random_bits(rng, cfg.frame_bits)?;
    let bits_c = random_bits(rng, cfg.frame_bits)?;
    let (x_a, x_c) = (qpsk_mod(&bits_a), qpsk_mod(&bits_c));

    let y_b = x_a
        .symbols
        .iter()
        .zip(&x_c.symbols)
        .map(|(&a, &c)| uplink_receive(ch, a, c, noise_var, rng))
        .collect::<Result<Vec<CVec2>>>()?;

    let tx = forward(strategy, ch, &y_b, noise_var, mode)?;

    let mut y_a: Vec<Cplx> = Vec::with_capacity(tx.slots.len());
    let mut y_c: Vec<Cplx> = Vec::with_capacity(tx.slots.len());
    for s in &tx.slots {
        y_a.push(downlink_receive(&ch.h_ba(), s, noise_var, rng)?);
        y_c.push(downlink_receive(&ch.h_bc(), s, noise_var, rng)?);
    }

    let at_a = decode(strategy, Terminal::A, ch, tx.side, &y_a, &bits_a, mode)?;
    let at_c = decode(strategy, Terminal::C, ch, tx.side, &y_c, &bits_c, mode)?;
    Ok(TrialOutcome {
        errors_at_a: at_a.hamming(&bits_c) as u64,
        errors_at_c: at_c.hamming(&bits_a) as u64,
        bits_per_terminal: cfg.frame_bits as u64,
        relay_energy: tx.energy(),
        relay_slots: tx.slots.len() as u64,
    })
}

/// Draws the channel and runs the trial on its own stream, redrawing the
/// channel when it is degenerate. Returns the outcome and the redraw count.
pub fn simulate_trial(
    strategy: RelayStrategy,
    snr_index: usize,
    snr: SnrPoint,
    trial: u64,
    cfg: &SimConfig,
) -> Result<(TrialOutcome, u64)> {
    let mut rng = RngStream::new(cfg.seed, stream_id(strategy, snr_index, trial));
    let mut redraws = 0;
    loop {
        let ch = draw_channel(&mut rng);
        match run_trial(strategy, &ch, snr, &mut rng, cfg) {
            Ok(out) => return Ok((out, redraws)),
            Err(e @ (Error::DegenerateChannel(_) | Error::SingularMatrix { .. })) => {
                log::warn!("{strategy} @ {} dB trial {trial}: {e}; redrawing channel", snr.db());
                redraws += 1;
                if redraws > u64::from(MAX_REDRAWS) {
                    return Err(e);
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// Runs one cell until the error target or the trial cap is reached.
pub fn run_cell(strategy: RelayStrategy, snr_index: usize, cfg: &SimConfig) -> Result<BerRecord> {
    let snr_db = cfg.snr_grid_db[snr_index];
    let snr = SnrPoint::from_db(snr_db)?;
    let mut rec = BerRecord::empty(strategy, snr_db);
    let mut next = 0;
    while next < cfg.max_trials {
        let end = (next + BATCH).min(cfg.max_trials);
        let batch = (next..end)
            .into_par_iter()
            .map(|t| simulate_trial(strategy, snr_index, snr, t, cfg))
            .collect::<Result<Vec<_>>>()?;
        for (out, redraws) in &batch {
            rec.absorb(out);
            rec.degenerate_draws += redraws;
            if rec.total_errors >= cfg.target_errors {
                return Ok(rec);
            }
        }
        next = end;
    }
    Ok(rec)
}

/// All (strategy, SNR) cells, sorted by strategy then SNR.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    let run = || -> Result<Vec<BerRecord>> {
        let mut strategies = cfg.strategies.clone();
        strategies.sort();
        strategies.dedup();
        let mut out = Vec::with_capacity(strategies.len() * cfg.snr_grid_db.len());
        for &s in &strategies {
            for k in 0..cfg.snr_grid_db.len() {
                let rec = run_cell(s, k, cfg)?;
                log::info!(
                    "{:>15} {:>6} dB  ber {:.3e}  ({} errors / {} bits, {} trials)",
                    s.tag(),
                    rec.snr_db,
                    rec.ber(),
                    rec.total_errors,
                    rec.total_bits,
                    rec.trials_run
                );
                out.push(rec);
            }
        }
        Ok(out)
    };
    if cfg.threads == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::arg(format!("cannot build thread pool: {e}")))?
            .install(run)
    }
}

/// Least-squares slope of `log10(BER)` against SNR over `[lo_db, hi_db]`,
/// negated and expressed in decades per 10 dB, i.e. a diversity-order
/// estimate. Records must all belong to one strategy.
pub fn estimate_slope(records: &[BerRecord], lo_db: f64, hi_db: f64) -> Result<f64> {
    if let Some(first) = records.first() {
        if records.iter().any(|r| r.strategy != first.strategy) {
            return Err(Error::Estimation("records mix several schemes".into()));
        }
    }
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.snr_db >= lo_db && r.snr_db <= hi_db && r.total_errors > 0)
        .map(|r| (r.snr_db, r.ber().log10()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Estimation(format!(
            "need at least 2 points with errors in [{lo_db}, {hi_db}] dB, have {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Estimation("all points at the same SNR".into()));
    }
    Ok(-10.0 * sxy / sxx)
}

/// Point-to-point QPSK over Rayleigh fading, used to calibrate the engine.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationPoint {
    pub ebn0_db: f64,
    pub bits: u64,
    pub errors: u64,
}

impl CalibrationPoint {
    pub fn ber(&self) -> f64 {
        self.errors as f64 / self.bits as f64
    }

    pub fn std_error(&self) -> f64 {
        let p = self.ber();
        (p * (1.0 - p) / self.bits as f64).sqrt()
    }

    /// `(1 - sqrt(g / (1 + g))) / 2` with `g = Eb/N0`.
    pub fn closed_form(&self) -> f64 {
        let g = 10f64.powf(self.ebn0_db / 10.0);
        0.5 * (1.0 - (g / (1.0 + g)).sqrt())
    }
}

/// Diagnostics mode: each QPSK symbol sees its own CN(0, 1) fade and
/// coherent detection. `ebn0_db` is the mean SNR per bit, so the noise
/// variance is `1 / (2 Eb/N0)` for unit-energy symbols.
pub fn calibrate_rayleigh_qpsk(ebn0_db: f64, bits: u64, seed: u64) -> Result<CalibrationPoint> {
    const CHUNK_SYMBOLS: u64 = 1 << 14;
    if bits == 0 || !bits.is_multiple_of(2) {
        return Err(Error::arg("calibration bit count must be even and positive"));
    }
    let noise_var = 0.5 * 10f64.powf(-ebn0_db / 10.0);
    let symbols = bits / 2;
    let chunks = symbols.div_ceil(CHUNK_SYMBOLS);
    let errors = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<u64> {
            let mut rng = RngStream::new(seed, c);
            let n = CHUNK_SYMBOLS.min(symbols - c * CHUNK_SYMBOLS);
            let mut errors = 0;
            for _ in 0..n {
                let word = rng.next_u64();
                let (b0, b1) = ((word & 1) as u8, ((word >> 1) & 1) as u8);
                let h = rng.cgauss(1.0)?;
                let y = h * crate::modem::qpsk_symbol(b0, b1) + rng.cgauss(noise_var)?;
                let (d0, d1) = qpsk_decide(y * h.conj());
                errors += u64::from(d0 != b0) + u64::from(d1 != b1);
            }
            Ok(errors)
        })
        .sum::<Result<u64>>()?;
    Ok(CalibrationPoint { ebn0_db, bits, errors })
}
