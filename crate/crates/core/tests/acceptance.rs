//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.
//!
//! `cargo test --test acceptance -- <substring>` runs only matching criteria.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use twoway_relay::channel::{draw_channel, ChannelRealization};
use twoway_relay::cli::{format_csv, run, CliOptions};
use twoway_relay::numerics::{mat2_mmse_solve, CMat2, CVec2, Cplx, RngStream};
use twoway_relay::relay::{alamouti_decode, alamouti_encode, df_detect, RelayStrategy};
use twoway_relay::simulator::{
    calibrate_rayleigh_qpsk, estimate_slope, run_sweep, BerRecord, SimConfig,
};

type Verdict = Result<String, String>;
type Criterion = (u8, &'static str, fn() -> Verdict);

const NO_TARGET: u64 = u64::MAX;

/// Bits per scheme for the ordering criteria. Frames of 4 bits (two QPSK
/// symbols, one Alamouti pair) give a fresh channel every other symbol, so
/// the spread of the estimate stays close to the binomial one.
const ORDERING_TRIALS: u64 = 2_500_000;
const SHORT_FRAME: usize = 4;

fn sweep(strategies: &[RelayStrategy], snr: &[f64], trials: u64, frame_bits: usize) -> Vec<BerRecord> {
    let cfg = SimConfig {
        strategies: strategies.to_vec(),
        snr_grid_db: snr.to_vec(),
        frame_bits,
        max_trials: trials,
        target_errors: NO_TARGET,
        seed: 1,
        ..Default::default()
    };
    run_sweep(&cfg).expect("sweep")
}

fn find(recs: &[BerRecord], s: RelayStrategy, snr: f64) -> &BerRecord {
    recs.iter()
        .find(|r| r.strategy == s && r.snr_db == snr)
        .expect("record present")
}

fn combined_se(a: &BerRecord, b: &BerRecord) -> f64 {
    (a.std_error().powi(2) + b.std_error().powi(2)).sqrt()
}

fn describe(r: &BerRecord) -> String {
    format!("{}={:.4e}±{:.1e}", r.strategy.tag(), r.ber(), r.std_error())
}

/// `better` must beat `worse` by more than three combined standard errors.
fn clear_gap(better: &BerRecord, worse: &BerRecord) -> (bool, String) {
    let gap = worse.ber() - better.ber();
    let se = combined_se(better, worse);
    let ok = gap > 3.0 * se;
    (ok, format!("{} < {} gap {:.2e} = {:.1} SE", better.strategy.tag(), worse.strategy.tag(), gap, gap / se))
}

// 1
fn noiseless_perfection() -> Verdict {
    let start = Instant::now();
    let recs = sweep(&RelayStrategy::ALL, &[f64::INFINITY], 10_000, 400);
    let elapsed = start.elapsed();
    let dirty: Vec<String> = recs.iter().filter(|r| r.total_errors != 0).map(describe).collect();
    let bits: u64 = recs.iter().map(|r| r.total_bits).sum();
    let msg = format!("7 schemes x 10^4 frames, {bits} bits, {:.1} s", elapsed.as_secs_f64());
    if !dirty.is_empty() {
        return Err(format!("errors without noise: {}", dirty.join(", ")));
    }
    if recs.iter().any(|r| r.trials_run != 10_000) {
        return Err("not every scheme ran 10^4 frames".into());
    }
    if elapsed >= Duration::from_secs(30) {
        return Err(format!("too slow: {msg}"));
    }
    Ok(msg)
}

// 2
fn rayleigh_closed_form(ebn0_db: f64) -> f64 {
    let g = 10f64.powf(ebn0_db / 10.0);
    0.5 * (1.0 - (g / (1.0 + g)).sqrt())
}

fn calibration() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for db in [0.0, 10.0, 20.0] {
        let p = calibrate_rayleigh_qpsk(db, 2_000_000, 7).map_err(|e| e.to_string())?;
        let theory = rayleigh_closed_form(db);
        let z = (p.ber() - theory) / p.std_error();
        ok &= z.abs() <= 3.0;
        lines.push(format!("{db} dB: {:.4e} vs {:.4e} ({z:+.2} SE)", p.ber(), theory));
    }
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// 3
fn no_csi_ordering() -> Verdict {
    use RelayStrategy::*;
    let start = Instant::now();
    let recs = sweep(&[Af, DfSm, DfNc, DfNcAlamouti], &[20.0], ORDERING_TRIALS, SHORT_FRAME);
    let elapsed = start.elapsed();
    let chain = [DfNcAlamouti, DfNc, DfSm, Af].map(|s| find(&recs, s, 20.0));
    let mut ok = chain.iter().all(|r| r.total_bits >= 1_000_000);
    let mut parts = Vec::new();
    for w in chain.windows(2) {
        let (g, m) = clear_gap(w[0], w[1]);
        ok &= g;
        parts.push(m);
    }
    ok &= elapsed < Duration::from_secs(300);
    let msg = format!(
        "{}; {} bits each; {}; {:.1} s",
        chain.iter().map(|r| describe(r)).collect::<Vec<_>>().join(" "),
        chain[0].total_bits,
        parts.join("; "),
        elapsed.as_secs_f64()
    );
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// 4
fn af_antenna_count() -> Verdict {
    use RelayStrategy::*;
    let recs = sweep(&[Af1Ant, Af], &[15.0, 20.0], ORDERING_TRIALS, SHORT_FRAME);
    let mut ok = true;
    let mut parts = Vec::new();
    for snr in [15.0, 20.0] {
        let (one, two) = (find(&recs, Af1Ant, snr), find(&recs, Af, snr));
        let se = combined_se(one, two);
        let not_better = two.ber() >= one.ber() - 3.0 * se;
        let slight = two.ber() <= 2.0 * one.ber();
        ok &= not_better && slight;
        parts.push(format!(
            "{snr} dB: {} {} | af >= af1 - 3SE: {} ({:+.1} SE) | af <= 2 af1: {}",
            describe(one),
            describe(two),
            not_better,
            (two.ber() - one.ber()) / se,
            slight
        ));
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// 5
fn csi_ordering() -> Verdict {
    use RelayStrategy::*;
    let recs = sweep(&[DfAnt, DfNcAnt], &[20.0], ORDERING_TRIALS, SHORT_FRAME);
    let (ant, nc_ant) = (find(&recs, DfAnt, 20.0), find(&recs, DfNcAnt, 20.0));
    let (ok, m) = clear_gap(ant, nc_ant);
    let msg = format!("{} {}; {m}; text-rule placement", describe(ant), describe(nc_ant));
    if ok && ant.total_bits >= 1_000_000 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// 6
fn diversity_slope_cap() -> Verdict {
    use RelayStrategy::*;
    let recs = sweep(&[DfSm, DfNc, DfNcAlamouti], &[15.0, 20.0, 25.0], 1_000_000, SHORT_FRAME);
    let slopes: Vec<(RelayStrategy, f64)> = [DfSm, DfNc, DfNcAlamouti]
        .into_iter()
        .map(|s| {
            let own: Vec<BerRecord> = recs.iter().filter(|r| r.strategy == s).cloned().collect();
            (s, estimate_slope(&own, 15.0, 25.0).expect("slope"))
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (i, a) in slopes.iter().enumerate() {
        for b in &slopes[i + 1..] {
            worst = worst.max((a.1 - b.1).abs() / a.1.abs().max(b.1.abs()));
        }
    }
    let msg = format!(
        "{}; worst pairwise relative difference {:.1}%",
        slopes.iter().map(|(s, v)| format!("{}={v:.3}", s.tag())).collect::<Vec<_>>().join(" "),
        100.0 * worst
    );
    if worst <= 0.25 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// 7: oracle works on plain (re, im) tuples, independent of the library's types.
type C = (f64, f64);

fn c_mul(a: C, b: C) -> C {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}
fn c_add(a: C, b: C) -> C {
    (a.0 + b.0, a.1 + b.1)
}
fn c_sub(a: C, b: C) -> C {
    (a.0 - b.0, a.1 - b.1)
}
fn c_conj(a: C) -> C {
    (a.0, -a.1)
}
fn c_div(a: C, b: C) -> C {
    let d = b.0 * b.0 + b.1 * b.1;
    let n = c_mul(a, c_conj(b));
    (n.0 / d, n.1 / d)
}

/// `(H^H H + reg I)^{-1} H^H y` by cofactors, `h` row-major.
fn cofactor_mmse(h: [[C; 2]; 2], y: [C; 2], reg: f64) -> [C; 2] {
    let mut g = [[(0.0, 0.0); 2]; 2];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            // sum_k conj(h[k][i]) h[k][j]
            *cell = c_add(c_mul(c_conj(h[0][i]), h[0][j]), c_mul(c_conj(h[1][i]), h[1][j]));
        }
        row[i].0 += reg;
    }
    let det = c_sub(c_mul(g[0][0], g[1][1]), c_mul(g[0][1], g[1][0]));
    let cof = [[g[1][1], (-g[0][1].0, -g[0][1].1)], [(-g[1][0].0, -g[1][0].1), g[0][0]]];
    let hy = [
        c_add(c_mul(c_conj(h[0][0]), y[0]), c_mul(c_conj(h[1][0]), y[1])),
        c_add(c_mul(c_conj(h[0][1]), y[0]), c_mul(c_conj(h[1][1]), y[1])),
    ];
    [
        c_div(c_add(c_mul(cof[0][0], hy[0]), c_mul(cof[0][1], hy[1])), det),
        c_div(c_add(c_mul(cof[1][0], hy[0]), c_mul(cof[1][1], hy[1])), det),
    ]
}

fn qpsk_points() -> [Cplx; 4] {
    let r = FRAC_1_SQRT_2;
    [Cplx::new(r, r), Cplx::new(r, -r), Cplx::new(-r, r), Cplx::new(-r, -r)]
}

fn ml_detect(ch: &ChannelRealization, y: &CVec2) -> (Cplx, Cplx) {
    let mut best = (f64::INFINITY, qpsk_points()[0], qpsk_points()[0]);
    for a in qpsk_points() {
        for c in qpsk_points() {
            let r0 = y.e1 - ch.h_ab.e1 * a - ch.h_cb.e1 * c;
            let r1 = y.e2 - ch.h_ab.e2 * a - ch.h_cb.e2 * c;
            let d = r0.norm_sqr() + r1.norm_sqr();
            if d < best.0 {
                best = (d, a, c);
            }
        }
    }
    (best.1, best.2)
}

fn mmse_oracle() -> Verdict {
    let mut rng = RngStream::new(2024, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let e: Vec<Cplx> = (0..4).map(|_| rng.cgauss(1.0).unwrap()).collect();
        let y = rng.cgauss_vec(1.0).unwrap();
        let h = CMat2::new(e[0], e[1], e[2], e[3]);
        let got = mat2_mmse_solve(&h, &y, 0.5).map_err(|e| e.to_string())?;
        let t = |z: Cplx| (z.re, z.im);
        let want = cofactor_mmse([[t(e[0]), t(e[1])], [t(e[2]), t(e[3])]], [t(y.e1), t(y.e2)], 0.5);
        let err = (got.e1 - Cplx::new(want[0].0, want[0].1))
            .norm()
            .max((got.e2 - Cplx::new(want[1].0, want[1].1)).norm());
        worst = worst.max(err);
    }
    if worst > 1e-10 {
        return Err(format!("cofactor oracle mismatch {worst:.2e}"));
    }

    let mut rng = RngStream::new(2024, 1);
    let mut checked = 0;
    while checked < 1_000 {
        let ch = draw_channel(&mut rng);
        // generic: stay away from near-singular draws
        if ch.uplink_matrix().det().norm() < 1e-3 {
            continue;
        }
        for a in qpsk_points() {
            for c in qpsk_points() {
                let y = ch.uplink_matrix().mul_vec(&CVec2::new(a, c));
                let mmse = df_detect(&y, &ch, 0.0).map_err(|e| e.to_string())?;
                if mmse != ml_detect(&ch, &y) {
                    return Err(format!("MMSE and ML disagree on {ch:?}"));
                }
            }
        }
        checked += 1;
    }
    Ok(format!("10^4 random instances, max |diff| {worst:.1e}; 1000 channels x 16 pairs agree with ML"))
}

// 8
fn alamouti_round_trip() -> Verdict {
    let mut rng = RngStream::new(8, 8);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let h = rng.cgauss_vec(1.0).unwrap();
        let pair = (rng.cgauss(1.0).unwrap(), rng.cgauss(1.0).unwrap());
        let tx = alamouti_encode(pair);
        let (a, b) = alamouti_decode((h.dot(&tx.slots[0]), h.dot(&tx.slots[1])), &h);
        worst = worst.max((a.value - pair.0).norm()).max((b.value - pair.1).norm());
    }
    let msg = format!("10^4 pairs, max error {worst:.1e}");
    if worst <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// 9
fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let base = SimConfig {
        snr_grid_db: vec![0.0, 10.0, 20.0],
        max_trials: 400,
        target_errors: 300,
        seed: 99,
        ..Default::default()
    };
    let mut files = Vec::new();
    for threads in [1, 4] {
        let out = dir.path().join(format!("t{threads}.csv"));
        let opts = CliOptions {
            config: SimConfig { threads, ..base.clone() },
            out: out.clone(),
            plot: None,
        };
        run(&opts).map_err(|e| e.to_string())?;
        files.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    // the global pool must agree as well
    let global = format_csv(&run_sweep(&base).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    if files[0] == files[1] && files[0] == global.as_bytes() {
        Ok(format!("1 vs 4 workers vs global pool: {} identical bytes", files[0].len()))
    } else {
        Err("CSV bytes differ between worker counts".into())
    }
}

// 10
fn power_contract() -> Verdict {
    let recs = sweep(&RelayStrategy::ALL, &[10.0], 100_000, SHORT_FRAME);
    let mut ok = true;
    let parts: Vec<String> = recs
        .iter()
        .map(|r| {
            let p = r.mean_relay_energy();
            ok &= (0.98..=1.02).contains(&p);
            format!("{}={p:.4}", r.strategy.tag())
        })
        .collect();
    let msg = parts.join(" ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "noiseless perfection", noiseless_perfection),
        (2, "calibration against closed form", calibration),
        (3, "no-CSI ordering at 20 dB", no_csi_ordering),
        (4, "AF antenna count", af_antenna_count),
        (5, "CSI schemes at 20 dB", csi_ordering),
        (6, "diversity slope cap", diversity_slope_cap),
        (7, "MMSE oracle equivalence", mmse_oracle),
        (8, "Alamouti round trip", alamouti_round_trip),
        (9, "determinism across parallelism", determinism),
        (10, "relay power contract", power_contract),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || f == &id.to_string()) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let verdict = check();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(msg) => println!("PASS  AC{id:<2} {name}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  AC{id:<2} {name}: {msg} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
