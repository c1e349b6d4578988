//! Command-line front end: flag parsing, CSV output and the gnuplot script.

use std::fmt::Write as _;
use std::fs;
use std::path::{Component, Path, PathBuf};
use std::str::FromStr;

use clap::Parser;

use crate::error::{Error, Result};
use crate::relay::RelayStrategy;
use crate::simulator::{BerRecord, SimConfig};

pub const CSV_HEADER: &str = "scheme,snr_db,ber,ber_a,ber_c,bits,errors,trials";

/// Comma-separated scheme tags, or `all`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeList(pub Vec<RelayStrategy>);

impl FromStr for SchemeList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.trim() == "all" {
            return Ok(SchemeList(RelayStrategy::ALL.to_vec()));
        }
        let mut out = Vec::new();
        for tag in s.split(',').map(str::trim) {
            let r: RelayStrategy = tag.parse().map_err(|e: Error| {
                let known: Vec<_> = RelayStrategy::ALL.iter().map(|r| r.tag()).collect();
                format!("{e} (expected one of: all, {})", known.join(", "))
            })?;
            if !out.contains(&r) {
                out.push(r);
            }
        }
        Ok(SchemeList(out))
    }
}

/// `start:step:stop` in dB (inclusive), or a single value.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrRange(pub Vec<f64>);

impl FromStr for SnrRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("'{t}' is not a finite number"))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [single] => Ok(SnrRange(vec![num(single)?])),
            [start, step, stop] => {
                let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
                if step <= 0.0 {
                    return Err("SNR step must be positive".into());
                }
                if stop < start {
                    return Err("SNR stop must not be below start".into());
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                // keep 0.1-style steps from printing as 0.30000000000000004
                let grid = (0..=n)
                    .map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9)
                    .collect();
                Ok(SnrRange(grid))
            }
            _ => Err(format!("expected start:step:stop, got '{s}'")),
        }
    }
}

fn parse_frame_bits(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("'{s}' is not a count"))?;
    if n == 0 || !n.is_multiple_of(4) {
        return Err(format!("{n} is not a positive multiple of 4"));
    }
    Ok(n)
}

/// BER-vs-SNR sweep for two-way relaying through a two-antenna relay.
#[derive(Debug, Parser)]
#[command(name = "twoway-relay", version, about)]
pub struct Args {
    /// Schemes to simulate: comma list of af1, af, df-sm, df-nc, df-nc-alamouti, df-ant, df-nc-ant, or `all`
    #[arg(long, default_value = "all")]
    pub schemes: SchemeList,

    /// SNR grid in dB as start:step:stop
    #[arg(long, default_value = "0:5:30", allow_hyphen_values = true)]
    pub snr: SnrRange,

    /// Payload bits per terminal per trial (multiple of 4)
    #[arg(long, default_value = "400", value_parser = parse_frame_bits)]
    pub frame_bits: usize,

    /// Trial cap per (scheme, SNR) point
    #[arg(long, default_value_t = 200_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_trials: u64,

    /// Stop a point once this many bit errors are counted
    #[arg(long, default_value_t = 100)]
    pub target_errors: u64,

    /// Master seed
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// DF-ANT: use the alternative placement for the split-antenna cases [default: off]
    #[arg(long)]
    pub table1_literal: bool,

    /// Worker threads (0 = one per core)
    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    /// CSV output path
    #[arg(long, default_value = "ber.csv")]
    pub out: PathBuf,

    /// Also write a gnuplot script to this path [default: none]
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliOptions {
    pub config: SimConfig,
    pub out: PathBuf,
    pub plot: Option<PathBuf>,
}

impl From<Args> for CliOptions {
    fn from(a: Args) -> Self {
        CliOptions {
            config: SimConfig {
                strategies: a.schemes.0,
                snr_grid_db: a.snr.0,
                frame_bits: a.frame_bits,
                max_trials: a.max_trials,
                target_errors: a.target_errors,
                seed: a.seed,
                table1_literal: a.table1_literal,
                threads: a.threads,
            },
            out: a.out,
            plot: a.plot,
        }
    }
}

/// Parses `argv` (including the program name). `--help` and `--version`
/// come back as `clap` errors whose kind says so.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<CliOptions, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Args::try_parse_from(argv).map(CliOptions::from)
}

/// One CSV line.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRow {
    pub scheme: RelayStrategy,
    pub snr_db: f64,
    pub ber: f64,
    pub ber_a: f64,
    pub ber_c: f64,
    pub bits: u64,
    pub errors: u64,
    pub trials: u64,
}

impl From<&BerRecord> for OutputRow {
    fn from(r: &BerRecord) -> Self {
        OutputRow {
            scheme: r.strategy,
            snr_db: r.snr_db,
            ber: r.ber(),
            ber_a: r.ber_a(),
            ber_c: r.ber_c(),
            bits: r.total_bits,
            errors: r.total_errors,
            trials: r.trials_run,
        }
    }
}

impl OutputRow {
    pub fn to_line(&self) -> String {
        format!(
            "{},{},{:.6e},{:.6e},{:.6e},{},{},{}",
            self.scheme.tag(),
            self.snr_db,
            self.ber,
            self.ber_a,
            self.ber_c,
            self.bits,
            self.errors,
            self.trials
        )
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != 8 {
            return Err(Error::arg(format!("expected 8 fields, got {}: '{line}'", f.len())));
        }
        let real = |s: &str| s.parse::<f64>().map_err(|_| Error::arg(format!("bad number '{s}'")));
        let count = |s: &str| s.parse::<u64>().map_err(|_| Error::arg(format!("bad count '{s}'")));
        Ok(OutputRow {
            scheme: f[0].parse()?,
            snr_db: real(f[1])?,
            ber: real(f[2])?,
            ber_a: real(f[3])?,
            ber_c: real(f[4])?,
            bits: count(f[5])?,
            errors: count(f[6])?,
            trials: count(f[7])?,
        })
    }
}

fn sorted_rows(records: &[BerRecord]) -> Vec<OutputRow> {
    let mut rows: Vec<OutputRow> = records.iter().map(OutputRow::from).collect();
    rows.sort_by(|a, b| a.scheme.cmp(&b.scheme).then(a.snr_db.total_cmp(&b.snr_db)));
    rows
}

/// CSV text: header, one row per record sorted by (scheme, SNR), trailing newline.
pub fn format_csv(records: &[BerRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::arg("no records to write"));
    }
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in sorted_rows(records) {
        out.push_str(&row.to_line());
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(records: &[BerRecord], path: &Path) -> Result<()> {
    let text = format_csv(records)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<OutputRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text)
}

pub fn parse_csv(text: &str) -> Result<Vec<OutputRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::arg(format!("unexpected CSV header {other:?}"))),
    }
    lines.filter(|l| !l.is_empty()).map(OutputRow::parse_line).collect()
}

/// `target` expressed relative to directory `base`.
fn relative_path(target: &Path, base: &Path) -> PathBuf {
    let abs = |p: &Path| std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf());
    let (target, base) = (abs(target), abs(base));
    let t: Vec<Component> = target.components().collect();
    let b: Vec<Component> = base.components().collect();
    let common = t.iter().zip(&b).take_while(|(x, y)| x == y).count();
    if common == 0 {
        return target;
    }
    let mut rel = PathBuf::new();
    for _ in common..b.len() {
        rel.push("..");
    }
    for c in &t[common..] {
        rel.push(c);
    }
    rel
}

fn style(s: RelayStrategy) -> &'static str {
    // blue dashed AF, black solid DF without CSI, red markers for selection
    match s {
        RelayStrategy::Af1Ant => "dt 3 lw 2 pt 6 lc rgb 'blue'",
        RelayStrategy::Af => "dt 2 lw 2 pt 2 lc rgb 'blue'",
        RelayStrategy::DfSm => "dt 1 lw 2 pt 4 lc rgb 'black'",
        RelayStrategy::DfNc => "dt 1 lw 2 pt 6 lc rgb 'black'",
        RelayStrategy::DfNcAlamouti => "dt 1 lw 2 pt 8 lc rgb 'black'",
        RelayStrategy::DfAnt => "dt 1 lw 2 pt 9 lc rgb 'red'",
        RelayStrategy::DfNcAnt => "dt 1 lw 2 pt 5 lc rgb 'red'",
    }
}

/// Gnuplot script plotting log-scale BER against SNR, one series per
/// scheme, read from `csv_ref` (a path relative to the script).
pub fn format_plot_script(records: &[BerRecord], csv_ref: &str, image: &str) -> Result<String> {
    if records.is_empty() {
        return Err(Error::arg("no records to plot"));
    }
    let mut schemes: Vec<RelayStrategy> = records.iter().map(|r| r.strategy).collect();
    schemes.sort();
    schemes.dedup();

    let mut s = String::new();
    let _ = writeln!(s, "# BER vs SNR, generated by twoway-relay.");
    let _ = writeln!(s, "# Paths are relative to this script; run it from its directory.");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size 900,650 enhanced");
    let _ = writeln!(s, "set output '{image}'");
    let _ = writeln!(s, "set logscale y");
    let _ = writeln!(s, "set format y '10^{{%L}}'");
    let _ = writeln!(s, "set xlabel 'SNR (dB)'");
    let _ = writeln!(s, "set ylabel 'BER'");
    let _ = writeln!(s, "set grid xtics ytics mytics");
    let _ = writeln!(s, "set key bottom left");
    let series: Vec<String> = schemes
        .iter()
        .map(|&r| {
            format!(
                "  '{csv_ref}' using 2:(strcol(1) eq '{}' ? $3 : NaN) with linespoints {} title '{}'",
                r.tag(),
                style(r),
                r.label()
            )
        })
        .collect();
    let _ = writeln!(s, "plot \\\n{}", series.join(", \\\n"));
    Ok(s)
}

pub fn emit_plot_script(records: &[BerRecord], script: &Path, csv: &Path) -> Result<()> {
    let dir = script.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let csv_ref = relative_path(csv, dir);
    let image = script.with_extension("png");
    let image = image.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "ber.png".into());
    let text = format_plot_script(records, &csv_ref.to_string_lossy(), &image)?;
    fs::write(script, text).map_err(|e| Error::io(script, e))
}

/// Runs the sweep and writes every requested output.
pub fn run(opts: &CliOptions) -> Result<Vec<BerRecord>> {
    let records = crate::simulator::run_sweep(&opts.config)?;
    write_csv(&records, &opts.out)?;
    if let Some(plot) = &opts.plot {
        emit_plot_script(&records, plot, &opts.out)?;
    }
    Ok(records)
}
