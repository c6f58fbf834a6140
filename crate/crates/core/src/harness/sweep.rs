use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polar::{enumerate_correctable_set, monte_carlo_failure_rate, success_probability_exact, PolarCodeSpec};
use crate::scalar::{binary_entropy, inverse_binary_entropy};
use crate::schumacher::{schumacher_rate, schumacher_rate_alt, schumacher_success, TypicalSetSpec};

/// Largest `N - K` for which the polar-exact rows enumerate the correctable set.
pub const SWEEP_ENUMERATION_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepProtocol {
    PolarExact,
    PolarMc,
    Schumacher,
}

impl SweepProtocol {
    pub const ALL: [SweepProtocol; 3] = [SweepProtocol::PolarExact, SweepProtocol::PolarMc, SweepProtocol::Schumacher];

    pub fn name(self) -> &'static str {
        match self {
            SweepProtocol::PolarExact => "polar-exact",
            SweepProtocol::PolarMc => "polar-mc",
            SweepProtocol::Schumacher => "schumacher",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        SweepProtocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param(format!("unknown protocol {s:?}")))
    }
}

/// One CSV row. `None` cells are written empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub protocol: &'static str,
    pub n: usize,
    pub k: usize,
    pub design_p: Option<f64>,
    pub source_p: f64,
    pub entropy: f64,
    pub rate: f64,
    pub rate_alt: Option<f64>,
    pub success_exact: Option<f64>,
    pub success_mc: Option<f64>,
    pub stderr: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

pub const CSV_HEADER: [&str; 13] = [
    "protocol",
    "n",
    "k",
    "design_p",
    "source_p",
    "entropy",
    "rate",
    "rate_alt",
    "success_exact",
    "success_mc",
    "stderr",
    "trials",
    "seed",
];

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub spec: PolarCodeSpec,
    pub grid: Vec<f64>,
    pub protocols: Vec<SweepProtocol>,
    pub mc_trials: u64,
    pub seed: u64,
    /// Typicality width for the Schumacher rows.
    pub delta: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    /// Rows skipped because a resource cap was hit.
    pub skipped: Vec<String>,
}

/// `count` points with `p` evenly spaced on `[lo, hi]`. The reference data uses
/// 100 points on `[0.01, 0.49]`.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    check_range(lo, hi)?;
    Ok(match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    })
}

/// `count` points with `h(p)` evenly spaced strictly inside `(h_lo, h_hi)`, `p ≤ 1/2`.
pub fn entropy_grid(h_lo: f64, h_hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(0.0..h_hi).contains(&h_lo) || h_hi > 1.0 {
        return Err(Error::param(format!("entropy range ({h_lo}, {h_hi}) must lie in [0, 1]")));
    }
    Ok((1..=count)
        .map(|i| inverse_binary_entropy(h_lo + (h_hi - h_lo) * i as f64 / (count + 1) as f64))
        .collect())
}

/// The 100-point grid of the reference data.
pub fn figure_grid() -> Vec<f64> {
    linear_grid(0.01, 0.49, 100).expect("valid range")
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if !(lo > 0.0 && hi < 1.0 && lo <= hi) {
        return Err(Error::param(format!("grid range [{lo}, {hi}] must satisfy 0 < lo <= hi < 1")));
    }
    Ok(())
}

/// Computes all rows in parallel; rows come back in (protocol, grid) order.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    if let Some(&p) = config.grid.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::param(format!("grid point {p} outside (0, 1)")));
    }
    let jobs: Vec<(SweepProtocol, f64)> =
        config.protocols.iter().flat_map(|&proto| config.grid.iter().map(move |&p| (proto, p))).collect();
    let rows: Vec<Result<std::result::Result<SweepRecord, String>>> =
        jobs.par_iter().map(|&(proto, p)| sweep_row(config, proto, p)).collect();
    let mut out = SweepOutput::default();
    for row in rows {
        match row? {
            Ok(r) => out.records.push(r),
            Err(msg) => out.skipped.push(msg),
        }
    }
    Ok(out)
}

fn sweep_row(config: &SweepConfig, proto: SweepProtocol, p: f64) -> Result<std::result::Result<SweepRecord, String>> {
    let spec = &config.spec;
    let (n, k) = (spec.n(), spec.k());
    let polar_row = SweepRecord {
        protocol: proto.name(),
        n,
        k,
        design_p: Some(spec.design_p()),
        source_p: p,
        entropy: binary_entropy(p),
        rate: (n - k) as f64 / n as f64,
        rate_alt: None,
        success_exact: None,
        success_mc: None,
        stderr: None,
        trials: None,
        seed: None,
    };
    Ok(Ok(match proto {
        SweepProtocol::PolarExact => {
            if spec.frozen_count() > SWEEP_ENUMERATION_CAP {
                return Ok(Err(format!("polar-exact p={p}: N-K = {} exceeds the enumeration cap", spec.frozen_count())));
            }
            let t = enumerate_correctable_set(spec, &p, SWEEP_ENUMERATION_CAP)?;
            SweepRecord { success_exact: Some(success_probability_exact(&t, &p)), ..polar_row }
        }
        SweepProtocol::PolarMc => {
            let est = monte_carlo_failure_rate(spec, p, config.mc_trials, config.seed)?.complement();
            SweepRecord {
                success_mc: Some(est.estimate),
                stderr: Some(est.stderr),
                trials: Some(config.mc_trials),
                seed: Some(config.seed),
                ..polar_row
            }
        }
        SweepProtocol::Schumacher => {
            let t = match TypicalSetSpec::new(n, p, config.delta) {
                Ok(t) => t,
                Err(Error::Resource(msg)) => return Ok(Err(format!("schumacher p={p}: {msg}"))),
                Err(e) => return Err(e),
            };
            SweepRecord {
                k: n - t.qubits_required(),
                design_p: None,
                rate: schumacher_rate(&t),
                rate_alt: Some(schumacher_rate_alt(&t)),
                success_exact: Some(schumacher_success(&t)),
                ..polar_row
            }
        }
    }))
}

/// Writes the header and rows; floats use the shortest round-trip representation.
pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(records: &[SweepRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::invariant(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(grid: Vec<f64>) -> SweepConfig {
        SweepConfig {
            spec: PolarCodeSpec::new(3, vec![1, 2, 3, 5], 0.05, 1000, 7).unwrap(),
            grid,
            protocols: SweepProtocol::ALL.to_vec(),
            mc_trials: 2000,
            seed: 3,
            delta: 0.05,
        }
    }

    #[test]
    fn grids() {
        let g = figure_grid();
        assert_eq!(g.len(), 100);
        assert!((g[0] - 0.01).abs() < 1e-15 && (g[99] - 0.49).abs() < 1e-15);
        assert!((binary_entropy(g[0]) - 0.08079313589591).abs() < 1e-12);
        let e = entropy_grid(0.05, 1.0, 99).unwrap();
        assert_eq!(e.len(), 99);
        assert!((binary_entropy(e[0]) - (0.05 + 0.95 / 100.0)).abs() < 1e-9);
        assert!(linear_grid(0.0, 0.5, 3).is_err());
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let out = run_sweep(&config(vec![])).unwrap();
        assert_eq!(csv_string(&out.records).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn uniform_source_row() {
        let out = run_sweep(&config(vec![0.5])).unwrap();
        let exact = out.records.iter().find(|r| r.protocol == "polar-exact").unwrap();
        assert_eq!(exact.success_exact, Some(16.0 / 256.0));
        assert_eq!(out.records.len(), 3);
    }

    #[test]
    fn rows_are_in_grid_order_and_cells_empty_when_inapplicable() {
        let out = run_sweep(&config(vec![0.02, 0.1])).unwrap();
        let names: Vec<_> = out.records.iter().map(|r| (r.protocol, r.source_p)).collect();
        assert_eq!(
            names,
            [("polar-exact", 0.02), ("polar-exact", 0.1), ("polar-mc", 0.02), ("polar-mc", 0.1), ("schumacher", 0.02), ("schumacher", 0.1)]
        );
        let text = csv_string(&out.records).unwrap();
        let first = text.lines().nth(1).unwrap();
        assert!(first.starts_with("polar-exact,8,4,0.05,0.02,"));
        assert!(first.ends_with(",,,,"));
    }
}
