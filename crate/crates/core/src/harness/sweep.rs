use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use super::{run_seed, Row, SweepConfig, CSV_HEADER, WORKERS_ENV};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepSummary {
    pub cells: usize,
    pub rows: u64,
    pub failures: u64,
}

/// Worker count: `QAE_WORKERS` if set, then the config, then the number of
/// available cores.
pub fn resolve_workers(cfg: &SweepConfig) -> Result<usize> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        return match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Config(format!("{WORKERS_ENV}={v} is not a positive integer"))),
        };
    }
    Ok(cfg
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
}

/// Runs the sweep and writes the CSV to `cfg.out`, or stdout if unset.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepSummary> {
    match &cfg.out {
        Some(path) => {
            let file = File::create(path)?;
            run_sweep_to(cfg, BufWriter::new(file))
        }
        None => run_sweep_to(cfg, std::io::stdout().lock()),
    }
}

/// Runs the sweep, writing rows to `sink` in `(cell, run)` order whatever
/// the worker count. Each row is flushed as soon as it is written.
pub fn run_sweep_to<W: Write>(cfg: &SweepConfig, sink: W) -> Result<SweepSummary> {
    cfg.validate()?;
    let workers = resolve_workers(cfg)?;
    let cells = cfg.cells();
    let total = cells.len() as u64 * cfg.runs;

    let mut sink = sink;
    writeln!(sink, "{CSV_HEADER}")?;
    let mut writer = csv::Writer::from_writer(sink);

    let next = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    // Bounded so a slow writer throttles the workers.
    let (tx, rx) = mpsc::sync_channel::<(u64, Result<Row>)>(4 * workers);

    std::thread::scope(|scope| -> Result<SweepSummary> {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, abort, cells) = (&next, &abort, &cells);
            scope.spawn(move || loop {
                if abort.load(Ordering::Relaxed) {
                    break;
                }
                let job = next.fetch_add(1, Ordering::Relaxed);
                if job >= total {
                    break;
                }
                let cell_idx = (job / cfg.runs) as usize;
                let run = job % cfg.runs;
                let cell = &cells[cell_idx];
                let seed = run_seed(cfg.seed, cell_idx, run);
                let start = Instant::now();
                let row = cell
                    .run(cfg.algorithm, seed)
                    .map(|rec| Row::new(job, cfg.algorithm, cell, seed, &rec, start.elapsed().as_micros() as u64));
                if tx.send((job, row)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut pending = BTreeMap::new();
        let mut expected = 0u64;
        let mut failures = 0u64;
        let mut outcome = Ok(());
        for (job, row) in rx {
            pending.insert(job, row);
            while let Some(row) = pending.remove(&expected) {
                match row {
                    Ok(row) => {
                        failures += u64::from(!row.success);
                        writer.serialize(&row)?;
                        writer.flush()?;
                        expected += 1;
                    }
                    Err(e) => {
                        abort.store(true, Ordering::Relaxed);
                        outcome = Err(e);
                        break;
                    }
                }
            }
            if outcome.is_err() {
                break;
            }
        }
        outcome?;
        Ok(SweepSummary {
            cells: cells.len(),
            rows: expected,
            failures,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::super::Algorithm;
    use super::*;

    fn body(cfg: &SweepConfig) -> String {
        let mut buf = Vec::new();
        run_sweep_to(cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        // Drop the wall-clock column.
        text.lines()
            .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn rows_are_ordered_and_worker_independent() {
        let mut cfg = SweepConfig::new(Algorithm::Chebae, 7);
        cfg.grid.eps = vec![1e-2, 1e-3];
        cfg.seed = 9;
        cfg.workers = Some(1);
        let one = body(&cfg);
        cfg.workers = Some(4);
        let four = body(&cfg);
        assert_eq!(one, four);
        let lines: Vec<&str> = one.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("run_id,algorithm,a,eps,delta,beta,eta,mu,seed,a_hat,abs_err,success"));
        assert_eq!(lines.len(), 2 + 14);
        for (i, line) in lines[2..].iter().enumerate() {
            assert!(line.starts_with(&format!("{i},chebae,")));
        }
    }

    #[test]
    fn error_stops_the_sweep() {
        let mut cfg = SweepConfig::new(Algorithm::Mlae, 3);
        cfg.grid.a = vec![0.5, 0.0];
        cfg.workers = Some(2);
        let mut buf = Vec::new();
        let err = run_sweep_to(&cfg, &mut buf).unwrap_err();
        assert_eq!(err, Error::DegenerateLikelihood);
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2 + 3);
    }
}
