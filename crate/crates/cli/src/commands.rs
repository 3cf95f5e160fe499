use std::time::Instant;

use gamma1_core::analysis::{block_grid, BlockRow};
use gamma1_core::special::{mellin_regime_scan, MellinProbe};
use gamma1_core::testfn::make_pair;
use gamma1_core::{one_level_density, DensityReport};
use rayon::prelude::*;

use crate::config::{OutputFormat, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{self, BLOCK_HEADER, MELLIN_HEADER, SCAN_HEADER};
use crate::verify::{run_suites, Fault};
use crate::{EXIT_FAILURE, EXIT_OK, EXIT_UNCERTIFIED};

pub fn cmd_verify(filter: Option<&str>, fault: Option<Fault>) -> CliResult<i32> {
    if let Some(f) = filter {
        if !crate::verify::SUITES.iter().any(|s| s.starts_with(f)) {
            return Err(CliError::Usage(format!("unknown suite {f:?}; expected one of {:?}", crate::verify::SUITES)));
        }
    }
    let checks = run_suites(filter, fault)?;
    let mut text = String::new();
    for c in &checks {
        text.push_str(&c.line());
        text.push('\n');
    }
    let failed: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
    text.push_str(&format!("{} checks, {} failed\n", checks.len(), failed.len()));
    output::emit(None, &text)?;
    for c in &failed {
        eprintln!("invariant failure {}/{}: observed {:e} exceeds bound {:e}", c.module, c.id, c.observed, c.bound);
    }
    Ok(if failed.is_empty() { EXIT_OK } else { EXIT_FAILURE })
}

pub fn density_report(cfg: &RunConfig, q: u64) -> CliResult<DensityReport> {
    let params = cfg.params_for(q)?;
    let pair = make_pair(cfg.testfn, cfg.delta)?;
    Ok(one_level_density(&params, &pair, &cfg.policy())?)
}

pub fn cmd_density(cfg: &RunConfig) -> CliResult<i32> {
    let q = cfg.single_q()?;
    let start = Instant::now();
    let report = density_report(cfg, q)?;
    let text = match cfg.format {
        OutputFormat::Json => {
            let env = output::DensityEnvelope {
                report: &report,
                provenance: output::Provenance {
                    config: cfg,
                    build_id: output::build_id(),
                    version: env!("CARGO_PKG_VERSION"),
                    wall_time_seconds: start.elapsed().as_secs_f64(),
                },
            };
            serde_json::to_string_pretty(&env)? + "\n"
        }
        OutputFormat::Csv => format!("{SCAN_HEADER}\n{}\n", output::scan_row(&report)),
    };
    output::emit(cfg.output_path.as_deref(), &text)?;
    if !report.certified {
        eprintln!("tail bounds not certified at tail_eps = {:e}", cfg.tail_eps);
        return Ok(EXIT_UNCERTIFIED);
    }
    Ok(EXIT_OK)
}

/// Scan rows in ascending `q`; failed levels become uncertified NaN rows.
pub fn scan_csv(cfg: &RunConfig) -> CliResult<(String, bool)> {
    let levels = cfg.range()?.levels();
    let results: Vec<(u64, CliResult<DensityReport>)> =
        levels.par_iter().map(|&q| (q, density_report(cfg, q))).collect();
    let mut text = String::from(SCAN_HEADER);
    text.push('\n');
    let mut all_certified = true;
    for (q, r) in &results {
        match r {
            Ok(rep) => {
                all_certified &= rep.certified;
                text.push_str(&output::scan_row(rep));
            }
            Err(e) => {
                eprintln!("q = {q}: {e}");
                all_certified = false;
                text.push_str(&output::failed_scan_row(cfg, *q));
            }
        }
        text.push('\n');
    }
    Ok((text, all_certified))
}

pub fn cmd_scan(cfg: &RunConfig) -> CliResult<i32> {
    if cfg.format == OutputFormat::Json {
        let levels = cfg.range()?.levels();
        let reports: Vec<DensityReport> =
            levels.par_iter().map(|&q| density_report(cfg, q)).collect::<CliResult<_>>()?;
        let certified = reports.iter().all(|r| r.certified);
        output::emit(cfg.output_path.as_deref(), &(serde_json::to_string_pretty(&reports)? + "\n"))?;
        return Ok(if certified { EXIT_OK } else { EXIT_UNCERTIFIED });
    }
    let (text, certified) = scan_csv(cfg)?;
    output::emit(cfg.output_path.as_deref(), &text)?;
    Ok(if certified { EXIT_OK } else { EXIT_UNCERTIFIED })
}

pub struct BlockGrid {
    pub p: Vec<f64>,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
}

pub fn block_csv(cfg: &RunConfig, grid: &BlockGrid) -> CliResult<(String, usize)> {
    let q = cfg.single_q()?;
    let params = cfg.params_for(q)?;
    let pair = make_pair(cfg.testfn, cfg.delta)?;
    let reach = (q as f64).powf(cfg.delta);
    let mut text = String::from(BLOCK_HEADER);
    text.push('\n');
    let p_ok: Vec<f64> = grid.p.iter().copied().filter(|&p| p < reach).collect();
    let mut rejected = 0;
    for &p in grid.p.iter().filter(|&&p| p >= reach) {
        rejected += grid.s.len() * grid.t.len();
        eprintln!("rejected P = {p}: P >= q^delta = {reach:.6}");
    }
    for row in block_grid(&params, &pair, &p_ok, &grid.s, &grid.t) {
        let BlockRow { spec, value, bound_ratio, .. } = row?;
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            output::real(spec.p),
            output::real(spec.s),
            output::real(spec.t),
            spec.case.label(),
            output::real(value.norm()),
            output::real(bound_ratio)
        ));
    }
    Ok((text, rejected))
}

pub fn cmd_diagnose_blocks(cfg: &RunConfig, grid: &BlockGrid) -> CliResult<i32> {
    let (text, _) = block_csv(cfg, grid)?;
    output::emit(cfg.output_path.as_deref(), &text)?;
    Ok(EXIT_OK)
}

pub fn mellin_csv(probe: &MellinProbe, v_grid: &[f64]) -> CliResult<String> {
    let mut text = String::from(MELLIN_HEADER);
    text.push('\n');
    for r in mellin_regime_scan(probe, v_grid)? {
        text.push_str(&format!(
            "{},{},{},{}\n",
            output::real(r.v),
            output::real(r.abs_m1),
            r.regime.label(),
            output::real(r.bound_ratio)
        ));
    }
    Ok(text)
}

pub fn cmd_mellin_probe(cfg: &RunConfig, probe: &MellinProbe, v_grid: &[f64]) -> CliResult<i32> {
    output::emit(cfg.output_path.as_deref(), &mellin_csv(probe, v_grid)?)?;
    Ok(EXIT_OK)
}
