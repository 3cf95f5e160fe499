//! CSV rows and report envelopes.

use std::io::Write;
use std::path::Path;

use gamma1_core::DensityReport;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const SCAN_HEADER: &str =
    "q,k,delta,testfn,d_total,main_term,p_term,p2_term,s1,s2,m_off,eps_off,tail_bound_total,certified";
pub const BLOCK_HEADER: &str = "P,S,T,case,block_value,bound_ratio";
pub const MELLIN_HEADER: &str = "v,abs_M1,regime,bound_ratio";

/// 17 significant digits, round-trip safe.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn scan_row(report: &DensityReport) -> String {
    let r = report;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.q,
        r.k,
        real(r.delta),
        r.testfn,
        real(r.d_total),
        real(r.main_term),
        real(r.p_term),
        real(r.p2_term),
        real(r.s1),
        real(r.s2),
        real(r.m_off),
        real(r.eps_off),
        real(r.tail_bound_total),
        r.certified
    )
}

/// Row for a level whose computation failed.
pub fn failed_scan_row(cfg: &RunConfig, q: u64) -> String {
    let nan = real(f64::NAN);
    let fill = vec![nan; 9].join(",");
    format!("{q},{},{},{},{fill},false", cfg.k, real(cfg.delta), cfg.testfn)
}

#[derive(Debug, Serialize)]
pub struct Provenance<'a> {
    pub config: &'a RunConfig,
    pub build_id: &'static str,
    pub version: &'static str,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct DensityEnvelope<'a> {
    pub report: &'a DensityReport,
    pub provenance: Provenance<'a>,
}

pub fn build_id() -> &'static str {
    option_env!("GAMMA1_BUILD_ID").unwrap_or("unknown")
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
