//! Per-collision rows and their CSV/JSON encodings.

use serde::{Deserialize, Serialize};

use super::ScenarioRun;
use crate::engine::{CollisionConfig, Trajectory};
use crate::error::{Error, Result};
use crate::thermo::ThermoLedger;

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "step,E_S,Q_resource,Q_bath,W,S_S,S_anc,I_SE,Sigma,D_pair";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub step: usize,
    #[serde(rename = "E_S")]
    pub e_s: f64,
    #[serde(rename = "Q_resource")]
    pub q_resource: f64,
    #[serde(rename = "Q_bath")]
    pub q_bath: f64,
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "S_S")]
    pub s_s: f64,
    #[serde(rename = "S_anc")]
    pub s_anc: f64,
    #[serde(rename = "I_SE")]
    pub i_se: f64,
    #[serde(rename = "Sigma")]
    pub sigma: f64,
    #[serde(rename = "D_pair")]
    pub d_pair: Option<f64>,
}

/// Rows for every collision; fails if the ledger invariants do not hold.
pub fn rows(traj: &Trajectory, cfg: &CollisionConfig) -> Result<Vec<Row>> {
    let ledger = ThermoLedger::from_trajectory(traj, cfg)?;
    ledger.check()?;
    Ok(traj
        .records
        .iter()
        .zip(&ledger.steps)
        .map(|(r, e)| Row {
            step: r.step,
            e_s: r.e_sys_after,
            q_resource: e.q_resource,
            q_bath: e.q_bath,
            w: e.w_switch,
            s_s: r.s_sys_after,
            s_anc: r.s_anc_after,
            i_se: e.i_se,
            sigma: e.sigma,
            d_pair: r.d_pair,
        })
        .collect())
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = format!("# schema_version: {SCHEMA_VERSION}\n{CSV_HEADER}\n");
    for r in rows {
        let d = r.d_pair.map(|d| format!("{d:.16e}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{d}\n",
            r.step, r.e_s, r.q_resource, r.q_bath, r.w, r.s_s, r.s_anc, r.i_se, r.sigma
        ));
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<Row>> {
    let bad = |line: usize, what: &str| Error::Config(format!("csv line {line}: {what}"));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l == format!("# schema_version: {SCHEMA_VERSION}") => {}
        _ => return Err(bad(1, "missing schema_version")),
    }
    match lines.next() {
        Some((_, l)) if l == CSV_HEADER => {}
        _ => return Err(bad(2, "unexpected header")),
    }
    lines
        .map(|(k, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 10 {
                return Err(bad(k + 1, "expected 10 fields"));
            }
            let num = |i: usize| f[i].parse::<f64>().map_err(|e| bad(k + 1, &e.to_string()));
            Ok(Row {
                step: f[0].parse().map_err(|_| bad(k + 1, "bad step"))?,
                e_s: num(1)?,
                q_resource: num(2)?,
                q_bath: num(3)?,
                w: num(4)?,
                s_s: num(5)?,
                s_anc: num(6)?,
                i_se: num(7)?,
                sigma: num(8)?,
                d_pair: if f[9].is_empty() { None } else { Some(num(9)?) },
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonDoc {
    pub schema_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub summary: serde_json::Value,
    pub rows: Vec<Row>,
}

pub fn to_json(run: &ScenarioRun, rows: &[Row]) -> Result<String> {
    let doc = JsonDoc {
        schema_version: SCHEMA_VERSION,
        scenario: run.scenario.name().to_string(),
        seed: run.seed,
        summary: run.summary.clone(),
        rows: rows.to_vec(),
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Config(format!("json: {e}")))
}
