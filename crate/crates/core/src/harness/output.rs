use std::io::Write;

use serde::Serialize;

use crate::error::Result;

use super::agent::AgentRecord;
use super::bandit::BanditRecord;
use super::bound::BoundRow;
use super::sweep::SweepTable;

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn write_rows<W: Write, R: Serialize>(w: W, header: &[&str], rows: &[R]) -> Result<()> {
    let mut out = writer(w);
    if rows.is_empty() {
        out.write_record(header)?;
    }
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

/// `seed,step,eta,algo,env,cum_reward`
pub fn write_agent_csv<W: Write>(w: W, records: &[AgentRecord]) -> Result<()> {
    write_rows(w, &["seed", "step", "eta", "algo", "env", "cum_reward"], records)
}

/// `seed,round,arm,payoff,regret_best_arm,h_running`
pub fn write_bandit_csv<W: Write>(w: W, records: &[BanditRecord]) -> Result<()> {
    write_rows(
        w,
        &["seed", "round", "arm", "payoff", "regret_best_arm", "h_running"],
        records,
    )
}

/// `eta,seed,final_cum_reward`
pub fn write_sweep_csv<W: Write>(w: W, table: &SweepTable) -> Result<()> {
    write_rows(w, &["eta", "seed", "final_cum_reward"], &table.rows())
}

pub fn write_bound_csv<W: Write>(w: W, rows: &[BoundRow]) -> Result<()> {
    write_rows(
        w,
        &[
            "horizon",
            "seeds",
            "h",
            "h_closed_form",
            "est_regret_q50",
            "est_regret_q95",
            "est_regret_q100",
            "true_regret_mean",
            "true_regret_q50",
            "true_regret_q95",
            "true_regret_q100",
            "excess_q95",
        ],
        rows,
    )
}
