use crate::scalar::Scalar;
use crate::set::key_to_vec;

use super::run::{Mode, RunTrace};

/// Line-oriented rendering of a trace: one record per vertex decision and
/// one per Gamma insertion, for replay and diffing.
pub fn render_trace<R: Scalar>(trace: &RunTrace<R>) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "trace mode={} kind={} tau={} zeta={} input={}\n",
        trace.mode, trace.kind, trace.tau, trace.zeta, trace.input
    ));
    out.push_str(&format!("lowdeg set={}\n", trace.b));
    for d in &trace.decisions {
        let sizes: Vec<String> = d.candidate_sizes.iter().map(|s| s.to_string()).collect();
        let breached: Vec<String> = d.breached_levels.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!(
            "decision v={} lowdeg={} f={} breach={} gamma1={} fired={} in_input={} updated={}\n",
            d.vertex,
            yn(d.in_low_degree_set),
            sizes.join("/"),
            if breached.is_empty() {
                "-".to_string()
            } else {
                breached.join("/")
            },
            yn(d.via_gamma1),
            yn(d.fired),
            yn(d.in_input),
            yn(d.updated),
        ));
    }
    // gamma insertions sorted for deterministic output
    let mut rows: Vec<String> = Vec::new();
    for s in 1..trace.p_sizes.len() as u32 {
        if (s as usize) >= trace.p_sizes.len() - 1 && trace.p_sizes.len() > 1 {
            // levels run 1..r-1
        }
        if (s as usize) < trace.p_sizes.len() - 1 {
            for (&key, rec) in trace.gamma_level(s) {
                let sigma: Vec<String> = key_to_vec(key).iter().map(|v| v.to_string()).collect();
                rows.push(format!(
                    "gamma s={s} sigma={} at={} d={} theta={}",
                    sigma.join(","),
                    rec.at_vertex,
                    rec.degree_at_insert,
                    rec.threshold
                ));
            }
        }
    }
    rows.sort();
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    let sizes: Vec<String> = trace.p_sizes[1..].iter().map(|s| s.to_string()).collect();
    out.push_str(&format!("levels sizes={}\n", sizes.join("/")));
    match trace.mode {
        Mode::Prune => out.push_str(&format!("output T={}\n", trace.t)),
        Mode::Build => out.push_str(&format!("output C={}\n", trace.output())),
    }
    out
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
