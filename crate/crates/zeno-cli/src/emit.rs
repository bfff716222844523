//! Deterministic byte emission for every output format.
//!
//! CSV uses LF line endings, '.' decimal separators, and Rust's shortest
//! round-trip float formatting, so identical inputs produce identical bytes.
//! JSON goes through serde_json with stable field order (structs) and sorted
//! keys (BTreeMaps).

use std::io::Write;

use zeno_core::tsvf::{RunReport, TraceRow};

/// Shortest round-trip formatting; folds -0.0 into 0.0 so exact zeros print
/// as a bare `0` regardless of sign rounding.
pub fn fmt_f64(v: f64) -> String {
    format!("{}", v + 0.0)
}

fn push_row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

fn opt_u32(v: Option<u32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const TRACE_HEADER: &str = "slice_index,event_kind,m,n,\
fwd_a_re,fwd_a_im,fwd_b_re,fwd_b_im,fwd_c_re,fwd_c_im,\
bwd_a_re,bwd_a_im,bwd_b_re,bwd_b_im,bwd_c_re,bwd_c_im,\
w_a_re,w_a_im,w_b_re,w_b_im,w_c_re,w_c_im,abl_c";

/// Full presence trace: forward, backward, weak values, channel ABL.
pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::new();
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for row in rows {
        let mut fields = vec![
            row.slice_index.to_string(),
            row.event_kind.to_string(),
            opt_u32(row.cycle),
            opt_u32(row.step),
        ];
        for group in [&row.forward, &row.backward, &row.weak_values] {
            for amp in group {
                fields.push(fmt_f64(amp.re));
                fields.push(fmt_f64(amp.im));
            }
        }
        fields.push(fmt_f64(row.abl_c));
        push_row(&mut out, &fields);
    }
    out
}

pub const WEAK_HEADER: &str =
    "slice_index,event_kind,m,n,w_a_re,w_a_im,w_b_re,w_b_im,w_c_re,w_c_im,abl_c";

/// Weak-value columns of the presence trace.
pub fn weakvalues_csv(rows: &[TraceRow]) -> String {
    let mut out = String::new();
    out.push_str(WEAK_HEADER);
    out.push('\n');
    for row in rows {
        let mut fields = vec![
            row.slice_index.to_string(),
            row.event_kind.to_string(),
            opt_u32(row.cycle),
            opt_u32(row.step),
        ];
        for amp in &row.weak_values {
            fields.push(fmt_f64(amp.re));
            fields.push(fmt_f64(amp.im));
        }
        fields.push(fmt_f64(row.abl_c));
        push_row(&mut out, &fields);
    }
    out
}

pub fn json_pretty(value: &impl serde::Serialize) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report types serialize");
    out.push('\n');
    out
}

/// Flat key,value rendering of a run report.
pub fn report_csv(report: &RunReport) -> String {
    let mut out = String::from("key,value\n");
    push_row(&mut out, &["M".into(), report.params.outer_cycles.to_string()]);
    push_row(&mut out, &["N".into(), report.params.inner_cycles.to_string()]);
    push_row(&mut out, &["bit".into(), report.params.bit.as_u8().to_string()]);
    push_row(&mut out, &["p_D1".into(), fmt_f64(report.p_d1)]);
    push_row(&mut out, &["p_D2".into(), fmt_f64(report.p_d2)]);
    for (cycle, p) in &report.p_d3 {
        push_row(&mut out, &[format!("p_D3:{cycle}"), fmt_f64(*p)]);
    }
    for (cycle, steps) in &report.p_bob_absorb {
        for (step, p) in steps {
            push_row(&mut out, &[format!("p_bob_absorb:{cycle}:{step}"), fmt_f64(*p)]);
        }
    }
    push_row(&mut out, &["total".into(), fmt_f64(report.total)]);
    out
}

/// Eavesdropper densities on the shared grid.
pub fn density_csv(xs: &[f64], p0: &[f64], p1: &[f64]) -> String {
    let mut out = String::from("x,p0,p1\n");
    for i in 0..xs.len() {
        push_row(&mut out, &[fmt_f64(xs[i]), fmt_f64(p0[i]), fmt_f64(p1[i])]);
    }
    out
}

pub fn detector_sweep_csv(rows: &[zeno_core::DetectorPoint]) -> String {
    let mut out = String::from("m,n,bit,p_d1,p_d2,p_d3_sum,p_absorb_sum\n");
    for r in rows {
        push_row(
            &mut out,
            &[
                r.m.to_string(),
                r.n.to_string(),
                r.bit.as_u8().to_string(),
                fmt_f64(r.p_d1),
                fmt_f64(r.p_d2),
                fmt_f64(r.p_d3_sum),
                fmt_f64(r.p_absorb_sum),
            ],
        );
    }
    out
}

pub fn eve_sweep_csv(rows: &[zeno_core::EvePoint]) -> String {
    let mut out = String::from("m,n,g,mutual_information_bits,tv_distance\n");
    for r in rows {
        push_row(
            &mut out,
            &[
                r.m.to_string(),
                r.n.to_string(),
                fmt_f64(r.g),
                fmt_f64(r.mutual_information_bits),
                fmt_f64(r.tv_distance),
            ],
        );
    }
    out
}

/// Single-line machine-readable error for stderr.
pub fn error_json(code: &str, message: &str) -> String {
    serde_json::to_string(&serde_json::json!({ "code": code, "message": message }))
        .expect("error json serializes")
}

/// Write to a file, or to stdout when the path is `-`.
pub fn write_output(path: &str, bytes: &str) -> std::io::Result<()> {
    if path == "-" {
        std::io::stdout().lock().write_all(bytes.as_bytes())
    } else {
        std::fs::write(path, bytes)
    }
}
