//! Deterministic JSON rendering of verification reports.
//!
//! Hand-rolled writer so the byte stream is fully under our control: fixed
//! key order, two-space indentation, and every real number serialized with
//! 17 significant digits ({:.16e}), which round-trips f64 exactly. Two runs
//! with the same resolved config differ only in the timestamp line.

use crate::verify::ResidualReport;

use super::ResolvedConfig;

/// 17-significant-digit exponent form; valid JSON number syntax.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct JsonWriter {
    out: String,
    indent: usize,
    comma_pending: Vec<bool>,
}

impl JsonWriter {
    pub fn new() -> Self {
        Self {
            out: String::new(),
            indent: 0,
            comma_pending: vec![false],
        }
    }

    pub fn finish(mut self) -> String {
        self.out.push('\n');
        self.out
    }

    fn newline_item(&mut self) {
        if let Some(last) = self.comma_pending.last_mut() {
            if *last {
                self.out.push(',');
            }
            *last = true;
        }
        self.out.push('\n');
        for _ in 0..self.indent {
            self.out.push_str("  ");
        }
    }

    fn open(&mut self, bracket: char) {
        // A container is either the value of a key (inline after ": "), an
        // array element (fresh line), or the document root.
        if !self.out.ends_with(": ") && !self.out.is_empty() {
            self.newline_item();
        }
        self.out.push(bracket);
        self.indent += 1;
        self.comma_pending.push(false);
    }

    fn close(&mut self, bracket: char) {
        let had_items = self.comma_pending.pop().unwrap_or(false);
        self.indent -= 1;
        if had_items {
            self.out.push('\n');
            for _ in 0..self.indent {
                self.out.push_str("  ");
            }
        }
        self.out.push(bracket);
        // The finished container counts as an item of its parent.
        if let Some(last) = self.comma_pending.last_mut() {
            *last = true;
        }
    }

    pub fn begin_object(&mut self) {
        self.open('{');
    }

    pub fn end_object(&mut self) {
        self.close('}');
    }

    pub fn begin_array(&mut self) {
        self.open('[');
    }

    pub fn end_array(&mut self) {
        self.close(']');
    }

    pub fn key(&mut self, name: &str) {
        self.newline_item();
        self.out.push('"');
        self.out.push_str(name);
        self.out.push_str("\": ");
        // The upcoming value is part of this item.
        if let Some(last) = self.comma_pending.last_mut() {
            *last = false;
        }
    }

    fn raw_value(&mut self, v: &str) {
        // Either an array element (needs its own line) or a keyed value.
        if self.out.ends_with(": ") {
            self.out.push_str(v);
        } else {
            self.newline_item();
            self.out.push_str(v);
        }
        if let Some(last) = self.comma_pending.last_mut() {
            *last = true;
        }
    }

    pub fn value_str(&mut self, v: &str) {
        let escaped = v
            .replace('\\', "\\\\")
            .replace('"', "\\\"")
            .replace('\n', "\\n");
        self.raw_value(&format!("\"{escaped}\""));
    }

    pub fn value_f64(&mut self, v: f64) {
        self.raw_value(&fmt_f64(v));
    }

    pub fn value_usize(&mut self, v: usize) {
        self.raw_value(&v.to_string());
    }

    pub fn value_i32(&mut self, v: i32) {
        self.raw_value(&v.to_string());
    }

    pub fn value_null(&mut self) {
        self.raw_value("null");
    }

    pub fn key_begin_object(&mut self, name: &str) {
        self.key(name);
        self.begin_object();
    }

    pub fn key_begin_array(&mut self, name: &str) {
        self.key(name);
        self.begin_array();
    }
}

impl Default for JsonWriter {
    fn default() -> Self {
        Self::new()
    }
}

/// UTC timestamp "YYYY-MM-DDTHH:MM:SSZ" from the system clock.
pub fn utc_timestamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs() as i64)
        .unwrap_or(0);
    format_epoch(secs)
}

/// Civil-from-days conversion (Howard Hinnant's algorithm).
pub fn format_epoch(secs: i64) -> String {
    let days = secs.div_euclid(86_400);
    let rem = secs.rem_euclid(86_400);
    let (h, m, s) = (rem / 3600, (rem / 60) % 60, rem % 60);
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let mth = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = if mth <= 2 { y + 1 } else { y };
    format!("{y:04}-{mth:02}-{d:02}T{h:02}:{m:02}:{s:02}Z")
}

fn write_config(w: &mut JsonWriter, config: &ResolvedConfig) {
    w.begin_object();
    w.key("command");
    w.value_str(&config.command);
    w.key_begin_array("family");
    for f in &config.family {
        w.value_str(f);
    }
    w.end_array();
    w.key("grid");
    w.value_usize(config.grid);
    w.key("kappa");
    w.value_f64(config.kappa);
    w.key("rho");
    w.value_f64(config.rho);
    w.key_begin_array("abc");
    for v in config.abc {
        w.value_f64(v);
    }
    w.end_array();
    w.key("forcing");
    w.value_str(&config.forcing);
    w.key_begin_array("times");
    for t in &config.times {
        w.value_f64(*t);
    }
    w.end_array();
    w.key("panels");
    w.value_usize(config.panels);
    w.key("backend");
    w.value_str(&config.backend);
    w.key("out");
    w.value_str(&config.out);
    w.key("format");
    w.value_str(&config.format);
    if let Some(c) = config.corrupt_velocity {
        w.key("corrupt-velocity");
        w.value_f64(c);
    }
    if let Some(study) = &config.study {
        w.key("study");
        w.value_str(study);
    }
    if let Some(res) = &config.resolutions {
        w.key_begin_array("resolutions");
        for r in res {
            w.value_usize(*r);
        }
        w.end_array();
    }
    w.end_object();
}

fn write_family_report(w: &mut JsonWriter, report: &ResidualReport) {
    w.begin_object();
    w.key("family");
    w.value_str(report.family.name());
    w.key_begin_object("grid");
    w.key("dim");
    w.value_usize(report.grid.dim());
    w.key_begin_array("resolution");
    for n in report.grid.resolution() {
        w.value_usize(*n);
    }
    w.end_array();
    w.key_begin_array("period");
    for p in report.grid.period() {
        w.value_f64(*p);
    }
    w.end_array();
    w.key_begin_array("origin");
    for o in report.grid.origin() {
        w.value_f64(*o);
    }
    w.end_array();
    w.end_object();
    if let Some(scale) = report.velocity_scale {
        w.key("velocity-scale");
        w.value_f64(scale);
    }
    w.key_begin_array("times");
    for t in &report.times {
        w.value_f64(*t);
    }
    w.end_array();
    w.key_begin_array("norms");
    for n in &report.norms {
        w.begin_object();
        w.key("t");
        w.value_f64(n.t);
        w.key("momentum_sup");
        w.value_f64(n.momentum_sup);
        w.key("momentum_l2");
        w.value_f64(n.momentum_l2);
        w.key("divergence_sup");
        w.value_f64(n.divergence_sup);
        w.key("umbilical_sup");
        w.value_f64(n.umbilical_sup);
        w.key("ppe_pressure_sup_err");
        w.value_f64(n.ppe_pressure_sup_err);
        w.key("inertial_closed_form_sup_err");
        match n.inertial_closed_form_sup_err {
            Some(v) => w.value_f64(v),
            None => w.value_null(),
        }
        w.key("curl_advection_sup");
        w.value_f64(n.curl_advection_sup);
        w.end_object();
    }
    w.end_array();
    w.key_begin_array("energy");
    for (t, e) in &report.energy_series {
        w.begin_object();
        w.key("t");
        w.value_f64(*t);
        w.key("e_cell");
        w.value_f64(*e);
        w.end_object();
    }
    w.end_array();
    w.key_begin_array("verdicts");
    for v in &report.verdicts {
        w.begin_object();
        w.key("claim");
        w.value_str(v.claim.name());
        w.key("status");
        w.value_str(v.status.name());
        w.key("verdict");
        w.value_str(v.verdict.name());
        w.key("measured");
        w.value_f64(v.measured);
        w.key("tolerance");
        w.value_f64(v.tolerance);
        if let Some(p) = v.predicted {
            w.key("predicted");
            w.value_f64(p);
        }
        w.end_object();
    }
    w.end_array();
    w.key_begin_object("tolerances");
    w.key("momentum_sup");
    w.value_f64(report.tolerances.momentum_sup);
    w.key("divergence_sup");
    w.value_f64(report.tolerances.divergence_sup);
    w.key("umbilical_sup");
    w.value_f64(report.tolerances.umbilical_sup);
    w.key("ppe_pressure_sup");
    w.value_f64(report.tolerances.ppe_pressure_sup);
    w.key("energy_relative");
    w.value_f64(report.tolerances.energy_relative);
    w.key("symbolic_oracle_match");
    w.value_f64(report.tolerances.symbolic_oracle_match);
    w.end_object();
    w.end_object();
}

/// Render the full verification report document.
pub fn render_verify_report(
    config: &ResolvedConfig,
    reports: &[ResidualReport],
    exit: i32,
    timestamp: &str,
) -> String {
    let mut w = JsonWriter::new();
    w.begin_object();
    w.key("schema");
    w.value_str("ns-verify/1");
    w.key("timestamp");
    w.value_str(timestamp);
    w.key("config");
    write_config(&mut w, config);
    w.key_begin_array("families");
    for r in reports {
        write_family_report(&mut w, r);
    }
    w.end_array();
    w.key_begin_object("summary");
    w.key("failures");
    w.value_usize(reports.iter().filter(|r| r.has_failure()).count());
    w.key("contradictions");
    w.value_usize(reports.iter().filter(|r| r.has_contradiction()).count());
    w.key("exit_code");
    w.value_i32(exit);
    w.end_object();
    w.end_object();
    w.finish()
}

/// Render the evolve-command report document.
pub fn render_evolve_report(
    config: &ResolvedConfig,
    rows: &[(String, f64, usize, Option<f64>)],
    timestamp: &str,
) -> String {
    let mut w = JsonWriter::new();
    w.begin_object();
    w.key("schema");
    w.value_str("ns-verify/1");
    w.key("timestamp");
    w.value_str(timestamp);
    w.key("config");
    write_config(&mut w, config);
    w.key_begin_array("results");
    for (family, t, panels, diff) in rows {
        w.begin_object();
        w.key("family");
        w.value_str(family);
        w.key("t");
        w.value_f64(*t);
        w.key("panels");
        w.value_usize(*panels);
        w.key("sup_diff_vs_closed_form");
        match diff {
            Some(v) => w.value_f64(*v),
            None => w.value_null(),
        }
        w.end_object();
    }
    w.end_array();
    w.end_object();
    w.finish()
}
