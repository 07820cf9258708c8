use std::fmt::Write;
use std::time::Duration;

/// Per-degree bookkeeping of one normalization run.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderRecord {
    pub degree: u32,
    pub v_terms: usize,
    pub k_terms: usize,
    /// Homological divisions performed (non-resonant monomials of `A_l`).
    pub divisions: usize,
    /// Unknowns of the normalization condition (zero in mode `zero`).
    pub resonant_unknowns: usize,
    pub min_divisor: Option<f64>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunLog {
    pub records: Vec<OrderRecord>,
    pub notes: Vec<String>,
}

impl RunLog {
    pub fn total_elapsed(&self) -> Duration {
        self.records.iter().map(|r| r.elapsed).sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for note in &self.notes {
            let _ = writeln!(out, "# {note}");
        }
        out.push_str("degree,v_terms,k_terms,divisions,resonant_unknowns,min_divisor,seconds\n");
        for r in &self.records {
            let md = r.min_divisor.map_or_else(|| "-".to_string(), |d| format!("{d:e}"));
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.6}",
                r.degree,
                r.v_terms,
                r.k_terms,
                r.divisions,
                r.resonant_unknowns,
                md,
                r.elapsed.as_secs_f64()
            );
        }
        out
    }
}
