use std::collections::BTreeSet;

/// Chooses the column holding the entities the rows describe.
pub trait SubjectColumnScorer: Send + Sync {
    fn subject_column(&self, column_names: &[String], cells: &[Vec<String>]) -> usize;
}

/// Leftmost non-numeric-majority column with the highest distinct-value
/// ratio; column 0 when every column is numeric.
#[derive(Debug, Clone, Copy, Default)]
pub struct DistinctNonNumeric;

impl SubjectColumnScorer for DistinctNonNumeric {
    fn subject_column(&self, _column_names: &[String], cells: &[Vec<String>]) -> usize {
        let width = cells.first().map_or(0, Vec::len);
        let rows = cells.len().max(1) as f64;
        let mut best: Option<(usize, f64)> = None;
        for c in 0..width {
            let values: Vec<&str> = cells.iter().map(|r| r[c].trim()).filter(|v| !v.is_empty()).collect();
            let numeric = values.iter().filter(|v| is_numeric(v)).count();
            if values.is_empty() || 2 * numeric >= values.len() {
                continue;
            }
            let distinct = values.iter().map(|v| v.to_lowercase()).collect::<BTreeSet<_>>().len();
            let ratio = distinct as f64 / rows;
            if best.is_none_or(|(_, r)| ratio > r) {
                best = Some((c, ratio));
            }
        }
        best.map_or(0, |(c, _)| c)
    }
}

pub fn identify_subject_column(column_names: &[String], cells: &[Vec<String>]) -> usize {
    DistinctNonNumeric.subject_column(column_names, cells)
}

/// Numbers with optional sign, thousands separators, currency prefix,
/// percent or unit-free decimal.
pub fn is_numeric(s: &str) -> bool {
    let t = s.trim().trim_start_matches(['$', '£', '€', '+', '-']).trim_end_matches('%');
    let t: String = t.chars().filter(|&c| c != ',').collect();
    !t.is_empty() && t.parse::<f64>().is_ok_and(f64::is_finite)
}
