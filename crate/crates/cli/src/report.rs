//! Output rendering. JSON is the canonical form (schema files live under
//! `docs/schemas/`); CSV is a flat projection of the same numbers, and
//! `--plot-data` emits bare `(x, y)` series for external plotting tools.
//!
//! All floats are printed with `Display`, whose shortest-round-trip
//! output parses back to the identical bits — so JSON, CSV, and plot
//! files agree exactly on every value they share.

use curve_census::census::{CensusReport, MomentReport, PoissonRow};
use serde::Serialize;

use crate::CliError;

/// Everything one `scan` run produced: per-`N` censuses and, with
/// `--aggregate`, the window-averaged Poisson comparison.
#[derive(Debug, Serialize)]
pub struct ScanOutput {
    pub reports: Vec<CensusReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poisson_rows: Option<Vec<PoissonRow>>,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Internal(format!("serialization: {e}")))
}

/// One row per `(N, ell)` histogram cell; the Poisson rows, if any,
/// follow as a second headed table after a blank line.
pub fn scan_csv(output: &ScanOutput) -> String {
    let mut s = String::from("n,family_size,lambda,excluded_pairs,ell,count\n");
    for report in &output.reports {
        for (ell, &count) in report.histogram.iter().enumerate() {
            s += &format!(
                "{},{},{},{},{ell},{count}\n",
                report.n, report.family_size, report.lambda, report.excluded_pairs
            );
        }
    }
    if let Some(rows) = &output.poisson_rows {
        s.push('\n');
        s += &poisson_csv(rows);
    }
    s
}

pub fn poisson_csv(rows: &[PoissonRow]) -> String {
    let mut s = String::from("ell,empirical,raw_reference,poisson_reference,ratio\n");
    for row in rows {
        s += &format!(
            "{},{},{},{},{}\n",
            row.ell, row.empirical, row.raw_reference, row.poisson_reference, row.ratio
        );
    }
    s
}

/// Summary row, then one row per expansion term after a blank line.
pub fn moment_csv(report: &MomentReport) -> String {
    let mut s = String::from("x,ell,r,gamma1,family_size,empirical,predicted\n");
    s += &format!(
        "{},{},{},{},{},{},{}\n",
        report.x, report.ell, report.r, report.gamma1, report.family_size, report.empirical,
        report.predicted
    );
    s += "\nm,c_value,d_value,li_value,product\n";
    for term in &report.terms {
        s += &format!(
            "{},{},{},{},{}\n",
            term.m, term.c_value, term.d_value, term.li_value, term.product
        );
    }
    s
}

/// `N` vs the census mean, one line per `N`.
pub fn lambda_series(reports: &[CensusReport]) -> String {
    let mut s = String::from("# N lambda\n");
    for r in reports {
        s += &format!("{} {}\n", r.n, r.lambda);
    }
    s
}

/// `ell` vs curve count for a single census.
pub fn histogram_series(report: &CensusReport) -> String {
    let mut s = format!("# ell count (N = {})\n", report.n);
    for (ell, &count) in report.histogram.iter().enumerate() {
        s += &format!("{ell} {count}\n");
    }
    s
}

/// Two series over `ell`: observed mass and the Poisson reference.
pub fn poisson_series(rows: &[PoissonRow]) -> (String, String) {
    let mut empirical = String::from("# ell empirical\n");
    let mut reference = String::from("# ell poisson_reference\n");
    for row in rows {
        empirical += &format!("{} {}\n", row.ell, row.empirical);
        reference += &format!("{} {}\n", row.ell, row.poisson_reference);
    }
    (empirical, reference)
}

/// `m` vs the full term `C(m) d(m) Li_m(x)` of the moment expansion.
pub fn moment_terms_series(report: &MomentReport) -> String {
    let mut s = String::from("# m term\n");
    for term in &report.terms {
        s += &format!("{} {}\n", term.m, term.product);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use curve_census::census::{run_census, FamilySpec};

    fn sample() -> CensusReport {
        run_census(FamilySpec::new(6, 6).unwrap(), 9, 1).unwrap()
    }

    #[test]
    fn csv_numbers_parse_back_to_the_json_values() {
        let report = sample();
        let rows = curve_census::census::poisson_compare(&report, 2);
        let output = ScanOutput { reports: vec![report], poisson_rows: Some(rows) };

        let json: serde_json::Value =
            serde_json::from_str(&to_json(&output).unwrap()).unwrap();
        let csv = scan_csv(&output);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "n,family_size,lambda,excluded_pairs,ell,count");

        let hist = json["reports"][0]["histogram"].as_array().unwrap();
        for (ell, line) in lines.by_ref().take_while(|l| !l.is_empty()).enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields[0].parse::<u64>().unwrap(), json["reports"][0]["n"].as_u64().unwrap());
            assert_eq!(
                fields[2].parse::<f64>().unwrap(),
                json["reports"][0]["lambda"].as_f64().unwrap()
            );
            assert_eq!(fields[4].parse::<usize>().unwrap(), ell);
            assert_eq!(fields[5].parse::<u64>().unwrap(), hist[ell].as_u64().unwrap());
        }

        let poisson = json["poisson_rows"].as_array().unwrap();
        assert_eq!(lines.next().unwrap(), "ell,empirical,raw_reference,poisson_reference,ratio");
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(
                fields[1].parse::<f64>().unwrap(),
                poisson[i]["empirical"].as_f64().unwrap()
            );
            assert_eq!(
                fields[3].parse::<f64>().unwrap(),
                poisson[i]["poisson_reference"].as_f64().unwrap()
            );
        }
    }

    #[test]
    fn json_omits_absent_poisson_rows() {
        let output = ScanOutput { reports: vec![sample()], poisson_rows: None };
        let json: serde_json::Value =
            serde_json::from_str(&to_json(&output).unwrap()).unwrap();
        assert!(json.get("poisson_rows").is_none());
    }

    #[test]
    fn series_files_are_commented_xy_pairs() {
        let report = sample();
        let lambda = lambda_series(std::slice::from_ref(&report));
        let mut lines = lambda.lines();
        assert!(lines.next().unwrap().starts_with('#'));
        let first: Vec<&str> = lines.next().unwrap().split(' ').collect();
        assert_eq!(first[0], "9");
        assert_eq!(first[1].parse::<f64>().unwrap(), report.lambda);

        let hist = histogram_series(&report);
        let data_lines = hist.lines().skip(1).count();
        assert_eq!(data_lines, report.histogram.len());
    }
}
