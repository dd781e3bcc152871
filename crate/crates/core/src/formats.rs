//! File formats: request matrices (JSON or CSV), rate reports (JSON) and
//! rate curves (CSV).
//!
//! Request JSON looks like `{"n": 3, "m": 3, "L": 2, "requests": [[1, 2], ...]}`;
//! request CSV has one line per user listing its file ids. Curve CSV carries
//! every rate both as an exact `p/q` string and as a decimal.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::RateReport;
use crate::error::{Error, Result};
use crate::model::{RequestMatrix, SystemParams};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct RequestFile {
    n: usize,
    m: usize,
    #[serde(rename = "L")]
    l: usize,
    requests: Vec<Vec<usize>>,
}

pub fn requests_to_json(demands: &RequestMatrix) -> Result<String> {
    let file = RequestFile {
        n: demands.users(),
        m: demands.files(),
        l: demands.requests_per_user(),
        requests: demands.rows().to_vec(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn requests_from_json(text: &str) -> Result<RequestMatrix> {
    let file: RequestFile = serde_json::from_str(text)?;
    if file.requests.len() != file.n {
        return Err(Error::InvalidRequests(format!(
            "{} request rows for n = {}",
            file.requests.len(),
            file.n
        )));
    }
    RequestMatrix::new(file.m, file.l, file.requests)
}

pub fn requests_to_csv(demands: &RequestMatrix) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for row in demands.rows() {
        w.write_record(row.iter().map(usize::to_string))?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Parse(e.to_string()))?)
        .map_err(|e| Error::Parse(e.to_string()))
}

/// CSV does not carry `m` or `L`, so they come from `params`.
pub fn requests_from_csv(text: &str, params: &SystemParams) -> Result<RequestMatrix> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("file id {cell:?} is not a positive integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    RequestMatrix::for_params(params, rows)
}

/// Reads a request file, choosing the format by extension (`.json`, else CSV).
/// The result is checked against `params`.
pub fn read_requests(path: &Path, params: &SystemParams) -> Result<RequestMatrix> {
    let text = std::fs::read_to_string(path)?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let demands = if is_json {
        requests_from_json(&text)?
    } else {
        requests_from_csv(&text, params)?
    };
    demands.check_params(params)?;
    Ok(demands)
}

pub fn report_to_json(report: &RateReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn report_from_json(text: &str) -> Result<RateReport> {
    Ok(serde_json::from_str(text)?)
}

const RATE_COLUMNS: [&str; 7] = ["r_exact", "r_mn", "r_direct", "r_lc_ub", "r_rand", "r_lb", "gap"];

pub fn curve_header() -> Vec<String> {
    let mut header: Vec<String> = ["n", "m", "M", "M_dec", "L"].iter().map(|s| s.to_string()).collect();
    for col in RATE_COLUMNS {
        header.push(col.to_string());
        header.push(format!("{col}_dec"));
    }
    header
}

fn rate_cells(value: Option<&Rational>) -> [String; 2] {
    match value {
        Some(v) => [rational::format(v), format!("{:.6}", rational::to_f64(v))],
        None => [String::new(), String::new()],
    }
}

fn curve_record(r: &RateReport) -> Vec<String> {
    let p = &r.params;
    let mut out = vec![p.users.to_string(), p.files.to_string()];
    out.extend(rate_cells(Some(&p.memory)));
    out.push(p.requests.to_string());
    let rates = [
        r.r_exact.as_ref(),
        Some(&r.r_mn),
        Some(&r.r_direct),
        Some(&r.r_lc_ub),
        r.r_rand.as_ref(),
        Some(&r.r_lb),
        Some(&r.gap),
    ];
    for v in rates {
        out.extend(rate_cells(v));
    }
    out
}

/// Writes a header, then one row per report. `comments` become leading
/// `# ` lines. Rows whose sandwich fails are refused.
pub fn write_curve_csv<W: Write>(mut out: W, reports: &[RateReport], comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(curve_header())?;
    for r in reports {
        if !r.sandwich_holds() {
            return Err(Error::InvalidParams(format!(
                "rates at {} violate r_lb <= r_exact <= r_lc_ub",
                r.params
            )));
        }
        w.write_record(curve_record(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the exact columns of a curve CSV back into reports.
pub fn read_curve_csv<R: Read>(input: R) -> Result<Vec<RateReport>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = r.headers()?.clone();
    let idx = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("curve CSV lacks column {name}")))
    };
    let (n, m, mem, l) = (idx("n")?, idx("m")?, idx("M")?, idx("L")?);
    let rates: Vec<usize> = RATE_COLUMNS.iter().map(|c| idx(c)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for record in r.records() {
        let record = record?;
        let int = |i: usize| {
            record[i]
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("not an integer: {:?}", &record[i])))
        };
        let optional = |i: usize| -> Result<Option<Rational>> {
            if record[i].is_empty() {
                Ok(None)
            } else {
                rational::parse(&record[i]).map(Some)
            }
        };
        let required = |i: usize| -> Result<Rational> {
            optional(i)?.ok_or_else(|| Error::Parse(format!("empty cell in column {}", &header[i])))
        };
        let params = SystemParams::new(int(n)?, int(m)?, rational::parse(&record[mem])?, int(l)?)?;
        out.push(RateReport {
            params,
            demands: None,
            r_exact: optional(rates[0])?,
            r_mn: required(rates[1])?,
            r_direct: required(rates[2])?,
            r_lc_ub: required(rates[3])?,
            r_rand: optional(rates[4])?,
            r_lb: required(rates[5])?,
            gap: required(rates[6])?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{gap_report, ExactOptions};
    use crate::rational::{int, rat};

    fn demo() -> SystemParams {
        SystemParams::with_int(3, 3, 1, 2).unwrap()
    }

    #[test]
    fn request_json_round_trip() {
        let f = RequestMatrix::for_params(&demo(), vec![vec![1, 2], vec![1, 2], vec![1, 3]]).unwrap();
        let text = requests_to_json(&f).unwrap();
        assert!(text.contains("\"L\": 2"));
        assert_eq!(requests_from_json(&text).unwrap(), f);
    }

    #[test]
    fn request_csv_round_trip() {
        let f = RequestMatrix::for_params(&demo(), vec![vec![2, 1], vec![1, 3], vec![3, 2]]).unwrap();
        let text = requests_to_csv(&f).unwrap();
        assert_eq!(text, "2,1\n1,3\n3,2\n");
        assert_eq!(requests_from_csv(&text, &demo()).unwrap(), f);
        assert_eq!(requests_from_csv("# users\n 2, 1\n1,3\n3 ,2\n", &demo()).unwrap(), f);
    }

    #[test]
    fn bad_requests() {
        assert!(requests_from_csv("1,1\n1,2\n1,3\n", &demo()).is_err());
        assert!(requests_from_csv("1,2\n1,3\n", &demo()).is_err());
        assert!(requests_from_csv("1,x\n1,2\n1,3\n", &demo()).is_err());
        assert!(requests_from_json(r#"{"n": 2, "m": 3, "L": 1, "requests": [[1]]}"#).is_err());
        assert!(requests_from_json("{").is_err());
    }

    #[test]
    fn report_json_uses_fractions() {
        let r = gap_report(&demo(), true, &ExactOptions::default()).unwrap();
        let text = report_to_json(&r).unwrap();
        assert!(text.contains("\"r_exact\": \"5/3\""), "{text}");
        assert!(text.contains("\"memory\": \"1\""));
        assert_eq!(report_from_json(&text).unwrap(), r);
    }

    #[test]
    fn curve_round_trip() {
        let reports: Vec<RateReport> = [int(0), rat(1, 2), int(1)]
            .into_iter()
            .map(|mem| {
                let p = SystemParams::new(2, 2, mem, 1).unwrap();
                gap_report(&p, true, &ExactOptions::default()).unwrap()
            })
            .collect();
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &reports, &["seed=0".into()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# seed=0\nn,m,M,M_dec,L,r_exact,r_exact_dec,"));
        assert!(text.contains("1/2,0.500000"));
        assert_eq!(read_curve_csv(buf.as_slice()).unwrap(), reports);
    }

    #[test]
    fn curve_refuses_broken_sandwich() {
        let mut r = gap_report(&demo(), false, &ExactOptions::default()).unwrap();
        r.r_exact = Some(int(100));
        assert!(write_curve_csv(Vec::new(), &[r], &[]).is_err());
    }
}
