//! Output encodings: JSON values, CSV and plain-text tables.
//!
//! Labels are always written in their canonical text form, and every list is
//! emitted in canonical label order, so JSON output is byte-stable.

use std::fmt::Display;

use kappa_core::exactlin::{FormalSum, Rational, SparseMatrix};
use kappa_core::strata::MarkedTree;
use kappa_core::verify::{CheckReport, Params, Status, Witness};
use serde_json::{json, Map, Value};

/// Numerator/denominator as JSON numbers, or as decimal strings once they
/// no longer fit in an `i64`.
pub fn rational_parts(r: &Rational) -> (Value, Value) {
    match r.to_i64_pair() {
        Some((n, d)) => (json!(n), json!(d)),
        None => (json!(r.numer().to_string()), json!(r.denom().to_string())),
    }
}

pub fn sum_json<L: Ord + Clone + Display>(sum: &FormalSum<L>) -> Value {
    Value::Array(
        sum.iter()
            .map(|(l, c)| {
                let (num, den) = rational_parts(c);
                json!({"label": l.to_string(), "num": num, "den": den})
            })
            .collect(),
    )
}

pub fn matrix_json<L: Ord + Clone + Display>(n: usize, d: i32, row_labels: &[String], m: &SparseMatrix<L>) -> Value {
    json!({
        "n": n,
        "d": d,
        "universe": m.universe().iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "row_labels": row_labels,
        "rows": m.rows().iter().map(sum_json).collect::<Vec<_>>(),
    })
}

/// Dense CSV: a header of column labels, then one line per row.
pub fn matrix_csv<L: Ord + Clone + Display>(row_labels: &[String], m: &SparseMatrix<L>) -> String {
    let mut header = vec!["row".to_string()];
    header.extend(m.universe().iter().map(|l| l.to_string()));
    let mut lines = vec![header];
    for (label, row) in row_labels.iter().zip(m.to_dense()) {
        let mut line = vec![label.clone()];
        line.extend(row.iter().map(|c| c.to_string()));
        lines.push(line);
    }
    csv_string(&lines)
}

pub fn matrix_table<L: Ord + Clone + Display>(row_labels: &[String], m: &SparseMatrix<L>) -> String {
    let mut headers = vec![String::new()];
    headers.extend(m.universe().iter().map(|l| l.to_string()));
    let rows = row_labels
        .iter()
        .zip(m.to_dense())
        .map(|(label, row)| {
            let mut line = vec![label.clone()];
            line.extend(row.iter().map(|c| c.to_string()));
            line
        })
        .collect::<Vec<_>>();
    table(&headers, &rows)
}

/// RFC 4180 quoting; partition labels contain commas.
pub fn csv_string(lines: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    for line in lines {
        w.write_record(line).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("labels are UTF-8")
}

/// Left-aligned columns separated by two spaces.
pub fn table(headers: &[String], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut width = headers.iter().map(|h| h.chars().count()).collect::<Vec<_>>();
    for r in rows {
        for (i, c) in r.iter().enumerate().take(cols) {
            width[i] = width[i].max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells.iter().enumerate().map(|(i, c)| format!("{c:<w$}", w = width[i])).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers);
    for r in rows {
        out += &line(r);
    }
    out
}

pub fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::Int(i) => json!(i),
        Witness::Bool(b) => json!(b),
        Witness::Text(t) => json!(t),
        Witness::List(l) => Value::Array(l.iter().map(witness_json).collect()),
    }
}

pub fn params_json(p: &Params) -> Value {
    match p {
        Params::Cell { n, d } => json!({"n": n, "d": d}),
        Params::Size { n } => json!({"n": n}),
        Params::UpTo { n_max } => json!({"n_max": n_max}),
    }
}

pub fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
    }
}

pub fn report_json(r: &CheckReport) -> Value {
    let mut witness = Map::new();
    for (k, v) in &r.witness {
        witness.insert(k.clone(), witness_json(v));
    }
    json!({
        "check": r.check.name(),
        "params": params_json(&r.params),
        "status": status_str(r.status),
        "vacuous": r.vacuous,
        "witness": witness,
    })
}

pub fn tree_json(t: &MarkedTree) -> Value {
    let legs: Map<String, Value> = t.legs().iter().enumerate().map(|(i, v)| ((i + 1).to_string(), json!(v))).collect();
    json!({
        "vertices": t.vertices(),
        "edges": t.edges().iter().map(|(a, b)| [a, b]).collect::<Vec<_>>(),
        "legs": legs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use kappa_core::setcomb::SetPartition;

    #[test]
    fn csv_quotes_partition_labels() {
        let s = csv_string(&[vec!["1,2|3".into(), "x".into()]]);
        assert_eq!(s, "\"1,2|3\",x\n");
    }

    #[test]
    fn big_rationals_become_strings() {
        let big = Rational::from(i64::MAX) * Rational::from(4);
        let (n, d) = rational_parts(&big);
        assert!(n.is_string());
        assert_eq!(d, json!("1"));
        assert_eq!(rational_parts(&Rational::new(-3, 6)), (json!(-1), json!(2)));
    }

    // blocks compare as lists, so {1} before {1,2}
    #[test]
    fn sums_in_label_order() {
        let a = SetPartition::parse("1|2,3").unwrap();
        let b = SetPartition::parse("1,2|3").unwrap();
        let s: FormalSum<SetPartition> = [(a, Rational::ONE), (b, Rational::from(-2))].into_iter().collect();
        assert_eq!(
            sum_json(&s).to_string(),
            r#"[{"den":1,"label":"1|2,3","num":1},{"den":1,"label":"1,2|3","num":-2}]"#
        );
    }

    #[test]
    fn table_alignment() {
        let t = table(&["a".into(), "bb".into()], &[vec!["ccc".into(), "d".into()]]);
        assert_eq!(t, "a    bb\nccc  d\n");
    }
}
