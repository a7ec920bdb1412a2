//! File formats: series dumps, lattice definitions, spin matrices,
//! multiplicity tables and lattice series.

use std::fmt::Write as _;

use fakemonster_core::denominator::LatticeSeries;
use fakemonster_core::lattice::{IntegralLattice, LorentzianPoint};
use fakemonster_core::multiplicity::{MultRow, MultTable};
use fakemonster_core::octonion::Matrix8;
use fakemonster_core::series::{Exponent, QSeries, Rational};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::config::Format;

/// Sparse series: `(exponent, coefficient)` pairs as exact fractions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesDump {
    pub name: String,
    pub trunc: String,
    pub terms: Vec<(String, String)>,
}

impl SeriesDump {
    pub fn new(name: &str, s: &QSeries) -> Self {
        SeriesDump {
            name: name.to_string(),
            trunc: s.trunc().to_string(),
            terms: s.terms().map(|(e, c)| (e.to_string(), c.to_string())).collect(),
        }
    }
}

/// Every coefficient from `min(0, valuation)` up to the truncation, in
/// steps of `1/denom`.
pub fn dense_coefficients(s: &QSeries) -> Vec<(Exponent, Rational)> {
    let step = Exponent::new(1, s.denom());
    let mut e = s.valuation().map_or(Exponent::zero(), |v| v.min(Exponent::zero()));
    let mut out = Vec::new();
    while e < s.trunc() {
        out.push((e, s.coeff(e).expect("below truncation")));
        e += step;
    }
    out
}

pub fn render_series(name: &str, s: &QSeries, format: Format) -> String {
    match format {
        Format::Text => {
            let cs: Vec<String> = dense_coefficients(s).iter().map(|(_, c)| c.to_string()).collect();
            let mut out = cs.join(", ");
            out.push('\n');
            out
        }
        Format::Json => {
            let mut out = serde_json::to_string_pretty(&SeriesDump::new(name, s)).expect("serializable");
            out.push('\n');
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["exponent", "coefficient"]).expect("in memory");
            for (e, c) in dense_coefficients(s) {
                w.write_record([e.to_string(), c.to_string()]).expect("in memory");
            }
            String::from_utf8(w.into_inner().expect("in memory")).expect("utf8")
        }
    }
}

/// Integer coefficients of `s` at `q^0 … q^{n-1}`, if they all are.
pub fn leading_integers(s: &QSeries, n: usize) -> Option<Vec<Rational>> {
    let v = s.integer_coeffs(n).ok()?;
    v.iter().all(|c| c.is_integer()).then_some(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDump {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<String>>,
    pub gram: Vec<Vec<i128>>,
}

/// Basis rows as fraction strings and the Gram matrix, which must be
/// integral.
pub fn lattice_json(l: &IntegralLattice) -> Option<String> {
    if !l.is_integral() {
        return None;
    }
    let dump = LatticeDump {
        ambient_dim: l.ambient_dim(),
        basis: l.basis().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        gram: l.gram().iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect(),
    };
    Some(serde_json::to_string_pretty(&dump).expect("serializable"))
}

/// Row-major exact fractions.
pub fn matrix_json(m: &Matrix8) -> String {
    let rows: Vec<Vec<String>> = m.0.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    serde_json::to_string(&rows).expect("serializable")
}

fn tuple<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = xs.into_iter().map(|x| x.to_string()).collect();
    format!("({})", v.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultRecord {
    pub coset: String,
    pub r_star: String,
    pub m: String,
    pub n: String,
    pub norm: String,
    pub divisor: String,
    pub mult_even: String,
    pub mult_odd: String,
    pub source: String,
}

/// One record per formula, theorem first.
pub fn mult_records(rows: &[MultRow]) -> Vec<MultRecord> {
    let mut out = Vec::with_capacity(2 * rows.len());
    for r in rows {
        for (source, (e, o)) in [("theorem1", r.theorem1), ("closed", r.closed)] {
            out.push(MultRecord {
                coset: tuple(&r.coset),
                r_star: tuple(&r.point.z),
                m: r.point.m.to_string(),
                n: r.point.n.to_string(),
                norm: r.norm.to_string(),
                divisor: r.divisor.to_string(),
                mult_even: e.to_string(),
                mult_odd: o.to_string(),
                source: source.to_string(),
            });
        }
    }
    out
}

const MULT_HEADER: [&str; 9] = ["coset", "r_star", "m", "n", "norm", "divisor", "mult_even", "mult_odd", "source"];

fn csv_table<R: Serialize>(header: &[&str], records: &[R]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).expect("in memory");
    for r in records {
        w.serialize(r).expect("in memory");
    }
    String::from_utf8(w.into_inner().expect("in memory")).expect("utf8")
}

fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

fn json_table<R: Serialize>(records: &[R]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("serializable");
    s.push('\n');
    s
}

pub fn render_mult_table(table: &MultTable, format: Format) -> String {
    let records = mult_records(&table.rows);
    match format {
        Format::Csv => csv_table(&MULT_HEADER, &records),
        Format::Json => json_table(&records),
        Format::Text => {
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.coset.clone(),
                        r.r_star.clone(),
                        r.m.clone(),
                        r.n.clone(),
                        r.norm.clone(),
                        r.divisor.clone(),
                        r.mult_even.clone(),
                        r.mult_odd.clone(),
                        r.source.clone(),
                    ]
                })
                .collect();
            text_table(&MULT_HEADER, &rows)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleRootRecord {
    pub k: String,
    pub mult_even: String,
    pub mult_odd: String,
}

pub fn render_simple_roots(rows: &[(u32, u32, u32)], format: Format) -> String {
    let header = ["k", "mult_even", "mult_odd"];
    let records: Vec<SimpleRootRecord> = rows
        .iter()
        .map(|(k, e, o)| SimpleRootRecord { k: k.to_string(), mult_even: e.to_string(), mult_odd: o.to_string() })
        .collect();
    match format {
        Format::Csv => csv_table(&header, &records),
        Format::Json => json_table(&records),
        Format::Text => {
            let rows: Vec<Vec<String>> =
                records.iter().map(|r| vec![r.k.clone(), r.mult_even.clone(), r.mult_odd.clone()]).collect();
            text_table(&header, &rows)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeTerm {
    /// `(z_1, …, z_r, m, n)`.
    pub point: Vec<i64>,
    pub coeff: String,
}

pub fn point_tuple(p: &LorentzianPoint) -> Vec<i64> {
    p.z.iter().copied().chain([p.m, p.n]).collect()
}

/// Full dump of a lattice series in its iteration order.
pub fn lattice_series_json(s: &LatticeSeries) -> String {
    let terms: Vec<LatticeTerm> =
        s.iter().map(|(p, c)| LatticeTerm { point: point_tuple(p), coeff: c.to_string() }).collect();
    serde_json::to_string(&terms).expect("serializable")
}

/// Exponent range label `q^a .. q^b` for comparisons below `trunc`.
pub fn q_range(trunc: i64) -> String {
    format!("q^0 .. q^{}", trunc - 1)
}
