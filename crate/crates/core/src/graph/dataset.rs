//! Line-oriented text formats for datasets, solutions and sampler traces.
//!
//! A dataset is a sequence of records. Each record starts with a header
//! line, `tsp <n> <k>` or `mis <n>`, followed by `n` coordinate rows
//! (`x y`) or `n` adjacency rows (`v: neighbours...`), and optionally a
//! `label` row holding one `±1` entry per variable. TSP edge lists are not
//! stored: they are rebuilt from the coordinates by k-NN sparsification.

use std::fmt::Write as _;

use super::{Instance, MisInstance, SolutionVector, Tour, TspInstance};
use crate::diffusion::DiffusionState;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub instance: Instance,
    pub label: Option<SolutionVector>,
}

/// A decoded discrete solution.
#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Tour(Tour),
    /// Sorted node ids of an independent set.
    Set(Vec<usize>),
}

impl Solution {
    pub fn nodes(&self) -> &[usize] {
        match self {
            Solution::Tour(t) => t.order(),
            Solution::Set(s) => s,
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn fmt_sign(v: f64) -> &'static str {
    if v > 0.0 {
        "1"
    } else {
        "-1"
    }
}

pub fn write_dataset(records: &[Record]) -> String {
    let mut out = String::new();
    for rec in records {
        match &rec.instance {
            Instance::Tsp(t) => {
                let _ = writeln!(out, "tsp {} {}", t.n(), t.k());
                for p in t.coords() {
                    let _ = writeln!(out, "{} {}", p[0], p[1]);
                }
            }
            Instance::Mis(m) => {
                let _ = writeln!(out, "mis {}", m.n());
                for v in 0..m.n() {
                    let _ = write!(out, "{v}:");
                    for w in m.neighbors(v) {
                        let _ = write!(out, " {w}");
                    }
                    out.push('\n');
                }
            }
        }
        if let Some(label) = &rec.label {
            out.push_str("label");
            for &v in label.values() {
                out.push(' ');
                out.push_str(fmt_sign(v));
            }
            out.push('\n');
        }
    }
    out
}

pub fn parse_dataset(text: &str) -> Result<Vec<Record>> {
    let lines: Vec<&str> = text.lines().collect();
    let mut records = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let no = i + 1;
        let header: Vec<&str> = lines[i].split_whitespace().collect();
        i += 1;
        if header.is_empty() {
            continue;
        }
        let int = |s: &str| s.parse::<usize>().map_err(|_| parse_err(no, format!("bad integer {s:?}")));
        let instance = match header.as_slice() {
            ["tsp", n, k] => {
                let (n, k) = (int(n)?, int(k)?);
                let mut coords = Vec::with_capacity(n);
                for _ in 0..n {
                    let row = lines.get(i).ok_or_else(|| parse_err(i + 1, "truncated coordinates"))?;
                    let f: Vec<f64> = row
                        .split_whitespace()
                        .map(str::parse)
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| parse_err(i + 1, format!("bad coordinate row {row:?}")))?;
                    if f.len() != 2 {
                        return Err(parse_err(i + 1, "coordinate rows hold exactly two numbers"));
                    }
                    coords.push([f[0], f[1]]);
                    i += 1;
                }
                Instance::Tsp(TspInstance::knn(coords, k).map_err(|e| parse_err(no, e.to_string()))?)
            }
            ["mis", n] => {
                let n = int(n)?;
                let mut edges = Vec::new();
                for v in 0..n {
                    let row = lines.get(i).ok_or_else(|| parse_err(i + 1, "truncated adjacency"))?;
                    let (head, rest) = row
                        .split_once(':')
                        .ok_or_else(|| parse_err(i + 1, "adjacency rows look like `v: a b ...`"))?;
                    if head.trim().parse::<usize>().ok() != Some(v) {
                        return Err(parse_err(i + 1, format!("expected adjacency row for node {v}")));
                    }
                    for w in rest.split_whitespace() {
                        let w = w.parse::<usize>().map_err(|_| parse_err(i + 1, format!("bad node id {w:?}")))?;
                        if w > v {
                            edges.push((v, w));
                        }
                    }
                    i += 1;
                }
                Instance::Mis(MisInstance::from_edges(n, &edges).map_err(|e| parse_err(no, e.to_string()))?)
            }
            _ => return Err(parse_err(no, format!("unknown record header {:?}", lines[no - 1]))),
        };
        let label = match lines.get(i).map(|l| l.split_whitespace().collect::<Vec<_>>()) {
            Some(fields) if fields.first() == Some(&"label") => {
                let values = fields[1..]
                    .iter()
                    .map(|s| match *s {
                        "1" | "+1" => Ok(1.0),
                        "-1" => Ok(-1.0),
                        other => Err(parse_err(i + 1, format!("label entries are ±1, got {other:?}"))),
                    })
                    .collect::<Result<Vec<f64>>>()?;
                if values.len() != instance.variable_count() {
                    return Err(parse_err(
                        i + 1,
                        format!("label has {} entries, expected {}", values.len(), instance.variable_count()),
                    ));
                }
                i += 1;
                Some(SolutionVector::new(values)?)
            }
            _ => None,
        };
        records.push(Record { instance, label });
    }
    Ok(records)
}

/// One line per solution: tour order, or sorted node ids.
pub fn write_solutions(solutions: &[Solution]) -> String {
    let mut out = String::new();
    for s in solutions {
        let nodes: Vec<String> = s.nodes().iter().map(usize::to_string).collect();
        out.push_str(&nodes.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_solutions(text: &str) -> Result<Vec<Vec<usize>>> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            line.split_whitespace()
                .map(|s| s.parse::<usize>().map_err(|_| parse_err(i + 1, format!("bad node id {s:?}"))))
                .collect()
        })
        .collect()
}

/// Rows of `t x_1 .. x_N`, one per recorded state.
pub fn write_trajectory(states: &[DiffusionState]) -> String {
    let mut out = String::new();
    for s in states {
        let _ = write!(out, "{}", s.t);
        for v in &s.x {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{degraded_mis, degraded_tsp, generate_er, generate_tsp, Distribution};

    #[test]
    fn dataset_round_trip() {
        let tsp = generate_tsp(9, &Distribution::Uniform, 2, 4).unwrap();
        let mis = generate_er(7, 0.4, 3).unwrap();
        let records = vec![
            Record { label: Some(degraded_tsp(&tsp)), instance: Instance::Tsp(tsp) },
            Record { label: None, instance: Instance::Mis(mis.clone()) },
            Record { label: Some(degraded_mis(&mis, 1)), instance: Instance::Mis(mis) },
        ];
        let text = write_dataset(&records);
        assert_eq!(parse_dataset(&text).unwrap(), records);
        assert_eq!(write_dataset(&parse_dataset(&text).unwrap()), text);
    }

    #[test]
    fn rejects_bad_label_width() {
        let text = "mis 2\n0: 1\n1: 0\nlabel 1 -1 1\n";
        assert!(matches!(parse_dataset(text), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn solutions_round_trip() {
        let sols = vec![Solution::Tour(Tour::new(vec![2, 0, 1]).unwrap()), Solution::Set(vec![]), Solution::Set(vec![1, 4])];
        let text = write_solutions(&sols);
        assert_eq!(parse_solutions(&text).unwrap(), vec![vec![2, 0, 1], vec![], vec![1, 4]]);
    }
}
