//! CSV and JSON exchange formats for antichains and reach tubes.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! write/read cycle reproduces every coordinate bit for bit.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::order::{Antichain, OrderedSpace, Orientation, Point};
use crate::reach::ReachLayer;

fn header(dim: usize) -> String {
    (1..=dim).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",")
}

fn push_row(out: &mut String, coords: &[f64]) {
    for (i, v) in coords.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}");
    }
    out.push('\n');
}

/// One point per row under an `x1,...,xn` header.
pub fn points_to_csv(dim: usize, points: &[Point]) -> String {
    let mut out = header(dim);
    out.push('\n');
    for p in points {
        push_row(&mut out, p);
    }
    out
}

pub fn antichain_to_csv(a: &Antichain) -> String {
    points_to_csv(a.space().dim(), a.elements())
}

/// Reads points written by [`points_to_csv`]. The header must be exactly
/// `x1,...,xn`; `dim`, when given, must match `n`.
pub fn points_from_csv(text: &str, dim: Option<usize>) -> Result<Vec<Point>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let n = headers.len();
    let expected: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    if n == 0 || headers.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("expected header {}, got {:?}", header(n.max(1)), headers.as_slice()),
        });
    }
    if let Some(d) = dim {
        if d != n {
            return Err(Error::Dimension { expected: d, got: n });
        }
    }
    let mut points = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        if rec.len() != n {
            return Err(Error::Parse {
                line,
                column: 1,
                message: format!("expected {n} fields, got {}", rec.len()),
            });
        }
        let mut coords = Vec::with_capacity(n);
        for (col, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                column: col + 1,
                message: format!("malformed number {field:?}"),
            })?;
            coords.push(v);
        }
        points.push(Point::new(coords));
    }
    Ok(points)
}

pub fn antichain_from_csv(
    space: Arc<OrderedSpace>,
    orientation: Orientation,
    text: &str,
) -> Result<Antichain> {
    let points = points_from_csv(text, Some(space.dim()))?;
    Antichain::from_points(space, orientation, points)
}

pub fn antichain_to_json(a: &Antichain) -> Result<String> {
    Ok(serde_json::to_string_pretty(a)?)
}

pub fn antichain_from_json(text: &str) -> Result<Antichain> {
    Ok(serde_json::from_str(text)?)
}

/// Tube export: one row per frontier point, `step,x1,...,xn`.
pub fn tube_to_csv(layers: &[ReachLayer]) -> String {
    let dim = layers
        .first()
        .map(|l| l.frontier.space().dim())
        .unwrap_or(0);
    let mut out = format!("step,{}\n", header(dim));
    for layer in layers {
        for p in layer.frontier.iter() {
            let _ = write!(out, "{},", layer.k);
            push_row(&mut out, p);
        }
    }
    out
}

/// Trajectory export: `step,x1,...,xn`.
pub fn trajectory_to_csv(traj: &[Point]) -> String {
    let dim = traj.first().map(|p| p.len()).unwrap_or(0);
    let mut out = format!("step,{}\n", header(dim));
    for (k, p) in traj.iter().enumerate() {
        let _ = write!(out, "{k},");
        push_row(&mut out, p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_is_bit_exact() {
        let space = Arc::new(OrderedSpace::standard(2));
        let a = Antichain::from_points(
            space.clone(),
            Orientation::Max,
            [[0.1 + 0.2, 1.0 / 3.0], [-1e-300, 7.0e22]],
        )
        .unwrap();
        let text = antichain_to_csv(&a);
        assert!(text.starts_with("x1,x2\n"));
        let b = antichain_from_csv(space, Orientation::Max, &text).unwrap();
        for (p, q) in a.iter().zip(b.iter()) {
            for (u, v) in p.iter().zip(q.iter()) {
                assert_eq!(u.to_bits(), v.to_bits());
            }
        }
    }

    #[test]
    fn json_roundtrip_with_infinite_base() {
        let space = Arc::new(
            OrderedSpace::new(
                vec![1, -1],
                Some(crate::order::AxisBox::new(vec![f64::NEG_INFINITY, 0.0], vec![1.0, f64::INFINITY]).unwrap()),
            )
            .unwrap(),
        );
        let a = Antichain::from_points(space, Orientation::Min, [[0.5, 2.0]]).unwrap();
        let text = antichain_to_json(&a).unwrap();
        assert_eq!(antichain_from_json(&text).unwrap(), a);
    }

    #[test]
    fn malformed_csv_rejected() {
        assert!(points_from_csv("x1,x2\n1,abc\n", None).is_err());
        assert!(points_from_csv("a,b\n1,2\n", None).is_err());
        assert!(points_from_csv("x1,x2\n1\n", None).is_err());
        assert!(matches!(
            points_from_csv("x1\n1\n", Some(2)),
            Err(Error::Dimension { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn json_rejects_wrong_orientation_content() {
        // comparable elements are collapsed on load
        let text = r#"{"space":{"dim":2,"signs":[1,1]},"orientation":"max","elements":[[1,1],[2,2]]}"#;
        let a = antichain_from_json(text).unwrap();
        assert_eq!(a.elements(), &[Point::from([2.0, 2.0])]);
    }
}
