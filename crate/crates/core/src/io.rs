//! Dataset and model serialization: point CSVs (`x1,...,xd,label`), model
//! JSON, benchmark CSV rows, and edge-list graph files. Float columns use
//! the shortest round-tripping decimal form, so parse(emit(x)) = x.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Hyperplane, LabeledPoint, Polytope};
use crate::hardness::Graph;
use crate::harness::Fig3Row;

pub fn write_points<W: Write>(w: W, points: &[LabeledPoint]) -> Result<()> {
    let d = points.first().map_or(0, LabeledPoint::dim);
    let mut wtr = csv::Writer::from_writer(w);
    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    header.push("label".into());
    wtr.write_record(&header)?;
    for p in points {
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
        let mut rec: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        rec.push(p.label().to_string());
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_points<R: Read>(r: R) -> Result<Vec<LabeledPoint>> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || &headers[headers.len() - 1] != "label" {
        return Err(Error::Parse(
            "point CSV must end with a 'label' column".into(),
        ));
    }
    let d = headers.len() - 1;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != d + 1 {
            return Err(Error::Parse(format!(
                "row has {} fields, expected {}",
                rec.len(),
                d + 1
            )));
        }
        let coords: Vec<f64> = rec
            .iter()
            .take(d)
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad coordinate {f:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        let label: i8 = rec[d]
            .parse()
            .map_err(|e| Error::Parse(format!("bad label {:?}: {e}", &rec[d])))?;
        out.push(LabeledPoint::new(coords, label)?);
    }
    Ok(out)
}

pub fn write_points_path(path: &Path, points: &[LabeledPoint]) -> Result<()> {
    write_points(std::fs::File::create(path)?, points)
}

pub fn read_points_path(path: &Path) -> Result<Vec<LabeledPoint>> {
    read_points(std::fs::File::open(path)?)
}

/// On-disk model: the learned polytope plus the margin it was learned at.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub dim: usize,
    pub gamma: f64,
    pub halfspaces: Vec<Hyperplane>,
}

impl ModelFile {
    pub fn new(polytope: &Polytope, gamma: f64) -> Self {
        Self {
            dim: polytope.dim(),
            gamma,
            halfspaces: polytope.halfspaces().to_vec(),
        }
    }

    pub fn polytope(&self) -> Result<Polytope> {
        Polytope::new(self.dim, self.halfspaces.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write_path(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub const FIG3_HEADER: &str = "d,mean_halfspaces,std_halfspaces,trials,failures";

pub fn write_fig3<W: Write>(w: W, rows: &[Fig3Row]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(FIG3_HEADER.split(','))?;
    for r in rows {
        wtr.write_record(&[
            r.d.to_string(),
            r.mean_halfspaces.to_string(),
            r.std_halfspaces.to_string(),
            r.trials.to_string(),
            r.failures.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn fig3_to_string(rows: &[Fig3Row]) -> Result<String> {
    let mut buf = Vec::new();
    write_fig3(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_fig3<R: Read>(r: R) -> Result<Vec<Fig3Row>> {
    let mut rdr = csv::Reader::from_reader(r);
    if rdr.headers()?.iter().collect::<Vec<_>>().join(",") != FIG3_HEADER {
        return Err(Error::Parse("unexpected benchmark CSV header".into()));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| -> Result<&str> {
            rec.get(i)
                .ok_or_else(|| Error::Parse(format!("missing field {i}")))
        };
        out.push(Fig3Row {
            d: field(0)?.parse().map_err(|e| Error::Parse(format!("{e}")))?,
            mean_halfspaces: field(1)?
                .parse()
                .map_err(|e| Error::Parse(format!("{e}")))?,
            std_halfspaces: field(2)?
                .parse()
                .map_err(|e| Error::Parse(format!("{e}")))?,
            trials: field(3)?.parse().map_err(|e| Error::Parse(format!("{e}")))?,
            failures: field(4)?.parse().map_err(|e| Error::Parse(format!("{e}")))?,
        });
    }
    Ok(out)
}

/// Edge-list parser: one `u v` pair per line, `#` comments and blank lines
/// ignored; the vertex count is one past the largest endpoint.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut max_v = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse(format!(
                "line {}: expected 'u v', got {line:?}",
                lineno + 1
            )));
        };
        let u: usize = a
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        let v: usize = b
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        max_v = max_v.max(u).max(v);
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(Error::Parse("edge list is empty".into()));
    }
    Graph::new(max_v + 1, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_unit_ball, RngSeed};

    #[test]
    fn points_round_trip() {
        let mut rng = RngSeed::new(80, 0).rng();
        let pts: Vec<LabeledPoint> = (0..50)
            .map(|i| {
                let x = sample_unit_ball(3, &mut rng).unwrap();
                LabeledPoint::new(x, if i % 3 == 0 { -1 } else { 1 }).unwrap()
            })
            .collect();
        let mut buf = Vec::new();
        write_points(&mut buf, &pts).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x1,x2,x3,label\n"));
        let back = read_points(&buf[..]).unwrap();
        assert_eq!(pts, back);
    }

    #[test]
    fn points_reject_bad_header_and_rows() {
        assert!(read_points("x1,x2\n0.1,0.2\n".as_bytes()).is_err());
        assert!(read_points("x1,label\nnope,1\n".as_bytes()).is_err());
        assert!(read_points("x1,label\n0.5,2\n".as_bytes()).is_err());
        // outside the unit ball
        assert!(read_points("x1,label\n1.5,1\n".as_bytes()).is_err());
        // empty body is fine
        assert_eq!(read_points("x1,label\n".as_bytes()).unwrap().len(), 0);
    }

    #[test]
    fn model_round_trip() {
        let p = crate::geometry::square(0.75);
        let m = ModelFile::new(&p, 0.1);
        let j = m.to_json().unwrap();
        assert!(j.contains("\"dim\""));
        assert!(j.contains("\"w\""));
        let back = ModelFile::from_json(&j).unwrap();
        assert_eq!(back.polytope().unwrap(), p);
        assert_eq!(back.gamma, 0.1);
    }

    #[test]
    fn model_known_json_shape() {
        let j = r#"{"dim":1,"gamma":0.2,"halfspaces":[{"w":[-1.0],"b":0.5}]}"#;
        let m = ModelFile::from_json(j).unwrap();
        let p = m.polytope().unwrap();
        assert!(p.contains(&[0.25]).unwrap());
        assert!(!p.contains(&[0.75]).unwrap());
    }

    #[test]
    fn fig3_round_trip() {
        let rows = vec![
            Fig3Row {
                d: 2,
                mean_halfspaces: 2.25,
                std_halfspaces: 0.5,
                trials: 4,
                failures: 0,
            },
            Fig3Row {
                d: 3,
                mean_halfspaces: 3.5,
                std_halfspaces: 1.25,
                trials: 4,
                failures: 1,
            },
        ];
        let s = fig3_to_string(&rows).unwrap();
        assert!(s.starts_with(FIG3_HEADER));
        let back = read_fig3(s.as_bytes()).unwrap();
        assert_eq!(rows, back);
        // empty body keeps the header
        let empty = fig3_to_string(&[]).unwrap();
        assert_eq!(empty.trim(), FIG3_HEADER);
    }

    #[test]
    fn edge_list_parsing() {
        let g = parse_edge_list("# triangle\n0 1\n1 2\n\n2 0\n").unwrap();
        assert_eq!(g.vertices(), 3);
        assert_eq!(g.edges().len(), 3);
        assert!(parse_edge_list("0 1 2\n").is_err());
        assert!(parse_edge_list("\n# only comments\n").is_err());
        assert!(parse_edge_list("0 zero\n").is_err());
    }
}
