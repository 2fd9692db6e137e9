//! Plot-ready CSV emitters and a strict CSV reader.

use std::fmt::Write as _;

use thiserror::Error;

use crate::benchmarks::{shubert, DiscretizedBox};
use crate::rggr::Rggr;
use crate::Real;

pub const HEATMAP_HEADER: &str = "column,rank,from_node,to_node,weight";
pub const HEATMAP_DECODED_HEADER: &str = "column,rank,from_node,to_node,weight,from_value,to_value";
pub const SLICE_HEADER: &str = "pair_rank,x1_bin,x2_bin,x3_bin,x1,x2,x3,value";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("snapshot does not fit the box: {0}")]
    Shape(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Top-`k` edges of every column, ranked from 1. With `bounds`, both
/// endpoints are also decoded to coordinates (the graph's locus `k` is box
/// dimension `k`).
pub fn emit_heatmap<T: Real>(
    rggr: &Rggr<T>,
    k: usize,
    bounds: Option<&DiscretizedBox<T>>,
) -> Result<String, ReportError> {
    if let Some(b) = bounds {
        check_shape(rggr, b)?;
    }
    let mut out = String::new();
    out.push_str(if bounds.is_some() {
        HEATMAP_DECODED_HEADER
    } else {
        HEATMAP_HEADER
    });
    out.push('\n');
    if k == 0 {
        return Ok(out);
    }
    for (column, edges) in rggr.top_k_weights(k).iter().enumerate() {
        for (rank, e) in edges.iter().enumerate() {
            write!(out, "{column},{},{},{},{}", rank + 1, e.from, e.to, e.weight).unwrap();
            if let Some(b) = bounds {
                let from = b.decode_bin(e.from, column).expect("shape checked");
                let to = b.decode_bin(e.to, column + 1).expect("shape checked");
                write!(out, ",{from},{to}").unwrap();
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// For each of the `top_pairs` heaviest `(x1, x2)` edges, the Shubert value
/// along every bin of `x3`.
pub fn emit_fixed_slice<T: Real>(
    rggr: &Rggr<T>,
    bounds: &DiscretizedBox<T>,
    top_pairs: usize,
) -> Result<String, ReportError> {
    if rggr.space().num_loci() != 3 || bounds.dims() != 3 {
        return Err(ReportError::Shape(format!(
            "slices need 3 loci and a 3-D box, got {} loci and {} dimensions",
            rggr.space().num_loci(),
            bounds.dims()
        )));
    }
    check_shape(rggr, bounds)?;
    let mut out = String::from(SLICE_HEADER);
    out.push('\n');
    if top_pairs == 0 {
        return Ok(out);
    }
    for (rank, e) in rggr.top_k_weights(top_pairs)[0].iter().enumerate() {
        let x1 = bounds.decode_bin(e.from, 0).expect("shape checked");
        let x2 = bounds.decode_bin(e.to, 1).expect("shape checked");
        for b3 in 0..bounds.bins()[2] {
            let x3 = bounds.decode_bin(b3, 2).expect("in range");
            let value = shubert(&[x1, x2, x3]);
            writeln!(out, "{},{},{},{b3},{x1},{x2},{x3},{value}", rank + 1, e.from, e.to).unwrap();
        }
    }
    Ok(out)
}

fn check_shape<T: Real>(rggr: &Rggr<T>, bounds: &DiscretizedBox<T>) -> Result<(), ReportError> {
    if rggr.space().alphabet_sizes() != bounds.bins() {
        return Err(ReportError::Shape(format!(
            "alphabet sizes {:?} differ from bins {:?}",
            rggr.space().alphabet_sizes(),
            bounds.bins()
        )));
    }
    Ok(())
}

/// Parses CSV text whose first line must equal `header` exactly. Returns the
/// data rows split on commas; every row must have the header's arity.
pub fn read_strict_csv(text: &str, header: &str) -> Result<Vec<Vec<String>>, ReportError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header => {}
        Some(h) => {
            return Err(ReportError::Parse {
                line: 1,
                message: format!("expected header {header:?}, found {h:?}"),
            })
        }
        None => {
            return Err(ReportError::Parse {
                line: 1,
                message: "empty file".into(),
            })
        }
    }
    let arity = header.split(',').count();
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<String> = line.split(',').map(str::to_string).collect();
            if fields.len() != arity {
                return Err(ReportError::Parse {
                    line: i + 2,
                    message: format!("expected {arity} fields, found {}", fields.len()),
                });
            }
            Ok(fields)
        })
        .collect()
}

/// Parses a finite float field.
pub fn parse_finite(field: &str, line: usize) -> Result<f64, ReportError> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ReportError::Parse {
            line,
            message: format!("{field:?} is not a finite number"),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rggr::GeneSpace;

    #[test]
    fn heatmap_on_fresh_graph() {
        let g = Rggr::<f64>::new(GeneSpace::uniform(3, 4).unwrap());
        let csv = emit_heatmap(&g, 2, None).unwrap();
        let rows = read_strict_csv(&csv, HEATMAP_HEADER).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0], vec!["0", "1", "0", "0", "1"]);
        assert_eq!(rows[1], vec!["0", "2", "0", "1", "1"]);
        assert_eq!(emit_heatmap(&g, 0, None).unwrap(), format!("{HEATMAP_HEADER}\n"));
    }

    #[test]
    fn heatmap_decodes_with_box() {
        let b = DiscretizedBox::<f64>::shubert_default();
        let g = Rggr::<f64>::new(b.gene_space().unwrap());
        let csv = emit_heatmap(&g, 1, Some(&b)).unwrap();
        let rows = read_strict_csv(&csv, HEATMAP_DECODED_HEADER).unwrap();
        assert_eq!(rows[0][5], "-10");
        let wrong = Rggr::<f64>::new(GeneSpace::uniform(3, 4).unwrap());
        assert!(emit_heatmap(&wrong, 1, Some(&b)).is_err());
    }

    #[test]
    fn slice_rows_match_direct_evaluation() {
        let b = DiscretizedBox::<f64>::shubert_default();
        let g = Rggr::<f64>::new(b.gene_space().unwrap());
        let csv = emit_fixed_slice(&g, &b, 1).unwrap();
        let rows = read_strict_csv(&csv, SLICE_HEADER).unwrap();
        assert_eq!(rows.len(), 60);
        for (line, r) in rows.iter().enumerate() {
            assert_eq!((r[1].as_str(), r[2].as_str()), ("0", "0"));
            let x: Vec<f64> = r[4..7].iter().map(|f| parse_finite(f, line).unwrap()).collect();
            assert_eq!(parse_finite(&r[7], line).unwrap(), shubert(&x));
        }
        let flat = Rggr::<f64>::new(GeneSpace::uniform(4, 60).unwrap());
        assert!(emit_fixed_slice(&flat, &b, 1).is_err());
    }

    #[test]
    fn strict_reader_rejects_bad_input() {
        assert!(read_strict_csv("a,b\n1,2\n", "a,b").is_ok());
        assert!(read_strict_csv("a,c\n1,2\n", "a,b").is_err());
        assert!(read_strict_csv("a,b\n1\n", "a,b").is_err());
        assert!(read_strict_csv("", "a,b").is_err());
        assert!(parse_finite("NaN", 2).is_err());
        assert!(parse_finite("inf", 2).is_err());
        assert_eq!(parse_finite("-1.5", 2).unwrap(), -1.5);
    }
}
