//! Tab-separated table formats, plot data, and DOT output.
//!
//! All writers are deterministic: floats use Rust's shortest round-trip
//! formatting and rows follow a fixed order. Human-facing ranks (`K`, `K_L`,
//! subset index `i`) are 1-based; node ids are 0-based.

use std::io::{BufRead, Write};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::friends::{FriendDirection, FriendNetwork, NodeClass};
use crate::gmatrix::RankVector;
use crate::graph::LabelMap;
use crate::reduced::{qr_nondiagonal, ReducedMatrices};
use crate::response::{PathwaySubset, PumpSpec, ResponseVector};

/// `K  node_id  label  P`, one row per node in rank order.
pub fn write_ranking<W: Write>(mut w: W, rank: &RankVector, labels: &LabelMap) -> Result<()> {
    writeln!(w, "K\tnode_id\tlabel\tP")?;
    for (k, node) in rank.ranking().order().enumerate() {
        writeln!(
            w,
            "{}\t{node}\t{}\t{}",
            k + 1,
            labels.lookup(node),
            rank.get(node)
        )?;
    }
    Ok(())
}

/// `K_L  node_id  P1  abs_P1  sign` for every nonzero entry, by `K_L`.
pub fn write_response_profile<W: Write>(mut w: W, p1: &ResponseVector) -> Result<()> {
    writeln!(w, "K_L\tnode_id\tP1\tabs_P1\tsign")?;
    let values = p1.values();
    for (k, node) in p1.magnitude_ranking().order().enumerate() {
        let v = values[node];
        if v == 0.0 {
            break;
        }
        let sign = if v < 0.0 { '-' } else { '+' };
        writeln!(w, "{}\t{node}\t{v}\t{}\t{sign}", k + 1, v.abs())?;
    }
    Ok(())
}

/// Reads a response profile back into a dense vector of length `n`.
/// Nodes absent from the file are zero.
pub fn read_response_profile<R: BufRead>(reader: R, n: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n];
    for (line_no, fields) in data_rows(reader, "K_L")? {
        if fields.len() < 3 {
            return Err(Error::parse(line_no, "expected K_L, node_id, P1 columns"));
        }
        let node = parse_node(&fields[1], line_no, n)?;
        out[node] = parse_f64(&fields[2], line_no)?;
    }
    Ok(out)
}

/// `K_L  node_id  label  P0  P1  sensitivity`, by `K_L`.
pub fn write_sensitivity<W: Write>(
    mut w: W,
    p0: &RankVector,
    p1: &ResponseVector,
    sensitivity: &[f64],
    labels: &LabelMap,
) -> Result<()> {
    writeln!(w, "K_L\tnode_id\tlabel\tP0\tP1\tsensitivity")?;
    for (k, node) in p1.magnitude_ranking().order().enumerate() {
        writeln!(
            w,
            "{}\t{node}\t{}\t{}\t{}\t{}",
            k + 1,
            labels.lookup(node),
            p0.get(node),
            p1.values()[node],
            sensitivity[node]
        )?;
    }
    Ok(())
}

/// `i  K_L  K  node_id  label  P1` in subset order.
pub fn write_pathway_subset<W: Write>(
    mut w: W,
    subset: &PathwaySubset,
    labels: &LabelMap,
) -> Result<()> {
    writeln!(w, "i\tK_L\tK\tnode_id\tlabel\tP1")?;
    for e in &subset.entries {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            e.index,
            e.k_l,
            e.k,
            e.node,
            labels.lookup(e.node),
            e.p1
        )?;
    }
    Ok(())
}

/// One subset row read back: the node and, for pathway tables, its `P1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetRow {
    pub node: usize,
    pub p1: Option<f64>,
}

/// Reads either a pathway table (header `i ...`) or a plain list of node
/// ids, one per line.
pub fn read_subset_file<R: BufRead>(reader: R) -> Result<Vec<SubsetRow>> {
    let mut rows = Vec::new();
    for (line_no, fields) in data_rows(reader, "i")? {
        let row = match fields.len() {
            1 => SubsetRow {
                node: parse_node(&fields[0], line_no, usize::MAX)?,
                p1: None,
            },
            n if n >= 6 => SubsetRow {
                node: parse_node(&fields[3], line_no, usize::MAX)?,
                p1: Some(parse_f64(&fields[n - 1], line_no)?),
            },
            _ => {
                return Err(Error::parse(
                    line_no,
                    "expected a node id or a pathway row (i, K_L, K, node_id, label, P1)",
                ))
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Pump diagonal as `node_id  D_value` lines.
pub fn read_pump_spec<R: BufRead>(reader: R) -> Result<PumpSpec> {
    let mut entries = Vec::new();
    for (line_no, fields) in data_rows(reader, "node_id")? {
        if fields.len() != 2 {
            return Err(Error::parse(line_no, "expected node_id<TAB>D_value"));
        }
        entries.push((
            parse_node(&fields[0], line_no, usize::MAX)?,
            parse_f64(&fields[1], line_no)?,
        ));
    }
    PumpSpec::new(entries)
}

/// Square matrix with node ids along both axes.
pub fn write_matrix<W: Write>(mut w: W, m: &DenseMatrix, axis: &[usize]) -> Result<()> {
    assert_eq!(m.rows(), axis.len());
    write!(w, "node_id")?;
    for id in axis {
        write!(w, "\t{id}")?;
    }
    writeln!(w)?;
    for (r, id) in axis.iter().enumerate() {
        write!(w, "{id}")?;
        for v in m.row(r) {
            write!(w, "\t{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Inverse of [`write_matrix`]: returns the axis and the matrix.
pub fn read_matrix<R: BufRead>(reader: R) -> Result<(Vec<usize>, DenseMatrix)> {
    let mut lines = reader.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((i, line)) => {
                let line = line?;
                if line.trim().is_empty() || line.starts_with('#') {
                    continue;
                }
                break (i + 1, line);
            }
            None => return Err(Error::parse(0, "matrix file is empty")),
        }
    };
    let mut head = header.1.split('\t');
    if head.next() != Some("node_id") {
        return Err(Error::parse(
            header.0,
            "matrix header must start with node_id",
        ));
    }
    let axis = head
        .map(|f| parse_node(f, header.0, usize::MAX))
        .collect::<Result<Vec<_>>>()?;
    let n = axis.len();
    let mut data = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != n + 1 {
            return Err(Error::parse(line_no, format!("expected {} columns", n + 1)));
        }
        if rows >= n || parse_node(fields[0], line_no, usize::MAX)? != axis[rows] {
            return Err(Error::parse(
                line_no,
                "row id does not match the header axis",
            ));
        }
        for f in &fields[1..] {
            data.push(parse_f64(f, line_no)?);
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::parse(
            0,
            format!("expected {n} matrix rows, found {rows}"),
        ));
    }
    Ok((axis, DenseMatrix::from_rows(n, n, data)?))
}

/// Color-scale value `sgn(g) (|g| / max|g|)^(1/4)`.
pub fn plot_scale(g: f64, max_abs: f64) -> f64 {
    if max_abs == 0.0 || g == 0.0 {
        0.0
    } else {
        g.signum() * (g.abs() / max_abs).powf(0.25)
    }
}

/// `row  col  g  scaled`, 1-based subset indices, row-major.
pub fn write_matrix_plot_data<W: Write>(mut w: W, m: &DenseMatrix) -> Result<()> {
    let max_abs = m.max_abs();
    writeln!(w, "row\tcol\tg\tscaled")?;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let g = m[(r, c)];
            writeln!(w, "{}\t{}\t{g}\t{}", r + 1, c + 1, plot_scale(g, max_abs))?;
        }
    }
    Ok(())
}

/// `key = value` summary of a reduced-matrix computation.
pub fn write_reduced_metadata<W: Write>(mut w: W, r: &ReducedMatrices) -> Result<()> {
    let weights = r.weights();
    let nd = qr_nondiagonal(r);
    let (neg_count, neg_min) = r.gqr_negative_stats();
    writeln!(w, "n_r = {}", r.n_r())?;
    match r.lambda_c {
        Some(l) => writeln!(w, "lambda_c = {l}")?,
        None => writeln!(w, "lambda_c = none")?,
    }
    writeln!(w, "eigen_iterations = {}", r.eigen_iterations)?;
    writeln!(w, "series_order = {}", r.series_order)?;
    writeln!(w, "resolvent_residual = {:e}", r.resolvent_residual)?;
    writeln!(w, "W_R = {}", weights.gr)?;
    writeln!(w, "W_rr = {}", weights.grr)?;
    writeln!(w, "W_pr = {}", weights.gpr)?;
    writeln!(w, "W_qr = {}", weights.gqr)?;
    writeln!(w, "W_rr+qrnd = {}", nd.weight)?;
    writeln!(w, "gqr_negative_count = {neg_count}")?;
    writeln!(w, "gqr_negative_min = {neg_min}")?;
    Ok(())
}

/// DOT digraph of a friend network. `axis` maps subset positions to node
/// ids. Node and edge order is sorted so the output is reproducible.
pub fn write_dot<W: Write>(
    mut w: W,
    net: &FriendNetwork,
    axis: &[usize],
    labels: &LabelMap,
) -> Result<()> {
    let kind = match net.direction {
        FriendDirection::Friends => "friends",
        FriendDirection::Followers => "followers",
    };
    writeln!(w, "digraph {kind} {{")?;
    writeln!(w, "  node [shape=circle];")?;
    let mut nodes: Vec<_> = net.nodes.iter().collect();
    nodes.sort_by_key(|n| n.index);
    for n in nodes {
        let class = match n.class {
            NodeClass::Initial(k) => format!("initial{}", k + 1),
            NodeClass::Negative => "negative".into(),
            NodeClass::Positive => "positive".into(),
            NodeClass::Neutral => "neutral".into(),
        };
        let id = axis[n.index];
        writeln!(
            w,
            "  n{} [label=\"{}\", node_id={id}, title=\"{}\", class=\"{class}\", level={}];",
            n.index + 1,
            n.index + 1,
            escape(&labels.lookup(id)),
            n.level
        )?;
    }
    let mut edges: Vec<_> = net.edges.iter().collect();
    edges.sort_by_key(|e| (e.level, e.from, e.to));
    let back = match net.direction {
        FriendDirection::Friends => "",
        FriendDirection::Followers => ", dir=back",
    };
    for e in edges {
        let style = if e.level == 1 {
            "style=bold, penwidth=2"
        } else {
            "style=solid, penwidth=1"
        };
        writeln!(
            w,
            "  n{} -> n{} [level={}, weight=\"{}\", {style}{back}];",
            e.from + 1,
            e.to + 1,
            e.level,
            e.weight
        )?;
    }
    writeln!(w, "}}")?;
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Non-comment, non-header rows split on tabs, with their line numbers.
fn data_rows<R: BufRead>(reader: R, header_key: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim_end_matches(['\r', '\n']);
        if text.trim().is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = text.split('\t').map(|f| f.trim().to_string()).collect();
        if out.is_empty() && fields[0] == header_key {
            continue;
        }
        out.push((i + 1, fields));
    }
    Ok(out)
}

fn parse_node(s: &str, line: usize, n: usize) -> Result<usize> {
    let id: usize = s
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid node id {s:?}")))?;
    if id >= n {
        return Err(Error::NodeOutOfRange {
            id: id as u64,
            n_nodes: n,
        });
    }
    Ok(id)
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid number {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::friends::{build_friend_network, FriendOptions};
    use crate::response::{PathwayEntry, ResponseKind};

    fn text(f: impl FnOnce(&mut Vec<u8>)) -> String {
        let mut buf = Vec::new();
        f(&mut buf);
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn plot_scale_examples() {
        assert_eq!(plot_scale(2.0, 2.0), 1.0);
        assert_eq!(plot_scale(0.0, 2.0), 0.0);
        assert!((plot_scale(-2.0 / 16.0, 2.0) + 0.5).abs() < 1e-15);
        assert_eq!(plot_scale(1.0, 0.0), 0.0);
    }

    #[test]
    fn plot_data_rows() {
        let m = DenseMatrix::from_rows(2, 2, vec![0.0, -1.0 / 16.0, 1.0, 0.5]).unwrap();
        let out = text(|b| write_matrix_plot_data(b, &m).unwrap());
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines[0], "row\tcol\tg\tscaled");
        assert_eq!(lines[1], "1\t1\t0\t0");
        assert_eq!(lines[2], "1\t2\t-0.0625\t-0.5");
        assert_eq!(lines[3], "2\t1\t1\t1");
    }

    #[test]
    fn response_profile_rows() {
        let p1 = ResponseVector::new(
            vec![-0.280855, 0.611273, -0.330418],
            ResponseKind::LinearResponse,
        );
        let out = text(|b| write_response_profile(b, &p1).unwrap());
        let rows: Vec<Vec<&str>> = out
            .lines()
            .skip(1)
            .map(|l| l.split('\t').collect())
            .collect();
        assert_eq!(rows.len(), 3);
        let order: Vec<(&str, &str)> = rows.iter().map(|r| (r[0], r[1])).collect();
        assert_eq!(order, vec![("1", "1"), ("2", "2"), ("3", "0")]);
        assert_eq!(
            rows.iter().map(|r| r[4]).collect::<Vec<_>>(),
            vec!["+", "-", "-"]
        );

        let back = read_response_profile(out.as_bytes(), 3).unwrap();
        assert_eq!(back, p1.values());

        let zero = ResponseVector::zeros(3, ResponseKind::LinearResponse);
        let out = text(|b| write_response_profile(b, &zero).unwrap());
        assert_eq!(out.lines().count(), 1);
    }

    #[test]
    fn ranking_table() {
        let rank = RankVector::from_values(vec![1.0, 1.0, 1.0]);
        let mut labels = LabelMap::default();
        labels.insert(1, "B");
        let out = text(|b| write_ranking(b, &rank, &labels).unwrap());
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1\t0\t0\t0.333333"));
        assert!(lines[2].starts_with("2\t1\tB\t0.333333"));
    }

    #[test]
    fn subset_file_formats() {
        let subset = PathwaySubset {
            entries: vec![
                PathwayEntry {
                    index: 1,
                    node: 7,
                    k_l: 2,
                    k: 5,
                    p1: -0.25,
                },
                PathwayEntry {
                    index: 2,
                    node: 3,
                    k_l: 1,
                    k: 9,
                    p1: 0.5,
                },
            ],
            requested: 1,
            n_negative: 1,
            n_positive: 1,
        };
        let out = text(|b| write_pathway_subset(b, &subset, &LabelMap::default()).unwrap());
        let rows = read_subset_file(out.as_bytes()).unwrap();
        assert_eq!(
            rows,
            vec![
                SubsetRow {
                    node: 7,
                    p1: Some(-0.25)
                },
                SubsetRow {
                    node: 3,
                    p1: Some(0.5)
                }
            ]
        );
        let rows = read_subset_file("4\n# c\n2\n".as_bytes()).unwrap();
        assert_eq!(rows.iter().map(|r| r.node).collect::<Vec<_>>(), vec![4, 2]);
        assert!(read_subset_file("1\t2\n".as_bytes()).is_err());
    }

    #[test]
    fn pump_spec_file() {
        let spec = read_pump_spec("node_id\tD_value\n3\t2.5\n1\t-4\n".as_bytes()).unwrap();
        assert_eq!(spec.entries(), &[(3, 2.5), (1, -4.0)]);
        assert!(read_pump_spec("3\n".as_bytes()).is_err());
        assert!(read_pump_spec("3\tx\n".as_bytes()).is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let m = DenseMatrix::from_rows(2, 2, vec![0.1, -1e-17, 1.0 / 3.0, 2.0]).unwrap();
        let out = text(|b| write_matrix(b, &m, &[9, 4]).unwrap());
        assert!(out.starts_with("node_id\t9\t4\n9\t0.1\t"));
        let (axis, back) = read_matrix(out.as_bytes()).unwrap();
        assert_eq!(axis, vec![9, 4]);
        assert_eq!(back, m);
        assert!(read_matrix("node_id\t1\n2\t0.5\n".as_bytes()).is_err());
    }

    #[test]
    fn dot_output() {
        let m = DenseMatrix::identity(3);
        let net = build_friend_network(&m, &[1], None, &FriendOptions::default()).unwrap();
        let out = text(|b| write_dot(b, &net, &[10, 20, 30], &LabelMap::default()).unwrap());
        assert_eq!(
            out,
            "digraph friends {\n  node [shape=circle];\n  \
             n2 [label=\"2\", node_id=20, title=\"20\", class=\"initial1\", level=0];\n}\n"
        );

        let mut m = DenseMatrix::zeros(3, 3);
        m.set_column(0, &[0.0, 0.5, 0.2]);
        m[(2, 1)] = 0.3;
        let net = build_friend_network(
            &m,
            &[0],
            Some(&[-1.0, -1.0, 1.0]),
            &FriendOptions::default(),
        )
        .unwrap();
        let mut labels = LabelMap::default();
        labels.insert(20, "say \"hi\"");
        let out = text(|b| write_dot(b, &net, &[10, 20, 30], &labels).unwrap());
        let edges: Vec<_> = out.lines().filter(|l| l.contains("->")).collect();
        assert_eq!(edges.len(), 3);
        assert!(edges[0].starts_with("  n1 -> n2 [level=1") && edges[0].contains("bold"));
        assert!(edges[2].starts_with("  n2 -> n3 [level=2") && edges[2].contains("solid"));
        assert!(out.contains("title=\"say \\\"hi\\\"\""));
        assert!(out.contains("class=\"positive\""));
        let again = text(|b| write_dot(b, &net, &[10, 20, 30], &labels).unwrap());
        assert_eq!(out, again);
    }
}
