//! Edge-list interchange formats.
//!
//! * `snap_edgelist`: whitespace separated integer pairs, `#` comments.
//! * `matrix_market`: `%%MatrixMarket matrix coordinate <field> <symmetry>`,
//!   1-based indices, dimension taken from the size line.
//! * `tsv`: `u<TAB>v[<TAB>duration_minutes]`. The canonical save format;
//!   a JSON sidecar `<path>.meta.json` carries name, family, direction and
//!   node count so isolated nodes and ids survive a round trip.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Family, Graph, GraphLabel};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphFormat {
    SnapEdgelist,
    MatrixMarket,
    Tsv,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snap_edgelist" | "snap" => Ok(GraphFormat::SnapEdgelist),
            "matrix_market" | "mtx" => Ok(GraphFormat::MatrixMarket),
            "tsv" => Ok(GraphFormat::Tsv),
            other => Err(Error::InvalidInput(format!("unknown graph format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMetadata {
    pub name: String,
    pub family: Family,
    pub directed: bool,
    pub node_count: usize,
}

#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Original file label of each compacted node id.
    pub labels: Vec<String>,
    pub metadata: Option<GraphMetadata>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Loads a graph, compacting file ids to `0..n` in order of first
/// appearance. With `directed == false` the result is symmetrized.
pub fn load_graph(path: &Path, format: GraphFormat, directed: bool) -> Result<Graph> {
    load_graph_labeled(path, format, directed).map(|l| l.graph)
}

pub fn load_graph_labeled(path: &Path, format: GraphFormat, directed: bool) -> Result<LoadedGraph> {
    let text = fs::read_to_string(path)?;
    if text.trim().is_empty() {
        return Err(Error::EmptyFile { path: path.to_owned() });
    }
    match format {
        GraphFormat::SnapEdgelist => parse_snap(path, &text, directed),
        GraphFormat::MatrixMarket => parse_matrix_market(path, &text, directed),
        GraphFormat::Tsv => {
            let side = sidecar_path(path);
            let metadata = if side.exists() {
                Some(serde_json::from_str::<GraphMetadata>(&fs::read_to_string(side)?)?)
            } else {
                None
            };
            parse_tsv(path, &text, directed, metadata)
        }
    }
}

struct Compactor {
    ids: HashMap<u64, usize>,
    labels: Vec<String>,
}

impl Compactor {
    fn new() -> Self {
        Compactor {
            ids: HashMap::new(),
            labels: Vec::new(),
        }
    }

    fn id(&mut self, raw: u64) -> usize {
        let next = self.labels.len();
        *self.ids.entry(raw).or_insert_with(|| {
            self.labels.push(raw.to_string());
            next
        })
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_owned(),
        line,
        message: message.into(),
    }
}

fn parse_int<T: FromStr>(path: &Path, line: usize, tok: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(path, line, format!("expected integer, found {tok:?}")))
}

fn parse_snap(path: &Path, text: &str, directed: bool) -> Result<LoadedGraph> {
    let mut compact = Compactor::new();
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let (Some(a), Some(b)) = (toks.next(), toks.next()) else {
            return Err(parse_err(path, line_no, "expected two node ids"));
        };
        let u = compact.id(parse_int(path, line_no, a)?);
        let v = compact.id(parse_int(path, line_no, b)?);
        edges.push((u, v));
    }
    if compact.labels.is_empty() {
        return Err(Error::EmptyFile { path: path.to_owned() });
    }
    let graph = Graph::from_edge_list(compact.labels.len(), &edges, directed)?;
    Ok(LoadedGraph {
        graph,
        labels: compact.labels,
        metadata: None,
    })
}

fn parse_matrix_market(path: &Path, text: &str, directed: bool) -> Result<LoadedGraph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::EmptyFile { path: path.to_owned() })?;
    let head: Vec<String> = header.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if head.len() < 5 || head[0] != "%%matrixmarket" || head[1] != "matrix" || head[2] != "coordinate" {
        return Err(parse_err(path, 1, "expected '%%MatrixMarket matrix coordinate' header"));
    }
    let symmetric = match head[4].as_str() {
        "general" => false,
        "symmetric" | "skew-symmetric" | "hermitian" => true,
        other => return Err(parse_err(path, 1, format!("unsupported symmetry {other:?}"))),
    };
    let mut size: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut entries = 0usize;
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if toks.len() != 3 {
                    return Err(parse_err(path, line_no, "expected 'rows cols entries'"));
                }
                let rows: usize = parse_int(path, line_no, toks[0])?;
                let cols: usize = parse_int(path, line_no, toks[1])?;
                let nnz: usize = parse_int(path, line_no, toks[2])?;
                size = Some((rows.max(cols), nnz));
                edges.reserve(nnz);
            }
            Some((n, _)) => {
                if toks.len() < 2 {
                    return Err(parse_err(path, line_no, "expected 'row col [value]'"));
                }
                let r: usize = parse_int(path, line_no, toks[0])?;
                let c: usize = parse_int(path, line_no, toks[1])?;
                if r == 0 || c == 0 || r > n || c > n {
                    return Err(parse_err(path, line_no, format!("index ({r}, {c}) outside 1..={n}")));
                }
                entries += 1;
                edges.push((r - 1, c - 1));
                if symmetric && directed {
                    edges.push((c - 1, r - 1));
                }
            }
        }
    }
    let Some((n, nnz)) = size else {
        return Err(parse_err(path, 1, "missing size line"));
    };
    if entries != nnz {
        return Err(parse_err(path, 1, format!("declared {nnz} entries, found {entries}")));
    }
    let graph = Graph::from_edge_list(n, &edges, directed)?;
    Ok(LoadedGraph {
        graph,
        labels: (1..=n).map(|i| i.to_string()).collect(),
        metadata: None,
    })
}

fn parse_tsv(path: &Path, text: &str, directed: bool, metadata: Option<GraphMetadata>) -> Result<LoadedGraph> {
    let mut compact = Compactor::new();
    let mut edges = Vec::new();
    let mut columns: Option<usize> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split('\t').map(str::trim).collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(parse_err(path, line_no, "expected u<TAB>v[<TAB>duration]"));
        }
        if *columns.get_or_insert(toks.len()) != toks.len() {
            return Err(parse_err(path, line_no, "inconsistent column count"));
        }
        let (u, v) = match &metadata {
            Some(_) => (parse_int(path, line_no, toks[0])?, parse_int(path, line_no, toks[1])?),
            None => (
                compact.id(parse_int(path, line_no, toks[0])?),
                compact.id(parse_int(path, line_no, toks[1])?),
            ),
        };
        let d = match toks.get(2) {
            Some(t) => t
                .parse::<f64>()
                .ok()
                .filter(|d| d.is_finite() && *d >= 0.0)
                .ok_or_else(|| parse_err(path, line_no, format!("invalid duration {t:?}")))?,
            None => 0.0,
        };
        edges.push((u, v, d));
    }
    let weighted = columns == Some(3);
    let (node_count, directed, labels) = match &metadata {
        Some(m) => (m.node_count, m.directed, (0..m.node_count).map(|i| i.to_string()).collect()),
        None => {
            if compact.labels.is_empty() {
                return Err(Error::EmptyFile { path: path.to_owned() });
            }
            (compact.labels.len(), directed, compact.labels)
        }
    };
    for (idx, &(u, v, _)) in edges.iter().enumerate() {
        if u >= node_count || v >= node_count {
            return Err(parse_err(
                path,
                idx + 1,
                format!("edge ({u}, {v}) out of range for {node_count} nodes"),
            ));
        }
    }
    let graph = Graph::build(node_count, edges.into_iter(), directed, weighted)?;
    Ok(LoadedGraph {
        graph,
        labels,
        metadata,
    })
}

fn fmt_duration(d: f64) -> String {
    format!("{d}")
}

/// Writes `g` in `format`. Undirected edges are written once with `u < v`.
pub fn save_graph(g: &Graph, path: &Path, format: GraphFormat) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    match format {
        GraphFormat::SnapEdgelist => {
            writeln!(w, "# Nodes: {} Edges: {}", g.node_count(), g.edge_count())?;
            for (u, v, _) in g.edges() {
                writeln!(w, "{u}\t{v}")?;
            }
        }
        GraphFormat::MatrixMarket => {
            let sym = if g.is_directed() { "general" } else { "symmetric" };
            writeln!(w, "%%MatrixMarket matrix coordinate pattern {sym}")?;
            writeln!(w, "{} {} {}", g.node_count(), g.node_count(), g.edge_count())?;
            for (u, v, _) in g.edges() {
                // symmetric storage keeps the lower triangle
                let (r, c) = if g.is_directed() { (u, v) } else { (v, u) };
                writeln!(w, "{} {}", r + 1, c + 1)?;
            }
        }
        GraphFormat::Tsv => {
            for (u, v, d) in g.edges() {
                match d {
                    Some(d) => writeln!(w, "{u}\t{v}\t{}", fmt_duration(d))?,
                    None => writeln!(w, "{u}\t{v}")?,
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Canonical save: tsv plus JSON metadata sidecar.
pub fn save_canonical(g: &Graph, label: &GraphLabel, path: &Path) -> Result<()> {
    save_graph(g, path, GraphFormat::Tsv)?;
    let meta = GraphMetadata {
        name: label.name.clone(),
        family: label.family,
        directed: g.is_directed(),
        node_count: g.node_count(),
    };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

pub fn load_canonical(path: &Path) -> Result<(Graph, GraphLabel)> {
    let side = sidecar_path(path);
    if !side.exists() {
        return Err(Error::InvalidInput(format!("missing metadata sidecar {}", side.display())));
    }
    let loaded = load_graph_labeled(path, GraphFormat::Tsv, false).or_else(|e| match e {
        // an edgeless canonical graph is a valid empty file
        Error::EmptyFile { .. } => {
            let meta: GraphMetadata = serde_json::from_str(&fs::read_to_string(&side)?)?;
            Ok(LoadedGraph {
                graph: Graph::empty(meta.node_count, meta.directed),
                labels: Vec::new(),
                metadata: Some(meta),
            })
        }
        e => Err(e),
    })?;
    let meta = loaded.metadata.expect("sidecar checked above");
    Ok((loaded.graph, GraphLabel::new(meta.name, meta.family)))
}

/// Writes `compact_id<TAB>original_label` lines.
pub fn write_label_map(labels: &[String], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for (i, l) in labels.iter().enumerate() {
        writeln!(w, "{i}\t{l}")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn snap_path_graph_and_comments() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "p3.txt", "# comment\n0 1\n1 2\n");
        let g = load_graph(&p, GraphFormat::SnapEdgelist, false).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn snap_compacts_in_first_appearance_order() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "g.txt", "10 7\n7 3\n3 3\n");
        let l = load_graph_labeled(&p, GraphFormat::SnapEdgelist, false).unwrap();
        assert_eq!(l.labels, vec!["10", "7", "3"]);
        assert_eq!(l.graph.edge_count(), 2);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "bad.txt", "0 1\n# ok\n1 x\n");
        match load_graph(&p, GraphFormat::SnapEdgelist, false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "e.txt", "");
        assert!(matches!(
            load_graph(&p, GraphFormat::SnapEdgelist, false),
            Err(Error::EmptyFile { .. })
        ));
        let p = write(dir.path(), "c.txt", "# only comments\n");
        assert!(matches!(
            load_graph(&p, GraphFormat::SnapEdgelist, false),
            Err(Error::EmptyFile { .. })
        ));
    }

    #[test]
    fn matrix_market_general_symmetrized() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "m.mtx",
            "%%MatrixMarket matrix coordinate real general\n% c\n4 4 3\n1 2 0.5\n2 1 1.0\n3 1 2\n",
        );
        let g = load_graph(&p, GraphFormat::MatrixMarket, false).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 2);
        let d = load_graph(&p, GraphFormat::MatrixMarket, true).unwrap();
        assert_eq!(d.edge_count(), 3);
    }

    #[test]
    fn matrix_market_entry_count_checked() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "m.mtx", "%%MatrixMarket matrix coordinate pattern general\n3 3 2\n1 2\n");
        assert!(load_graph(&p, GraphFormat::MatrixMarket, false).is_err());
    }

    #[test]
    fn tsv_inconsistent_columns() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "t.tsv", "0\t1\t5\n1\t2\n");
        assert!(matches!(
            load_graph(&p, GraphFormat::Tsv, false),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn canonical_round_trip_keeps_isolated_nodes() {
        let dir = tempfile::tempdir().unwrap();
        let g = Graph::from_weighted_edge_list(5, &[(3, 1, 30.0), (1, 0, 12.5)], false).unwrap();
        let p = dir.path().join("g.tsv");
        save_canonical(&g, &GraphLabel::new("g", Family::AgentSynthetic), &p).unwrap();
        let (h, label) = load_canonical(&p).unwrap();
        assert_eq!(h, g);
        assert_eq!(label.family, Family::AgentSynthetic);

        let empty = Graph::empty(3, false);
        save_canonical(&empty, &GraphLabel::new("e", Family::RealWorld), &p).unwrap();
        assert_eq!(load_canonical(&p).unwrap().0, empty);
    }

    fn relabel(loaded: &LoadedGraph) -> Graph {
        // map compacted ids back to their original integer labels
        let perm: Vec<usize> = loaded.labels.iter().map(|l| l.parse().unwrap()).collect();
        loaded.graph.permute(&perm).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn round_trip_each_format(
            n in 2usize..12,
            raw in proptest::collection::vec((0usize..12, 0usize..12), 1..30),
            directed in any::<bool>(),
        ) {
            // every node touches an edge so the snap format can represent it
            let mut edges: Vec<_> = raw.into_iter().filter(|&(u, v)| u < n && v < n && u != v).collect();
            for v in 0..n { edges.push((v, (v + 1) % n)); }
            let g = Graph::from_edge_list(n, &edges, directed).unwrap();
            let dir = tempfile::tempdir().unwrap();

            let p = dir.path().join("g.tsv");
            save_canonical(&g, &GraphLabel::new("g", Family::ErdosRenyi), &p).unwrap();
            prop_assert_eq!(&load_canonical(&p).unwrap().0, &g);

            let p = dir.path().join("g.mtx");
            save_graph(&g, &p, GraphFormat::MatrixMarket).unwrap();
            prop_assert_eq!(&load_graph(&p, GraphFormat::MatrixMarket, directed).unwrap(), &g);

            let p = dir.path().join("g.txt");
            save_graph(&g, &p, GraphFormat::SnapEdgelist).unwrap();
            let loaded = load_graph_labeled(&p, GraphFormat::SnapEdgelist, directed).unwrap();
            prop_assert_eq!(&relabel(&loaded), &g);
        }
    }
}
