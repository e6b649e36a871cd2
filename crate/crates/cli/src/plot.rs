//! Scatter CSV and its SVG rendering: marker shape by family, fill by
//! cluster.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use synthgraph::{Family, Error};

#[derive(Clone, Debug, PartialEq)]
pub struct ScatterRow {
    pub name: String,
    pub family: Family,
    pub cluster: usize,
    pub pc1: f64,
    pub pc2: f64,
}

pub fn write_scatter(rows: &[ScatterRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["name", "family", "cluster", "pc1", "pc2"])?;
    for r in rows {
        w.write_record([
            r.name.clone(),
            r.family.as_str().to_string(),
            r.cluster.to_string(),
            r.pc1.to_string(),
            r.pc2.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scatter(path: &Path) -> Result<Vec<ScatterRow>> {
    let bad = |line: usize, message: String| -> anyhow::Error {
        Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        }
        .into()
    };
    let mut r = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let header = r.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["name", "family", "cluster", "pc1", "pc2"] {
        return Err(bad(1, "expected header name,family,cluster,pc1,pc2".into()));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| bad(line, e.to_string()))?;
        if rec.len() != 5 {
            return Err(bad(line, format!("expected 5 fields, got {}", rec.len())));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(line, format!("bad coordinate {s:?}")))
        };
        rows.push(ScatterRow {
            name: rec[0].to_string(),
            family: rec[1].parse().map_err(|e: Error| bad(line, e.to_string()))?,
            cluster: rec[2].trim().parse().map_err(|_| bad(line, format!("bad cluster {:?}", &rec[2])))?,
            pc1: num(&rec[3])?,
            pc2: num(&rec[4])?,
        });
    }
    if rows.is_empty() {
        bail!(Error::EmptyFile { path: path.to_path_buf() });
    }
    Ok(rows)
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf",
];

fn color(cluster: usize) -> &'static str {
    PALETTE[cluster % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// SVG element for a family's marker centred at (x, y).
fn marker(family: Family, x: f64, y: f64, fill: &str, class: &str, title: Option<&str>) -> String {
    let r = 6.0;
    let style = format!(r#"class="{class}" fill="{fill}" stroke="black" stroke-width="0.8""#);
    let pts = |p: &[(f64, f64)]| {
        p.iter()
            .map(|(dx, dy)| format!("{:.2},{:.2}", x + dx, y + dy))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let shape = match family {
        Family::ErdosRenyi => format!(r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" {style}"#),
        Family::NewmanWatts => format!(
            r#"<rect x="{:.2}" y="{:.2}" width="{}" height="{}" {style}"#,
            x - r,
            y - r,
            2.0 * r,
            2.0 * r
        ),
        Family::RandomRegular => format!(r#"<polygon points="{}" {style}"#, pts(&[(0.0, -r), (r, r), (-r, r)])),
        Family::PowerlawCluster => format!(
            r#"<polygon points="{}" {style}"#,
            pts(&[(0.0, -r), (r, 0.0), (0.0, r), (-r, 0.0)])
        ),
        Family::AgentSynthetic => format!(r#"<polygon points="{}" {style}"#, pts(&[(-r, -r), (r, -r), (0.0, r)])),
        Family::RealWorld => {
            let star: Vec<(f64, f64)> = (0..10)
                .map(|i| {
                    let a = std::f64::consts::PI * i as f64 / 5.0 - std::f64::consts::FRAC_PI_2;
                    let rad = if i % 2 == 0 { r * 1.3 } else { r * 0.55 };
                    (rad * a.cos(), rad * a.sin())
                })
                .collect();
            format!(r#"<polygon points="{}" {style}"#, pts(&star))
        }
    };
    match title {
        Some(t) => format!("{shape}><title>{}</title></{}>", escape(t), tag_of(&shape)),
        None => format!("{shape}/>"),
    }
}

fn tag_of(element: &str) -> &str {
    element[1..].split(' ').next().unwrap_or("g")
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=4).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()
}

pub fn render_svg(rows: &[ScatterRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(anyhow!("nothing to plot"));
    }
    let (width, height) = (900.0, 620.0);
    let (left, right, top, bottom) = (70.0, 690.0, 30.0, 560.0);
    let range = |f: fn(&ScatterRow) -> f64| {
        let lo = rows.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        let pad = if hi > lo { (hi - lo) * 0.05 } else { 1.0 };
        (lo - pad, hi + pad)
    };
    let (x0, x1) = range(|r| r.pc1);
    let (y0, y1) = range(|r| r.pc2);
    let sx = |v: f64| left + (v - x0) / (x1 - x0) * (right - left);
    let sy = |v: f64| bottom - (v - y0) / (y1 - y0) * (bottom - top);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    )?;
    writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#)?;
    writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    )?;
    for t in ticks(x0, x1) {
        let x = sx(t);
        writeln!(s, r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="black"/>"#, bottom + 5.0)?;
        writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{t:.2}</text>"#, bottom + 18.0)?;
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/>"#, left - 5.0)?;
        writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{t:.2}</text>"#, left - 8.0, y + 4.0)?;
    }
    writeln!(
        s,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle" font-size="14">PC1</text>"#,
        (left + right) / 2.0,
        height - 20.0
    )?;
    writeln!(
        s,
        r#"<text class="axis-label" x="20" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 20 {})">PC2</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0
    )?;

    for r in rows {
        writeln!(s, "{}", marker(r.family, sx(r.pc1), sy(r.pc2), color(r.cluster), "marker", Some(&r.name)))?;
    }

    let lx = right + 25.0;
    let mut y = top + 10.0;
    writeln!(s, r#"<text x="{lx}" y="{y}" font-weight="bold">Family</text>"#)?;
    for f in Family::ALL {
        y += 22.0;
        writeln!(s, "{}", marker(f, lx + 8.0, y - 4.0, "white", "legend-shape", None))?;
        writeln!(s, r#"<text x="{}" y="{y}">{}</text>"#, lx + 22.0, f.as_str())?;
    }
    y += 36.0;
    writeln!(s, r#"<text x="{lx}" y="{y}" font-weight="bold">Cluster</text>"#)?;
    let clusters: BTreeSet<usize> = rows.iter().map(|r| r.cluster).collect();
    for c in clusters {
        y += 22.0;
        writeln!(
            s,
            r#"<rect class="legend-color" x="{lx}" y="{}" width="14" height="14" fill="{}" stroke="black"/>"#,
            y - 12.0,
            color(c)
        )?;
        writeln!(s, r#"<text x="{}" y="{y}">{c}</text>"#, lx + 22.0)?;
    }
    writeln!(s, "</svg>")?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(n: usize, clusters: usize) -> Vec<ScatterRow> {
        (0..n)
            .map(|i| ScatterRow {
                name: format!("g<{i}>"),
                family: Family::ALL[i % 6],
                cluster: i % clusters,
                pc1: i as f64,
                pc2: (i * i) as f64 * 0.1,
            })
            .collect()
    }

    #[test]
    fn marker_and_legend_counts() {
        let svg = render_svg(&rows(27, 6)).unwrap();
        assert_eq!(svg.matches(r#"class="marker""#).count(), 27);
        assert_eq!(svg.matches(r#"class="legend-shape""#).count(), 6);
        assert_eq!(svg.matches(r#"class="legend-color""#).count(), 6);
        assert!(svg.contains(">PC1<") && svg.contains(">PC2<"));
        assert!(svg.contains("g&lt;3&gt;"));
    }

    #[test]
    fn single_cluster_single_color() {
        let svg = render_svg(&rows(10, 1)).unwrap();
        let fills: BTreeSet<&str> = svg
            .lines()
            .filter(|l| l.contains(r#"class="marker""#))
            .map(|l| l.split("fill=\"").nth(1).unwrap().split('"').next().unwrap())
            .collect();
        assert_eq!(fills.len(), 1);
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("scatter.csv");
        let r = rows(7, 3);
        write_scatter(&r, &p).unwrap();
        assert_eq!(read_scatter(&p).unwrap(), r);
        assert!(render_svg(&[]).is_err());

        std::fs::write(&p, "name,family,cluster,pc1,pc2\na,RealWorld,0,1,2\nb,RealWorld,x,1,2\n").unwrap();
        let err = read_scatter(&p).unwrap_err();
        assert!(matches!(err.downcast_ref::<Error>(), Some(Error::Parse { line: 3, .. })), "{err}");
        std::fs::write(&p, "name,family,cluster,pc1,pc2\n").unwrap();
        assert!(read_scatter(&p).is_err());
    }
}
