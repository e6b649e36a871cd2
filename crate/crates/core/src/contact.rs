//! Person-person contact networks induced from visit schedules, with
//! per-activity edge retention.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Family, Graph, GraphLabel};
use crate::rng;
use crate::synthpop::{Purpose, Visit, VisitSchedule};

/// One collocation: two visits at the same location overlapping in time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Contact {
    pub u: usize,
    pub v: usize,
    pub location: usize,
    /// Minute of the week the overlap begins.
    pub start: u32,
    pub overlap: u32,
    pub purpose_u: Purpose,
    pub purpose_v: Purpose,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ContactMultigraph {
    pub person_count: usize,
    /// Canonically sorted; `u < v` in every record.
    pub contacts: Vec<Contact>,
}

/// Every pair of visits sharing a location for a positive overlap.
pub fn induce_contacts(vs: &VisitSchedule) -> ContactMultigraph {
    let mut by_location: BTreeMap<usize, Vec<Visit>> = BTreeMap::new();
    for v in &vs.visits {
        by_location.entry(v.location).or_default().push(*v);
    }
    let groups: Vec<Vec<Visit>> = by_location.into_values().collect();
    let mut contacts: Vec<Contact> = groups.into_par_iter().flat_map_iter(sweep_location).collect();
    contacts.sort_unstable();
    ContactMultigraph {
        person_count: vs.person_count,
        contacts,
    }
}

fn sweep_location(mut visits: Vec<Visit>) -> Vec<Contact> {
    visits.sort_by_key(|v| (v.start, v.person, v.duration));
    let mut out = Vec::new();
    let mut active: Vec<Visit> = Vec::new();
    for v in visits {
        active.retain(|a| a.end() > v.start);
        for a in &active {
            if a.person == v.person {
                continue;
            }
            let overlap = a.end().min(v.end()) - v.start;
            let (first, second) = if a.person < v.person { (a, &v) } else { (&v, a) };
            out.push(Contact {
                u: first.person,
                v: second.person,
                location: v.location,
                start: v.start,
                overlap,
                purpose_u: first.purpose,
                purpose_v: second.purpose,
            });
        }
        active.push(v);
    }
    out
}

/// Retention probabilities per activity, in the order home, work,
/// shopping, other, school.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivityProbabilities {
    pub home: f64,
    pub work: f64,
    pub shopping: f64,
    pub other: f64,
    pub school: f64,
}

impl ActivityProbabilities {
    pub fn new(p: [f64; 5]) -> Result<Self> {
        let probs = ActivityProbabilities {
            home: p[0],
            work: p[1],
            shopping: p[2],
            other: p[3],
            school: p[4],
        };
        probs.validate()?;
        Ok(probs)
    }

    pub fn uniform(p: f64) -> Result<Self> {
        Self::new([p; 5])
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.home, self.work, self.shopping, self.other, self.school]
    }

    pub fn get(&self, p: Purpose) -> f64 {
        self.to_array()[p.index()]
    }

    pub fn validate(&self) -> Result<()> {
        if self.to_array().iter().all(|p| (0.0..=1.0).contains(p)) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("probabilities must lie in [0, 1]: {self}")))
        }
    }

    /// Retention probability of a collocation between the two purposes.
    pub fn pair(&self, a: Purpose, b: Purpose) -> f64 {
        if a == b {
            self.get(a)
        } else {
            (self.get(a) * self.get(b)).sqrt()
        }
    }
}

impl fmt::Display for ActivityProbabilities {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_array().iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for ActivityProbabilities {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .trim()
            .trim_start_matches('{')
            .trim_end_matches('}')
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("bad probability {x:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let arr: [f64; 5] = values
            .try_into()
            .map_err(|_| Error::InvalidInput(format!("expected five probabilities, got {s:?}")))?;
        Self::new(arr)
    }
}

/// Keeps each collocation iff its keyed uniform falls below the pair
/// probability. The uniform depends only on `seed` and the collocation's
/// position in the canonical order, so raising any probability can only
/// add edges.
pub fn sample_contacts(cm: &ContactMultigraph, probs: &ActivityProbabilities, seed: u64) -> Result<Graph> {
    probs.validate()?;
    let kept = cm.contacts.iter().enumerate().filter_map(|(i, c)| {
        let g = probs.pair(c.purpose_u, c.purpose_v);
        (g > 0.0 && rng::keyed_uniform(seed, i as u64) < g).then_some((c.u, c.v, c.overlap as f64))
    });
    Graph::build(cm.person_count, kept, false, true)
}

/// The unthinned contact network.
pub fn full_network(cm: &ContactMultigraph) -> Result<Graph> {
    Graph::build(
        cm.person_count,
        cm.contacts.iter().map(|c| (c.u, c.v, c.overlap as f64)),
        false,
        true,
    )
}

pub const TABLE2: [(&str, [f64; 5]); 10] = [
    ("Full", [1.0, 1.0, 1.0, 1.0, 1.0]),
    ("Home", [1.0, 0.0, 0.0, 0.0, 0.0]),
    ("Work", [0.0, 0.01, 0.0, 0.0, 0.0]),
    ("Shopping", [0.0, 0.0, 0.01, 0.0, 0.0]),
    ("Other", [0.0, 0.0, 0.0, 0.01, 0.0]),
    ("School", [0.0, 0.0, 0.0, 0.0, 0.01]),
    ("G1", [1.0, 0.01, 0.0, 0.0, 0.01]),
    ("G2", [1.0, 0.01, 0.01, 0.0, 0.01]),
    ("G3", [1.0, 0.01, 0.01, 0.01, 0.01]),
    ("G4", [1.0, 0.01, 0.01, 0.01, 0.1]),
];

#[derive(Clone, Debug)]
pub struct SampledNetwork {
    pub label: GraphLabel,
    pub probabilities: ActivityProbabilities,
    pub graph: Graph,
}

/// The ten retention configurations, all sampled with the same seed.
pub fn table2_suite(cm: &ContactMultigraph, seed: u64) -> Result<Vec<SampledNetwork>> {
    TABLE2
        .iter()
        .map(|&(name, p)| {
            let probabilities = ActivityProbabilities::new(p)?;
            Ok(SampledNetwork {
                label: GraphLabel::new(name, Family::AgentSynthetic),
                graph: sample_contacts(cm, &probabilities, seed)?,
                probabilities,
            })
        })
        .collect()
}

/// Edge durations rounded up to multiples of `bin_minutes`.
pub fn duration_histogram(g: &Graph, bin_minutes: u32) -> Result<BTreeMap<u64, usize>> {
    if bin_minutes == 0 {
        return Err(Error::InvalidInput("bin width must be positive".into()));
    }
    if g.durations().is_none() {
        return Err(Error::InvalidInput("graph has no contact durations".into()));
    }
    let bin = bin_minutes as f64;
    let mut hist = BTreeMap::new();
    for (_, _, d) in g.edges() {
        let d = d.unwrap_or(0.0);
        *hist.entry(((d / bin).ceil() * bin) as u64).or_insert(0) += 1;
    }
    Ok(hist)
}

/// Number of nodes per (out-)degree.
pub fn degree_histogram(g: &Graph) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for v in 0..g.node_count() {
        *hist.entry(g.out_degree(v)).or_insert(0) += 1;
    }
    hist
}

pub fn write_contacts(cm: &ContactMultigraph, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "# node_count={}", cm.person_count)?;
    for c in &cm.contacts {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            c.u, c.v, c.purpose_u, c.purpose_v, c.location, c.start, c.overlap
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_contacts(path: &Path) -> Result<ContactMultigraph> {
    let text = fs::read_to_string(path)?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut person_count = None;
    let mut contacts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(n) = rest.trim().strip_prefix("node_count=") {
                person_count = Some(n.parse().map_err(|_| parse_err(i + 1, "bad node_count".into()))?);
            }
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 7 {
            return Err(parse_err(i + 1, format!("expected 7 fields, got {}", f.len())));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| parse_err(i + 1, format!("bad number {s:?}")));
        let purpose = |s: &str| s.parse::<Purpose>().map_err(|e| parse_err(i + 1, e.to_string()));
        let c = Contact {
            u: num(f[0])? as usize,
            v: num(f[1])? as usize,
            purpose_u: purpose(f[2])?,
            purpose_v: purpose(f[3])?,
            location: num(f[4])? as usize,
            start: num(f[5])? as u32,
            overlap: num(f[6])? as u32,
        };
        if c.u >= c.v || c.overlap == 0 {
            return Err(parse_err(i + 1, "expected u < v and positive overlap".into()));
        }
        contacts.push(c);
    }
    let person_count = person_count.ok_or_else(|| parse_err(1, "missing '# node_count=' header".into()))?;
    if let Some(c) = contacts.iter().find(|c| c.v >= person_count) {
        return Err(Error::EdgeOutOfRange {
            u: c.u,
            v: c.v,
            node_count: person_count,
        });
    }
    contacts.sort_unstable();
    Ok(ContactMultigraph { person_count, contacts })
}
