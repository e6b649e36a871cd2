//! Activity-location choice with a capacity-weighted inverse-square
//! gravity kernel.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::population::{Location, Population, Purpose};
use super::schedule::{WeeklySchedule, MINUTES_PER_DAY, MINUTES_PER_WEEK};
use crate::error::{Error, Result};
use crate::rng;

/// 50 miles.
pub const CUTOFF_KM: f64 = 80.4672;
/// Distance floor for the kernel.
pub const MIN_DISTANCE_KM: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Visit {
    pub person: usize,
    pub location: usize,
    pub purpose: Purpose,
    /// Minute of the week, in [0, 10080).
    pub start: u32,
    pub duration: u32,
}

impl Visit {
    pub fn end(&self) -> u32 {
        self.start + self.duration
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VisitSchedule {
    pub person_count: usize,
    pub visits: Vec<Visit>,
}

impl VisitSchedule {
    /// Per-person non-overlap plus time bounds; with `locations`, also checks
    /// that every visited location offers the visit's purpose.
    pub fn validate(&self, locations: Option<&[Location]>) -> Result<()> {
        let mut by_person: Vec<&Visit> = self.visits.iter().collect();
        by_person.sort_by_key(|v| (v.person, v.start));
        for w in by_person.windows(2) {
            if w[0].person == w[1].person && w[1].start < w[0].end() {
                return Err(Error::InvalidInput(format!("person {} has overlapping visits", w[0].person)));
            }
        }
        for v in &self.visits {
            if v.person >= self.person_count || v.duration == 0 || v.start >= MINUTES_PER_WEEK {
                return Err(Error::InvalidInput(format!("invalid visit {v:?}")));
            }
            if let Some(locs) = locations {
                if locs.get(v.location).map_or(true, |l| l.capacities.get(v.purpose) <= 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "location {} does not offer {}",
                        v.location, v.purpose
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Selection probabilities over `candidates` for an activity anchored at
/// `(x, y)`: proportional to capacity / max(d, 0.1 km)^2 among candidates
/// within the cutoff, or among all candidates if none is that close.
pub fn gravity_probabilities(
    locations: &[Location],
    candidates: &[usize],
    purpose: Purpose,
    (x, y): (f64, f64),
) -> Result<Vec<(usize, f64)>> {
    let offering: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&c| locations[c].capacities.get(purpose) > 0.0)
        .collect();
    if offering.is_empty() {
        return Err(Error::NoCandidate(purpose.to_string()));
    }
    let near: Vec<usize> = offering
        .iter()
        .copied()
        .filter(|&c| locations[c].distance_to(x, y) <= CUTOFF_KM)
        .collect();
    let pool = if near.is_empty() { offering } else { near };
    let weights: Vec<f64> = pool
        .iter()
        .map(|&c| {
            let d = locations[c].distance_to(x, y).max(MIN_DISTANCE_KM);
            locations[c].capacities.get(purpose) / (d * d)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    Ok(pool.into_iter().zip(weights).map(|(c, w)| (c, w / total)).collect())
}

fn draw(probs: &[(usize, f64)], rng: &mut rng::Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(c, p) in probs {
        acc += p;
        if u < acc {
            return c;
        }
    }
    probs.last().expect("non-empty").0
}

pub fn gravity_choice(
    locations: &[Location],
    candidates: &[usize],
    purpose: Purpose,
    anchor: (f64, f64),
    rng: &mut rng::Rng,
) -> Result<usize> {
    Ok(draw(&gravity_probabilities(locations, candidates, purpose, anchor)?, rng))
}

/// Turns per-person weekly schedules into located visits.
///
/// HOME is pinned to the household residence. WORK and SCHOOL are chosen
/// once per person relative to home. SHOPPING and OTHER are chosen relative
/// to the midpoint of the surrounding activities' locations. Each person
/// draws from its own stream keyed by person id.
pub fn gravity_assign(pop: &Population, schedules: &[WeeklySchedule], seed: u64) -> Result<VisitSchedule> {
    if schedules.len() != pop.persons.len() {
        return Err(Error::InvalidInput("one schedule per person required".into()));
    }
    let all: Vec<usize> = (0..pop.locations.len()).collect();
    let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); Purpose::ALL.len()];
    for p in Purpose::ALL {
        candidates[p.index()] = all
            .iter()
            .copied()
            .filter(|&l| pop.locations[l].capacities.get(p) > 0.0)
            .collect();
    }
    let pos = |l: usize| (pop.locations[l].x, pop.locations[l].y);

    let mut visits = Vec::new();
    for person in &pop.persons {
        let home = pop.households[person.household]
            .home
            .ok_or_else(|| Error::InvalidInput(format!("household {} has no home", person.household)))?;
        let schedule = &schedules[person.id];
        let mut rng = rng::stream(seed, person.id as u64);

        let mut anchors = [None; 5];
        for p in [Purpose::Work, Purpose::School] {
            if schedule.uses(p) {
                anchors[p.index()] = Some(gravity_choice(&pop.locations, &candidates[p.index()], p, pos(home), &mut rng)?);
            }
        }
        let fixed = |p: Purpose| match p {
            Purpose::Home => Some(home),
            Purpose::Work | Purpose::School => anchors[p.index()],
            _ => None,
        };

        for (d, day) in schedule.days.iter().enumerate() {
            let mut prev = home;
            for (i, a) in day.iter().enumerate() {
                let loc = match fixed(a.purpose) {
                    Some(l) => l,
                    None => {
                        let next = day[i + 1..].iter().find_map(|b| fixed(b.purpose)).unwrap_or(home);
                        let (px, py) = pos(prev);
                        let (nx, ny) = pos(next);
                        let mid = ((px + nx) / 2.0, (py + ny) / 2.0);
                        gravity_choice(&pop.locations, &candidates[a.purpose.index()], a.purpose, mid, &mut rng)?
                    }
                };
                visits.push(Visit {
                    person: person.id,
                    location: loc,
                    purpose: a.purpose,
                    start: d as u32 * MINUTES_PER_DAY + a.start,
                    duration: a.duration,
                });
                prev = loc;
            }
        }
    }
    Ok(VisitSchedule {
        person_count: pop.persons.len(),
        visits,
    })
}

/// `person<TAB>location<TAB>purpose<TAB>start_min<TAB>duration_min`, after a
/// `# persons=N` header line.
pub fn write_visits(vs: &VisitSchedule, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "# persons={}", vs.person_count)?;
    for v in &vs.visits {
        writeln!(w, "{}\t{}\t{}\t{}\t{}", v.person, v.location, v.purpose, v.start, v.duration)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_visits(path: &Path) -> Result<VisitSchedule> {
    let text = fs::read_to_string(path)?;
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_owned(),
        line,
        message,
    };
    let mut person_count: Option<usize> = None;
    let mut visits = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("persons=") {
                person_count = Some(v.trim().parse().map_err(|_| err(n, "bad persons header".into()))?);
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let t: Vec<&str> = line.split('\t').collect();
        if t.len() != 5 {
            return Err(err(n, format!("expected 5 tab-separated fields, found {}", t.len())));
        }
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| err(n, format!("bad number {s:?}")));
        let purpose: Purpose = t[2].trim().parse().map_err(|e: Error| err(n, e.to_string()))?;
        visits.push(Visit {
            person: num(t[0])? as usize,
            location: num(t[1])? as usize,
            purpose,
            start: num(t[3])? as u32,
            duration: num(t[4])? as u32,
        });
    }
    if visits.is_empty() && person_count.is_none() {
        return Err(Error::EmptyFile { path: path.to_owned() });
    }
    let person_count = person_count.unwrap_or_else(|| visits.iter().map(|v| v.person + 1).max().unwrap_or(0));
    let vs = VisitSchedule { person_count, visits };
    vs.validate(None)?;
    Ok(vs)
}
