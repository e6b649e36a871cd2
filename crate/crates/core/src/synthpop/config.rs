//! Population configuration file and the built-in desk-scale setup.

use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::gravity::{gravity_assign, VisitSchedule};
use super::ipf::{ipf_fit, Axis, AxisKind, IpfFit, MarginalSet, Tensor};
use super::population::{assign_home_locations, sample_households, Capacities, HouseholdShape, Location, Population, Purpose};
use super::schedule::{assign_schedules, Activity, ScheduleAssignment, ScheduleTemplate, WeeklySchedule, MINUTES_PER_DAY};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IpfSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IpfSettings {
    fn default() -> Self {
        IpfSettings { tol: 1e-8, max_iter: 500 }
    }
}

fn default_max_adults() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationConfig {
    pub axes: Vec<Axis>,
    pub marginals: Vec<Vec<f64>>,
    /// Row-major over the axes' cross product.
    pub seed_table: Vec<f64>,
    #[serde(default)]
    pub household_size_axis: Option<String>,
    #[serde(default)]
    pub age_axis: Option<String>,
    /// Members past this count are children.
    #[serde(default = "default_max_adults")]
    pub max_adults: usize,
    #[serde(default)]
    pub ipf: IpfSettings,
    pub locations: Vec<Location>,
    pub templates: Vec<ScheduleTemplate>,
}

#[derive(Clone, Debug)]
pub struct GeneratedPopulation {
    pub fit: IpfFit<f64>,
    pub population: Population,
    pub schedules: ScheduleAssignment,
    pub visits: VisitSchedule,
}

impl PopulationConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: PopulationConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Ok(cfg.normalized())
    }

    /// Location and template ids follow list order.
    fn normalized(mut self) -> Self {
        for (i, l) in self.locations.iter_mut().enumerate() {
            l.id = i;
        }
        for (i, t) in self.templates.iter_mut().enumerate() {
            t.id = i;
        }
        self
    }

    fn axis_named(&self, name: &Option<String>) -> Result<Option<usize>> {
        name.as_ref()
            .map(|n| {
                self.axes
                    .iter()
                    .position(|a| &a.name == n)
                    .ok_or_else(|| Error::InvalidInput(format!("no axis named {n:?}")))
            })
            .transpose()
    }

    pub fn marginal_set(&self) -> Result<MarginalSet<f64>> {
        let shape = self.axes.iter().map(|a| a.categories.len()).collect();
        Ok(MarginalSet {
            axes: self.axes.clone(),
            marginals: self.marginals.clone(),
            seed_table: Tensor::new(shape, self.seed_table.clone())?,
        })
    }

    /// Runs the whole population pipeline: fit, sample, place homes,
    /// match schedules, locate activities.
    pub fn generate(&self, n_households: usize, seed: u64) -> Result<GeneratedPopulation> {
        let fit = ipf_fit(&self.marginal_set()?, self.ipf.tol, self.ipf.max_iter)?;
        let shape = HouseholdShape {
            size_axis: self.axis_named(&self.household_size_axis)?,
            age_axis: self.axis_named(&self.age_axis)?,
            max_adults: self.max_adults,
        };
        let labels = shape.size_axis.map(|a| self.axes[a].categories.as_slice());
        let mut population = sample_households(&fit.table, labels, &shape, n_households, rng::mix(seed, 1))?;
        population.locations = self.clone().normalized().locations;
        let population = assign_home_locations(population)?;
        let schedules = assign_schedules(&population, &self.templates, &self.axes)?;
        let visits = gravity_assign(&population, &schedules.person_schedules, rng::mix(seed, 2))?;
        Ok(GeneratedPopulation {
            fit,
            population,
            schedules,
            visits,
        })
    }

    /// Built-in configuration: a 30 km square town with about 1,700
    /// residences, workplaces, shops, other venues and schools, household
    /// size x householder age x household type marginals, and a bank of
    /// template households. Deterministic.
    pub fn desk_scale() -> Self {
        let axes = vec![
            Axis::new("size", &["1", "2", "3", "4", "5+"], AxisKind::Ordinal),
            Axis::new("age", &["under35", "35to64", "65plus"], AxisKind::Ordinal),
            Axis::new("type", &["family", "nonfamily"], AxisKind::Categorical),
        ];
        let marginals = vec![
            vec![280.0, 340.0, 160.0, 130.0, 90.0],
            vec![220.0, 540.0, 240.0],
            vec![650.0, 350.0],
        ];
        // [size][age][type]
        let seed: [[[f64; 2]; 3]; 5] = [
            [[0.0, 1.0], [0.0, 2.0], [0.0, 3.0]],
            [[1.0, 1.0], [2.0, 0.5], [2.0, 0.3]],
            [[1.0, 0.3], [2.0, 0.1], [0.5, 0.05]],
            [[1.0, 0.1], [2.0, 0.05], [0.2, 0.02]],
            [[0.5, 0.05], [1.5, 0.02], [0.2, 0.01]],
        ];
        let seed_table: Vec<f64> = seed.iter().flatten().flatten().copied().collect();

        let mut r = rng::seeded(0x5EED_D35C);
        let mut locations = Vec::new();
        let mut place = |r: &mut rng::Rng, caps: &[(Purpose, f64)]| {
            let mut capacities = Capacities::default();
            for &(p, c) in caps {
                capacities.set(p, c);
            }
            locations.push(Location {
                id: locations.len(),
                x: r.gen_range(0.0..30.0),
                y: r.gen_range(0.0..30.0),
                capacities,
            });
        };
        for _ in 0..1400 {
            place(&mut r, &[(Purpose::Home, 1.0)]);
        }
        for _ in 0..75 {
            place(&mut r, &[(Purpose::Home, 4.0)]);
        }
        for _ in 0..60 {
            let c = r.gen_range(5.0..150.0f64).round();
            place(&mut r, &[(Purpose::Work, c)]);
        }
        for _ in 0..25 {
            let c = r.gen_range(20.0..150.0f64).round();
            place(&mut r, &[(Purpose::Shopping, c), (Purpose::Work, (c / 10.0).round())]);
        }
        for _ in 0..40 {
            let c = r.gen_range(10.0..100.0f64).round();
            place(&mut r, &[(Purpose::Other, c), (Purpose::Work, (c / 10.0).round())]);
        }
        for _ in 0..8 {
            let c = r.gen_range(200.0..500.0f64).round();
            place(&mut r, &[(Purpose::School, c), (Purpose::Work, (c / 15.0).round())]);
        }

        let mut templates = Vec::new();
        for (s, by_age) in seed.iter().enumerate() {
            for (a, by_type) in by_age.iter().enumerate() {
                for (t, &mass) in by_type.iter().enumerate() {
                    if mass <= 0.0 {
                        continue;
                    }
                    for _ in 0..3 {
                        let size = s + 1;
                        let adults = if t == 0 { size.min(2) } else { size };
                        let members = (0..size)
                            .map(|m| {
                                let kind = if m >= adults {
                                    DayKind::Student
                                } else if a == 2 {
                                    if r.gen_bool(0.2) { DayKind::Worker } else { DayKind::Home }
                                } else if r.gen_bool(0.75) {
                                    DayKind::Worker
                                } else {
                                    DayKind::Home
                                };
                                week_for(kind, &mut r)
                            })
                            .collect();
                        templates.push(ScheduleTemplate {
                            id: templates.len(),
                            demographics: vec![s, a, t],
                            members,
                        });
                    }
                }
            }
        }

        PopulationConfig {
            axes,
            marginals,
            seed_table,
            household_size_axis: Some("size".into()),
            age_axis: Some("age".into()),
            max_adults: 2,
            ipf: IpfSettings::default(),
            locations,
            templates,
        }
    }
}

#[derive(Clone, Copy)]
enum DayKind {
    Worker,
    Student,
    Home,
}

fn week_for(kind: DayKind, r: &mut rng::Rng) -> WeeklySchedule {
    let days = (0..7)
        .map(|d| {
            let weekend = d >= 5;
            let mut outings: Vec<(Purpose, u32, u32)> = Vec::new();
            match (kind, weekend) {
                (DayKind::Worker, false) => {
                    let start = 420 + r.gen_range(0..120);
                    let len = 480 + r.gen_range(0..60);
                    outings.push((Purpose::Work, start, len));
                    if r.gen_bool(0.3) {
                        outings.push((Purpose::Shopping, start + len + 15, 30 + r.gen_range(0..30)));
                    }
                    if r.gen_bool(0.25) {
                        outings.push((Purpose::Other, 1080 + r.gen_range(0..60), 60 + r.gen_range(0..90)));
                    }
                }
                (DayKind::Student, false) => {
                    let start = 470 + r.gen_range(0..20);
                    outings.push((Purpose::School, start, 390));
                    if r.gen_bool(0.4) {
                        outings.push((Purpose::Other, start + 420, 60 + r.gen_range(0..60)));
                    }
                }
                (DayKind::Home, false) => {
                    if r.gen_bool(0.45) {
                        outings.push((Purpose::Shopping, 600 + r.gen_range(0..240), 30 + r.gen_range(0..60)));
                    }
                    if r.gen_bool(0.4) {
                        outings.push((Purpose::Other, 900 + r.gen_range(0..180), 60 + r.gen_range(0..120)));
                    }
                }
                (_, true) => {
                    if r.gen_bool(0.6) {
                        outings.push((Purpose::Shopping, 600 + r.gen_range(0..300), 30 + r.gen_range(0..90)));
                    }
                    if r.gen_bool(0.5) {
                        outings.push((Purpose::Other, 960 + r.gen_range(0..180), 60 + r.gen_range(0..120)));
                    }
                }
            }
            fill_with_home(&outings)
        })
        .collect();
    WeeklySchedule { days }
}

/// Orders outings, pushes later ones back to avoid overlap, trims at
/// midnight and fills the gaps with HOME.
fn fill_with_home(outings: &[(Purpose, u32, u32)]) -> Vec<Activity> {
    let mut day = Vec::new();
    let mut t = 0u32;
    let mut sorted = outings.to_vec();
    sorted.sort_by_key(|o| o.1);
    for (purpose, start, duration) in sorted {
        let start = start.max(t);
        let end = (start + duration).min(MINUTES_PER_DAY - 30);
        if end <= start {
            continue;
        }
        if start > t {
            day.push(Activity { purpose: Purpose::Home, start: t, duration: start - t });
        }
        day.push(Activity { purpose, start, duration: end - start });
        t = end;
    }
    if t < MINUTES_PER_DAY {
        day.push(Activity { purpose: Purpose::Home, start: t, duration: MINUTES_PER_DAY - t });
    }
    day
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_scale_is_valid_and_deterministic() {
        let cfg = PopulationConfig::desk_scale();
        assert_eq!(cfg, PopulationConfig::desk_scale());
        for t in &cfg.templates {
            for m in &t.members {
                m.validate().unwrap();
            }
        }
        let json = serde_json::to_string(&cfg).unwrap();
        let back: PopulationConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn generate_small_population() {
        let cfg = PopulationConfig::desk_scale();
        let g = cfg.generate(300, 11).unwrap();
        g.population.validate().unwrap();
        g.visits.validate(Some(&g.population.locations)).unwrap();
        assert!(g.population.persons.len() >= 300);
        assert_eq!(g.visits.person_count, g.population.persons.len());
        // every household matched a template with its exact demographics
        assert!(g.schedules.distance_of_household.iter().all(|&d| d == 0.0));
        let again = cfg.generate(300, 11).unwrap();
        assert_eq!(again.visits, g.visits);
    }

    #[test]
    fn fill_with_home_covers_day() {
        let day = fill_with_home(&[(Purpose::Work, 480, 480), (Purpose::Other, 900, 60)]);
        let total: u32 = day.iter().map(|a| a.duration).sum();
        assert_eq!(total, MINUTES_PER_DAY);
        WeeklySchedule { days: vec![day; 7] }.validate().unwrap();
    }
}
