//! Weekly activity templates and household-level template matching.

use serde::{Deserialize, Serialize};

use super::ipf::{Axis, AxisKind};
use super::population::{Population, Purpose};
use crate::error::{Error, Result};

pub const MINUTES_PER_DAY: u32 = 1440;
pub const DAYS_PER_WEEK: usize = 7;
pub const MINUTES_PER_WEEK: u32 = MINUTES_PER_DAY * DAYS_PER_WEEK as u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Activity {
    pub purpose: Purpose,
    /// Minute of the day.
    pub start: u32,
    pub duration: u32,
}

impl Activity {
    pub fn end(&self) -> u32 {
        self.start + self.duration
    }
}

/// Seven days of time-ordered, non-overlapping activities. Activities may
/// not run past midnight.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeeklySchedule {
    pub days: Vec<Vec<Activity>>,
}

impl WeeklySchedule {
    pub fn validate(&self) -> Result<()> {
        if self.days.len() != DAYS_PER_WEEK {
            return Err(Error::InvalidInput(format!("schedule has {} days, expected 7", self.days.len())));
        }
        for (d, day) in self.days.iter().enumerate() {
            let mut prev_end = 0;
            for a in day {
                if a.duration == 0 {
                    return Err(Error::InvalidInput(format!("day {d}: zero-length activity")));
                }
                if a.start < prev_end {
                    return Err(Error::InvalidInput(format!("day {d}: activities overlap or are unordered")));
                }
                if a.end() > MINUTES_PER_DAY {
                    return Err(Error::InvalidInput(format!("day {d}: activity runs past midnight")));
                }
                prev_end = a.end();
            }
        }
        Ok(())
    }

    pub fn uses(&self, p: Purpose) -> bool {
        self.days.iter().flatten().any(|a| a.purpose == p)
    }
}

/// A surveyed household: its demographics and one weekly schedule per member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleTemplate {
    #[serde(default)]
    pub id: usize,
    pub demographics: Vec<usize>,
    pub members: Vec<WeeklySchedule>,
}

#[derive(Clone, Debug)]
pub struct ScheduleAssignment {
    /// Matched template index per household.
    pub template_of_household: Vec<usize>,
    pub distance_of_household: Vec<f64>,
    /// Weekly schedule per person.
    pub person_schedules: Vec<WeeklySchedule>,
    /// True when the template covariance was singular and the diagonal
    /// variances were used instead.
    pub diagonal_fallback: bool,
}

fn encode(axes: &[Axis], demographics: &[usize]) -> Vec<f64> {
    let mut out = Vec::new();
    for (axis, &c) in axes.iter().zip(demographics) {
        match axis.kind {
            AxisKind::Ordinal => out.push(c as f64),
            AxisKind::Categorical => {
                out.extend((0..axis.categories.len()).map(|i| if i == c { 1.0 } else { 0.0 }))
            }
        }
    }
    out
}

/// Lower-triangular Cholesky factor, or `None` if not positive definite.
fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if d <= 1e-12 * a[i][i].abs().max(1.0) {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

enum Metric {
    Full(Vec<Vec<f64>>),
    Diagonal(Vec<f64>),
}

impl Metric {
    fn from_samples(samples: &[Vec<f64>]) -> Self {
        let dim = samples[0].len();
        let n = samples.len() as f64;
        let mean: Vec<f64> = (0..dim).map(|j| samples.iter().map(|s| s[j]).sum::<f64>() / n).collect();
        let mut cov = vec![vec![0.0; dim]; dim];
        for s in samples {
            for i in 0..dim {
                for j in 0..dim {
                    cov[i][j] += (s[i] - mean[i]) * (s[j] - mean[j]) / n;
                }
            }
        }
        match cholesky(&cov) {
            Some(l) => Metric::Full(l),
            // a dimension with no spread weighs as unit variance
            None => Metric::Diagonal((0..dim).map(|i| if cov[i][i] > 0.0 { cov[i][i] } else { 1.0 }).collect()),
        }
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        match self {
            Metric::Diagonal(var) => diff.iter().zip(var).map(|(d, v)| d * d / v).sum::<f64>().sqrt(),
            Metric::Full(l) => {
                // solve L z = diff; distance^2 = |z|^2
                let mut z = vec![0.0; diff.len()];
                for i in 0..diff.len() {
                    let s: f64 = (0..i).map(|k| l[i][k] * z[k]).sum();
                    z[i] = (diff[i] - s) / l[i][i];
                }
                z.iter().map(|v| v * v).sum::<f64>().sqrt()
            }
        }
    }
}

/// Matches every household to the template with the smallest Mahalanobis
/// distance over encoded demographics (lowest template index on ties) and
/// copies the template members' schedules to the household members.
/// Members beyond the template's size cycle through its schedules.
pub fn assign_schedules(pop: &Population, templates: &[ScheduleTemplate], axes: &[Axis]) -> Result<ScheduleAssignment> {
    if templates.is_empty() {
        return Err(Error::InvalidInput("no schedule templates".into()));
    }
    for (i, t) in templates.iter().enumerate() {
        if t.members.is_empty() {
            return Err(Error::InvalidInput(format!("template {i} has no members")));
        }
        if t.demographics.len() != axes.len()
            || t.demographics.iter().zip(axes).any(|(&c, a)| c >= a.categories.len())
        {
            return Err(Error::InvalidInput(format!("template {i} demographics do not fit the axes")));
        }
        for m in &t.members {
            m.validate()?;
        }
    }
    let encoded: Vec<Vec<f64>> = templates.iter().map(|t| encode(axes, &t.demographics)).collect();
    let metric = Metric::from_samples(&encoded);
    let mut template_of_household = Vec::with_capacity(pop.households.len());
    let mut distance_of_household = Vec::with_capacity(pop.households.len());
    let mut person_schedules = vec![WeeklySchedule::default(); pop.persons.len()];
    for h in &pop.households {
        let q = encode(axes, &h.demographics);
        let (best, dist) = encoded
            .iter()
            .map(|e| metric.distance(&q, e))
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, d)| if d < acc.1 { (i, d) } else { acc });
        template_of_household.push(best);
        distance_of_household.push(dist);
        let t = &templates[best];
        for (i, &p) in h.members.iter().enumerate() {
            person_schedules[p] = t.members[i % t.members.len()].clone();
        }
    }
    Ok(ScheduleAssignment {
        template_of_household,
        distance_of_household,
        person_schedules,
        diagonal_fallback: matches!(metric, Metric::Diagonal(_)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthpop::population::{Household, Person, Role};

    fn day(acts: &[(Purpose, u32, u32)]) -> Vec<Activity> {
        acts.iter().map(|&(purpose, start, duration)| Activity { purpose, start, duration }).collect()
    }

    fn week(d: Vec<Activity>) -> WeeklySchedule {
        WeeklySchedule { days: vec![d; 7] }
    }

    fn pop_with(demos: &[Vec<usize>]) -> Population {
        let mut pop = Population::default();
        for (h, d) in demos.iter().enumerate() {
            pop.persons.push(Person { id: h, household: h, member_index: 0, age_band: 1, role: Role::Adult });
            pop.households.push(Household { id: h, demographics: d.clone(), members: vec![h], home: None });
        }
        pop
    }

    fn axes() -> Vec<Axis> {
        vec![
            Axis::new("size", &["1", "2", "3"], AxisKind::Ordinal),
            Axis::new("age", &["y", "m", "o"], AxisKind::Ordinal),
        ]
    }

    fn template(id: usize, demo: Vec<usize>, purpose: Purpose) -> ScheduleTemplate {
        ScheduleTemplate { id, demographics: demo, members: vec![week(day(&[(purpose, 0, 60)]))] }
    }

    #[test]
    fn validation() {
        assert!(week(day(&[(Purpose::Home, 0, 60), (Purpose::Work, 60, 60)])).validate().is_ok());
        assert!(week(day(&[(Purpose::Home, 0, 61), (Purpose::Work, 60, 60)])).validate().is_err());
        assert!(week(day(&[(Purpose::Home, 1400, 60)])).validate().is_err());
        assert!(WeeklySchedule { days: vec![vec![]; 6] }.validate().is_err());
    }

    #[test]
    fn exact_match_has_zero_distance() {
        let ts = vec![
            template(0, vec![0, 0], Purpose::Home),
            template(1, vec![2, 1], Purpose::Work),
            template(2, vec![1, 2], Purpose::School),
        ];
        let a = assign_schedules(&pop_with(&[vec![2, 1]]), &ts, &axes()).unwrap();
        assert_eq!(a.template_of_household, vec![1]);
        assert_eq!(a.distance_of_household, vec![0.0]);
        assert!(a.person_schedules[0].uses(Purpose::Work));
    }

    #[test]
    fn single_template_for_everyone() {
        let ts = vec![template(0, vec![0, 0], Purpose::Home)];
        let a = assign_schedules(&pop_with(&[vec![2, 2], vec![1, 0]]), &ts, &axes()).unwrap();
        assert_eq!(a.template_of_household, vec![0, 0]);
        assert!(a.diagonal_fallback);
    }

    #[test]
    fn tie_goes_to_lower_index() {
        let ts = vec![template(0, vec![0, 1], Purpose::Home), template(1, vec![2, 1], Purpose::Work)];
        let a = assign_schedules(&pop_with(&[vec![1, 1]]), &ts, &axes()).unwrap();
        assert_eq!(a.template_of_household, vec![0]);
        assert_eq!(a.distance_of_household[0], {
            let b = assign_schedules(&pop_with(&[vec![1, 1]]), &[ts[1].clone(), ts[0].clone()], &axes()).unwrap();
            b.distance_of_household[0]
        });
    }

    #[test]
    fn full_covariance_matches_hand_computation() {
        // three templates spanning both ordinal axes give a non-singular covariance
        let ts = vec![
            template(0, vec![0, 0], Purpose::Home),
            template(1, vec![2, 0], Purpose::Work),
            template(2, vec![0, 2], Purpose::School),
        ];
        let a = assign_schedules(&pop_with(&[vec![1, 1]]), &ts, &axes()).unwrap();
        assert!(!a.diagonal_fallback);
        // mean (2/3, 2/3); cov = [[8/9, -4/9], [-4/9, 8/9]]; inverse = (9/48) [[8, 4], [4, 8]]
        let maha = |x: f64, y: f64| {
            let (dx, dy) = (1.0 - x, 1.0 - y);
            (9.0 / 48.0 * (8.0 * dx * dx + 8.0 * dx * dy + 8.0 * dy * dy)).sqrt()
        };
        let best = [maha(0.0, 0.0), maha(2.0, 0.0), maha(0.0, 2.0)];
        assert!((a.distance_of_household[0] - best[1]).abs() < 1e-12);
        assert_eq!(a.template_of_household, vec![1]);
    }

    #[test]
    fn empty_templates_rejected() {
        assert!(assign_schedules(&pop_with(&[vec![0, 0]]), &[], &axes()).is_err());
    }
}
