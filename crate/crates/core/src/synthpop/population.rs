use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ipf::Tensor;
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Purpose {
    Home,
    Work,
    Shopping,
    Other,
    School,
}

impl Purpose {
    /// Order used by probability vectors: home, work, shopping, other, school.
    pub const ALL: [Purpose; 5] = [
        Purpose::Home,
        Purpose::Work,
        Purpose::Shopping,
        Purpose::Other,
        Purpose::School,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Purpose::Home => "HOME",
            Purpose::Work => "WORK",
            Purpose::Shopping => "SHOPPING",
            Purpose::Other => "OTHER",
            Purpose::School => "SCHOOL",
        }
    }

    pub fn is_anchor(self) -> bool {
        matches!(self, Purpose::Work | Purpose::School)
    }
}

impl fmt::Display for Purpose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Purpose {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Purpose::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown purpose {s:?}")))
    }
}

/// Capacity per purpose; zero means the location does not offer it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Capacities {
    #[serde(rename = "HOME", default)]
    pub home: f64,
    #[serde(rename = "WORK", default)]
    pub work: f64,
    #[serde(rename = "SHOPPING", default)]
    pub shopping: f64,
    #[serde(rename = "OTHER", default)]
    pub other: f64,
    #[serde(rename = "SCHOOL", default)]
    pub school: f64,
}

impl Capacities {
    pub fn get(&self, p: Purpose) -> f64 {
        match p {
            Purpose::Home => self.home,
            Purpose::Work => self.work,
            Purpose::Shopping => self.shopping,
            Purpose::Other => self.other,
            Purpose::School => self.school,
        }
    }

    pub fn set(&mut self, p: Purpose, v: f64) {
        match p {
            Purpose::Home => self.home = v,
            Purpose::Work => self.work = v,
            Purpose::Shopping => self.shopping = v,
            Purpose::Other => self.other = v,
            Purpose::School => self.school = v,
        }
    }
}

/// Place with planar coordinates in km.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Location {
    #[serde(default)]
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub capacities: Capacities,
}

impl Location {
    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        (self.x - x).hypot(self.y - y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Adult,
    Child,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Person {
    pub id: usize,
    pub household: usize,
    /// Position within the household's member list.
    pub member_index: usize,
    /// 0 for children; otherwise 1 + the householder age category.
    pub age_band: usize,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Household {
    pub id: usize,
    /// Category index along each demographic axis.
    pub demographics: Vec<usize>,
    pub members: Vec<usize>,
    pub home: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub households: Vec<Household>,
    pub persons: Vec<Person>,
    pub locations: Vec<Location>,
}

impl Population {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        let mut seen = vec![false; self.persons.len()];
        for h in &self.households {
            if h.members.is_empty() {
                return bad(format!("household {} is empty", h.id));
            }
            for &p in &h.members {
                if p >= self.persons.len() || self.persons[p].household != h.id {
                    return bad(format!("household {} lists foreign person {p}", h.id));
                }
                if std::mem::replace(&mut seen[p], true) {
                    return bad(format!("person {p} in two households"));
                }
            }
            if let Some(l) = h.home {
                if l >= self.locations.len() || self.locations[l].capacities.home <= 0.0 {
                    return bad(format!("household {} has invalid home {l}", h.id));
                }
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return bad(format!("person {p} has no household"));
        }
        Ok(())
    }
}

/// Which axes carry household size and householder age.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HouseholdShape {
    /// Axis whose category labels start with the member count ("1", "4+").
    pub size_axis: Option<usize>,
    pub age_axis: Option<usize>,
    /// Members beyond this many are children.
    pub max_adults: usize,
}

fn size_of_label(label: &str) -> Result<usize> {
    let digits: String = label.chars().take_while(char::is_ascii_digit).collect();
    match digits.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(Error::InvalidInput(format!("household size category {label:?} is not a size"))),
    }
}

/// Draws households with probability proportional to cell mass and
/// instantiates their members. Each draw uses a uniform keyed by the
/// household id.
pub fn sample_households<T: Scalar>(
    fitted: &Tensor<T>,
    size_labels: Option<&[String]>,
    shape: &HouseholdShape,
    n_households: usize,
    seed: u64,
) -> Result<Population> {
    if fitted.data.iter().any(|v| !(*v >= T::zero())) {
        return Err(Error::InvalidInput("fitted table has negative or NaN cells".into()));
    }
    let mut cumulative = Vec::with_capacity(fitted.data.len());
    let mut acc = 0.0f64;
    for v in &fitted.data {
        acc += v.to_f64_lossy();
        cumulative.push(acc);
    }
    if n_households > 0 && acc <= 0.0 {
        return Err(Error::InvalidInput("fitted table has no mass".into()));
    }
    let sizes: Vec<usize> = match (shape.size_axis, size_labels) {
        (Some(_), Some(labels)) => labels.iter().map(|l| size_of_label(l)).collect::<Result<_>>()?,
        (Some(_), None) => return Err(Error::InvalidInput("size axis given without labels".into())),
        (None, _) => Vec::new(),
    };
    let mut pop = Population::default();
    for h in 0..n_households {
        let u = rng::keyed_uniform(seed, h as u64) * acc;
        // first cell whose cumulative mass exceeds u, skipping empty cells
        let mut cell = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
        while fitted.data[cell] <= T::zero() && cell > 0 {
            cell -= 1;
        }
        let demographics = fitted.coordinates(cell);
        let size = shape.size_axis.map_or(1, |a| sizes[demographics[a]]);
        let age = shape.age_axis.map_or(0, |a| demographics[a]);
        let mut members = Vec::with_capacity(size);
        for i in 0..size {
            let id = pop.persons.len();
            let adult = i < shape.max_adults.max(1);
            pop.persons.push(Person {
                id,
                household: h,
                member_index: i,
                age_band: if adult { 1 + age } else { 0 },
                role: if adult { Role::Adult } else { Role::Child },
            });
            members.push(id);
        }
        pop.households.push(Household {
            id: h,
            demographics,
            members,
            home: None,
        });
    }
    Ok(pop)
}

/// Places households round-robin over HOME locations in id order, never
/// exceeding a location's capacity.
pub fn assign_home_locations(mut pop: Population) -> Result<Population> {
    let homes: Vec<usize> = pop
        .locations
        .iter()
        .enumerate()
        .filter(|(_, l)| l.capacities.home >= 1.0)
        .map(|(i, _)| i)
        .collect();
    let mut remaining: Vec<usize> = homes
        .iter()
        .map(|&i| pop.locations[i].capacities.home.floor() as usize)
        .collect();
    let total: usize = remaining.iter().sum();
    if total < pop.households.len() {
        return Err(Error::InsufficientCapacity {
            shortfall: pop.households.len() - total,
        });
    }
    let mut cursor = 0;
    for h in pop.households.iter_mut() {
        while remaining[cursor] == 0 {
            cursor = (cursor + 1) % homes.len();
        }
        remaining[cursor] -= 1;
        h.home = Some(homes[cursor]);
        cursor = (cursor + 1) % homes.len();
    }
    Ok(pop)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn home(cap: f64) -> Location {
        Location {
            id: 0,
            x: 0.0,
            y: 0.0,
            capacities: Capacities { home: cap, ..Default::default() },
        }
    }

    fn households(n: usize) -> Population {
        let t = Tensor::new(vec![1], vec![1.0f64]).unwrap();
        sample_households(&t, None, &HouseholdShape::default(), n, 1).unwrap()
    }

    #[test]
    fn point_mass_and_empty() {
        let t = Tensor::new(vec![3], vec![0.0, 5.0, 0.0f64]).unwrap();
        let pop = sample_households(&t, None, &HouseholdShape::default(), 50, 9).unwrap();
        assert!(pop.households.iter().all(|h| h.demographics == vec![1]));
        let none = sample_households(&t, None, &HouseholdShape::default(), 0, 9).unwrap();
        assert!(none.households.is_empty() && none.persons.is_empty());
    }

    #[test]
    fn uniform_split_is_binomial() {
        let t = Tensor::new(vec![2], vec![1.0, 1.0f64]).unwrap();
        let pop = sample_households(&t, None, &HouseholdShape::default(), 10_000, 4).unwrap();
        let ones = pop.households.iter().filter(|h| h.demographics[0] == 1).count() as f64;
        // sd = sqrt(10000 * 0.25) = 50; 2% = 200 = 4 sd
        assert!((ones - 5000.0).abs() < 200.0, "{ones}");
    }

    #[test]
    fn members_follow_size_axis() {
        let t = Tensor::new(vec![3, 2], vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0f64]).unwrap();
        let labels: Vec<String> = ["1", "2", "4+"].iter().map(|s| s.to_string()).collect();
        let shape = HouseholdShape { size_axis: Some(0), age_axis: Some(1), max_adults: 2 };
        let pop = sample_households(&t, Some(&labels), &shape, 3, 1).unwrap();
        assert_eq!(pop.persons.len(), 12);
        assert_eq!(pop.persons[0].role, Role::Adult);
        assert_eq!(pop.persons[0].age_band, 1);
        assert_eq!(pop.persons[2].role, Role::Child);
        pop.validate().unwrap();
    }

    #[test]
    fn zero_table_rejected() {
        let t = Tensor::new(vec![2], vec![0.0f64, 0.0]).unwrap();
        assert!(sample_households(&t, None, &HouseholdShape::default(), 1, 1).is_err());
    }

    #[test]
    fn home_assignment_examples() {
        let mut pop = households(3);
        pop.locations = vec![home(3.0)];
        let pop = assign_home_locations(pop).unwrap();
        assert!(pop.households.iter().all(|h| h.home == Some(0)));

        let mut pop = households(2);
        pop.locations = vec![home(1.0)];
        assert!(matches!(
            assign_home_locations(pop),
            Err(Error::InsufficientCapacity { shortfall: 1 })
        ));

        let mut pop = households(4);
        pop.locations = vec![home(2.0), home(2.0)];
        let pop = assign_home_locations(pop).unwrap();
        let at0 = pop.households.iter().filter(|h| h.home == Some(0)).count();
        assert_eq!(at0, 2);
        pop.validate().unwrap();
    }

    #[test]
    fn purpose_round_trip() {
        for p in Purpose::ALL {
            assert_eq!(p.as_str().parse::<Purpose>().unwrap(), p);
        }
        assert_eq!(Purpose::School.index(), 4);
    }
}
