//! Desk-scale synthetic population: IPF fitting, household sampling,
//! schedule matching, and home and activity location assignment.

pub mod config;
pub mod gravity;
pub mod ipf;
pub mod population;
pub mod schedule;

pub use config::{GeneratedPopulation, IpfSettings, PopulationConfig};
pub use gravity::{
    gravity_assign, gravity_choice, gravity_probabilities, read_visits, write_visits, Visit,
    VisitSchedule, CUTOFF_KM, MIN_DISTANCE_KM,
};
pub use ipf::{ipf_fit, Axis, AxisKind, IpfFit, MarginalSet, Tensor};
pub use population::{
    assign_home_locations, sample_households, Capacities, Household, HouseholdShape, Location,
    Person, Population, Purpose, Role,
};
pub use schedule::{assign_schedules, Activity, ScheduleAssignment, ScheduleTemplate, WeeklySchedule};
