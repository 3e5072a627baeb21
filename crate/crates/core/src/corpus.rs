//! Bundled example: the aircraft description and an environment script for it.

use crate::dsl::parse_str;
use crate::model::DomainModel;

pub const AIRCRAFT_DOM: &str = include_str!("../corpus/aircraft.dom");
pub const AIRCRAFT_SCRIPT: &str = include_str!("../corpus/aircraft.script.json");

pub fn aircraft() -> DomainModel {
    parse_str(AIRCRAFT_DOM).expect("bundled corpus parses")
}
