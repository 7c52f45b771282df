//! Bundled first-name pools, one per gender.
//!
//! Ships as static lists so runs are hermetic: the same seed always picks the
//! same names, with no external dataset involved.

use crate::error::Error;

use super::persona::Gender;

const FEMALE: &str = include_str!("names/female.txt");
const MALE: &str = include_str!("names/male.txt");

/// A gendered pool of first names for persona sampling.
#[derive(Debug, Clone)]
pub struct NamePool {
    female: Vec<String>,
    male: Vec<String>,
}

impl NamePool {
    /// The built-in pool (500+ names per gender).
    pub fn bundled() -> Self {
        let parse = |s: &str| {
            s.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_owned)
                .collect::<Vec<_>>()
        };
        NamePool {
            female: parse(FEMALE),
            male: parse(MALE),
        }
    }

    /// A caller-supplied pool. Both lists must be non-empty.
    pub fn new(female: Vec<String>, male: Vec<String>) -> Result<Self, Error> {
        if female.is_empty() || male.is_empty() {
            return Err(Error::config(
                "name pool must contain at least one name per gender",
            ));
        }
        Ok(NamePool { female, male })
    }

    pub fn names(&self, gender: Gender) -> &[String] {
        match gender {
            Gender::Female => &self.female,
            Gender::Male => &self.male,
        }
    }
}
