//! Scholar attribute records and mentor edges.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Female,
    Male,
    Unknown,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Female => "female",
            Gender::Male => "male",
            Gender::Unknown => "unknown",
        }
    }
}

impl FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "female" | "f" => Ok(Gender::Female),
            "male" | "m" => Ok(Gender::Male),
            "" | "unknown" | "u" => Ok(Gender::Unknown),
            other => Err(format!("unrecognised gender `{other}`")),
        }
    }
}

/// How a person entered the candidate long list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Laureate,
    Clarivate,
    IdeasRepec,
    AdHoc,
}

impl Source {
    pub const ALL: [Source; 4] = [
        Source::Laureate,
        Source::Clarivate,
        Source::IdeasRepec,
        Source::AdHoc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Laureate => "laureate",
            Source::Clarivate => "clarivate",
            Source::IdeasRepec => "ideas_repec",
            Source::AdHoc => "ad_hoc",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace(['-', ' ', '/'], "_").as_str() {
            "laureate" | "nobel" => Ok(Source::Laureate),
            "clarivate" => Ok(Source::Clarivate),
            "ideas_repec" | "ideas" | "repec" => Ok(Source::IdeasRepec),
            "ad_hoc" | "adhoc" => Ok(Source::AdHoc),
            other => Err(format!("unrecognised candidate source `{other}`")),
        }
    }
}

/// One economist in the network.
///
/// `source == None` marks a network-only node (an ancestor or descendant that
/// links candidates together but never enters a shortlist). Only those nodes
/// may lack a birth year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scholar {
    pub id: String,
    pub name: String,
    pub birth_year: Option<i32>,
    pub death_year: Option<i32>,
    pub win_year: Option<i32>,
    pub gender: Gender,
    pub alma_mater: String,
    pub field: String,
    pub source: Option<Source>,
}

impl Scholar {
    /// Minimal candidate record; handy for tests and fixtures.
    pub fn candidate(id: &str, birth_year: i32, source: Source) -> Self {
        Scholar {
            id: id.to_string(),
            name: id.to_string(),
            birth_year: Some(birth_year),
            death_year: None,
            win_year: None,
            gender: Gender::Unknown,
            alma_mater: String::new(),
            field: String::new(),
            source: Some(source),
        }
    }

    /// Network-only node with no vital data.
    pub fn network_only(id: &str) -> Self {
        Scholar {
            id: id.to_string(),
            name: id.to_string(),
            birth_year: None,
            death_year: None,
            win_year: None,
            gender: Gender::Unknown,
            alma_mater: String::new(),
            field: String::new(),
            source: None,
        }
    }

    pub fn laureate(id: &str, birth_year: i32, win_year: i32) -> Self {
        Scholar {
            win_year: Some(win_year),
            ..Scholar::candidate(id, birth_year, Source::Laureate)
        }
    }

    pub fn with_death(mut self, year: i32) -> Self {
        self.death_year = Some(year);
        self
    }

    pub fn with_gender(mut self, gender: Gender) -> Self {
        self.gender = gender;
        self
    }

    pub fn with_keys(mut self, alma_mater: &str, field: &str) -> Self {
        self.alma_mater = alma_mater.to_string();
        self.field = field.to_string();
        self
    }

    pub fn is_candidate(&self) -> bool {
        self.source.is_some()
    }

    pub fn is_laureate(&self) -> bool {
        self.win_year.is_some()
    }

    /// Alive for at least part of `year`. Unknown death year means alive.
    pub fn alive_in(&self, year: i32) -> bool {
        self.death_year.is_none_or(|d| d >= year)
    }

    /// Checks the per-record invariants. Returns a human-readable reason on failure.
    pub fn validate(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if self.is_candidate() && self.birth_year.is_none() {
            return Err("missing birth_year for a shortlist candidate".into());
        }
        if let (Some(b), Some(d)) = (self.birth_year, self.death_year) {
            if b >= d {
                return Err(format!("birth_year {b} is not before death_year {d}"));
            }
        }
        if let Some(w) = self.win_year {
            if self.source != Some(Source::Laureate) {
                return Err("win_year present but source is not `laureate`".into());
            }
            if let Some(b) = self.birth_year {
                if b + 20 > w {
                    return Err(format!("win_year {w} is less than 20 years after birth {b}"));
                }
            }
            if let Some(d) = self.death_year {
                if w > d + 1 {
                    return Err(format!("win_year {w} is more than a year after death {d}"));
                }
            }
        } else if self.source == Some(Source::Laureate) {
            return Err("source `laureate` without a win_year".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MentorEdge {
    pub professor_id: String,
    pub student_id: String,
}

impl MentorEdge {
    pub fn new(professor_id: &str, student_id: &str) -> Self {
        MentorEdge {
            professor_id: professor_id.trim().to_string(),
            student_id: student_id.trim().to_string(),
        }
    }
}
