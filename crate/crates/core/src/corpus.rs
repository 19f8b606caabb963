//! Roster and publication data model, validation, and covariate derivation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use chrono::{Datelike, Months, NaiveDate};

use crate::error::{Error, Result};

/// Seniority (years in rank) below which a professor counts as recently promoted.
pub const RECENT_PROMOTION_YEARS: f64 = 8.0;

/// Minimum age at appointment to full professor accepted by validation.
pub const MIN_APPOINTMENT_AGE_YEARS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Gender {
    Male,
    Female,
}

impl Gender {
    /// Regression dummy: 1 for male, 0 for female.
    pub fn dummy(self) -> u8 {
        match self {
            Gender::Male => 1,
            Gender::Female => 0,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Gender::Male => "M",
            Gender::Female => "F",
        }
    }
}

impl FromStr for Gender {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "M" | "m" | "male" | "Male" => Ok(Gender::Male),
            "F" | "f" | "female" | "Female" => Ok(Gender::Female),
            other => Err(Error::Parse {
                what: "gender",
                input: other.to_string(),
            }),
        }
    }
}

/// Type of the professor's home university. Polytechnics and schools for
/// advanced studies are public subtypes with their own dummies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum UniversityType {
    Public,
    Private,
    Polytechnic,
    AdvancedSchool,
}

impl UniversityType {
    pub const ALL: [UniversityType; 4] = [
        UniversityType::Public,
        UniversityType::Private,
        UniversityType::Polytechnic,
        UniversityType::AdvancedSchool,
    ];

    /// `(u1, u2, u3)` = (private, advanced school, polytechnic).
    pub fn dummies(self) -> (u8, u8, u8) {
        match self {
            UniversityType::Public => (0, 0, 0),
            UniversityType::Private => (1, 0, 0),
            UniversityType::AdvancedSchool => (0, 1, 0),
            UniversityType::Polytechnic => (0, 0, 1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UniversityType::Public => "public",
            UniversityType::Private => "private",
            UniversityType::Polytechnic => "polytechnic",
            UniversityType::AdvancedSchool => "advanced_school",
        }
    }
}

impl fmt::Display for UniversityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UniversityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "public" => Ok(UniversityType::Public),
            "private" => Ok(UniversityType::Private),
            "polytechnic" => Ok(UniversityType::Polytechnic),
            "advanced_school" => Ok(UniversityType::AdvancedSchool),
            other => Err(Error::Parse {
                what: "university type",
                input: other.to_string(),
            }),
        }
    }
}

/// Closed calendar interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateSpan {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateSpan {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if end < start {
            return Err(Error::InvalidSpan { start, end });
        }
        Ok(Self { start, end })
    }

    /// Whole calendar years `first..=last`, e.g. 2006-01-01..2010-12-31.
    pub fn years(first: i32, last: i32) -> Result<Self> {
        let start = NaiveDate::from_ymd_opt(first, 1, 1).ok_or(Error::Parse {
            what: "year",
            input: format!("{first}"),
        })?;
        let end = NaiveDate::from_ymd_opt(last, 12, 31).ok_or(Error::Parse {
            what: "year",
            input: format!("{last}"),
        })?;
        Self::new(start, end)
    }

    pub fn intersect(&self, other: &DateSpan) -> Option<DateSpan> {
        let start = self.start.max(other.start);
        let end = self.end.min(other.end);
        (start <= end).then_some(DateSpan { start, end })
    }

    pub fn contains_year(&self, year: i32) -> bool {
        (self.start.year()..=self.end.year()).contains(&year)
    }

    /// Length in fractional years: each calendar year contributes the share
    /// of its days covered, so a span of whole calendar years is an integer.
    pub fn length_years(&self) -> f64 {
        let mut total = 0.0;
        for year in self.start.year()..=self.end.year() {
            let first = NaiveDate::from_ymd_opt(year, 1, 1).unwrap();
            let last = NaiveDate::from_ymd_opt(year, 12, 31).unwrap();
            let lo = self.start.max(first);
            let hi = self.end.min(last);
            let covered = (hi - lo).num_days() + 1;
            let in_year = (last - first).num_days() + 1;
            total += covered as f64 / in_year as f64;
        }
        total
    }
}

fn add_years(date: NaiveDate, years: u32) -> Option<NaiveDate> {
    date.checked_add_months(Months::new(years * 12))
}

/// Real-valued years from `from` to `to` (`to >= from`): completed
/// anniversaries plus the elapsed share of the current anniversary year.
pub fn years_between(from: NaiveDate, to: NaiveDate) -> f64 {
    debug_assert!(to >= from);
    let mut completed = (to.year() - from.year()).max(0) as u32;
    while completed > 0 && add_years(from, completed).is_none_or(|d| d > to) {
        completed -= 1;
    }
    let last = add_years(from, completed).unwrap_or(from);
    let next = add_years(from, completed + 1).unwrap_or(last);
    let span = (next - last).num_days();
    let frac = if span > 0 {
        (to - last).num_days() as f64 / span as f64
    } else {
        0.0
    };
    completed as f64 + frac
}

/// Completed whole years from `from` to `to`.
pub fn whole_years_between(from: NaiveDate, to: NaiveDate) -> u32 {
    crate::math::floor(years_between(from, to)) as u32
}

#[derive(Debug, Clone, PartialEq)]
pub struct Professor {
    pub id: String,
    pub gender: Gender,
    pub birth_date: NaiveDate,
    /// Promotion to full professor.
    pub appointment_date: NaiveDate,
    pub sds: String,
    pub uda: String,
    pub university_type: UniversityType,
    /// Active service; `None` means active over the whole observation window.
    pub active_span: Option<DateSpan>,
}

impl Professor {
    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Error::InvalidProfessor {
            id: self.id.clone(),
            reason,
        };
        if self.id.trim().is_empty() {
            return Err(invalid("empty id".into()));
        }
        if self.sds.trim().is_empty() || self.uda.trim().is_empty() {
            return Err(invalid("missing SDS or UDA".into()));
        }
        let earliest = add_years(self.birth_date, MIN_APPOINTMENT_AGE_YEARS)
            .ok_or_else(|| invalid("birth date out of range".into()))?;
        if self.appointment_date < earliest {
            return Err(invalid(format!(
                "appointed {} at age {}, below the minimum of {}",
                self.appointment_date,
                if self.appointment_date >= self.birth_date {
                    whole_years_between(self.birth_date, self.appointment_date)
                } else {
                    0
                },
                MIN_APPOINTMENT_AGE_YEARS
            )));
        }
        if let Some(span) = self.active_span {
            if span.end < span.start {
                return Err(invalid("empty active span".into()));
            }
        }
        Ok(())
    }

    pub fn age_at_appointment(&self) -> f64 {
        years_between(self.birth_date, self.appointment_date)
    }
}

/// Regression covariates measured at the census date.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Covariates {
    pub age: f64,
    pub seniority: f64,
    pub gender: u8,
    /// Private university.
    pub u1: u8,
    /// School for advanced studies.
    pub u2: u8,
    /// Polytechnic.
    pub u3: u8,
    /// Years of work inside the observation window.
    pub t: f64,
}

impl Covariates {
    pub fn whole_age(&self) -> u32 {
        crate::math::floor(self.age) as u32
    }

    pub fn whole_seniority(&self) -> u32 {
        crate::math::floor(self.seniority) as u32
    }

    pub fn recently_promoted(&self) -> bool {
        self.seniority < RECENT_PROMOTION_YEARS
    }
}

pub fn derive_covariates(
    professor: &Professor,
    census: NaiveDate,
    window: &DateSpan,
) -> Result<Covariates> {
    for (what, date) in [
        ("birth", professor.birth_date),
        ("appointment", professor.appointment_date),
    ] {
        if census < date {
            return Err(Error::CensusBeforeDate {
                id: professor.id.clone(),
                what,
                census,
                date,
            });
        }
    }
    let span = professor.active_span.unwrap_or(*window);
    let active = span
        .intersect(window)
        .ok_or_else(|| Error::InvalidProfessor {
            id: professor.id.clone(),
            reason: "active span does not intersect the observation window".into(),
        })?;
    let (u1, u2, u3) = professor.university_type.dummies();
    Ok(Covariates {
        age: years_between(professor.birth_date, census),
        seniority: years_between(professor.appointment_date, census),
        gender: professor.gender.dummy(),
        u1,
        u2,
        u3,
        t: active.length_years(),
    })
}

/// One byline entry: `author_id@university_id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Author {
    pub author_id: String,
    pub university_id: String,
}

impl Author {
    pub fn new(author_id: impl Into<String>, university_id: impl Into<String>) -> Self {
        Self {
            author_id: author_id.into(),
            university_id: university_id.into(),
        }
    }
}

impl fmt::Display for Author {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.author_id, self.university_id)
    }
}

impl FromStr for Author {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.rsplit_once('@') {
            Some((author, uni)) if !author.is_empty() && !uni.is_empty() => {
                Ok(Author::new(author, uni))
            }
            _ => Err(Error::Parse {
                what: "byline token",
                input: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Publication {
    pub id: String,
    pub year: i32,
    pub subject_category: String,
    /// Impact factor of the publishing journal, when known.
    pub journal_if: Option<f64>,
    /// Citations counted at the citation census date.
    pub citations: u64,
    pub byline: Vec<Author>,
    pub doc_type: String,
}

impl Publication {
    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidPublication {
            id: self.id.clone(),
            reason: reason.into(),
        };
        if self.id.trim().is_empty() {
            return Err(invalid("empty id"));
        }
        if self.byline.is_empty() {
            return Err(invalid("empty byline"));
        }
        if let Some(jif) = self.journal_if {
            if !jif.is_finite() || jif < 0.0 {
                return Err(invalid(
                    "journal impact factor must be a nonnegative number",
                ));
            }
        }
        Ok(())
    }

    /// Byline positions held by `author_id`.
    pub fn positions_of<'a>(&'a self, author_id: &'a str) -> impl Iterator<Item = usize> + 'a {
        self.byline
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.author_id == author_id)
            .map(|(i, _)| i)
    }
}

/// Document types dropped at ingestion by default: editorial material,
/// conference abstracts, replies.
pub fn default_excluded_doc_types() -> BTreeSet<String> {
    [
        "editorial material",
        "meeting abstract",
        "conference abstract",
        "reply",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

/// How byline authors missing from the roster are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AuthorResolution {
    /// Keep unknown authors; they never earn credit for roster professors.
    #[default]
    Lenient,
    /// Reject publications naming authors outside the roster.
    Strict,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub kept: usize,
    pub dropped_by_doc_type: usize,
    pub unknown_authors: usize,
}

/// Validated publication set, indexed by author.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    publications: Vec<Publication>,
    by_author: BTreeMap<String, Vec<usize>>,
}

impl Corpus {
    /// Filters excluded document types (case-insensitive), validates the
    /// remaining rows and checks bylines against `roster_ids` when given.
    pub fn assemble(
        rows: Vec<Publication>,
        excluded_doc_types: &BTreeSet<String>,
        roster_ids: Option<&BTreeSet<String>>,
        resolution: AuthorResolution,
    ) -> Result<(Corpus, IngestReport)> {
        let excluded: BTreeSet<String> = excluded_doc_types
            .iter()
            .map(|d| d.trim().to_lowercase())
            .collect();
        let mut report = IngestReport::default();
        let mut seen = BTreeSet::new();
        let mut kept = Vec::with_capacity(rows.len());
        for publication in rows {
            if excluded.contains(&publication.doc_type.trim().to_lowercase()) {
                report.dropped_by_doc_type += 1;
                continue;
            }
            publication.validate()?;
            if !seen.insert(publication.id.clone()) {
                return Err(Error::InvalidPublication {
                    id: publication.id.clone(),
                    reason: "duplicate id".into(),
                });
            }
            if let Some(ids) = roster_ids {
                for author in &publication.byline {
                    if !ids.contains(&author.author_id) {
                        if resolution == AuthorResolution::Strict {
                            return Err(Error::UnknownAuthor {
                                publication: publication.id.clone(),
                                author: author.author_id.clone(),
                            });
                        }
                        report.unknown_authors += 1;
                    }
                }
            }
            kept.push(publication);
        }
        report.kept = kept.len();
        Ok((Corpus::new(kept), report))
    }

    pub fn new(publications: Vec<Publication>) -> Self {
        let mut by_author: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, p) in publications.iter().enumerate() {
            for a in &p.byline {
                let list = by_author.entry(a.author_id.clone()).or_default();
                if list.last() != Some(&i) {
                    list.push(i);
                }
            }
        }
        Self {
            publications,
            by_author,
        }
    }

    pub fn publications(&self) -> &[Publication] {
        &self.publications
    }

    pub fn len(&self) -> usize {
        self.publications.len()
    }

    pub fn is_empty(&self) -> bool {
        self.publications.is_empty()
    }

    /// Publications listing `author_id`, in corpus order.
    pub fn by_author<'a>(&'a self, author_id: &str) -> impl Iterator<Item = &'a Publication> + 'a {
        self.by_author
            .get(author_id)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(move |&i| &self.publications[i])
    }

    pub fn into_publications(self) -> Vec<Publication> {
        self.publications
    }
}

/// Checks roster-level invariants: unique ids and a single UDA per SDS.
/// When `sds_map` is given, every SDS must appear in it with the same UDA.
pub fn validate_roster(
    roster: &[Professor],
    sds_map: Option<&BTreeMap<String, String>>,
) -> Result<()> {
    let mut ids = BTreeSet::new();
    let mut uda_of: BTreeMap<&str, &str> = BTreeMap::new();
    for p in roster {
        p.validate()?;
        if !ids.insert(p.id.as_str()) {
            return Err(Error::InvalidProfessor {
                id: p.id.clone(),
                reason: "duplicate id".into(),
            });
        }
        if let Some(map) = sds_map {
            match map.get(&p.sds) {
                None => {
                    return Err(Error::InvalidProfessor {
                        id: p.id.clone(),
                        reason: format!("unknown SDS {}", p.sds),
                    })
                }
                Some(uda) if *uda != p.uda => {
                    return Err(Error::InvalidProfessor {
                        id: p.id.clone(),
                        reason: format!("SDS {} belongs to UDA {}, not {}", p.sds, uda, p.uda),
                    })
                }
                _ => {}
            }
        }
        match uda_of.get(p.sds.as_str()) {
            Some(uda) if *uda != p.uda => {
                return Err(Error::InvalidProfessor {
                    id: p.id.clone(),
                    reason: format!("SDS {} mapped to both {} and {}", p.sds, uda, p.uda),
                })
            }
            _ => {
                uda_of.insert(&p.sds, &p.uda);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn professor(birth: NaiveDate, appoint: NaiveDate, kind: UniversityType) -> Professor {
        Professor {
            id: "P001".into(),
            gender: Gender::Male,
            birth_date: birth,
            appointment_date: appoint,
            sds: "MAT/05".into(),
            uda: "MAT".into(),
            university_type: kind,
            active_span: None,
        }
    }

    #[test]
    fn accepts_well_formed_professor() {
        let p = professor(d(1950, 3, 1), d(1990, 11, 1), UniversityType::Public);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn rejects_appointment_at_fifteen() {
        let p = professor(d(1950, 3, 1), d(1965, 6, 1), UniversityType::Public);
        let err = p.validate().unwrap_err();
        assert!(matches!(err, Error::InvalidProfessor { .. }));
        assert!(alloc::format!("{err}").contains("age 15"));
    }

    #[test]
    fn duplicate_roster_ids_rejected() {
        let p = professor(d(1950, 3, 1), d(1990, 11, 1), UniversityType::Public);
        let err = validate_roster(&[p.clone(), p], None).unwrap_err();
        assert!(alloc::format!("{err}").contains("duplicate"));
    }

    #[test]
    fn sds_must_map_to_one_uda() {
        let a = professor(d(1950, 3, 1), d(1990, 11, 1), UniversityType::Public);
        let mut b = a.clone();
        b.id = "P002".into();
        b.uda = "PHY".into();
        assert!(validate_roster(&[a.clone(), b], None).is_err());
        let mut map = BTreeMap::new();
        map.insert("FIS/01".to_string(), "PHY".to_string());
        assert!(validate_roster(&[a], Some(&map)).is_err());
    }

    #[test]
    fn census_age_and_seniority() {
        let census = d(2010, 12, 31);
        let window = DateSpan::years(2006, 2010).unwrap();
        let mut p = professor(d(1950, 6, 30), d(2003, 1, 1), UniversityType::Public);
        let c = derive_covariates(&p, census, &window).unwrap();
        assert_eq!(c.whole_age(), 60);
        assert_eq!(c.whole_seniority(), 7);
        assert!(c.recently_promoted());
        assert_eq!(c.t, 5.0);
        assert!((c.age - (60.0 + 184.0 / 365.0)).abs() < 1e-12);

        p.appointment_date = d(2002, 12, 31);
        let c = derive_covariates(&p, census, &window).unwrap();
        assert_eq!(c.seniority, 8.0);
        assert!(!c.recently_promoted());
    }

    #[test]
    fn census_before_appointment_is_an_error() {
        let window = DateSpan::years(2006, 2010).unwrap();
        let p = professor(d(1950, 6, 30), d(2011, 1, 1), UniversityType::Public);
        assert!(matches!(
            derive_covariates(&p, d(2010, 12, 31), &window),
            Err(Error::CensusBeforeDate {
                what: "appointment",
                ..
            })
        ));
    }

    #[test]
    fn partial_active_span_gives_fractional_t() {
        let window = DateSpan::years(2006, 2010).unwrap();
        let mut p = professor(d(1950, 6, 30), d(1990, 1, 1), UniversityType::Polytechnic);
        p.active_span = Some(DateSpan::new(d(2008, 7, 2), d(2012, 5, 1)).unwrap());
        let c = derive_covariates(&p, d(2010, 12, 31), &window).unwrap();
        // 2008 is a leap year: 2 July..31 Dec covers 183 of 366 days.
        assert!((c.t - 2.5).abs() < 1e-12);
        assert_eq!((c.u1, c.u2, c.u3), (0, 0, 1));

        p.active_span = Some(DateSpan::new(d(1995, 1, 1), d(2004, 1, 1)).unwrap());
        assert!(derive_covariates(&p, d(2010, 12, 31), &window).is_err());
    }

    #[test]
    fn university_dummies_are_exclusive() {
        for kind in UniversityType::ALL {
            let (a, b, c) = kind.dummies();
            assert!(a + b + c <= 1);
            assert_eq!(kind.as_str().parse::<UniversityType>().unwrap(), kind);
        }
        assert_eq!(UniversityType::Public.dummies(), (0, 0, 0));
    }

    #[test]
    fn leap_day_birthdays() {
        assert_eq!(years_between(d(1952, 2, 29), d(2010, 2, 28)), 58.0);
        assert!(years_between(d(1952, 2, 29), d(2010, 2, 27)) < 58.0);
    }

    #[test]
    fn doc_type_filter_counts_drops() {
        let mk = |id: &str, doc: &str| Publication {
            id: id.into(),
            year: 2008,
            subject_category: "C".into(),
            journal_if: Some(1.0),
            citations: 3,
            byline: vec![Author::new("P001", "U1")],
            doc_type: doc.into(),
        };
        let rows = vec![
            mk("1", "article"),
            mk("2", "Editorial Material"),
            mk("3", "article"),
            mk("4", "editorial material"),
            mk("5", "review"),
        ];
        let (corpus, report) = Corpus::assemble(
            rows,
            &default_excluded_doc_types(),
            None,
            AuthorResolution::Lenient,
        )
        .unwrap();
        assert_eq!(corpus.len(), 3);
        assert_eq!(report.dropped_by_doc_type, 2);
    }

    #[test]
    fn strict_resolution_rejects_unknown_authors() {
        let rows = vec![Publication {
            id: "1".into(),
            year: 2008,
            subject_category: "C".into(),
            journal_if: None,
            citations: 0,
            byline: vec![Author::new("P001", "U1"), Author::new("X9", "U2")],
            doc_type: "article".into(),
        }];
        let ids: BTreeSet<String> = ["P001".to_string()].into_iter().collect();
        let (_, report) = Corpus::assemble(
            rows.clone(),
            &BTreeSet::new(),
            Some(&ids),
            AuthorResolution::Lenient,
        )
        .unwrap();
        assert_eq!(report.unknown_authors, 1);
        assert!(matches!(
            Corpus::assemble(rows, &BTreeSet::new(), Some(&ids), AuthorResolution::Strict),
            Err(Error::UnknownAuthor { .. })
        ));
    }

    #[test]
    fn empty_byline_rejected() {
        let p = Publication {
            id: "1".into(),
            year: 2008,
            subject_category: "C".into(),
            journal_if: None,
            citations: 0,
            byline: vec![],
            doc_type: "article".into(),
        };
        assert!(p.validate().is_err());
    }
}
