//! Field-normalized performance indicators.
//!
//! Citations and journal impact factors are divided by the mean of their
//! (year, subject category) cell. FSS weights each normalized citation count
//! by the professor's fractional credit and divides by years of work; P is
//! the publication rate; IA and IJ are per-article means of the normalized
//! citation and impact-factor ratios.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::corpus::{Corpus, DateSpan, Professor, Publication};
use crate::credit::{author_credit, Convention};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum Indicator {
    Fss,
    P,
    Ia,
    Ij,
}

impl Indicator {
    pub const ALL: [Indicator; 4] = [Indicator::Fss, Indicator::P, Indicator::Ia, Indicator::Ij];

    pub fn name(self) -> &'static str {
        match self {
            Indicator::Fss => "FSS",
            Indicator::P => "P",
            Indicator::Ia => "IA",
            Indicator::Ij => "IJ",
        }
    }

    pub fn value(self, scores: &IndicatorScores) -> Option<f64> {
        match self {
            Indicator::Fss => Some(scores.fss),
            Indicator::P => Some(scores.p),
            Indicator::Ia => scores.ia,
            Indicator::Ij => scores.ij,
        }
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Indicator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FSS" => Ok(Indicator::Fss),
            "P" => Ok(Indicator::P),
            "IA" => Ok(Indicator::Ia),
            "IJ" => Ok(Indicator::Ij),
            _ => Err(Error::Parse {
                what: "indicator",
                input: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScalingCell {
    pub publications: usize,
    pub cited: usize,
    /// Mean citations over cited publications; `None` if none is cited.
    pub mean_citations: Option<f64>,
    /// Mean journal impact factor over publications with a known IF.
    pub mean_impact_factor: Option<f64>,
}

/// Scaling factors per (year, subject category).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScalingTable {
    cells: BTreeMap<(i32, String), ScalingCell>,
}

impl ScalingTable {
    pub fn build(publications: &[Publication]) -> Self {
        #[derive(Default)]
        struct Acc {
            n: usize,
            cited: usize,
            citation_sum: f64,
            if_n: usize,
            if_sum: f64,
        }
        let mut acc: BTreeMap<(i32, String), Acc> = BTreeMap::new();
        for p in publications {
            let a = acc.entry((p.year, p.subject_category.clone())).or_default();
            a.n += 1;
            if p.citations > 0 {
                a.cited += 1;
                a.citation_sum += p.citations as f64;
            }
            if let Some(jif) = p.journal_if {
                a.if_n += 1;
                a.if_sum += jif;
            }
        }
        let cells = acc
            .into_iter()
            .map(|(key, a)| {
                let cell = ScalingCell {
                    publications: a.n,
                    cited: a.cited,
                    mean_citations: (a.cited > 0).then(|| a.citation_sum / a.cited as f64),
                    mean_impact_factor: (a.if_n > 0 && a.if_sum > 0.0)
                        .then(|| a.if_sum / a.if_n as f64),
                };
                (key, cell)
            })
            .collect();
        Self { cells }
    }

    pub fn cell(&self, year: i32, category: &str) -> Option<&ScalingCell> {
        self.cells.get(&(year, category.to_string()))
    }

    pub fn citation_scale(&self, year: i32, category: &str) -> Option<f64> {
        self.cell(year, category).and_then(|c| c.mean_citations)
    }

    pub fn impact_scale(&self, year: i32, category: &str) -> Option<f64> {
        self.cell(year, category).and_then(|c| c.mean_impact_factor)
    }

    pub fn cells(&self) -> impl Iterator<Item = (i32, &str, &ScalingCell)> {
        self.cells
            .iter()
            .map(|((y, c), cell)| (*y, c.as_str(), cell))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// What to do when a publication's scaling factor is unavailable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingCellPolicy {
    /// Skip the publication's term and record a warning.
    #[default]
    Lenient,
    Strict,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    MissingCitationScale {
        publication: String,
        year: i32,
        category: String,
    },
    MissingImpactScale {
        publication: String,
        year: i32,
        category: String,
    },
    MissingImpactFactor {
        publication: String,
    },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::MissingCitationScale {
                publication,
                year,
                category,
            } => write!(
                f,
                "publication {publication}: no cited publications in ({year}, {category}); term skipped"
            ),
            Warning::MissingImpactScale {
                publication,
                year,
                category,
            } => write!(
                f,
                "publication {publication}: no impact factors in ({year}, {category}); skipped for IJ"
            ),
            Warning::MissingImpactFactor { publication } => {
                write!(f, "publication {publication}: impact factor unknown; skipped for IJ")
            }
        }
    }
}

/// A publication together with the credit a given professor earns on it.
#[derive(Debug, Clone, Copy)]
pub struct Credited<'a> {
    pub publication: &'a Publication,
    pub credit: f64,
}

/// The professor's publications dated inside the window, with credit.
pub fn credited_publications<'a>(
    corpus: &'a Corpus,
    professor_id: &str,
    window: &DateSpan,
    convention: Convention,
) -> Vec<Credited<'a>> {
    corpus
        .by_author(professor_id)
        .filter(|p| window.contains_year(p.year))
        .map(|p| Credited {
            publication: p,
            credit: author_credit(&p.byline, professor_id, convention),
        })
        .collect()
}

/// Normalized citation ratio `c_i / c̄`, or `None` when the term is skipped.
fn citation_ratio(
    p: &Publication,
    scaling: &ScalingTable,
    policy: MissingCellPolicy,
    warnings: &mut Vec<Warning>,
) -> Result<Option<f64>> {
    match scaling.citation_scale(p.year, &p.subject_category) {
        Some(mean) => Ok(Some(p.citations as f64 / mean)),
        None => match policy {
            MissingCellPolicy::Strict => Err(Error::MissingScalingCell {
                publication: p.id.clone(),
                what: "citation",
                year: p.year,
                category: p.subject_category.clone(),
            }),
            MissingCellPolicy::Lenient => {
                warnings.push(Warning::MissingCitationScale {
                    publication: p.id.clone(),
                    year: p.year,
                    category: p.subject_category.clone(),
                });
                Ok(None)
            }
        },
    }
}

fn check_years(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveYears(t));
    }
    Ok(())
}

/// Fractional Scientific Strength: `(1/t) Σ (c_i / c̄_i) f_i`.
pub fn compute_fss(
    items: &[Credited<'_>],
    t: f64,
    scaling: &ScalingTable,
    policy: MissingCellPolicy,
    warnings: &mut Vec<Warning>,
) -> Result<f64> {
    check_years(t)?;
    let mut sum = 0.0;
    for item in items {
        if let Some(ratio) = citation_ratio(item.publication, scaling, policy, warnings)? {
            sum += ratio * item.credit;
        }
    }
    Ok(sum / t)
}

/// Publications per year of work.
pub fn compute_p(n_publications: usize, t: f64) -> Result<f64> {
    check_years(t)?;
    Ok(n_publications as f64 / t)
}

/// Mean normalized citations per publication; `None` with no publications.
/// Skipped publications still count in the denominator.
pub fn compute_ia(
    items: &[Credited<'_>],
    scaling: &ScalingTable,
    policy: MissingCellPolicy,
    warnings: &mut Vec<Warning>,
) -> Result<Option<f64>> {
    if items.is_empty() {
        return Ok(None);
    }
    let mut sum = 0.0;
    for item in items {
        if let Some(ratio) = citation_ratio(item.publication, scaling, policy, warnings)? {
            sum += ratio;
        }
    }
    Ok(Some(sum / items.len() as f64))
}

/// Mean normalized journal impact factor. Publications without a usable
/// impact factor are left out of the mean (lenient) or abort (strict).
pub fn compute_ij(
    items: &[Credited<'_>],
    scaling: &ScalingTable,
    policy: MissingCellPolicy,
    warnings: &mut Vec<Warning>,
) -> Result<Option<f64>> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for item in items {
        let p = item.publication;
        let Some(jif) = p.journal_if else {
            if policy == MissingCellPolicy::Strict {
                return Err(Error::MissingImpactFactor(p.id.clone()));
            }
            warnings.push(Warning::MissingImpactFactor {
                publication: p.id.clone(),
            });
            continue;
        };
        let Some(mean) = scaling.impact_scale(p.year, &p.subject_category) else {
            if policy == MissingCellPolicy::Strict {
                return Err(Error::MissingScalingCell {
                    publication: p.id.clone(),
                    what: "impact factor",
                    year: p.year,
                    category: p.subject_category.clone(),
                });
            }
            warnings.push(Warning::MissingImpactScale {
                publication: p.id.clone(),
                year: p.year,
                category: p.subject_category.clone(),
            });
            continue;
        };
        sum += jif / mean;
        n += 1;
    }
    Ok((n > 0).then(|| sum / n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IndicatorScores {
    pub fss: f64,
    pub p: f64,
    pub ia: Option<f64>,
    pub ij: Option<f64>,
    pub n_pubs: usize,
}

impl IndicatorScores {
    pub fn inactive(&self) -> bool {
        self.n_pubs == 0
    }
}

/// Everything needed to score professors against one corpus.
#[derive(Debug, Clone, Copy)]
pub struct ScoringContext<'a> {
    pub corpus: &'a Corpus,
    pub scaling: &'a ScalingTable,
    pub window: DateSpan,
    pub policy: MissingCellPolicy,
}

impl ScoringContext<'_> {
    /// All four indicators for one professor with `t` years of work.
    pub fn score(
        &self,
        professor: &Professor,
        convention: Convention,
        t: f64,
        warnings: &mut Vec<Warning>,
    ) -> Result<IndicatorScores> {
        let items = credited_publications(self.corpus, &professor.id, &self.window, convention);
        Ok(IndicatorScores {
            fss: compute_fss(&items, t, self.scaling, self.policy, warnings)?,
            p: compute_p(items.len(), t)?,
            ia: compute_ia(&items, self.scaling, self.policy, warnings)?,
            ij: compute_ij(&items, self.scaling, self.policy, warnings)?,
            n_pubs: items.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Author;
    use alloc::vec;

    fn publication(
        id: &str,
        year: i32,
        cat: &str,
        citations: u64,
        jif: Option<f64>,
    ) -> Publication {
        Publication {
            id: id.into(),
            year,
            subject_category: cat.into(),
            journal_if: jif,
            citations,
            byline: vec![Author::new("P1", "U1")],
            doc_type: "article".into(),
        }
    }

    #[test]
    fn uncited_publications_excluded_from_scale() {
        let pubs = vec![
            publication("a", 2008, "C", 2, Some(1.0)),
            publication("b", 2008, "C", 4, Some(2.0)),
            publication("c", 2008, "C", 6, None),
            publication("d", 2008, "C", 0, Some(3.0)),
            publication("e", 2009, "C", 0, None),
        ];
        let t = ScalingTable::build(&pubs);
        assert_eq!(t.citation_scale(2008, "C"), Some(4.0));
        assert_eq!(t.impact_scale(2008, "C"), Some(2.0));
        assert_eq!(t.citation_scale(2009, "C"), None);
        assert_eq!(t.impact_scale(2009, "C"), None);
        assert_eq!(t.cell(2009, "C").unwrap().publications, 1);
    }

    fn table_with(year: i32, cat: &str, scale: f64, if_scale: f64) -> ScalingTable {
        let mut t = ScalingTable::default();
        t.cells.insert(
            (year, cat.into()),
            ScalingCell {
                publications: 1,
                cited: 1,
                mean_citations: Some(scale),
                mean_impact_factor: Some(if_scale),
            },
        );
        t
    }

    #[test]
    fn fss_single_publication() {
        let p = publication("a", 2008, "C", 10, Some(1.0));
        let t = table_with(2008, "C", 5.0, 1.0);
        let items = [Credited {
            publication: &p,
            credit: 0.5,
        }];
        let fss = compute_fss(&items, 5.0, &t, MissingCellPolicy::Strict, &mut vec![]).unwrap();
        assert!((fss - 0.2).abs() < 1e-15);
    }

    #[test]
    fn inactive_professor_scores_zero() {
        let t = ScalingTable::default();
        assert_eq!(
            compute_fss(&[], 5.0, &t, MissingCellPolicy::Strict, &mut vec![]).unwrap(),
            0.0
        );
        assert_eq!(compute_p(0, 5.0).unwrap(), 0.0);
        assert_eq!(
            compute_ia(&[], &t, MissingCellPolicy::Strict, &mut vec![]).unwrap(),
            None
        );
        assert_eq!(
            compute_ij(&[], &t, MissingCellPolicy::Strict, &mut vec![]).unwrap(),
            None
        );
    }

    #[test]
    fn publication_rate() {
        assert_eq!(compute_p(10, 5.0).unwrap(), 2.0);
        assert_eq!(compute_p(5, 2.5).unwrap(), 2.0);
        assert!(matches!(compute_p(1, 0.0), Err(Error::NonPositiveYears(_))));
    }

    #[test]
    fn ia_and_ij_means() {
        let a = publication("a", 2008, "C", 2, Some(2.0));
        let b = publication("b", 2008, "C", 6, Some(4.0));
        let t = table_with(2008, "C", 4.0, 2.0);
        let items = [
            Credited {
                publication: &a,
                credit: 1.0,
            },
            Credited {
                publication: &b,
                credit: 1.0,
            },
        ];
        let ia = compute_ia(&items, &t, MissingCellPolicy::Strict, &mut vec![]).unwrap();
        assert_eq!(ia, Some(1.0));
        let ij = compute_ij(&items, &t, MissingCellPolicy::Strict, &mut vec![]).unwrap();
        assert_eq!(ij, Some(1.5));

        let t = table_with(2008, "C", 2.0, 2.0);
        let ia = compute_ia(&items[..1], &t, MissingCellPolicy::Strict, &mut vec![]).unwrap();
        assert_eq!(ia, Some(1.0));
        let ij = compute_ij(&items[..1], &t, MissingCellPolicy::Strict, &mut vec![]).unwrap();
        assert_eq!(ij, Some(1.0));
    }

    #[test]
    fn missing_cells_lenient_vs_strict() {
        let a = publication("a", 2008, "C", 3, None);
        let t = ScalingTable::default();
        let items = [Credited {
            publication: &a,
            credit: 1.0,
        }];
        let mut warnings = vec![];
        let fss = compute_fss(&items, 1.0, &t, MissingCellPolicy::Lenient, &mut warnings).unwrap();
        assert_eq!(fss, 0.0);
        assert_eq!(warnings.len(), 1);
        assert!(compute_fss(&items, 1.0, &t, MissingCellPolicy::Strict, &mut vec![]).is_err());
        assert!(compute_ij(&items, &t, MissingCellPolicy::Strict, &mut vec![]).is_err());
        assert_eq!(
            compute_ij(&items, &t, MissingCellPolicy::Lenient, &mut vec![]).unwrap(),
            None
        );
    }

    #[test]
    fn indicator_names_parse() {
        for i in Indicator::ALL {
            assert_eq!(i.name().parse::<Indicator>().unwrap(), i);
        }
        assert_eq!("fss".parse::<Indicator>().unwrap(), Indicator::Fss);
        assert!("h".parse::<Indicator>().is_err());
    }
}
