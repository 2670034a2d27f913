use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::StatsError;

/// A column of an observation table.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Factor(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Factor(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Named columns of equal length.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    columns: BTreeMap<String, Column>,
    rows: Option<usize>,
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, column: Column) -> Result<(), StatsError> {
        let name = name.into();
        match self.rows {
            Some(n) if n != column.len() => {
                return Err(StatsError::LengthMismatch {
                    column: name,
                    expected: n,
                    found: column.len(),
                })
            }
            _ => self.rows = Some(column.len()),
        }
        self.columns.insert(name, column);
        Ok(())
    }

    pub fn with_numeric(mut self, name: &str, values: Vec<f64>) -> Result<Self, StatsError> {
        self.insert(name, Column::Numeric(values))?;
        Ok(self)
    }

    pub fn with_factor<S: Into<String>>(
        mut self,
        name: &str,
        values: impl IntoIterator<Item = S>,
    ) -> Result<Self, StatsError> {
        self.insert(name, Column::Factor(values.into_iter().map(Into::into).collect()))?;
        Ok(self)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.get(name)
    }

    pub fn rows(&self) -> usize {
        self.rows.unwrap_or(0)
    }
}

/// `response ~ term + term + … [+ (1|group)]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formula {
    pub response: String,
    pub terms: Vec<String>,
    pub group: Option<String>,
}

impl Formula {
    pub fn new(response: &str, terms: &[&str], group: Option<&str>) -> Self {
        Self {
            response: response.to_string(),
            terms: terms.iter().map(|s| s.to_string()).collect(),
            group: group.map(str::to_string),
        }
    }

    /// Parses R-style text such as `F1V1 ~ V1 + V2 + (1|word)`.
    pub fn parse(text: &str) -> Result<Self, StatsError> {
        let bad = |m: &str| StatsError::Formula(format!("{m}: '{text}'"));
        let (lhs, rhs) = text.split_once('~').ok_or_else(|| bad("missing '~'"))?;
        let response = lhs.trim();
        if response.is_empty() {
            return Err(bad("missing response"));
        }
        let mut terms = Vec::new();
        let mut group = None;
        for part in rhs.split('+').map(str::trim) {
            if part == "1" {
                continue;
            }
            if let Some(inner) = part.strip_prefix('(').and_then(|p| p.strip_suffix(')')) {
                let (one, g) = inner.split_once('|').ok_or_else(|| bad("expected (1|group)"))?;
                if one.trim() != "1" || g.trim().is_empty() || group.is_some() {
                    return Err(bad("only a single random intercept (1|group) is supported"));
                }
                group = Some(g.trim().to_string());
            } else if part.is_empty() || part.contains(|c: char| "()|~*:".contains(c)) {
                return Err(bad("malformed term"));
            } else {
                terms.push(part.to_string());
            }
        }
        Ok(Self {
            response: response.to_string(),
            terms,
            group,
        })
    }

    /// The same formula without `term`.
    pub fn without(&self, term: &str) -> Self {
        Self {
            terms: self.terms.iter().filter(|t| *t != term).cloned().collect(),
            ..self.clone()
        }
    }
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ~ ", self.response)?;
        let mut parts: Vec<String> = self.terms.clone();
        if parts.is_empty() {
            parts.push("1".into());
        }
        if let Some(g) = &self.group {
            parts.push(format!("(1|{g})"));
        }
        f.write_str(&parts.join(" + "))
    }
}

/// Coding of one categorical predictor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorInfo {
    pub name: String,
    pub reference: String,
    /// All observed levels in ASCII order, reference included.
    pub levels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub response_name: String,
    pub y: DVector<f64>,
    pub x: DMatrix<f64>,
    pub column_names: Vec<String>,
    pub factors: Vec<FactorInfo>,
    /// Group index per row, when the formula has a random intercept.
    pub groups: Option<Vec<usize>>,
    pub group_labels: Vec<String>,
}

impl DesignMatrix {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Fingerprint of the response values, used to check that two fits
    /// saw the same data.
    pub fn response_fingerprint(&self) -> u64 {
        self.y.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, v| {
            (h ^ v.to_bits()).wrapping_mul(0x0000_0100_0000_01b3)
        })
    }

    /// Copy with every response value multiplied by `c`.
    pub fn scaled_response(&self, c: f64) -> Self {
        Self {
            y: &self.y * c,
            ..self.clone()
        }
    }
}

/// Relative tolerance below which a column is treated as a combination of
/// the columns before it.
const RANK_TOLERANCE: f64 = 1e-9;

/// Finds the first column lying in the span of the earlier ones.
fn first_aliased_column(x: &DMatrix<f64>) -> Option<usize> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for j in 0..x.ncols() {
        let col = x.column(j).into_owned();
        let norm = col.norm();
        if norm == 0.0 {
            return Some(j);
        }
        let mut r = col.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &basis {
                let d = q.dot(&r);
                r.axpy(-d, q, 1.0);
            }
        }
        let rn = r.norm();
        if rn <= RANK_TOLERANCE * norm {
            return Some(j);
        }
        basis.push(r / rn);
    }
    None
}

/// Builds a treatment-coded design matrix.
///
/// The intercept comes first; a factor with L levels adds L − 1 indicator
/// columns named `Factor[T.level]`, with the ASCII-first level as the
/// reference unless `reference_levels` names another. Numeric terms pass
/// through under their own name.
pub fn build_design(
    table: &Table,
    formula: &Formula,
    reference_levels: &BTreeMap<String, String>,
) -> Result<DesignMatrix, StatsError> {
    let n = table.rows();
    let y = match table.column(&formula.response) {
        Some(Column::Numeric(v)) => v.clone(),
        Some(Column::Factor(_)) => {
            return Err(StatsError::Formula(format!(
                "response '{}' must be numeric",
                formula.response
            )))
        }
        None => return Err(StatsError::MissingColumn(formula.response.clone())),
    };
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite {
            column: formula.response.clone(),
            row: i,
        });
    }

    let mut names = vec!["Intercept".to_string()];
    let mut columns: Vec<Vec<f64>> = vec![vec![1.0; n]];
    let mut factors = Vec::new();
    for term in &formula.terms {
        match table.column(term) {
            Some(Column::Numeric(v)) => {
                if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                    return Err(StatsError::NonFinite {
                        column: term.clone(),
                        row: i,
                    });
                }
                names.push(term.clone());
                columns.push(v.clone());
            }
            Some(Column::Factor(v)) => {
                let levels: Vec<String> = v.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
                let reference = match reference_levels.get(term) {
                    Some(r) if levels.contains(r) => r.clone(),
                    Some(r) => {
                        return Err(StatsError::UnseenReference {
                            factor: term.clone(),
                            level: r.clone(),
                        })
                    }
                    None => match levels.first() {
                        Some(first) => first.clone(),
                        None => return Err(StatsError::InsufficientData("no rows".into())),
                    },
                };
                for level in levels.iter().filter(|l| **l != reference) {
                    names.push(format!("{term}[T.{level}]"));
                    columns.push(v.iter().map(|x| f64::from(u8::from(x == level))).collect());
                }
                factors.push(FactorInfo {
                    name: term.clone(),
                    reference,
                    levels,
                });
            }
            None => return Err(StatsError::MissingColumn(term.clone())),
        }
    }

    let x = DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]);
    if let Some(j) = first_aliased_column(&x) {
        return Err(StatsError::RankDeficient {
            column: names[j].clone(),
        });
    }

    let (groups, group_labels) = match &formula.group {
        None => (None, Vec::new()),
        Some(g) => {
            let labels: Vec<String> = match table.column(g) {
                Some(Column::Factor(v)) => v.clone(),
                Some(Column::Numeric(v)) => v.iter().map(|x| x.to_string()).collect(),
                None => return Err(StatsError::MissingColumn(g.clone())),
            };
            let distinct: Vec<String> = labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
            let index: BTreeMap<&str, usize> =
                distinct.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
            (Some(labels.iter().map(|l| index[l.as_str()]).collect()), distinct)
        }
    };

    Ok(DesignMatrix {
        response_name: formula.response.clone(),
        y: DVector::from_vec(y),
        x,
        column_names: names,
        factors,
        groups,
        group_labels,
    })
}
