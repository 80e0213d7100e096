//! Empirical ward-type tables and their text format.
//!
//! ```text
//! # lines starting with '#' are comments
//! kind = joint              # age | los | joint
//! label = surgical ward
//! age_class_width = 5       # joint tables only
//! age_range = 18-100
//! los_range = 0-24
//! 60, 7, 0.25               # age, los, weight   (joint)
//! 62, 8, 0.75
//! ```
//!
//! Age tables have rows `age, weight`, LOS tables `los, weight`. In joint
//! tables the age of a row selects its class `⌊age / width⌋ · width`, and
//! repeated cells accumulate. Weights are normalized on load.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::DistributionError;

pub const DEFAULT_AGE_RANGE: (u32, u32) = (18, 100);
pub const DEFAULT_LOS_RANGE: (u32, u32) = (0, 24);
pub const DEFAULT_AGE_CLASS_WIDTH: u32 = 5;

const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    Age,
    Los,
    Joint,
}

impl TableKind {
    pub fn name(self) -> &'static str {
        match self {
            TableKind::Age => "age",
            TableKind::Los => "los",
            TableKind::Joint => "joint",
        }
    }

    fn parse(text: &str) -> Option<Self> {
        match text {
            "age" | "age_only" => Some(TableKind::Age),
            "los" | "los_only" => Some(TableKind::Los),
            "joint" | "joint_age_los" => Some(TableKind::Joint),
            _ => None,
        }
    }
}

/// One cell of a table. `age` is set for age and joint tables (the class
/// start for joint ones), `los` for LOS and joint tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub age: Option<u32>,
    pub los: Option<u32>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTable {
    kind: TableKind,
    label: Option<String>,
    age_class_width: u32,
    age_range: (u32, u32),
    los_range: (u32, u32),
    cells: Vec<TableCell>,
}

/// Header settings shared by the parser and programmatic construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TableHeader {
    pub kind: TableKind,
    pub label: Option<String>,
    pub age_class_width: u32,
    pub age_range: (u32, u32),
    pub los_range: (u32, u32),
}

impl TableHeader {
    pub fn new(kind: TableKind) -> Self {
        Self {
            kind,
            label: None,
            age_class_width: DEFAULT_AGE_CLASS_WIDTH,
            age_range: DEFAULT_AGE_RANGE,
            los_range: DEFAULT_LOS_RANGE,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

impl EmpiricalTable {
    /// Validates and normalizes rows tagged with their source line.
    fn build(
        header: TableHeader,
        rows: Vec<(usize, TableCell)>,
    ) -> Result<Self, DistributionError> {
        let TableHeader {
            kind,
            label,
            age_class_width,
            age_range,
            los_range,
        } = header;
        if age_class_width == 0 {
            return Err(DistributionError::MalformedTable {
                line: 0,
                reason: "age_class_width must be positive".into(),
            });
        }
        for (name, (lo, hi)) in [("age_range", age_range), ("los_range", los_range)] {
            if lo > hi {
                return Err(DistributionError::MalformedTable {
                    line: 0,
                    reason: format!("{name} is empty"),
                });
            }
        }

        let mut merged: BTreeMap<(Option<u32>, Option<u32>), f64> = BTreeMap::new();
        for (line, cell) in rows {
            if !cell.weight.is_finite() {
                return Err(DistributionError::MalformedTable {
                    line,
                    reason: "weight is not finite".into(),
                });
            }
            if cell.weight < 0.0 {
                return Err(DistributionError::NegativeWeight {
                    line,
                    weight: cell.weight,
                });
            }
            if let Some(age) = cell.age {
                // a joint cell may carry its class start, which can precede the range
                let last = match kind {
                    TableKind::Joint => {
                        age / age_class_width * age_class_width + age_class_width - 1
                    }
                    _ => age,
                };
                if last < age_range.0 || age > age_range.1 {
                    return Err(DistributionError::OutOfSupport {
                        line,
                        reason: format!("age {age} outside {}-{}", age_range.0, age_range.1),
                    });
                }
            }
            if let Some(los) = cell.los {
                if los < los_range.0 || los > los_range.1 {
                    return Err(DistributionError::OutOfSupport {
                        line,
                        reason: format!("los {los} outside {}-{}", los_range.0, los_range.1),
                    });
                }
            }
            let age = match kind {
                TableKind::Joint => cell.age.map(|a| a / age_class_width * age_class_width),
                _ => cell.age,
            };
            *merged.entry((age, cell.los)).or_default() += cell.weight;
        }

        let total: f64 = merged.values().sum();
        if total <= 0.0 {
            return Err(DistributionError::EmptySupport);
        }
        let cells = merged
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|((age, los), w)| TableCell {
                age,
                los,
                weight: w / total,
            })
            .collect();
        let table = Self {
            kind,
            label,
            age_class_width,
            age_range,
            los_range,
            cells,
        };
        debug_assert!(
            (table.cells.iter().map(|c| c.weight).sum::<f64>() - 1.0).abs()
                < NORMALIZATION_TOLERANCE
        );
        Ok(table)
    }

    /// Age table from `(age, weight)` pairs.
    pub fn ages(header: TableHeader, rows: &[(u32, f64)]) -> Result<Self, DistributionError> {
        Self::from_cells(
            TableHeader {
                kind: TableKind::Age,
                ..header
            },
            rows.iter().map(|&(age, weight)| TableCell {
                age: Some(age),
                los: None,
                weight,
            }),
        )
    }

    /// LOS table from `(los, weight)` pairs.
    pub fn lengths_of_stay(
        header: TableHeader,
        rows: &[(u32, f64)],
    ) -> Result<Self, DistributionError> {
        Self::from_cells(
            TableHeader {
                kind: TableKind::Los,
                ..header
            },
            rows.iter().map(|&(los, weight)| TableCell {
                age: None,
                los: Some(los),
                weight,
            }),
        )
    }

    /// Joint table from `(age, los, weight)` triples.
    pub fn joint(header: TableHeader, rows: &[(u32, u32, f64)]) -> Result<Self, DistributionError> {
        Self::from_cells(
            TableHeader {
                kind: TableKind::Joint,
                ..header
            },
            rows.iter().map(|&(age, los, weight)| TableCell {
                age: Some(age),
                los: Some(los),
                weight,
            }),
        )
    }

    pub fn from_cells(
        header: TableHeader,
        cells: impl IntoIterator<Item = TableCell>,
    ) -> Result<Self, DistributionError> {
        let kind = header.kind;
        let rows = cells
            .into_iter()
            .enumerate()
            .map(|(i, cell)| {
                let shape_ok = match kind {
                    TableKind::Age => cell.age.is_some() && cell.los.is_none(),
                    TableKind::Los => cell.age.is_none() && cell.los.is_some(),
                    TableKind::Joint => cell.age.is_some() && cell.los.is_some(),
                };
                if shape_ok {
                    Ok((i + 1, cell))
                } else {
                    Err(DistributionError::MalformedTable {
                        line: i + 1,
                        reason: format!("cell does not fit a {} table", kind.name()),
                    })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::build(header, rows)
    }

    pub fn parse(text: &str) -> Result<Self, DistributionError> {
        let malformed =
            |line: usize, reason: String| DistributionError::MalformedTable { line, reason };
        let mut kind = None;
        let mut header = TableHeader::new(TableKind::Age);
        let mut rows = Vec::new();

        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some((key, value)) = content.split_once('=') {
                if !rows.is_empty() {
                    return Err(malformed(line, "header line after data rows".into()));
                }
                let value = value.trim();
                match key.trim() {
                    "kind" => {
                        kind =
                            Some(TableKind::parse(value).ok_or_else(|| {
                                malformed(line, format!("unknown kind '{value}'"))
                            })?)
                    }
                    "label" => header.label = Some(value.to_string()),
                    "age_class_width" => {
                        header.age_class_width = value.parse().map_err(|_| {
                            malformed(line, format!("bad age_class_width '{value}'"))
                        })?
                    }
                    "age_range" => {
                        header.age_range = parse_range(value)
                            .ok_or_else(|| malformed(line, format!("bad age_range '{value}'")))?
                    }
                    "los_range" => {
                        header.los_range = parse_range(value)
                            .ok_or_else(|| malformed(line, format!("bad los_range '{value}'")))?
                    }
                    other => return Err(malformed(line, format!("unknown header key '{other}'"))),
                }
                continue;
            }

            let Some(kind) = kind else {
                return Err(malformed(line, "data row before 'kind' header".into()));
            };
            let fields: Vec<&str> = content.split(',').map(str::trim).collect();
            let expected = if kind == TableKind::Joint { 3 } else { 2 };
            if fields.len() != expected {
                return Err(malformed(
                    line,
                    format!(
                        "expected {expected} comma-separated fields, found {}",
                        fields.len()
                    ),
                ));
            }
            let integer = |field: &str| {
                field.parse::<u32>().map_err(|_| {
                    malformed(line, format!("'{field}' is not a non-negative integer"))
                })
            };
            let weight: f64 = fields[expected - 1].parse().map_err(|_| {
                malformed(line, format!("'{}' is not a number", fields[expected - 1]))
            })?;
            let cell = match kind {
                TableKind::Age => TableCell {
                    age: Some(integer(fields[0])?),
                    los: None,
                    weight,
                },
                TableKind::Los => TableCell {
                    age: None,
                    los: Some(integer(fields[0])?),
                    weight,
                },
                TableKind::Joint => TableCell {
                    age: Some(integer(fields[0])?),
                    los: Some(integer(fields[1])?),
                    weight,
                },
            };
            rows.push((line, cell));
        }

        header.kind = kind.ok_or_else(|| malformed(0, "missing 'kind' header".into()))?;
        Self::build(header, rows)
    }

    pub fn load(path: &Path) -> Result<Self, DistributionError> {
        let text = std::fs::read_to_string(path).map_err(|source| DistributionError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kind = {}", self.kind.name());
        if let Some(label) = &self.label {
            let _ = writeln!(out, "label = {}", label.replace('#', ""));
        }
        if self.kind == TableKind::Joint {
            let _ = writeln!(out, "age_class_width = {}", self.age_class_width);
        }
        let _ = writeln!(out, "age_range = {}-{}", self.age_range.0, self.age_range.1);
        let _ = writeln!(out, "los_range = {}-{}", self.los_range.0, self.los_range.1);
        for cell in &self.cells {
            let fields: Vec<String> = [cell.age, cell.los]
                .into_iter()
                .flatten()
                .map(|v| v.to_string())
                .chain([format!("{:?}", cell.weight)])
                .collect();
            let _ = writeln!(out, "{}", fields.join(", "));
        }
        out
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn age_class_width(&self) -> u32 {
        self.age_class_width
    }

    pub fn age_range(&self) -> (u32, u32) {
        self.age_range
    }

    pub fn los_range(&self) -> (u32, u32) {
        self.los_range
    }

    /// Normalized cells: weights sum to 1.
    pub fn cells(&self) -> &[TableCell] {
        &self.cells
    }

    /// Class start of `age` in a joint table.
    pub fn age_class_of(&self, age: u32) -> u32 {
        age / self.age_class_width * self.age_class_width
    }

    /// Weight per age (age tables) or age class (joint tables) restricted to
    /// cells with LOS ≥ 1, not renormalized.
    pub fn age_marginal(&self) -> BTreeMap<u32, f64> {
        let mut marginal = BTreeMap::new();
        for cell in &self.cells {
            if let Some(age) = cell.age {
                if cell.los.is_none_or(|l| l >= 1) {
                    *marginal.entry(age).or_default() += cell.weight;
                }
            }
        }
        marginal
    }

    /// Weight per LOS ≥ 1, not renormalized.
    pub fn los_marginal(&self) -> BTreeMap<u32, f64> {
        let mut marginal = BTreeMap::new();
        for cell in &self.cells {
            if let Some(los) = cell.los.filter(|&l| l >= 1) {
                *marginal.entry(los).or_default() += cell.weight;
            }
        }
        marginal
    }

    /// Mean LOS of what the generator samples: LOS 0 cells are dropped and
    /// the rest renormalized.
    pub fn mean_los(&self) -> Result<f64, DistributionError> {
        weighted_mean(&self.los_marginal())
    }
}

fn parse_range(text: &str) -> Option<(u32, u32)> {
    let (lo, hi) = text.split_once(['-', ','])?;
    Some((lo.trim().parse().ok()?, hi.trim().parse().ok()?))
}

fn weighted_mean(marginal: &BTreeMap<u32, f64>) -> Result<f64, DistributionError> {
    let mass: f64 = marginal.values().sum();
    if mass <= 0.0 {
        return Err(DistributionError::EmptySupport);
    }
    Ok(marginal
        .iter()
        .map(|(&v, &w)| f64::from(v) * w)
        .sum::<f64>()
        / mass)
}

/// Draws integers with the given (unnormalized) weights.
#[derive(Debug, Clone)]
pub struct DiscreteSampler {
    values: Vec<u32>,
    weights: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl DiscreteSampler {
    pub fn new(pairs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self, DistributionError> {
        let (values, weights): (Vec<u32>, Vec<f64>) =
            pairs.into_iter().filter(|&(_, w)| w > 0.0).unzip();
        let index = WeightedIndex::new(&weights).map_err(|_| DistributionError::EmptySupport)?;
        Ok(Self {
            values,
            weights,
            index,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.values[self.index.sample(rng)]
    }

    pub fn mean(&self) -> f64 {
        let mass: f64 = self.weights.iter().sum();
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(&v, &w)| f64::from(v) * w)
            .sum::<f64>()
            / mass
    }

    pub fn support(&self) -> &[u32] {
        &self.values
    }
}

struct JointClass {
    ages: Vec<u32>,
    los: DiscreteSampler,
}

/// Sampler for a joint table: an age class by its marginal weight, an age
/// uniformly within the class, then LOS conditioned on the class.
pub struct JointSampler {
    width: u32,
    class_starts: Vec<u32>,
    classes: BTreeMap<u32, JointClass>,
    class_index: WeightedIndex<f64>,
    marginal_los: DiscreteSampler,
}

impl std::fmt::Debug for JointSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JointSampler")
            .field("width", &self.width)
            .field("classes", &self.class_starts)
            .finish()
    }
}

impl JointSampler {
    pub fn new(table: &EmpiricalTable, age_bounds: (u32, u32)) -> Result<Self, DistributionError> {
        if table.kind != TableKind::Joint {
            return Err(DistributionError::KindMismatch {
                expected: TableKind::Joint,
                found: table.kind,
            });
        }
        warn_on_zero_los(table);
        let width = table.age_class_width;
        let lo = age_bounds.0.max(table.age_range.0);
        let hi = age_bounds.1.min(table.age_range.1);

        let mut per_class: BTreeMap<u32, Vec<(u32, f64)>> = BTreeMap::new();
        for cell in &table.cells {
            if let (Some(start), Some(los)) = (cell.age, cell.los) {
                if los >= 1 {
                    per_class.entry(start).or_default().push((los, cell.weight));
                }
            }
        }
        let mut classes = BTreeMap::new();
        let mut class_starts = Vec::new();
        let mut masses = Vec::new();
        for (start, los) in per_class {
            let ages: Vec<u32> = (start.max(lo)..=(start + width - 1).min(hi)).collect();
            if ages.is_empty() {
                continue;
            }
            masses.push(los.iter().map(|p| p.1).sum::<f64>());
            class_starts.push(start);
            classes.insert(
                start,
                JointClass {
                    ages,
                    los: DiscreteSampler::new(los)?,
                },
            );
        }
        let class_index =
            WeightedIndex::new(&masses).map_err(|_| DistributionError::EmptySupport)?;
        let marginal_los = DiscreteSampler::new(table.los_marginal())?;
        Ok(Self {
            width,
            class_starts,
            classes,
            class_index,
            marginal_los,
        })
    }

    pub fn sample_age<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let class = &self.classes[&self.class_starts[self.class_index.sample(rng)]];
        class.ages[rng.random_range(0..class.ages.len())]
    }

    pub fn sample_los<R: Rng + ?Sized>(&self, age: u32, rng: &mut R) -> u32 {
        match self.classes.get(&(age / self.width * self.width)) {
            Some(class) => class.los.sample(rng),
            None => {
                log::warn!(
                    "joint table has no mass for age {age}; using the marginal LOS distribution"
                );
                self.marginal_los.sample(rng)
            }
        }
    }

    pub fn mean_los(&self) -> f64 {
        self.marginal_los.mean()
    }
}

pub(crate) fn warn_on_zero_los(table: &EmpiricalTable) {
    let dropped: f64 = table
        .cells
        .iter()
        .filter(|c| c.los == Some(0))
        .map(|c| c.weight)
        .sum();
    if dropped > 0.0 {
        log::warn!(
            "ignoring LOS 0 cells ({:.4} of the mass) of table {}",
            dropped,
            table.label.as_deref().unwrap_or("<unlabeled>")
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parse_and_normalize() {
        let table = EmpiricalTable::parse("kind = age\n40, 1\n60, 3\n").unwrap();
        let weights: Vec<f64> = table.cells().iter().map(|c| c.weight).collect();
        assert_eq!(weights, vec![0.25, 0.75]);
        assert_eq!(table.kind(), TableKind::Age);
        assert_eq!(table.age_range(), DEFAULT_AGE_RANGE);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(
            EmpiricalTable::parse("kind = age\n40, -1\n60, 3\n"),
            Err(DistributionError::NegativeWeight { line: 2, .. })
        ));
        assert!(matches!(
            EmpiricalTable::parse("kind = age\n40, 0\n"),
            Err(DistributionError::EmptySupport)
        ));
        assert!(matches!(
            EmpiricalTable::parse("kind = los\n"),
            Err(DistributionError::EmptySupport)
        ));
        assert!(matches!(
            EmpiricalTable::parse("40, 1\n"),
            Err(DistributionError::MalformedTable { line: 1, .. })
        ));
        assert!(matches!(
            EmpiricalTable::parse("kind = joint\n40, 1\n"),
            Err(DistributionError::MalformedTable { line: 2, .. })
        ));
        assert!(matches!(
            EmpiricalTable::parse("kind = los\n30, 1\n"),
            Err(DistributionError::OutOfSupport { line: 2, .. })
        ));
        assert!(matches!(
            EmpiricalTable::parse("kind = age\nage_range = 20-10\n30, 1\n"),
            Err(DistributionError::MalformedTable { .. })
        ));
        assert!(matches!(
            EmpiricalTable::parse("kind = age\n30, x\n"),
            Err(DistributionError::MalformedTable { line: 2, .. })
        ));
        assert!(matches!(
            EmpiricalTable::parse("kind = age\ncolour = red\n"),
            Err(DistributionError::MalformedTable { line: 2, .. })
        ));
    }

    #[test]
    fn joint_cells_merge_into_classes() {
        let text =
            "# test\nkind = joint\nage_class_width = 5\n60, 7, 1 # trailing\n64, 7, 1\n65, 3, 2\n";
        let table = EmpiricalTable::parse(text).unwrap();
        assert_eq!(table.cells().len(), 2);
        assert_eq!(table.cells()[0].age, Some(60));
        assert_eq!(table.cells()[0].weight, 0.5);
        assert_eq!(table.age_class_of(64), 60);
    }

    #[test]
    fn text_round_trip() {
        let table = EmpiricalTable::joint(
            TableHeader::new(TableKind::Joint).with_label("demo"),
            &[(20, 1, 0.1), (20, 2, 0.3), (47, 0, 0.2), (95, 24, 0.4)],
        )
        .unwrap();
        assert_eq!(EmpiricalTable::parse(&table.to_text()).unwrap(), table);
    }

    #[test]
    fn two_point_age_mean() {
        let table = EmpiricalTable::parse("kind = age\n40, 0.5\n60, 0.5\n").unwrap();
        let sampler = DiscreteSampler::new(table.age_marginal()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| f64::from(sampler.sample(&mut rng)))
            .sum::<f64>()
            / n as f64;
        assert!((mean - 50.0).abs() < 0.2, "{mean}");
        assert_eq!(sampler.mean(), 50.0);
    }

    #[test]
    fn los_mean_ignores_zero_cells() {
        let table = EmpiricalTable::parse("kind = los\n3, 0.5\n5, 0.5\n").unwrap();
        assert_eq!(table.mean_los().unwrap(), 4.0);
        let table = EmpiricalTable::parse("kind = los\n0, 0.5\n3, 0.25\n5, 0.25\n").unwrap();
        assert_eq!(table.mean_los().unwrap(), 4.0);
        let table = EmpiricalTable::parse("kind = los\n0, 1\n").unwrap();
        assert!(table.mean_los().is_err());
    }

    #[test]
    fn joint_point_mass() {
        let table = EmpiricalTable::parse("kind = joint\n60, 7, 1\n").unwrap();
        let sampler = JointSampler::new(&table, DEFAULT_AGE_RANGE).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!((60..=64).contains(&sampler.sample_age(&mut rng)));
            assert_eq!(sampler.sample_los(62, &mut rng), 7);
        }
        // age class without mass falls back to the marginal
        assert_eq!(sampler.sample_los(30, &mut rng), 7);
    }

    #[test]
    fn joint_sampler_respects_age_bounds() {
        let table = EmpiricalTable::parse("kind = joint\n18, 2, 1\n20, 3, 1\n").unwrap();
        let sampler = JointSampler::new(&table, (18, 100)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let age = sampler.sample_age(&mut rng);
            assert!((18..=24).contains(&age));
        }
        assert!(JointSampler::new(&table, (30, 40)).is_err());
    }
}
