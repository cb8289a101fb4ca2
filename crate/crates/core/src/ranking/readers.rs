//! Reader-score tables: difference to the reference image, per-reader
//! z-normalization (population standard deviation) and median aggregation.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phantom::Modality;
use crate::sampling::Pattern;

pub const REFERENCE_ENTITY: &str = "REFERENCE";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReaderRow {
    pub reader_id: String,
    /// Team name, or [`REFERENCE_ENTITY`] for the fully sampled reference.
    pub entity: String,
    pub case_id: String,
    pub modality: Modality,
    pub pattern: Pattern,
    pub af: u32,
    pub score: u8,
}

impl ReaderRow {
    pub fn is_reference(&self) -> bool {
        self.entity == REFERENCE_ENTITY
    }

    fn group(&self) -> GroupKey {
        GroupKey {
            reader_id: self.reader_id.clone(),
            case_id: self.case_id.clone(),
            modality: self.modality,
            pattern: self.pattern,
            af: self.af,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct GroupKey {
    reader_id: String,
    case_id: String,
    modality: Modality,
    pattern: Pattern,
    af: u32,
}

impl std::fmt::Display for GroupKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "reader={} case={} modality={} pattern={} af={}",
            self.reader_id, self.case_id, self.modality, self.pattern, self.af
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReaderScoreTable {
    rows: Vec<ReaderRow>,
}

impl ReaderScoreTable {
    pub fn new(rows: Vec<ReaderRow>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| !(1..=5).contains(&r.score)) {
            return Err(Error::InvalidParameter(format!(
                "score {} outside 1..=5 for reader {} case {}",
                r.score, r.reader_id, r.case_id
            )));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[ReaderRow] {
        &self.rows
    }

    /// Parse CSV with header `reader_id,entity,case_id,modality,pattern,af,score`.
    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let rows = rdr
            .deserialize::<ReaderRow>()
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(rows)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invariant(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffRow {
    pub reader_id: String,
    pub team: String,
    pub case_id: String,
    pub modality: Modality,
    pub pattern: Pattern,
    pub af: u32,
    /// Team score minus the same reader's reference score.
    pub diff: f64,
    /// Filled in by [`reader_zscore`].
    pub z: Option<f64>,
}

/// Difference of every team row to the reference row of its
/// (reader, case, modality, pattern, af) group.
pub fn reader_diff(table: &ReaderScoreTable) -> Result<Vec<DiffRow>> {
    let mut reference: HashMap<GroupKey, u8> = HashMap::new();
    for r in table.rows().iter().filter(|r| r.is_reference()) {
        if reference.insert(r.group(), r.score).is_some() {
            return Err(Error::InvalidParameter(format!(
                "duplicate REFERENCE row for group {}",
                r.group()
            )));
        }
    }
    table
        .rows()
        .iter()
        .filter(|r| !r.is_reference())
        .map(|r| {
            let key = r.group();
            let base = reference
                .get(&key)
                .ok_or_else(|| Error::MissingReference(key.to_string()))?;
            Ok(DiffRow {
                reader_id: r.reader_id.clone(),
                team: r.entity.clone(),
                case_id: r.case_id.clone(),
                modality: r.modality,
                pattern: r.pattern,
                af: r.af,
                diff: r.score as f64 - *base as f64,
                z: None,
            })
        })
        .collect()
}

/// Z-normalize each reader's difference scores with that reader's mean and
/// population standard deviation.
pub fn reader_zscore(mut diffs: Vec<DiffRow>) -> Result<Vec<DiffRow>> {
    let mut stats: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for d in &diffs {
        let e = stats.entry(d.reader_id.clone()).or_insert((0.0, 0));
        e.0 += d.diff;
        e.1 += 1;
    }
    let mut moments: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for (reader, (sum, n)) in stats {
        let mu = sum / n as f64;
        let var = diffs
            .iter()
            .filter(|d| d.reader_id == reader)
            .map(|d| (d.diff - mu).powi(2))
            .sum::<f64>()
            / n as f64;
        let sigma = var.sqrt();
        if !(sigma > 0.0) {
            return Err(Error::DegenerateReader(reader));
        }
        moments.insert(reader, (mu, sigma));
    }
    for d in &mut diffs {
        let (mu, sigma) = moments[&d.reader_id];
        d.z = Some((d.diff - mu) / sigma);
    }
    Ok(diffs)
}

pub fn median_of(values: &[f64]) -> Result<f64> {
    let mut v = values.to_vec();
    crate::util::median(&mut v).ok_or_else(|| Error::EmptyGroup("median of no values".into()))
}

/// Median z-score per (team, modality).
pub fn median_aggregate(z_rows: &[DiffRow]) -> Result<BTreeMap<(String, Modality), f64>> {
    let mut groups: BTreeMap<(String, Modality), Vec<f64>> = BTreeMap::new();
    for r in z_rows {
        let z = r
            .z
            .ok_or_else(|| Error::InvalidParameter("row has no z-score; run reader_zscore first".into()))?;
        groups.entry((r.team.clone(), r.modality)).or_default().push(z);
    }
    groups
        .into_iter()
        .map(|(k, v)| Ok((k, median_of(&v)?)))
        .collect()
}
