//! On-disk tree: `{split}/{case}/{modality}/` for the dataset, with one
//! `{pattern}_af{af}/` directory per acquisition cell below it.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phantom::Modality;
use crate::sampling::Pattern;

pub const SPLITS: [&str; 3] = ["train", "val", "test"];
/// Relative sizes of the train, val and test splits.
pub const SPLIT_WEIGHTS: [usize; 3] = [200, 60, 70];

pub const REF_IMAGE: &str = "ref_image.cxa";
pub const FULL_KSPACE: &str = "full_kspace.cxa";
pub const CSM: &str = "csm.cxa";
pub const KSPACE: &str = "kspace.cxa";
pub const MASK: &str = "mask.cxa";
pub const MASK_SIDECAR: &str = "mask.json";
pub const RECON: &str = "recon.cxa";

/// Apportion `n` cases over the splits by largest remainder; remainder ties
/// go to the earlier split.
pub fn split_counts(n: usize) -> [usize; 3] {
    let total: usize = SPLIT_WEIGHTS.iter().sum();
    let mut counts = SPLIT_WEIGHTS.map(|w| n * w / total);
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(n * SPLIT_WEIGHTS[i] % total));
    let assigned: usize = counts.iter().sum();
    for &i in order.iter().take(n - assigned) {
        counts[i] += 1;
    }
    counts
}

pub fn case_id(index: usize) -> String {
    format!("P{:03}", index + 1)
}

/// One acquisition setting: sampling pattern and nominal acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub pattern: Pattern,
    pub af: u32,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_af{}", self.pattern, self.af)
    }
}

impl FromStr for Cell {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cell {s:?} is not of the form <pattern>_af<n>"));
        let (p, af) = s.rsplit_once("_af").ok_or_else(bad)?;
        Ok(Cell {
            pattern: p.parse()?,
            af: af.parse().map_err(|_| bad())?,
        })
    }
}

/// One `{split}/{case}/{modality}` directory.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CaseDir {
    pub split: String,
    pub case_id: String,
    pub modality: Modality,
}

impl CaseDir {
    pub fn rel(&self) -> PathBuf {
        Path::new(&self.split).join(&self.case_id).join(self.modality.as_str())
    }

    /// Key used to pair the same acquisition across teams.
    pub fn key(&self, cell: Cell) -> String {
        format!("{}/{}/{}/{}", self.split, self.case_id, self.modality, cell)
    }
}

fn sorted_subdirs(dir: &Path) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        if entry.file_type().map_err(|e| Error::io(entry.path(), e))?.is_dir() {
            names.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    names.sort();
    Ok(names)
}

/// Every `{split}/{case}/{modality}` directory under `root` that contains
/// `marker`, in sorted order.
pub fn find_case_dirs(root: &Path, marker: Option<&str>) -> Result<Vec<CaseDir>> {
    let mut out = Vec::new();
    for split in sorted_subdirs(root)? {
        if !SPLITS.contains(&split.as_str()) {
            continue;
        }
        let split_dir = root.join(&split);
        for case in sorted_subdirs(&split_dir)? {
            for m in sorted_subdirs(&split_dir.join(&case))? {
                let Ok(modality) = m.parse::<Modality>() else {
                    continue;
                };
                let cd = CaseDir {
                    split: split.clone(),
                    case_id: case.clone(),
                    modality,
                };
                if marker.is_none_or(|f| root.join(cd.rel()).join(f).is_file()) {
                    out.push(cd);
                }
            }
        }
    }
    Ok(out)
}

/// Cell directories present below one case directory.
pub fn find_cells(case_dir: &Path) -> Result<Vec<Cell>> {
    if !case_dir.is_dir() {
        return Ok(Vec::new());
    }
    Ok(sorted_subdirs(case_dir)?
        .iter()
        .filter_map(|n| n.parse().ok())
        .collect())
}
