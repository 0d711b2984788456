//! Data model for parametric field datasets: design sites, snapshot matrices,
//! centering, linked/unlinked partitioning, and manifest-based file I/O.
//!
//! Snapshots are stored column-major semantically: one column is one sample,
//! so a snapshot matrix is `d` field degrees of freedom by `n` samples.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::csvmat;
use crate::error::{MaRomError, Result};

/// Relative tolerance for design-point equality, scaled per parameter by the
/// bound range. Exact float equality is too brittle after serialization.
pub const DESIGN_MATCH_RTOL: f64 = 1e-12;

/// Design sites: `b` parameters by `n` samples, with labels and box bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    values: DMatrix<f64>,
    names: Vec<String>,
    bounds: Vec<(f64, f64)>,
}

impl DesignMatrix {
    /// Validates bounds containment, finiteness, and column distinctness.
    pub fn new(
        values: DMatrix<f64>,
        names: Vec<String>,
        bounds: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let (b, n) = (values.nrows(), values.ncols());
        if b == 0 || n == 0 {
            return Err(MaRomError::InvalidInput(format!(
                "design matrix must be non-empty, got {b}x{n}"
            )));
        }
        if names.len() != b {
            return Err(MaRomError::DimensionMismatch {
                context: "parameter names vs design rows".into(),
                expected: b,
                actual: names.len(),
            });
        }
        if bounds.len() != b {
            return Err(MaRomError::DimensionMismatch {
                context: "bounds vs design rows".into(),
                expected: b,
                actual: bounds.len(),
            });
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(MaRomError::InvalidInput(format!(
                    "invalid bounds for parameter {} ({}): [{lo}, {hi}]",
                    i + 1,
                    names[i]
                )));
            }
        }
        for j in 0..n {
            for i in 0..b {
                let v = values[(i, j)];
                if !v.is_finite() {
                    return Err(MaRomError::InvalidInput(format!(
                        "non-finite design value at parameter {}, sample {}",
                        i + 1,
                        j + 1
                    )));
                }
                let (lo, hi) = bounds[i];
                if v < lo || v > hi {
                    return Err(MaRomError::InvalidInput(format!(
                        "design value {v} for parameter {} ({}) outside bounds [{lo}, {hi}] at sample {}",
                        i + 1,
                        names[i],
                        j + 1
                    )));
                }
            }
        }
        let dm = Self {
            values,
            names,
            bounds,
        };
        for j1 in 0..n {
            for j2 in (j1 + 1)..n {
                if dm.columns_match(j1, j2) {
                    return Err(MaRomError::InvalidInput(format!(
                        "duplicate design columns {} and {} (within tolerance)",
                        j1 + 1,
                        j2 + 1
                    )));
                }
            }
        }
        Ok(dm)
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Number of design parameters `b`.
    pub fn n_params(&self) -> usize {
        self.values.nrows()
    }

    /// Number of samples `n`.
    pub fn n_samples(&self) -> usize {
        self.values.ncols()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j).iter().copied().collect()
    }

    fn match_tol(&self, param: usize) -> f64 {
        let (lo, hi) = self.bounds[param];
        DESIGN_MATCH_RTOL * (hi - lo)
    }

    fn columns_match(&self, j1: usize, j2: usize) -> bool {
        (0..self.n_params())
            .all(|i| (self.values[(i, j1)] - self.values[(i, j2)]).abs() <= self.match_tol(i))
    }

    /// Whether column `j` equals point `p` within the per-parameter tolerance.
    pub fn matches_point(&self, j: usize, p: &[f64]) -> bool {
        p.len() == self.n_params()
            && (0..self.n_params())
                .all(|i| (self.values[(i, j)] - p[i]).abs() <= self.match_tol(i))
    }

    /// New matrix with columns picked by `indices` (metadata preserved).
    pub fn select_columns(&self, indices: &[usize]) -> DesignMatrix {
        let b = self.n_params();
        let values = DMatrix::from_fn(b, indices.len(), |i, j| self.values[(i, indices[j])]);
        DesignMatrix {
            values,
            names: self.names.clone(),
            bounds: self.bounds.clone(),
        }
    }
}

/// Field snapshots: `d` degrees of freedom by `n` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    values: DMatrix<f64>,
    field_name: String,
    node_ids: Vec<String>,
}

impl SnapshotMatrix {
    pub fn new(values: DMatrix<f64>, field_name: impl Into<String>) -> Result<Self> {
        let node_ids = (0..values.nrows()).map(|i| i.to_string()).collect();
        Self::with_node_ids(values, field_name, node_ids)
    }

    pub fn with_node_ids(
        values: DMatrix<f64>,
        field_name: impl Into<String>,
        node_ids: Vec<String>,
    ) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(MaRomError::InvalidInput(format!(
                "snapshot matrix must be non-empty, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if node_ids.len() != values.nrows() {
            return Err(MaRomError::DimensionMismatch {
                context: "node ids vs snapshot rows".into(),
                expected: values.nrows(),
                actual: node_ids.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let d = values.nrows();
            return Err(MaRomError::InvalidInput(format!(
                "non-finite snapshot value at row {}, column {}",
                pos % d + 1,
                pos / d + 1
            )));
        }
        Ok(Self {
            values,
            field_name: field_name.into(),
            node_ids,
        })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn field_name(&self) -> &str {
        &self.field_name
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    /// Field dimension `d`.
    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    /// Number of samples `n`.
    pub fn n_samples(&self) -> usize {
        self.values.ncols()
    }

    /// New matrix with columns picked by `indices` (metadata preserved).
    pub fn select_columns(&self, indices: &[usize]) -> SnapshotMatrix {
        let d = self.dim();
        let values = DMatrix::from_fn(d, indices.len(), |i, j| self.values[(i, indices[j])]);
        SnapshotMatrix {
            values,
            field_name: self.field_name.clone(),
            node_ids: self.node_ids.clone(),
        }
    }
}

/// One unit of training data: paired designs and snapshots plus fidelity
/// metadata and the constant CPU cost of generating one sample.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub designs: DesignMatrix,
    pub snapshots: SnapshotMatrix,
    pub fidelity_tag: String,
    pub cost_per_sample: f64,
}

impl Dataset {
    pub fn new(
        designs: DesignMatrix,
        snapshots: SnapshotMatrix,
        fidelity_tag: impl Into<String>,
        cost_per_sample: f64,
    ) -> Result<Self> {
        if designs.n_samples() != snapshots.n_samples() {
            return Err(MaRomError::DimensionMismatch {
                context: "design columns vs snapshot columns".into(),
                expected: designs.n_samples(),
                actual: snapshots.n_samples(),
            });
        }
        if !(cost_per_sample >= 0.0) {
            return Err(MaRomError::InvalidInput(format!(
                "cost_per_sample must be nonnegative, got {cost_per_sample}"
            )));
        }
        Ok(Self {
            designs,
            snapshots,
            fidelity_tag: fidelity_tag.into(),
            cost_per_sample,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.designs.n_samples()
    }
}

/// Mean-subtracted snapshots together with the subtracted mean field.
#[derive(Debug, Clone)]
pub struct CenteredSnapshots {
    pub values: DMatrix<f64>,
    pub mean: DVector<f64>,
}

/// Subtract the arithmetic column mean from every sample.
pub fn center(snapshots: &SnapshotMatrix) -> Result<CenteredSnapshots> {
    let n = snapshots.n_samples();
    if n == 0 {
        return Err(MaRomError::InvalidInput("empty snapshot matrix".into()));
    }
    let x = snapshots.values();
    let mean: DVector<f64> = x.column_sum() / n as f64;
    let mut values = x.clone();
    for mut col in values.column_iter_mut() {
        col -= &mean;
    }
    Ok(CenteredSnapshots { values, mean })
}

/// Partition a low-fidelity dataset into the columns linked to
/// `linked_designs` (reordered to match it) and the remaining unlinked ones.
///
/// Returns `(Y_L, Y_U, permutation)` where `permutation[j]` is the original
/// column index in `lo` of output column `j` (linked columns first).
pub fn split_linked(
    lo: &Dataset,
    linked_designs: &DesignMatrix,
) -> Result<(SnapshotMatrix, SnapshotMatrix, Vec<usize>)> {
    if linked_designs.n_params() != lo.designs.n_params() {
        return Err(MaRomError::DimensionMismatch {
            context: "linked design parameters vs low-fidelity parameters".into(),
            expected: lo.designs.n_params(),
            actual: linked_designs.n_params(),
        });
    }
    let m = lo.n_samples();
    let mut taken = vec![false; m];
    let mut linked_idx = Vec::with_capacity(linked_designs.n_samples());
    for j in 0..linked_designs.n_samples() {
        let p = linked_designs.column(j);
        let hits: Vec<usize> = (0..m)
            .filter(|&c| lo.designs.matches_point(c, &p))
            .collect();
        match hits.len() {
            0 => {
                return Err(MaRomError::InvalidInput(format!(
                    "linked design column {} has no match in the low-fidelity designs",
                    j + 1
                )))
            }
            1 => {
                let c = hits[0];
                if taken[c] {
                    return Err(MaRomError::InvalidInput(format!(
                        "linked design column {} matches an already-linked low-fidelity column {}",
                        j + 1,
                        c + 1
                    )));
                }
                taken[c] = true;
                linked_idx.push(c);
            }
            _ => {
                return Err(MaRomError::InvalidInput(format!(
                    "linked design column {} matches {} low-fidelity columns",
                    j + 1,
                    hits.len()
                )))
            }
        }
    }
    let unlinked_idx: Vec<usize> = (0..m).filter(|&c| !taken[c]).collect();
    let y_l = lo.snapshots.select_columns(&linked_idx);
    let y_u = lo.snapshots.select_columns(&unlinked_idx);
    let mut permutation = linked_idx;
    permutation.extend_from_slice(&unlinked_idx);
    Ok((y_l, y_u, permutation))
}

#[derive(Serialize, Deserialize)]
struct DatasetManifest {
    designs: String,
    snapshots: String,
    fidelity: String,
    cost_per_sample: f64,
    bounds: Vec<[f64; 2]>,
    names: Vec<String>,
    field_name: String,
}

/// Load a dataset from a JSON manifest. CSV paths inside the manifest are
/// resolved relative to the manifest's directory.
pub fn load_dataset(manifest_path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(manifest_path).map_err(|source| MaRomError::Io {
        path: manifest_path.to_path_buf(),
        source,
    })?;
    let manifest: DatasetManifest =
        serde_json::from_str(&text).map_err(|e| MaRomError::MalformedJson {
            path: manifest_path.to_path_buf(),
            detail: e.to_string(),
        })?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let design_values = csvmat::read_matrix(&base.join(&manifest.designs))?;
    let snapshot_values = csvmat::read_matrix(&base.join(&manifest.snapshots))?;
    let bounds = manifest.bounds.iter().map(|b| (b[0], b[1])).collect();
    let designs = DesignMatrix::new(design_values, manifest.names, bounds)?;
    if snapshot_values.ncols() != designs.n_samples() {
        return Err(MaRomError::DimensionMismatch {
            context: format!(
                "snapshot columns in {} vs design columns in {}",
                manifest.snapshots, manifest.designs
            ),
            expected: designs.n_samples(),
            actual: snapshot_values.ncols(),
        });
    }
    let snapshots = SnapshotMatrix::new(snapshot_values, manifest.field_name)?;
    Dataset::new(designs, snapshots, manifest.fidelity, manifest.cost_per_sample)
}

/// Save a dataset as `<stem>.json` plus `<stem>.designs.csv` and
/// `<stem>.snapshots.csv` next to it, at full precision.
pub fn save_dataset(dataset: &Dataset, manifest_path: &Path) -> Result<()> {
    let stem = manifest_path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| MaRomError::InvalidInput(format!(
            "manifest path {} has no usable file stem",
            manifest_path.display()
        )))?
        .to_string();
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let designs_name = format!("{stem}.designs.csv");
    let snapshots_name = format!("{stem}.snapshots.csv");
    csvmat::write_matrix(&base.join(&designs_name), dataset.designs.values())?;
    csvmat::write_matrix(&base.join(&snapshots_name), dataset.snapshots.values())?;
    let manifest = DatasetManifest {
        designs: designs_name,
        snapshots: snapshots_name,
        fidelity: dataset.fidelity_tag.clone(),
        cost_per_sample: dataset.cost_per_sample,
        bounds: dataset.designs.bounds().iter().map(|&(l, h)| [l, h]).collect(),
        names: dataset.designs.names().to_vec(),
        field_name: dataset.snapshots.field_name().to_string(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    csvmat::write_atomic(manifest_path, json.as_bytes())
}
