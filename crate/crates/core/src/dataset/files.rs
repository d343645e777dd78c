//! File layouts.
//!
//! * Song features: one CSV per song, `<dir>/<song_id>.csv`, a header of
//!   feature names and one row per frame. `;` or `,` separated. A leading
//!   `frameTime` column, if present, is ignored.
//! * Annotations: one CSV with columns `song_id, frame, arousal, valence`;
//!   `frame` is the zero-based row of the song's feature file.
//! * Datasets: `song_id, <features...>, <responses...>` plus a JSON sidecar
//!   next to it (same stem, `.json`) holding column roles, PCA loadings and the split.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Dataset, Pca, SongSeries, Split};
use crate::error::{Error, Result};
use crate::matrix_ops::Matrix;

/// Column names treated as responses when a dataset has no sidecar.
pub const RESPONSE_NAMES: [&str; 5] = ["arousal", "valence", "y", "y1", "y2"];

const IGNORED_FEATURE_COLUMNS: [&str; 3] = ["frameTime", "frame_time", "frame"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub feature_names: Vec<String>,
    pub response_names: Vec<String>,
    #[serde(default)]
    pub pca: Option<Pca>,
    #[serde(default)]
    pub split: Option<Split>,
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn parse_f64(field: &str, ctx: &dyn Fn() -> String) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse(format!("{}: `{field}` is not a number", ctx())))
}

fn sniff_delimiter(path: &Path) -> Result<u8> {
    let text = fs::read_to_string(path)?;
    let header = text.lines().next().unwrap_or_default();
    Ok(if header.contains(';') && !header.contains(',') { b';' } else { b',' })
}

/// Reads one song's feature frames; returns column names and the frame matrix.
pub fn read_feature_frames(path: &Path) -> Result<(Vec<String>, Matrix<f64>)> {
    let mut rdr = csv::ReaderBuilder::new().delimiter(sniff_delimiter(path)?).trim(csv::Trim::All).from_path(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let keep: Vec<usize> =
        (0..headers.len()).filter(|&j| !IGNORED_FEATURE_COLUMNS.contains(&headers[j].as_str())).collect();
    let mut data = Vec::new();
    let mut rows = 0;
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for &j in &keep {
            data.push(parse_f64(&rec[j], &|| format!("{} row {}", path.display(), r + 2))?);
        }
        rows += 1;
    }
    let names = keep.iter().map(|&j| headers[j].clone()).collect();
    Ok((names, Matrix::from_row_slice(rows, keep.len(), &data)))
}

#[derive(Debug, Deserialize)]
struct AnnotationRow {
    song_id: String,
    frame: usize,
    arousal: f64,
    valence: f64,
}

/// Loads every annotated song, ordered by song id. Returns the feature names
/// of the first song as well.
pub fn load_songs(features_dir: &Path, annotations: &Path) -> Result<(Vec<String>, Vec<SongSeries>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(annotations)?;
    let mut by_song: BTreeMap<String, Vec<AnnotationRow>> = BTreeMap::new();
    for row in rdr.deserialize() {
        let row: AnnotationRow = row?;
        by_song.entry(row.song_id.clone()).or_default().push(row);
    }
    if by_song.is_empty() {
        return Err(Error::EmptyData(format!("{} has no annotations", annotations.display())));
    }
    let mut names: Option<Vec<String>> = None;
    let mut songs = Vec::with_capacity(by_song.len());
    for (id, mut rows) in by_song {
        rows.sort_by_key(|r| r.frame);
        if rows.windows(2).any(|w| w[0].frame == w[1].frame) {
            return Err(Error::Parse(format!("song {id}: repeated annotation frame")));
        }
        let (cols, frames) = read_feature_frames(&features_dir.join(format!("{id}.csv")))?;
        match &names {
            None => names = Some(cols),
            Some(n) if *n != cols => {
                return Err(Error::Dimension(format!("song {id}: feature columns differ from the first song")))
            }
            Some(_) => {}
        }
        if let Some(last) = rows.last() {
            if last.frame >= frames.nrows() {
                return Err(Error::Dimension(format!(
                    "song {id}: annotation frame {} beyond {} feature frames",
                    last.frame,
                    frames.nrows()
                )));
            }
        }
        let idx: Vec<usize> = rows.iter().map(|r| r.frame).collect();
        let annotation_frames = Matrix::from_fn(rows.len(), 2, |i, j| if j == 0 { rows[i].arousal } else { rows[i].valence });
        songs.push(SongSeries { song_id: id, feature_frames: frames.select_rows(&idx), annotation_frames });
    }
    Ok((names.unwrap_or_default(), songs))
}

/// Writes the dataset CSV and its JSON sidecar.
pub fn write_dataset(path: &Path, data: &Dataset) -> Result<()> {
    data.validate()?;
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["song_id".to_string()];
    header.extend(data.feature_names.iter().cloned());
    header.extend(data.response_names.iter().cloned());
    w.write_record(&header)?;
    for i in 0..data.n() {
        let mut rec = vec![data.song_ids[i].clone()];
        rec.extend(data.x.row(i).iter().map(|v| v.to_string()));
        rec.extend(data.y.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    let meta = DatasetMeta {
        feature_names: data.feature_names.clone(),
        response_names: data.response_names.clone(),
        pca: data.pca.clone(),
        split: data.split.clone(),
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(sidecar_path(path), json + "\n")?;
    Ok(())
}

/// Reads a dataset CSV. Column roles come from the sidecar when it exists,
/// otherwise columns named in [`RESPONSE_NAMES`] are responses.
pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let sidecar = sidecar_path(path);
    let meta: Option<DatasetMeta> = if sidecar.exists() {
        let text = fs::read_to_string(&sidecar)?;
        Some(serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", sidecar.display())))?)
    } else {
        None
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers.first().map(String::as_str) != Some("song_id") {
        return Err(Error::Parse(format!("{}: first column must be song_id", path.display())));
    }
    let is_response = |name: &str| match &meta {
        Some(m) => m.response_names.iter().any(|r| r == name),
        None => RESPONSE_NAMES.contains(&name),
    };
    let feat_cols: Vec<usize> = (1..headers.len()).filter(|&j| !is_response(&headers[j])).collect();
    let resp_cols: Vec<usize> = (1..headers.len()).filter(|&j| is_response(&headers[j])).collect();
    if resp_cols.is_empty() {
        return Err(Error::Parse(format!("{}: no response columns", path.display())));
    }
    let (mut xs, mut ys, mut ids) = (Vec::new(), Vec::new(), Vec::new());
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let ctx = || format!("{} row {}", path.display(), r + 2);
        ids.push(rec[0].to_string());
        for &j in &feat_cols {
            xs.push(parse_f64(&rec[j], &ctx)?);
        }
        for &j in &resp_cols {
            ys.push(parse_f64(&rec[j], &ctx)?);
        }
    }
    let n = ids.len();
    if n == 0 {
        return Err(Error::EmptyData(format!("{} has no rows", path.display())));
    }
    let mut d = Dataset::new(
        Matrix::from_row_slice(n, feat_cols.len(), &xs),
        Matrix::from_row_slice(n, resp_cols.len(), &ys),
        ids,
    )?;
    d.feature_names = feat_cols.iter().map(|&j| headers[j].clone()).collect();
    d.response_names = resp_cols.iter().map(|&j| headers[j].clone()).collect();
    if let Some(m) = meta {
        d.pca = m.pca;
        d.split = m.split;
    }
    d.validate()?;
    Ok(d)
}
