//! Recommending catalog items whose arousal/valence lies in a predicted
//! credible rectangle.

use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::distributions::Rng;
use crate::error::{Error, Result};
use crate::mard::CredibleRegion;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogItem {
    pub song_id: String,
    pub arousal: f64,
    pub valence: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub items: Vec<CatalogItem>,
}

impl Catalog {
    pub fn new(items: Vec<CatalogItem>) -> Result<Self> {
        if let Some(bad) = items
            .iter()
            .find(|it| !(-1.0..=1.0).contains(&it.arousal) || !(-1.0..=1.0).contains(&it.valence))
        {
            return Err(Error::Parameter(format!("item {} has AV outside [-1, 1]", bad.song_id)));
        }
        Ok(Self { items })
    }

    /// CSV with header `song_id,arousal,valence`.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let items = rdr.deserialize().collect::<std::result::Result<Vec<CatalogItem>, _>>()?;
        Self::new(items)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for it in &self.items {
            w.serialize(it)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn get(&self, song_id: &str) -> Option<&CatalogItem> {
        self.items.iter().find(|it| it.song_id == song_id)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ranking {
    /// Closest to the rectangle centre first; ties keep catalog order.
    #[default]
    Distance,
    /// Uniformly shuffled with the given seed.
    Random { seed: u64 },
}

/// Items inside `region` (inclusive), minus `exclude_id`, ranked and cut to `k`.
/// An empty result is a valid answer for a sparse rectangle.
pub fn recommend<'a>(
    catalog: &'a Catalog,
    region: &CredibleRegion,
    k: usize,
    exclude_id: Option<&str>,
    ranking: Ranking,
) -> Result<Vec<&'a CatalogItem>> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    let mut hits: Vec<&CatalogItem> = catalog
        .items
        .iter()
        .filter(|it| Some(it.song_id.as_str()) != exclude_id && region.contains(it.arousal, it.valence))
        .collect();
    match ranking {
        Ranking::Distance => {
            let (ca, cv) = region.center();
            let dist = |it: &CatalogItem| (it.arousal - ca).hypot(it.valence - cv);
            hits.sort_by(|a, b| dist(a).total_cmp(&dist(b)));
        }
        Ranking::Random { seed } => hits.shuffle(&mut Rng::new(seed)),
    }
    hits.truncate(k);
    Ok(hits)
}
