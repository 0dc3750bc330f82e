//! On-disk cache of expensive series. Advisory only: a missing, stale or
//! unreadable file is a miss, never an error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ring::CoefficientRing;
use crate::series::Series;

pub const ENGINE_VERSION: &str = concat!("qphi-", env!("CARGO_PKG_VERSION"));

pub const DEFAULT_CACHE_DIR: &str = ".qphi-cache";

#[derive(Serialize, Deserialize)]
struct CacheFile {
    engine: String,
    name: String,
    series: Series,
}

#[derive(Clone, Debug, Default)]
pub struct SeriesCache {
    dir: Option<PathBuf>,
}

impl SeriesCache {
    pub fn disabled() -> Self {
        SeriesCache { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        SeriesCache { dir: Some(dir.into()) }
    }

    /// `QPHI_CACHE` if set, else `./.qphi-cache`.
    pub fn from_env() -> Self {
        match std::env::var_os("QPHI_CACHE") {
            Some(d) if !d.is_empty() => SeriesCache::at(d),
            _ => SeriesCache::at(DEFAULT_CACHE_DIR),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, name: &str, ring: CoefficientRing) -> Option<PathBuf> {
        let ring_tag = match ring {
            CoefficientRing::Integer => "exact".to_string(),
            CoefficientRing::Modular(m) => format!("mod{m}"),
        };
        self.dir.as_ref().map(|d| d.join(format!("{name}-{ring_tag}.json")))
    }

    fn read(&self, name: &str, ring: CoefficientRing) -> Option<Series> {
        let text = fs::read_to_string(self.path(name, ring)?).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        (file.engine == ENGINE_VERSION && file.name == name && file.series.ring() == ring).then_some(file.series)
    }

    /// The series for `name` through `order`, if a file at least that deep exists.
    pub fn load(&self, name: &str, order: usize, ring: CoefficientRing) -> Option<Series> {
        self.read(name, ring)
            .filter(|s| s.order() >= order)
            .map(|s| s.truncate(order))
    }

    /// Stores `series` unless a deeper one is already cached. Failures are ignored.
    pub fn store(&self, name: &str, series: &Series) {
        let Some(path) = self.path(name, series.ring()) else {
            return;
        };
        if self
            .read(name, series.ring())
            .is_some_and(|old| old.order() >= series.order())
        {
            return;
        }
        let _ = write_atomic(&path, name, series);
    }
}

fn write_atomic(path: &Path, name: &str, series: &Series) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let file = CacheFile {
        engine: ENGINE_VERSION.to_string(),
        name: name.to_string(),
        series: series.clone(),
    };
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("series"),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        serde_json::to_writer(&mut f, &file)?;
        f.flush()?;
    }
    fs::rename(&tmp, path)
}
