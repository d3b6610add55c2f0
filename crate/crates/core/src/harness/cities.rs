//! Loading a cities table as planar (longitude, latitude) points.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Coords, Domain, PointConfig, Provenance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CityColumns {
    pub lat: String,
    pub lng: String,
    /// Optional label column; `city` or `name` is picked up when present.
    pub name: Option<String>,
}

impl Default for CityColumns {
    fn default() -> Self {
        CityColumns { lat: "lat".into(), lng: "lng".into(), name: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CitiesDataset {
    pub names: Vec<String>,
    pub lat: Vec<f64>,
    pub lng: Vec<f64>,
}

impl CitiesDataset {
    pub fn len(&self) -> usize {
        self.lat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lat.is_empty()
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), line, msg: msg.into() }
}

pub fn read_cities(path: &Path, cols: &CityColumns) -> Result<CitiesDataset> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
    let lat_idx = find(&cols.lat).ok_or_else(|| parse_err(path, 1, format!("no `{}` column", cols.lat)))?;
    let lng_idx = find(&cols.lng).ok_or_else(|| parse_err(path, 1, format!("no `{}` column", cols.lng)))?;
    let name_idx = match &cols.name {
        Some(n) => Some(find(n).ok_or_else(|| parse_err(path, 1, format!("no `{n}` column")))?),
        None => find("city").or_else(|| find("name")),
    };

    let mut out = CitiesDataset { names: Vec::new(), lat: Vec::new(), lng: Vec::new() };
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = |idx: usize, what: &str| -> Result<f64> {
            let raw = rec.get(idx).ok_or_else(|| parse_err(path, line, format!("missing {what}")))?;
            let x: f64 = raw.trim().parse().map_err(|_| parse_err(path, line, format!("{what} `{raw}` is not a number")))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(parse_err(path, line, format!("{what} is not finite")))
            }
        };
        let lat = field(lat_idx, "latitude")?;
        let lng = field(lng_idx, "longitude")?;
        if !(-90.0..=90.0).contains(&lat) {
            return Err(parse_err(path, line, format!("latitude {lat} outside [-90, 90]")));
        }
        if !(-180.0..=180.0).contains(&lng) {
            return Err(parse_err(path, line, format!("longitude {lng} outside [-180, 180]")));
        }
        let name = name_idx.and_then(|k| rec.get(k)).unwrap_or("").to_string();
        out.names.push(name);
        out.lat.push(lat);
        out.lng.push(lng);
    }
    Ok(out)
}

/// Draws `n_sub` rows without replacement; points are `(lng, lat)` in degrees,
/// kept in file order, and the domain is their bounding box.
pub fn subsample_cities(data: &CitiesDataset, n_sub: usize, seed: u64, source: &str) -> Result<PointConfig> {
    if n_sub > data.len() {
        return Err(Error::invalid(format!("requested {n_sub} cities but the file has {}", data.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = rand::seq::index::sample(&mut rng, data.len(), n_sub).into_vec();
    idx.sort_unstable();
    let mut xy = Vec::with_capacity(2 * n_sub);
    for &i in &idx {
        xy.push(data.lng[i]);
        xy.push(data.lat[i]);
    }
    let coords = Coords::new(n_sub, 2, xy)?;
    let (lo, hi) = bounding_box(&coords);
    let domain = Domain::rect([lo[0], lo[1]], [hi[0], hi[1]])?;
    PointConfig::new(coords, domain, Provenance::Loaded(source.to_string()))
}

fn bounding_box(c: &Coords) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in c.rows() {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

pub fn ingest_cities(path: &Path, n_sub: usize, seed: u64) -> Result<PointConfig> {
    ingest_cities_with(path, n_sub, seed, &CityColumns::default())
}

pub fn ingest_cities_with(path: &Path, n_sub: usize, seed: u64, cols: &CityColumns) -> Result<PointConfig> {
    let data = read_cities(path, cols)?;
    subsample_cities(&data, n_sub, seed, &path.display().to_string())
}
