//! Daily Earth-Sun distance, Earth-Moon distance and maximum tide height.
//!
//! Input is three CSV files keyed by day of year:
//!
//! | file  | header                              |
//! |-------|-------------------------------------|
//! | sun   | `doy,d_es_au`                       |
//! | moon  | `doy,d_em_km` or `doy,d_em_au`      |
//! | tide  | `doy,h_ft` (several rows per day ok) |

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::PhenomenaError;
use crate::data::DataTable;

pub const KM_PER_AU: f64 = 1.495978707e8;

/// The sun moves the moon's orbit and both pull on the water.
pub const MODEL: &str = "digraph {
    ESd [label=\"Earth-Sun distance\"];
    EMd [label=\"Earth-Moon distance\"];
    h [label=\"tide height\"];
    ESd -> EMd -> h;
    ESd -> h;
}
";

#[derive(Debug, Clone)]
pub struct TideDataset {
    /// Columns `ESd` (AU), `EMd` (AU), `h` (ft), one row per joined day.
    pub table: DataTable,
    /// Days present in some file but not all three.
    pub dropped_days: Vec<u32>,
}

enum Keep {
    Unique,
    Max,
}

/// Reads `doy,<value>` rows. `units` maps accepted value headers to a scale
/// factor; `mismatched` lists headers that name the right quantity in the
/// wrong unit.
fn read_series<R: Read>(
    reader: R,
    file: &str,
    units: &[(&str, f64)],
    mismatched: &[&str],
    keep: Keep,
) -> Result<BTreeMap<u32, f64>, PhenomenaError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = units
        .iter()
        .map(|(h, _)| format!("`doy,{h}`"))
        .collect::<Vec<_>>()
        .join(" or ");
    let found = headers.iter().collect::<Vec<_>>().join(",");
    if headers.len() != 2 || &headers[0] != "doy" {
        return Err(PhenomenaError::BadHeader {
            file: file.into(),
            expected,
            found,
        });
    }
    let scale = match units.iter().find(|(h, _)| *h == &headers[1]) {
        Some((_, s)) => *s,
        None if mismatched.contains(&&headers[1]) => {
            return Err(PhenomenaError::UnitMismatch {
                file: file.into(),
                found: headers[1].to_string(),
                expected,
            })
        }
        None => {
            return Err(PhenomenaError::BadHeader {
                file: file.into(),
                expected,
                found,
            })
        }
    };
    let positive = !matches!(keep, Keep::Max);
    let mut out = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i + 2, |p| p.line() as usize);
        let bad = |message: String| PhenomenaError::Malformed {
            file: file.into(),
            line,
            message,
        };
        if rec.len() != 2 {
            return Err(bad(format!("expected 2 fields, found {}", rec.len())));
        }
        let doy: u32 = rec[0]
            .parse()
            .ok()
            .filter(|d| (1..=366).contains(d))
            .ok_or_else(|| bad(format!("day of year `{}` is not an integer in 1..=366", &rec[0])))?;
        let v: f64 = rec[1]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| bad(format!("`{}` is not a finite number", &rec[1])))?;
        if positive && v <= 0.0 {
            return Err(bad(format!("distance {v} is not positive")));
        }
        let v = v * scale;
        match keep {
            Keep::Unique => {
                if out.insert(doy, v).is_some() {
                    return Err(bad(format!("day {doy} appears twice")));
                }
            }
            Keep::Max => {
                let e = out.entry(doy).or_insert(v);
                *e = e.max(v);
            }
        }
    }
    Ok(out)
}

/// Inner join of the three series on day of year. Days missing from any file
/// are dropped with a warning and listed in the result.
pub fn read_tide_dataset<A: Read, B: Read, C: Read>(es: A, em: B, tide: C) -> Result<TideDataset, PhenomenaError> {
    let es = read_series(
        es,
        "earth-sun",
        &[("d_es_au", 1.0)],
        &["d_es_km", "d_es_m"],
        Keep::Unique,
    )?;
    let em = read_series(
        em,
        "earth-moon",
        &[("d_em_km", 1.0 / KM_PER_AU), ("d_em_au", 1.0)],
        &["d_em_m", "d_em_mi"],
        Keep::Unique,
    )?;
    let tide = read_series(tide, "tide", &[("h_ft", 1.0)], &["h_m", "h_cm"], Keep::Max)?;

    let mut days: Vec<u32> = es.keys().chain(em.keys()).chain(tide.keys()).copied().collect();
    days.sort_unstable();
    days.dedup();
    let (mut esd, mut emd, mut h, mut dropped) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for d in days {
        match (es.get(&d), em.get(&d), tide.get(&d)) {
            (Some(a), Some(b), Some(c)) => {
                esd.push(*a);
                emd.push(*b);
                h.push(*c);
            }
            _ => {
                log::warn!("day {d} is missing from at least one tide input; dropped");
                dropped.push(d);
            }
        }
    }
    if h.is_empty() {
        return Err(PhenomenaError::NoCommonDays);
    }
    let table = DataTable::new(vec![("ESd".into(), esd), ("EMd".into(), emd), ("h".into(), h)])?;
    Ok(TideDataset {
        table,
        dropped_days: dropped,
    })
}

pub fn load_tide_dataset(
    es: impl AsRef<Path>,
    em: impl AsRef<Path>,
    tide: impl AsRef<Path>,
) -> Result<TideDataset, PhenomenaError> {
    read_tide_dataset(
        std::fs::File::open(es)?,
        std::fs::File::open(em)?,
        std::fs::File::open(tide)?,
    )
}

/// CSV text for the three inputs of [`read_tide_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct TideFixture {
    pub earth_sun: String,
    pub earth_moon: String,
    pub tide: String,
}

/// Parameters of the synthetic tide model
/// `h = h0 + a/(d_EM/d̄_EM)³ + b/(d_ES/d̄_ES)³ + noise`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TideModel {
    pub h0: f64,
    pub a: f64,
    pub b: f64,
    pub noise_sd: f64,
    /// Change of the Earth-Moon distance per unit change of the Earth-Sun
    /// distance (AU per AU).
    pub solar_coupling: f64,
}

impl Default for TideModel {
    fn default() -> Self {
        TideModel {
            h0: 3.0,
            a: 2.5,
            b: 0.0025,
            noise_sd: 0.05,
            solar_coupling: 0.003,
        }
    }
}

const EARTH_ECCENTRICITY: f64 = 0.0167;
const PERIHELION_DOY: f64 = 3.0;
const YEAR_DAYS: f64 = 365.256;
const MOON_MEAN_KM: f64 = 384_400.0;
const MOON_ECCENTRICITY: f64 = 0.0549;
const ANOMALISTIC_MONTH: f64 = 27.5546;
const PERIGEE_DOY: f64 = 21.0;

/// One year of synthetic inputs. The moon file is in kilometres and the
/// tide file has two high-water readings per day.
pub fn synthetic_tide_fixture(model: &TideModel, days: u32, seed: u64) -> TideFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fx = TideFixture {
        earth_sun: "doy,d_es_au\n".into(),
        earth_moon: "doy,d_em_km\n".into(),
        tide: "doy,h_ft\n".into(),
    };
    for doy in 1..=days {
        let t = doy as f64;
        let ds = 1.0 - EARTH_ECCENTRICITY * (TAU * (t - PERIHELION_DOY) / YEAR_DAYS).cos();
        let dm_km = MOON_MEAN_KM * (1.0 - MOON_ECCENTRICITY * (TAU * (t - PERIGEE_DOY) / ANOMALISTIC_MONTH).cos())
            + model.solar_coupling * (ds - 1.0) * KM_PER_AU;
        let dm = dm_km / MOON_MEAN_KM;
        let noise: f64 = rng.sample(StandardNormal);
        let h = model.h0 + model.a / dm.powi(3) + model.b / ds.powi(3) + model.noise_sd * noise;
        let lower = h - 0.3 - 0.4 * rng.random::<f64>();
        let _ = writeln!(fx.earth_sun, "{doy},{ds:.9}");
        let _ = writeln!(fx.earth_moon, "{doy},{dm_km:.3}");
        let (first, second) = if doy % 2 == 0 { (h, lower) } else { (lower, h) };
        let _ = writeln!(fx.tide, "{doy},{first:.4}");
        let _ = writeln!(fx.tide, "{doy},{second:.4}");
    }
    fx
}
