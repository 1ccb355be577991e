//! Current through a heated platinum wire: `V = IR`, `R = ρL/A`,
//! `ρ = ρ0 (1 + α ΔT)`.

use rand::Rng;

use super::PhenomenaError;
use crate::data::DataTable;

/// Full model: temperature acts through resistivity and also directly.
pub const MODEL_A: &str = "digraph {
    T -> rho -> R -> I;
    L -> R;
    A -> R;
    V -> I;
    T -> I;
}
";

/// Direct temperature arm only; the resistivity arm is missing.
pub const MODEL_B: &str = "digraph {
    rho -> R -> I;
    L -> R;
    A -> R;
    V -> I;
    T -> I;
}
";

/// The physical model.
pub const MODEL_C: &str = "digraph {
    T -> rho -> R -> I;
    L -> R;
    A -> R;
    V -> I;
}
";

pub const COLUMNS: [&str; 7] = ["V", "L", "A", "T", "rho", "R", "I"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmConstants {
    /// Resistivity at the reference temperature, ohm metres.
    pub rho0: f64,
    /// Temperature coefficient, per kelvin.
    pub alpha: f64,
    /// Reference temperature, kelvin. `T` columns are offsets from it.
    pub t0: f64,
}

impl Default for OhmConstants {
    /// Platinum.
    fn default() -> Self {
        OhmConstants {
            rho0: 1.06e-7,
            alpha: 3.92e-3,
            t0: 293.15,
        }
    }
}

/// Closed sampling intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmRanges {
    pub v: (f64, f64),
    pub l: (f64, f64),
    pub a: (f64, f64),
    pub dt: (f64, f64),
}

impl Default for OhmRanges {
    fn default() -> Self {
        OhmRanges {
            v: (1.0, 10.0),
            l: (0.5, 2.0),
            a: (1e-7, 1e-6),
            dt: (0.0, 100.0),
        }
    }
}

impl OhmRanges {
    fn validate(&self) -> Result<(), PhenomenaError> {
        let checks = [
            ("V", self.v, f64::MIN_POSITIVE),
            ("L", self.l, f64::MIN_POSITIVE),
            ("A", self.a, f64::MIN_POSITIVE),
            ("T", self.dt, 0.0),
        ];
        for (name, (low, high), min) in checks {
            if !(low >= min && low <= high && high.is_finite()) {
                return Err(PhenomenaError::BadRange { name, low, high, min });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmRow {
    pub v: f64,
    pub l: f64,
    pub a: f64,
    pub dt: f64,
    pub rho: f64,
    pub r: f64,
    pub i: f64,
}

impl OhmRow {
    pub fn compute(v: f64, l: f64, a: f64, dt: f64, c: &OhmConstants) -> OhmRow {
        let rho = c.rho0 * (1.0 + c.alpha * dt);
        let r = rho * l / a;
        OhmRow {
            v,
            l,
            a,
            dt,
            rho,
            r,
            i: v / r,
        }
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

/// `n` rows with `V`, `L`, `A`, `ΔT` uniform on their ranges and the rest
/// computed; columns are [`COLUMNS`].
pub fn generate_ohm_dataset<R: Rng + ?Sized>(
    n: usize,
    ranges: &OhmRanges,
    constants: &OhmConstants,
    rng: &mut R,
) -> Result<DataTable, PhenomenaError> {
    ranges.validate()?;
    let rows: Vec<OhmRow> = (0..n)
        .map(|_| {
            let v = uniform(rng, ranges.v);
            let l = uniform(rng, ranges.l);
            let a = uniform(rng, ranges.a);
            let dt = uniform(rng, ranges.dt);
            OhmRow::compute(v, l, a, dt, constants)
        })
        .collect();
    Ok(ohm_table(&rows)?)
}

pub fn ohm_table(rows: &[OhmRow]) -> Result<DataTable, crate::data::DataError> {
    let col = |f: fn(&OhmRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    DataTable::new(vec![
        ("V".into(), col(|r| r.v)),
        ("L".into(), col(|r| r.l)),
        ("A".into(), col(|r| r.a)),
        ("T".into(), col(|r| r.dt)),
        ("rho".into(), col(|r| r.rho)),
        ("R".into(), col(|r| r.r)),
        ("I".into(), col(|r| r.i)),
    ])
}
